//! Sufficient statistics of the observed history and the confidence bounds
//! derived from them.
//!
//! Load statistics are kept in natural units (`A / β`, so up to `1 / β` per
//! slot). The KL machinery needs values in [0, 1], so load estimates are
//! divided by `kappa_scale` before bounding and multiplied back afterwards.

mod kl;

pub use kl::{kl_bernoulli, lower_confidence, upper_confidence};

use ndarray::{Array1, Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::environment::SlotObservation;
use crate::error::{Error, Result};

/// Running counters owned by the controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationState {
    pub n_place: Array2<u64>,
    pub n_class: Array1<u64>,
    pub cost_sum: Array2<f64>,
    pub demand_sum: Array3<f64>,
    pub slots_elapsed: u64,
    inv_capacity: Array2<f64>,
    kappa_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub lambda_hat: Array1<f64>,
    pub cost_hat: Array2<f64>,
    /// In natural load units, within `[0, kappa_scale]`.
    pub kappa_hat: Array3<f64>,
}

/// Optimistic arrival and cost bounds and a pessimistic load bound for one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBounds {
    pub lambda_lower: Array1<f64>,
    pub cost_lower: Array2<f64>,
    pub kappa_upper: Array3<f64>,
}

/// Smallest scale that keeps every per-slot load increment `A / β` within [0, 1]
/// after division, for demands in [0, 1].
pub fn default_kappa_scale(capacity: &Array2<f64>) -> f64 {
    capacity
        .iter()
        .filter(|b| b.is_finite())
        .map(|b| 1.0 / b)
        .fold(1.0_f64, f64::max)
}

impl ObservationState {
    /// `capacity` is the known N×K capacity matrix (last row infinite).
    pub fn new(capacity: &Array2<f64>, n_classes: usize, kappa_scale: Option<f64>) -> Result<Self> {
        let (n, k) = capacity.dim();
        if n < 2 || n_classes < 2 || k < 1 {
            return Err(Error::InvalidArgument(format!(
                "need N >= 2, M >= 2, K >= 1 (got {n}, {n_classes}, {k})"
            )));
        }
        let kappa_scale = kappa_scale.unwrap_or_else(|| default_kappa_scale(capacity));
        if !(kappa_scale > 0.0 && kappa_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa_scale must be positive, got {kappa_scale}"
            )));
        }
        let inv_capacity = capacity.mapv(|b| if b.is_finite() { 1.0 / b } else { 0.0 });
        Ok(Self {
            n_place: Array2::zeros((n, n_classes)),
            n_class: Array1::zeros(n_classes),
            cost_sum: Array2::zeros((n, n_classes)),
            demand_sum: Array3::zeros((n, n_classes, k)),
            slots_elapsed: 0,
            inv_capacity,
            kappa_scale,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_place.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.n_class.len()
    }

    pub fn n_resources(&self) -> usize {
        self.inv_capacity.ncols()
    }

    pub fn kappa_scale(&self) -> f64 {
        self.kappa_scale
    }

    /// Index `t` of the next decision slot.
    pub fn current_slot(&self) -> u64 {
        self.slots_elapsed + 1
    }

    /// Folds one completed slot into the counters.
    pub fn record_slot(
        &mut self,
        obs: &SlotObservation,
        chosen_node: usize,
        realized_cost: f64,
    ) -> Result<()> {
        let expected = self.slots_elapsed + 1;
        if obs.slot != expected {
            return Err(Error::SlotOrder {
                expected,
                got: obs.slot,
            });
        }
        let (n, m, k) = (self.n_nodes(), self.n_classes(), self.n_resources());
        if chosen_node >= n {
            return Err(Error::NodeOutOfRange {
                node: chosen_node,
                n_nodes: n,
            });
        }
        let j = obs.arrived_class;
        if j >= m {
            return Err(Error::Dimension(format!("class {j} out of range for {m} classes")));
        }
        if obs.demands.dim() != (n, k) {
            return Err(Error::Dimension(format!(
                "demands {:?}, expected ({n}, {k})",
                obs.demands.dim()
            )));
        }
        if !(0.0..=1.0).contains(&realized_cost) {
            return Err(Error::InvalidArgument(format!(
                "realized cost {realized_cost} outside [0, 1]"
            )));
        }

        self.n_class[j] += 1;
        self.n_place[[chosen_node, j]] += 1;
        self.cost_sum[[chosen_node, j]] += realized_cost;
        for i in 0..n {
            for kk in 0..k {
                let load = obs.demands[[i, kk]] * self.inv_capacity[[i, kk]];
                self.demand_sum[[i, j, kk]] += load.min(self.kappa_scale);
            }
        }
        self.slots_elapsed += 1;
        Ok(())
    }

    /// Empirical means. Zero-count cells default to 0.
    pub fn estimates(&self) -> Estimates {
        let elapsed = self.slots_elapsed as f64;
        let lambda_hat = if self.slots_elapsed == 0 {
            Array1::zeros(self.n_classes())
        } else {
            self.n_class.mapv(|c| (c as f64 / elapsed).clamp(0.0, 1.0))
        };
        let cost_hat = Array2::from_shape_fn(self.n_place.dim(), |(i, j)| {
            let cnt = self.n_place[[i, j]];
            if cnt == 0 {
                0.0
            } else {
                (self.cost_sum[[i, j]] / cnt as f64).clamp(0.0, 1.0)
            }
        });
        let kappa_hat = if self.slots_elapsed == 0 {
            Array3::zeros(self.demand_sum.dim())
        } else {
            self.demand_sum
                .mapv(|s| (s / elapsed).clamp(0.0, self.kappa_scale))
        };
        Estimates {
            lambda_hat,
            cost_hat,
            kappa_hat,
        }
    }

    /// Confidence bounds for the current decision slot `t = slots_elapsed + 1`.
    ///
    /// Arrival and load bounds use `t` samples (none before the first
    /// observation), cost bounds use the placement count of each cell. The
    /// fictitious node keeps its known cost 1 and zero load; the null class
    /// keeps zero cost and zero load.
    pub fn bounds(&self) -> ConfidenceBounds {
        let t = self.current_slot();
        let shared_samples = if self.slots_elapsed == 0 { 0 } else { t };
        let est = self.estimates();
        let (n, m, k) = (self.n_nodes(), self.n_classes(), self.n_resources());
        let fict = n - 1;
        let null = m - 1;

        let lambda_lower = est
            .lambda_hat
            .mapv(|l| lower_confidence(l, shared_samples, t));

        let mut cost_lower = Array2::zeros((n, m));
        for i in 0..n {
            for j in 0..m {
                cost_lower[[i, j]] = if j == null {
                    0.0
                } else if i == fict {
                    1.0
                } else {
                    lower_confidence(est.cost_hat[[i, j]], self.n_place[[i, j]], t)
                };
            }
        }

        let scale = self.kappa_scale;
        let mut kappa_upper = Array3::zeros((n, m, k));
        for i in 0..fict {
            for j in 0..null {
                for kk in 0..k {
                    let mu = est.kappa_hat[[i, j, kk]] / scale;
                    kappa_upper[[i, j, kk]] = scale * upper_confidence(mu, shared_samples, t);
                }
            }
        }

        ConfidenceBounds {
            lambda_lower,
            cost_lower,
            kappa_upper,
        }
    }
}
