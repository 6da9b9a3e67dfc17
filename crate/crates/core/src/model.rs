//! Shared domain types and the cost/load algebra.
//!
//! Index conventions: node `N - 1` is the fictitious rejection node (infinite
//! capacity, cost 1) and class `M - 1` is the null class (no arrival, zero cost
//! and zero demand). Everything is zero-based and dense.

use ndarray::{Array1, Array2, Array3, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Capacity value used for the fictitious node.
pub const INFINITE_CAPACITY: f64 = f64::INFINITY;

const SUM_TOL: f64 = 1e-12;
const POLICY_TOL: f64 = 1e-9;

/// Ground-truth parameters of a placement problem. Hidden from the controller
/// except for the capacities, which are known.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    cost_mean: Array2<f64>,
    demand_mean: Array3<f64>,
    capacity: Array2<f64>,
    arrival_prob: Array1<f64>,
    slot_duration_s: f64,
}

impl ProblemInstance {
    /// Builds an instance from full arrays that already contain the fictitious
    /// node (last row) and the null class (last column).
    pub fn new(
        cost_mean: Array2<f64>,
        demand_mean: Array3<f64>,
        capacity: Array2<f64>,
        arrival_prob: Array1<f64>,
        slot_duration_s: f64,
    ) -> Result<Self> {
        let (n, m) = cost_mean.dim();
        let (dn, dm, k) = demand_mean.dim();
        if n < 2 || m < 2 || k < 1 {
            return Err(Error::InvalidInstance(format!(
                "need N >= 2, M >= 2, K >= 1 (got {n}, {m}, {k})"
            )));
        }
        if (dn, dm) != (n, m) {
            return Err(Error::Dimension(format!(
                "demand_mean is {dn}x{dm}x{k}, cost_mean is {n}x{m}"
            )));
        }
        if capacity.dim() != (n, k) {
            return Err(Error::Dimension(format!(
                "capacity is {:?}, expected ({n}, {k})",
                capacity.dim()
            )));
        }
        if arrival_prob.len() != m {
            return Err(Error::Dimension(format!(
                "arrival_prob has {} entries, expected {m}",
                arrival_prob.len()
            )));
        }
        if !(slot_duration_s > 0.0 && slot_duration_s.is_finite()) {
            return Err(Error::InvalidInstance("slot duration must be positive".into()));
        }
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !cost_mean.iter().all(|&c| in_unit(c)) || !demand_mean.iter().all(|&a| in_unit(a)) {
            return Err(Error::InvalidInstance("means must lie in [0, 1]".into()));
        }
        for i in 0..n - 1 {
            for kk in 0..k {
                let b = capacity[[i, kk]];
                if !(b > 0.0 && b.is_finite()) {
                    return Err(Error::InvalidInstance(format!(
                        "capacity[{i}, {kk}] = {b} must be finite and positive"
                    )));
                }
            }
        }
        if capacity.row(n - 1).iter().any(|&b| b != INFINITE_CAPACITY) {
            return Err(Error::InvalidInstance(
                "fictitious node must have infinite capacity".into(),
            ));
        }
        for j in 0..m - 1 {
            if cost_mean[[n - 1, j]] != 1.0 {
                return Err(Error::InvalidInstance(
                    "fictitious node must cost 1 for every real class".into(),
                ));
            }
        }
        if cost_mean.column(m - 1).iter().any(|&c| c != 0.0)
            || demand_mean.index_axis(Axis(1), m - 1).iter().any(|&a| a != 0.0)
        {
            return Err(Error::InvalidInstance(
                "null class must have zero cost and zero demand".into(),
            ));
        }
        validate_arrival(&arrival_prob)?;
        Ok(Self {
            cost_mean,
            demand_mean,
            capacity,
            arrival_prob,
            slot_duration_s,
        })
    }

    /// Replaces the arrival law, e.g. for non-uniform traffic experiments.
    pub fn with_arrival_prob(mut self, arrival_prob: Array1<f64>) -> Result<Self> {
        if arrival_prob.len() != self.n_classes() {
            return Err(Error::Dimension(format!(
                "arrival_prob has {} entries, expected {}",
                arrival_prob.len(),
                self.n_classes()
            )));
        }
        validate_arrival(&arrival_prob)?;
        self.arrival_prob = arrival_prob;
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.cost_mean.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.cost_mean.ncols()
    }

    pub fn n_resources(&self) -> usize {
        self.capacity.ncols()
    }

    pub fn fictitious_node(&self) -> usize {
        self.n_nodes() - 1
    }

    pub fn null_class(&self) -> usize {
        self.n_classes() - 1
    }

    pub fn cost_mean(&self) -> &Array2<f64> {
        &self.cost_mean
    }

    pub fn demand_mean(&self) -> &Array3<f64> {
        &self.demand_mean
    }

    pub fn capacity(&self) -> &Array2<f64> {
        &self.capacity
    }

    pub fn arrival_prob(&self) -> &Array1<f64> {
        &self.arrival_prob
    }

    pub fn slot_duration_s(&self) -> f64 {
        self.slot_duration_s
    }

    /// True normalized loads `λ_j a_ijk / β_ik`.
    pub fn kappa(&self) -> KappaTensor {
        KappaTensor::from_instance(self)
    }
}

fn validate_arrival(arrival_prob: &Array1<f64>) -> Result<()> {
    if arrival_prob.iter().any(|&l| !(0.0..=1.0).contains(&l)) {
        return Err(Error::InvalidInstance("arrival probabilities must lie in [0, 1]".into()));
    }
    let total: f64 = arrival_prob.sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidInstance(format!(
            "arrival probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Column-stochastic placement rule: `p[[i, j]]` is the probability of placing
/// a class-`j` function on node `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    p: Array2<f64>,
}

impl Policy {
    pub fn new(p: Array2<f64>) -> Result<Self> {
        if p.nrows() == 0 || p.ncols() == 0 {
            return Err(Error::InvalidPolicy("empty policy matrix".into()));
        }
        if let Some(x) = p.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidPolicy(format!("entry {x} outside [0, 1]")));
        }
        for (j, col) in p.columns().into_iter().enumerate() {
            let s = col.sum();
            if (s - 1.0).abs() > POLICY_TOL {
                return Err(Error::InvalidPolicy(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { p })
    }

    /// Every class sent to the last node (the rejection sink).
    pub fn reject_all(n_nodes: usize, n_classes: usize) -> Self {
        let mut p = Array2::zeros((n_nodes, n_classes));
        p.row_mut(n_nodes - 1).fill(1.0);
        Self { p }
    }

    pub fn uniform(n_nodes: usize, n_classes: usize) -> Self {
        Self {
            p: Array2::from_elem((n_nodes, n_classes), 1.0 / n_nodes as f64),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.p.ncols()
    }

    pub fn get(&self, node: usize, class: usize) -> f64 {
        self.p[[node, class]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.p
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.p
    }
}

/// Normalized expected loads `κ_ijk`; rows of infinite-capacity nodes are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaTensor(Array3<f64>);

impl KappaTensor {
    pub fn new(kappa: Array3<f64>) -> Result<Self> {
        if kappa.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidArgument(
                "kappa entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(kappa))
    }

    pub fn zeros(n_nodes: usize, n_classes: usize, n_resources: usize) -> Self {
        Self(Array3::zeros((n_nodes, n_classes, n_resources)))
    }

    pub fn from_instance(instance: &ProblemInstance) -> Self {
        let (n, m, k) = instance.demand_mean.dim();
        let kappa = Array3::from_shape_fn((n, m, k), |(i, j, kk)| {
            let beta = instance.capacity[[i, kk]];
            if beta.is_finite() {
                instance.arrival_prob[j] * instance.demand_mean[[i, j, kk]] / beta
            } else {
                0.0
            }
        });
        Self(kappa)
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        self.0.dim()
    }

    pub fn tensor(&self) -> &Array3<f64> {
        &self.0
    }

    pub fn get(&self, node: usize, class: usize, resource: usize) -> f64 {
        self.0[[node, class, resource]]
    }
}

/// Expected per-slot cost `Σ_i Σ_j p_ij λ_j c_ij`.
pub fn objective_f(policy: &Policy, cost: &Array2<f64>, arrival: &Array1<f64>) -> Result<f64> {
    let (n, m) = policy.p.dim();
    if cost.dim() != (n, m) || arrival.len() != m {
        return Err(Error::Dimension(format!(
            "policy {n}x{m}, cost {:?}, arrival {}",
            cost.dim(),
            arrival.len()
        )));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..m {
            total += policy.p[[i, j]] * arrival[j] * cost[[i, j]];
        }
    }
    Ok(total)
}

/// Normalized loads `g_ik = Σ_j p_ij κ_ijk` as an N×K matrix.
pub fn constraint_g(policy: &Policy, kappa: &KappaTensor) -> Result<Array2<f64>> {
    let (n, m) = policy.p.dim();
    let (kn, km, k) = kappa.dim();
    if (kn, km) != (n, m) {
        return Err(Error::Dimension(format!(
            "policy {n}x{m}, kappa {kn}x{km}x{k}"
        )));
    }
    let mut g = Array2::zeros((n, k));
    for i in 0..n {
        for j in 0..m {
            let pij = policy.p[[i, j]];
            if pij == 0.0 {
                continue;
            }
            for kk in 0..k {
                g[[i, kk]] += pij * kappa.0[[i, j, kk]];
            }
        }
    }
    Ok(g)
}

/// Largest normalized load over real nodes and all resources.
pub fn max_constraint(policy: &Policy, kappa: &KappaTensor) -> Result<f64> {
    let g = constraint_g(policy, kappa)?;
    let real = g.nrows() - 1;
    Ok(g.slice(ndarray::s![..real, ..])
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array3};

    fn two_node_policy() -> Policy {
        Policy::new(array![[0.5], [0.5]]).unwrap()
    }

    #[test]
    fn objective_zero_cost_rows() {
        let mut p = Array2::zeros((3, 2));
        p.row_mut(0).fill(1.0);
        let p = Policy::new(p).unwrap();
        let c = array![[0.0, 0.0], [0.7, 0.2], [1.0, 1.0]];
        let lambda = array![0.5, 0.5];
        assert_eq!(objective_f(&p, &c, &lambda).unwrap(), 0.0);
    }

    #[test]
    fn objective_single_cell() {
        let p = Policy::new(array![[1.0], [0.0]]).unwrap();
        let c = array![[0.3], [1.0]];
        let f = objective_f(&p, &c, &array![1.0]).unwrap();
        assert!((f - 0.3).abs() < 1e-15);
    }

    #[test]
    fn objective_dimension_mismatch() {
        let p = two_node_policy();
        let c = array![[0.3, 0.1], [1.0, 1.0]];
        assert!(matches!(
            objective_f(&p, &c, &array![1.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn g_of_zero_kappa_is_zero() {
        let p = Policy::uniform(3, 2);
        let g = constraint_g(&p, &KappaTensor::zeros(3, 2, 2)).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
        assert_eq!(max_constraint(&p, &KappaTensor::zeros(3, 2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn g_single_product() {
        let p = two_node_policy();
        let kappa = KappaTensor::new(Array3::from_shape_vec((2, 1, 1), vec![2.0, 0.0]).unwrap())
            .unwrap();
        let g = constraint_g(&p, &kappa).unwrap();
        assert_eq!(g[[0, 0]], 1.0);
        assert_eq!(g[[1, 0]], 0.0);
        assert_eq!(max_constraint(&p, &kappa).unwrap(), 1.0);
    }

    #[test]
    fn g_dimension_mismatch() {
        let p = two_node_policy();
        assert!(matches!(
            constraint_g(&p, &KappaTensor::zeros(3, 1, 1)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn policy_rejects_non_stochastic_columns() {
        assert!(Policy::new(array![[0.5], [0.4]]).is_err());
        assert!(Policy::new(array![[1.5], [-0.5]]).is_err());
        assert!(Policy::new(array![[0.5 + 1e-10], [0.5]]).is_ok());
    }

    fn tiny_instance() -> ProblemInstance {
        let cost = array![[0.2, 0.0], [1.0, 0.0]];
        let demand = Array3::from_shape_vec((2, 2, 1), vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        let capacity = array![[0.1], [INFINITE_CAPACITY]];
        ProblemInstance::new(cost, demand, capacity, array![0.5, 0.5], 0.01).unwrap()
    }

    #[test]
    fn kappa_from_instance_zeroes_fictitious_row() {
        let inst = tiny_instance();
        let kappa = inst.kappa();
        assert!((kappa.get(0, 0, 0) - 0.5 * 0.5 / 0.1).abs() < 1e-12);
        assert_eq!(kappa.get(1, 0, 0), 0.0);
        assert_eq!(kappa.get(1, 1, 0), 0.0);
    }

    #[test]
    fn instance_invariants_enforced() {
        let demand = Array3::zeros((2, 2, 1));
        let cap = array![[0.1], [INFINITE_CAPACITY]];
        // fictitious node cost must be 1
        assert!(ProblemInstance::new(
            array![[0.2, 0.0], [0.9, 0.0]],
            demand.clone(),
            cap.clone(),
            array![0.5, 0.5],
            0.01
        )
        .is_err());
        // arrival must sum to one
        assert!(ProblemInstance::new(
            array![[0.2, 0.0], [1.0, 0.0]],
            demand.clone(),
            cap.clone(),
            array![0.5, 0.6],
            0.01
        )
        .is_err());
        // fictitious capacity must be infinite
        assert!(ProblemInstance::new(
            array![[0.2, 0.0], [1.0, 0.0]],
            demand,
            array![[0.1], [5.0]],
            array![0.5, 0.5],
            0.01
        )
        .is_err());
    }
}
