use crate::error::Result;
use crate::lp::oracle_policy;
use crate::model::{max_constraint, objective_f, KappaTensor, Policy, ProblemInstance};

/// Below this optimal cost the relative gap is replaced by the absolute gap.
pub const DEGENERATE_F_STAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGap {
    pub value: f64,
    /// Set when `f*` was too small to divide by and `value` is the absolute gap.
    pub degenerate: bool,
}

/// True parameters plus the optimal static policy, for scoring learned policies.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub instance: ProblemInstance,
    pub policy: Policy,
    pub f_star: f64,
    pub kappa: KappaTensor,
}

impl Oracle {
    pub fn new(instance: &ProblemInstance) -> Result<Self> {
        let (policy, f_star) = oracle_policy(instance)?;
        Ok(Self {
            instance: instance.clone(),
            policy,
            f_star,
            kappa: instance.kappa(),
        })
    }

    pub fn cost(&self, policy: &Policy) -> Result<f64> {
        objective_f(policy, self.instance.cost_mean(), self.instance.arrival_prob())
    }

    pub fn relative_gap(&self, policy: &Policy) -> Result<RelativeGap> {
        Ok(gap_from_costs(self.cost(policy)?, self.f_star))
    }

    pub fn max_constraint(&self, policy: &Policy) -> Result<f64> {
        max_constraint(policy, &self.kappa)
    }
}

pub(crate) fn gap_from_costs(f: f64, f_star: f64) -> RelativeGap {
    if f_star < DEGENERATE_F_STAR {
        RelativeGap {
            value: f - f_star,
            degenerate: true,
        }
    } else {
        RelativeGap {
            value: (f - f_star) / f_star,
            degenerate: false,
        }
    }
}

/// `(f(p) - f*) / f*` under the true parameters of `instance`.
pub fn relative_gap(policy: &Policy, instance: &ProblemInstance) -> Result<RelativeGap> {
    Oracle::new(instance)?.relative_gap(policy)
}

/// Worst-case per-slot regret guarantee
/// `(N M / T) [2 (√2 + 1) √(T ln T) + 6 K (1 + ln T)]`, with real node and
/// class counts.
pub fn theorem_bound(n_nodes: usize, n_classes: usize, n_resources: usize, horizon: u64) -> f64 {
    let t = horizon as f64;
    let ln_t = t.ln();
    let nm = (n_nodes * n_classes) as f64;
    nm / t * (2.0 * (2f64.sqrt() + 1.0) * (t * ln_t).sqrt() + 6.0 * n_resources as f64 * (1.0 + ln_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::sample_instance;

    #[test]
    fn bound_at_reference_size() {
        let b = theorem_bound(10, 3, 2, 10_000);
        assert!((b - 4.763644).abs() < 1e-6, "{b}");
    }

    #[test]
    fn bound_decreases_for_large_horizons() {
        let mut prev = theorem_bound(5, 2, 2, 100);
        for t in [1_000, 10_000, 100_000, 1_000_000] {
            let b = theorem_bound(5, 2, 2, t);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn unit_bound_arithmetic() {
        // N = M = K = 1, T = 3: (1/3) [2 (√2+1) √(3 ln 3) + 6 (1 + ln 3)]
        let ln3 = 3f64.ln();
        let expected = (2.0 * (2f64.sqrt() + 1.0) * (3.0 * ln3).sqrt() + 6.0 * (1.0 + ln3)) / 3.0;
        assert!((theorem_bound(1, 1, 1, 3) - expected).abs() < 1e-12);
        assert!((expected - 7.119138).abs() < 1e-6);
    }

    #[test]
    fn gap_of_oracle_and_reject_all() {
        let inst = sample_instance(4, 2, 2, 0.1, 3).unwrap();
        let oracle = Oracle::new(&inst).unwrap();
        assert_eq!(oracle.relative_gap(&oracle.policy).unwrap().value, 0.0);
        let reject = Policy::reject_all(5, 3);
        let real_mass: f64 = inst.arrival_prob().iter().take(2).sum();
        let expected = (real_mass - oracle.f_star) / oracle.f_star;
        let got = oracle.relative_gap(&reject).unwrap();
        assert!((got.value - expected).abs() < 1e-12);
        assert!(!got.degenerate);
    }

    #[test]
    fn degenerate_optimum_flags_absolute_gap() {
        let g = gap_from_costs(0.3, 0.0);
        assert!(g.degenerate);
        assert_eq!(g.value, 0.3);
    }
}
