//! The placement linear program.
//!
//! ```text
//! min  Σ_i Σ_j p_ij λ_j c_ij
//! s.t. Σ_j p_ij κ_ijk <= 1        for every real node i and resource k
//!      Σ_i p_ij = 1, p >= 0       for every class j
//! ```
//!
//! The column-sum equalities are eliminated by writing the fictitious-node mass
//! as `1 - Σ_{real} p_ij`, which turns them into `Σ_{real} p_ij <= 1`. Every
//! right-hand side is then nonnegative and the all-reject policy is the starting
//! vertex.

pub mod simplex;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{objective_f, KappaTensor, Policy, ProblemInstance};

/// Primal feasibility tolerance reported with each solution.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PlacementLp {
    cost: Array2<f64>,
    arrival: Array1<f64>,
    kappa: KappaTensor,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub policy: Policy,
    /// `f(p, c, λ)` with the coefficients the program was built from.
    pub objective: f64,
    pub pivots: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
}

/// Reduced form of the program, as handed to the simplex.
#[derive(Debug, Clone, Serialize)]
pub struct LpDump {
    /// `(node, class)` of each structural variable.
    pub variables: Vec<(usize, usize)>,
    pub objective: Vec<f64>,
    /// Constant `Σ_j λ_j c_{fict, j}` removed by the substitution.
    pub objective_offset: f64,
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub row_labels: Vec<String>,
}

impl PlacementLp {
    pub fn new(cost: &Array2<f64>, arrival: &Array1<f64>, kappa: &KappaTensor) -> Result<Self> {
        let (n, m) = cost.dim();
        let (kn, km, _) = kappa.dim();
        if n < 2 || m < 1 {
            return Err(Error::Dimension(format!(
                "need at least one real node and a fictitious node (cost is {n}x{m})"
            )));
        }
        if arrival.len() != m || (kn, km) != (n, m) {
            return Err(Error::Dimension(format!(
                "cost {n}x{m}, arrival {}, kappa {:?}",
                arrival.len(),
                kappa.dim()
            )));
        }
        if kappa
            .tensor()
            .index_axis(ndarray::Axis(0), n - 1)
            .iter()
            .any(|&x| x != 0.0)
        {
            return Err(Error::InvalidArgument(
                "the fictitious node must carry zero load".into(),
            ));
        }
        Ok(Self {
            cost: cost.clone(),
            arrival: arrival.clone(),
            kappa: kappa.clone(),
        })
    }

    fn dims(&self) -> (usize, usize, usize) {
        self.kappa.dim()
    }

    fn reduced_form(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, f64) {
        let (n, m, k) = self.dims();
        let real = n - 1;
        let n_vars = real * m;
        let n_rows = real * k + m;
        let fict = n - 1;

        let mut c = vec![0.0; n_vars];
        for i in 0..real {
            for j in 0..m {
                c[i * m + j] = self.arrival[j] * (self.cost[[i, j]] - self.cost[[fict, j]]);
            }
        }
        let offset: f64 = (0..m).map(|j| self.arrival[j] * self.cost[[fict, j]]).sum();

        let mut a = vec![0.0; n_rows * n_vars];
        for i in 0..real {
            for kk in 0..k {
                let row = i * k + kk;
                for j in 0..m {
                    a[row * n_vars + i * m + j] = self.kappa.get(i, j, kk);
                }
            }
        }
        for j in 0..m {
            let row = real * k + j;
            for i in 0..real {
                a[row * n_vars + i * m + j] = 1.0;
            }
        }
        let b = vec![1.0; n_rows];
        (c, a, b, offset)
    }

    pub fn dump(&self) -> LpDump {
        let (n, m, k) = self.dims();
        let (c, a, b, offset) = self.reduced_form();
        let n_vars = c.len();
        let mut row_labels = Vec::with_capacity(b.len());
        for i in 0..n - 1 {
            for kk in 0..k {
                row_labels.push(format!("load[node={i},resource={kk}]"));
            }
        }
        for j in 0..m {
            row_labels.push(format!("mass[class={j}]"));
        }
        LpDump {
            variables: (0..n - 1).flat_map(|i| (0..m).map(move |j| (i, j))).collect(),
            objective: c,
            objective_offset: offset,
            constraints: a.chunks(n_vars.max(1)).map(|r| r.to_vec()).collect(),
            rhs: b,
            row_labels,
        }
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let (n, m, _) = self.dims();
        let (c, a, b, _) = self.reduced_form();
        let max_pivots = 50 * (c.len() + b.len()).max(1);
        let out = simplex::minimize(&c, &a, &b, max_pivots);

        let mut p = Array2::zeros((n, m));
        for j in 0..m {
            let mut mass = 0.0;
            for i in 0..n - 1 {
                let v = out.x[i * m + j].clamp(0.0, 1.0);
                p[[i, j]] = v;
                mass += v;
            }
            if mass > 1.0 {
                for i in 0..n - 1 {
                    p[[i, j]] /= mass;
                }
                mass = 1.0;
            }
            p[[n - 1, j]] = 1.0 - mass;
        }
        let policy = Policy::new(p)?;
        if out.status == simplex::Status::IterationLimit {
            return Err(Error::LpNotConverged {
                iterations: out.pivots,
                best: Box::new(policy),
            });
        }
        let objective = objective_f(&policy, &self.cost, &self.arrival)?;
        Ok(LpSolution {
            policy,
            objective,
            pivots: out.pivots,
            feasibility_tol: FEASIBILITY_TOL,
            optimality_tol: simplex::OPT_TOL,
        })
    }
}

/// Cost-minimizing policy subject to the load constraints under the supplied
/// (estimated or true) parameters.
pub fn solve_placement_lp(
    cost: &Array2<f64>,
    arrival: &Array1<f64>,
    kappa: &KappaTensor,
) -> Result<Policy> {
    Ok(PlacementLp::new(cost, arrival, kappa)?.solve()?.policy)
}

/// Optimal static policy under the true parameters, and its expected cost.
pub fn oracle_policy(instance: &ProblemInstance) -> Result<(Policy, f64)> {
    let lp = PlacementLp::new(instance.cost_mean(), instance.arrival_prob(), &instance.kappa())?;
    let sol = lp.solve()?;
    Ok((sol.policy, sol.objective))
}
