//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use ndarray::{Array1, Array2, Array3};

pub const GRID_STEP: f64 = 0.02;
const GRID_UNITS: usize = 50;

/// Every way of splitting at most `GRID_UNITS` units among `r` real nodes.
fn compositions(r: usize) -> Vec<Vec<usize>> {
    fn rec(r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for u in 0..=left {
            cur.push(u);
            rec(r, left - u, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, GRID_UNITS, &mut Vec::new(), &mut out);
    out
}

/// Exact solution of the last free column given the residual capacities: each
/// real node accepts up to its own cap, so filling cheapest nodes first is
/// optimal.
fn greedy_column(cost: &Array2<f64>, kappa: &Array3<f64>, load: &Array2<f64>, j: usize) -> f64 {
    let (n, _, k) = kappa.dim();
    let fict = n - 1;
    let mut caps: Vec<(f64, f64)> = (0..fict)
        .map(|i| {
            let mut cap = 1.0_f64;
            for r in 0..k {
                if kappa[[i, j, r]] > 0.0 {
                    cap = cap.min(((1.0 - load[[i, r]]) / kappa[[i, j, r]]).max(0.0));
                }
            }
            (cost[[i, j]], cap)
        })
        .collect();
    caps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut mass = 1.0;
    let mut total = 0.0;
    for (c, cap) in caps {
        if c >= cost[[fict, j]] || mass <= 0.0 {
            break;
        }
        let take = cap.min(mass);
        total += take * c;
        mass -= take;
    }
    total + mass * cost[[fict, j]]
}

/// Columns that cost nothing anywhere and load nothing can be dropped.
fn is_trivial(cost: &Array2<f64>, arrival: &Array1<f64>, kappa: &Array3<f64>, j: usize) -> bool {
    arrival[j] == 0.0
        || (cost.column(j).iter().all(|&c| c == 0.0)
            && kappa.index_axis(ndarray::Axis(1), j).iter().all(|&x| x == 0.0))
}

/// Minimum of the placement program over policies whose non-last active
/// columns lie on the 0.02 grid (last active column solved exactly). The
/// result `G` satisfies `LP* <= G <= LP* + grid_tolerance(..)`.
pub fn grid_search(cost: &Array2<f64>, arrival: &Array1<f64>, kappa: &Array3<f64>) -> f64 {
    let (n, m, k) = kappa.dim();
    let real = n - 1;
    let active: Vec<usize> = (0..m).filter(|&j| !is_trivial(cost, arrival, kappa, j)).collect();
    let Some((&last, gridded)) = active.split_last() else {
        return 0.0;
    };
    let mut search = GridSearch {
        cost,
        arrival,
        kappa,
        gridded,
        last,
        comps: compositions(real),
        load: Array2::zeros((real, k)),
        best: f64::INFINITY,
    };
    search.descend(0, 0.0);
    search.best
}

struct GridSearch<'a> {
    cost: &'a Array2<f64>,
    arrival: &'a Array1<f64>,
    kappa: &'a Array3<f64>,
    gridded: &'a [usize],
    last: usize,
    comps: Vec<Vec<usize>>,
    load: Array2<f64>,
    best: f64,
}

impl GridSearch<'_> {
    fn descend(&mut self, idx: usize, acc: f64) {
        let (n, _, k) = self.kappa.dim();
        let fict = n - 1;
        if idx == self.gridded.len() {
            let v = acc + self.arrival[self.last] * greedy_column(self.cost, self.kappa, &self.load, self.last);
            self.best = self.best.min(v);
            return;
        }
        let j = self.gridded[idx];
        for c in 0..self.comps.len() {
            let mut col_cost = 0.0;
            let mut mass = 0.0;
            for i in 0..fict {
                let p = self.comps[c][i] as f64 * GRID_STEP;
                mass += p;
                col_cost += p * self.cost[[i, j]];
                for r in 0..k {
                    self.load[[i, r]] += p * self.kappa[[i, j, r]];
                }
            }
            if self.load.iter().all(|&x| x <= 1.0 + 1e-12) {
                col_cost += (1.0 - mass).max(0.0) * self.cost[[fict, j]];
                self.descend(idx + 1, acc + self.arrival[j] * col_cost);
            }
            for i in 0..fict {
                let p = self.comps[c][i] as f64 * GRID_STEP;
                for r in 0..k {
                    self.load[[i, r]] -= p * self.kappa[[i, j, r]];
                }
            }
        }
    }
}

/// Worst-case objective loss from rounding every gridded entry down by one step.
pub fn grid_tolerance(cost: &Array2<f64>, arrival: &Array1<f64>, kappa: &Array3<f64>) -> f64 {
    let (n, m, _) = kappa.dim();
    let active: Vec<usize> = (0..m).filter(|&j| !is_trivial(cost, arrival, kappa, j)).collect();
    let gridded = &active[..active.len().saturating_sub(1)];
    GRID_STEP * (n - 1) as f64 * gridded.iter().map(|&j| arrival[j]).sum::<f64>() + 1e-9
}

/// `Σ_i Σ_j p_ij λ_j c_ij` by plain loops.
pub fn naive_f(p: &Array2<f64>, cost: &Array2<f64>, arrival: &Array1<f64>) -> f64 {
    let mut total = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            total += p[[i, j]] * arrival[j] * cost[[i, j]];
        }
    }
    total
}

/// `g_ik = Σ_j p_ij κ_ijk` by plain loops.
pub fn naive_g(p: &Array2<f64>, kappa: &Array3<f64>) -> Array2<f64> {
    let (n, m, k) = kappa.dim();
    let mut g = Array2::zeros((n, k));
    for i in 0..n {
        for r in 0..k {
            let mut s = 0.0;
            for j in 0..m {
                s += p[[i, j]] * kappa[[i, j, r]];
            }
            g[[i, r]] = s;
        }
    }
    g
}

/// Bernoulli relative entropy written out independently of the library.
pub fn kl(mu: f64, gamma: f64) -> f64 {
    let a = if mu > 0.0 { mu * (mu / gamma).ln() } else { 0.0 };
    let b = if mu < 1.0 { (1.0 - mu) * ((1.0 - mu) / (1.0 - gamma)).ln() } else { 0.0 };
    a + b
}

/// Spacing below which two bounds are considered the same point.
pub const KL_STEP: f64 = 1e-9;

/// Checks one `(mu, n, t)` triple against the bound properties: tightness on
/// both sides, monotonicity in `n` and `t`, mirror symmetry, and the Hoeffding
/// radius implied by Pinsker's inequality. Requires `n >= 1`.
pub fn check_kl_triple(mu: f64, n: u64, t: u64) -> Result<(), String> {
    use placement_bandit::{kl_bernoulli, lower_confidence, upper_confidence};
    let ln_t = (t as f64).ln();
    let nf = n as f64;
    let lo = lower_confidence(mu, n, t);
    let hi = upper_confidence(mu, n, t);
    let ctx = format!("mu={mu} n={n} t={t} lo={lo} hi={hi}");

    if !(0.0 <= lo && lo <= mu && mu <= hi && hi <= 1.0) {
        return Err(format!("ordering: {ctx}"));
    }
    if nf * kl(mu, lo) > ln_t + 1e-6 || nf * kl(mu, hi) > ln_t + 1e-6 {
        return Err(format!("bound outside the KL ball: {ctx}"));
    }
    if t == 1 {
        // ln t = 0: the ball is the single point mu.
        if lo != mu || hi != mu {
            return Err(format!("t = 1 must return mu: {ctx}"));
        }
    } else if lo - KL_STEP >= 0.0 && nf * kl(mu, lo - KL_STEP) <= ln_t {
        return Err(format!("lower bound not tight: {ctx}"));
    }
    if t > 1 && hi + KL_STEP <= 1.0 && nf * kl(mu, hi + KL_STEP) <= ln_t {
        return Err(format!("upper bound not tight: {ctx}"));
    }
    if lower_confidence(mu, n + 1, t) < lo || lower_confidence(mu, n, t + 1) > lo {
        return Err(format!("lower bound monotonicity: {ctx}"));
    }
    if upper_confidence(mu, n + 1, t) > hi || upper_confidence(mu, n, t + 1) < hi {
        return Err(format!("upper bound monotonicity: {ctx}"));
    }
    if (hi - (1.0 - lower_confidence(1.0 - mu, n, t))).abs() > 1e-8 {
        return Err(format!("symmetry: {ctx}"));
    }
    let radius = (ln_t / (2.0 * nf)).sqrt();
    if lo < mu - radius - 1e-12 || hi > mu + radius + 1e-12 {
        return Err(format!("wider than the Hoeffding radius {radius}: {ctx}"));
    }
    let gamma = 0.5 * (lo + hi).clamp(1e-6, 2.0 - 1e-6);
    if gamma > 0.0 && gamma < 1.0 {
        let d = kl_bernoulli(mu, gamma).map_err(|e| e.to_string())?;
        if d < 2.0 * (mu - gamma).powi(2) - 1e-15 {
            return Err(format!("Pinsker fails at gamma={gamma}: {ctx}"));
        }
    }
    Ok(())
}
