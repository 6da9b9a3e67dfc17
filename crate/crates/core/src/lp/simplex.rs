//! Dense primal simplex for `min c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! With a nonnegative right-hand side the slack basis is feasible, so no
//! artificial phase is needed. Pricing is Dantzig's rule with lowest-index tie
//! breaking; after a run of degenerate pivots it switches to Bland's rule for
//! the rest of the solve.

/// Reduced-cost optimality tolerance.
pub const OPT_TOL: f64 = 1e-9;
/// Smallest admissible pivot magnitude.
pub const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    /// Values of the structural variables (slacks dropped).
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    reduced: Vec<f64>,
    value: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        {
            let row = &mut self.data[pr * w..(pr + 1) * w];
            row.iter_mut().for_each(|x| *x *= inv);
            row[pc] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[pc] = 0.0;
                let last = w - 1;
                if row[last] < 0.0 {
                    row[last] = 0.0;
                }
            }
        }
        let f = self.reduced[pc];
        if f != 0.0 {
            for (d, &p) in self.reduced.iter_mut().zip(prow[..w - 1].iter()) {
                *d -= f * p;
            }
            self.reduced[pc] = 0.0;
            self.value += f * prow[w - 1];
        }
        self.basis[pr] = pc;
    }
}

/// Solves the problem; `a` is row-major with `b.len()` rows and `c.len()` columns.
pub fn minimize(c: &[f64], a: &[f64], b: &[f64], max_pivots: usize) -> Outcome {
    let n = c.len();
    let m = b.len();
    assert_eq!(a.len(), n * m, "constraint matrix shape");
    assert!(b.iter().all(|&v| v >= 0.0), "right-hand side must be nonnegative");

    let cols = n + m;
    let width = cols + 1;
    let mut data = vec![0.0; m * width];
    for r in 0..m {
        let row = &mut data[r * width..(r + 1) * width];
        row[..n].copy_from_slice(&a[r * n..(r + 1) * n]);
        row[n + r] = 1.0;
        row[cols] = b[r];
    }
    let mut reduced = vec![0.0; cols];
    reduced[..n].copy_from_slice(c);
    let mut t = Tableau {
        rows: m,
        width,
        data,
        reduced,
        value: 0.0,
        basis: (n..n + m).collect(),
    };

    let degenerate_limit = 10 * m.max(1);
    let mut degenerate_run = 0;
    let mut bland = false;
    let mut pivots = 0;
    let status = loop {
        let entering = if bland {
            t.reduced.iter().position(|&d| d < -OPT_TOL)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for (j, &d) in t.reduced.iter().enumerate() {
                if d < -OPT_TOL && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| j)
        };
        let Some(pc) = entering else {
            break Status::Optimal;
        };
        if pivots >= max_pivots {
            break Status::IterationLimit;
        }

        let mut leave: Option<(usize, f64)> = None;
        for r in 0..t.rows {
            let coef = t.at(r, pc);
            if coef <= PIVOT_TOL {
                continue;
            }
            let ratio = t.rhs(r) / coef;
            leave = match leave {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - RATIO_TIE_TOL
                        || (ratio <= bratio + RATIO_TIE_TOL && t.basis[r] < t.basis[br])
                    {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        let Some((pr, ratio)) = leave else {
            // unbounded direction; cannot occur for bounded feasible sets, treat as converged
            break Status::Optimal;
        };
        if ratio <= RATIO_TIE_TOL {
            degenerate_run += 1;
            if degenerate_run > degenerate_limit {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        t.pivot(pr, pc);
        pivots += 1;
    };

    let mut x = vec![0.0; n];
    for (r, &var) in t.basis.iter().enumerate() {
        if var < n {
            x[var] = t.rhs(r).max(0.0);
        }
    }
    Outcome {
        status,
        x,
        objective: t.value,
        pivots,
    }
}
