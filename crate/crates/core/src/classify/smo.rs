//! Sequential minimal optimization for the C-SVC dual
//!
//! ```text
//! min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K_ij
//! ```
//!
//! Working pairs are chosen by the second-order rule of Fan, Chen and Lin
//! (maximal violating `i`, then the `j` with the largest guaranteed decrease).
//! No shrinking; kernel rows are computed on first use and kept.

use alloc::vec;
use alloc::vec::Vec;

use super::svm::Kernel;
use super::Matrix;

const TAU: f64 = 1e-12;

/// Lazily filled kernel matrix over the rows of one training set.
pub struct KernelCache<'a> {
    x: &'a Matrix,
    kernel: Kernel,
    rows: Vec<Option<Vec<f64>>>,
    diag: Vec<f64>,
}

impl<'a> KernelCache<'a> {
    pub fn new(x: &'a Matrix, kernel: Kernel) -> Self {
        let diag = x.iter_rows().map(|r| kernel.eval(r, r)).collect();
        Self {
            x,
            kernel,
            rows: vec![None; x.rows()],
            diag,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn row(&mut self, i: usize) -> &[f64] {
        self.ensure(i);
        self.cached(i)
    }

    fn ensure(&mut self, i: usize) {
        if self.rows[i].is_none() {
            let xi = self.x.row(i);
            let kernel = self.kernel;
            let r = self.x.iter_rows().map(|xj| kernel.eval(xi, xj)).collect();
            self.rows[i] = Some(r);
        }
    }

    fn cached(&self, i: usize) -> &[f64] {
        self.rows[i].as_deref().expect("row computed by ensure")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoSettings {
    pub cost: f64,
    /// Stop when the maximal violating pair gap drops below this.
    pub tolerance: f64,
    /// Iteration cap; defaults to `max(10^7, 100 n)`.
    pub max_iter: Option<usize>,
    /// Record the dual objective after every iteration.
    pub record_objective: bool,
}

impl SmoSettings {
    pub fn new(cost: f64, tolerance: f64) -> Self {
        Self {
            cost,
            tolerance,
            max_iter: None,
            record_objective: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function is `sum_i alpha_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    /// Gradient of the minimized objective, `Q alpha - e`.
    pub gradient: Vec<f64>,
    pub iterations: usize,
    /// Dual objective `e'a - 1/2 a'Qa` at the solution.
    pub dual_objective: f64,
    /// Dual objective after each iteration, when requested.
    pub objective_trace: Vec<f64>,
    /// Final maximal violating pair gap `m(a) - M(a)`.
    pub max_violation: f64,
    /// `false` if the iteration cap was hit first.
    pub converged: bool,
}

fn is_upper(a: f64, c: f64) -> bool {
    a >= c
}

fn is_lower(a: f64) -> bool {
    a <= 0.0
}

fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    // f = 1/2 a'(G - e) ; dual = -f
    -0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
}

/// Maximal violating pair gap `m(a) - M(a)` with
/// `m = max_{I_up} -y G`, `M = min_{I_low} -y G`.
pub fn violation_gap(alpha: &[f64], grad: &[f64], y: &[f64], cost: f64) -> f64 {
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for ((&a, &g), &yi) in alpha.iter().zip(grad).zip(y) {
        let v = -yi * g;
        let in_up = (yi > 0.0 && !is_upper(a, cost)) || (yi < 0.0 && !is_lower(a));
        let in_low = (yi > 0.0 && !is_lower(a)) || (yi < 0.0 && !is_upper(a, cost));
        if in_up {
            up = up.max(v);
        }
        if in_low {
            low = low.min(v);
        }
    }
    if up == f64::NEG_INFINITY || low == f64::INFINITY {
        0.0
    } else {
        up - low
    }
}

/// Solves the dual for labels `y` in `{-1, +1}`.
pub fn solve(q: &mut KernelCache<'_>, y: &[f64], settings: &SmoSettings) -> SmoSolution {
    let n = y.len();
    debug_assert_eq!(q.len(), n);
    let c = settings.cost;
    let eps = settings.tolerance;
    let max_iter = settings.max_iter.unwrap_or_else(|| (100 * n).max(10_000_000));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        let Some((i, j)) = select_working_set(q, y, &alpha, &grad, c, eps) else {
            converged = true;
            break;
        };
        iterations += 1;

        let (yi, yj) = (y[i], y[j]);
        let (qii, qjj) = (q.diag(i), q.diag(j));
        let kij = q.row(i)[j];
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);

        if yi != yj {
            // Q_ij = -K_ij
            let mut quad = qii + qjj + 2.0 * (-kij);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = qii + qjj - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let dai = ai - old_ai;
        let daj = aj - old_aj;
        // G_k += Q_ki dai + Q_kj daj with Q_ki = y_k y_i K_ki
        q.ensure(j);
        let row_i = q.cached(i);
        let row_j = q.cached(j);
        for k in 0..n {
            grad[k] += y[k] * (yi * row_i[k] * dai + yj * row_j[k] * daj);
        }

        if settings.record_objective {
            trace.push(dual_objective(&alpha, &grad));
        }
    }

    let rho = compute_rho(&alpha, &grad, y, c);
    SmoSolution {
        dual_objective: dual_objective(&alpha, &grad),
        max_violation: violation_gap(&alpha, &grad, y, c),
        alpha,
        rho,
        gradient: grad,
        iterations,
        objective_trace: trace,
        converged,
    }
}

fn select_working_set(
    q: &mut KernelCache<'_>,
    y: &[f64],
    alpha: &[f64],
    grad: &[f64],
    c: f64,
    eps: f64,
) -> Option<(usize, usize)> {
    let n = y.len();
    let mut gmax = f64::NEG_INFINITY;
    let mut gmax_idx = None;
    for t in 0..n {
        if y[t] > 0.0 {
            if !is_upper(alpha[t], c) && -grad[t] >= gmax {
                gmax = -grad[t];
                gmax_idx = Some(t);
            }
        } else if !is_lower(alpha[t]) && grad[t] >= gmax {
            gmax = grad[t];
            gmax_idx = Some(t);
        }
    }

    let i = gmax_idx?;
    let qdi = q.diag(i);
    q.ensure(i);
    let q = &*q;
    let row_i = q.cached(i);

    let mut gmax2 = f64::NEG_INFINITY;
    let mut gmin_idx = None;
    let mut obj_diff_min = f64::INFINITY;
    for j in 0..n {
        if y[j] > 0.0 {
            if !is_lower(alpha[j]) {
                let grad_diff = gmax + grad[j];
                if grad[j] >= gmax2 {
                    gmax2 = grad[j];
                }
                if grad_diff > 0.0 {
                    let mut quad = qdi + q.diag(j) - 2.0 * row_i[j];
                    if quad <= 0.0 {
                        quad = TAU;
                    }
                    let obj_diff = -(grad_diff * grad_diff) / quad;
                    if obj_diff <= obj_diff_min {
                        gmin_idx = Some(j);
                        obj_diff_min = obj_diff;
                    }
                }
            }
        } else if !is_upper(alpha[j], c) {
            let grad_diff = gmax - grad[j];
            if -grad[j] >= gmax2 {
                gmax2 = -grad[j];
            }
            if grad_diff > 0.0 {
                let mut quad = qdi + q.diag(j) - 2.0 * row_i[j];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj_diff = -(grad_diff * grad_diff) / quad;
                if obj_diff <= obj_diff_min {
                    gmin_idx = Some(j);
                    obj_diff_min = obj_diff;
                }
            }
        }
    }

    if gmax + gmax2 < eps {
        return None;
    }
    gmin_idx.map(|j| (i, j))
}

/// Average of `y G` over free vectors, or the midpoint of the feasible
/// interval when every multiplier sits at a bound.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut sum_free = 0.0;
    for ((&a, &g), &yi) in alpha.iter().zip(grad).zip(y) {
        let yg = yi * g;
        if is_upper(a, c) {
            if yi < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(a) {
            if yi > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_points_closed_form() {
        // x = -1 (y=-1), x = +1 (y=+1), linear kernel: w = 1, b = 0, a = 1/2
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        let mut q = KernelCache::new(&x, Kernel::Linear);
        let sol = solve(&mut q, &[-1.0, 1.0], &SmoSettings::new(10.0, 1e-6));
        assert!(sol.converged);
        assert!((sol.alpha[0] - 0.5).abs() < 1e-12);
        assert!((sol.alpha[1] - 0.5).abs() < 1e-12);
        assert!(sol.rho.abs() < 1e-12);
        assert!((sol.dual_objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn box_constraint_binds() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        let mut q = KernelCache::new(&x, Kernel::Linear);
        let sol = solve(&mut q, &[-1.0, 1.0], &SmoSettings::new(0.1, 1e-6));
        assert_eq!(sol.alpha, vec![0.1, 0.1]);
    }

    #[test]
    fn objective_trace_is_monotone() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let t = i as f64 * 0.7;
                vec![libm::sin(t) * 2.0, libm::cos(1.3 * t)]
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| if r[0] * r[1] > 0.0 { 1.0 } else { -1.0 })
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let mut q = KernelCache::new(&x, Kernel::Rbf { gamma: 0.5 });
        let mut s = SmoSettings::new(1.0, 1e-3);
        s.record_objective = true;
        let sol = solve(&mut q, &y, &s);
        assert!(sol.converged);
        assert!(sol.objective_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(sol.max_violation < 1e-3);
        let ya: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(ya.abs() < 1e-10);
    }
}
