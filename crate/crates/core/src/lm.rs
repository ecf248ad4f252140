//! A small dense Levenberg–Marquardt solver for the search module.
//!
//! Problems here have at most a dozen unknowns, so normal equations with a
//! hand-rolled Cholesky factorization are enough.

/// Residuals and their Jacobian, row-major `m × n`.
pub(crate) trait LeastSquares {
    fn dims(&self) -> (usize, usize);
    fn evaluate(&self, x: &[f64], residual: &mut [f64], jacobian: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LmSettings {
    pub max_iterations: usize,
    /// Stop once the cost `½|r|²` falls below this.
    pub cost_floor: f64,
    /// Stop when a step reduces the cost by less than this fraction.
    pub stall: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iterations: 80,
            cost_floor: 1e-30,
            stall: 1e-12,
        }
    }
}

pub(crate) struct LmResult {
    pub cost: f64,
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Solves `A x = b` in place for symmetric positive definite `A` (row-major).
/// Returns false if the factorization breaks down.
pub(crate) fn solve_spd(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return false;
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * n + k] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= a[k * n + i] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    true
}

/// Minimizes `½|r(x)|²` starting from `x`, which is overwritten with the result.
pub(crate) fn minimize<P: LeastSquares>(problem: &P, x: &mut [f64], settings: LmSettings) -> LmResult {
    let (m, n) = problem.dims();
    let mut r = vec![0.0; m];
    let mut jac = vec![0.0; m * n];
    let mut r_try = vec![0.0; m];
    let mut jac_try = vec![0.0; m * n];
    let mut jtj = vec![0.0; n * n];
    let mut jtr = vec![0.0; n];
    let mut sys = vec![0.0; n * n];
    let mut step = vec![0.0; n];
    let mut x_try = vec![0.0; n];

    problem.evaluate(x, &mut r, &mut jac);
    let mut cost = half_sq(&r);
    let mut lambda = 1e-3;

    for _ in 0..settings.max_iterations {
        if cost <= settings.cost_floor {
            break;
        }
        for i in 0..n {
            jtr[i] = (0..m).map(|k| jac[k * n + i] * r[k]).sum();
            for j in 0..=i {
                let v: f64 = (0..m).map(|k| jac[k * n + i] * jac[k * n + j]).sum();
                jtj[i * n + j] = v;
                jtj[j * n + i] = v;
            }
        }
        let mut accepted = false;
        while lambda < 1e12 {
            sys.copy_from_slice(&jtj);
            for i in 0..n {
                sys[i * n + i] += lambda * (1.0 + jtj[i * n + i]);
                step[i] = -jtr[i];
            }
            if solve_spd(&mut sys, &mut step, n) {
                for i in 0..n {
                    x_try[i] = x[i] + step[i];
                }
                problem.evaluate(&x_try, &mut r_try, &mut jac_try);
                let new_cost = half_sq(&r_try);
                if new_cost.is_finite() && new_cost < cost {
                    let gain = (cost - new_cost) / cost;
                    x.copy_from_slice(&x_try);
                    std::mem::swap(&mut r, &mut r_try);
                    std::mem::swap(&mut jac, &mut jac_try);
                    cost = new_cost;
                    lambda = (lambda * 0.3).max(1e-12);
                    accepted = true;
                    if gain < settings.stall {
                        return LmResult { cost };
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    LmResult { cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl LeastSquares for Rosenbrock {
        fn dims(&self) -> (usize, usize) {
            (2, 2)
        }
        fn evaluate(&self, x: &[f64], r: &mut [f64], j: &mut [f64]) {
            r[0] = 10.0 * (x[1] - x[0] * x[0]);
            r[1] = 1.0 - x[0];
            j.copy_from_slice(&[-20.0 * x[0], 10.0, -1.0, 0.0]);
        }
    }

    #[test]
    fn solves_rosenbrock() {
        let mut x = [-1.2, 1.0];
        let res = minimize(&Rosenbrock, &mut x, LmSettings { max_iterations: 200, ..Default::default() });
        assert!(res.cost < 1e-20);
        assert!((x[0] - 1.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spd_solve() {
        let mut a = [4.0, 2.0, 2.0, 3.0];
        let mut b = [2.0, 1.0];
        assert!(solve_spd(&mut a, &mut b, 2));
        assert!((b[0] - 0.5).abs() < 1e-15 && b[1].abs() < 1e-15);
        let mut singular = [1.0, 1.0, 1.0, 1.0];
        assert!(!solve_spd(&mut singular, &mut [1.0, 0.0], 2));
    }
}
