//! Small dense Levenberg-Marquardt solver with Marquardt diagonal scaling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// A nonlinear least-squares problem `min ½ Σ r_i(p)²`.
pub trait LeastSquares {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    fn residuals(&self, p: &[f64], out: &mut [f64]);

    /// Row-major `m × n` Jacobian. Defaults to forward differences with a
    /// relative step of `1e-6`.
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let n = self.n_params();
        let m = self.n_residuals();
        let mut base = vec![0.0; m];
        let mut bumped = vec![0.0; m];
        self.residuals(p, &mut base);
        let mut q = p.to_vec();
        for j in 0..n {
            let h = 1e-6 * p[j].abs().max(1e-6);
            q[j] = p[j] + h;
            self.residuals(&q, &mut bumped);
            q[j] = p[j];
            for i in 0..m {
                out[i * n + j] = (bumped[i] - base[i]) / h;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Stop when the relative cost decrease of an accepted step falls below this.
    pub cost_tolerance: f64,
    /// Stop when every accepted step satisfies `|δp_i| ≤ tol·(|p_i| + tol)`.
    pub step_tolerance: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self { max_iterations: 200, cost_tolerance: 1e-12, step_tolerance: 1e-13 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// `½ Σ r²` at the optimum.
    pub cost: f64,
    pub iterations: usize,
    /// `(JᵀJ)⁻¹` at the optimum, row-major; `None` if singular.
    pub jtj_inverse: Option<Vec<f64>>,
}

/// Cholesky factorisation in place (lower triangle). Returns `false` if the
/// matrix is not positive definite.
fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Inverse of a symmetric positive-definite matrix, via a Jacobi-scaled
/// Cholesky factorisation.
pub fn spd_inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let scale: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    if scale.iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            l[i * n + j] = a[i * n + j] / (scale[i] * scale[j]).sqrt();
        }
    }
    if !cholesky(&mut l, n) {
        return None;
    }
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        cholesky_solve(&l, n, &mut col);
        for i in 0..n {
            inv[i * n + j] = col[i] / (scale[i] * scale[j]).sqrt();
        }
    }
    Some(inv)
}

fn normal_equations(jac: &[f64], r: &[f64], m: usize, n: usize, jtj: &mut [f64], g: &mut [f64]) {
    jtj.iter_mut().for_each(|v| *v = 0.0);
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..m {
        let row = &jac[i * n..(i + 1) * n];
        for a in 0..n {
            g[a] += row[a] * r[i];
            for b in a..n {
                jtj[a * n + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj[a * n + b] = jtj[b * n + a];
        }
    }
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

/// Minimises the problem from `start`.
pub fn minimize<P: LeastSquares>(problem: &P, start: &[f64], config: LmConfig) -> Result<LmReport> {
    let n = problem.n_params();
    let m = problem.n_residuals();
    if m < n {
        return Err(err!(Fit, "levenberg_marquardt", "{m} residuals cannot determine {n} parameters"));
    }
    let mut p = start.to_vec();
    let mut r = vec![0.0; m];
    let mut r_new = vec![0.0; m];
    let mut jac = vec![0.0; m * n];
    let mut jtj = vec![0.0; n * n];
    let mut g = vec![0.0; n];
    let mut a = vec![0.0; n * n];
    let mut step = vec![0.0; n];
    let mut trial = vec![0.0; n];

    problem.residuals(&p, &mut r);
    let mut cost = half_sq(&r);
    if !cost.is_finite() {
        return Err(err!(Fit, "levenberg_marquardt", "non-finite residuals at the starting point"));
    }
    problem.jacobian(&p, &mut jac);
    normal_equations(&jac, &r, m, n, &mut jtj, &mut g);

    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        iterations += 1;
        let max_diag = (0..n).map(|i| jtj[i * n + i]).fold(0.0, f64::max);
        if !(max_diag > 0.0) {
            return Err(err!(Fit, "levenberg_marquardt", "Jacobian vanished"));
        }
        let mut accepted = false;
        while lambda < 1e20 {
            a.copy_from_slice(&jtj);
            for i in 0..n {
                let d = jtj[i * n + i].max(1e-30 * max_diag);
                a[i * n + i] += lambda * d;
            }
            let mut l = a.clone();
            if cholesky(&mut l, n) {
                step.iter_mut().zip(&g).for_each(|(s, gi)| *s = -gi);
                cholesky_solve(&l, n, &mut step);
                for i in 0..n {
                    trial[i] = p[i] + step[i];
                }
                problem.residuals(&trial, &mut r_new);
                let new_cost = half_sq(&r_new);
                if new_cost.is_finite() && new_cost < cost {
                    let rel = (cost - new_cost) / cost;
                    p.copy_from_slice(&trial);
                    core::mem::swap(&mut r, &mut r_new);
                    cost = new_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    let tiny = step.iter().zip(&p).all(|(s, q)| s.abs() <= config.step_tolerance * (q.abs() + config.step_tolerance));
                    if rel < config.cost_tolerance || tiny {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            // No downhill step at any damping: at the optimum to working precision.
            converged = true;
        }
        problem.jacobian(&p, &mut jac);
        normal_equations(&jac, &r, m, n, &mut jtj, &mut g);
        if converged || cost == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(err!(
            Fit,
            "levenberg_marquardt",
            "no convergence in {} iterations (cost {cost:e}, damping {lambda:e})",
            config.max_iterations
        ));
    }
    Ok(LmReport { params: p, cost, iterations, jtj_inverse: spd_inverse(&jtj, n) })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Exp {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquares for Exp {
        fn n_params(&self) -> usize {
            2
        }
        fn n_residuals(&self) -> usize {
            self.x.len()
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (i, (&x, &y)) in self.x.iter().zip(&self.y).enumerate() {
                out[i] = p[0] * (p[1] * x).exp() - y;
            }
        }
    }

    #[test]
    fn fits_exponential_with_numeric_jacobian() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y = x.iter().map(|&x| 2.5 * (-1.3 * x).exp()).collect();
        let rep = minimize(&Exp { x, y }, &[1.0, -0.2], LmConfig::default()).unwrap();
        assert!((rep.params[0] - 2.5).abs() < 1e-6);
        assert!((rep.params[1] + 1.3).abs() < 1e-6);
        assert!(rep.jtj_inverse.is_some());
    }

    #[test]
    fn rosenbrock() {
        struct Rb;
        impl LeastSquares for Rb {
            fn n_params(&self) -> usize {
                2
            }
            fn n_residuals(&self) -> usize {
                2
            }
            fn residuals(&self, p: &[f64], out: &mut [f64]) {
                out[0] = 10.0 * (p[1] - p[0] * p[0]);
                out[1] = 1.0 - p[0];
            }
        }
        let rep = minimize(&Rb, &[-1.2, 1.0], LmConfig::default()).unwrap();
        assert!((rep.params[0] - 1.0).abs() < 1e-8 && (rep.params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn inverse_of_spd() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = spd_inverse(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(spd_inverse(&[1.0, 1.0, 1.0, 1.0], 2).is_none());
    }

    #[test]
    fn underdetermined_is_rejected() {
        let p = Exp { x: vec![1.0], y: vec![1.0] };
        assert!(minimize(&p, &[1.0, 1.0], LmConfig::default()).is_err());
    }
}
