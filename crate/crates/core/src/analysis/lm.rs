//! Levenberg–Marquardt damped least squares with a central-difference
//! Jacobian and Marquardt diagonal scaling.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Bound on the cosine between the residual and any Jacobian column.
    pub gtol: f64,
    /// Bound on the last step relative to the parameter scales.
    pub xtol: f64,
    /// Residual sum of squares treated as an exact fit.
    pub cost_floor: f64,
    /// Finite-difference step as a fraction of each parameter's scale.
    pub fd_step: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self { max_iterations: 500, gtol: 1e-8, xtol: 1e-10, cost_floor: 0.0, fd_step: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Residual sum of squares.
    pub cost: f64,
    pub converged: bool,
    pub iterations: usize,
    /// (JᵀJ)⁻¹ at the solution, if nonsingular.
    pub normal_inverse: Option<DMatrix<f64>>,
}

/// Minimizes ‖r(x)‖² from `x0` subject to `x ≥ lower`. `scales` sets the
/// magnitude of each parameter for differencing and convergence tests.
///
/// Converges when the step falls below `xtol` and either the gradient test
/// passes or no step of that size lowers the cost.
///
/// A parameter sitting on its bound with the gradient pushing outward is
/// held fixed for the step and left out of the gradient test.
pub fn minimize<F>(residuals: F, x0: &[f64], scales: &[f64], lower: &[f64], config: &LmConfig) -> LmReport
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let p = x0.len();
    let scale = |x: &[f64], j: usize| x[j].abs().max(scales[j]).max(f64::MIN_POSITIVE);
    let clamp = |v: f64, j: usize| v.max(lower[j]);
    let mut x: Vec<f64> = x0.iter().enumerate().map(|(j, v)| clamp(*v, j)).collect();
    let mut r = DVector::from_vec(residuals(&x));
    let mut cost = r.norm_squared();
    let mut lambda: f64 = 1e-3;
    let mut diag = vec![0.0f64; p];
    let mut converged = false;
    let mut iterations = 0;
    let mut jtj = DMatrix::zeros(p, p);

    if !cost.is_finite() {
        return LmReport { params: x, cost, converged: false, iterations: 0, normal_inverse: None };
    }

    while iterations < config.max_iterations {
        iterations += 1;
        let jac = jacobian(&residuals, &x, |j| config.fd_step * scale(&x, j), lower, r.len());
        jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        for j in 0..p {
            diag[j] = diag[j].max(jtj[(j, j)]);
        }
        let active: Vec<bool> = (0..p).map(|j| x[j] <= lower[j] && grad[j] > 0.0).collect();
        let r_norm = r.norm();
        let gradient_small = cost <= config.cost_floor
            || (0..p).all(|j| {
                let col = jtj[(j, j)].sqrt();
                active[j] || col == 0.0 || grad[j].abs() <= config.gtol * col * r_norm
            });
        let mut rhs = -&grad;
        for j in (0..p).filter(|&j| active[j]) {
            rhs[j] = 0.0;
        }

        let mut accepted = false;
        let mut step_small = false;
        while lambda <= 1e20 {
            let mut damped = jtj.clone();
            for j in 0..p {
                if active[j] {
                    damped.row_mut(j).fill(0.0);
                    damped.column_mut(j).fill(0.0);
                    damped[(j, j)] = 1.0;
                } else {
                    damped[(j, j)] += lambda * diag[j].max(1e-300);
                }
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&rhs);
            let trial: Vec<f64> = (0..p).map(|j| clamp(x[j] + step[j], j)).collect();
            step_small = (0..p).all(|j| (trial[j] - x[j]).abs() <= config.xtol * scale(&x, j));
            let r_trial = DVector::from_vec(residuals(&trial));
            let cost_trial = r_trial.norm_squared();
            if cost_trial.is_finite() && cost_trial < cost {
                x = trial;
                r = r_trial;
                cost = cost_trial;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            if step_small {
                break;
            }
            lambda *= 4.0;
        }
        // A step below xtol that cannot lower the cost means the minimum is
        // resolved to rounding, even if the gradient is noise-dominated.
        if step_small && (gradient_small || !accepted) {
            converged = true;
            break;
        }
        if !accepted {
            break;
        }
    }

    let normal_inverse = jtj.clone().cholesky().map(|c| c.inverse());
    LmReport { params: x, cost, converged, iterations, normal_inverse }
}

/// Central differences, shifted to one-sided forward differences where the
/// backward point would cross a bound.
fn jacobian<F, S>(residuals: &F, x: &[f64], step: S, lower: &[f64], m: usize) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    S: Fn(usize) -> f64,
{
    let p = x.len();
    let mut jac = DMatrix::zeros(m, p);
    let mut probe = x.to_vec();
    for j in 0..p {
        let h = step(j);
        let low = (x[j] - h).max(lower[j]);
        let high = low + 2.0 * h;
        probe[j] = high;
        let plus = residuals(&probe);
        probe[j] = low;
        let minus = residuals(&probe);
        probe[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / (high - low);
        }
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-1.3 * t).exp() + 0.2).collect();
        let f = |p: &[f64]| t.iter().zip(&y).map(|(t, y)| p[0] * (-p[1] * t).exp() + p[2] - y).collect();
        let cfg = LmConfig { cost_floor: 1e-28, ..LmConfig::default() };
        let rep = minimize(f, &[1.0, 0.5, 0.0], &[1.0, 1.0, 1.0], &[f64::NEG_INFINITY; 3], &cfg);
        assert!(rep.converged, "{rep:?}");
        assert!((rep.params[0] - 2.5).abs() < 1e-8);
        assert!((rep.params[1] - 1.3).abs() < 1e-8);
        assert!((rep.params[2] - 0.2).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock_minimum() {
        let f = |p: &[f64]| vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]];
        let cfg = LmConfig { cost_floor: 1e-28, ..LmConfig::default() };
        let rep = minimize(f, &[-1.2, 1.0], &[1.0, 1.0], &[f64::NEG_INFINITY; 2], &cfg);
        assert!(rep.converged);
        assert!((rep.params[0] - 1.0).abs() < 1e-8 && (rep.params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn nonzero_residual_converges_by_gradient() {
        // Straight line through noisy-looking fixed points.
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.1, 0.9, 2.2, 2.8];
        let f = |p: &[f64]| x.iter().zip(&y).map(|(x, y)| p[0] + p[1] * x - y).collect();
        let rep = minimize(f, &[0.0, 0.0], &[1.0, 1.0], &[f64::NEG_INFINITY; 2], &LmConfig::default());
        assert!(rep.converged);
        assert!((rep.params[1] - 0.94).abs() < 1e-9, "{:?}", rep.params);
    }

    #[test]
    fn active_bound_converges() {
        // Unconstrained optimum at p = -1; constrained optimum on the bound.
        let f = |p: &[f64]| vec![p[0] + 1.0, p[1] - 2.0];
        let rep = minimize(f, &[3.0, 0.0], &[1.0, 1.0], &[0.0, f64::NEG_INFINITY], &LmConfig::default());
        assert!(rep.converged, "{rep:?}");
        assert_eq!(rep.params[0], 0.0);
        assert!((rep.params[1] - 2.0).abs() < 1e-10);
    }
}
