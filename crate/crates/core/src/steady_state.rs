//! Steady states of the Liouvillian and the probe susceptibility read off
//! their optical coherences.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::density::{DensityMatrix, Level, Matrix4c};
use crate::error::{Error, Result};
use crate::liouvillian::{unvectorize, vec_index, vectorize, LiouvillianMatrix, RotatingFrame, Superoperator, VecRho};
use crate::model::TripodModel;

/// Singular values below this fraction of the largest count toward the kernel.
pub const KERNEL_RTOL: f64 = 1.0e-13;

/// Required ‖Lρ‖∞ relative to ‖L‖∞ for a solved steady state.
pub const RESIDUAL_RTOL: f64 = 1.0e-12;

/// Population differences smaller than this are treated as an empty transition.
const MIN_POPULATION_DIFFERENCE: f64 = 1.0e-12;

/// Number of (numerically) zero singular values of L.
pub fn kernel_dimension(l: &LiouvillianMatrix) -> usize {
    let sv = SVD::new(l.matrix, false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return 16;
    }
    sv.iter().filter(|s| **s <= KERNEL_RTOL * largest).count()
}

/// Unique steady state: the ee row of L is replaced with the trace
/// constraint and the resulting nonsingular system is solved directly.
pub fn solve_steady(l: &LiouvillianMatrix) -> Result<DensityMatrix> {
    let kernel_dim = kernel_dimension(l);
    if kernel_dim != 1 {
        return Err(Error::DegenerateSteadyState { kernel_dim });
    }

    let mut a: Superoperator = l.matrix;
    let mut rhs = VecRho::zeros();
    let constraint_row = vec_index(0, 0);
    for k in 0..16 {
        a[(constraint_row, k)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..4 {
        a[(constraint_row, vec_index(i, i))] = Complex64::new(1.0, 0.0);
    }
    rhs[constraint_row] = Complex64::new(1.0, 0.0);

    let lu = a.lu();
    let mut x = lu.solve(&rhs).ok_or(Error::DegenerateSteadyState { kernel_dim: 1 })?;
    // One step of iterative refinement tightens the residual of near-singular
    // systems (very slow transit relaxation).
    if let Some(correction) = lu.solve(&(rhs - a * x)) {
        x += correction;
    }

    let rho = DensityMatrix::normalized(unvectorize(&x));
    let residual = residual_norm(l, &rho);
    let bound = RESIDUAL_RTOL * l.norm_inf();
    if residual > bound {
        return Err(Error::InvalidState(format!("steady-state residual {residual:.3e} exceeds {bound:.3e}")));
    }
    DensityMatrix::new(rho)
}

fn residual_norm(l: &LiouvillianMatrix, rho: &Matrix4c) -> f64 {
    (l.matrix * vectorize(rho)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Stop when both ‖dρ/dt‖∞ and the change between samples fall below this.
    pub tol: f64,
    /// Maximum number of elementary integration steps.
    pub max_steps: u64,
}

impl EvolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tol: 1.0e-9, max_steps: 1 << 48 }
    }
}

/// Fixed-step classical Runge–Kutta integration of dvec(ρ)/dt = L·vec(ρ)
/// with step 0.1/‖L‖∞.
///
/// The one-step propagator M is a fixed matrix polynomial in L, so the
/// trajectory after n steps is Mⁿ·ρ₀. The state is sampled at n = 2ᵏ − 1
/// by repeated squaring of M, which reaches the transit time scale
/// (~10⁸ steps) in a few dozen matrix products.
pub fn evolve_to_steady(l: &LiouvillianMatrix, rho0: &DensityMatrix, options: &EvolveOptions) -> Result<DensityMatrix> {
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", options.tol)));
    }
    let norm = l.norm_inf();
    if norm == 0.0 {
        return Ok(*rho0);
    }
    let h = 0.1 / norm;
    let hl = l.matrix.scale(h);
    let identity = Superoperator::identity();
    let hl2 = hl * hl;
    let hl3 = hl2 * hl;
    let hl4 = hl3 * hl;
    let mut propagator = identity + hl + hl2.scale(0.5) + hl3.scale(1.0 / 6.0) + hl4.scale(1.0 / 24.0);

    let mut state = vectorize(rho0.matrix());
    let mut steps: u64 = 0;
    let mut stride: u64 = 1;
    let mut settled_samples = 0;
    let mut residual = f64::INFINITY;
    while steps <= options.max_steps {
        let next = renormalize(propagator * state);
        steps += stride;
        let change = (next - state).iter().map(|z| z.norm()).fold(0.0, f64::max);
        residual = (l.matrix * next).iter().map(|z| z.norm()).fold(0.0, f64::max);
        state = next;
        if residual < options.tol && change < options.tol {
            settled_samples += 1;
            if settled_samples == 2 {
                return DensityMatrix::new(DensityMatrix::normalized(unvectorize(&state)));
            }
        } else {
            settled_samples = 0;
        }
        propagator = propagator * propagator;
        stride = stride.saturating_mul(2);
    }
    Err(Error::Timeout { steps, residual })
}

fn renormalize(v: VecRho) -> VecRho {
    let trace: Complex64 = (0..4).map(|i| v[vec_index(i, i)]).sum();
    v.unscale(trace.re)
}

/// Complex probe susceptibility, normalized so that the bare (coupling-free)
/// line-center absorption Im χ equals 1.
///
/// Each probe coherence is divided by the population difference of its own
/// transition, matching the population factors absorbed into the closed-form
/// amplitudes.
pub fn probe_susceptibility_numeric(rho: &DensityMatrix, model: &TripodModel) -> Result<Complex64> {
    let omega_p = model.probe().rabi_bar;
    if omega_p == 0.0 {
        return Err(Error::ZeroProbe);
    }
    let frame = RotatingFrame::for_configuration(model.configuration());
    let mut sum = Complex64::new(0.0, 0.0);
    for level in frame.probe_levels() {
        let w = rho.population_difference(level);
        if w.abs() < MIN_POPULATION_DIFFERENCE {
            return Err(Error::NoProbePopulation(w));
        }
        sum += rho.element(Level::Excited, level) / w;
    }
    Ok(sum * model.susceptibility_amplitude() / omega_p)
}

/// Builds L for `model`, solves for the steady state and extracts χ.
pub fn steady_susceptibility(model: &TripodModel) -> Result<(DensityMatrix, Complex64)> {
    let rho = solve_steady(&crate::liouvillian::liouvillian(model))?;
    let chi = probe_susceptibility_numeric(&rho, model)?;
    Ok((rho, chi))
}
