//! 4×4 density matrices in the (e, g₋, g₀, g₊) basis.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix4c = Matrix4<Complex64>;

pub const HERMITICITY_TOL: f64 = 1.0e-12;
pub const TRACE_TOL: f64 = 1.0e-10;
pub const POSITIVITY_TOL: f64 = -1.0e-8;

/// Basis states, in matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Excited,
    GroundMinus,
    GroundZero,
    GroundPlus,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Excited, Level::GroundMinus, Level::GroundZero, Level::GroundPlus];
    pub const GROUND: [Level; 3] = [Level::GroundMinus, Level::GroundZero, Level::GroundPlus];

    pub const fn index(self) -> usize {
        match self {
            Level::Excited => 0,
            Level::GroundMinus => 1,
            Level::GroundZero => 2,
            Level::GroundPlus => 3,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite (within tolerances).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4c);

impl DensityMatrix {
    /// Validates all invariants.
    pub fn new(matrix: Matrix4c) -> Result<Self> {
        let rho = Self(matrix);
        rho.check_invariants()?;
        Ok(rho)
    }

    /// Unpolarized ground mixture diag(0, ⅓, ⅓, ⅓).
    pub fn ground_mixture() -> Self {
        let third = Complex64::new(1.0 / 3.0, 0.0);
        Self(Matrix4c::from_diagonal(&nalgebra::Vector4::new(Complex64::new(0.0, 0.0), third, third, third)))
    }

    pub fn pure(level: Level) -> Self {
        let mut m = Matrix4c::zeros();
        m[(level.index(), level.index())] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4c {
        self.0
    }

    pub fn element(&self, row: Level, col: Level) -> Complex64 {
        self.0[(row.index(), col.index())]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.element(level, level).re
    }

    /// ρ_gg − ρ_ee for the transition e–`ground`.
    pub fn population_difference(&self, ground: Level) -> f64 {
        self.population(ground) - self.population(Level::Excited)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// max |ρ − ρ†|
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace_error(&self) -> f64 {
        (self.trace() - 1.0).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (self.0 + self.0.adjoint()).scale(0.5);
        SymmetricEigen::new(hermitian).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max |ρ - ρ†| = {herm:.3e})")));
        }
        let tr = self.trace_error();
        if tr > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace deviates from 1 by {tr:.3e}")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    /// Symmetrizes and rescales to unit trace. Used to remove roundoff after
    /// a numerical solve.
    pub(crate) fn normalized(matrix: Matrix4c) -> Matrix4c {
        let hermitian = (matrix + matrix.adjoint()).scale(0.5);
        let tr = hermitian.trace().re;
        hermitian.unscale(tr)
    }
}
