//! Closed-form first-order probe susceptibilities.
//!
//! All functions take barred quantities. Removable singularities at
//! Γ̄_R = 0 are resolved by their limits: an exact Raman resonance with a
//! nonzero coupling is fully transparent, and with no coupling it reduces to
//! the bare two-level line.

use std::f64::consts::SQRT_2;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::Matrix4c;
use crate::error::{Error, Result};
use crate::liouvillian::build_hamiltonian;
use crate::model::{susceptibility_amplitude, Configuration, TripodModel};

const OPTICAL_DECAY: f64 = 1.0 / 3.0;

/// Probe ⊥ B: σ± probe, π coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config1Params {
    pub delta_bar: f64,
    pub delta_z_bar: f64,
    /// Kept for off-resonant coupling sweeps; zero reproduces the resonant form.
    pub delta_c_bar: f64,
    pub omega_c_bar: f64,
    pub gamma_r_bar: f64,
    pub amplitude: f64,
}

impl Config1Params {
    pub fn from_model(model: &TripodModel) -> Self {
        Self {
            delta_bar: model.raman_detuning(),
            delta_z_bar: model.zeeman().delta_z_bar,
            delta_c_bar: model.coupling().detuning_bar,
            omega_c_bar: model.coupling().rabi_bar,
            gamma_r_bar: model.rates().raman_bar,
            amplitude: susceptibility_amplitude(Configuration::Config1),
        }
    }

    pub fn with_delta(self, delta_bar: f64) -> Self {
        Self { delta_bar, ..self }
    }

    /// (a₋, a₊) = (δ̄ − Δ̄_Z, δ̄ + Δ̄_Z)
    pub fn raman_offsets(&self) -> (f64, f64) {
        (self.delta_bar - self.delta_z_bar, self.delta_bar + self.delta_z_bar)
    }

    /// Λ = Γ̄_R + 3Ω̄_C²/4, half width of each transparency window.
    pub fn lambda(&self) -> f64 {
        self.gamma_r_bar + 0.75 * self.omega_c_bar * self.omega_c_bar
    }
}

/// Probe ∥ B: π probe, σ± coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config2Params {
    pub delta_bar: f64,
    pub delta_z_bar: f64,
    pub delta_c_bar: f64,
    pub omega_c_bar: f64,
    pub gamma_r_bar: f64,
    pub amplitude: f64,
}

impl Config2Params {
    pub fn from_model(model: &TripodModel) -> Self {
        Self {
            delta_bar: model.raman_detuning(),
            delta_z_bar: model.zeeman().delta_z_bar,
            delta_c_bar: model.coupling().detuning_bar,
            omega_c_bar: model.coupling().rabi_bar,
            gamma_r_bar: model.rates().raman_bar,
            amplitude: susceptibility_amplitude(Configuration::Config2),
        }
    }

    pub fn with_delta(self, delta_bar: f64) -> Self {
        Self { delta_bar, ..self }
    }

    pub fn raman_offsets(&self) -> (f64, f64) {
        (self.delta_bar - self.delta_z_bar, self.delta_bar + self.delta_z_bar)
    }

    /// b = δ̄ + Δ̄_C − i/3
    pub fn b(&self) -> Complex64 {
        Complex64::new(self.delta_bar + self.delta_c_bar, -OPTICAL_DECAY)
    }

    /// q = δ̄ − iΓ̄_R
    pub fn q(&self) -> Complex64 {
        Complex64::new(self.delta_bar, -self.gamma_r_bar)
    }

    /// x = 2Γ̄_R + 3Ω̄_C²/2
    pub fn x(&self) -> f64 {
        2.0 * self.gamma_r_bar + 1.5 * self.omega_c_bar * self.omega_c_bar
    }

    /// y = δ̄² + Δ̄_Z²
    pub fn y(&self) -> f64 {
        self.delta_bar * self.delta_bar + self.delta_z_bar * self.delta_z_bar
    }
}

/// Λ-type EIT susceptibility
/// amplitude / [2(δ̄ + Δ̄_C − i/3) − Ω̄_C²/(2(δ̄ − iΓ̄_R))].
pub fn chi_three_level(
    delta_bar: f64,
    omega_c_bar: f64,
    gamma_r_bar: f64,
    delta_c_bar: f64,
    amplitude: f64,
) -> Complex64 {
    let optical = 2.0 * Complex64::new(delta_bar + delta_c_bar, -OPTICAL_DECAY);
    let raman = Complex64::new(delta_bar, -gamma_r_bar);
    if raman == Complex64::new(0.0, 0.0) {
        return if omega_c_bar == 0.0 { amplitude / optical } else { Complex64::new(0.0, 0.0) };
    }
    amplitude / (optical - omega_c_bar * omega_c_bar / (2.0 * raman))
}

/// Two independent Λ systems with Raman resonances at δ̄ = ±Δ̄_Z, each
/// weighted A₁/√2.
pub fn chi_config1(p: &Config1Params) -> Complex64 {
    let (a_minus, a_plus) = p.raman_offsets();
    let weight = p.amplitude / SQRT_2;
    [a_minus, a_plus].into_iter().map(|a| chi_three_level(a, p.omega_c_bar, p.gamma_r_bar, p.delta_c_bar, weight)).sum()
}

/// Near-resonance Lorentzian form of Im χ for the probe ⊥ B configuration:
/// a flat absorption minus two transparency Lorentzians of half width Λ
/// centred at ±Δ̄_Z.
pub fn im_chi_config1_lorentzian(p: &Config1Params) -> f64 {
    let bare = 3.0 * p.amplitude / SQRT_2;
    let omega2 = p.omega_c_bar * p.omega_c_bar;
    if omega2 == 0.0 {
        return bare;
    }
    let lambda = p.lambda();
    let (a_minus, a_plus) = p.raman_offsets();
    let lorentz = |a: f64| lambda / (a * a + lambda * lambda);
    bare * (1.0 - 0.375 * omega2 * (lorentz(a_plus) + lorentz(a_minus)))
}

/// Probe ∥ B: A₂·N / [2bN − qΩ̄_C²/2] with N = (a₋ − iΓ̄_R)(a₊ − iΓ̄_R).
pub fn chi_config2(p: &Config2Params) -> Complex64 {
    chi_config2_with_optical(p, p.b())
}

/// Same as [`chi_config2`] with the optical factor b replaced by its
/// resonant value −i/3, the approximation under which Im χ takes the
/// rational form of [`im_chi_config2`].
pub fn chi_config2_near_resonance(p: &Config2Params) -> Complex64 {
    chi_config2_with_optical(p, Complex64::new(0.0, -OPTICAL_DECAY))
}

fn chi_config2_with_optical(p: &Config2Params, b: Complex64) -> Complex64 {
    let (a_minus, a_plus) = p.raman_offsets();
    let n = Complex64::new(a_minus, -p.gamma_r_bar) * Complex64::new(a_plus, -p.gamma_r_bar);
    let omega2 = p.omega_c_bar * p.omega_c_bar;
    if n == Complex64::new(0.0, 0.0) {
        return if omega2 == 0.0 { p.amplitude / (2.0 * b) } else { Complex64::new(0.0, 0.0) };
    }
    p.amplitude * n / (2.0 * b * n - p.q() * omega2 / 2.0)
}

/// Rational Im χ for the probe ∥ B configuration:
/// 3A₂[2a₋²a₊² + Γ̄y(2Γ̄ + x) + Γ̄³x] / [4a₋²a₊² + 4Γ̄xy + x²Γ̄² + 9δ̄²Ω̄_C⁴/4].
pub fn im_chi_config2(p: &Config2Params) -> f64 {
    let (a_minus, a_plus) = p.raman_offsets();
    let g = p.gamma_r_bar;
    let (x, y) = (p.x(), p.y());
    let omega2 = p.omega_c_bar * p.omega_c_bar;
    let prod2 = a_minus * a_minus * a_plus * a_plus;
    let numerator = 2.0 * prod2 + g * y * (2.0 * g + x) + g * g * g * x;
    let denominator =
        4.0 * prod2 + 4.0 * g * x * y + x * x * g * g + 2.25 * p.delta_bar * p.delta_bar * omega2 * omega2;
    if denominator == 0.0 {
        return if omega2 == 0.0 { 1.5 * p.amplitude } else { 0.0 };
    }
    3.0 * p.amplitude * numerator / denominator
}

/// Probe ∥ B at zero field rewritten in the bright/dark basis of the two σ
/// coupling components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorrisShoreReduction {
    /// Coupling Rabi frequency of the bright combination.
    pub effective_coupling_bar: f64,
    /// Hamiltonian in the basis (e, bright, g₀, dark).
    pub rotated_hamiltonian: Matrix4c,
    pub gamma_r_bar: f64,
    pub delta_c_bar: f64,
    pub amplitude: f64,
}

impl MorrisShoreReduction {
    /// Susceptibility of the reduced Λ system (e, bright, g₀).
    pub fn chi(&self, delta_bar: f64) -> Complex64 {
        chi_three_level(delta_bar, self.effective_coupling_bar, self.gamma_r_bar, self.delta_c_bar, self.amplitude)
    }
}

/// Rotates (g₋, g₊) into the bright and dark combinations
/// (g₋ ± g₊)/√2 and checks that the dark state decouples from e.
pub fn morris_shore_reduce(model: &TripodModel) -> Result<MorrisShoreReduction> {
    if model.configuration() != Configuration::Config2 {
        return Err(Error::MorrisShore("requires the π-probe configuration (config2)".into()));
    }
    if model.zeeman().delta_z_bar != 0.0 {
        return Err(Error::MorrisShore("Morris-Shore reduction invalid for split sublevels".into()));
    }
    let h = build_hamiltonian(model).matrix;
    let s = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let u = Matrix4::new(
        one,  zero, zero, zero,
        zero, s,    zero, s,
        zero, zero, one,  zero,
        zero, s,    zero, -s,
    );
    let rotated = u.adjoint() * h * u;
    let dark = 3;
    if rotated[(0, dark)] != zero || rotated[(dark, 0)] != zero {
        return Err(Error::MorrisShore(format!(
            "dark state still couples to the excited level: {}",
            rotated[(0, dark)]
        )));
    }
    let effective_coupling_bar = -2.0 * rotated[(0, 1)].re;
    Ok(MorrisShoreReduction {
        effective_coupling_bar,
        rotated_hamiltonian: rotated,
        gamma_r_bar: model.rates().raman_bar,
        delta_c_bar: model.coupling().detuning_bar,
        amplitude: susceptibility_amplitude(Configuration::Config2),
    })
}

/// Analytic susceptibility of `model` at its current Raman detuning.
pub fn chi_for_model(model: &TripodModel) -> Complex64 {
    match model.configuration() {
        Configuration::Config1 => chi_config1(&Config1Params::from_model(model)),
        Configuration::Config2 => chi_config2(&Config2Params::from_model(model)),
    }
}
