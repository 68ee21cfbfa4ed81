//! Lab units to dimensionless ("barred") units.
//!
//! Every frequency in the model is measured in units of the optical coherence
//! rate Γ = 2π·10⁹ s⁻¹. A cyclic frequency `f` in Hz therefore maps to
//! `f / 10⁹`, which is the convention used for the Raman detuning and the
//! Zeeman splitting. Rates quoted in s⁻¹ are angular and are divided by Γ
//! itself unless [`RateScaling::Cyclic`] is requested.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One barred unit expressed in Hz.
pub const FREQUENCY_SCALE_HZ: f64 = 1.0e9;

/// Coupling powers (mW) and the scaled Rabi frequencies used for the reference
/// transmission profiles.
pub const REFERENCE_POWERS_MW: [f64; 3] = [1.0, 10.0, 22.0];
pub const REFERENCE_RABI_BAR: [f64; 3] = [1.8e-3, 5.7e-3, 8.6e-3];

/// Calibration point of the square-root power law: 22 mW gives Ω̄_C = 8.6×10⁻³.
const RABI_CALIBRATION_POWER_MW: f64 = 22.0;
const RABI_CALIBRATION_VALUE: f64 = 8.6e-3;

/// 1 mG in tesla.
const TESLA_PER_MILLIGAUSS: f64 = 1.0e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J/T
    pub bohr_magneton: f64,
    /// J·s
    pub planck_h: f64,
    /// Landé factor of the metastable 2³S₁ level.
    pub lande_g: f64,
    /// Effective (Doppler) optical coherence rate, angular, s⁻¹.
    pub gamma_opt: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            bohr_magneton: 9.274_010_078_3e-24,
            planck_h: 6.626_070_15e-34,
            lande_g: 2.002,
            gamma_opt: TAU * FREQUENCY_SCALE_HZ,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [self.bohr_magneton, self.planck_h, self.lande_g, self.gamma_opt];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Domain(format!("physical constants must be finite and positive: {self:?}")))
        }
    }

    /// Zeeman shift μ_B·g·B/h of an |m_J| = 1 sublevel, in Hz.
    pub fn zeeman_shift(&self, b_mg: f64) -> Result<f64> {
        if !b_mg.is_finite() {
            return Err(Error::Domain(format!("magnetic field must be finite, got {b_mg}")));
        }
        Ok(self.bohr_magneton * self.lande_g * (b_mg * TESLA_PER_MILLIGAUSS) / self.planck_h)
    }
}

/// Zeeman shift in Hz for `b_mg` milligauss using the default constants.
pub fn zeeman_shift(b_mg: f64) -> Result<f64> {
    PhysicalConstants::default().zeeman_shift(b_mg)
}

/// Square-root power law mapping coupling power (mW) to Ω̄_C.
pub fn power_to_rabi_scaled(p_mw: f64) -> Result<f64> {
    if !p_mw.is_finite() || p_mw < 0.0 {
        return Err(Error::Domain(format!("power must be finite and non-negative, got {p_mw} mW")));
    }
    Ok(RABI_CALIBRATION_VALUE / RABI_CALIBRATION_POWER_MW.sqrt() * p_mw.sqrt())
}

pub fn scale_frequency(f_hz: f64) -> f64 {
    f_hz / FREQUENCY_SCALE_HZ
}

pub fn unscale_frequency(f_bar: f64) -> f64 {
    f_bar * FREQUENCY_SCALE_HZ
}

/// How a rate quoted in s⁻¹ becomes a barred rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateScaling {
    /// Rate is angular: divide by Γ = 2π·10⁹ s⁻¹.
    #[default]
    Angular,
    /// Rate is read as a cyclic frequency: divide by 10⁹.
    Cyclic,
}

impl RateScaling {
    pub fn scale(self, rate_per_s: f64) -> f64 {
        match self {
            RateScaling::Angular => rate_per_s / (TAU * FREQUENCY_SCALE_HZ),
            RateScaling::Cyclic => rate_per_s / FREQUENCY_SCALE_HZ,
        }
    }
}

impl std::str::FromStr for RateScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angular" => Ok(RateScaling::Angular),
            "cyclic" => Ok(RateScaling::Cyclic),
            other => Err(Error::Domain(format!("unknown rate scaling '{other}' (expected angular|cyclic)"))),
        }
    }
}
