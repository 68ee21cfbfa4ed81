//! Physical description of the tripod: which beam probes which transitions,
//! the drive strengths, the Zeeman field and the relaxation rates, all in
//! barred units.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, PhysicalConstants, RateScaling};

/// Perturbative-regime threshold on Ω̄_P / Ω̄_C.
pub const PERTURBATIVE_RATIO: f64 = 1.0e-3;

/// Default Ω̄_P / Ω̄_C for numeric steady states.
pub const DEFAULT_PROBE_FRACTION: f64 = 1.0e-2;

/// Scaled optical coherence decay rate.
pub const OPTICAL_DECAY_BAR: f64 = 1.0 / 3.0;

/// Which polarization sits on the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Configuration {
    /// σ± probe on e–g∓, π coupling on e–g₀ (probe ⊥ B).
    #[serde(rename = "config1")]
    Config1,
    /// π probe on e–g₀, σ± coupling on e–g∓ (probe ∥ B).
    #[serde(rename = "config2")]
    Config2,
}

impl Configuration {
    pub fn as_str(self) -> &'static str {
        match self {
            Configuration::Config1 => "config1",
            Configuration::Config2 => "config2",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "config1" => Ok(Configuration::Config1),
            "config2" => Ok(Configuration::Config2),
            other => Err(Error::InvalidModel(format!("unknown configuration '{other}' (expected config1|config2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldRole {
    Probe,
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    pub role: FieldRole,
    /// Ω̄
    pub rabi_bar: f64,
    /// Optical detuning Δ̄ from the zero-field line.
    pub detuning_bar: f64,
}

impl DriveField {
    pub fn new(role: FieldRole, rabi_bar: f64, detuning_bar: f64) -> Self {
        Self { role, rabi_bar, detuning_bar }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanField {
    pub b_mg: f64,
    /// Δ̄_Z
    pub delta_z_bar: f64,
}

impl ZeemanField {
    pub fn from_milligauss(b_mg: f64, constants: &PhysicalConstants) -> Result<Self> {
        let shift = constants.zeeman_shift(b_mg)?;
        Ok(Self { b_mg, delta_z_bar: units::scale_frequency(shift) })
    }

    pub fn zero() -> Self {
        Self { b_mg: 0.0, delta_z_bar: 0.0 }
    }
}

/// Barred relaxation rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationRates {
    /// Total spontaneous decay of e, shared equally among the three ground sublevels.
    pub gamma0_bar: f64,
    /// Transit relaxation toward the unpolarized ground mixture.
    pub transit_bar: f64,
    /// Total decay of ground-ground coherences (includes transit).
    pub raman_bar: f64,
    /// Total decay of optical (e–g) coherences.
    pub optical_bar: f64,
}

impl RelaxationRates {
    pub const GAMMA0_PER_S: f64 = 1.0e7;
    pub const TRANSIT_PER_S: f64 = 1.0e3;
    pub const RAMAN_PER_S: f64 = 1.0e4;

    pub fn from_lab(gamma0_per_s: f64, transit_per_s: f64, raman_per_s: f64, scaling: RateScaling) -> Result<Self> {
        let rates = Self {
            gamma0_bar: scaling.scale(gamma0_per_s),
            transit_bar: scaling.scale(transit_per_s),
            raman_bar: scaling.scale(raman_per_s),
            optical_bar: OPTICAL_DECAY_BAR,
        };
        rates.validate()?;
        Ok(rates)
    }

    pub fn with_scaling(scaling: RateScaling) -> Self {
        Self::from_lab(Self::GAMMA0_PER_S, Self::TRANSIT_PER_S, Self::RAMAN_PER_S, scaling)
            .expect("reference rates are valid")
    }

    pub fn zero() -> Self {
        Self { gamma0_bar: 0.0, transit_bar: 0.0, raman_bar: 0.0, optical_bar: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma0_bar, self.transit_bar, self.raman_bar, self.optical_bar];
        if !all.iter().all(|r| r.is_finite() && *r >= 0.0) {
            return Err(Error::InvalidModel(format!("relaxation rates must be finite and non-negative: {self:?}")));
        }
        if self.raman_bar < self.transit_bar {
            return Err(Error::InvalidModel(format!(
                "Raman decay ({:e}) must include the transit rate ({:e})",
                self.raman_bar, self.transit_bar
            )));
        }
        Ok(())
    }
}

impl Default for RelaxationRates {
    fn default() -> Self {
        Self::with_scaling(RateScaling::Angular)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumGeometry {
    pub length_cm: f64,
    /// Bare-line optical depth; exponent of the Beer–Lambert law at unit
    /// normalized absorption.
    pub optical_depth: f64,
}

impl Default for MediumGeometry {
    fn default() -> Self {
        Self { length_cm: 6.0, optical_depth: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripodModel {
    configuration: Configuration,
    probe: DriveField,
    coupling: DriveField,
    zeeman: ZeemanField,
    rates: RelaxationRates,
    geometry: MediumGeometry,
}

impl TripodModel {
    /// Both drives off, zero field, reference rates.
    pub fn new(configuration: Configuration) -> Self {
        Self {
            configuration,
            probe: DriveField::new(FieldRole::Probe, 0.0, 0.0),
            coupling: DriveField::new(FieldRole::Coupling, 0.0, 0.0),
            zeeman: ZeemanField::zero(),
            rates: RelaxationRates::default(),
            geometry: MediumGeometry::default(),
        }
    }

    /// Model for a coupling power and field, probe at [`DEFAULT_PROBE_FRACTION`]
    /// of the coupling Rabi frequency.
    pub fn from_lab(configuration: Configuration, coupling_mw: f64, b_mg: f64) -> Result<Self> {
        let omega_c = units::power_to_rabi_scaled(coupling_mw)?;
        let zeeman = ZeemanField::from_milligauss(b_mg, &PhysicalConstants::default())?;
        Self::new(configuration)
            .with_coupling_rabi(omega_c)
            .with_probe_rabi(DEFAULT_PROBE_FRACTION * omega_c)
            .with_zeeman(zeeman)
            .validated()
    }

    pub fn with_probe_rabi(mut self, rabi_bar: f64) -> Self {
        self.probe.rabi_bar = rabi_bar;
        self
    }

    pub fn with_coupling_rabi(mut self, rabi_bar: f64) -> Self {
        self.coupling.rabi_bar = rabi_bar;
        self
    }

    /// Sets δ̄ while holding Δ̄_C fixed.
    pub fn with_raman_detuning(mut self, delta_bar: f64) -> Self {
        self.probe.detuning_bar = self.coupling.detuning_bar + delta_bar;
        self
    }

    /// Sets Δ̄_C while holding δ̄ fixed.
    pub fn with_coupling_detuning(mut self, detuning_bar: f64) -> Self {
        let delta = self.raman_detuning();
        self.coupling.detuning_bar = detuning_bar;
        self.probe.detuning_bar = detuning_bar + delta;
        self
    }

    pub fn with_zeeman(mut self, zeeman: ZeemanField) -> Self {
        self.zeeman = zeeman;
        self
    }

    pub fn with_delta_z(mut self, delta_z_bar: f64) -> Self {
        self.zeeman = ZeemanField { b_mg: f64::NAN, delta_z_bar };
        self
    }

    pub fn with_rates(mut self, rates: RelaxationRates) -> Self {
        self.rates = rates;
        self
    }

    pub fn with_geometry(mut self, geometry: MediumGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for field in [&self.probe, &self.coupling] {
            if !(field.rabi_bar.is_finite() && field.rabi_bar >= 0.0) {
                return Err(Error::InvalidModel(format!("{:?} Rabi frequency must be finite and >= 0", field.role)));
            }
            if !field.detuning_bar.is_finite() {
                return Err(Error::InvalidModel(format!("{:?} detuning must be finite", field.role)));
            }
        }
        if !self.zeeman.delta_z_bar.is_finite() {
            return Err(Error::InvalidModel("Zeeman splitting must be finite".into()));
        }
        if !(self.geometry.optical_depth.is_finite() && self.geometry.optical_depth >= 0.0) {
            return Err(Error::InvalidModel("optical depth must be finite and >= 0".into()));
        }
        self.rates.validate()
    }

    pub fn configuration(&self) -> Configuration {
        self.configuration
    }

    pub fn probe(&self) -> &DriveField {
        &self.probe
    }

    pub fn coupling(&self) -> &DriveField {
        &self.coupling
    }

    pub fn zeeman(&self) -> &ZeemanField {
        &self.zeeman
    }

    pub fn rates(&self) -> &RelaxationRates {
        &self.rates
    }

    pub fn geometry(&self) -> &MediumGeometry {
        &self.geometry
    }

    /// δ̄ = Δ̄_P − Δ̄_C
    pub fn raman_detuning(&self) -> f64 {
        self.probe.detuning_bar - self.coupling.detuning_bar
    }

    pub fn is_perturbative(&self) -> bool {
        self.probe.rabi_bar <= PERTURBATIVE_RATIO * self.coupling.rabi_bar
    }

    /// Lumped susceptibility prefactor (A₁ or A₂) normalized so that the
    /// coupling-free line-center absorption Im χ equals 1.
    pub fn susceptibility_amplitude(&self) -> f64 {
        susceptibility_amplitude(self.configuration)
    }
}

/// A₁ = √2/3 makes 3A₁/√2 = 1; A₂ = 2/3 makes 3A₂/2 = 1.
pub fn susceptibility_amplitude(configuration: Configuration) -> f64 {
    match configuration {
        Configuration::Config1 => std::f64::consts::SQRT_2 / 3.0,
        Configuration::Config2 => 2.0 / 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raman_detuning_is_probe_minus_coupling() {
        let m = TripodModel::new(Configuration::Config1).with_coupling_detuning(3e-5).with_raman_detuning(-2e-5);
        assert!((m.raman_detuning() + 2e-5).abs() < 1e-20);
        assert!((m.probe().detuning_bar - 1e-5).abs() < 1e-20);
        let m = m.with_coupling_detuning(0.0);
        assert!((m.raman_detuning() + 2e-5).abs() < 1e-20);
    }

    #[test]
    fn zeeman_field_matches_scaled_shift() {
        let c = PhysicalConstants::default();
        let z = ZeemanField::from_milligauss(10.0, &c).unwrap();
        assert_eq!(z.delta_z_bar, units::scale_frequency(c.zeeman_shift(10.0).unwrap()));
        assert!((z.delta_z_bar - 2.8e-5).abs() / 2.8e-5 < 2e-3);
    }

    #[test]
    fn rate_invariants() {
        let r = RelaxationRates::default();
        assert!(r.raman_bar >= r.transit_bar);
        assert!(RelaxationRates::from_lab(1e7, 1e4, 1e3, RateScaling::Angular).is_err());
        assert!(RelaxationRates::from_lab(-1.0, 0.0, 0.0, RateScaling::Angular).is_err());
    }

    #[test]
    fn lab_model_is_perturbative_only_at_small_probe() {
        let m = TripodModel::from_lab(Configuration::Config2, 22.0, 10.0).unwrap();
        assert!((m.coupling().rabi_bar - 8.6e-3).abs() < 1e-15);
        assert!(!m.is_perturbative());
        let m = m.with_probe_rabi(1e-3 * m.coupling().rabi_bar);
        assert!(m.is_perturbative());
    }

    #[test]
    fn configuration_round_trips_through_str() {
        for c in [Configuration::Config1, Configuration::Config2] {
            assert_eq!(c.as_str().parse::<Configuration>().unwrap(), c);
        }
        assert!("config3".parse::<Configuration>().is_err());
    }
}
