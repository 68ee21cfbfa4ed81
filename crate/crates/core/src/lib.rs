//! Double dark resonances in a four-level tripod (metastable helium,
//! J = 1 → J = 0): closed-form susceptibilities, full optical Bloch steady
//! states, transmission spectra and lineshape analysis.
//!
//! Frequencies are dimensionless ("barred"): a frequency f in Hz maps to
//! f/10⁹. See [`units`] for the conversions.

pub mod analysis;
pub mod analytic;
pub mod density;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod spectra;
pub mod steady_state;
pub mod units;

pub use density::{DensityMatrix, Level};
pub use error::{Error, Result};
pub use liouvillian::{assemble_liouvillian, build_hamiltonian, build_relaxation, HamiltonianRwa, LiouvillianMatrix};
pub use model::{Configuration, DriveField, FieldRole, MediumGeometry, RelaxationRates, TripodModel, ZeemanField};
pub use spectra::{run_sweep, transmission, Backend, Spectrum, SpectrumRow, SpectrumTable, SweepSpec};
pub use steady_state::{evolve_to_steady, probe_susceptibility_numeric, solve_steady, EvolveOptions};
pub use units::{PhysicalConstants, RateScaling};
