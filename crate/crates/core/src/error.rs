use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("degenerate steady state: Liouvillian kernel has dimension {kernel_dim} (expected 1)")]
    DegenerateSteadyState { kernel_dim: usize },

    #[error("time integration did not settle after {steps} steps (residual {residual:.3e})")]
    Timeout { steps: u64, residual: f64 },

    #[error("probe Rabi frequency is zero; use the closed-form susceptibilities for the probe-free limit")]
    ZeroProbe,

    #[error("probe transition has no population difference ({0:.3e}); susceptibility is undefined")]
    NoProbePopulation(f64),

    #[error("Morris-Shore reduction invalid: {0}")]
    MorrisShore(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep point failed (power {power_mw} mW, B {b_mg} mG, delta {delta_hz} Hz): {source}")]
    SweepPoint {
        power_mw: f64,
        b_mg: f64,
        delta_hz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("spectrum error: {0}")]
    Spectrum(String),

    #[error("half-maximum crossing of feature at {center_hz:.1} Hz lies outside the grid; widen the sweep")]
    FwhmOutOfRange { center_hz: f64 },

    #[error("fit failed: {0}")]
    Fit(String),
}
