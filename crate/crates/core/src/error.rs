//! Error and warning types shared across the crate.

use std::fmt;

use crate::state::SystemState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("kappa must be positive (got {0})")]
    NonPositiveKappa(f64),

    #[error("truncation must be at least 1")]
    TruncationTooSmall,

    #[error("mean photon number must be nonnegative (got {0})")]
    NegativeMeanPhotons(f64),

    #[error("initial inversion must lie in [-1, 1] (got {0})")]
    InversionOutOfRange(f64),

    #[error("state carries {found} Fock levels but the model expects {expected}")]
    TruncationMismatch { expected: usize, found: usize },

    #[error("amplitude arrays must share one length >= 2 (got {0}, {1}, {2}, {3})")]
    RaggedAmplitudes(usize, usize, usize, usize),

    #[error("state entry is not finite at tau = {tau}")]
    NonFiniteState { tau: f64 },

    #[error("state norm {norm} exceeds 1")]
    NormTooLarge { norm: f64 },

    #[error("derivative became non-finite at tau = {tau}")]
    NonFiniteDerivative { tau: f64, last_good: Box<SystemState> },

    #[error(
        "conservation alarm after {steps} steps: norm drift {norm_drift:.3e}, \
         energy drift {energy_drift:.3e} exceed threshold {threshold:.3e}"
    )]
    ConservationAlarm {
        norm_drift: f64,
        energy_drift: f64,
        threshold: f64,
        steps: u64,
        last_good: Box<SystemState>,
    },

    #[error("step size must be positive (got {0})")]
    NonPositiveStep(f64),

    #[error("integration horizon {tau_end} does not lie beyond the state time {tau}")]
    EmptyHorizon { tau: f64, tau_end: f64 },

    #[error("closed-form evolution requires delta = 0 (got {0})")]
    NonZeroDetuning(f64),

    #[error("closed-form evolution requires p != 0")]
    ZeroMomentum,

    #[error("closed-form evolution requires a single populated level with real amplitudes")]
    MixedPreparation,

    #[error("fidelity requires equal truncations ({0} vs {1})")]
    FidelityTruncationMismatch(usize, usize),

    #[error("window [{lo}, {hi}] selects fewer than two samples")]
    DegenerateWindow { lo: f64, hi: f64 },

    #[error("fidelity sample f = {value} at tau = {tau} is not positive")]
    NonPositiveFidelity { tau: f64, value: f64 },

    #[error("lyapunov exponent must be positive to define a predictability horizon (got {0})")]
    UndefinedHorizon(f64),

    #[error("confidence interval must satisfy dx > dx0 > 0 (got dx = {dx}, dx0 = {dx0})")]
    InvalidConfidence { dx: f64, dx0: f64 },

    #[error("trajectory separation collapsed to zero during exponent estimation")]
    DegenerateSeparation,

    #[error("grid requires min <= max and count >= 1 (got [{min}, {max}] x {count})")]
    InvalidGrid { min: f64, max: f64, count: usize },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("state serialization failed: {0}")]
    Serialization(#[from] serde_json::Error),
}

/// Non-fatal validation findings. Callers decide whether to surface them.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// kappa >= 0.1 breaks the recoil ordering kappa << 1 the model assumes.
    LargeKappa(f64),
    /// Poisson mass beyond the truncation exceeds 1e-6; raise the truncation.
    TruncationTail { tail: f64, truncation: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::LargeKappa(kappa) => {
                write!(f, "kappa = {kappa} is not small against 1; the semiclassical ordering degrades")
            }
            Warning::TruncationTail { tail, truncation } => {
                write!(
                    f,
                    "coherent-state mass {tail:.3e} lies beyond Fock index {truncation}; raise the truncation"
                )
            }
        }
    }
}
