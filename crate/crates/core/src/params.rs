//! Dimensionless control parameters and atomic preparations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};

/// Control parameters of the atom-field model.
///
/// Everything is dimensionless: time runs in units of the inverse coupling
/// constant, position in inverse wave vectors, momentum in photon momenta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Normalized recoil frequency; multiplies momentum in `dx/dtau = kappa p`.
    pub kappa: f64,
    /// Normalized atom-field detuning.
    pub delta: f64,
    /// Highest retained Fock index N; amplitude arrays carry N + 1 entries.
    pub truncation: usize,
}

impl ModelParams {
    pub fn new(kappa: f64, delta: f64, truncation: usize) -> Result<Self> {
        let params = Self { kappa, delta, truncation };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::NonPositiveKappa(self.kappa));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidOptions(format!("delta = {} is not finite", self.delta)));
        }
        if self.truncation < 1 {
            return Err(Error::TruncationTooSmall);
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        if self.kappa >= 0.1 {
            out.push(Warning::LargeKappa(self.kappa));
        }
        out
    }

    /// Number of retained Fock levels, truncation + 1.
    pub fn levels(&self) -> usize {
        self.truncation + 1
    }
}

/// Initial internal state of the atom: inversion plus the relative phase
/// between the upper- and lower-level amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomPrep {
    /// Initial population inversion z(0), in [-1, 1].
    pub z0: f64,
    /// Phase of the lower-level amplitude relative to the upper one, radians.
    pub relative_phase: f64,
}

impl AtomPrep {
    pub fn new(z0: f64, relative_phase: f64) -> Result<Self> {
        if !(z0.abs() <= 1.0) {
            return Err(Error::InversionOutOfRange(z0));
        }
        if !relative_phase.is_finite() {
            return Err(Error::InvalidOptions(format!(
                "relative phase {relative_phase} is not finite"
            )));
        }
        Ok(Self { z0, relative_phase })
    }

    /// Atom fully in the upper level.
    pub fn excited() -> Self {
        Self { z0: 1.0, relative_phase: 0.0 }
    }

    /// Atom fully in the lower level.
    pub fn ground() -> Self {
        Self { z0: -1.0, relative_phase: 0.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(ModelParams::new(-1.0, 0.0, 10), Err(Error::NonPositiveKappa(_))));
        assert!(matches!(ModelParams::new(0.0, 0.0, 10), Err(Error::NonPositiveKappa(_))));
        assert!(matches!(ModelParams::new(0.001, 0.0, 0), Err(Error::TruncationTooSmall)));
        assert!(ModelParams::new(0.001, 0.4, 100).is_ok());
    }

    #[test]
    fn warns_on_large_kappa() {
        let params = ModelParams::new(0.2, 0.0, 10).unwrap();
        assert!(matches!(params.warnings()[..], [Warning::LargeKappa(_)]));
        let params = ModelParams::new(0.001, 0.0, 10).unwrap();
        assert!(params.warnings().is_empty());
    }

    #[test]
    fn rejects_inversion_outside_unit_interval() {
        assert!(matches!(AtomPrep::new(1.5, 0.0), Err(Error::InversionOutOfRange(_))));
        assert!(AtomPrep::new(-1.0, 0.0).is_ok());
        assert_eq!(AtomPrep::excited().z0, 1.0);
        assert_eq!(AtomPrep::ground().z0, -1.0);
    }
}
