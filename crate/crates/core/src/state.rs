//! State representation and initialization.
//!
//! A [`SystemState`] bundles the classical pair (x, p) with four real arrays
//! holding the real/imaginary parts of the upper- (`alpha`, `beta`) and
//! lower-level (`rho`, `eta`) probability amplitudes over the Fock basis.
//! Index n is the photon number; the lower-level amplitude with zero photons
//! (`rho[0]`, `eta[0]`) is carried explicitly even though the interaction
//! never couples to it, so norm and fidelity stay well defined for arbitrary
//! preparations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::params::{AtomPrep, ModelParams};

/// Coherent-state expansion coefficients over the retained Fock levels.
#[derive(Clone, Debug)]
pub struct CoherentWeights {
    /// c[n] = exp(-nbar/2) nbar^(n/2) / sqrt(n!), for n = 0..=truncation.
    pub c: Vec<f64>,
    /// Probability mass lost to truncation: 1 - sum c[n]^2 (clamped at 0).
    pub tail: f64,
}

impl CoherentWeights {
    pub fn warnings(&self, truncation: usize) -> Vec<Warning> {
        if self.tail > 1e-6 {
            vec![Warning::TruncationTail { tail: self.tail, truncation }]
        } else {
            Vec::new()
        }
    }
}

/// Poisson amplitudes of a coherent field state with mean photon number
/// `nbar`, computed in log space so large `nbar` cannot overflow n!.
pub fn coherent_poisson_weights(nbar: f64, truncation: usize) -> Result<CoherentWeights> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::NegativeMeanPhotons(nbar));
    }
    if truncation < 1 {
        return Err(Error::TruncationTooSmall);
    }
    let levels = truncation + 1;
    let mut c = vec![0.0; levels];
    if nbar == 0.0 {
        c[0] = 1.0;
        return Ok(CoherentWeights { c, tail: 0.0 });
    }
    // ln c_n = -nbar/2 + (n ln nbar - ln n!)/2, built by recurrence.
    let ln_nbar = nbar.ln();
    let mut ln_c = -0.5 * nbar;
    c[0] = ln_c.exp();
    for n in 1..levels {
        ln_c += 0.5 * (ln_nbar - (n as f64).ln());
        c[n] = ln_c.exp();
    }
    // Compensated sum of c_n^2; the tail is tiny whenever truncation is adequate.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &cn in &c {
        let term = cn * cn;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let tail = (1.0 - sum).max(0.0);
    Ok(CoherentWeights { c, tail })
}

/// Snapshot of the coupled classical/quantum state at one instant.
///
/// Immutable by convention: evolution produces new snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    /// Time in units of the inverse coupling constant.
    pub tau: f64,
    /// Center-of-mass position in inverse wave vectors.
    pub x: f64,
    /// Center-of-mass momentum in photon momenta.
    pub p: f64,
    /// Re a_n: upper level, n photons.
    pub alpha: Vec<f64>,
    /// Im a_n.
    pub beta: Vec<f64>,
    /// Re b_n: lower level, n photons.
    pub rho: Vec<f64>,
    /// Im b_n.
    pub eta: Vec<f64>,
}

impl SystemState {
    /// Zero-amplitude state with the given number of retained Fock levels.
    pub fn zeroed(truncation: usize) -> Self {
        let levels = truncation + 1;
        Self {
            tau: 0.0,
            x: 0.0,
            p: 0.0,
            alpha: vec![0.0; levels],
            beta: vec![0.0; levels],
            rho: vec![0.0; levels],
            eta: vec![0.0; levels],
        }
    }

    pub fn levels(&self) -> usize {
        self.alpha.len()
    }

    /// Highest retained Fock index.
    pub fn truncation(&self) -> usize {
        self.alpha.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, r, e) = (self.alpha.len(), self.beta.len(), self.rho.len(), self.eta.len());
        if a != b || a != r || a != e || a < 2 {
            return Err(Error::RaggedAmplitudes(a, b, r, e));
        }
        let finite = self.tau.is_finite()
            && self.x.is_finite()
            && self.p.is_finite()
            && self.amplitude_iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFiniteState { tau: self.tau });
        }
        let norm = norm2(self);
        if norm > 1.0 + 1e-12 {
            return Err(Error::NormTooLarge { norm });
        }
        Ok(())
    }

    fn amplitude_iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.alpha
            .iter()
            .chain(&self.beta)
            .chain(&self.rho)
            .chain(&self.eta)
            .copied()
    }

    /// Flat coordinate vector [x, p, alpha.., beta.., rho.., eta..] used by
    /// the integrator. `tau` is tracked separately.
    pub(crate) fn write_flat(&self, out: &mut Vec<f64>) {
        out.clear();
        out.reserve(2 + 4 * self.levels());
        out.push(self.x);
        out.push(self.p);
        out.extend_from_slice(&self.alpha);
        out.extend_from_slice(&self.beta);
        out.extend_from_slice(&self.rho);
        out.extend_from_slice(&self.eta);
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.write_flat(&mut out);
        out
    }

    pub(crate) fn from_flat(tau: f64, y: &[f64]) -> Self {
        debug_assert!(y.len() >= 6 && (y.len() - 2) % 4 == 0);
        let m = (y.len() - 2) / 4;
        Self {
            tau,
            x: y[0],
            p: y[1],
            alpha: y[2..2 + m].to_vec(),
            beta: y[2 + m..2 + 2 * m].to_vec(),
            rho: y[2 + 2 * m..2 + 3 * m].to_vec(),
            eta: y[2 + 3 * m..2 + 4 * m].to_vec(),
        }
    }

    /// JSON form of the documented flat layout
    /// `{tau, x, p, n, alpha[], beta[], rho[], eta[]}`. Doubles round-trip
    /// bit-exactly.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let state: SystemState = serde_json::from_str(text)?;
        state.validate()?;
        Ok(state)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    tau: f64,
    x: f64,
    p: f64,
    n: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    rho: Vec<f64>,
    eta: Vec<f64>,
}

impl Serialize for SystemState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateRecord {
            tau: self.tau,
            x: self.x,
            p: self.p,
            n: self.truncation(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            rho: self.rho.clone(),
            eta: self.eta.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SystemState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let record = StateRecord::deserialize(deserializer)?;
        let levels = record.n + 1;
        for (name, arr) in [
            ("alpha", &record.alpha),
            ("beta", &record.beta),
            ("rho", &record.rho),
            ("eta", &record.eta),
        ] {
            if arr.len() != levels {
                return Err(serde::de::Error::custom(format!(
                    "{name} carries {} entries but n = {} implies {levels}",
                    arr.len(),
                    record.n
                )));
            }
        }
        Ok(SystemState {
            tau: record.tau,
            x: record.x,
            p: record.p,
            alpha: record.alpha,
            beta: record.beta,
            rho: record.rho,
            eta: record.eta,
        })
    }
}

/// Product state: coherent field with mean `nbar` photons times the atomic
/// superposition described by `prep`, at phase-space point (x0, p0).
pub fn init_state(
    x0: f64,
    p0: f64,
    nbar: f64,
    prep: AtomPrep,
    params: &ModelParams,
) -> Result<SystemState> {
    params.validate()?;
    if !(prep.z0.abs() <= 1.0) {
        return Err(Error::InversionOutOfRange(prep.z0));
    }
    let weights = coherent_poisson_weights(nbar, params.truncation)?;
    let c_upper = ((1.0 + prep.z0) / 2.0).sqrt();
    let c_lower = ((1.0 - prep.z0) / 2.0).sqrt();
    let (sin_phase, cos_phase) = prep.relative_phase.sin_cos();

    let mut state = SystemState::zeroed(params.truncation);
    state.x = x0;
    state.p = p0;
    for (n, &cn) in weights.c.iter().enumerate() {
        state.alpha[n] = c_upper * cn;
        state.rho[n] = c_lower * cos_phase * cn;
        state.eta[n] = c_lower * sin_phase * cn;
    }
    state.validate()?;
    Ok(state)
}

/// Total quantum probability carried by the state,
/// sum over n of alpha^2 + beta^2 + rho^2 + eta^2.
pub fn norm2(state: &SystemState) -> f64 {
    let mut sum = 0.0;
    for n in 0..state.levels() {
        sum += state.alpha[n] * state.alpha[n]
            + state.beta[n] * state.beta[n]
            + state.rho[n] * state.rho[n]
            + state.eta[n] * state.eta[n];
    }
    sum
}

/// Random unit-norm state at x = p = tau = 0; used by statistical checks.
pub fn random_normalized<R: Rng + ?Sized>(truncation: usize, rng: &mut R) -> SystemState {
    let mut state = SystemState::zeroed(truncation);
    for arr in [&mut state.alpha, &mut state.beta, &mut state.rho, &mut state.eta] {
        for v in arr.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
    }
    let scale = 1.0 / norm2(&state).sqrt();
    for arr in [&mut state.alpha, &mut state.beta, &mut state.rho, &mut state.eta] {
        for v in arr.iter_mut() {
            *v *= scale;
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent Poisson pmf partial sums via the stable pmf recurrence.
    fn poisson_pmf_sum(nbar: f64, up_to: usize) -> f64 {
        let mut pmf = (-nbar).exp();
        let mut sum = pmf;
        for n in 1..=up_to {
            pmf *= nbar / n as f64;
            sum += pmf;
        }
        sum
    }

    /// Log-space Poisson tail mass beyond `from`, summed far past the mode.
    fn poisson_tail_oracle(nbar: f64, from: usize) -> f64 {
        let mut ln_pmf = -nbar;
        for n in 1..=from {
            ln_pmf += nbar.ln() - (n as f64).ln();
        }
        let mut tail = 0.0;
        let mut ln_term = ln_pmf;
        for n in from + 1..from + 400 {
            ln_term += nbar.ln() - (n as f64).ln();
            tail += ln_term.exp();
        }
        tail
    }

    #[test]
    fn vacuum_weights_are_a_fock_state() {
        let w = coherent_poisson_weights(0.0, 8).unwrap();
        assert_eq!(w.c[0], 1.0);
        assert!(w.c[1..].iter().all(|&c| c == 0.0));
        assert_eq!(w.tail, 0.0);
    }

    #[test]
    fn weights_match_poisson_partial_sums() {
        // Small truncation leaves a meaningful tail; compare to the oracle.
        let w = coherent_poisson_weights(10.0, 15).unwrap();
        let sum_sq: f64 = w.c.iter().map(|c| c * c).sum();
        assert_relative_eq!(sum_sq, poisson_pmf_sum(10.0, 15), max_relative = 1e-13);
        assert_relative_eq!(w.tail, 1.0 - poisson_pmf_sum(10.0, 15), max_relative = 1e-10);
        assert!(!w.warnings(15).is_empty());
    }

    #[test]
    fn truncation_100_leaves_negligible_tail_for_nbar_10() {
        let w = coherent_poisson_weights(10.0, 100).unwrap();
        // The true tail is far below any representable drift; the f64 report
        // can only be summation noise.
        assert!(poisson_tail_oracle(10.0, 100) < 1e-30);
        assert!(w.tail < 1e-12);
        assert!(w.warnings(100).is_empty());
    }

    #[test]
    fn weights_peak_at_the_poisson_mode() {
        let w = coherent_poisson_weights(10.0, 100).unwrap();
        // pmf(9) = pmf(10) exactly for mean 10, and both dominate the rest.
        assert_relative_eq!(w.c[9], w.c[10], max_relative = 1e-13);
        let peak = w.c[9].max(w.c[10]);
        for (n, &c) in w.c.iter().enumerate() {
            if n != 9 && n != 10 {
                assert!(c < peak);
            }
        }
    }

    #[test]
    fn tail_is_monotone_in_truncation() {
        let mut prev = f64::INFINITY;
        for truncation in 5..40 {
            let w = coherent_poisson_weights(10.0, truncation).unwrap();
            assert!(w.tail <= prev + 1e-18);
            prev = w.tail;
        }
    }

    #[test]
    fn rejects_negative_nbar() {
        assert!(matches!(
            coherent_poisson_weights(-1.0, 10),
            Err(Error::NegativeMeanPhotons(_))
        ));
    }

    #[test]
    fn excited_preparation_populates_upper_level_only() {
        let params = ModelParams::new(0.001, 0.0, 100).unwrap();
        let state = init_state(0.0, 25.0, 10.0, AtomPrep::excited(), &params).unwrap();
        assert!(state.rho.iter().chain(&state.eta).all(|&v| v == 0.0));
        assert!(state.beta.iter().all(|&v| v == 0.0));
        let w = coherent_poisson_weights(10.0, 100).unwrap();
        for n in 0..=100 {
            assert_eq!(state.alpha[n], w.c[n]);
        }
        assert!((norm2(&state) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_vacuum_puts_everything_in_rho0() {
        let params = ModelParams::new(0.001, 0.0, 10).unwrap();
        let state = init_state(0.0, 0.0, 0.0, AtomPrep::ground(), &params).unwrap();
        assert_eq!(state.rho[0], 1.0);
        let rest: f64 = norm2(&state) - state.rho[0] * state.rho[0];
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn balanced_preparation_splits_evenly() {
        let params = ModelParams::new(0.001, 0.4, 100).unwrap();
        let prep = AtomPrep::new(0.0, 0.0).unwrap();
        let state = init_state(0.0, 25.0, 10.0, prep, &params).unwrap();
        let upper: f64 = state.alpha.iter().map(|a| a * a).sum();
        let lower: f64 = state.rho.iter().map(|r| r * r).sum();
        assert_relative_eq!(upper, 0.5, epsilon = 1e-12);
        assert_relative_eq!(lower, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn relative_phase_lands_in_eta() {
        let params = ModelParams::new(0.001, 0.4, 20).unwrap();
        let prep = AtomPrep::new(0.0, std::f64::consts::FRAC_PI_2).unwrap();
        let state = init_state(0.0, 25.0, 5.0, prep, &params).unwrap();
        assert!(state.eta.iter().any(|&v| v != 0.0));
        assert!(state.rho.iter().all(|&v| v.abs() < 1e-16));
    }

    #[test]
    fn norm2_of_zero_state_is_zero() {
        assert_eq!(norm2(&SystemState::zeroed(5)), 0.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let params = ModelParams::new(0.001, 0.4, 30).unwrap();
        let mut state = init_state(0.3, 25.0, 10.0, AtomPrep::excited(), &params).unwrap();
        state.tau = 17.25;
        let text = state.to_json().unwrap();
        let back = SystemState::from_json(&text).unwrap();
        assert_eq!(state, back);
        assert!(text.contains("\"n\":30"));
    }

    #[test]
    fn json_rejects_inconsistent_level_count() {
        let text = r#"{"tau":0.0,"x":0.0,"p":0.0,"n":3,"alpha":[1.0],"beta":[0.0],"rho":[0.0],"eta":[0.0]}"#;
        assert!(SystemState::from_json(text).is_err());
    }

    #[test]
    fn flat_round_trip_preserves_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut state = random_normalized(12, &mut rng);
        state.x = 1.5;
        state.p = -3.0;
        state.tau = 2.0;
        let y = state.to_flat();
        assert_eq!(y.len(), 2 + 4 * 13);
        let back = SystemState::from_flat(state.tau, &y);
        assert_eq!(state, back);
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..32 {
            let state = random_normalized(9, &mut rng);
            assert_relative_eq!(norm2(&state), 1.0, epsilon = 1e-12);
            state.validate().unwrap();
        }
    }
}
