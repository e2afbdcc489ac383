//! Equations of motion, conserved quantities, and the zero-detuning
//! closed form.
//!
//! The coupled system evolves the classical pair (x, p) together with the
//! amplitude ladder. Each quadruple (alpha[n], beta[n], rho[n+1], eta[n+1])
//! is driven by the n <-> n+1 photon exchange; keeping that pairing explicit
//! everywhere avoids off-by-one drift:
//!
//! ```text
//! dx      =  kappa p
//! dp      = -2 sin x * sum_n sqrt(n+1) (alpha[n] rho[n+1] + beta[n] eta[n+1])
//! dalpha[n]   = -(delta/2) beta[n]    - sqrt(n+1) eta[n+1] cos x
//! dbeta[n]    =  (delta/2) alpha[n]   + sqrt(n+1) rho[n+1] cos x
//! drho[n+1]   =  (delta/2) eta[n+1]   - sqrt(n+1) beta[n]  cos x
//! deta[n+1]   = -(delta/2) rho[n+1]   + sqrt(n+1) alpha[n] cos x
//! ```
//!
//! The ladder is closed by dropping couplings above the truncation, so
//! (alpha[N], beta[N]) and the decoupled (rho[0], eta[0]) evolve by the bare
//! detuning rotation alone.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::SystemState;

/// Time derivative of a [`SystemState`], same shape as the state itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivative {
    pub dx: f64,
    pub dp: f64,
    pub dalpha: Vec<f64>,
    pub dbeta: Vec<f64>,
    pub drho: Vec<f64>,
    pub deta: Vec<f64>,
}

pub(crate) fn sqrt_table(levels: usize) -> Vec<f64> {
    (0..levels).map(|n| ((n + 1) as f64).sqrt()).collect()
}

/// Right-hand side on the flat layout [x, p, alpha.., beta.., rho.., eta..].
///
/// `sqrt` must hold sqrt(n+1) for n = 0..levels. The hot loops go through
/// this function; keep it allocation-free.
pub(crate) fn rhs_flat(y: &[f64], out: &mut [f64], kappa: f64, half_delta: f64, sqrt: &[f64]) {
    let m = (y.len() - 2) / 4;
    let (x, p) = (y[0], y[1]);
    let (sin_x, cos_x) = x.sin_cos();

    let (a, rest) = y[2..].split_at(m);
    let (b, rest) = rest.split_at(m);
    let (r, e) = rest.split_at(m);

    let mut force = 0.0;
    for n in 0..m - 1 {
        force += sqrt[n] * (a[n] * r[n + 1] + b[n] * e[n + 1]);
    }

    out[0] = kappa * p;
    out[1] = -2.0 * sin_x * force;

    let (da, rest) = out[2..].split_at_mut(m);
    let (db, rest) = rest.split_at_mut(m);
    let (dr, de) = rest.split_at_mut(m);

    for n in 0..m - 1 {
        let g = sqrt[n] * cos_x;
        da[n] = -half_delta * b[n] - g * e[n + 1];
        db[n] = half_delta * a[n] + g * r[n + 1];
        dr[n + 1] = half_delta * e[n + 1] - g * b[n];
        de[n + 1] = -half_delta * r[n + 1] + g * a[n];
    }
    // Truncation boundary and the decoupled zero-photon lower level.
    da[m - 1] = -half_delta * b[m - 1];
    db[m - 1] = half_delta * a[m - 1];
    dr[0] = half_delta * e[0];
    de[0] = -half_delta * r[0];
}

/// Time derivative of `state` under the coupled equations of motion.
pub fn rhs(state: &SystemState, params: &ModelParams) -> Result<Derivative> {
    if state.levels() != params.levels() {
        return Err(Error::TruncationMismatch {
            expected: params.levels(),
            found: state.levels(),
        });
    }
    let y = state.to_flat();
    let mut dy = vec![0.0; y.len()];
    rhs_flat(&y, &mut dy, params.kappa, 0.5 * params.delta, &sqrt_table(params.levels()));
    let m = params.levels();
    Ok(Derivative {
        dx: dy[0],
        dp: dy[1],
        dalpha: dy[2..2 + m].to_vec(),
        dbeta: dy[2 + m..2 + 2 * m].to_vec(),
        drho: dy[2 + 2 * m..2 + 3 * m].to_vec(),
        deta: dy[2 + 3 * m..2 + 4 * m].to_vec(),
    })
}

/// The ladder invariants R[n] = alpha[n]^2 + beta[n]^2 + rho[n+1]^2 + eta[n+1]^2
/// for n = 0..truncation. Each is a first integral of the motion.
pub fn integrals_rn(state: &SystemState) -> Vec<f64> {
    let m = state.levels();
    (0..m - 1)
        .map(|n| {
            state.alpha[n] * state.alpha[n]
                + state.beta[n] * state.beta[n]
                + state.rho[n + 1] * state.rho[n + 1]
                + state.eta[n + 1] * state.eta[n + 1]
        })
        .collect()
}

/// Conserved total energy
/// W = kappa p^2/2 - (delta/2) sum_n (|a_n|^2 - |b_{n+1}|^2)
///     - 2 cos x sum_n sqrt(n+1) (alpha[n] rho[n+1] + beta[n] eta[n+1]).
///
/// The decoupled zero-photon lower amplitude does not enter; its modulus is
/// conserved separately.
pub fn energy_w(state: &SystemState, params: &ModelParams) -> f64 {
    let m = state.levels();
    let mut detuning_term = 0.0;
    let mut coupling = 0.0;
    for n in 0..m - 1 {
        detuning_term += state.alpha[n] * state.alpha[n] + state.beta[n] * state.beta[n]
            - state.rho[n + 1] * state.rho[n + 1]
            - state.eta[n + 1] * state.eta[n + 1];
        coupling += ((n + 1) as f64).sqrt()
            * (state.alpha[n] * state.rho[n + 1] + state.beta[n] * state.eta[n + 1]);
    }
    // alpha[N], beta[N] still carry detuning energy even with the ladder cut.
    detuning_term +=
        state.alpha[m - 1] * state.alpha[m - 1] + state.beta[m - 1] * state.beta[m - 1];
    0.5 * params.kappa * state.p * state.p - 0.5 * params.delta * detuning_term
        - 2.0 * state.x.cos() * coupling
}

/// Closed-form evolution at zero detuning.
///
/// With the atom prepared entirely in one level with real amplitudes the
/// optical force vanishes identically, the atom moves ballistically, and each
/// ladder quadruple reduces to a rotation by sqrt(n+1) Theta(tau) with
/// Theta(tau) = [sin(x0 + kappa p0 tau) - sin x0] / (kappa p0).
///
/// `elapsed` counts from `initial.tau`. The result matches the truncated
/// system exactly: the boundary amplitude (alpha[N] or rho[0]) stays frozen.
pub fn analytic_zero_detuning(
    initial: &SystemState,
    params: &ModelParams,
    elapsed: f64,
) -> Result<SystemState> {
    if params.delta != 0.0 {
        return Err(Error::NonZeroDetuning(params.delta));
    }
    if initial.p == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    if initial.levels() != params.levels() {
        return Err(Error::TruncationMismatch {
            expected: params.levels(),
            found: initial.levels(),
        });
    }
    let upper_only = initial
        .beta
        .iter()
        .chain(&initial.rho)
        .chain(&initial.eta)
        .all(|&v| v == 0.0);
    let lower_only = initial
        .alpha
        .iter()
        .chain(&initial.beta)
        .chain(&initial.eta)
        .all(|&v| v == 0.0);
    if !upper_only && !lower_only {
        return Err(Error::MixedPreparation);
    }

    let m = initial.levels();
    let kp = params.kappa * initial.p;
    let theta = ((initial.x + kp * elapsed).sin() - initial.x.sin()) / kp;

    let mut out = initial.clone();
    out.tau = initial.tau + elapsed;
    out.x = initial.x + kp * elapsed;
    if upper_only {
        // (alpha[n], eta[n+1]) rotate together; alpha[N] is frozen.
        for n in 0..m - 1 {
            let angle = ((n + 1) as f64).sqrt() * theta;
            let (sin_a, cos_a) = angle.sin_cos();
            out.alpha[n] = initial.alpha[n] * cos_a;
            out.eta[n + 1] = initial.alpha[n] * sin_a;
        }
    } else {
        // (beta[n], rho[n+1]) rotate together; rho[0] is frozen.
        for n in 0..m - 1 {
            let angle = ((n + 1) as f64).sqrt() * theta;
            let (sin_a, cos_a) = angle.sin_cos();
            out.rho[n + 1] = initial.rho[n + 1] * cos_a;
            out.beta[n] = initial.rho[n + 1] * sin_a;
        }
    }
    Ok(out)
}

/// Population inversion of the zero-detuning closed form, evaluated directly
/// from z_n(0) cos(2 sqrt(n+1) Theta) without touching amplitudes. Kept as an
/// independent route for cross-checks.
pub fn analytic_zero_detuning_inversion(
    initial: &SystemState,
    params: &ModelParams,
    elapsed: f64,
) -> Result<f64> {
    if params.delta != 0.0 {
        return Err(Error::NonZeroDetuning(params.delta));
    }
    if initial.p == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let m = initial.levels();
    let kp = params.kappa * initial.p;
    let theta = ((initial.x + kp * elapsed).sin() - initial.x.sin()) / kp;
    let mut z = 0.0;
    for n in 0..m - 1 {
        let z_n0 = initial.alpha[n] * initial.alpha[n] + initial.beta[n] * initial.beta[n]
            - initial.rho[n + 1] * initial.rho[n + 1]
            - initial.eta[n + 1] * initial.eta[n + 1];
        z += z_n0 * (2.0 * ((n + 1) as f64).sqrt() * theta).cos();
    }
    // Frozen boundary contributions.
    z += initial.alpha[m - 1] * initial.alpha[m - 1] + initial.beta[m - 1] * initial.beta[m - 1];
    z -= initial.rho[0] * initial.rho[0] + initial.eta[0] * initial.eta[0];
    Ok(z)
}
