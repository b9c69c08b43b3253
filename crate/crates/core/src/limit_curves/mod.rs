//! Numerical evaluators for every theoretical limit curve the walks are
//! compared against, each with an explicit truncation/tolerance policy.

mod kernel;
mod pair_chain;

pub use kernel::{
    gauss_legendre, large_time_curve, reflected_kernel, reflected_kernel_cdf, DEFAULT_KMAX,
    DEFAULT_QUAD_POINTS, KERNEL_T_SWITCH,
};
pub use pair_chain::{
    adjacent_small_curve, adjacent_small_curve_detailed, adjacent_small_over_sqrt_t,
    pair_swap_probability, separation_tail_bound, PairChain, SmallCurveEval, DEFAULT_TOL,
};

use crate::error::{Error, Result};
use crate::stats::{summarize, EstimateSummary, RngStream};

/// Hypercube distance profile `(1 - e^{-2t}) / 2`.
pub fn hypercube_curve(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("hypercube_curve requires finite t >= 0"));
    }
    Ok((1.0 - (-2.0 * t).exp()) / 2.0)
}

/// Random-transposition distance profile: `t` in the linear phase
/// `t <= 1/2`, and past the transition one minus the cluster series
/// `(1/2t) sum_k k^{k-2}/k! (2t e^{-2t})^k`, truncated once the tail bound
/// falls under `tol`.
pub fn random_transposition_curve(t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(
            "random_transposition_curve requires finite t > 0",
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if t <= 0.5 {
        return Ok(t);
    }
    let y = 2.0 * t * (-2.0 * t).exp();
    let ratio_cap = y * std::f64::consts::E; // sup_k of the term ratio; 1 exactly at t = 1/2
    let mut term = y; // k = 1
    let mut sum = term;
    let mut tail = f64::INFINITY;
    const TERM_CAP: u64 = 10_000_000;
    for k in 1..TERM_CAP {
        let kf = k as f64;
        term *= y * ((kf - 2.0) * (1.0 / kf).ln_1p()).exp();
        sum += term;
        if k < 8 {
            continue;
        }
        // Stirling comparison: a_j <= (ye)^j / (sqrt(2 pi) j^{5/2}), ye <= 1.
        let stirling = 0.2660 * (kf + 1.0).powf(-1.5);
        tail = stirling;
        if ratio_cap < 1.0 {
            let geometric = term * ratio_cap / (1.0 - ratio_cap);
            tail = tail.min(geometric);
        }
        if tail < tol {
            let value = 1.0 - sum / (2.0 * t);
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::invalid(format!(
                    "series evaluation left (0,1): {value}"
                )));
            }
            return Ok(value);
        }
    }
    Err(Error::ToleranceUnachievable {
        context: "random_transposition_curve series",
        requested: tol,
        achieved: tail,
    })
}

/// Cubic-graph distance profile `min(t/3, 1)`.
pub fn cubic_curve(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("cubic_curve requires finite t >= 0"));
    }
    Ok((t / 3.0).min(1.0))
}

/// Riffle descent profile `alpha - 1/(e^{1/alpha} - 1)`.
pub fn riffle_curve(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("riffle_curve requires finite alpha > 0"));
    }
    if alpha > 1e8 {
        // series tail of the exact expression; avoids cancellation
        return Ok(0.5 - 1.0 / (12.0 * alpha));
    }
    Ok(alpha - 1.0 / f64::exp_m1(1.0 / alpha))
}

/// The intermediate-regime constant `sqrt(2/pi)`.
pub fn intermediate_constant() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

/// Monte Carlo companion of the intermediate constant: estimates
/// `(1/2) E max_{0<=s<=1} B_{4s}` by Donsker discretization of the walk
/// (`B_{4s}` over the unit interval is a Brownian motion of total variance
/// 4, so each replica reports `max_k S_k / sqrt(steps)`).
pub fn expected_max_b4_mc(
    replicas: usize,
    steps: usize,
    rng: &mut RngStream,
) -> Result<EstimateSummary> {
    if replicas < 2 || steps == 0 {
        return Err(Error::invalid(
            "expected_max_b4_mc requires replicas >= 2 and steps >= 1",
        ));
    }
    use rand::RngCore;
    let scale = 1.0 / (steps as f64).sqrt();
    let mut samples = Vec::with_capacity(replicas);
    for _ in 0..replicas {
        let mut pos: i64 = 0;
        let mut max_pos: i64 = 0;
        let mut remaining = steps;
        while remaining > 0 {
            let mut bits = rng.next_u64();
            let take = remaining.min(64);
            for _ in 0..take {
                pos += if bits & 1 == 1 { 1 } else { -1 };
                bits >>= 1;
                if pos > max_pos {
                    max_pos = pos;
                }
            }
            remaining -= take;
        }
        samples.push(max_pos as f64 * scale);
    }
    summarize(&samples, Some(intermediate_constant()))
}
