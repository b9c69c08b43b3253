//! Transition density of Brownian motion run at speed 2 reflecting at 0 and
//! 1, and the large-time inversion integral built on it.

use crate::error::{Error, Result};

pub const DEFAULT_KMAX: usize = 64;
pub const DEFAULT_QUAD_POINTS: usize = 48;
/// Below this time the cosine expansion needs too many modes; switch to the
/// method of Gaussian images.
pub const KERNEL_T_SWITCH: f64 = 0.05;

/// Transition density `p_t(u, v)` of the reflecting motion (variance `2t`
/// before reflection). Cosine expansion
/// `1 + 2 sum_k e^{-k^2 pi^2 t} cos(k pi u) cos(k pi v)` for `t >= 0.05`,
/// Gaussian images below.
pub fn reflected_kernel(t: f64, u: f64, v: f64, kmax: usize) -> f64 {
    assert!(t > 0.0 && t.is_finite(), "kernel needs t > 0");
    assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v));
    if t >= KERNEL_T_SWITCH {
        let mut sum = 1.0;
        for k in 1..=kmax {
            let kf = k as f64;
            let decay = (-kf * kf * std::f64::consts::PI.powi(2) * t).exp();
            if decay < 1e-300 {
                break;
            }
            sum += 2.0
                * decay
                * (kf * std::f64::consts::PI * u).cos()
                * (kf * std::f64::consts::PI * v).cos();
        }
        sum
    } else {
        let sigma = (2.0 * t).sqrt();
        let m_span = (4.25 * sigma).ceil() as i64 + 1;
        let mut sum = 0.0;
        for m in -m_span..=m_span {
            let shift = 2.0 * m as f64;
            sum += gaussian_pdf((v - u + shift) / sigma) + gaussian_pdf((v + u + shift) / sigma);
        }
        sum / sigma
    }
}

/// `int_0^x p_t(u, y) dy`, the kernel's distribution function in its second
/// argument.
pub fn reflected_kernel_cdf(t: f64, u: f64, x: f64, kmax: usize) -> f64 {
    assert!(t > 0.0 && t.is_finite(), "kernel needs t > 0");
    assert!((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&x));
    if t >= KERNEL_T_SWITCH {
        let mut sum = x;
        for k in 1..=kmax {
            let kf = k as f64;
            let decay = (-kf * kf * std::f64::consts::PI.powi(2) * t).exp();
            if decay < 1e-300 {
                break;
            }
            sum += 2.0 * decay * (kf * std::f64::consts::PI * u).cos()
                * (kf * std::f64::consts::PI * x).sin()
                / (kf * std::f64::consts::PI);
        }
        sum.clamp(0.0, 1.0)
    } else {
        let sigma = (2.0 * t).sqrt();
        let m_span = (4.25 * sigma).ceil() as i64 + 1;
        let mut sum = 0.0;
        for m in -m_span..=m_span {
            let shift = 2.0 * m as f64;
            sum += gaussian_cdf((x - u + shift) / sigma) - gaussian_cdf((-u + shift) / sigma);
            sum += gaussian_cdf((x + u + shift) / sigma) - gaussian_cdf((u + shift) / sigma);
        }
        sum.clamp(0.0, 1.0)
    }
}

fn gaussian_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn gaussian_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Probability that two independent reflecting motions started uniformly on
/// the triangle `0 <= u < v <= 1` (unnormalized, mass 1/2) have crossed at
/// time `t`:
/// `int_0^1 du int_u^1 dv int_0^1 dx p_t(u,x) int_0^x dy p_t(v,y)`.
/// Fixed-order Gauss-Legendre in all three dimensions; tends to 1/4.
pub fn large_time_curve(t: f64, kmax: usize, quad_points: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("large_time_curve requires finite t > 0"));
    }
    if kmax == 0 || quad_points < 2 {
        return Err(Error::invalid("kmax >= 1 and quad_points >= 2 required"));
    }
    let (nodes, weights) = gauss_legendre_unit(quad_points);
    // kernel matrix p_t(u_i, x_k) reused across the v loop
    let mut kernel_rows = vec![vec![0.0f64; quad_points]; quad_points];
    for (i, &u) in nodes.iter().enumerate() {
        for (k, &x) in nodes.iter().enumerate() {
            kernel_rows[i][k] = reflected_kernel(t, u, x, kmax);
        }
    }
    let mut total = 0.0;
    for (i, &u) in nodes.iter().enumerate() {
        let span = 1.0 - u;
        let mut inner_v = 0.0;
        for (j, &w) in nodes.iter().enumerate() {
            let v = u + span * w;
            // G(u, v) = int dx p_t(u,x) F_t(v, x)
            let mut g = 0.0;
            for (k, &x) in nodes.iter().enumerate() {
                g += weights[k] * kernel_rows[i][k] * reflected_kernel_cdf(t, v, x, kmax);
            }
            inner_v += weights[j] * g;
        }
        total += weights[i] * span * inner_v;
    }
    Ok(total)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights remapped to `[0, 1]`.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    (
        xs.iter().map(|x| (x + 1.0) / 2.0).collect(),
        ws.iter().map(|w| w / 2.0).collect(),
    )
}
