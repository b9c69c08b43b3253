//! Truncated two-particle stirring chain and its uniformization.
//!
//! The chain tracks (separation, swap parity) for two labeled particles
//! stirred on the integer line. At separation d >= 2 the gap moves up or
//! down at rate 2 each (four live edges); adjacent particles swap at rate 1
//! (parity flip) or separate at rate 2. Separations above `dmax` absorb.
//! Transient probabilities come from uniformization at rate 4: a Poisson
//! mixture of powers of the discretized kernel, truncated once the Poisson
//! tail is below tolerance.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-4;
const UNIFORMIZATION_RATE: f64 = 4.0;
const DMAX_DOUBLING_CAP: usize = 1 << 22;

/// State layout: `2(d-1) + parity` for `1 <= d <= dmax`, overflow last.
#[derive(Debug, Clone)]
pub struct PairChain {
    dmax: usize,
}

impl PairChain {
    pub fn new(dmax: usize) -> Result<Self> {
        if dmax < 2 {
            return Err(Error::invalid("pair chain needs dmax >= 2"));
        }
        Ok(PairChain { dmax })
    }

    pub fn dmax(&self) -> usize {
        self.dmax
    }

    pub fn state_count(&self) -> usize {
        2 * self.dmax + 1
    }

    fn overflow(&self) -> usize {
        2 * self.dmax
    }

    #[inline]
    fn idx(d: usize, parity: usize) -> usize {
        2 * (d - 1) + parity
    }

    /// Off-diagonal generator rates from every state, for the rate-sanity
    /// and row-sum checks.
    pub fn generator_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.state_count()];
        for parity in 0..2 {
            rows[Self::idx(1, parity)] = vec![
                (Self::idx(1, 1 - parity), 1.0),
                (Self::idx(2, parity), 2.0),
            ];
            for d in 2..=self.dmax {
                let up = if d < self.dmax {
                    (Self::idx(d + 1, parity), 2.0)
                } else {
                    (self.overflow(), 2.0)
                };
                rows[Self::idx(d, parity)] = vec![(Self::idx(d - 1, parity), 2.0), up];
            }
        }
        rows
    }

    /// One step of the uniformized kernel `P = I + Q/4`, `dst = src P`.
    fn step(&self, src: &[f64], dst: &mut [f64]) {
        dst.fill(0.0);
        let dmax = self.dmax;
        for parity in 0..2 {
            // adjacent: swap 1/4, separate 1/2, hold 1/4
            let i = Self::idx(1, parity);
            let mass = src[i];
            if mass != 0.0 {
                dst[Self::idx(1, 1 - parity)] += mass * 0.25;
                dst[Self::idx(2, parity)] += mass * 0.5;
                dst[i] += mass * 0.25;
            }
            for d in 2..dmax {
                let mass = src[Self::idx(d, parity)];
                if mass != 0.0 {
                    dst[Self::idx(d - 1, parity)] += mass * 0.5;
                    dst[Self::idx(d + 1, parity)] += mass * 0.5;
                }
            }
            let mass = src[Self::idx(dmax, parity)];
            if mass != 0.0 {
                dst[Self::idx(dmax - 1, parity)] += mass * 0.5;
                dst[self.overflow()] += mass * 0.5;
            }
        }
        dst[self.overflow()] += src[self.overflow()];
    }

    /// Evolves the (possibly unnormalized) initial mass vector to time `t`;
    /// the Poisson mixture is truncated once its missing tail, scaled by the
    /// total mass, drops below `tail_tol`.
    pub fn evolve(&self, initial: &[f64], t: f64, tail_tol: f64) -> Result<Vec<f64>> {
        assert_eq!(initial.len(), self.state_count());
        let total_mass: f64 = initial.iter().sum();
        let lambda = UNIFORMIZATION_RATE * t;
        let mut result = vec![0.0; self.state_count()];
        if lambda == 0.0 {
            result.copy_from_slice(initial);
            return Ok(result);
        }
        let scaled_tol = tail_tol / total_mass.max(1.0);
        let k_cap = (lambda + 12.0 * (lambda + 1.0).sqrt() + 300.0) as u64;
        let mut v = initial.to_vec();
        let mut next = vec![0.0; self.state_count()];
        let ln_lambda = lambda.ln();
        let mut cumulative = 0.0;
        for k in 0..=k_cap {
            let ln_pmf = -lambda + k as f64 * ln_lambda - libm::lgamma(k as f64 + 1.0);
            let pmf = ln_pmf.exp();
            if pmf > 0.0 {
                cumulative += pmf;
                for (r, &x) in result.iter_mut().zip(v.iter()) {
                    *r += pmf * x;
                }
            }
            if k as f64 > lambda && 1.0 - cumulative < scaled_tol {
                return Ok(result);
            }
            self.step(&v, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
        Err(Error::ToleranceUnachievable {
            context: "pair chain uniformization Poisson tail",
            requested: tail_tol,
            achieved: (1.0 - cumulative) * total_mass.max(1.0),
        })
    }

    fn odd_mass(&self, dist: &[f64]) -> f64 {
        (1..=self.dmax).map(|d| dist[Self::idx(d, 1)]).sum()
    }
}

/// Chernoff tail certificate from the walk's moment generating function:
/// an upper bound on the swap probability summed over all separations
/// beyond `x0` at time `t`, optimized over a theta grid.
pub fn separation_tail_bound(x0: usize, t: f64) -> f64 {
    let mut best = f64::INFINITY;
    let x0 = x0 as f64;
    for i in 0..400 {
        let theta = 1e-3 * (10.0f64 / 1e-3).powf(i as f64 / 399.0);
        let rate_term = t * (theta.exp() + (-theta).exp() - 2.0);
        let decay = (-theta / 2.0).exp();
        // 8 e^{t c(theta)} sum_{x > x0} e^{-theta x / 2}
        let ln_lead = rate_term - theta * (x0 + 1.0) / 2.0;
        let bound = 8.0 * ln_lead.exp() / (1.0 - decay);
        if bound < best {
            best = bound;
        }
    }
    best
}

/// Probability that two stirred particles started at separation `x` (even
/// parity) have swapped an odd number of times by time `t`.
pub fn pair_swap_probability(x: usize, t: f64, dmax: Option<usize>, tol: f64) -> Result<f64> {
    if x < 1 {
        return Err(Error::invalid("separation must be at least 1"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("time must be finite and nonnegative"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let eval = |dmax: usize| -> Result<f64> {
        let chain = PairChain::new(dmax)?;
        let mut initial = vec![0.0; chain.state_count()];
        initial[PairChain::idx(x, 0)] = 1.0;
        let dist = chain.evolve(&initial, t, tol * 0.1)?;
        Ok(chain.odd_mass(&dist))
    };
    match dmax {
        Some(d) => {
            if d < x.max(2) {
                return Err(Error::invalid("dmax must cover the starting separation"));
            }
            eval(d)
        }
        None => {
            let mut d = default_dmax(t).max(x + 4);
            let mut value = eval(d)?;
            loop {
                d *= 2;
                if d > DMAX_DOUBLING_CAP {
                    return Err(Error::ToleranceUnachievable {
                        context: "pair_swap_probability dmax doubling",
                        requested: tol,
                        achieved: f64::NAN,
                    });
                }
                let refined = eval(d)?;
                let stable = (refined - value).abs() < tol;
                value = refined;
                if stable {
                    return Ok(value);
                }
            }
        }
    }
}

fn default_dmax(t: f64) -> usize {
    (6.0 * t.sqrt()).ceil() as usize + 10
}

/// Detailed result of the small-time curve evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallCurveEval {
    pub value: f64,
    pub dmax: usize,
    /// Certified bound on the separation-sum remainder past `dmax`.
    pub tail_bound: f64,
}

/// The small-time adjacent-transposition curve
/// `f(t) = sum_{x >= 1} P(pair at separation x swapped by t)`, evaluated by
/// one uniformization pass with unit mass on every even state. The
/// separation sum is truncated at `dmax`, doubled until the value is stable
/// within `tol` and the analytic tail certificate is below `tol`.
pub fn adjacent_small_curve_detailed(
    t: f64,
    dmax: Option<usize>,
    tol: f64,
) -> Result<SmallCurveEval> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("time must be finite and nonnegative"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if t == 0.0 {
        return Ok(SmallCurveEval {
            value: 0.0,
            dmax: 0,
            tail_bound: 0.0,
        });
    }
    let eval = |dmax: usize| -> Result<f64> {
        let chain = PairChain::new(dmax)?;
        let mut initial = vec![0.0; chain.state_count()];
        for x in 1..=dmax {
            initial[PairChain::idx(x, 0)] = 1.0;
        }
        let dist = chain.evolve(&initial, t, tol * 0.1)?;
        Ok(chain.odd_mass(&dist))
    };
    match dmax {
        Some(d) => {
            let d = d.max(2);
            let tail = separation_tail_bound(d, t);
            if tail >= tol {
                return Err(Error::ToleranceUnachievable {
                    context: "adjacent_small_curve separation tail",
                    requested: tol,
                    achieved: tail,
                });
            }
            Ok(SmallCurveEval {
                value: eval(d)?,
                dmax: d,
                tail_bound: tail,
            })
        }
        None => {
            let mut d = default_dmax(t);
            let mut value = eval(d)?;
            loop {
                d *= 2;
                if d > DMAX_DOUBLING_CAP {
                    return Err(Error::ToleranceUnachievable {
                        context: "adjacent_small_curve dmax doubling",
                        requested: tol,
                        achieved: separation_tail_bound(d / 2, t),
                    });
                }
                let refined = eval(d)?;
                let stable = (refined - value).abs() < tol;
                value = refined;
                let tail = separation_tail_bound(d, t);
                if stable && tail < tol {
                    return Ok(SmallCurveEval {
                        value,
                        dmax: d,
                        tail_bound: tail,
                    });
                }
            }
        }
    }
}

pub fn adjacent_small_curve(t: f64, dmax: Option<usize>, tol: f64) -> Result<f64> {
    adjacent_small_curve_detailed(t, dmax, tol).map(|e| e.value)
}

/// `f(t) / sqrt(t)`, the quantity with the `sqrt(2/pi)` large-t limit.
pub fn adjacent_small_over_sqrt_t(t: f64, dmax: Option<usize>, tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("f(t)/sqrt(t) requires t > 0"));
    }
    Ok(adjacent_small_curve(t, dmax, tol)? / t.sqrt())
}
