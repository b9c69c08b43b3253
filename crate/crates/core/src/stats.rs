//! Reproducible RNG streams, replica aggregation, and the paper-derived
//! inequality oracles used by the diagnostic suites.

use rand::RngCore;

use crate::error::{Error, Result};

/// Independent, individually reproducible random stream.
///
/// Streams are counter-based: one 256-bit ChaCha8 key is derived from the
/// master seed by SplitMix64 expansion, and the 64-bit stream id selects a
/// disjoint keystream. Distinct ids under one master seed never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: rand_chacha::ChaCha8Rng,
    master_seed: u64,
    stream_id: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the stream addressed by `(master_seed, stream_id)`.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    use rand::SeedableRng;
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = rand_chacha::ChaCha8Rng::from_seed(key);
    rng.set_stream(stream_id);
    RngStream {
        rng,
        master_seed,
        stream_id,
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw from `[0, 1)` with 53-bit resolution.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `{0, 1, .., bound-1}` (Lemire rejection).
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        loop {
            let x = self.next_u64();
            let m = (x as u128).wrapping_mul(bound as u128);
            let lo = m as u64;
            if lo >= bound || lo >= lo.wrapping_neg() % bound {
                return (m >> 64) as u64;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Replica-level summary of a batch of scalar estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSummary {
    pub replicas: usize,
    pub mean: f64,
    /// Unbiased sample variance; absent for a single replica.
    pub variance: Option<f64>,
    pub stderr: Option<f64>,
    pub target: Option<f64>,
    pub z_score: Option<f64>,
}

/// Mean/variance/stderr of `samples`, plus a z-score against `target` when given.
pub fn summarize(samples: &[f64], target: Option<f64>) -> Result<EstimateSummary> {
    if samples.is_empty() {
        return Err(Error::invalid("summarize requires at least one sample"));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let (variance, stderr) = if n >= 2 {
        let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
        let var = ss / (n - 1) as f64;
        (Some(var), Some((var / n as f64).sqrt()))
    } else {
        (None, None)
    };
    let z_score = target.map(|tg| {
        let diff = mean - tg;
        if diff == 0.0 {
            0.0
        } else {
            diff / stderr.unwrap_or(0.0)
        }
    });
    Ok(EstimateSummary {
        replicas: n,
        mean,
        variance,
        stderr,
        target,
        z_score,
    })
}

/// Empirical `P(|sample - target| > eps)`, the operational form of
/// convergence in probability: this fraction must fall as n grows.
pub fn concentration_check(samples: &[f64], target: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::invalid("concentration_check requires eps > 0"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("concentration_check requires samples"));
    }
    let outside = samples.iter().filter(|&&x| (x - target).abs() > eps).count();
    Ok(outside as f64 / samples.len() as f64)
}

/// The four proven inequalities exercised as empirical oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    /// Reflection-coupling comparison: the probability that a pair at gap
    /// `gap` is inverted by time `t` is at most `8 P(X_t > gap/2)` for the
    /// rate-2 free walk.
    RefComp { gap: u32, t: f64 },
    /// Chernoff bound on the rate-2 walk: `P(X_t > x) <= exp(-theta x + t(e^th + e^-th - 2))`.
    Ldbd { theta: f64, x: f64, t: f64 },
    /// Two-branch tail bound `exp(-x^2/8et) + exp(-x ln2 - 2t)`.
    Ld2 { x: f64, t: f64 },
    /// Bad-vertex probability at BFS level `l` is at most `2 * 2^l / n`.
    Badv { level: u32, n: usize },
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::RefComp { .. } => "refcomp",
            BoundKind::Ldbd { .. } => "ldbd",
            BoundKind::Ld2 { .. } => "ld2",
            BoundKind::Badv { .. } => "badv",
        }
    }

    /// The analytic right-hand side of the inequality.
    pub fn bound(&self) -> f64 {
        match *self {
            BoundKind::RefComp { gap, t } => 8.0 * rate2_walk_upper_tail(t, f64::from(gap) / 2.0),
            BoundKind::Ldbd { theta, x, t } => {
                (-theta * x + t * (theta.exp() + (-theta).exp() - 2.0)).exp()
            }
            BoundKind::Ld2 { x, t } => {
                let gauss = (-x * x / (8.0 * std::f64::consts::E * t)).exp();
                let poisson = (-x * std::f64::consts::LN_2 - 2.0 * t).exp();
                gauss + poisson
            }
            BoundKind::Badv { level, n } => 2.0 * (1u64 << level) as f64 / n as f64,
        }
    }
}

/// Outcome of one inequality oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub bound: f64,
    pub empirical: f64,
    pub stderr: f64,
    /// `bound + 4 stderr - empirical`; nonnegative means the bound holds.
    pub margin: f64,
    pub passed: bool,
}

/// Checks `mean(samples) <= bound + 4 stderr` for the given inequality.
/// Samples are indicator (or probability) estimates of the left-hand event.
pub fn bound_check(kind: BoundKind, samples: &[f64]) -> Result<BoundReport> {
    let summary = summarize(samples, None)?;
    let stderr = summary.stderr.unwrap_or(0.0);
    let bound = kind.bound();
    let margin = bound + 4.0 * stderr - summary.mean;
    Ok(BoundReport {
        name: kind.name(),
        bound,
        empirical: summary.mean,
        stderr,
        margin,
        passed: margin >= 0.0,
    })
}

/// Exact `P(X_t > y)` for the continuous-time walk jumping +-1 at total rate 2,
/// evaluated by conditioning on the Poisson(2t) jump count.
pub fn rate2_walk_upper_tail(t: f64, y: f64) -> f64 {
    assert!(t >= 0.0);
    let lambda = 2.0 * t;
    let kmax = (lambda + 12.0 * lambda.sqrt() + 40.0).ceil() as i64;
    let mut total = 0.0;
    for k in 0..=kmax {
        let ln_pois = -lambda
            + if k == 0 {
                0.0
            } else {
                k as f64 * lambda.ln()
            }
            - libm::lgamma(k as f64 + 1.0);
        let pois = ln_pois.exp();
        if pois == 0.0 && k as f64 > lambda {
            break;
        }
        // P(S_k > y) for S_k a sum of k independent signs.
        let j_min = ((k as f64 + y) / 2.0).floor() as i64 + 1;
        if j_min > k {
            continue;
        }
        let mut bin_tail = 0.0;
        for j in j_min.max(0)..=k {
            let ln_c = libm::lgamma(k as f64 + 1.0)
                - libm::lgamma(j as f64 + 1.0)
                - libm::lgamma((k - j) as f64 + 1.0);
            bin_tail += (ln_c - k as f64 * std::f64::consts::LN_2).exp();
        }
        total += pois * bin_tail.min(1.0);
    }
    total.min(1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let d = (i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs();
        sup = sup.max(d);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_stream_is_deterministic() {
        let mut a = derive_stream(42, 7);
        let mut b = derive_stream(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 1);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn stream_golden_vector() {
        // Frozen output; a change here means reproducibility across versions broke.
        let mut s = derive_stream(42, 0);
        let got: Vec<u64> = (0..4).map(|_| s.next_u64()).collect();
        assert_eq!(got, GOLDEN_SEED42_STREAM0);
        let mut s = derive_stream(42, 1);
        let got: Vec<u64> = (0..4).map(|_| s.next_u64()).collect();
        assert_eq!(got, GOLDEN_SEED42_STREAM1);
    }

    const GOLDEN_SEED42_STREAM0: [u64; 4] = [
        3536907876931541756,
        1681417456739323905,
        17856965759995586207,
        13339797155766290778,
    ];
    const GOLDEN_SEED42_STREAM1: [u64; 4] = [
        14589515635352196654,
        2877973030336034368,
        15230479811515263985,
        17024681532047585710,
    ];

    #[test]
    fn streams_pass_two_sample_ks() {
        let mut a = derive_stream(3, 0);
        let mut b = derive_stream(3, 1);
        let xs: Vec<f64> = (0..10_000).map(|_| a.uniform_f64()).collect();
        let ys: Vec<f64> = (0..10_000).map(|_| b.uniform_f64()).collect();
        let d = ks_two_sample(&xs, &ys);
        // 4-sigma critical value for the two-sample statistic.
        let crit = 2.2766 * ((xs.len() + ys.len()) as f64 / (xs.len() * ys.len()) as f64).sqrt();
        assert!(d < crit, "KS {d} >= {crit}");
    }

    #[test]
    fn summarize_constant_samples() {
        let s = summarize(&[3.0, 3.0, 3.0], Some(3.0)).unwrap();
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.variance, Some(0.0));
        assert_eq!(s.z_score, Some(0.0));
    }

    #[test]
    fn summarize_rejects_empty() {
        assert!(summarize(&[], None).is_err());
    }

    #[test]
    fn summarize_normal_samples_near_zero() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = derive_stream(9, 0);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let s = summarize(&xs, Some(0.0)).unwrap();
        assert!(s.mean.abs() < 4.0 / (xs.len() as f64).sqrt());
    }

    #[test]
    fn concentration_trivial_cases() {
        let xs = [1.0, 1.0, 1.0];
        assert_eq!(concentration_check(&xs, 1.0, 0.01).unwrap(), 0.0);
        assert_eq!(concentration_check(&xs, 0.0, 1e12).unwrap(), 0.0);
        assert!(concentration_check(&xs, 1.0, 0.0).is_err());
    }

    #[test]
    fn bound_check_margins() {
        // Empirical mean far under the bound passes.
        let kind = BoundKind::Ldbd {
            theta: 1.0,
            x: 10.0,
            t: 1.0,
        };
        let report = bound_check(kind, &[0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(report.passed);
        // Mean far above an almost-zero bound fails.
        let report = bound_check(kind, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn rate2_tail_matches_direct_enumeration() {
        // t small enough that two jumps dominate: P(X_t > 1) = P(first two jumps up) + ...
        let t = 0.3;
        let tail = rate2_walk_upper_tail(t, 1.0);
        // Direct: sum over jump counts k, binomial up-count must exceed (k+1)/2... cross-check by MC.
        let mut rng = derive_stream(4, 0);
        let reps = 200_000;
        let lambda = rand_distr::Poisson::new(2.0 * t).unwrap();
        let mut hits = 0u32;
        for _ in 0..reps {
            let k = rand_distr::Distribution::sample(&lambda, &mut rng) as u64;
            let mut pos = 0i64;
            for _ in 0..k {
                pos += if rng.next_u64() & 1 == 1 { 1 } else { -1 };
            }
            if pos > 1 {
                hits += 1;
            }
        }
        let emp = f64::from(hits) / reps as f64;
        let se = (emp * (1.0 - emp) / reps as f64).sqrt();
        assert!(
            (emp - tail).abs() < 4.0 * se + 1e-9,
            "emp {emp} vs exact {tail}"
        );
    }
}
