//! Continuous-time (Poissonized) and discrete-time simulators producing
//! distance trajectories for the hypercube walk, the two symmetric-group
//! walks, and the riffle shuffle.
//!
//! Continuous time is realized through exchangeability: draw the total
//! Poisson event count for the horizon, then split it across query
//! intervals with successive binomials (the order statistics of the event
//! times are uniform), so the clock costs one RNG call per query instead
//! of one exponential per event.

use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::perm::{ceil_log2, Permutation};
use crate::stats::RngStream;

/// Which walk produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Hypercube,
    RandomTransposition,
    AdjacentTransposition,
    CubicGraph,
    Riffle,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Hypercube => "hypercube",
            Model::RandomTransposition => "random-transposition",
            Model::AdjacentTransposition => "adjacent-transposition",
            Model::CubicGraph => "cubic-graph",
            Model::Riffle => "riffle",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypercube" => Ok(Model::Hypercube),
            "random-transposition" => Ok(Model::RandomTransposition),
            "adjacent-transposition" => Ok(Model::AdjacentTransposition),
            "cubic-graph" => Ok(Model::CubicGraph),
            "riffle" => Ok(Model::Riffle),
            other => Err(Error::invalid(format!("unknown model '{other}'"))),
        }
    }
}

/// Identifies the stream a replica was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub stream_id: u64,
}

/// Sampled (time, distance) pairs for one replica of one model.
/// `query_times` are absolute chain times for the Poissonized walks and
/// integer step counts for the discrete ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTrajectory {
    pub model: Model,
    pub n: usize,
    pub query_times: Vec<f64>,
    pub distances: Vec<u64>,
    pub seed: SeedInfo,
}

/// Full distance recount every this many events; converts silent drift in
/// the incremental +-1 tracking into a hard failure.
const RECOUNT_INTERVAL: u64 = 1 << 16;

/// Samples the number of rate-`rate` events in `[0, horizon]`.
pub fn poissonize(rate: f64, horizon: f64, rng: &mut RngStream) -> Result<u64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::invalid("poissonize requires rate > 0"));
    }
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::invalid("poissonize requires horizon >= 0"));
    }
    let lambda = rate * horizon;
    if lambda == 0.0 {
        return Ok(0);
    }
    let pois = rand_distr::Poisson::new(lambda)
        .map_err(|e| Error::invalid(format!("poisson({lambda}): {e}")))?;
    Ok(pois.sample(rng) as u64)
}

fn validate_query_times(query_times: &[f64]) -> Result<()> {
    if query_times.is_empty() {
        return Err(Error::invalid("query_times must be nonempty"));
    }
    for w in query_times.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::invalid("query_times must be sorted ascending"));
        }
    }
    if !query_times.iter().all(|t| t.is_finite() && *t >= 0.0) {
        return Err(Error::invalid("query_times must be finite and nonnegative"));
    }
    Ok(())
}

/// Splits a Poisson event total across the query intervals: conditionally on
/// the total, event counts per interval are successive binomials.
fn events_per_interval(total: u64, query_times: &[f64], rng: &mut RngStream) -> Vec<u64> {
    let horizon = *query_times.last().unwrap();
    let mut remaining = total;
    let mut prev = 0.0f64;
    let mut out = Vec::with_capacity(query_times.len());
    for &t in query_times {
        let span = horizon - prev;
        let k = if remaining == 0 {
            0
        } else if span <= 0.0 || t >= horizon {
            remaining
        } else {
            let p = ((t - prev) / span).clamp(0.0, 1.0);
            rand_distr::Binomial::new(remaining, p)
                .expect("binomial parameters were validated")
                .sample(rng)
        };
        out.push(k);
        remaining -= k;
        prev = t;
    }
    out
}

/// Rate-1 walk on the hypercube `{0,1}^n`: each event flips one uniform
/// coordinate; distance is the Hamming distance from the start.
pub fn simulate_hypercube(
    n: usize,
    query_times: &[f64],
    rng: &mut RngStream,
) -> Result<DistanceTrajectory> {
    if n < 1 {
        return Err(Error::invalid("hypercube walk requires n >= 1"));
    }
    validate_query_times(query_times)?;
    let seed = SeedInfo {
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
    };
    let total = poissonize(1.0, *query_times.last().unwrap(), rng)?;
    let counts = events_per_interval(total, query_times, rng);

    let mut flipped = vec![false; n];
    let mut distance = 0u64;
    let mut events_done = 0u64;
    let mut distances = Vec::with_capacity(query_times.len());
    for k in counts {
        for _ in 0..k {
            let i = rng.uniform_below(n as u64) as usize;
            if flipped[i] {
                distance -= 1;
            } else {
                distance += 1;
            }
            flipped[i] = !flipped[i];
            events_done += 1;
            if events_done % RECOUNT_INTERVAL == 0 {
                let full = flipped.iter().filter(|&&b| b).count() as u64;
                assert_eq!(full, distance, "hypercube distance drift");
            }
        }
        distances.push(distance);
    }
    Ok(DistanceTrajectory {
        model: Model::Hypercube,
        n,
        query_times: query_times.to_vec(),
        distances,
        seed,
    })
}

/// Rate-1 random transposition walk; distance is n minus the cycle count,
/// maintained incrementally through the one-endpoint cycle walk.
pub fn simulate_random_transpositions(
    n: usize,
    query_times: &[f64],
    rng: &mut RngStream,
) -> Result<DistanceTrajectory> {
    if n < 2 {
        return Err(Error::invalid("random transposition walk requires n >= 2"));
    }
    validate_query_times(query_times)?;
    let seed = SeedInfo {
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
    };
    let total = poissonize(1.0, *query_times.last().unwrap(), rng)?;
    let counts = events_per_interval(total, query_times, rng);

    let mut perm = Permutation::identity(n)?;
    let mut cycles = n;
    let mut events_done = 0u64;
    let mut distances = Vec::with_capacity(query_times.len());
    for k in counts {
        for _ in 0..k {
            let a = rng.uniform_below(n as u64) as usize;
            let mut b = rng.uniform_below(n as u64 - 1) as usize;
            if b >= a {
                b += 1;
            }
            // Merging distinct cycles loses one; splitting a cycle gains one.
            if perm.in_same_cycle(a, b) {
                cycles += 1;
            } else {
                cycles -= 1;
            }
            perm.apply_transposition(a, b)?;
            events_done += 1;
            if events_done % RECOUNT_INTERVAL == 0 {
                assert_eq!(perm.cycle_count(), cycles, "cycle count drift");
                assert!(perm.is_consistent(), "inverse drift");
            }
        }
        distances.push((n - cycles) as u64);
    }
    Ok(DistanceTrajectory {
        model: Model::RandomTransposition,
        n,
        query_times: query_times.to_vec(),
        distances,
        seed,
    })
}

/// Rate-1 adjacent transposition walk; distance is the inversion count,
/// maintained by +-1 increments.
pub fn simulate_adjacent_transpositions(
    n: usize,
    query_times: &[f64],
    rng: &mut RngStream,
) -> Result<DistanceTrajectory> {
    if n < 2 {
        return Err(Error::invalid(
            "adjacent transposition walk requires n >= 2",
        ));
    }
    validate_query_times(query_times)?;
    let seed = SeedInfo {
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
    };
    let total = poissonize(1.0, *query_times.last().unwrap(), rng)?;
    let counts = events_per_interval(total, query_times, rng);

    let mut perm = Permutation::identity(n)?;
    let mut inversions = 0u64;
    let mut events_done = 0u64;
    let mut distances = Vec::with_capacity(query_times.len());
    for k in counts {
        for _ in 0..k {
            let i = rng.uniform_below(n as u64 - 1) as usize;
            let f = perm.forward();
            if f[i] < f[i + 1] {
                inversions += 1;
            } else {
                inversions -= 1;
            }
            perm.apply_adjacent_swap(i)?;
            events_done += 1;
            if events_done % RECOUNT_INTERVAL == 0 {
                assert_eq!(perm.inversion_count(), inversions, "inversion drift");
            }
        }
        distances.push(inversions);
    }
    Ok(DistanceTrajectory {
        model: Model::AdjacentTransposition,
        n,
        query_times: query_times.to_vec(),
        distances,
        seed,
    })
}

/// Descents and shuffle distance after each riffle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiffleRecord {
    pub shuffle: u32,
    pub descents: u64,
    pub distance: u32,
}

/// Gilbert-Shannon-Reeds riffle shuffle walk: each shuffle cuts the deck at
/// Binomial(n, 1/2) and interleaves, dropping from each packet with
/// probability proportional to its remaining size.
///
/// Descents are recorded on the inverse arrangement (position of label i+1
/// before position of label i), i.e. rising sequences minus one of the deck;
/// this is the statistic the shuffle distance `ceil(log2(Des+1))` is defined
/// through. Returns one record per shuffle count `0..=shuffles`.
pub fn simulate_riffle(n: usize, shuffles: u32, rng: &mut RngStream) -> Result<Vec<RiffleRecord>> {
    if n < 1 {
        return Err(Error::invalid("riffle shuffle requires n >= 1"));
    }
    let mut deck: Vec<u32> = (0..n as u32).collect();
    let mut scratch: Vec<u32> = vec![0; n];
    let mut position = vec![0u32; n];
    let mut records = Vec::with_capacity(shuffles as usize + 1);
    records.push(RiffleRecord {
        shuffle: 0,
        descents: 0,
        distance: 0,
    });
    for r in 1..=shuffles {
        riffle_once(&mut deck, &mut scratch, rng);
        for (pos, &label) in deck.iter().enumerate() {
            position[label as usize] = pos as u32;
        }
        let descents = position.windows(2).filter(|w| w[0] > w[1]).count() as u64;
        records.push(RiffleRecord {
            shuffle: r,
            descents,
            distance: ceil_log2(descents + 1),
        });
    }
    Ok(records)
}

fn riffle_once(deck: &mut [u32], scratch: &mut [u32], rng: &mut RngStream) {
    let n = deck.len();
    let cut = rand_distr::Binomial::new(n as u64, 0.5)
        .expect("valid binomial")
        .sample(rng) as usize;
    scratch.copy_from_slice(deck);
    let (left, right) = scratch.split_at(cut);
    let (mut i, mut j) = (0usize, 0usize);
    for slot in deck.iter_mut() {
        let a = (left.len() - i) as u64;
        let b = (right.len() - j) as u64;
        let take_left = if a == 0 {
            false
        } else if b == 0 {
            true
        } else {
            rng.uniform_below(a + b) < a
        };
        if take_left {
            *slot = left[i];
            i += 1;
        } else {
            *slot = right[j];
            j += 1;
        }
    }
}
