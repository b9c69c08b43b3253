//! Configuration-model random 3-regular graphs: half-edge matching
//! generation, BFS layers, bad-vertex diagnostics, the discrete random walk
//! on the graph, and the biased-walk comparator for the tree regime.

use crate::error::{Error, Result};
use crate::stats::RngStream;
use crate::walkers::{DistanceTrajectory, Model, SeedInfo};

const SIMPLE_RETRY_CAP: u32 = 10_000;

/// A 3-regular multigraph on `n` vertices stored as a perfect matching of
/// the `3n` mini-vertices `3v, 3v+1, 3v+2`; the neighbor reached through
/// half-edge `i` of vertex `v` is `matching[3v+i] / 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicGraph {
    matching: Vec<u32>,
}

impl CubicGraph {
    /// Draws a uniform perfect matching on the mini-vertices. With `simple`
    /// set, whole graphs are rejection-sampled until one has no self-loop or
    /// multi-edge, which preserves the uniform conditional law.
    pub fn generate(n: usize, simple: bool, rng: &mut RngStream) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::invalid("vertex count must be even and >= 2"));
        }
        if 3 * n > u32::MAX as usize {
            return Err(Error::invalid("vertex count too large"));
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            let graph = Self::random_matching(n, rng);
            if !simple || graph.is_simple() {
                return Ok(graph);
            }
            if attempts >= SIMPLE_RETRY_CAP {
                return Err(Error::RetryCapExceeded { attempts });
            }
        }
    }

    fn random_matching(n: usize, rng: &mut RngStream) -> Self {
        let m = 3 * n;
        let mut order: Vec<u32> = (0..m as u32).collect();
        for i in (1..m).rev() {
            let j = rng.uniform_below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        let mut matching = vec![0u32; m];
        for pair in order.chunks_exact(2) {
            matching[pair[0] as usize] = pair[1];
            matching[pair[1] as usize] = pair[0];
        }
        CubicGraph { matching }
    }

    /// Builds from an explicit matching, validating the involution property.
    pub fn from_matching(matching: Vec<u32>) -> Result<Self> {
        let m = matching.len();
        if m == 0 || m % 6 != 0 {
            return Err(Error::invalid("matching length must be a positive multiple of 6"));
        }
        for (j, &k) in matching.iter().enumerate() {
            if k as usize >= m {
                return Err(Error::invalid("matching entry out of range"));
            }
            if k as usize == j || matching[k as usize] as usize != j {
                return Err(Error::invalid("matching must be a fixed-point-free involution"));
            }
        }
        Ok(CubicGraph { matching })
    }

    pub fn vertex_count(&self) -> usize {
        self.matching.len() / 3
    }

    pub fn matching(&self) -> &[u32] {
        &self.matching
    }

    /// Neighbor through half-edge `i` of vertex `v` (may equal `v`).
    #[inline]
    pub fn neighbor(&self, v: usize, i: usize) -> usize {
        debug_assert!(i < 3);
        self.matching[3 * v + i] as usize / 3
    }

    /// Whether the collapsed graph has no self-loops and no multi-edges.
    pub fn is_simple(&self) -> bool {
        let n = self.vertex_count();
        let mut keys: Vec<u64> = Vec::with_capacity(3 * n / 2);
        for j in 0..self.matching.len() {
            let k = self.matching[j] as usize;
            if j < k {
                let (u, v) = ((j / 3) as u64, (k / 3) as u64);
                if u == v {
                    return false;
                }
                keys.push(u.min(v) * n as u64 + u.max(v));
            }
        }
        keys.sort_unstable();
        keys.windows(2).all(|w| w[0] != w[1])
    }

    /// Collapsed edges in deterministic order, self-loops once, multi-edges
    /// repeated, smaller endpoint first.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matching.iter().enumerate().filter_map(|(j, &k)| {
            let k = k as usize;
            (j < k).then(|| {
                let (u, v) = (j / 3, k / 3);
                (u.min(v), u.max(v))
            })
        })
    }
}

/// Single-source BFS result. `dist` uses `u32::MAX` for unreachable
/// vertices; `levels[l]` lists the vertices at distance `l` from the root.
#[derive(Debug, Clone)]
pub struct BfsLayers {
    pub root: usize,
    pub dist: Vec<u32>,
    pub levels: Vec<Vec<u32>>,
    pub eccentricity: u32,
}

pub const UNREACHABLE: u32 = u32::MAX;

/// Exact graph distances from `root` over the collapsed multigraph.
pub fn bfs(graph: &CubicGraph, root: usize) -> Result<BfsLayers> {
    let n = graph.vertex_count();
    if root >= n {
        return Err(Error::invalid(format!("root {root} out of range for n={n}")));
    }
    let mut dist = vec![UNREACHABLE; n];
    dist[root] = 0;
    let mut levels: Vec<Vec<u32>> = vec![vec![root as u32]];
    let mut frontier = vec![root as u32];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let d = levels.len() as u32;
        for &v in &frontier {
            for i in 0..3 {
                let u = graph.neighbor(v as usize, i);
                if dist[u] == UNREACHABLE {
                    dist[u] = d;
                    next.push(u as u32);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next.clone());
        frontier = next;
    }
    let eccentricity = levels.len() as u32 - 1;
    Ok(BfsLayers {
        root,
        dist,
        levels,
        eccentricity,
    })
}

/// Bad-vertex counts per BFS level. A non-root vertex at level `l` is good
/// when its three half-edges split one-back/two-forward; anything else
/// (sideways edges, self-loops, extra back-edges) is bad.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelBadCount {
    pub level: u32,
    pub bad: usize,
    pub total: usize,
}

pub fn classify_bad_vertices(graph: &CubicGraph, layers: &BfsLayers) -> Vec<LevelBadCount> {
    let mut out = Vec::new();
    for (l, level) in layers.levels.iter().enumerate().skip(1) {
        let mut bad = 0;
        for &v in level {
            let v = v as usize;
            let mut back = 0;
            let mut forward = 0;
            for i in 0..3 {
                let u = graph.neighbor(v, i);
                let du = layers.dist[u];
                if du + 1 == l as u32 {
                    back += 1;
                } else if du == l as u32 + 1 {
                    forward += 1;
                }
            }
            if back != 1 || forward != 2 {
                bad += 1;
            }
        }
        out.push(LevelBadCount {
            level: l as u32,
            bad,
            total: level.len(),
        });
    }
    out
}

/// Discrete-time walk from the BFS root choosing a uniform half-edge each
/// step (self-loops may hold it in place); distance read from the cached
/// layers. `query_steps` must be sorted.
pub fn simulate_walk(
    graph: &CubicGraph,
    layers: &BfsLayers,
    query_steps: &[u64],
    rng: &mut RngStream,
) -> Result<DistanceTrajectory> {
    let n = graph.vertex_count();
    if layers.dist.len() != n || layers.dist[layers.root] != 0 {
        return Err(Error::invalid("BFS layers do not match the graph"));
    }
    if query_steps.is_empty() {
        return Err(Error::invalid("query_steps must be nonempty"));
    }
    if query_steps.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("query_steps must be sorted ascending"));
    }
    let seed = SeedInfo {
        master_seed: rng.master_seed(),
        stream_id: rng.stream_id(),
    };
    let mut v = layers.root;
    let mut distances = Vec::with_capacity(query_steps.len());
    let mut qi = 0;
    let mut step = 0u64;
    while qi < query_steps.len() && query_steps[qi] == step {
        distances.push(u64::from(layers.dist[v]));
        qi += 1;
    }
    let last = *query_steps.last().unwrap();
    while step < last {
        v = graph.neighbor(v, rng.uniform_below(3) as usize);
        step += 1;
        while qi < query_steps.len() && query_steps[qi] == step {
            distances.push(u64::from(layers.dist[v]));
            qi += 1;
        }
    }
    Ok(DistanceTrajectory {
        model: Model::CubicGraph,
        n,
        query_times: query_steps.iter().map(|&s| s as f64).collect(),
        distances,
        seed,
    })
}

/// The tree-regime comparator: p(x, x+1) = 2/3, p(x, x-1) = 1/3 on the
/// nonnegative integers. At 0 every edge leads away from the root, so the
/// walk steps up with probability one. Returns positions at steps `0..=steps`.
pub fn biased_walk_reference(steps: usize, rng: &mut RngStream) -> Vec<u32> {
    let mut positions = Vec::with_capacity(steps + 1);
    let mut pos = 0u32;
    positions.push(pos);
    for _ in 0..steps {
        if pos == 0 {
            pos = 1;
        } else if rng.uniform_below(3) < 2 {
            pos += 1;
        } else {
            pos -= 1;
        }
        positions.push(pos);
    }
    positions
}
