//! Random `d`-regular graphs and the exact small-case oracles that check them.

pub mod enumerate;

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use enumerate::{
    degree_sequences_with_total, enumerate_graphs_with_degrees, list_graphs_with_degrees,
    unrank_graph, DegreeSequence, MAX_ENUMERATION_N,
};

use crate::graph::{Graph, Vertex};
use crate::rng::{below, random_permutation, RngSeed};

pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// Double-edge switch attempts per edge used by [`SamplerMethod::Switching`]
/// when no explicit count is given.
pub const DEFAULT_SWITCH_SWEEPS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("n*d is odd: no d-regular graph exists")]
    OddDegreeSum,
    #[error("degree {d} must be below n = {n}")]
    DegreeTooLarge { n: usize, d: usize },
    #[error(
        "pairing rejection failed {attempts} times for d = {d}; the acceptance rate \
         decays like exp(-(d^2-1)/4), so exact rejection is only practical for small d \
         (about d <= 6 at this attempt budget, d <= 30 at any budget); use the switching method"
    )]
    AttemptsExhausted { d: usize, attempts: usize },
    #[error("enumeration limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("no graph has the requested degrees")]
    NoSuchGraph,
    #[error("pattern graph is invalid: {0}")]
    InvalidPattern(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerMethod {
    /// Exactly uniform: pairing model, restarting on any loop or double edge.
    Pairing { max_attempts: usize },
    /// Degree-preserving double-edge switch chain from a circulant start,
    /// `sweeps * m` proposals. Uniform stationary distribution; approximately
    /// uniform after finitely many steps.
    Switching { sweeps: usize },
    /// Pairing when its expected attempt count fits the budget, otherwise
    /// switching.
    #[default]
    Auto,
}

fn check_params(n: usize, d: usize) -> Result<(), SamplerError> {
    if d >= n.max(1) && !(n == 0 && d == 0) {
        return Err(SamplerError::DegreeTooLarge { n, d });
    }
    if (n * d) % 2 == 1 {
        return Err(SamplerError::OddDegreeSum);
    }
    Ok(())
}

/// Expected number of full pairings drawn per simple one, `exp((d²-1)/4)`.
pub fn expected_pairing_attempts(d: usize) -> f64 {
    (((d * d) as f64 - 1.0) / 4.0).exp()
}

/// A uniformly random simple `d`-regular graph on `n` vertices via the
/// pairing model with rejection. For `d > (n-1)/2` the complementary degree
/// is sampled and the complement returned.
pub fn sample_regular(n: usize, d: usize, seed: RngSeed, max_attempts: usize) -> Result<Graph, SamplerError> {
    sample_regular_with(n, d, seed, SamplerMethod::Pairing { max_attempts })
}

pub fn sample_regular_with(n: usize, d: usize, seed: RngSeed, method: SamplerMethod) -> Result<Graph, SamplerError> {
    check_params(n, d)?;
    let complement = 2 * d > n.saturating_sub(1);
    let d_eff = if complement { n - 1 - d } else { d };
    let mut rng = seed.rng();
    let method = match method {
        SamplerMethod::Auto => {
            if expected_pairing_attempts(d_eff) * 20.0 <= DEFAULT_MAX_ATTEMPTS as f64 {
                SamplerMethod::Pairing { max_attempts: DEFAULT_MAX_ATTEMPTS }
            } else {
                SamplerMethod::Switching { sweeps: DEFAULT_SWITCH_SWEEPS }
            }
        }
        m => m,
    };
    let g = match method {
        SamplerMethod::Pairing { max_attempts } => pairing(n, d_eff, &mut rng, max_attempts)?,
        SamplerMethod::Switching { sweeps } => switching(n, d_eff, &mut rng, sweeps),
        SamplerMethod::Auto => unreachable!(),
    };
    Ok(if complement { g.complement() } else { g })
}

fn pairing<R: Rng>(n: usize, d: usize, rng: &mut R, max_attempts: usize) -> Result<Graph, SamplerError> {
    let points = n * d;
    let mut cells: Vec<Vertex> = Vec::with_capacity(points);
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::with_capacity(d); n];
    let mut touched: Vec<Vertex> = Vec::new();
    'attempt: for _ in 0..max_attempts {
        for &v in &touched {
            adj[v as usize].clear();
        }
        touched.clear();
        cells.clear();
        cells.extend((0..n as Vertex).flat_map(|v| std::iter::repeat_n(v, d)));
        // Pair point i with a uniform unpaired partner; abort on the first loop
        // or repeated pair, which is equivalent to rejecting the whole pairing.
        let mut i = 0;
        while i < points {
            let j = i + 1 + below(rng, points - i - 1);
            cells.swap(i + 1, j);
            let (u, v) = (cells[i], cells[i + 1]);
            if u == v || adj[u as usize].contains(&v) {
                continue 'attempt;
            }
            if adj[u as usize].is_empty() {
                touched.push(u);
            }
            if adj[v as usize].is_empty() {
                touched.push(v);
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            i += 2;
        }
        let edges = cells.chunks_exact(2).map(|p| (p[0], p[1]));
        return Ok(Graph::from_edge_list(n, edges).unwrap());
    }
    if points == 0 {
        return Ok(Graph::empty(n));
    }
    Err(SamplerError::AttemptsExhausted { d, attempts: max_attempts })
}

/// Circulant `d`-regular graph: offsets `1..=d/2`, plus `n/2` when `d` is odd.
fn circulant(n: usize, d: usize) -> Vec<(Vertex, Vertex)> {
    let mut edges = Vec::with_capacity(n * d / 2);
    for v in 0..n {
        for k in 1..=d / 2 {
            edges.push((v as Vertex, ((v + k) % n) as Vertex));
        }
        if d % 2 == 1 && v < n / 2 {
            edges.push((v as Vertex, (v + n / 2) as Vertex));
        }
    }
    edges
}

#[inline]
fn edge_key(u: Vertex, v: Vertex) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (a as u64) << 32 | b as u64
}

fn switching<R: Rng>(n: usize, d: usize, rng: &mut R, sweeps: usize) -> Graph {
    let perm = random_permutation(rng, n);
    let mut edges: Vec<(Vertex, Vertex)> = circulant(n, d)
        .into_iter()
        .map(|(u, v)| (perm[u as usize], perm[v as usize]))
        .collect();
    let m = edges.len();
    if m >= 2 {
        let mut present: HashSet<u64> = edges.iter().map(|&(u, v)| edge_key(u, v)).collect();
        for _ in 0..sweeps * m {
            let i = below(rng, m);
            let j = below(rng, m);
            if i == j {
                continue;
            }
            let (a, b) = edges[i];
            let (mut c, mut e) = edges[j];
            if rng.random::<bool>() {
                std::mem::swap(&mut c, &mut e);
            }
            // ab, ce -> ac, be
            if a == c || b == e || present.contains(&edge_key(a, c)) || present.contains(&edge_key(b, e)) {
                continue;
            }
            present.remove(&edge_key(a, b));
            present.remove(&edge_key(c, e));
            present.insert(edge_key(a, c));
            present.insert(edge_key(b, e));
            edges[i] = (a, c);
            edges[j] = (b, e);
        }
    }
    Graph::from_edge_list(n, edges).unwrap()
}

/// Exactly uniform `d`-regular graph on `n <= 10` vertices, by unranking a
/// uniform index into the full enumeration.
pub fn sample_uniform_tiny(n: usize, d: usize, seed: RngSeed) -> Result<Graph, SamplerError> {
    let dseq = DegreeSequence::regular(n, d);
    let total = enumerate_graphs_with_degrees(&dseq)?;
    if total == 0 {
        return Err(SamplerError::NoSuchGraph);
    }
    let rank = seed.rng().random_range(0..total);
    unrank_graph(&dseq, rank)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgraphEstimate {
    pub hits: u64,
    pub samples: u64,
    pub frequency: f64,
    /// Binomial standard error `sqrt(p(1-p)/samples)`.
    pub std_error: f64,
}

/// Monte Carlo estimate of `P(H ⊆ G)` for `G` uniform `d`-regular on `n`
/// vertices, with sample `j` drawn from substream `seed.derive(&[j])`.
pub fn estimate_subgraph_probability(
    n: usize,
    d: usize,
    pattern: &[(Vertex, Vertex)],
    samples: u64,
    seed: RngSeed,
    method: SamplerMethod,
) -> Result<SubgraphEstimate, SamplerError> {
    check_params(n, d)?;
    let h = Graph::from_edge_list(n, pattern.iter().copied())
        .map_err(|e| SamplerError::InvalidPattern(e.to_string()))?;
    if h.m() != pattern.len() {
        return Err(SamplerError::InvalidPattern("repeated edge".into()));
    }
    if let Some(maxdeg) = h.degrees().into_iter().max() {
        if maxdeg > d {
            return Err(SamplerError::InvalidPattern(format!("pattern degree {maxdeg} exceeds {d}")));
        }
    }
    let hits = (0..samples)
        .into_par_iter()
        .map(|j| {
            let g = sample_regular_with(n, d, seed.derive(&[j]), method)?;
            Ok(h.edges().all(|(u, v)| g.has_edge(u, v)) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    Ok(SubgraphEstimate {
        hits,
        samples,
        frequency: p,
        std_error: if samples == 0 { 0.0 } else { (p * (1.0 - p) / samples as f64).sqrt() },
    })
}
