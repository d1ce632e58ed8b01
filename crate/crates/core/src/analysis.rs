//! Structural statistics of regular graphs: second eigenvalue magnitude,
//! edge-distribution discrepancy, sphere growth and neighbour-count spread.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rng::hash_words;

pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SPHERE_C: f64 = 0.004;
pub const DEFAULT_SPHERE_D0: usize = 12;
const SPECTRAL_START_TAG: u64 = 0x5eed_0f1a_3bda;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// Estimate of `max(|λ_2|, |λ_n|)`.
    pub lambda_hat: f64,
    pub iterations: usize,
    /// `‖A²x − λ̂²x‖` for the final unit iterate `x`.
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("power iteration did not reach the tolerance (residual {})", .0.residual)]
    NoConvergence(SpectralEstimate),
    #[error("vertex set must be non-empty and proper")]
    EmptyOrFull,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("|U| = {size} exceeds cn/d = {limit}")]
    SetTooLarge { size: usize, limit: f64 },
}

fn require_regular(g: &Graph) -> Result<usize, AnalysisError> {
    g.regular_degree().ok_or(AnalysisError::NotRegular)
}

fn membership(g: &Graph, set: &[Vertex]) -> Result<Vec<bool>, AnalysisError> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        *inside.get_mut(v as usize).ok_or(AnalysisError::OutOfRange(v))? = true;
    }
    Ok(inside)
}

fn deflate(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn normalise(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn apply_adjacency(g: &Graph, x: &[f64], out: &mut [f64]) {
    for v in g.vertices() {
        out[v as usize] = g.neighbors(v).iter().map(|&w| x[w as usize]).sum();
    }
}

/// Block size of the power iteration. Extreme eigenvalues of random regular
/// graphs come in tight clusters; a block converges at the rate set by the gap
/// to the `(BLOCK + 1)`-th magnitude instead of the second.
const BLOCK: usize = 4;

fn jitter(tag: u64, a: u64, b: u64) -> f64 {
    (hash_words(&[SPECTRAL_START_TAG, tag, a, b]) >> 11) as f64 / (1u64 << 53) as f64
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Modified Gram-Schmidt, deflated against the all-ones vector. A column that
/// collapses is replaced by a fresh hashed vector, so the block keeps full
/// rank; `refresh` keeps replacements distinct between calls.
fn orthonormalise(cols: &mut [Vec<f64>], refresh: u64) {
    for k in 0..cols.len() {
        for attempt in 0.. {
            let (done, rest) = cols.split_at_mut(k);
            let col = &mut rest[0];
            deflate(col);
            for q in done.iter() {
                let c = dot(q, col);
                col.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
            if normalise(col) > 1e-10 || attempt == 8 {
                break;
            }
            for (i, x) in col.iter_mut().enumerate() {
                *x = jitter(refresh.wrapping_add(attempt + 1), k as u64, i as u64) - 0.5;
            }
        }
    }
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues with eigenvectors as columns of the second
/// matrix, sorted by decreasing eigenvalue.
fn small_symmetric_eigen(mut h: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let b = h.len();
    let mut v: Vec<Vec<f64>> = (0..b).map(|i| (0..b).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..b).flat_map(|i| (0..b).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| h[i][j] * h[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..b {
            for q in p + 1..b {
                if h[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (h[q][q] - h[p][p]) / (2.0 * h[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in h.iter_mut() {
                    let (hkp, hkq) = (row[p], row[q]);
                    row[p] = c * hkp - s * hkq;
                    row[q] = s * hkp + c * hkq;
                }
                let (hp, hq) = (h[p].clone(), h[q].clone());
                for (k, (a, b)) in hp.iter().zip(&hq).enumerate() {
                    h[p][k] = c * a - s * b;
                    h[q][k] = s * a + c * b;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&i, &j| h[j][j].total_cmp(&h[i][i]));
    let values = order.iter().map(|&i| h[i][i]).collect();
    let vectors = (0..b).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Block power iteration for `λ = max(|λ_2|, |λ_n|)`.
///
/// Iterates `A²` on the complement of the all-ones vector, so the sign of the
/// extreme eigenvalue does not matter, with a Rayleigh-Ritz step on a block of
/// up to four vectors. The first start vector alternates ±1 by index parity
/// plus a fixed hashed offset in `[0, 0.5)`, which breaks labelling symmetries
/// that could leave it orthogonal to the extreme eigenvector; the others are
/// hashed. `residual` is `‖A²x − λ̂²x‖` for the leading unit Ritz vector `x`.
pub fn lambda_estimate(g: &Graph, max_iters: usize, tol: f64) -> Result<SpectralEstimate, AnalysisError> {
    require_regular(g)?;
    if !g.is_connected() {
        return Err(AnalysisError::Disconnected);
    }
    let n = g.n();
    if n <= 1 {
        return Ok(SpectralEstimate { lambda_hat: 0.0, iterations: 0, residual: 0.0 });
    }
    let b = BLOCK.min(n - 1);
    let mut x: Vec<Vec<f64>> = (0..b)
        .map(|k| {
            (0..n)
                .map(|i| match k {
                    0 => (if i % 2 == 0 { 1.0 } else { -1.0 }) + 0.5 * jitter(0, 0, i as u64),
                    _ => jitter(0, k as u64, i as u64) - 0.5,
                })
                .collect()
        })
        .collect();
    orthonormalise(&mut x, 0);
    let mut tmp = vec![0.0; n];
    let mut z = vec![vec![0.0; n]; b];
    let mut best = SpectralEstimate { lambda_hat: 0.0, iterations: 0, residual: f64::INFINITY };
    for it in 1..=max_iters {
        for (xk, zk) in x.iter().zip(z.iter_mut()) {
            apply_adjacency(g, xk, &mut tmp);
            deflate(&mut tmp);
            apply_adjacency(g, &tmp, zk);
            deflate(zk);
        }
        let h: Vec<Vec<f64>> = (0..b).map(|i| (0..b).map(|j| 0.5 * (dot(&x[i], &z[j]) + dot(&x[j], &z[i]))).collect()).collect();
        let (theta, s) = small_symmetric_eigen(h);
        // Ritz vectors and their images: X S and Z S
        let combine = |m: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (k, mk) in m.iter().enumerate() {
                let w = s[k][col];
                out.iter_mut().zip(mk).for_each(|(o, v)| *o += w * v);
            }
            out
        };
        let lead = combine(&x, 0);
        let lead_image = combine(&z, 0);
        let residual = lead_image.iter().zip(&lead).map(|(zi, xi)| (zi - theta[0] * xi).powi(2)).sum::<f64>().sqrt();
        best = SpectralEstimate { lambda_hat: theta[0].max(0.0).sqrt(), iterations: it, residual };
        if residual <= tol {
            return Ok(best);
        }
        x = (0..b).map(|col| combine(&z, col)).collect();
        orthonormalise(&mut x, it as u64);
    }
    Err(AnalysisError::NoConvergence(best))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingReport {
    /// Edges from `A` to `B`, counting edges inside `A ∩ B` twice.
    pub e_ab: u64,
    pub expected: f64,
    pub deviation: f64,
    /// `λ √(|A||B|)`.
    pub bound: f64,
    pub ok: bool,
}

pub fn edges_between(g: &Graph, a: &[Vertex], b: &[Vertex]) -> Result<u64, AnalysisError> {
    let in_b = membership(g, b)?;
    let in_a = membership(g, a)?;
    Ok(g.vertices()
        .filter(|&v| in_a[v as usize])
        .map(|v| g.neighbors(v).iter().filter(|&&w| in_b[w as usize]).count() as u64)
        .sum())
}

pub fn mixing_discrepancy(g: &Graph, a: &[Vertex], b: &[Vertex], lambda: f64) -> Result<MixingReport, AnalysisError> {
    let d = require_regular(g)?;
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::EmptySet);
    }
    let (sa, sb) = (membership(g, a)?, membership(g, b)?);
    let (na, nb) = (sa.iter().filter(|&&x| x).count(), sb.iter().filter(|&&x| x).count());
    let e_ab = edges_between(g, a, b)?;
    let expected = d as f64 * na as f64 * nb as f64 / g.n() as f64;
    let deviation = (e_ab as f64 - expected).abs();
    let bound = lambda * ((na * nb) as f64).sqrt();
    // relative guard band for rounding in `expected`
    let ok = deviation <= bound + 1e-9 * expected.max(1.0);
    Ok(MixingReport { e_ab, expected, deviation, bound, ok })
}

/// Histogram `s ↦ #{v ∉ U : |N(v) ∩ U| = s}`.
pub fn degree_histogram_into_set(g: &Graph, u: &[Vertex]) -> Result<BTreeMap<usize, usize>, AnalysisError> {
    let inside = membership(g, u)?;
    let size = inside.iter().filter(|&&x| x).count();
    if size == 0 || size == g.n() {
        return Err(AnalysisError::EmptyOrFull);
    }
    let mut hist = BTreeMap::new();
    for v in g.vertices().filter(|&v| !inside[v as usize]) {
        let s = g.neighbors(v).iter().filter(|&&w| inside[w as usize]).count();
        *hist.entry(s).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub r: usize,
    pub observed: usize,
    /// `|U| d (d-1)^(r-1)`.
    pub tree_size: f64,
    /// `(1 - 100c - 4 ln d / d) · tree_size`.
    pub required: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereGrowthReport {
    pub factor: f64,
    /// True when the lower bound says nothing here: non-positive factor or
    /// `d < d0`.
    pub vacuous: bool,
    pub radii: Vec<RadiusCheck>,
}

impl SphereGrowthReport {
    pub fn all_pass(&self) -> bool {
        self.radii.iter().all(|r| r.pass)
    }
}

pub fn sphere_growth_check(g: &Graph, u: &[Vertex], c: f64) -> Result<SphereGrowthReport, AnalysisError> {
    sphere_growth_check_with(g, u, c, DEFAULT_SPHERE_D0)
}

/// Compares `|S_r(U)|` with `(1 − 100c − 4 ln d/d) |U| d (d−1)^(r−1)` for each
/// `r ≥ 1` with `|U| d (d−1)^(r−1) ≤ cn`.
pub fn sphere_growth_check_with(g: &Graph, u: &[Vertex], c: f64, d0: usize) -> Result<SphereGrowthReport, AnalysisError> {
    let d = require_regular(g)?;
    let size = membership(g, u)?.iter().filter(|&&x| x).count();
    if size == 0 {
        return Err(AnalysisError::EmptySet);
    }
    let n = g.n() as f64;
    let limit = c * n / d.max(1) as f64;
    if size as f64 > limit {
        return Err(AnalysisError::SetTooLarge { size, limit });
    }
    let factor = if d == 0 { f64::NEG_INFINITY } else { 1.0 - 100.0 * c - 4.0 * (d as f64).ln() / d as f64 };
    let vacuous = factor <= 0.0 || d < d0;
    let mut tree_sizes = Vec::new();
    let mut tree = (size * d) as f64;
    // radii beyond n cannot hold vertices; the cap also ends the d = 2 case
    while d > 0 && tree <= c * n && tree_sizes.len() < g.n() {
        tree_sizes.push(tree);
        if d <= 1 {
            break;
        }
        tree *= (d - 1) as f64;
    }
    let sizes = if tree_sizes.is_empty() {
        vec![]
    } else {
        g.sphere_sizes(u, tree_sizes.len()).map_err(|_| AnalysisError::EmptySet)?.sizes
    };
    let radii = tree_sizes
        .iter()
        .enumerate()
        .map(|(i, &tree_size)| {
            let r = i + 1;
            let required = factor * tree_size;
            let observed = sizes[r];
            let margin = observed as f64 - required;
            RadiusCheck { r, observed, tree_size, required, margin, pass: vacuous || margin >= 0.0 }
        })
        .collect();
    Ok(SphereGrowthReport { factor, vacuous, radii })
}
