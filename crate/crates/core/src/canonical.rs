//! Triangle-seeded canonical labelling and isomorphism testing.
//!
//! The vertices through the largest number of triangles form an
//! isomorphism-invariant seed class. Colour refinement from that two-part
//! seed, when it ends discrete, numbers every vertex canonically, and the
//! relabelled edge list is a canonical form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::partition::VertexPartition;
use crate::refinement::refine_to_stable;

/// Dense adjacency is refused above this many vertices.
pub const MAX_MATRIX_N: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleProfile {
    pub counts: Vec<u64>,
    pub max: u64,
    pub total_triangles: u64,
}

impl TriangleProfile {
    fn from_counts(counts: Vec<u64>) -> Self {
        let max = counts.iter().copied().max().unwrap_or(0);
        let total_triangles = counts.iter().sum::<u64>() / 3;
        TriangleProfile { counts, max, total_triangles }
    }

    pub fn sorted_counts(&self) -> Vec<u64> {
        let mut c = self.counts.clone();
        c.sort_unstable();
        c
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("dense triangle counting limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("every vertex lies on the same number ({0}) of triangles")]
    AllEqual(u64),
}

/// Triangles through each vertex by intersecting sorted neighbour lists.
/// Each triangle `u < v < w` is found once, from the edge `uv`.
pub fn triangle_counts_listing(g: &Graph) -> TriangleProfile {
    let mut counts = vec![0u64; g.n()];
    for (u, v) in g.edges() {
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        // only common neighbours above v
        let mut i = a.partition_point(|&x| x <= v);
        let mut j = b.partition_point(|&x| x <= v);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    counts[u as usize] += 1;
                    counts[v as usize] += 1;
                    counts[a[i] as usize] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    TriangleProfile::from_counts(counts)
}

/// Reference path: `t_i = (A³)_ii / 2` with a naive dense product.
pub fn triangle_counts_matrix(g: &Graph) -> Result<TriangleProfile, CanonError> {
    let n = g.n();
    if n > MAX_MATRIX_N {
        return Err(CanonError::TooLarge { n, max: MAX_MATRIX_N });
    }
    let mut a = vec![0u64; n * n];
    for (u, v) in g.edges() {
        a[u as usize * n + v as usize] = 1;
        a[v as usize * n + u as usize] = 1;
    }
    let mut a2 = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                a2[i * n + j] += aik * a[k * n + j];
            }
        }
    }
    let counts = (0..n)
        .map(|i| (0..n).map(|j| a2[i * n + j] * a[j * n + i]).sum::<u64>() / 2)
        .collect();
    Ok(TriangleProfile::from_counts(counts))
}

/// `V_1 = {i : t_i = t}` then the rest.
pub fn seed_partition(g: &Graph) -> Result<VertexPartition, CanonError> {
    seed_from_profile(g.n(), &triangle_counts_listing(g))
}

fn seed_from_profile(n: usize, profile: &TriangleProfile) -> Result<VertexPartition, CanonError> {
    let (top, rest): (Vec<Vertex>, Vec<Vertex>) =
        (0..n as Vertex).partition(|&v| profile.counts[v as usize] == profile.max);
    if rest.is_empty() {
        return Err(CanonError::AllEqual(profile.max));
    }
    Ok(VertexPartition::new(n, vec![top, rest]).expect("two disjoint covering parts"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedStrategy {
    Triangles,
    /// Parts by increasing degree. Meant for non-regular inputs.
    Degree,
    Given(VertexPartition),
}

impl SeedStrategy {
    pub fn tag(&self) -> SeedTag {
        match self {
            SeedStrategy::Triangles => SeedTag::Triangles,
            SeedStrategy::Degree => SeedTag::Degree,
            SeedStrategy::Given(_) => SeedTag::Given,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedTag {
    Triangles,
    Degree,
    Given,
}

impl fmt::Display for SeedTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeedTag::Triangles => "triangles",
            SeedTag::Degree => "degree",
            SeedTag::Given => "given",
        })
    }
}

impl FromStr for SeedTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "triangles" => Ok(SeedTag::Triangles),
            "degree" => Ok(SeedTag::Degree),
            "given" => Ok(SeedTag::Given),
            _ => Err(format!("unknown seed strategy {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    /// The seed partition has a single part.
    SeedTrivial,
    /// Refinement stabilised before separating every vertex.
    NotDiscrete,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("canonical labelling failed: {reason:?} after {rounds} rounds")]
pub struct Failure {
    pub reason: FailureReason,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalLabelling {
    /// `perm[v]` is the canonical label of vertex `v`.
    pub perm: Vec<Vertex>,
    pub rounds_used: usize,
    pub seed_strategy: SeedTag,
}

impl CanonicalLabelling {
    pub fn canonical_form(&self, g: &Graph) -> CanonicalForm {
        let mut edges: Vec<(Vertex, Vertex)> = g
            .edges()
            .map(|(u, v)| {
                let (a, b) = (self.perm[u as usize], self.perm[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        CanonicalForm { n: g.n(), edges }
    }
}

/// Canonically relabelled, lexicographically sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl CanonicalForm {
    /// Same layout as the graph text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn seed_for(g: &Graph, strategy: &SeedStrategy) -> Result<VertexPartition, Failure> {
    let trivial = Failure { reason: FailureReason::SeedTrivial, rounds: 0 };
    match strategy {
        SeedStrategy::Triangles => seed_partition(g).map_err(|_| trivial),
        SeedStrategy::Degree => {
            let p = VertexPartition::from_labels(&g.degrees());
            if p.is_trivial() && g.n() > 1 {
                Err(trivial)
            } else {
                Ok(p)
            }
        }
        SeedStrategy::Given(p) => {
            assert_eq!(p.n(), g.n(), "seed partition size mismatch");
            Ok(p.clone())
        }
    }
}

pub fn canonical_labelling(g: &Graph, strategy: &SeedStrategy) -> Result<CanonicalLabelling, Failure> {
    let seed = seed_for(g, strategy)?;
    let trace = refine_to_stable(g, &seed).expect("seed covers the graph");
    if !trace.stable.is_discrete() {
        return Err(Failure { reason: FailureReason::NotDiscrete, rounds: trace.rounds });
    }
    Ok(CanonicalLabelling {
        perm: trace.stable.colours().to_vec(),
        rounds_used: trace.rounds,
        seed_strategy: strategy.tag(),
    })
}

pub fn canonical_form(g: &Graph, strategy: &SeedStrategy) -> Result<CanonicalForm, Failure> {
    canonical_labelling(g, strategy).map(|l| l.canonical_form(g))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// `mapping[v]` is the image in the second graph of vertex `v` of the first.
    Isomorphic(Vec<Vertex>),
    NonIsomorphic,
    Unknown,
}

/// True iff `mapping` is a bijection carrying the edges of `g1` onto those of `g2`.
pub fn verify_isomorphism(g1: &Graph, g2: &Graph, mapping: &[Vertex]) -> bool {
    if g1.n() != g2.n() || g1.m() != g2.m() || mapping.len() != g1.n() {
        return false;
    }
    let mut seen = vec![false; g1.n()];
    for &w in mapping {
        if w as usize >= g1.n() || std::mem::replace(&mut seen[w as usize], true) {
            return false;
        }
    }
    g1.edges().all(|(u, v)| g2.has_edge(mapping[u as usize], mapping[v as usize]))
}

/// Seed used by [`are_isomorphic`]: triangles for regular graphs, degrees
/// otherwise.
pub fn default_strategy(g: &Graph) -> SeedStrategy {
    if g.regular_degree().is_some() {
        SeedStrategy::Triangles
    } else {
        SeedStrategy::Degree
    }
}

pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> IsoOutcome {
    if g1.n() != g2.n() || g1.m() != g2.m() {
        return IsoOutcome::NonIsomorphic;
    }
    let (mut d1, mut d2) = (g1.degrees(), g2.degrees());
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return IsoOutcome::NonIsomorphic;
    }
    let (t1, t2) = (triangle_counts_listing(g1), triangle_counts_listing(g2));
    if t1.sorted_counts() != t2.sorted_counts() {
        return IsoOutcome::NonIsomorphic;
    }
    let strategy = default_strategy(g1);
    let (l1, l2) = match (canonical_labelling(g1, &strategy), canonical_labelling(g2, &strategy)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return IsoOutcome::Unknown,
    };
    if l1.canonical_form(g1) != l2.canonical_form(g2) {
        return IsoOutcome::NonIsomorphic;
    }
    let mut inverse2 = vec![0 as Vertex; g2.n()];
    for (v, &label) in l2.perm.iter().enumerate() {
        inverse2[label as usize] = v as Vertex;
    }
    let mapping: Vec<Vertex> = l1.perm.iter().map(|&label| inverse2[label as usize]).collect();
    if verify_isomorphism(g1, g2, &mapping) {
        IsoOutcome::Isomorphic(mapping)
    } else {
        // equal canonical forms always yield a valid mapping
        debug_assert!(false, "canonical forms agree but mapping fails");
        IsoOutcome::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prism() -> Graph {
        Graph::from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).unwrap()
    }

    fn c5_chord() -> Graph {
        Graph::from_edge_list(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap()
    }

    /// Brute force over all vertex triples.
    fn brute_triangles(g: &Graph) -> Vec<u64> {
        let n = g.n() as Vertex;
        let mut t = vec![0; g.n()];
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        for x in [a, b, c] {
                            t[x as usize] += 1;
                        }
                    }
                }
            }
        }
        t
    }

    #[test]
    fn triangle_examples() {
        let k4 = triangle_counts_listing(&Graph::complete(4));
        assert_eq!(k4.counts, vec![3; 4]);
        assert_eq!(k4.total_triangles, 4);
        assert_eq!(triangle_counts_listing(&Graph::cycle(6)).counts, vec![0; 6]);
        assert_eq!(brute_triangles(&prism()), vec![1; 6]);
        assert_eq!(triangle_counts_listing(&prism()).counts, vec![1; 6]);
        assert_eq!(triangle_counts_matrix(&Graph::complete(4)).unwrap().counts, vec![3; 4]);
        assert_eq!(triangle_counts_matrix(&Graph::cycle(6)).unwrap().counts, vec![0; 6]);
        assert_eq!(
            triangle_counts_matrix(&Graph::empty(MAX_MATRIX_N + 1)),
            Err(CanonError::TooLarge { n: MAX_MATRIX_N + 1, max: MAX_MATRIX_N })
        );
    }

    #[test]
    fn seed_examples() {
        let g = c5_chord();
        assert_eq!(brute_triangles(&g), vec![1, 1, 1, 0, 0]);
        let p = seed_partition(&g).unwrap();
        assert_eq!(p.parts(), &[vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(seed_partition(&Graph::complete(4)), Err(CanonError::AllEqual(3)));
        assert_eq!(seed_partition(&Graph::petersen()), Err(CanonError::AllEqual(0)));
    }

    #[test]
    fn path_with_given_seed() {
        // a=0, b=1, c=2 on the path a-b-c
        let path = Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap();
        let seed = VertexPartition::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let l = canonical_labelling(&path, &SeedStrategy::Given(seed.clone())).unwrap();
        assert_eq!(l.rounds_used, 1);
        assert_eq!(l.perm, vec![0, 1, 2]);
        let form = l.canonical_form(&path);
        assert_eq!(form.edges, vec![(0, 1), (1, 2)]);

        // the copy with a<->c swapped and the image seed gets the same form
        let perm = [2, 1, 0];
        let copy = path.relabel(&perm);
        let other = canonical_form(&copy, &SeedStrategy::Given(seed.relabel(&perm))).unwrap();
        assert_eq!(other, form);
    }

    #[test]
    fn failures() {
        let pet = Graph::petersen();
        assert_eq!(
            canonical_labelling(&pet, &SeedStrategy::Triangles).unwrap_err().reason,
            FailureReason::SeedTrivial
        );
        let g = c5_chord();
        // v0<->v2, v3<->v4 is an automorphism
        assert!(verify_isomorphism(&g, &g, &[2, 1, 0, 4, 3]));
        assert_eq!(
            canonical_labelling(&g, &SeedStrategy::Triangles).unwrap_err().reason,
            FailureReason::NotDiscrete
        );
        assert_eq!(
            canonical_labelling(&Graph::cycle(5), &SeedStrategy::Degree).unwrap_err().reason,
            FailureReason::SeedTrivial
        );
    }

    #[test]
    fn iso_examples() {
        let pet = Graph::petersen();
        assert_eq!(are_isomorphic(&pet, &pet), IsoOutcome::Unknown);
        assert_eq!(are_isomorphic(&Graph::complete(4), &Graph::cycle(4)), IsoOutcome::NonIsomorphic);
        // the path's end-swap survives refinement
        let path = Graph::from_edge_list(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(are_isomorphic(&path, &path), IsoOutcome::Unknown);
        // spider with legs of length 1, 2, 3 has no automorphisms
        let spider = Graph::from_edge_list(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)]).unwrap();
        let moved = spider.relabel(&[3, 6, 0, 2, 5, 1, 4]);
        match are_isomorphic(&spider, &moved) {
            IsoOutcome::Isomorphic(f) => assert!(verify_isomorphism(&spider, &moved, &f)),
            other => panic!("{other:?}"),
        }
        let star = Graph::from_edge_list(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(are_isomorphic(&path, &star), IsoOutcome::NonIsomorphic);
        let pan = Graph::from_edge_list(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let bull = Graph::from_edge_list(5, [(0, 1), (1, 2), (2, 0), (0, 3), (2, 4)]).unwrap();
        assert_eq!(are_isomorphic(&pan, &bull), IsoOutcome::NonIsomorphic);
    }

    #[test]
    fn verify_rejects_non_bijections() {
        let g = Graph::cycle(4);
        assert!(!verify_isomorphism(&g, &g, &[0, 0, 1, 2]));
        assert!(!verify_isomorphism(&g, &g, &[0, 2, 1, 3]));
        assert!(verify_isomorphism(&g, &g, &[1, 2, 3, 0]));
    }
}
