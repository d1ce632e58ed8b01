//! Immutable simple undirected graphs in compressed adjacency form.
//!
//! Vertices are dense `u32` ids in `0..n`. Every neighbour list is stored once,
//! strictly increasing, in one contiguous `targets` buffer indexed by `offsets`.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::partition::VertexPartition;

pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint {endpoint} out of range for {n} vertices")]
    EndpointOutOfRange { endpoint: u64, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("source set is empty")]
    EmptySource,
    #[error("vertex count {0} exceeds the u32 id space")]
    TooManyVertices(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

/// Graph diameter; `Infinite` for disconnected graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Diameter {
    Finite(usize),
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<usize> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }

    /// The finite value, or `fallback` when infinite.
    pub fn or(self, fallback: usize) -> usize {
        self.finite().unwrap_or(fallback)
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("inf"),
        }
    }
}

/// Sizes of the spheres `S_r(U)` for `r = 0..=r_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereReport {
    pub sizes: Vec<usize>,
    /// First radius whose sphere is empty, if one was reached.
    pub exhausted_at: Option<usize>,
}

impl SphereReport {
    /// Ball sizes `|B_r(U)|`, the prefix sums of `sizes`.
    pub fn ball_sizes(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .scan(0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }
}

impl Graph {
    /// Builds a graph from unordered pairs. Duplicate pairs (in either
    /// orientation) are merged.
    pub fn from_edge_list<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n > u32::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::EndpointOutOfRange { endpoint: w as u64, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_arcs(n, &pairs))
    }

    /// `arcs` must be sorted, deduplicated and symmetric.
    fn from_sorted_arcs(n: usize, arcs: &[(Vertex, Vertex)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|&(_, v)| v).collect();
        Graph { offsets, targets }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as Vertex).flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)));
        Self::from_edge_list(n, edges).expect("complete graph edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n as Vertex).map(|u| (u, (u + 1) % n as Vertex));
        Self::from_edge_list(n, edges).expect("cycle needs n >= 3")
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
        Self::from_edge_list(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        0..self.n() as Vertex
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.vertices().map(|v| self.degree(v)).collect()
    }

    /// `Some(d)` when every vertex has degree `d`. The empty vertex set is
    /// 0-regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n() == 0 { 0 } else { self.degree(0) };
        self.vertices().all(|v| self.degree(v) == d).then_some(d)
    }

    /// Relabels vertex `v` as `perm[v]`.
    ///
    /// # Panics
    /// If `perm` is not a permutation of `0..n`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        assert_eq!(perm.len(), self.n(), "permutation length mismatch");
        let mut seen = vec![false; self.n()];
        for &p in perm {
            assert!(!std::mem::replace(&mut seen[p as usize], true), "not a permutation");
        }
        let mut arcs: Vec<_> = self
            .vertices()
            .flat_map(|u| {
                self.neighbors(u)
                    .iter()
                    .map(move |&v| (perm[u as usize], perm[v as usize]))
            })
            .collect();
        arcs.sort_unstable();
        Self::from_sorted_arcs(self.n(), &arcs)
    }

    /// The edge complement. A `d`-regular graph maps to an `(n-1-d)`-regular one.
    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(n * n.saturating_sub(1) - self.targets.len());
        offsets.push(0);
        for u in self.vertices() {
            let mut nbrs = self.neighbors(u).iter().peekable();
            for v in 0..n as Vertex {
                if nbrs.peek() == Some(&&v) {
                    nbrs.next();
                } else if v != u {
                    targets.push(v);
                }
            }
            offsets.push(targets.len());
        }
        Graph { offsets, targets }
    }

    /// Multi-source BFS distances; `None` for unreachable vertices.
    pub fn bfs_distances(&self, sources: &[Vertex]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize].is_none() {
                dist[s as usize] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &v in self.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn sphere_sizes(&self, sources: &[Vertex], r_max: usize) -> Result<SphereReport, GraphError> {
        if sources.is_empty() {
            return Err(GraphError::EmptySource);
        }
        if let Some(&bad) = sources.iter().find(|&&s| s as usize >= self.n()) {
            return Err(GraphError::EndpointOutOfRange { endpoint: bad as u64, n: self.n() });
        }
        let mut sizes = vec![0usize; r_max + 1];
        for d in self.bfs_distances(sources).into_iter().flatten() {
            if d <= r_max {
                sizes[d] += 1;
            }
        }
        let exhausted_at = sizes.iter().position(|&s| s == 0);
        Ok(SphereReport { sizes, exhausted_at })
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_distances(&[0]).iter().all(Option::is_some)
    }

    /// Exact diameter by BFS from every vertex.
    pub fn diameter(&self) -> Diameter {
        let mut best = 0;
        for v in self.vertices() {
            let dist = self.bfs_distances(&[v]);
            match dist.iter().try_fold(0usize, |acc, d| d.map(|d| acc.max(d))) {
                Some(ecc) => best = best.max(ecc),
                None => return Diameter::Infinite,
            }
        }
        Diameter::Finite(best)
    }

    /// Entry `i` is the number of neighbours of `v` in part `i`.
    pub fn degree_profile(&self, v: Vertex, partition: &VertexPartition) -> Vec<usize> {
        let mut profile = vec![0; partition.num_parts()];
        for &w in self.neighbors(v) {
            profile[partition.part_of(w)] += 1;
        }
        profile
    }

    /// Text format: a header line `n m`, then one `u v` line per edge with
    /// `u < v`, in lexicographic order.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::with_capacity(12 * (self.m() + 1));
        writeln!(out, "{} {}", self.n(), self.m()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the text format. Lines starting with `#` and blank lines are
    /// skipped; the edge count must match the header.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_pair = |line: usize, l: &str| -> Result<(u64, u64), GraphError> {
            let err = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
            let mut it = l.split_whitespace();
            let a = it.next().ok_or_else(|| err("expected two integers"))?;
            let b = it.next().ok_or_else(|| err("expected two integers"))?;
            if it.next().is_some() {
                return Err(err("trailing tokens"));
            }
            let a = a.parse().map_err(|_| err("invalid integer"))?;
            let b = b.parse().map_err(|_| err("invalid integer"))?;
            Ok((a, b))
        };
        let (line, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let (n, m) = parse_pair(line, header)?;
        let n = usize::try_from(n).map_err(|_| GraphError::TooManyVertices(usize::MAX))?;
        if n > u32::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut edges = Vec::with_capacity(m.min(1 << 24) as usize);
        let mut last_line = line;
        for (line, l) in lines {
            last_line = line;
            let (u, v) = parse_pair(line, l)?;
            for w in [u, v] {
                if w >= n as u64 {
                    return Err(GraphError::EndpointOutOfRange { endpoint: w, n });
                }
            }
            edges.push((u as Vertex, v as Vertex));
        }
        if edges.len() as u64 != m {
            return Err(GraphError::Parse {
                line: last_line,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edge_list(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn builds_k4() {
        let g = k4();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 6);
        assert_eq!(g.regular_degree(), Some(3));
        assert_eq!(g, Graph::complete(4));
    }

    #[test]
    fn partial_degrees_and_dedup() {
        let g = Graph::from_edge_list(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.degrees(), vec![1, 1, 0]);
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::from_edge_list(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::from_edge_list(2, [(0, 2)]),
            Err(GraphError::EndpointOutOfRange { endpoint: 2, n: 2 })
        );
    }

    #[test]
    fn complement_examples() {
        assert_eq!(k4().complement(), Graph::empty(4));
        assert_eq!(Graph::empty(5).complement(), Graph::complete(5));
        let c6 = Graph::cycle(6);
        assert_eq!(c6.complement().complement(), c6);
        assert_eq!(c6.complement().regular_degree(), Some(3));
    }

    #[test]
    fn spheres() {
        let c6 = Graph::cycle(6);
        assert_eq!(c6.sphere_sizes(&[0], 3).unwrap().sizes, vec![1, 2, 2, 1]);
        let r = k4().sphere_sizes(&[0], 2).unwrap();
        assert_eq!(r.sizes, vec![1, 3, 0]);
        assert_eq!(r.exhausted_at, Some(2));
        assert_eq!(r.ball_sizes(), vec![1, 4, 4]);
        assert_eq!(Graph::petersen().sphere_sizes(&[0], 2).unwrap().sizes, vec![1, 3, 6]);
        assert_eq!(k4().sphere_sizes(&[], 2), Err(GraphError::EmptySource));
    }

    #[test]
    fn diameters() {
        assert_eq!(k4().diameter(), Diameter::Finite(1));
        assert_eq!(Graph::cycle(6).diameter(), Diameter::Finite(3));
        assert_eq!(Graph::petersen().diameter(), Diameter::Finite(2));
        let two_triangles =
            Graph::from_edge_list(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(two_triangles.diameter(), Diameter::Infinite);
        assert!(!two_triangles.is_connected());
    }

    #[test]
    fn degree_profiles() {
        let p = VertexPartition::new(4, vec![vec![0], vec![1, 2, 3]]).unwrap();
        assert_eq!(k4().degree_profile(0, &p), vec![0, 3]);
        let p = VertexPartition::new(6, vec![vec![0, 3], vec![1, 2, 4, 5]]).unwrap();
        assert_eq!(Graph::cycle(6).degree_profile(0, &p), vec![0, 2]);
        let pet = Graph::petersen();
        let p = VertexPartition::trivial(10);
        for v in pet.vertices() {
            assert_eq!(pet.degree_profile(v, &p), vec![3]);
        }
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::petersen();
        let text = g.to_text();
        assert!(text.starts_with("10 15\n0 1\n0 4\n0 5\n"));
        let back = Graph::from_text(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_comments_and_errors() {
        let g = Graph::from_text("# a path\n3 2\n0 1\n# middle\n1 2\n").unwrap();
        assert_eq!(g.m(), 2);
        assert!(matches!(Graph::from_text("3 2\n0 1\n"), Err(GraphError::Parse { .. })));
        assert!(matches!(Graph::from_text("3 1\n0 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(
            Graph::from_text("3 1\n0 3\n"),
            Err(GraphError::EndpointOutOfRange { .. })
        ));
        assert!(matches!(Graph::from_text(""), Err(GraphError::Parse { .. })));
    }
}
