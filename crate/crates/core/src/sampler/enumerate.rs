//! Exact counting, listing and unranking of labelled simple graphs with a
//! prescribed degree sequence, for tiny vertex counts.
//!
//! Vertices are processed in order. Vertex `i` picks its remaining neighbours
//! among the later vertices that still need edges; the number of completions
//! depends only on `(i, remaining degrees of i..n)`, which is memoised. The
//! same subset order drives listing and unranking, so the rank of a graph is
//! its position in [`list_graphs_with_degrees`].

use std::collections::HashMap;

use super::SamplerError;
use crate::graph::{Graph, Vertex};

/// Largest vertex count accepted by the exact enumeration routines.
pub const MAX_ENUMERATION_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        DegreeSequence { degrees }
    }

    pub fn regular(n: usize, d: usize) -> Self {
        DegreeSequence { degrees: vec![d; n] }
    }

    /// The sequence using only `⌊total/n⌋` and `⌈total/n⌉`, larger values first.
    pub fn balanced(n: usize, total: usize) -> Self {
        assert!(n > 0);
        let (q, r) = (total / n, total % n);
        DegreeSequence {
            degrees: (0..n).map(|i| if i < r { q + 1 } else { q }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn is_balanced(&self) -> bool {
        match (self.degrees.iter().min(), self.degrees.iter().max()) {
            (Some(lo), Some(hi)) => hi - lo <= 1,
            _ => true,
        }
    }

    fn check(&self) -> Result<(), SamplerError> {
        if self.n() > MAX_ENUMERATION_N {
            return Err(SamplerError::TooLarge { n: self.n(), max: MAX_ENUMERATION_N });
        }
        if self.total() % 2 == 1 {
            return Err(SamplerError::OddDegreeSum);
        }
        Ok(())
    }
}

struct Counter {
    n: usize,
    memo: HashMap<(usize, Vec<u8>), u64>,
}

/// All `k`-subsets of `pool`, in lexicographic order of positions.
fn for_each_subset<F: FnMut(&[usize]) -> bool>(pool: &[usize], k: usize, mut f: F) {
    if k > pool.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen = vec![0; k];
    loop {
        for (c, &i) in chosen.iter_mut().zip(&idx) {
            *c = pool[i];
        }
        if !f(&chosen) {
            return;
        }
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == pool.len() - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        idx[pos - 1] += 1;
        for q in pos..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

impl Counter {
    fn new(n: usize) -> Self {
        Counter { n, memo: HashMap::new() }
    }

    fn candidates(&self, i: usize, rem: &[usize]) -> Vec<usize> {
        (i + 1..self.n).filter(|&j| rem[j] > 0).collect()
    }

    /// Completions from vertex `i` onward.
    fn count(&mut self, i: usize, rem: &mut [usize]) -> u64 {
        if i == self.n {
            return 1;
        }
        let key = (i, rem[i..].iter().map(|&r| r as u8).collect::<Vec<_>>());
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let pool = self.candidates(i, rem);
        let need = rem[i];
        let remaining_need: usize = rem[i + 1..].iter().sum();
        let mut total = 0u64;
        if need <= pool.len() && (remaining_need + need).is_multiple_of(2) {
            let mut subsets = Vec::new();
            for_each_subset(&pool, need, |s| {
                subsets.push(s.to_vec());
                true
            });
            rem[i] = 0;
            for s in subsets {
                for &j in &s {
                    rem[j] -= 1;
                }
                total += self.count(i + 1, rem);
                for &j in &s {
                    rem[j] += 1;
                }
            }
            rem[i] = need;
        }
        self.memo.insert(key, total);
        total
    }

    fn list(&mut self, i: usize, rem: &mut [usize], edges: &mut Vec<(Vertex, Vertex)>, out: &mut Vec<Graph>) {
        if i == self.n {
            out.push(Graph::from_edge_list(self.n, edges.iter().copied()).unwrap());
            return;
        }
        let pool = self.candidates(i, rem);
        let need = rem[i];
        let mut subsets = Vec::new();
        for_each_subset(&pool, need, |s| {
            subsets.push(s.to_vec());
            true
        });
        rem[i] = 0;
        for s in subsets {
            for &j in &s {
                rem[j] -= 1;
                edges.push((i as Vertex, j as Vertex));
            }
            if self.count(i + 1, rem) > 0 {
                self.list(i + 1, rem, edges, out);
            }
            for &j in &s {
                rem[j] += 1;
                edges.pop();
            }
        }
        rem[i] = need;
    }

    fn unrank(&mut self, mut rank: u64, rem: &mut [usize]) -> Vec<(Vertex, Vertex)> {
        let mut edges = Vec::new();
        for i in 0..self.n {
            let pool = self.candidates(i, rem);
            let need = rem[i];
            let mut subsets = Vec::new();
            for_each_subset(&pool, need, |s| {
                subsets.push(s.to_vec());
                true
            });
            rem[i] = 0;
            let mut picked = None;
            for s in subsets {
                for &j in &s {
                    rem[j] -= 1;
                }
                let c = self.count(i + 1, rem);
                if rank < c {
                    picked = Some(s);
                    break;
                }
                rank -= c;
                for &j in &s {
                    rem[j] += 1;
                }
            }
            let s = picked.expect("rank below total count");
            edges.extend(s.iter().map(|&j| (i as Vertex, j as Vertex)));
        }
        edges
    }
}

fn prepare(dseq: &DegreeSequence) -> Result<Option<(Counter, Vec<usize>)>, SamplerError> {
    dseq.check()?;
    let n = dseq.n();
    if dseq.degrees.iter().any(|&d| d >= n) {
        return Ok(None);
    }
    Ok(Some((Counter::new(n), dseq.degrees.clone())))
}

/// Exact number `g(dseq)` of labelled simple graphs with this degree sequence.
pub fn enumerate_graphs_with_degrees(dseq: &DegreeSequence) -> Result<u64, SamplerError> {
    Ok(match prepare(dseq)? {
        Some((mut c, mut rem)) => c.count(0, &mut rem),
        None => 0,
    })
}

/// Every labelled graph with this degree sequence, in rank order.
pub fn list_graphs_with_degrees(dseq: &DegreeSequence) -> Result<Vec<Graph>, SamplerError> {
    let mut out = Vec::new();
    if let Some((mut c, mut rem)) = prepare(dseq)? {
        if c.count(0, &mut rem) > 0 {
            c.list(0, &mut rem, &mut Vec::new(), &mut out);
        }
    }
    Ok(out)
}

/// The graph of the given rank in [`list_graphs_with_degrees`] order, without
/// materialising the list.
pub fn unrank_graph(dseq: &DegreeSequence, rank: u64) -> Result<Graph, SamplerError> {
    let Some((mut c, mut rem)) = prepare(dseq)? else {
        return Err(SamplerError::NoSuchGraph);
    };
    let total = c.count(0, &mut rem);
    if rank >= total {
        return Err(SamplerError::NoSuchGraph);
    }
    let edges = c.unrank(rank, &mut rem);
    Ok(Graph::from_edge_list(dseq.n(), edges).unwrap())
}

/// Sorted degree sequences (non-increasing) of length `n` with entries in
/// `0..n` and the given total.
pub fn degree_sequences_with_total(n: usize, total: usize) -> Vec<DegreeSequence> {
    fn rec(n: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<DegreeSequence>) {
        if cur.len() == n {
            if left == 0 {
                out.push(DegreeSequence::new(cur.clone()));
            }
            return;
        }
        let slots = n - cur.len();
        for d in (0..=cap.min(left)).rev() {
            if d * slots < left {
                break;
            }
            cur.push(d);
            rec(n, left - d, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, total, n - 1, &mut Vec::new(), &mut out);
    }
    out
}
