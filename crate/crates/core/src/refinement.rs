//! Colour refinement (1-WL).
//!
//! One step replaces each vertex colour by the pair (old colour, multiset of
//! neighbour colours). New ids are the ranks of these keys in lexicographic
//! order, with the multiset written as a sorted list, so ids are determined by
//! the isomorphism type of the coloured graph and never by vertex numbering.

use thiserror::Error;

use crate::graph::{Graph, Vertex};
pub use crate::partition::VertexPartition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("colouring covers {colouring} vertices, graph has {graph}")]
    SizeMismatch { graph: usize, colouring: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colouring {
    colour_of: Vec<u32>,
    class_sizes: Vec<usize>,
}

impl Colouring {
    /// Builds a colouring from raw ids, which must already be dense.
    pub fn from_dense(colour_of: Vec<u32>) -> Option<Self> {
        let k = colour_of.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut class_sizes = vec![0; k];
        for &c in &colour_of {
            class_sizes[c as usize] += 1;
        }
        class_sizes.iter().all(|&s| s > 0).then_some(Colouring { colour_of, class_sizes })
    }

    pub fn uniform(n: usize) -> Self {
        Colouring {
            colour_of: vec![0; n],
            class_sizes: if n == 0 { vec![] } else { vec![n] },
        }
    }

    pub fn n(&self) -> usize {
        self.colour_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn colours(&self) -> &[u32] {
        &self.colour_of
    }

    #[inline]
    pub fn colour(&self, v: Vertex) -> u32 {
        self.colour_of[v as usize]
    }

    pub fn is_discrete(&self) -> bool {
        self.num_classes() == self.n()
    }

    /// Classes ordered by colour id.
    pub fn to_partition(&self) -> VertexPartition {
        VertexPartition::from_labels(&self.colour_of)
    }
}

impl From<&VertexPartition> for Colouring {
    fn from(p: &VertexPartition) -> Self {
        Colouring {
            colour_of: p.labels().to_vec(),
            class_sizes: p.parts().iter().map(Vec::len).collect(),
        }
    }
}

pub fn is_discrete(c: &Colouring) -> bool {
    c.is_discrete()
}

/// One refinement step.
pub fn refine_step(g: &Graph, c: &Colouring) -> Result<Colouring, RefineError> {
    if g.n() != c.n() {
        return Err(RefineError::SizeMismatch { graph: g.n(), colouring: c.n() });
    }
    let n = g.n();
    // keys[offsets[v]..offsets[v+1]] = old colour of v, then sorted
    // neighbour colours
    let mut offsets = Vec::with_capacity(n + 1);
    let mut keys: Vec<u32> = Vec::with_capacity(n + 2 * g.m());
    offsets.push(0);
    for v in g.vertices() {
        keys.push(c.colour(v));
        let start = keys.len();
        keys.extend(g.neighbors(v).iter().map(|&w| c.colour(w)));
        keys[start..].sort_unstable();
        offsets.push(keys.len());
    }
    let key = |v: u32| &keys[offsets[v as usize]..offsets[v as usize + 1]];

    // Bucket by old colour first (counting sort), then sort within a class.
    let k = c.num_classes();
    let mut start = vec![0usize; k + 1];
    for &col in c.colours() {
        start[col as usize + 1] += 1;
    }
    for i in 0..k {
        start[i + 1] += start[i];
    }
    let mut order = vec![0 as Vertex; n];
    let mut fill = start.clone();
    for v in g.vertices() {
        let col = c.colour(v) as usize;
        order[fill[col]] = v;
        fill[col] += 1;
    }

    let mut colour_of = vec![0u32; n];
    let mut class_sizes = Vec::with_capacity(k);
    for class in 0..k {
        let members = &mut order[start[class]..start[class + 1]];
        members.sort_unstable_by(|&a, &b| key(a)[1..].cmp(&key(b)[1..]));
        let mut prev: Option<&[u32]> = None;
        for &v in members.iter() {
            let kv = &key(v)[1..];
            if prev != Some(kv) {
                class_sizes.push(0);
                prev = Some(kv);
            }
            colour_of[v as usize] = (class_sizes.len() - 1) as u32;
            *class_sizes.last_mut().unwrap() += 1;
        }
    }
    Ok(Colouring { colour_of, class_sizes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTrace {
    /// Strictly refining steps performed.
    pub rounds: usize,
    /// Class count of `C_0, C_1, …, C_t`; the last entry repeats the previous.
    pub class_counts_per_round: Vec<usize>,
    pub stable: Colouring,
}

impl RefinementTrace {
    /// Step count that also includes the final, non-refining comparison step.
    pub fn steps_including_check(&self) -> usize {
        self.rounds + 1
    }
}

/// Iterates [`refine_step`] from `init` until the partition stops changing.
pub fn refine_to_stable(g: &Graph, init: &VertexPartition) -> Result<RefinementTrace, RefineError> {
    refine_colouring_to_stable(g, Colouring::from(init))
}

pub fn refine_colouring_to_stable(g: &Graph, init: Colouring) -> Result<RefinementTrace, RefineError> {
    if g.n() != init.n() {
        return Err(RefineError::SizeMismatch { graph: g.n(), colouring: init.n() });
    }
    let mut current = init;
    let mut counts = vec![current.num_classes()];
    let mut rounds = 0;
    loop {
        // a discrete colouring cannot split further
        let next_count = if current.is_discrete() {
            current.num_classes()
        } else {
            let next = refine_step(g, &current)?;
            let k = next.num_classes();
            if k != current.num_classes() {
                current = next;
                counts.push(k);
                rounds += 1;
                continue;
            }
            k
        };
        counts.push(next_count);
        break;
    }
    Ok(RefinementTrace { rounds, class_counts_per_round: counts, stable: current })
}

/// True iff every vertex of a part has the same number of neighbours in each
/// part.
pub fn is_equitable(g: &Graph, p: &VertexPartition) -> bool {
    let k = p.num_parts();
    let mut reference = vec![0usize; k];
    let mut profile = vec![0usize; k];
    for part in p.parts() {
        let (first, rest) = part.split_first().expect("parts are non-empty");
        reference.iter_mut().for_each(|x| *x = 0);
        for &w in g.neighbors(*first) {
            reference[p.part_of(w)] += 1;
        }
        for &v in rest {
            profile.iter_mut().for_each(|x| *x = 0);
            for &w in g.neighbors(v) {
                profile[p.part_of(w)] += 1;
            }
            if profile != reference {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(c: &Colouring) -> Vec<Vec<Vertex>> {
        c.to_partition().parts().to_vec()
    }

    #[test]
    fn regular_uniform_stays_uniform() {
        let g = Graph::petersen();
        let c = refine_step(&g, &Colouring::uniform(10)).unwrap();
        assert_eq!(c, Colouring::uniform(10));
    }

    #[test]
    fn c6_singleton_step() {
        let g = Graph::cycle(6);
        let init = Colouring::from(&VertexPartition::singleton(6, 0).unwrap());
        let c = refine_step(&g, &init).unwrap();
        assert_eq!(classes(&c), vec![vec![0], vec![1, 5], vec![2, 3, 4]]);
    }

    #[test]
    fn k4_singleton_is_stable() {
        let g = Graph::complete(4);
        let init = Colouring::from(&VertexPartition::singleton(4, 0).unwrap());
        assert_eq!(refine_step(&g, &init).unwrap(), init);
    }

    #[test]
    fn size_mismatch() {
        let err = refine_step(&Graph::cycle(5), &Colouring::uniform(4)).unwrap_err();
        assert_eq!(err, RefineError::SizeMismatch { graph: 5, colouring: 4 });
    }

    #[test]
    fn c6_to_stable() {
        let g = Graph::cycle(6);
        let t = refine_to_stable(&g, &VertexPartition::singleton(6, 0).unwrap()).unwrap();
        assert_eq!(t.rounds, 2);
        assert_eq!(t.class_counts_per_round, vec![2, 3, 4, 4]);
        assert_eq!(classes(&t.stable), vec![vec![0], vec![1, 5], vec![2, 4], vec![3]]);
        assert_eq!(t.stable.class_sizes(), &[1, 2, 2, 1]);
        assert_eq!(t.steps_including_check(), 3);
    }

    #[test]
    fn discrete_init_takes_no_rounds() {
        let g = Graph::cycle(5);
        let init = VertexPartition::discrete(5);
        let t = refine_to_stable(&g, &init).unwrap();
        assert_eq!(t.rounds, 0);
        assert_eq!(t.stable, Colouring::from(&init));
    }

    #[test]
    fn petersen_singleton() {
        let g = Graph::petersen();
        let t = refine_to_stable(&g, &VertexPartition::singleton(10, 0).unwrap()).unwrap();
        let mut sizes = t.stable.class_sizes().to_vec();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 6]);
        assert!(!is_discrete(&t.stable));
        assert!(is_equitable(&g, &t.stable.to_partition()));
    }

    #[test]
    fn discreteness() {
        assert!(Colouring::from_dense(vec![0, 1, 2]).unwrap().is_discrete());
        assert!(!Colouring::from_dense(vec![0, 1, 1]).unwrap().is_discrete());
        assert!(Colouring::from_dense(vec![0, 2]).is_none());
    }

    #[test]
    fn equitability() {
        let c6 = Graph::cycle(6);
        assert!(is_equitable(&Graph::petersen(), &VertexPartition::trivial(10)));
        assert!(is_equitable(&c6, &VertexPartition::discrete(6)));
        assert!(!is_equitable(&c6, &VertexPartition::singleton(6, 0).unwrap()));
        let dist = VertexPartition::new(6, vec![vec![0], vec![1, 5], vec![2, 4], vec![3]]).unwrap();
        assert!(is_equitable(&c6, &dist));
    }
}
