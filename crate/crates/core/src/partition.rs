use std::fmt::Write;

use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("vertex {0} appears in more than one part")]
    Duplicate(Vertex),
    #[error("vertex {0} is not covered by any part")]
    Uncovered(Vertex),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An ordered partition `[n] = V_0 ⊔ … ⊔ V_{k-1}`. Part order is meaningful:
/// it becomes the initial colour numbering for refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    parts: Vec<Vec<Vertex>>,
    part_of: Vec<u32>,
}

impl VertexPartition {
    pub fn new(n: usize, parts: Vec<Vec<Vertex>>) -> Result<Self, PartitionError> {
        let mut part_of = vec![u32::MAX; n];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(PartitionError::EmptyPart(i));
            }
            for &v in part {
                let slot = part_of.get_mut(v as usize).ok_or(PartitionError::OutOfRange(v))?;
                if *slot != u32::MAX {
                    return Err(PartitionError::Duplicate(v));
                }
                *slot = i as u32;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == u32::MAX) {
            return Err(PartitionError::Uncovered(v as Vertex));
        }
        Ok(VertexPartition { parts, part_of })
    }

    /// Groups vertices by label; parts are ordered by label value.
    pub fn from_labels<L: Ord + Copy>(labels: &[L]) -> Self {
        let mut order: Vec<Vertex> = (0..labels.len() as Vertex).collect();
        order.sort_by_key(|&v| (labels[v as usize], v));
        let mut parts: Vec<Vec<Vertex>> = Vec::new();
        let mut part_of = vec![0u32; labels.len()];
        let mut prev = None;
        for v in order {
            let l = labels[v as usize];
            if prev != Some(l) {
                parts.push(Vec::new());
                prev = Some(l);
            }
            part_of[v as usize] = (parts.len() - 1) as u32;
            parts.last_mut().unwrap().push(v);
        }
        VertexPartition { parts, part_of }
    }

    /// One part holding every vertex (no parts when `n == 0`).
    pub fn trivial(n: usize) -> Self {
        let parts = if n == 0 { vec![] } else { vec![(0..n as Vertex).collect()] };
        VertexPartition { parts, part_of: vec![0; n] }
    }

    pub fn discrete(n: usize) -> Self {
        VertexPartition {
            parts: (0..n as Vertex).map(|v| vec![v]).collect(),
            part_of: (0..n as u32).collect(),
        }
    }

    /// `{v} | rest`, with the singleton first.
    pub fn singleton(n: usize, v: Vertex) -> Result<Self, PartitionError> {
        if v as usize >= n {
            return Err(PartitionError::OutOfRange(v));
        }
        let rest: Vec<Vertex> = (0..n as Vertex).filter(|&w| w != v).collect();
        let parts = if rest.is_empty() { vec![vec![v]] } else { vec![vec![v], rest] };
        Self::new(n, parts)
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    #[inline]
    pub fn part_of(&self, v: Vertex) -> usize {
        self.part_of[v as usize] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.part_of
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() <= 1
    }

    pub fn is_discrete(&self) -> bool {
        self.parts.len() == self.n()
    }

    /// Image of the partition under `v ↦ perm[v]`, keeping part order.
    pub fn relabel(&self, perm: &[Vertex]) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|p| p.iter().map(|&v| perm[v as usize]).collect())
            .collect();
        Self::new(self.n(), parts).expect("relabelling preserves validity")
    }

    /// Partition file: one line per part, space-separated vertex ids.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for part in &self.parts {
            let mut first = true;
            for v in part {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self, PartitionError> {
        let mut parts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let part = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Vertex>().map_err(|_| PartitionError::Parse {
                        line: i + 1,
                        msg: format!("invalid vertex id {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            parts.push(part);
        }
        Self::new(n, parts)
    }
}
