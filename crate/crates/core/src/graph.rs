//! Ordinal-pattern transition graph and the probability of self-transition.

use alloc::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ordinal::OrdinalSequence;

/// Weighted directed graph over the `D!` patterns. An edge `(a, b)` counts
/// how often pattern `b` immediately follows pattern `a`; its weight is that
/// count over the `m - 1` transitions. Self-loops are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionGraph {
    dimension: usize,
    edges: BTreeMap<(u16, u16), u32>,
    transitions: usize,
}

/// One stored edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub count: u32,
    pub weight: f64,
}

impl TransitionGraph {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Total number of transitions, `m - 1`.
    pub fn transitions(&self) -> usize {
        self.transitions
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, source: usize, target: usize) -> f64 {
        let key = (source as u16, target as u16);
        self.edges
            .get(&key)
            .map_or(0.0, |&c| c as f64 / self.transitions as f64)
    }

    /// Edges in `(source, target)` order; only positive weights are stored.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let total = self.transitions as f64;
        self.edges.iter().map(move |(&(s, t), &count)| Edge {
            source: s as usize,
            target: t as usize,
            count,
            weight: count as f64 / total,
        })
    }

    /// Sum of the self-loop weights, `p_st`. Loop counts are summed before
    /// the single division by `m - 1`.
    pub fn self_transition_probability(&self) -> f64 {
        let loops: u64 = self
            .edges
            .iter()
            .filter(|((s, t), _)| s == t)
            .map(|(_, &c)| c as u64)
            .sum();
        loops as f64 / self.transitions as f64
    }
}

/// Counts consecutive pattern pairs of `seq`.
pub fn build_graph(seq: &OrdinalSequence) -> Result<TransitionGraph> {
    if seq.len() < 2 {
        return Err(Error::SequenceTooShort { len: seq.len() });
    }
    let mut edges = BTreeMap::new();
    let mut prev = None;
    for idx in seq.indices() {
        let idx = idx as u16;
        if let Some(p) = prev {
            *edges.entry((p, idx)).or_insert(0u32) += 1;
        }
        prev = Some(idx);
    }
    Ok(TransitionGraph {
        dimension: seq.params().dimension(),
        edges,
        transitions: seq.len() - 1,
    })
}

/// `p_st` of the sequence's transition graph.
pub fn self_transition_probability(seq: &OrdinalSequence) -> Result<f64> {
    build_graph(seq).map(|g| g.self_transition_probability())
}
