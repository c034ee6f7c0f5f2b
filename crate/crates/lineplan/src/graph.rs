//! Small internal digraph helper with deterministic shortest paths.
//!
//! Ties between equal-length paths are broken by the lexicographically
//! smallest node-rank sequence (and, as a final disambiguator, the smallest
//! arc index sequence), so every caller gets reproducible paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Arc list digraph; nodes are `0..n`.
#[derive(Debug, Clone)]
pub(crate) struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, weight: f64) -> usize {
        debug_assert!(weight >= 0.0);
        let id = self.arcs.len();
        self.arcs.push((from, to, weight));
        self.out[from].push(id);
        id
    }

    pub fn arc(&self, id: usize) -> (usize, usize, f64) {
        self.arcs[id]
    }
}

/// A resolved path: total weight plus node and arc index sequences.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NodePath {
    pub dist: f64,
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
}

struct HeapEntry {
    dist: f64,
    ranks: Vec<usize>,
    arcs: Vec<usize>,
    nodes: Vec<usize>,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed so that BinaryHeap pops the smallest entry first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.ranks.cmp(&self.ranks))
            .then_with(|| other.arcs.cmp(&self.arcs))
    }
}

/// Shortest paths from a set of sources (each with an initial cost) to all
/// reachable nodes.
///
/// `rank` maps each node to its tie-break rank; `usable` can exclude arcs
/// and nodes (excluded nodes are never entered or left).
pub(crate) fn lex_shortest(
    g: &Digraph,
    sources: &[(usize, f64)],
    rank: &[usize],
    usable: Option<&dyn Fn(usize, usize) -> bool>, // (arc, to-node) -> allowed
) -> Vec<Option<NodePath>> {
    let mut settled: Vec<Option<NodePath>> = vec![None; g.n];
    let mut heap = BinaryHeap::new();
    for &(s, cost) in sources {
        heap.push(HeapEntry {
            dist: cost,
            ranks: vec![rank[s]],
            arcs: Vec::new(),
            nodes: vec![s],
        });
    }
    while let Some(entry) = heap.pop() {
        let v = *entry.nodes.last().unwrap();
        if settled[v].is_some() {
            continue;
        }
        settled[v] = Some(NodePath {
            dist: entry.dist,
            nodes: entry.nodes.clone(),
            arcs: entry.arcs.clone(),
        });
        for &aid in &g.out[v] {
            let (_, to, w) = g.arcs[aid];
            if settled[to].is_some() {
                continue;
            }
            if let Some(f) = usable {
                if !f(aid, to) {
                    continue;
                }
            }
            let mut ranks = entry.ranks.clone();
            ranks.push(rank[to]);
            let mut arcs = entry.arcs.clone();
            arcs.push(aid);
            let mut nodes = entry.nodes.clone();
            nodes.push(to);
            heap.push(HeapEntry {
                dist: entry.dist + w,
                ranks,
                arcs,
                nodes,
            });
        }
    }
    settled
}
