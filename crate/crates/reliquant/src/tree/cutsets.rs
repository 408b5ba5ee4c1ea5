//! Minimal cut sets by top-down gate expansion (MOCUS) with absorption.

use super::{FaultTree, Node, TreeError};
use std::collections::BTreeMap;

/// Hard cap on intermediate set count during expansion.
pub const CUT_SET_CAP: usize = 1_000_000;

/// A minimal combination of basic events whose joint occurrence causes the
/// top event. Events are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutSet {
    pub events: Vec<String>,
}

/// Index-space view of a tree used by expansion and quantification.
pub(crate) struct TreeIndex<'a> {
    pub event_ids: Vec<&'a str>,
    pub event_probs: Vec<f64>,
    pub event_pos: BTreeMap<&'a str, usize>,
}

impl<'a> TreeIndex<'a> {
    pub fn new(tree: &'a FaultTree) -> Self {
        let mut event_ids = Vec::new();
        let mut event_probs = Vec::new();
        let mut event_pos = BTreeMap::new();
        for node in tree.nodes() {
            if let Node::Event(e) = node {
                event_pos.insert(e.id.as_str(), event_ids.len());
                event_ids.push(e.id.as_str());
                event_probs.push(e.probability);
            }
        }
        TreeIndex { event_ids, event_probs, event_pos }
    }
}

/// Set of basic-event indices as bit words. Word count is fixed per tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct EventSet {
    words: Vec<u64>,
}

impl EventSet {
    fn empty(words: usize) -> Self {
        EventSet { words: vec![0; words] }
    }

    fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn is_subset_of(&self, other: &EventSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    pub fn union_with(&mut self, other: &EventSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

/// Remove every set that is a strict superset of another (absorption),
/// plus duplicates. Input order does not matter; output is sorted.
fn absorb(mut sets: Vec<EventSet>) -> Vec<EventSet> {
    sets.sort_by_key(|s| s.len());
    let mut minimal: Vec<EventSet> = Vec::new();
    for s in sets {
        if !minimal.iter().any(|m| m.is_subset_of(&s)) {
            minimal.push(s);
        }
    }
    minimal
}

pub(crate) fn minimal_cut_set_masks(tree: &FaultTree) -> Result<Vec<EventSet>, TreeError> {
    minimal_cut_set_masks_capped(tree, CUT_SET_CAP)
}

fn minimal_cut_set_masks_capped(tree: &FaultTree, cap: usize) -> Result<Vec<EventSet>, TreeError> {
    let index = TreeIndex::new(tree);
    let words = index.event_ids.len().div_ceil(64).max(1);

    // Each working set is a conjunction: resolved events (bitmask) plus
    // gate ids still to expand.
    struct Working<'a> {
        events: EventSet,
        gates: Vec<&'a str>,
    }

    let mut work: Vec<Working> = Vec::new();
    let mut done: Vec<EventSet> = Vec::new();
    let seed = match tree.node(tree.top()).unwrap() {
        Node::Event(e) => {
            let mut s = EventSet::empty(words);
            s.insert(index.event_pos[e.id.as_str()]);
            done.push(s);
            None
        }
        Node::Gate(g) => Some(Working { events: EventSet::empty(words), gates: vec![g.id.as_str()] }),
    };
    if let Some(w) = seed {
        work.push(w);
    }

    while let Some(mut current) = work.pop() {
        let Some(gate_id) = current.gates.pop() else {
            done.push(current.events);
            continue;
        };
        let Node::Gate(gate) = tree.node(gate_id).unwrap() else { unreachable!() };
        match gate.kind {
            super::GateKind::And => {
                // All children join the same conjunction.
                for child in &gate.children {
                    match tree.node(child).unwrap() {
                        Node::Event(e) => current.events.insert(index.event_pos[e.id.as_str()]),
                        Node::Gate(g) => current.gates.push(g.id.as_str()),
                    }
                }
                work.push(current);
            }
            super::GateKind::Or => {
                // One copy of the conjunction per child.
                for child in &gate.children {
                    let mut branch = Working {
                        events: current.events.clone(),
                        gates: current.gates.clone(),
                    };
                    match tree.node(child).unwrap() {
                        Node::Event(e) => branch.events.insert(index.event_pos[e.id.as_str()]),
                        Node::Gate(g) => branch.gates.push(g.id.as_str()),
                    }
                    work.push(branch);
                }
            }
        }
        if work.len() + done.len() > cap {
            return Err(TreeError::CutSetCapExceeded { cap });
        }
    }

    Ok(absorb(done))
}

/// All minimal cut sets of the tree, canonically ordered: events within a
/// set sorted by id, sets sorted lexicographically.
pub fn minimal_cut_sets(tree: &FaultTree) -> Result<Vec<CutSet>, TreeError> {
    let index = TreeIndex::new(tree);
    let masks = minimal_cut_set_masks(tree)?;
    let mut out: Vec<CutSet> = masks
        .iter()
        .map(|m| CutSet {
            events: m.iter_indices().map(|i| index.event_ids[i].to_string()).collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}
