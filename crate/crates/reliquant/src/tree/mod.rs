//! Coherent AND/OR fault trees: parsing, validation, quantification.
//!
//! A tree is a set of basic events (components with a failure probability per
//! demand) combined by AND/OR gates up to a single top event. Basic events are
//! treated as mutually independent; only AND and OR gates are supported, which
//! keeps the structure function monotone.
//!
//! Quantification goes through minimal cut sets: [`minimal_cut_sets`] expands
//! the tree top-down, [`top_event_probability`] applies inclusion-exclusion
//! (or the rare-event sum) over them, and [`improvement_ranking`] reports
//! Birnbaum and Fussell-Vesely importance per component.

mod cutsets;
mod parse;
mod quant;

pub use cutsets::{minimal_cut_sets, CutSet};
pub use parse::parse_fault_tree;
pub use quant::{
    birnbaum_importance, fussell_vesely_importance, improvement_ranking, top_event_probability,
    ImportanceEntry, ImportanceReport, Method,
};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// A leaf component with a probability of failure per demand.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicEvent {
    pub id: String,
    pub probability: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
        }
    }
}

/// An AND/OR gate over at least two child nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Event(BasicEvent),
    Gate(Gate),
}

impl Node {
    pub fn id(&self) -> &str {
        match self {
            Node::Event(e) => &e.id,
            Node::Gate(g) => &g.id,
        }
    }
}

/// A validated fault tree: acyclic, fully resolved, every node reachable
/// from the top event.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultTree {
    nodes: BTreeMap<String, Node>,
    top: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate id `{id}`")]
    DuplicateId { id: String },
    #[error("unknown child reference `{child}` in gate `{gate}`")]
    UnknownChild { gate: String, child: String },
    #[error("top node `{id}` is not declared")]
    UnknownTop { id: String },
    #[error("no `top` declaration found")]
    MissingTop,
    #[error("cycle detected through node `{id}`")]
    Cycle { id: String },
    #[error("node `{id}` is not reachable from the top event")]
    Unreachable { id: String },
    #[error("gate `{id}` has {count} children; at least 2 are required")]
    TooFewChildren { id: String, count: usize },
    #[error("event `{id}` has probability {probability} outside [0,1]")]
    ProbabilityOutOfRange { id: String, probability: f64 },
    #[error("unknown event id `{id}`")]
    UnknownEvent { id: String },
    #[error("cut-set expansion exceeded the cap of {cap} intermediate sets")]
    CutSetCapExceeded { cap: usize },
    #[error(
        "inclusion-exclusion over {cut_sets} cut sets needs 2^{cut_sets} terms, \
         above the cap of 2^{cap_log2}; use the rare-event approximation instead"
    )]
    TermCapExceeded { cut_sets: usize, cap_log2: u32 },
    #[error(
        "exact evaluation supports at most 128 distinct basic events; \
         this tree has {events}; use the rare-event approximation instead"
    )]
    TooManyEvents { events: usize },
    #[error("importance is undefined: top-event probability is zero")]
    UndefinedImportance,
}

impl FaultTree {
    /// Build and validate a tree from parts.
    pub fn new(
        events: Vec<BasicEvent>,
        gates: Vec<Gate>,
        top: impl Into<String>,
    ) -> Result<Self, TreeError> {
        let mut nodes = BTreeMap::new();
        for e in events {
            if e.probability.is_nan() || !(0.0..=1.0).contains(&e.probability) {
                return Err(TreeError::ProbabilityOutOfRange {
                    id: e.id,
                    probability: e.probability,
                });
            }
            let id = e.id.clone();
            if nodes.insert(id.clone(), Node::Event(e)).is_some() {
                return Err(TreeError::DuplicateId { id });
            }
        }
        for g in gates {
            let id = g.id.clone();
            if nodes.insert(id.clone(), Node::Gate(g)).is_some() {
                return Err(TreeError::DuplicateId { id });
            }
        }
        let tree = FaultTree { nodes, top: top.into() };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<(), TreeError> {
        if !self.nodes.contains_key(&self.top) {
            return Err(TreeError::UnknownTop { id: self.top.clone() });
        }
        for node in self.nodes.values() {
            if let Node::Gate(g) = node {
                if g.children.len() < 2 {
                    return Err(TreeError::TooFewChildren {
                        id: g.id.clone(),
                        count: g.children.len(),
                    });
                }
                for child in &g.children {
                    if !self.nodes.contains_key(child) {
                        return Err(TreeError::UnknownChild {
                            gate: g.id.clone(),
                            child: child.clone(),
                        });
                    }
                }
            }
        }
        // DFS from top: cycle check and reachability in one pass.
        let mut state: BTreeMap<&str, u8> = BTreeMap::new(); // 1 = on stack, 2 = done
        let mut stack: Vec<(&str, usize)> = vec![(self.top.as_str(), 0)];
        state.insert(&self.top, 1);
        while let Some((id, child_idx)) = stack.pop() {
            let children: &[String] = match &self.nodes[id] {
                Node::Event(_) => &[],
                Node::Gate(g) => &g.children,
            };
            if child_idx < children.len() {
                stack.push((id, child_idx + 1));
                let child = children[child_idx].as_str();
                match state.get(child) {
                    Some(1) => return Err(TreeError::Cycle { id: child.to_string() }),
                    Some(_) => {}
                    None => {
                        state.insert(child, 1);
                        stack.push((child, 0));
                    }
                }
            } else {
                state.insert(id, 2);
            }
        }
        for id in self.nodes.keys() {
            if !state.contains_key(id.as_str()) {
                return Err(TreeError::Unreachable { id: id.clone() });
            }
        }
        Ok(())
    }

    pub fn top(&self) -> &str {
        &self.top
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    /// All nodes, ordered by id.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    /// Basic-event ids, ascending.
    pub fn event_ids(&self) -> Vec<&str> {
        self.nodes
            .values()
            .filter_map(|n| match n {
                Node::Event(e) => Some(e.id.as_str()),
                Node::Gate(_) => None,
            })
            .collect()
    }

    pub fn event(&self, id: &str) -> Result<&BasicEvent, TreeError> {
        match self.nodes.get(id) {
            Some(Node::Event(e)) => Ok(e),
            _ => Err(TreeError::UnknownEvent { id: id.to_string() }),
        }
    }

    /// Replace one event's failure probability (used for what-if scenarios
    /// and for the conditional evaluations behind Birnbaum importance).
    pub fn set_event_probability(&mut self, id: &str, probability: f64) -> Result<(), TreeError> {
        if probability.is_nan() || !(0.0..=1.0).contains(&probability) {
            return Err(TreeError::ProbabilityOutOfRange { id: id.to_string(), probability });
        }
        match self.nodes.get_mut(id) {
            Some(Node::Event(e)) => {
                e.probability = probability;
                Ok(())
            }
            _ => Err(TreeError::UnknownEvent { id: id.to_string() }),
        }
    }

    /// Canonical text form: events sorted by id, gates in topological order
    /// (children before parents), then the `top` line. Parsing the output
    /// reproduces the tree exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for node in self.nodes.values() {
            if let Node::Event(e) = node {
                out.push_str(&format!("event {} p={:e}", e.id, e.probability));
                if let Some(label) = &e.label {
                    out.push_str(&format!(" \"{}\"", label.replace('\\', "\\\\").replace('"', "\\\"")));
                }
                out.push('\n');
            }
        }
        // Kahn's algorithm with a BTreeSet frontier keeps the order deterministic.
        let gates: Vec<&Gate> = self
            .nodes
            .values()
            .filter_map(|n| match n {
                Node::Gate(g) => Some(g),
                _ => None,
            })
            .collect();
        let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
        let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for g in &gates {
            let gate_children =
                g.children.iter().filter(|c| matches!(self.nodes[c.as_str()], Node::Gate(_)));
            let mut n = 0;
            for c in gate_children {
                dependents.entry(c.as_str()).or_default().push(g.id.as_str());
                n += 1;
            }
            pending.insert(g.id.as_str(), n);
        }
        let mut ready: BTreeSet<&str> =
            pending.iter().filter(|(_, &n)| n == 0).map(|(&id, _)| id).collect();
        let mut queue: VecDeque<&str> = VecDeque::new();
        while let Some(&id) = ready.iter().next() {
            ready.remove(id);
            queue.push_back(id);
            if let Some(parents) = dependents.get(id) {
                for &p in parents {
                    let n = pending.get_mut(p).unwrap();
                    *n -= 1;
                    if *n == 0 {
                        ready.insert(p);
                    }
                }
            }
        }
        for id in queue {
            if let Node::Gate(g) = &self.nodes[id] {
                out.push_str(&format!("gate {} {} {}\n", g.id, g.kind.as_str(), g.children.join(" ")));
            }
        }
        out.push_str(&format!("top {}\n", self.top));
        out
    }
}

#[cfg(test)]
pub(crate) fn paper_example_tree(software_probability: f64) -> FaultTree {
    // OR(AND(A, B), C) with B = 1e-2 and C = 1e-5; A is the software term.
    FaultTree::new(
        vec![
            BasicEvent { id: "A".into(), probability: software_probability, label: Some("software".into()) },
            BasicEvent { id: "B".into(), probability: 1e-2, label: None },
            BasicEvent { id: "C".into(), probability: 1e-5, label: None },
        ],
        vec![
            Gate { id: "g1".into(), kind: GateKind::And, children: vec!["A".into(), "B".into()] },
            Gate { id: "sys".into(), kind: GateKind::Or, children: vec!["g1".into(), "C".into()] },
        ],
        "sys",
    )
    .unwrap()
}
