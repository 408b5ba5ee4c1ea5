//! Top-event probability and component importance over minimal cut sets.

use super::cutsets::{minimal_cut_set_masks, EventSet, TreeIndex};
use super::{FaultTree, TreeError};

/// Subset cap for inclusion-exclusion: at most 2^20 terms.
pub const TERM_CAP_LOG2: u32 = 20;

/// How to combine cut-set probabilities into a top-event probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Inclusion-exclusion over minimal cut sets; exact under the
    /// independence assumption.
    Exact,
    /// Sum of cut-set probabilities clamped to 1. An upper bound for
    /// coherent trees, tight when probabilities are small.
    RareEvent,
}

/// Neumaier compensated summation; keeps inclusion-exclusion error near one
/// ulp of the true sum even with strongly cancelling terms.
#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn cut_set_probability(mask: &EventSet, probs: &[f64]) -> f64 {
    mask.iter_indices().map(|i| probs[i]).product()
}

/// Unclamped rare-event sum.
fn cut_set_sum(masks: &[EventSet], probs: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for m in masks {
        acc.add(cut_set_probability(m, probs));
    }
    acc.total()
}

/// Inclusion-exclusion over the union of cut-set occurrence events. Repeated
/// event ids inside a term's union are counted once: each term is the product
/// of the distinct event probabilities in the union.
fn inclusion_exclusion(masks: &[EventSet], probs: &[f64]) -> Result<f64, TreeError> {
    let k = masks.len();
    if k == 0 {
        return Ok(0.0);
    }
    if k as u32 > TERM_CAP_LOG2 {
        return Err(TreeError::TermCapExceeded { cut_sets: k, cap_log2: TERM_CAP_LOG2 });
    }
    if probs.len() > 128 {
        return Err(TreeError::TooManyEvents { events: probs.len() });
    }
    let cut_masks: Vec<u128> = masks
        .iter()
        .map(|m| m.iter_indices().fold(0u128, |acc, i| acc | 1u128 << i))
        .collect();

    // union[s] = union of the cut sets selected by bitmask s, built from the
    // subset with the lowest selected cut set removed.
    let mut union = vec![0u128; 1usize << k];
    let mut acc = CompensatedSum::default();
    for s in 1usize..(1usize << k) {
        let low = s.trailing_zeros() as usize;
        let u = union[s & (s - 1)] | cut_masks[low];
        union[s] = u;
        let mut term = 1.0;
        let mut bits = u;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            term *= probs[i];
        }
        if s.count_ones() % 2 == 1 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    Ok(acc.total().clamp(0.0, 1.0))
}

/// Probability of the top event. Basic events are assumed statistically
/// independent. For coherent trees `RareEvent` is always >= `Exact`.
pub fn top_event_probability(tree: &FaultTree, method: Method) -> Result<f64, TreeError> {
    let masks = minimal_cut_set_masks(tree)?;
    let index = TreeIndex::new(tree);
    match method {
        Method::Exact => inclusion_exclusion(&masks, &index.event_probs),
        Method::RareEvent => Ok(cut_set_sum(&masks, &index.event_probs).min(1.0)),
    }
}

fn event_position(index: &TreeIndex, tree: &FaultTree, event: &str) -> Result<usize, TreeError> {
    tree.event(event)?;
    Ok(index.event_pos[event])
}

/// Birnbaum importance: `P(top | p_event = 1) - P(top | p_event = 0)`,
/// both computed with the exact method.
pub fn birnbaum_importance(tree: &FaultTree, event: &str) -> Result<f64, TreeError> {
    let masks = minimal_cut_set_masks(tree)?;
    let index = TreeIndex::new(tree);
    let pos = event_position(&index, tree, event)?;
    birnbaum_at(&masks, &index.event_probs, pos)
}

fn birnbaum_at(masks: &[EventSet], probs: &[f64], pos: usize) -> Result<f64, TreeError> {
    let mut high = probs.to_vec();
    high[pos] = 1.0;
    let mut low = probs.to_vec();
    low[pos] = 0.0;
    Ok(inclusion_exclusion(masks, &high)? - inclusion_exclusion(masks, &low)?)
}

/// Fussell-Vesely importance: the fraction of the cut-set probability sum
/// contributed by cut sets containing the event.
pub fn fussell_vesely_importance(tree: &FaultTree, event: &str) -> Result<f64, TreeError> {
    let masks = minimal_cut_set_masks(tree)?;
    let index = TreeIndex::new(tree);
    let pos = event_position(&index, tree, event)?;
    fussell_vesely_at(&masks, &index.event_probs, pos)
}

fn fussell_vesely_at(masks: &[EventSet], probs: &[f64], pos: usize) -> Result<f64, TreeError> {
    let total = cut_set_sum(masks, probs);
    if total <= 0.0 {
        return Err(TreeError::UndefinedImportance);
    }
    let mut containing = CompensatedSum::default();
    for m in masks {
        if m.contains(pos) {
            containing.add(cut_set_probability(m, probs));
        }
    }
    Ok((containing.total() / total).clamp(0.0, 1.0))
}

/// One row of an importance report.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceEntry {
    pub event: String,
    pub birnbaum: f64,
    pub fussell_vesely: f64,
}

/// Importance of every basic event, with a ranking that orders candidate
/// improvements: Fussell-Vesely descending, ties broken by id ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    /// One entry per basic event, ordered by event id.
    pub entries: Vec<ImportanceEntry>,
    /// Event ids, most improvement-worthy first.
    pub ranking: Vec<String>,
}

impl ImportanceReport {
    /// The component improvement effort should focus on first.
    pub fn head(&self) -> &str {
        &self.ranking[0]
    }
}

/// Full importance report for every basic event in the tree.
pub fn improvement_ranking(tree: &FaultTree) -> Result<ImportanceReport, TreeError> {
    let masks = minimal_cut_set_masks(tree)?;
    let index = TreeIndex::new(tree);
    let mut entries = Vec::with_capacity(index.event_ids.len());
    for (pos, id) in index.event_ids.iter().enumerate() {
        entries.push(ImportanceEntry {
            event: id.to_string(),
            birnbaum: birnbaum_at(&masks, &index.event_probs, pos)?,
            fussell_vesely: fussell_vesely_at(&masks, &index.event_probs, pos)?,
        });
    }
    let mut ranking: Vec<usize> = (0..entries.len()).collect();
    ranking.sort_by(|&a, &b| {
        entries[b]
            .fussell_vesely
            .total_cmp(&entries[a].fussell_vesely)
            .then_with(|| entries[a].event.cmp(&entries[b].event))
    });
    let ranking = ranking.into_iter().map(|i| entries[i].event.clone()).collect();
    Ok(ImportanceReport { entries, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{paper_example_tree, BasicEvent, FaultTree, Gate, GateKind};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn exact_with_implausibly_reliable_software() {
        // 1e-33 + 1e-5 - 1e-38: C dominates.
        let tree = paper_example_tree(1e-31);
        let p = top_event_probability(&tree, Method::Exact).unwrap();
        assert!(rel_err(p, 1.0e-5) < 1e-6, "got {p}");
    }

    #[test]
    fn exact_with_justifiable_software_rate() {
        // 1e-4 + 1e-5 - 1e-9 = 1.09999e-4: the AND pair dominates.
        let tree = paper_example_tree(1e-2);
        let p = top_event_probability(&tree, Method::Exact).unwrap();
        assert!(rel_err(p, 1.09999e-4) < 1e-9, "got {p}");
    }

    #[test]
    fn rare_event_bounds_exact_from_above() {
        for a in [1e-31, 1e-2, 0.5] {
            let tree = paper_example_tree(a);
            let exact = top_event_probability(&tree, Method::Exact).unwrap();
            let rare = top_event_probability(&tree, Method::RareEvent).unwrap();
            assert!(rare >= exact);
            assert!((0.0..=1.0).contains(&exact));
            assert!((0.0..=1.0).contains(&rare));
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let mut tree = paper_example_tree(0.0);
        for id in ["B", "C"] {
            tree.set_event_probability(id, 0.0).unwrap();
        }
        assert_eq!(top_event_probability(&tree, Method::Exact).unwrap(), 0.0);
        for id in ["A", "B", "C"] {
            tree.set_event_probability(id, 1.0).unwrap();
        }
        assert_eq!(top_event_probability(&tree, Method::Exact).unwrap(), 1.0);
        assert_eq!(top_event_probability(&tree, Method::RareEvent).unwrap(), 1.0);
    }

    #[test]
    fn birnbaum_hand_values() {
        let tree = paper_example_tree(1e-2);
        // Birnbaum(C) = 1 - P(top | C impossible) = 1 - 1e-4.
        let bc = birnbaum_importance(&tree, "C").unwrap();
        assert!(rel_err(bc, 0.9999) < 1e-12, "got {bc}");
        // Birnbaum(A) = p_B * (1 - p_C).
        let ba = birnbaum_importance(&tree, "A").unwrap();
        assert!(rel_err(ba, 1e-2 * (1.0 - 1e-5)) < 1e-12, "got {ba}");
    }

    #[test]
    fn birnbaum_of_irrelevant_event_is_zero() {
        // top = OR(A, AND(A, B)): B appears in no minimal cut set.
        let tree = FaultTree::new(
            vec![
                BasicEvent { id: "A".into(), probability: 0.1, label: None },
                BasicEvent { id: "B".into(), probability: 0.2, label: None },
            ],
            vec![
                Gate { id: "g1".into(), kind: GateKind::And, children: vec!["A".into(), "B".into()] },
                Gate { id: "sys".into(), kind: GateKind::Or, children: vec!["A".into(), "g1".into()] },
            ],
            "sys",
        )
        .unwrap();
        assert_eq!(birnbaum_importance(&tree, "B").unwrap(), 0.0);
    }

    #[test]
    fn birnbaum_unknown_event() {
        let tree = paper_example_tree(1e-2);
        assert!(matches!(
            birnbaum_importance(&tree, "nope").unwrap_err(),
            TreeError::UnknownEvent { .. }
        ));
        // A gate id is not an event id.
        assert!(matches!(
            birnbaum_importance(&tree, "g1").unwrap_err(),
            TreeError::UnknownEvent { .. }
        ));
    }

    #[test]
    fn fussell_vesely_hand_values() {
        let tree = paper_example_tree(1e-31);
        let fv_c = fussell_vesely_importance(&tree, "C").unwrap();
        let fv_a = fussell_vesely_importance(&tree, "A").unwrap();
        assert!(rel_err(fv_c, 1.0) < 1e-12, "got {fv_c}");
        assert!(rel_err(fv_a, 1e-28) < 1e-12, "got {fv_a}");

        let tree = paper_example_tree(1e-2);
        let fv_a = fussell_vesely_importance(&tree, "A").unwrap();
        let fv_b = fussell_vesely_importance(&tree, "B").unwrap();
        let fv_c = fussell_vesely_importance(&tree, "C").unwrap();
        assert!(rel_err(fv_a, 1e-4 / 1.1e-4) < 1e-12);
        assert_eq!(fv_a, fv_b);
        assert!(rel_err(fv_c, 1e-5 / 1.1e-4) < 1e-12);
    }

    #[test]
    fn fussell_vesely_single_cut_set() {
        let tree = FaultTree::new(
            vec![BasicEvent { id: "E".into(), probability: 0.3, label: None }],
            vec![],
            "E",
        )
        .unwrap();
        assert_eq!(fussell_vesely_importance(&tree, "E").unwrap(), 1.0);
    }

    #[test]
    fn fussell_vesely_undefined_at_zero() {
        let tree = FaultTree::new(
            vec![BasicEvent { id: "E".into(), probability: 0.0, label: None }],
            vec![],
            "E",
        )
        .unwrap();
        assert_eq!(
            fussell_vesely_importance(&tree, "E").unwrap_err(),
            TreeError::UndefinedImportance
        );
    }

    #[test]
    fn ranking_reproduces_the_dominance_inversion() {
        let report = improvement_ranking(&paper_example_tree(1e-31)).unwrap();
        assert_eq!(report.head(), "C");
        assert_eq!(report.ranking, vec!["C", "A", "B"]);

        let report = improvement_ranking(&paper_example_tree(1e-2)).unwrap();
        assert_eq!(report.head(), "A");
        assert_eq!(report.ranking, vec!["A", "B", "C"]);
        // Entries stay in id order regardless of rank.
        let ids: Vec<&str> = report.entries.iter().map(|e| e.event.as_str()).collect();
        assert_eq!(ids, vec!["A", "B", "C"]);
    }

    #[test]
    fn ranking_single_event_tree() {
        let tree = FaultTree::new(
            vec![BasicEvent { id: "E".into(), probability: 0.3, label: None }],
            vec![],
            "E",
        )
        .unwrap();
        let report = improvement_ranking(&tree).unwrap();
        assert_eq!(report.ranking, vec!["E"]);
    }

    #[test]
    fn term_cap_guards_wide_or_of_ands() {
        // 21 disjoint AND pairs -> 21 cut sets -> 2^21 terms, over the cap.
        let mut events = Vec::new();
        let mut gates = Vec::new();
        let mut ands = Vec::new();
        for i in 0..21 {
            let a = format!("a{i}");
            let b = format!("b{i}");
            events.push(BasicEvent { id: a.clone(), probability: 0.01, label: None });
            events.push(BasicEvent { id: b.clone(), probability: 0.01, label: None });
            let gid = format!("g{i}");
            gates.push(Gate { id: gid.clone(), kind: GateKind::And, children: vec![a, b] });
            ands.push(gid);
        }
        gates.push(Gate { id: "sys".into(), kind: GateKind::Or, children: ands });
        let tree = FaultTree::new(events, gates, "sys").unwrap();
        assert!(matches!(
            top_event_probability(&tree, Method::Exact).unwrap_err(),
            TreeError::TermCapExceeded { cut_sets: 21, .. }
        ));
        // The rare-event path still answers.
        let rare = top_event_probability(&tree, Method::RareEvent).unwrap();
        assert!(rel_err(rare, 21.0 * 1e-4) < 1e-12);
    }
}
