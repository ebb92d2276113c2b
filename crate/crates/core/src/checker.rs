//! Global model checking.
//!
//! [`model_check`] computes truth sets bottom-up over the formula, with one
//! linear pass over the mechanism per modal subformula. Structurally equal
//! subformulas are interned into a DAG first, so each is evaluated once and
//! the whole run stays within `O(|φ|·(|S|+|M|+|Δ|))`.
//!
//! [`check_state_naive`] is a direct transcription of the satisfaction
//! relation, recursing through successors without sharing any work. It
//! exists as an independent oracle for the truth-set algorithms.

use std::collections::HashMap;

use crate::error::Result;
use crate::formula::{Formula, Modality};
use crate::model::TransitionSystem;
use crate::truthset::TruthSet;

/// Whether action `i` of agent `a` at state `s` ensures `target`: every
/// mechanism entry choosing `i` leads into `target`. Vacuously true when no
/// entry chooses `i`, which cannot happen in a valid model.
pub fn ensures_at(m: &TransitionSystem, s: usize, a: usize, i: usize, target: &TruthSet) -> bool {
    m.entries_with_action(s, a, i).all(|tr| target.contains(tr.target))
}

/// Whether action `i` of agent `a` at state `s` admits `target`: some
/// mechanism entry choosing `i` leads into `target`.
pub fn admits_at(m: &TransitionSystem, s: usize, a: usize, i: usize, target: &TruthSet) -> bool {
    m.entries_with_action(s, a, i).any(|tr| target.contains(tr.target))
}

pub fn ensures(m: &TransitionSystem, s: &str, a: &str, i: &str, target: &TruthSet) -> Result<bool> {
    let (s, a, i) = locus(m, s, a, i)?;
    Ok(ensures_at(m, s, a, i, target))
}

pub fn admits(m: &TransitionSystem, s: &str, a: &str, i: &str, target: &TruthSet) -> Result<bool> {
    let (s, a, i) = locus(m, s, a, i)?;
    Ok(admits_at(m, s, a, i, target))
}

fn locus(m: &TransitionSystem, s: &str, a: &str, i: &str) -> Result<(usize, usize, usize)> {
    let s = m.require_state(s)?;
    let a = m.require_agent(a)?;
    let i = m.require_action(s, a, i)?;
    Ok((s, a, i))
}

/// `[[WA_a ψ]]`: states with an edge whose `a`-action is permitted and whose
/// target is in `psi`.
pub fn truth_set_wa(m: &TransitionSystem, a: usize, psi: &TruthSet) -> TruthSet {
    let mut collector = TruthSet::empty(m.num_states());
    for s in 0..m.num_states() {
        let permitted = m.permitted_mask(s, a);
        for tr in m.transitions(s) {
            if permitted[tr.profile[a]] && psi.contains(tr.target) {
                collector.insert(s);
                break;
            }
        }
    }
    collector
}

/// Marks the actions of `a` at `s` that ensure `psi`: start from all of
/// `Δ_a^s` and strike out the action of every edge leaving `psi`.
fn fill_ensurer(m: &TransitionSystem, s: usize, a: usize, psi: &TruthSet, ensurer: &mut Vec<bool>) {
    ensurer.clear();
    ensurer.resize(m.num_actions(s, a), true);
    for tr in m.transitions(s) {
        if !psi.contains(tr.target) {
            ensurer[tr.profile[a]] = false;
        }
    }
}

/// `[[WE_a ψ]]`: states where some permitted action ensures `psi`.
pub fn truth_set_we(m: &TransitionSystem, a: usize, psi: &TruthSet) -> TruthSet {
    let mut collector = TruthSet::empty(m.num_states());
    let mut ensurer = Vec::new();
    for s in 0..m.num_states() {
        fill_ensurer(m, s, a, psi, &mut ensurer);
        let permitted = m.permitted_mask(s, a);
        if ensurer.iter().zip(permitted).any(|(&e, &p)| e && p) {
            collector.insert(s);
        }
    }
    collector
}

/// `[[SE_a ψ]]`: states where every action ensuring `psi` is permitted.
pub fn truth_set_se(m: &TransitionSystem, a: usize, psi: &TruthSet) -> TruthSet {
    let mut collector = TruthSet::empty(m.num_states());
    let mut ensurer = Vec::new();
    for s in 0..m.num_states() {
        fill_ensurer(m, s, a, psi, &mut ensurer);
        let permitted = m.permitted_mask(s, a);
        if ensurer.iter().zip(permitted).all(|(&e, &p)| !e || p) {
            collector.insert(s);
        }
    }
    collector
}

/// `[[SA_a ψ]]`: all states minus those with an edge whose `a`-action is not
/// permitted and whose target is in `psi`.
pub fn truth_set_sa(m: &TransitionSystem, a: usize, psi: &TruthSet) -> TruthSet {
    let mut sieve = m.all_states();
    for s in 0..m.num_states() {
        let permitted = m.permitted_mask(s, a);
        for tr in m.transitions(s) {
            if !permitted[tr.profile[a]] && psi.contains(tr.target) {
                sieve.remove(s);
                break;
            }
        }
    }
    sieve
}

/// Dispatches to the truth-set algorithm of `kind`.
pub fn truth_set_modal(m: &TransitionSystem, kind: Modality, a: usize, psi: &TruthSet) -> TruthSet {
    match kind {
        Modality::WA => truth_set_wa(m, a, psi),
        Modality::WE => truth_set_we(m, a, psi),
        Modality::SE => truth_set_se(m, a, psi),
        Modality::SA => truth_set_sa(m, a, psi),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Prop(String),
    Not(usize),
    Or(usize, usize),
    Modal(Modality, usize, usize),
}

/// Model-checking session over one model. Truth sets of every subformula
/// seen so far are cached by structural identity.
pub struct CheckContext<'m> {
    model: &'m TransitionSystem,
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    sets: Vec<TruthSet>,
}

impl<'m> CheckContext<'m> {
    pub fn new(model: &'m TransitionSystem) -> Self {
        CheckContext {
            model,
            nodes: Vec::new(),
            index: HashMap::new(),
            sets: Vec::new(),
        }
    }

    pub fn model(&self) -> &'m TransitionSystem {
        self.model
    }

    /// Number of distinct subformulas cached.
    pub fn cached(&self) -> usize {
        self.sets.len()
    }

    /// Truth set of `f`. Fails only if `f` names an agent the model lacks.
    pub fn truth_set(&mut self, f: &Formula) -> Result<TruthSet> {
        for agent in f.agents() {
            self.model.require_agent(agent.as_str())?;
        }
        let root = self.intern(f);
        Ok(self.sets[root].clone())
    }

    fn intern(&mut self, f: &Formula) -> usize {
        let node = match f {
            Formula::Prop(p) => Node::Prop(p.clone()),
            Formula::Not(x) => Node::Not(self.intern(x)),
            Formula::Or(l, r) => {
                let l = self.intern(l);
                let r = self.intern(r);
                Node::Or(l, r)
            }
            Formula::Modal(kind, agent, body) => {
                let body = self.intern(body);
                let a = self
                    .model
                    .agent_index(agent.as_str())
                    .expect("agents resolved before interning");
                Node::Modal(*kind, a, body)
            }
        };
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let m = self.model;
        let set = match &node {
            Node::Prop(p) => m.valuation(p),
            Node::Not(x) => self.sets[*x].complement(),
            Node::Or(l, r) => self.sets[*l].union(&self.sets[*r]),
            Node::Modal(kind, a, body) => truth_set_modal(m, *kind, *a, &self.sets[*body]),
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        self.sets.push(set);
        id
    }
}

/// `[[φ]]` in `m`.
pub fn model_check(m: &TransitionSystem, f: &Formula) -> Result<TruthSet> {
    CheckContext::new(m).truth_set(f)
}

/// Literal recursive evaluation of `s ⊩ φ`, sharing no work between calls.
pub fn check_state_naive(m: &TransitionSystem, s: &str, f: &Formula) -> Result<bool> {
    let s = m.require_state(s)?;
    for agent in f.agents() {
        m.require_agent(agent.as_str())?;
    }
    Ok(satisfies(m, s, f))
}

/// `s ⊩ φ` by state index; agents in `f` must exist in `m`.
pub fn satisfies(m: &TransitionSystem, s: usize, f: &Formula) -> bool {
    match f {
        Formula::Prop(p) => m.valuation_ref(p).is_some_and(|set| set.contains(s)),
        Formula::Not(x) => !satisfies(m, s, x),
        Formula::Or(l, r) => satisfies(m, s, l) || satisfies(m, s, r),
        Formula::Modal(kind, agent, body) => {
            let a = m.agent_index(agent.as_str()).expect("agent resolved");
            // (s,i) ~>_a φ: every edge choosing i reaches a state satisfying φ.
            let ensures = |i: usize, g: &dyn Fn(usize) -> bool| m.entries_with_action(s, a, i).all(|tr| g(tr.target));
            let sat_body = |t: usize| satisfies(m, t, body);
            let sat_neg_body = |t: usize| !satisfies(m, t, body);
            let actions = 0..m.num_actions(s, a);
            let permitted = |i: usize| m.is_permitted(s, a, i);
            match kind {
                // some permitted i with not (s,i) ~> ¬φ
                Modality::WA => actions.filter(|&i| permitted(i)).any(|i| !ensures(i, &sat_neg_body)),
                // some permitted i with (s,i) ~> φ
                Modality::WE => actions.filter(|&i| permitted(i)).any(|i| ensures(i, &sat_body)),
                // every i with (s,i) ~> φ is permitted
                Modality::SE => actions.filter(|&i| ensures(i, &sat_body)).all(permitted),
                // every i with not (s,i) ~> ¬φ is permitted
                Modality::SA => actions.filter(|&i| !ensures(i, &sat_neg_body)).all(permitted),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse;

    fn fig1() -> TransitionSystem {
        fixtures::load_fixture("fig1-wa").unwrap().model().clone()
    }

    fn names(m: &TransitionSystem, set: &TruthSet) -> Vec<String> {
        m.state_names(set).into_iter().map(|s| s.0).collect()
    }

    #[test]
    fn fig1_golden_truth_sets() {
        let m = fig1();
        let check = |text: &str| names(&m, &model_check(&m, &parse(text).unwrap()).unwrap());
        assert_eq!(check("p"), ["u"]);
        assert_eq!(check("!p"), ["s", "t"]);
        assert_eq!(check("WA[a] p"), ["s", "u"]);
        assert_eq!(check("WE[a] p"), ["u"]);
    }

    #[test]
    fn fig1_ensures_and_admits() {
        let m = fig1();
        let p = m.truth_set(["u"]).unwrap();
        assert!(ensures(&m, "u", "a", "1", &p).unwrap());
        assert!(!ensures(&m, "s", "a", "2", &p).unwrap());
        let t = m.truth_set(["t"]).unwrap();
        assert!(admits(&m, "s", "a", "2", &t).unwrap());
        assert!(ensures(&m, "s", "a", "1", &m.all_states()).unwrap());
        assert!(!admits(&m, "s", "a", "1", &TruthSet::empty(3)).unwrap());
        assert!(ensures(&m, "s", "a", "9", &p).is_err());
        assert!(ensures(&m, "nowhere", "a", "1", &p).is_err());
    }

    #[test]
    fn admits_is_dual_of_ensures_on_fig1() {
        let m = fig1();
        let n = m.num_states();
        for bits in 0u32..(1 << n) {
            let x = TruthSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1));
            for s in 0..n {
                for a in 0..m.num_agents() {
                    for i in 0..m.num_actions(s, a) {
                        assert_eq!(admits_at(&m, s, a, i, &x), !ensures_at(&m, s, a, i, &x.complement()));
                    }
                }
            }
        }
    }

    #[test]
    fn naive_oracle_on_fig1() {
        let m = fig1();
        assert!(check_state_naive(&m, "u", &parse("WE[a] p").unwrap()).unwrap());
        assert!(!check_state_naive(&m, "t", &parse("WA[a] p").unwrap()).unwrap());
        for s in ["s", "t", "u"] {
            assert!(check_state_naive(&m, s, &parse("true").unwrap()).unwrap());
        }
        assert!(check_state_naive(&m, "x", &parse("p").unwrap()).is_err());
    }

    #[test]
    fn unknown_agent_is_an_input_error() {
        let m = fig1();
        assert!(model_check(&m, &parse("WA[zed] p").unwrap()).is_err());
    }

    #[test]
    fn constants_on_empty_and_full_sets() {
        let m = fig1();
        let empty = TruthSet::empty(3);
        let full = m.all_states();
        for a in 0..2 {
            assert!(truth_set_wa(&m, a, &empty).is_empty());
            assert!(truth_set_we(&m, a, &empty).is_empty());
            assert!(truth_set_se(&m, a, &empty).is_full());
            assert!(truth_set_sa(&m, a, &empty).is_full());
            assert!(truth_set_wa(&m, a, &full).is_full());
            assert!(truth_set_we(&m, a, &full).is_full());
        }
    }

    #[test]
    fn non_permitted_action_ensuring_p_excludes_state_from_se() {
        // a's action -1 is forbidden and always lands in p; 1 is permitted
        // and may miss p depending on b.
        let m = crate::model::ModelBuilder::new(["a", "b"], ["s", "t"])
            .actions("s", "a", &["1", "-1"], &["1"])
            .all_permitted("s", "b", &["1", "2"])
            .all_permitted("t", "a", &["1"])
            .all_permitted("t", "b", &["1"])
            .transition("s", &[("a", "1"), ("b", "1")], "s")
            .transition("s", &[("a", "1"), ("b", "2")], "t")
            .transition("s", &[("a", "-1"), ("b", "1")], "t")
            .transition("s", &[("a", "-1"), ("b", "2")], "t")
            .transition("t", &[("a", "1"), ("b", "1")], "t")
            .valuation("p", &["t"])
            .build()
            .unwrap();
        let p = m.valuation("p");
        let se = truth_set_se(&m, 0, &p);
        let sa = truth_set_sa(&m, 0, &p);
        // Oracle: brute force over the definitions.
        for s in 0..2 {
            let f = Formula::se("a", Formula::prop("p"));
            assert_eq!(se.contains(s), satisfies(&m, s, &f));
            let f = Formula::sa("a", Formula::prop("p"));
            assert_eq!(sa.contains(s), satisfies(&m, s, &f));
        }
        assert!(!se.contains(0));
        assert!(!sa.contains(0));
        assert!(se.contains(1));
    }

    #[test]
    fn memo_shares_repeated_subformulas() {
        let m = fig1();
        let mut ctx = CheckContext::new(&m);
        let f = parse("WA[a] p | WA[a] p").unwrap();
        ctx.truth_set(&f).unwrap();
        // p, WA[a] p, the disjunction
        assert_eq!(ctx.cached(), 3);
    }

    #[test]
    fn empty_model_gives_empty_truth_sets() {
        let m = crate::model::ModelBuilder::new(["a"], Vec::<String>::new())
            .build()
            .unwrap();
        for text in ["true", "WE[a] true", "SA[a] false", "!p"] {
            assert!(model_check(&m, &parse(text).unwrap()).unwrap().is_empty());
        }
    }
}
