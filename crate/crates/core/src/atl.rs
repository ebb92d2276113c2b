//! Reduction to next-step ATL.
//!
//! Each state `s` is split into copies `⟨s, 𝒟⟩`, one per set `𝒟` of agents,
//! where `d_a` holds iff `a ∈ 𝒟`. An edge `(δ, t)` of `M_s` becomes a
//! transition from every copy of `s` to `⟨t, {a | δ_a ∈ D_a^s}⟩`: the copy
//! records which agents acted within their permissions on the way in.
//!
//! ATL transitions must be functions of the full move vector, so when some
//! profile has several successors an extra agent, Nature, picks among them.
//! With `K` the largest number of successors of any profile, Nature has moves
//! `0..K` everywhere, and move `j` selects successor `j mod k` of the `k`
//! successors in state order.
//!
//! The four modalities become
//!
//! ```text
//! WA_a φ  ↦  ⟨⟨𝒜⟩⟩X (d_a ∧ φ)          WE_a φ  ↦  ⟨⟨a⟩⟩X (d_a ∧ φ)
//! SA_a φ  ↦  ¬⟨⟨𝒜⟩⟩X ¬(φ → d_a)       SE_a φ  ↦  ¬⟨⟨a⟩⟩X ¬(φ → d_a)
//! ```
//!
//! where `𝒜` is the grand coalition including Nature.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::checker::model_check;
use crate::error::{Error, Result};
use crate::formula::{Formula, Modality};
use crate::model::{AgentId, ProfileIter, StateId, TransitionSystem};

pub const DEFAULT_AGENT_CAP: usize = 6;

/// Name given to the determinizing agent, suffixed with `_` until unique.
pub const NATURE: &str = "Nature";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtlState {
    pub base: usize,
    /// Bit `a` set iff original agent `a` is in `𝒟`.
    pub permitted: u32,
}

#[derive(Clone, Debug)]
pub struct AtlModel {
    source: TransitionSystem,
    agents: Vec<String>,
    nature: Option<usize>,
    nature_moves: usize,
    /// Per base state, per profile (odometer order): successors with the
    /// set of agents that acted permissibly, sorted by target.
    outcomes: Vec<Vec<Vec<(usize, u32)>>>,
}

impl AtlModel {
    /// All agents, Nature last when present.
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn nature(&self) -> Option<&str> {
        self.nature.map(|i| self.agents[i].as_str())
    }

    pub fn nature_moves(&self) -> usize {
        self.nature_moves
    }

    pub fn source(&self) -> &TransitionSystem {
        &self.source
    }

    fn original_agents(&self) -> usize {
        self.source.num_agents()
    }

    pub fn num_states(&self) -> usize {
        self.source.num_states() << self.original_agents()
    }

    pub fn state(&self, index: usize) -> AtlState {
        let n = self.original_agents();
        AtlState {
            base: index >> n,
            permitted: (index & ((1 << n) - 1)) as u32,
        }
    }

    pub fn index(&self, st: AtlState) -> usize {
        (st.base << self.original_agents()) | st.permitted as usize
    }

    pub fn states(&self) -> impl Iterator<Item = AtlState> + '_ {
        (0..self.num_states()).map(|i| self.state(i))
    }

    pub fn state_name(&self, st: AtlState) -> String {
        let members: Vec<&str> = (0..self.original_agents())
            .filter(|a| st.permitted >> a & 1 == 1)
            .map(|a| self.source.agents()[a].as_str())
            .collect();
        format!("{}|{{{}}}", self.source.states()[st.base], members.join(","))
    }

    /// Moves available to each agent at a state (Nature included).
    pub fn moves(&self, st: AtlState) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.original_agents())
            .map(|a| self.source.num_actions(st.base, a))
            .collect();
        if self.nature.is_some() {
            out.push(self.nature_moves);
        }
        out
    }

    /// The unique successor of `st` under a full move vector.
    pub fn next(&self, st: AtlState, moves: &[usize]) -> AtlState {
        let n = self.original_agents();
        let radices = self.moves(st);
        let mut code = 0;
        for a in 0..n {
            code = code * radices[a] + moves[a];
        }
        let options = &self.outcomes[st.base][code];
        let j = if self.nature.is_some() { moves[n] } else { 0 };
        let (target, permitted) = options[j % options.len()];
        AtlState {
            base: target,
            permitted,
        }
    }

    /// Whether a proposition (original or `d_a`) holds at a state.
    pub fn holds(&self, st: AtlState, atom: &AtlAtom) -> bool {
        match atom {
            AtlAtom::Prop(p) => self.source.valuation_ref(p).is_some_and(|s| s.contains(st.base)),
            AtlAtom::Permitted(a) => self.source.agent_index(a).is_some_and(|i| st.permitted >> i & 1 == 1),
        }
    }

    pub fn to_doc(&self) -> AtlModelDoc {
        let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for p in self.source.propositions() {
            let atom = AtlAtom::Prop(p.to_string());
            valuation.insert(
                p.to_string(),
                self.states()
                    .filter(|&s| self.holds(s, &atom))
                    .map(|s| self.state_name(s))
                    .collect(),
            );
        }
        for a in self.source.agents() {
            let atom = AtlAtom::Permitted(a.0.clone());
            valuation.insert(
                format!("d_{a}"),
                self.states()
                    .filter(|&s| self.holds(s, &atom))
                    .map(|s| self.state_name(s))
                    .collect(),
            );
        }
        let mut transitions = Vec::new();
        for st in self.states() {
            for mv in ProfileIter::new(self.moves(st)) {
                transitions.push(AtlTransitionDoc {
                    from: self.state_name(st),
                    moves: mv
                        .iter()
                        .enumerate()
                        .map(|(a, &i)| (self.agents[a].clone(), self.move_name(st, a, i)))
                        .collect(),
                    to: self.state_name(self.next(st, &mv)),
                });
            }
        }
        AtlModelDoc {
            schema: 1,
            agents: self.agents.clone(),
            nature: self.nature().map(str::to_string),
            states: self
                .states()
                .map(|s| AtlStateDoc {
                    name: self.state_name(s),
                    base: self.source.states()[s.base].clone(),
                    permitted: (0..self.original_agents())
                        .filter(|a| s.permitted >> a & 1 == 1)
                        .map(|a| self.source.agents()[a].clone())
                        .collect(),
                })
                .collect(),
            transitions,
            valuation,
        }
    }

    fn move_name(&self, st: AtlState, agent: usize, i: usize) -> String {
        if Some(agent) == self.nature {
            i.to_string()
        } else {
            self.source.actions(st.base, agent)[i].0.clone()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlModelDoc {
    pub schema: u32,
    pub agents: Vec<String>,
    pub nature: Option<String>,
    pub states: Vec<AtlStateDoc>,
    pub transitions: Vec<AtlTransitionDoc>,
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlStateDoc {
    pub name: String,
    pub base: StateId,
    pub permitted: Vec<AgentId>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlTransitionDoc {
    pub from: String,
    pub moves: BTreeMap<String, String>,
    pub to: String,
}

pub fn expand_model(m: &TransitionSystem) -> Result<AtlModel> {
    expand_model_with_cap(m, DEFAULT_AGENT_CAP)
}

pub fn expand_model_with_cap(m: &TransitionSystem, cap: usize) -> Result<AtlModel> {
    let n = m.num_agents();
    if n > cap || n >= 31 {
        return Err(Error::Capacity {
            what: "agents for ATL expansion",
            limit: cap.min(30) as u64,
            actual: n as u64,
        });
    }
    let mut outcomes = Vec::with_capacity(m.num_states());
    let mut widest = 1;
    for s in 0..m.num_states() {
        let radices: Vec<usize> = (0..n).map(|a| m.num_actions(s, a)).collect();
        let mut per_profile = Vec::new();
        for profile in ProfileIter::new(radices) {
            let permitted = (0..n)
                .filter(|&a| m.is_permitted(s, a, profile[a]))
                .fold(0u32, |acc, a| acc | 1 << a);
            let succ: Vec<(usize, u32)> = m.successors_of(s, &profile).iter().map(|t| (t, permitted)).collect();
            if succ.is_empty() {
                return Err(Error::MalformedProfile {
                    state: m.states()[s].0.clone(),
                    reason: "profile without successor; validate the model first".into(),
                });
            }
            widest = widest.max(succ.len());
            per_profile.push(succ);
        }
        outcomes.push(per_profile);
    }
    let mut agents: Vec<String> = m.agents().iter().map(|a| a.0.clone()).collect();
    let nature = (widest > 1).then(|| {
        let mut name = NATURE.to_string();
        while agents.contains(&name) {
            name.push('_');
        }
        agents.push(name);
        n
    });
    Ok(AtlModel {
        source: m.clone(),
        agents,
        nature,
        nature_moves: if nature.is_some() { widest } else { 1 },
        outcomes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtlAtom {
    Prop(String),
    /// `d_a`
    Permitted(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coalition {
    /// Every agent, Nature included.
    Grand,
    Agents(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtlFormula {
    Atom(AtlAtom),
    Not(Box<AtlFormula>),
    Or(Box<AtlFormula>, Box<AtlFormula>),
    And(Box<AtlFormula>, Box<AtlFormula>),
    Next(Coalition, Box<AtlFormula>),
    /// Outside the next-step fragment; rejected by [`eval_atl`].
    Until(Coalition, Box<AtlFormula>, Box<AtlFormula>),
    /// Outside the next-step fragment; rejected by [`eval_atl`].
    Globally(Coalition, Box<AtlFormula>),
}

impl AtlFormula {
    pub fn prop(p: &str) -> Self {
        AtlFormula::Atom(AtlAtom::Prop(p.to_string()))
    }

    pub fn permitted(a: &str) -> Self {
        AtlFormula::Atom(AtlAtom::Permitted(a.to_string()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        AtlFormula::Not(Box::new(self))
    }

    pub fn or(self, other: Self) -> Self {
        AtlFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Self) -> Self {
        AtlFormula::And(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }

    pub fn next(c: Coalition, body: Self) -> Self {
        AtlFormula::Next(c, Box::new(body))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coalition::Grand => f.write_str("<<*>>"),
            Coalition::Agents(a) => write!(f, "<<{}>>", a.join(",")),
        }
    }
}

impl fmt::Display for AtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtlFormula::Atom(AtlAtom::Prop(p)) => f.write_str(p),
            AtlFormula::Atom(AtlAtom::Permitted(a)) => write!(f, "d_{a}"),
            AtlFormula::Not(x) => write!(f, "!{x}"),
            AtlFormula::Or(l, r) => write!(f, "({l} | {r})"),
            AtlFormula::And(l, r) => write!(f, "({l} & {r})"),
            AtlFormula::Next(c, x) => write!(f, "{c}X {x}"),
            AtlFormula::Until(c, l, r) => write!(f, "{c}({l} U {r})"),
            AtlFormula::Globally(c, x) => write!(f, "{c}G {x}"),
        }
    }
}

pub fn translate_formula(f: &Formula) -> AtlFormula {
    match f {
        Formula::Prop(p) => AtlFormula::prop(p),
        Formula::Not(x) => translate_formula(x).not(),
        Formula::Or(l, r) => translate_formula(l).or(translate_formula(r)),
        Formula::Modal(kind, agent, body) => {
            let body = translate_formula(body);
            let d = AtlFormula::permitted(agent.as_str());
            let own = Coalition::Agents(vec![agent.0.clone()]);
            match kind {
                Modality::WA => AtlFormula::next(Coalition::Grand, d.and(body)),
                Modality::WE => AtlFormula::next(own, d.and(body)),
                Modality::SE => AtlFormula::next(own, body.implies(d).not()).not(),
                Modality::SA => AtlFormula::next(Coalition::Grand, body.implies(d).not()).not(),
            }
        }
    }
}

/// Whether `f` holds at `st`.
pub fn eval_atl(am: &AtlModel, st: AtlState, f: &AtlFormula) -> Result<bool> {
    Ok(eval_all(am, f)?[am.index(st)])
}

/// Truth value of `f` at every expanded state, indexed by [`AtlModel::index`].
pub fn eval_all(am: &AtlModel, f: &AtlFormula) -> Result<Vec<bool>> {
    Ok(match f {
        AtlFormula::Atom(atom) => am.states().map(|s| am.holds(s, atom)).collect(),
        AtlFormula::Not(x) => eval_all(am, x)?.into_iter().map(|b| !b).collect(),
        AtlFormula::Or(l, r) => zip(eval_all(am, l)?, eval_all(am, r)?, |a, b| a || b),
        AtlFormula::And(l, r) => zip(eval_all(am, l)?, eval_all(am, r)?, |a, b| a && b),
        AtlFormula::Next(c, body) => {
            let body = eval_all(am, body)?;
            let members = coalition_members(am, c)?;
            am.states().map(|st| can_enforce(am, st, &members, &body)).collect()
        }
        AtlFormula::Until(..) | AtlFormula::Globally(..) => return Err(Error::NotInFragment(f.to_string())),
    })
}

fn zip(l: Vec<bool>, r: Vec<bool>, op: fn(bool, bool) -> bool) -> Vec<bool> {
    l.into_iter().zip(r).map(|(a, b)| op(a, b)).collect()
}

fn coalition_members(am: &AtlModel, c: &Coalition) -> Result<Vec<bool>> {
    let mut members = vec![false; am.agents().len()];
    match c {
        Coalition::Grand => members.iter_mut().for_each(|m| *m = true),
        Coalition::Agents(names) => {
            for name in names {
                let i = am
                    .agents()
                    .iter()
                    .position(|a| a == name)
                    .ok_or_else(|| Error::UnknownAgent(name.clone()))?;
                members[i] = true;
            }
        }
    }
    Ok(members)
}

/// `∃` moves of the coalition `∀` moves of the rest: successor in `body`.
fn can_enforce(am: &AtlModel, st: AtlState, members: &[bool], body: &[bool]) -> bool {
    let radices = am.moves(st);
    let ours: Vec<usize> = radices
        .iter()
        .zip(members)
        .map(|(&r, &m)| if m { r } else { 1 })
        .collect();
    let theirs: Vec<usize> = radices
        .iter()
        .zip(members)
        .map(|(&r, &m)| if m { 1 } else { r })
        .collect();
    ProfileIter::new(ours).any(|own| {
        ProfileIter::new(theirs.clone()).all(|other| {
            let full: Vec<usize> = own.iter().zip(&other).map(|(a, b)| a + b).collect();
            body[am.index(am.next(st, &full))]
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TranslationVerdict {
    Agree {
        states: usize,
    },
    Mismatch {
        state: StateId,
        permitted: Vec<AgentId>,
        model_check: bool,
        atl: bool,
    },
}

impl TranslationVerdict {
    pub fn agrees(&self) -> bool {
        matches!(self, TranslationVerdict::Agree { .. })
    }
}

/// Compares `model_check(m, φ)` with the ATL evaluation of `translate(φ)` at
/// every copy of every state.
pub fn verify_translation(m: &TransitionSystem, f: &Formula) -> Result<TranslationVerdict> {
    let am = expand_model(m)?;
    verify_translation_on(&am, f)
}

pub fn verify_translation_on(am: &AtlModel, f: &Formula) -> Result<TranslationVerdict> {
    let m = am.source();
    let expected = model_check(m, f)?;
    let actual = eval_all(am, &translate_formula(f))?;
    for st in am.states() {
        let atl = actual[am.index(st)];
        if atl != expected.contains(st.base) {
            return Ok(TranslationVerdict::Mismatch {
                state: m.states()[st.base].clone(),
                permitted: (0..m.num_agents())
                    .filter(|a| st.permitted >> a & 1 == 1)
                    .map(|a| m.agents()[a].clone())
                    .collect(),
                model_check: expected.contains(st.base),
                atl,
            });
        }
    }
    Ok(TranslationVerdict::Agree {
        states: am.num_states(),
    })
}

/// Whether every copy `⟨s, 𝒟⟩` of each base state agrees on `f`.
pub fn is_permission_independent(am: &AtlModel, f: &AtlFormula) -> Result<bool> {
    let values = eval_all(am, f)?;
    let copies = 1usize << am.source().num_agents();
    Ok(values.chunks(copies).all(|c| c.iter().all(|&v| v == c[0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load_fixture;
    use crate::formula::parse;
    use crate::generators::{random_model, FormulaGen, GenParams};

    fn fig1() -> TransitionSystem {
        load_fixture("fig1-wa").unwrap().model().clone()
    }

    #[test]
    fn fig1_expansion() {
        let m = fig1();
        assert!(m.is_deterministic());
        let am = expand_model(&m).unwrap();
        assert_eq!(am.num_states(), 12);
        assert_eq!(am.nature(), None);
        let u = AtlState {
            base: m.state_index("u").unwrap(),
            permitted: 0b11,
        };
        assert!(am.holds(u, &AtlAtom::Permitted("a".into())));
        assert!(am.holds(u, &AtlAtom::Prop("p".into())));
        let f = translate_formula(&parse("WA[a] p").unwrap());
        for mask in 0..4 {
            let s = AtlState {
                base: 0,
                permitted: mask,
            };
            assert!(eval_atl(&am, s, &f).unwrap());
        }
        assert!(verify_translation(&m, &parse("WA[a] p").unwrap()).unwrap().agrees());
    }

    #[test]
    fn nature_added_for_branching() {
        let fx = load_fixture("fig3-se").unwrap();
        let m = fx.model();
        let am = expand_model(m).unwrap();
        assert_eq!(am.nature(), Some(NATURE));
        assert_eq!(am.nature_moves(), 2);
        for st in am.states() {
            for mv in ProfileIter::new(am.moves(st)) {
                let _ = am.next(st, &mv);
            }
        }
    }

    #[test]
    fn translation_shapes() {
        assert_eq!(
            translate_formula(&parse("WA[a]p").unwrap()).to_string(),
            "<<*>>X (d_a & p)"
        );
        assert_eq!(translate_formula(&parse("p").unwrap()), AtlFormula::prop("p"));
        assert_eq!(
            translate_formula(&parse("SE[b]!p").unwrap()).to_string(),
            "!<<b>>X !(!!p | d_b)"
        );
    }

    #[test]
    fn grand_and_empty_coalitions() {
        let m = fig1();
        let am = expand_model(&m).unwrap();
        let top = AtlFormula::prop("p").or(AtlFormula::prop("p").not());
        for st in am.states() {
            assert!(eval_atl(&am, st, &AtlFormula::next(Coalition::Grand, top.clone())).unwrap());
        }
        // ⟨⟨∅⟩⟩X p: all successors satisfy p; only u (self loop) qualifies.
        let none = AtlFormula::next(Coalition::Agents(vec![]), AtlFormula::prop("p"));
        let vals = eval_all(&am, &none).unwrap();
        for st in am.states() {
            assert_eq!(vals[am.index(st)], st.base == 2);
        }
        let g = AtlFormula::Globally(Coalition::Grand, Box::new(top));
        assert!(matches!(
            eval_atl(&am, AtlState { base: 0, permitted: 0 }, &g),
            Err(Error::NotInFragment(_))
        ));
    }

    #[test]
    fn random_models_agree() {
        for seed in 0..40 {
            let m = random_model(&GenParams {
                seed,
                num_states: 3,
                ..GenParams::default()
            })
            .unwrap();
            let am = expand_model(&m).unwrap();
            let mut gen = FormulaGen::for_model(seed, &m);
            for _ in 0..10 {
                let f = gen.formula(3);
                assert!(verify_translation_on(&am, &f).unwrap().agrees(), "seed {seed}: {f}");
                assert!(is_permission_independent(&am, &translate_formula(&f)).unwrap());
            }
            let f = parse("SE[a](p | WE[b] q)").unwrap();
            assert!(verify_translation_on(&am, &f).unwrap().agrees());
        }
    }

    #[test]
    fn agent_cap() {
        let m = random_model(&GenParams {
            num_agents: 7,
            max_actions: 1,
            ..GenParams::default()
        })
        .unwrap();
        assert!(matches!(expand_model(&m), Err(Error::Capacity { .. })));
    }
}
