//! Multiagent transition systems: states, per-agent action sets, deontic
//! constraints, a nondeterministic mechanism and a valuation.
//!
//! A [`TransitionSystem`] is loaded leniently: dangling references and other
//! structural defects found while resolving names are recorded rather than
//! rejected, so that [`validate_model`] can report every problem of a
//! candidate structure at once. Only problems that make the structure
//! unrepresentable (duplicate or empty identifiers, reserved names) fail
//! construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::truthset::TruthSet;

/// Proposition reserved for encoding the Boolean constants.
pub const RESERVED_PROPOSITION: &str = "__top";

/// Default bound on the number of action profiles enumerated per state.
pub const DEFAULT_PROFILE_CAP: u64 = 1_000_000;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl PartialEq<&str> for $name {
            fn eq(&self, other: &&str) -> bool {
                self.0 == *other
            }
        }
    };
}

name_type!(
    /// Name of an agent.
    AgentId
);
name_type!(
    /// Name of a state.
    StateId
);
name_type!(
    /// Name of an action. Actions are scoped to one (state, agent) pair: the
    /// same token in two states denotes unrelated actions.
    ActionId
);

/// A choice of one action per agent, keyed by agent name.
pub type ActionProfile = BTreeMap<AgentId, ActionId>;

/// One edge `(δ, t)` of the mechanism relation of some state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    /// Action index per agent, in the model's agent order.
    pub profile: Box<[usize]>,
    pub target: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Local {
    actions: Vec<ActionId>,
    permitted: Vec<bool>,
}

/// Serialized form of a transition system.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub actions: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub permitted: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: String,
    pub profile: BTreeMap<String, String>,
    pub to: String,
}

/// A violated well-formedness condition, with its locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyActionSet {
        state: StateId,
        agent: AgentId,
    },
    EmptyPermittedSet {
        state: StateId,
        agent: AgentId,
    },
    PermittedNotAvailable {
        state: StateId,
        agent: AgentId,
        action: ActionId,
    },
    DuplicateAction {
        state: StateId,
        agent: AgentId,
        action: ActionId,
    },
    MissingProfile {
        state: StateId,
        profile: ActionProfile,
    },
    ProfileCapExceeded {
        state: StateId,
        profiles: u64,
        cap: u64,
    },
    DanglingTransition {
        from: String,
        to: String,
    },
    MalformedProfile {
        state: StateId,
        reason: String,
    },
    UnknownValuationState {
        proposition: String,
        state: String,
    },
    UnknownLocus {
        table: &'static str,
        state: String,
        agent: Option<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyActionSet { state, agent } => {
                write!(f, "empty action set at ({state},{agent})")
            }
            Violation::EmptyPermittedSet { state, agent } => {
                write!(f, "empty permitted set at ({state},{agent})")
            }
            Violation::PermittedNotAvailable { state, agent, action } => {
                write!(f, "permitted action {action} not available at ({state},{agent})")
            }
            Violation::DuplicateAction { state, agent, action } => {
                write!(f, "duplicate action {action} at ({state},{agent})")
            }
            Violation::MissingProfile { state, profile } => {
                write!(f, "continuity violated at {state}: no successor for profile (")?;
                for (k, (agent, action)) in profile.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{agent}={action}")?;
                }
                f.write_str(")")
            }
            Violation::ProfileCapExceeded { state, profiles, cap } => write!(
                f,
                "state {state} has {profiles} action profiles, above the enumeration cap {cap}"
            ),
            Violation::DanglingTransition { from, to } => {
                write!(f, "transition {from} -> {to} references an unknown state")
            }
            Violation::MalformedProfile { state, reason } => {
                write!(f, "malformed profile at {state}: {reason}")
            }
            Violation::UnknownValuationState { proposition, state } => {
                write!(f, "valuation of {proposition} mentions unknown state {state}")
            }
            Violation::UnknownLocus { table, state, agent } => match agent {
                Some(agent) => write!(f, "{table} entry for unknown locus ({state},{agent})"),
                None => write!(f, "{table} entry for unknown state {state}"),
            },
        }
    }
}

/// Result of [`validate_model`]; empty iff the model is well formed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A finite multiagent transition system.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    agents: Vec<AgentId>,
    states: Vec<StateId>,
    agent_index: HashMap<AgentId, usize>,
    state_index: HashMap<StateId, usize>,
    // [state][agent]
    locals: Vec<Vec<Local>>,
    // [state]
    mechanism: Vec<Vec<Transition>>,
    valuation: BTreeMap<String, TruthSet>,
    defects: Vec<Violation>,
}

/// Structural equality over the model's components, ignoring index tables.
impl PartialEq for TransitionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.agents == other.agents
            && self.states == other.states
            && self.locals == other.locals
            && self.mechanism == other.mechanism
            && self.valuation == other.valuation
            && self.defects == other.defects
    }
}

impl Eq for TransitionSystem {}

fn index_names<T>(kind: &'static str, names: &[String]) -> Result<(Vec<T>, HashMap<T, usize>)>
where
    T: From<String> + Clone + Eq + std::hash::Hash,
{
    let mut list = Vec::with_capacity(names.len());
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::EmptyName(kind));
        }
        let id = T::from(name.clone());
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::Duplicate {
                kind,
                name: name.clone(),
            });
        }
        list.push(id);
    }
    Ok((list, index))
}

impl TransitionSystem {
    /// Resolves a serialized model. See the module docs for which problems are
    /// recorded as violations instead of being rejected.
    pub fn from_doc(doc: &ModelDoc) -> Result<Self> {
        let (agents, agent_index) = index_names::<AgentId>("agent", &doc.agents)?;
        let (states, state_index) = index_names::<StateId>("state", &doc.states)?;
        let mut defects = Vec::new();
        let mut locals = vec![vec![Local::default(); agents.len()]; states.len()];

        for (state, per_agent) in &doc.actions {
            let Some(&s) = state_index.get(state.as_str()) else {
                defects.push(Violation::UnknownLocus {
                    table: "actions",
                    state: state.clone(),
                    agent: None,
                });
                continue;
            };
            for (agent, actions) in per_agent {
                let Some(&a) = agent_index.get(agent.as_str()) else {
                    defects.push(Violation::UnknownLocus {
                        table: "actions",
                        state: state.clone(),
                        agent: Some(agent.clone()),
                    });
                    continue;
                };
                let local = &mut locals[s][a];
                for action in actions {
                    let id = ActionId::from(action.as_str());
                    if local.actions.contains(&id) {
                        defects.push(Violation::DuplicateAction {
                            state: states[s].clone(),
                            agent: agents[a].clone(),
                            action: id,
                        });
                        continue;
                    }
                    local.actions.push(id);
                    local.permitted.push(false);
                }
            }
        }

        for (state, per_agent) in &doc.permitted {
            let Some(&s) = state_index.get(state.as_str()) else {
                defects.push(Violation::UnknownLocus {
                    table: "permitted",
                    state: state.clone(),
                    agent: None,
                });
                continue;
            };
            for (agent, actions) in per_agent {
                let Some(&a) = agent_index.get(agent.as_str()) else {
                    defects.push(Violation::UnknownLocus {
                        table: "permitted",
                        state: state.clone(),
                        agent: Some(agent.clone()),
                    });
                    continue;
                };
                let local = &mut locals[s][a];
                for action in actions {
                    match local.actions.iter().position(|x| x.as_str() == action) {
                        Some(i) => local.permitted[i] = true,
                        None => defects.push(Violation::PermittedNotAvailable {
                            state: states[s].clone(),
                            agent: agents[a].clone(),
                            action: ActionId::from(action.as_str()),
                        }),
                    }
                }
            }
        }

        let mut mechanism = vec![Vec::new(); states.len()];
        let mut seen: HashSet<(usize, Transition)> = HashSet::new();
        for tr in &doc.transitions {
            let (Some(&s), Some(&t)) = (state_index.get(tr.from.as_str()), state_index.get(tr.to.as_str())) else {
                defects.push(Violation::DanglingTransition {
                    from: tr.from.clone(),
                    to: tr.to.clone(),
                });
                continue;
            };
            match resolve_profile(&agents, &agent_index, &locals[s], &tr.profile) {
                Ok(profile) => {
                    let transition = Transition { profile, target: t };
                    // The mechanism is a relation; repeated edges collapse.
                    if seen.insert((s, transition.clone())) {
                        mechanism[s].push(transition);
                    }
                }
                Err(reason) => defects.push(Violation::MalformedProfile {
                    state: states[s].clone(),
                    reason,
                }),
            }
        }

        let mut valuation = BTreeMap::new();
        for (prop, members) in &doc.valuation {
            if prop == RESERVED_PROPOSITION {
                return Err(Error::ReservedProposition(prop.clone()));
            }
            let mut set = TruthSet::empty(states.len());
            for member in members {
                match state_index.get(member.as_str()) {
                    Some(&s) => set.insert(s),
                    None => defects.push(Violation::UnknownValuationState {
                        proposition: prop.clone(),
                        state: member.clone(),
                    }),
                }
            }
            valuation.insert(prop.clone(), set);
        }

        Ok(TransitionSystem {
            agents,
            states,
            agent_index,
            state_index,
            locals,
            mechanism,
            valuation,
            defects,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    pub fn to_doc(&self) -> ModelDoc {
        let mut doc = ModelDoc {
            agents: self.agents.iter().map(|a| a.0.clone()).collect(),
            states: self.states.iter().map(|s| s.0.clone()).collect(),
            ..ModelDoc::default()
        };
        for (s, state) in self.states.iter().enumerate() {
            let mut actions = BTreeMap::new();
            let mut permitted = BTreeMap::new();
            for (a, agent) in self.agents.iter().enumerate() {
                let local = &self.locals[s][a];
                actions.insert(agent.0.clone(), local.actions.iter().map(|i| i.0.clone()).collect());
                permitted.insert(
                    agent.0.clone(),
                    self.permitted_actions(s, a).map(|i| i.0.clone()).collect(),
                );
            }
            doc.actions.insert(state.0.clone(), actions);
            doc.permitted.insert(state.0.clone(), permitted);
            for tr in &self.mechanism[s] {
                doc.transitions.push(TransitionDoc {
                    from: state.0.clone(),
                    profile: self
                        .agents
                        .iter()
                        .enumerate()
                        .map(|(a, agent)| (agent.0.clone(), self.locals[s][a].actions[tr.profile[a]].0.clone()))
                        .collect(),
                    to: self.states[tr.target].0.clone(),
                });
            }
        }
        for (prop, set) in &self.valuation {
            doc.valuation
                .insert(prop.clone(), set.iter().map(|s| self.states[s].0.clone()).collect());
        }
        doc
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("model documents always serialize")
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agent_index.get(name).copied()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn require_agent(&self, name: &str) -> Result<usize> {
        self.agent_index(name)
            .ok_or_else(|| Error::UnknownAgent(name.to_owned()))
    }

    pub fn require_state(&self, name: &str) -> Result<usize> {
        self.state_index(name)
            .ok_or_else(|| Error::UnknownState(name.to_owned()))
    }

    /// Index of action `name` in `Δ_a^s`.
    pub fn require_action(&self, s: usize, a: usize, name: &str) -> Result<usize> {
        self.locals[s][a]
            .actions
            .iter()
            .position(|x| x.as_str() == name)
            .ok_or_else(|| Error::UnknownAction {
                state: self.states[s].0.clone(),
                agent: self.agents[a].0.clone(),
                action: name.to_owned(),
            })
    }

    /// `Δ_a^s`.
    pub fn actions(&self, s: usize, a: usize) -> &[ActionId] {
        &self.locals[s][a].actions
    }

    pub fn num_actions(&self, s: usize, a: usize) -> usize {
        self.locals[s][a].actions.len()
    }

    pub fn is_permitted(&self, s: usize, a: usize, i: usize) -> bool {
        self.locals[s][a].permitted.get(i).copied().unwrap_or(false)
    }

    /// Permission mask aligned with [`Self::actions`].
    pub fn permitted_mask(&self, s: usize, a: usize) -> &[bool] {
        &self.locals[s][a].permitted
    }

    /// `D_a^s`.
    pub fn permitted_actions(&self, s: usize, a: usize) -> impl Iterator<Item = &ActionId> + '_ {
        let local = &self.locals[s][a];
        local
            .actions
            .iter()
            .zip(&local.permitted)
            .filter_map(|(action, &ok)| ok.then_some(action))
    }

    /// `M_s`.
    pub fn transitions(&self, s: usize) -> &[Transition] {
        &self.mechanism[s]
    }

    /// `π(p)`; the empty set for propositions the valuation does not mention.
    pub fn valuation(&self, prop: &str) -> TruthSet {
        self.valuation
            .get(prop)
            .cloned()
            .unwrap_or_else(|| TruthSet::empty(self.states.len()))
    }

    pub fn valuation_ref(&self, prop: &str) -> Option<&TruthSet> {
        self.valuation.get(prop)
    }

    pub fn propositions(&self) -> impl Iterator<Item = &str> + '_ {
        self.valuation.keys().map(String::as_str)
    }

    /// `|M| = Σ_s |M_s|`.
    pub fn mechanism_size(&self) -> usize {
        self.mechanism.iter().map(Vec::len).sum()
    }

    /// `|Δ| = Σ_a Σ_s |Δ_a^s|`, counting (state, agent, action) triples.
    pub fn action_space_size(&self) -> usize {
        self.locals
            .iter()
            .flat_map(|row| row.iter().map(|l| l.actions.len()))
            .sum()
    }

    /// True when every state has at most one successor per profile.
    pub fn is_deterministic(&self) -> bool {
        self.mechanism.iter().all(|edges| {
            let mut seen = HashSet::new();
            edges.iter().all(|tr| seen.insert(&tr.profile))
        })
    }

    pub fn all_states(&self) -> TruthSet {
        TruthSet::full(self.states.len())
    }

    /// State names of a truth set, in model order.
    pub fn state_names(&self, set: &TruthSet) -> Vec<StateId> {
        set.iter().map(|s| self.states[s].clone()).collect()
    }

    /// Truth set from state names.
    pub fn truth_set<'n, I>(&self, names: I) -> Result<TruthSet>
    where
        I: IntoIterator<Item = &'n str>,
    {
        let mut set = TruthSet::empty(self.states.len());
        for name in names {
            set.insert(self.require_state(name)?);
        }
        Ok(set)
    }

    pub fn profile_names(&self, s: usize, profile: &[usize]) -> ActionProfile {
        self.agents
            .iter()
            .enumerate()
            .map(|(a, agent)| (agent.clone(), self.locals[s][a].actions[profile[a]].clone()))
            .collect()
    }

    /// Resolves a named profile against `Δ^s`.
    pub fn resolve_profile(&self, s: usize, profile: &ActionProfile) -> Result<Box<[usize]>> {
        let named: BTreeMap<String, String> = profile.iter().map(|(a, i)| (a.0.clone(), i.0.clone())).collect();
        resolve_profile(&self.agents, &self.agent_index, &self.locals[s], &named).map_err(|reason| {
            Error::MalformedProfile {
                state: self.states[s].0.clone(),
                reason,
            }
        })
    }

    /// Number of profiles in `Π_a Δ_a^s`, saturating.
    pub fn profile_count(&self, s: usize) -> u64 {
        self.locals[s]
            .iter()
            .fold(1u64, |acc, l| acc.saturating_mul(l.actions.len() as u64))
    }

    /// Successors of state `s` under a resolved profile, as a truth set.
    pub fn successors_of(&self, s: usize, profile: &[usize]) -> TruthSet {
        let mut out = TruthSet::empty(self.states.len());
        for tr in &self.mechanism[s] {
            if *tr.profile == *profile {
                out.insert(tr.target);
            }
        }
        out
    }

    /// Mechanism entries of `s` whose profile assigns action `i` to agent `a`.
    pub fn entries_with_action(&self, s: usize, a: usize, i: usize) -> impl Iterator<Item = &Transition> + '_ {
        self.mechanism[s].iter().filter(move |tr| tr.profile[a] == i)
    }

    pub(crate) fn defects(&self) -> &[Violation] {
        &self.defects
    }
}

fn resolve_profile(
    agents: &[AgentId],
    agent_index: &HashMap<AgentId, usize>,
    locals: &[Local],
    profile: &BTreeMap<String, String>,
) -> std::result::Result<Box<[usize]>, String> {
    let mut resolved = vec![usize::MAX; agents.len()];
    for (agent, action) in profile {
        let Some(&a) = agent_index.get(agent.as_str()) else {
            return Err(format!("unknown agent {agent}"));
        };
        match locals[a].actions.iter().position(|x| x.as_str() == action) {
            Some(i) => resolved[a] = i,
            None => return Err(format!("action {action} is not available to {agent}")),
        }
    }
    if let Some(a) = resolved.iter().position(|&i| i == usize::MAX) {
        return Err(format!("no action chosen for agent {}", agents[a]));
    }
    Ok(resolved.into_boxed_slice())
}

/// Options for [`validate_model_with`].
#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// Largest per-state profile product that continuity checking enumerates.
    pub profile_cap: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            profile_cap: DEFAULT_PROFILE_CAP,
        }
    }
}

/// Checks every well-formedness condition of a transition system.
pub fn validate_model(m: &TransitionSystem) -> ValidationReport {
    validate_model_with(m, ValidateOptions::default())
}

pub fn validate_model_with(m: &TransitionSystem, opts: ValidateOptions) -> ValidationReport {
    let mut violations = m.defects().to_vec();
    for s in 0..m.num_states() {
        let mut enumerable = true;
        for a in 0..m.num_agents() {
            let local = &m.locals[s][a];
            if local.actions.is_empty() {
                violations.push(Violation::EmptyActionSet {
                    state: m.states[s].clone(),
                    agent: m.agents[a].clone(),
                });
                enumerable = false;
            }
            if !local.permitted.iter().any(|&p| p) {
                violations.push(Violation::EmptyPermittedSet {
                    state: m.states[s].clone(),
                    agent: m.agents[a].clone(),
                });
            }
        }
        if !enumerable {
            continue;
        }
        let count = m.profile_count(s);
        if count > opts.profile_cap {
            violations.push(Violation::ProfileCapExceeded {
                state: m.states[s].clone(),
                profiles: count,
                cap: opts.profile_cap,
            });
            continue;
        }
        let covered: HashSet<&[usize]> = m.mechanism[s].iter().map(|tr| &*tr.profile).collect();
        let radices: Vec<usize> = (0..m.num_agents()).map(|a| m.num_actions(s, a)).collect();
        for profile in ProfileIter::new(radices) {
            if !covered.contains(profile.as_slice()) {
                violations.push(Violation::MissingProfile {
                    state: m.states[s].clone(),
                    profile: m.profile_names(s, &profile),
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Odometer over the cartesian product `Π_a {0..radix_a}`, last agent fastest.
#[derive(Clone, Debug)]
pub struct ProfileIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(radices: Vec<usize>) -> Self {
        let next = if radices.iter().all(|&r| r > 0) {
            Some(vec![0; radices.len()])
        } else {
            None
        };
        ProfileIter { radices, next }
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.radices[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(current)
    }
}

/// `{ t | (δ, t) ∈ M_s }` for a named state and profile.
pub fn successors(m: &TransitionSystem, s: &str, profile: &ActionProfile) -> Result<Vec<StateId>> {
    let si = m.require_state(s)?;
    let resolved = m.resolve_profile(si, profile)?;
    Ok(m.state_names(&m.successors_of(si, &resolved)))
}

/// Mechanism entries of `s` whose profile assigns action `i` to agent `a`.
pub fn profiles_with_action(m: &TransitionSystem, s: &str, a: &str, i: &str) -> Result<Vec<(ActionProfile, StateId)>> {
    let si = m.require_state(s)?;
    let ai = m.require_agent(a)?;
    let ii = m.require_action(si, ai, i)?;
    Ok(m.entries_with_action(si, ai, ii)
        .map(|tr| (m.profile_names(si, &tr.profile), m.states[tr.target].clone()))
        .collect())
}

/// Programmatic construction of a [`ModelDoc`].
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    doc: ModelDoc,
}

impl ModelBuilder {
    pub fn new<A, S>(agents: A, states: S) -> Self
    where
        A: IntoIterator,
        A::Item: Into<String>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        ModelBuilder {
            doc: ModelDoc {
                agents: agents.into_iter().map(Into::into).collect(),
                states: states.into_iter().map(Into::into).collect(),
                ..ModelDoc::default()
            },
        }
    }

    /// Declares `Δ_agent^state`; `permitted` lists `D_agent^state`.
    pub fn actions(mut self, state: &str, agent: &str, actions: &[&str], permitted: &[&str]) -> Self {
        self.doc
            .actions
            .entry(state.to_owned())
            .or_default()
            .insert(agent.to_owned(), actions.iter().map(|x| x.to_string()).collect());
        self.doc
            .permitted
            .entry(state.to_owned())
            .or_default()
            .insert(agent.to_owned(), permitted.iter().map(|x| x.to_string()).collect());
        self
    }

    /// Declares every action permitted.
    pub fn all_permitted(self, state: &str, agent: &str, actions: &[&str]) -> Self {
        self.actions(state, agent, actions, actions)
    }

    pub fn transition(mut self, from: &str, profile: &[(&str, &str)], to: &str) -> Self {
        self.doc.transitions.push(TransitionDoc {
            from: from.to_owned(),
            profile: profile.iter().map(|(a, i)| (a.to_string(), i.to_string())).collect(),
            to: to.to_owned(),
        });
        self
    }

    pub fn valuation(mut self, prop: &str, states: &[&str]) -> Self {
        self.doc
            .valuation
            .insert(prop.to_owned(), states.iter().map(|x| x.to_string()).collect());
        self
    }

    pub fn doc(&self) -> &ModelDoc {
        &self.doc
    }

    pub fn build(self) -> Result<TransitionSystem> {
        TransitionSystem::from_doc(&self.doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(missing_last: bool) -> TransitionSystem {
        let mut b = ModelBuilder::new(["a", "b"], ["s"])
            .all_permitted("s", "a", &["1", "2"])
            .all_permitted("s", "b", &["1", "2"]);
        for (i, j) in [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")] {
            if missing_last && (i, j) == ("2", "2") {
                continue;
            }
            b = b.transition("s", &[("a", i), ("b", j)], "s");
        }
        b.build().unwrap()
    }

    #[test]
    fn complete_product_is_valid() {
        assert!(validate_model(&two_by_two(false)).is_valid());
    }

    #[test]
    fn missing_profile_is_reported_once() {
        let report = validate_model(&two_by_two(true));
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::MissingProfile { state, profile } => {
                assert_eq!(state.as_str(), "s");
                assert_eq!(profile[&AgentId::from("a")].as_str(), "2");
                assert_eq!(profile[&AgentId::from("b")].as_str(), "2");
            }
            other => panic!("unexpected violation {other}"),
        }
    }

    #[test]
    fn empty_permitted_set_is_reported() {
        let m = ModelBuilder::new(["a"], ["s"])
            .actions("s", "a", &["1"], &[])
            .transition("s", &[("a", "1")], "s")
            .build()
            .unwrap();
        let report = validate_model(&m);
        let messages: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert_eq!(messages, vec!["empty permitted set at (s,a)".to_owned()]);
    }

    #[test]
    fn empty_state_set_is_valid() {
        let m = ModelBuilder::new(["a"], Vec::<String>::new()).build().unwrap();
        assert!(validate_model(&m).is_valid());
        assert!(m.all_states().is_empty());
    }

    #[test]
    fn dangling_references_are_violations() {
        let m = ModelBuilder::new(["a"], ["s"])
            .all_permitted("s", "a", &["1"])
            .actions("s", "a", &["1"], &["1", "9"])
            .transition("s", &[("a", "1")], "nowhere")
            .transition("s", &[("a", "7")], "s")
            .valuation("p", &["ghost"])
            .build()
            .unwrap();
        let report = validate_model(&m);
        let kinds: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(kinds.iter().any(|k| k.contains("permitted action 9")), "{kinds:?}");
        assert!(kinds.iter().any(|k| k.contains("unknown state")), "{kinds:?}");
        assert!(kinds.iter().any(|k| k.contains("malformed profile")), "{kinds:?}");
        assert!(kinds.iter().any(|k| k.contains("ghost")), "{kinds:?}");
        // s has no usable edge left, so continuity fails as well.
        assert!(kinds.iter().any(|k| k.contains("continuity")), "{kinds:?}");
    }

    #[test]
    fn profile_cap_guards_enumeration() {
        let m = two_by_two(false);
        let report = validate_model_with(&m, ValidateOptions { profile_cap: 3 });
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::ProfileCapExceeded {
                profiles: 4,
                cap: 3,
                ..
            }]
        ));
    }

    #[test]
    fn duplicate_ids_fail_construction() {
        let err = ModelBuilder::new(["a", "a"], ["s"]).build().unwrap_err();
        assert!(matches!(err, Error::Duplicate { kind: "agent", .. }));
        let err = ModelBuilder::new(["a"], ["s"])
            .valuation(RESERVED_PROPOSITION, &["s"])
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::ReservedProposition(_)));
    }

    #[test]
    fn odometer_enumerates_product() {
        let all: Vec<Vec<usize>> = ProfileIter::new(vec![2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(ProfileIter::new(vec![]).count(), 1);
        assert_eq!(ProfileIter::new(vec![2, 0]).count(), 0);
    }

    #[test]
    fn profiles_with_action_counts_entries() {
        // k = 2 successors per profile, n = 3 counter-actions for b.
        let mut b = ModelBuilder::new(["a", "b"], ["s", "t"])
            .all_permitted("s", "a", &["1", "2"])
            .all_permitted("s", "b", &["x", "y", "z"])
            .all_permitted("t", "a", &["1"])
            .all_permitted("t", "b", &["x"])
            .transition("t", &[("a", "1"), ("b", "x")], "t");
        for i in ["1", "2"] {
            for j in ["x", "y", "z"] {
                b = b
                    .transition("s", &[("a", i), ("b", j)], "s")
                    .transition("s", &[("a", i), ("b", j)], "t");
            }
        }
        let m = b.build().unwrap();
        assert!(validate_model(&m).is_valid());
        // Oracle: direct count over the declared edges.
        let expected = m
            .to_doc()
            .transitions
            .iter()
            .filter(|t| t.from == "s" && t.profile["a"] == "1")
            .count();
        assert_eq!(expected, 6);
        assert_eq!(profiles_with_action(&m, "s", "a", "1").unwrap().len(), expected);
        assert!(matches!(
            profiles_with_action(&m, "s", "a", "3"),
            Err(Error::UnknownAction { .. })
        ));
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let m = two_by_two(true);
        let back = TransitionSystem::from_json(&m.to_json_pretty()).unwrap();
        assert_eq!(m, back);
    }
}
