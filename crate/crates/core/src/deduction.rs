//! The Hilbert system: axiom schemas A1–A9, modus ponens and the three
//! modal rules IR2–IR4, plus semantic checks of all of them on finite models.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::checker::{model_check, CheckContext};
use crate::error::{Error, Result};
use crate::formula::{parse, Formula, Modality};
use crate::model::{AgentId, StateId, TransitionSystem};

/// Largest number of atoms [`is_tautology`] will tabulate.
pub const TAUTOLOGY_ATOM_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomSchema {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
}

impl AxiomSchema {
    pub const ALL: [AxiomSchema; 9] = [
        AxiomSchema::A1,
        AxiomSchema::A2,
        AxiomSchema::A3,
        AxiomSchema::A4,
        AxiomSchema::A5,
        AxiomSchema::A6,
        AxiomSchema::A7,
        AxiomSchema::A8,
        AxiomSchema::A9,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AxiomSchema::A1 => "A1",
            AxiomSchema::A2 => "A2",
            AxiomSchema::A3 => "A3",
            AxiomSchema::A4 => "A4",
            AxiomSchema::A5 => "A5",
            AxiomSchema::A6 => "A6",
            AxiomSchema::A7 => "A7",
            AxiomSchema::A8 => "A8",
            AxiomSchema::A9 => "A9",
        }
    }

    /// Metavariables the schema mentions.
    pub fn metavariables(self) -> &'static [&'static str] {
        match self {
            AxiomSchema::A1 | AxiomSchema::A2 | AxiomSchema::A3 | AxiomSchema::A4 => &["a"],
            AxiomSchema::A5 | AxiomSchema::A6 | AxiomSchema::A7 | AxiomSchema::A8 => &["a", "phi", "psi"],
            AxiomSchema::A9 => &["a", "b", "phi", "psi"],
        }
    }

    /// The schema with metavariables written as `a`, `b`, `φ`, `ψ`.
    pub fn template(self) -> &'static str {
        match self {
            AxiomSchema::A1 => "!WA[a] false",
            AxiomSchema::A2 => "WE[a] true",
            AxiomSchema::A3 => "SA[a] false",
            AxiomSchema::A4 => "SE[a] true -> SA[a] true",
            AxiomSchema::A5 => "WA[a](φ | ψ) -> WA[a] φ | WA[a] ψ",
            AxiomSchema::A6 => "SA[a] φ & SA[a] ψ -> SA[a](φ | ψ)",
            AxiomSchema::A7 => "WE[a] φ & !WE[a] ψ -> WA[a](φ & !ψ)",
            AxiomSchema::A8 => "!SE[a] φ & SE[a] ψ -> !SA[a](φ & !ψ)",
            AxiomSchema::A9 => "!WA[a] φ & SA[a] ψ -> !WA[b](φ & ψ) & SA[b](φ & ψ)",
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AxiomSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomSchema::ALL
            .into_iter()
            .find(|a| a.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown axiom `{s}`")))
    }
}

/// Values for the metavariables of a schema.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub a: Option<AgentId>,
    pub b: Option<AgentId>,
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
}

impl Bindings {
    pub fn agent(a: &str) -> Self {
        Bindings {
            a: Some(a.into()),
            ..Bindings::default()
        }
    }

    pub fn new(a: &str, phi: Formula, psi: Formula) -> Self {
        Bindings {
            a: Some(a.into()),
            b: None,
            phi: Some(phi),
            psi: Some(psi),
        }
    }

    pub fn with_b(mut self, b: &str) -> Self {
        self.b = Some(b.into());
        self
    }

    /// From the textual form used in derivation files: `a`/`b` name agents,
    /// `phi`/`psi` are formulas.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut out = Bindings::default();
        for (k, v) in map {
            match k.as_str() {
                "a" => out.a = Some(v.as_str().into()),
                "b" => out.b = Some(v.as_str().into()),
                "phi" => out.phi = Some(parse(v)?),
                "psi" => out.psi = Some(parse(v)?),
                other => return Err(Error::InvalidParams(format!("unknown metavariable `{other}`"))),
            }
        }
        Ok(out)
    }

    fn get_agent(&self, name: &str) -> Result<&str> {
        let slot = if name == "a" { &self.a } else { &self.b };
        slot.as_ref()
            .map(|a| a.as_str())
            .ok_or_else(|| Error::MissingBinding(name.to_string()))
    }

    fn get_formula(&self, name: &str) -> Result<Formula> {
        let slot = if name == "phi" { &self.phi } else { &self.psi };
        slot.clone().ok_or_else(|| Error::MissingBinding(name.to_string()))
    }
}

/// The schema instance for the given bindings, in core syntax.
pub fn instantiate_axiom(schema: AxiomSchema, b: &Bindings) -> Result<Formula> {
    use Formula as F;
    let a = b.get_agent("a")?;
    let formulas = || -> Result<(Formula, Formula)> { Ok((b.get_formula("phi")?, b.get_formula("psi")?)) };
    Ok(match schema {
        AxiomSchema::A1 => F::wa(a, F::bottom()).not(),
        AxiomSchema::A2 => F::we(a, F::top()),
        AxiomSchema::A3 => F::sa(a, F::bottom()),
        AxiomSchema::A4 => F::se(a, F::top()).implies(F::sa(a, F::top())),
        AxiomSchema::A5 => {
            let (phi, psi) = formulas()?;
            F::wa(a, phi.clone().or(psi.clone())).implies(F::wa(a, phi).or(F::wa(a, psi)))
        }
        AxiomSchema::A6 => {
            let (phi, psi) = formulas()?;
            F::sa(a, phi.clone())
                .and(F::sa(a, psi.clone()))
                .implies(F::sa(a, phi.or(psi)))
        }
        AxiomSchema::A7 => {
            let (phi, psi) = formulas()?;
            F::we(a, phi.clone())
                .and(F::we(a, psi.clone()).not())
                .implies(F::wa(a, phi.and(psi.not())))
        }
        AxiomSchema::A8 => {
            let (phi, psi) = formulas()?;
            F::se(a, phi.clone())
                .not()
                .and(F::se(a, psi.clone()))
                .implies(F::sa(a, phi.and(psi.not())).not())
        }
        AxiomSchema::A9 => {
            let bb = b.get_agent("b")?;
            let (phi, psi) = formulas()?;
            let both = phi.clone().and(psi.clone());
            F::wa(a, phi)
                .not()
                .and(F::sa(a, psi))
                .implies(F::wa(bb, both.clone()).not().and(F::sa(bb, both)))
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Validity {
    Valid,
    Counterexample { state: StateId },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Whether `f` holds at every state of `m`; otherwise the least-index state
/// where it fails.
pub fn check_validity(m: &TransitionSystem, f: &Formula) -> Result<Validity> {
    let set = model_check(m, f)?;
    Ok(match set.complement().iter().next() {
        None => Validity::Valid,
        Some(s) => Validity::Counterexample {
            state: m.states()[s].clone(),
        },
    })
}

/// A concrete application of one of the modal rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleInstance {
    /// `φ → ψ ⊢ WA_a φ → WA_a ψ`
    Ir2 { agent: AgentId, phi: Formula, psi: Formula },
    /// `φ → ψ ⊢ SA_a ψ → SA_a φ`
    Ir3 { agent: AgentId, phi: Formula, psi: Formula },
    /// `φ1 ∧ … ∧ φm → ¬ψ1 ∨ … ∨ ¬ψn ⊢ WE_a1 φ1 ∧ … → SE_b1 ψ1 ∨ …`,
    /// all agents distinct.
    Ir4 {
        weak: Vec<(AgentId, Formula)>,
        strong: Vec<(AgentId, Formula)>,
    },
}

impl RuleInstance {
    pub fn premise(&self) -> Formula {
        match self {
            RuleInstance::Ir2 { phi, psi, .. } | RuleInstance::Ir3 { phi, psi, .. } => phi.clone().implies(psi.clone()),
            RuleInstance::Ir4 { weak, strong } => ir4_premise(
                weak.iter().map(|(_, f)| f.clone()),
                strong.iter().map(|(_, f)| f.clone()),
            ),
        }
    }

    pub fn conclusion(&self) -> Formula {
        match self {
            RuleInstance::Ir2 { agent, phi, psi } => Formula::modal(Modality::WA, agent.clone(), phi.clone())
                .implies(Formula::modal(Modality::WA, agent.clone(), psi.clone())),
            RuleInstance::Ir3 { agent, phi, psi } => Formula::modal(Modality::SA, agent.clone(), psi.clone())
                .implies(Formula::modal(Modality::SA, agent.clone(), phi.clone())),
            RuleInstance::Ir4 { weak, strong } => ir4_conclusion(weak, strong),
        }
    }

    fn check_side_condition(&self) -> Result<()> {
        if let RuleInstance::Ir4 { weak, strong } = self {
            distinct_agents(weak.iter().chain(strong).map(|(a, _)| a)).map_err(Error::SideCondition)?;
        }
        Ok(())
    }
}

fn distinct_agents<'a>(agents: impl Iterator<Item = &'a AgentId>) -> std::result::Result<(), String> {
    let mut seen = Vec::new();
    for a in agents {
        if seen.contains(&a) {
            return Err(format!("agent `{a}` occurs twice"));
        }
        seen.push(a);
    }
    Ok(())
}

fn ir4_premise(phis: impl Iterator<Item = Formula>, psis: impl Iterator<Item = Formula>) -> Formula {
    Formula::conjunction(phis).implies(Formula::disjunction(psis.map(Formula::not)))
}

fn ir4_conclusion(weak: &[(AgentId, Formula)], strong: &[(AgentId, Formula)]) -> Formula {
    let lhs = weak
        .iter()
        .map(|(a, f)| Formula::modal(Modality::WE, a.clone(), f.clone()));
    let rhs = strong
        .iter()
        .map(|(b, f)| Formula::modal(Modality::SE, b.clone(), f.clone()));
    Formula::conjunction(lhs).implies(Formula::disjunction(rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RuleVerdict {
    /// The premise is valid in the model and so is the conclusion.
    Valid,
    /// The premise is not valid in the model; the rule says nothing here.
    PremiseNotValid { state: StateId },
    /// The premise is valid but the conclusion fails at `state`.
    Violated { state: StateId },
}

impl RuleVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, RuleVerdict::Violated { .. })
    }
}

/// Checks that the rule preserves validity in `m` for this instance.
pub fn check_rule_locally(m: &TransitionSystem, rule: &RuleInstance) -> Result<RuleVerdict> {
    rule.check_side_condition()?;
    if let Validity::Counterexample { state } = check_validity(m, &rule.premise())? {
        return Ok(RuleVerdict::PremiseNotValid { state });
    }
    Ok(match check_validity(m, &rule.conclusion())? {
        Validity::Valid => RuleVerdict::Valid,
        Validity::Counterexample { state } => RuleVerdict::Violated { state },
    })
}

/// Propositional validity, treating propositions and maximal modal
/// subformulas as atoms.
pub fn is_tautology(f: &Formula) -> Result<bool> {
    let mut atoms: HashMap<&Formula, usize> = HashMap::new();
    collect_atoms(f, &mut atoms);
    let k = atoms.len();
    if k > TAUTOLOGY_ATOM_CAP {
        return Err(Error::Capacity {
            what: "tautology atoms",
            limit: TAUTOLOGY_ATOM_CAP as u64,
            actual: k as u64,
        });
    }
    // Bit-parallel truth table: row r assigns atom j the value of bit j of r.
    let rows = 1usize << k;
    let words = rows.div_ceil(64);
    let column = |j: usize| -> Vec<u64> {
        (0..words)
            .map(|w| {
                let mut word = 0u64;
                for bit in 0..64 {
                    let r = w * 64 + bit;
                    if r < rows && (r >> j) & 1 == 1 {
                        word |= 1 << bit;
                    }
                }
                word
            })
            .collect()
    };
    let columns: Vec<Vec<u64>> = (0..k).map(column).collect();
    let value = table(f, &atoms, &columns);
    Ok(value.iter().enumerate().all(|(w, &word)| {
        let live = rows - w * 64;
        let mask = if live >= 64 { u64::MAX } else { (1u64 << live) - 1 };
        word & mask == mask
    }))
}

fn collect_atoms<'f>(f: &'f Formula, atoms: &mut HashMap<&'f Formula, usize>) {
    match f {
        Formula::Prop(_) | Formula::Modal(..) => {
            let n = atoms.len();
            atoms.entry(f).or_insert(n);
        }
        Formula::Not(x) => collect_atoms(x, atoms),
        Formula::Or(l, r) => {
            collect_atoms(l, atoms);
            collect_atoms(r, atoms);
        }
    }
}

fn table(f: &Formula, atoms: &HashMap<&Formula, usize>, columns: &[Vec<u64>]) -> Vec<u64> {
    match f {
        Formula::Prop(_) | Formula::Modal(..) => columns[atoms[f]].clone(),
        Formula::Not(x) => table(x, atoms, columns).into_iter().map(|w| !w).collect(),
        Formula::Or(l, r) => {
            let l = table(l, atoms, columns);
            let r = table(r, atoms, columns);
            l.into_iter().zip(r).map(|(a, b)| a | b).collect()
        }
    }
}

/// One line of a derivation, as written in a derivation file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub formula: String,
    pub by: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bind: BTreeMap<String, String>,
    #[serde(default, rename = "as", skip_serializing_if = "Vec::is_empty")]
    pub weak_agents: Vec<String>,
    #[serde(default, rename = "bs", skip_serializing_if = "Vec::is_empty")]
    pub strong_agents: Vec<String>,
}

impl Step {
    pub fn new(formula: &str, by: &str) -> Self {
        Step {
            formula: formula.to_string(),
            by: by.to_string(),
            bind: BTreeMap::new(),
            weak_agents: Vec::new(),
            strong_agents: Vec::new(),
        }
    }

    pub fn justification(&self) -> std::result::Result<Justification, String> {
        let (head, args) = self.by.split_once(':').unwrap_or((self.by.as_str(), ""));
        let index = |s: &str| -> std::result::Result<usize, String> {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| format!("bad step reference `{s}`"))
        };
        Ok(match head.trim() {
            "axiom" => Justification::Axiom(args.trim().parse().map_err(|e: Error| e.to_string())?),
            "taut" => Justification::Taut,
            "mp" => {
                let (i, j) = args
                    .split_once(',')
                    .ok_or_else(|| format!("mp needs two step references, got `{args}`"))?;
                Justification::Mp(index(i)?, index(j)?)
            }
            "ir2" => Justification::Ir2(index(args)?),
            "ir3" => Justification::Ir3(index(args)?),
            "ir4" => Justification::Ir4(index(args)?),
            other => return Err(format!("unknown justification `{other}`")),
        })
    }
}

/// How a step is justified. Step references are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomSchema),
    Taut,
    /// `Mp(i, j)`: step `j` is literally `step i -> this`.
    Mp(usize, usize),
    Ir2(usize),
    Ir3(usize),
    Ir4(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations serialize")
    }

    /// Formula of the last step, if the derivation is nonempty and parses.
    pub fn conclusion(&self) -> Option<Formula> {
        self.steps.last().and_then(|s| parse(&s.formula).ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DerivationVerdict {
    Accepted,
    /// `step` is 1-based.
    Rejected {
        step: usize,
        reason: String,
    },
}

impl DerivationVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, DerivationVerdict::Accepted)
    }
}

/// Checks every step of `d` in order and reports the first bad one.
pub fn verify_derivation(d: &Derivation) -> DerivationVerdict {
    let mut proved: Vec<Formula> = Vec::with_capacity(d.steps.len());
    for (k, step) in d.steps.iter().enumerate() {
        match verify_step(step, k, &proved) {
            Ok(f) => proved.push(f),
            Err(reason) => return DerivationVerdict::Rejected { step: k + 1, reason },
        }
    }
    DerivationVerdict::Accepted
}

fn verify_step(step: &Step, k: usize, proved: &[Formula]) -> std::result::Result<Formula, String> {
    let current = parse(&step.formula).map_err(|e| format!("formula does not parse: {e}"))?;
    let earlier = |i: usize| -> std::result::Result<&Formula, String> {
        if i > k {
            Err(format!("step {i} is not an earlier step"))
        } else {
            Ok(&proved[i - 1])
        }
    };
    match step.justification()? {
        Justification::Axiom(schema) => {
            let bindings = Bindings::from_map(&step.bind).map_err(|e| e.to_string())?;
            let expected = instantiate_axiom(schema, &bindings).map_err(|e| e.to_string())?;
            if expected != current {
                return Err(format!("not an instance of {schema}; expected `{expected}`"));
            }
        }
        Justification::Taut => match is_tautology(&current) {
            Ok(true) => {}
            Ok(false) => return Err("not a tautology".to_string()),
            Err(e) => return Err(e.to_string()),
        },
        Justification::Mp(i, j) => {
            let antecedent = earlier(i)?.clone();
            let expected = antecedent.implies(current.clone());
            if *earlier(j)? != expected {
                return Err(format!("step {j} is not `step {i} -> this`"));
            }
        }
        Justification::Ir2(i) | Justification::Ir3(i) => {
            let (phi, psi) = earlier(i)?
                .as_implies()
                .ok_or_else(|| format!("step {i} is not an implication"))?;
            let (lhs, _) = current
                .as_implies()
                .ok_or_else(|| "conclusion is not an implication".to_string())?;
            let Formula::Modal(_, agent, _) = lhs else {
                return Err("conclusion antecedent is not modal".to_string());
            };
            let (phi, psi, agent) = (phi.clone(), psi.clone(), agent.clone());
            let rule = if matches!(step.justification()?, Justification::Ir2(_)) {
                RuleInstance::Ir2 { agent, phi, psi }
            } else {
                RuleInstance::Ir3 { agent, phi, psi }
            };
            if rule.conclusion() != current {
                return Err(format!(
                    "conclusion does not match the rule; expected `{}`",
                    rule.conclusion()
                ));
            }
        }
        Justification::Ir4(i) => {
            let premise = earlier(i)?;
            let rule = ir4_from_conclusion(&current, &step.weak_agents, &step.strong_agents)?;
            rule.check_side_condition().map_err(|e| e.to_string())?;
            if rule.premise() != *premise {
                return Err(format!("step {i} is not the premise `{}`", rule.premise()));
            }
        }
    }
    Ok(current)
}

/// Reads `WE_a1 φ1 ∧ … → SE_b1 ψ1 ∨ …` back into its parts, using the
/// declared agent lists to know how many conjuncts and disjuncts to peel.
fn ir4_from_conclusion(
    f: &Formula,
    weak_agents: &[String],
    strong_agents: &[String],
) -> std::result::Result<RuleInstance, String> {
    let (lhs, rhs) = f
        .as_implies()
        .ok_or_else(|| "conclusion is not an implication".to_string())?;
    let lhs = peel(lhs, weak_agents.len(), Formula::as_and, Formula::is_top)
        .ok_or_else(|| format!("antecedent is not a conjunction of {} terms", weak_agents.len()))?;
    let rhs = peel(rhs, strong_agents.len(), as_or, Formula::is_bottom)
        .ok_or_else(|| format!("consequent is not a disjunction of {} terms", strong_agents.len()))?;
    let split = |terms: Vec<&Formula>, kind: Modality, agents: &[String]| {
        terms
            .into_iter()
            .zip(agents)
            .map(|(t, name)| match t {
                Formula::Modal(k, a, body) if *k == kind && a.as_str() == name => Ok((a.clone(), (**body).clone())),
                _ => Err(format!("expected a {kind}[{name}] term, found `{t}`")),
            })
            .collect::<std::result::Result<Vec<_>, String>>()
    };
    let rule = RuleInstance::Ir4 {
        weak: split(lhs, Modality::WE, weak_agents)?,
        strong: split(rhs, Modality::SE, strong_agents)?,
    };
    if rule.conclusion() != *f {
        return Err("conclusion does not match the rule".to_string());
    }
    Ok(rule)
}

fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Or(l, r) => Some((l, r)),
        _ => None,
    }
}

/// Splits a left-nested binary chain into exactly `n` terms; `n = 0`
/// requires the unit.
fn peel(
    f: &Formula,
    n: usize,
    split: fn(&Formula) -> Option<(&Formula, &Formula)>,
    is_unit: fn(&Formula) -> bool,
) -> Option<Vec<&Formula>> {
    if n == 0 {
        return is_unit(f).then(Vec::new);
    }
    let mut terms = Vec::with_capacity(n);
    let mut rest = f;
    for _ in 1..n {
        let (l, r) = split(rest)?;
        terms.push(r);
        rest = l;
    }
    terms.push(rest);
    terms.reverse();
    Some(terms)
}

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        const SHIPPED: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../derivations/", $name, ".json")))),*
        ];
    };
}

shipped!("we-monotonicity", "se-antitonicity");

/// Derivations bundled with the crate: the admissibility of
/// `φ → ψ / WE_a φ → WE_a ψ` and of `φ → ψ / SE_a ψ → SE_a φ`, each for a
/// concrete tautological premise.
pub fn shipped_derivations() -> Vec<(&'static str, Derivation)> {
    SHIPPED
        .iter()
        .map(|(name, text)| (*name, Derivation::from_json(text).expect("shipped derivation parses")))
        .collect()
}

/// Lemmas derivable in the system, instantiated for the given agents and
/// formulas.
pub fn derived_lemmas(a: &str, b: &str, phi: &Formula, psi: &Formula) -> Vec<(&'static str, Formula)> {
    use Formula as F;
    vec![
        (
            "we-weakening",
            F::we(a, phi.clone())
                .and(F::wa(a, psi.clone()).not())
                .implies(F::we(a, phi.clone().and(psi.clone().not()))),
        ),
        (
            "se-weakening",
            F::se(a, phi.clone())
                .not()
                .and(F::sa(a, psi.clone()))
                .implies(F::se(a, phi.clone().and(psi.clone().not())).not()),
        ),
        (
            "transfer",
            F::wa(a, phi.clone())
                .not()
                .and(F::sa(a, F::top()))
                .implies(F::wa(b, phi.clone()).not().and(F::sa(b, phi.clone()))),
        ),
    ]
}

/// Validity of many formulas against one model, sharing subformula work.
pub fn check_all_valid<'f>(
    m: &TransitionSystem,
    formulas: impl IntoIterator<Item = &'f Formula>,
) -> Result<Vec<Validity>> {
    let mut ctx = CheckContext::new(m);
    formulas
        .into_iter()
        .map(|f| {
            let set = ctx.truth_set(f)?;
            Ok(match set.complement().iter().next() {
                None => Validity::Valid,
                Some(s) => Validity::Counterexample {
                    state: m.states()[s].clone(),
                },
            })
        })
        .collect()
}
