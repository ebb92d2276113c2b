//! Truth-set algebra: closure of a family of state sets under boolean
//! operations and modalities, and undefinability witnesses built on it.
//!
//! If a family contains `[[p]]`, is closed under complement, union and every
//! modality except `⊙`, then every formula without `⊙` has its truth set in
//! the family. A model where `[[⊙_a p]]` falls outside the family therefore
//! shows `⊙` cannot be expressed by the other modalities.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checker::truth_set_modal;
use crate::formula::{Formula, Modality};
use crate::generators::{random_model, GenParams};
use crate::model::{ModelDoc, StateId, TransitionSystem};
use crate::truthset::TruthSet;

/// A set of truth sets over one model, kept in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthFamily {
    universe: usize,
    members: BTreeSet<TruthSet>,
}

impl TruthFamily {
    pub fn new(universe: usize, members: impl IntoIterator<Item = TruthSet>) -> Self {
        let members = members
            .into_iter()
            .inspect(|m| assert_eq!(m.universe(), universe, "family member over a different model"))
            .collect();
        TruthFamily { universe, members }
    }

    /// `{[[p]], [[¬p]], S, ∅}`.
    pub fn of_proposition(m: &TransitionSystem, prop: &str) -> Self {
        let p = m.valuation(prop);
        let n = m.num_states();
        TruthFamily::new(n, [p.complement(), p, TruthSet::full(n), TruthSet::empty(n)])
    }

    /// Every subset of the states.
    pub fn powerset(universe: usize) -> Self {
        assert!(universe < 20, "powerset of {universe} states is too large");
        TruthFamily::new(
            universe,
            (0u32..1 << universe)
                .map(|bits| TruthSet::from_indices(universe, (0..universe).filter(|i| bits >> i & 1 == 1))),
        )
    }

    pub fn contains(&self, set: &TruthSet) -> bool {
        self.members.contains(set)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn iter(&self) -> impl Iterator<Item = &TruthSet> + '_ {
        self.members.iter()
    }

    pub fn named(&self, m: &TransitionSystem) -> Vec<Vec<StateId>> {
        self.iter().map(|s| m.state_names(s)).collect()
    }
}

/// The image of each family member under `kind_a`, in family order.
pub fn closure_step(
    m: &TransitionSystem,
    family: &TruthFamily,
    kind: Modality,
    agent: usize,
) -> Vec<(TruthSet, TruthSet)> {
    family
        .iter()
        .map(|x| (x.clone(), truth_set_modal(m, kind, agent, x)))
        .collect()
}

/// One computed image `op(member) = image` during a closure check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureCase {
    pub modality: Modality,
    pub agent: String,
    pub member: Vec<StateId>,
    pub image: Vec<StateId>,
    pub in_family: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosureViolation {
    Complement {
        member: Vec<StateId>,
        image: Vec<StateId>,
    },
    Union {
        left: Vec<StateId>,
        right: Vec<StateId>,
        image: Vec<StateId>,
    },
    Modal(ClosureCase),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub cases: Vec<ClosureCase>,
    pub violations: Vec<ClosureViolation>,
}

/// Checks closure under complement, pairwise union, and each modality in
/// `modalities` for each agent index in `agents`.
pub fn verify_closure(
    m: &TransitionSystem,
    family: &TruthFamily,
    modalities: &[Modality],
    agents: &[usize],
) -> ClosureReport {
    let names = |s: &TruthSet| m.state_names(s);
    let mut violations = Vec::new();
    for x in family.iter() {
        let c = x.complement();
        if !family.contains(&c) {
            violations.push(ClosureViolation::Complement {
                member: names(x),
                image: names(&c),
            });
        }
    }
    let members: Vec<&TruthSet> = family.iter().collect();
    for (i, x) in members.iter().enumerate() {
        for y in &members[i + 1..] {
            let u = x.union(y);
            if !family.contains(&u) {
                violations.push(ClosureViolation::Union {
                    left: names(x),
                    right: names(y),
                    image: names(&u),
                });
            }
        }
    }
    let mut cases = Vec::new();
    for &kind in modalities {
        for &a in agents {
            for (x, image) in closure_step(m, family, kind, a) {
                let case = ClosureCase {
                    modality: kind,
                    agent: m.agents()[a].0.clone(),
                    member: names(&x),
                    image: names(&image),
                    in_family: family.contains(&image),
                };
                if !case.in_family {
                    violations.push(ClosureViolation::Modal(case.clone()));
                }
                cases.push(case);
            }
        }
    }
    ClosureReport {
        closed: violations.is_empty(),
        cases,
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Escape {
    pub formula: String,
    pub states: Vec<StateId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessReport {
    pub target: Modality,
    pub proposition: String,
    pub model: ModelDoc,
    pub family: Vec<Vec<StateId>>,
    pub closed_under: Vec<ClosureCase>,
    pub escape: Escape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessFailure {
    pub target: Modality,
    pub proposition: String,
    /// Closure conditions that fail for the non-target modalities.
    pub violations: Vec<ClosureViolation>,
    /// False when `⊙_a p` stays inside the family for every agent.
    pub escapes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum WitnessVerdict {
    Witness(WitnessReport),
    Failed(WitnessFailure),
}

impl WitnessVerdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, WitnessVerdict::Witness(_))
    }
}

/// Witness check with the family closed under the three other modalities.
pub fn verify_witness(m: &TransitionSystem, target: Modality, prop: &str, family: &TruthFamily) -> WitnessVerdict {
    verify_witness_with(m, target, prop, family, &target.others())
}

/// Witness check against an explicit set of modalities the family must be
/// closed under, e.g. `{SE, SA}` when separating `WA` from the strong pair.
pub fn verify_witness_with(
    m: &TransitionSystem,
    target: Modality,
    prop: &str,
    family: &TruthFamily,
    closed_under: &[Modality],
) -> WitnessVerdict {
    let agents: Vec<usize> = (0..m.num_agents()).collect();
    let closure = verify_closure(m, family, closed_under, &agents);
    let p = m.valuation(prop);
    let escape = agents.iter().find_map(|&a| {
        let image = truth_set_modal(m, target, a, &p);
        (!family.contains(&image)).then(|| Escape {
            formula: Formula::modal(target, m.agents()[a].clone(), Formula::prop(prop)).to_string(),
            states: m.state_names(&image),
        })
    });
    match (closure.closed, escape) {
        (true, Some(escape)) => WitnessVerdict::Witness(WitnessReport {
            target,
            proposition: prop.to_string(),
            model: m.to_doc(),
            family: family.named(m),
            closed_under: closure.cases,
            escape,
        }),
        (_, escape) => WitnessVerdict::Failed(WitnessFailure {
            target,
            proposition: prop.to_string(),
            violations: closure.violations,
            escapes: escape.is_some(),
        }),
    }
}

/// Every truth set expressible by a formula of nesting depth ≤ `depth`
/// built from `prop`, `true`, `¬`, `∨` and the given modalities (all
/// agents), each paired with one formula that expresses it.
///
/// Works on truth sets rather than formula trees: a formula's truth set only
/// depends on its immediate subformulas' truth sets, so the sweep is exact.
pub fn expressible_sets(
    m: &TransitionSystem,
    prop: &str,
    modalities: &[Modality],
    depth: usize,
) -> BTreeMap<TruthSet, Formula> {
    let mut known: BTreeMap<TruthSet, Formula> = BTreeMap::new();
    known.insert(m.valuation(prop), Formula::prop(prop));
    known.entry(m.all_states()).or_insert_with(Formula::top);
    for _ in 0..depth {
        let level: Vec<(TruthSet, Formula)> = known.iter().map(|(s, f)| (s.clone(), f.clone())).collect();
        let mut add = |set: TruthSet, f: &dyn Fn() -> Formula| {
            known.entry(set).or_insert_with(f);
        };
        for (x, fx) in &level {
            add(x.complement(), &|| fx.clone().not());
            for (y, fy) in &level {
                add(x.union(y), &|| fx.clone().or(fy.clone()));
            }
            for &kind in modalities {
                for (a, agent) in m.agents().iter().enumerate() {
                    add(truth_set_modal(m, kind, a, x), &|| {
                        Formula::modal(kind, agent.clone(), fx.clone())
                    });
                }
            }
        }
    }
    known
}

/// Bounds for [`search_witness`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBounds {
    pub max_states: usize,
    pub max_actions: usize,
    pub agents: usize,
    /// When false every action is permitted.
    pub allow_forbidden: bool,
    pub seed: u64,
    /// Number of candidate models to sample before giving up.
    pub budget: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_states: 3,
            max_actions: 3,
            agents: 2,
            allow_forbidden: true,
            seed: 0,
            budget: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { tried: u64, report: Box<WitnessReport> },
    Exhausted { tried: u64 },
}

/// Samples models within `bounds` until one is a witness for `target` with
/// the family `{[[p]], [[¬p]], S, ∅}`. The sequence of candidates depends
/// only on the bounds, so results replay exactly.
pub fn search_witness(target: Modality, bounds: &SearchBounds) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    for tried in 1..=bounds.budget {
        let params = GenParams {
            seed: rng.gen(),
            num_agents: bounds.agents,
            num_states: rng.gen_range(2..=bounds.max_states.max(2)),
            max_actions: bounds.max_actions,
            propositions: 1,
            permitted_density: if bounds.allow_forbidden { 0.5 } else { 1.0 },
            branching: 2,
            deterministic: false,
            single_agent: bounds.agents == 1,
        };
        let Ok(m) = random_model(&params) else {
            return SearchOutcome::Exhausted { tried };
        };
        let family = TruthFamily::of_proposition(&m, "p");
        if family.len() < 4 {
            continue;
        }
        if let WitnessVerdict::Witness(report) = verify_witness(&m, target, "p", &family) {
            return SearchOutcome::Found {
                tried,
                report: Box::new(report),
            };
        }
    }
    SearchOutcome::Exhausted { tried: bounds.budget }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::load_fixture;

    fn fig1() -> TransitionSystem {
        load_fixture("fig1-wa").unwrap().model().clone()
    }

    #[test]
    fn fig1_we_fixes_p() {
        let m = fig1();
        let f = TruthFamily::of_proposition(&m, "p");
        let p = m.valuation("p");
        let step = closure_step(&m, &f, Modality::WE, 0);
        let image = step.iter().find(|(x, _)| *x == p).unwrap();
        assert_eq!(image.1, p);
        for (_, img) in closure_step(&m, &f, Modality::SA, 1) {
            assert!(f.contains(&img));
        }
    }

    #[test]
    fn fig1_closure_and_escape() {
        let m = fig1();
        let f = TruthFamily::of_proposition(&m, "p");
        let r = verify_closure(&m, &f, &[Modality::WE, Modality::SE, Modality::SA], &[0, 1]);
        assert!(r.closed, "{:?}", r.violations);
        assert_eq!(r.cases.len(), 24);
        let r = verify_closure(&m, &f, &Modality::ALL, &[0, 1]);
        assert!(!r.closed);
        assert!(r.violations.iter().any(|v| matches!(v,
            ClosureViolation::Modal(c) if c.modality == Modality::WA && c.agent == "a"
                && c.member == ["u"] && c.image == ["s", "u"])));
    }

    #[test]
    fn powerset_is_closed_under_everything() {
        let m = fig1();
        let f = TruthFamily::powerset(m.num_states());
        assert_eq!(f.len(), 8);
        assert!(verify_closure(&m, &f, &Modality::ALL, &[0, 1]).closed);
    }

    #[test]
    fn fig1_witness_and_non_witness() {
        let m = fig1();
        let f = TruthFamily::of_proposition(&m, "p");
        match verify_witness(&m, Modality::WA, "p", &f) {
            WitnessVerdict::Witness(r) => assert_eq!(r.escape.states, ["s", "u"]),
            other => panic!("{other:?}"),
        }
        match verify_witness(&m, Modality::WE, "p", &f) {
            WitnessVerdict::Failed(fail) => assert!(!fail.escapes),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_stays_in_family_on_fig1() {
        let m = fig1();
        let f = TruthFamily::of_proposition(&m, "p");
        let sets = expressible_sets(&m, "p", &[Modality::WE, Modality::SE, Modality::SA], 3);
        assert_eq!(sets.len(), 4);
        for (set, formula) in &sets {
            assert!(f.contains(set), "{formula}");
            assert_eq!(&crate::checker::model_check(&m, formula).unwrap(), set);
        }
        let with_wa = expressible_sets(&m, "p", &Modality::ALL, 1);
        assert!(with_wa.keys().any(|s| !f.contains(s)));
    }

    #[test]
    fn se_never_escapes_when_everything_is_permitted() {
        let bounds = SearchBounds {
            allow_forbidden: false,
            budget: 2_000,
            ..SearchBounds::default()
        };
        assert!(matches!(
            search_witness(Modality::SE, &bounds),
            SearchOutcome::Exhausted { tried: 2_000 }
        ));
    }

    #[test]
    fn search_is_deterministic() {
        let bounds = SearchBounds {
            max_actions: 2,
            budget: 50_000,
            seed: 3,
            ..SearchBounds::default()
        };
        let one = serde_json::to_string(&search_witness(Modality::WA, &bounds)).unwrap();
        let two = serde_json::to_string(&search_witness(Modality::WA, &bounds)).unwrap();
        assert_eq!(one, two);
        assert!(one.contains("\"found\""));
    }

    #[test]
    fn strong_witnesses_found_with_three_actions() {
        let bounds = SearchBounds {
            seed: 1,
            ..SearchBounds::default()
        };
        for target in [Modality::SE, Modality::SA] {
            assert!(
                matches!(search_witness(target, &bounds), SearchOutcome::Found { .. }),
                "{target}"
            );
        }
    }

    /// With at most one forbidden action per state, SE and SA cannot be
    /// separated by the family of a proposition.
    ///
    /// Classify each state by its forbidden action (if any): none, one that
    /// ensures `p`, one that ensures `¬p`, or one that admits both. The
    /// strong truth sets over `p`, `¬p` and `S` depend only on this class,
    /// and satisfy `[[SE p]] = ¬([[SA ¬p]] ∖ [[SA ⊤]])` and
    /// `[[SA p]] = [[SE ⊤]] ∪ ¬[[SE ¬p]]`. A family closed under boolean
    /// operations and one of the pair thus contains the other's image. The
    /// enumeration checks this over every class assignment.
    #[test]
    fn strong_witnesses_need_two_forbidden_actions() {
        #[derive(Clone, Copy, PartialEq)]
        enum Class {
            AllPermitted,
            EnsuresP,
            EnsuresNotP,
            Mixed,
        }
        use Class::*;
        const CLASSES: [Class; 4] = [AllPermitted, EnsuresP, EnsuresNotP, Mixed];
        for n in 1..=5usize {
            let full = TruthSet::full(n);
            for code in 0..4usize.pow(n as u32) {
                let classes: Vec<Class> = (0..n).map(|i| CLASSES[code / 4usize.pow(i as u32) % 4]).collect();
                let where_ = |f: &dyn Fn(Class) -> bool| TruthSet::from_indices(n, (0..n).filter(|&i| f(classes[i])));
                // SA X: no forbidden action admits X. SE X: none ensures X.
                let sa_p = where_(&|c| matches!(c, AllPermitted | EnsuresNotP));
                let sa_np = where_(&|c| matches!(c, AllPermitted | EnsuresP));
                let se_p = where_(&|c| c != EnsuresP);
                let se_np = where_(&|c| c != EnsuresNotP);
                let top = where_(&|c| c == AllPermitted);
                for bits in 0u32..1 << n {
                    let p = TruthSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1));
                    let fam = TruthFamily::new(n, [p.complement(), p.clone(), full.clone(), TruthSet::empty(n)]);
                    let sa_closed = [&sa_p, &sa_np, &top].iter().all(|x| fam.contains(x));
                    let se_closed = [&se_p, &se_np, &top].iter().all(|x| fam.contains(x));
                    assert!(!sa_closed || fam.contains(&se_p), "SE escapes with n={n}");
                    assert!(!se_closed || fam.contains(&sa_p), "SA escapes with n={n}");
                }
            }
        }
    }
}
