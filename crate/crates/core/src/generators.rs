//! Seeded random models and formulas.
//!
//! All randomness comes from ChaCha8 seeded with a `u64` through
//! `SeedableRng::seed_from_u64`, whose output is specified byte-for-byte and
//! therefore stable across platforms and releases of `rand_chacha` 0.3.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Modality};
use crate::model::{ModelDoc, TransitionDoc, TransitionSystem, DEFAULT_PROFILE_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenParams {
    pub seed: u64,
    pub num_agents: usize,
    pub num_states: usize,
    /// Each agent gets between 1 and this many actions per state.
    pub max_actions: usize,
    pub propositions: usize,
    /// Probability that an action is permitted; one permitted action is
    /// always forced so that `D` is nonempty.
    pub permitted_density: f64,
    /// Maximum successors per profile.
    pub branching: usize,
    pub deterministic: bool,
    /// Overrides `num_agents` with 1.
    pub single_agent: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            num_agents: 2,
            num_states: 4,
            max_actions: 2,
            propositions: 2,
            permitted_density: 0.6,
            branching: 2,
            deterministic: false,
            single_agent: false,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn agents(&self) -> usize {
        if self.single_agent {
            1
        } else {
            self.num_agents
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.agents() == 0 {
            return bad("at least one agent is required");
        }
        if self.num_states == 0 {
            return bad("at least one state is required");
        }
        if self.max_actions == 0 {
            return bad("max_actions must be at least 1");
        }
        if self.branching == 0 {
            return bad("branching must be at least 1");
        }
        if !(self.permitted_density > 0.0 && self.permitted_density <= 1.0) {
            return bad("permitted_density must lie in (0, 1]");
        }
        let product = (self.max_actions as u64)
            .checked_pow(self.agents() as u32)
            .unwrap_or(u64::MAX);
        if product > DEFAULT_PROFILE_CAP {
            return Err(Error::Capacity {
                what: "profiles per state",
                limit: DEFAULT_PROFILE_CAP,
                actual: product,
            });
        }
        Ok(())
    }
}

/// Agent names: a, b, c, … then a26, a27, ….
pub fn agent_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

/// Proposition names: p, q, r, then p3, p4, ….
pub fn prop_name(i: usize) -> String {
    ["p", "q", "r"]
        .get(i)
        .map_or_else(|| format!("p{i}"), |s| s.to_string())
}

pub fn state_name(i: usize) -> String {
    format!("s{i}")
}

/// A random valid transition system. Continuity holds by construction:
/// every profile is assigned its successors directly.
pub fn random_model(p: &GenParams) -> Result<TransitionSystem> {
    TransitionSystem::from_doc(&random_model_doc(p)?)
}

pub fn random_model_doc(p: &GenParams) -> Result<ModelDoc> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n_agents = p.agents();
    let agents: Vec<String> = (0..n_agents).map(agent_name).collect();
    let states: Vec<String> = (0..p.num_states).map(state_name).collect();
    let mut doc = ModelDoc {
        agents: agents.clone(),
        states: states.clone(),
        ..ModelDoc::default()
    };
    let branching = if p.deterministic {
        1
    } else {
        p.branching.min(p.num_states)
    };
    let all: Vec<usize> = (0..p.num_states).collect();

    for s in &states {
        let mut counts = Vec::with_capacity(n_agents);
        let mut acts = std::collections::BTreeMap::new();
        let mut perm = std::collections::BTreeMap::new();
        for a in &agents {
            let k = rng.gen_range(1..=p.max_actions);
            let names: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
            let mut permitted: Vec<String> = names
                .iter()
                .filter(|_| rng.gen_bool(p.permitted_density))
                .cloned()
                .collect();
            if permitted.is_empty() {
                permitted.push(names[rng.gen_range(0..k)].clone());
            }
            counts.push(k);
            acts.insert(a.clone(), names);
            perm.insert(a.clone(), permitted);
        }
        for profile in crate::model::ProfileIter::new(counts) {
            let k = rng.gen_range(1..=branching);
            let mut targets: Vec<usize> = all.choose_multiple(&mut rng, k).copied().collect();
            targets.sort_unstable();
            let named: std::collections::BTreeMap<String, String> = profile
                .iter()
                .enumerate()
                .map(|(a, i)| (agents[a].clone(), (i + 1).to_string()))
                .collect();
            for t in targets {
                doc.transitions.push(TransitionDoc {
                    from: s.clone(),
                    profile: named.clone(),
                    to: states[t].clone(),
                });
            }
        }
        doc.actions.insert(s.clone(), acts);
        doc.permitted.insert(s.clone(), perm);
    }
    for i in 0..p.propositions {
        let holds: Vec<String> = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        doc.valuation.insert(prop_name(i), holds);
    }
    Ok(doc)
}

/// Productions of the formula grammar, used for frequency accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Production {
    Prop,
    True,
    False,
    Not,
    Or,
    And,
    Implies,
    Modal(Modality),
}

/// Random formula generator with its own PRNG.
pub struct FormulaGen {
    rng: ChaCha8Rng,
    agents: Vec<String>,
    props: Vec<String>,
}

impl FormulaGen {
    pub fn new(seed: u64, agents: &[String], props: &[String]) -> Self {
        assert!(!agents.is_empty(), "formula generation needs an agent");
        let props = if props.is_empty() {
            vec!["p".to_string()]
        } else {
            props.to_vec()
        };
        FormulaGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            agents: agents.to_vec(),
            props,
        }
    }

    /// For a model: its agents and propositions.
    pub fn for_model(seed: u64, m: &TransitionSystem) -> Self {
        let agents: Vec<String> = m.agents().iter().map(|a| a.0.clone()).collect();
        let props: Vec<String> = m.propositions().map(str::to_string).collect();
        Self::new(seed, &agents, &props)
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        self.traced(depth, &mut |_| {})
    }

    /// Like [`formula`](Self::formula), reporting each production used.
    pub fn traced(&mut self, depth: usize, seen: &mut dyn FnMut(Production)) -> Formula {
        if depth == 0 {
            return self.leaf(seen);
        }
        let choice = self.rng.gen_range(0..10);
        match choice {
            0 => self.leaf(seen),
            1 => {
                seen(Production::Not);
                self.traced(depth - 1, seen).not()
            }
            2..=4 => {
                let (prod, l, r) = (
                    [Production::Or, Production::And, Production::Implies][choice - 2],
                    self.traced(depth - 1, seen),
                    self.traced(depth - 1, seen),
                );
                seen(prod);
                match prod {
                    Production::Or => l.or(r),
                    Production::And => l.and(r),
                    _ => l.implies(r),
                }
            }
            _ => {
                let kind = Modality::ALL[(choice - 5) % 4];
                let kind = if choice == 9 {
                    *Modality::ALL.choose(&mut self.rng).unwrap()
                } else {
                    kind
                };
                seen(Production::Modal(kind));
                let agent = self.agents.choose(&mut self.rng).unwrap().clone();
                Formula::modal(kind, agent, self.traced(depth - 1, seen))
            }
        }
    }

    fn leaf(&mut self, seen: &mut dyn FnMut(Production)) -> Formula {
        match self.rng.gen_range(0..8) {
            0 => {
                seen(Production::True);
                Formula::top()
            }
            1 => {
                seen(Production::False);
                Formula::bottom()
            }
            _ => {
                seen(Production::Prop);
                Formula::prop(self.props.choose(&mut self.rng).unwrap().clone())
            }
        }
    }

    pub fn agent(&mut self) -> String {
        self.agents.choose(&mut self.rng).unwrap().clone()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// A single random formula of nesting depth at most `depth`.
pub fn random_formula(seed: u64, depth: usize, agents: &[String], props: &[String]) -> Formula {
    FormulaGen::new(seed, agents, props).formula(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::model_check;
    use crate::model::validate_model;
    use std::collections::HashSet;

    #[test]
    fn same_seed_same_model() {
        let p = GenParams::default().with_seed(42);
        assert_eq!(random_model(&p).unwrap(), random_model(&p).unwrap());
        let q = GenParams::default().with_seed(43);
        assert_ne!(random_model_doc(&p).unwrap(), random_model_doc(&q).unwrap());
    }

    #[test]
    fn generated_models_validate() {
        for seed in 0..200 {
            let p = GenParams {
                seed,
                num_agents: 1 + (seed as usize % 3),
                num_states: 1 + (seed as usize % 5),
                max_actions: 3,
                branching: 3,
                ..GenParams::default()
            };
            let m = random_model(&p).unwrap();
            assert!(validate_model(&m).is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn deterministic_flag() {
        let p = GenParams {
            deterministic: true,
            branching: 3,
            ..GenParams::default()
        };
        for seed in 0..20 {
            assert!(random_model(&p.clone().with_seed(seed)).unwrap().is_deterministic());
        }
    }

    #[test]
    fn full_density_makes_sa_trivial() {
        let p = GenParams {
            permitted_density: 1.0,
            ..GenParams::default()
        };
        for seed in 0..20 {
            let m = random_model(&p.clone().with_seed(seed)).unwrap();
            let mut gen = FormulaGen::for_model(seed, &m);
            for _ in 0..10 {
                let f = Formula::sa("a", gen.formula(2));
                assert!(model_check(&m, &f).unwrap().is_full());
            }
        }
    }

    #[test]
    fn bad_params_rejected() {
        let zero = GenParams {
            num_states: 0,
            ..GenParams::default()
        };
        assert!(matches!(random_model(&zero), Err(Error::InvalidParams(_))));
        let dens = GenParams {
            permitted_density: 0.0,
            ..GenParams::default()
        };
        assert!(random_model(&dens).is_err());
        let huge = GenParams {
            num_agents: 30,
            max_actions: 3,
            ..GenParams::default()
        };
        assert!(matches!(random_model(&huge), Err(Error::Capacity { .. })));
    }

    #[test]
    fn depth_zero_is_a_leaf() {
        let agents = vec!["a".to_string()];
        let props = vec!["p".to_string(), "q".to_string()];
        for seed in 0..50 {
            let f = random_formula(seed, 0, &agents, &props);
            assert!(matches!(f, Formula::Prop(_)) || f.is_top() || f.is_bottom(), "{f}");
            assert_eq!(f, random_formula(seed, 0, &agents, &props));
        }
    }

    #[test]
    fn every_production_appears() {
        let agents = vec!["a".to_string(), "b".to_string()];
        let props = vec!["p".to_string()];
        let mut gen = FormulaGen::new(7, &agents, &props);
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let f = gen.traced(3, &mut |p| {
                seen.insert(p);
            });
            assert!(f.modal_depth() <= 3);
        }
        assert_eq!(seen.len(), 11, "{seen:?}");
    }
}
