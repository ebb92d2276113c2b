//! Property-based invariants over generated models and formulas.

use proptest::prelude::*;

use crate::checker::{satisfies, truth_set_modal};
use crate::deduction::{derived_lemmas, shipped_derivations, Step};
use crate::*;

fn params() -> impl Strategy<Value = GenParams> {
    (
        any::<u64>(),
        1usize..=3,
        1usize..=5,
        1usize..=3,
        1usize..=3,
        any::<bool>(),
    )
        .prop_map(
            |(seed, num_agents, num_states, max_actions, branching, deterministic)| GenParams {
                seed,
                num_agents,
                num_states,
                max_actions,
                propositions: 2,
                permitted_density: 0.5,
                branching,
                deterministic,
                single_agent: false,
            },
        )
}

fn subset(n: usize, bits: u32) -> TruthSet {
    TruthSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), depth in 0usize..5) {
        let agents = vec!["a".to_string(), "b2".to_string()];
        let props = vec!["p".to_string(), "fish_ok".to_string()];
        let f = random_formula(seed, depth, &agents, &props);
        let text = print(&f);
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn model_json_round_trip(p in params()) {
        let m = random_model(&p).unwrap();
        let back = TransitionSystem::from_json(&m.to_json_pretty()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn generated_models_are_valid(p in params()) {
        let m = random_model(&p).unwrap();
        prop_assert!(validate_model(&m).is_valid());
        if p.deterministic {
            prop_assert!(m.is_deterministic());
        }
    }

    #[test]
    fn model_check_matches_naive(p in params(), fseed in any::<u64>()) {
        let m = random_model(&p).unwrap();
        let f = FormulaGen::for_model(fseed, &m).formula(4);
        let set = model_check(&m, &f).unwrap();
        for s in 0..m.num_states() {
            prop_assert_eq!(set.contains(s), satisfies(&m, s, &f), "state {} formula {}", s, f);
        }
    }

    #[test]
    fn weak_and_strong_pairs_are_ordered(p in params(), bits in any::<u32>()) {
        // An action that ensures also admits (every action has an outcome),
        // so WE ⊆ WA and SA ⊆ SE.
        let m = random_model(&p).unwrap();
        let x = subset(m.num_states(), bits);
        for a in 0..m.num_agents() {
            let wa = truth_set_modal(&m, Modality::WA, a, &x);
            let we = truth_set_modal(&m, Modality::WE, a, &x);
            let se = truth_set_modal(&m, Modality::SE, a, &x);
            let sa = truth_set_modal(&m, Modality::SA, a, &x);
            prop_assert!(we.is_subset(&wa));
            prop_assert!(sa.is_subset(&se));
        }
    }

    #[test]
    fn weak_monotone_strong_antitone(p in params(), small in any::<u32>(), extra in any::<u32>()) {
        let m = random_model(&p).unwrap();
        let n = m.num_states();
        let x = subset(n, small);
        let y = subset(n, small | extra);
        for a in 0..m.num_agents() {
            for kind in [Modality::WA, Modality::WE] {
                prop_assert!(truth_set_modal(&m, kind, a, &x).is_subset(&truth_set_modal(&m, kind, a, &y)));
            }
            for kind in [Modality::SE, Modality::SA] {
                prop_assert!(truth_set_modal(&m, kind, a, &y).is_subset(&truth_set_modal(&m, kind, a, &x)));
            }
        }
    }

    #[test]
    fn single_agent_deterministic_collapse(seed in any::<u64>(), fseed in any::<u64>(), states in 1usize..6) {
        let m = random_model(&GenParams {
            seed,
            num_states: states,
            max_actions: 3,
            deterministic: true,
            single_agent: true,
            ..GenParams::default()
        }).unwrap();
        let phi = FormulaGen::for_model(fseed, &m).formula(3);
        let ts = |k| model_check(&m, &Formula::modal(k, "a", phi.clone())).unwrap();
        prop_assert_eq!(ts(Modality::WA), ts(Modality::WE));
        prop_assert_eq!(ts(Modality::SA), ts(Modality::SE));
    }

    #[test]
    fn axioms_and_lemmas_valid(p in params(), fseed in any::<u64>()) {
        let m = random_model(&p).unwrap();
        let mut gen = FormulaGen::for_model(fseed, &m);
        let a = gen.agent();
        let b = gen.agent();
        let phi = gen.formula(3);
        let psi = gen.formula(3);
        let binds = Bindings::new(&a, phi.clone(), psi.clone()).with_b(&b);
        for schema in AxiomSchema::ALL {
            let inst = instantiate_axiom(schema, &binds).unwrap();
            prop_assert!(check_validity(&m, &inst).unwrap().is_valid(), "{}: {}", schema, inst);
        }
        for (name, lemma) in derived_lemmas(&a, &b, &phi, &psi) {
            prop_assert!(check_validity(&m, &lemma).unwrap().is_valid(), "{}: {}", name, lemma);
        }
    }

    #[test]
    fn local_rules_preserve_validity(p in params(), fseed in any::<u64>()) {
        let m = random_model(&p).unwrap();
        let mut gen = FormulaGen::for_model(fseed, &m);
        // Premises of the form φ∧ψ → φ are valid everywhere, so the rules fire.
        let phi = gen.formula(2);
        let psi = gen.formula(2);
        let both = phi.clone().and(psi.clone());
        let a = gen.agent();
        for rule in [
            RuleInstance::Ir2 { agent: a.as_str().into(), phi: both.clone(), psi: phi.clone() },
            RuleInstance::Ir3 { agent: a.as_str().into(), phi: both.clone(), psi: phi.clone() },
        ] {
            prop_assert!(!check_rule_locally(&m, &rule).unwrap().is_violation());
        }
        if m.num_agents() >= 2 {
            let rule = RuleInstance::Ir4 {
                weak: vec![("a".into(), phi.clone())],
                strong: vec![("b".into(), phi.clone().not())],
            };
            prop_assert_eq!(check_rule_locally(&m, &rule).unwrap(), RuleVerdict::Valid);
        }
    }

    #[test]
    fn shipped_derivations_sound(p in params()) {
        let m = random_model(&GenParams { num_agents: 1, ..p }).unwrap();
        for (_, d) in shipped_derivations() {
            let last = d.conclusion().unwrap();
            prop_assert!(check_validity(&m, &last).unwrap().is_valid());
        }
    }
}

/// Removes step `k` (1-based) and renumbers later references.
fn delete_step(d: &Derivation, k: usize) -> Derivation {
    let shift = |i: usize| if i > k { i - 1 } else { i };
    let steps = d
        .steps
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 != k)
        .map(|(_, s)| {
            let mut s: Step = s.clone();
            if let Some((head, args)) = s.by.split_once(':') {
                if head != "axiom" {
                    let args: Vec<String> = args
                        .split(',')
                        .map(|a| shift(a.trim().parse().unwrap()).to_string())
                        .collect();
                    s.by = format!("{head}:{}", args.join(","));
                }
            }
            s
        })
        .collect();
    Derivation { steps }
}

#[test]
fn deleting_unreferenced_steps_preserves_acceptance() {
    for (name, d) in shipped_derivations() {
        // Pad with a step nothing refers to, in the middle.
        let mut padded = d.clone();
        padded.steps.insert(2, Step::new("q | !q", "taut"));
        for s in padded.steps.iter_mut().skip(3) {
            if let Some((head, args)) = s.by.clone().split_once(':') {
                if head != "axiom" {
                    let args: Vec<String> = args
                        .split(',')
                        .map(|a| {
                            let i: usize = a.trim().parse().unwrap();
                            (if i >= 3 { i + 1 } else { i }).to_string()
                        })
                        .collect();
                    s.by = format!("{head}:{}", args.join(","));
                }
            }
        }
        assert!(verify_derivation(&padded).is_accepted(), "{name} padded");
        assert_eq!(delete_step(&padded, 3), d);
        assert!(verify_derivation(&delete_step(&padded, 3)).is_accepted());
    }
}

#[test]
fn verification_is_deterministic() {
    for (_, d) in shipped_derivations() {
        let json = d.to_json_pretty();
        let again = Derivation::from_json(&json).unwrap();
        assert_eq!(verify_derivation(&d), verify_derivation(&again));
    }
}
