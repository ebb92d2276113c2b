//! Explicit-state model checking for agentive permission logic.
//!
//! A [`TransitionSystem`] assigns each agent, at each state, a set of
//! available actions and a nonempty subset of permitted ones; a mechanism
//! maps action profiles to successor states. Four modalities describe what
//! an agent is permitted to do:
//!
//! | modality | holds at `s` when |
//! |---|---|
//! | `WA[a] φ` | some permitted action of `a` admits `φ` |
//! | `WE[a] φ` | some permitted action of `a` ensures `φ` |
//! | `SE[a] φ` | every action of `a` that ensures `φ` is permitted |
//! | `SA[a] φ` | every action of `a` that admits `φ` is permitted |
//!
//! An action *ensures* `φ` when every outcome compatible with it satisfies
//! `φ`, and *admits* `φ` when at least one does.

pub mod algebra;
pub mod atl;
pub mod checker;
pub mod deduction;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod generators;
pub mod model;
pub mod truthset;

pub use algebra::{
    search_witness, verify_closure, verify_witness, verify_witness_with, SearchBounds, SearchOutcome, TruthFamily,
    WitnessReport, WitnessVerdict,
};
pub use atl::{expand_model, translate_formula, verify_translation, AtlFormula, AtlModel, AtlState};
pub use checker::{check_state_naive, model_check, CheckContext};
pub use deduction::{
    check_rule_locally, check_validity, instantiate_axiom, is_tautology, verify_derivation, AxiomSchema, Bindings,
    Derivation, DerivationVerdict, RuleInstance, RuleVerdict, Validity,
};
pub use error::{Error, Result};
pub use fixtures::{load_fixture, Fixture};
pub use formula::{parse, print, Formula, Modality, ParseError};
pub use generators::{random_formula, random_model, FormulaGen, GenParams};
pub use model::{
    validate_model, validate_model_with, ActionId, ActionProfile, AgentId, ModelBuilder, ModelDoc, StateId,
    TransitionSystem, ValidateOptions, ValidationReport, Violation,
};
pub use truthset::TruthSet;

#[cfg(test)]
mod proptests;
