//! Curated models with golden truth sets, compiled into the crate.
//!
//! Each fixture is a directory of model JSON files plus an
//! `expectations.json` listing, per variant, the formulas to check and the
//! states where they must hold, and optionally an undefinability witness.

use serde::{Deserialize, Serialize};

use crate::checker::{check_state_naive, model_check};
use crate::error::{Error, Result};
use crate::formula::{parse, Formula, Modality};
use crate::model::{StateId, TransitionSystem};

macro_rules! fixture_files {
    ($($id:literal => [$($file:literal),* $(,)?]),* $(,)?) => {
        const FILES: &[(&str, &str, &[(&str, &str)])] = &[
            $((
                $id,
                include_str!(concat!("../fixtures/", $id, "/expectations.json")),
                &[$(($file, include_str!(concat!("../fixtures/", $id, "/", $file)))),*],
            )),*
        ];
    };
}

fixture_files! {
    "fig1-wa" => ["main.json"],
    "fig2-we" => ["main.json"],
    "fig3-se" => ["main.json"],
    "fig4-sa" => ["main.json"],
    "fig5-single-agent" => ["wa.json", "sa.json"],
    "factory" => ["sa-regulation.json", "se-regulation.json", "contract-30.json", "contract-50.json"],
}

/// Identifiers of every shipped fixture, in catalog order.
pub fn catalog() -> Vec<&'static str> {
    FILES.iter().map(|(id, _, _)| *id).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessSpec {
    pub target: Modality,
    pub proposition: String,
    pub closed_under: Vec<Modality>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub text: String,
    pub formula: Formula,
    pub states: Vec<StateId>,
}

#[derive(Clone, Debug)]
pub struct Variant {
    pub name: String,
    pub file: String,
    pub model: TransitionSystem,
    pub expectations: Vec<Expectation>,
    pub witness: Option<WitnessSpec>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: String,
    pub description: String,
    pub variants: Vec<Variant>,
}

impl Fixture {
    /// The first variant's model; single-model fixtures have only one.
    pub fn model(&self) -> &TransitionSystem {
        &self.variants[0].model
    }

    pub fn variant(&self, name: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.name == name)
    }
}

#[derive(Deserialize)]
struct ExpectationsDoc {
    id: String,
    description: String,
    variants: Vec<VariantDoc>,
}

#[derive(Deserialize)]
struct VariantDoc {
    name: String,
    model: String,
    #[serde(default)]
    truth_sets: Vec<TruthSetDoc>,
    #[serde(default)]
    witness: Option<WitnessSpec>,
}

#[derive(Deserialize)]
struct TruthSetDoc {
    formula: String,
    states: Vec<StateId>,
}

pub fn load_fixture(id: &str) -> Result<Fixture> {
    let (_, expectations, files) = FILES
        .iter()
        .find(|(name, _, _)| *name == id)
        .ok_or_else(|| Error::UnknownFixture(id.to_string()))?;
    let doc: ExpectationsDoc = serde_json::from_str(expectations)?;
    let mut variants = Vec::with_capacity(doc.variants.len());
    for v in doc.variants {
        let (_, text) = files
            .iter()
            .find(|(file, _)| *file == v.model)
            .ok_or_else(|| Error::UnknownFixture(format!("{id}/{}", v.model)))?;
        let model = TransitionSystem::from_json(text)?;
        let expectations = v
            .truth_sets
            .into_iter()
            .map(|t| {
                Ok(Expectation {
                    formula: parse(&t.formula)?,
                    text: t.formula,
                    states: t.states,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        variants.push(Variant {
            name: v.name,
            file: v.model,
            model,
            expectations,
            witness: v.witness,
        });
    }
    Ok(Fixture {
        id: doc.id,
        description: doc.description,
        variants,
    })
}

/// Raw model JSON of a fixture file, as shipped.
pub fn fixture_source(id: &str, file: &str) -> Option<&'static str> {
    FILES
        .iter()
        .find(|(name, _, _)| *name == id)
        .and_then(|(_, _, files)| files.iter().find(|(f, _)| *f == file))
        .map(|(_, text)| *text)
}

/// Result of replaying one golden expectation.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectationOutcome {
    pub fixture: String,
    pub variant: String,
    pub formula: String,
    pub expected: Vec<StateId>,
    pub model_check: Vec<StateId>,
    pub naive: Vec<StateId>,
}

impl ExpectationOutcome {
    pub fn passed(&self) -> bool {
        self.expected == self.model_check && self.expected == self.naive
    }
}

/// Replays every expectation of a fixture through both the truth-set checker
/// and the naive oracle.
pub fn run_expectations(fixture: &Fixture) -> Result<Vec<ExpectationOutcome>> {
    let mut out = Vec::new();
    for v in &fixture.variants {
        let m = &v.model;
        for e in &v.expectations {
            let fast = m.state_names(&model_check(m, &e.formula)?);
            let mut naive = Vec::new();
            for s in m.states() {
                if check_state_naive(m, s.as_str(), &e.formula)? {
                    naive.push(s.clone());
                }
            }
            out.push(ExpectationOutcome {
                fixture: fixture.id.clone(),
                variant: v.name.clone(),
                formula: e.text.clone(),
                expected: e.states.clone(),
                model_check: fast,
                naive,
            });
        }
    }
    Ok(out)
}
