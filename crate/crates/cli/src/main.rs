use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use permitmc_core::algebra::{SearchBounds, SearchOutcome};
use permitmc_core::atl::{expand_model, verify_translation_on};
use permitmc_core::deduction::{check_all_valid, RuleInstance};
use permitmc_core::fixtures::{catalog, run_expectations};
use permitmc_core::model::DEFAULT_PROFILE_CAP;
use permitmc_core::*;

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Version of every `--json` document this binary emits.
const SCHEMA: u32 = 1;

const PROFILE_CAP_ENV: &str = "PERMITMC_PROFILE_CAP";

#[derive(Parser)]
#[command(
    name = "permitmc",
    version,
    about = "Model checker for agentive permission modalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the states where a formula holds.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Check the well-formedness conditions of a model.
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check random instances of the axiom schemas on a model.
    Axioms {
        #[arg(long)]
        model: PathBuf,
        /// Only this schema (A1..A9).
        #[arg(long)]
        axiom: Option<AxiomSchema>,
        /// Nesting depth of the formulas substituted for metavariables.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per schema.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Fuzz the axioms, derived lemmas and rules on random models.
    Soundness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[command(flatten)]
        params: ModelParams,
        #[arg(long)]
        json: bool,
    },
    /// Verify a derivation file.
    Prove {
        #[arg(long)]
        derivation: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Verify or search for an undefinability witness.
    Witness {
        #[arg(long)]
        target: Modality,
        #[arg(long, required_unless_present = "search", conflicts_with = "search")]
        model: Option<PathBuf>,
        #[arg(long, default_value = "p")]
        prop: String,
        /// Modalities the family must be closed under; defaults to the other three.
        #[arg(long, value_delimiter = ',')]
        closed_under: Vec<Modality>,
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 3)]
        max_states: usize,
        #[arg(long, default_value_t = 3)]
        max_actions: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        /// Keep every action permitted during search.
        #[arg(long)]
        all_permitted: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
    },
    /// Expand a model into a concurrent game structure.
    Translate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also compare the translation of `--formula` against the checker.
        #[arg(long, requires = "formula")]
        verify: bool,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Generate a random valid model.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ModelParams,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled fixtures, or replay their golden expectations.
    Fixtures {
        #[arg(long)]
        run: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct ModelParams {
    #[arg(long, default_value_t = 4)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    agents: usize,
    #[arg(long, default_value_t = 2)]
    max_actions: usize,
    #[arg(long, default_value_t = 2)]
    props: usize,
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    #[arg(long, default_value_t = 2)]
    branching: usize,
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    single_agent: bool,
}

impl ModelParams {
    fn to_gen(&self, seed: u64) -> GenParams {
        GenParams {
            seed,
            num_agents: self.agents,
            num_states: self.states,
            max_actions: self.max_actions,
            propositions: self.props,
            permitted_density: self.density,
            branching: self.branching,
            deterministic: self.deterministic,
            single_agent: self.single_agent,
        }
    }
}

/// Usage and input problems; always exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type Run = Result<bool, UsageError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Check { model, formula, json } => check(&model, &formula, json),
        Command::Validate { model, json } => validate(&model, json),
        Command::Axioms {
            model,
            axiom,
            depth,
            seed,
            count,
            json,
        } => axioms(&model, axiom, depth, seed, count, json),
        Command::Soundness {
            seed,
            count,
            depth,
            params,
            json,
        } => soundness(seed, count, depth, &params, json),
        Command::Prove { derivation, json } => prove(&derivation, json),
        Command::Witness {
            target,
            model,
            prop,
            closed_under,
            search,
            max_states,
            max_actions,
            agents,
            all_permitted,
            seed,
            budget,
        } => {
            if search {
                let bounds = SearchBounds {
                    max_states,
                    max_actions,
                    agents,
                    allow_forbidden: !all_permitted,
                    seed,
                    budget,
                };
                witness_search(target, &bounds)
            } else {
                witness_verify(
                    target,
                    model.as_deref().expect("clap enforces --model"),
                    &prop,
                    &closed_under,
                )
            }
        }
        Command::Translate {
            model,
            out,
            verify,
            formula,
        } => translate(&model, out.as_deref(), verify, formula.as_deref()),
        Command::Gen { seed, params, out } => generate(&params.to_gen(seed), out.as_deref()),
        Command::Fixtures { run, json } => fixtures(run, json),
    }
}

fn profile_cap() -> Result<u64, UsageError> {
    match std::env::var(PROFILE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{PROFILE_CAP_ENV} must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_PROFILE_CAP),
    }
}

fn load_model(path: &Path) -> Result<TransitionSystem, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    TransitionSystem::from_json(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Loads a model and refuses to go on if it is not well formed.
fn load_valid_model(path: &Path) -> Result<Result<TransitionSystem, ValidationReport>, UsageError> {
    let m = load_model(path)?;
    let report = validate_model_with(
        &m,
        ValidateOptions {
            profile_cap: profile_cap()?,
        },
    );
    Ok(if report.is_valid() { Ok(m) } else { Err(report) })
}

fn print_json(value: &Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(value).expect("json values serialize")
    );
}

fn doc<T: Serialize>(command: &str, body: T) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let Value::Object(fields) = serde_json::to_value(body).expect("outputs serialize") {
        v.as_object_mut().unwrap().extend(fields);
    }
    v
}

fn invalid_model(command: &str, report: &ValidationReport, as_json: bool) -> Run {
    if as_json {
        print_json(&doc(
            command,
            json!({ "valid": false, "violations": report.violations }),
        ));
    } else {
        eprintln!("model is not valid:");
        for v in &report.violations {
            eprintln!("  {v}");
        }
    }
    Ok(false)
}

fn sorted_names(m: &TransitionSystem, set: &TruthSet) -> Vec<String> {
    let mut names: Vec<String> = m.state_names(set).into_iter().map(|s| s.0).collect();
    names.sort();
    names
}

fn check(path: &Path, text: &str, as_json: bool) -> Run {
    let f = parse(text)?;
    let m = match load_valid_model(path)? {
        Ok(m) => m,
        Err(report) => return invalid_model("check", &report, as_json),
    };
    let states = sorted_names(&m, &model_check(&m, &f)?);
    if as_json {
        print_json(&doc("check", json!({ "formula": print(&f), "states": states })));
    } else {
        out!("{}", states.join(" "));
    }
    Ok(true)
}

fn validate(path: &Path, as_json: bool) -> Run {
    let m = load_model(path)?;
    let report = validate_model_with(
        &m,
        ValidateOptions {
            profile_cap: profile_cap()?,
        },
    );
    if as_json {
        print_json(&doc(
            "validate",
            json!({ "valid": report.is_valid(), "violations": report.violations }),
        ));
    } else if report.is_valid() {
        out!("valid");
    } else {
        for v in &report.violations {
            out!("{v}");
        }
    }
    Ok(report.is_valid())
}

#[derive(Serialize)]
struct AxiomResult {
    axiom: AxiomSchema,
    instance: String,
    #[serde(flatten)]
    verdict: Validity,
}

fn axioms(path: &Path, only: Option<AxiomSchema>, depth: usize, seed: u64, count: usize, as_json: bool) -> Run {
    let m = match load_valid_model(path)? {
        Ok(m) => m,
        Err(report) => return invalid_model("axioms", &report, as_json),
    };
    if m.num_agents() == 0 {
        return Err(UsageError("model has no agents".into()));
    }
    let schemas: Vec<AxiomSchema> = only.map_or_else(|| AxiomSchema::ALL.to_vec(), |a| vec![a]);
    let mut gen = FormulaGen::for_model(seed, &m);
    let mut instances = Vec::new();
    for &schema in &schemas {
        for _ in 0..count {
            let (a, b) = (gen.agent(), gen.agent());
            let bind = Bindings::new(&a, gen.formula(depth), gen.formula(depth)).with_b(&b);
            instances.push((schema, instantiate_axiom(schema, &bind)?));
        }
    }
    let verdicts = check_all_valid(&m, instances.iter().map(|(_, f)| f))?;
    let results: Vec<AxiomResult> = instances
        .into_iter()
        .zip(verdicts)
        .map(|((axiom, f), verdict)| AxiomResult {
            axiom,
            instance: print(&f),
            verdict,
        })
        .collect();
    let failures = results.iter().filter(|r| !r.verdict.is_valid()).count();
    if as_json {
        print_json(&doc(
            "axioms",
            json!({ "seed": seed, "depth": depth, "failures": failures, "results": results }),
        ));
    } else {
        out!("seed: {seed}");
        for schema in &schemas {
            let mine: Vec<&AxiomResult> = results.iter().filter(|r| r.axiom == *schema).collect();
            let bad: Vec<&&AxiomResult> = mine.iter().filter(|r| !r.verdict.is_valid()).collect();
            if bad.is_empty() {
                out!("{schema}: {} instances valid", mine.len());
            }
            for r in bad {
                if let Validity::Counterexample { state } = &r.verdict {
                    out!("{schema}: counterexample at {state}: {}", r.instance);
                }
            }
        }
    }
    Ok(failures == 0)
}

#[derive(Serialize, Default)]
struct SoundnessSummary {
    models: u64,
    axiom_instances: u64,
    lemma_instances: u64,
    rule_instances: u64,
    counterexamples: Vec<Value>,
}

fn soundness(seed: u64, count: u64, depth: usize, params: &ModelParams, as_json: bool) -> Run {
    let mut summary = SoundnessSummary::default();
    for i in 0..count {
        let model_seed = seed.wrapping_add(i);
        let m = random_model(&params.to_gen(model_seed))?;
        let mut gen = FormulaGen::for_model(model_seed, &m);
        let mut fail = |what: String, formula: &Formula, state: Option<StateId>| {
            summary
                .counterexamples
                .push(json!({ "modelSeed": model_seed, "what": what, "formula": print(formula), "state": state }));
        };
        for schema in AxiomSchema::ALL {
            let (a, b) = (gen.agent(), gen.agent());
            let inst = instantiate_axiom(
                schema,
                &Bindings::new(&a, gen.formula(depth), gen.formula(depth)).with_b(&b),
            )?;
            if let Validity::Counterexample { state } = check_validity(&m, &inst)? {
                fail(schema.to_string(), &inst, Some(state));
            }
            summary.axiom_instances += 1;
        }
        let (a, b) = (gen.agent(), gen.agent());
        let (phi, psi) = (gen.formula(depth), gen.formula(depth));
        for (name, lemma) in permitmc_core::deduction::derived_lemmas(&a, &b, &phi, &psi) {
            if let Validity::Counterexample { state } = check_validity(&m, &lemma)? {
                fail(name.to_string(), &lemma, Some(state));
            }
            summary.lemma_instances += 1;
        }
        let both = phi.clone().and(psi.clone());
        let mut rules = vec![
            RuleInstance::Ir2 {
                agent: a.as_str().into(),
                phi: both.clone(),
                psi: phi.clone(),
            },
            RuleInstance::Ir3 {
                agent: a.as_str().into(),
                phi: both.clone(),
                psi: phi.clone(),
            },
        ];
        if a != b {
            rules.push(RuleInstance::Ir4 {
                weak: vec![(a.as_str().into(), phi.clone())],
                strong: vec![(b.as_str().into(), phi.clone().not())],
            });
        }
        for rule in rules {
            if let RuleVerdict::Violated { state } = check_rule_locally(&m, &rule)? {
                fail(format!("{rule:?}"), &rule.conclusion(), Some(state));
            }
            summary.rule_instances += 1;
        }
        summary.models += 1;
    }
    let ok = summary.counterexamples.is_empty();
    if as_json {
        print_json(&doc("soundness", json!({ "seed": seed, "summary": summary })));
    } else {
        out!("seed: {seed}");
        out!(
            "{} models, {} axiom instances, {} lemma instances, {} rule instances, {} counterexamples",
            summary.models,
            summary.axiom_instances,
            summary.lemma_instances,
            summary.rule_instances,
            summary.counterexamples.len()
        );
        for c in &summary.counterexamples {
            out!("  {c}");
        }
    }
    Ok(ok)
}

fn prove(path: &Path, as_json: bool) -> Run {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let d = Derivation::from_json(&text)?;
    let verdict = verify_derivation(&d);
    if as_json {
        print_json(&doc("prove", &verdict));
    } else {
        match &verdict {
            DerivationVerdict::Accepted => out!("accepted ({} steps)", d.steps.len()),
            DerivationVerdict::Rejected { step, reason } => out!("rejected at step {step}: {reason}"),
        }
    }
    Ok(verdict.is_accepted())
}

fn witness_verify(target: Modality, path: &Path, prop: &str, closed_under: &[Modality]) -> Run {
    let m = match load_valid_model(path)? {
        Ok(m) => m,
        Err(report) => return invalid_model("witness", &report, true),
    };
    let family = TruthFamily::of_proposition(&m, prop);
    let closed: Vec<Modality> = if closed_under.is_empty() {
        target.others()
    } else {
        closed_under.to_vec()
    };
    let verdict = verify_witness_with(&m, target, prop, &family, &closed);
    print_json(&doc("witness", &verdict));
    Ok(verdict.is_witness())
}

fn witness_search(target: Modality, bounds: &SearchBounds) -> Run {
    let outcome = search_witness(target, bounds);
    let found = matches!(outcome, SearchOutcome::Found { .. });
    print_json(&doc(
        "witness",
        json!({ "seed": bounds.seed, "target": target, "bounds": bounds, "search": outcome }),
    ));
    Ok(found)
}

fn translate(path: &Path, out: Option<&Path>, verify: bool, formula: Option<&str>) -> Run {
    let formula = formula.map(parse).transpose()?;
    let m = match load_valid_model(path)? {
        Ok(m) => m,
        Err(report) => return invalid_model("translate", &report, true),
    };
    let am = expand_model(&m)?;
    let exported = serde_json::to_string_pretty(&am.to_doc())?;
    match out {
        Some(path) => fs::write(path, exported + "\n").map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
        None if !verify => out!("{exported}"),
        None => {}
    }
    if verify {
        let f = formula.expect("clap enforces --formula with --verify");
        let verdict = verify_translation_on(&am, &f)?;
        print_json(&doc(
            "translate",
            json!({ "formula": print(&f), "translation": translate_formula(&f).to_string(), "result": verdict }),
        ));
        return Ok(verdict.agrees());
    }
    Ok(true)
}

fn generate(params: &GenParams, out: Option<&Path>) -> Run {
    let m = random_model(params)?;
    let text = m.to_json_pretty();
    match out {
        Some(path) => {
            fs::write(path, text + "\n").map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            eprintln!("seed: {}", params.seed);
        }
        None => out!("{text}"),
    }
    Ok(true)
}

fn fixtures(run: bool, as_json: bool) -> Run {
    let mut listing = Vec::new();
    let mut outcomes = Vec::new();
    for id in catalog() {
        let fx = load_fixture(id)?;
        listing.push(json!({
            "id": fx.id,
            "description": fx.description,
            "variants": fx.variants.iter().map(|v| &v.name).collect::<Vec<_>>(),
        }));
        if run {
            outcomes.extend(run_expectations(&fx)?);
            for v in &fx.variants {
                if let Some(w) = &v.witness {
                    let family = TruthFamily::of_proposition(&v.model, &w.proposition);
                    let verdict = verify_witness_with(&v.model, w.target, &w.proposition, &family, &w.closed_under);
                    outcomes.push(permitmc_core::fixtures::ExpectationOutcome {
                        fixture: fx.id.clone(),
                        variant: v.name.clone(),
                        formula: format!("witness {} over {}", w.target, w.proposition),
                        expected: vec!["witness".into()],
                        model_check: vec![if verdict.is_witness() { "witness" } else { "no witness" }.into()],
                        naive: vec!["witness".into()],
                    });
                }
            }
        }
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if as_json {
        let mut body = json!({ "fixtures": listing });
        if run {
            body["results"] = serde_json::to_value(&outcomes)?;
            body["failed"] = json!(failed);
        }
        print_json(&doc("fixtures", body));
    } else if run {
        for o in &outcomes {
            let status = if o.passed() { "ok  " } else { "FAIL" };
            out!("{status} {}/{}: {}", o.fixture, o.variant, o.formula);
        }
        out!("{} of {} expectations passed", outcomes.len() - failed, outcomes.len());
    } else {
        for item in &listing {
            out!(
                "{:<18} {}",
                item["id"].as_str().unwrap(),
                item["description"].as_str().unwrap()
            );
        }
    }
    Ok(failed == 0)
}
