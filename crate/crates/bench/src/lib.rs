//! Workloads shared by the benchmarks in `benches/`.

use permitmc_core::{random_model, Formula, GenParams, Modality, TransitionSystem};

/// `k` nested modal operators cycling through all four modalities, with a
/// different side disjunct at each level so nothing is shared.
pub fn chain(k: usize) -> Formula {
    let mut f = Formula::prop("p");
    for i in 0..k {
        let kind = Modality::ALL[i % 4];
        let agent = if i % 3 == 0 { "a" } else { "b" };
        let side = if i % 2 == 0 {
            Formula::prop("q")
        } else {
            Formula::prop("p").not()
        };
        f = Formula::modal(kind, agent, f.or(side));
    }
    f
}

/// Two-agent model with up to three actions each and branching three.
pub fn model(states: usize, seed: u64) -> TransitionSystem {
    random_model(&GenParams {
        seed,
        num_states: states,
        max_actions: 3,
        branching: 3,
        ..GenParams::default()
    })
    .expect("benchmark parameters are valid")
}
