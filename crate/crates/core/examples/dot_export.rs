//! Graphviz rendering of the running-example hypergame: blue for deceptive
//! sure winning, green for almost-sure only, red for the rest.
//!
//! `cargo run --example dot_export | dot -Tsvg > hypergame.svg`

use deceptive_synth::deception;
use deceptive_synth::fixtures;

fn main() {
    let h = fixtures::running_example_hypergame();
    let sure = deception::dsw(&h).region.members().clone();
    let almost = deception::dasw(&h).region.members().clone();
    print!("{}", h.to_dot(&sure, Some(&almost)));
}
