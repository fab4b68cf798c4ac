//! Play P2 against the deceptive strategy on the running example. Type an
//! action name or number; `q` quits. Pass `--reveal-all` to see the
//! hypergame state.

use std::io;

use deceptive_synth::deception;
use deceptive_synth::fixtures;
use deceptive_synth::sim::{self, PlayOptions};

fn main() -> io::Result<()> {
    let h = fixtures::running_example_hypergame();
    let pi = deception::dasw(&h).strategy;
    let start = h.arena().state_by_name("s2@{a2}").unwrap();
    let opts = PlayOptions {
        reveal_all: std::env::args().any(|a| a == "--reveal-all"),
        seed: 0,
    };
    let transcript = sim::interactive_play(&h, &pi, start, opts, io::stdin().lock(), io::stdout())
        .map_err(io::Error::other)?;
    eprintln!("{}", transcript.to_json());
    Ok(())
}
