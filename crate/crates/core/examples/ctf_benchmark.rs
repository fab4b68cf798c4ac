//! Capture-the-flag rows for both objectives on the bundled layout, or on
//! a layout file given as the first argument.

use std::time::Instant;

use deceptive_synth::ctf::{self, GridConfig};

fn main() {
    let layout = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable layout"),
        None => include_str!("../../../layouts/paper-fig4.json").to_string(),
    };
    let c = GridConfig::from_json(&layout).expect("valid layout");
    for name in ["phi1", "phi2"] {
        let start = Instant::now();
        let b = ctf::build_benchmark(&c, &ctf::objective(name).unwrap()).unwrap();
        println!("{name}: {} transition-system states", b.ts.arena.num_states());
        println!("{}", ctf::TABLE_HEADER);
        for row in ctf::table_rows(&b) {
            println!("{}", row.render());
        }
        println!("({:.2?})\n", start.elapsed());
    }
}
