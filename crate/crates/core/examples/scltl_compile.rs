//! Compile the two capture-the-flag objectives and print their automata.

use deceptive_synth::ctf;
use deceptive_synth::scltl;

fn main() {
    for (name, text) in [("phi1", ctf::PHI1), ("phi2", ctf::PHI2)] {
        let f = scltl::parse(text, &ctf::PROPS).unwrap();
        let dfa = scltl::compile(&f).unwrap();
        println!("{name} = {f}");
        println!("  {} states, initial {}, accepting {:?}", dfa.num_states(), dfa.initial(), dfa.accepting_states());
        for q in 0..dfa.num_states() {
            for t in 0..dfa.num_states() {
                if let Some(guard) = dfa.guard(q, t) {
                    println!("  {q} -> {t} on {guard}");
                }
            }
        }
    }
}
