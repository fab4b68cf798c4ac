//! Inference graphs: the additive mechanism on the running example and the
//! class-based mechanism of the capture-the-flag game.

use deceptive_synth::ctf::{self, GridConfig};
use deceptive_synth::fixtures;
use deceptive_synth::perception::{build_inference_graph, InferenceGraph, InferenceMechanism, Perception};
use deceptive_synth::{GameArena, Player};

fn show(g: &GameArena, ig: &InferenceGraph) {
    for k in 0..ig.num_vertices() {
        println!("  {k}: {}", ig.vertex(k).label(g));
        for &a in ig.p1_actions() {
            if let Some(t) = ig.edge(k, a).filter(|&t| t != k) {
                println!("     --{}--> {t}", g.action_name(a));
            }
        }
    }
}

fn main() {
    let g = fixtures::running_example();
    let x0 = Perception::new([g.action_by_name("a2").unwrap()]);
    let ig = build_inference_graph(&g, &InferenceMechanism::Additive, &x0).unwrap();
    println!("running example, additive:");
    show(&g, &ig);

    let layout = GridConfig::from_json(include_str!("../../../layouts/paper-fig4.json")).unwrap();
    let ts = ctf::build_transition_system(&layout).unwrap();
    let (_, ig) = ctf::build_ctf_inference(&ts.arena).unwrap();
    println!("capture the flag, by action class ({} P1 actions):", ts.arena.player_actions(Player::P1).len());
    show(&ts.arena, &ig);
}
