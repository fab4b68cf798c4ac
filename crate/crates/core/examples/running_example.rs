//! Solve the four-state running example: the true game, P2's perceptual
//! game, and the deceptive regions of the hypergame.

use deceptive_synth::attractor;
use deceptive_synth::deception::{self, format_vod};
use deceptive_synth::fixtures;
use deceptive_synth::Player;

fn main() {
    let g = fixtures::running_example();
    let names = |g: &deceptive_synth::GameArena, it: &mut dyn Iterator<Item = deceptive_synth::StateId>| {
        it.map(|s| g.state_name(s).to_string()).collect::<Vec<_>>().join(", ")
    };

    let sol = attractor::solve(&g);
    println!("true game:       Win1 = {{{}}}", names(&g, &mut sol.win1.members().iter()));
    println!("                 Win2 = {{{}}}", names(&g, &mut sol.win2.iter()));

    let a2 = g.action_by_name("a2").unwrap();
    let perceived = g.restrict_p1_actions(&[a2].into()).unwrap();
    let sol = attractor::solve(&perceived);
    println!("P2 believes:     Win1 = {{{}}}", names(&perceived, &mut sol.win1.members().iter()));

    let h = fixtures::running_example_hypergame();
    let hg = h.arena();
    for (label, r) in [("DSW", deception::dsw(&h)), ("DASW", deception::dasw(&h))] {
        let report = deception::vod(&h, &r);
        println!(
            "{label:<5} region = {{{}}}  VoD = {}",
            names(hg, &mut r.region.members().iter()),
            format_vod(report.vod)
        );
        for (v, support) in r.strategy.iter() {
            if hg.owner(v) == Player::P1 {
                let acts: Vec<&str> = support.iter().map(|&a| hg.action_name(a)).collect();
                println!("      {:<12} -> {}", hg.state_name(v), acts.join(" | "));
            }
        }
    }
}
