//! Rollouts of the deceptive almost-sure strategy against P2 playing
//! uniformly over its perceptually permissive moves.

use deceptive_synth::deception;
use deceptive_synth::fixtures;
use deceptive_synth::sim::{self, RolloutConfig};
use deceptive_synth::{Player, Strategy};

fn main() {
    let h = fixtures::running_example_hypergame();
    let g = h.arena();
    let r = deception::dasw(&h);
    let oracle = sim::asw_oracle(&h).unwrap();
    let cfg = RolloutConfig::new(10_000, 42);
    let uniform = Strategy::uniform_enabled(g, Player::P1);
    for v in g.states() {
        let pi = if r.region.contains(v) { &r.strategy } else { &uniform };
        let stats = sim::rollout(&h, pi, v, &cfg).unwrap();
        println!(
            "{:<12} in DASW: {:<5} in oracle: {:<5} reached {:>5}/{}  mean steps {}",
            g.state_name(v),
            r.region.contains(v),
            oracle.contains(&v),
            stats.reached,
            stats.episodes,
            stats.mean_steps.map_or("-".into(), |m| format!("{m:.2}"))
        );
    }
}
