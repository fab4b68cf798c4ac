use deceptive_synth::deception;
use deceptive_synth::fixtures;
use deceptive_synth::sim::{self, PlayOptions, PlayOutcome, RolloutConfig};

#[test]
fn stubborn_p2_never_sees_the_private_action() {
    let h = fixtures::running_example_hypergame();
    let pi = deception::dasw(&h).strategy;
    let start = h.arena().state_by_name("s2@{a2}").unwrap();
    let input = "b2\n".repeat(25);
    let t = sim::interactive_play(&h, &pi, start, PlayOptions::default(), input.as_bytes(), Vec::new()).unwrap();
    assert_eq!(t.outcome, PlayOutcome::Eof);
    assert_eq!(t.steps.len(), 50);
    for step in &t.steps {
        match step.state.as_str() {
            "s2@{a2}" => assert_eq!(step.action, "b2"),
            "s3@{a2}" => assert_eq!(step.action, "a2"),
            other => panic!("left the oscillation at {other}"),
        }
    }
}

#[test]
fn game_over_before_the_first_move() {
    let h = fixtures::running_example_hypergame();
    let pi = deception::dasw(&h).strategy;
    let start = h.arena().state_by_name("s0@{a1,a2}").unwrap();
    let mut screen = Vec::new();
    let t = sim::interactive_play(&h, &pi, start, PlayOptions::default(), &b""[..], &mut screen).unwrap();
    assert_eq!(t.outcome, PlayOutcome::Reached);
    assert!(t.steps.is_empty());
    assert!(String::from_utf8(screen).unwrap().contains("P1 wins"));
}

#[test]
fn quitting_and_bad_input() {
    let h = fixtures::running_example_hypergame();
    let pi = deception::dasw(&h).strategy;
    let start = h.arena().state_by_name("s2@{a2}").unwrap();
    let mut screen = Vec::new();
    let opts = PlayOptions { reveal_all: true, seed: 1 };
    let t = sim::interactive_play(&h, &pi, start, opts, &b"7\n\nb3\nq\n"[..], &mut screen).unwrap();
    assert_eq!(t.outcome, PlayOutcome::Quit);
    let screen = String::from_utf8(screen).unwrap();
    assert_eq!(screen.matches("unknown move").count(), 3);
    assert!(screen.contains("perceptually permissive: b1, b2"));
    assert!(t.to_json().contains("\"outcome\": \"quit\""));
}

#[test]
fn rollout_statistics_serialize() {
    let h = fixtures::running_example_hypergame();
    let pi = deception::dasw(&h).strategy;
    let start = h.arena().state_by_name("s3@{a2}").unwrap();
    let stats = sim::rollout(&h, &pi, start, &RolloutConfig::new(100, 5)).unwrap();
    let v: serde_json::Value = serde_json::to_value(&stats).unwrap();
    for key in ["episodes", "reached", "mean_steps", "seed", "horizon", "rng"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["horizon"], 70);
}
