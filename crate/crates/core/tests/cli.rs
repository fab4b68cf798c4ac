use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use deceptive_synth::attractor::Region;
use deceptive_synth::cli::{self, Cli};
use deceptive_synth::perception::PerceptionDocument;
use deceptive_synth::scltl::Dfa;
use deceptive_synth::{GameArena, Player, Strategy};
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn layout() -> String {
    format!("{}/../../layouts/paper-fig4.json", env!("CARGO_MANIFEST_DIR"))
}

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["deceptive".to_string(), "--out-dir".into(), out.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    cli::run_with(argv, &mut &b""[..], &mut Vec::new())
}

fn hyper_args(cmd: &str) -> Vec<String> {
    vec![
        cmd.into(),
        "--game".into(),
        fixture("running_example.json"),
        "--perception".into(),
        fixture("running_example_perception.json"),
        "--initial".into(),
        "s2".into(),
    ]
}

fn run_hyper(out: &Path, cmd: &str, extra: &[&str]) -> i32 {
    let mut args = hyper_args(cmd);
    args.extend(extra.iter().map(|s| s.to_string()));
    run(out, &args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

fn json(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&read(dir, file)).unwrap()
}

#[test]
fn solve_dasw_outputs_reparse() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    assert_eq!(run_hyper(out, "solve-dasw", &[]), 0);
    let h = GameArena::from_json(&read(out, "hypergame.json")).unwrap();
    assert_eq!(h.num_states(), 7);
    let region = Region::from_json(&h, &read(out, "region.json")).unwrap();
    assert_eq!(region.len(), 5);
    let pi = Strategy::from_json(&h, Player::P1, &read(out, "strategy.json")).unwrap();
    pi.validate(&h).unwrap();
    let vod = json(out, "vod.json");
    assert_eq!(vod["vod"], 1.0);
    assert_eq!(vod["deceptive_projection"], 4);

    let manifest = json(out, "manifest.json");
    assert_eq!(manifest["command"], "solve-dasw");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    let digest = manifest["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn solve_dsw_has_no_deception_value() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_hyper(tmp.path(), "solve-dsw", &[]), 0);
    assert_eq!(json(tmp.path(), "vod.json")["vod"], 0.0);
}

#[test]
fn solve_game_and_perceptual_game() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let game = fixture("running_example.json");
    assert_eq!(run(out, &["solve-game", "--game", &game]), 0);
    let g = GameArena::from_json(&fs::read_to_string(&game).unwrap()).unwrap();
    assert_eq!(Region::from_json(&g, &read(out, "win1.json")).unwrap().len(), 2);
    let perception = fixture("running_example_perception.json");
    assert_eq!(run(out, &["solve-game", "--game", &game, "--perception", &perception]), 0);
    assert_eq!(json(out, "win2.json"), serde_json::json!(["s1", "s2", "s3"]));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        assert_eq!(run_hyper(dir, "solve-dasw", &[]), 0);
        assert_eq!(run_hyper(dir, "simulate", &["--start", "s2", "--episodes", "500", "--seed", "9"]), 0);
    }
    for file in ["hypergame.json", "region.json", "strategy.json", "vod.json", "stats.json"] {
        assert_eq!(read(a.path(), file), read(b.path(), file), "{file}");
    }
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(strip(json(a.path(), "manifest.json")), strip(json(b.path(), "manifest.json")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    assert_eq!(run(out, &["solve-dasw", "--game", "/no/such/game.json"]), 2);
    assert_eq!(run(out, &["frobnicate"]), 2);
    assert_eq!(run_hyper(out, "solve-dasw", &["--max-states", "3"]), 3);
    assert_eq!(run_hyper(out, "simulate", &["--start", "nowhere"]), 2);
    // the sure strategy is undefined once the play leaves its region
    assert_eq!(run_hyper(out, "simulate", &["--start", "s2@{a1,a2}", "--solver", "dsw"]), 2);
    assert_eq!(run(out, &["compile-scltl", "--formula", "F (a & X b", "--props", "a,b"]), 2);
    assert_eq!(run(out, &["compile-scltl", "--formula", "!F a", "--props", "a"]), 2);
}

#[test]
fn simulate_reports_oracle_membership() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    assert_eq!(run_hyper(out, "simulate", &["--start", "s2@{a2}", "--oracle", "--episodes", "1000"]), 0);
    let stats = json(out, "stats.json");
    assert_eq!(stats["reached"], 1000);
    assert_eq!(stats["in_oracle"], true);
    assert_eq!(stats["rng"], "ChaCha8Rng");
    assert_eq!(
        run_hyper(out, "simulate", &["--start", "s2@{a1,a2}", "--solver", "uniform", "--episodes", "1000"]),
        0
    );
    assert_eq!(json(out, "stats.json")["reached"], 0);
}

fn fill_counts(dot: &str) -> [usize; 3] {
    ["lightblue", "palegreen", "lightcoral"].map(|c| dot.matches(&format!("fillcolor={c}")).count())
}

#[test]
fn dot_export_colours() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    assert_eq!(run_hyper(out, "export-dot", &[]), 0);
    assert_eq!(fill_counts(&read(out, "hypergame.dot")), [3, 2, 2]);
    assert_eq!(run_hyper(out, "export-dot", &["--dsw-only"]), 0);
    assert_eq!(fill_counts(&read(out, "hypergame.dot")), [3, 0, 4]);

    assert_eq!(run_hyper(out, "solve-dasw", &[]), 0);
    let region: PathBuf = out.join("almost.json");
    fs::rename(out.join("region.json"), &region).unwrap();
    assert_eq!(run_hyper(out, "export-dot", &["--almost-sure", region.to_str().unwrap()]), 0);
    assert_eq!(fill_counts(&read(out, "hypergame.dot")), [3, 2, 2]);
    fs::write(&region, "[{\"state\": \"nowhere\", \"rank\": 0}]").unwrap();
    assert_eq!(run_hyper(out, "export-dot", &["--almost-sure", region.to_str().unwrap()]), 2);

    let game = fixture("running_example.json");
    assert_eq!(run(out, &["export-dot", "--game", &game]), 0);
    assert_eq!(fill_counts(&read(out, "hypergame.dot")), [2, 0, 2]);
}

#[test]
fn compile_writes_a_loadable_dfa() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let reference = fixture("dfa_phi1.json");
    assert_eq!(run(out, &["compile-scltl", "--formula", "F a & F b", "--props", "a,b", "--check", &reference]), 0);
    let dfa = Dfa::from_json(&read(out, "dfa.json")).unwrap();
    assert_eq!(dfa.num_states(), 4);
    assert!(read(out, "dfa.dot").starts_with("digraph"));
}

#[test]
fn ctf_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let layout = layout();
    assert_eq!(run(out, &["gen-ctf", "--layout", &layout, "--formula", "phi2", "--summary"]), 0);
    let game = GameArena::from_json_allowing_dead_ends(&read(out, "game.json")).unwrap();
    let doc = PerceptionDocument::from_json(&read(out, "perception.json")).unwrap();
    doc.resolve(&game).unwrap();
    GameArena::from_json(&read(out, "transition_system.json")).unwrap();
    let h = GameArena::from_json_allowing_dead_ends(&read(out, "hypergame.json")).unwrap();
    assert!(h.num_states() > game.num_states());
    assert!(GameArena::from_json(&read(out, "hypergame.json")).is_err(), "pruning leaves dead-ends");

    assert_eq!(run(out, &["bench-ctf", "--layout", &layout, "--formula", "phi1"]), 0);
    let rows = json(out, "table.json");
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert_eq!(rows[1]["vod"], 0.0);
    assert!(read(out, "table.csv").lines().count() == 4);
    assert_eq!(run(out, &["bench-ctf", "--layout", &layout, "--formula", "G FLAG1"]), 2);

    assert_eq!(run(out, &["solve-dasw", "--layout", &layout, "--formula", "phi2"]), 0);
    assert!(json(out, "vod.json")["vod"].as_f64().unwrap() > 0.0);
}

#[test]
fn play_through_the_library_entry_point() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["deceptive".to_string(), "--out-dir".into(), tmp.path().display().to_string()];
    args.extend(hyper_args("play"));
    args.extend(["--start".into(), "s2".into(), "--reveal-all".into()]);
    let cli = Cli::try_parse_from(args).unwrap();
    let mut screen = Vec::new();
    cli::execute(&cli, &mut &b"b2\nb1\nq\n"[..], &mut screen).unwrap();
    let screen = String::from_utf8(screen).unwrap();
    assert!(screen.contains("hypergame state: s2@{a2}"));
    let transcript = json(tmp.path(), "transcript.json");
    let actions: Vec<&str> = transcript["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["action"].as_str().unwrap())
        .collect();
    assert_eq!(actions, ["b2", "a2", "b1", "a1"]);
    assert_eq!(transcript["outcome"], "reached");
}
