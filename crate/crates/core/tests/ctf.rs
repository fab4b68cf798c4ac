use deceptive_synth::ctf::{self, GridConfig, InitialSet, TransitionSystem};
use deceptive_synth::deception::{self, format_vod, vod_from_counts};
use deceptive_synth::Player;

const LAYOUT: &str = include_str!("../../../layouts/paper-fig4.json");

fn layouts() -> Vec<GridConfig> {
    let shipped = GridConfig::from_json(LAYOUT).unwrap();
    let mut loose = shipped.clone();
    loose.prune_sink_states = false;
    loose.p2_blocked_by_p1 = true;
    let mut everywhere = shipped.clone();
    everywhere.initial = InitialSet::AllIntact;
    vec![shipped, loose, everywhere]
}

fn check_transition_system(c: &GridConfig, ts: &TransitionSystem) {
    let g = &ts.arena;
    for s in g.states() {
        let here = ts.states[s.index()];
        assert_eq!(g.owner(s), here.turn);
        let p2_ok = c.p2_territory.contains(&here.p2)
            || c.fences.iter().enumerate().any(|(i, &f)| f == here.p2 && here.cut[i]);
        assert!(p2_ok, "P2 outside its territory at {here}");
        assert!(!c.walls.contains(&here.p1) && !c.walls.contains(&here.p2));
        for &(_, t) in g.moves(s) {
            let next = ts.states[t.index()];
            assert_ne!(next.turn, here.turn, "{here} -> {next}");
            for i in 0..2 {
                assert!(!here.cut[i] || next.cut[i], "fence {i} restored: {here} -> {next}");
            }
        }
    }
}

#[test]
fn gridworld_invariants() {
    for c in layouts() {
        let ts = ctf::build_transition_system(&c).unwrap();
        assert!(!ts.initial.is_empty());
        check_transition_system(&c, &ts);
    }
}

#[test]
fn private_actions_are_revealed() {
    let c = GridConfig::from_json(LAYOUT).unwrap();
    for phi in ["phi1", "phi2"] {
        let b = ctf::build_benchmark(&c, &ctf::objective(phi).unwrap()).unwrap();
        let h = &b.hypergame;
        let g = h.arena();
        let mut seen = [false; 2];
        for v in g.states() {
            let before = h.igraph().vertex(h.vertex(v));
            for &(a, t) in g.moves(v) {
                let after = h.igraph().vertex(h.vertex(t));
                assert!(before.is_subset(after));
                let name = g.action_name(a);
                if name == "Cut" || name.starts_with("Jump") {
                    assert_eq!(g.action_owner(a), Player::P1);
                    assert!(after.contains(a), "{name} not revealed at {}", g.state_name(t));
                    seen[usize::from(name != "Cut")] = true;
                }
            }
        }
        assert_eq!(seen, [true, true], "both private classes are used");
    }
}

#[test]
fn shipped_layout_rows() {
    let c = GridConfig::from_json(LAYOUT).unwrap();
    for phi in ["phi1", "phi2"] {
        let b = ctf::build_benchmark(&c, &ctf::objective(phi).unwrap()).unwrap();
        let [sw, dsw, dasw] = ctf::table_rows(&b);
        assert_eq!(dsw.projection, sw.projection);
        assert_eq!(dsw.vod, Some(0.0));
        assert!(dasw.vod.unwrap() > 0.0);
        assert!(dasw.region.unwrap() > dsw.region.unwrap());
        let expected = (dasw.projection - sw.projection) as f64 / sw.win2 as f64;
        assert_eq!(format_vod(dasw.vod.unwrap()), format_vod(expected));
        assert_eq!(dasw.vod, Some(vod_from_counts(dasw.projection, sw.projection, sw.win2)));

        let sure = deception::dsw(&b.hypergame);
        let almost = deception::dasw(&b.hypergame);
        assert!(sure.region.members().is_subset(almost.region.members()));
    }
}

#[test]
fn open_field_has_nothing_to_hide() {
    let c = GridConfig::from_json(
        r#"{"width": 2, "height": 2, "p2_territory": [[0, 1], [1, 1]], "fences": [],
            "flags": [[0, 1], [1, 1]], "p1_start": [0, 0], "p2_start": [1, 1]}"#,
    )
    .unwrap();
    let b = ctf::build_benchmark(&c, &ctf::objective("phi1").unwrap()).unwrap();
    let h = &b.hypergame;
    assert!(h.arena().states().all(|v| h.vertex(v) == 0));
    let [_, dsw, dasw] = ctf::table_rows(&b);
    assert_eq!((dsw.vod, dasw.vod), (Some(0.0), Some(0.0)));
}
