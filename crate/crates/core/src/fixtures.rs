//! The four-state running example used throughout the docs, tests and
//! examples: P1 owns `s1`, `s3`; P2 owns `s0`, `s2`; `F = {s0}`; `a1` is
//! P1's private action.

use crate::arena::GameArena;
use crate::hypergame::Hypergame;
use crate::perception::PerceptionDocument;

pub const RUNNING_EXAMPLE_GAME: &str = include_str!("../fixtures/running_example.json");
pub const RUNNING_EXAMPLE_PERCEPTION: &str = include_str!("../fixtures/running_example_perception.json");

pub fn running_example() -> GameArena {
    GameArena::from_json(RUNNING_EXAMPLE_GAME).expect("bundled fixture is valid")
}

/// The reachable hypergame from `(s2, {a2})`: seven product states.
pub fn running_example_hypergame() -> Hypergame {
    let g = running_example();
    let doc = PerceptionDocument::from_json(RUNNING_EXAMPLE_PERCEPTION).expect("bundled fixture is valid");
    let (mechanism, x0) = doc.resolve(&g).expect("bundled fixture is valid");
    let ig = crate::perception::build_inference_graph(&g, &mechanism, &x0).expect("valid inference graph");
    let s2 = g.state_by_name("s2").unwrap();
    Hypergame::build(&g, &ig, Some(&[(s2, 0)])).expect("valid initial pair")
}
