//! Random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arena::{ArenaBuilder, GameArena, Player, StateId};
use crate::hypergame::Hypergame;
use crate::perception::{build_inference_graph, InferenceMechanism, Perception};
use crate::scltl::{Expr, Formula};

#[derive(Clone, Copy, Debug)]
pub struct GameParams {
    pub max_states: usize,
    pub max_p1_actions: usize,
    pub max_p2_actions: usize,
    /// Chance that a given action is enabled at a state of its owner.
    pub density: f64,
    pub final_prob: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams {
            max_states: 30,
            max_p1_actions: 4,
            max_p2_actions: 3,
            density: 0.6,
            final_prob: 0.15,
        }
    }
}

/// States `s0..`, P1 actions `a1..`, P2 actions `b1..`. Every state has at
/// least one enabled action.
pub fn random_game<R: Rng>(rng: &mut R, p: &GameParams) -> GameArena {
    let n = rng.gen_range(2..=p.max_states.max(2));
    let k1 = rng.gen_range(1..=p.max_p1_actions.max(1));
    let k2 = rng.gen_range(1..=p.max_p2_actions.max(1));
    let mut b = ArenaBuilder::new();
    let p1: Vec<_> = (1..=k1)
        .map(|i| b.add_action(&format!("a{i}"), Player::P1).unwrap())
        .collect();
    let p2: Vec<_> = (1..=k2)
        .map(|i| b.add_action(&format!("b{i}"), Player::P2).unwrap())
        .collect();
    for i in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::P1 } else { Player::P2 };
        b.add_state(&format!("s{i}"), owner, rng.gen_bool(p.final_prob), Vec::new())
            .unwrap();
    }
    for i in 0..n {
        let s = StateId::new(i);
        let own = if b.owner(s) == Player::P1 { &p1 } else { &p2 };
        let forced = rng.gen_range(0..own.len());
        for (j, &a) in own.iter().enumerate() {
            if j == forced || rng.gen_bool(p.density) {
                b.add_transition(s, a, StateId::new(rng.gen_range(0..n))).unwrap();
            }
        }
    }
    b.build().expect("every state has a move")
}

/// A uniformly random subset of P1's actions.
pub fn random_perception<R: Rng>(rng: &mut R, g: &GameArena) -> Perception {
    Perception::new(g.player_actions(Player::P1).into_iter().filter(|_| rng.gen_bool(0.5)))
}

/// Random `X ⊆ Y ⊆ A1`.
pub fn random_nested_perceptions<R: Rng>(rng: &mut R, g: &GameArena) -> (Perception, Perception) {
    let y = random_perception(rng, g);
    let x = Perception::new(y.actions().iter().copied().filter(|_| rng.gen_bool(0.5)));
    (x, y)
}

/// Random game, random `X0`, additive inference, product reachable from
/// `(s0, X0)`.
pub fn random_hypergame<R: Rng>(rng: &mut R, p: &GameParams) -> Hypergame {
    let g = random_game(rng, p);
    let x0 = random_perception(rng, &g);
    let ig = build_inference_graph(&g, &InferenceMechanism::Additive, &x0).expect("additive inference is valid");
    Hypergame::build(&g, &ig, Some(&[(StateId::new(0), 0)])).expect("state 0 exists")
}

/// Random scLTL formula of depth at most `depth` over `props`.
pub fn random_formula<R: Rng>(rng: &mut R, props: &[&str], depth: usize) -> Formula {
    let expr = random_expr(rng, props.len(), depth);
    Formula::new(props.iter().map(|p| p.to_string()).collect(), expr)
}

fn random_expr<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Expr {
    let leaf = |rng: &mut R| match rng.gen_range(0..10) {
        0 => Expr::True,
        1 => Expr::False,
        2..=5 => Expr::Prop(rng.gen_range(0..n)),
        _ => Expr::NotProp(rng.gen_range(0..n)),
    };
    if depth == 0 || n == 0 || rng.gen_bool(0.25) {
        return if n == 0 { [Expr::True, Expr::False].choose(rng).unwrap().clone() } else { leaf(rng) };
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => Expr::and(random_expr(rng, n, d), random_expr(rng, n, d)),
        1 => Expr::or(random_expr(rng, n, d), random_expr(rng, n, d)),
        2 => Expr::next(random_expr(rng, n, d)),
        3 => Expr::eventually(random_expr(rng, n, d)),
        _ => Expr::until(random_expr(rng, n, d), random_expr(rng, n, d)),
    }
}
