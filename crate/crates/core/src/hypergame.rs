//! The dynamic hypergame: the true game synchronized with P2's inference
//! graph, plus the perceptually permissive action map `perm`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::arena::{ActionId, ArenaBuilder, GameArena, Player, StateId, Strategy, StrategyKind};
use crate::attractor::{self, permissive_support, Solution};
use crate::perception::InferenceGraph;
use crate::set::StateSet;

#[derive(Debug, Error)]
pub enum HypergameError {
    #[error("initial state index {0} is out of range")]
    UnknownState(usize),
    #[error("initial inference vertex {0} is out of range")]
    UnknownVertex(usize),
    #[error("inference graph was built over a different action set")]
    ActionMismatch,
}

#[derive(Clone, Debug)]
pub struct Hypergame {
    arena: GameArena,
    base: GameArena,
    igraph: InferenceGraph,
    projection: Vec<(StateId, usize)>,
    index: HashMap<(StateId, usize), StateId>,
    perm: Vec<Vec<ActionId>>,
    true_solution: Solution,
    perceptual: Vec<Solution>,
}

impl Hypergame {
    /// Product of `g` and `ig`. With `initial`, only pairs reachable from it
    /// are kept (in breadth-first order); otherwise the full product in
    /// state-major order.
    pub fn build(
        g: &GameArena,
        ig: &InferenceGraph,
        initial: Option<&[(StateId, usize)]>,
    ) -> Result<Hypergame, HypergameError> {
        if ig.p1_actions() != g.player_actions(Player::P1).as_slice() {
            return Err(HypergameError::ActionMismatch);
        }
        let true_solution = attractor::solve(g);
        let perceptual: Vec<Solution> = ig
            .vertices()
            .par_iter()
            .map(|x| {
                let perceived = g
                    .restrict_p1_actions(x.actions())
                    .expect("inference vertices hold P1 actions");
                attractor::solve(&perceived)
            })
            .collect();

        let mut pairs: Vec<(StateId, usize)> = Vec::new();
        let mut index: HashMap<(StateId, usize), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut visit = |pair: (StateId, usize), pairs: &mut Vec<_>, queue: &mut VecDeque<_>| {
            index.entry(pair).or_insert_with(|| {
                let id = StateId::new(pairs.len());
                pairs.push(pair);
                queue.push_back(pair);
                id
            });
        };
        match initial {
            Some(init) => {
                for &(s, k) in init {
                    if s.index() >= g.num_states() {
                        return Err(HypergameError::UnknownState(s.index()));
                    }
                    if k >= ig.num_vertices() {
                        return Err(HypergameError::UnknownVertex(k));
                    }
                    visit((s, k), &mut pairs, &mut queue);
                }
                while let Some((s, k)) = queue.pop_front() {
                    for &(a, t) in g.moves(s) {
                        visit((t, ig.step(k, a)), &mut pairs, &mut queue);
                    }
                }
            }
            None => {
                for s in g.states() {
                    for k in 0..ig.num_vertices() {
                        visit((s, k), &mut pairs, &mut queue);
                    }
                }
            }
        }

        let mut builder = ArenaBuilder::new();
        for a in g.actions() {
            builder
                .add_action(g.action_name(a), g.action_owner(a))
                .expect("base action names are unique");
        }
        for &(s, k) in &pairs {
            let name = format!("{}@{}", g.state_name(s), ig.vertex(k).label(g));
            builder
                .add_state(&name, g.owner(s), g.is_final(s), g.labels(s).to_vec())
                .expect("product names are unique");
        }
        for (i, &(s, k)) in pairs.iter().enumerate() {
            for &(a, t) in g.moves(s) {
                let to = index[&(t, ig.step(k, a))];
                builder
                    .add_transition(StateId::new(i), a, to)
                    .expect("product inherits base ownership");
            }
        }
        let arena = builder.build_allowing_dead_ends();

        let perm = pairs
            .iter()
            .map(|&(s, k)| {
                if g.owner(s) != Player::P2 {
                    return Vec::new();
                }
                let win2 = &perceptual[k].win2;
                if win2.contains(s) {
                    permissive_support(g, win2, s)
                } else {
                    g.enabled(s).collect()
                }
            })
            .collect();

        Ok(Hypergame {
            arena,
            base: g.clone(),
            igraph: ig.clone(),
            projection: pairs,
            index,
            perm,
            true_solution,
            perceptual,
        })
    }

    /// The product arena; action ids coincide with the base game's.
    pub fn arena(&self) -> &GameArena {
        &self.arena
    }

    pub fn base(&self) -> &GameArena {
        &self.base
    }

    pub fn igraph(&self) -> &InferenceGraph {
        &self.igraph
    }

    pub fn num_states(&self) -> usize {
        self.arena.num_states()
    }

    pub fn projection(&self, v: StateId) -> (StateId, usize) {
        self.projection[v.index()]
    }

    pub fn base_state(&self, v: StateId) -> StateId {
        self.projection[v.index()].0
    }

    pub fn vertex(&self, v: StateId) -> usize {
        self.projection[v.index()].1
    }

    pub fn state_of(&self, s: StateId, vertex: usize) -> Option<StateId> {
        self.index.get(&(s, vertex)).copied()
    }

    /// `M(v)` at P2 states; empty at P1 states.
    pub fn perm(&self, v: StateId) -> &[ActionId] {
        &self.perm[v.index()]
    }

    pub fn true_solution(&self) -> &Solution {
        &self.true_solution
    }

    /// Solution of the perceptual game at inference vertex `k`.
    pub fn perceptual_solution(&self, k: usize) -> &Solution {
        &self.perceptual[k]
    }

    /// `(Win1(A1) × Γ) ∩ V`.
    pub fn lifted_true_win(&self) -> StateSet {
        StateSet::from_ids(
            self.num_states(),
            self.arena
                .states()
                .filter(|&v| self.true_solution.win1.contains(self.base_state(v))),
        )
    }

    /// Distinct base states among `set`'s members.
    pub fn project_set(&self, set: &StateSet) -> StateSet {
        StateSet::from_ids(self.base.num_states(), set.iter().map(|v| self.base_state(v)))
    }

    pub fn project_run(&self, run: &[StateId]) -> Vec<StateId> {
        run.iter().map(|&v| self.base_state(v)).collect()
    }

    /// P2 moving uniformly over `perm(v)`.
    pub fn perm_strategy(&self) -> Strategy {
        let mut zeta = Strategy::new(Player::P2, StrategyKind::RandomizedSupport);
        for v in self.arena.states() {
            if !self.perm(v).is_empty() {
                zeta.set(v, self.perm(v).to_vec());
            }
        }
        zeta
    }

    /// DOT rendering: blue = `sure`, green = `almost_sure \ sure`, red =
    /// rest. P1 states are ellipses, P2 boxes; final states doubly outlined.
    pub fn to_dot(&self, sure: &StateSet, almost_sure: Option<&StateSet>) -> String {
        let g = &self.arena;
        let mut out = String::from("digraph hypergame {\n  rankdir=LR;\n  node [style=filled];\n");
        for v in g.states() {
            let color = if sure.contains(v) {
                "lightblue"
            } else if almost_sure.is_some_and(|z| z.contains(v)) {
                "palegreen"
            } else {
                "lightcoral"
            };
            let shape = match g.owner(v) {
                Player::P1 => "ellipse",
                Player::P2 => "box",
            };
            let peripheries = if g.is_final(v) { 2 } else { 1 };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\", shape={shape}, fillcolor={color}, peripheries={peripheries}];",
                v.index(),
                g.state_name(v)
            );
        }
        for v in g.states() {
            for &(a, t) in g.moves(v) {
                let _ = writeln!(
                    out,
                    "  n{} -> n{} [label=\"{}\"];",
                    v.index(),
                    t.index(),
                    g.action_name(a)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}
