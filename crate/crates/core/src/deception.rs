//! Deceptive sure and almost-sure winning regions over a hypergame, their
//! strategies, and the value of deception.

use serde::Serialize;

use crate::arena::{ActionId, Player, StateId, Strategy, StrategyKind};
use crate::attractor::{ranked_attractor, sure_action, Region};
use crate::hypergame::Hypergame;
use crate::set::StateSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolveKind {
    Dsw,
    Dasw,
}

#[derive(Clone, Debug)]
pub struct DeceptiveSolveResult {
    pub kind: SolveKind,
    /// Rank 0 marks `(Win1(A1) × Γ) ∩ V`.
    pub region: Region,
    pub strategy: Strategy,
}

/// One round of the almost-sure computation.
#[derive(Clone, Debug)]
pub struct DaswRound {
    /// Candidate region `U_k` at the start of the round.
    pub candidate: StateSet,
    /// States that cannot reach `Z0` while staying in `U_k`, together with
    /// everything already outside `U_k`.
    pub trap: StateSet,
    /// Number of refinement steps until the trap stabilized.
    pub trap_iterations: usize,
    /// Number of pruning steps of the subsequent safety computation.
    pub safe_iterations: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DaswTrace {
    pub rounds: Vec<DaswRound>,
}

fn true_perm(h: &Hypergame) -> impl Fn(StateId) -> Vec<ActionId> + '_ {
    |v| h.perm(v).to_vec()
}

/// Successors of `v` that the solvers quantify over: every enabled action
/// at P1 states, `perm(v)` at P2 states.
fn successors(h: &Hypergame, perm: &impl Fn(StateId) -> Vec<ActionId>, v: StateId) -> Vec<StateId> {
    let g = h.arena();
    match g.owner(v) {
        Player::P1 => g.moves(v).iter().map(|&(_, t)| t).collect(),
        Player::P2 => perm(v)
            .into_iter()
            .map(|b| g.successor(v, b).expect("perm actions are enabled"))
            .collect(),
    }
}

/// Lifts the true game's sure strategy to P1 states of `z0`.
fn lift_sure(h: &Hypergame, z0: &StateSet, pi: &mut Strategy) {
    let g = h.arena();
    for v in z0.iter().filter(|&v| g.owner(v) == Player::P1) {
        let s = h.base_state(v);
        if let Ok(Some(a)) = sure_action(h.base(), &h.true_solution().win1, s) {
            pi.set(v, vec![a]);
        }
    }
}

/// Deceptive sure winning region: least fixed point from `Z0` where P1
/// needs one enabled action into the current set and P2 is pulled in when
/// every perceptually permissive action leads there.
pub fn dsw(h: &Hypergame) -> DeceptiveSolveResult {
    dsw_with_perm(h, true_perm(h))
}

pub(crate) fn dsw_with_perm(h: &Hypergame, perm: impl Fn(StateId) -> Vec<ActionId>) -> DeceptiveSolveResult {
    let g = h.arena();
    let z0 = h.lifted_true_win();
    let region = ranked_attractor(
        h.num_states(),
        &z0,
        |v| g.owner(v) == Player::P2,
        |v| successors(h, &perm, v),
    );
    let mut strategy = Strategy::new(Player::P1, StrategyKind::Deterministic);
    for v in region.members().iter().filter(|&v| g.owner(v) == Player::P1) {
        let rank = region.rank(v).unwrap();
        if rank == 0 {
            continue;
        }
        let a = g
            .moves(v)
            .iter()
            .find(|&&(_, t)| region.rank(t).is_some_and(|r| r < rank))
            .map(|&(a, _)| a)
            .expect("attractor rank has a witness");
        strategy.set(v, vec![a]);
    }
    lift_sure(h, &z0, &mut strategy);
    DeceptiveSolveResult {
        kind: SolveKind::Dsw,
        region,
        strategy,
    }
}

/// Deceptive almost-sure winning region.
///
/// Alternates two steps until the candidate `U` stops shrinking:
/// the trap `C` collects states of `U` from which `Z0 ∩ U` is unreachable
/// along moves inside `U` (P1 may use any action, P2 any `perm` action);
/// then `U` becomes the largest subset of `V \ C` in which every P1 state
/// keeps an action and every P2 state keeps all `perm` actions. `Z0` is
/// never pruned. Ranks are the positive-reachability layers of `Z0` inside
/// the final `U`, and the strategy at a rank-`i` P1 state is uniform over
/// actions landing in layers `< i`.
pub fn dasw(h: &Hypergame) -> DeceptiveSolveResult {
    dasw_with_trace(h).0
}

pub fn dasw_with_trace(h: &Hypergame) -> (DeceptiveSolveResult, DaswTrace) {
    dasw_with_perm(h, true_perm(h))
}

pub(crate) fn dasw_with_perm(
    h: &Hypergame,
    perm: impl Fn(StateId) -> Vec<ActionId>,
) -> (DeceptiveSolveResult, DaswTrace) {
    let g = h.arena();
    let n = h.num_states();
    let z0 = h.lifted_true_win();
    let succ: Vec<Vec<StateId>> = g.states().map(|v| successors(h, &perm, v)).collect();
    let mut trace = DaswTrace::default();
    let mut candidate = StateSet::full(n);

    loop {
        // trap: greatest Y ⊆ U \ Z0 closed under moves that stay in U
        let mut y = candidate.clone();
        y.difference_with(&z0);
        let mut trap_iterations = 0;
        loop {
            trap_iterations += 1;
            let next = StateSet::from_ids(
                n,
                y.iter().filter(|&v| {
                    succ[v.index()]
                        .iter()
                        .all(|&t| !candidate.contains(t) || y.contains(t))
                }),
            );
            if next == y {
                break;
            }
            y = next;
        }
        let mut trap = candidate.complement();
        trap.union_with(&y);

        // safety: prune V \ C until closed
        let mut next = trap.complement();
        let mut safe_iterations = 0;
        loop {
            safe_iterations += 1;
            let pruned = StateSet::from_ids(
                n,
                next.iter().filter(|&v| {
                    if z0.contains(v) {
                        return true;
                    }
                    let out = &succ[v.index()];
                    match g.owner(v) {
                        Player::P1 => out.iter().any(|&t| next.contains(t)),
                        Player::P2 => out.iter().all(|&t| next.contains(t)),
                    }
                }),
            );
            if pruned == next {
                break;
            }
            next = pruned;
        }

        trace.rounds.push(DaswRound {
            candidate: candidate.clone(),
            trap,
            trap_iterations,
            safe_iterations,
        });
        if next == candidate {
            break;
        }
        candidate = next;
    }

    let region = ranked_attractor(
        n,
        &z0,
        |_| false,
        |v| {
            if candidate.contains(v) {
                succ[v.index()].iter().copied().filter(|&t| candidate.contains(t)).collect()
            } else {
                Vec::new()
            }
        },
    );
    debug_assert_eq!(region.members(), &candidate, "every candidate state reaches Z0");

    let mut strategy = Strategy::new(Player::P1, StrategyKind::RandomizedSupport);
    for v in region.members().iter().filter(|&v| g.owner(v) == Player::P1) {
        let rank = region.rank(v).unwrap();
        if rank == 0 {
            continue;
        }
        let support: Vec<ActionId> = g
            .moves(v)
            .iter()
            .filter(|&&(_, t)| region.rank(t).is_some_and(|r| r < rank))
            .map(|&(a, _)| a)
            .collect();
        strategy.set(v, support);
    }
    lift_sure(h, &z0, &mut strategy);
    (
        DeceptiveSolveResult {
            kind: SolveKind::Dasw,
            region,
            strategy,
        },
        trace,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VodReport {
    pub win1_true: usize,
    pub win2_true: usize,
    pub deceptive_projection: usize,
    pub vod: f64,
}

/// `(projection − win1) / win2`, or 0 when `win2` is 0.
pub fn vod_from_counts(projection: usize, win1: usize, win2: usize) -> f64 {
    if win2 == 0 {
        0.0
    } else {
        (projection as f64 - win1 as f64) / win2 as f64
    }
}

/// Four decimals, truncated rather than rounded.
pub fn format_vod(vod: f64) -> String {
    // nudge by a few ulps so exact quotients like 0.9294 are not truncated down
    let scaled = (vod * 10_000.0 * (1.0 + 4.0 * f64::EPSILON)).floor() / 10_000.0;
    format!("{scaled:.4}")
}

/// Value of deception. The true-game counts range over base states that
/// occur in the hypergame, which is every base state unless the product
/// was restricted to a set that misses some of them.
pub fn vod(h: &Hypergame, r: &DeceptiveSolveResult) -> VodReport {
    let present = h.project_set(&StateSet::full(h.num_states()));
    let mut win1 = h.true_solution().win1.members().clone();
    win1.intersect_with(&present);
    let mut win2 = h.true_solution().win2.clone();
    win2.intersect_with(&present);
    let deceptive_projection = h.project_set(r.region.members()).len();
    VodReport {
        win1_true: win1.len(),
        win2_true: win2.len(),
        deceptive_projection,
        vod: vod_from_counts(deceptive_projection, win1.len(), win2.len()),
    }
}
