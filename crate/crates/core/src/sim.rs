//! Seeded Monte-Carlo rollouts of P1 strategies against a randomized P2,
//! an independent almost-sure reachability oracle, and a terminal play
//! loop with a human in P2's seat.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arena::{ActionId, Player, StateId, Strategy};
use crate::hypergame::Hypergame;

pub const RNG_NAME: &str = "ChaCha8Rng";
pub const ORACLE_LIMIT: usize = 10_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("P1 strategy is undefined at reached state `{0}`")]
    UndefinedStrategy(String),
    #[error("hypergame has {states} states; the oracle is limited to {limit}")]
    SizeGuard { states: usize, limit: usize },
    #[error("invalid rollout configuration: {0}")]
    Config(String),
    #[error("terminal i/o failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default)]
pub enum P2Policy {
    /// Uniform over `perm(v)`.
    #[default]
    UniformPerm,
    /// Uniform over the given support; states it leaves undefined fall back
    /// to `perm(v)`.
    Fixed(Strategy),
}

#[derive(Clone, Debug)]
pub struct RolloutConfig {
    pub episodes: usize,
    /// Defaults to `10 · |V|`.
    pub horizon: Option<usize>,
    pub seed: u64,
    pub p2_policy: P2Policy,
    pub keep_traces: bool,
}

impl RolloutConfig {
    pub fn new(episodes: usize, seed: u64) -> Self {
        RolloutConfig {
            episodes,
            horizon: None,
            seed,
            p2_policy: P2Policy::UniformPerm,
            keep_traces: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RolloutStats {
    pub episodes: usize,
    pub reached: usize,
    /// Mean steps among successful episodes.
    pub mean_steps: Option<f64>,
    pub seed: u64,
    pub horizon: usize,
    pub rng: &'static str,
    #[serde(skip)]
    pub traces: Option<Vec<Vec<StateId>>>,
}

/// Index into `support`, uniformly.
fn pick(rng: &mut ChaCha8Rng, support: &[ActionId]) -> ActionId {
    support[rng.gen_range(0..support.len())]
}

/// The episode's own stream: identical for a given `(seed, index)`
/// regardless of scheduling.
fn episode_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Outcome {
    steps: Option<usize>,
    trace: Vec<StateId>,
}

fn episode(
    h: &Hypergame,
    p1: &Strategy,
    start: StateId,
    cfg: &RolloutConfig,
    horizon: usize,
    index: usize,
) -> Result<Outcome, SimError> {
    let g = h.arena();
    let mut rng = episode_rng(cfg.seed, index);
    let mut v = start;
    let mut trace = vec![v];
    for step in 0..=horizon {
        if g.is_final(v) {
            return Ok(Outcome { steps: Some(step), trace });
        }
        if step == horizon {
            break;
        }
        let action = match g.owner(v) {
            Player::P1 => {
                if g.is_dead_end(v) {
                    break;
                }
                let support = p1
                    .support(v)
                    .ok_or_else(|| SimError::UndefinedStrategy(g.state_name(v).to_string()))?;
                pick(&mut rng, support)
            }
            Player::P2 => {
                let support = match &cfg.p2_policy {
                    P2Policy::Fixed(mu) => mu.support(v).unwrap_or(h.perm(v)),
                    P2Policy::UniformPerm => h.perm(v),
                };
                if support.is_empty() {
                    // P2 cannot move and loses
                    return Ok(Outcome { steps: Some(step), trace });
                }
                pick(&mut rng, support)
            }
        };
        v = g.successor(v, action).expect("strategies pick enabled actions");
        if cfg.keep_traces {
            trace.push(v);
        }
    }
    Ok(Outcome { steps: None, trace })
}

/// Runs `cfg.episodes` independent episodes from `start`. An episode
/// succeeds when it visits a final state (or P2 is left without a move)
/// within the horizon.
pub fn rollout(h: &Hypergame, p1: &Strategy, start: StateId, cfg: &RolloutConfig) -> Result<RolloutStats, SimError> {
    if cfg.episodes == 0 {
        return Err(SimError::Config("episodes must be positive".into()));
    }
    let horizon = cfg.horizon.unwrap_or(10 * h.num_states());
    if horizon == 0 {
        return Err(SimError::Config("horizon must be positive".into()));
    }
    let outcomes: Vec<Outcome> = (0..cfg.episodes)
        .into_par_iter()
        .map(|i| episode(h, p1, start, cfg, horizon, i))
        .collect::<Result<_, _>>()?;
    let successes: Vec<usize> = outcomes.iter().filter_map(|o| o.steps).collect();
    let mean_steps =
        (!successes.is_empty()).then(|| successes.iter().sum::<usize>() as f64 / successes.len() as f64);
    Ok(RolloutStats {
        episodes: cfg.episodes,
        reached: successes.len(),
        mean_steps,
        seed: cfg.seed,
        horizon,
        rng: RNG_NAME,
        traces: cfg.keep_traces.then(|| outcomes.into_iter().map(|o| o.trace).collect()),
    })
}

/// States from which P1 reaches a final state with probability one when
/// every P2 state moves uniformly over `perm(v)`. P2 states without moves
/// count as reached.
///
/// Repeatedly keeps the states that can reach the target inside the
/// current set, then discards P2 states with a `perm` move leaving the set
/// and P1 states with no move staying in it.
pub fn asw_oracle(h: &Hypergame) -> Result<Vec<StateId>, SimError> {
    let n = h.num_states();
    if n > ORACLE_LIMIT {
        return Err(SimError::SizeGuard {
            states: n,
            limit: ORACLE_LIMIT,
        });
    }
    let g = h.arena();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let v = StateId::new(i);
            match g.owner(v) {
                Player::P1 => g.moves(v).iter().map(|&(_, t)| t.index()).collect(),
                Player::P2 => h
                    .perm(v)
                    .iter()
                    .map(|&b| g.successor(v, b).unwrap().index())
                    .collect(),
            }
        })
        .collect();
    let target: Vec<bool> = (0..n)
        .map(|i| {
            let v = StateId::new(i);
            g.is_final(v) || (g.owner(v) == Player::P2 && succ[i].is_empty())
        })
        .collect();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, out) in succ.iter().enumerate() {
        for &t in out {
            pred[t].push(i);
        }
    }

    let mut alive = vec![true; n];
    loop {
        // backward search from the target through alive states
        let mut reach = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| alive[i] && target[i]).collect();
        for &i in &stack {
            reach[i] = true;
        }
        while let Some(t) = stack.pop() {
            for &p in &pred[t] {
                if alive[p] && !reach[p] {
                    reach[p] = true;
                    stack.push(p);
                }
            }
        }
        let mut changed = false;
        for i in 0..n {
            if alive[i] && !reach[i] {
                alive[i] = false;
                changed = true;
            }
        }
        // close the set: nature may not leave, P1 must be able to stay
        let mut pruned = true;
        while pruned {
            pruned = false;
            for i in 0..n {
                if !alive[i] || target[i] {
                    continue;
                }
                let v = StateId::new(i);
                let keep = match g.owner(v) {
                    Player::P1 => succ[i].iter().any(|&t| alive[t]),
                    Player::P2 => succ[i].iter().all(|&t| alive[t]),
                };
                if !keep {
                    alive[i] = false;
                    pruned = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((0..n).filter(|&i| alive[i]).map(StateId::new).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayOutcome {
    /// A final state was visited.
    Reached,
    /// P1 had no move.
    Stuck,
    /// P2 had no move.
    Cornered,
    Quit,
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayStep {
    pub state: String,
    pub player: Player,
    pub action: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    pub start: String,
    pub steps: Vec<PlayStep>,
    pub end: String,
    pub outcome: PlayOutcome,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PlayOptions {
    /// Show the hypergame state and `perm` instead of only what P2 sees.
    pub reveal_all: bool,
    pub seed: u64,
}

/// Turn loop with the human as P2. P1 samples `p1` (uniform over enabled
/// actions where `p1` is undefined). Input lines name an action or give its
/// number; `q` quits.
pub fn interactive_play<R: BufRead, W: Write>(
    h: &Hypergame,
    p1: &Strategy,
    start: StateId,
    opts: PlayOptions,
    mut input: R,
    mut out: W,
) -> Result<Transcript, SimError> {
    let g = h.arena();
    let base = h.base();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = start;
    let mut steps = Vec::new();
    let finish = |v: StateId, steps, outcome| Transcript {
        start: g.state_name(start).to_string(),
        steps,
        end: g.state_name(v).to_string(),
        outcome,
    };
    loop {
        if g.is_final(v) {
            writeln!(out, "P1 reached the objective at {}. P1 wins.", base.state_name(h.base_state(v)))?;
            return Ok(finish(v, steps, PlayOutcome::Reached));
        }
        match g.owner(v) {
            Player::P1 => {
                if g.is_dead_end(v) {
                    writeln!(out, "P1 has no move. P2 wins.")?;
                    return Ok(finish(v, steps, PlayOutcome::Stuck));
                }
                let enabled: Vec<ActionId> = g.enabled(v).collect();
                let a = pick(&mut rng, p1.support(v).unwrap_or(&enabled));
                writeln!(out, "P1 plays {}", g.action_name(a))?;
                steps.push(PlayStep {
                    state: g.state_name(v).to_string(),
                    player: Player::P1,
                    action: g.action_name(a).to_string(),
                });
                v = g.successor(v, a).unwrap();
            }
            Player::P2 => {
                let enabled: Vec<ActionId> = g.enabled(v).collect();
                if enabled.is_empty() {
                    writeln!(out, "P2 has no move. P1 wins.")?;
                    return Ok(finish(v, steps, PlayOutcome::Cornered));
                }
                let (s, k) = h.projection(v);
                writeln!(out, "state: {}", base.state_name(s))?;
                writeln!(out, "P1 can: {}", h.igraph().vertex(k).label(base))?;
                if opts.reveal_all {
                    let perm: Vec<&str> = h.perm(v).iter().map(|&b| g.action_name(b)).collect();
                    writeln!(out, "hypergame state: {}", g.state_name(v))?;
                    writeln!(out, "perceptually permissive: {}", perm.join(", "))?;
                }
                let menu: Vec<String> = enabled
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| format!("{}) {}", i + 1, g.action_name(b)))
                    .collect();
                let chosen = loop {
                    write!(out, "your move [{}] or q: ", menu.join("  "))?;
                    out.flush()?;
                    let mut line = String::new();
                    if input.read_line(&mut line)? == 0 {
                        writeln!(out)?;
                        return Ok(finish(v, steps, PlayOutcome::Eof));
                    }
                    let line = line.trim();
                    if line == "q" {
                        return Ok(finish(v, steps, PlayOutcome::Quit));
                    }
                    let by_number = line.parse::<usize>().ok().and_then(|i| i.checked_sub(1)).and_then(|i| enabled.get(i));
                    let by_name = enabled.iter().find(|&&b| g.action_name(b) == line);
                    match by_number.or(by_name) {
                        Some(&b) => break b,
                        None => writeln!(out, "unknown move `{line}`")?,
                    }
                };
                steps.push(PlayStep {
                    state: g.state_name(v).to_string(),
                    player: Player::P2,
                    action: g.action_name(chosen).to_string(),
                });
                v = g.successor(v, chosen).unwrap();
            }
        }
    }
}
