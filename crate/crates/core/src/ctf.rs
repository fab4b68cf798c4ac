//! Capture-the-flag gridworld: transition system, P2's inference graph,
//! benchmark objectives and Table-shaped reports.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ActionId, ArenaBuilder, GameArena, Player, StateId};
use crate::attractor;
use crate::deception::{self, vod_from_counts};
use crate::hypergame::{Hypergame, HypergameError};
use crate::perception::{build_inference_graph, ActionClass, InferenceGraph, InferenceMechanism, Perception, PerceptionError};
use crate::scltl::{self, Formula, ScltlError};
use crate::set::StateSet;

pub type Cell = (usize, usize);

pub const FLAG1: &str = "FLAG1";
pub const FLAG2: &str = "FLAG2";
pub const COLLIDE: &str = "collide";
pub const PROPS: [&str; 3] = [FLAG1, FLAG2, COLLIDE];
pub const PHI1: &str = "F FLAG1 & F FLAG2";
pub const PHI2: &str = "(!FLAG2 & !collide) U FLAG1 & !collide U FLAG2";

/// P1's actions in id order; the order fixes the inference-graph numbering.
pub const P1_ACTIONS: [&str; 9] = ["N", "E", "S", "W", "Cut", "JumpN", "JumpE", "JumpS", "JumpW"];
pub const P2_ACTIONS: [&str; 4] = ["N2", "E2", "S2", "W2"];

#[derive(Debug, Error)]
pub enum CtfError {
    #[error("cell ({}, {}) is off the {width}x{height} grid", .cell.0, .cell.1)]
    OffGrid { cell: Cell, width: usize, height: usize },
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("unknown formula `{0}`; expected phi1, phi2 or a formula over FLAG1, FLAG2, collide")]
    UnknownFormula(String),
    #[error(transparent)]
    Formula(#[from] ScltlError),
    #[error(transparent)]
    Perception(#[from] PerceptionError),
    #[error(transparent)]
    Hypergame(#[from] HypergameError),
    #[error("malformed layout: {0}")]
    Schema(#[from] serde_json::Error),
}

/// Which game states the reachable restriction starts from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSet {
    /// Only `(p1_start, p2_start)` with fences intact and P1 to move.
    #[default]
    Start,
    /// Every placement with fences intact, P1 to move, players apart.
    AllIntact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    /// Defaults to the complement of `p2_territory`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_territory: Option<Vec<Cell>>,
    pub p2_territory: Vec<Cell>,
    #[serde(default)]
    pub walls: Vec<Cell>,
    #[serde(default = "default_fences")]
    pub fences: Vec<Cell>,
    pub flags: [Cell; 2],
    pub p1_start: Cell,
    pub p2_start: Cell,
    #[serde(default)]
    pub initial_inference_vertex: usize,
    #[serde(default)]
    pub initial: InitialSet,
    /// Whether P1 may not step onto P2's cell.
    #[serde(default = "yes")]
    pub p1_blocked_by_p2: bool,
    /// Whether P2 may not step onto P1's cell.
    #[serde(default)]
    pub p2_blocked_by_p1: bool,
    /// Drop product states whose DFA state can no longer accept, together
    /// with the moves into them.
    #[serde(default)]
    pub prune_sink_states: bool,
}

fn default_fences() -> Vec<Cell> {
    vec![(0, 3), (3, 3)]
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    /// `N` increases `y`, `E` increases `x`.
    fn offset(self) -> (isize, isize) {
        match self {
            Dir::N => (0, 1),
            Dir::E => (1, 0),
            Dir::S => (0, -1),
            Dir::W => (-1, 0),
        }
    }
}

/// One state of the gridworld. `cut[i]` records whether fence `i` is cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtfState {
    pub p1: Cell,
    pub p2: Cell,
    pub cut: [bool; 2],
    pub turn: Player,
}

impl fmt::Display for CtfState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{}|{},{}|{}{}|{}",
            self.p1.0,
            self.p1.1,
            self.p2.0,
            self.p2.1,
            u8::from(self.cut[0]),
            u8::from(self.cut[1]),
            self.turn
        )
    }
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<GridConfig, CtfError> {
        let c: GridConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    fn check(&self, cell: Cell) -> Result<(), CtfError> {
        if cell.0 >= self.width || cell.1 >= self.height {
            return Err(CtfError::OffGrid {
                cell,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CtfError> {
        let bad = |m: String| Err(CtfError::Layout(m));
        if self.width == 0 || self.height == 0 {
            return bad("empty grid".into());
        }
        let cells = self
            .p2_territory
            .iter()
            .chain(self.p1_territory.iter().flatten())
            .chain(&self.walls)
            .chain(&self.fences)
            .chain(&self.flags)
            .chain([&self.p1_start, &self.p2_start]);
        for &c in cells {
            self.check(c)?;
        }
        if self.fences.len() > 2 {
            return bad("at most two fences are supported".into());
        }
        let p2: BTreeSet<Cell> = self.p2_territory.iter().copied().collect();
        if let Some(p1) = &self.p1_territory {
            let p1: BTreeSet<Cell> = p1.iter().copied().collect();
            if !p1.is_disjoint(&p2) || p1.len() + p2.len() != self.width * self.height {
                return bad("territories must partition the grid".into());
            }
        }
        let walls: BTreeSet<Cell> = self.walls.iter().copied().collect();
        let fences: BTreeSet<Cell> = self.fences.iter().copied().collect();
        if fences.len() != self.fences.len() || !walls.is_disjoint(&fences) {
            return bad("walls and fences must be distinct cells".into());
        }
        for flag in self.flags {
            if walls.contains(&flag) || fences.contains(&flag) {
                return bad(format!("flag at {flag:?} overlaps a wall or fence"));
            }
            if !p2.contains(&flag) {
                return bad(format!("flag at {flag:?} is outside P2's territory"));
            }
        }
        if self.flags[0] == self.flags[1] {
            return bad("flags must differ".into());
        }
        if self.is_blocked(self.p1_start, [false; 2]) {
            return bad("P1 starts on a wall or fence".into());
        }
        if !self.p2_may_stand(self.p2_start, [false; 2]) {
            return bad("P2 must start on a free cell of its territory".into());
        }
        if self.p1_start == self.p2_start {
            return bad("players start on the same cell".into());
        }
        if self.initial_inference_vertex >= 4 {
            return bad("inference vertex must be 0..=3".into());
        }
        Ok(())
    }

    fn step(&self, c: Cell, d: Dir, k: isize) -> Option<Cell> {
        let (dx, dy) = d.offset();
        let x = c.0 as isize + dx * k;
        let y = c.1 as isize + dy * k;
        (x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height).then_some((x as usize, y as usize))
    }

    fn is_wall(&self, c: Cell) -> bool {
        self.walls.contains(&c)
    }

    fn intact_fence(&self, c: Cell, cut: [bool; 2]) -> Option<usize> {
        self.fences.iter().position(|&f| f == c).filter(|&i| !cut[i])
    }

    /// Wall or intact fence.
    fn is_blocked(&self, c: Cell, cut: [bool; 2]) -> bool {
        self.is_wall(c) || self.intact_fence(c, cut).is_some()
    }

    fn p2_may_stand(&self, c: Cell, cut: [bool; 2]) -> bool {
        if self.is_blocked(c, cut) {
            return false;
        }
        self.p2_territory.contains(&c) || self.fences.iter().position(|&f| f == c).is_some_and(|i| cut[i])
    }

    fn labels(&self, s: &CtfState) -> Vec<String> {
        let mut out = Vec::new();
        if s.p1 == self.flags[0] {
            out.push(FLAG1.to_string());
        }
        if s.p1 == self.flags[1] {
            out.push(FLAG2.to_string());
        }
        if s.p1 == s.p2 {
            out.push(COLLIDE.to_string());
        }
        out
    }

    /// Moves from `s` as `(action name, successor)` in action order.
    pub fn moves(&self, s: &CtfState) -> Vec<(&'static str, CtfState)> {
        let mut out = Vec::new();
        match s.turn {
            Player::P1 => {
                let enterable = |c: Cell| !self.is_blocked(c, s.cut) && !(self.p1_blocked_by_p2 && c == s.p2);
                let next = |p1: Cell, cut: [bool; 2]| CtfState {
                    p1,
                    p2: s.p2,
                    cut,
                    turn: Player::P2,
                };
                for (i, d) in Dir::ALL.into_iter().enumerate() {
                    if let Some(c) = self.step(s.p1, d, 1).filter(|&c| enterable(c)) {
                        out.push((P1_ACTIONS[i], next(c, s.cut)));
                    }
                }
                let target = Dir::ALL
                    .into_iter()
                    .filter_map(|d| self.step(s.p1, d, 1))
                    .filter_map(|c| self.intact_fence(c, s.cut))
                    .min();
                if let Some(i) = target {
                    let mut cut = s.cut;
                    cut[i] = true;
                    out.push(("Cut", next(s.p1, cut)));
                }
                for (i, d) in Dir::ALL.into_iter().enumerate() {
                    let over = self.step(s.p1, d, 1).is_some_and(|c| self.is_wall(c));
                    if let Some(c) = self.step(s.p1, d, 2).filter(|&c| over && enterable(c)) {
                        out.push((P1_ACTIONS[5 + i], next(c, s.cut)));
                    }
                }
            }
            Player::P2 => {
                for (i, d) in Dir::ALL.into_iter().enumerate() {
                    let enterable = |c: Cell| self.p2_may_stand(c, s.cut) && !(self.p2_blocked_by_p1 && c == s.p1);
                    if let Some(c) = self.step(s.p2, d, 1).filter(|&c| enterable(c)) {
                        out.push((
                            P2_ACTIONS[i],
                            CtfState {
                                p2: c,
                                turn: Player::P1,
                                ..*s
                            },
                        ));
                    }
                }
            }
        }
        out
    }

    /// The configured initial game states.
    pub fn initial_states(&self) -> Vec<CtfState> {
        let intact = [false; 2];
        let at = |p1, p2| CtfState {
            p1,
            p2,
            cut: intact,
            turn: Player::P1,
        };
        match self.initial {
            InitialSet::Start => vec![at(self.p1_start, self.p2_start)],
            InitialSet::AllIntact => {
                let cells: Vec<Cell> = (0..self.height)
                    .flat_map(|y| (0..self.width).map(move |x| (x, y)))
                    .collect();
                let mut out = Vec::new();
                for &p1 in &cells {
                    if self.is_blocked(p1, intact) {
                        continue;
                    }
                    for &p2 in &cells {
                        if p2 != p1 && self.p2_may_stand(p2, intact) {
                            out.push(at(p1, p2));
                        }
                    }
                }
                out
            }
        }
    }
}

/// The labeled gridworld game, reachable from the configured initial set.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    pub arena: GameArena,
    pub states: Vec<CtfState>,
    pub initial: Vec<StateId>,
}

impl TransitionSystem {
    pub fn state_id(&self, s: &CtfState) -> Option<StateId> {
        self.states.iter().position(|t| t == s).map(StateId::new)
    }
}

pub fn build_transition_system(c: &GridConfig) -> Result<TransitionSystem, CtfError> {
    c.validate()?;
    let mut states: Vec<CtfState> = Vec::new();
    let mut index: HashMap<CtfState, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut edges: Vec<Vec<(&'static str, usize)>> = Vec::new();
    let mut visit = |s: CtfState, states: &mut Vec<CtfState>, queue: &mut VecDeque<usize>| {
        *index.entry(s).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let initial: Vec<usize> = c
        .initial_states()
        .into_iter()
        .map(|s| visit(s, &mut states, &mut queue))
        .collect();
    while let Some(i) = queue.pop_front() {
        let s = states[i];
        let out = c
            .moves(&s)
            .into_iter()
            .map(|(a, t)| (a, visit(t, &mut states, &mut queue)))
            .collect();
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = out;
    }

    let mut builder = ArenaBuilder::new();
    for a in P1_ACTIONS {
        builder.add_action(a, Player::P1).expect("distinct names");
    }
    for a in P2_ACTIONS {
        builder.add_action(a, Player::P2).expect("distinct names");
    }
    for s in &states {
        builder
            .add_state(&s.to_string(), s.turn, false, c.labels(s))
            .expect("distinct states have distinct names");
    }
    for (i, out) in edges.iter().enumerate() {
        for &(a, t) in out {
            let a = builder.action_id(a).expect("CTF actions are registered");
            builder
                .add_transition(StateId::new(i), a, StateId::new(t))
                .expect("moves respect turns");
        }
    }
    Ok(TransitionSystem {
        arena: builder.build_allowing_dead_ends(),
        states,
        initial: initial.into_iter().map(StateId::new).collect(),
    })
}

/// Class mechanism over `{N,E,S,W}`, `{Cut}`, `{Jump*}` with the compass
/// moves initially known.
pub fn build_ctf_inference(g: &GameArena) -> Result<(InferenceMechanism, InferenceGraph), CtfError> {
    let ids = |names: &[&str]| -> BTreeSet<ActionId> {
        names
            .iter()
            .map(|n| g.action_by_name(n).expect("CTF actions are present"))
            .collect()
    };
    let classes = vec![
        ActionClass {
            name: "move".into(),
            actions: ids(&P1_ACTIONS[..4]),
        },
        ActionClass {
            name: "cut".into(),
            actions: ids(&P1_ACTIONS[4..5]),
        },
        ActionClass {
            name: "jump".into(),
            actions: ids(&P1_ACTIONS[5..]),
        },
    ];
    let mechanism = InferenceMechanism::classes(g, classes)?;
    let x0 = Perception::new(ids(&P1_ACTIONS[..4]));
    let ig = build_inference_graph(g, &mechanism, &x0)?;
    Ok((mechanism, ig))
}

/// `phi1`, `phi2`, or a formula text over the CTF propositions.
pub fn objective(name: &str) -> Result<Formula, CtfError> {
    let text = match name {
        "phi1" => PHI1,
        "phi2" => PHI2,
        other => other,
    };
    scltl::parse(text, &PROPS).map_err(|e| match e {
        ScltlError::UndeclaredProp { .. } if !text.contains(' ') => CtfError::UnknownFormula(name.to_string()),
        e => CtfError::Formula(e),
    })
}

pub struct Benchmark {
    pub ts: TransitionSystem,
    /// Product of the gridworld with the objective's DFA.
    pub game: GameArena,
    pub entries: Vec<StateId>,
    pub hypergame: Hypergame,
}

/// Gridworld ⊗ DFA, then the hypergame from the entry states at the
/// configured inference vertex.
pub fn build_benchmark(c: &GridConfig, phi: &Formula) -> Result<Benchmark, CtfError> {
    let ts = build_transition_system(c)?;
    let dfa = scltl::compile(phi)?;
    let (game, entries) = if c.prune_sink_states {
        scltl::product_without_sinks(&ts.arena, &dfa, Some(&ts.initial))
    } else {
        scltl::product(&ts.arena, &dfa, Some(&ts.initial))
    };
    let (_, ig) = build_ctf_inference(&game)?;
    let k = c.initial_inference_vertex;
    if k >= ig.num_vertices() {
        return Err(CtfError::Layout(format!("inference vertex {k} does not exist")));
    }
    let init: Vec<(StateId, usize)> = entries.iter().map(|&s| (s, k)).collect();
    let hypergame = Hypergame::build(&game, &ig, Some(&init))?;
    Ok(Benchmark {
        ts,
        game,
        entries,
        hypergame,
    })
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub name: String,
    pub states: usize,
    pub transitions: usize,
    pub finals: usize,
    /// Region size in the hypergame; absent for the plain game.
    pub region: Option<usize>,
    /// Winning base states.
    pub projection: usize,
    /// Base states outside the projection.
    pub win2: usize,
    pub vod: Option<f64>,
}

impl TableRow {
    pub fn render(&self) -> String {
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        format!(
            "{:<9} {:>7} {:>7} {:>6} {:>7} {:>7} {:>6} {:>7}",
            self.name,
            self.states,
            self.transitions,
            self.finals,
            opt(self.region),
            self.projection,
            self.win2,
            self.vod.map_or("-".to_string(), deception::format_vod)
        )
    }

    /// Comma-separated `|V|, |E|, |F|, region, projection, win2, VoD`.
    pub fn csv(&self) -> String {
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        format!(
            "{}, {}, {}, {}, {}, {}, {}",
            self.states,
            self.transitions,
            self.finals,
            opt(self.region),
            self.projection,
            self.win2,
            self.vod.map_or("-".to_string(), deception::format_vod)
        )
    }
}

pub const TABLE_HEADER: &str = "row           |V|     |E|    |F|  region    proj   win2     VoD";

/// The SW / DSW / DASW rows for a benchmark.
pub fn table_rows(b: &Benchmark) -> [TableRow; 3] {
    let g = &b.game;
    let h = &b.hypergame;
    let sol = attractor::solve(g);
    let base = g.num_states();
    let sw = TableRow {
        name: "SW(G)".into(),
        states: base,
        transitions: g.num_transitions(),
        finals: g.final_states().len(),
        region: None,
        projection: sol.win1.len(),
        win2: sol.win2.len(),
        vod: None,
    };
    let row = |name: &str, r: &deception::DeceptiveSolveResult| {
        let report = deception::vod(h, r);
        TableRow {
            name: name.into(),
            states: h.num_states(),
            transitions: h.arena().num_transitions(),
            finals: h.arena().final_states().len(),
            region: Some(r.region.len()),
            projection: report.deceptive_projection,
            win2: base - report.deceptive_projection,
            vod: Some(vod_from_counts(report.deceptive_projection, report.win1_true, report.win2_true)),
        }
    };
    let dsw = row("DSW(H)", &deception::dsw(h));
    let dasw = row("DASW(H)", &deception::dasw(h));
    [sw, dsw, dasw]
}

/// Hypergame states whose inference vertex contains every action in `class`.
pub fn states_knowing(h: &Hypergame, class: &[&str]) -> StateSet {
    let ids: Vec<ActionId> = class
        .iter()
        .filter_map(|n| h.base().action_by_name(n))
        .collect();
    StateSet::from_ids(
        h.num_states(),
        h.arena()
            .states()
            .filter(|&v| ids.iter().all(|&a| h.igraph().vertex(h.vertex(v)).contains(a))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip() -> GridConfig {
        // 1x4 strip along x: P1 at 0, wall at 1, free 2, P2 territory {2, 3}
        GridConfig {
            width: 4,
            height: 1,
            p1_territory: None,
            p2_territory: vec![(2, 0), (3, 0)],
            walls: vec![(1, 0)],
            fences: vec![],
            flags: [(2, 0), (3, 0)],
            p1_start: (0, 0),
            p2_start: (3, 0),
            initial_inference_vertex: 0,
            initial: InitialSet::Start,
            p1_blocked_by_p2: true,
            p2_blocked_by_p1: false,
            prune_sink_states: false,
        }
    }

    #[test]
    fn jump_over_wall() {
        let c = strip();
        let s = c.initial_states()[0];
        let moves = c.moves(&s);
        let names: Vec<&str> = moves.iter().map(|m| m.0).collect();
        // compass east is blocked by the wall and disabled
        assert_eq!(names, ["JumpE"]);
        assert_eq!(moves[0].1.p1, (2, 0));
        assert_eq!(moves[0].1.turn, Player::P2);
    }

    #[test]
    fn cut_opens_fence_for_both() {
        let mut c = strip();
        c.walls.clear();
        c.fences = vec![(1, 0)];
        c.p2_territory = vec![(1, 0), (2, 0), (3, 0)];
        c.validate().unwrap();
        let s = c.initial_states()[0];
        let moves = c.moves(&s);
        assert_eq!(moves.iter().map(|m| m.0).collect::<Vec<_>>(), ["Cut"]);
        let after = moves[0].1;
        assert_eq!(after.cut, [true, false]);
        assert_eq!(after.p1, (0, 0));
        // P2 may now walk onto the cut fence cell
        let p2_moves = c.moves(&CtfState { p2: (2, 0), ..after });
        assert!(p2_moves.iter().any(|(a, t)| *a == "W2" && t.p2 == (1, 0)));
    }

    #[test]
    fn p2_stays_home() {
        let c = strip();
        let s = CtfState {
            p1: (0, 0),
            p2: (2, 0),
            cut: [false; 2],
            turn: Player::P2,
        };
        let moves = c.moves(&s);
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].1.p2, (3, 0));
    }

    #[test]
    fn inference_graph_has_four_vertices() {
        let ts = build_transition_system(&strip()).unwrap();
        let (_, ig) = build_ctf_inference(&ts.arena).unwrap();
        assert_eq!(ig.num_vertices(), 4);
        let g = &ts.arena;
        let id = |n: &str| g.action_by_name(n).unwrap();
        assert_eq!(ig.vertex(0).len(), 4);
        assert_eq!(ig.edge(0, id("Cut")), Some(1));
        assert_eq!(ig.edge(0, id("JumpW")), Some(2));
        assert_eq!(ig.edge(1, id("JumpN")), Some(3));
        assert_eq!(ig.edge(2, id("Cut")), Some(3));
        assert_eq!(ig.vertex(3).len(), 9);
        assert!(P1_ACTIONS.iter().all(|a| ig.edge(3, id(a)) == Some(3)));
    }

    #[test]
    fn layout_validation() {
        let mut c = strip();
        c.flags = [(0, 0), (3, 0)];
        assert!(matches!(c.validate(), Err(CtfError::Layout(_))));
        let mut c = strip();
        c.walls.push((9, 0));
        assert!(matches!(c.validate(), Err(CtfError::OffGrid { .. })));
        let text = strip().to_json();
        assert_eq!(GridConfig::from_json(&text).unwrap(), strip());
    }

    #[test]
    fn objectives_parse() {
        assert!(objective("phi1").is_ok());
        assert!(objective("phi2").is_ok());
        assert!(matches!(objective("phi3"), Err(CtfError::UnknownFormula(_))));
        assert!(objective("F collide").is_ok());
    }
}
