//! Turn-based deterministic reachability games.
//!
//! A [`GameArena`] holds the owner partition of states, the two disjoint
//! action alphabets, per-state enabled actions with their unique successor,
//! the final set, and an optional labeling used by the temporal-logic
//! product. Arenas are immutable once built.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::StateSet;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::P1 => f.write_str("P1"),
            Player::P2 => f.write_str("P2"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u32);

impl StateId {
    pub fn new(index: usize) -> Self {
        StateId(u32::try_from(index).expect("state index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(u32);

impl ActionId {
    pub fn new(index: usize) -> Self {
        ActionId(u32::try_from(index).expect("action index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("malformed game document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate action name `{0}`")]
    DuplicateAction(String),
    #[error("reference to undeclared state `{0}`")]
    UnknownState(String),
    #[error("reference to undeclared action `{0}`")]
    UnknownAction(String),
    #[error("state `{0}` has no enabled action")]
    EmptyEnabled(String),
    #[error("action `{action}` owned by {action_owner} is used at {state_owner} state `{state}`")]
    OwnerMismatch {
        state: String,
        state_owner: Player,
        action: String,
        action_owner: Player,
    },
    #[error("state `{state}` has two transitions on action `{action}`")]
    DuplicateTransition { state: String, action: String },
    #[error("action `{0}` is not a P1 action")]
    NotP1Action(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateInfo {
    pub name: String,
    pub owner: Player,
    pub is_final: bool,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionInfo {
    pub name: String,
    pub owner: Player,
}

#[derive(Clone, Debug)]
pub struct GameArena {
    states: Vec<StateInfo>,
    actions: Vec<ActionInfo>,
    /// Enabled actions and successors, sorted by action id.
    moves: Vec<Vec<(ActionId, StateId)>>,
    final_set: StateSet,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
}

impl GameArena {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId::new)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len()).map(ActionId::new)
    }

    pub fn state(&self, s: StateId) -> &StateInfo {
        &self.states[s.index()]
    }

    pub fn action(&self, a: ActionId) -> &ActionInfo {
        &self.actions[a.index()]
    }

    pub fn owner(&self, s: StateId) -> Player {
        self.states[s.index()].owner
    }

    pub fn action_owner(&self, a: ActionId) -> Player {
        self.actions[a.index()].owner
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()].name
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()].name
    }

    pub fn labels(&self, s: StateId) -> &[String] {
        &self.states[s.index()].labels
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.final_set.contains(s)
    }

    pub fn final_states(&self) -> &StateSet {
        &self.final_set
    }

    /// Actions of the given player, in id order.
    pub fn player_actions(&self, p: Player) -> Vec<ActionId> {
        self.actions().filter(|&a| self.action_owner(a) == p).collect()
    }

    /// Enabled actions at `s` with their successors, sorted by action id.
    pub fn moves(&self, s: StateId) -> &[(ActionId, StateId)] {
        &self.moves[s.index()]
    }

    pub fn enabled(&self, s: StateId) -> impl Iterator<Item = ActionId> + '_ {
        self.moves[s.index()].iter().map(|&(a, _)| a)
    }

    pub fn is_enabled(&self, s: StateId, a: ActionId) -> bool {
        self.successor(s, a).is_some()
    }

    pub fn successor(&self, s: StateId, a: ActionId) -> Option<StateId> {
        let moves = &self.moves[s.index()];
        moves
            .binary_search_by_key(&a, |&(b, _)| b)
            .ok()
            .map(|i| moves[i].1)
    }

    pub fn is_dead_end(&self, s: StateId) -> bool {
        self.moves[s.index()].is_empty()
    }

    pub fn states_of(&self, p: Player) -> StateSet {
        StateSet::from_ids(self.num_states(), self.states().filter(|&s| self.owner(s) == p))
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.num_states())
    }

    /// Predecessor lists: for each state, the `(source, action)` pairs leading into it.
    pub fn predecessors(&self) -> Vec<Vec<(StateId, ActionId)>> {
        let mut preds = vec![Vec::new(); self.num_states()];
        for s in self.states() {
            for &(a, t) in self.moves(s) {
                preds[t.index()].push((s, a));
            }
        }
        preds
    }

    /// The perceptual game `G(X)`: P1's enabled sets intersected with
    /// `allowed`, everything else unchanged. P1 states whose intersection is
    /// empty become dead-ends.
    pub fn restrict_p1_actions(&self, allowed: &BTreeSet<ActionId>) -> Result<GameArena, ArenaError> {
        if let Some(&a) = allowed.iter().find(|&&a| self.action_owner(a) != Player::P1) {
            return Err(ArenaError::NotP1Action(self.action_name(a).to_string()));
        }
        let moves = self
            .states()
            .map(|s| {
                let all = self.moves(s);
                if self.owner(s) == Player::P1 {
                    all.iter().copied().filter(|(a, _)| allowed.contains(a)).collect()
                } else {
                    all.to_vec()
                }
            })
            .collect();
        Ok(GameArena {
            moves,
            ..self.clone()
        })
    }

    pub fn from_json(text: &str) -> Result<GameArena, ArenaError> {
        let doc: GameDocument = serde_json::from_str(text)?;
        GameArena::from_document(&doc)
    }

    /// Like [`GameArena::from_json`], but keeps states without moves as
    /// dead-ends, as in games derived with sink pruning.
    pub fn from_json_allowing_dead_ends(text: &str) -> Result<GameArena, ArenaError> {
        let doc: GameDocument = serde_json::from_str(text)?;
        Ok(GameArena::builder_from(&doc)?.build_allowing_dead_ends())
    }

    pub fn from_document(doc: &GameDocument) -> Result<GameArena, ArenaError> {
        GameArena::builder_from(doc)?.build()
    }

    fn builder_from(doc: &GameDocument) -> Result<ArenaBuilder, ArenaError> {
        let mut b = ArenaBuilder::new();
        for a in &doc.actions {
            b.add_action(&a.name, a.owner)?;
        }
        for s in &doc.states {
            b.add_state(&s.name, s.owner, s.is_final, s.labels.clone())?;
        }
        for t in &doc.transitions {
            b.add_transition_by_name(&t.from, &t.action, &t.to)?;
        }
        Ok(b)
    }

    /// Deterministic document: states sorted by name, transitions by (from, action).
    pub fn to_document(&self) -> GameDocument {
        let mut order: Vec<StateId> = self.states().collect();
        order.sort_by(|&x, &y| self.state_name(x).cmp(self.state_name(y)));
        let states = order
            .iter()
            .map(|&s| {
                let info = self.state(s);
                StateDoc {
                    name: info.name.clone(),
                    owner: info.owner,
                    is_final: info.is_final,
                    labels: info.labels.clone(),
                }
            })
            .collect();
        let actions = self
            .actions
            .iter()
            .map(|a| ActionDoc {
                name: a.name.clone(),
                owner: a.owner,
            })
            .collect();
        let mut transitions = Vec::with_capacity(self.num_transitions());
        for &s in &order {
            let mut out: Vec<TransitionDoc> = self
                .moves(s)
                .iter()
                .map(|&(a, t)| TransitionDoc {
                    from: self.state_name(s).to_string(),
                    action: self.action_name(a).to_string(),
                    to: self.state_name(t).to_string(),
                })
                .collect();
            out.sort_by(|x, y| x.action.cmp(&y.action));
            transitions.extend(out);
        }
        GameDocument {
            states,
            actions,
            transitions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("game document serializes")
    }
}

/// `Occ(run) ∩ target ≠ ∅`.
pub fn occurrence_check(run: &[StateId], target: &StateSet) -> bool {
    run.iter().any(|&s| target.contains(s))
}

#[derive(Clone, Debug, Default)]
pub struct ArenaBuilder {
    states: Vec<StateInfo>,
    actions: Vec<ActionInfo>,
    moves: Vec<Vec<(ActionId, StateId)>>,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
}

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_action(&mut self, name: &str, owner: Player) -> Result<ActionId, ArenaError> {
        if self.action_index.contains_key(name) {
            return Err(ArenaError::DuplicateAction(name.to_string()));
        }
        let id = ActionId::new(self.actions.len());
        self.actions.push(ActionInfo {
            name: name.to_string(),
            owner,
        });
        self.action_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_state(
        &mut self,
        name: &str,
        owner: Player,
        is_final: bool,
        mut labels: Vec<String>,
    ) -> Result<StateId, ArenaError> {
        if self.state_index.contains_key(name) {
            return Err(ArenaError::DuplicateState(name.to_string()));
        }
        labels.sort();
        labels.dedup();
        let id = StateId::new(self.states.len());
        self.states.push(StateInfo {
            name: name.to_string(),
            owner,
            is_final,
            labels,
        });
        self.moves.push(Vec::new());
        self.state_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn owner(&self, s: StateId) -> Player {
        self.states[s.index()].owner
    }

    pub fn add_transition(&mut self, from: StateId, action: ActionId, to: StateId) -> Result<(), ArenaError> {
        let state = &self.states[from.index()];
        let act = &self.actions[action.index()];
        if state.owner != act.owner {
            return Err(ArenaError::OwnerMismatch {
                state: state.name.clone(),
                state_owner: state.owner,
                action: act.name.clone(),
                action_owner: act.owner,
            });
        }
        let moves = &mut self.moves[from.index()];
        match moves.binary_search_by_key(&action, |&(a, _)| a) {
            Ok(_) => Err(ArenaError::DuplicateTransition {
                state: state.name.clone(),
                action: act.name.clone(),
            }),
            Err(pos) => {
                moves.insert(pos, (action, to));
                Ok(())
            }
        }
    }

    pub fn add_transition_by_name(&mut self, from: &str, action: &str, to: &str) -> Result<(), ArenaError> {
        let f = self
            .state_id(from)
            .ok_or_else(|| ArenaError::UnknownState(from.to_string()))?;
        let a = self
            .action_id(action)
            .ok_or_else(|| ArenaError::UnknownAction(action.to_string()))?;
        let t = self
            .state_id(to)
            .ok_or_else(|| ArenaError::UnknownState(to.to_string()))?;
        self.add_transition(f, a, t)
    }

    /// Builds the arena, rejecting states without enabled actions.
    pub fn build(self) -> Result<GameArena, ArenaError> {
        if let Some(i) = self.moves.iter().position(Vec::is_empty) {
            return Err(ArenaError::EmptyEnabled(self.states[i].name.clone()));
        }
        Ok(self.build_allowing_dead_ends())
    }

    /// Builds the arena; states without enabled actions are kept as dead-ends.
    pub fn build_allowing_dead_ends(self) -> GameArena {
        let final_set = StateSet::from_ids(
            self.states.len(),
            self.states
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_final)
                .map(|(i, _)| StateId::new(i)),
        );
        GameArena {
            states: self.states,
            actions: self.actions,
            moves: self.moves,
            final_set,
            state_index: self.state_index,
            action_index: self.action_index,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub states: Vec<StateDoc>,
    pub actions: Vec<ActionDoc>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub name: String,
    pub owner: Player,
    #[serde(rename = "final")]
    pub is_final: bool,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub name: String,
    pub owner: Player,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub action: String,
    pub to: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Deterministic,
    /// Only the support is stored; the distribution is uniform over it.
    RandomizedSupport,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("state `{0}` is outside the winning region")]
    OutsideRegion(String),
    #[error("strategy has an empty support at `{0}`")]
    EmptySupport(String),
    #[error("action `{action}` is not enabled at `{state}`")]
    NotEnabled { state: String, action: String },
    #[error("state `{state}` is not owned by {player}")]
    WrongOwner { state: String, player: Player },
    #[error("deterministic strategy has several actions at `{0}`")]
    NotDeterministic(String),
    #[error("malformed strategy document: {0}")]
    Schema(String),
}

/// Memoryless strategy of one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub kind: StrategyKind,
    map: BTreeMap<StateId, Vec<ActionId>>,
}

impl Strategy {
    pub fn new(player: Player, kind: StrategyKind) -> Self {
        Strategy {
            player,
            kind,
            map: BTreeMap::new(),
        }
    }

    /// Sets the support at `s`; the list is sorted and deduplicated.
    pub fn set(&mut self, s: StateId, mut support: Vec<ActionId>) {
        support.sort();
        support.dedup();
        self.map.insert(s, support);
    }

    pub fn support(&self, s: StateId) -> Option<&[ActionId]> {
        self.map.get(&s).map(Vec::as_slice)
    }

    pub fn is_defined(&self, s: StateId) -> bool {
        self.map.contains_key(&s)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &[ActionId])> {
        self.map.iter().map(|(&s, v)| (s, v.as_slice()))
    }

    pub fn distribution(&self, s: StateId) -> Option<Vec<(ActionId, f64)>> {
        let support = self.map.get(&s)?;
        let p = 1.0 / support.len() as f64;
        Some(support.iter().map(|&a| (a, p)).collect())
    }

    /// Uniform randomization over every enabled action at every state of `player`.
    pub fn uniform_enabled(arena: &GameArena, player: Player) -> Strategy {
        let mut strategy = Strategy::new(player, StrategyKind::RandomizedSupport);
        for s in arena.states().filter(|&s| arena.owner(s) == player && !arena.is_dead_end(s)) {
            strategy.set(s, arena.enabled(s).collect());
        }
        strategy
    }

    pub fn validate(&self, arena: &GameArena) -> Result<(), StrategyError> {
        for (&s, support) in &self.map {
            let name = || arena.state_name(s).to_string();
            if arena.owner(s) != self.player {
                return Err(StrategyError::WrongOwner {
                    state: name(),
                    player: self.player,
                });
            }
            if support.is_empty() {
                return Err(StrategyError::EmptySupport(name()));
            }
            if self.kind == StrategyKind::Deterministic && support.len() != 1 {
                return Err(StrategyError::NotDeterministic(name()));
            }
            if let Some(&a) = support.iter().find(|&&a| !arena.is_enabled(s, a)) {
                return Err(StrategyError::NotEnabled {
                    state: name(),
                    action: arena.action_name(a).to_string(),
                });
            }
        }
        Ok(())
    }

    /// JSON object mapping state names to an action name (deterministic) or
    /// an array of action names (uniform support), keys sorted.
    pub fn to_json(&self, arena: &GameArena) -> String {
        let mut obj = BTreeMap::new();
        for (&s, support) in &self.map {
            let names: Vec<&str> = support.iter().map(|&a| arena.action_name(a)).collect();
            let value = match self.kind {
                StrategyKind::Deterministic => serde_json::Value::from(names[0]),
                StrategyKind::RandomizedSupport => serde_json::Value::from(names),
            };
            obj.insert(arena.state_name(s).to_string(), value);
        }
        serde_json::to_string_pretty(&obj).expect("strategy serializes")
    }

    pub fn from_json(arena: &GameArena, player: Player, text: &str) -> Result<Strategy, StrategyError> {
        let obj: BTreeMap<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| StrategyError::Schema(e.to_string()))?;
        let mut kind = StrategyKind::Deterministic;
        let mut entries = Vec::with_capacity(obj.len());
        for (state, value) in obj {
            let s = arena
                .state_by_name(&state)
                .ok_or_else(|| StrategyError::Schema(format!("unknown state `{state}`")))?;
            let names: Vec<String> = match value {
                serde_json::Value::String(a) => vec![a],
                serde_json::Value::Array(items) => {
                    kind = StrategyKind::RandomizedSupport;
                    items
                        .into_iter()
                        .map(|v| match v {
                            serde_json::Value::String(a) => Ok(a),
                            other => Err(StrategyError::Schema(format!("expected action name, got {other}"))),
                        })
                        .collect::<Result<_, _>>()?
                }
                other => return Err(StrategyError::Schema(format!("expected action name(s), got {other}"))),
            };
            let support = names
                .iter()
                .map(|n| {
                    arena
                        .action_by_name(n)
                        .ok_or_else(|| StrategyError::Schema(format!("unknown action `{n}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            entries.push((s, support));
        }
        let mut strategy = Strategy::new(player, kind);
        for (s, support) in entries {
            strategy.set(s, support);
        }
        strategy.validate(arena)?;
        Ok(strategy)
    }
}
