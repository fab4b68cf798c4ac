//! P2's perception of P1's action set, the inference mechanism that updates
//! it when a private action is revealed, and the inference graph of all
//! perceptions reachable from the initial one.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ActionId, GameArena, Player};

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("action `{0}` is not a P1 action")]
    NotP1Action(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action classes must partition P1's actions: {0}")]
    NotPartition(String),
    #[error("inference table entry on `{action}` must contain the revealed action and the previous perception")]
    TableNotMonotone { action: String },
    #[error("malformed perception document: {0}")]
    Schema(#[from] serde_json::Error),
}

/// A subset of P1's actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perception(BTreeSet<ActionId>);

impl Perception {
    pub fn new<I: IntoIterator<Item = ActionId>>(actions: I) -> Self {
        Perception(actions.into_iter().collect())
    }

    pub fn actions(&self) -> &BTreeSet<ActionId> {
        &self.0
    }

    pub fn contains(&self, a: ActionId) -> bool {
        self.0.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Perception) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &BTreeSet<ActionId>) -> Perception {
        Perception(self.0.union(other).copied().collect())
    }

    /// `{a1,a2}` using the arena's action names in id order.
    pub fn label(&self, g: &GameArena) -> String {
        let mut out = String::from("{");
        for (i, &a) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", g.action_name(a));
        }
        out.push('}');
        out
    }

    fn names(&self, g: &GameArena) -> Vec<String> {
        self.0.iter().map(|&a| g.action_name(a).to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionClass {
    pub name: String,
    pub actions: BTreeSet<ActionId>,
}

/// Deterministic rule `η(X, a)`. Every built-in kind satisfies
/// `a ∈ η(X, a)` and `X ⊆ η(X, a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InferenceMechanism {
    /// `η(X, a) = X ∪ {a}`.
    Additive,
    /// `η(X, a) = X ∪ class(a)`; the classes partition `A1`.
    Classes(Vec<ActionClass>),
    /// Explicit edges; pairs missing from the table fall back to `X ∪ {a}`.
    Table(HashMap<(Perception, ActionId), Perception>),
}

impl InferenceMechanism {
    pub fn classes(g: &GameArena, classes: Vec<ActionClass>) -> Result<Self, PerceptionError> {
        let a1: BTreeSet<ActionId> = g.player_actions(Player::P1).into_iter().collect();
        let mut seen = BTreeSet::new();
        for class in &classes {
            for &a in &class.actions {
                if !a1.contains(&a) {
                    return Err(PerceptionError::NotP1Action(g.action_name(a).to_string()));
                }
                if !seen.insert(a) {
                    return Err(PerceptionError::NotPartition(format!(
                        "`{}` appears in more than one class",
                        g.action_name(a)
                    )));
                }
            }
        }
        if let Some(&missing) = a1.difference(&seen).next() {
            return Err(PerceptionError::NotPartition(format!(
                "`{}` belongs to no class",
                g.action_name(missing)
            )));
        }
        Ok(InferenceMechanism::Classes(classes))
    }

    pub fn table(
        g: &GameArena,
        edges: impl IntoIterator<Item = (Perception, ActionId, Perception)>,
    ) -> Result<Self, PerceptionError> {
        let mut table = HashMap::new();
        for (from, a, to) in edges {
            if g.action_owner(a) != Player::P1 {
                return Err(PerceptionError::NotP1Action(g.action_name(a).to_string()));
            }
            if !to.contains(a) || !from.is_subset(&to) {
                return Err(PerceptionError::TableNotMonotone {
                    action: g.action_name(a).to_string(),
                });
            }
            table.insert((from, a), to);
        }
        Ok(InferenceMechanism::Table(table))
    }

    pub fn infer(&self, g: &GameArena, x: &Perception, a: ActionId) -> Result<Perception, PerceptionError> {
        if g.action_owner(a) != Player::P1 {
            return Err(PerceptionError::NotP1Action(g.action_name(a).to_string()));
        }
        if x.contains(a) {
            return Ok(x.clone());
        }
        Ok(match self {
            InferenceMechanism::Additive => x.union(&BTreeSet::from([a])),
            InferenceMechanism::Classes(classes) => {
                let class = classes
                    .iter()
                    .find(|c| c.actions.contains(&a))
                    .map(|c| c.actions.clone())
                    .unwrap_or_else(|| BTreeSet::from([a]));
                x.union(&class)
            }
            InferenceMechanism::Table(table) => match table.get(&(x.clone(), a)) {
                Some(to) => to.clone(),
                None => x.union(&BTreeSet::from([a])),
            },
        })
    }
}

/// `I = ⟨Γ, E, γ0⟩` restricted to perceptions reachable from `γ0`.
#[derive(Clone, Debug)]
pub struct InferenceGraph {
    vertices: Vec<Perception>,
    /// P1 actions in id order; edge columns follow this order.
    p1_actions: Vec<ActionId>,
    edges: Vec<Vec<usize>>,
    index: HashMap<Perception, usize>,
}

impl InferenceGraph {
    pub const INITIAL: usize = 0;

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: usize) -> &Perception {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Perception] {
        &self.vertices
    }

    pub fn p1_actions(&self) -> &[ActionId] {
        &self.p1_actions
    }

    pub fn vertex_of(&self, x: &Perception) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// `E(γ, a)`; `None` when `a` is not a P1 action.
    pub fn edge(&self, v: usize, a: ActionId) -> Option<usize> {
        let col = self.p1_actions.binary_search(&a).ok()?;
        Some(self.edges[v][col])
    }

    /// Target of `a` from `v`, or `v` itself for P2 actions.
    pub fn step(&self, v: usize, a: ActionId) -> usize {
        self.edge(v, a).unwrap_or(v)
    }
}

/// Breadth-first closure of `x0` under `η` over every P1 action.
pub fn build_inference_graph(
    g: &GameArena,
    mechanism: &InferenceMechanism,
    x0: &Perception,
) -> Result<InferenceGraph, PerceptionError> {
    let p1_actions = g.player_actions(Player::P1);
    if let Some(&a) = x0.actions().iter().find(|&&a| g.action_owner(a) != Player::P1) {
        return Err(PerceptionError::NotP1Action(g.action_name(a).to_string()));
    }
    let mut vertices = vec![x0.clone()];
    let mut index = HashMap::from([(x0.clone(), 0)]);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let mut row = Vec::with_capacity(p1_actions.len());
        for &a in &p1_actions {
            let y = mechanism.infer(g, &vertices[v], a)?;
            let target = match index.get(&y) {
                Some(&t) => t,
                None => {
                    let t = vertices.len();
                    vertices.push(y.clone());
                    index.insert(y, t);
                    queue.push_back(t);
                    t
                }
            };
            row.push(target);
        }
        if edges.len() <= v {
            edges.resize(v + 1, Vec::new());
        }
        edges[v] = row;
    }
    Ok(InferenceGraph {
        vertices,
        p1_actions,
        edges,
        index,
    })
}

/// JSON perception document: `initial` plus a `mechanism` of kind
/// `additive`, `classes` or `table`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerceptionDocument {
    pub initial: Vec<String>,
    pub mechanism: MechanismDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MechanismDocument {
    Additive,
    Classes { classes: BTreeMap<String, Vec<String>> },
    Table { edges: Vec<TableEdge> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEdge {
    pub from: Vec<String>,
    pub action: String,
    pub to: Vec<String>,
}

impl PerceptionDocument {
    pub fn from_json(text: &str) -> Result<Self, PerceptionError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("perception document serializes")
    }

    pub fn describe(g: &GameArena, mechanism: &InferenceMechanism, x0: &Perception) -> Self {
        let mechanism = match mechanism {
            InferenceMechanism::Additive => MechanismDocument::Additive,
            InferenceMechanism::Classes(classes) => MechanismDocument::Classes {
                classes: classes
                    .iter()
                    .map(|c| {
                        (
                            c.name.clone(),
                            c.actions.iter().map(|&a| g.action_name(a).to_string()).collect(),
                        )
                    })
                    .collect(),
            },
            InferenceMechanism::Table(table) => {
                let mut edges: Vec<TableEdge> = table
                    .iter()
                    .map(|((from, a), to)| TableEdge {
                        from: from.names(g),
                        action: g.action_name(*a).to_string(),
                        to: to.names(g),
                    })
                    .collect();
                edges.sort_by(|x, y| (&x.from, &x.action).cmp(&(&y.from, &y.action)));
                MechanismDocument::Table { edges }
            }
        };
        PerceptionDocument {
            initial: x0.names(g),
            mechanism,
        }
    }

    /// Resolves names against `g`, returning the mechanism and `X0`.
    pub fn resolve(&self, g: &GameArena) -> Result<(InferenceMechanism, Perception), PerceptionError> {
        let lookup = |name: &str| {
            g.action_by_name(name)
                .ok_or_else(|| PerceptionError::UnknownAction(name.to_string()))
                .and_then(|a| {
                    if g.action_owner(a) == Player::P1 {
                        Ok(a)
                    } else {
                        Err(PerceptionError::NotP1Action(name.to_string()))
                    }
                })
        };
        let set = |names: &[String]| -> Result<Perception, PerceptionError> {
            Ok(Perception(names.iter().map(|n| lookup(n)).collect::<Result<_, _>>()?))
        };
        let x0 = set(&self.initial)?;
        let mechanism = match &self.mechanism {
            MechanismDocument::Additive => InferenceMechanism::Additive,
            MechanismDocument::Classes { classes } => {
                let classes = classes
                    .iter()
                    .map(|(name, actions)| {
                        Ok(ActionClass {
                            name: name.clone(),
                            actions: set(actions)?.0,
                        })
                    })
                    .collect::<Result<Vec<_>, PerceptionError>>()?;
                InferenceMechanism::classes(g, classes)?
            }
            MechanismDocument::Table { edges } => {
                let edges = edges
                    .iter()
                    .map(|e| Ok((set(&e.from)?, lookup(&e.action)?, set(&e.to)?)))
                    .collect::<Result<Vec<_>, PerceptionError>>()?;
                InferenceMechanism::table(g, edges)?
            }
        };
        Ok((mechanism, x0))
    }
}
