//! Deceptive strategy synthesis for two-player reachability games in which
//! P2 misperceives P1's action set.

pub mod arena;
pub mod attractor;
pub mod cli;
pub mod ctf;
pub mod deception;
pub mod fixtures;
pub mod generate;
pub mod hypergame;
pub mod perception;
pub mod scltl;
pub mod set;
pub mod sim;

pub use arena::{ActionId, GameArena, Player, StateId, Strategy};
pub use hypergame::Hypergame;
pub use perception::{InferenceGraph, InferenceMechanism, Perception};
pub use set::StateSet;
