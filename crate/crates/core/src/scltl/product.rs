use std::collections::{HashMap, VecDeque};

use super::dfa::Dfa;
use super::formula::symbol_of;
use crate::arena::{ArenaBuilder, GameArena, StateId};

/// Product of a labeled transition system with a specification DFA.
///
/// States are pairs `(ŝ, q)` named `ŝ|q`; moving to `ŝ'` reads `L(ŝ')`, and
/// entering at `ŝ0` reads `L(ŝ0)`. Final states are those with accepting `q`.
/// With `initial`, only pairs reachable from the entry states are built and
/// the entry states are returned in order; otherwise every pair is built and
/// the entry states of all `ts` states are returned.
pub fn product(ts: &GameArena, dfa: &Dfa, initial: Option<&[StateId]>) -> (GameArena, Vec<StateId>) {
    build(ts, dfa, initial, false)
}

/// Like [`product`], but pairs whose DFA state is a sink are dropped along
/// with every transition into them; entry states that would be sinks are
/// omitted from the returned list.
pub fn product_without_sinks(ts: &GameArena, dfa: &Dfa, initial: Option<&[StateId]>) -> (GameArena, Vec<StateId>) {
    build(ts, dfa, initial, true)
}

fn build(ts: &GameArena, dfa: &Dfa, initial: Option<&[StateId]>, prune: bool) -> (GameArena, Vec<StateId>) {
    let sinks = dfa.sinks();
    let dead = |q: usize| prune && sinks.contains(&q);
    let symbol: Vec<u32> = ts.states().map(|s| symbol_of(dfa.props(), ts.labels(s))).collect();
    let entry = |s: StateId| (s, dfa.step(dfa.initial(), symbol[s.index()]));

    let mut pairs: Vec<(StateId, usize)> = Vec::new();
    let mut index: HashMap<(StateId, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut visit = |pair, pairs: &mut Vec<_>, queue: &mut VecDeque<_>| {
        *index.entry(pair).or_insert_with(|| {
            pairs.push(pair);
            queue.push_back(pair);
            pairs.len() - 1
        })
    };
    let entries: Vec<usize> = match initial {
        Some(init) => {
            let entries = init
                .iter()
                .map(|&s| entry(s))
                .filter(|&(_, q)| !dead(q))
                .map(|pair| visit(pair, &mut pairs, &mut queue))
                .collect();
            while let Some((s, q)) = queue.pop_front() {
                for &(_, t) in ts.moves(s) {
                    let next = (t, dfa.step(q, symbol[t.index()]));
                    if !dead(next.1) {
                        visit(next, &mut pairs, &mut queue);
                    }
                }
            }
            entries
        }
        None => {
            for s in ts.states() {
                for q in (0..dfa.num_states()).filter(|&q| !dead(q)) {
                    visit((s, q), &mut pairs, &mut queue);
                }
            }
            ts.states()
                .map(entry)
                .filter(|&(_, q)| !dead(q))
                .map(|pair| visit(pair, &mut pairs, &mut queue))
                .collect()
        }
    };

    let mut builder = ArenaBuilder::new();
    for a in ts.actions() {
        builder
            .add_action(ts.action_name(a), ts.action_owner(a))
            .expect("action names are unique");
    }
    for &(s, q) in &pairs {
        builder
            .add_state(
                &format!("{}|{q}", ts.state_name(s)),
                ts.owner(s),
                dfa.is_accepting(q),
                ts.labels(s).to_vec(),
            )
            .expect("pair names are unique");
    }
    for (i, &(s, q)) in pairs.iter().enumerate() {
        for &(a, t) in ts.moves(s) {
            let next = (t, dfa.step(q, symbol[t.index()]));
            if dead(next.1) {
                continue;
            }
            let to = index[&next];
            builder
                .add_transition(StateId::new(i), a, StateId::new(to))
                .expect("ownership is inherited");
        }
    }
    (
        builder.build_allowing_dead_ends(),
        entries.into_iter().map(StateId::new).collect(),
    )
}
