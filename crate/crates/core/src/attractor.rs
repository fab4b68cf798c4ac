//! Sure/almost-sure winning regions of reachability games by attractor
//! iteration, and the associated strategies.

use serde::Serialize;

use crate::arena::{ActionId, GameArena, Player, StateId, Strategy, StrategyError, StrategyKind};
use crate::set::StateSet;

/// A set of states annotated with the iteration at which each entered the
/// fixed point. Initialization states have rank 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    members: StateSet,
    rank: Vec<Option<u32>>,
}

impl Region {
    pub fn new(capacity: usize) -> Self {
        Region {
            members: StateSet::empty(capacity),
            rank: vec![None; capacity],
        }
    }

    pub(crate) fn insert(&mut self, s: StateId, rank: usize) {
        self.members.insert(s);
        self.rank[s.index()] = Some(rank as u32);
    }

    pub fn members(&self) -> &StateSet {
        &self.members
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.members.contains(s)
    }

    pub fn rank(&self, s: StateId) -> Option<usize> {
        self.rank[s.index()].map(|r| r as usize)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_rank(&self) -> usize {
        self.rank.iter().flatten().copied().max().unwrap_or(0) as usize
    }

    /// Members of rank at most `k` (the iterate `Z_k`).
    pub fn layer(&self, k: usize) -> StateSet {
        StateSet::from_ids(
            self.members.capacity(),
            self.members.iter().filter(|&s| self.rank(s).unwrap() <= k),
        )
    }

    /// JSON array of `{state, rank}` sorted by state name.
    pub fn to_json(&self, arena: &GameArena) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            state: &'a str,
            rank: usize,
        }
        let mut entries: Vec<Entry> = self
            .members
            .iter()
            .map(|s| Entry {
                state: arena.state_name(s),
                rank: self.rank(s).unwrap(),
            })
            .collect();
        entries.sort_by(|a, b| a.state.cmp(b.state));
        serde_json::to_string_pretty(&entries).expect("region serializes")
    }

    pub fn from_json(arena: &GameArena, text: &str) -> Result<Region, String> {
        #[derive(serde::Deserialize)]
        struct Entry {
            state: String,
            rank: usize,
        }
        let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut region = Region::new(arena.num_states());
        for e in entries {
            let s = arena
                .state_by_name(&e.state)
                .ok_or_else(|| format!("unknown state `{}`", e.state))?;
            region.insert(s, e.rank);
        }
        Ok(region)
    }
}

/// Layered least fixed point
/// `Z_{k+1} = Z_k ∪ {∃-states with an edge into Z_k} ∪ {∀-states with every edge into Z_k}`.
///
/// `edges(s)` lists the successors the quantifier at `s` ranges over. A
/// universal state with no edges qualifies vacuously at iteration 1.
/// Ranks equal the synchronous iteration index.
pub(crate) fn ranked_attractor<E>(
    n: usize,
    init: &StateSet,
    is_universal: impl Fn(StateId) -> bool,
    edges: E,
) -> Region
where
    E: Fn(StateId) -> Vec<StateId>,
{
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut pending = vec![0usize; n];
    for (i, count) in pending.iter_mut().enumerate() {
        let s = StateId::new(i);
        let out = edges(s);
        *count = out.len();
        for t in out {
            preds[t.index()].push(s);
        }
    }

    let mut region = Region::new(n);
    let mut frontier: Vec<StateId> = init.iter().collect();
    for &s in &frontier {
        region.insert(s, 0);
    }
    let mut rank = 0;
    // vacuous universal states enter at iteration 1
    let mut next: Vec<StateId> = (0..n)
        .map(StateId::new)
        .filter(|&s| !region.contains(s) && is_universal(s) && pending[s.index()] == 0)
        .collect();
    loop {
        for &s in &frontier {
            for &p in &preds[s.index()] {
                if region.contains(p) {
                    continue;
                }
                if is_universal(p) {
                    pending[p.index()] -= 1;
                    if pending[p.index()] == 0 {
                        next.push(p);
                    }
                } else {
                    next.push(p);
                }
            }
        }
        next.sort();
        next.dedup();
        if next.is_empty() {
            break;
        }
        rank += 1;
        for &s in &next {
            region.insert(s, rank);
        }
        frontier = std::mem::take(&mut next);
    }
    region
}

/// P1 states with an enabled action leading into `u`.
pub fn pre1(g: &GameArena, u: &StateSet) -> StateSet {
    StateSet::from_ids(
        g.num_states(),
        g.states()
            .filter(|&s| g.owner(s) == Player::P1 && g.moves(s).iter().any(|&(_, t)| u.contains(t))),
    )
}

/// P2 states all of whose enabled actions lead into `u` (dead-ends qualify).
pub fn pre2(g: &GameArena, u: &StateSet) -> StateSet {
    StateSet::from_ids(
        g.num_states(),
        g.states()
            .filter(|&s| g.owner(s) == Player::P2 && g.moves(s).iter().all(|&(_, t)| u.contains(t))),
    )
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub win1: Region,
    pub win2: StateSet,
}

/// Winning regions of the reachability game `g` with target `F`.
pub fn solve(g: &GameArena) -> Solution {
    let win1 = ranked_attractor(
        g.num_states(),
        g.final_states(),
        |s| g.owner(s) == Player::P2,
        |s| g.moves(s).iter().map(|&(_, t)| t).collect(),
    );
    let win2 = win1.members().complement();
    Solution { win1, win2 }
}

/// The rank-decreasing action at `s`, smallest action id first.
/// `Ok(None)` at final states and P2 states.
pub fn sure_action(g: &GameArena, win1: &Region, s: StateId) -> Result<Option<ActionId>, StrategyError> {
    let rank = win1
        .rank(s)
        .ok_or_else(|| StrategyError::OutsideRegion(g.state_name(s).to_string()))?;
    if rank == 0 || g.owner(s) != Player::P1 {
        return Ok(None);
    }
    Ok(g
        .moves(s)
        .iter()
        .find(|&&(_, t)| win1.rank(t).is_some_and(|r| r < rank))
        .map(|&(a, _)| a))
}

/// Deterministic attractor strategy on `S1 ∩ win1 \ F`.
pub fn sure_strategy(g: &GameArena, win1: &Region) -> Strategy {
    let mut pi = Strategy::new(Player::P1, StrategyKind::Deterministic);
    for s in win1.members().iter() {
        if let Ok(Some(a)) = sure_action(g, win1, s) {
            pi.set(s, vec![a]);
        }
    }
    pi
}

/// Enabled actions at `s` whose successor stays in `win2`.
pub fn permissive_support(g: &GameArena, win2: &StateSet, s: StateId) -> Vec<ActionId> {
    g.moves(s)
        .iter()
        .filter(|&&(_, t)| win2.contains(t))
        .map(|&(a, _)| a)
        .collect()
}

/// P2's permissive strategy on `S2 ∩ win2`.
pub fn permissive_strategy(g: &GameArena, win2: &StateSet) -> Strategy {
    let mut zeta = Strategy::new(Player::P2, StrategyKind::RandomizedSupport);
    for s in win2.iter().filter(|&s| g.owner(s) == Player::P2) {
        let support = permissive_support(g, win2, s);
        debug_assert!(!support.is_empty(), "win2 is closed for P2");
        zeta.set(s, support);
    }
    zeta
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::fixtures;

    fn names(g: &GameArena, set: &StateSet) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|s| g.state_name(s).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn pre_operators_on_running_example() {
        let g = fixtures::running_example();
        let id = |n: &str| g.state_by_name(n).unwrap();
        let s0 = StateSet::from_ids(4, [id("s0")]);
        assert_eq!(names(&g, &pre1(&g, &s0)), ["s1"]);
        assert_eq!(names(&g, &pre2(&g, &s0)), ["s0"]);
        let s1 = StateSet::from_ids(4, [id("s1")]);
        assert!(pre2(&g, &s1).is_empty());
        assert!(pre1(&g, &StateSet::empty(4)).is_empty());
        let all = StateSet::full(4);
        assert_eq!(names(&g, &pre1(&g, &all)), ["s1", "s3"]);
        assert_eq!(names(&g, &pre2(&g, &all)), ["s0", "s2"]);
    }

    #[test]
    fn running_example_regions() {
        let g = fixtures::running_example();
        let sol = solve(&g);
        assert_eq!(names(&g, sol.win1.members()), ["s0", "s1"]);
        assert_eq!(names(&g, &sol.win2), ["s2", "s3"]);
        assert_eq!(sol.win1.rank(g.state_by_name("s0").unwrap()), Some(0));
        assert_eq!(sol.win1.rank(g.state_by_name("s1").unwrap()), Some(1));

        let a2 = g.action_by_name("a2").unwrap();
        let perceived = g.restrict_p1_actions(&BTreeSet::from([a2])).unwrap();
        let sol2 = solve(&perceived);
        assert_eq!(names(&g, sol2.win1.members()), ["s0"]);
    }

    #[test]
    fn empty_target_wins_nothing() {
        let text = r#"{"states": [{"name": "x", "owner": "P1", "final": false},
                                  {"name": "y", "owner": "P2", "final": false}],
            "actions": [{"name": "a", "owner": "P1"}, {"name": "b", "owner": "P2"}],
            "transitions": [{"from": "x", "action": "a", "to": "y"},
                            {"from": "y", "action": "b", "to": "x"}]}"#;
        let g = GameArena::from_json(text).unwrap();
        assert!(solve(&g).win1.is_empty());
    }

    #[test]
    fn sure_strategy_on_running_example() {
        let g = fixtures::running_example();
        let sol = solve(&g);
        let id = |n: &str| g.state_by_name(n).unwrap();
        assert_eq!(sure_action(&g, &sol.win1, id("s1")), Ok(g.action_by_name("a1")));
        assert_eq!(sure_action(&g, &sol.win1, id("s0")), Ok(None));
        assert_eq!(
            sure_action(&g, &sol.win1, id("s3")),
            Err(StrategyError::OutsideRegion("s3".into()))
        );
        let pi = sure_strategy(&g, &sol.win1);
        assert_eq!(pi.len(), 1);
        pi.validate(&g).unwrap();
    }

    #[test]
    fn permissive_supports() {
        let g = fixtures::running_example();
        let s2 = g.state_by_name("s2").unwrap();
        let sol = solve(&g);
        let zeta = permissive_strategy(&g, &sol.win2);
        assert_eq!(zeta.support(s2).unwrap(), &[g.action_by_name("b2").unwrap()]);

        let a2 = g.action_by_name("a2").unwrap();
        let perceived = g.restrict_p1_actions(&BTreeSet::from([a2])).unwrap();
        let zeta = permissive_strategy(&perceived, &solve(&perceived).win2);
        assert_eq!(
            zeta.support(s2).unwrap(),
            &[g.action_by_name("b1").unwrap(), g.action_by_name("b2").unwrap()]
        );

        assert!(permissive_strategy(&g, &StateSet::empty(4)).is_empty());
    }
}
