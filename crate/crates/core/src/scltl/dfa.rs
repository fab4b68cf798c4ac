//! Compilation of scLTL formulas to complete, minimal DFAs over `2^AP`,
//! with JSON and DOT export.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formula::{Expr, Formula};
use super::parser::parse;
use super::ScltlError;

pub const MAX_PROPS: usize = 16;

type Pair = (usize, usize);
const MAX_STATES: usize = 100_000;

/// Complete DFA; symbols are bitmasks over `props`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    props: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    /// `delta[q][symbol]`.
    delta: Vec<Vec<usize>>,
}

type Clause = BTreeSet<usize>;
type Dnf = BTreeSet<Clause>;

/// Subformulas interned by structure.
#[derive(Default)]
struct Interner {
    nodes: Vec<Expr>,
    ids: HashMap<Expr, usize>,
}

impl Interner {
    fn id(&mut self, e: &Expr) -> usize {
        if let Some(&i) = self.ids.get(e) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(e.clone());
        self.ids.insert(e.clone(), i);
        i
    }
}

fn absorb(dnf: Dnf) -> Dnf {
    let mut clauses: Vec<Clause> = dnf.into_iter().collect();
    clauses.sort_by_key(|c| c.len());
    let mut kept: Vec<Clause> = Vec::new();
    for c in clauses {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    kept.into_iter().collect()
}

fn conj(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for x in a {
        for y in b {
            out.insert(x.union(y).copied().collect());
        }
    }
    absorb(out)
}

fn truth() -> Dnf {
    Dnf::from([Clause::new()])
}

/// Boolean structure of `e` with temporal operators and literals as atoms.
fn dnf(e: &Expr, interner: &mut Interner) -> Dnf {
    match e {
        Expr::True => truth(),
        Expr::False => Dnf::new(),
        Expr::And(l, r) => conj(&dnf(l, interner), &dnf(r, interner)),
        Expr::Or(l, r) => {
            let mut out = dnf(l, interner);
            out.extend(dnf(r, interner));
            absorb(out)
        }
        _ => Dnf::from([Clause::from([interner.id(e)])]),
    }
}

/// Obligation left for the next position after reading `symbol`.
fn progress(e: &Expr, symbol: u32, interner: &mut Interner) -> Dnf {
    match e {
        Expr::True => truth(),
        Expr::False => Dnf::new(),
        Expr::Prop(p) => {
            if symbol >> p & 1 == 1 {
                truth()
            } else {
                Dnf::new()
            }
        }
        Expr::NotProp(p) => {
            if symbol >> p & 1 == 0 {
                truth()
            } else {
                Dnf::new()
            }
        }
        Expr::And(l, r) => conj(&progress(l, symbol, interner), &progress(r, symbol, interner)),
        Expr::Or(l, r) => {
            let mut out = progress(l, symbol, interner);
            out.extend(progress(r, symbol, interner));
            absorb(out)
        }
        Expr::Next(inner) => dnf(inner, interner),
        Expr::Until(l, r) => {
            let stay = Dnf::from([Clause::from([interner.id(e)])]);
            let mut out = progress(r, symbol, interner);
            out.extend(conj(&progress(l, symbol, interner), &stay));
            absorb(out)
        }
    }
}

/// Whether `e` holds at the end of a word.
fn holds_at_end(e: &Expr) -> bool {
    match e {
        Expr::True => true,
        Expr::False | Expr::Prop(_) | Expr::NotProp(_) | Expr::Next(_) => false,
        Expr::And(l, r) => holds_at_end(l) && holds_at_end(r),
        Expr::Or(l, r) => holds_at_end(l) || holds_at_end(r),
        Expr::Until(_, r) => holds_at_end(r),
    }
}

/// Compiles `f` into the minimal complete DFA of its good prefixes.
pub fn compile(f: &Formula) -> Result<Dfa, ScltlError> {
    let k = f.props.len();
    if k > MAX_PROPS {
        return Err(ScltlError::TooManyProps(k));
    }
    let symbols = 1u32 << k;
    let mut interner = Interner::default();
    let start = dnf(&f.expr, &mut interner);
    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let mut row = Vec::with_capacity(symbols as usize);
        for sym in 0..symbols {
            let mut next = Dnf::new();
            for clause in &states[q] {
                let mut acc = truth();
                for &atom in clause {
                    let e = interner.nodes[atom].clone();
                    acc = conj(&acc, &progress(&e, sym, &mut interner));
                    if acc.is_empty() {
                        break;
                    }
                }
                next.extend(acc);
            }
            let next = absorb(next);
            let target = match index.get(&next) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    if t >= MAX_STATES {
                        return Err(ScltlError::TooManyStates(t));
                    }
                    states.push(next.clone());
                    index.insert(next, t);
                    queue.push_back(t);
                    t
                }
            };
            row.push(target);
        }
        delta.push(row);
    }
    let accepting = states
        .iter()
        .map(|d| {
            d.iter()
                .any(|clause| clause.iter().all(|&a| holds_at_end(&interner.nodes[a])))
        })
        .collect();
    Ok(Dfa {
        props: f.props.clone(),
        initial: 0,
        accepting,
        delta,
    }
    .minimize())
}

impl Dfa {
    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_symbols(&self) -> u32 {
        1 << self.props.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn step(&self, q: usize, symbol: u32) -> usize {
        self.delta[q][symbol as usize]
    }

    pub fn run(&self, word: &[u32]) -> usize {
        word.iter().fold(self.initial, |q, &s| self.step(q, s))
    }

    pub fn accepts(&self, word: &[u32]) -> bool {
        self.accepting[self.run(word)]
    }

    /// Non-accepting states from which no accepting state is reachable.
    pub fn sinks(&self) -> Vec<usize> {
        let n = self.num_states();
        let mut alive: Vec<bool> = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if !alive[q] && self.delta[q].iter().any(|&t| alive[t]) {
                    alive[q] = true;
                    changed = true;
                }
            }
        }
        (0..n).filter(|&q| !alive[q]).collect()
    }

    pub fn sink(&self) -> Option<usize> {
        self.sinks().first().copied()
    }

    /// Moore partition refinement restricted to reachable states, numbered
    /// breadth-first from the initial state.
    pub fn minimize(&self) -> Dfa {
        let reachable = self.reachable_order();
        let mut class: Vec<usize> = vec![usize::MAX; self.num_states()];
        for &q in &reachable {
            class[q] = usize::from(self.accepting[q]);
        }
        loop {
            let mut signatures: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = class.clone();
            for &q in &reachable {
                let sig = (class[q], self.delta[q].iter().map(|&t| class[t]).collect());
                let fresh = signatures.len();
                next[q] = *signatures.entry(sig).or_insert(fresh);
            }
            let before: BTreeSet<usize> = reachable.iter().map(|&q| class[q]).collect();
            class = next;
            if signatures.len() == before.len() {
                break;
            }
        }
        // renumber classes breadth-first
        let mut number: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        number.insert(class[self.initial], 0);
        reps.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for &t in &self.delta[q] {
                if let Entry::Vacant(slot) = number.entry(class[t]) {
                    slot.insert(reps.len());
                    reps.push(t);
                    queue.push_back(t);
                }
            }
        }
        Dfa {
            props: self.props.clone(),
            initial: 0,
            accepting: reps.iter().map(|&q| self.accepting[q]).collect(),
            delta: reps
                .iter()
                .map(|&q| self.delta[q].iter().map(|&t| number[&class[t]]).collect())
                .collect(),
        }
    }

    fn reachable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial] = true;
        let mut order = vec![self.initial];
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    /// Shortest word over symbols admitted by `allowed` on which the two
    /// automata disagree, or `None` if they agree on all such words.
    pub fn difference_witness(&self, other: &Dfa, allowed: impl Fn(u32) -> bool) -> Result<Option<Vec<u32>>, ScltlError> {
        if self.props != other.props {
            return Err(ScltlError::PropMismatch);
        }
        let start = (self.initial, other.initial);
        let mut parent: HashMap<Pair, Option<(Pair, u32)>> = HashMap::from([(start, None)]);
        let mut queue = VecDeque::from([start]);
        while let Some(pair) = queue.pop_front() {
            if self.accepting[pair.0] != other.accepting[pair.1] {
                let mut word = Vec::new();
                let mut at = pair;
                while let Some(Some((prev, sym))) = parent.get(&at) {
                    word.push(*sym);
                    at = *prev;
                }
                word.reverse();
                return Ok(Some(word));
            }
            for sym in (0..self.num_symbols()).filter(|&s| allowed(s)) {
                let next = (self.step(pair.0, sym), other.step(pair.1, sym));
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                    e.insert(Some((pair, sym)));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Symbols leading from `from` to `to`.
    pub fn symbols_between(&self, from: usize, to: usize) -> Vec<u32> {
        (0..self.num_symbols()).filter(|&s| self.step(from, s) == to).collect()
    }

    /// A compact propositional guard for `from → to`, or `None` if no
    /// symbol leads there.
    pub fn guard(&self, from: usize, to: usize) -> Option<String> {
        let symbols = self.symbols_between(from, to);
        if symbols.is_empty() {
            return None;
        }
        Some(render_guard(&self.props, &symbols))
    }

    fn edges(&self) -> Vec<(usize, String, usize)> {
        let mut out = Vec::new();
        for q in 0..self.num_states() {
            let mut targets: Vec<usize> = self.delta[q].clone();
            targets.sort();
            targets.dedup();
            for t in targets {
                out.push((q, self.guard(q, t).unwrap(), t));
            }
        }
        out
    }

    pub fn to_document(&self) -> DfaDocument {
        DfaDocument {
            props: self.props.clone(),
            states: (0..self.num_states()).collect(),
            initial: self.initial,
            accepting: self.accepting_states(),
            transitions: self
                .edges()
                .into_iter()
                .map(|(from, guard, to)| DfaEdge { from, guard, to })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("dfa serializes")
    }

    pub fn from_json(text: &str) -> Result<Dfa, ScltlError> {
        let doc: DfaDocument = serde_json::from_str(text)?;
        Dfa::from_document(&doc)
    }

    /// Builds a DFA from guarded edges. Symbols matched by two edges out of
    /// the same state are an error; symbols matched by none go to an added
    /// sink.
    pub fn from_document(doc: &DfaDocument) -> Result<Dfa, ScltlError> {
        let k = doc.props.len();
        if k > MAX_PROPS {
            return Err(ScltlError::TooManyProps(k));
        }
        let n = doc.states.len();
        let index: HashMap<usize, usize> = doc.states.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        if index.len() != n {
            return Err(ScltlError::Dfa("duplicate state".into()));
        }
        let lookup = |q: usize| {
            index
                .get(&q)
                .copied()
                .ok_or_else(|| ScltlError::Dfa(format!("unknown state {q}")))
        };
        let symbols = 1usize << k;
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; symbols]; n];
        for edge in &doc.transitions {
            let from = lookup(edge.from)?;
            let to = lookup(edge.to)?;
            let guard = parse(&edge.guard, &doc.props)?;
            for sym in 0..symbols as u32 {
                let hit = guard
                    .expr
                    .eval(sym)
                    .ok_or_else(|| ScltlError::Dfa(format!("temporal guard `{}`", edge.guard)))?;
                if !hit {
                    continue;
                }
                let slot = &mut delta[from][sym as usize];
                if slot.is_some_and(|t| t != to) {
                    return Err(ScltlError::Dfa(format!(
                        "state {} has overlapping guards on symbol {sym}",
                        edge.from
                    )));
                }
                *slot = Some(to);
            }
        }
        let mut accepting = vec![false; n];
        for &q in &doc.accepting {
            accepting[lookup(q)?] = true;
        }
        let incomplete = delta.iter().flatten().any(Option::is_none);
        let sink = n;
        let mut delta: Vec<Vec<usize>> = delta
            .into_iter()
            .map(|row| row.into_iter().map(|t| t.unwrap_or(sink)).collect())
            .collect();
        if incomplete {
            delta.push(vec![sink; symbols]);
            accepting.push(false);
        }
        Ok(Dfa {
            props: doc.props.clone(),
            initial: lookup(doc.initial)?,
            accepting,
            delta,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [label=\"{q}\", shape={shape}];");
        }
        let _ = writeln!(out, "  init -> q{};", self.initial);
        for (from, guard, to) in self.edges() {
            let _ = writeln!(out, "  q{from} -> q{to} [label=\"{guard}\"];");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDocument {
    pub props: Vec<String>,
    pub states: Vec<usize>,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<DfaEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaEdge {
    pub from: usize,
    pub guard: String,
    pub to: usize,
}

/// A cube fixes the bits in `care` to the corresponding bits of `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    care: u32,
    value: u32,
}

impl Cube {
    fn covers(self, sym: u32) -> bool {
        sym & self.care == self.value
    }
}

/// Prime implicants by iterated merging, then a greedy cover.
fn render_guard(props: &[String], symbols: &[u32]) -> String {
    let k = props.len();
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    if symbols.len() == 1usize << k {
        return "true".into();
    }
    let mut current: BTreeSet<Cube> = symbols.iter().map(|&s| Cube { care: full, value: s }).collect();
    let mut primes: BTreeSet<Cube> = BTreeSet::new();
    while !current.is_empty() {
        let mut merged: BTreeSet<Cube> = BTreeSet::new();
        let mut used: BTreeSet<Cube> = BTreeSet::new();
        let list: Vec<Cube> = current.iter().copied().collect();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                let diff = a.value ^ b.value;
                if a.care == b.care && diff.count_ones() == 1 {
                    merged.insert(Cube {
                        care: a.care & !diff,
                        value: a.value & !diff,
                    });
                    used.insert(a);
                    used.insert(b);
                }
            }
        }
        primes.extend(current.difference(&used).copied());
        current = merged;
    }
    let mut uncovered: BTreeSet<u32> = symbols.iter().copied().collect();
    let mut chosen: Vec<Cube> = Vec::new();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .copied()
            .max_by_key(|c| {
                (
                    uncovered.iter().filter(|&&s| c.covers(s)).count(),
                    std::cmp::Reverse(c.care.count_ones()),
                    std::cmp::Reverse(*c),
                )
            })
            .expect("primes cover every symbol");
        uncovered.retain(|&s| !best.covers(s));
        chosen.push(best);
    }
    chosen.sort_by_key(|c| (c.care.count_ones(), c.care, !c.value));
    let cubes: Vec<String> = chosen
        .iter()
        .map(|c| {
            let literals: Vec<String> = (0..k)
                .filter(|&i| c.care >> i & 1 == 1)
                .map(|i| {
                    if c.value >> i & 1 == 1 {
                        props[i].clone()
                    } else {
                        format!("!{}", props[i])
                    }
                })
                .collect();
            literals.join(" & ")
        })
        .collect();
    if cubes.len() == 1 {
        cubes.into_iter().next().unwrap()
    } else {
        cubes
            .into_iter()
            .map(|c| if c.contains('&') { format!("({c})") } else { c })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}
