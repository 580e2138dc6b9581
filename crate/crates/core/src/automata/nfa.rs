//! ε-capable automata: Thompson construction from an AST, ε-edge
//! simplification, and direct simulation. The simulator is the
//! matching oracle the DFA pipeline is checked against, so it stays
//! deliberately naive.

use crate::syntax::RegexAst;
use crate::StateId;

/// Transition label; `None` is an ε-move.
pub type Label = Option<char>;

/// Nondeterministic automaton with a single accept state, as produced
/// by Thompson construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    adjacency: Vec<Vec<(Label, StateId)>>,
    start: StateId,
    accept: StateId,
    alphabet: Vec<char>,
}

impl Nfa {
    pub fn state_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    /// Distinct non-ε labels in first-appearance order.
    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn edges_from(&self, state: StateId) -> &[(Label, StateId)] {
        &self.adjacency[state as usize]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Label, StateId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(from, edges)| {
            edges
                .iter()
                .map(move |&(label, to)| (from as StateId, label, to))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn epsilon_count(&self) -> usize {
        self.transitions()
            .filter(|(_, label, _)| label.is_none())
            .count()
    }
}

struct Builder {
    adjacency: Vec<Vec<(Label, StateId)>>,
    alphabet: Vec<char>,
}

impl Builder {
    fn state(&mut self) -> StateId {
        let id = self.adjacency.len() as StateId;
        self.adjacency.push(Vec::new());
        id
    }

    fn edge(&mut self, from: StateId, label: Label, to: StateId) {
        if let Some(c) = label {
            if !self.alphabet.contains(&c) {
                self.alphabet.push(c);
            }
        }
        self.adjacency[from as usize].push((label, to));
    }

    fn union(&mut self, a: (StateId, StateId), b: (StateId, StateId)) -> (StateId, StateId) {
        let start = self.state();
        let accept = self.state();
        self.edge(start, None, a.0);
        self.edge(start, None, b.0);
        self.edge(a.1, None, accept);
        self.edge(b.1, None, accept);
        (start, accept)
    }

    fn literal(&mut self, c: char) -> (StateId, StateId) {
        let start = self.state();
        let accept = self.state();
        self.edge(start, Some(c), accept);
        (start, accept)
    }

    fn fragment(&mut self, ast: &RegexAst) -> (StateId, StateId) {
        match ast {
            RegexAst::Literal(c) => self.literal(*c),
            RegexAst::Range(lo, hi) => {
                let mut frag = self.literal(*lo);
                let mut c = *lo;
                while c < *hi {
                    c = char::from_u32(c as u32 + 1).expect("range endpoints are scalar values");
                    let next = self.literal(c);
                    frag = self.union(frag, next);
                }
                frag
            }
            RegexAst::Concat(parts) => {
                let mut iter = parts.iter();
                let (start, mut accept) =
                    self.fragment(iter.next().expect("parser rejects empty concat"));
                for part in iter {
                    let (s, a) = self.fragment(part);
                    self.edge(accept, None, s);
                    accept = a;
                }
                (start, accept)
            }
            RegexAst::Union(parts) => {
                let mut iter = parts.iter();
                let mut frag = self.fragment(iter.next().expect("parser rejects empty union"));
                for part in iter {
                    let next = self.fragment(part);
                    frag = self.union(frag, next);
                }
                frag
            }
            RegexAst::Star(inner) => {
                let (is, ia) = self.fragment(inner);
                let start = self.state();
                let accept = self.state();
                self.edge(start, None, is);
                self.edge(ia, None, accept);
                self.edge(start, None, accept);
                self.edge(ia, None, is);
                (start, accept)
            }
            RegexAst::Plus(inner) => {
                let (is, ia) = self.fragment(inner);
                let start = self.state();
                let accept = self.state();
                self.edge(start, None, is);
                self.edge(ia, None, accept);
                self.edge(ia, None, is);
                (start, accept)
            }
            RegexAst::Optional(inner) => {
                let (is, ia) = self.fragment(inner);
                let start = self.state();
                let accept = self.state();
                self.edge(start, None, is);
                self.edge(ia, None, accept);
                self.edge(start, None, accept);
                (start, accept)
            }
        }
    }
}

/// Thompson construction. Every operator becomes its standard gadget;
/// ranges desugar to a union of their member characters; n-ary nodes
/// fold left.
pub fn thompson_nfa(ast: &RegexAst) -> Nfa {
    let mut builder = Builder {
        adjacency: Vec::new(),
        alphabet: Vec::new(),
    };
    let (start, accept) = builder.fragment(ast);
    Nfa {
        adjacency: builder.adjacency,
        start,
        accept,
        alphabet: builder.alphabet,
    }
}

/// Adds to `set` (and `stack`) everything ε-reachable from the states
/// currently on `stack`.
fn epsilon_close(nfa: &Nfa, set: &mut [bool], stack: &mut Vec<StateId>) {
    while let Some(state) = stack.pop() {
        for &(label, to) in nfa.edges_from(state) {
            if label.is_none() && !set[to as usize] {
                set[to as usize] = true;
                stack.push(to);
            }
        }
    }
}

/// Runs the NFA over `input` by the textbook subset simulation.
pub fn nfa_simulate(nfa: &Nfa, input: &str) -> bool {
    let n = nfa.state_count();
    let mut current = vec![false; n];
    let mut stack = vec![nfa.start()];
    current[nfa.start() as usize] = true;
    epsilon_close(nfa, &mut current, &mut stack);

    for c in input.chars() {
        let mut next = vec![false; n];
        let mut any = false;
        for (state, &on) in current.iter().enumerate() {
            if !on {
                continue;
            }
            for &(label, to) in nfa.edges_from(state as StateId) {
                if label == Some(c) && !next[to as usize] {
                    next[to as usize] = true;
                    stack.push(to);
                    any = true;
                }
            }
        }
        if !any {
            return false;
        }
        epsilon_close(nfa, &mut next, &mut stack);
        current = next;
    }
    current[nfa.accept() as usize]
}

/// Contracts ε-edges `u --ε--> v` where `u` has that single outgoing
/// edge and `v` has that single incoming edge, repeating to a fixed
/// point. Merging such a pair cannot change the language: every path
/// through `u` must continue to `v` and every path into `v` came from
/// `u`. Remaining states are renumbered densely.
pub fn simplify_nfa(nfa: &Nfa) -> Nfa {
    let n = nfa.state_count();
    let mut edges: Vec<(StateId, Label, StateId)> = nfa.transitions().collect();
    let mut start = nfa.start();
    let mut accept = nfa.accept();
    let mut merged = vec![false; n];

    loop {
        let mut outdeg = vec![0u32; n];
        let mut indeg = vec![0u32; n];
        for &(u, _, v) in &edges {
            outdeg[u as usize] += 1;
            indeg[v as usize] += 1;
        }
        let candidate = edges.iter().position(|&(u, label, v)| {
            label.is_none() && u != v && outdeg[u as usize] == 1 && indeg[v as usize] == 1
        });
        let Some(idx) = candidate else { break };
        let (u, _, v) = edges.swap_remove(idx);
        for edge in edges.iter_mut() {
            if edge.0 == v {
                edge.0 = u;
            }
            if edge.2 == v {
                edge.2 = u;
            }
        }
        if start == v {
            start = u;
        }
        if accept == v {
            accept = u;
        }
        merged[v as usize] = true;
    }

    let mut rename = vec![0 as StateId; n];
    let mut next = 0 as StateId;
    for state in 0..n {
        if !merged[state] {
            rename[state] = next;
            next += 1;
        }
    }
    let mut adjacency = vec![Vec::new(); next as usize];
    for (u, label, v) in edges {
        adjacency[rename[u as usize] as usize].push((label, rename[v as usize]));
    }
    Nfa {
        adjacency,
        start: rename[start as usize],
        accept: rename[accept as usize],
        alphabet: nfa.alphabet().to_vec(),
    }
}
