//! Deterministic fixtures for the property and acceptance suites:
//! a tiny seedable generator plus random DFAs, random pattern trees
//! and exhaustive string enumeration. Kept in the library so the
//! downstream crates' test suites can share them.

use crate::automata::Dfa;
use crate::syntax::RegexAst;
use crate::{StateId, DEAD};

/// SplitMix64. Not fancy, but stable across toolchains, which keeps
/// every seeded test reproducible byte for byte.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`. Modulo bias is irrelevant at test
    /// sizes.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// True with probability `percent / 100`.
    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// Random DFA over a prefix of `pool`, up to `max_states` states.
/// `dead_percent` of entries are dead (0 gives a complete DFA). Start
/// state and finals are random; the DFA may be partial, disconnected
/// or final-free on purpose.
pub fn random_dfa(rng: &mut SplitMix64, max_states: usize, pool: &str, dead_percent: usize) -> Dfa {
    let chars: Vec<char> = pool.chars().collect();
    let state_count = 1 + rng.below(max_states);
    let ncols = 1 + rng.below(chars.len());
    let alphabet: Vec<char> = chars[..ncols].to_vec();
    let mut table = Vec::with_capacity(state_count * ncols);
    for _ in 0..state_count * ncols {
        if rng.chance(dead_percent) {
            table.push(DEAD);
        } else {
            table.push(rng.below(state_count) as StateId);
        }
    }
    let start = rng.below(state_count) as StateId;
    let finals: Vec<StateId> = (0..state_count as StateId)
        .filter(|_| rng.chance(30))
        .collect();
    Dfa::new(state_count, alphabet, table, start, &finals).expect("generated table is valid")
}

/// Random input over the DFA's own alphabet.
pub fn random_input(rng: &mut SplitMix64, dfa: &Dfa, len: usize) -> Vec<u8> {
    let bytes: Vec<u8> = dfa.alphabet().iter().map(|&c| c as u8).collect();
    (0..len).map(|_| *rng.pick(&bytes)).collect()
}

/// Random pattern tree of the given depth over a prefix of `pool`.
/// The tree is normalized by construction: n-ary nodes never directly
/// nest their own kind, so it round-trips through its printed form.
pub fn random_ast(rng: &mut SplitMix64, depth: usize, pool: &[char]) -> RegexAst {
    let leaf = depth == 0 || rng.chance(30);
    if leaf {
        if rng.chance(15) && pool.len() >= 2 {
            let lo = rng.below(pool.len() - 1);
            let hi = lo + 1 + rng.below(pool.len() - lo - 1);
            return RegexAst::Range(pool[lo], pool[hi]);
        }
        return RegexAst::Literal(*rng.pick(pool));
    }
    match rng.below(5) {
        0 => {
            let children = gather(rng, depth, pool, |ast| !matches!(ast, RegexAst::Concat(_)));
            if children.len() == 1 {
                children.into_iter().next().unwrap()
            } else {
                RegexAst::Concat(children)
            }
        }
        1 => {
            let children = gather(rng, depth, pool, |ast| !matches!(ast, RegexAst::Union(_)));
            if children.len() == 1 {
                children.into_iter().next().unwrap()
            } else {
                RegexAst::Union(children)
            }
        }
        2 => RegexAst::Star(Box::new(random_ast(rng, depth - 1, pool))),
        3 => RegexAst::Plus(Box::new(random_ast(rng, depth - 1, pool))),
        _ => RegexAst::Optional(Box::new(random_ast(rng, depth - 1, pool))),
    }
}

fn gather(
    rng: &mut SplitMix64,
    depth: usize,
    pool: &[char],
    accept: impl Fn(&RegexAst) -> bool,
) -> Vec<RegexAst> {
    let want = 2 + rng.below(2);
    let mut children = Vec::with_capacity(want);
    while children.len() < want {
        let child = random_ast(rng, depth - 1, pool);
        if accept(&child) {
            children.push(child);
        }
    }
    children
}

/// Every string over `alphabet` of length 0 to `max_len`, shortest
/// first.
pub fn strings_up_to(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for s in &frontier {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}
