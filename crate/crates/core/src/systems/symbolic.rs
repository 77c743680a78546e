use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use num_integer::Integer;

use super::SystemError;

/// Eventually periodic one-sided sequence `preamble · cycle^∞`, kept in
/// canonical form (primitive cycle, shortest preamble).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftPoint {
    preamble: Vec<u8>,
    cycle: Vec<u8>,
}

impl ShiftPoint {
    pub fn new(preamble: Vec<u8>, cycle: Vec<u8>) -> Result<Self, SystemError> {
        if cycle.is_empty() {
            return Err(SystemError::Invalid("a shift point needs a nonempty cycle".into()));
        }
        let mut p = Self { preamble, cycle };
        p.canonicalize();
        Ok(p)
    }

    fn canonicalize(&mut self) {
        let n = self.cycle.len();
        if let Some(period) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.cycle[i] == self.cycle[i - d])) {
            self.cycle.truncate(period);
        }
        while let Some(&last) = self.preamble.last() {
            if last != *self.cycle.last().expect("nonempty") {
                break;
            }
            self.preamble.pop();
            self.cycle.rotate_right(1);
        }
    }

    pub fn preamble(&self) -> &[u8] {
        &self.preamble
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.preamble.len() {
            self.preamble[i]
        } else {
            self.cycle[(i - self.preamble.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    pub fn shift(&self) -> Self {
        let mut next = if self.preamble.is_empty() {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            Self { preamble: Vec::new(), cycle: c }
        } else {
            Self { preamble: self.preamble[1..].to_vec(), cycle: self.cycle.clone() }
        };
        next.canonicalize();
        next
    }

    /// `word · self`.
    pub fn prepend(&self, word: &[u8]) -> Self {
        let mut pre = word.to_vec();
        pre.extend_from_slice(&self.preamble);
        let mut p = Self { preamble: pre, cycle: self.cycle.clone() };
        p.canonicalize();
        p
    }

    /// Length of the longest common prefix, `None` when the sequences are equal.
    pub fn common_prefix(&self, other: &Self) -> Option<usize> {
        let bound = self.preamble.len().max(other.preamble.len())
            + self.cycle.len().lcm(&other.cycle.len());
        (0..bound).find(|&i| self.symbol(i) != other.symbol(i))
    }

    /// Positions whose windows cover every factor of the sequence.
    pub fn factor_span(&self, width: usize) -> usize {
        self.preamble.len() + self.cycle.len() + width
    }

    pub fn format(&self, alphabet: &[char]) -> String {
        let render = |w: &[u8]| w.iter().map(|&s| alphabet[s as usize]).collect::<String>();
        format!("{}({})", render(&self.preamble), render(&self.cycle))
    }
}

/// One-sided shift space avoiding a finite list of forbidden words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSystem {
    alphabet: Vec<char>,
    forbidden: Vec<Vec<u8>>,
}

impl ShiftSystem {
    pub fn new(alphabet: Vec<char>, forbidden: Vec<Vec<u8>>) -> Result<Self, SystemError> {
        if alphabet.is_empty() || alphabet.len() > 255 {
            return Err(SystemError::Invalid("alphabet must have 1..=255 symbols".into()));
        }
        let mut seen = alphabet.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != alphabet.len() {
            return Err(SystemError::Invalid("repeated alphabet symbol".into()));
        }
        if forbidden.iter().any(|w| w.is_empty() || w.iter().any(|&s| s as usize >= alphabet.len())) {
            return Err(SystemError::Invalid("forbidden words must be nonempty words over the alphabet".into()));
        }
        Ok(Self { alphabet, forbidden })
    }

    pub fn full(symbols: usize) -> Self {
        let alphabet = (0..symbols).map(|i| char::from_digit(i as u32, 36).expect("small")).collect();
        Self { alphabet, forbidden: Vec::new() }
    }

    /// Binary shift avoiding `11`.
    pub fn golden_mean() -> Self {
        Self { alphabet: vec!['0', '1'], forbidden: vec![vec![1, 1]] }
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Vec<u8>] {
        &self.forbidden
    }

    pub fn symbols(&self) -> u8 {
        self.alphabet.len() as u8
    }

    /// Longest forbidden word length (0 for the full shift).
    pub fn window(&self) -> usize {
        self.forbidden.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn word_allowed(&self, word: &[u8]) -> bool {
        self.forbidden
            .iter()
            .all(|f| f.len() > word.len() || !word.windows(f.len()).any(|w| w == f.as_slice()))
    }

    /// Whether `word` ends with a forbidden word.
    pub fn suffix_forbidden(&self, word: &[u8]) -> bool {
        self.forbidden.iter().any(|f| word.ends_with(f))
    }

    pub fn contains(&self, p: &ShiftPoint) -> bool {
        let w = self.window().max(1);
        self.word_allowed(&p.prefix(p.factor_span(w)))
            && p.preamble().iter().chain(p.cycle()).all(|&s| s < self.symbols())
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<u8>, SystemError> {
        s.chars()
            .map(|c| {
                self.alphabet
                    .iter()
                    .position(|&a| a == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| SystemError::Invalid(format!("symbol {c:?} not in alphabet")))
            })
            .collect()
    }

    pub fn format_word(&self, w: &[u8]) -> String {
        w.iter().map(|&s| self.alphabet[s as usize]).collect()
    }

    /// Parses `pre(cycle)`.
    pub fn parse_point(&self, s: &str) -> Result<ShiftPoint, SystemError> {
        let bad = || SystemError::Invalid(format!("expected pre(cycle), got {s:?}"));
        let (pre, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let cyc = rest.strip_suffix(')').ok_or_else(bad)?;
        let p = ShiftPoint::new(self.parse_word(pre)?, self.parse_word(cyc)?)?;
        if !self.contains(&p) {
            return Err(SystemError::OutOfDomain(format!("{s} contains a forbidden word")));
        }
        Ok(p)
    }
}

impl ShiftSystem {
    /// Memory of the shift: states are words of this length.
    pub fn memory(&self) -> usize {
        self.window().saturating_sub(1)
    }

    fn state_of(&self, word: &[u8]) -> Vec<u8> {
        word[word.len() - self.memory()..].to_vec()
    }

    /// States (allowed words of length `memory`) admitting an infinite forward path.
    pub fn live_states(&self) -> HashSet<Vec<u8>> {
        let m = self.memory();
        let mut states: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..m {
            states = states
                .into_iter()
                .flat_map(|w| {
                    (0..self.symbols()).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .filter(|w| self.word_allowed(w))
                .collect();
        }
        let mut live: HashSet<Vec<u8>> = states.into_iter().collect();
        loop {
            let before = live.len();
            let snapshot = live.clone();
            live.retain(|s| self.successors(s).iter().any(|(_, t)| snapshot.contains(t)));
            if live.len() == before {
                return live;
            }
        }
    }

    /// `(symbol, next state)` for every allowed one-symbol extension of a state.
    fn successors(&self, state: &[u8]) -> Vec<(u8, Vec<u8>)> {
        let m = self.memory();
        (0..self.symbols())
            .filter_map(|a| {
                let mut w = state.to_vec();
                w.push(a);
                (!self.suffix_forbidden(&w)).then(|| (a, w[w.len() - m..].to_vec()))
            })
            .collect()
    }

    /// Whether `word` is the prefix of some point of the space.
    pub fn extendable(&self, word: &[u8], live: &HashSet<Vec<u8>>) -> bool {
        self.pad_to_memory(word, live, &mut |c| c.to_vec()).is_some()
    }

    /// Lexicographically first way of lengthening `word` to at least `memory`
    /// symbols while staying allowed and live.
    fn pad_to_memory(
        &self,
        word: &[u8],
        live: &HashSet<Vec<u8>>,
        order: &mut dyn FnMut(&[u8]) -> Vec<u8>,
    ) -> Option<Vec<u8>> {
        if !self.word_allowed(word) {
            return None;
        }
        if word.len() >= self.memory() {
            return live.contains(&self.state_of(word)).then(|| word.to_vec());
        }
        let symbols: Vec<u8> = (0..self.symbols()).collect();
        for a in order(&symbols) {
            let mut w = word.to_vec();
            w.push(a);
            if let Some(found) = self.pad_to_memory(&w, live, order) {
                return Some(found);
            }
        }
        None
    }

    /// Closes `word` into an eventually periodic point by always appending the
    /// smallest symbol that keeps the state live.
    pub fn extend_greedy(&self, word: &[u8], live: &HashSet<Vec<u8>>) -> Option<ShiftPoint> {
        let mut seq = self.pad_to_memory(word, live, &mut |c| c.to_vec())?;
        let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
        loop {
            let state = self.state_of(&seq);
            if let Some(&j) = seen.get(&state) {
                let cycle = seq[j..].to_vec();
                seq.truncate(j);
                return ShiftPoint::new(seq, cycle).ok();
            }
            seen.insert(state.clone(), seq.len());
            let (a, _) = self.successors(&state).into_iter().find(|(_, t)| live.contains(t))?;
            seq.push(a);
        }
    }

    /// Random admissible point starting with `word`: a random walk of `walk`
    /// steps on live states, then a greedy close.
    pub fn extend_random<R: Rng + ?Sized>(
        &self,
        word: &[u8],
        walk: usize,
        live: &HashSet<Vec<u8>>,
        rng: &mut R,
    ) -> Option<ShiftPoint> {
        let mut shuffle = |c: &[u8]| {
            let mut v = c.to_vec();
            v.shuffle(rng);
            v
        };
        let mut seq = self.pad_to_memory(word, live, &mut shuffle)?;
        for _ in 0..walk {
            let next: Vec<u8> = self
                .successors(&self.state_of(&seq))
                .into_iter()
                .filter(|(_, t)| live.contains(t))
                .map(|(a, _)| a)
                .collect();
            seq.push(*next.choose(rng)?);
        }
        self.extend_greedy(&seq, live)
    }
}

/// Adding machine on binary words of fixed length, least significant symbol first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OdometerSystem {
    depth: usize,
}

impl OdometerSystem {
    pub fn new(depth: usize) -> Result<Self, SystemError> {
        if depth == 0 || depth > 64 {
            return Err(SystemError::Invalid("odometer depth must be in 1..=64".into()));
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        w.len() == self.depth && w.iter().all(|&s| s < 2)
    }

    pub fn add_one(&self, w: &[u8]) -> Vec<u8> {
        let mut out = w.to_vec();
        for s in out.iter_mut() {
            if *s == 0 {
                *s = 1;
                return out;
            }
            *s = 0;
        }
        out
    }

    pub fn sub_one(&self, w: &[u8]) -> Vec<u8> {
        let mut out = w.to_vec();
        for s in out.iter_mut() {
            if *s == 1 {
                *s = 0;
                return out;
            }
            *s = 1;
        }
        out
    }

    /// `f^k(w)` for any integer `k` (negative powers use the inverse).
    pub fn iterate(&self, w: &[u8], k: i64) -> Vec<u8> {
        let value = Self::to_int(w) as i128;
        let modulus = 1i128 << self.depth;
        Self::from_int((value + k as i128).rem_euclid(modulus) as u64, self.depth)
    }

    pub fn to_int(w: &[u8]) -> u64 {
        w.iter().rev().fold(0u64, |acc, &s| (acc << 1) | s as u64)
    }

    pub fn from_int(v: u64, depth: usize) -> Vec<u8> {
        (0..depth).map(|i| ((v >> i) & 1) as u8).collect()
    }
}

pub fn format_binary(w: &[u8]) -> String {
    w.iter().map(|&s| if s == 0 { '0' } else { '1' }).collect()
}

impl fmt::Display for ShiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |w: &[u8]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("");
        write!(f, "{}({})", digits(&self.preamble), digits(&self.cycle))
    }
}
