//! Factorizations into (conjugated) twist letters and the Hurwitz calculus on them.
//!
//! Conjugation follows `(a)_b = b^-1 a b`. The right Hurwitz move at position `i` sends
//! `(τ_i, τ_{i+1})` to `(τ_{i+1}, (τ_i)_{τ_{i+1}})`; the left move is its inverse.

use crate::error::{Error, Result};
use crate::intmat::axpy;
use crate::surface::{CurveId, HomologyModel};
use crate::twist::{dehn_twist, twist_matrix_of_class, MappingClassMatrix, SignedCurve, TwistWord};
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::hash::Hash;

/// Something that can be conjugated by another letter of the same kind.
pub trait Letter: Clone + fmt::Debug + PartialEq + Eq + Hash {
    /// `(self)_by`, or `(self)_{by^-1}` when `inverse` is set.
    fn conjugate(&self, by: &Self, inverse: bool) -> Self;
}

/// `(T_core^sign)_conjugator`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwistLetter {
    pub core: CurveId,
    #[serde(default, skip_serializing_if = "TwistWord::is_empty")]
    pub conjugator: TwistWord,
    pub sign: i8,
}

impl TwistLetter {
    pub fn plain(core: CurveId) -> Self {
        TwistLetter { core, conjugator: TwistWord::default(), sign: 1 }
    }

    pub fn conjugated(core: CurveId, conjugator: TwistWord) -> Self {
        TwistLetter { core, conjugator: conjugator.free_reduce(), sign: 1 }
    }

    /// The letter as a twist word `w^-1 T^s w`.
    pub fn expand(&self) -> TwistWord {
        let mut letters = self.conjugator.inverse().letters;
        letters.push(SignedCurve { curve: self.core, sign: self.sign });
        letters.extend_from_slice(&self.conjugator.letters);
        TwistWord::new(letters)
    }

    pub fn inverse(&self) -> Self {
        TwistLetter { sign: -self.sign, ..self.clone() }
    }

    pub fn is_plain(&self) -> bool {
        self.conjugator.is_empty()
    }
}

impl Letter for TwistLetter {
    fn conjugate(&self, by: &Self, inverse: bool) -> Self {
        let b = if inverse { by.inverse() } else { by.clone() };
        TwistLetter { core: self.core, conjugator: self.conjugator.concat(&b.expand()).free_reduce(), sign: self.sign }
    }
}

impl fmt::Display for TwistLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let core = if self.sign > 0 { format!("T_{}", self.core) } else { format!("T_{}^-1", self.core) };
        if self.conjugator.is_empty() {
            write!(f, "{core}")
        } else {
            write!(f, "({core})_{{{}}}", self.conjugator)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

/// A Hurwitz move on positions `index` and `index + 1` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub index: usize,
    pub direction: Direction,
}

impl Move {
    pub fn right(index: usize) -> Self {
        Move { index, direction: Direction::Right }
    }
    pub fn left(index: usize) -> Self {
        Move { index, direction: Direction::Left }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "L: Serialize", deserialize = "L: Deserialize<'de>"))]
pub struct Factorization<L = TwistLetter> {
    pub letters: Vec<L>,
    /// Fingerprint of the homology model the letters live in, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl<L> Factorization<L> {
    pub fn new(letters: Vec<L>) -> Self {
        Factorization { letters, model: None }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl<L: Letter> Factorization<L> {

    /// Simultaneous conjugation of every letter by `by`.
    pub fn conjugate_all(&self, by: &L) -> Self {
        Factorization { letters: self.letters.iter().map(|l| l.conjugate(by, false)).collect(), model: self.model.clone() }
    }
}

impl Factorization<TwistLetter> {
    pub fn in_model(letters: Vec<TwistLetter>, model: &HomologyModel) -> Self {
        Factorization { letters, model: Some(model.fingerprint.clone()) }
    }

    pub fn from_word(word: &TwistWord, model: &HomologyModel) -> Self {
        Self::in_model(word.letters.iter().map(|l| TwistLetter { core: l.curve, conjugator: TwistWord::default(), sign: l.sign }).collect(), model)
    }

    fn check_model(&self, model: &HomologyModel) -> Result<()> {
        match &self.model {
            Some(fp) if *fp != model.fingerprint => Err(Error::ModelMismatch { expected: model.fingerprint.clone(), found: fp.clone() }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Factorization<TwistLetter> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" ∘ "))
    }
}

pub fn hurwitz_move<L: Letter>(f: &Factorization<L>, i: usize, direction: Direction) -> Result<Factorization<L>> {
    let mut out = f.clone();
    apply_move(&mut out.letters, Move { index: i, direction })?;
    Ok(out)
}

fn apply_move<L: Letter>(letters: &mut [L], m: Move) -> Result<()> {
    let i = m.index;
    if i == 0 || i >= letters.len() {
        return Err(Error::IndexOutOfRange { index: i, len: letters.len() });
    }
    let (a, b) = (letters[i - 1].clone(), letters[i].clone());
    match m.direction {
        Direction::Right => {
            letters[i - 1] = b.clone();
            letters[i] = a.conjugate(&b, false);
        }
        Direction::Left => {
            letters[i - 1] = b.conjugate(&a, true);
            letters[i] = a;
        }
    }
    Ok(())
}

/// Applies a move script; on failure reports the 0-based position of the offending move.
pub fn apply_script<L: Letter>(f: &Factorization<L>, script: &[Move]) -> std::result::Result<Factorization<L>, (usize, Error)> {
    let mut out = f.clone();
    for (k, m) in script.iter().enumerate() {
        apply_move(&mut out.letters, *m).map_err(|e| (k, e))?;
    }
    Ok(out)
}

/// Class of the twist curve of a letter: `w^-1(core)` for conjugator `w`.
pub fn letter_class(model: &HomologyModel, l: &TwistLetter) -> Result<Vec<i64>> {
    let mut x = model.class(&l.core)?.to_vec();
    for s in &l.conjugator.letters {
        x = crate::twist::twist_vector(model, model.class(&s.curve)?, -(s.sign as i64), &x)?;
    }
    Ok(x)
}

pub fn letter_matrix(model: &HomologyModel, l: &TwistLetter) -> Result<MappingClassMatrix> {
    let v = letter_class(model, l)?;
    Ok(MappingClassMatrix { matrix: twist_matrix_of_class(model, &v, l.sign as i64)?, model: model.fingerprint.clone(), word: None })
}

/// Right-to-left product of all letters.
pub fn product_matrix(f: &Factorization<TwistLetter>, model: &HomologyModel) -> Result<MappingClassMatrix> {
    f.check_model(model)?;
    // Multiplying the expanded words and cancelling first keeps the intermediate
    // matrices small; letter classes themselves can grow exponentially under moves.
    let mut word = TwistWord::default();
    for l in &f.letters {
        word = word.concat(&l.expand()).free_reduce();
    }
    let mut m = crate::twist::word_matrix(model, &word)?;
    m.word = None;
    Ok(m)
}

/// Brings the `h`-th letter (1-based) to the front unchanged with `h-1` right moves.
pub fn rotate_to_front<L: Letter>(f: &Factorization<L>, h: usize) -> Result<(Factorization<L>, Vec<Move>)> {
    if h == 0 || h > f.len() {
        return Err(Error::IndexOutOfRange { index: h, len: f.len() });
    }
    let script: Vec<Move> = (1..h).rev().map(Move::right).collect();
    let out = apply_script(f, &script).map_err(|(_, e)| e)?;
    Ok((out, script))
}

pub fn fiber_sum<L: Letter>(f: &Factorization<L>, g: &Factorization<L>) -> Result<Factorization<L>> {
    if f.model.is_some() && g.model.is_some() && f.model != g.model {
        return Err(Error::ModelMismatch { expected: f.model.clone().unwrap(), found: g.model.clone().unwrap() });
    }
    let mut letters = f.letters.clone();
    letters.extend_from_slice(&g.letters);
    Ok(Factorization { letters, model: f.model.clone().or_else(|| g.model.clone()) })
}

/// `F ∘ (G)_ψ`, every letter of `G` conjugated by the word `psi`.
pub fn twisted_fiber_sum(f: &Factorization, g: &Factorization, psi: &TwistWord) -> Result<Factorization> {
    let twisted = Factorization {
        letters: g
            .letters
            .iter()
            .map(|l| TwistLetter { core: l.core, conjugator: l.conjugator.concat(psi).free_reduce(), sign: l.sign })
            .collect(),
        model: g.model.clone(),
    };
    fiber_sum(f, &twisted)
}

/// Letter equality used by the search. Keys must determine the keys of conjugates.
pub trait Comparator<L> {
    type Key: Clone + Eq + Hash + fmt::Debug;
    fn key(&self, l: &L) -> Result<Self::Key>;
    /// Key of `(a)_b`, or of `(a)_{b^-1}` when `inverse`.
    fn conjugate_key(&self, a: &Self::Key, by: &Self::Key, inverse: bool) -> Result<Self::Key>;
}

/// Letters compared by the twist they induce on H1: the class up to sign, and the sign.
pub struct HomologyComparator<'a> {
    pub model: &'a HomologyModel,
}

fn normalize(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    v
}

impl Comparator<TwistLetter> for HomologyComparator<'_> {
    type Key = (Vec<i64>, i8);

    fn key(&self, l: &TwistLetter) -> Result<Self::Key> {
        Ok((normalize(letter_class(self.model, l)?), l.sign))
    }

    fn conjugate_key(&self, a: &Self::Key, by: &Self::Key, inverse: bool) -> Result<Self::Key> {
        // (a)_b has class b^-1(a); b^-1 = T_v^-s
        let s = if inverse { by.1 as i64 } else { -(by.1 as i64) };
        let p = self.model.pair(&a.0, &by.0)?;
        let v = axpy(&a.0, -crate::intmat::cmul(s, p)?, &by.0)?;
        Ok((normalize(v), a.1))
    }
}

/// Exact symbolic equality after free reduction of conjugators.
pub struct SymbolicComparator;

impl<L: Letter> Comparator<L> for SymbolicComparator {
    type Key = L;
    fn key(&self, l: &L) -> Result<L> {
        Ok(l.clone())
    }
    fn conjugate_key(&self, a: &L, by: &L, inverse: bool) -> Result<L> {
        Ok(a.conjugate(by, inverse))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum number of non-commuting moves, summed over both search directions.
    pub max_depth: usize,
    /// Maximum number of visited states over both directions.
    pub max_states: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_depth: 8, max_states: 2_000_000 }
    }
}

impl SearchBudget {
    /// Environment variable overriding `max_states`.
    pub const ENV: &'static str = "LEFSCHETZ_SEARCH_BUDGET";

    pub fn from_env(self) -> Self {
        match std::env::var(Self::ENV).ok().and_then(|s| s.parse().ok()) {
            Some(n) => SearchBudget { max_states: n, ..self },
            None => self,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum SearchOutcome {
    Found { script: Vec<Move>, essential_moves: usize, states: usize },
    Inconclusive { states: usize, depth_reached: usize, reason: String },
}

impl SearchOutcome {
    pub fn script(&self) -> Option<&[Move]> {
        match self {
            SearchOutcome::Found { script, .. } => Some(script),
            SearchOutcome::Inconclusive { .. } => None,
        }
    }
}

/// Interned letter keys with cached conjugation and commutation.
struct Engine<'c, L, C: Comparator<L>> {
    cmp: &'c C,
    keys: Vec<C::Key>,
    ids: FxHashMap<C::Key, u32>,
    conj: FxHashMap<(u32, u32, bool), u32>,
    _l: std::marker::PhantomData<L>,
}

impl<'c, L, C: Comparator<L>> Engine<'c, L, C> {
    fn new(cmp: &'c C) -> Self {
        Engine { cmp, keys: Vec::new(), ids: FxHashMap::default(), conj: FxHashMap::default(), _l: std::marker::PhantomData }
    }

    fn intern(&mut self, k: C::Key) -> u32 {
        if let Some(&i) = self.ids.get(&k) {
            return i;
        }
        let i = self.keys.len() as u32;
        self.keys.push(k.clone());
        self.ids.insert(k, i);
        i
    }

    fn conj(&mut self, a: u32, b: u32, inverse: bool) -> Result<u32> {
        if let Some(&r) = self.conj.get(&(a, b, inverse)) {
            return Ok(r);
        }
        let k = self.cmp.conjugate_key(&self.keys[a as usize], &self.keys[b as usize], inverse)?;
        let r = self.intern(k);
        self.conj.insert((a, b, inverse), r);
        Ok(r)
    }

    fn commute(&mut self, a: u32, b: u32) -> Result<bool> {
        Ok(self.conj(a, b, false)? == a && self.conj(b, a, true)? == b)
    }

    /// `nc[p]` = bitmask of positions whose letters do not commute with position `p`.
    fn masks(&mut self, s: &[u32]) -> Result<Vec<u64>> {
        let n = s.len();
        let mut nc = vec![0u64; n];
        for p in 0..n {
            for q in p + 1..n {
                if !self.commute(s[p], s[q])? {
                    nc[p] |= 1 << q;
                    nc[q] |= 1 << p;
                }
            }
        }
        Ok(nc)
    }

    /// Lexicographically least linearization of the partially commutative class of `s`.
    fn canonical(&mut self, s: &[u32]) -> Result<Vec<u32>> {
        let nc = self.masks(s)?;
        let n = s.len();
        let mut left: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut out = Vec::with_capacity(n);
        while left != 0 {
            let mut best: Option<usize> = None;
            let mut m = left;
            while m != 0 {
                let p = m.trailing_zeros() as usize;
                m &= m - 1;
                let before = left & ((1u64 << p) - 1);
                if nc[p] & before == 0 && best.is_none_or(|b| s[p] < s[b]) {
                    best = Some(p);
                }
            }
            let p = best.expect("some letter is always available");
            out.push(s[p]);
            left &= !(1u64 << p);
        }
        Ok(out)
    }

    /// Reorders `s` so that positions `p < q` become adjacent, if the commutation pattern allows.
    fn adjacent_linearization(nc: &[u64], s: &[u32], p: usize, q: usize) -> Option<(Vec<u32>, usize)> {
        let mut after_p: u64 = 1 << p;
        for r in p + 1..q {
            if nc[r] & after_p != 0 {
                after_p |= 1 << r;
            }
        }
        let mut before_q: u64 = 1 << q;
        for r in (p + 1..q).rev() {
            if nc[r] & before_q != 0 {
                before_q |= 1 << r;
            }
        }
        let between = |r: usize| r > p && r < q;
        if (p + 1..q).any(|r| after_p & (1 << r) != 0 && before_q & (1 << r) != 0) {
            return None;
        }
        let mut out: Vec<u32> = s[..p].to_vec();
        out.extend((p + 1..q).filter(|&r| after_p & (1 << r) == 0).map(|r| s[r]));
        let t = out.len();
        out.push(s[p]);
        out.push(s[q]);
        out.extend((0..s.len()).filter(|&r| between(r) && after_p & (1 << r) != 0).map(|r| s[r]));
        out.extend_from_slice(&s[q + 1..]);
        Some((out, t))
    }

    fn apply(&mut self, s: &mut [u32], t: usize, dir: Direction) -> Result<()> {
        let (a, b) = (s[t], s[t + 1]);
        match dir {
            Direction::Right => {
                s[t] = b;
                s[t + 1] = self.conj(a, b, false)?;
            }
            Direction::Left => {
                s[t] = self.conj(b, a, true)?;
                s[t + 1] = a;
            }
        }
        Ok(())
    }

    /// Adjacent commuting swaps turning `x` into `target`.
    fn bubble(&mut self, x: &mut Vec<u32>, target: &[u32], script: &mut Vec<Move>) -> Result<()> {
        for t in 0..target.len() {
            let j = (t..x.len())
                .find(|&j| x[j] == target[t])
                .ok_or_else(|| Error::InvariantViolation("search reconstruction lost a letter".into()))?;
            for k in (t..j).rev() {
                if !self.commute(x[k], x[k + 1])? {
                    return Err(Error::InvariantViolation("search reconstruction swapped non-commuting letters".into()));
                }
                x.swap(k, k + 1);
                script.push(Move::right(k + 1));
            }
        }
        Ok(())
    }
}

struct Node {
    state: Vec<u32>,
    parent: u32,
    p: u8,
    q: u8,
    dir: Direction,
    depth: u16,
}

struct Side {
    nodes: Vec<Node>,
    index: FxHashMap<Vec<u32>, u32>,
    frontier: Vec<u32>,
    depth: usize,
}

impl Side {
    fn new(root: Vec<u32>) -> Self {
        let mut index = FxHashMap::default();
        index.insert(root.clone(), 0);
        Side { nodes: vec![Node { state: root, parent: u32::MAX, p: 0, q: 0, dir: Direction::Right, depth: 0 }], index, frontier: vec![0], depth: 0 }
    }

    fn path(&self, mut i: u32) -> Vec<u32> {
        let mut out = vec![];
        while i != u32::MAX {
            out.push(i);
            i = self.nodes[i as usize].parent;
        }
        out.reverse();
        out
    }
}

/// Bounded bidirectional search for a move script taking `f` to `g` letterwise under `cmp`.
///
/// States are taken up to swaps of commuting neighbours, so depth counts only
/// non-commuting moves. The returned script is replayed and checked before it is returned.
pub fn hurwitz_search<L: Letter, C: Comparator<L>>(f: &Factorization<L>, g: &Factorization<L>, budget: SearchBudget, cmp: &C) -> Result<SearchOutcome> {
    if f.len() != g.len() {
        return Err(Error::Dimension { expected: f.len(), found: g.len() });
    }
    if f.model.is_some() && g.model.is_some() && f.model != g.model {
        return Err(Error::ModelMismatch { expected: f.model.clone().unwrap(), found: g.model.clone().unwrap() });
    }
    if f.len() > 64 {
        return Err(Error::InvalidParameter("search supports at most 64 letters".into()));
    }
    let mut eng = Engine::new(cmp);
    let fx: Vec<u32> = f.letters.iter().map(|l| cmp.key(l).map(|k| eng.intern(k))).collect::<Result<_>>()?;
    let gx: Vec<u32> = g.letters.iter().map(|l| cmp.key(l).map(|k| eng.intern(k))).collect::<Result<_>>()?;
    let mut sides = [Side::new(eng.canonical(&fx)?), Side::new(eng.canonical(&gx)?)];
    let mut meet = sides[1].index.get(&sides[0].nodes[0].state).map(|&j| (0u32, j));
    let mut states = 2;

    while meet.is_none() {
        if sides[0].depth + sides[1].depth >= budget.max_depth {
            return Ok(SearchOutcome::Inconclusive { states, depth_reached: sides[0].depth + sides[1].depth, reason: "depth budget exhausted".into() });
        }
        let which = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        if sides[which].frontier.is_empty() {
            return Ok(SearchOutcome::Inconclusive { states, depth_reached: sides[0].depth + sides[1].depth, reason: "orbit exhausted under this comparator".into() });
        }
        let frontier = std::mem::take(&mut sides[which].frontier);
        let mut next = Vec::new();
        'expand: for &ni in &frontier {
            let state = sides[which].nodes[ni as usize].state.clone();
            let nc = eng.masks(&state)?;
            for p in 0..state.len() {
                for q in p + 1..state.len() {
                    if nc[p] & (1 << q) == 0 {
                        continue;
                    }
                    let Some((lin, t)) = Engine::<L, C>::adjacent_linearization(&nc, &state, p, q) else { continue };
                    for dir in [Direction::Right, Direction::Left] {
                        let mut s = lin.clone();
                        eng.apply(&mut s, t, dir)?;
                        let canon = eng.canonical(&s)?;
                        if sides[which].index.contains_key(&canon) {
                            continue;
                        }
                        let id = sides[which].nodes.len() as u32;
                        let depth = sides[which].nodes[ni as usize].depth + 1;
                        sides[which].index.insert(canon.clone(), id);
                        let other = sides[1 - which].index.get(&canon).copied();
                        sides[which].nodes.push(Node { state: canon, parent: ni, p: p as u8, q: q as u8, dir, depth });
                        next.push(id);
                        states += 1;
                        if let Some(o) = other {
                            meet = Some(if which == 0 { (id, o) } else { (o, id) });
                            break 'expand;
                        }
                        if states > budget.max_states {
                            return Ok(SearchOutcome::Inconclusive { states, depth_reached: sides[0].depth + sides[1].depth, reason: "state budget exhausted".into() });
                        }
                    }
                }
            }
        }
        sides[which].frontier = next;
        sides[which].depth += 1;
    }

    let (mf, mb) = meet.unwrap();
    let mut x = fx.clone();
    let mut script = Vec::new();
    let mut essential = 0;
    let fpath = sides[0].path(mf);
    for w in fpath.windows(2) {
        let child = &sides[0].nodes[w[1] as usize];
        let parent = sides[0].nodes[w[0] as usize].state.clone();
        let nc = eng.masks(&parent)?;
        let (lin, t) = Engine::<L, C>::adjacent_linearization(&nc, &parent, child.p as usize, child.q as usize).unwrap();
        let dir = child.dir;
        eng.bubble(&mut x, &lin, &mut script)?;
        eng.apply(&mut x, t, dir)?;
        script.push(Move { index: t + 1, direction: dir });
        essential += 1;
    }
    let bpath = sides[1].path(mb);
    for w in bpath.windows(2).rev() {
        let child = &sides[1].nodes[w[1] as usize];
        let parent = sides[1].nodes[w[0] as usize].state.clone();
        let nc = eng.masks(&parent)?;
        let (mut lin, t) = Engine::<L, C>::adjacent_linearization(&nc, &parent, child.p as usize, child.q as usize).unwrap();
        let dir = child.dir;
        eng.apply(&mut lin, t, dir)?;
        eng.bubble(&mut x, &lin, &mut script)?;
        eng.apply(&mut x, t, dir.flip())?;
        script.push(Move { index: t + 1, direction: dir.flip() });
        essential += 1;
    }
    eng.bubble(&mut x, &gx, &mut script)?;

    // soundness: replay on the actual letters
    let replayed = apply_script(f, &script).map_err(|(_, e)| e)?;
    for (a, b) in replayed.letters.iter().zip(&g.letters) {
        if cmp.key(a)? != cmp.key(b)? {
            return Err(Error::InvariantViolation("search produced a script that does not replay".into()));
        }
    }
    Ok(SearchOutcome::Found { script, essential_moves: essential, states })
}

/// Whether two factorizations agree letter by letter under `cmp`.
pub fn letterwise_equal<L, C: Comparator<L>>(f: &Factorization<L>, g: &Factorization<L>, cmp: &C) -> Result<bool> {
    if f.len() != g.len() {
        return Ok(false);
    }
    for (a, b) in f.letters.iter().zip(&g.letters) {
        if cmp.key(a)? != cmp.key(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One exposed twist: replaying `script` on the factorization puts `T_core` in front.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub core: CurveId,
    /// Positions (1-based) of the ψ letters with this core.
    pub psi_positions: Vec<usize>,
    /// Position (1-based) of the factorization letter that is brought forward.
    pub source_index: usize,
    pub script: Vec<Move>,
    /// State digest after each move.
    pub digests: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AurouxCertificate {
    pub model: String,
    pub factorization_digest: String,
    pub psi_length: usize,
    pub entries: Vec<CertificateEntry>,
}

fn state_digest(keys: &[(Vec<i64>, i8)]) -> String {
    let payload = serde_json::to_vec(keys).expect("keys serialize");
    hex::encode(Sha256::digest(&payload))[..16].to_string()
}

/// Digest of a factorization's letters under the homology comparator.
pub fn factorization_digest(f: &Factorization, model: &HomologyModel) -> Result<String> {
    let cmp = HomologyComparator { model };
    let keys = f.letters.iter().map(|l| cmp.key(l)).collect::<Result<Vec<_>>>()?;
    Ok(state_digest(&keys))
}

/// Replays `script`, recording a digest after every move.
fn digests_along(f: &Factorization, script: &[Move], model: &HomologyModel) -> Result<(Factorization, Vec<String>)> {
    let cmp = HomologyComparator { model };
    let mut keys = f.letters.iter().map(|l| cmp.key(l)).collect::<Result<Vec<_>>>()?;
    let mut letters = f.letters.clone();
    let mut out = Vec::with_capacity(script.len());
    for m in script {
        apply_move(&mut letters, *m)?;
        let i = m.index;
        let (a, b) = (keys[i - 1].clone(), keys[i].clone());
        match m.direction {
            Direction::Right => {
                keys[i - 1] = b.clone();
                keys[i] = cmp.conjugate_key(&a, &b, false)?;
            }
            Direction::Left => {
                keys[i - 1] = cmp.conjugate_key(&b, &a, true)?;
                keys[i] = a;
            }
        }
        out.push(state_digest(&keys));
    }
    Ok((Factorization { letters, model: f.model.clone() }, out))
}

/// Slides the letter at `k` through its neighbours, leaving them unchanged, until its class
/// equals `target`. Left slides conjugate it by the inverse of each letter it passes, right
/// slides by the letter itself.
fn slide_to_match(keys: &[(Vec<i64>, i8)], k: usize, target: &(Vec<i64>, i8), cmp: &HomologyComparator) -> Result<Option<(usize, Vec<Move>)>> {
    let mut key = keys[k].clone();
    let mut script = Vec::new();
    for p in (0..k).rev() {
        key = cmp.conjugate_key(&key, &keys[p], true)?;
        script.push(Move::left(p + 1));
        if key == *target {
            return Ok(Some((p, script)));
        }
    }
    let mut key = keys[k].clone();
    let mut script = Vec::new();
    for p in k + 1..keys.len() {
        key = cmp.conjugate_key(&key, &keys[p], false)?;
        script.push(Move::right(p));
        if key == *target {
            return Ok(Some((p, script)));
        }
    }
    Ok(None)
}

/// For every core of `psi`, a move script bringing the plain positive twist on it to the front of `f`.
pub fn auroux_certificate(f: &Factorization, psi: &TwistWord, model: &HomologyModel) -> Result<AurouxCertificate> {
    f.check_model(model)?;
    let mut cores: Vec<CurveId> = Vec::new();
    for l in &psi.letters {
        if !cores.contains(&l.curve) {
            cores.push(l.curve);
        }
    }
    let missing: Vec<String> = cores.iter().filter(|c| !f.letters.iter().any(|l| l.core == **c)).map(|c| c.to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::HypothesisUnmet(missing));
    }
    if !product_matrix(f, model)?.is_identity() {
        return Err(Error::NotIdentity);
    }
    let cmp = HomologyComparator { model };
    let keys = f.letters.iter().map(|l| cmp.key(l)).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for core in cores {
        let target = (normalize(model.class(&core)?.to_vec()), 1i8);
        // an equal letter anywhere, else a letter with this core slid into place, else any letter
        let mut found = keys.iter().position(|k| *k == target).map(|k| (k, k, Vec::new()));
        let order = (0..keys.len()).filter(|&k| f.letters[k].core == core).chain((0..keys.len()).filter(|&k| f.letters[k].core != core));
        for k in order {
            if found.is_some() {
                break;
            }
            found = slide_to_match(&keys, k, &target, &cmp)?.map(|(pos, script)| (k, pos, script));
        }
        let (k, pos, mut script) = found.ok_or_else(|| Error::CertificateIncomplete(core.to_string()))?;
        script.extend((1..=pos).rev().map(Move::right));
        let source_index = k + 1;
        let (_, digests) = digests_along(f, &script, model)?;
        let psi_positions = psi.letters.iter().enumerate().filter(|(_, l)| l.curve == core).map(|(i, _)| i + 1).collect();
        entries.push(CertificateEntry { core, psi_positions, source_index, script, digests });
    }
    Ok(AurouxCertificate { model: model.fingerprint.clone(), factorization_digest: factorization_digest(f, model)?, psi_length: psi.len(), entries })
}

/// Checks a certificate move by move.
pub fn replay_certificate(f: &Factorization, psi: &TwistWord, cert: &AurouxCertificate, model: &HomologyModel) -> Result<()> {
    if cert.model != model.fingerprint {
        return Err(Error::ModelMismatch { expected: model.fingerprint.clone(), found: cert.model.clone() });
    }
    if cert.factorization_digest != factorization_digest(f, model)? {
        return Err(Error::Replay { entry: 0, step: 0, reason: "certificate belongs to a different factorization".into() });
    }
    let mut covered = vec![false; psi.len()];
    for (e, entry) in cert.entries.iter().enumerate() {
        for &p in &entry.psi_positions {
            match psi.letters.get(p.wrapping_sub(1)) {
                Some(l) if l.curve == entry.core && !covered[p - 1] => covered[p - 1] = true,
                _ => return Err(Error::Replay { entry: e, step: 0, reason: format!("entry claims ψ position {p} wrongly") }),
            }
        }
        let cmp = HomologyComparator { model };
        let mut letters = f.letters.clone();
        let mut keys = letters.iter().map(|l| cmp.key(l)).collect::<Result<Vec<_>>>()?;
        if entry.digests.len() != entry.script.len() {
            return Err(Error::Replay { entry: e, step: 0, reason: "digest count differs from move count".into() });
        }
        for (k, m) in entry.script.iter().enumerate() {
            apply_move(&mut letters, *m).map_err(|err| Error::Replay { entry: e, step: k, reason: err.to_string() })?;
            let i = m.index;
            let (a, b) = (keys[i - 1].clone(), keys[i].clone());
            match m.direction {
                Direction::Right => {
                    keys[i - 1] = b.clone();
                    keys[i] = cmp.conjugate_key(&a, &b, false)?;
                }
                Direction::Left => {
                    keys[i - 1] = cmp.conjugate_key(&b, &a, true)?;
                    keys[i] = a;
                }
            }
            if state_digest(&keys) != entry.digests[k] {
                return Err(Error::Replay { entry: e, step: k, reason: "state digest mismatch".into() });
            }
        }
        let first = letters.first().ok_or_else(|| Error::Replay { entry: e, step: 0, reason: "empty factorization".into() })?;
        if letter_matrix(model, first)?.matrix != dehn_twist(model, &entry.core, 1)?.matrix {
            return Err(Error::Replay { entry: e, step: entry.script.len(), reason: format!("first letter is not T_{}", entry.core) });
        }
    }
    if let Some(p) = covered.iter().position(|c| !c) {
        return Err(Error::Replay { entry: cert.entries.len(), step: 0, reason: format!("ψ position {} not covered", p + 1) });
    }
    Ok(())
}

/// Random letters with short random conjugators, cores drawn from `curves`.
pub fn random_factorization<R: Rng>(model: &HomologyModel, curves: &[CurveId], len: usize, max_conj: usize, rng: &mut R) -> Factorization {
    let pick = |rng: &mut R| curves[rng.gen_range(0..curves.len())];
    let letters = (0..len)
        .map(|_| {
            let k = rng.gen_range(0..=max_conj);
            let conj = TwistWord::new((0..k).map(|_| SignedCurve { curve: pick(rng), sign: if rng.gen_bool(0.5) { 1 } else { -1 } }).collect());
            TwistLetter { core: pick(rng), conjugator: conj.free_reduce(), sign: if rng.gen_bool(0.8) { 1 } else { -1 } }
        })
        .collect();
    Factorization::in_model(letters, model)
}

pub fn random_script<R: Rng>(len: usize, moves: usize, rng: &mut R) -> Vec<Move> {
    if len < 2 {
        return Vec::new();
    }
    (0..moves)
        .map(|_| Move { index: rng.gen_range(1..len), direction: if rng.gen_bool(0.5) { Direction::Left } else { Direction::Right } })
        .collect()
}
