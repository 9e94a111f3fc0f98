//! Artin braids acting on integer lamination coordinates, Manfredini's bicoloured
//! generators, the braid monodromy blocks and their lifts to twist factorizations.
//!
//! Coordinates: a braid on `n` strands acts on pairs `(a_k, b_k)`, `k = 1..n`, the
//! Dynnikov coordinates of a lamination in a disk with `n + 2` punctures whose two end
//! punctures are never moved. This keeps every generator interior, so the action of
//! `B_n` is faithful and equality of braids is decided exactly.

use crate::error::{Error, Result};
use crate::factorization::{Comparator, Factorization, Letter, TwistLetter};
use crate::intmat::{cadd, csub};
use crate::surface::{CurveId, Family, HomologyModel};
use crate::twist::{SignedCurve, TwistWord};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

/// A word in `σ_1^{±1}, ..., σ_{n-1}^{±1}`: `i` is `σ_i`, `-i` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub word: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, word: Vec<i32>) -> Result<Self> {
        for &g in &word {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidParameter(format!("generator {g} is not valid on {strands} strands")));
            }
        }
        Ok(BraidWord { strands, word })
    }

    pub fn inverse(&self) -> Self {
        BraidWord { strands: self.strands, word: self.word.iter().rev().map(|g| -g).collect() }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self> {
        if self.strands != other.strands {
            return Err(Error::Dimension { expected: self.strands, found: other.strands });
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Ok(BraidWord { strands: self.strands, word })
    }

    pub fn power(&self, k: usize) -> Self {
        BraidWord { strands: self.strands, word: self.word.repeat(k) }
    }

    /// Strand permutation: `perm[p]` is where the strand starting at `p` ends (0-based).
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = strand
        for &g in &self.word {
            let i = g.unsigned_abs() as usize - 1;
            at.swap(i, i + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }
}

pub fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &g in word {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// Dynnikov coordinates `(a_k, b_k)`, `k = 1..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaminationCoords {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl LaminationCoords {
    pub fn strands(&self) -> usize {
        self.a.len()
    }

    pub fn flat(&self) -> Vec<i64> {
        self.a.iter().zip(&self.b).flat_map(|(a, b)| [*a, *b]).collect()
    }
}

fn pos(x: i64) -> i64 {
    x.max(0)
}
fn neg(x: i64) -> i64 {
    x.min(0)
}

fn act_generator(l: &mut LaminationCoords, g: i32) -> Result<()> {
    let p = g.unsigned_abs() as usize - 1;
    let q = p + 1;
    let (ap, bp, aq, bq) = (l.a[p], l.b[p], l.a[q], l.b[q]);
    if g > 0 {
        let c = cadd(csub(csub(ap, neg(bp))?, aq)?, pos(bq))?;
        l.a[p] = cadd(cadd(ap, pos(bp))?, pos(csub(pos(bq), c)?))?;
        l.b[p] = csub(bq, pos(c))?;
        l.a[q] = cadd(cadd(aq, neg(bq))?, neg(cadd(neg(bp), c)?))?;
        l.b[q] = cadd(bp, pos(c))?;
    } else {
        let d = csub(csub(cadd(ap, neg(bp))?, aq)?, pos(bq))?;
        l.a[p] = csub(csub(ap, pos(bp))?, pos(cadd(pos(bq), d)?))?;
        l.b[p] = cadd(bq, neg(d))?;
        l.a[q] = csub(csub(aq, neg(bq))?, neg(csub(neg(bp), d)?))?;
        l.b[q] = csub(bp, neg(d))?;
    }
    Ok(())
}

/// Image of `l` under `w`, letters applied left to right.
pub fn lamination_act(w: &BraidWord, l: &LaminationCoords) -> Result<LaminationCoords> {
    if l.a.len() != w.strands || l.b.len() != w.strands {
        return Err(Error::Dimension { expected: w.strands, found: l.a.len() });
    }
    let mut out = l.clone();
    for &g in &w.word {
        act_generator(&mut out, g)?;
    }
    Ok(out)
}

/// The test family: the standard lamination `E = (0,1,...,0,1)`, the curves around
/// punctures `{i, i+1}`, and the curves around `{1, ..., j}` for `3 <= j < n`.
pub fn filling_family(n: usize) -> Vec<LaminationCoords> {
    let mut fam = vec![LaminationCoords { a: vec![0; n], b: vec![1; n] }];
    let around = |lo: usize, hi: usize| {
        let mut b = vec![0; n];
        b[lo] = -1;
        b[hi] = 1;
        LaminationCoords { a: vec![0; n], b }
    };
    for i in 0..n.saturating_sub(1) {
        fam.push(around(i, i + 1));
    }
    for j in 3..n {
        fam.push(around(0, j - 1));
    }
    fam
}

/// Concatenated images of the filling family: equal keys iff equal braids.
pub fn braid_key(w: &BraidWord) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for l in filling_family(w.strands) {
        out.extend(lamination_act(w, &l)?.flat());
    }
    Ok(out)
}

/// `w1 = w2` in the braid group: `w1 w2^-1` fixes every member of the filling family.
pub fn braid_equal(w1: &BraidWord, w2: &BraidWord) -> Result<bool> {
    let quotient = w1.concat(&w2.inverse())?;
    for l in filling_family(w1.strands) {
        if lamination_act(&quotient, &l)? != l {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Partition of the strands `1..=n` into labelled blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub blocks: Vec<Vec<usize>>,
}

impl Colouring {
    /// `{1..m}` (positive roots) and `{m+1..2m}` (negative roots).
    pub fn bicoloured(m: usize) -> Self {
        Colouring { blocks: vec![(1..=m).collect(), (m + 1..=2 * m).collect()] }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n + 1];
        for b in &self.blocks {
            for &s in b {
                if s == 0 || s > n || seen[s] {
                    return Err(Error::InvalidParameter(format!("colouring is not a partition of 1..{n}")));
                }
                seen[s] = true;
            }
        }
        if seen[1..].iter().any(|x| !x) {
            return Err(Error::InvalidParameter(format!("colouring does not cover 1..{n}")));
        }
        Ok(())
    }

    /// Whether the 0-based permutation maps every block onto itself.
    pub fn preserved_by(&self, perm: &[usize]) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&s| b.contains(&(perm[s - 1] + 1))))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManfrediniReport {
    pub n: usize,
    pub k: usize,
    pub checks: Vec<RelationCheck>,
}

impl ManfrediniReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds || c.skipped.is_some())
    }
}

/// Manfredini's relations for `A = σ_{n-k-1}`, `B = σ_{n-k}^2`, `C = σ_{n-k+1}` on `n` strands,
/// plus the Artin relations among the `σ_i` with `i != n-k`.
pub fn verify_manfredini(n: usize, k: usize) -> Result<ManfrediniReport> {
    if k < 1 || k >= n || n - k < 2 {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n and n-k >= 2, got n={n}, k={k}")));
    }
    let w = |v: Vec<i32>| BraidWord::new(n, v);
    let j = (n - k) as i32;
    let (a, b) = (w(vec![j - 1])?, w(vec![j, j])?);
    let mut checks = Vec::new();
    let check = |checks: &mut Vec<RelationCheck>, name: String, l: &BraidWord, r: &BraidWord| -> Result<()> {
        checks.push(RelationCheck { name, holds: braid_equal(l, r)?, skipped: None });
        Ok(())
    };
    let cat = |ws: &[&BraidWord]| -> BraidWord {
        let mut out = BraidWord { strands: n, word: vec![] };
        for x in ws {
            out.word.extend_from_slice(&x.word);
        }
        out
    };
    check(&mut checks, "ABAB = BABA".into(), &cat(&[&a, &b, &a, &b]), &cat(&[&b, &a, &b, &a]))?;
    if k >= 2 {
        let c = w(vec![j + 1])?;
        check(&mut checks, "BCBC = CBCB".into(), &cat(&[&b, &c, &b, &c]), &cat(&[&c, &b, &c, &b]))?;
        let (ai, ci) = (a.inverse(), c.inverse());
        check(&mut checks, "ABA^-1 CBC^-1 = CBC^-1 ABA^-1".into(), &cat(&[&a, &b, &ai, &c, &b, &ci]), &cat(&[&c, &b, &ci, &a, &b, &ai]))?;
    } else {
        for name in ["BCBC = CBCB", "ABA^-1 CBC^-1 = CBC^-1 ABA^-1"] {
            checks.push(RelationCheck { name: name.into(), holds: false, skipped: Some("C does not exist for k = 1".into()) });
        }
    }
    let survivors: Vec<i32> = (1..n as i32).filter(|&i| i != j).collect();
    for (x, &p) in survivors.iter().enumerate() {
        for &q in &survivors[x + 1..] {
            if q - p >= 2 {
                check(&mut checks, format!("σ{p} σ{q} = σ{q} σ{p}"), &w(vec![p, q])?, &w(vec![q, p])?)?;
            } else {
                check(&mut checks, format!("σ{p} σ{q} σ{p} = σ{q} σ{p} σ{q}"), &w(vec![p, q, p])?, &w(vec![q, p, q])?)?;
            }
        }
        if (p - j).abs() >= 2 {
            check(&mut checks, format!("σ{p} B = B σ{p}"), &w(vec![p, j, j])?, &w(vec![j, j, p])?)?;
        }
    }
    Ok(ManfrediniReport { n, k, checks })
}

/// `(σ_generator^exponent)_conjugator` as an Artin letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidLetter {
    pub generator: u32,
    pub exponent: i32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conjugator: Vec<i32>,
}

impl BraidLetter {
    pub fn plain(generator: u32) -> Self {
        BraidLetter { generator, exponent: 1, conjugator: vec![] }
    }

    pub fn conjugated(generator: u32, exponent: i32, conjugator: Vec<i32>) -> Self {
        BraidLetter { generator, exponent, conjugator: free_reduce(&conjugator) }
    }

    pub fn expand(&self) -> Vec<i32> {
        let g = self.generator as i32 * self.exponent.signum();
        let mut out: Vec<i32> = self.conjugator.iter().rev().map(|x| -x).collect();
        out.extend(std::iter::repeat_n(g, self.exponent.unsigned_abs() as usize));
        out.extend_from_slice(&self.conjugator);
        out
    }

    pub fn to_word(&self, strands: usize) -> Result<BraidWord> {
        BraidWord::new(strands, self.expand())
    }

    fn inverse(&self) -> Self {
        BraidLetter { exponent: -self.exponent, ..self.clone() }
    }
}

impl Letter for BraidLetter {
    fn conjugate(&self, by: &Self, inverse: bool) -> Self {
        let b = if inverse { by.inverse() } else { by.clone() };
        let mut conj = self.conjugator.clone();
        conj.extend(b.expand());
        BraidLetter { generator: self.generator, exponent: self.exponent, conjugator: free_reduce(&conj) }
    }
}

/// Braid letters compared through the faithful lamination action.
pub struct BraidComparator {
    pub strands: usize,
}

/// Lamination images of a letter, carrying one representative letter for conjugation.
#[derive(Clone, Debug)]
pub struct BraidKey {
    pub coords: Vec<i64>,
    pub repr: BraidLetter,
}

impl PartialEq for BraidKey {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for BraidKey {}
impl Hash for BraidKey {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.coords.hash(h)
    }
}

impl Comparator<BraidLetter> for BraidComparator {
    type Key = BraidKey;
    fn key(&self, l: &BraidLetter) -> Result<BraidKey> {
        Ok(BraidKey { coords: braid_key(&l.to_word(self.strands)?)?, repr: l.clone() })
    }
    fn conjugate_key(&self, a: &BraidKey, by: &BraidKey, inverse: bool) -> Result<BraidKey> {
        self.key(&a.repr.conjugate(&by.repr, inverse))
    }
}

/// Manfredini generators for `n = 2m`: `x_i = σ_i`, `z = σ_m`, `y_j = σ_{m+j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X(u32),
    Y(u32),
    Z,
}

impl Gen {
    pub fn artin(self, m: u32) -> u32 {
        match self {
            Gen::X(i) => i,
            Gen::Z => m,
            Gen::Y(j) => m + j,
        }
    }
}

/// A generator power such as `x3`, `y1^-1` or `z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenPower {
    pub gen: Gen,
    pub exp: i32,
}

impl GenPower {
    pub fn new(gen: Gen, exp: i32) -> Self {
        GenPower { gen, exp }
    }
}

impl fmt::Display for GenPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.gen {
            Gen::X(i) => write!(f, "x{i}")?,
            Gen::Y(j) => write!(f, "y{j}")?,
            Gen::Z => write!(f, "z")?,
        }
        if self.exp != 1 {
            write!(f, "^{}", self.exp)?;
        }
        Ok(())
    }
}

impl FromStr for GenPower {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (g, e) = match s.split_once('^') {
            Some((g, e)) => (g, e.parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?),
            None => (s, 1),
        };
        let gen = match (g.chars().next(), g.get(1..)) {
            (Some('z'), Some("")) => Gen::Z,
            (Some('x'), Some(i)) => Gen::X(i.parse().map_err(|_| Error::Parse(format!("bad index in {s:?}")))?),
            (Some('y'), Some(j)) => Gen::Y(j.parse().map_err(|_| Error::Parse(format!("bad index in {s:?}")))?),
            _ => return Err(Error::Parse(format!("bad generator {s:?}"))),
        };
        if e == 0 {
            return Err(Error::Parse(format!("zero exponent in {s:?}")));
        }
        Ok(GenPower { gen, exp: e })
    }
}

impl Serialize for GenPower {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GenPower {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `(core)_conjugator` in Manfredini's generators, `(a)_{w} = w^-1 a w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BicolouredLetter {
    pub core: GenPower,
    #[serde(default)]
    pub conjugator: Vec<GenPower>,
}

impl BicolouredLetter {
    pub fn new(core: GenPower, conjugator: Vec<GenPower>) -> Self {
        BicolouredLetter { core, conjugator }
    }

    pub fn conjugator_artin(&self, m: u32) -> Vec<i32> {
        self.conjugator
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.gen.artin(m) as i32 * p.exp.signum(), p.exp.unsigned_abs() as usize))
            .collect()
    }

    pub fn to_braid_letter(&self, m: u32) -> BraidLetter {
        BraidLetter::conjugated(self.core.gen.artin(m), self.core.exp, self.conjugator_artin(m))
    }

    pub fn to_word(&self, m: u32) -> Result<BraidWord> {
        BraidWord::new(2 * m as usize, self.to_braid_letter(m).expand())
    }
}

impl fmt::Display for BicolouredLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjugator.is_empty() {
            write!(f, "{}", self.core)
        } else {
            let w: Vec<String> = self.conjugator.iter().map(|p| p.to_string()).collect();
            write!(f, "({})_{{{}}}", self.core, w.join(" "))
        }
    }
}

/// The two printed blocks of the braid monodromy for `m = 2b`.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyBlocks {
    pub b: u32,
    pub m: u32,
    pub x_block: Vec<BicolouredLetter>,
    pub y_block: Vec<BicolouredLetter>,
}

pub fn monodromy_blocks(b: u32) -> Result<MonodromyBlocks> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("b must be at least 2, got {b}")));
    }
    let m = 2 * b;
    let p = |g: Gen| GenPower::new(g, 1);
    let u: Vec<GenPower> = (1..m).rev().map(|i| p(Gen::X(i))).collect();
    let u2: Vec<GenPower> = (1..m).map(|j| p(Gen::Y(j))).collect();
    let mut x_block = Vec::new();
    for k in 1..m {
        let conj: Vec<GenPower> = (1..k).rev().map(|i| p(Gen::X(i))).collect();
        for _ in 0..2 {
            x_block.push(BicolouredLetter::new(p(Gen::X(k)), conj.clone()));
        }
    }
    x_block.push(BicolouredLetter::new(GenPower::new(Gen::Z, 2), u.clone()));
    for j in 1..m {
        let mut conj: Vec<GenPower> = (1..j).rev().map(|i| p(Gen::Y(i))).collect();
        conj.push(p(Gen::Z));
        conj.extend_from_slice(&u);
        x_block.push(BicolouredLetter::new(GenPower::new(Gen::Y(j), 2), conj));
    }
    let mut y_block = Vec::new();
    for k in (1..m).rev() {
        let conj: Vec<GenPower> = (k + 1..m).map(|i| p(Gen::Y(i))).collect();
        for _ in 0..2 {
            y_block.push(BicolouredLetter::new(p(Gen::Y(k)), conj.clone()));
        }
    }
    y_block.push(BicolouredLetter::new(GenPower::new(Gen::Z, 2), u2.clone()));
    for j in 1..m {
        let mut conj: Vec<GenPower> = (m - j + 1..m).map(|i| p(Gen::X(i))).collect();
        conj.push(p(Gen::Z));
        conj.extend_from_slice(&u2);
        y_block.push(BicolouredLetter::new(GenPower::new(Gen::X(m - j), 2), conj));
    }
    Ok(MonodromyBlocks { b, m, x_block, y_block })
}

/// Block composition, read left to right, e.g. `"XXYY"`.
pub fn compose_blocks(blocks: &MonodromyBlocks, pattern: &str) -> Result<Vec<BicolouredLetter>> {
    let mut out = Vec::new();
    for ch in pattern.chars() {
        match ch {
            'X' | 'x' => out.extend_from_slice(&blocks.x_block),
            'Y' | 'y' => out.extend_from_slice(&blocks.y_block),
            ',' | ' ' => {}
            _ => return Err(Error::Parse(format!("block composition {pattern:?} may only contain X and Y"))),
        }
    }
    Ok(out)
}

/// Rewrites the cross-colour squares of the blocks so their conjugators avoid `z`:
/// `(y_j^2)_{y_{j-1}..y_1 z u} = (z^2)_{y_1^-1..y_j^-1 u}` and
/// `(x_{m-j}^2)_{x_{m-j+1}..x_{m-1} z u'} = (z^2)_{x_{m-1}^-1..x_{m-j}^-1 u'}`.
/// Each rewrite is certified by [`braid_equal`].
pub fn colour_preserving_form(l: &BicolouredLetter, m: u32) -> Result<BicolouredLetter> {
    let Some(zpos) = l.conjugator.iter().position(|p| p.gen == Gen::Z) else {
        return Ok(l.clone());
    };
    if l.core.exp.abs() != 2 || l.conjugator[zpos].exp != 1 {
        return Err(Error::Unliftable(format!("{l} has no colour-preserving rewrite")));
    }
    let tail = &l.conjugator[zpos + 1..];
    let mut conj: Vec<GenPower> = match l.core.gen {
        Gen::Y(j) => (1..=j).map(|i| GenPower::new(Gen::Y(i), -1)).collect(),
        Gen::X(i) => (i..m).rev().map(|k| GenPower::new(Gen::X(k), -1)).collect(),
        Gen::Z => return Err(Error::Unliftable(format!("{l} has no colour-preserving rewrite"))),
    };
    conj.extend_from_slice(tail);
    let out = BicolouredLetter::new(GenPower::new(Gen::Z, l.core.exp), conj);
    if !braid_equal(&l.to_word(m)?, &out.to_word(m)?)? {
        return Err(Error::Unliftable(format!("rewrite of {l} is not an identity in the braid group")));
    }
    Ok(out)
}

fn lift_power(p: &GenPower, m: u32) -> Result<Vec<SignedCurve>> {
    let s = p.exp.signum() as i8;
    let twice = |c1: CurveId, c2: CurveId| vec![SignedCurve { curve: c1, sign: s }, SignedCurve { curve: c2, sign: s }];
    match (p.gen, p.exp.abs()) {
        (Gen::X(i), 1) if i < m => Ok(twice(CurveId::new(Family::Alpha, m - i), CurveId::new(Family::Gamma, m - i))),
        (Gen::Y(j), 1) if j < m => Ok(twice(CurveId::new(Family::Beta, j), CurveId::new(Family::Delta, j))),
        (Gen::Z, 2) => Ok(vec![SignedCurve { curve: CurveId::SIGMA, sign: s }]),
        _ => Err(Error::Unliftable(format!("{p}"))),
    }
}

/// Lift to twists on the fibre. Half twists `x_i` and `y_j` become the pairs
/// `(α_{m-i}, γ_{m-i})` and `(β_j, δ_j)`; the central full twist `z^2` becomes `σ`.
/// Conjugators are lifted letter by letter.
pub fn lift_to_twists(block: &[BicolouredLetter], b: u32, model: &HomologyModel) -> Result<Factorization> {
    let m = 2 * b;
    if model.b.is_some_and(|mb| mb != b) {
        return Err(Error::InvalidParameter(format!("model has b = {:?}, blocks have b = {b}", model.b)));
    }
    let mut letters = Vec::new();
    for l in block {
        let l = colour_preserving_form(l, m)?;
        let mut conj = Vec::new();
        for p in &l.conjugator {
            conj.extend(lift_power(p, m)?);
        }
        let conj = TwistWord::new(conj);
        for c in lift_power(&l.core, m)? {
            letters.push(TwistLetter { core: c.curve, conjugator: conj.clone(), sign: c.sign });
        }
    }
    for l in &letters {
        model.class(&l.core)?;
    }
    Ok(Factorization::in_model(letters, model))
}

/// The α/γ and β/δ parts of the regeneration factorization.
#[derive(Clone, Debug, Serialize)]
pub struct AppendixFactorization {
    /// `μ_{2b}^2 ν_{2b}^2 ... μ_2^2 ν_2^2`.
    pub mu_nu: Factorization,
    pub sigma: TwistLetter,
    /// `β_{2b-1} ... β_1^2 ... β_{2b-1} δ_{2b-1} ... δ_1^2 ... δ_{2b-1}`.
    pub beta_delta: Factorization,
}

impl AppendixFactorization {
    pub fn full(&self) -> Factorization {
        let mut letters = self.mu_nu.letters.clone();
        letters.push(self.sigma.clone());
        letters.extend_from_slice(&self.beta_delta.letters);
        Factorization { letters, model: self.mu_nu.model.clone() }
    }
}

/// `μ_j = α_1 ... α_{j-2} α_{j-1} α_{j-2}^-1 ... α_1^-1`, i.e. the twist on `α_{j-1}`
/// conjugated by `α_{j-2}^-1 ... α_1^-1`; `ν_j` likewise with γ.
pub fn appendix_factorization(b: u32, model: &HomologyModel) -> Result<AppendixFactorization> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("b must be at least 2, got {b}")));
    }
    let n = 2 * b - 1;
    let conj = |f: Family, j: u32| TwistWord::new((1..j - 1).rev().map(|i| SignedCurve { curve: CurveId::new(f, i), sign: -1 }).collect());
    let mut mu_nu = Vec::new();
    for j in (2..=2 * b).rev() {
        for f in [Family::Alpha, Family::Gamma] {
            let l = TwistLetter::conjugated(CurveId::new(f, j - 1), conj(f, j));
            mu_nu.push(l.clone());
            mu_nu.push(l);
        }
    }
    let mut bd = Vec::new();
    for f in [Family::Beta, Family::Delta] {
        bd.extend(mirrored(f, n));
    }
    Ok(AppendixFactorization {
        mu_nu: Factorization::in_model(mu_nu, model),
        sigma: TwistLetter::plain(CurveId::SIGMA),
        beta_delta: Factorization::in_model(bd, model),
    })
}

fn mirrored(f: Family, n: u32) -> Vec<TwistLetter> {
    let c = |i| TwistLetter::plain(CurveId::new(f, i));
    (2..=n).rev().map(c).chain([c(1), c(1)]).chain((2..=n).map(c)).collect()
}

fn ascending_mirror(f: Family, n: u32) -> Vec<TwistLetter> {
    let c = |i| TwistLetter::plain(CurveId::new(f, i));
    (1..n).map(c).chain([c(n), c(n)]).chain((1..n).rev().map(c)).collect()
}

/// `α_1 ... α_{n-1} α_n^2 α_{n-1} ... α_1 γ_1 ... γ_n^2 ... γ_1`.
pub fn appendix_normal_form(b: u32, model: &HomologyModel) -> Result<Factorization> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("b must be at least 2, got {b}")));
    }
    let n = 2 * b - 1;
    let mut letters = ascending_mirror(Family::Alpha, n);
    letters.extend(ascending_mirror(Family::Gamma, n));
    Ok(Factorization::in_model(letters, model))
}

/// Product permutation of the letters (0-based images), rejecting letters that mix colours.
pub fn permutation_image(letters: &[BicolouredLetter], colouring: &Colouring, m: u32) -> Result<Vec<usize>> {
    let n = 2 * m as usize;
    colouring.validate(n)?;
    let mut word = BraidWord { strands: n, word: vec![] };
    for (i, l) in letters.iter().enumerate() {
        let w = l.to_word(m)?;
        if !colouring.preserved_by(&w.permutation()) {
            return Err(Error::ColourViolation { index: i });
        }
        word.word.extend(w.word);
    }
    Ok(word.permutation())
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorPresence {
    pub generator: String,
    /// Occurs as a letter core without conjugator.
    pub plain: bool,
    /// Occurs as a letter core with a nonempty conjugator.
    pub conjugated: bool,
    /// Occurs as a core with its generating exponent (1 for x, y and 2 for z).
    pub with_generating_exponent: bool,
    pub exponents: Vec<i32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub m: u32,
    pub generators: Vec<GeneratorPresence>,
    /// Every x_i, y_j and z^2 occurs as a core with its generating exponent.
    pub all_present: bool,
}

/// Scans letter cores for the generating set `x_i`, `y_j`, `z^2`. This is an image-level
/// check only; it does not decide whether the letters generate the group.
pub fn generation_check(blocks: &[Vec<BicolouredLetter>], m: u32) -> GenerationReport {
    let mut gens: Vec<(Gen, i32)> = (1..m).map(|i| (Gen::X(i), 1)).collect();
    gens.push((Gen::Z, 2));
    gens.extend((1..m).map(|j| (Gen::Y(j), 1)));
    let letters: Vec<&BicolouredLetter> = blocks.iter().flatten().collect();
    let generators: Vec<GeneratorPresence> = gens
        .iter()
        .map(|&(g, e)| {
            let hits: Vec<&&BicolouredLetter> = letters.iter().filter(|l| l.core.gen == g).collect();
            let mut exponents: Vec<i32> = hits.iter().map(|l| l.core.exp).collect();
            exponents.sort();
            exponents.dedup();
            GeneratorPresence {
                generator: GenPower::new(g, e).to_string(),
                plain: hits.iter().any(|l| l.conjugator.is_empty()),
                conjugated: hits.iter().any(|l| !l.conjugator.is_empty()),
                with_generating_exponent: hits.iter().any(|l| l.core.exp.abs() == e),
                exponents,
            }
        })
        .collect();
    let all_present = generators.iter().all(|g| g.with_generating_exponent);
    GenerationReport { m, generators, all_present }
}
