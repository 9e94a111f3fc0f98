//! Mapping classes acting on H1 of the fibre.
//!
//! Twist convention: `T_c(x) = x - <x,c> c`. With `<α,β> = 1` this gives
//! `T_α T_β (α) = -β` and `T_β T_α (β) = α`. Products are read right to left, so in a
//! word `w = l1 l2 ... lk` the letter `lk` acts first.

use crate::error::{Error, Result};
use crate::intmat::{axpy, cmul, IntMatrix};
use crate::surface::{all_sign_conventions, reference_model, CurveId, Family, HomologyModel, SigmaSigns, SignMode};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A Dehn twist or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedCurve {
    pub curve: CurveId,
    pub sign: i8,
}

impl SignedCurve {
    pub fn pos(curve: CurveId) -> Self {
        SignedCurve { curve, sign: 1 }
    }
    pub fn inverse(self) -> Self {
        SignedCurve { curve: self.curve, sign: -self.sign }
    }
}

/// Product of twists in written order; the last letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwistWord {
    pub letters: Vec<SignedCurve>,
}

impl TwistWord {
    pub fn new(letters: Vec<SignedCurve>) -> Self {
        TwistWord { letters }
    }

    pub fn positive(curves: &[CurveId]) -> Self {
        TwistWord { letters: curves.iter().map(|c| SignedCurve::pos(*c)).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> TwistWord {
        TwistWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        TwistWord { letters }
    }

    /// Cancels adjacent `T_c^s T_c^-s` pairs.
    pub fn free_reduce(&self) -> TwistWord {
        let mut out: Vec<SignedCurve> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last().is_some_and(|t| t.curve == l.curve && t.sign == -l.sign) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        TwistWord { letters: out }
    }

    pub fn curves(&self) -> impl Iterator<Item = CurveId> + '_ {
        self.letters.iter().map(|l| l.curve)
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "Id");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.sign > 0 { format!("T_{}", l.curve) } else { format!("T_{}^-1", l.curve) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Integer matrix of a mapping class on the lattice of a [`HomologyModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingClassMatrix {
    pub matrix: IntMatrix,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<TwistWord>,
}

impl MappingClassMatrix {
    pub fn identity(model: &HomologyModel) -> Self {
        MappingClassMatrix { matrix: IntMatrix::identity(model.rank), model: model.fingerprint.clone(), word: None }
    }

    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.matrix.mul_vec(x)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn check_model(&self, model: &HomologyModel) -> Result<()> {
        if self.model != model.fingerprint {
            return Err(Error::ModelMismatch { expected: model.fingerprint.clone(), found: self.model.clone() });
        }
        Ok(())
    }
}

/// `T_v^k` as a matrix: `I - k v (Jv)^T`.
pub fn twist_matrix_of_class(model: &HomologyModel, v: &[i64], k: i64) -> Result<IntMatrix> {
    let jv = model.form.mul_vec(v)?;
    let mut m = IntMatrix::identity(model.rank);
    for i in 0..model.rank {
        if v[i] == 0 {
            continue;
        }
        let kv = cmul(k, v[i])?;
        for j in 0..model.rank {
            m[(i, j)] = crate::intmat::csub(m[(i, j)], cmul(kv, jv[j])?)?;
        }
    }
    Ok(m)
}

/// Applies `T_v^k` to `x`.
pub fn twist_vector(model: &HomologyModel, v: &[i64], k: i64, x: &[i64]) -> Result<Vec<i64>> {
    let p = model.pair(x, v)?;
    axpy(x, -cmul(k, p)?, v)
}

pub fn dehn_twist(model: &HomologyModel, c: &CurveId, sign: i8) -> Result<MappingClassMatrix> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("twist sign must be ±1, got {sign}")));
    }
    let v = model.class(c)?.to_vec();
    Ok(MappingClassMatrix {
        matrix: twist_matrix_of_class(model, &v, sign as i64)?,
        model: model.fingerprint.clone(),
        word: Some(TwistWord::new(vec![SignedCurve { curve: *c, sign }])),
    })
}

/// Right-to-left composition: `compose([A, B])` is `A ∘ B`.
pub fn compose(ms: &[MappingClassMatrix]) -> Result<MappingClassMatrix> {
    let Some(first) = ms.first() else {
        return Err(Error::InvalidParameter("compose of an empty list needs a model; use MappingClassMatrix::identity".into()));
    };
    let mut acc = first.matrix.clone();
    let mut word = first.word.clone();
    for m in &ms[1..] {
        if m.model != first.model {
            return Err(Error::ModelMismatch { expected: first.model.clone(), found: m.model.clone() });
        }
        acc = acc.mul(&m.matrix)?;
        word = match (word, &m.word) {
            (Some(a), Some(b)) => Some(a.concat(b)),
            _ => None,
        };
    }
    Ok(MappingClassMatrix { matrix: acc, model: first.model.clone(), word })
}

/// Composition with the identity as the empty product.
pub fn compose_in(model: &HomologyModel, ms: &[MappingClassMatrix]) -> Result<MappingClassMatrix> {
    if ms.is_empty() {
        return Ok(MappingClassMatrix::identity(model));
    }
    compose(ms)
}

pub fn is_symplectic(m: &MappingClassMatrix, model: &HomologyModel) -> bool {
    if m.matrix.rows() != model.rank || !m.matrix.is_square() {
        return false;
    }
    match m.matrix.transpose().mul(&model.form).and_then(|x| x.mul(&m.matrix)) {
        Ok(x) => x == model.form,
        Err(_) => false,
    }
}

/// Matrix of a twist word, built by rank-one updates.
pub fn word_matrix(model: &HomologyModel, word: &TwistWord) -> Result<MappingClassMatrix> {
    let mut m = IntMatrix::identity(model.rank);
    let r = model.rank;
    for l in &word.letters {
        let v = model.class(&l.curve)?;
        let jv = model.form.mul_vec(v)?;
        let mv = m.mul_vec(v)?;
        let s = l.sign as i64;
        for i in 0..r {
            if mv[i] == 0 {
                continue;
            }
            for j in 0..r {
                if jv[j] != 0 {
                    m[(i, j)] = crate::intmat::csub(m[(i, j)], cmul(s, cmul(mv[i], jv[j])?)?)?;
                }
            }
        }
    }
    Ok(MappingClassMatrix { matrix: m, model: model.fingerprint.clone(), word: Some(word.clone()) })
}

/// Image of `x` under the mapping class of `word`.
pub fn apply_word(model: &HomologyModel, word: &TwistWord, x: &[i64]) -> Result<Vec<i64>> {
    let mut y = x.to_vec();
    for l in word.letters.iter().rev() {
        y = twist_vector(model, model.class(&l.curve)?, l.sign as i64, &y)?;
    }
    Ok(y)
}

/// The lattice map determined by `c -> sign * class(image)` on every curve.
pub fn curve_map_matrix(model: &HomologyModel, f: impl Fn(&CurveId) -> Result<(CurveId, i8)>) -> Result<MappingClassMatrix> {
    let q = model.classes.left_inverse()?;
    let mut target = IntMatrix::zeros(model.curves.len(), model.rank);
    for (k, c) in model.curves.iter().enumerate() {
        let (img, s) = f(c)?;
        let v = model.class(&img)?;
        for j in 0..model.rank {
            target[(k, j)] = cmul(s as i64, v[j])?;
        }
    }
    // M P^T = T^T forces M = T^T Q^T
    let m = target.transpose().mul(&q.transpose())?;
    let check = m.mul(&model.classes.transpose())?;
    for (k, c) in model.curves.iter().enumerate() {
        if check.col(k) != target.row(k) {
            return Err(Error::NotWellDefined(format!("the image of {c} is incompatible with the face relations")));
        }
    }
    Ok(MappingClassMatrix { matrix: m, model: model.fingerprint.clone(), word: None })
}

/// ψ: α_i ↦ -δ_i, δ_i ↦ -α_i, γ_i ↦ -β_i, β_i ↦ -γ_i, σ ↦ -σ.
pub fn psi_reference(model: &HomologyModel) -> Result<MappingClassMatrix> {
    curve_map_matrix(model, |c| {
        let fam = match c.family {
            Family::Alpha => Family::Delta,
            Family::Delta => Family::Alpha,
            Family::Gamma => Family::Beta,
            Family::Beta => Family::Gamma,
            Family::Sigma => Family::Sigma,
        };
        Ok((CurveId::new(fam, c.index), -1))
    })
}

/// The relabelled form α_i ↦ -β_i, β_i ↦ -α_i, γ_i ↦ -δ_i, δ_i ↦ -γ_i, σ ↦ -σ.
pub fn psi_relabelled_variant(model: &HomologyModel) -> Result<MappingClassMatrix> {
    curve_map_matrix(model, |c| {
        let fam = match c.family {
            Family::Alpha => Family::Beta,
            Family::Beta => Family::Alpha,
            Family::Gamma => Family::Delta,
            Family::Delta => Family::Gamma,
            Family::Sigma => Family::Sigma,
        };
        Ok((CurveId::new(fam, c.index), -1))
    })
}

/// Outcome for one σ-sign convention.
#[derive(Clone, Debug, Serialize)]
pub struct ConventionResult {
    pub signs: SigmaSigns,
    pub boundary_components: usize,
    pub genus: usize,
    pub rank: usize,
    pub psi_well_defined: bool,
    pub psi_symplectic: bool,
    pub admissible: bool,
    /// Whether the six-factor product matches ψ; filled only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignSearch {
    pub b: u32,
    pub conventions: Vec<ConventionResult>,
    /// First admissible convention in the fixed search order.
    pub canonical: Option<SigmaSigns>,
}

/// Tries every σ-sign convention. Admissible means: 4 boundary walks, genus 4b-3,
/// torsion-free rank 8b-6, and ψ well defined and symplectic.
pub fn sign_search(b: u32, with_product: bool) -> Result<SignSearch> {
    let mut conventions = Vec::new();
    for signs in all_sign_conventions() {
        let res = match reference_model(b, SignMode::Explicit(signs)) {
            Ok((_, _, model)) => {
                let psi = psi_reference(&model);
                let well = psi.is_ok();
                let sympl = psi.as_ref().map(|p| is_symplectic(p, &model)).unwrap_or(false);
                let topo = model.boundary_components == 4 && model.genus == (4 * b - 3) as usize && model.rank == (8 * b - 6) as usize;
                let product_matches = match (&psi, with_product) {
                    (Ok(p), true) => {
                        let w = crate::coxeter::psi_factorization(b)?;
                        Some(word_matrix(&model, &w)?.matrix == p.matrix)
                    }
                    _ => None,
                };
                ConventionResult {
                    signs,
                    boundary_components: model.boundary_components,
                    genus: model.genus,
                    rank: model.rank,
                    psi_well_defined: well,
                    psi_symplectic: sympl,
                    admissible: topo && well && sympl,
                    product_matches,
                    note: psi.err().map(|e| e.to_string()),
                }
            }
            Err(e) => ConventionResult {
                signs,
                boundary_components: 0,
                genus: 0,
                rank: 0,
                psi_well_defined: false,
                psi_symplectic: false,
                admissible: false,
                product_matches: None,
                note: Some(e.to_string()),
            },
        };
        conventions.push(res);
    }
    let canonical = conventions.iter().find(|c| c.admissible).map(|c| c.signs);
    Ok(SignSearch { b, conventions, canonical })
}
