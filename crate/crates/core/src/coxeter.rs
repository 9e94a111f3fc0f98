//! Chains of curves and their Coxeter products `Δ = (T1)(T2 T1)...(Tn ... T1)`.

use crate::error::{Error, Result};
use crate::surface::{euler_and_genus, ribbon_from_system, trace_boundary, CurveId, CurveSystem, Family, HomologyModel};
use crate::twist::{word_matrix, SignedCurve, TwistWord};
use serde::Serialize;

/// A validated chain. `orientation[i]` flips the i-th curve so consecutive pairings are +1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub curves: Vec<CurveId>,
    pub orientation: Vec<i8>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.curves.len()
    }
    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

pub fn validate_chain(sys: &CurveSystem, seq: &[CurveId]) -> Result<Chain> {
    if seq.is_empty() {
        return Err(Error::ChainInvalid { index: 0, reason: "empty chain".into() });
    }
    for (i, c) in seq.iter().enumerate() {
        if !sys.contains(c) {
            return Err(Error::ChainInvalid { index: i, reason: format!("{c} is not in the system") });
        }
        if seq[..i].contains(c) {
            return Err(Error::ChainInvalid { index: i, reason: format!("{c} repeats") });
        }
    }
    let mut orientation = vec![1i8];
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let shared = sys.shared(&seq[i], &seq[j]).len();
            if j == i + 1 && shared != 1 {
                return Err(Error::ChainInvalid { index: j, reason: format!("{} and {} meet {shared} times, expected once", seq[i], seq[j]) });
            }
            if j > i + 1 && shared != 0 {
                return Err(Error::ChainInvalid { index: j, reason: format!("{} and {} are not consecutive but meet", seq[i], seq[j]) });
            }
        }
        if i + 1 < seq.len() {
            let s = sys.geometric_pairing(&seq[i], &seq[i + 1]) as i8;
            orientation.push(orientation[i] * s);
        }
    }
    Ok(Chain { curves: seq.to_vec(), orientation })
}

/// `Δ^power` as a word; negative powers give the reversed inverse word.
pub fn coxeter(chain: &Chain, power: i32) -> Result<TwistWord> {
    if power == 0 {
        return Err(Error::InvalidParameter("Coxeter power must be nonzero".into()));
    }
    let mut delta = Vec::new();
    for k in 0..chain.len() {
        for j in (0..=k).rev() {
            delta.push(SignedCurve::pos(chain.curves[j]));
        }
    }
    let base = TwistWord::new(delta);
    let unit = if power > 0 { base } else { base.inverse() };
    let mut letters = Vec::with_capacity(unit.len() * power.unsigned_abs() as usize);
    for _ in 0..power.unsigned_abs() {
        letters.extend_from_slice(&unit.letters);
    }
    Ok(TwistWord::new(letters))
}

/// Boundary count and genus of a regular neighbourhood of the chain.
pub fn chain_neighborhood_stats(sys: &CurveSystem, chain: &Chain) -> Result<(usize, i64)> {
    let sub = sys.restrict(&chain.curves)?;
    let rg = ribbon_from_system(&sub)?;
    let boundary = trace_boundary(&rg)?.len();
    let (_, genus) = euler_and_genus(&rg)?;
    Ok((boundary, genus))
}

/// One factor `Δ^power(chain)` of the ψ factorization.
#[derive(Clone, Debug, Serialize)]
pub struct CoxeterFactor {
    pub name: String,
    pub chain: Vec<CurveId>,
    pub power: i32,
}

/// The factors A1..A6, in the order A1 (acting first) to A6.
pub fn psi_factors(b: u32) -> Result<Vec<CoxeterFactor>> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("b must be at least 2, got {b}")));
    }
    let n = 2 * b - 1;
    let down = |f: Family, lo: u32| (lo..=n).rev().map(move |i| CurveId::new(f, i));
    let up = |f: Family| (1..=n).map(move |i| CurveId::new(f, i));
    let long = |a: Family, b: Family| down(a, 1).chain([CurveId::SIGMA]).chain(up(b)).collect::<Vec<_>>();
    Ok(vec![
        CoxeterFactor { name: "A1".into(), chain: long(Family::Delta, Family::Alpha), power: 1 },
        CoxeterFactor { name: "A2".into(), chain: long(Family::Alpha, Family::Beta), power: 1 },
        CoxeterFactor { name: "A3".into(), chain: long(Family::Beta, Family::Gamma), power: 1 },
        CoxeterFactor { name: "A4".into(), chain: down(Family::Alpha, 2).collect(), power: -2 },
        CoxeterFactor { name: "A5".into(), chain: down(Family::Gamma, 1).chain([CurveId::SIGMA]).collect(), power: -2 },
        CoxeterFactor { name: "A6".into(), chain: long(Family::Alpha, Family::Gamma), power: -1 },
    ])
}

/// The word of `A6 A5 A4 A3 A2 A1`; A1 acts first.
pub fn psi_factorization(b: u32) -> Result<TwistWord> {
    let factors = psi_factors(b)?;
    let mut word = TwistWord::default();
    for f in factors.iter().rev() {
        let chain = Chain { orientation: vec![1; f.chain.len()], curves: f.chain.clone() };
        word = word.concat(&coxeter(&chain, f.power)?);
    }
    Ok(word)
}

/// How `Δ` (odd length) or `Δ²` (even length) acts on the oriented chain classes.
#[derive(Clone, Debug, Serialize)]
pub struct CoxeterAction {
    pub chain: Vec<CurveId>,
    pub power: i32,
    /// Per chain index: whether the image matches the predicted signed class.
    pub matches: Vec<bool>,
}

impl CoxeterAction {
    pub fn holds(&self) -> bool {
        self.matches.iter().all(|&x| x)
    }
}

/// Odd chains: `Δ(c_i) = c_{n+1-i}` for odd i, `-c_{n+1-i}` for even i.
/// Even chains: `Δ²(c_i) = -c_i`.
pub fn coxeter_action(model: &HomologyModel, chain: &Chain) -> Result<CoxeterAction> {
    let n = chain.len();
    let power = if n % 2 == 1 { 1 } else { 2 };
    let m = word_matrix(model, &coxeter(chain, power)?)?;
    let oriented = |i: usize| -> Result<Vec<i64>> {
        Ok(model.class(&chain.curves[i])?.iter().map(|x| x * chain.orientation[i] as i64).collect())
    };
    let mut matches = Vec::with_capacity(n);
    for i in 0..n {
        let image = m.apply(&oriented(i)?)?;
        let expected: Vec<i64> = if n % 2 == 1 {
            // 1-based parity: index i is the (i+1)-th curve
            let s = if i % 2 == 0 { 1 } else { -1 };
            oriented(n - 1 - i)?.iter().map(|x| x * s).collect()
        } else {
            oriented(i)?.iter().map(|x| -x).collect()
        };
        matches.push(image == expected);
    }
    Ok(CoxeterAction { chain: chain.curves.clone(), power, matches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_reference_configuration, model_of, reference_model, SignMode};

    #[test]
    fn chain_validation() {
        let sys = build_reference_configuration(2, SignMode::Auto).unwrap();
        let a = |i| CurveId::alpha(i);
        assert!(validate_chain(&sys, &[a(1), a(2), a(3)]).is_ok());
        assert!(matches!(validate_chain(&sys, &[a(1), CurveId::gamma(1)]), Err(Error::ChainInvalid { index: 1, .. })));
        let long: Vec<CurveId> = [CurveId::delta(3), CurveId::delta(2), CurveId::delta(1), CurveId::SIGMA, a(1), a(2), a(3)].to_vec();
        let ch = validate_chain(&sys, &long).unwrap();
        assert_eq!(ch.len(), 7);
        assert!(matches!(validate_chain(&sys, &[a(1), a(3)]), Err(Error::ChainInvalid { .. })));
        assert!(matches!(validate_chain(&sys, &[a(1), a(2), a(3), a(2)]), Err(Error::ChainInvalid { .. })));
    }

    #[test]
    fn coxeter_lengths() {
        let sys = build_reference_configuration(2, SignMode::Auto).unwrap();
        let one = validate_chain(&sys, &[CurveId::alpha(1)]).unwrap();
        assert_eq!(coxeter(&one, 1).unwrap(), TwistWord::positive(&[CurveId::alpha(1)]));
        let three = validate_chain(&sys, &[CurveId::alpha(1), CurveId::alpha(2), CurveId::alpha(3)]).unwrap();
        assert_eq!(coxeter(&three, 1).unwrap().len(), 6);
        assert_eq!(coxeter(&three, -2).unwrap().len(), 12);
        assert!(coxeter(&three, 0).is_err());
    }

    #[test]
    fn torus_delta_squared_is_minus_identity() {
        let sys = CurveSystem::chain_system(2).unwrap();
        let m = model_of(&sys).unwrap();
        let ch = validate_chain(&sys, &[CurveId::alpha(1), CurveId::alpha(2)]).unwrap();
        let d2 = word_matrix(&m, &coxeter(&ch, 2).unwrap()).unwrap();
        assert_eq!(d2.matrix, crate::intmat::IntMatrix::identity(2).neg().unwrap());
    }

    #[test]
    fn powers_cancel() {
        let (sys, _, m) = reference_model(2, SignMode::Auto).unwrap();
        for f in psi_factors(2).unwrap() {
            let ch = validate_chain(&sys, &f.chain).unwrap();
            let w = coxeter(&ch, 3).unwrap().concat(&coxeter(&ch, -3).unwrap());
            assert!(word_matrix(&m, &w).unwrap().is_identity());
        }
    }

    #[test]
    fn neighbourhood_parity() {
        let sys = build_reference_configuration(2, SignMode::Auto).unwrap();
        let a = |i| CurveId::alpha(i);
        assert_eq!(chain_neighborhood_stats(&sys, &validate_chain(&sys, &[a(1)]).unwrap()).unwrap().0, 2);
        assert_eq!(chain_neighborhood_stats(&sys, &validate_chain(&sys, &[a(1), a(2)]).unwrap()).unwrap().0, 1);
        let long = [CurveId::delta(3), CurveId::delta(2), CurveId::delta(1), CurveId::SIGMA, a(1), a(2), a(3)];
        assert_eq!(chain_neighborhood_stats(&sys, &validate_chain(&sys, &long).unwrap()).unwrap(), (2, 3));
    }

    #[test]
    fn psi_word_shape() {
        let f = psi_factors(2).unwrap();
        assert_eq!(f[3].chain, vec![CurveId::alpha(3), CurveId::alpha(2)]);
        let w = psi_factorization(2).unwrap();
        let expected: usize = f.iter().map(|x| x.chain.len() * (x.chain.len() + 1) / 2 * x.power.unsigned_abs() as usize).sum();
        assert_eq!(w.len(), expected);
        assert_eq!(w.len(), 138);
    }

    #[test]
    fn psi_factor_chains_are_valid() {
        let sys = build_reference_configuration(3, SignMode::Auto).unwrap();
        for f in psi_factors(3).unwrap() {
            validate_chain(&sys, &f.chain).unwrap();
        }
    }

    #[test]
    fn central_check_b2() {
        let (_, _, m) = reference_model(2, SignMode::Auto).unwrap();
        let product = word_matrix(&m, &psi_factorization(2).unwrap()).unwrap();
        assert_eq!(product.matrix, crate::twist::psi_reference(&m).unwrap().matrix);
    }

    #[test]
    fn coxeter_action_on_reference_chains() {
        let (sys, _, m) = reference_model(2, SignMode::Auto).unwrap();
        for f in psi_factors(2).unwrap() {
            let ch = validate_chain(&sys, &f.chain).unwrap();
            assert!(coxeter_action(&m, &ch).unwrap().holds(), "{:?}", f.chain);
        }
    }
}
