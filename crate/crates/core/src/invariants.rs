//! Numerical invariants of simple bidouble covers of P1 x P1 of type ((2a,2b),(2c,2d)).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverType {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CoverType {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a <= 0 || b <= 0 || c <= 0 || d <= 0 {
            return Err(Error::InvalidParameter(format!("cover type ({a},{b},{c},{d}) must be positive")));
        }
        Ok(CoverType { a, b, c, d })
    }

    /// The (a,b,c) examples have `d = b`.
    pub fn abc(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(a, b, c, b)
    }

    /// Bidegree `(n, m)` of the total branch divisor.
    pub fn branch_bidegree(&self) -> (i64, i64) {
        (2 * self.a + 2 * self.c, 2 * self.b + 2 * self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceInvariants {
    pub chi: i64,
    #[serde(rename = "K2")]
    pub k2: i64,
    pub divisibility: i64,
    pub fibre_genus: i64,
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `χ = ((n-4)(m-4) + 4(ab+cd)) / 4`, `K² = 2(n-4)(m-4)`; `K` is the pullback of a divisor
/// of bidegree `(a+c-2, b+d-2)`, and the fibre over a point of the second factor is a
/// bidouble cover of P1 branched in `2b + 2d` points.
pub fn invariants(t: &CoverType) -> SurfaceInvariants {
    let (n, m) = t.branch_bidegree();
    let chi = ((n - 4) * (m - 4) + 4 * (t.a * t.b + t.c * t.d)) / 4;
    let k2 = 2 * (n - 4) * (m - 4);
    SurfaceInvariants {
        chi,
        k2,
        divisibility: gcd(t.a + t.c - 2, t.b + t.d - 2),
        fibre_genus: 2 * (t.b + t.d) - 3,
    }
}

/// The χ printed with the definition of the (a,b,c) examples, `2(a+c-2)(b-1) + 4b(a+c)`.
pub fn chi_as_printed(a: i64, b: i64, c: i64) -> i64 {
    2 * (a + c - 2) * (b - 1) + 4 * b * (a + c)
}

/// `K² = 16(a+c-2)(b-1)` for the (a,b,c) examples.
pub fn k2_as_printed(a: i64, b: i64, c: i64) -> i64 {
    16 * (a + c - 2) * (b - 1)
}

/// Dimension of the natural deformation component, `(b+1)(4a+c+3) + 2b(a+c+1) - 8`.
pub fn deformation_dimension(a: i64, b: i64, c: i64) -> i64 {
    (b + 1) * (4 * a + c + 3) + 2 * b * (a + c + 1) - 8
}

/// Right-hand side of the identity `M = 3/2 αβ + (α+β) + 3b(a+1)` with `α = a+c`, `β = 2b`.
/// `αβ` is even, so the value is an integer.
pub fn deformation_dimension_identity_rhs(a: i64, b: i64, c: i64) -> i64 {
    let (alpha, beta) = (a + c, 2 * b);
    3 * alpha * beta / 2 + alpha + beta + 3 * b * (a + 1)
}

/// Printed formulas that disagree with the closed forms above.
#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub printed: String,
    pub printed_value: i64,
    pub computed_value: i64,
    pub agrees: bool,
}

pub fn printed_formula_report(a: i64, b: i64, c: i64) -> Result<Vec<Discrepancy>> {
    let inv = invariants(&CoverType::abc(a, b, c)?);
    let mk = |q: &str, p: &str, pv: i64, cv: i64| Discrepancy { quantity: q.into(), printed: p.into(), printed_value: pv, computed_value: cv, agrees: pv == cv };
    // 8χ - K² must be divisible by 32 for the printed quotient to make sense
    let quotient = 8 * inv.chi - inv.k2;
    Ok(vec![
        mk("chi", "2(a+c-2)(b-1) + 4b(a+c)", chi_as_printed(a, b, c), inv.chi),
        mk("K2", "16(a+c-2)(b-1)", k2_as_printed(a, b, c), inv.k2),
        mk("(8chi-K2)/32", "b(a+c)", b * (a + c), if quotient % 32 == 0 { quotient / 32 } else { -1 }),
        mk("M", "3/2 αβ + (α+β) + 3b(a+1), α=a+c, β=2b", deformation_dimension_identity_rhs(a, b, c), deformation_dimension(a, b, c)),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub statement: String,
    pub holds: bool,
    /// Smallest slack over the inequalities; negative when violated.
    pub margin: i64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub k: i64,
    pub checks: Vec<HypothesisCheck>,
}

impl Hypotheses {
    /// (I), (II) and (III) together.
    pub fn non_deformation_holds(&self) -> bool {
        self.checks.iter().filter(|c| c.name != "diffeomorphism").all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn inequalities(name: &str, statement: &str, terms: &[(&str, i64, i64)], extra: Vec<String>) -> HypothesisCheck {
    let margin = terms.iter().map(|(_, l, r)| l - r).min().unwrap_or(0);
    let mut violations: Vec<String> = terms.iter().filter(|(_, l, r)| l < r).map(|(s, l, r)| format!("{s}: {l} < {r}")).collect();
    violations.extend(extra);
    HypothesisCheck { name: name.into(), statement: statement.into(), holds: violations.is_empty(), margin, violations }
}

pub fn theorem_hypotheses(a: i64, b: i64, c: i64, k: i64) -> Hypotheses {
    let mut parity = Vec::new();
    for (s, v) in [("a", a), ("b", b), ("c", c), ("k", k)] {
        if v <= 0 {
            parity.push(format!("{s} = {v} is not positive"));
        } else if v % 2 != 0 {
            parity.push(format!("{s} = {v} is odd"));
        }
    }
    let checks = vec![
        inequalities("I", "a, b, c, k positive even; a, b, c-k >= 4", &[("a", a, 4), ("b", b, 4), ("c-k", c - k, 4)], parity),
        inequalities("II", "a >= 2c+1", &[("a", a, 2 * c + 1)], vec![]),
        inequalities("III", "b >= c+2", &[("b", b, c + 2)], vec![]),
        inequalities("diffeomorphism", "a, b, c-1 >= 2", &[("a", a, 2), ("b", b, 2), ("c-1", c - 1, 2)], vec![]),
    ];
    Hypotheses { a, b, c, k, checks }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyMember {
    pub index: i64,
    pub cover: CoverType,
    pub invariants: SurfaceInvariants,
}

/// The `k/2 + 1` covers of type `((2a+2i, 2b), (2c-2i, 2b))`, `0 <= i <= k/2`.
pub fn family_enumerate(a: i64, b: i64, c: i64, k: i64, force: bool) -> Result<Vec<FamilyMember>> {
    if k <= 0 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!("k must be a positive even integer, got {k}")));
    }
    let hyp = theorem_hypotheses(a, b, c, k);
    if !force && !hyp.non_deformation_holds() {
        let failed = hyp.checks.iter().filter(|c| c.name != "diffeomorphism" && !c.holds).flat_map(|c| c.violations.iter().map(move |v| format!("({}) {v}", c.name))).collect();
        return Err(Error::HypothesisUnmet(failed));
    }
    let mut out = Vec::new();
    for i in 0..=k / 2 {
        let cover = CoverType::abc(a + i, b, c - i)?;
        out.push(FamilyMember { index: i, cover, invariants: invariants(&cover) });
    }
    let first = out[0].invariants;
    if let Some(m) = out.iter().find(|m| m.invariants != first) {
        return Err(Error::InvariantViolation(format!("member {} has invariants {:?}, member 0 has {:?}", m.index, m.invariants, first)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// χ(O_S) from the eigensheaf decomposition of a bidouble cover.
    fn chi_characters(t: &CoverType) -> i64 {
        1 + (t.a - 1) * (t.b - 1) + (t.c - 1) * (t.d - 1) + (t.a + t.c - 1) * (t.b + t.d - 1)
    }

    #[test]
    fn reference_values() {
        let one = invariants(&CoverType::new(1, 1, 1, 1).unwrap());
        assert_eq!(one.chi, 2);
        let t = invariants(&CoverType::new(14, 8, 6, 8).unwrap());
        assert_eq!((t.chi, t.k2, t.divisibility, t.fibre_genus), (412, 2016, 2, 29));
        assert_eq!(deformation_dimension(14, 8, 6), 913);
        assert_eq!(deformation_dimension(1, 1, 1), 14);
        assert_eq!(deformation_dimension_identity_rhs(14, 8, 6), 876);
        assert!(CoverType::new(0, 1, 1, 1).is_err());
    }

    #[test]
    fn printed_report_flags_chi() {
        let r = printed_formula_report(14, 8, 6).unwrap();
        let chi = &r[0];
        assert!(!chi.agrees);
        assert_eq!(chi.computed_value, 412);
        assert!(r[1].agrees);
        assert!(!r[3].agrees);
    }

    #[test]
    fn hypotheses_examples() {
        let h = theorem_hypotheses(14, 8, 6, 2);
        assert!(h.non_deformation_holds());
        assert_eq!(h.check("II").unwrap().margin, 1);
        assert_eq!(h.check("III").unwrap().margin, 0);
        let h = theorem_hypotheses(10, 6, 4, 2);
        assert!(!h.check("I").unwrap().holds);
        assert_eq!(h.check("I").unwrap().margin, -2);
        assert!(theorem_hypotheses(2, 2, 3, 2).check("diffeomorphism").unwrap().holds);
        assert!(!theorem_hypotheses(14, 8, 6, 1).check("I").unwrap().holds);
    }

    #[test]
    fn families() {
        let f = family_enumerate(14, 8, 6, 2, false).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].cover, CoverType::new(15, 8, 5, 8).unwrap());
        assert!(family_enumerate(14, 8, 6, 3, true).is_err());
        assert!(matches!(family_enumerate(10, 6, 4, 2, false), Err(Error::HypothesisUnmet(_))));
        assert_eq!(family_enumerate(10, 6, 4, 2, true).unwrap().len(), 2);
    }

    proptest! {
        #[test]
        fn chi_matches_character_oracle(a in 1i64..=20, b in 1i64..=20, c in 1i64..=20, d in 1i64..=20) {
            let t = CoverType::new(a, b, c, d).unwrap();
            prop_assert_eq!(invariants(&t).chi, chi_characters(&t));
        }

        #[test]
        fn abc_forms(a in 1i64..=30, b in 1i64..=30, c in 1i64..=30) {
            let inv = invariants(&CoverType::abc(a, b, c).unwrap());
            prop_assert_eq!(inv.k2, k2_as_printed(a, b, c));
            prop_assert_eq!(inv.fibre_genus, 4 * b - 3);
            prop_assert_eq!(inv.divisibility, gcd(a + c - 2, 2 * b - 2));
            // Riemann-Hurwitz: four sheets over P1, each of the 4b branch points has 2 preimages
            prop_assert_eq!(2 - 2 * inv.fibre_genus, 4 * 2 - 2 * 4 * b);
        }

        #[test]
        fn m_increases_in_a(a in 1i64..100, b in 1i64..50, c in 1i64..50) {
            prop_assert!(deformation_dimension(a + 1, b, c) > deformation_dimension(a, b, c));
        }
    }
}
