//! Dense integer matrices with overflow-checked arithmetic and Smith normal form.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[inline]
pub fn cadd(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
pub fn csub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
pub fn cmul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// Checked dot product.
pub fn dot(x: &[i64], y: &[i64]) -> Result<i64> {
    let mut s = 0i64;
    for (a, b) in x.iter().zip(y) {
        s = cadd(s, cmul(*a, *b)?)?;
    }
    Ok(s)
}

/// `x + k*y`, checked.
pub fn axpy(x: &[i64], k: i64, y: &[i64]) -> Result<Vec<i64>> {
    x.iter().zip(y).map(|(a, b)| cadd(*a, cmul(k, *b)?)).collect()
}

/// Row-major integer matrix. Serialized as a list of rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension { expected: c, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn neg(&self) -> Result<Self> {
        let data = self.data.iter().map(|x| x.checked_neg().ok_or(Error::Overflow)).collect::<Result<_>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, k: i64) -> Result<Self> {
        let data = self.data.iter().map(|x| cmul(*x, k)).collect::<Result<_>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b != 0 {
                        out[(i, j)] = cadd(out[(i, j)], cmul(a, b)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, found: v.len() });
        }
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension { expected: self.rows, found: v.len() });
        }
        let mut out = vec![0i64; self.cols];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                out = axpy(&out, x, self.row(i))?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| csub(*a, *b)).collect::<Result<_>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == (i == j) as i64))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == -self[(j, i)]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for j in 0..self.cols {
            let v = cadd(self[(dst, j)], cmul(k, self[(src, j)])?)?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for i in 0..self.rows {
            let v = cadd(self[(i, dst)], cmul(k, self[(i, src)])?)?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }

    /// Smith normal form `U * self * V = D`.
    pub fn smith(&self) -> Result<Smith> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMatrix::identity(m);
        let mut v = IntMatrix::identity(n);
        let mut t = 0;
        while t < m.min(n) {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = a[(i, j)];
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if a[(i, t)] != 0 {
                        let q = a[(i, t)] / a[(t, t)];
                        a.add_row(i, t, -q)?;
                        u.add_row(i, t, -q)?;
                        if a[(i, t)] != 0 {
                            a.swap_rows(t, i);
                            u.swap_rows(t, i);
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..n {
                    if a[(t, j)] != 0 {
                        let q = a[(t, j)] / a[(t, t)];
                        a.add_col(j, t, -q)?;
                        v.add_col(j, t, -q)?;
                        if a[(t, j)] != 0 {
                            a.swap_cols(t, j);
                            v.swap_cols(t, j);
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                let p = a[(t, t)];
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[(i, j)] % p != 0));
                match bad {
                    Some(i) => {
                        a.add_row(t, i, 1)?;
                        u.add_row(t, i, 1)?;
                    }
                    None => break,
                }
            }
            if a[(t, t)] < 0 {
                a.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        let invariants = (0..t).map(|i| a[(i, i)]).collect();
        Ok(Smith { u, d: a, v, invariants })
    }

    /// Inverse of a unimodular square matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension { expected: self.rows, found: self.cols });
        }
        let s = self.smith()?;
        if s.invariants.len() != self.rows || s.invariants.iter().any(|&x| x != 1) {
            return Err(Error::InvariantViolation("matrix is not unimodular".into()));
        }
        s.v.mul(&s.u)
    }

    /// An integer matrix `Q` with `Q * self = I`, if the rows of `self` span `Z^cols`.
    pub fn left_inverse(&self) -> Result<IntMatrix> {
        let s = self.smith()?;
        if s.invariants.len() != self.cols || s.invariants.iter().any(|&x| x != 1) {
            return Err(Error::InvariantViolation("rows do not span the lattice".into()));
        }
        // Q = V * D^+ * U with D^+ the cols x rows matrix of ones on the diagonal
        let mut dplus = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.cols {
            dplus[(i, i)] = 1;
        }
        s.v.mul(&dplus)?.mul(&s.u)
    }
}

/// Result of [`IntMatrix::smith`]: `u * m * v = d`, `invariants` the nonzero diagonal.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub invariants: Vec<i64>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn torsion(&self) -> Vec<i64> {
        self.invariants.iter().copied().filter(|&x| x != 1).collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| format!("{x:>w$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_of_known_matrix() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let s = m.smith().unwrap();
        assert_eq!(s.invariants, vec![2, 6, 12]);
        assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d);
    }

    #[test]
    fn overflow_is_an_error() {
        let m = IntMatrix::from_rows(&[vec![i64::MAX]]).unwrap();
        assert!(matches!(m.mul(&m), Err(Error::Overflow)));
    }

    #[test]
    fn left_inverse_of_spanning_rows() {
        let p = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap();
        let q = p.left_inverse().unwrap();
        assert!(q.mul(&p).unwrap().is_identity());
        let bad = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert!(bad.left_inverse().is_err());
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..6, r * c)
                .prop_map(move |d| IntMatrix::from_rows(&d.chunks(c).map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn smith_is_a_valid_decomposition(m in small_matrix()) {
            let s = m.smith().unwrap();
            prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
            for w in s.invariants.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            for i in 0..s.d.rows() {
                for j in 0..s.d.cols() {
                    if i != j || i >= s.rank() {
                        prop_assert_eq!(s.d[(i, j)], 0);
                    }
                }
            }
            prop_assert!(s.invariants.iter().all(|&x| x > 0));
            let uu = s.u.inverse_unimodular().unwrap();
            prop_assert!(uu.mul(&s.u).unwrap().is_identity());
        }
    }
}
