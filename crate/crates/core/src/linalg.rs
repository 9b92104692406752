//! Exact dense linear algebra over [`Scalar`].
//!
//! Elimination prefers rational pivots. When only a parametric entry is
//! available it is used as pivot and its numerator is recorded as a side
//! condition (the result holds wherever that polynomial does not vanish).

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Poly, Scalar};

pub type Vector = Vec<Scalar>;

pub fn zero_vector(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn scale_vector(v: &[Scalar], s: &Scalar) -> Vector {
    v.iter().map(|x| x * s).collect()
}

pub fn add_vectors(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vectors(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a += s * b`
fn axpy(a: &mut [Scalar], s: &Scalar, b: &[Scalar]) {
    if s.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x + &(s * y);
        }
    }
}

fn record_condition(conditions: &mut Vec<Poly>, pivot: &Scalar) {
    if pivot.is_rational() {
        return;
    }
    let mut p = pivot.numerator().monic();
    // a monomial pivot only needs its variables nonzero
    if p.num_terms() == 1 {
        p = Poly::term(crate::scalar::int(1), p.monomial_content());
    }
    if !conditions.contains(&p) {
        conditions.push(p);
        conditions.sort();
    }
}

/// Row index (among `candidates`) of the preferred pivot in column `c`.
fn choose_pivot(
    rows: &[Vector],
    candidates: impl Iterator<Item = usize>,
    c: usize,
) -> Option<usize> {
    let mut fallback = None;
    for r in candidates {
        let x = &rows[r][c];
        if x.is_zero() {
            continue;
        }
        if x.is_rational() {
            return Some(r);
        }
        fallback.get_or_insert(r);
    }
    fallback
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_columns(cols: Vec<Vector>) -> Result<Matrix> {
        Ok(Matrix::from_rows(cols)?.transpose())
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Matrix> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn pow(&self, e: u32) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Reduced row echelon form of the row space.
    pub fn rref(&self) -> Echelon {
        let mut rows = self.row_vectors();
        let mut pivots = Vec::new();
        let mut conditions = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == rows.len() {
                break;
            }
            let Some(p) = choose_pivot(&rows, next..rows.len(), c) else {
                continue;
            };
            rows.swap(next, p);
            let pivot = rows[next][c].clone();
            record_condition(&mut conditions, &pivot);
            let inv = pivot.inverse().expect("pivot is nonzero");
            rows[next] = scale_vector(&rows[next], &inv);
            let prow = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && !row[c].is_zero() {
                    let f = -&row[c];
                    axpy(row, &f, &prow);
                }
            }
            pivots.push(c);
            next += 1;
        }
        rows.truncate(next);
        Echelon {
            rows,
            pivots,
            conditions,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Determinant by elimination with row swaps.
    pub fn determinant(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut rows = self.row_vectors();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = choose_pivot(&rows, c..n, c) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                rows.swap(p, c);
                det = -det;
            }
            let pivot = rows[c][c].clone();
            det = &det * &pivot;
            let inv = pivot.inverse()?;
            let prow = rows[c].clone();
            for row in rows.iter_mut().skip(c + 1) {
                if !row[c].is_zero() {
                    let f = -&(&row[c] * &inv);
                    axpy(row, &f, &prow);
                }
            }
        }
        Ok(det)
    }

    /// Basis of the right kernel `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zero_vector(self.cols);
                v[f] = Scalar::one();
                for (row, &p) in e.rows.iter().zip(&e.pivots) {
                    v[p] = -&row[f];
                }
                v
            })
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub rows: Vec<Vector>,
    pub pivots: Vec<usize>,
    /// Polynomials assumed nonzero by the elimination.
    pub conditions: Vec<Poly>,
}

/// A subspace of `Scalar^n`, stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    conditions: Vec<Poly>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            conditions: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace {
            ambient,
            rows: (0..ambient).map(|i| unit_vector(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
            conditions: Vec::new(),
        }
    }

    pub fn span<I: IntoIterator<Item = Vector>>(ambient: usize, vectors: I) -> Subspace {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn conditions(&self) -> &[Poly] {
        &self.conditions
    }

    /// Remainder of `v` after clearing every pivot coordinate.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let f = -&r[p];
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Add `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut r = self.reduce(&v);
        let Some(lead) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let pivot = r[lead].clone();
        record_condition(&mut self.conditions, &pivot);
        r = scale_vector(&r, &pivot.inverse().expect("nonzero"));
        for row in &mut self.rows {
            if !row[lead].is_zero() {
                let f = -&row[lead];
                axpy(row, &f, &r);
            }
        }
        let at = self.pivots.partition_point(|&p| p < lead);
        self.rows.insert(at, r);
        self.pivots.insert(at, lead);
        true
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(v.clone());
        }
        for c in &other.conditions {
            if !s.conditions.contains(c) {
                s.conditions.push(c.clone());
            }
        }
        s.conditions.sort();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows).unwrap()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(
            m(&[&[1, 2], &[3, 4]]).determinant().unwrap(),
            Scalar::from_int(-2)
        );
        assert_eq!(
            m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])
                .determinant()
                .unwrap(),
            Scalar::from_int(-1)
        );
        assert!(m(&[&[1, 2], &[2, 4]]).determinant().unwrap().is_zero());
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vector(&a.mul_vector(&k[0]).unwrap()));
    }

    #[test]
    fn parametric_pivot_records_condition() {
        let b = Scalar::param("b");
        let a = Matrix::from_rows(vec![
            vec![b.clone(), Scalar::one()],
            vec![Scalar::zero(), b],
        ])
        .unwrap();
        let e = a.rref();
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(e.conditions, vec![Poly::var("b")]);
    }

    #[test]
    fn subspace_is_reduced() {
        let s = Subspace::span(
            3,
            vec![
                vec![0.into(), 1.into(), 1.into()],
                vec![1.into(), 1.into(), 0.into()],
                vec![1.into(), 2.into(), 1.into()],
            ],
        );
        assert_eq!(s.dim(), 2);
        assert_eq!(s.pivots(), &[0, 1]);
        assert_eq!(s.basis()[0], vec![1.into(), 0.into(), Scalar::from_int(-1)]);
        assert!(s.contains(&[2.into(), 3.into(), 1.into()]));
        assert!(!s.contains(&[0.into(), 0.into(), 1.into()]));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-3i64..=3, n * n).prop_map(move |xs| {
            let rows = xs
                .chunks(n)
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect();
            Matrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative(a in small_matrix(3), b in small_matrix(3)) {
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(ab.determinant().unwrap(), &a.determinant().unwrap() * &b.determinant().unwrap());
        }

        #[test]
        fn rank_nullity(a in small_matrix(4)) {
            let k = a.kernel();
            prop_assert_eq!(a.rank() + k.len(), 4);
            for v in k {
                prop_assert!(is_zero_vector(&a.mul_vector(&v).unwrap()));
            }
        }

        #[test]
        fn rank_matches_transpose(a in small_matrix(4)) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }
    }
}
