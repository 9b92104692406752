//! Structure-constant algebras.
//!
//! Basis indices are 0-based in code; labels and the JSON format are what
//! users see. Absent `(i, j)` entries are zero products.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{is_zero_vector, unit_vector, zero_vector, Subspace, Vector};
use crate::scalar::{Assignment, Scalar};

/// Sparse coordinate vector `k -> c_k`; zero coefficients are never stored.
pub type SparseVec = BTreeMap<usize, Scalar>;

fn sparse_axpy(acc: &mut SparseVec, s: &Scalar, v: &SparseVec) {
    if s.is_zero() {
        return;
    }
    for (&k, c) in v {
        let add = s * c;
        let entry = acc.entry(k).or_insert_with(Scalar::zero);
        *entry = &*entry + &add;
        if entry.is_zero() {
            acc.remove(&k);
        }
    }
}

pub fn to_dense(v: &SparseVec, n: usize) -> Vector {
    let mut out = zero_vector(n);
    for (&k, c) in v {
        out[k] = c.clone();
    }
    out
}

pub fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    labels: Vec<String>,
    params: Vec<String>,
    products: BTreeMap<(usize, usize), SparseVec>,
}

/// Nonzero Zinbiel defect on a basis triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect {
    pub triple: (usize, usize, usize),
    pub defect: Vector,
}

impl Algebra {
    pub fn new(labels: Vec<String>, params: Vec<String>) -> Result<Algebra> {
        if labels.is_empty() {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidParams(format!("duplicate basis label `{l}`")));
            }
        }
        Ok(Algebra {
            labels,
            params,
            products: BTreeMap::new(),
        })
    }

    /// Algebra with basis `e1..en` and no products yet.
    pub fn with_dim(n: usize) -> Result<Algebra> {
        Algebra::new((1..=n).map(|i| format!("e{i}")).collect(), Vec::new())
    }

    pub fn abelian(n: usize) -> Result<Algebra> {
        Algebra::with_dim(n)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.products
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Replace `e_i ∘ e_j`.
    pub fn set_product(&mut self, i: usize, j: usize, v: SparseVec) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        for &k in v.keys() {
            self.check_index(k)?;
        }
        let v: SparseVec = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if v.is_empty() {
            self.products.remove(&(i, j));
        } else {
            self.products.insert((i, j), v);
        }
        Ok(())
    }

    /// `e_i ∘ e_j += c e_k`
    pub fn add_term(&mut self, i: usize, j: usize, k: usize, c: Scalar) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_index(k)?;
        let mut single = SparseVec::new();
        single.insert(k, c);
        let entry = self.products.entry((i, j)).or_default();
        sparse_axpy(entry, &Scalar::one(), &single);
        if entry.is_empty() {
            self.products.remove(&(i, j));
        }
        Ok(())
    }

    /// Label-based [`Algebra::add_term`].
    pub fn add(&mut self, a: &str, b: &str, c: &str, coeff: Scalar) -> Result<()> {
        let idx = |l: &str| {
            self.index_of(l)
                .ok_or_else(|| Error::InvalidParams(format!("unknown basis label `{l}`")))
        };
        let (i, j, k) = (idx(a)?, idx(b)?, idx(c)?);
        self.add_term(i, j, k, coeff)
    }

    pub fn product(&self, i: usize, j: usize) -> Option<&SparseVec> {
        self.products.get(&(i, j))
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        self.product(i, j)
            .map_or_else(|| zero_vector(self.dim()), |v| to_dense(v, self.dim()))
    }

    pub fn multiply_sparse(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in u {
            for (&j, b) in v {
                if let Some(p) = self.product(i, j) {
                    sparse_axpy(&mut out, &(a * b), p);
                }
            }
        }
        out
    }

    /// Bilinear extension of the basis products.
    pub fn multiply(&self, u: &[Scalar], v: &[Scalar]) -> Result<Vector> {
        for w in [u, v] {
            if w.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: w.len(),
                });
            }
        }
        Ok(to_dense(
            &self.multiply_sparse(&to_sparse(u), &to_sparse(v)),
            self.dim(),
        ))
    }

    fn basis_sparse(&self, i: usize, j: usize) -> SparseVec {
        self.product(i, j).cloned().unwrap_or_default()
    }

    /// `(e_i∘e_j)∘e_k − e_i∘(e_j∘e_k) − e_i∘(e_k∘e_j)` on every basis triple,
    /// keeping only the nonzero ones, in lexicographic triple order.
    pub fn zinbiel_defects(&self) -> Vec<Defect> {
        let n = self.dim();
        let per_i: Vec<Vec<Defect>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ei = SparseVec::from([(i, Scalar::one())]);
                let mut out = Vec::new();
                for j in 0..n {
                    let ij = self.basis_sparse(i, j);
                    for k in 0..n {
                        let ek = SparseVec::from([(k, Scalar::one())]);
                        let mut d = self.multiply_sparse(&ij, &ek);
                        let mut inner = self.basis_sparse(j, k);
                        sparse_axpy(&mut inner, &Scalar::one(), &self.basis_sparse(k, j));
                        sparse_axpy(
                            &mut d,
                            &Scalar::from_int(-1),
                            &self.multiply_sparse(&ei, &inner),
                        );
                        if !d.is_empty() {
                            out.push(Defect {
                                triple: (i, j, k),
                                defect: to_dense(&d, n),
                            });
                        }
                    }
                }
                out
            })
            .collect();
        per_i.into_iter().flatten().collect()
    }

    pub fn is_zinbiel(&self) -> bool {
        self.zinbiel_defects().is_empty()
    }

    /// `A ∘ S` for a subspace `S`.
    pub fn left_product_space(&self, s: &Subspace) -> Subspace {
        let n = self.dim();
        let mut out = Subspace::zero(n);
        for w in s.basis() {
            let ws = crate::algebra::to_sparse(w);
            for b in 0..n {
                let v = self.multiply_sparse(&SparseVec::from([(b, Scalar::one())]), &ws);
                if !v.is_empty() {
                    out.insert(to_dense(&v, n));
                }
            }
        }
        out
    }

    /// `A¹ = A, A^{k+1} = A∘A^k`, until zero or stabilisation.
    pub fn lower_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim())];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_zero() {
                break;
            }
            let next = self.left_product_space(last);
            if next.dim() == last.dim() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn series_dims(&self) -> Vec<usize> {
        self.lower_series().iter().map(Subspace::dim).collect()
    }

    /// Minimal `s` with `A^s = 0`.
    pub fn nilindex(&self) -> Result<usize> {
        let series = self.lower_series();
        let last = series.last().expect("nonempty");
        if last.is_zero() {
            Ok(series.len())
        } else {
            Err(Error::NotNilpotent {
                stable_dim: last.dim(),
            })
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilindex().is_ok()
    }

    pub fn is_null_filiform(&self) -> bool {
        self.nilindex().is_ok_and(|s| s == self.dim() + 1)
    }

    /// `A² = A∘A`.
    pub fn square(&self) -> Subspace {
        self.left_product_space(&Subspace::full(self.dim()))
    }

    pub fn unit(&self, i: usize) -> Vector {
        unit_vector(self.dim(), i)
    }

    /// Substitute parameter values into every structure constant.
    pub fn specialize(&self, assignment: &Assignment) -> Result<Algebra> {
        let mut out = Algebra {
            labels: self.labels.clone(),
            params: self
                .params
                .iter()
                .filter(|p| !assignment.contains_key(*p))
                .cloned()
                .collect(),
            products: BTreeMap::new(),
        };
        for (&(i, j), v) in &self.products {
            let mut w = SparseVec::new();
            for (&k, c) in v {
                let c = c.specialize(assignment)?;
                if !c.is_zero() {
                    w.insert(k, c);
                }
            }
            out.set_product(i, j, w)?;
        }
        Ok(out)
    }

    /// Same tensor under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Algebra> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: labels.len(),
            });
        }
        let mut out = Algebra::new(labels, self.params.clone())?;
        out.products = self.products.clone();
        Ok(out)
    }

    /// Format a coordinate vector with basis labels, e.g. `2*e3 - f1`.
    pub fn format_vector(&self, v: &[Scalar]) -> String {
        format_combination(&self.labels, v)
    }
}

pub fn format_combination(labels: &[String], v: &[Scalar]) -> String {
    if is_zero_vector(v) {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let (neg, body) = match (c.as_rational(), text.strip_prefix('-')) {
            (Some(_), Some(rest)) => (true, rest.to_string()),
            _ => (false, text),
        };
        let body = if body == "1" {
            labels[k].clone()
        } else if c.is_rational() {
            format!("{body}*{}", labels[k])
        } else {
            format!("({body})*{}", labels[k])
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&(i, j), v) in &self.products {
            writeln!(
                f,
                "{}∘{} = {}",
                self.labels[i],
                self.labels[j],
                self.format_vector(&to_dense(v, self.dim()))
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null_filiform(n: usize) -> Algebra {
        let mut a = Algebra::with_dim(n).unwrap();
        for i in 1..=n {
            for j in 1..=n {
                if i + j <= n {
                    let c = crate::scalar::binomial((i + j - 1) as i64, j as i64).unwrap();
                    a.add_term(i - 1, j - 1, i + j - 1, c.into()).unwrap();
                }
            }
        }
        a
    }

    #[test]
    fn null_filiform_square_of_e2() {
        let a = null_filiform(4);
        assert_eq!(
            a.basis_product(1, 1),
            a.unit(3)
                .iter()
                .map(|c| c * &Scalar::from_int(3))
                .collect::<Vec<_>>()
        );
        assert!(a.is_zinbiel());
        assert_eq!(a.series_dims(), vec![4, 3, 2, 1, 0]);
        assert_eq!(a.nilindex().unwrap(), 5);
        assert!(a.is_null_filiform());
    }

    #[test]
    fn abelian_basics() {
        let a = Algebra::abelian(3).unwrap();
        assert!(a.zinbiel_defects().is_empty());
        assert_eq!(a.series_dims(), vec![3, 0]);
        assert_eq!(a.nilindex().unwrap(), 2);
        let z = zero_vector(3);
        assert_eq!(a.multiply(&z, &a.unit(1)).unwrap(), z);
    }

    #[test]
    fn non_zinbiel_toy() {
        let mut a = Algebra::with_dim(2).unwrap();
        a.add_term(0, 0, 1, Scalar::one()).unwrap();
        a.add_term(1, 0, 1, Scalar::one()).unwrap();
        let d = a.zinbiel_defects();
        assert_eq!(d[0].triple, (0, 0, 0));
        // A∘A² = span(e1∘e2, e2∘e2) = 0 even though e2∘e1 ≠ 0
        assert_eq!(a.nilindex().unwrap(), 3);
        let mut b = Algebra::with_dim(1).unwrap();
        b.add_term(0, 0, 0, Scalar::one()).unwrap();
        assert!(matches!(
            b.nilindex(),
            Err(Error::NotNilpotent { stable_dim: 1 })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let a = Algebra::abelian(3).unwrap();
        assert!(matches!(
            a.multiply(&zero_vector(2), &zero_vector(3)),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
        let mut b = a.clone();
        assert!(matches!(
            b.add_term(0, 3, 0, Scalar::one()),
            Err(Error::IndexOutOfRange { index: 4, dim: 3 })
        ));
    }

    #[test]
    fn vector_formatting() {
        let a = Algebra::abelian(3).unwrap();
        let v = vec![Scalar::from_int(-1), Scalar::zero(), Scalar::from_int(2)];
        assert_eq!(a.format_vector(&v), "-e1 + 2*e3");
    }
}
