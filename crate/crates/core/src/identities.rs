//! Binomial identities, the type-II linear system on `β_0..β_p`, and the
//! nonexistence certificate.
//!
//! Matrices are 0-indexed here; report text uses 1-based row numbers `i`.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::Matrix;
use crate::scalar::{binomial_int, Rational, Scalar};

fn c(a: i64, b: i64) -> Rational {
    Rational::from_integer(binomial_int(a, b))
}

/// `Σ_{k=0}^{n} (−1)^k C(a,k) C(a+n−k−1, n−k)`.
pub fn lemma_alternating_sum(n: u32, a: u32) -> Rational {
    let (n, a) = (n as i64, a as i64);
    (0..=n)
        .map(|k| {
            let t = c(a, k) * c(a + n - k - 1, n - k);
            if k % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// `(p+1)×(p+1)` matrix with entry `(i, c) = C(p+i−c, i)`.
pub fn binomial_matrix(p: usize) -> Vec<Vec<Rational>> {
    let p = p as i64;
    (0..=p)
        .map(|i| (0..=p).map(|col| c(p + i - col, i)).collect())
        .collect()
}

/// Repeated row differences of [`binomial_matrix`]: pass `s` replaces row `i ≥ s`
/// by `row_i − row_{i−1}`, bottom-up. The result has entry `C(p−c, i)`.
pub fn reduced_binomial_matrix(p: usize) -> Vec<Vec<Rational>> {
    let mut m = binomial_matrix(p);
    for s in 1..=p {
        for i in (s..=p).rev() {
            let prev = m[i - 1].clone();
            for (x, y) in m[i].iter_mut().zip(prev) {
                *x -= y;
            }
        }
    }
    m
}

fn to_matrix(rows: &[Vec<Rational>]) -> Matrix {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().cloned().map(Scalar::from).collect())
            .collect(),
    )
    .expect("rectangular")
}

pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    to_matrix(rows)
        .determinant()
        .expect("square")
        .as_rational()
        .expect("rational entries")
        .clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Solutions {
    Unique,
    Affine { dim: usize },
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub unknowns: usize,
    pub solutions: Solutions,
}

impl LinearSystem {
    pub fn new(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>, unknowns: usize) -> LinearSystem {
        assert_eq!(matrix.len(), rhs.len(), "one right-hand side per row");
        assert!(matrix.iter().all(|r| r.len() == unknowns), "row width");
        let rank = if matrix.is_empty() {
            0
        } else {
            to_matrix(&matrix).rank()
        };
        let aug: Vec<Vec<Rational>> = matrix
            .iter()
            .zip(&rhs)
            .map(|(r, b)| r.iter().chain([b]).cloned().collect())
            .collect();
        let aug_rank = if aug.is_empty() {
            0
        } else {
            to_matrix(&aug).rank()
        };
        let solutions = if aug_rank > rank {
            Solutions::Infeasible
        } else if rank == unknowns {
            Solutions::Unique
        } else {
            Solutions::Affine {
                dim: unknowns - rank,
            }
        };
        LinearSystem {
            matrix,
            rhs,
            unknowns,
            solutions,
        }
    }

    pub fn rank(&self) -> usize {
        if self.matrix.is_empty() {
            0
        } else {
            to_matrix(&self.matrix).rank()
        }
    }

    pub fn residuals(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| r.iter().zip(x).map(|(a, v)| a * v).sum::<Rational>() - b)
            .collect()
    }

    /// Append the row `x_k = value`.
    pub fn pin(&self, k: usize, value: Rational) -> LinearSystem {
        let mut m = self.matrix.clone();
        let mut row = vec![Rational::zero(); self.unknowns];
        row[k] = Rational::one();
        m.push(row);
        let mut rhs = self.rhs.clone();
        rhs.push(value);
        LinearSystem::new(m, rhs, self.unknowns)
    }

    /// Multipliers `y` with `yᵀM = 0` and `yᵀb = 1`, when the system is infeasible.
    pub fn infeasibility_certificate(&self) -> Option<Vec<Rational>> {
        if self.solutions != Solutions::Infeasible {
            return None;
        }
        let t = to_matrix(&self.matrix).transpose();
        for y in t.kernel() {
            let y: Vec<Rational> = y
                .iter()
                .map(|s| s.as_rational().expect("rational").clone())
                .collect();
            let yb: Rational = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
            if !yb.is_zero() {
                return Some(y.iter().map(|v| v / &yb).collect());
            }
        }
        None
    }

    /// Independent check of a certificate from [`Self::infeasibility_certificate`].
    pub fn check_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.matrix.len() {
            return false;
        }
        let combo_zero = (0..self.unknowns).all(|k| {
            self.matrix
                .iter()
                .zip(y)
                .map(|(r, w)| &r[k] * w)
                .sum::<Rational>()
                .is_zero()
        });
        let yb: Rational = y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        combo_zero && yb.is_one()
    }
}

/// Rows `i = 1..=i_max` over `β_0..β_p`, entry `C(p+i−1−k, i−1)`, zero right-hand side.
pub fn eq9_system(p: usize, i_max: usize) -> LinearSystem {
    let pi = p as i64;
    let matrix = (1..=i_max as i64)
        .map(|i| (0..=pi).map(|k| c(pi + i - 1 - k, i - 1)).collect())
        .collect();
    LinearSystem::new(matrix, vec![Rational::zero(); i_max], p + 1)
}

/// `β_k = (−1)^k C(p, k)` for `k = 0..=p`.
pub fn alternating_betas(p: usize) -> Vec<Rational> {
    (0..=p as i64)
        .map(|k| {
            if k % 2 == 0 {
                c(p as i64, k)
            } else {
                -c(p as i64, k)
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub p: usize,
    pub determinant: String,
    pub rows: usize,
    pub rank: usize,
    pub unknowns: usize,
    pub solutions: Solutions,
    /// Multipliers for rows `i = 1..=p+1` and the pinned row `β_0 = 1`.
    pub multipliers: Vec<String>,
    pub verified: bool,
    pub conclusion: String,
}

pub fn nonexistence_certificate(p: usize) -> Certificate {
    let det = determinant(&binomial_matrix(p));
    let sys = eq9_system(p, p + 1);
    let pinned = sys.pin(0, Rational::one());
    let y = pinned.infeasibility_certificate();
    let verified = y.as_ref().is_some_and(|y| pinned.check_certificate(y));
    let conclusion = if verified {
        "beta_0 forced to 0 but beta_0 = 1".to_string()
    } else {
        "no contradiction: the pinned system is feasible".to_string()
    };
    Certificate {
        p,
        determinant: det.to_string(),
        rows: sys.matrix.len(),
        rank: sys.rank(),
        unknowns: sys.unknowns,
        solutions: pinned.solutions.clone(),
        multipliers: y
            .unwrap_or_default()
            .iter()
            .map(ToString::to_string)
            .collect(),
        verified,
        conclusion,
    }
}

impl Certificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nonexistence certificate for p = {}", self.p);
        let _ = writeln!(s, "det M (order {}) = {}", self.p + 1, self.determinant);
        let _ = writeln!(
            s,
            "rows i = 1..{} on beta_0..beta_{}: rank {} of {}",
            self.rows, self.p, self.rank, self.unknowns
        );
        if self.verified {
            let terms: Vec<String> = self
                .multipliers
                .iter()
                .enumerate()
                .filter(|(_, y)| y.as_str() != "0")
                .map(|(k, y)| {
                    if k < self.rows {
                        format!("({y})*row_{}", k + 1)
                    } else {
                        format!("({y})*[beta_0 = 1]")
                    }
                })
                .collect();
            let _ = writeln!(s, "combination: {} gives 0 = 1", terms.join(" + "));
        }
        let _ = writeln!(s, "{}", self.conclusion);
        let status = if self.solutions == Solutions::Infeasible {
            "infeasible"
        } else {
            "feasible"
        };
        let _ = writeln!(s, "status: {status}");
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

/// Highest `|value|` in a list; zero for an empty list.
pub fn max_abs(values: &[Rational]) -> Rational {
    values
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn alternating_sum_examples() {
        assert_eq!(lemma_alternating_sum(1, 1), int(0));
        assert_eq!(lemma_alternating_sum(3, 2), int(0));
        assert_eq!(lemma_alternating_sum(12, 12), int(0));
    }

    #[test]
    fn binomial_matrix_p2() {
        assert_eq!(
            binomial_matrix(2),
            ints(&[&[1, 1, 1], &[3, 2, 1], &[6, 3, 1]])
        );
        assert_eq!(determinant(&binomial_matrix(2)), int(-1));
    }

    #[test]
    fn reduced_shape() {
        assert_eq!(
            reduced_binomial_matrix(2),
            ints(&[&[1, 1, 1], &[2, 1, 0], &[1, 0, 0]])
        );
        for p in 2..=5 {
            let r = reduced_binomial_matrix(p);
            assert!(r[0].iter().all(|x| x.is_one()));
            let mut last = vec![int(0); p + 1];
            last[0] = int(1);
            assert_eq!(r[p], last);
        }
    }

    #[test]
    fn eq9_small() {
        let s = eq9_system(3, 4);
        assert_eq!(s.solutions, Solutions::Unique);
        assert_eq!(s.pin(0, int(1)).solutions, Solutions::Infeasible);
        let s2 = eq9_system(3, 2);
        let b: Vec<Rational> = [1, -3, 3, -1].iter().map(|&x| int(x)).collect();
        assert_eq!(s2.residuals(&b), vec![int(0), int(0)]);
    }

    #[test]
    fn one_row_fewer_is_affine() {
        let s = eq9_system(4, 4);
        assert_eq!(s.solutions, Solutions::Affine { dim: 1 });
        assert!(s.residuals(&alternating_betas(4)).iter().all(Zero::is_zero));
    }

    #[test]
    fn certificate_checks() {
        let cert = nonexistence_certificate(3);
        assert!(cert.verified);
        assert_eq!(cert.rank, 4);
        assert_eq!(cert.solutions, Solutions::Infeasible);
        assert!(cert.to_text().contains("beta_0 forced to 0 but beta_0 = 1"));
        let sys = eq9_system(3, 4).pin(0, int(1));
        let mut y = sys.infeasibility_certificate().unwrap();
        y[0] += rat(1, 2);
        assert!(!sys.check_certificate(&y));
    }

    #[test]
    fn feasible_has_no_certificate() {
        assert_eq!(
            eq9_system(4, 4).pin(0, int(1)).infeasibility_certificate(),
            None
        );
    }
}
