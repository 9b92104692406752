//! Values cross-checked against independent computations: Pascal's triangle,
//! permutation-expansion determinants, and a dense triple loop for the identity.

use num_traits::Zero;
use zinbiel_core::families::{build, ex31, null_filiform, FamilyId, FamilyParams};
use zinbiel_core::identities::{binomial_matrix, determinant, eq9_system, reduced_binomial_matrix};
use zinbiel_core::scalar::{int, Rational};
use zinbiel_core::spectra::{char_sequence, jordan_type_nilpotent, left_mult_matrix, Strategy};
use zinbiel_core::Algebra;

fn pascal(rows: usize) -> Vec<Vec<i64>> {
    let mut t = vec![vec![1i64]];
    for r in 1..rows {
        let prev = &t[r - 1];
        let mut row = vec![1i64; r + 1];
        for k in 1..r {
            row[k] = prev[k - 1] + prev[k];
        }
        t.push(row);
    }
    t
}

fn c(t: &[Vec<i64>], a: i64, b: i64) -> i64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        t[a as usize][b as usize]
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            // inserting at `pos` passes over `len - pos` larger-index slots
            let s = if (perm.len() - pos) % 2 == 0 {
                sign
            } else {
                -sign
            };
            out.push((p, s));
        }
    }
    out
}

fn leibniz_det(m: &[Vec<Rational>]) -> Rational {
    permutations(m.len())
        .into_iter()
        .map(|(p, s)| {
            let prod: Rational = p
                .iter()
                .enumerate()
                .map(|(r, &c)| m[r][c].clone())
                .product();
            prod * int(s)
        })
        .sum()
}

#[test]
fn binomial_matrix_matches_pascal() {
    let t = pascal(40);
    for p in 2..=8usize {
        let m = binomial_matrix(p);
        for (i, row) in m.iter().enumerate() {
            for (col, x) in row.iter().enumerate() {
                assert_eq!(*x, int(c(&t, (p + i - col) as i64, i as i64)));
            }
        }
        let reduced = reduced_binomial_matrix(p);
        for (i, row) in reduced.iter().enumerate() {
            for (col, x) in row.iter().enumerate() {
                assert_eq!(*x, int(c(&t, (p - col) as i64, i as i64)));
            }
        }
    }
}

#[test]
fn determinant_matches_permutation_expansion() {
    for p in 2..=6usize {
        let m = binomial_matrix(p);
        let d = leibniz_det(&m);
        assert_eq!(determinant(&m), d);
        let sign = if (p * (p + 1) / 2) % 2 == 0 { 1 } else { -1 };
        assert_eq!(d, int(sign), "p = {p}");
    }
}

#[test]
fn eq9_entries_match_pascal() {
    let t = pascal(40);
    for p in 3..=6usize {
        let s = eq9_system(p, 2 * p);
        for (r, row) in s.matrix.iter().enumerate() {
            let i = r as i64 + 1;
            for (k, x) in row.iter().enumerate() {
                assert_eq!(*x, int(c(&t, p as i64 + i - 1 - k as i64, i - 1)));
            }
        }
    }
}

/// Dense structure-constant cube, independent of the sparse multiplication.
fn cube(a: &Algebra) -> Vec<Vec<Vec<Rational>>> {
    let n = a.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    a.basis_product(i, j)
                        .iter()
                        .map(|s| s.as_rational().unwrap().clone())
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
fn dense_is_zinbiel(t: &[Vec<Vec<Rational>>]) -> bool {
    let n = t.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += &t[i][j][m] * &t[m][k][l];
                        s -= &t[j][k][m] * &t[i][m][l];
                        s -= &t[k][j][m] * &t[i][m][l];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn dense_identity_agrees() {
    let cases = [
        (FamilyId::A1, FamilyParams::new(9, 3).beta1(2)),
        (FamilyId::A3, FamilyParams::new(10, 4)),
        (FamilyId::A7, FamilyParams::new(9, 4).gamma1(1).delta1(1)),
        (FamilyId::T3, FamilyParams::new(9, 4)),
        (FamilyId::T7, FamilyParams::new(8, 3)),
        (FamilyId::T7, FamilyParams::new(10, 4)),
        (FamilyId::W31, FamilyParams::new(13, 4)),
    ];
    for (id, fp) in cases {
        let a = build(id, &fp).unwrap();
        assert_eq!(a.is_zinbiel(), dense_is_zinbiel(&cube(&a)), "{id}");
    }
    assert!(dense_is_zinbiel(&cube(&ex31().unwrap())));
}

/// Jordan type of a nilpotent matrix from the orbit lengths of a cyclic
/// decomposition found by brute force on unit vectors (valid for the
/// shift-like operators used here, where each unit vector starts or
/// continues a single chain).
fn chains(a: &Algebra, x: &[zinbiel_core::Scalar]) -> Vec<usize> {
    let m = left_mult_matrix(a, x).unwrap();
    let n = a.dim();
    let mut image = vec![false; n];
    for col in 0..n {
        for (row, hit) in image.iter_mut().enumerate() {
            if !m.get(row, col).is_zero() {
                *hit = true;
            }
        }
    }
    let mut out = Vec::new();
    for start in (0..n).filter(|&k| !image[k]) {
        let mut len = 1;
        let mut cur = start;
        while let Some(next) = (0..n).find(|&r| !m.get(r, cur).is_zero()) {
            len += 1;
            cur = next;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[test]
fn jordan_types_match_chain_walks() {
    let nf = null_filiform(7).unwrap();
    assert_eq!(
        chains(&nf, &nf.unit(0)),
        jordan_type_nilpotent(&left_mult_matrix(&nf, &nf.unit(0)).unwrap()).unwrap()
    );
    let e = ex31().unwrap();
    assert_eq!(chains(&e, &e.unit(0)), vec![3, 1]);
    for (id, fp) in [
        (FamilyId::A4, FamilyParams::new(9, 4)),
        (FamilyId::A3, FamilyParams::new(8, 3)),
        (FamilyId::T4, FamilyParams::new(9, 4)),
    ] {
        let a = build(id, &fp).unwrap();
        let walk = chains(&a, &a.unit(0));
        let exact = jordan_type_nilpotent(&left_mult_matrix(&a, &a.unit(0)).unwrap()).unwrap();
        assert_eq!(walk, exact, "{id}");
        assert_eq!(
            char_sequence(&a, &Strategy::grid(3)).unwrap().partition,
            vec![fp.n - fp.p, fp.p]
        );
    }
}
