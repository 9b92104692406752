//! Associated graded algebra of the lower series.
//!
//! The component of degree `i` is spanned by the echelon rows of `A^i`
//! whose pivots are not pivots of `A^{i+1}`. Every coordinate is the pivot of
//! exactly one such row, so the graded algebra keeps the original labels
//! and coordinate order.

use crate::algebra::{to_sparse, Algebra};
use crate::error::{Error, Result};
use crate::isomorphism::{iso_search, IsoOutcome, SearchBounds};
use crate::linalg::{Subspace, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    pub algebra: Algebra,
    /// 1-based degree of each basis vector.
    pub degrees: Vec<usize>,
    /// Representatives in the original coordinates, indexed like `algebra`.
    pub sections: Vec<Vector>,
    pub component_dims: Vec<usize>,
}

fn series(a: &Algebra) -> Result<Vec<Subspace>> {
    let s = a.lower_series();
    match s.last() {
        Some(last) if last.is_zero() => Ok(s),
        last => Err(Error::NotNilpotent {
            stable_dim: last.map_or(0, Subspace::dim),
        }),
    }
}

pub fn grading_dims(a: &Algebra) -> Result<Vec<usize>> {
    let s = series(a)?;
    Ok(s.windows(2).map(|w| w[0].dim() - w[1].dim()).collect())
}

pub fn graded(a: &Algebra) -> Result<GradedAlgebra> {
    let n = a.dim();
    let s = series(a)?;
    let mut degrees = vec![0; n];
    let mut sections: Vec<Vector> = vec![Vec::new(); n];
    for d in 0..s.len() - 1 {
        let deeper = s[d + 1].pivots();
        for (row, &piv) in s[d].basis().iter().zip(s[d].pivots()) {
            if !deeper.contains(&piv) {
                degrees[piv] = d + 1;
                sections[piv] = row.clone();
            }
        }
    }
    let level = |deg: usize| s.get(deg - 1).cloned().unwrap_or_else(|| Subspace::zero(n));
    let mut g = Algebra::new(a.labels().to_vec(), a.params().to_vec())?;
    for i in 0..n {
        for j in 0..n {
            let target = degrees[i] + degrees[j];
            let prod = a.multiply(&sections[i], &sections[j])?;
            if !level(target).contains(&prod) {
                return Err(Error::UnsupportedShape(format!(
                    "{}∘{} leaves A^{target}; the filtration is not multiplicative",
                    a.label(i),
                    a.label(j)
                )));
            }
            let r = level(target + 1).reduce(&prod);
            let coords: Vector = (0..n)
                .map(|k| {
                    if degrees[k] == target {
                        r[k].clone()
                    } else {
                        crate::scalar::Scalar::zero()
                    }
                })
                .collect();
            g.set_product(i, j, to_sparse(&coords))?;
        }
    }
    Ok(GradedAlgebra {
        algebra: g,
        degrees,
        sections,
        component_dims: s.windows(2).map(|w| w[0].dim() - w[1].dim()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Graded {
    /// The table itself is graded by the given basis.
    Already,
    Yes(IsoOutcome),
    No(IsoOutcome),
    Unknown(IsoOutcome),
}

/// Whether `a` is isomorphic to its associated graded algebra.
pub fn is_naturally_graded(a: &Algebra, bounds: &SearchBounds) -> Result<Graded> {
    let g = graded(a)?;
    if g.algebra == *a {
        return Ok(Graded::Already);
    }
    let out = iso_search(a, &g.algebra, bounds)?;
    Ok(match out {
        IsoOutcome::Yes { .. } => Graded::Yes(out),
        IsoOutcome::No { .. } => Graded::No(out),
        IsoOutcome::Exhausted(ref r) if r.complete => Graded::No(out),
        IsoOutcome::Exhausted(_) => Graded::Unknown(out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, null_filiform, FamilyId, FamilyParams};
    use crate::scalar::Scalar;

    #[test]
    fn null_filiform_is_graded() {
        let a = null_filiform(5).unwrap();
        let g = graded(&a).unwrap();
        assert_eq!(g.degrees, vec![1, 2, 3, 4, 5]);
        assert_eq!(g.component_dims, vec![1; 5]);
        assert_eq!(g.algebra, a);
    }

    #[test]
    fn family_tables_are_graded() {
        let a = build(FamilyId::A3, &FamilyParams::new(8, 3)).unwrap();
        let g = graded(&a).unwrap();
        assert_eq!(g.component_dims.iter().sum::<usize>(), 8);
        assert_eq!(g.component_dims[0], 2);
        assert_eq!(
            is_naturally_graded(&a, &SearchBounds::default()).unwrap(),
            Graded::Already
        );
    }

    #[test]
    fn higher_term_is_dropped() {
        // e1∘e1 = e2 + e3, e1∘e2 = e3: the e3 part of e1∘e1 has degree 3
        let mut a = Algebra::with_dim(3).unwrap();
        a.add_term(0, 0, 1, Scalar::one()).unwrap();
        a.add_term(0, 0, 2, Scalar::one()).unwrap();
        a.add_term(0, 1, 2, Scalar::one()).unwrap();
        let g = graded(&a).unwrap();
        assert_eq!(g.degrees, vec![1, 2, 3]);
        assert_eq!(g.algebra.product(0, 0).unwrap().len(), 1);
        assert!(matches!(
            is_naturally_graded(&a, &SearchBounds::default()).unwrap(),
            Graded::Yes(_)
        ));
    }
}
