//! Left-multiplication operators and characteristic sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::families::Kind;
use crate::linalg::{is_zero_vector, zero_vector, Matrix, Vector};
use crate::scalar::{rat, Scalar};

/// Matrix of `L_x`: column `j` holds the coordinates of `x∘e_j`.
pub fn left_mult_matrix(a: &Algebra, x: &[Scalar]) -> Result<Matrix> {
    let n = a.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let cols = (0..n)
        .map(|j| a.multiply(x, &a.unit(j)))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_columns(cols)
}

/// Rank sequence `r_0 = n, r_s = rank(M^s)` up to the first zero.
pub fn rank_sequence(m: &Matrix) -> Result<Vec<usize>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.cols(),
        });
    }
    let mut ranks = vec![n];
    let mut power = Matrix::identity(n);
    while *ranks.last().expect("nonempty") > 0 {
        power = power.mul(m)?;
        let r = power.rank();
        if r == *ranks.last().expect("nonempty") {
            return Err(Error::MatrixNotNilpotent);
        }
        ranks.push(r);
    }
    Ok(ranks)
}

/// Jordan type of a nilpotent matrix as a descending partition.
/// There are `r_{s-1} - r_s` blocks of size at least `s`.
pub fn jordan_type_nilpotent(m: &Matrix) -> Result<Vec<usize>> {
    let ranks = rank_sequence(m)?;
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for s in (1..=at_least.len()).rev() {
        let exactly = at_least[s - 1] - at_least.get(s).copied().unwrap_or(0);
        parts.extend(std::iter::repeat_n(s, exactly));
    }
    Ok(parts)
}

/// Block sizes read off the subdiagonal of `m`: a new block starts at `k`
/// whenever `m[k][k-1] = 0`.
pub fn jordan_layout(m: &Matrix) -> Vec<usize> {
    let n = m.rows();
    let mut out = Vec::new();
    let mut run = 0;
    for k in 0..n {
        if k > 0 && m.get(k, k - 1).is_zero() {
            out.push(run);
            run = 0;
        }
        run += 1;
    }
    if n > 0 {
        out.push(run);
    }
    out
}

/// Largest `m` with `L_x^{m-1}(x) ≠ 0` (zero for `x = 0`).
pub fn chain_length(a: &Algebra, x: &[Scalar]) -> Result<usize> {
    let mut v = x.to_vec();
    let mut m = 0;
    while !is_zero_vector(&v) && m <= a.dim() {
        m += 1;
        v = a.multiply(x, &v)?;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSequence {
    pub partition: Vec<usize>,
    pub witness: Vector,
}

/// Candidate generation for [`char_sequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    /// Integer grid `|x_i| ≤ grid_height` on the complement of `A²`; 0 disables.
    pub grid_height: u32,
    /// Random rational draws with numerator and denominator height `sample_height`.
    pub samples: usize,
    pub sample_height: u32,
    pub seed: u64,
    /// Cap on the number of grid points visited.
    pub max_grid: usize,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy {
            grid_height: 3,
            samples: 0,
            sample_height: 10,
            seed: 0,
            max_grid: 4096,
        }
    }
}

impl Strategy {
    pub fn grid(height: u32) -> Strategy {
        Strategy {
            grid_height: height,
            ..Strategy::default()
        }
    }

    pub fn random(samples: usize, height: u32, seed: u64) -> Strategy {
        Strategy {
            grid_height: 0,
            samples,
            sample_height: height,
            seed,
            ..Strategy::default()
        }
    }
}

/// Integer points of `[-h, h]^c` with sup-norm exactly `level`, lexicographic.
fn shell(c: usize, level: i64, budget: usize, out: &mut Vec<Vec<i64>>) {
    let mut v = vec![-level; c];
    loop {
        if out.len() >= budget {
            return;
        }
        if v.iter().any(|x| x.abs() == level) {
            out.push(v.clone());
        }
        let mut i = c;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if v[i] < level {
                v[i] += 1;
                break;
            }
            v[i] = -level;
        }
    }
}

fn candidates(n: usize, free: &[usize], strategy: &Strategy) -> Vec<Vector> {
    let c = free.len();
    let embed = |coords: &[Scalar]| {
        let mut x = zero_vector(n);
        for (&k, v) in free.iter().zip(coords) {
            x[k] = v.clone();
        }
        x
    };
    let mut out = Vec::new();
    if strategy.grid_height > 0 {
        for i in 0..c {
            let mut u = vec![Scalar::zero(); c];
            u[i] = Scalar::one();
            out.push(embed(&u));
        }
        let mut pts = Vec::new();
        for level in 1..=strategy.grid_height as i64 {
            shell(c, level, strategy.max_grid, &mut pts);
        }
        for p in pts {
            if p.iter().filter(|&&x| x != 0).count() == 1 && p.contains(&1) {
                continue; // unit vectors already listed
            }
            let coords: Vec<Scalar> = p.iter().map(|&x| Scalar::from_int(x)).collect();
            out.push(embed(&coords));
        }
    }
    if strategy.samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
        let h = strategy.sample_height.max(1) as i64;
        let mut drawn = 0;
        while drawn < strategy.samples {
            let coords: Vec<Scalar> = (0..c)
                .map(|_| Scalar::from(rat(rng.gen_range(-h..=h), rng.gen_range(1..=h))))
                .collect();
            if coords.iter().all(Scalar::is_zero) {
                continue;
            }
            out.push(embed(&coords));
            drawn += 1;
        }
    }
    out
}

/// Lexicographically largest Jordan type of `L_x` over the candidates
/// `x ∉ A²`; ties keep the earliest candidate.
pub fn char_sequence(a: &Algebra, strategy: &Strategy) -> Result<CharSequence> {
    let n = a.dim();
    let sq = a.square();
    if sq.dim() == n {
        return Err(Error::EmptyComplement);
    }
    let free: Vec<usize> = (0..n).filter(|k| !sq.pivots().contains(k)).collect();
    let cands = candidates(n, &free, strategy);
    if cands.is_empty() {
        return Err(Error::InvalidParams(
            "strategy produces no candidates".into(),
        ));
    }
    let scored = cands
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let m = left_mult_matrix(a, x)?;
            Ok((jordan_type_nilpotent(&m)?, i))
        })
        .collect::<Result<Vec<_>>>()?;
    let (partition, idx) = scored
        .into_iter()
        .reduce(|best, cur| if cur.0 > best.0 { cur } else { best })
        .expect("nonempty");
    Ok(CharSequence {
        partition,
        witness: cands[idx].clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeReport {
    pub kind: Kind,
    pub chain: usize,
    /// Block sizes of `L_witness` along the diagonal of the given basis.
    pub layout: Vec<usize>,
    /// Whether `layout` is a rearrangement of the partition.
    pub adapted: bool,
}

/// Type I when the witness chain has length `n-p`, type II when it has length `p`.
pub fn detect_type(a: &Algebra, cs: &CharSequence) -> Result<TypeReport> {
    let n = a.dim();
    let chain = chain_length(a, &cs.witness)?;
    let mismatch = || Error::SequenceMismatch {
        partition: cs.partition.clone(),
        chain,
    };
    let (long, p) = match cs.partition.as_slice() {
        [long, short] if long + short == n && *short >= 1 => (*long, *short),
        _ => return Err(mismatch()),
    };
    let kind = if chain == long {
        Kind::I
    } else if chain == p {
        Kind::II
    } else {
        return Err(mismatch());
    };
    let layout = jordan_layout(&left_mult_matrix(a, &cs.witness)?);
    let mut sorted = layout.clone();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    Ok(TypeReport {
        kind,
        chain,
        adapted: sorted == cs.partition,
        layout,
    })
}
