//! Base changes on degree-1 generators and a bounded isomorphism search.
//!
//! A base change `M` (d×d, d ≤ 2) replaces the generators `g_r` of `src`
//! by `g'_r = Σ_s M[r][s] g_s`. Every basis vector of `dst` is written as a
//! word in the generators of `dst`; evaluating the same words on the `g'`
//! gives the candidate map `φ: dst → src`. The change succeeds when `φ`
//! is multiplicative on all basis pairs and bijective, i.e. when the new
//! basis of `src` reproduces the table of `dst`.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{to_dense, to_sparse, Algebra, SparseVec};
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vector, sub_vectors, unit_vector, Matrix, Subspace, Vector};
use crate::scalar::{rat, Assignment, Poly, Rational, Scalar};
use crate::spectra::{chain_length, char_sequence, Strategy};

/// Generator coordinates: those outside the pivots of `A²`.
pub fn generators(a: &Algebra) -> Vec<usize> {
    let sq = a.square();
    (0..a.dim()).filter(|k| !sq.pivots().contains(k)).collect()
}

fn supported_generators(a: &Algebra) -> Result<Vec<usize>> {
    let g = generators(a);
    match g.len() {
        1 | 2 => Ok(g),
        0 => Err(Error::EmptyComplement),
        d => Err(Error::UnsupportedShape(format!(
            "{d} generators in degree 1; only 1- and 2-generated algebras are handled"
        ))),
    }
}

/// `e'_1 = A e_1 + B f_1, f'_1 = C e_1 + D f_1` for `d = 2`; `e'_1 = A e_1` for `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChange {
    pub matrix: Vec<Vec<Scalar>>,
}

pub const VARIABLES: [&str; 4] = ["A", "B", "C", "D"];

impl BaseChange {
    pub fn identity(d: usize) -> BaseChange {
        BaseChange {
            matrix: (0..d).map(|r| unit_vector(d, r)).collect(),
        }
    }

    pub fn two(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> BaseChange {
        BaseChange {
            matrix: vec![vec![a, b], vec![c, d]],
        }
    }

    pub fn one(a: Scalar) -> BaseChange {
        BaseChange {
            matrix: vec![vec![a]],
        }
    }

    /// Fully symbolic change in the variables `A, B, C, D`.
    pub fn symbolic(d: usize) -> BaseChange {
        let v = |i: usize| Scalar::param(VARIABLES[i]);
        match d {
            1 => BaseChange::one(v(0)),
            _ => BaseChange::two(v(0), v(1), v(2), v(3)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn determinant(&self) -> Scalar {
        let m = &self.matrix;
        match m.len() {
            1 => m[0][0].clone(),
            _ => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        }
    }

    fn specialize(&self, asg: &Assignment) -> Result<BaseChange> {
        Ok(BaseChange {
            matrix: self
                .matrix
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| x.specialize(asg))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

impl fmt::Display for BaseChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect();
        write!(f, "({})", rows.join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Word {
    Gen(usize),
    Mul(usize, usize),
}

/// A basis of `a` made of generator words, with the inverse of its value matrix.
struct WordBasis {
    words: Vec<Word>,
    values: Vec<SparseVec>,
    /// `basis vector k = Σ_m inverse[m][k] · value(word m)`
    inverse: Matrix,
}

fn unit_gens(gens: &[usize]) -> Vec<SparseVec> {
    gens.iter()
        .map(|&g| SparseVec::from([(g, Scalar::one())]))
        .collect()
}

fn word_basis(a: &Algebra, gens: &[SparseVec]) -> Result<WordBasis> {
    let n = a.dim();
    let mut words = Vec::new();
    let mut values: Vec<SparseVec> = Vec::new();
    let mut span = Subspace::zero(n);
    for (r, v) in gens.iter().enumerate() {
        let v = v.clone();
        span.insert(to_dense(&v, n));
        words.push(Word::Gen(r));
        values.push(v);
    }
    let mut frontier: Vec<usize> = (0..words.len()).collect();
    while !frontier.is_empty() && span.dim() < n {
        let mut next = Vec::new();
        for r in 0..gens.len() {
            for &w in &frontier {
                let v = a.multiply_sparse(&values[r], &values[w]);
                if !v.is_empty() && span.insert(to_dense(&v, n)) {
                    next.push(words.len());
                    words.push(Word::Mul(r, w));
                    values.push(v);
                }
            }
        }
        frontier = next;
    }
    let mut grew = true;
    while grew && span.dim() < n {
        grew = false;
        let m = words.len();
        'outer: for x in 0..m {
            for y in 0..m {
                let v = a.multiply_sparse(&values[x], &values[y]);
                if !v.is_empty() && span.insert(to_dense(&v, n)) {
                    words.push(Word::Mul(x, y));
                    values.push(v);
                    grew = true;
                    if span.dim() == n {
                        break 'outer;
                    }
                }
            }
        }
    }
    if span.dim() < n {
        return Err(Error::UnsupportedShape(
            "algebra is not generated by its degree-1 part".into(),
        ));
    }
    let v = Matrix::from_columns(values.iter().map(|s| to_dense(s, n)).collect())?;
    let inverse = inverse(&v)?;
    Ok(WordBasis {
        words,
        values,
        inverse,
    })
}

fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.rows();
    let mut aug = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = m.row(r).to_vec();
        row.extend(unit_vector(n, r));
        aug.push(row);
    }
    let e = Matrix::from_rows(aug)?.rref();
    if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
        return Err(Error::Internal("word values are not a basis".into()));
    }
    Matrix::from_rows(e.rows.iter().map(|r| r[n..].to_vec()).collect())
}

fn eval_words(a: &Algebra, words: &[Word], gens: &[SparseVec]) -> Vec<SparseVec> {
    let mut vals: Vec<SparseVec> = Vec::with_capacity(words.len());
    for w in words {
        let v = match *w {
            Word::Gen(r) => gens[r].clone(),
            Word::Mul(x, y) => a.multiply_sparse(&vals[x], &vals[y]),
        };
        vals.push(v);
    }
    vals
}

/// Columns are `φ(e_k)` in `src` coordinates.
fn candidate_map(src: &Algebra, dst: &Algebra, bc: &BaseChange) -> Result<Matrix> {
    let sg = supported_generators(src)?;
    let dg = supported_generators(dst)?;
    if sg.len() != dg.len() || bc.dim() != sg.len() {
        return Err(Error::DimensionMismatch {
            expected: sg.len(),
            got: if sg.len() != dg.len() {
                dg.len()
            } else {
                bc.dim()
            },
        });
    }
    if src.dim() != dst.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            got: dst.dim(),
        });
    }
    if bc.determinant().is_zero() {
        return Err(Error::SingularBaseChange);
    }
    let n = dst.dim();
    let wb = word_basis(dst, &unit_gens(&dg))?;
    let new_gens: Vec<SparseVec> = bc
        .matrix
        .iter()
        .map(|row| {
            sg.iter()
                .zip(row)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&g, c)| (g, c.clone()))
                .collect()
        })
        .collect();
    let vals = eval_words(src, &wb.words, &new_gens);
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = SparseVec::new();
        for (m, v) in vals.iter().enumerate() {
            let c = wb.inverse.get(m, k);
            if c.is_zero() {
                continue;
            }
            for (&i, x) in v {
                let e = acc.entry(i).or_insert_with(Scalar::zero);
                *e = &*e + &(c * x);
            }
        }
        cols.push(to_dense(&acc, n));
    }
    Matrix::from_columns(cols)
}

/// A product of `dst` not reproduced by the new basis of `src`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: (usize, usize),
    /// `φ(e_i ∘ e_j)` expressed back in `dst` coordinates would be the table
    /// entry; these are both sides inside `src`.
    pub expected: Vector,
    pub got: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Map(Matrix),
    /// Violated products in lexicographic pair order; the first is `violations[0]`.
    Violations(Vec<Violation>),
}

/// Differences `φ(e_i)∘φ(e_j) − φ(e_i∘e_j)` for every pair of `dst`.
fn homomorphism_defects(src: &Algebra, dst: &Algebra, map: &Matrix) -> Vec<Violation> {
    let n = dst.dim();
    let images: Vec<SparseVec> = (0..n).map(|k| to_sparse(&map.column(k))).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let got = src.multiply_sparse(&images[i], &images[j]);
            let mut expected = SparseVec::new();
            if let Some(p) = dst.product(i, j) {
                for (&k, c) in p {
                    for (&t, x) in &images[k] {
                        let e = expected.entry(t).or_insert_with(Scalar::zero);
                        *e = &*e + &(c * x);
                    }
                }
            }
            let (g, e) = (to_dense(&got, n), to_dense(&expected, n));
            if !is_zero_vector(&sub_vectors(&g, &e)) {
                out.push(Violation {
                    pair: (i, j),
                    expected: e,
                    got: g,
                });
            }
        }
    }
    out
}

pub fn extend_base_change(src: &Algebra, dst: &Algebra, bc: &BaseChange) -> Result<Extension> {
    let map = candidate_map(src, dst, bc)?;
    let violations = homomorphism_defects(src, dst, &map);
    if !violations.is_empty() {
        return Ok(Extension::Violations(violations));
    }
    let rank = map.rank();
    if rank < dst.dim() {
        return Err(Error::NotBijective {
            rank,
            dim: dst.dim(),
        });
    }
    Ok(Extension::Map(map))
}

/// Check independently of the word construction that `map` is a bijective
/// homomorphism `dst → src`.
pub fn verify_isomorphism(src: &Algebra, dst: &Algebra, map: &Matrix) -> bool {
    let n = dst.dim();
    if src.dim() != n || map.rows() != n || map.cols() != n {
        return false;
    }
    if map.determinant().map_or(true, |d| d.is_zero()) {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = src
                .multiply(&map.column(i), &map.column(j))
                .expect("dimensions checked");
            let rhs = map
                .mul_vector(&dst.basis_product(i, j))
                .expect("dimensions checked");
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// The algebra `src` rewritten in a word basis of the generators given by `bc`;
/// isomorphic to `src`. Labels are kept but no longer carry their grading meaning.
pub fn transport(src: &Algebra, bc: &BaseChange) -> Result<Algebra> {
    let gens = supported_generators(src)?;
    if bc.dim() != gens.len() {
        return Err(Error::DimensionMismatch {
            expected: gens.len(),
            got: bc.dim(),
        });
    }
    if bc.determinant().is_zero() {
        return Err(Error::SingularBaseChange);
    }
    let n = src.dim();
    let new_gens: Vec<SparseVec> = bc
        .matrix
        .iter()
        .map(|row| {
            gens.iter()
                .zip(row)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&g, c)| (g, c.clone()))
                .collect()
        })
        .collect();
    let wb = word_basis(src, &new_gens)?;
    let p = Matrix::from_columns(wb.values.iter().map(|v| to_dense(v, n)).collect())?;
    let pinv = inverse(&p).map_err(|_| Error::SingularBaseChange)?;
    let mut out = Algebra::new(src.labels().to_vec(), src.params().to_vec())?;
    for i in 0..n {
        for j in 0..n {
            let prod = src.multiply(&p.column(i), &p.column(j))?;
            let coords = pinv.mul_vector(&prod)?;
            out.set_product(i, j, to_sparse(&coords))?;
        }
    }
    Ok(out)
}

/// Isomorphism invariants used to separate algebras before searching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub series_dims: Vec<usize>,
    pub char_sequence: Vec<usize>,
    /// Longest `x, x∘x, ...` chain over sampled degree-1 elements.
    pub max_chain: usize,
    /// `dim span{x∘x : x in degree 1}` modulo `A³`.
    pub square_rank: usize,
    /// Degree of the gcd of the coordinate forms of `x ↦ x∘x` on degree 1.
    pub square_gcd_degree: u32,
    pub left_annihilator: usize,
    pub right_annihilator: usize,
    pub annihilator: usize,
}

impl Fingerprint {
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("series dims", format!("{:?}", self.series_dims)),
            (
                "characteristic sequence",
                format!("{:?}", self.char_sequence),
            ),
            ("max chain length", self.max_chain.to_string()),
            ("squaring rank on degree 1", self.square_rank.to_string()),
            ("squaring gcd degree", self.square_gcd_degree.to_string()),
            ("left annihilator dim", self.left_annihilator.to_string()),
            ("right annihilator dim", self.right_annihilator.to_string()),
            ("two-sided annihilator dim", self.annihilator.to_string()),
        ]
    }
}

fn annihilator_dims(a: &Algebra) -> (usize, usize, usize) {
    let n = a.dim();
    // x ∈ left ann ⇔ Σ_i x_i c_{ij}^k = 0 for all j, k
    let mut left_rows = Vec::new();
    let mut right_rows = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let l: Vector = (0..n).map(|i| coeff(a, i, j, k)).collect();
            let r: Vector = (0..n).map(|i| coeff(a, j, i, k)).collect();
            if !is_zero_vector(&l) {
                left_rows.push(l);
            }
            if !is_zero_vector(&r) {
                right_rows.push(r);
            }
        }
    }
    let rank = |rows: &[Vector]| {
        if rows.is_empty() {
            0
        } else {
            Matrix::from_rows(rows.to_vec())
                .expect("rectangular")
                .rank()
        }
    };
    let both: Vec<Vector> = left_rows.iter().chain(&right_rows).cloned().collect();
    (n - rank(&left_rows), n - rank(&right_rows), n - rank(&both))
}

fn coeff(a: &Algebra, i: usize, j: usize, k: usize) -> Scalar {
    a.product(i, j)
        .and_then(|v| v.get(&k).cloned())
        .unwrap_or_else(Scalar::zero)
}

fn squaring_invariants(a: &Algebra, gens: &[usize]) -> (usize, u32) {
    let n = a.dim();
    let names: Vec<String> = (0..gens.len()).map(|r| format!("x{r}")).collect();
    let mut x = vec![Scalar::zero(); n];
    for (r, &g) in gens.iter().enumerate() {
        x[g] = Scalar::param(&names[r]);
    }
    let sq = a.multiply(&x, &x).expect("dimension");
    let series = a.lower_series();
    let cube = series.get(2).cloned().unwrap_or_else(|| Subspace::zero(n));
    let reduced = cube.reduce(&sq);
    let forms: Vec<Poly> = reduced
        .iter()
        .filter(|c| !c.is_zero())
        .map(Scalar::numerator)
        .collect();
    // rank: dimension of the span of the quadratic forms' coefficient vectors
    let mut monos = BTreeMap::new();
    let mut rows = Vec::new();
    for f in &forms {
        let mut row = BTreeMap::new();
        for (m, c) in f.terms() {
            let next = monos.len();
            let idx = *monos.entry(m.clone()).or_insert(next);
            row.insert(idx, c.clone());
        }
        rows.push(row);
    }
    let width = monos.len();
    let rank = if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    (0..width)
                        .map(|k| r.get(&k).cloned().map(Scalar::from).unwrap_or_default())
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular")
        .rank()
    };
    let gcd_degree = match forms.split_first() {
        None => 0,
        Some((first, rest)) => {
            let g = rest.iter().fold(first.clone(), |g, f| Poly::gcd(&g, f));
            g.terms()
                .map(|(m, _)| names.iter().map(|v| m.degree_in(v)).sum::<u32>())
                .max()
                .unwrap_or(0)
        }
    };
    (rank, gcd_degree)
}

pub fn fingerprint(a: &Algebra) -> Result<Fingerprint> {
    let series = a.lower_series();
    if !series.last().is_some_and(Subspace::is_zero) {
        return Err(Error::NotNilpotent {
            stable_dim: series.last().map_or(0, Subspace::dim),
        });
    }
    let gens = generators(a);
    let strategy = Strategy::grid(3);
    let cs = char_sequence(a, &strategy)?;
    let mut max_chain = chain_length(a, &cs.witness)?;
    // generic chain length, sampled on the integer grid [-3, 3]^d of degree 1
    let d = gens.len() as u32;
    let samples = if d <= 3 { 7i64.pow(d) } else { 0 };
    for code in 0..samples {
        let mut x = vec![Scalar::zero(); a.dim()];
        let mut c = code;
        for &g in &gens {
            x[g] = Scalar::from_int(c % 7 - 3);
            c /= 7;
        }
        max_chain = max_chain.max(chain_length(a, &x)?);
    }
    let (square_rank, square_gcd_degree) = squaring_invariants(a, &gens);
    let (left_annihilator, right_annihilator, annihilator) = annihilator_dims(a);
    Ok(Fingerprint {
        series_dims: series.iter().map(Subspace::dim).collect(),
        char_sequence: cs.partition,
        max_chain,
        square_rank,
        square_gcd_degree,
        left_annihilator,
        right_annihilator,
        annihilator,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Height of the rational grid used when no exact step applies.
    pub height: u32,
    /// Maximum number of search-tree nodes.
    pub max_nodes: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            height: 6,
            max_nodes: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustedReport {
    /// Nonzero polynomial equations in `A, B, C, D` from the homomorphism condition.
    pub residual_system: Vec<Poly>,
    pub nodes: usize,
    /// True when the tree closed using only exact steps (no grid sampling,
    /// no budget cut), so no base change of this shape exists at all.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Yes {
        change: BaseChange,
        map: Matrix,
    },
    No {
        invariant: String,
        left: String,
        right: String,
    },
    Exhausted(ExhaustedReport),
}

impl IsoOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, IsoOutcome::Yes { .. })
    }
}

fn scalar_poly(s: &Scalar) -> Poly {
    s.as_poly().unwrap_or_else(|| s.numerator())
}

/// Rationals of height ≤ h in the order 0, 1, −1, 2, −2, 1/2, −1/2, 3, ...
pub fn rational_grid(h: u32) -> Vec<Rational> {
    let mut out = vec![rat(0, 1)];
    for m in 1..=h as i64 {
        let mut level = Vec::new();
        for q in 1..=m {
            for p in 0..=m {
                if p.max(q) != m || num_integer::gcd(p, q) != 1 || p == 0 {
                    continue;
                }
                level.push(rat(p, q));
            }
        }
        level.sort_by(|x, y| y.cmp(x));
        for r in level {
            out.push(r.clone());
            out.push(-r);
        }
    }
    out
}

struct Solver<'a> {
    bounds: &'a SearchBounds,
    vars: Vec<String>,
    nodes: usize,
    approximate: bool,
    on_solution: &'a mut dyn FnMut(&Assignment) -> bool,
}

#[derive(Clone)]
struct State {
    eqs: Vec<Poly>,
    det: Poly,
    subs: Vec<(String, Poly)>,
}

impl State {
    fn substitute(&self, var: &str, value: &Poly) -> State {
        let mut eqs: Vec<Poly> = self
            .eqs
            .iter()
            .map(|p| p.substitute(var, value))
            .filter(|p| !p.is_zero())
            .collect();
        eqs.sort();
        eqs.dedup();
        let mut subs = self.subs.clone();
        subs.push((var.to_string(), value.clone()));
        State {
            eqs,
            det: self.det.substitute(var, value),
            subs,
        }
    }
}

impl Solver<'_> {
    /// Returns true to stop the search.
    fn run(&mut self, s: State) -> bool {
        self.nodes += 1;
        if self.nodes > self.bounds.max_nodes {
            self.approximate = true;
            return true;
        }
        if s.det.is_zero() || s.eqs.iter().any(Poly::is_constant) {
            return false;
        }
        if s.eqs.is_empty() {
            return self.finish(&s);
        }
        // linear step: var with a rational coefficient
        for p in &s.eqs {
            for v in p.vars() {
                if p.degree_in(&v) != 1 {
                    continue;
                }
                let cs = p.coefficients_in(&v);
                if let Some(c1) = cs[1].as_constant() {
                    let value = cs[0].scale(&(-c1.recip()));
                    return self.run(s.substitute(&v, &value));
                }
            }
        }
        // monomial factor: branch on each variable vanishing, else divide it out
        for (idx, p) in s.eqs.iter().enumerate() {
            let m = p.monomial_content();
            if m.is_one() {
                continue;
            }
            for (v, _) in m.factors() {
                if self.run(s.substitute(v, &Poly::zero())) {
                    return true;
                }
            }
            let mut t = s.clone();
            t.eqs[idx] = p
                .div_exact(&Poly::term(rat(1, 1), m.clone()))
                .expect("content divides");
            return self.run(t);
        }
        // univariate: exact rational roots
        for p in &s.eqs {
            let vs = p.vars();
            if vs.len() == 1 {
                let v = vs.into_iter().next().expect("one var");
                for r in p.rational_roots(&v) {
                    if self.run(s.substitute(&v, &Poly::constant(r))) {
                        return true;
                    }
                }
                return false;
            }
        }
        // grid on the first remaining variable
        self.approximate = true;
        let v = s
            .eqs
            .iter()
            .flat_map(|p| p.vars())
            .min()
            .expect("nonconstant equation");
        for r in rational_grid(self.bounds.height) {
            if self.run(s.substitute(&v, &Poly::constant(r))) {
                return true;
            }
        }
        false
    }

    fn finish(&mut self, s: &State) -> bool {
        let bound: std::collections::BTreeSet<&str> =
            s.subs.iter().map(|(v, _)| v.as_str()).collect();
        let free: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !bound.contains(v.as_str()))
            .cloned()
            .collect();
        // identity values first, then small grid values
        let identity = |v: &str| match v {
            "A" | "D" => rat(1, 1),
            _ => rat(0, 1),
        };
        let grid = rational_grid(2);
        let mut choices: Vec<Assignment> =
            vec![free.iter().map(|v| (v.clone(), identity(v))).collect()];
        let mut idx = vec![0usize; free.len()];
        'grid: loop {
            choices.push(
                free.iter()
                    .zip(&idx)
                    .map(|(v, &i)| (v.clone(), grid[i].clone()))
                    .collect(),
            );
            let mut k = free.len();
            loop {
                if k == 0 {
                    break 'grid;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < grid.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        for mut asg in choices {
            for (v, e) in s.subs.iter().rev() {
                let Ok(x) = e.eval(&asg) else { break };
                asg.insert(v.clone(), x);
            }
            if self.vars.iter().any(|v| !asg.contains_key(v)) {
                continue;
            }
            if (self.on_solution)(&asg) {
                return true;
            }
        }
        false
    }
}

/// Search for a base change making the new basis of `a1` reproduce `a2`.
pub fn iso_search(a1: &Algebra, a2: &Algebra, bounds: &SearchBounds) -> Result<IsoOutcome> {
    for a in [a1, a2] {
        if !a.params().is_empty() {
            return Err(Error::UnsupportedShape(format!(
                "parametric algebra (params {:?}); specialise before searching",
                a.params()
            )));
        }
    }
    let g1 = supported_generators(a1)?;
    supported_generators(a2)?;
    let f1 = fingerprint(a1)?;
    let f2 = fingerprint(a2)?;
    for ((name, l), (_, r)) in f1.entries().into_iter().zip(f2.entries()) {
        if l != r {
            return Ok(IsoOutcome::No {
                invariant: name.to_string(),
                left: l,
                right: r,
            });
        }
    }
    let d = g1.len();
    let verified = |bc: &BaseChange| -> Option<Matrix> {
        match extend_base_change(a1, a2, bc) {
            Ok(Extension::Map(m)) if verify_isomorphism(a1, a2, &m) => Some(m),
            _ => None,
        }
    };
    let id = BaseChange::identity(d);
    if let Some(map) = verified(&id) {
        return Ok(IsoOutcome::Yes { change: id, map });
    }
    let sym = BaseChange::symbolic(d);
    let map = candidate_map(a1, a2, &sym)?;
    let mut eqs: Vec<Poly> = homomorphism_defects(a1, a2, &map)
        .iter()
        .flat_map(|v| sub_vectors(&v.got, &v.expected))
        .filter(|c| !c.is_zero())
        .map(|c| scalar_poly(&c))
        .map(|p| p.monic())
        .collect();
    eqs.sort();
    eqs.dedup();
    let residual_system = eqs.clone();
    let mut found = None;
    let vars: Vec<String> = VARIABLES[..if d == 1 { 1 } else { 4 }]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut on_solution = |asg: &Assignment| -> bool {
        let Ok(bc) = sym.specialize(asg) else {
            return false;
        };
        if bc.determinant().is_zero() {
            return false;
        }
        match verified(&bc) {
            Some(m) => {
                found = Some((bc, m));
                true
            }
            None => false,
        }
    };
    let mut solver = Solver {
        bounds,
        vars,
        nodes: 0,
        approximate: false,
        on_solution: &mut on_solution,
    };
    solver.run(State {
        eqs,
        det: scalar_poly(&sym.determinant()),
        subs: Vec::new(),
    });
    let (nodes, approximate) = (solver.nodes, solver.approximate);
    if let Some((change, map)) = found {
        return Ok(IsoOutcome::Yes { change, map });
    }
    Ok(IsoOutcome::Exhausted(ExhaustedReport {
        residual_system,
        nodes,
        complete: !approximate,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, null_filiform, FamilyId, FamilyParams};

    #[test]
    fn grid_order() {
        let g = rational_grid(2);
        assert_eq!(
            g[..5],
            [rat(0, 1), rat(1, 1), rat(-1, 1), rat(2, 1), rat(-2, 1)]
        );
        assert!(g.contains(&rat(1, 2)));
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn identity_extension() {
        let a = build(FamilyId::A3, &FamilyParams::new(8, 3)).unwrap();
        match extend_base_change(&a, &a, &BaseChange::identity(2)).unwrap() {
            Extension::Map(m) => assert_eq!(m, Matrix::identity(8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_change_rejected() {
        let a = build(FamilyId::A3, &FamilyParams::new(8, 3)).unwrap();
        let bc = BaseChange::two(1.into(), 1.into(), 1.into(), 1.into());
        assert_eq!(
            extend_base_change(&a, &a, &bc),
            Err(Error::SingularBaseChange)
        );
    }

    #[test]
    fn null_filiform_rescaling() {
        let a = null_filiform(5).unwrap();
        let out = iso_search(
            &a,
            &transport(&a, &BaseChange::one(Scalar::from_int(3))).unwrap(),
            &SearchBounds::default(),
        )
        .unwrap();
        assert!(out.is_yes());
    }

    #[test]
    fn fingerprint_basics() {
        let nf = null_filiform(5).unwrap();
        assert_eq!(
            fingerprint(&nf).unwrap().series_dims,
            vec![5, 4, 3, 2, 1, 0]
        );
        let ab = Algebra::abelian(3).unwrap();
        let f = fingerprint(&ab).unwrap();
        assert_eq!(f.char_sequence, vec![1, 1, 1]);
        assert_eq!(f.annihilator, 3);
    }

    #[test]
    fn too_many_generators() {
        let ab = Algebra::abelian(3).unwrap();
        assert!(matches!(
            iso_search(&ab, &ab, &SearchBounds::default()),
            Err(Error::UnsupportedShape(_))
        ));
    }

    fn scaled_product(a: &Algebra, x: &str, y: &str, lambda: i64) -> Algebra {
        let mut b = a.clone();
        let (i, j) = (a.index_of(x).unwrap(), a.index_of(y).unwrap());
        let v: SparseVec = a
            .product(i, j)
            .unwrap()
            .iter()
            .map(|(&k, c)| (k, c * &Scalar::from_int(lambda)))
            .collect();
        b.set_product(i, j, v).unwrap();
        b
    }

    #[test]
    fn a2_precursor_is_rescaled() {
        let a2 = build(FamilyId::A2, &FamilyParams::new(8, 3)).unwrap();
        let pre = scaled_product(&a2, "f1", "f2", 2);
        assert!(pre.is_zinbiel());
        match iso_search(&pre, &a2, &SearchBounds::default()).unwrap() {
            IsoOutcome::Yes { change, map } => {
                assert!(verify_isomorphism(&pre, &a2, &map));
                assert!(!change.determinant().is_zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transported_table_is_found() {
        let a = build(FamilyId::A3, &FamilyParams::new(8, 3)).unwrap();
        let bc = BaseChange::two(2.into(), 1.into(), 0.into(), 3.into());
        let b = transport(&a, &bc).unwrap();
        assert!(b.is_zinbiel());
        assert_eq!(fingerprint(&a).unwrap(), fingerprint(&b).unwrap());
        assert!(iso_search(&a, &b, &SearchBounds::default())
            .unwrap()
            .is_yes());
    }

    #[test]
    fn a1_zero_is_not_a3() {
        let a1 = build(FamilyId::A1, &FamilyParams::new(8, 3).beta1(0)).unwrap();
        let a3 = build(FamilyId::A3, &FamilyParams::new(8, 3)).unwrap();
        match extend_base_change(&a1, &a3, &BaseChange::identity(2)).unwrap() {
            Extension::Violations(v) => {
                let f1 = a3.index_of("f1").unwrap();
                assert!(v.iter().any(|x| x.pair == (f1, f1)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            iso_search(&a1, &a3, &SearchBounds::default()).unwrap(),
            IsoOutcome::No { .. }
        ));
    }

    #[test]
    fn a12_is_not_a11() {
        let a12 = build(FamilyId::A12, &FamilyParams::new(6, 3)).unwrap();
        let a11 = build(FamilyId::A11, &FamilyParams::new(6, 3)).unwrap();
        let out = iso_search(&a12, &a11, &SearchBounds::default()).unwrap();
        assert!(!out.is_yes(), "{out:?}");
    }
}
