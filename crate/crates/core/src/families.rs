//! Constructors for the classified algebras and the small fixtures.
//!
//! Type I bases are `e1..e_{n-p}, f1..f_p`; type II bases are
//! `e1..e_p, f1..f_{n-p}`. In both, `e1∘e_i = e_{i+1}` and `e1∘f_i = f_{i+1}`
//! along the chains, and the mixed products are
//!
//! ```text
//! e_i∘f_j = Σ_{k=0}^{i-1} C(i+j-2-k, j-1) β_k f_{i+j}
//! f_i∘e_j = Σ_{k=0}^{j}   C(i+j-2-k, i-2) β_k f_{i+j}    (f_1∘e_j = β_j f_{j+1})
//! ```
//!
//! The `f_1∘e_j` case is written out because the sum would need
//! `C(j-1, -1) = 1`, while [`binomial`] uses the zero convention.
//!
//! Two theorem statements for the type II families print a garbled
//! conjunction between "β_i = (−1)^i C(p−2, i) for 0 ≤ i ≤ p−2" and
//! "β_{p−1} = β_p = 0"; it is read as "and".

use std::fmt;
use std::str::FromStr;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    /// Four-dimensional algebra with characteristic sequence (3, 1).
    Ex31,
    /// Null-filiform algebra `e_i∘e_j = C(i+j-1, j) e_{i+j}`.
    Nf,
    /// Type II algebra at the boundary dimension `n = 3p+1`.
    W31,
}

use FamilyId::*;

impl FamilyId {
    pub const ALL: [FamilyId; 25] = [
        A1, A2, A3, A4, A5, A6, A7, A8, A9, A10, A11, A12, T1, T2, T3, T4, T5, T6, T7, T8, T9, T10,
        Ex31, Nf, W31,
    ];

    pub fn name(self) -> &'static str {
        match self {
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            A4 => "A4",
            A5 => "A5",
            A6 => "A6",
            A7 => "A7",
            A8 => "A8",
            A9 => "A9",
            A10 => "A10",
            A11 => "A11",
            A12 => "A12",
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            T4 => "T4",
            T5 => "T5",
            T6 => "T6",
            T7 => "T7",
            T8 => "T8",
            T9 => "T9",
            T10 => "T10",
            Ex31 => "EX31",
            Nf => "NF",
            W31 => "W31",
        }
    }

    pub fn kind(self) -> Option<Kind> {
        match self {
            A1 | A2 | A3 | A4 | A5 | A6 | A7 | A8 | A9 | A10 | A11 | A12 => Some(Kind::I),
            T1 | T2 | T3 | T4 | T5 | T6 | T7 | T8 | T9 | T10 | W31 => Some(Kind::II),
            Ex31 | Nf => None,
        }
    }

    /// Families whose β₁ is a free parameter.
    pub fn has_free_beta1(self) -> bool {
        matches!(self, A1 | A5 | A8)
    }

    /// Families whose β₁ ranges over a finite set of negative integers.
    pub fn has_finite_beta1(self) -> bool {
        matches!(self, T1 | T6 | T9)
    }

    /// Admissible dimensions for `p` (and `t` for T9/T10).
    pub fn dimension_rule(self, p: usize, t: usize) -> DimensionRule {
        match self {
            A1 | A2 | A3 => DimensionRule::AtLeast(2 * p + 2),
            A4 | A5 | A6 | A7 | T1 | T2 | T3 | T4 | T5 => DimensionRule::Exactly(2 * p + 1),
            A8 | A9 | A10 | A11 | A12 => DimensionRule::Exactly(2 * p),
            T6 | T7 | T8 => DimensionRule::Exactly(2 * p + 2),
            T9 | T10 => DimensionRule::Exactly(2 * p + t),
            W31 => DimensionRule::Exactly(3 * p + 1),
            Ex31 => DimensionRule::Exactly(4),
            Nf => DimensionRule::AtLeast(1),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyId> {
        let up = s.trim().to_ascii_uppercase();
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name() == up)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family `{s}`")))
    }
}

/// Type I: the long chain of `L_{e1}` comes first; type II: the short one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    I,
    II,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::I => "I",
            Kind::II => "II",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionRule {
    Exactly(usize),
    AtLeast(usize),
}

impl DimensionRule {
    pub fn admits(self, n: usize) -> bool {
        match self {
            DimensionRule::Exactly(m) => n == m,
            DimensionRule::AtLeast(m) => n >= m,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyParams {
    pub n: usize,
    pub p: usize,
    /// Only for T9/T10; derived as `n - 2p` when absent.
    pub t: Option<usize>,
    pub beta1: Option<Scalar>,
    pub gamma1: Option<Scalar>,
    pub delta1: Option<Scalar>,
    pub delta_pm1: Option<Scalar>,
}

impl FamilyParams {
    pub fn new(n: usize, p: usize) -> FamilyParams {
        FamilyParams {
            n,
            p,
            ..FamilyParams::default()
        }
    }

    pub fn beta1(mut self, b: impl Into<Scalar>) -> FamilyParams {
        self.beta1 = Some(b.into());
        self
    }

    pub fn gamma1(mut self, g: impl Into<Scalar>) -> FamilyParams {
        self.gamma1 = Some(g.into());
        self
    }

    pub fn delta1(mut self, d: impl Into<Scalar>) -> FamilyParams {
        self.delta1 = Some(d.into());
        self
    }

    pub fn delta_pm1(mut self, d: impl Into<Scalar>) -> FamilyParams {
        self.delta_pm1 = Some(d.into());
        self
    }

    pub fn t(mut self, t: usize) -> FamilyParams {
        self.t = Some(t);
        self
    }
}

/// Index bounds of the shared formulas: `e∘e` for `2 ≤ i+j ≤ ee_max`,
/// mixed (and full `f∘f`) products for `2 ≤ i+j ≤ mix_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ranges {
    pub ee_max: usize,
    pub mix_max: usize,
}

pub fn ranges(id: FamilyId, n: usize, p: usize) -> Ranges {
    match id.kind() {
        // e-chain has length n-p; mixed products live on the f-chain of length p
        Some(Kind::I) => Ranges {
            ee_max: n - p,
            mix_max: p,
        },
        Some(Kind::II) => Ranges {
            ee_max: p,
            mix_max: n - p,
        },
        None => Ranges {
            ee_max: n,
            mix_max: 0,
        },
    }
}

/// `β_0 = 1`, `β_{i+1} = Π_{k=0}^{i} (k+β₁)/(k+1)`; returns `β_0..β_{length-1}`.
/// The recurrence does not involve `p`; it is taken for uniformity with
/// the family constructors.
pub fn beta_sequence(_p: usize, beta1: &Scalar, length: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(length);
    let mut acc = Scalar::one();
    for i in 0..length {
        out.push(acc.clone());
        let factor = (&Scalar::from_int(i as i64) + beta1)
            * Scalar::from(crate::scalar::rat(1, i as i64 + 1));
        acc = &acc * &factor;
    }
    out
}

/// `β_i = (−1)^i C(m, i)` for `i < length`, with the listed entries forced to zero.
pub fn closed_betas(m: usize, length: usize, zero: &[usize]) -> Vec<Scalar> {
    (0..length)
        .map(|i| {
            if zero.contains(&i) {
                return Scalar::zero();
            }
            let c = Scalar::from(binom(m, i));
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

fn binom(a: usize, b: usize) -> crate::scalar::Rational {
    binomial(a as i64, b as i64).expect("nonnegative top index")
}

fn c(a: usize, b: usize) -> Scalar {
    Scalar::from(binom(a, b))
}

/// Coefficient of `f_{i+j}` in `e_i∘f_j`.
pub fn ef_coefficient(i: usize, j: usize, betas: &[Scalar]) -> Scalar {
    (0..i)
        .map(|k| {
            &Scalar::from(binomial((i + j) as i64 - 2 - k as i64, j as i64 - 1).expect("top ≥ 0"))
                * &betas[k]
        })
        .sum()
}

/// Coefficient of `f_{i+j}` in `f_i∘e_j`.
pub fn fe_coefficient(i: usize, j: usize, betas: &[Scalar]) -> Scalar {
    if i == 1 {
        return betas[j].clone();
    }
    (0..=j)
        .map(|k| {
            &Scalar::from(binomial((i + j) as i64 - 2 - k as i64, i as i64 - 2).expect("top ≥ 0"))
                * &betas[k]
        })
        .sum()
}

/// How a family fills its mixed products.
enum Mixed {
    /// The β-sums above.
    Sums(Vec<Scalar>),
    /// `e_i∘f_j = f_i∘e_j = C(i+j-1, j) f_{i+j}` (the β ≡ 1 case written directly).
    Binomial,
}

struct Blueprint {
    mixed: Mixed,
    full_ff: bool,
    params: Vec<String>,
}

fn labels(ne: usize, nf: usize) -> Vec<String> {
    (1..=ne)
        .map(|i| format!("e{i}"))
        .chain((1..=nf).map(|i| format!("f{i}")))
        .collect()
}

fn param_or_symbol(v: &Option<Scalar>, name: &str, params: &mut Vec<String>) -> Scalar {
    match v {
        Some(s) => {
            for q in s.params() {
                if !params.contains(&q) {
                    params.push(q);
                }
            }
            s.clone()
        }
        None => {
            params.push(name.to_string());
            Scalar::param(name)
        }
    }
}

fn reject(field: &str, given: bool, id: FamilyId) -> Result<()> {
    if given {
        return Err(Error::InvalidParams(format!("{id} does not take {field}")));
    }
    Ok(())
}

fn integer_beta1(id: FamilyId, b: &Option<Scalar>, lo: i64, hi: i64) -> Result<Scalar> {
    let b = b.as_ref().ok_or_else(|| {
        Error::InvalidParams(format!("{id} requires beta1 in {{{lo}, ..., {hi}}}"))
    })?;
    let ok = b
        .as_rational()
        .filter(|r| crate::scalar::is_integer(r))
        .and_then(|r| i64::try_from(r.to_integer()).ok())
        .filter(|v| (lo..=hi).contains(v));
    match ok {
        Some(_) => Ok(b.clone()),
        None => Err(Error::InvalidParams(format!(
            "{id} requires an integer beta1 in {{{lo}, ..., {hi}}}, got {b}"
        ))),
    }
}

fn validate(id: FamilyId, fp: &FamilyParams) -> Result<usize> {
    let (n, p) = (fp.n, fp.p);
    if !matches!(id, Ex31 | Nf) && p < 3 {
        return Err(Error::InvalidParams(format!(
            "{id} requires p ≥ 3, got {p}"
        )));
    }
    let mut t = 0;
    if matches!(id, T9 | T10) {
        t = match fp.t {
            Some(t) => t,
            None if n >= 2 * p => n - 2 * p,
            None => 0,
        };
        if !(3..=p + 1).contains(&t) {
            return Err(Error::InvalidParams(format!(
                "{id} requires 3 ≤ t ≤ p+1, got t = {t}"
            )));
        }
    } else if fp.t.is_some() {
        return Err(Error::InvalidParams(format!("{id} does not take t")));
    }
    let rule = id.dimension_rule(p, t);
    if !rule.admits(n) {
        let want = match rule {
            DimensionRule::Exactly(m) => format!("n = {m}"),
            DimensionRule::AtLeast(m) => format!("n ≥ {m}"),
        };
        return Err(Error::InvalidParams(format!(
            "{id} requires {want}, got n = {n}"
        )));
    }
    if !matches!(id, A7) {
        reject("gamma1", fp.gamma1.is_some(), id)?;
        reject("delta1", fp.delta1.is_some(), id)?;
    }
    if !matches!(id, A10) {
        reject("delta_pm1", fp.delta_pm1.is_some(), id)?;
    }
    if !(id.has_free_beta1() || id.has_finite_beta1()) {
        reject("beta1", fp.beta1.is_some(), id)?;
    }
    Ok(t)
}

/// Multiplication table of a family member.
pub fn build(id: FamilyId, fp: &FamilyParams) -> Result<Algebra> {
    let t = validate(id, fp)?;
    let (n, p) = (fp.n, fp.p);
    match id {
        Ex31 => return ex31(),
        Nf => return null_filiform(n),
        _ => {}
    }
    let kind = id.kind().expect("classified family");
    let r = ranges(id, n, p);
    let (ne, nf) = match kind {
        Kind::I => (n - p, p),
        Kind::II => (p, n - p),
    };
    // β_0..β_{p-1} for type I, β_0..β_p for type II
    let blen = match kind {
        Kind::I => p,
        Kind::II => p + 1,
    };
    let mut params = Vec::new();
    let bp = match id {
        A1 | A5 | A8 => {
            let b1 = param_or_symbol(&fp.beta1, "beta1", &mut params);
            Blueprint {
                mixed: Mixed::Sums(beta_sequence(p, &b1, blen)),
                full_ff: false,
                params,
            }
        }
        T1 | T6 => {
            let b1 = integer_beta1(id, &fp.beta1, -(p as i64), -1)?;
            sums(beta_sequence(p, &b1, blen))
        }
        T9 => {
            let b1 = integer_beta1(id, &fp.beta1, -(p as i64), -(t as i64 - 1))?;
            sums(beta_sequence(p, &b1, blen))
        }
        A2 => sums(closed_betas(p - 2, blen, &[])),
        A4 => sums(closed_betas(p - 1, blen, &[])),
        A6 | A9 | A10 => sums(closed_betas(p - 2, blen, &[p - 1])),
        T2 | T7 | T10 => sums(closed_betas(p - 2, blen, &[p - 1, p])),
        T3 => sums(closed_betas(p - 1, blen, &[p])),
        T8 | W31 => sums(closed_betas(p, blen, &[])),
        A3 | A12 | T5 => Blueprint {
            mixed: Mixed::Binomial,
            full_ff: true,
            params: Vec::new(),
        },
        A7 | A11 | T4 => Blueprint {
            mixed: Mixed::Binomial,
            full_ff: false,
            params: Vec::new(),
        },
        Ex31 | Nf => unreachable!(),
    };
    let mut params = bp.params;

    // A7 and A10 parameters are resolved before the algebra is created so
    // that their names are declared.
    let (g1, d1) = if id == A7 {
        (
            param_or_symbol(&fp.gamma1, "gamma1", &mut params),
            param_or_symbol(&fp.delta1, "delta1", &mut params),
        )
    } else {
        (Scalar::zero(), Scalar::zero())
    };
    let dpm1 = if id == A10 {
        param_or_symbol(&fp.delta_pm1, "delta_pm1", &mut params)
    } else {
        Scalar::zero()
    };
    params.sort();
    params.dedup();

    let mut a = Algebra::new(labels(ne, nf), params)?;
    let e = |i: usize| format!("e{i}");
    let f = |i: usize| format!("f{i}");

    for i in 1..=ne {
        for j in 1..=ne {
            if i + j <= r.ee_max.min(ne) {
                a.add(&e(i), &e(j), &e(i + j), c(i + j - 1, j))?;
            }
        }
    }
    let mix_top = r.mix_max.min(nf);
    for i in 1..=ne {
        for j in 1..=nf {
            if i + j <= mix_top {
                let coeff = match &bp.mixed {
                    Mixed::Sums(b) => ef_coefficient(i, j, b),
                    Mixed::Binomial => c(i + j - 1, j),
                };
                a.add(&e(i), &f(j), &f(i + j), coeff)?;
            }
        }
    }
    for i in 1..=nf {
        for j in 1..=ne {
            if i + j <= mix_top {
                let coeff = match &bp.mixed {
                    Mixed::Sums(b) => fe_coefficient(i, j, b),
                    Mixed::Binomial => c(i + j - 1, j),
                };
                a.add(&f(i), &e(j), &f(i + j), coeff)?;
            }
        }
    }
    if bp.full_ff {
        for i in 1..=nf {
            for j in 1..=nf {
                if i + j <= mix_top {
                    a.add(&f(i), &f(j), &f(i + j), c(i + j - 1, j))?;
                }
            }
        }
    }

    match id {
        A2 | A6 | A9 => a.add(&f(1), &f(p - 1), &f(p), Scalar::one())?,
        A4 => a.add(&f(1), &f(p), &e(p + 1), Scalar::one())?,
        A10 => {
            a.add(&f(1), &f(p - 1), &e(p), Scalar::one())?;
            a.add(&f(1), &f(p - 1), &f(p), dpm1)?;
        }
        T2 | T7 | T10 => a.add(&f(1), &f(p - 1), &e(p), Scalar::one())?,
        T3 => a.add(&f(1), &f(p), &f(p + 1), Scalar::one())?,
        T8 => a.add(&f(1), &f(p + 1), &f(p + 2), Scalar::one())?,
        A7 => {
            for i in 1..=p {
                for j in 1..=p {
                    let s = i + j;
                    if s <= p {
                        a.add(&f(i), &f(j), &e(s), &g1 * &c(s - 1, j))?;
                        a.add(&f(i), &f(j), &f(s), &d1 * &c(s - 1, j))?;
                    } else if s == p + 1 {
                        a.add(&f(i), &f(j), &e(p + 1), &g1 * &c(s - 1, j))?;
                    }
                }
            }
        }
        _ => {}
    }
    Ok(a)
}

fn sums(b: Vec<Scalar>) -> Blueprint {
    Blueprint {
        mixed: Mixed::Sums(b),
        full_ff: false,
        params: Vec::new(),
    }
}

/// `e1∘e2 = e3, e1∘e3 = e4, e2∘e1 = −e3`.
pub fn ex31() -> Result<Algebra> {
    let mut a = Algebra::with_dim(4)?;
    a.add("e1", "e2", "e3", Scalar::one())?;
    a.add("e1", "e3", "e4", Scalar::one())?;
    a.add("e2", "e1", "e3", Scalar::from_int(-1))?;
    Ok(a)
}

pub fn null_filiform(n: usize) -> Result<Algebra> {
    let mut a = Algebra::with_dim(n)?;
    for i in 1..=n {
        for j in 1..=n {
            if i + j <= n {
                a.add_term(i - 1, j - 1, i + j - 1, c(i + j - 1, j))?;
            }
        }
    }
    Ok(a)
}

/// Structure constants read back from an adapted basis.
struct Constants {
    kind: Kind,
    n: usize,
    p: usize,
    beta1: Scalar,
    alpha: Vec<Scalar>,
    beta: Vec<Scalar>,
    gamma: Vec<Scalar>,
    delta: Vec<Scalar>,
}

impl Constants {
    fn read(a: &Algebra, kind: Kind, p: usize) -> Result<Constants> {
        let n = a.dim();
        let (ne, nf) = match kind {
            Kind::I => (n - p, p),
            Kind::II => (p, n - p),
        };
        let idx = |l: String| {
            a.index_of(&l)
                .ok_or_else(|| Error::Internal(format!("missing basis vector {l}")))
        };
        let coeff = |x: String, y: String, z: String| -> Result<Scalar> {
            let (i, j, k) = (idx(x)?, idx(y)?, idx(z)?);
            Ok(a.product(i, j)
                .and_then(|v| v.get(&k).cloned())
                .unwrap_or_else(Scalar::zero))
        };
        let at = |v: &str, i: usize, top: usize| (i <= top).then(|| format!("{v}{i}"));
        let mut alpha = vec![Scalar::zero(); ne + 1];
        let mut beta = vec![Scalar::zero(); ne + 1];
        for i in 1..ne {
            if let Some(z) = at("e", i + 1, ne) {
                alpha[i] = coeff("f1".into(), format!("e{i}"), z)?;
            }
            if let Some(z) = at("f", i + 1, nf) {
                beta[i] = coeff("f1".into(), format!("e{i}"), z)?;
            }
        }
        if ne >= 1 && nf > ne {
            beta[ne] = coeff("f1".into(), format!("e{ne}"), format!("f{}", ne + 1))?;
        }
        beta[0] = Scalar::one();
        let mut gamma = vec![Scalar::zero(); nf + 2];
        let mut delta = vec![Scalar::zero(); nf + 2];
        for i in 1..=nf {
            if let Some(z) = at("e", i + 1, ne) {
                gamma[i] = coeff("f1".into(), format!("f{i}"), z)?;
            }
            if let Some(z) = at("f", i + 1, nf) {
                delta[i] = coeff("f1".into(), format!("f{i}"), z)?;
            }
        }
        Ok(Constants {
            kind,
            n,
            p,
            beta1: beta.get(1).cloned().unwrap_or_else(Scalar::zero),
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    fn g(&self, i: usize) -> Scalar {
        self.gamma.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    fn d(&self, i: usize) -> Scalar {
        self.delta.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    fn b(&self, i: usize) -> Scalar {
        self.beta.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    fn a(&self, i: usize) -> Scalar {
        self.alpha.get(i).cloned().unwrap_or_else(Scalar::zero)
    }
}

fn si(i: usize) -> Scalar {
    Scalar::from_int(i as i64)
}

/// `Σ_{k=2}^{i} x_k + 2 x_1`
fn weighted_prefix(x: impl Fn(usize) -> Scalar, i: usize) -> Scalar {
    let mut s = &si(2) * &x(1);
    for k in 2..=i {
        s = &s + &x(k);
    }
    s
}

fn push(out: &mut Vec<(String, Scalar)>, name: String, v: Scalar) {
    out.push((name, v));
}

fn common_residuals(k: &Constants, out: &mut Vec<(String, Scalar)>) {
    let (n, p) = (k.n, k.p);
    let b1 = &k.beta1;
    // ranges differ between the two types: (alpha, beta, gamma, delta) upper bounds
    let (a_top, b_top, g_top, d_top) = match k.kind {
        Kind::I => (n - p - 2, p - 2, n - p - 2, p - 2),
        Kind::II => (p - 2, p - 1, p - 2, n - p - 2),
    };
    for i in 1..=a_top {
        push(out, format!("alpha[{}]", i + 1), k.a(i + 1));
    }
    let seq = beta_sequence(p, b1, b_top + 2);
    for i in 1..=b_top {
        push(
            out,
            format!("beta_product[{}]", i + 1),
            &k.b(i + 1) - &seq[i + 1],
        );
    }
    for i in 1..=g_top {
        let lhs = &si(i + 1) * &k.g(i);
        let rhs = b1 * &weighted_prefix(|j| k.g(j), i);
        push(out, format!("gamma_relation[{i}]"), &lhs - &rhs);
    }
    for i in 1..=d_top {
        let lhs = &(&si(i) + b1) * &k.d(i);
        let rhs = b1 * &weighted_prefix(|j| k.d(j), i);
        push(out, format!("delta_relation[{i}]"), &lhs - &rhs);
    }
}

fn is_one(s: &Scalar) -> bool {
    s.is_one()
}

fn type_one_cases(k: &Constants, out: &mut Vec<(String, Scalar)>) {
    let (n, p) = (k.n, k.p);
    let b1 = &k.beta1;
    if is_one(b1) {
        for i in 1..p {
            push(out, format!("beta_unit[{i}]"), &k.b(i) - &Scalar::one());
        }
        let g_top = if n > 2 * p { p } else { p - 1 };
        for i in 1..=g_top {
            push(out, format!("gamma_constant[{i}]"), &k.g(i) - &k.g(1));
        }
        for i in 1..p {
            push(out, format!("delta_constant[{i}]"), &k.d(i) - &k.d(1));
        }
    } else if n > 2 * p {
        for i in 1..p {
            push(out, format!("gamma_zero[{i}]"), k.g(i));
        }
        for i in 1..=p - 2 {
            push(out, format!("delta_zero[{i}]"), k.d(i));
        }
        push(out, "gamma_top".into(), &(&si(p - 1) + b1) * &k.g(p));
        push(out, "delta_top".into(), &(&si(p - 2) + b1) * &k.d(p - 1));
    } else {
        for i in 1..=p - 2 {
            push(out, format!("gamma_zero[{i}]"), k.g(i));
            push(out, format!("delta_zero[{i}]"), k.d(i));
        }
        push(out, "gamma_top".into(), &(&si(p - 2) + b1) * &k.g(p - 1));
        push(out, "delta_top".into(), &(&si(p - 2) + b1) * &k.d(p - 1));
    }
    // (f1∘f_i)∘e1 = f1∘(f_i∘e1) + f1∘(e1∘f_i), compared on e_{i+2} and f_{i+2}
    for i in 1..=p.min(n - p - 2) {
        let v = &(&si(i + 1) * &k.g(i)) - &(&(&si(i) + b1) * &k.g(i + 1));
        push(out, format!("gamma_shift[{i}]"), v);
    }
    for i in 1..=p - 2 {
        let v = &(&si(i) + b1) * &(&k.d(i) - &k.d(i + 1));
        push(out, format!("delta_shift[{i}]"), v);
    }
}

fn type_two_cases(k: &Constants, out: &mut Vec<(String, Scalar)>) {
    let (n, p) = (k.n, k.p);
    let b1 = &k.beta1;
    let m = n - p;
    if is_one(b1) {
        for i in 1..=p {
            push(out, format!("beta_unit[{i}]"), &k.b(i) - &Scalar::one());
        }
        for i in 1..p {
            push(out, format!("gamma_constant[{i}]"), &k.g(i) - &k.g(1));
        }
        for i in 1..m {
            push(out, format!("delta_constant[{i}]"), &k.d(i) - &k.d(1));
        }
    } else {
        for i in 1..=p - 2 {
            push(out, format!("gamma_zero[{i}]"), k.g(i));
        }
        for i in 1..=m - 2 {
            push(out, format!("delta_zero[{i}]"), k.d(i));
        }
        push(out, "gamma_top".into(), &(&si(p - 2) + b1) * &k.g(p - 1));
        push(out, "delta_top".into(), &(&si(m - 2) + b1) * &k.d(m - 1));
    }
    // (e1∘e_p)∘f_i = 0 forces Σ_k C(p+i-1-k, i-1) β_k = 0 whenever f_{p+i+1} exists
    for i in 1..=n.saturating_sub(2 * p + 1) {
        let s: Scalar = (0..=p).map(|kk| &c(p + i - 1 - kk, i - 1) * &k.b(kk)).sum();
        push(out, format!("binomial_row[{i}]"), s);
    }
}

/// Residuals of the structure-constant restrictions on an adapted-basis
/// algebra of the given type. Every entry should be zero.
pub fn residuals_of(a: &Algebra, kind: Kind, p: usize) -> Result<Vec<(String, Scalar)>> {
    let n = a.dim();
    if p < 3 || n < 2 * p {
        return Err(Error::InvalidParams(format!(
            "restrictions need p ≥ 3 and n ≥ 2p, got n = {n}, p = {p}"
        )));
    }
    let k = Constants::read(a, kind, p)?;
    let mut out = Vec::new();
    common_residuals(&k, &mut out);
    match kind {
        Kind::I => type_one_cases(&k, &mut out),
        Kind::II => type_two_cases(&k, &mut out),
    }
    Ok(out)
}

pub fn restriction_residuals(id: FamilyId, fp: &FamilyParams) -> Result<Vec<(String, Scalar)>> {
    let kind = id
        .kind()
        .ok_or_else(|| Error::InvalidParams(format!("{id} has no restriction system")))?;
    let a = build(id, fp)?;
    residuals_of(&a, kind, fp.p)
}
