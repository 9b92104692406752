//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are identified by name. Monomials are ordered lexicographically
//! with the alphabetically smallest variable most significant; the leading
//! term of a polynomial is its largest monomial in that order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

pub type Param = Arc<str>;

/// A power product of named variables. Exponents are strictly positive and
/// the factors are sorted by variable name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Param, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v.as_ref() == var)
            .map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => {
                        out.push((va.clone(), *ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb.clone(), *eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va.clone(), ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(x), None) => {
                    out.push((*x).clone());
                    a.next();
                }
                (None, Some(y)) => {
                    out.push((*y).clone());
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let d = other.0[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - d)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Greatest common divisor of two monomials.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let d = other.degree_in(v);
            if d > 0 {
                out.push((v.clone(), (*e).min(d)));
            }
        }
        Monomial(out)
    }

    fn without(&self, var: &str) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter(|(v, _)| v.as_ref() != var)
                .cloned()
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // `self` has a positive power of a more significant variable.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(name: &str) -> Self {
        Poly::term(Rational::one(), Monomial::var(name))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value of a polynomial without variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn vars(&self) -> BTreeSet<Param> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, var: &str) -> bool {
        self.terms.keys().any(|m| m.degree_in(var) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(var))
            .max()
            .unwrap_or(0)
    }

    /// Leading monomial and coefficient (largest monomial in lex order).
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading()
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Rational, mono: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.mul(mono), k * c))
                .collect(),
        }
    }

    fn add_term_mut(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term_mut(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term_mut(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term_mut(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Divide by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            r = r.sub(&divisor.mul_term(&c, &m));
            q.add_term_mut(m, c);
        }
        Some(q)
    }

    /// Coefficients with respect to `var`: entry `d` is the coefficient of `var^d`.
    pub fn coefficients_in(&self, var: &str) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let d = m.degree_in(var) as usize;
            out[d].add_term_mut(m.without(var), c.clone());
        }
        out
    }

    pub fn from_coefficients_in(var: &str, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (d, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let xd = Monomial(if d == 0 {
                Vec::new()
            } else {
                vec![(Arc::from(var), d as u32)]
            });
            for (m, k) in &c.terms {
                out.add_term_mut(m.mul(&xd), k.clone());
            }
        }
        out
    }

    /// Replace `var` by `value` (a polynomial in any variables).
    pub fn substitute(&self, var: &str, value: &Poly) -> Poly {
        if !self.contains_var(var) {
            return self.clone();
        }
        let coeffs = self.coefficients_in(var);
        // Horner evaluation.
        let mut out = Poly::zero();
        for c in coeffs.iter().rev() {
            out = out.mul(value).add(c);
        }
        out
    }

    /// Evaluate at a complete assignment.
    pub fn eval(&self, assignment: &BTreeMap<String, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = assignment
                    .get(v.as_ref())
                    .ok_or_else(|| Error::MissingParameter(v.to_string()))?;
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitute the variables present in `assignment`, keep the others.
    pub fn specialize(&self, assignment: &BTreeMap<String, Rational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match assignment.get(v.as_ref()) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), *e as usize),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term_mut(Monomial(rest), coeff);
        }
        out
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    /// Monic greatest common divisor over the rationals.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        let var = {
            let va = a.vars();
            let vb = b.vars();
            va.union(&vb)
                .next()
                .cloned()
                .expect("non-constant polynomial has a variable")
        };
        if !a.contains_var(&var) {
            return Poly::gcd(a, &b.content_in(&var));
        }
        if !b.contains_var(&var) {
            return Poly::gcd(&a.content_in(&var), b);
        }
        let ca = a.content_in(&var);
        let cb = b.content_in(&var);
        let c = Poly::gcd(&ca, &cb);
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let (mut p0, mut p1) = if pa.degree_in(&var) >= pb.degree_in(&var) {
            (pa, pb)
        } else {
            (pb, pa)
        };
        let g = loop {
            let r = pseudo_remainder(&p0, &p1, &var);
            if r.is_zero() {
                break p1;
            }
            if !r.contains_var(&var) {
                break Poly::one();
            }
            p0 = p1;
            p1 = r.primitive_in(&var);
        };
        c.mul(&g.primitive_in(&var)).monic()
    }

    /// gcd of the coefficients with respect to `var`.
    pub fn content_in(&self, var: &str) -> Poly {
        let mut g = Poly::zero();
        for c in self.coefficients_in(var) {
            if c.is_zero() {
                continue;
            }
            g = Poly::gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, var: &str) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    /// Rational roots of a univariate polynomial in `var` (ascending, no multiplicity).
    pub fn rational_roots(&self, var: &str) -> Vec<Rational> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let coeffs: Vec<Rational> = self
            .coefficients_in(var)
            .into_iter()
            .map(|c| c.as_constant().expect("univariate polynomial"))
            .collect();
        if coeffs.iter().all(Zero::is_zero) {
            return Vec::new();
        }
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut roots = Vec::new();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap();
        if low > 0 {
            roots.push(Rational::zero());
        }
        let ints = &ints[low..];
        if ints.len() > 1 {
            let a0 = ints[0].abs();
            let an = ints[ints.len() - 1].abs();
            let (Some(ps), Some(qs)) = (small_divisors(&a0), small_divisors(&an)) else {
                return roots;
            };
            let mut cands: BTreeSet<Rational> = BTreeSet::new();
            for p in &ps {
                for q in &qs {
                    let r = Rational::new(p.clone(), q.clone());
                    cands.insert(r.clone());
                    cands.insert(-r);
                }
            }
            for r in cands {
                let mut val = Rational::zero();
                for c in ints.iter().rev() {
                    val = val * &r + Rational::from_integer(c.clone());
                }
                if val.is_zero() {
                    roots.push(r);
                }
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }
}

fn small_divisors(n: &num_bigint::BigInt) -> Option<Vec<num_bigint::BigInt>> {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    let n = n.to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
fn pseudo_remainder(a: &Poly, b: &Poly, var: &str) -> Poly {
    let db = b.degree_in(var);
    if db == 0 {
        return Poly::zero();
    }
    let bc = b.coefficients_in(var);
    let lb = bc.last().cloned().unwrap_or_else(Poly::zero);
    let mut r = a.clone();
    while !r.is_zero() && r.contains_var(var) && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lr = r.coefficients_in(var).pop().unwrap();
        let shift = Poly::term(
            Rational::one(),
            if dr == db {
                Monomial::one()
            } else {
                Monomial(vec![(Arc::from(var), dr - db)])
            },
        );
        r = lb.mul(&r).sub(&lr.mul(&shift).mul(b));
    }
    r
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}
