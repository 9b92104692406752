//! Exact coefficients: big rationals and rational functions in named parameters.
//!
//! [`Scalar`] keeps every value in canonical form after each operation, so
//! equality (and in particular the zero test) is structural.

mod parse;
mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use poly::{Monomial, Param, Poly};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Parameter assignment used for specialisation and evaluation.
pub type Assignment = BTreeMap<String, Rational>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient with the summation convention: zero outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> Result<Rational> {
    if a < 0 {
        return Err(Error::Domain(format!(
            "binomial with negative top index {a}"
        )));
    }
    Ok(Rational::from_integer(binomial_int(a, b)))
}

/// Integer binomial, zero when `b < 0`, `a < 0` or `b > a`.
pub fn binomial_int(a: i64, b: i64) -> BigInt {
    if a < 0 || b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for k in 0..b {
        acc = acc * BigInt::from(a - k) / BigInt::from(k + 1);
    }
    acc
}

/// Reduced fraction of polynomials with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::one(),
            };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (
                    num.div_exact(&g).expect("gcd divides numerator"),
                    den.div_exact(&g).expect("gcd divides denominator"),
                )
            }
        };
        let lc = den.leading_coefficient().recip();
        RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }
}

/// A canonical exact scalar: a rational, or a non-constant rational function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Func(Arc<RatFunc>),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Rat(Rational::one())
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::Rat(int(n))
    }

    pub fn param(name: &str) -> Scalar {
        Scalar::from_poly(Poly::var(name))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        match p.as_constant() {
            Some(c) => Scalar::Rat(c),
            None => Scalar::Func(Arc::new(RatFunc {
                num: p,
                den: Poly::one(),
            })),
        }
    }

    fn from_ratfunc(f: RatFunc) -> Scalar {
        if f.den.is_one() {
            if let Some(c) = f.num.as_constant() {
                return Scalar::Rat(c);
            }
        }
        Scalar::Func(Arc::new(f))
    }

    pub fn from_fraction(num: Poly, den: Poly) -> Result<Scalar> {
        RatFunc::new(num, den).map(Scalar::from_ratfunc)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Func(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    pub fn numerator(&self) -> Poly {
        match self {
            Scalar::Rat(r) => Poly::constant(r.clone()),
            Scalar::Func(f) => f.num.clone(),
        }
    }

    pub fn denominator(&self) -> Poly {
        match self {
            Scalar::Rat(_) => Poly::one(),
            Scalar::Func(f) => f.den.clone(),
        }
    }

    /// Numerator polynomial when the denominator is 1.
    pub fn as_poly(&self) -> Option<Poly> {
        match self {
            Scalar::Rat(r) => Some(Poly::constant(r.clone())),
            Scalar::Func(f) => f.den.is_one().then(|| f.num.clone()),
        }
    }

    pub fn params(&self) -> Vec<String> {
        match self {
            Scalar::Rat(_) => Vec::new(),
            Scalar::Func(f) => {
                let mut v = f.num.vars();
                v.extend(f.den.vars());
                v.into_iter().map(|p| p.to_string()).collect()
            }
        }
    }

    fn to_ratfunc(&self) -> RatFunc {
        match self {
            Scalar::Rat(r) => RatFunc {
                num: Poly::constant(r.clone()),
                den: Poly::one(),
            },
            Scalar::Func(f) => (**f).clone(),
        }
    }

    pub fn inverse(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) if r.is_zero() => Err(Error::DivisionByZero),
            Scalar::Rat(r) => Ok(Scalar::Rat(r.recip())),
            Scalar::Func(f) => Scalar::from_fraction(f.den.clone(), f.num.clone()),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Exact value at a complete parameter assignment.
    pub fn eval(&self, assignment: &Assignment) -> Result<Rational> {
        match self {
            Scalar::Rat(r) => Ok(r.clone()),
            Scalar::Func(f) => {
                let d = f.den.eval(assignment)?;
                if d.is_zero() {
                    return Err(Error::VanishingDenominator);
                }
                Ok(f.num.eval(assignment)? / d)
            }
        }
    }

    /// Substitute the assigned parameters, keeping the rest symbolic.
    pub fn specialize(&self, assignment: &Assignment) -> Result<Scalar> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Func(f) => {
                let den = f.den.specialize(assignment);
                if den.is_zero() {
                    return Err(Error::VanishingDenominator);
                }
                Scalar::from_fraction(f.num.specialize(assignment), den)
            }
        }
    }

    /// Parse the textual encoding (see [`Scalar`]'s `Display`).
    pub fn parse(text: &str) -> Result<Scalar> {
        parse::parse_scalar(text)
    }
}

/// Exact value of `s` at `assignment`; every parameter of `s` must be assigned.
pub fn eval_params(s: &Scalar, assignment: &Assignment) -> Result<Rational> {
    s.eval(assignment)
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Func(rf) if rf.den.is_one() => write!(f, "{}", rf.num),
            Scalar::Func(rf) => write!(f, "({})/({})", rf.num, rf.den),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let (a, b) = (self.to_ratfunc(), rhs.to_ratfunc());
                if a.den == b.den {
                    return Scalar::from_ratfunc(RatFunc::reduce(a.num.add(&b.num), a.den));
                }
                let g = Poly::gcd(&a.den, &b.den);
                let ad = a.den.div_exact(&g).expect("gcd divides");
                let bd = b.den.div_exact(&g).expect("gcd divides");
                let num = a.num.mul(&bd).add(&b.num.mul(&ad));
                Scalar::from_ratfunc(RatFunc::reduce(num, ad.mul(&b.den)))
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Func(f) => Scalar::Func(Arc::new(RatFunc {
                num: f.num.neg(),
                den: f.den.clone(),
            })),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => self + &(-rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Rat(a), Scalar::Func(_)) | (Scalar::Func(_), Scalar::Rat(a))
                if a.is_zero() =>
            {
                Scalar::zero()
            }
            (Scalar::Rat(a), Scalar::Func(f)) | (Scalar::Func(f), Scalar::Rat(a)) => {
                Scalar::Func(Arc::new(RatFunc {
                    num: f.num.scale(a),
                    den: f.den.clone(),
                }))
            }
            (Scalar::Func(a), Scalar::Func(b)) => {
                let g1 = Poly::gcd(&a.num, &b.den);
                let g2 = Poly::gcd(&b.num, &a.den);
                let an = a.num.div_exact(&g1).expect("gcd divides");
                let bd = b.den.div_exact(&g1).expect("gcd divides");
                let bn = b.num.div_exact(&g2).expect("gcd divides");
                let ad = a.den.div_exact(&g2).expect("gcd divides");
                Scalar::from_ratfunc(RatFunc::reduce(an.mul(&bn), ad.mul(&bd)))
            }
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for &Scalar {
    type Output = Result<Scalar>;
    fn div(self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inverse()?)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $out:ty) => {
        impl $tr for Scalar {
            type Output = $out;
            fn $m(self, rhs: Scalar) -> $out {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = $out;
            fn $m(self, rhs: &Scalar) -> $out {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add, Scalar);
forward_owned!(Sub, sub, Scalar);
forward_owned!(Mul, mul, Scalar);
forward_owned!(Div, div, Result<Scalar>);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

/// True when `r` is a (possibly negative) integer.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Height `max(|p|, q)` of `p/q`.
pub fn height(r: &Rational) -> BigInt {
    r.numer().abs().max(r.denom().clone())
}
