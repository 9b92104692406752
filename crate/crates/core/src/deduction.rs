//! Linear consequences of the Zinbiel identity on partially known tables.
//!
//! Every structure constant is an affine form in named unknowns. An identity
//! instance contributes one equation per coordinate; coordinates where two
//! unknowns would be multiplied are skipped and counted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::Value;

use crate::algebra::{to_dense, Algebra, Defect, SparseVec};
use crate::error::{Error, Result};
use crate::scalar::{binomial_int, Rational, Scalar};

/// `constant + Σ coeff · unknown`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinForm {
    pub constant: Rational,
    pub terms: BTreeMap<usize, Rational>,
}

impl LinForm {
    pub fn constant(c: Rational) -> LinForm {
        LinForm {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(id: usize) -> LinForm {
        LinForm {
            constant: Rational::zero(),
            terms: BTreeMap::from([(id, Rational::one())]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    fn axpy(&mut self, a: &Rational, other: &LinForm) {
        if a.is_zero() {
            return;
        }
        self.constant += a * &other.constant;
        for (&v, c) in &other.terms {
            let e = self.terms.entry(v).or_insert_with(Rational::zero);
            *e += a * c;
            if e.is_zero() {
                self.terms.remove(&v);
            }
        }
    }

    fn scale(&self, a: &Rational) -> LinForm {
        let mut out = LinForm::default();
        out.axpy(a, self);
        out
    }

    /// `None` when both factors involve unknowns.
    fn mul(&self, other: &LinForm) -> Option<LinForm> {
        match (self.is_constant(), other.is_constant()) {
            (true, _) => Some(other.scale(&self.constant)),
            (_, true) => Some(self.scale(&other.constant)),
            _ => None,
        }
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (&v, c)| acc + c * &values[v])
    }

    pub fn display(&self, names: &[String]) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (&v, c) in &self.terms {
            let neg = *c < Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            let body = if a.is_one() {
                names[v].clone()
            } else {
                format!("{a}*{}", names[v])
            };
            parts.push((neg, body));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            let neg = self.constant < Rational::zero();
            let a = if neg {
                -self.constant.clone()
            } else {
                self.constant.clone()
            };
            parts.push((neg, a.to_string()));
        }
        let mut s = String::new();
        for (n, (neg, body)) in parts.into_iter().enumerate() {
            match (n, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }
}

type FormVec = BTreeMap<usize, LinForm>;

/// A table whose entries are affine forms in named unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTable {
    labels: Vec<String>,
    unknowns: Vec<String>,
    entries: BTreeMap<(usize, usize), FormVec>,
    /// Products introduced through [`PartialTable::set_unknown`].
    unknown_pairs: BTreeSet<(usize, usize)>,
}

impl PartialTable {
    pub fn new(labels: Vec<String>) -> PartialTable {
        PartialTable {
            labels,
            unknowns: Vec::new(),
            entries: BTreeMap::new(),
            unknown_pairs: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn unknown_id(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u == name)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Id of a named unknown, declared on first use.
    pub fn declare(&mut self, name: &str) -> usize {
        match self.unknown_id(name) {
            Some(id) => id,
            None => {
                self.unknowns.push(name.to_string());
                self.unknowns.len() - 1
            }
        }
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        let n = self.dim();
        for x in [i, j] {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, dim: n });
            }
        }
        if self.unknown_pairs.contains(&(i, j)) {
            return Err(Error::InvalidParams(format!(
                "{}∘{} is already an unknown product",
                self.labels[i], self.labels[j]
            )));
        }
        Ok(())
    }

    /// Set `e_i∘e_j` to a combination whose coefficients may involve named unknowns.
    pub fn set_known(&mut self, i: usize, j: usize, v: FormVec) -> Result<()> {
        self.check(i, j)?;
        let v: FormVec = v.into_iter().filter(|(_, f)| !f.is_zero()).collect();
        self.entries.insert((i, j), v);
        Ok(())
    }

    pub fn set_rational(&mut self, i: usize, j: usize, v: &[(usize, Rational)]) -> Result<()> {
        self.set_known(
            i,
            j,
            v.iter()
                .map(|(k, c)| (*k, LinForm::constant(c.clone())))
                .collect(),
        )
    }

    /// Make `e_i∘e_j` a fresh unknown vector on `support` (all coordinates if `None`).
    pub fn set_unknown(&mut self, i: usize, j: usize, support: Option<&[usize]>) -> Result<()> {
        self.check(i, j)?;
        let all: Vec<usize> = (0..self.dim()).collect();
        let support = support.unwrap_or(&all);
        let mut v = FormVec::new();
        for &k in support {
            if k >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    dim: self.dim(),
                });
            }
            let name = format!(
                "({}∘{})[{}]",
                self.labels[i], self.labels[j], self.labels[k]
            );
            v.insert(k, LinForm::var(self.declare(&name)));
        }
        self.entries.insert((i, j), v);
        self.unknown_pairs.insert((i, j));
        Ok(())
    }

    pub fn is_unknown(&self, i: usize, j: usize) -> bool {
        self.unknown_pairs.contains(&(i, j))
    }

    /// A rational algebra with the given products replaced by fresh unknowns.
    pub fn from_algebra(a: &Algebra, unknown: &[(usize, usize)]) -> Result<PartialTable> {
        if !a.params().is_empty() {
            return Err(Error::UnsupportedShape("parametric algebra".into()));
        }
        let mut t = PartialTable::new(a.labels().to_vec());
        for (&(i, j), v) in a.products() {
            if unknown.contains(&(i, j)) {
                continue;
            }
            let row: Vec<(usize, Rational)> = v
                .iter()
                .map(|(&k, c)| (k, c.as_rational().expect("rational").clone()))
                .collect();
            t.set_rational(i, j, &row)?;
        }
        for &(i, j) in unknown {
            t.set_unknown(i, j, None)?;
        }
        Ok(t)
    }

    fn basis(&self, i: usize, j: usize) -> Option<&FormVec> {
        self.entries.get(&(i, j))
    }
}

/// An expression vector; `poisoned` coordinates would need a product of unknowns.
#[derive(Clone, Debug, Default)]
struct Expr {
    vals: FormVec,
    poisoned: BTreeSet<usize>,
}

impl Expr {
    fn unit(k: usize) -> Expr {
        Expr {
            vals: FormVec::from([(k, LinForm::constant(Rational::one()))]),
            poisoned: BTreeSet::new(),
        }
    }

    fn axpy(&mut self, a: &Rational, other: &Expr) {
        for (&k, f) in &other.vals {
            let e = self.vals.entry(k).or_default();
            e.axpy(a, f);
            if e.is_zero() {
                self.vals.remove(&k);
            }
        }
        self.poisoned.extend(&other.poisoned);
    }
}

fn multiply(t: &PartialTable, x: &Expr, y: &Expr) -> Expr {
    let mut out = Expr::default();
    let ys: BTreeSet<usize> = y.vals.keys().chain(&y.poisoned).copied().collect();
    let xs: BTreeSet<usize> = x.vals.keys().chain(&x.poisoned).copied().collect();
    for &m in &xs {
        for &q in &ys {
            let Some(prod) = t.basis(m, q) else { continue };
            let coeff = match (x.vals.get(&m), y.vals.get(&q)) {
                (Some(a), Some(b)) if !x.poisoned.contains(&m) && !y.poisoned.contains(&q) => {
                    a.mul(b)
                }
                _ => None,
            };
            for (&l, c) in prod {
                match coeff.as_ref().and_then(|a| a.mul(c)) {
                    Some(term) => {
                        let e = out.vals.entry(l).or_default();
                        e.axpy(&Rational::one(), &term);
                    }
                    None => {
                        out.poisoned.insert(l);
                    }
                }
            }
        }
    }
    out.vals
        .retain(|k, f| !f.is_zero() && !out.poisoned.contains(k));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IdentityKind {
    /// `(a∘b)∘c = a∘(b∘c) + a∘(c∘b)`
    Zinbiel,
    /// `(a∘b)∘c = (a∘c)∘b`
    Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub kind: IdentityKind,
    pub triple: (usize, usize, usize),
}

impl Instance {
    pub fn display(&self, labels: &[String]) -> String {
        let (a, b, c) = (
            &labels[self.triple.0],
            &labels[self.triple.1],
            &labels[self.triple.2],
        );
        match self.kind {
            IdentityKind::Zinbiel => format!("({a}∘{b})∘{c} = {a}∘({b}∘{c}) + {a}∘({c}∘{b})"),
            IdentityKind::Derived => format!("({a}∘{b})∘{c} = ({a}∘{c})∘{b}"),
        }
    }
}

fn instance_expr(t: &PartialTable, inst: Instance) -> Expr {
    let (i, j, k) = inst.triple;
    let (ei, ej, ek) = (Expr::unit(i), Expr::unit(j), Expr::unit(k));
    let mut d = multiply(t, &multiply(t, &ei, &ej), &ek);
    match inst.kind {
        IdentityKind::Zinbiel => {
            let mut inner = multiply(t, &ej, &ek);
            inner.axpy(&Rational::one(), &multiply(t, &ek, &ej));
            d.axpy(&-Rational::one(), &multiply(t, &ei, &inner));
        }
        IdentityKind::Derived => {
            let rhs = multiply(t, &multiply(t, &ei, &ek), &ej);
            d.axpy(&-Rational::one(), &rhs);
        }
    }
    d.vals.retain(|k, _| !d.poisoned.contains(k));
    d
}

/// An equation `form = 0` read off coordinate `coordinate` of `instance`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub form: LinForm,
    pub instance: Instance,
    pub coordinate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contradiction {
    /// Coordinate whose coefficient reduces to a nonzero constant: the
    /// corresponding basis vector is forced to zero.
    pub basis: usize,
    pub instance: Instance,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Echelon {
    /// Each row has pivot coefficient 1 and no other row's pivot.
    rows: Vec<(usize, LinForm)>,
}

impl Echelon {
    fn reduce(&self, f: &LinForm) -> LinForm {
        let mut f = f.clone();
        for (p, row) in &self.rows {
            if let Some(c) = f.terms.get(p).cloned() {
                f.axpy(&-c, row);
            }
        }
        f
    }

    fn insert(&mut self, f: LinForm) {
        let (&p, c) = f.terms.iter().next().expect("nonconstant");
        let row = f.scale(&c.recip());
        for (_, other) in &mut self.rows {
            if let Some(c) = other.terms.get(&p).cloned() {
                other.axpy(&-c, &row);
            }
        }
        self.rows.push((p, row));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Propagation {
    /// Independent equations in the order they were found.
    pub constraints: Vec<Constraint>,
    pub contradiction: Option<Contradiction>,
    pub instances: usize,
    pub redundant: usize,
    pub skipped_quadratic: usize,
    /// False when the budget ran out before every instance was expanded.
    pub complete: bool,
    system: Echelon,
}

impl Propagation {
    /// Whether `form = 0` follows from the extracted constraints.
    pub fn implies(&self, form: &LinForm) -> bool {
        self.system.reduce(form).is_zero()
    }

    /// Value of each unknown fixed by the constraints.
    pub fn determined(&self) -> BTreeMap<usize, Rational> {
        self.system
            .rows
            .iter()
            .filter(|(_, r)| r.terms.len() == 1)
            .map(|(p, r)| (*p, -r.constant.clone()))
            .collect()
    }

    pub fn report(&self, t: &PartialTable) -> String {
        let names = t.unknowns();
        let mut s = String::new();
        for c in &self.constraints {
            s.push_str(&format!(
                "{} = 0    [{} at {}]\n",
                c.form.display(names),
                c.instance.display(t.labels()),
                t.labels()[c.coordinate]
            ));
        }
        s.push_str(&format!(
            "instances: {}, constraints: {}, redundant: {}, skipped quadratic: {}, complete: {}\n",
            self.instances,
            self.constraints.len(),
            self.redundant,
            self.skipped_quadratic,
            self.complete
        ));
        match &self.contradiction {
            Some(c) => s.push_str(&format!(
                "contradiction: {} forced to 0 by {}\n",
                t.labels()[c.basis],
                c.instance.display(t.labels())
            )),
            None => s.push_str("no contradiction\n"),
        }
        s
    }
}

/// Expand identity instances in lexicographic triple order, Zinbiel before
/// derived, until a contradiction or `budget` instances.
pub fn propagate(t: &PartialTable, budget: usize) -> Propagation {
    let n = t.dim();
    let mut out = Propagation {
        constraints: Vec::new(),
        contradiction: None,
        instances: 0,
        redundant: 0,
        skipped_quadratic: 0,
        complete: true,
        system: Echelon::default(),
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for kind in [IdentityKind::Zinbiel, IdentityKind::Derived] {
                    if out.instances == budget {
                        out.complete = false;
                        return out;
                    }
                    out.instances += 1;
                    let inst = Instance {
                        kind,
                        triple: (i, j, k),
                    };
                    let e = instance_expr(t, inst);
                    out.skipped_quadratic += e.poisoned.len();
                    for (coordinate, form) in e.vals {
                        let r = out.system.reduce(&form);
                        if r.is_zero() {
                            out.redundant += 1;
                        } else if r.is_constant() {
                            out.contradiction = Some(Contradiction {
                                basis: coordinate,
                                instance: inst,
                            });
                            return out;
                        } else {
                            out.system.insert(r);
                            out.constraints.push(Constraint {
                                form,
                                instance: inst,
                                coordinate,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// `(e_i∘e_j)∘e_k − (e_i∘e_k)∘e_j` on every basis triple, nonzero ones only.
pub fn derived_identity_defects(a: &Algebra) -> Vec<Defect> {
    let n = a.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let ek = SparseVec::from([(k, Scalar::one())]);
                let ej = SparseVec::from([(j, Scalar::one())]);
                let lhs = a.multiply_sparse(&a.product(i, j).cloned().unwrap_or_default(), &ek);
                let rhs = a.multiply_sparse(&a.product(i, k).cloned().unwrap_or_default(), &ej);
                let d: Vec<Scalar> = to_dense(&lhs, n)
                    .iter()
                    .zip(to_dense(&rhs, n))
                    .map(|(x, y)| x - &y)
                    .collect();
                if d.iter().any(|x| !x.is_zero()) {
                    out.push(Defect {
                        triple: (i, j, k),
                        defect: d,
                    });
                }
            }
        }
    }
    out
}

/// Basis `e1..en` with `e1∘e1 = 0`, `e1∘e_i = e_{i+1}` along the second
/// block `e2..e_{m+1}`, `e1∘e_{m+1} = 0`, every other product unknown.
pub fn single_generator_chain(m: usize) -> Result<PartialTable> {
    let n = m + 1;
    let labels = (1..=n).map(|i| format!("e{i}")).collect();
    let mut t = PartialTable::new(labels);
    t.set_rational(0, 0, &[])?;
    for i in 1..n - 1 {
        t.set_rational(0, i, &[(i + 1, Rational::one())])?;
    }
    t.set_rational(0, n - 1, &[])?;
    for i in 1..n {
        for j in 0..n {
            t.set_unknown(i, j, None)?;
        }
    }
    Ok(t)
}

/// Type-I adapted basis `e1..e_{n−p}, f1..f_p` with the known products of
/// `e1`, the products `e_i∘e_j = C(i+j−1, j) e_{i+j}`, and
/// `f1∘e_i`, `f1∘f_i` written with unknowns `alpha_i, beta_i, gamma_i, delta_i`.
/// `alpha_1 = 0` and `beta_1` is fixed. All other products are unknown,
/// supported on the graded component of the expected degree.
pub fn type_one_skeleton(n: usize, p: usize, beta1: Rational) -> Result<PartialTable> {
    if p < 2 || n < 2 * p {
        return Err(Error::InvalidParams(format!(
            "need 2 <= p and 2p <= n, got n={n}, p={p}"
        )));
    }
    let m = n - p;
    let mut labels: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
    labels.extend((1..=p).map(|i| format!("f{i}")));
    let e = |i: usize| i - 1;
    let f = |i: usize| m + i - 1;
    let degree = |x: usize| if x < m { x + 1 } else { x - m + 1 };
    let component = |d: usize| {
        let mut v = Vec::new();
        if d <= m {
            v.push(e(d));
        }
        if d <= p {
            v.push(f(d));
        }
        v
    };
    let one = || LinForm::constant(Rational::one());
    let mut t = PartialTable::new(labels);
    for i in 1..=m {
        for j in 1..=m {
            let v = if i + j <= m {
                let c = Rational::from_integer(binomial_int((i + j - 1) as i64, j as i64));
                FormVec::from([(e(i + j), LinForm::constant(c))])
            } else {
                FormVec::new()
            };
            t.set_known(e(i), e(j), v)?;
        }
    }
    for i in 1..=p {
        let v = if i < p {
            FormVec::from([(f(i + 1), one())])
        } else {
            FormVec::new()
        };
        t.set_known(e(1), f(i), v)?;
    }
    for i in 1..m {
        let mut v = FormVec::new();
        if i >= 2 {
            v.insert(e(i + 1), LinForm::var(t.declare(&format!("alpha{i}"))));
        }
        if i < p {
            let b = if i == 1 {
                LinForm::constant(beta1.clone())
            } else {
                LinForm::var(t.declare(&format!("beta{i}")))
            };
            v.insert(f(i + 1), b);
        }
        t.set_known(f(1), e(i), v)?;
    }
    t.set_known(f(1), e(m), FormVec::new())?;
    for i in 1..=p {
        let mut v = FormVec::new();
        if i < m {
            v.insert(e(i + 1), LinForm::var(t.declare(&format!("gamma{i}"))));
        }
        if i < p {
            v.insert(f(i + 1), LinForm::var(t.declare(&format!("delta{i}"))));
        }
        t.set_known(f(1), f(i), v)?;
    }
    for x in 0..n {
        for y in 0..n {
            if t.basis(x, y).is_none() {
                let support = component(degree(x) + degree(y));
                t.set_unknown(x, y, Some(&support))?;
            }
        }
    }
    Ok(t)
}

fn schema(location: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        reason: reason.into(),
    }
}

fn linear_form(t: &mut PartialTable, s: &Scalar, at: &str) -> Result<LinForm> {
    let poly = s
        .as_poly()
        .ok_or_else(|| schema(at, "coefficients must be polynomial in the unknowns"))?;
    let mut out = LinForm::default();
    for (mono, c) in poly.terms() {
        match mono.factors() {
            [] => out.constant += c,
            [(name, 1)] => {
                let id = t
                    .unknown_id(name)
                    .ok_or_else(|| schema(at, format!("undeclared unknown `{name}`")))?;
                out.terms.insert(id, c.clone());
            }
            _ => return Err(schema(at, "coefficient is not linear in the unknowns")),
        }
    }
    Ok(out)
}

fn index(v: &Value, at: &str, dim: usize) -> Result<usize> {
    let i = v
        .as_u64()
        .ok_or_else(|| schema(at, "expected a positive integer"))? as usize;
    if i == 0 || i > dim {
        return Err(schema(at, format!("index {i} outside 1..={dim}")));
    }
    Ok(i - 1)
}

/// Parse a partial table:
///
/// ```json
/// {"dim": 5, "labels": [...], "unknowns": ["a"], "unspecified": "unknown",
///  "products": [{"i": 1, "j": 2, "terms": [{"k": 3, "coeff": "1 + a"}]}],
///  "unknown_products": [{"i": 2, "j": 1, "support": [3, 4]}]}
/// ```
///
/// Indices are 1-based. Unlisted products are unknown unless
/// `"unspecified": "zero"`.
pub fn partial_from_json(text: &str) -> Result<PartialTable> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema("$", "expected an object"))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .filter(|&d| d > 0)
        .ok_or_else(|| schema("dim", "expected a positive integer"))? as usize;
    let strings = |key: &str| -> Result<Option<Vec<String>>> {
        match obj.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(n, v)| {
                    v.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| schema(format!("{key}[{n}]"), "expected a string"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(schema(key, "expected an array")),
        }
    };
    let labels = strings("labels")?.unwrap_or_else(|| (1..=dim).map(|i| format!("e{i}")).collect());
    if labels.len() != dim {
        return Err(schema(
            "labels",
            format!("{} labels for dimension {dim}", labels.len()),
        ));
    }
    let mut t = PartialTable::new(labels);
    for name in strings("unknowns")?.unwrap_or_default() {
        t.declare(&name);
    }
    let unknown_rest = match obj.get("unspecified").map(|v| v.as_str()) {
        None | Some(Some("unknown")) => true,
        Some(Some("zero")) => false,
        _ => return Err(schema("unspecified", "expected \"unknown\" or \"zero\"")),
    };
    let empty = Vec::new();
    let products = match obj.get("products") {
        Some(v) => v
            .as_array()
            .ok_or_else(|| schema("products", "expected an array"))?,
        None => &empty,
    };
    let mut seen = BTreeSet::new();
    for (n, p) in products.iter().enumerate() {
        let at = format!("products[{n}]");
        let po = p
            .as_object()
            .ok_or_else(|| schema(&at, "expected an object"))?;
        let field = |k: &str| {
            po.get(k)
                .ok_or_else(|| schema(format!("{at}.{k}"), "missing field"))
        };
        let i = index(field("i")?, &format!("{at}.i"), dim)?;
        let j = index(field("j")?, &format!("{at}.j"), dim)?;
        if !seen.insert((i, j)) {
            return Err(schema(&at, "duplicate product"));
        }
        let terms = field("terms")?
            .as_array()
            .ok_or_else(|| schema(format!("{at}.terms"), "expected an array"))?;
        let mut v = FormVec::new();
        for (m, term) in terms.iter().enumerate() {
            let tat = format!("{at}.terms[{m}]");
            let k = index(
                term.get("k")
                    .ok_or_else(|| schema(format!("{tat}.k"), "missing field"))?,
                &format!("{tat}.k"),
                dim,
            )?;
            let cat = format!("{tat}.coeff");
            let s = match term.get("coeff") {
                Some(Value::String(s)) => {
                    Scalar::parse(s).map_err(|e| schema(&cat, e.to_string()))?
                }
                Some(Value::Number(x)) if x.is_i64() => Scalar::from_int(x.as_i64().expect("i64")),
                _ => return Err(schema(&cat, "expected a scalar string")),
            };
            let form = linear_form(&mut t, &s, &cat)?;
            if v.insert(k, form).is_some() {
                return Err(schema(&tat, "duplicate term"));
            }
        }
        t.set_known(i, j, v)?;
    }
    if let Some(v) = obj.get("unknown_products") {
        let arr = v
            .as_array()
            .ok_or_else(|| schema("unknown_products", "expected an array"))?;
        for (n, u) in arr.iter().enumerate() {
            let at = format!("unknown_products[{n}]");
            let get = |k: &str| {
                u.get(k)
                    .ok_or_else(|| schema(format!("{at}.{k}"), "missing field"))
            };
            let i = index(get("i")?, &format!("{at}.i"), dim)?;
            let j = index(get("j")?, &format!("{at}.j"), dim)?;
            if !seen.insert((i, j)) {
                return Err(schema(&at, "duplicate product"));
            }
            let support = match u.get("support") {
                None => None,
                Some(Value::Array(a)) => Some(
                    a.iter()
                        .enumerate()
                        .map(|(m, k)| index(k, &format!("{at}.support[{m}]"), dim))
                        .collect::<Result<Vec<_>>>()?,
                ),
                Some(_) => return Err(schema(format!("{at}.support"), "expected an array")),
            };
            t.set_unknown(i, j, support.as_deref())?;
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            if !seen.contains(&(i, j)) {
                if unknown_rest {
                    t.set_unknown(i, j, None)?;
                } else {
                    t.set_known(i, j, FormVec::new())?;
                }
            }
        }
    }
    Ok(t)
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.terms.keys().max().copied().unwrap_or(0))
            .map(|v| format!("x{v}"))
            .collect();
        write!(f, "{}", self.display(&names))
    }
}
