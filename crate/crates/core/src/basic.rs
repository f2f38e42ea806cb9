//! Basic types `C_{p,q}`, chain types, and the ring of formal type combinations.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::formulas::spec_from_resolution;
use crate::graph::{build_chain, chain_multiplicities};
use crate::rational::{rat, Rational};
use crate::spectrum::{spec_ordinary, SpectrumCombo};

/// `C_{p,q}`: `p` transverse lines and `q` smooth branches tangent to order two.
/// `q = 1` never occurs: such a type is stored as the ordinary point `(p + 1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicType {
    p: i64,
    q: i64,
}

impl BasicType {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p < 0 || q < 0 || (p == 0 && q == 0) {
            return Err(Error::InvalidType(format!("basic({p},{q})")));
        }
        Ok(if q == 1 {
            Self { p: p + 1, q: 0 }
        } else {
            Self { p, q }
        })
    }

    pub fn ordinary(m: i64) -> Result<Self> {
        Self::new(m, 0)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_ordinary(&self) -> bool {
        self.q == 0
    }

    /// Multiplicity of the germ, `p + q`.
    pub fn multiplicity(&self) -> i64 {
        self.p + self.q
    }

    /// Largest denominator among the spectral values: `p + 2q`, or `m` for ordinary points.
    pub fn scale(&self) -> i64 {
        self.p + 2 * self.q
    }

    pub fn spectrum(&self) -> SpectrumCombo {
        spec_basic(self.p, self.q).expect("normalized type")
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 0 {
            write!(f, "ord({})", self.p)
        } else {
            write!(f, "basic({},{})", self.p, self.q)
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

/// Closed form for `Spec C_{p,q}`; the two sums share values when their denominators do.
pub fn spec_basic(p: i64, q: i64) -> Result<SpectrumCombo> {
    let t = BasicType::new(p, q)?;
    let (p, q) = (t.p, t.q);
    if q == 0 {
        return Ok(spec_ordinary(p));
    }
    let mut s = SpectrumCombo::new();
    let n = p + 2 * q;
    for k in (1 - n)..n {
        s.add_raw(rat(k, n), q - ceil_div(q * k.abs(), n));
    }
    let m = p + q;
    for k in (1 - m)..m {
        s.add_raw(rat(k, m), p - 1 - (p * k.abs()).div_euclid(m));
    }
    Ok(s)
}

pub fn alpha_max(p: i64, q: i64) -> Result<Rational> {
    let t = BasicType::new(p, q)?;
    let (p, q) = (t.p, t.q);
    if q == 0 {
        if p < 2 {
            return Err(Error::InvalidType("smooth germ has empty spectrum".into()));
        }
        return Ok(rat(p - 2, p));
    }
    Ok(if p > q {
        rat(1, 1) - rat(2, p + q)
    } else {
        rat(1, 1) - rat(3, p + 2 * q)
    })
}

/// `(y^{p_1} - x^{p_1}) Π_{i>=2} (y^{(i-1)p_i} - x^{i p_i})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainType {
    p: Vec<i64>,
}

impl ChainType {
    pub fn new(p: Vec<i64>) -> Result<Self> {
        chain_multiplicities(&p).map_err(|e| Error::InvalidType(e.to_string()))?;
        if p.len() > 1 && *p.last().unwrap() == 0 {
            return Err(Error::InvalidType(format!("chain {p:?} has a trailing zero")));
        }
        Ok(Self { p })
    }

    /// Drops trailing zeros first: a trailing zero part is an extra blow-up of a crossing.
    pub fn normalized(mut p: Vec<i64>) -> Result<Self> {
        while p.len() > 1 && *p.last().unwrap() == 0 {
            p.pop();
        }
        Self::new(p)
    }

    pub fn parts(&self) -> &[i64] {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn multiplicities(&self) -> Vec<i64> {
        chain_multiplicities(&self.p).expect("validated chain")
    }

    pub fn m1(&self) -> i64 {
        self.multiplicities()[0]
    }

    pub fn spectrum(&self) -> SpectrumCombo {
        spec_from_resolution(&build_chain(&self.p).expect("validated chain"))
            .expect("chain graphs have integral spectra")
    }
}

impl fmt::Display for ChainType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.len() == 1 {
            return write!(f, "ord({})", self.p[0]);
        }
        let parts: Vec<String> = self.p.iter().map(|x| x.to_string()).collect();
        write!(f, "chain({})", parts.join(","))
    }
}

/// `(δ, μ)` of a chain type.
pub fn mu_delta_chain(c: &ChainType) -> (i64, i64) {
    let p = c.parts();
    let k = p.len();
    let idx = |i: usize| p[i - 1];
    let mut twice = (idx(1) - 1).pow(2);
    for i in 2..=k {
        let ii = i as i64;
        twice += ((ii - 1) * idx(i) - 1) * (ii * idx(i) - 1);
    }
    twice += p.iter().map(|x| x - 1).sum::<i64>();
    debug_assert_eq!(twice % 2, 0);
    let mut delta = twice / 2;
    delta += idx(1) * (2..=k).map(|i| (i as i64 - 1) * idx(i)).sum::<i64>();
    for i in 2..=k {
        for j in (i + 1)..=k {
            delta += idx(i) * idx(j) * (i as i64 - 1) * j as i64;
        }
    }
    let r: i64 = p.iter().sum();
    (delta, 2 * delta - (r - 1))
}

/// Signed combination of basic types plus a multiple of the formal unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeCombo {
    terms: BTreeMap<BasicType, i64>,
    unit: i64,
}

impl TypeCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self {
            terms: BTreeMap::new(),
            unit: 1,
        }
    }

    pub fn single(t: BasicType) -> Self {
        let mut c = Self::new();
        c.add(t, 1);
        c
    }

    pub fn basic(p: i64, q: i64) -> Result<Self> {
        Ok(Self::single(BasicType::new(p, q)?))
    }

    pub fn add(&mut self, t: BasicType, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.terms.entry(t).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&t);
        }
    }

    pub fn add_unit(&mut self, k: i64) {
        self.unit += k;
    }

    pub fn add_scaled(&mut self, other: &Self, k: i64) {
        for (t, c) in &other.terms {
            self.add(*t, c * k);
        }
        self.unit += other.unit * k;
    }

    pub fn coeff(&self, t: &BasicType) -> i64 {
        self.terms.get(t).copied().unwrap_or(0)
    }

    pub fn unit_coefficient(&self) -> i64 {
        self.unit
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasicType, i64)> {
        self.terms.iter().map(|(t, c)| (t, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.unit == 0
    }

    pub fn len(&self) -> usize {
        self.terms.len() + usize::from(self.unit != 0)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1);
        out
    }
}

impl fmt::Display for TypeCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<(String, i64)> =
            self.terms.iter().map(|(t, c)| (t.to_string(), *c)).collect();
        if self.unit != 0 {
            items.insert(0, ("one".to_string(), self.unit));
        }
        for (i, (name, c)) in items.iter().enumerate() {
            let body = if c.abs() == 1 {
                name.clone()
            } else {
                format!("{}*{}", c.abs(), name)
            };
            match (i, *c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

fn product_of_generators(a: BasicType, b: BasicType) -> TypeCombo {
    let bt = |p, q| BasicType::new(p, q).expect("product stays in range");
    let mut out = TypeCombo::new();
    match (a.q, b.q) {
        (0, _) => out.add(bt(a.p + b.p, b.q), 1),
        (_, 0) => out.add(bt(a.p + b.p, a.q), 1),
        (q, q2) => {
            let s = a.p + b.p;
            out.add(bt(s + q2, q), 1);
            out.add(bt(s + q, q2), 1);
            out.add(bt(s + q + q2, 0), -1);
        }
    }
    out
}

pub fn ring_product(a: &TypeCombo, b: &TypeCombo) -> TypeCombo {
    let mut out = TypeCombo::new();
    out.unit = a.unit * b.unit;
    for (t, c) in &a.terms {
        out.add(*t, c * b.unit);
    }
    for (t, c) in &b.terms {
        out.add(*t, c * a.unit);
    }
    for (ta, ca) in &a.terms {
        for (tb, cb) in &b.terms {
            out.add_scaled(&product_of_generators(*ta, *tb), ca * cb);
        }
    }
    out
}

/// `x^{⊗n}`, with `x^{⊗0}` the unit.
pub fn ring_power(x: &TypeCombo, n: u32) -> TypeCombo {
    let mut acc = TypeCombo::unit();
    for _ in 0..n {
        acc = ring_product(&acc, x);
    }
    acc
}

pub fn combo_spectrum(c: &TypeCombo) -> Result<SpectrumCombo> {
    if c.unit != 0 {
        return Err(Error::InvalidInput(
            "the formal unit carries no spectrum".into(),
        ));
    }
    let mut s = SpectrumCombo::new();
    for (t, k) in &c.terms {
        s.add_scaled(&t.spectrum(), *k);
    }
    Ok(s)
}

/// `C_{0,q} ⊗ C_{0,q'}` against `C_{1,0}^{⊗q'} ⊗ C_{0,q} + C_{1,0}^{⊗q} ⊗ C_{0,q'} - C_{1,0}^{⊗(q+q')}`.
pub fn verify_relation_26(q: i64, q2: i64) -> Result<(TypeCombo, SpectrumCombo)> {
    if q < 2 || q2 < 2 {
        return Err(Error::InvalidInput(format!("need q, q' >= 2, got {q}, {q2}")));
    }
    let a = TypeCombo::basic(0, q)?;
    let b = TypeCombo::basic(0, q2)?;
    let line = TypeCombo::basic(1, 0)?;
    let lhs = ring_product(&a, &b);
    let mut rhs = ring_product(&ring_power(&line, q2 as u32), &a);
    rhs.add_scaled(&ring_product(&ring_power(&line, q as u32), &b), 1);
    rhs.add_scaled(&ring_power(&line, (q + q2) as u32), -1);
    let types = lhs.difference(&rhs);
    let spec = &combo_spectrum(&lhs)? - &combo_spectrum(&rhs)?;
    Ok((types, spec))
}

/// Expansion of a chain type into basic types, checked against the resolution formula.
pub fn decompose_chain(c: &ChainType) -> Result<TypeCombo> {
    let p = c.parts();
    let k = p.len();
    let m = c.multiplicities();
    let bt = |a: i64, b: i64| BasicType::new(a, b);
    let mut out = TypeCombo::new();
    if k == 1 {
        out.add(bt(p[0], 0)?, 1);
        return Ok(out);
    }
    if k == 2 {
        out.add(bt(p[0], p[1])?, 1);
        return verified(c, out);
    }
    let mi = |i: usize| m[i - 1];
    let m1 = mi(1);
    let p1 = p[0];
    // Σ_{j>i} p_j, 1-based i.
    let s = |i: usize| -> i64 { p[i..].iter().sum() };
    for i in 2..k {
        out.add(bt(mi(i) - m1 - s(i), m1 + s(i))?, 1);
        if i >= 3 {
            out.add(bt(mi(i), 0)?, -1);
        }
        let ii = i as i64;
        out.add(bt(ii * m1 - p1, 0)?, 1);
        out.add(bt((ii - 1) * m1 - p1, m1)?, -1);
    }
    out.add(bt(p1, m1 - p1)?, 1);
    out.add(bt(2 * m1 - p1, 0)?, -1);
    verified(c, out)
}

fn verified(c: &ChainType, out: TypeCombo) -> Result<TypeCombo> {
    if combo_spectrum(&out)? != c.spectrum() {
        return Err(Error::Verification(format!(
            "expansion of {c} does not reproduce its spectrum"
        )));
    }
    Ok(out)
}
