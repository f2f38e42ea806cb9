//! Signed spectral multisets and spectral-pair multisets.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, is_unit_interval_open, parse_rational, Rational};

/// Finite formal sum `Σ c_v t^v` with `v` in `(-1, 1)`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectrumCombo {
    terms: BTreeMap<Rational, i64>,
}

impl SpectrumCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, i64)>>(terms: I) -> Result<Self> {
        let mut s = Self::new();
        for (v, c) in terms {
            if !is_unit_interval_open(&v) {
                return Err(Error::ValueOutOfRange(fmt_rational(&v)));
            }
            s.add_raw(v, c);
        }
        Ok(s)
    }

    /// Callers guarantee `|v| < 1`.
    pub(crate) fn add_raw(&mut self, v: Rational, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(v.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&v);
        }
    }

    pub fn coeff(&self, v: &Rational) -> i64 {
        self.terms.get(v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, i64)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        if k == 0 {
            return Self::new();
        }
        Self {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: i64) {
        for (v, c) in &other.terms {
            self.add_raw(v.clone(), c * k);
        }
    }

    pub fn max_value(&self) -> Option<&Rational> {
        self.terms.keys().next_back()
    }

    pub fn min_value(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| *c > 0)
    }

    /// Least common multiple of the denominators of the stored values (1 when empty).
    pub fn denominator_lcm(&self) -> i64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        self.terms
            .keys()
            .map(|v| v.denom().to_i64().expect("denominator fits i64"))
            .fold(1, |a, b| a.lcm(&b))
    }

    pub fn max_denominator(&self) -> i64 {
        use num_traits::ToPrimitive;
        self.terms
            .keys()
            .map(|v| v.denom().to_i64().expect("denominator fits i64"))
            .max()
            .unwrap_or(1)
    }
}

impl Add for &SpectrumCombo {
    type Output = SpectrumCombo;
    fn add(self, rhs: &SpectrumCombo) -> SpectrumCombo {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl Sub for &SpectrumCombo {
    type Output = SpectrumCombo;
    fn sub(self, rhs: &SpectrumCombo) -> SpectrumCombo {
        let mut out = self.clone();
        out.add_scaled(rhs, -1);
        out
    }
}

impl Neg for &SpectrumCombo {
    type Output = SpectrumCombo;
    fn neg(self) -> SpectrumCombo {
        self.scaled(-1)
    }
}

impl Mul<i64> for &SpectrumCombo {
    type Output = SpectrumCombo;
    fn mul(self, k: i64) -> SpectrumCombo {
        self.scaled(k)
    }
}

/// `Σ coefficients[i] · combos[i]`.
pub fn combine(combos: &[SpectrumCombo], coefficients: &[i64]) -> Result<SpectrumCombo> {
    if combos.len() != coefficients.len() {
        return Err(Error::LengthMismatch {
            combos: combos.len(),
            coefficients: coefficients.len(),
        });
    }
    let mut out = SpectrumCombo::new();
    for (s, k) in combos.iter().zip(coefficients) {
        out.add_scaled(s, *k);
    }
    Ok(out)
}

/// Half-open window `(lo, hi]`; `lo = None` is the open end at -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    lo: Option<Rational>,
    hi: Rational,
}

impl Window {
    pub fn new(lo: Option<Rational>, hi: Rational) -> Result<Self> {
        let minus_one = -Rational::one();
        if hi >= Rational::one() || hi <= minus_one {
            return Err(Error::InvalidWindow(format!(
                "upper end {} not in (-1, 1)",
                fmt_rational(&hi)
            )));
        }
        if let Some(l) = &lo {
            if *l < minus_one || *l >= hi {
                return Err(Error::InvalidWindow(format!(
                    "need -1 <= lo < hi, got ({}, {}]",
                    fmt_rational(l),
                    fmt_rational(&hi)
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `(-1, hi]`.
    pub fn up_to(hi: Rational) -> Result<Self> {
        Self::new(None, hi)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = match &self.lo {
            Some(l) => v > l,
            None => true,
        };
        above && *v <= self.hi
    }
}

pub fn window_count(s: &SpectrumCombo, w: &Window) -> i64 {
    s.iter().filter(|(v, _)| w.contains(v)).map(|(_, c)| c).sum()
}

pub fn is_symmetric(s: &SpectrumCombo) -> bool {
    s.iter().all(|(v, c)| s.coeff(&-v) == c)
}

pub fn total_mass(s: &SpectrumCombo) -> i64 {
    s.iter().map(|(_, c)| c).sum()
}

fn fmt_exponent(v: &Rational) -> String {
    fmt_rational(v)
}

impl fmt::Display for SpectrumCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (v, c)) in self.iter().enumerate() {
            let body = format!("{}*t^({})", c.abs(), fmt_exponent(v));
            match (i, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Cursor over a single-line input, tracking 1-based columns for diagnostics.
pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    /// Everything up to (not including) `stop`.
    pub fn until(&mut self, stop: char) -> Result<&'a str> {
        let start = self.pos;
        match self.src[start..].find(stop) {
            Some(off) => {
                self.pos = start + off;
                Ok(&self.src[start..start + off])
            }
            None => Err(self.error(format!("missing `{stop}`"))),
        }
    }
}

impl FromStr for SpectrumCombo {
    type Err = Error;

    /// Accepts the canonical text form, in any term order, plus `0` for the empty combo.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        if cur.eat_str("0") && cur.at_end() {
            return Ok(Self::new());
        }
        cur.pos = 0;
        let mut out = Self::new();
        let mut first = true;
        while !cur.at_end() {
            let sign = if cur.eat('-') || cur.eat('−') {
                -1
            } else if cur.eat('+') || first {
                1
            } else {
                return Err(cur.error("expected `+` or `-` between terms"));
            };
            first = false;
            let c = cur.integer()?;
            cur.expect('*')?;
            if !cur.eat_str("t^(") {
                return Err(cur.error("expected `t^(`"));
            }
            let inner_at = cur.pos;
            let inner = cur.until(')')?;
            let v = parse_rational(inner).map_err(|_| {
                let mut at = Cursor::new(s);
                at.pos = inner_at;
                at.error(format!("malformed exponent `{inner}`"))
            })?;
            cur.expect(')')?;
            if !is_unit_interval_open(&v) {
                return Err(Error::ValueOutOfRange(fmt_rational(&v)));
            }
            out.add_raw(v, sign * c);
        }
        Ok(out)
    }
}

/// Finite formal sum `Σ c t^[v, w]` over value/weight pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpectralPairsCombo {
    terms: BTreeMap<(Rational, u8), i64>,
}

impl SpectralPairsCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, u8, i64)>>(terms: I) -> Result<Self> {
        let mut s = Self::new();
        for (v, w, c) in terms {
            if !is_unit_interval_open(&v) {
                return Err(Error::ValueOutOfRange(fmt_rational(&v)));
            }
            s.add_raw(v, w, c);
        }
        Ok(s)
    }

    pub(crate) fn add_raw(&mut self, v: Rational, w: u8, c: i64) {
        if c == 0 {
            return;
        }
        let key = (v, w);
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, v: &Rational, w: u8) -> i64 {
        self.terms.get(&(v.clone(), w)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, u8, i64)> {
        self.terms.iter().map(|((v, w), c)| (v, *w, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_scaled(&mut self, other: &Self, k: i64) {
        for ((v, w), c) in &other.terms {
            self.add_raw(v.clone(), *w, c * k);
        }
    }

    pub fn total_mass(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl fmt::Display for SpectralPairsCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (v, w, c)) in self.iter().enumerate() {
            let body = format!("{}*t^[{},{}]", c.abs(), fmt_rational(v), w);
            match (i, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

pub fn forget_weights(s: &SpectralPairsCombo) -> SpectrumCombo {
    let mut out = SpectrumCombo::new();
    for (v, _, c) in s.iter() {
        out.add_raw(v.clone(), c);
    }
    out
}

/// `Σ_{|k|<m} (m - |k| - 1) t^{k/m}`.
pub fn spec_ordinary(m: i64) -> SpectrumCombo {
    let mut s = SpectrumCombo::new();
    for k in (1 - m)..m {
        s.add_raw(crate::rational::rat(k, m), m - k.abs() - 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn cusp() -> SpectrumCombo {
        SpectrumCombo::from_terms([(rat(-1, 6), 1), (rat(1, 6), 1)]).unwrap()
    }

    #[test]
    fn combine_identity_and_cancellation() {
        let s = spec_ordinary(4);
        assert_eq!(combine(&[s.clone()], &[1]).unwrap(), s);
        assert!(combine(&[s.clone(), s.clone()], &[1, -1]).unwrap().is_empty());
        let o3 = spec_ordinary(3);
        assert_eq!(combine(&[o3.clone(), o3.clone()], &[2, -1]).unwrap(), o3);
        assert!(matches!(
            combine(&[s], &[1, 2]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn windows() {
        let w = Window::up_to(rat(0, 1)).unwrap();
        assert_eq!(window_count(&spec_ordinary(4), &w), 6);
        assert_eq!(window_count(&SpectrumCombo::new(), &w), 0);
        let w = Window::up_to(rat(-1, 3)).unwrap();
        assert_eq!(window_count(&spec_ordinary(3), &w), 1);
        assert!(Window::new(Some(rat(1, 2)), rat(1, 3)).is_err());
        assert!(Window::new(None, rat(1, 1)).is_err());
        assert!(Window::new(Some(rat(-3, 2)), rat(0, 1)).is_err());
    }

    #[test]
    fn symmetry_and_mass() {
        assert!(is_symmetric(&spec_ordinary(4)));
        let half = SpectrumCombo::from_terms([(rat(1, 2), 1)]).unwrap();
        assert!(!is_symmetric(&half));
        assert!(is_symmetric(&cusp()));
        assert_eq!(total_mass(&spec_ordinary(4)), 9);
        assert_eq!(total_mass(&SpectrumCombo::new()), 0);
        assert_eq!(total_mass(&cusp()), 2);
    }

    #[test]
    fn values_outside_unit_interval_rejected() {
        assert!(SpectrumCombo::from_terms([(rat(1, 1), 1)]).is_err());
        assert!(SpectrumCombo::from_terms([(rat(-7, 6), 1)]).is_err());
    }

    #[test]
    fn canonical_text_round_trip() {
        assert_eq!(cusp().to_string(), "1*t^(-1/6) + 1*t^(1/6)");
        assert_eq!(
            spec_ordinary(4).to_string(),
            "1*t^(-1/2) + 2*t^(-1/4) + 3*t^(0) + 2*t^(1/4) + 1*t^(1/2)"
        );
        let s: SpectrumCombo = "-2*t^(0) + 1*t^(2/4)".parse().unwrap();
        assert_eq!(s.to_string(), "-2*t^(0) + 1*t^(1/2)");
        for x in [cusp(), spec_ordinary(5), SpectrumCombo::new(), -&spec_ordinary(3)] {
            assert_eq!(x.to_string().parse::<SpectrumCombo>().unwrap(), x);
        }
    }

    #[test]
    fn parse_errors_carry_columns() {
        match "1*t^(1/2) + 3*q".parse::<SpectrumCombo>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 15),
            other => panic!("{other:?}"),
        }
        assert!("1*t^(1/0)".parse::<SpectrumCombo>().is_err());
    }

    #[test]
    fn forgetting_weights() {
        assert!(forget_weights(&SpectralPairsCombo::new()).is_empty());
        let p = SpectralPairsCombo::from_terms([(rat(1, 6), 1, 1), (rat(-1, 6), 1, 1)]).unwrap();
        assert_eq!(forget_weights(&p), cusp());
        let p = SpectralPairsCombo::from_terms([(rat(0, 1), 1, 2), (rat(0, 1), 2, 1)]).unwrap();
        assert_eq!(forget_weights(&p).to_string(), "3*t^(0)");
    }
}
