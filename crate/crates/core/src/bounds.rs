//! Inequalities on spectra: the paired-value bound with its sequence condition, the relative
//! bracket, stabilization counts and the curve form of the Durfee-type bound.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::graph::ResolutionGraph;
use crate::rational::{fmt_rational, int, rat, Rational};
use crate::spectrum::{
    is_symmetric, spec_ordinary, total_mass, window_count, SpectrumCombo, Window,
};

/// `S - Spec(ord m)`.
pub fn bracket(s: &SpectrumCombo, m: i64) -> Result<SpectrumCombo> {
    if m < 1 {
        return Err(Error::ValueOutOfRange(format!("multiplicity {m} < 1")));
    }
    Ok(s - &spec_ordinary(m))
}

fn check_increasing(seq: &[Rational]) -> Result<()> {
    for w in seq.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput(format!(
                "sequence not strictly increasing at {}, {}",
                fmt_rational(&w[0]),
                fmt_rational(&w[1])
            )));
        }
    }
    if let Some(v) = seq.iter().find(|v| !v.is_positive() || **v >= Rational::one()) {
        return Err(Error::ValueOutOfRange(format!("{} not in (0, 1)", fmt_rational(v))));
    }
    Ok(())
}

/// `α_{i+1} + α_{k-i} < 1` for `0 <= i < (k-1)/2`, and the middle value at most `1/2` when
/// `k` is odd.
pub fn g_condition(seq: &[Rational]) -> Result<bool> {
    check_increasing(seq)?;
    let k = seq.len();
    let one = Rational::one();
    // 2i < k - 1, 0-based pairs (i, k-1-i)
    let pairs_ok = (0..k).take_while(|i| 2 * i + 1 < k).all(|i| &seq[i] + &seq[k - 1 - i] < one);
    let middle_ok = k % 2 == 0 || seq[k / 2] <= rat(1, 2);
    Ok(pairs_ok && middle_ok)
}

/// Sorted union without repetitions of two sequences that satisfy the condition; the result
/// is checked to satisfy it as well.
pub fn merge_sequences(a: &[Rational], b: &[Rational]) -> Result<Vec<Rational>> {
    for (name, s) in [("first", a), ("second", b)] {
        if !g_condition(s)? {
            return Err(Error::InvalidInput(format!("{name} sequence violates the condition")));
        }
    }
    let mut out: Vec<Rational> = a.iter().chain(b).cloned().collect();
    out.sort();
    out.dedup();
    if !g_condition(&out)? {
        return Err(Error::Verification("merged sequence violates the condition".into()));
    }
    Ok(out)
}

/// Largest set of distinct multiplicities of the tree with `max < 2 min`.
pub fn givental_r(g: &ResolutionGraph) -> i64 {
    let mut ms = g.multiplicities();
    ms.sort_unstable();
    ms.dedup();
    let mut best = 0;
    let mut lo = 0;
    for hi in 0..ms.len() {
        while ms[hi] >= 2 * ms[lo] {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best.max(1) as i64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GiventalReport {
    pub r: i64,
    /// Distinct positive spectral values, increasing.
    pub alphas: Vec<Rational>,
    /// 1-based pairs `(i + r + 1, k - i)` evaluated.
    pub pairs: Vec<(usize, usize)>,
    pub violations: Vec<(usize, usize)>,
    pub equality_indices: Vec<(usize, usize)>,
}

impl GiventalReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// `r=2, k=1, no pairs, OK`, or the pairs with `=` marking equality and `!` violations.
    pub fn render(&self) -> String {
        let pairs = if self.pairs.is_empty() {
            "no pairs".to_string()
        } else {
            let shown: Vec<String> = self
                .pairs
                .iter()
                .map(|p| {
                    let mark = if self.violations.contains(p) {
                        "!"
                    } else if self.equality_indices.contains(p) {
                        "="
                    } else {
                        ""
                    };
                    format!("({},{}){mark}", p.0, p.1)
                })
                .collect();
            format!("pairs {}", shown.join(" "))
        };
        format!(
            "r={}, k={}, {pairs}, {}",
            self.r,
            self.alphas.len(),
            if self.holds() { "OK" } else { "FAILS" }
        )
    }
}

/// `α_{i+r+1} + α_{k-i} <= 1` over the distinct positive values, for all `i >= 0` with
/// `i + r + 1 < k - i`.
pub fn givental_check(s: &SpectrumCombo, r: i64) -> Result<GiventalReport> {
    if r < 1 {
        return Err(Error::ValueOutOfRange(format!("r = {r} < 1")));
    }
    if !is_symmetric(s) || !s.has_nonnegative_coefficients() {
        return Err(Error::InvalidInput("spectrum must be symmetric and nonnegative".into()));
    }
    let alphas: Vec<Rational> = s.values().filter(|v| v.is_positive()).cloned().collect();
    let k = alphas.len();
    let r = r as usize;
    let one = Rational::one();
    let mut report = GiventalReport {
        r: r as i64,
        alphas,
        pairs: Vec::new(),
        violations: Vec::new(),
        equality_indices: Vec::new(),
    };
    let mut i = 0;
    while i < k && i + r + 1 < k - i {
        let (a, b) = (i + r + 1, k - i);
        let sum = &report.alphas[a - 1] + &report.alphas[b - 1];
        report.pairs.push((a, b));
        if sum > one {
            report.violations.push((a, b));
        } else if sum == one {
            report.equality_indices.push((a, b));
        }
        i += 1;
    }
    Ok(report)
}

/// `2 |Spec[(C,0)] ∩ (-1, -1/2]|` for a germ of multiplicity `m`.
pub fn stabilization_count(s: &SpectrumCombo, m: i64) -> Result<i64> {
    let b = bracket(s, m)?;
    Ok(2 * window_count(&b, &Window::up_to(rat(-1, 2))?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

impl BoundReport {
    pub fn render(&self) -> String {
        format!(
            "{} > {} {}",
            fmt_rational(&self.lhs),
            fmt_rational(&self.rhs),
            if self.holds { "OK" } else { "FAILS" }
        )
    }
}

pub(crate) fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha.is_negative() || *alpha >= Rational::one() {
        return Err(Error::ValueOutOfRange(format!(
            "alpha = {} not in [0, 1)",
            fmt_rational(alpha)
        )));
    }
    Ok(())
}

/// `μ + 2m/(1-α)^2 > 2/(1-α)^2 · |S ∩ (-1, -α]|`.
pub fn durfee_curve_check(s: &SpectrumCombo, m: i64, alpha: &Rational) -> Result<BoundReport> {
    check_alpha(alpha)?;
    let c = Rational::one() - alpha;
    let c2 = &c * &c;
    let count = window_count(s, &Window::up_to(-alpha.clone())?);
    let lhs = int(total_mass(s)) + int(2 * m) / &c2;
    let rhs = int(2 * count) / &c2;
    let holds = lhs > rhs;
    Ok(BoundReport { lhs, rhs, holds })
}

/// Table of `stabilization_count(Spec C_{p1,p2}, p1 + p2)` for `p1, p2 <= n`.
pub fn stabilization_table(n: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for p1 in 0..=n {
        for p2 in 0..=n {
            if p1 + p2 < 1 {
                continue;
            }
            let Ok(t) = crate::basic::BasicType::new(p1, p2) else {
                continue;
            };
            let v = stabilization_count(&t.spectrum(), t.multiplicity()).expect("m >= 1");
            out.push((p1, p2, v));
        }
    }
    out
}
