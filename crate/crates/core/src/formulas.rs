//! Spectrum and spectral pairs read off a decorated resolution tree.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{ResolutionGraph, VertexId};
use crate::rational::{fmt_rational, fract, int, rat, Rational};
use crate::spectrum::{SpectralPairsCombo, SpectrumCombo};

/// `d_{k,i}` for `0 <= k < m_i`.
pub fn d_coefficient(
    g: &ResolutionGraph,
    adj: &BTreeMap<VertexId, Vec<VertexId>>,
    parent: &BTreeMap<VertexId, VertexId>,
    i: VertexId,
    k: i64,
) -> Rational {
    let mi = g.m(i);
    let mut d = int(-1) + rat(g.germs(i) * (mi - k), mi);
    let p = parent.get(&i).copied();
    for &j in &adj[&i] {
        if Some(j) == p {
            continue;
        }
        d += fract(&rat(-k * g.m(j), mi));
    }
    if let Some(p) = p {
        d += Rational::one() - fract(&rat(k * g.m(p), mi));
    }
    d
}

/// Per-vertex formula with rational coefficients; formal trees may leave fractions.
pub fn spec_rational(g: &ResolutionGraph) -> Result<BTreeMap<Rational, Rational>> {
    g.validate()?;
    let adj = g.adjacency();
    let parent = g.parents_unchecked();
    let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
    for v in &g.vertices {
        for k in 0..v.m {
            let d = d_coefficient(g, &adj, &parent, v.id, k);
            if d.is_zero() {
                continue;
            }
            *acc.entry(rat(k, v.m)).or_insert_with(Rational::zero) += &d;
            if k > 0 {
                *acc.entry(rat(-k, v.m)).or_insert_with(Rational::zero) += &d;
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(acc)
}

pub fn spec_from_resolution(g: &ResolutionGraph) -> Result<SpectrumCombo> {
    integral_combo(spec_rational(g)?)
}

/// A rational-coefficient combination whose coefficients must all be integers.
pub fn integral_combo(acc: BTreeMap<Rational, Rational>) -> Result<SpectrumCombo> {
    let mut out = SpectrumCombo::new();
    for (v, c) in acc {
        if !c.is_integer() {
            return Err(Error::NonIntegral(format!(
                "coefficient {} at t^({})",
                fmt_rational(&c),
                fmt_rational(&v)
            )));
        }
        out.add_raw(v, c.to_integer().to_i64().expect("coefficient fits i64"));
    }
    Ok(out)
}

pub fn spp_from_resolution(g: &ResolutionGraph) -> Result<SpectralPairsCombo> {
    let gcd = g.gcd_data()?;
    let adj = g.adjacency();
    let mut acc: BTreeMap<(Rational, u8), Rational> = BTreeMap::new();
    let mut put = |v: Rational, w: u8, c: Rational| {
        *acc.entry((v, w)).or_insert_with(Rational::zero) += c;
    };
    for v in &g.vertices {
        let mi = v.m;
        let ri = gcd.r[&v.id];
        // a_i
        for s in 1..mi {
            if (s * ri) % mi == 0 {
                continue;
            }
            let mut c = int(-1) + rat(v.germs * s, mi);
            for &j in &adj[&v.id] {
                c += fract(&rat(s * g.m(j), mi));
            }
            put(rat(s, mi) - Rational::one(), 1, c.clone());
            put(Rational::one() - rat(s, mi), 1, c);
        }
        // -b_i, for every vertex
        for s in 1..ri {
            put(rat(-s, ri), 2, int(-1));
            put(rat(s, ri), 0, int(-1));
        }
        // c_i, away from the base
        if let Some(&di) = gcd.delta.get(&v.id) {
            for s in 1..di {
                put(rat(-s, di), 2, int(1));
                put(rat(s, di), 0, int(1));
            }
        }
    }
    put(Rational::zero(), 1, int(g.total_germs() - 1));
    let mut out = SpectralPairsCombo::new();
    for ((v, w), c) in acc {
        if c.is_zero() {
            continue;
        }
        if !c.is_integer() {
            return Err(Error::NonIntegral(format!(
                "coefficient {} at t^[{},{}]",
                fmt_rational(&c),
                fmt_rational(&v),
                w
            )));
        }
        out.add_raw(v, w, c.to_integer().to_i64().expect("coefficient fits i64"));
    }
    Ok(out)
}
