//! Cut-and-paste: the four-term swap at one divisor, reduction of trees to chain types,
//! the spectrum-to-basic solver, and multiplicity recovery.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::basic::{combo_spectrum, decompose_chain, BasicType, ChainType, TypeCombo};
use crate::error::{Error, Result};
use crate::formulas::{integral_combo, spec_from_resolution, spec_rational, spp_from_resolution};
use crate::graph::{
    build_chain, build_ordinary, merge_generic, multiplicities_for_load, ResolutionGraph, VertexId,
};
use crate::linalg::{rank, solve_canonical, Solution, SpanModP};
use crate::rational::{int, Rational};
use crate::spectrum::{
    is_symmetric, spec_ordinary, total_mass, SpectralPairsCombo, SpectrumCombo,
};

/// A subset `D` of the attachments at `pivot`: some of its germs and some child subtrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapInstance {
    pub graph: ResolutionGraph,
    pub pivot: VertexId,
    pub detached_germs: i64,
    pub detached_children: Vec<VertexId>,
    /// Intersection number of the branches in `D` with the pivot.
    pub degree: i64,
}

impl SwapInstance {
    /// Degree taken from the intersection form when the tree is genuine, otherwise one per
    /// detached germ or edge.
    pub fn new(
        graph: ResolutionGraph,
        pivot: VertexId,
        detached_germs: i64,
        detached_children: Vec<VertexId>,
    ) -> Result<Self> {
        graph.validate()?;
        if graph.vertex(pivot).is_none() {
            return Err(Error::InvalidInput(format!("pivot {pivot} is not a vertex")));
        }
        let degree = intersection_degree(&graph, pivot, detached_germs, &detached_children)
            .unwrap_or(detached_germs + detached_children.len() as i64);
        Self::with_degree(graph, pivot, detached_germs, detached_children, degree)
    }

    pub fn with_degree(
        graph: ResolutionGraph,
        pivot: VertexId,
        detached_germs: i64,
        mut detached_children: Vec<VertexId>,
        degree: i64,
    ) -> Result<Self> {
        graph.validate()?;
        let Some(v) = graph.vertex(pivot) else {
            return Err(Error::InvalidInput(format!("pivot {pivot} is not a vertex")));
        };
        if detached_germs < 0 || detached_germs > v.germs {
            return Err(Error::InvalidInput(format!(
                "pivot {pivot} carries {} germs, cannot detach {detached_germs}",
                v.germs
            )));
        }
        detached_children.sort_unstable();
        detached_children.dedup();
        let children = graph.children(pivot);
        if let Some(c) = detached_children.iter().find(|c| !children.contains(c)) {
            return Err(Error::InvalidInput(format!("{c} is not a child of pivot {pivot}")));
        }
        if degree < 0 || degree > v.m {
            return Err(Error::InvalidInput(format!(
                "degree {degree} outside [0, {}]",
                v.m
            )));
        }
        Ok(Self {
            graph,
            pivot,
            detached_germs,
            detached_children,
            degree,
        })
    }

    fn detached_vertices(&self) -> BTreeSet<VertexId> {
        self.detached_children
            .iter()
            .flat_map(|c| self.graph.subtree(*c))
            .collect()
    }
}

/// `(D · E_pivot)` computed through the intersection form: the multiplicity that the branches
/// of `D` contribute at the pivot divided by that of a curvette of the pivot.
pub fn intersection_degree(
    g: &ResolutionGraph,
    pivot: VertexId,
    detached_germs: i64,
    detached_children: &[VertexId],
) -> Option<i64> {
    let e = g.self_intersections();
    if e.values().any(|x| !x.is_integer()) {
        return None;
    }
    let mut load: BTreeMap<VertexId, i64> = BTreeMap::new();
    load.insert(pivot, detached_germs);
    for c in detached_children {
        for v in g.subtree(*c) {
            *load.entry(v).or_insert(0) += g.germs(v);
        }
    }
    let n = multiplicities_for_load(g, &e, &load)?;
    let c = multiplicities_for_load(g, &e, &BTreeMap::from([(pivot, 1)]))?;
    if c[&pivot].is_zero() {
        return None;
    }
    let d = &n[&pivot] / &c[&pivot];
    if d.is_integer() {
        d.to_integer().to_i64()
    } else {
        None
    }
}

/// The four trees of a swap: the original, `D` replaced by `degree` germs, everything but `D`
/// replaced by `m - degree` germs (pivot as base), and the ordinary point of the pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapGraphs {
    pub original: ResolutionGraph,
    pub without_d: ResolutionGraph,
    pub only_d: ResolutionGraph,
    pub ordinary: ResolutionGraph,
}

pub fn swap_graphs(s: &SwapInstance) -> Result<SwapGraphs> {
    let g = &s.graph;
    let m = g.m(s.pivot);
    let dset = s.detached_vertices();

    let keep: BTreeSet<VertexId> = g.ids().into_iter().filter(|v| !dset.contains(v)).collect();
    let mut without_d = g.induced(&keep, g.base);
    without_d.vertex_mut(s.pivot).unwrap().germs += s.degree - s.detached_germs;

    let mut only: BTreeSet<VertexId> = dset.clone();
    only.insert(s.pivot);
    let mut only_d = g.induced(&only, s.pivot);
    only_d.vertex_mut(s.pivot).unwrap().germs = s.detached_germs + (m - s.degree);

    Ok(SwapGraphs {
        original: g.clone(),
        without_d,
        only_d,
        ordinary: build_ordinary(m)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationResidual {
    pub spec_residual: SpectrumCombo,
    pub graphs: SwapGraphs,
}

pub fn swap_at_divisor(s: &SwapInstance) -> Result<RelationResidual> {
    let graphs = swap_graphs(s)?;
    // The pieces need not be genuine, so the per-vertex sums are combined before rounding.
    let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (g, sign) in [
        (&graphs.original, 1),
        (&graphs.without_d, -1),
        (&graphs.only_d, -1),
        (&graphs.ordinary, 1),
    ] {
        for (v, c) in spec_rational(g)? {
            *acc.entry(v).or_insert_with(Rational::zero) += c * int(sign);
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(RelationResidual {
        spec_residual: integral_combo(acc)?,
        graphs,
    })
}

/// The same four-term combination for spectral pairs.
pub fn swap_spp_residual(s: &SwapInstance) -> Result<SpectralPairsCombo> {
    let g = swap_graphs(s)?;
    let mut r = spp_from_resolution(&g.original)?;
    r.add_scaled(&spp_from_resolution(&g.without_d)?, -1);
    r.add_scaled(&spp_from_resolution(&g.only_d)?, -1);
    r.add_scaled(&spp_from_resolution(&g.ordinary)?, 1);
    Ok(r)
}

/// `Spec(merge) - Σ Spec(part padded to multiplicity m) + (r - 1) Spec(ord m)`.
pub fn tangential_identity_check(parts: &[ResolutionGraph]) -> Result<SpectrumCombo> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("no parts".into()));
    }
    let m: i64 = parts.iter().map(|g| g.base_multiplicity()).sum();
    let merged = merge_generic(parts)?;
    if merged.base_multiplicity() != m {
        return Err(Error::InvalidInput(format!(
            "merged multiplicity {} differs from the sum {m} of the parts",
            merged.base_multiplicity()
        )));
    }
    let mut r = spec_from_resolution(&merged)?;
    for g in parts {
        let pad = m - g.base_multiplicity();
        let padded = if pad > 0 {
            merge_generic(&[g.clone(), build_ordinary(pad)?])?
        } else {
            g.clone()
        };
        r.add_scaled(&spec_from_resolution(&padded)?, -1);
    }
    r.add_scaled(&spec_ordinary(m), parts.len() as i64 - 1);
    Ok(r)
}

/// Expansion `Σ positive - Σ ord(negative)` of a tree into chain types, before any cancellation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub positive: Vec<ChainType>,
    pub negative: Vec<i64>,
}

impl ChainDecomposition {
    /// Consolidated signed combination; ordinary points appear as one-part chains.
    pub fn combo(&self) -> BTreeMap<ChainType, i64> {
        let mut out: BTreeMap<ChainType, i64> = BTreeMap::new();
        for c in &self.positive {
            *out.entry(c.clone()).or_insert(0) += 1;
        }
        for m in &self.negative {
            *out.entry(ChainType::new(vec![*m]).expect("m >= 1")).or_insert(0) -= 1;
        }
        out.retain(|_, k| *k != 0);
        out
    }

    pub fn spectrum(&self) -> SpectrumCombo {
        let mut s = SpectrumCombo::new();
        for c in &self.positive {
            s.add_scaled(&c.spectrum(), 1);
        }
        for m in &self.negative {
            s.add_scaled(&spec_ordinary(*m), -1);
        }
        s
    }

    pub fn to_types(&self) -> Result<TypeCombo> {
        let mut out = TypeCombo::new();
        for (c, k) in self.combo() {
            out.add_scaled(&decompose_chain(&c)?, k);
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let combo = self.combo();
        if combo.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (c, k)) in combo.iter().enumerate() {
            let body = if k.abs() == 1 {
                c.to_string()
            } else {
                format!("{}*{}", k.abs(), c)
            };
            match (i, *k < 0) {
                (0, false) => s.push_str(&body),
                (0, true) => s.push_str(&format!("-{body}")),
                (_, false) => s.push_str(&format!(" + {body}")),
                (_, true) => s.push_str(&format!(" - {body}")),
            }
        }
        s
    }
}

/// Reads a path `E_1 - E_k - ... - E_2` based at an end as a chain type.
pub fn recognize_chain(g: &ResolutionGraph) -> Option<ChainType> {
    if g.vertices.len() == 1 {
        let v = &g.vertices[0];
        return (v.germs == v.m).then(|| ChainType::new(vec![v.m]).ok()).flatten();
    }
    let adj = g.adjacency();
    if adj.values().any(|n| n.len() > 2) || adj[&g.base].len() != 1 {
        return None;
    }
    let mut path = vec![g.base];
    let mut prev = None;
    let mut cur = g.base;
    loop {
        let next = adj[&cur].iter().copied().find(|w| Some(*w) != prev);
        match next {
            Some(n) => {
                path.push(n);
                prev = Some(cur);
                cur = n;
            }
            None => break,
        }
    }
    let k = path.len();
    // path = [E_1, E_k, E_{k-1}, ..., E_2]
    let mut order = vec![path[0]];
    order.extend(path[1..].iter().rev());
    let p: Vec<i64> = order.iter().map(|v| g.germs(*v)).collect();
    let want = build_chain(&p).ok()?;
    let ok = (0..k).all(|i| want.m(i as VertexId + 1) == g.m(order[i]));
    if ok {
        ChainType::normalized(p).ok()
    } else {
        None
    }
}

const DEPTH_LIMIT: usize = 256;

pub fn decompose_graph(g: &ResolutionGraph) -> Result<ChainDecomposition> {
    g.validate()?;
    let mut out = ChainDecomposition::default();
    reduce(g, 0, &mut out)?;
    if out.positive.len() != out.negative.len() + 1 {
        return Err(Error::Verification(format!(
            "{} chain terms against {} ordinary terms",
            out.positive.len(),
            out.negative.len()
        )));
    }
    if out.spectrum() != spec_from_resolution(g)? {
        return Err(Error::Verification(
            "chain expansion does not reproduce the spectrum".into(),
        ));
    }
    Ok(out)
}

fn reduce(g: &ResolutionGraph, depth: usize, out: &mut ChainDecomposition) -> Result<()> {
    if depth > DEPTH_LIMIT {
        return Err(Error::DepthExceeded(DEPTH_LIMIT));
    }
    if let Some(c) = recognize_chain(g) {
        out.positive.push(c);
        return Ok(());
    }
    let depths = g.depths();
    let parents = g.parents_unchecked();
    let mut pivots: Vec<VertexId> = g.ids();
    pivots.sort_by_key(|v| (std::cmp::Reverse(depths[v]), *v));
    for pivot in pivots {
        let children = g.children(pivot);
        let has_parent = parents.contains_key(&pivot);
        for &child in &children {
            // Swapping out the only non-germ attachment reproduces the tree.
            if !has_parent && children.len() == 1 {
                continue;
            }
            let Some(d) = intersection_degree(g, pivot, 0, &[child]) else {
                continue;
            };
            let Ok(s) = SwapInstance::with_degree(g.clone(), pivot, 0, vec![child], d) else {
                continue;
            };
            let graphs = swap_graphs(&s)?;
            if !graphs.without_d.is_genuine() || !graphs.only_d.is_genuine() {
                continue;
            }
            reduce(&graphs.without_d, depth + 1, out)?;
            reduce(&graphs.only_d, depth + 1, out)?;
            out.negative.push(g.m(pivot));
            return Ok(());
        }
    }
    Err(Error::Verification(format!(
        "no admissible swap reduces the tree {}",
        g.canonical_form()
    )))
}

/// Candidate basic types at scale at most `d_max`, in solver column order:
/// ascending scale, then ascending `q`, then ascending `p`.
pub fn candidates(d_max: i64) -> Vec<BasicType> {
    let mut c = Vec::new();
    for m in 2..=d_max {
        c.push(BasicType::ordinary(m).expect("m >= 2"));
    }
    for q in 2..=d_max / 2 {
        for p in 0..=(d_max - 2 * q) {
            c.push(BasicType::new(p, q).expect("q >= 2"));
        }
    }
    c.sort_by_key(|t| (t.scale(), t.q(), t.p()));
    c
}

/// Default candidate scale: twice the largest denominator, at least 2.
pub fn default_d_max(s: &SpectrumCombo) -> i64 {
    (2 * s.max_denominator()).max(2)
}

fn cached_spectra(types: &[BasicType]) -> Vec<Arc<SpectrumCombo>> {
    static CACHE: OnceLock<Mutex<HashMap<BasicType, Arc<SpectrumCombo>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().expect("cache poisoned");
    types
        .iter()
        .map(|t| cache.entry(*t).or_insert_with(|| Arc::new(t.spectrum())).clone())
        .collect()
}

struct System {
    cols: Vec<Vec<(usize, i64)>>,
    rhs: Vec<i64>,
    nrows: usize,
}

fn build_system(types: &[BasicType], s: &SpectrumCombo) -> System {
    build_system_on(types, s, |_| true)
}

/// Rows for the nonnegative values only; enough for symmetric targets.
fn build_half_system(types: &[BasicType], s: &SpectrumCombo) -> System {
    build_system_on(types, s, |v| !v.is_negative())
}

fn build_system_on(types: &[BasicType], s: &SpectrumCombo, keep: impl Fn(&Rational) -> bool) -> System {
    let mut index: BTreeMap<Rational, usize> = BTreeMap::new();
    let spectra = cached_spectra(types);
    for v in spectra.iter().flat_map(|x| x.values()).chain(s.values()).filter(|v| keep(v)) {
        let n = index.len();
        index.entry(v.clone()).or_insert(n);
    }
    let cols = spectra
        .iter()
        .map(|x| x.iter().filter(|(v, _)| keep(v)).map(|(v, c)| (index[v], c)).collect())
        .collect();
    let mut rhs = vec![0; index.len()];
    for (v, c) in s.iter().filter(|(v, _)| keep(v)) {
        rhs[index[v]] = c;
    }
    System {
        cols,
        rhs,
        nrows: index.len(),
    }
}

/// A decomposition of a spectrum over the candidate basic types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicSolution {
    pub combo: TypeCombo,
    /// Dimension of the space of decompositions; zero means the decomposition is unique.
    pub nullity: usize,
}

pub fn spectrum_to_basic_detailed(s: &SpectrumCombo, d_max: i64) -> Result<BasicSolution> {
    if d_max < 2 {
        return Err(Error::InvalidInput(format!("D_max must be at least 2, got {d_max}")));
    }
    let types = candidates(d_max);
    let sys = build_system(&types, s);
    match solve_canonical(&sys.cols, sys.nrows, &sys.rhs) {
        Solution::Inconsistent => Err(Error::Infeasible(format!(
            "no combination of basic types with scale <= {d_max} has this spectrum"
        ))),
        Solution::Found { x, nullity } => {
            let mut combo = TypeCombo::new();
            for (t, c) in types.iter().zip(&x) {
                if c.is_zero() {
                    continue;
                }
                if !c.is_integer() {
                    return Err(Error::NonIntegral(format!(
                        "coefficient {c} on {t} (D_max {d_max} may be too small)"
                    )));
                }
                combo.add(*t, c.to_integer().to_i64().expect("coefficient fits i64"));
            }
            debug_assert_eq!(combo_spectrum(&combo).unwrap(), *s);
            Ok(BasicSolution { combo, nullity })
        }
    }
}

pub fn spectrum_to_basic(s: &SpectrumCombo, d_max: i64) -> Result<TypeCombo> {
    spectrum_to_basic_detailed(s, d_max).map(|x| x.combo)
}

/// Exact rank of the candidate spectra at scale `d_max`, with the candidate count.
pub fn basis_rank(d_max: i64) -> (usize, usize) {
    let types = candidates(d_max);
    let sys = build_system(&types, &SpectrumCombo::new());
    let rows: Vec<Vec<Rational>> = sys
        .cols
        .iter()
        .map(|col| {
            let mut r = vec![Rational::zero(); sys.nrows];
            for &(i, v) in col {
                r[i] = int(v);
            }
            r
        })
        .collect();
    (types.len(), rank(&rows))
}

/// Integral relations `Σ a_t Spec(t) = 0` among the candidates, one per dependent column.
pub fn basis_relations(d_max: i64) -> Vec<TypeCombo> {
    let types = candidates(d_max);
    let mut out = Vec::new();
    for j in 0..types.len() {
        let target = types[j].spectrum();
        let prev = &types[..j];
        let sys = build_system(prev, &target);
        if let Solution::Found { x, .. } = solve_canonical(&sys.cols, sys.nrows, &sys.rhs) {
            let den = x
                .iter()
                .fold(num_bigint::BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
            let den_r = Rational::from_integer(den.clone());
            let mut rel = TypeCombo::new();
            rel.add(types[j], -den.to_i64().expect("small denominator"));
            for (t, c) in prev.iter().zip(&x) {
                let k = (c * &den_r).to_integer().to_i64().expect("small coefficient");
                rel.add(*t, k);
            }
            out.push(rel);
        }
    }
    out
}

/// Sorted values with running coefficient sums, for `#(values <= x)` by bisection.
struct Cumulative {
    values: Vec<Rational>,
    sums: Vec<i64>,
}

impl Cumulative {
    fn new(s: &SpectrumCombo) -> Self {
        let mut acc = 0;
        let (values, sums) = s
            .iter()
            .map(|(v, c)| {
                acc += c;
                (v.clone(), acc)
            })
            .unzip();
        Self { values, sums }
    }

    fn upto(&self, x: &Rational) -> i64 {
        match self.values.partition_point(|v| v <= x) {
            0 => 0,
            k => self.sums[k - 1],
        }
    }

    /// Mass in `(a, a + 1]`.
    fn window(&self, a: &Rational) -> i64 {
        self.upto(&(a + Rational::one())) - self.upto(a)
    }
}

/// `true` when `s` dominates `t` on every unit window `(a, a+1]`, as semicontinuity demands
/// of a germ that deforms to `t`. Window counts only change at `a = v` or `a = v - 1`.
fn dominates(s: &Cumulative, sv: &SpectrumCombo, t: &SpectrumCombo) -> bool {
    let tc = Cumulative::new(t);
    let one = Rational::one();
    sv.values()
        .chain(t.values())
        .flat_map(|v| [v.clone(), v - &one])
        .filter(|a| *a > int(-2) && *a < Rational::zero())
        .all(|a| s.window(&a) >= tc.window(&a))
}

/// Largest `m` whose ordinary point is dominated window by window; bounds the multiplicity.
pub fn semicontinuity_bound(s: &SpectrumCombo) -> i64 {
    let mu = total_mass(s);
    let cs = Cumulative::new(s);
    let mut best = 1;
    let mut m = 2;
    while (m - 1) * (m - 1) <= mu {
        if dominates(&cs, s, &spec_ordinary(m)) {
            best = m;
        }
        m += 1;
    }
    best
}

fn support(sys: &System) -> Vec<(usize, i64)> {
    sys.rhs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(i, c)| (i, *c))
        .collect()
}

/// Smallest scale `D <= d_max` whose candidates span `s`, if any. A value with denominator `n`
/// only occurs in candidates of scale at least `n`, so the scan starts there.
pub fn minimal_scale(s: &SpectrumCombo, d_max: i64) -> Option<i64> {
    if !is_symmetric(s) {
        return None;
    }
    let start = s.max_denominator().max(2);
    if start > d_max {
        return None;
    }
    let types = candidates(d_max);
    let first = types.partition_point(|t| t.scale() <= start);
    let mut sys = build_half_system(&types[..first], s);
    let mut span = SpanModP::new(sys.nrows);
    for col in &sys.cols {
        span.insert(col);
    }
    if span.contains(&support(&sys)) {
        return Some(start);
    }
    // Larger scales introduce new values: rebuild the index over everything once.
    sys = build_half_system(&types, s);
    let target = support(&sys);
    let mut span = SpanModP::new(sys.nrows);
    for (k, t) in types.iter().enumerate() {
        span.insert(&sys.cols[k]);
        let last = types.get(k + 1).map_or(true, |u| u.scale() != t.scale());
        if last && t.scale() > start && span.contains(&target) {
            return Some(t.scale());
        }
    }
    None
}

/// Largest `w` such that `s` lies in the span of the candidates at scale `d` of multiplicity
/// at least `w`.
pub fn span_bound(s: &SpectrumCombo, d: i64) -> Option<i64> {
    if !is_symmetric(s) {
        return None;
    }
    let mut types = candidates(d);
    types.sort_by_key(|t| std::cmp::Reverse(t.multiplicity()));
    let sys = build_half_system(&types, s);
    let target = support(&sys);
    let mut span = SpanModP::new(sys.nrows);
    let mut k = 0;
    while k < types.len() {
        let w = types[k].multiplicity();
        while k < types.len() && types[k].multiplicity() == w {
            span.insert(&sys.cols[k]);
            k += 1;
        }
        if span.contains(&target) {
            return Some(w);
        }
    }
    None
}

/// Multiplicity of a genuine germ from its spectrum: the smaller of the semicontinuity bound
/// and the span bound at scale `d_max`.
pub fn recover_multiplicity(s: &SpectrumCombo, d_max: i64) -> Result<i64> {
    if !is_symmetric(s) || !s.has_nonnegative_coefficients() {
        return Err(Error::InvalidInput(
            "not the spectrum of a curve germ (asymmetric or negative)".into(),
        ));
    }
    if s.is_empty() {
        return Ok(1);
    }
    let semi = semicontinuity_bound(s);
    match minimal_scale(s, d_max).and_then(|d| span_bound(s, d)) {
        Some(w) => Ok(w.min(semi)),
        None => Err(Error::Infeasible(format!(
            "spectrum not expressible with basic types of scale <= {d_max}"
        ))),
    }
}

/// Search limits for [`spp_recombination_counterexample`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_multiplicity: i64,
}

#[derive(Clone, Debug)]
pub struct SppWitness {
    pub instance: SwapInstance,
    pub spp_residual: SpectralPairsCombo,
    pub spec_residual: SpectrumCombo,
}

fn single_direction_parts(max_m: i64) -> Vec<ResolutionGraph> {
    let mut out = Vec::new();
    for m1 in 1..=max_m {
        out.push(build_ordinary(m1).unwrap());
    }
    for p1 in 0..=max_m {
        for p2 in 1..=max_m {
            for p3 in 0..=max_m {
                let p = if p3 == 0 { vec![p1, p2] } else { vec![p1, p2, p3] };
                if let Ok(g) = build_chain(&p) {
                    if g.base_multiplicity() <= max_m {
                        out.push(g);
                    }
                }
            }
        }
    }
    out.sort_by_key(|g| (g.base_multiplicity(), g.vertices.len(), g.canonical_form()));
    out.dedup_by(|a, b| a.is_isomorphic(b));
    out
}

/// Smallest swap (by pivot multiplicity) whose Spec residual vanishes while the Spp residual does not.
pub fn spp_recombination_counterexample(budget: SearchBudget) -> Option<SppWitness> {
    let parts = single_direction_parts(budget.max_multiplicity);
    let mut instances: Vec<SwapInstance> = Vec::new();
    for g in &parts {
        for v in g.ids() {
            for c in g.children(v) {
                if let Ok(s) = SwapInstance::new(g.clone(), v, 0, vec![c]) {
                    instances.push(s);
                }
            }
        }
    }
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i..] {
            if a.base_multiplicity() + b.base_multiplicity() > budget.max_multiplicity {
                continue;
            }
            let Ok(g) = merge_generic(&[a.clone(), b.clone()]) else {
                continue;
            };
            for c in g.children(g.base) {
                if let Ok(s) = SwapInstance::new(g.clone(), g.base, 0, vec![c]) {
                    instances.push(s);
                }
            }
        }
    }
    instances.sort_by_key(|s| (s.graph.m(s.pivot), s.graph.vertices.len()));
    for s in instances {
        if s.graph.m(s.pivot) > budget.max_multiplicity {
            continue;
        }
        let Ok(spec) = swap_at_divisor(&s) else {
            continue;
        };
        if !spec.spec_residual.is_empty() {
            continue;
        }
        let Ok(spp) = swap_spp_residual(&s) else {
            continue;
        };
        if !spp.is_empty() {
            return Some(SppWitness {
                instance: s,
                spp_residual: spp,
                spec_residual: spec.spec_residual,
            });
        }
    }
    None
}
