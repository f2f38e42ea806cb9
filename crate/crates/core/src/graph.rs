//! Decorated resolution trees: vertices `E_i` with multiplicities and strict-transform counts,
//! a distinguished base divisor, and builders for the standard families.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::rational::{int, Rational};

pub type VertexId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: VertexId,
    pub m: i64,
    pub germs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[VertexId; 2]>,
    pub base: VertexId,
}

/// `delta[i] = gcd(m_i, m_p(i))` for non-base `i`; `r[i]` is 1 on germ-carrying vertices and
/// otherwise the gcd of `m_i` with all neighbouring multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdData {
    pub delta: BTreeMap<VertexId, i64>,
    pub r: BTreeMap<VertexId, i64>,
}

impl ResolutionGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub(crate) fn vertex_mut(&mut self, id: VertexId) -> Option<&mut Vertex> {
        self.vertices.iter_mut().find(|v| v.id == id)
    }

    pub fn m(&self, id: VertexId) -> i64 {
        self.vertex(id).map_or(0, |v| v.m)
    }

    pub fn germs(&self, id: VertexId) -> i64 {
        self.vertex(id).map_or(0, |v| v.germs)
    }

    pub fn ids(&self) -> Vec<VertexId> {
        self.vertices.iter().map(|v| v.id).collect()
    }

    pub fn total_germs(&self) -> i64 {
        self.vertices.iter().map(|v| v.germs).sum()
    }

    pub fn base_multiplicity(&self) -> i64 {
        self.m(self.base)
    }

    pub fn multiplicities(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.m).collect()
    }

    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertices.iter().map(|v| (v.id, Vec::new())).collect();
        for [a, b] in &self.edges {
            adj.entry(*a).or_default().push(*b);
            adj.entry(*b).or_default().push(*a);
        }
        for n in adj.values_mut() {
            n.sort_unstable();
        }
        adj
    }

    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.vertices.is_empty() {
            issues.push("no vertices".to_string());
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id) {
                issues.push(format!("duplicate vertex id {}", v.id));
            }
            if v.m < 1 {
                issues.push(format!("vertex {}: multiplicity {} is not positive", v.id, v.m));
            }
            if v.germs < 0 {
                issues.push(format!("vertex {}: negative germ count {}", v.id, v.germs));
            }
        }
        if !seen.contains(&self.base) {
            issues.push(format!("base {} is not a vertex", self.base));
        }
        let mut edge_set = BTreeSet::new();
        for [a, b] in &self.edges {
            for x in [a, b] {
                if !seen.contains(x) {
                    issues.push(format!("edge [{a},{b}] references unknown vertex {x}"));
                }
            }
            if a == b {
                issues.push(format!("edge [{a},{b}] is a loop: not a tree"));
            }
            if !edge_set.insert((*a.min(b), *a.max(b))) {
                issues.push(format!("edge [{a},{b}] repeated: not a tree"));
            }
        }
        if issues.is_empty() {
            // Union-find: a redundant edge closes a cycle; leftover components mean disconnected.
            let ids: Vec<VertexId> = self.ids();
            let index: BTreeMap<VertexId, usize> =
                ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
            let mut parent: Vec<usize> = (0..ids.len()).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for [a, b] in &self.edges {
                let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
                if ra == rb {
                    issues.push(format!("edge [{a},{b}] closes a cycle: not a tree"));
                } else {
                    parent[ra] = rb;
                }
            }
            let roots: BTreeSet<usize> = (0..ids.len()).map(|i| find(&mut parent, i)).collect();
            if roots.len() > 1 {
                issues.push(format!("disconnected: {} components", roots.len()));
            }
        }
        if issues.is_empty() && self.vertices.len() > 1 && self.total_germs() == 0 {
            issues.push("no vertex carries a strict transform".to_string());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(issues))
        }
    }

    /// Parent map `p(i)` toward the base.
    pub fn chronology(&self) -> Result<BTreeMap<VertexId, VertexId>> {
        self.validate()?;
        Ok(self.parents_unchecked())
    }

    pub(crate) fn parents_unchecked(&self) -> BTreeMap<VertexId, VertexId> {
        let adj = self.adjacency();
        let mut parent = BTreeMap::new();
        let mut stack = vec![self.base];
        let mut seen = BTreeSet::from([self.base]);
        while let Some(u) = stack.pop() {
            for &w in &adj[&u] {
                if seen.insert(w) {
                    parent.insert(w, u);
                    stack.push(w);
                }
            }
        }
        parent
    }

    /// Distance from the base, per vertex.
    pub fn depths(&self) -> BTreeMap<VertexId, usize> {
        let parent = self.parents_unchecked();
        let mut depth = BTreeMap::from([(self.base, 0usize)]);
        for id in self.ids() {
            let mut d = 0;
            let mut cur = id;
            while let Some(&p) = parent.get(&cur) {
                d += 1;
                cur = p;
            }
            depth.insert(id, d);
        }
        depth
    }

    pub fn children(&self, id: VertexId) -> Vec<VertexId> {
        let parent = self.parents_unchecked();
        let mut c: Vec<VertexId> = parent
            .iter()
            .filter(|(_, p)| **p == id)
            .map(|(c, _)| *c)
            .collect();
        c.sort_unstable();
        c
    }

    /// Vertices of the subtree hanging below `root` (root included).
    pub fn subtree(&self, root: VertexId) -> BTreeSet<VertexId> {
        let parent = self.parents_unchecked();
        self.ids()
            .into_iter()
            .filter(|&id| {
                let mut cur = id;
                loop {
                    if cur == root {
                        return true;
                    }
                    match parent.get(&cur) {
                        Some(&p) => cur = p,
                        None => return false,
                    }
                }
            })
            .collect()
    }

    pub fn gcd_data(&self) -> Result<GcdData> {
        self.validate()?;
        let parent = self.parents_unchecked();
        let adj = self.adjacency();
        let mut delta = BTreeMap::new();
        let mut r = BTreeMap::new();
        for v in &self.vertices {
            if let Some(&p) = parent.get(&v.id) {
                delta.insert(v.id, v.m.gcd(&self.m(p)));
            }
            let ri = if v.germs > 0 {
                1
            } else {
                adj[&v.id].iter().fold(v.m, |acc, j| acc.gcd(&self.m(*j)))
            };
            r.insert(v.id, ri);
        }
        Ok(GcdData { delta, r })
    }

    /// Minus the self-intersection of each `E_l`, read off from `E_l · π*(f) = 0`:
    /// `e_l m_l = Σ_adjacent m_j + germs_l`. Integral on genuine resolutions.
    pub fn self_intersections(&self) -> BTreeMap<VertexId, Rational> {
        let adj = self.adjacency();
        self.vertices
            .iter()
            .map(|v| {
                let s: i64 = adj[&v.id].iter().map(|j| self.m(*j)).sum::<i64>() + v.germs;
                (v.id, Rational::new(s.into(), v.m.into()))
            })
            .collect()
    }

    /// Integral self-intersections, or `None`.
    pub(crate) fn integral_self_intersections(&self) -> Option<BTreeMap<VertexId, i64>> {
        self.self_intersections()
            .into_iter()
            .map(|(id, e)| {
                if e.is_integer() {
                    e.to_integer().to_i64().map(|x| (id, x))
                } else {
                    None
                }
            })
            .collect()
    }

    /// True when the self-intersections are integral and the configuration contracts to a
    /// smooth point by successive contraction of (-1)-curves of valence at most two.
    pub fn is_genuine(&self) -> bool {
        if self.validate().is_err() {
            return false;
        }
        let Some(e) = self.integral_self_intersections() else {
            return false;
        };
        if e.values().any(|x| *x < 1) {
            return false;
        }
        let mut e = e;
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = self
            .adjacency()
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().collect()))
            .collect();
        while !adj.is_empty() {
            let Some(&v) = adj
                .iter()
                .find(|(id, n)| e[*id] == 1 && n.len() <= 2)
                .map(|(id, _)| id)
            else {
                return false;
            };
            let nb: Vec<VertexId> = adj.remove(&v).unwrap().into_iter().collect();
            for w in &nb {
                adj.get_mut(w).unwrap().remove(&v);
                let ew = e.get_mut(w).unwrap();
                *ew -= 1;
                if *ew < 1 {
                    return false;
                }
            }
            if let [a, b] = nb[..] {
                adj.get_mut(&a).unwrap().insert(b);
                adj.get_mut(&b).unwrap().insert(a);
            }
        }
        true
    }

    /// Rooted-tree normal form, independent of vertex ids.
    pub fn canonical_form(&self) -> String {
        let adj = self.adjacency();
        fn enc(g: &ResolutionGraph, adj: &BTreeMap<VertexId, Vec<VertexId>>, v: VertexId, p: Option<VertexId>) -> String {
            let mut kids: Vec<String> = adj[&v]
                .iter()
                .filter(|w| Some(**w) != p)
                .map(|w| enc(g, adj, *w, Some(v)))
                .collect();
            kids.sort();
            format!("({},{}[{}])", g.m(v), g.germs(v), kids.join(""))
        }
        enc(self, &adj, self.base, None)
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// The subgraph on `keep`, based at `base`.
    pub(crate) fn induced(&self, keep: &BTreeSet<VertexId>, base: VertexId) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .filter(|v| keep.contains(&v.id))
                .cloned()
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|[a, b]| keep.contains(a) && keep.contains(b))
                .copied()
                .collect(),
            base,
        }
    }
}

/// Intersection form `M` (diagonal `-e_l`, 1 on edges) over `ids`.
pub(crate) fn intersection_matrix(
    g: &ResolutionGraph,
    ids: &[VertexId],
    e: &BTreeMap<VertexId, Rational>,
) -> Vec<Vec<Rational>> {
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut m = vec![vec![Rational::zero(); ids.len()]; ids.len()];
    for (i, id) in ids.iter().enumerate() {
        m[i][i] = -e[id].clone();
    }
    for [a, b] in &g.edges {
        let (i, j) = (index[a], index[b]);
        m[i][j] = Rational::one();
        m[j][i] = Rational::one();
    }
    m
}

/// Total-transform multiplicities of the curve whose strict transforms meet `E_l` in
/// `load[l]` points, for the tree's fixed self-intersections.
pub(crate) fn multiplicities_for_load(
    g: &ResolutionGraph,
    e: &BTreeMap<VertexId, Rational>,
    load: &BTreeMap<VertexId, i64>,
) -> Option<BTreeMap<VertexId, Rational>> {
    let ids = g.ids();
    let m = intersection_matrix(g, &ids, e);
    let rhs = ids
        .iter()
        .map(|id| -int(load.get(id).copied().unwrap_or(0)))
        .collect();
    let x = solve_square(m, rhs)?;
    Some(ids.into_iter().zip(x).collect())
}

pub fn build_ordinary(m: i64) -> Result<ResolutionGraph> {
    if m < 1 {
        return Err(Error::InvalidInput(format!("ordinary point needs m >= 1, got {m}")));
    }
    Ok(ResolutionGraph {
        vertices: vec![Vertex { id: 1, m, germs: m }],
        edges: vec![],
        base: 1,
    })
}

/// Multiplicities `m_1, ..., m_k` of the chain type `p_1, ..., p_k`.
pub fn chain_multiplicities(p: &[i64]) -> Result<Vec<i64>> {
    if p.is_empty() {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    if p.iter().any(|x| *x < 0) {
        return Err(Error::InvalidInput(format!("negative chain part in {p:?}")));
    }
    let k = p.len();
    let m1: i64 = p[0] + (1..k).map(|i| i as i64 * p[i]).sum::<i64>();
    if m1 < 1 {
        return Err(Error::InvalidInput(format!("chain {p:?} has m1 = 0")));
    }
    let tail = |i: usize| -> i64 { p[i..].iter().sum() };
    let mut m = vec![m1];
    if k >= 2 {
        m.push(m1 + tail(1));
        for i in 2..k {
            // m_{i+1} = m_i + m_1 + Σ_{j>i} p_j, with 1-based i.
            let next = m[i - 1] + m1 + tail(i);
            m.push(next);
        }
        assert_eq!(m[k - 1], k as i64 * m1 - p[0]);
    }
    Ok(m)
}

/// Path `E_1 - E_k - E_{k-1} - ... - E_2` with `p_i` germs on `E_i`; vertex `E_i` has id `i`.
pub fn build_chain(p: &[i64]) -> Result<ResolutionGraph> {
    let m = chain_multiplicities(p)?;
    let k = p.len();
    if k == 1 {
        return build_ordinary(p[0]);
    }
    let vertices = (0..k)
        .map(|i| Vertex {
            id: i as VertexId + 1,
            m: m[i],
            germs: p[i],
        })
        .collect();
    let order: Vec<VertexId> = std::iter::once(1).chain((2..=k as VertexId).rev()).collect();
    let edges = order.windows(2).map(|w| [w[0], w[1]]).collect();
    Ok(ResolutionGraph {
        vertices,
        edges,
        base: 1,
    })
}

pub fn build_basic(p: i64, q: i64) -> Result<ResolutionGraph> {
    if p < 0 || q < 0 || (p == 0 && q == 0) {
        return Err(Error::InvalidType(format!("basic({p},{q})")));
    }
    match q {
        0 | 1 => build_ordinary(p + q),
        _ => build_chain(&[p, q]),
    }
}

/// Union of germs with pairwise distinct tangent directions: the bases fuse into one first
/// divisor, everything else is reattached, and multiplicities are recomputed from the
/// intersection form.
pub fn merge_generic(graphs: &[ResolutionGraph]) -> Result<ResolutionGraph> {
    match graphs {
        [] => return Err(Error::InvalidInput("nothing to merge".into())),
        [g] => {
            g.validate()?;
            return Ok(g.clone());
        }
        _ => {}
    }
    let base: VertexId = 1;
    let mut next: VertexId = 2;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut e_new: BTreeMap<VertexId, Rational> = BTreeMap::new();
    let mut base_e = Rational::one();
    let mut base_germs = 0;
    for (n, g) in graphs.iter().enumerate() {
        g.validate()?;
        let e = g.self_intersections();
        if e.values().any(|x| !x.is_integer()) {
            return Err(Error::InvalidInput(format!(
                "part {n} has non-integral self-intersections"
            )));
        }
        base_e += &e[&g.base] - Rational::one();
        base_germs += g.germs(g.base);
        let mut relabel = BTreeMap::from([(g.base, base)]);
        for v in &g.vertices {
            if v.id != g.base {
                relabel.insert(v.id, next);
                e_new.insert(next, e[&v.id].clone());
                vertices.push(Vertex {
                    id: next,
                    m: 0,
                    germs: v.germs,
                });
                next += 1;
            }
        }
        for [a, b] in &g.edges {
            edges.push([relabel[a], relabel[b]]);
        }
    }
    vertices.insert(
        0,
        Vertex {
            id: base,
            m: 0,
            germs: base_germs,
        },
    );
    e_new.insert(base, base_e);
    let mut out = ResolutionGraph {
        vertices,
        edges,
        base,
    };
    let load: BTreeMap<VertexId, i64> = out.vertices.iter().map(|v| (v.id, v.germs)).collect();
    let m = multiplicities_for_load(&out, &e_new, &load)
        .ok_or_else(|| Error::InvalidInput("merged intersection form is singular".into()))?;
    for v in out.vertices.iter_mut() {
        let x = &m[&v.id];
        if !x.is_integer() || !x.is_positive() {
            return Err(Error::InvalidInput(format!(
                "merged multiplicity of vertex {} is {x}",
                v.id
            )));
        }
        v.m = x.to_integer().to_i64().expect("multiplicity fits i64");
    }
    out.validate()?;
    Ok(out)
}
