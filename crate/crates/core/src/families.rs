//! Labelled sweeps over the builder families, shared by the sweeps in the tests and the CLI.

use crate::graph::{build_basic, build_chain, build_ordinary, merge_generic, ResolutionGraph};

#[derive(Clone, Debug)]
pub struct Labelled {
    pub label: String,
    pub graph: ResolutionGraph,
}

fn join(p: &[i64]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn ordinaries(n: i64) -> Vec<Labelled> {
    (1..=n)
        .map(|m| Labelled {
            label: format!("ord({m})"),
            graph: build_ordinary(m).expect("m >= 1"),
        })
        .collect()
}

/// `C_{p,q}` for `p <= n`, `q ∈ {0, 2, ..., n}`.
pub fn basics(n: i64) -> Vec<Labelled> {
    let mut out = Vec::new();
    for p in 0..=n {
        for q in std::iter::once(0).chain(2..=n) {
            if let Ok(graph) = build_basic(p, q) {
                out.push(Labelled {
                    label: format!("basic({p},{q})"),
                    graph,
                });
            }
        }
    }
    out
}

/// Chains with `k` parts, each at most `n`, the last one nonzero.
pub fn chains(k: usize, n: i64) -> Vec<Labelled> {
    let mut out = Vec::new();
    let mut p = vec![0i64; k];
    loop {
        if p[k - 1] > 0 {
            if let Ok(graph) = build_chain(&p) {
                out.push(Labelled {
                    label: format!("chain({})", join(&p)),
                    graph,
                });
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            p[i] += 1;
            if p[i] <= n {
                break;
            }
            p[i] = 0;
            i += 1;
        }
    }
}

/// Ordinary points, basic types and three-part chains with parameters at most `n`.
pub fn builder_graphs(n: i64) -> Vec<Labelled> {
    let mut out = ordinaries(n);
    out.extend(basics(n));
    out.extend(chains(3, n));
    out
}

/// Single-direction germs used as merge parts: tacnode-like chains `(0, q)`, `(p, q)` with
/// `p + q <= n`, and three-part chains with `m_1 <= n`, together with a smooth branch.
pub fn merge_parts(n: i64) -> Vec<Labelled> {
    let mut out = vec![Labelled {
        label: "ord(1)".into(),
        graph: build_ordinary(1).expect("smooth"),
    }];
    for l in basics(n).into_iter().chain(chains(3, n)) {
        if l.graph.base_multiplicity() <= n && l.graph.vertices.len() > 1 {
            out.push(l);
        }
    }
    out
}

/// Merges of `r` parts from [`merge_parts`], as unordered selections with repetition.
pub fn merges(r: usize, n: i64) -> Vec<(Vec<Labelled>, ResolutionGraph)> {
    let parts = merge_parts(n);
    let mut out = Vec::new();
    let mut idx = vec![0usize; r];
    loop {
        let sel: Vec<Labelled> = idx.iter().map(|&i| parts[i].clone()).collect();
        let graphs: Vec<ResolutionGraph> = sel.iter().map(|l| l.graph.clone()).collect();
        if let Ok(g) = merge_generic(&graphs) {
            out.push((sel, g));
        }
        // next nondecreasing index vector
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + 1 < parts.len() {
                let v = idx[i] + 1;
                for j in idx.iter_mut().skip(i) {
                    *j = v;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(ordinaries(5).len(), 5);
        assert_eq!(chains(2, 2).len(), 6);
        let m = merges(2, 3);
        assert!(m.iter().all(|(s, g)| g.base_multiplicity()
            == s.iter().map(|l| l.graph.base_multiplicity()).sum::<i64>()));
    }
}
