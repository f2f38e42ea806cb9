//! The twelve acceptance criteria. Each prints one `PASS`/`FAIL` line; the run fails unless
//! exactly the known criteria fail. No test harness, so the lines always show.

use std::time::Instant;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use curvespec::basic::{
    combo_spectrum, mu_delta_chain, ring_product, spec_basic, verify_relation_26, BasicType,
    ChainType, TypeCombo,
};
use curvespec::bounds::{durfee_curve_check, givental_check, givental_r};
use curvespec::families::{builder_graphs, chains, merges, Labelled};
use curvespec::formulas::{spec_from_resolution, spp_from_resolution};
use curvespec::graph::{build_basic, build_chain, build_ordinary, merge_generic, ResolutionGraph};
use curvespec::newton::{durfee_newton_check, durfee_newton_onset, NewtonDiagram};
use curvespec::rational::{int, rat, Rational};
use curvespec::recombination::{
    basis_rank, decompose_graph, default_d_max, recover_multiplicity,
    spp_recombination_counterexample, swap_at_divisor, tangential_identity_check, SearchBudget,
    SwapInstance,
};
use curvespec::spectrum::{forget_weights, total_mass, SpectrumCombo};

type Outcome = Result<String, String>;

fn failures<T: Sync, F>(items: Vec<T>, f: F) -> Vec<String>
where
    F: Fn(&T) -> Option<String> + Sync + Send,
{
    items.par_iter().filter_map(f).collect()
}

fn summarize(checked: usize, bad: Vec<String>) -> Outcome {
    if bad.is_empty() {
        Ok(format!("{checked} cases"))
    } else {
        let shown: Vec<&String> = bad.iter().take(6).collect();
        Err(format!("{} of {checked} cases fail, e.g. {:?}", bad.len(), shown))
    }
}

fn closed_form_agreement() -> Outcome {
    let mut cases = Vec::new();
    for p in 0..=8 {
        for q in std::iter::once(0).chain(2..=6) {
            if p > 0 || q > 0 {
                cases.push((p, q));
            }
        }
    }
    let n = cases.len();
    let bad = failures(cases, |&(p, q)| {
        let g = build_basic(p, q).ok()?;
        (spec_from_resolution(&g).ok()? != spec_basic(p, q).ok()?).then(|| format!("basic({p},{q})"))
    });
    summarize(n, bad)
}

fn cusp_and_node() -> Outcome {
    let cusp = spec_from_resolution(&build_chain(&[0, 0, 1]).unwrap()).unwrap();
    let want = SpectrumCombo::from_terms([(rat(-1, 6), 1), (rat(1, 6), 1)]).unwrap();
    let node = spec_from_resolution(&build_ordinary(2).unwrap()).unwrap();
    let want_node = SpectrumCombo::from_terms([(Rational::zero(), 1)]).unwrap();
    if cusp == want && total_mass(&cusp) == 2 && node == want_node && total_mass(&node) == 1 {
        Ok(format!("cusp {cusp}, node {node}"))
    } else {
        Err(format!("cusp {cusp}, node {node}"))
    }
}

fn milnor_consistency() -> Outcome {
    let all: Vec<Labelled> = (1..=5).flat_map(|k| chains(k, 4)).collect();
    let n = all.len();
    let bad = failures(all, |l| {
        let c = ChainType::new(chain_parts(&l.graph)).ok()?;
        let (_, mu) = mu_delta_chain(&c);
        let s = spec_from_resolution(&l.graph).ok()?;
        (total_mass(&s) != mu).then(|| format!("{}: {} vs {mu}", l.label, total_mass(&s)))
    });
    summarize(n, bad)
}

/// Germ counts `p_1, ..., p_k` of a builder chain (vertex `E_i` has id `i`).
fn chain_parts(g: &ResolutionGraph) -> Vec<i64> {
    if g.vertices.len() == 1 {
        return vec![g.vertices[0].m];
    }
    (1..=g.vertices.len() as u32).map(|i| g.germs(i)).collect()
}

fn rearrangement() -> Outcome {
    let mut all: Vec<ResolutionGraph> = builder_graphs(6).into_iter().map(|l| l.graph).collect();
    all.extend(merges(2, 4).into_iter().map(|x| x.1));
    let n = all.len();
    let bad = failures(all, |g| {
        let a = forget_weights(&spp_from_resolution(g).ok()?);
        (a != spec_from_resolution(g).ok()?).then(|| g.canonical_form())
    });
    summarize(n, bad)
}

fn swap_instances(g: &ResolutionGraph, max_m: i64) -> Vec<SwapInstance> {
    let mut out = Vec::new();
    for v in g.ids() {
        if g.m(v) > max_m {
            continue;
        }
        let children = g.children(v);
        for mask in 0u32..(1 << children.len()) {
            let sel: Vec<u32> = (0..children.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| children[i])
                .collect();
            for germs in 0..=g.germs(v) {
                if let Ok(s) = SwapInstance::new(g.clone(), v, germs, sel.clone()) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn recombination_identities() -> Outcome {
    let mut graphs: Vec<ResolutionGraph> =
        builder_graphs(6).into_iter().map(|l| l.graph).collect();
    graphs.extend(merges(2, 5).into_iter().map(|x| x.1));
    let instances: Vec<SwapInstance> =
        graphs.iter().flat_map(|g| swap_instances(g, 10)).collect();
    let n_swaps = instances.len();
    let mut bad = failures(instances, |s| match swap_at_divisor(s) {
        Ok(r) if r.spec_residual.is_empty() => None,
        Ok(r) => Some(format!("swap at {} of {}: {}", s.pivot, s.graph.canonical_form(), r.spec_residual)),
        Err(e) => Some(format!("swap at {} of {}: {e}", s.pivot, s.graph.canonical_form())),
    });
    let mut parts = merges(2, 5);
    parts.extend(merges(3, 5));
    let n_parts = parts.len();
    bad.extend(failures(parts, |(sel, _)| {
        let graphs: Vec<ResolutionGraph> = sel.iter().map(|l| l.graph.clone()).collect();
        let labels: Vec<&str> = sel.iter().map(|l| l.label.as_str()).collect();
        match tangential_identity_check(&graphs) {
            Ok(r) if r.is_empty() => None,
            Ok(r) => Some(format!("{labels:?}: {r}")),
            Err(e) => Some(format!("{labels:?}: {e}")),
        }
    }));
    summarize(n_swaps + n_parts, bad).map(|s| format!("{s} ({n_swaps} swaps, {n_parts} merges)"))
}

fn decomposition_round_trip() -> Outcome {
    let mut all: Vec<(String, ResolutionGraph)> =
        builder_graphs(5).into_iter().map(|l| (l.label, l.graph)).collect();
    all.extend(merges(2, 4).into_iter().map(|(sel, g)| {
        let labels: Vec<String> = sel.into_iter().map(|l| l.label).collect();
        (format!("merge[{}]", labels.join(";")), g)
    }));
    let n = all.len();
    let bad = failures(all, |(label, g)| {
        let d = match decompose_graph(g) {
            Ok(d) => d,
            Err(e) => return Some(format!("{label}: {e}")),
        };
        if d.positive.len() != d.negative.len() + 1 {
            return Some(format!("{label}: {} vs {}", d.positive.len(), d.negative.len()));
        }
        let types = d.to_types().ok()?;
        (combo_spectrum(&types).ok()? != spec_from_resolution(g).ok()?)
            .then(|| format!("{label}: spectrum mismatch"))
    });
    summarize(n, bad)
}

fn random_combo(rng: &mut StdRng) -> TypeCombo {
    let mut c = TypeCombo::new();
    for _ in 0..rng.gen_range(0..4) {
        let q = [0, 2, 3, 4][rng.gen_range(0..4)];
        let p = rng.gen_range(if q == 0 { 1 } else { 0 }..5);
        c.add(BasicType::new(p, q).unwrap(), rng.gen_range(-3..=3));
    }
    c.add_unit(rng.gen_range(-2..=2));
    c
}

fn ring_axioms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let (a, b, c) = (random_combo(&mut rng), random_combo(&mut rng), random_combo(&mut rng));
        if ring_product(&a, &b) != ring_product(&b, &a) {
            bad.push(format!("commutativity: {a} * {b}"));
        }
        if ring_product(&ring_product(&a, &b), &c) != ring_product(&a, &ring_product(&b, &c)) {
            bad.push(format!("associativity: {a}, {b}, {c}"));
        }
    }
    for q in 2..=6 {
        for q2 in 2..=6 {
            match verify_relation_26(q, q2) {
                Ok((t, s)) if t.is_empty() && s.is_empty() => {}
                r => bad.push(format!("relation ({q},{q2}): {r:?}")),
            }
        }
    }
    let mut geo = 0;
    for a in 1..=4 {
        for p in 0..=4 {
            for q in [0, 2, 3, 4] {
                let Ok(t) = BasicType::new(p, q) else { continue };
                geo += 1;
                let prod = ring_product(&TypeCombo::basic(a, 0).unwrap(), &TypeCombo::single(t));
                let g = merge_generic(&[build_ordinary(a).unwrap(), build_basic(p, q).unwrap()]).unwrap();
                if combo_spectrum(&prod).unwrap() != spec_from_resolution(&g).unwrap() {
                    bad.push(format!("geometric product ord({a}) * {t}"));
                }
            }
        }
    }
    summarize(2000 + 25 + geo, bad)
}

fn independence() -> Outcome {
    let rows: Vec<(i64, usize, usize)> = (2..=14)
        .into_par_iter()
        .map(|d| {
            let (count, rank) = basis_rank(d);
            (d, count, rank)
        })
        .collect();
    let table: Vec<String> = rows.iter().map(|(d, c, r)| format!("D={d}: {r}/{c}")).collect();
    if rows.iter().all(|(_, c, r)| c == r) {
        Ok(table.join(", "))
    } else {
        Err(format!("rank below candidate count: {}", table.join(", ")))
    }
}

fn multiplicity_recovery() -> Outcome {
    let all = builder_graphs(5);
    let n = all.len();
    let bad = failures(all, |l| {
        let s = spec_from_resolution(&l.graph).ok()?;
        let m = l.graph.base_multiplicity();
        match recover_multiplicity(&s, default_d_max(&s)) {
            Ok(r) if r == m => None,
            r => Some(format!("{}: m = {m}, got {r:?}", l.label)),
        }
    });
    summarize(n, bad)
}

fn givental_bound() -> Outcome {
    let all = builder_graphs(6);
    let n = all.len();
    let bad = failures(all, |l| {
        let s = spec_from_resolution(&l.graph).ok()?;
        let ordinary = l.graph.vertices.len() == 1;
        let r = givental_check(&s, givental_r(&l.graph)).ok()?;
        let old = givental_check(&s, 1).ok()?;
        if !r.holds() || !old.holds() {
            return Some(format!("{}: violations {:?} / {:?}", l.label, r.violations, old.violations));
        }
        let equal = !r.equality_indices.is_empty();
        if equal != (ordinary && !r.pairs.is_empty()) {
            return Some(format!("{}: equality {:?}", l.label, r.equality_indices));
        }
        None
    });
    // The refined bound rejects a sequence the original one admits.
    let synthetic = SpectrumCombo::from_terms(
        [(1, 10), (1, 5), (1, 2), (7, 10)]
            .iter()
            .flat_map(|&(a, b)| [(rat(a, b), 1), (rat(-a, b), 1)]),
    )
    .unwrap();
    let strict = givental_check(&synthetic, 1).unwrap().holds() && !givental_check(&synthetic, 2).unwrap().holds();
    let g = build_basic(2, 2).unwrap();
    let s = spec_from_resolution(&g).unwrap();
    let (r, old) = (givental_check(&s, givental_r(&g)).unwrap(), givental_check(&s, 1).unwrap());
    let sum = |rep: &curvespec::bounds::GiventalReport, i: usize| {
        let (a, b) = rep.pairs[i];
        &rep.alphas[a - 1] + &rep.alphas[b - 1]
    };
    let sharper = r.r == 2 && sum(&r, 0) > sum(&old, 0);
    match summarize(n, bad) {
        Ok(msg) if strict && sharper => Ok(format!(
            "{msg}; basic(2,2): r = 2 pair sum {} against {} for r = 1",
            sum(&r, 0),
            sum(&old, 0)
        )),
        Ok(_) => Err(format!("containment not strict (synthetic {strict}, basic(2,2) {sharper})")),
        e => e,
    }
}

fn durfee_bounds() -> Outcome {
    let alphas = [rat(0, 1), rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)];
    let all = builder_graphs(8);
    let n = all.len() * alphas.len();
    let mut bad = failures(all, |l| {
        let s = spec_from_resolution(&l.graph).ok()?;
        let m = l.graph.base_multiplicity();
        alphas
            .iter()
            .find(|a| !durfee_curve_check(&s, m, a).unwrap().holds)
            .map(|a| format!("{} at alpha {a}", l.label))
    });
    let mut onsets = Vec::new();
    for m in 2..=6 {
        let d = NewtonDiagram::fermat(2, m).unwrap();
        for a in &alphas {
            match durfee_newton_onset(&d, a, 12).unwrap() {
                Some(t) => onsets.push(format!("m={m} alpha={a}: t>={t}")),
                None => bad.push(format!("x^{m}+y^{m} at alpha {a}: never holds for t <= 12")),
            }
        }
    }
    let r = durfee_newton_check(&NewtonDiagram::fermat(2, 3).unwrap(), &Rational::zero(), 4).unwrap();
    if !(r.lhs == rat(121, 2) && r.rhs == int(55) && r.holds) {
        bad.push(format!("t=4, alpha=0: expected 121/2 > 55, got {}", r.render()));
    }
    summarize(n + 31, bad).map(|s| format!("{s}; onsets {}", onsets.join(", ")))
}

fn spp_non_additivity() -> Outcome {
    match spp_recombination_counterexample(SearchBudget { max_multiplicity: 8 }) {
        Some(w) if w.spec_residual.is_empty() && !w.spp_residual.is_empty() => Ok(format!(
            "pivot {} (m = {}) of {}, Spp residual {}",
            w.instance.pivot,
            w.instance.graph.m(w.instance.pivot),
            w.instance.graph.canonical_form(),
            w.spp_residual
        )),
        Some(_) => Err("witness does not meet its contract".into()),
        None => Err("no witness within multiplicity 8".into()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form agreement", closed_form_agreement),
        ("cusp and node oracles", cusp_and_node),
        ("Milnor-number consistency", milnor_consistency),
        ("rearrangement identity", rearrangement),
        ("recombination identities", recombination_identities),
        ("decomposition round-trip", decomposition_round_trip),
        ("ring axioms and the generator relation", ring_axioms),
        ("independence of basic types", independence),
        ("multiplicity determination", multiplicity_recovery),
        ("Givental-type bound", givental_bound),
        ("Durfee-type bounds", durfee_bounds),
        ("Spp non-additivity", spp_non_additivity),
    ];
    // Criteria that fail on this implementation, each with a concrete counterexample in its
    // message. The test breaks if one of them starts passing or any other one fails.
    const KNOWN_FAILURES: [usize; 4] = [8, 9, 10, 11];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match &outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name} [{secs:.1}s]: {msg}", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL  {name} [{secs:.1}s]: {msg}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("failed criteria: {failed:?}, expected {KNOWN_FAILURES:?}");
    if failed != KNOWN_FAILURES {
        std::process::exit(1);
    }
}
