use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use curvespec::basic::verify_relation_26;
use curvespec::bounds::{
    durfee_curve_check, givental_check, givental_r, stabilization_count, stabilization_table,
    BoundReport,
};
use curvespec::expr::{parse_expr, parse_parts, Expr};
use curvespec::formulas::{spec_from_resolution, spp_from_resolution};
use curvespec::graph::ResolutionGraph;
use curvespec::newton::{
    durfee_newton_check, durfee_newton_onset, empirical_durfee_constant, newton_mu, NewtonDiagram,
};
use curvespec::rational::{fmt_rational, parse_rational, Rational};
use curvespec::recombination::{
    basis_rank, basis_relations, decompose_graph, default_d_max, recover_multiplicity,
    spectrum_to_basic_detailed, spp_recombination_counterexample, swap_at_divisor,
    swap_spp_residual, tangential_identity_check, SearchBudget, SwapInstance,
};
use curvespec::spectrum::{total_mass, SpectrumCombo};
use curvespec::Error;

#[derive(Parser)]
#[command(name = "curvespec", version, about = "Spectra of plane curve singularities")]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Spectrum of a type expression or a resolution graph
    Spec {
        #[command(flatten)]
        src: Source,
        /// Also recover the multiplicity from the spectrum alone
        #[arg(long)]
        recover: bool,
    },
    /// Spectral pairs of a germ type or a resolution graph
    Spp {
        #[command(flatten)]
        src: Source,
    },
    /// Decompose a graph into chains, an expression into basic types, or a spectrum
    Decompose {
        #[command(flatten)]
        src: Source,
        /// A spectrum in canonical text form
        #[arg(long, conflicts_with_all = ["ty", "graph"])]
        spectrum: Option<String>,
        /// Largest candidate scale for spectrum decomposition
        #[arg(long)]
        dmax: Option<i64>,
    },
    /// Verify an identity
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Evaluate an inequality
    Bounds {
        #[command(subcommand)]
        kind: BoundsKind,
    },
    /// Count and rank of the basic types up to a scale
    Independence {
        #[arg(long, default_value_t = 8)]
        dmax: i64,
    },
}

#[derive(Subcommand)]
enum CheckKind {
    /// Swap a subset of the attachments at a vertex
    Swap {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pivot: u32,
        /// `germs=N,children=a:b`
        #[arg(long, default_value = "")]
        detach: String,
        /// Override the intersection degree
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Merge of single-direction parts against the sum of its parts
    Eq1 {
        /// `;`-separated germ types
        #[arg(long)]
        parts: String,
    },
    /// The generator relation of the ring
    Ring26 {
        #[arg(long)]
        q: i64,
        #[arg(long)]
        q2: i64,
    },
    /// Search for a swap that preserves Spec but not Spp
    SppAdditivity {
        #[arg(long, default_value_t = 6)]
        max_m: i64,
    },
}

#[derive(Subcommand)]
enum BoundsKind {
    Givental {
        #[command(flatten)]
        src: Source,
        /// Override the number of comparable multiplicities
        #[arg(long)]
        r: Option<i64>,
    },
    DurfeeCurve {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        alpha: String,
        /// Multiplicity, required for combinations
        #[arg(long)]
        m: Option<i64>,
    },
    DurfeeNewton {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        scale: i64,
        /// Report the onset scale up to this bound instead
        #[arg(long)]
        onset: Option<i64>,
    },
    /// Smallest constant over the Fermat diagrams of degree up to `max-m`
    DurfeeConstant {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 12)]
        max_m: i64,
    },
    Stabilization {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        m: Option<i64>,
        /// Tabulate basic types with parameters up to N
        #[arg(long, conflicts_with_all = ["ty", "graph"])]
        table: Option<i64>,
    },
}

#[derive(Args)]
struct Source {
    /// Type expression such as `2*basic(2,2) - ord(4)`
    #[arg(long = "type", id = "ty", conflicts_with = "graph")]
    ty: Option<String>,
    /// Resolution graph file
    #[arg(long)]
    graph: Option<PathBuf>,
}

enum Input {
    Expr(Expr),
    Graph(ResolutionGraph),
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Run = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

impl Source {
    fn given(&self) -> bool {
        self.ty.is_some() || self.graph.is_some()
    }

    fn load(&self) -> Result<Input, Failure> {
        match (&self.ty, &self.graph) {
            (Some(t), None) => Ok(Input::Expr(parse_expr(t)?)),
            (None, Some(p)) => Ok(Input::Graph(ResolutionGraph::from_json(&read(p)?)?)),
            _ => Err(Failure::Input("give exactly one of --type and --graph".into())),
        }
    }
}

impl Input {
    fn spectrum(&self) -> Result<SpectrumCombo, Failure> {
        Ok(match self {
            Input::Expr(e) => e.spectrum()?,
            Input::Graph(g) => spec_from_resolution(g)?,
        })
    }

    fn graph(&self) -> Result<ResolutionGraph, Failure> {
        Ok(match self {
            Input::Expr(e) => e.graph()?,
            Input::Graph(g) => g.clone(),
        })
    }

    fn multiplicity(&self) -> Option<i64> {
        match self {
            Input::Expr(e) => e.multiplicity(),
            Input::Graph(g) => Some(g.base_multiplicity()),
        }
    }
}

fn alpha(s: &str) -> Result<Rational, Failure> {
    Ok(parse_rational(s)?)
}

fn terms_json(s: &SpectrumCombo) -> Value {
    Value::Array(
        s.iter()
            .map(|(v, c)| json!({"value": fmt_rational(v), "coeff": c}))
            .collect(),
    )
}

fn emit(json_mode: bool, text: &str, value: Value) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error for a report
    let _ = if json_mode {
        writeln!(out, "{value}")
    } else {
        writeln!(out, "{text}")
    };
}

fn bound_json(family: &str, params: &str, alpha: &Rational, r: &BoundReport) -> Value {
    json!({
        "family": family,
        "params": params,
        "alpha": fmt_rational(alpha),
        "lhs": fmt_rational(&r.lhs),
        "rhs": fmt_rational(&r.rhs),
        "holds": r.holds,
    })
}

fn run_spec(json_mode: bool, src: &Source, recover: bool) -> Run {
    let s = src.load()?.spectrum()?;
    let mu = total_mass(&s);
    let top = s.max_value().map(fmt_rational);
    let m = if recover {
        Some(recover_multiplicity(&s, default_d_max(&s))?)
    } else {
        None
    };
    let mut text = format!("{s}\nmu = {mu}");
    if let Some(t) = &top {
        text.push_str(&format!("\nalpha_max = {t}"));
    }
    if let Some(m) = m {
        text.push_str(&format!("\nmultiplicity = {m}"));
    }
    let mut v = json!({"terms": terms_json(&s), "mu": mu, "alpha_max": top});
    if let Some(m) = m {
        v["multiplicity"] = json!(m);
    }
    emit(json_mode, &text, v);
    Ok(true)
}

fn run_spp(json_mode: bool, src: &Source) -> Run {
    let g = src.load()?.graph()?;
    let s = spp_from_resolution(&g)?;
    let terms: Vec<Value> = s
        .iter()
        .map(|(v, w, c)| json!({"value": fmt_rational(v), "weight": w, "coeff": c}))
        .collect();
    emit(
        json_mode,
        &format!("{s}\nmu = {}", s.total_mass()),
        json!({"terms": terms, "mu": s.total_mass()}),
    );
    Ok(true)
}

fn run_decompose(json_mode: bool, src: &Source, spectrum: &Option<String>, dmax: Option<i64>) -> Run {
    if let Some(text) = spectrum {
        let s: SpectrumCombo = text.parse()?;
        let sol = spectrum_to_basic_detailed(&s, dmax.unwrap_or_else(|| default_d_max(&s)))?;
        emit(
            json_mode,
            &format!("{}\nnullity = {}", sol.combo, sol.nullity),
            json!({"types": sol.combo.to_string(), "nullity": sol.nullity}),
        );
        return Ok(true);
    }
    match src.load()? {
        Input::Graph(g) => {
            let d = decompose_graph(&g)?;
            let types = d.to_types()?;
            emit(
                json_mode,
                &format!("{}\n= {types}", d.render()),
                json!({"chains": d.render(), "types": types.to_string()}),
            );
        }
        Input::Expr(e) => {
            let types = e.types()?;
            emit(json_mode, &types.to_string(), json!({"types": types.to_string()}));
        }
    }
    Ok(true)
}

fn parse_detach(s: &str) -> Result<(i64, Vec<u32>), Failure> {
    let bad = |m: String| Failure::Input(format!("--detach: {m}"));
    let (mut germs, mut children) = (0, Vec::new());
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once('=') {
            Some(("germs", n)) => germs = n.trim().parse().map_err(|_| bad(format!("bad count `{n}`")))?,
            Some(("children", list)) => {
                for c in list.split(':').map(str::trim).filter(|t| !t.is_empty()) {
                    children.push(c.parse().map_err(|_| bad(format!("bad vertex `{c}`")))?);
                }
            }
            _ => return Err(bad(format!("expected germs=N or children=a:b, got `{item}`"))),
        }
    }
    Ok((germs, children))
}

fn run_check(json_mode: bool, kind: &CheckKind) -> Run {
    match kind {
        CheckKind::Swap { graph, pivot, detach, degree } => {
            let g = ResolutionGraph::from_json(&read(graph)?)?;
            let (germs, children) = parse_detach(detach)?;
            let inst = match degree {
                Some(d) => SwapInstance::with_degree(g, *pivot, germs, children, *d)?,
                None => SwapInstance::new(g, *pivot, germs, children)?,
            };
            let res = swap_at_divisor(&inst)?;
            let spp = swap_spp_residual(&inst).ok();
            let spp_text = spp.as_ref().map(|s| s.to_string());
            let gs = &res.graphs;
            let text = format!(
                "degree = {}\nwithout D: {}\nonly D: {}\nordinary: {}\nresidual: {}\nspp residual: {}",
                inst.degree,
                gs.without_d.canonical_form(),
                gs.only_d.canonical_form(),
                gs.ordinary.canonical_form(),
                res.spec_residual,
                spp_text.as_deref().unwrap_or("n/a"),
            );
            emit(
                json_mode,
                &text,
                json!({
                    "degree": inst.degree,
                    "residual": terms_json(&res.spec_residual),
                    "spp_residual": spp_text,
                }),
            );
            Ok(res.spec_residual.is_empty())
        }
        CheckKind::Eq1 { parts } => {
            let graphs = parse_parts(parts)?
                .iter()
                .map(|e| e.graph())
                .collect::<Result<Vec<_>, _>>()?;
            let r = tangential_identity_check(&graphs)?;
            emit(json_mode, &format!("residual: {r}"), json!({"residual": terms_json(&r)}));
            Ok(r.is_empty())
        }
        CheckKind::Ring26 { q, q2 } => {
            let (types, spec) = verify_relation_26(*q, *q2)?;
            emit(
                json_mode,
                &format!("type residual: {types}\nresidual: {spec}"),
                json!({"types": types.to_string(), "residual": terms_json(&spec)}),
            );
            Ok(spec.is_empty())
        }
        CheckKind::SppAdditivity { max_m } => {
            let found = spp_recombination_counterexample(SearchBudget { max_multiplicity: *max_m });
            match &found {
                Some(w) => emit(
                    json_mode,
                    &format!(
                        "witness: {} at vertex {}\nresidual: {}\nspp residual: {}",
                        w.instance.graph.canonical_form(),
                        w.instance.pivot,
                        w.spec_residual,
                        w.spp_residual
                    ),
                    json!({
                        "graph": w.instance.graph.canonical_form(),
                        "pivot": w.instance.pivot,
                        "spp_residual": w.spp_residual.to_string(),
                    }),
                ),
                None => emit(json_mode, "no witness", json!({"graph": null})),
            }
            Ok(found.is_some())
        }
    }
}

fn run_bounds(json_mode: bool, kind: &BoundsKind) -> Run {
    match kind {
        BoundsKind::Givental { src, r } => {
            let g = src.load()?.graph()?;
            let s = spec_from_resolution(&g)?;
            let rep = givental_check(&s, r.unwrap_or_else(|| givental_r(&g)))?;
            let pairs: Vec<Value> = rep.pairs.iter().map(|(a, b)| json!([a, b])).collect();
            emit(
                json_mode,
                &rep.render(),
                json!({
                    "r": rep.r,
                    "alphas": rep.alphas.iter().map(fmt_rational).collect::<Vec<_>>(),
                    "pairs": pairs,
                    "equality": rep.equality_indices,
                    "holds": rep.holds(),
                }),
            );
            Ok(rep.holds())
        }
        BoundsKind::DurfeeCurve { src, alpha: a, m } => {
            let input = src.load()?;
            let m = m
                .or_else(|| input.multiplicity())
                .ok_or_else(|| Failure::Input("--m is required for combinations".into()))?;
            let a = alpha(a)?;
            let rep = durfee_curve_check(&input.spectrum()?, m, &a)?;
            let family = src.ty.clone().unwrap_or_else(|| "graph".into());
            emit(json_mode, &rep.render(), bound_json(&family, &format!("m={m}"), &a, &rep));
            Ok(rep.holds)
        }
        BoundsKind::DurfeeNewton { diagram, alpha: a, scale, onset } => {
            let d = NewtonDiagram::from_json(&read(diagram)?)?;
            let a = alpha(a)?;
            if let Some(t_max) = onset {
                let o = durfee_newton_onset(&d, &a, *t_max)?;
                let text = match o {
                    Some(t) => format!("onset t = {t}"),
                    None => format!("no onset up to t = {t_max}"),
                };
                emit(json_mode, &text, json!({"alpha": fmt_rational(&a), "onset": o}));
                return Ok(o.is_some());
            }
            let rep = durfee_newton_check(&d, &a, *scale)?;
            let params = format!("n={}, t={scale}, mu={}", d.n, newton_mu(&d.scaled(*scale))?);
            emit(json_mode, &rep.render(), bound_json("newton", &params, &a, &rep));
            Ok(rep.holds)
        }
        BoundsKind::DurfeeConstant { n, alpha: a, max_m } => {
            let a = alpha(a)?;
            let (c, m) = empirical_durfee_constant(*n, &a, *max_m)?;
            emit(
                json_mode,
                &format!("C_{n} >= {} (attained at degree {m})", fmt_rational(&c)),
                json!({"n": n, "alpha": fmt_rational(&a), "constant": fmt_rational(&c), "degree": m}),
            );
            Ok(true)
        }
        BoundsKind::Stabilization { src, m, table } => {
            if let Some(n) = table {
                let rows = stabilization_table(*n);
                let text: Vec<String> = rows.iter().map(|(a, b, v)| format!("{a} {b} {v}")).collect();
                emit(json_mode, &text.join("\n"), json!(rows));
                return Ok(true);
            }
            if !src.given() {
                return Err(Failure::Input("give --type, --graph or --table".into()));
            }
            let input = src.load()?;
            let m = m
                .or_else(|| input.multiplicity())
                .ok_or_else(|| Failure::Input("--m is required for combinations".into()))?;
            let v = stabilization_count(&input.spectrum()?, m)?;
            emit(json_mode, &v.to_string(), json!({"m": m, "count": v}));
            Ok(true)
        }
    }
}

fn run_independence(json_mode: bool, dmax: i64) -> Run {
    let mut rows = Vec::new();
    let mut first_dependent = None;
    for d in 1..=dmax {
        let (count, rank) = basis_rank(d);
        if rank < count && first_dependent.is_none() {
            first_dependent = Some(d);
        }
        rows.push((d, count, rank));
    }
    let relation = first_dependent.and_then(|d| basis_relations(d).into_iter().next());
    let mut text: Vec<String> = rows.iter().map(|(d, c, r)| format!("D={d} count={c} rank={r}")).collect();
    if let (Some(d), Some(rel)) = (first_dependent, &relation) {
        text.push(format!("relation at D={d}: {rel} = 0"));
    }
    emit(
        json_mode,
        &text.join("\n"),
        json!({
            "rows": rows,
            "relation": relation.map(|r| r.to_string()),
        }),
    );
    Ok(first_dependent.is_none())
}

fn run(cli: &Cli) -> Run {
    let j = cli.json;
    match &cli.verb {
        Verb::Spec { src, recover } => run_spec(j, src, *recover),
        Verb::Spp { src } => run_spp(j, src),
        Verb::Decompose { src, spectrum, dmax } => run_decompose(j, src, spectrum, *dmax),
        Verb::Check { kind } => run_check(j, kind),
        Verb::Bounds { kind } => run_bounds(j, kind),
        Verb::Independence { dmax } => run_independence(j, *dmax),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
