use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use holonomy_core::documents::{parse_json, square, ConnectionDoc, KzDoc, PairingDoc, SimplicesDoc};
use holonomy_core::graphs::{
    cohomology_ranks, differential, enumerate_block, phi_to_cohomology, AdmissibleGraph, GraphBounds,
};
use holonomy_core::graphs::complex::differential_matrix;
use holonomy_core::holonomy::{compatibility_check, mc_check_on_simplex, HolonomyCochain, OdeSpec, SimplicialData};
use holonomy_core::lie::DgLie;
use holonomy_core::linfty::Caps;
use holonomy_core::quadratic::{braid_holonomy, kz_connection, Complex64, QuadraticDgla};
use holonomy_core::quadrature::QuadSpec;
use holonomy_core::scalar::format_scalar;
use holonomy_core::selftest::{run_selftest, SelftestConfig};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about = "Batch checks for holonomies of flat L-infinity connections, graph complexes and KZ connections")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Arity cap K and weight cap N, as `K,N`.
    #[arg(long, global = true, value_parser = parse_caps)]
    caps: Option<Caps>,
    /// Replaces the tolerance of every toleranced check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Gauss-Legendre points per axis.
    #[arg(long, global = true)]
    quad_order: Option<usize>,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every exact identity and numerical certification.
    Selftest {
        /// Negative control: break one structure constant of sl2.
        #[arg(long)]
        corrupt_bracket: bool,
    },
    /// Enumerate graphs, compute exact cohomology ranks and check the t_d(n) relations.
    Graphs(GraphsArgs),
    /// Holonomies of a connection on a list of simplices.
    Holonomy {
        connection: PathBuf,
        simplices: PathBuf,
    },
    /// Transport, flatness and series-vs-ODE checks for a KZ connection.
    Kz { document: PathBuf },
}

#[derive(Args, Debug)]
struct GraphsArgs {
    #[arg(long, default_value_t = 2)]
    d: i64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Lowest degree of the window (default 0).
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<i64>,
    /// Highest degree of the window (default n(d-1)).
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<i64>,
    #[arg(long)]
    max_m: Option<usize>,
    #[arg(long)]
    max_k: Option<usize>,
    /// Largest loop order k - m (default n - 1).
    #[arg(long)]
    max_order: Option<i64>,
    /// Include the differential matrices of every block.
    #[arg(long)]
    matrices: bool,
    /// Skip the t_d(n) relation report.
    #[arg(long)]
    no_phi: bool,
    /// A graph in the text format; its canonical class and boundary are reported.
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn parse_caps(s: &str) -> Result<Caps, String> {
    let (k, n) = s.split_once(',').ok_or("expected K,N")?;
    let arity: usize = k.trim().parse().map_err(|_| format!("bad arity {:?}", k))?;
    let weight: u32 = n.trim().parse().map_err(|_| format!("bad weight {:?}", n))?;
    if arity == 0 || weight == 0 {
        return Err("caps must be positive".into());
    }
    Ok(Caps { arity, weight })
}

macro_rules! fail {
    ($($t:tt)*) => {
        return Err(Failure::Input(anyhow::anyhow!($($t)*)))
    };
}

/// Input problems exit with status 2, failed checks with 1.
enum Failure {
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

struct Outcome {
    report: Value,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Selftest { corrupt_bracket } => selftest(&cli.common, *corrupt_bracket),
        Command::Graphs(a) => graphs(a),
        Command::Holonomy { connection, simplices } => holonomy(&cli.common, connection, simplices),
        Command::Kz { document } => kz(&cli.common, document),
    };
    match result.and_then(|o| write_report(&cli.common, &o.report).map(|_| o)) {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

fn write_report(common: &Common, report: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match &common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", text),
    }
    Ok(())
}

fn quad_spec(common: &Common, cap: u32) -> QuadSpec {
    let mut q = QuadSpec::default();
    if let Some(o) = common.quad_order {
        q.order = o;
    }
    q.max_n = q.max_n.max(cap as usize);
    q
}

fn read(path: &Path) -> Result<String, Failure> {
    Ok(std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn selftest(common: &Common, corrupt_bracket: bool) -> Result<Outcome, Failure> {
    let mut cfg = SelftestConfig { tol: common.tol, seed: common.seed, corrupt_bracket, ..Default::default() };
    if let Some(c) = common.caps {
        cfg.caps = c;
    }
    cfg.quad = quad_spec(common, cfg.caps.weight);
    let report = run_selftest(&cfg)?;
    for c in report.failures() {
        eprintln!("FAIL {} residual {:?} tolerance {:e} {}", c.id, c.residual, c.tolerance, c.detail.clone().unwrap_or_default());
    }
    Ok(Outcome { passed: report.passed, report: serde_json::to_value(&report)? })
}

/// `(achieved, tolerance, passed)` as a JSON object.
fn residual(value: Result<f64, holonomy_core::Error>, tol: f64) -> (Value, bool) {
    match value {
        Ok(v) => {
            let ok = v <= tol;
            (json!({"residual": v, "tolerance": tol, "passed": ok}), ok)
        }
        Err(e) => (json!({"residual": null, "tolerance": tol, "passed": false, "error": e.to_string()}), false),
    }
}

fn graphs(a: &GraphsArgs) -> Result<Outcome, Failure> {
    let (d, n) = (a.d, a.n);
    if d < 2 {
        fail!("d must be at least 2");
    }
    let lo = a.lo.unwrap_or(0);
    let hi = a.hi.unwrap_or(n as i64 * (d - 1));
    let order = a.max_order.unwrap_or(n.saturating_sub(1) as i64);
    let auto = GraphBounds::enclosing(d, lo, hi, order);
    let bounds = GraphBounds {
        max_m: a.max_m.unwrap_or(auto.max_m),
        max_k: a.max_k.unwrap_or(auto.max_k),
        max_order: Some(order),
    };
    let table = cohomology_ranks(d, n, lo, hi, bounds);
    for w in &table.warnings {
        eprintln!("warning: {}", w);
    }
    let counts: Vec<Value> = table
        .blocks
        .iter()
        .map(|b| json!({"degree": b.degree, "order": b.order, "m": b.m, "k": b.k, "classes": b.dim}))
        .collect();
    let ranks: serde_json::Map<String, Value> = table.ranks.iter().map(|(p, r)| (p.to_string(), json!(r))).collect();
    let mut report = json!({
        "command": "graphs",
        "d": d,
        "n": n,
        "window": [lo, hi],
        "bounds": bounds,
        "counts": counts,
        "ranks": ranks,
        "blocks": table.blocks,
        "warnings": table.warnings,
    });
    if a.matrices {
        let mut mats = Vec::new();
        for b in &table.blocks {
            let src = enumerate_block(d, n, b.m, b.k);
            if b.m == 0 {
                continue;
            }
            let dst = enumerate_block(d, n, b.m - 1, b.k - 1);
            let m = differential_matrix(d, &src, &dst);
            let mut entries = Vec::new();
            for (r, row) in m.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    if format_scalar(x) != "0" {
                        entries.push(json!([r, c, format_scalar(x)]));
                    }
                }
            }
            mats.push(json!({
                "source": {"m": b.m, "k": b.k, "classes": src.iter().map(|g| g.label()).collect::<Vec<_>>()},
                "target": {"m": b.m - 1, "k": b.k - 1, "classes": dst.iter().map(|g| g.label()).collect::<Vec<_>>()},
                "entries": entries,
            }));
        }
        report["differentials"] = json!(mats);
    }
    let mut passed = true;
    if !a.no_phi && n >= 2 {
        let r = phi_to_cohomology(d, n, GraphBounds::enclosing(d, 0, 2 * (d - 1), 2))?;
        passed &= r.ok;
        report["phi"] = serde_json::to_value(&r)?;
    }
    if let Some(p) = &a.graph {
        let (gd, g) = AdmissibleGraph::from_text(&read(p)?)?;
        let c = g.canonicalize(gd)?;
        let dg = differential(gd, &c.graph);
        let boundary: Vec<Value> = dg
            .terms
            .iter()
            .map(|(h, x)| json!({"graph": h.label(), "coeff": format_scalar(&(x * holonomy_core::scalar::qi(c.sign)))}))
            .collect();
        report["graph"] = json!({
            "d": gd,
            "input": g.label(),
            "canonical": c.graph.label(),
            "sign": c.sign,
            "zero": c.zero,
            "degree": g.degree(gd),
            "boundary": if c.zero { json!([]) } else { json!(boundary) },
        });
    }
    Ok(Outcome { report, passed })
}

fn format_word(labels: &dyn Fn(usize) -> String, key: &[Vec<usize>]) -> String {
    if key.is_empty() {
        return "1".into();
    }
    key.iter().map(|w| format!("({})", w.iter().map(|&i| labels(i)).collect::<Vec<_>>().join(" "))).collect()
}

fn holonomy(common: &Common, connection: &Path, simplices: &Path) -> Result<Outcome, Failure> {
    let alpha = parse_json::<ConnectionDoc>(&read(connection)?)?.build()?;
    let sdoc: SimplicesDoc = parse_json(&read(simplices)?)?;
    let caps = common.caps.unwrap_or(Caps { arity: 6, weight: sdoc.cap.unwrap_or(8) });
    let cap = caps.weight;
    let spec = quad_spec(common, cap);
    let sigmas = sdoc.simplices.iter().map(|s| s.build()).collect::<Result<Vec<_>, _>>()?;
    if let Some(s) = sigmas.iter().find(|s| s.ambient() != alpha.chart_dim) {
        fail!("simplex {} does not lie in the chart R^{}", s.key(), alpha.chart_dim);
    }
    let flat = alpha.flatness_residual(caps)?;
    let h = HolonomyCochain::infinity(&alpha, cap, spec.clone(), false)?;
    let data = SimplicialData::closure(&sigmas);
    let mc_tol = common.tol.unwrap_or(1e-6);
    let compat_tol = common.tol.unwrap_or(1e-8);
    let space = alpha.algebra.space.clone();
    let labels = move |i: usize| space.label(i).to_string();
    let mut passed = flat == 0.0;
    let mut rows = Vec::new();
    for (idx, s) in sigmas.iter().enumerate() {
        let value = h.value(s)?;
        let mut words: Vec<(&Vec<Vec<usize>>, &f64)> = value.iter().filter(|(_, c)| c.abs() > 1e-15).collect();
        words.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()).then_with(|| x.0.cmp(y.0)));
        let leading: Vec<Value> = words.iter().take(12).map(|(w, c)| json!({"word": format_word(&labels, w), "coeff": c})).collect();
        let (mc, ok) = residual(mc_check_on_simplex(&h, s, &data), mc_tol);
        passed &= ok;
        let mut row = json!({"index": idx, "key": s.key(), "dim": s.dim(), "terms": value.len(), "leading": leading, "mc": mc});
        if alpha.lie.is_some() {
            let (c, ok) = residual(compatibility_check(&alpha, s, cap, &spec), compat_tol);
            passed &= ok;
            row["compatibility"] = c;
        }
        rows.push(row);
    }
    let report = json!({
        "command": "holonomy",
        "seed": common.seed,
        "caps": {"arity": caps.arity, "weight": caps.weight},
        "quad_order": spec.order,
        "flatness": {"residual": flat, "tolerance": 0.0, "passed": flat == 0.0},
        "simplices": rows,
    });
    Ok(Outcome { report, passed })
}

fn complex_rows(m: &[Complex64], n: usize) -> Value {
    json!(m.chunks(n).map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn kz(common: &Common, document: &Path) -> Result<Outcome, Failure> {
    let doc: KzDoc = parse_json(&read(document)?)?;
    let lie = match &doc.lie {
        Some(l) => l.build()?,
        None => DgLie::sl2(),
    };
    let g = match &doc.pairing {
        PairingDoc::Named(s) if s == "killing" => QuadraticDgla::killing(&lie)?,
        PairingDoc::Named(s) => fail!("unknown pairing {:?}", s),
        PairingDoc::Matrix(m) => QuadraticDgla::new(lie.clone(), square(m, lie.dim())?, 0)?,
    };
    let reps = doc.reps.iter().map(|r| r.build(&lie)).collect::<Result<Vec<_>, _>>()?;
    if reps.len() < 2 {
        fail!("a KZ connection needs at least two representations");
    }
    let conn = kz_connection(&g, &reps)?;
    let path = doc.path.build()?;
    if let Some(p) = path.pieces.first() {
        if p.ambient() != conn.chart_dim {
            fail!("loop points have {} coordinates, {} expected", p.ambient(), conn.chart_dim);
        }
    }
    let terms = common.caps.map_or(doc.terms, |c| c.weight as usize);
    let spec = quad_spec(common, terms as u32);
    let flat_tol = common.tol.unwrap_or(1e-10);
    let delta_tol = common.tol.unwrap_or(1e-6);
    let (flat, ok_flat) = residual(conn.flatness_sample(doc.samples, common.seed, doc.margin), flat_tol);
    let tr = braid_holonomy(&conn, &path, terms, &spec, &OdeSpec::default())?;
    let (delta, ok_delta) = residual(Ok(tr.delta()), delta_tol);
    let alg = conn.algebra();
    let first = path.pieces.first().map(|p| p.vertex(0));
    let last = path.pieces.last().map(|p| p.vertex(1));
    let closed = match (first, last) {
        (Some(a), Some(b)) => a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12),
        _ => true,
    };
    let report = json!({
        "command": "kz",
        "seed": common.seed,
        "terms": terms,
        "quad_order": spec.order,
        "fibre_dim": conn.fibre_dim,
        "pieces": path.pieces.len(),
        "closed": closed,
        "transport": complex_rows(&tr.ode, alg.dim),
        "series": complex_rows(&tr.series, alg.dim),
        "flatness": flat,
        "series_vs_ode": delta,
    });
    Ok(Outcome { report, passed: ok_flat && ok_delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_parse() {
        let c = parse_caps("6, 8").unwrap();
        assert_eq!((c.arity, c.weight), (6, 8));
        assert!(parse_caps("6").is_err());
        assert!(parse_caps("0,8").is_err());
        assert!(parse_caps("3,x").is_err());
    }
}
