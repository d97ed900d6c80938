//! Command-line front end: resonance finding and counting, Lambert-W
//! semiclassical sweeps, propagator-kernel expansions, and raw
//! argument-principle queries, with deterministic CSV/JSON output.

mod config;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use config::{fmt_float, parse_bc, read_config_file, AlphaSpec};
use halfspace_resonances::semiclassical::{
    gamma_scaled, gamma_scaled_scale, SemiclassicalParams, Sign,
};
use halfspace_resonances::{
    expansion, oracle, solver, BoundaryCondition, ModelParams, Point,
};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "resonances",
    about = "Resonances of the Laplacian with a point interaction on the half-space",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Locate and classify all resonances with |z| < rmax
    Find(FindArgs),
    /// Emit the first 100 branch resonances with Re z > pi (Dirichlet,
    /// alpha = 0, y3 = 1) as plot data plus a JSON sidecar
    Fig1(Fig1Args),
    /// Counting reports over a radius grid, checked against the
    /// argument-principle oracle
    Count(CountArgs),
    /// Semiclassical band/parabola checks for the h-scaled families
    Semiclassical(SemiArgs),
    /// Schrodinger kernel expansion with the independent contour oracle
    Expand(ExpandArgs),
    /// Argument-principle zero count over a rectangle
    Oracle(OracleArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Boundary condition: dirichlet | neumann
    #[arg(long)]
    bc: Option<String>,
    /// Coupling strength: literal, or critical- | critical+ | lnpi2k:<k>
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Interaction height y3 > 0
    #[arg(long)]
    y3: Option<f64>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    common: Common,
    /// Search radius
    #[arg(long)]
    rmax: Option<f64>,
}

#[derive(Args)]
struct Fig1Args {
    /// Plot-data path; the JSON sidecar lands next to it as <out>.json
    #[arg(long, default_value = "fig1.dat")]
    out: PathBuf,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated radius grid (overrides --rmax)
    #[arg(long)]
    radii: Option<String>,
    /// Single radius
    #[arg(long)]
    rmax: Option<f64>,
    /// Allowed |exact - asymptotic| gap
    #[arg(long)]
    slack: Option<i64>,
}

#[derive(Args)]
struct SemiArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Annulus parameter: checks apply to roots with eps <= |z| <= 1/eps
    #[arg(long)]
    eps: Option<f64>,
    /// Coupling sign: plus | minus
    #[arg(long)]
    sign: Option<String>,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    t: Option<f64>,
    /// First kernel point, "x1,x2,x3"
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Second kernel point, "x1,x2,x3"
    #[arg(long, allow_hyphen_values = true)]
    xp: Option<String>,
    /// Largest branch index included in the residue sum
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Rectangle "re_min,re_max,im_min,im_max"
    #[arg(long, allow_hyphen_values = true)]
    rect: Option<String>,
}

enum Failure {
    Usage(String),
    Consistency(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("RESONANCE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Find(a) => cmd_find(a),
        Cmd::Fig1(a) => cmd_fig1(a),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Semiclassical(a) => cmd_semiclassical(a),
        Cmd::Expand(a) => cmd_expand(a),
        Cmd::Oracle(a) => cmd_oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

/// Settings shared by the model-based commands, after merging flags over the
/// config file over defaults.
struct Resolved {
    params: ModelParams,
    alpha_spec: AlphaSpec,
    format: Format,
    out: Option<PathBuf>,
    file: BTreeMap<String, String>,
}

fn resolve(common: &Common) -> Result<Resolved, Failure> {
    let file = match &common.config {
        Some(p) => read_config_file(p).map_err(|e| Failure::Usage(e.to_string()))?,
        None => BTreeMap::new(),
    };
    let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());
    let bc = match pick(common.bc.clone(), "bc") {
        Some(s) => parse_bc(&s).map_err(|e| Failure::Usage(e.to_string()))?,
        None => BoundaryCondition::Dirichlet,
    };
    let y3 = match pick(common.y3.map(|v| v.to_string()), "y3") {
        Some(s) => s.parse::<f64>().map_err(|_| Failure::Usage(format!("bad y3: {s}")))?,
        None => 1.0,
    };
    if !(y3 > 0.0) || !y3.is_finite() {
        return Err(Failure::Usage(format!("y3 must be positive and finite, got {y3}")));
    }
    let alpha_spec = match pick(common.alpha.clone(), "alpha") {
        Some(s) => AlphaSpec::parse(&s).map_err(|e| Failure::Usage(e.to_string()))?,
        None => AlphaSpec::Literal(0.0),
    };
    let params = ModelParams::on_axis(bc, alpha_spec.resolve(y3), y3)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let format = match pick(common.format.clone(), "format").as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(Failure::Usage(format!("unknown format: {other}"))),
    };
    let out = common.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    Ok(Resolved { params, alpha_spec, format, out, file })
}

impl Resolved {
    fn pick_str(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned())
    }

    fn pick_f64(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, Failure> {
        match self.pick_str(flag.map(|v| v.to_string()), key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("bad value for {key}: {s}"))),
        }
    }

    fn config_json(&self, extra: &[(&str, Value)]) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("bc".into(), json!(self.params.bc.to_string()));
        m.insert("alpha".into(), json!(self.alpha_spec.as_tag()));
        m.insert("y3".into(), json!(fmt_float(self.params.y3())));
        for (k, v) in extra {
            m.insert((*k).into(), v.clone());
        }
        Value::Object(m)
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Failure::Internal(anyhow!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Rows rendered as CSV (header + comma rows) or a JSON document carrying
/// the resolved config for round-tripping.
fn render(
    format: Format,
    config: Value,
    columns: &[&str],
    rows: &[Vec<String>],
    json_rows: &[Value],
) -> String {
    match format {
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&columns.join(","));
            s.push('\n');
            for r in rows {
                s.push_str(&r.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let doc = json!({ "config": config, "rows": json_rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::Usage(format!("point must be three comma-separated reals: {s}")));
    }
    let mut c = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        c[i] = p
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad coordinate in point {s}")))?;
    }
    Ok(Point(c))
}

fn cmd_find(a: FindArgs) -> Result<(), Failure> {
    let r = resolve(&a.common)?;
    let rmax = r
        .pick_f64(a.rmax, "rmax")?
        .ok_or_else(|| Failure::Usage("find requires --rmax".into()))?;
    if !(rmax > 0.0) {
        return Err(Failure::Usage(format!("rmax must be positive, got {rmax}")));
    }
    let list = solver::find_all(&r.params, rmax)
        .map_err(|e| Failure::Internal(anyhow!("solver: {e}")))?;
    // cross-check against the argument principle before emitting anything
    match solver::count_exact(&r.params, rmax) {
        Ok(_) => {}
        Err(solver::SolverError::CountMismatch { exact, oracle }) => {
            return Err(Failure::Consistency(format!(
                "solver found {exact} zeros, argument principle {oracle}"
            )));
        }
        Err(e) => return Err(Failure::Internal(anyhow!("oracle count: {e}"))),
    }
    let columns =
        ["re", "im", "kind", "branch", "multiplicity", "gamma_residual", "on_curve_error"];
    let mut rows = Vec::new();
    let mut jrows = Vec::new();
    for res in &list {
        let curve = res.on_curve_error(&r.params);
        rows.push(vec![
            fmt_float(res.z.re),
            fmt_float(res.z.im),
            res.kind.to_string(),
            res.branch.to_string(),
            res.multiplicity.to_string(),
            fmt_float(res.gamma_residual(&r.params)),
            curve.map(fmt_float).unwrap_or_default(),
        ]);
        jrows.push(json!({
            "re": fmt_float(res.z.re),
            "im": fmt_float(res.z.im),
            "kind": res.kind.to_string(),
            "branch": res.branch,
            "multiplicity": res.multiplicity,
            "gamma_residual": fmt_float(res.gamma_residual(&r.params)),
            "on_curve_error": curve.map(fmt_float),
        }));
    }
    let cfg = r.config_json(&[("rmax", json!(fmt_float(rmax))), ("command", json!("find"))]);
    let body = render(r.format, cfg, &columns, &rows, &jrows);
    write_output(r.out.as_deref(), &body)
}

fn cmd_fig1(a: Fig1Args) -> Result<(), Failure> {
    let params = ModelParams::on_axis(BoundaryCondition::Dirichlet, 0.0, 1.0)
        .expect("figure parameters are valid");
    let mut text = String::new();
    let mut sidecar = Vec::new();
    for k in 1..=100i64 {
        let (_, root) =
            solver::find_branch(&params, k).map_err(|e| Failure::Internal(anyhow!("{e}")))?;
        text.push_str(&format!("{} {}\n", fmt_float(root.z.re), fmt_float(root.z.im)));
        sidecar.push(json!({
            "k": k,
            "re": fmt_float(root.z.re),
            "im": fmt_float(root.z.im),
            "gamma_residual": fmt_float(root.gamma_residual(&params)),
            "on_curve_error": fmt_float(root.on_curve_error(&params).unwrap()),
        }));
    }
    write_output(Some(&a.out), &text)?;
    let side = serde_json::to_string_pretty(&json!({
        "config": {"bc": "dirichlet", "alpha": "0", "y3": fmt_float(1.0), "command": "fig1"},
        "rows": sidecar,
    }))
    .expect("serializable");
    let mut side_path = a.out.clone().into_os_string();
    side_path.push(".json");
    write_output(Some(Path::new(&side_path)), &(side + "\n"))
}

fn cmd_count(a: CountArgs) -> Result<(), Failure> {
    let r = resolve(&a.common)?;
    let radii_spec = r.pick_str(a.radii.clone(), "radii");
    let radii: Vec<f64> = match &radii_spec {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("bad radii list: {s}")))?,
        None => vec![r
            .pick_f64(a.rmax, "rmax")?
            .ok_or_else(|| Failure::Usage("count requires --radii or --rmax".into()))?],
    };
    let slack = match r.pick_str(a.slack.map(|v| v.to_string()), "slack") {
        Some(s) => s.parse::<i64>().map_err(|_| Failure::Usage(format!("bad slack: {s}")))?,
        None => solver::DEFAULT_COUNT_SLACK,
    };
    let columns = ["radius", "exact", "asymptotic", "oracle"];
    let mut rows = Vec::new();
    let mut jrows = Vec::new();
    for &radius in &radii {
        if !(radius > 0.0) {
            return Err(Failure::Usage(format!("radius must be positive, got {radius}")));
        }
        let rep = match solver::count_exact(&r.params, radius) {
            Ok(rep) => rep,
            Err(solver::SolverError::CountMismatch { exact, oracle }) => {
                return Err(Failure::Consistency(format!(
                    "R={radius}: solver {exact} vs argument principle {oracle}"
                )));
            }
            Err(e) => return Err(Failure::Internal(anyhow!("{e}"))),
        };
        if !rep.within_slack(slack) {
            return Err(Failure::Consistency(format!(
                "R={radius}: |{} - {}| exceeds slack {slack}",
                rep.exact_count, rep.asymptotic_count
            )));
        }
        rows.push(vec![
            fmt_float(radius),
            rep.exact_count.to_string(),
            rep.asymptotic_count.to_string(),
            rep.oracle_count.to_string(),
        ]);
        jrows.push(json!({
            "radius": fmt_float(radius),
            "exact": rep.exact_count,
            "asymptotic": rep.asymptotic_count,
            "oracle": rep.oracle_count,
        }));
    }
    let radii_str = radii.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let cfg = r.config_json(&[
        ("radii", json!(radii_str)),
        ("slack", json!(slack)),
        ("command", json!("count")),
    ]);
    let body = render(r.format, cfg, &columns, &rows, &jrows);
    write_output(r.out.as_deref(), &body)
}

fn cmd_semiclassical(a: SemiArgs) -> Result<(), Failure> {
    let r = resolve(&a.common)?;
    let h = r
        .pick_f64(a.h, "h")?
        .ok_or_else(|| Failure::Usage("semiclassical requires --h".into()))?;
    let beta = r
        .pick_f64(a.beta, "beta")?
        .ok_or_else(|| Failure::Usage("semiclassical requires --beta".into()))?;
    let eps = r
        .pick_f64(a.eps, "eps")?
        .ok_or_else(|| Failure::Usage("semiclassical requires --eps".into()))?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Failure::Usage(format!("eps must lie in (0,1), got {eps}")));
    }
    let sign = match r.pick_str(a.sign.clone(), "sign").as_deref() {
        Some("plus") | None => Sign::Plus,
        Some("minus") => Sign::Minus,
        Some(other) => return Err(Failure::Usage(format!("unknown sign: {other}"))),
    };
    let p = SemiclassicalParams::new(h, beta, sign, r.params.bc, r.params.y3())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let (mode, checks) = if beta < 1.0 {
        ("band", halfspace_resonances::semiclassical::verify_band_beta_lt1(&p, eps))
    } else if beta > 1.0 {
        ("parabola", halfspace_resonances::semiclassical::verify_parabola_beta_gt1(&p, eps))
    } else {
        return Err(Failure::Usage("beta = 1 separates the two regimes; use beta != 1".into()));
    };
    let checks = checks.map_err(|e| Failure::Internal(anyhow!("{e}")))?;
    let columns =
        ["k", "re", "im", "check", "lower_ok", "upper_ok", "slack", "bound", "residual"];
    let mut rows = Vec::new();
    let mut jrows = Vec::new();
    let mut failed = 0usize;
    for c in &checks {
        if !c.passed() {
            failed += 1;
        }
        let resid = gamma_scaled(&p, c.z).norm() / gamma_scaled_scale(&p, c.z);
        rows.push(vec![
            c.k.to_string(),
            fmt_float(c.z.re),
            fmt_float(c.z.im),
            mode.to_string(),
            c.lower_ok.to_string(),
            c.upper_ok.to_string(),
            fmt_float(c.slack),
            fmt_float(c.bound),
            fmt_float(resid),
        ]);
        jrows.push(json!({
            "k": c.k,
            "re": fmt_float(c.z.re),
            "im": fmt_float(c.z.im),
            "check": mode,
            "lower_ok": c.lower_ok,
            "upper_ok": c.upper_ok,
            "slack": fmt_float(c.slack),
            "bound": fmt_float(c.bound),
            "residual": fmt_float(resid),
        }));
    }
    let cfg = r.config_json(&[
        ("h", json!(fmt_float(h))),
        ("beta", json!(fmt_float(beta))),
        ("eps", json!(fmt_float(eps))),
        ("sign", json!(sign.to_string())),
        ("command", json!("semiclassical")),
    ]);
    let body = render(r.format, cfg, &columns, &rows, &jrows);
    write_output(r.out.as_deref(), &body)?;
    if failed > 0 {
        return Err(Failure::Consistency(format!(
            "{failed} of {} roots violate the {mode} bound",
            checks.len()
        )));
    }
    Ok(())
}

fn cmd_expand(a: ExpandArgs) -> Result<(), Failure> {
    let r = resolve(&a.common)?;
    let t = r
        .pick_f64(a.t, "t")?
        .ok_or_else(|| Failure::Usage("expand requires --t".into()))?;
    let x = parse_point(
        &r.pick_str(a.x.clone(), "x")
            .ok_or_else(|| Failure::Usage("expand requires --x".into()))?,
    )?;
    let xp = parse_point(
        &r.pick_str(a.xp.clone(), "xp")
            .ok_or_else(|| Failure::Usage("expand requires --xp".into()))?,
    )?;
    let nmax = match r.pick_str(a.nmax.map(|v| v.to_string()), "nmax") {
        Some(s) => s.parse::<usize>().map_err(|_| Failure::Usage(format!("bad nmax: {s}")))?,
        None => 40,
    };
    let ke = expansion::schrodinger_kernel(&r.params, t, &x, &xp, nmax)
        .map_err(|e| Failure::Internal(anyhow!("{e}")))?;
    let direct = oracle::schrodinger_direct(&r.params, t, &x, &xp)
        .map_err(|e| Failure::Internal(anyhow!("{e}")))?;
    let oracle_total = expansion::free_term(t, &x, &xp) + direct;
    let delta = (ke.total - oracle_total).norm() / ke.total.norm().max(1e-300);
    let columns = [
        "free_re",
        "free_im",
        "residue_re",
        "residue_im",
        "background_re",
        "background_im",
        "total_re",
        "total_im",
        "oracle_re",
        "oracle_im",
        "oracle_rel_delta",
    ];
    let row = vec![
        fmt_float(ke.free_term.re),
        fmt_float(ke.free_term.im),
        fmt_float(ke.residue_sum.re),
        fmt_float(ke.residue_sum.im),
        fmt_float(ke.background.re),
        fmt_float(ke.background.im),
        fmt_float(ke.total.re),
        fmt_float(ke.total.im),
        fmt_float(oracle_total.re),
        fmt_float(oracle_total.im),
        fmt_float(delta),
    ];
    let jrow = json!({
        "free": [fmt_float(ke.free_term.re), fmt_float(ke.free_term.im)],
        "residue_sum": [fmt_float(ke.residue_sum.re), fmt_float(ke.residue_sum.im)],
        "background": [fmt_float(ke.background.re), fmt_float(ke.background.im)],
        "total": [fmt_float(ke.total.re), fmt_float(ke.total.im)],
        "oracle_total": [fmt_float(oracle_total.re), fmt_float(oracle_total.im)],
        "oracle_rel_delta": fmt_float(delta),
    });
    let cfg = r.config_json(&[
        ("t", json!(fmt_float(t))),
        ("x", json!(format!("{},{},{}", x.0[0], x.0[1], x.0[2]))),
        ("xp", json!(format!("{},{},{}", xp.0[0], xp.0[1], xp.0[2]))),
        ("nmax", json!(nmax)),
        ("command", json!("expand")),
    ]);
    let body = render(r.format, cfg, &columns, &[row], &[jrow]);
    write_output(r.out.as_deref(), &body)?;
    if delta > 1e-6 {
        return Err(Failure::Consistency(format!(
            "expansion total disagrees with the contour oracle: rel delta {delta:.3e}"
        )));
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let r = resolve(&a.common)?;
    let rect_spec = r
        .pick_str(a.rect.clone(), "rect")
        .ok_or_else(|| Failure::Usage("oracle requires --rect re_min,re_max,im_min,im_max".into()))?;
    let vals: Vec<f64> = rect_spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad rectangle: {rect_spec}")))?;
    if vals.len() != 4 {
        return Err(Failure::Usage(format!("rectangle needs four numbers: {rect_spec}")));
    }
    let rect = oracle::Rectangle::new(vals[0], vals[1], vals[2], vals[3])
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let w = oracle::winding_count(&r.params, &rect)
        .map_err(|e| Failure::Internal(anyhow!("{e}")))?;
    let columns = ["count", "raw_re", "raw_im", "certified"];
    let row = vec![
        w.count.to_string(),
        fmt_float(w.raw.re),
        fmt_float(w.raw.im),
        w.certified.to_string(),
    ];
    let jrow = json!({
        "count": w.count,
        "raw_re": fmt_float(w.raw.re),
        "raw_im": fmt_float(w.raw.im),
        "certified": w.certified,
    });
    let cfg = r.config_json(&[("rect", json!(rect_spec)), ("command", json!("oracle"))]);
    let body = render(r.format, cfg, &columns, &[row], &[jrow]);
    write_output(r.out.as_deref(), &body)?;
    if !w.certified {
        return Err(Failure::Consistency("winding value failed certification".into()));
    }
    Ok(())
}
