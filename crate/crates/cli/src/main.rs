//! `fitzcalc`: command-line front end.
//!
//! Exit codes: 0 pass (or bounded pass), 1 property violated or refused,
//! 2 input or schema error, 3 solver failure or internal inconsistency.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use fitzcalc_core::convexfn::{conjugate, ConvexFuncRep};
use fitzcalc_core::enlarge::{br_search_report, t0_check, te_contains, te_gap, BRQuery};
use fitzcalc_core::fitz::{in_family_check, phi_of, s_of, ExactPhi, GRID_TOL, LP_TOL};
use fitzcalc_core::operator::sample_graph;
use fitzcalc_core::optim::MultistartConfig;
use fitzcalc_core::polar::{cond_as_check, phi_ge_pi_check, polar_decide_report, Polar};
use fitzcalc_core::report::{report_diff, ReportBuilder};
use fitzcalc_core::suite::{compare_outcomes, run_suite, Outcomes, SuiteConfig};
use fitzcalc_core::zoo::{affine_fit, build_operator, convexity_check, default_window, load_corpus, maximality_check};
use fitzcalc_core::{CheckReport, Error, ExtReal, FiniteGraph, OperatorSpec, PairPoint, Result, Status, Window, Witness};

use output::{emit_report, grid_csv, grid_path, report_json, write_atomic};

#[derive(Parser)]
#[command(name = "fitzcalc", version, about = "Convex calculus of finite-dimensional monotone operators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Operator specification (JSON).
    #[arg(long)]
    op: PathBuf,
    /// `lo:hi:res` per axis, comma separated; one axis is replicated.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report files; reports go to stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the evaluated grid as CSV.
    #[arg(long)]
    dump_grid: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Func {
    Phi,
    S,
    Zero,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fitzpatrick function at a point or on a grid.
    EvalPhi {
        #[command(flatten)]
        c: Common,
        /// Point `x1,..,xn,xs1,..,xsn`.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// S-function of the (sampled) graph.
    EvalS {
        #[command(flatten)]
        c: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Conjugate of φ or S of the (sampled) graph.
    Conjugate {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "s")]
        of: Func,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Is a point in the monotone polar of the (sampled) graph?
    PolarTest {
        #[command(flatten)]
        c: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Search for two polar points with a negative monotone product.
    PolarDecide {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Pre-maximality: polar search for finite graphs, φ >= π otherwise.
    Premax {
        #[command(flatten)]
        c: Common,
    },
    /// The condition (S_T)*(x*, x) >= <x*, x>.
    CondAs {
        #[command(flatten)]
        c: Common,
    },
    /// ε-enlargement membership at a point, or T⁰ = T on the grid.
    Enlargement {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Graph point near a point of the ε-enlargement.
    BrSearch {
        #[command(flatten)]
        c: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        eps_tilde: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Membership of φ, S or 0 in the Fitzpatrick family.
    FamilyCheck {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value = "phi")]
        h: Func,
    },
    /// Graph convexity, affine fit and maximality.
    Structure {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Every check on every corpus entry, compared with golden outcomes.
    Suite {
        #[arg(long, env = "FITZCALC_CORPUS", default_value = "data/corpus.json")]
        corpus: PathBuf,
        /// Golden outcomes; defaults to golden.json next to the corpus.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Compare two reports, ignoring wall time.
    ReportDiff {
        a: PathBuf,
        b: PathBuf,
        /// Compare only check, operator and status.
        #[arg(long)]
        verdict_only: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fitzcalc: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Refused(_) => 1,
        Error::DimensionMismatch { .. } | Error::EmptyGraph | Error::Input(_) | Error::Unsupported(_) => 2,
        Error::Solver(_) | Error::Internal(_) => 3,
    }
}

fn status_code(s: Status) -> u8 {
    if s.is_success() { 0 } else { 1 }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_op(c: &Common) -> Result<OperatorSpec> {
    Ok(build_operator(&read_json(&c.op)?)?.0)
}

fn parse_window(s: &str, n: usize) -> Result<Window> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut res = Vec::new();
    for axis in s.split(',') {
        let parts: Vec<&str> = axis.trim().split(':').collect();
        let bad = || Error::Input(format!("window axis {axis:?}: expected lo:hi:res"));
        if parts.len() != 3 {
            return Err(bad());
        }
        lo.push(parts[0].parse::<f64>().map_err(|_| bad())?);
        hi.push(parts[1].parse::<f64>().map_err(|_| bad())?);
        res.push(parts[2].parse::<usize>().map_err(|_| bad())?);
    }
    if lo.len() == 1 {
        lo = vec![lo[0]; n];
        hi = vec![hi[0]; n];
        res = vec![res[0]; n];
    }
    Window::new(lo, hi, res)
}

fn window_of(c: &Common, n: usize) -> Result<Window> {
    match &c.window {
        Some(s) => parse_window(s, n),
        None => Ok(default_window(n)),
    }
}

fn parse_point(s: &str) -> Result<PairPoint> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad coordinate {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    PairPoint::from_flat(&v)
}

fn graph_of(spec: &OperatorSpec, w: &Window) -> Result<FiniteGraph> {
    match spec {
        OperatorSpec::FiniteGraph(g) => Ok(g.clone()),
        _ => sample_graph(spec, w),
    }
}

/// Evaluates at `--at` (printed) and/or on the window grid (`--dump-grid`).
fn evaluate(c: &Common, n: usize, name: &str, at: Option<&str>, f: impl Fn(&PairPoint) -> Result<ExtReal>) -> Result<u8> {
    if at.is_none() && !c.dump_grid {
        return Err(Error::Input("give --at or --dump-grid".into()));
    }
    if let Some(at) = at {
        let z = parse_point(at)?;
        if z.dim() != n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: 2 * z.dim() });
        }
        println!("{}", f(&z)?);
    }
    if c.dump_grid {
        let pair = window_of(c, n)?.to_pair(n)?;
        let rows = pair.pair_points()?.into_iter().map(|z| Ok((z.clone(), f(&z)?))).collect::<Result<Vec<_>>>()?;
        write_atomic(&grid_path(c.out.as_deref(), name), grid_csv(&rows).as_bytes())?;
    }
    Ok(0)
}

fn finish(r: CheckReport, c: &Common) -> Result<u8> {
    emit_report(&r, c.out.as_deref())?;
    Ok(status_code(r.status))
}

fn build_func(which: Func, spec: &OperatorSpec, w: &Window) -> Result<ConvexFuncRep> {
    let g = graph_of(spec, w)?;
    match which {
        Func::Phi => phi_of(&g),
        Func::S => s_of(&g),
        Func::Zero => Ok(ConvexFuncRep::zero(spec.dim())),
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::EvalPhi { c, at } => {
            let spec = load_op(&c)?;
            let n = spec.dim();
            match ExactPhi::of(&spec)? {
                Some(e) => evaluate(&c, n, "phi", at.as_deref(), |z| e.eval(z)),
                None => {
                    eprintln!("fitzcalc: no closed form; φ of the graph sampled on the window");
                    let f = phi_of(&sample_graph(&spec, &window_of(&c, n)?)?)?;
                    evaluate(&c, n, "phi", at.as_deref(), |z| f.eval(z))
                }
            }
        }
        Cmd::EvalS { c, at } => {
            let spec = load_op(&c)?;
            let n = spec.dim();
            let f = s_of(&graph_of(&spec, &window_of(&c, n)?)?)?;
            evaluate(&c, n, "s", at.as_deref(), |z| f.eval(z))
        }
        Cmd::Conjugate { c, of, at } => {
            let spec = load_op(&c)?;
            let n = spec.dim();
            let f = conjugate(&build_func(of, &spec, &window_of(&c, n)?)?)?;
            evaluate(&c, n, "conjugate", at.as_deref(), |z| f.eval(z))
        }
        Cmd::PolarTest { c, at } => {
            let spec = load_op(&c)?;
            let g = graph_of(&spec, &window_of(&c, spec.dim())?)?;
            let z = parse_point(&at)?;
            let polar = Polar::new(&g)?;
            let inside = polar.contains(&z)?;
            let mut rb = ReportBuilder::new("polar_test", spec.kind()).seed(c.seed);
            rb.evaluations(1);
            rb.detail("point", &z);
            rb.detail("phi_minus_pi", polar.margin(&z)?);
            if !inside {
                let m = polar.margin(&z)?;
                rb.witness(Witness::point("outside_polar", z, &[("phi_minus_pi", ExtReal::Finite(m))]));
            }
            finish(rb.finish(if inside { Status::Pass } else { Status::Fail })?, &c)
        }
        Cmd::PolarDecide { c, starts } => {
            let spec = load_op(&c)?;
            let n = spec.dim();
            let window = c.window.as_deref().map(|s| parse_window(s, n)).transpose()?;
            let g = match &spec {
                OperatorSpec::FiniteGraph(g) => g.clone(),
                _ => sample_graph(&spec, window.as_ref().ok_or_else(|| Error::Input("--window is needed to sample the graph".into()))?)?,
            };
            let mut cfg = MultistartConfig::with_seed(c.seed);
            if let Some(s) = starts {
                cfg.starts = s;
            }
            finish(polar_decide_report(&g, spec.kind(), window.as_ref(), &cfg)?, &c)
        }
        Cmd::Premax { c } => {
            let spec = load_op(&c)?;
            let cfg = MultistartConfig::with_seed(c.seed);
            let r = match &spec {
                OperatorSpec::FiniteGraph(g) => {
                    let w = c.window.as_deref().map(|s| parse_window(s, spec.dim())).transpose()?;
                    polar_decide_report(g, spec.kind(), w.as_ref(), &cfg)?
                }
                _ => phi_ge_pi_check(&spec, &window_of(&c, spec.dim())?, c.tol.unwrap_or(LP_TOL), &cfg)?,
            };
            finish(r, &c)
        }
        Cmd::CondAs { c } => {
            let spec = load_op(&c)?;
            let r = cond_as_check(&spec, &window_of(&c, spec.dim())?, c.tol.unwrap_or(GRID_TOL))?;
            finish(r, &c)
        }
        Cmd::Enlargement { c, eps, at } => {
            let spec = load_op(&c)?;
            let w = window_of(&c, spec.dim())?;
            let tol = c.tol.unwrap_or(LP_TOL);
            let r = match at {
                None => t0_check(&spec, &w, tol)?,
                Some(at) => {
                    let z = parse_point(&at)?;
                    let inside = te_contains(&spec, eps, &z, &w)?;
                    let gap = te_gap(&spec, &z, &w)?;
                    let mut rb = ReportBuilder::new("enlargement", spec.kind()).window(&w).tol("eps", eps);
                    rb.evaluations(1);
                    rb.detail("point", &z);
                    rb.detail("infimum", gap.infimum);
                    rb.detail("exact", gap.exact);
                    if !gap.exact {
                        rb.note("infimum taken over the window sample only");
                    }
                    if !inside {
                        let inf = gap.infimum.map_or(ExtReal::PosInf, |v| ExtReal::Finite(-v));
                        rb.witness(Witness::point("outside_enlargement", z, &[("neg_infimum", inf)]));
                    }
                    rb.finish(if inside { Status::Pass } else { Status::Fail })?
                }
            };
            finish(r, &c)
        }
        Cmd::BrSearch { c, at, eps, eps_tilde, lambda } => {
            let spec = load_op(&c)?;
            let z = parse_point(&at)?;
            let q = BRQuery { x: z.x, xs: z.xs, eps, eps_tilde, lambda };
            let w = c.window.as_deref().map(|s| parse_window(s, spec.dim())).transpose()?;
            finish(br_search_report(&spec, &q, w.as_ref())?, &c)
        }
        Cmd::FamilyCheck { c, h } => {
            let spec = load_op(&c)?;
            let w = window_of(&c, spec.dim())?;
            let f = build_func(h, &spec, &w)?;
            let tol = c.tol.unwrap_or(GRID_TOL);
            let mut rb = ReportBuilder::new("family", spec.kind()).window(&w).tol("tol", tol);
            let fr = in_family_check(&f, &spec, &w, tol)?;
            rb.detail("function", f.kind());
            rb.detail("lower_gap", fr.lower_gap);
            rb.detail("graph_gap", fr.graph_gap);
            for z in &fr.witnesses {
                let v = f.eval(z)?;
                rb.witness(Witness::point("family_violation", z.clone(), &[("h", v), ("pi", ExtReal::Finite(z.duality()))]));
            }
            if c.dump_grid {
                let rows = w.to_pair(spec.dim())?.pair_points()?.into_iter().map(|z| Ok((z.clone(), f.eval(&z)?))).collect::<Result<Vec<_>>>()?;
                write_atomic(&grid_path(c.out.as_deref(), "family"), grid_csv(&rows).as_bytes())?;
            }
            finish(rb.finish(fr.verdict)?, &c)
        }
        Cmd::Structure { c, trials } => {
            let spec = load_op(&c)?;
            let w = window_of(&c, spec.dim())?;
            let tol = c.tol.unwrap_or(1e-9);
            let convex = convexity_check(&spec, &w, trials, c.seed)?;
            let maximal = maximality_check(&spec, &w, LP_TOL)?;
            let fit = affine_fit(&graph_of(&spec, &w)?, tol)?;
            let mut rb = ReportBuilder::new("affine_fit", spec.kind()).window(&w).tol("residual", tol);
            rb.detail("fit", &fit);
            let affine = fit.residual <= tol;
            if !affine {
                rb.witness(Witness::point("not_affine", fit.offset.clone(), &[("residual", ExtReal::Finite(fit.residual))]));
            }
            let fit_report = rb.finish(if affine { Status::Pass } else { Status::Fail })?;
            let mut code = 0;
            for r in [convex, maximal, fit_report] {
                emit_report(&r, c.out.as_deref())?;
                code = code.max(status_code(r.status));
            }
            Ok(code)
        }
        Cmd::Suite { corpus, golden, out, seed, trials } => suite(&corpus, golden.as_deref(), out.as_deref(), seed, trials),
        Cmd::ReportDiff { a, b, verdict_only } => {
            let d = report_diff(&read_json(&a)?, &read_json(&b)?, verdict_only)?;
            if d.equivalent {
                println!("equivalent");
                Ok(0)
            } else {
                for p in &d.differences {
                    println!("differs: {p}");
                }
                Ok(1)
            }
        }
    }
}

fn suite(corpus: &Path, golden: Option<&Path>, out: Option<&Path>, seed: u64, trials: usize) -> Result<u8> {
    let entries = load_corpus(corpus)?;
    let golden_path = golden.map(Path::to_path_buf).unwrap_or_else(|| corpus.with_file_name("golden.json"));
    let expected: Outcomes = serde_json::from_value(read_json(&golden_path)?)
        .map_err(|e| Error::Input(format!("{}: {e}", golden_path.display())))?;
    let run = run_suite(&entries, &SuiteConfig { seed, trials, ..SuiteConfig::default() })?;
    if let Some(dir) = out {
        for (name, r) in &run.reports {
            write_atomic(&dir.join(name).join(format!("{}.json", r.check)), report_json(r).as_bytes())?;
        }
    }
    let actual = run.outcomes();
    let mismatches = compare_outcomes(&expected, &actual);
    for (name, r) in &run.reports {
        let flag = if mismatches.iter().any(|m| &m.entry == name && m.check == r.check) { "  MISMATCH" } else { "" };
        println!("{name:<24} {:<14} {:?}{flag}", r.check, r.status);
    }
    let summary = serde_json::json!({
        "corpus": corpus.display().to_string(),
        "seed": seed,
        "outcomes": actual,
        "mismatches": mismatches,
        "matches_golden": mismatches.is_empty(),
    });
    if let Some(dir) = out {
        write_atomic(&dir.join("suite.json"), (serde_json::to_string_pretty(&summary).expect("serializable") + "\n").as_bytes())?;
    }
    println!("{} reports, {} mismatches against {}", run.reports.len(), mismatches.len(), golden_path.display());
    Ok(if mismatches.is_empty() { 0 } else { 1 })
}
