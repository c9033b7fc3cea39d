//! Runs every applicable check on every corpus entry and compares the
//! verdicts with a golden outcome file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::enlarge::t0_check;
use crate::error::Result;
use crate::fitz::{family_order_check, phi_of, bs_identity_check, ExactPhi, LP_TOL};
use crate::operator::{sample_graph, OperatorSpec};
use crate::optim::MultistartConfig;
use crate::polar::{cond_as_check, phi_ge_pi_check, polar_decide_report};
use crate::report::{CheckReport, Status};
use crate::space::Window;
use crate::zoo::{classify, convexity_check, default_window, lemma_bas_suite, maximality_check, CorpusEntry};

/// Default number of midpoint pairs in the convexity check.
pub const CONVEXITY_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, tol: 1e-8, trials: CONVEXITY_TRIALS }
    }
}

/// `entry name -> check name -> status`.
pub type Outcomes = BTreeMap<String, BTreeMap<String, Status>>;

#[derive(Debug, Clone)]
pub struct SuiteRun {
    /// `(entry, report)`; the corpus-level lemma report uses entry `corpus`.
    pub reports: Vec<(String, CheckReport)>,
}

impl SuiteRun {
    pub fn outcomes(&self) -> Outcomes {
        let mut out = Outcomes::new();
        for (name, r) in &self.reports {
            out.entry(name.clone()).or_default().insert(r.check.clone(), r.status);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub entry: String,
    pub check: String,
    pub expected: Option<Status>,
    pub actual: Option<Status>,
}

/// Checks where golden and actual verdicts differ, including checks present
/// on one side only.
pub fn compare_outcomes(golden: &Outcomes, actual: &Outcomes) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let names: std::collections::BTreeSet<&String> = golden.keys().chain(actual.keys()).collect();
    for name in names {
        let empty = BTreeMap::new();
        let g = golden.get(name).unwrap_or(&empty);
        let a = actual.get(name).unwrap_or(&empty);
        let checks: std::collections::BTreeSet<&String> = g.keys().chain(a.keys()).collect();
        for c in checks {
            let (e, v) = (g.get(c).copied(), a.get(c).copied());
            if e != v {
                out.push(Mismatch { entry: name.clone(), check: c.clone(), expected: e, actual: v });
            }
        }
    }
    out
}

fn pair_grid(w: &Window, n: usize, coarse: bool) -> Result<Window> {
    let pair = w.to_pair(n)?;
    if coarse && n > 1 {
        let res = vec![5; pair.dim()];
        return Window::new(pair.lower.clone(), pair.upper.clone(), res);
    }
    Ok(pair)
}

/// Every check that applies to one entry, in a fixed order.
pub fn run_entry(entry: &CorpusEntry, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let spec = &entry.spec;
    let n = spec.dim();
    let w = entry.window.clone().unwrap_or_else(|| default_window(n));
    let tags = classify(spec)?;
    let mcfg = MultistartConfig::with_seed(cfg.seed);
    let graph = match spec {
        OperatorSpec::FiniteGraph(g) => g.clone(),
        _ => sample_graph(spec, &w)?,
    };
    let test_points = pair_grid(&w, n, true)?.pair_points()?;

    let mut out = Vec::new();
    out.push(bs_identity_check(&graph, &test_points, LP_TOL)?);
    out.push(family_order_check(&graph, &[phi_of(&graph)?], &test_points, 1e-9)?);
    out.push(convexity_check(spec, &w, cfg.trials, cfg.seed)?);
    if tags.monotone {
        out.push(maximality_check(spec, &w, cfg.tol)?);
    }
    if tags.maximal {
        out.push(t0_check(spec, &w, cfg.tol)?);
        out.push(cond_as_check(spec, &w, 1e-6)?);
    }
    match spec {
        OperatorSpec::FiniteGraph(g) => out.push(polar_decide_report(g, spec.kind(), entry.window.as_ref(), &mcfg)?),
        _ if ExactPhi::of(spec)?.is_some() => out.push(phi_ge_pi_check(spec, &w, cfg.tol, &mcfg)?),
        _ => {}
    }
    // Reports carry the corpus name rather than the operator kind.
    for r in &mut out {
        r.operator = entry.name.clone();
        if r.seed.is_none() {
            r.seed = Some(cfg.seed);
        }
    }
    Ok(out)
}

/// Runs the corpus sequentially, which keeps per-check LP counts exact.
pub fn run_suite(corpus: &[CorpusEntry], cfg: &SuiteConfig) -> Result<SuiteRun> {
    let mut reports = Vec::new();
    for e in corpus {
        for r in run_entry(e, cfg)? {
            reports.push((e.name.clone(), r));
        }
    }
    let mut lemma = lemma_bas_suite(corpus, 1e-9, cfg.trials, cfg.seed)?;
    lemma.operator = "corpus".into();
    reports.push(("corpus".into(), lemma));
    Ok(SuiteRun { reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatches_cover_both_sides() {
        let mut g = Outcomes::new();
        g.entry("a".into()).or_default().insert("x".into(), Status::Pass);
        g.entry("a".into()).or_default().insert("y".into(), Status::Fail);
        let mut a = Outcomes::new();
        a.entry("a".into()).or_default().insert("x".into(), Status::Pass);
        a.entry("b".into()).or_default().insert("x".into(), Status::Pass);
        let m = compare_outcomes(&g, &a);
        assert_eq!(m.len(), 2);
        assert!(compare_outcomes(&g, &g).is_empty());
    }

    #[test]
    fn identity_entry_passes_everything() {
        let e = CorpusEntry { name: "id".into(), spec: OperatorSpec::identity(1), window: None };
        let rs = run_entry(&e, &SuiteConfig::default()).unwrap();
        for r in &rs {
            assert_eq!(r.status, Status::Pass, "{}: {:?}", r.check, r);
        }
        assert_eq!(rs.len(), 7);
    }
}
