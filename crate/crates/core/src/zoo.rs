//! The example-operator corpus and structural checks: graph convexity,
//! affine-subspace fitting and maximality on a grid.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::enlarge::te_gap;
use crate::error::{Error, Result};
use crate::fitz::MAX_WITNESSES;
use crate::operator::{is_monotone_set, membership, sample_graph, FiniteGraph, OperatorSpec};
use crate::optim::{start_rng, unit_f64};
use crate::report::{CheckReport, ReportBuilder, Status, Witness};
use crate::space::{PairPoint, Window};

/// Midpoint membership tolerance in the convexity check.
pub const MIDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tags {
    pub monotone: bool,
    /// Known maximal monotone; `false` also means "not established".
    pub maximal: bool,
}

pub fn classify(spec: &OperatorSpec) -> Result<Tags> {
    spec.validate()?;
    Ok(match spec {
        OperatorSpec::Affine { m, b } => {
            let n = b.len();
            let mm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
            let sym = (&mm + mm.transpose()) * 0.5;
            let scale = sym.amax().max(1.0);
            let min = SymmetricEigen::new(sym).eigenvalues.min();
            let monotone = min >= -1e-12 * scale;
            Tags { monotone, maximal: monotone }
        }
        // The subdifferential of a finite convex function.
        OperatorSpec::SubdiffPolyhedral { .. } => Tags { monotone: true, maximal: true },
        OperatorSpec::FiniteGraph(g) => Tags { monotone: !g.is_empty() && is_monotone_set(g)?.monotone, maximal: false },
        OperatorSpec::Restricted { inner, .. } => Tags { monotone: classify(inner)?.monotone, maximal: false },
        OperatorSpec::Inverse { inner } => classify(inner)?,
    })
}

pub fn build_operator(v: &Value) -> Result<(OperatorSpec, Tags)> {
    let spec = OperatorSpec::from_json(v)?;
    let tags = classify(&spec)?;
    Ok((spec, tags))
}

fn graph_of(spec: &OperatorSpec, window: &Window) -> Result<FiniteGraph> {
    match spec {
        OperatorSpec::FiniteGraph(g) => Ok(g.clone()),
        _ => sample_graph(spec, window),
    }
}

/// Midpoints of pairs of graph points must lie on the graph. All pairs are
/// tested when there are at most `trials` of them, otherwise `trials`
/// seeded random pairs.
pub fn convexity_check(spec: &OperatorSpec, window: &Window, trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rb = ReportBuilder::new("convexity", spec.kind()).window(window).tol("midpoint", MIDPOINT_TOL).seed(seed);
    let g = graph_of(spec, window)?;
    let pts = g.points();
    let k = pts.len();
    let total = k * k.saturating_sub(1) / 2;
    let pairs: Vec<(usize, usize)> = if total <= trials {
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
    } else {
        let mut rng = start_rng(seed, 0);
        (0..trials)
            .map(|_| {
                let i = (unit_f64(&mut rng) * k as f64) as usize;
                let mut j = (unit_f64(&mut rng) * (k - 1) as f64) as usize;
                if j >= i {
                    j += 1;
                }
                (i.min(j), i.max(j))
            })
            .collect()
    };
    rb.detail("graph_points", k);
    rb.detail("pairs_tested", pairs.len());
    for (i, j) in pairs {
        let (a, b) = (&pts[i], &pts[j]);
        let mid = PairPoint::from_flat(&a.flat().iter().zip(b.flat()).map(|(u, v)| 0.5 * (u + v)).collect::<Vec<_>>())?;
        rb.evaluations(1);
        if !membership(spec, &mid, MIDPOINT_TOL)? {
            // Re-verify before reporting.
            let ok = membership(spec, a, MIDPOINT_TOL)? && membership(spec, b, MIDPOINT_TOL)? && !membership(spec, &mid, MIDPOINT_TOL)?;
            if !ok {
                return Err(Error::Internal("midpoint certificate failed re-verification".into()));
            }
            rb.witness(Witness::Midpoint { a: a.clone(), b: b.clone(), midpoint: mid });
            return rb.finish(Status::Fail);
        }
    }
    rb.finish(Status::Pass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    /// Orthonormal directions in `R^{2n}`, at most `n` of them.
    pub basis: Vec<Vec<f64>>,
    pub offset: PairPoint,
    /// Largest distance of a point to `offset + span(basis)`.
    pub residual: f64,
}

/// Best `n`-dimensional affine subspace through the first point.
///
/// The graph of a monotone affine map on `R^n` is `n`-dimensional, so the
/// span is capped at `n` directions (the top right singular vectors of the
/// translated points).
pub fn affine_fit(g: &FiniteGraph, tol: f64) -> Result<AffineFit> {
    let n = g.require_nonempty()?;
    let offset = g.points()[0].clone();
    let o = offset.flat();
    let rows: Vec<Vec<f64>> = g.points().iter().map(|p| p.flat().iter().zip(&o).map(|(a, b)| a - b).collect()).collect();
    let d = 2 * n;
    let mat = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let svd = mat.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Solver("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let smax = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let rank_tol = (tol * 1e-3).max(1e-13 * smax.max(1.0));
    let basis: Vec<Vec<f64>> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > rank_tol)
        .take(n)
        .map(|i| vt.row(i).iter().copied().collect())
        .collect();
    let mut residual = 0.0f64;
    for r in &rows {
        let mut res = r.clone();
        for b in &basis {
            let c: f64 = r.iter().zip(b).map(|(u, v)| u * v).sum();
            res.iter_mut().zip(b).for_each(|(x, v)| *x -= c * v);
        }
        residual = residual.max(res.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    Ok(AffineFit { basis, offset, residual })
}

/// Every grid point monotonically related to the whole graph must be on
/// it; the ones that are not could be added to the graph.
pub fn maximality_check(spec: &OperatorSpec, window: &Window, tol: f64) -> Result<CheckReport> {
    let pair = window.to_pair(spec.dim())?;
    let mut rb = ReportBuilder::new("maximality", spec.kind()).window(&pair).tol("tol", tol);
    if !classify(spec)?.monotone {
        rb.note("the operator is not monotone");
        return rb.finish(Status::Refused);
    }
    let mut extensions = 0u64;
    let mut bounded = false;
    for z in pair.pair_points()? {
        let gap = te_gap(spec, &z, window)?;
        bounded |= !gap.exact;
        rb.evaluations(1);
        // Related to every graph point with rounding slack, like te_contains.
        let related = gap.infimum.is_some_and(|v| v >= -64.0 * f64::EPSILON * (1.0 + z.duality().abs() + v.abs()));
        if related && !membership(spec, &z, tol)? {
            extensions += 1;
            if rb.witness_count() < MAX_WITNESSES {
                rb.witness(Witness::point("extension", z, &[]));
            }
        }
    }
    rb.detail("extension_points", extensions);
    if bounded {
        rb.note("infimum taken over the window sample only");
    }
    rb.finish(if extensions == 0 { Status::Pass } else { Status::Fail })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: OperatorSpec,
    /// Optional window for this entry's checks.
    pub window: Option<Window>,
}

pub fn parse_corpus(v: &Value) -> Result<Vec<CorpusEntry>> {
    let arr = v.as_array().ok_or_else(|| Error::input("corpus must be a JSON array"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        let spec = OperatorSpec::from_json(e).map_err(|err| Error::input(format!("corpus entry {i}: {err}")))?;
        let name = e.get("name").and_then(Value::as_str).map_or_else(|| format!("op{i}"), str::to_string);
        let window = match e.get("check_window") {
            Some(w) => Some(serde_json::from_value(w.clone()).map_err(|err| Error::input(format!("{name}: check_window: {err}")))?),
            None => None,
        };
        if out.iter().any(|c: &CorpusEntry| c.name == name) {
            return Err(Error::input(format!("duplicate corpus name {name}")));
        }
        out.push(CorpusEntry { name, spec, window });
    }
    Ok(out)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    parse_corpus(&v)
}

/// Default primal check window: `[-2, 2]^n`, 41 nodes per axis in one
/// dimension and 9 in two or more.
pub fn default_window(n: usize) -> Window {
    let res = if n == 1 { 41 } else { 9 };
    Window::cube(n, -2.0, 2.0, res).expect("valid default window")
}

/// Maximal operators with a convex graph must have an affine graph.
/// Operators failing the convexity check are exempt; their certificates
/// are recorded.
pub fn lemma_bas_suite(corpus: &[CorpusEntry], tol: f64, trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rb = ReportBuilder::new("lemma_bas", "corpus").tol("affine_residual", tol).seed(seed);
    let mut asserted = Vec::new();
    let mut exempt = serde_json::Map::new();
    let mut skipped = Vec::new();
    let mut failed = false;
    for e in corpus {
        let w = e.window.clone().unwrap_or_else(|| default_window(e.spec.dim()));
        let convex = convexity_check(&e.spec, &w, trials, seed)?;
        rb.evaluations(convex.statistics.evaluations);
        if convex.status == Status::Fail {
            exempt.insert(e.name.clone(), serde_json::to_value(&convex.witnesses)?);
            continue;
        }
        let maximal = maximality_check(&e.spec, &w, 1e-8)?;
        rb.evaluations(maximal.statistics.evaluations);
        if maximal.status != Status::Pass {
            skipped.push(e.name.clone());
            continue;
        }
        let fit = affine_fit(&graph_of(&e.spec, &w)?, tol)?;
        asserted.push(serde_json::json!({ "name": e.name, "residual": fit.residual }));
        if fit.residual > tol {
            failed = true;
            rb.witness(Witness::point(&format!("{}: not affine", e.name), fit.offset.clone(), &[("residual", crate::space::ExtReal::Finite(fit.residual))]));
        }
    }
    rb.detail("asserted_affine", asserted);
    rb.detail("exempt_nonconvex", exempt);
    rb.detail("not_maximal_on_grid", skipped);
    rb.finish(if failed { Status::Fail } else { Status::Pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs() -> OperatorSpec {
        OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap()
    }

    fn rotation(theta: f64) -> OperatorSpec {
        let (s, c) = theta.sin_cos();
        OperatorSpec::affine(vec![vec![c, -s], vec![s, c]], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn tags() {
        assert_eq!(classify(&OperatorSpec::identity(2)).unwrap(), Tags { monotone: true, maximal: true });
        assert!(classify(&rotation(std::f64::consts::FRAC_PI_4)).unwrap().maximal);
        assert!(!classify(&rotation(2.0)).unwrap().monotone);
        assert!(classify(&abs()).unwrap().maximal);
        let two = OperatorSpec::FiniteGraph(FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]));
        assert_eq!(classify(&two).unwrap(), Tags { monotone: true, maximal: false });
        let v = serde_json::json!({"kind": "subdiff_polyhedral", "pieces": [{"c": [1.0], "d": 0.0}, {"c": [-1.0], "d": 0.0}]});
        assert_eq!(build_operator(&v).unwrap().0, abs());
    }

    #[test]
    fn convexity_examples() {
        let w = Window::cube(1, -1.0, 1.0, 5).unwrap();
        let r = convexity_check(&abs(), &w, 1000, 0).unwrap();
        assert_eq!(r.status, Status::Fail);
        let Witness::Midpoint { a, b, midpoint } = &r.witnesses[0] else { panic!() };
        assert!(membership(&abs(), a, 1e-9).unwrap() && membership(&abs(), b, 1e-9).unwrap());
        assert!(!membership(&abs(), midpoint, 1e-9).unwrap());
        // The certificate from the closed form.
        assert!(!membership(&abs(), &PairPoint::scalar(-0.25, 0.0), 1e-9).unwrap());

        assert_eq!(convexity_check(&OperatorSpec::identity(1), &w, 1000, 0).unwrap().status, Status::Pass);
        for seed in 0..4 {
            let r = convexity_check(&rotation(0.3), &Window::cube(2, -1.0, 1.0, 5).unwrap(), 50, seed).unwrap();
            assert_eq!(r.status, Status::Pass);
        }
        let two = OperatorSpec::FiniteGraph(FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]));
        let r = convexity_check(&two, &w, 10, 0).unwrap();
        let Witness::Midpoint { midpoint, .. } = &r.witnesses[0] else { panic!() };
        assert_eq!(*midpoint, PairPoint::scalar(0.5, 0.5));
    }

    #[test]
    fn affine_fit_examples() {
        let w = Window::cube(2, -1.0, 1.0, 5).unwrap();
        let spec = OperatorSpec::affine(vec![vec![2.0, 1.0], vec![0.0, 1.0]], vec![1.0, -1.0]).unwrap();
        let fit = affine_fit(&sample_graph(&spec, &w).unwrap(), 1e-9).unwrap();
        assert!(fit.residual <= 1e-12 && fit.basis.len() == 2);
        let fit = affine_fit(&sample_graph(&abs(), &Window::cube(1, -1.0, 1.0, 5).unwrap()).unwrap(), 1e-9).unwrap();
        assert!(fit.residual > 0.1);
        let fit = affine_fit(&FiniteGraph::from_scalars(&[(3.0, 4.0)]), 1e-9).unwrap();
        assert_eq!(fit.residual, 0.0);
    }

    #[test]
    fn maximality_examples() {
        let w = default_window(1);
        assert_eq!(maximality_check(&abs(), &w, 1e-8).unwrap().status, Status::Pass);
        assert_eq!(maximality_check(&OperatorSpec::identity(1), &w, 1e-8).unwrap().status, Status::Pass);
        let half = OperatorSpec::restricted(OperatorSpec::identity(1), Window::cube(1, 0.0, 3.0, 2).unwrap()).unwrap();
        let r = maximality_check(&half, &w, 1e-8).unwrap();
        assert_eq!(r.status, Status::Fail);
        // (-1, -1) relates monotonically to every (t, t), t >= 0.
        let g = te_gap(&half, &PairPoint::scalar(-1.0, -1.0), &w).unwrap();
        assert!(g.infimum.unwrap() >= 0.0);
    }

    #[test]
    fn lemma_suite_examples() {
        let corpus: Vec<CorpusEntry> = [
            ("identity", OperatorSpec::identity(1)),
            ("rotation", rotation(std::f64::consts::FRAC_PI_4)),
            ("abs", abs()),
            ("skew", rotation(std::f64::consts::FRAC_PI_2)),
            ("shifted", OperatorSpec::affine(vec![vec![1.0]], vec![2.0]).unwrap()),
        ]
        .into_iter()
        .map(|(n, s)| CorpusEntry { name: n.into(), spec: s, window: None })
        .collect();
        let r = lemma_bas_suite(&corpus, 1e-9, 200, 0).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:#?}");
        assert_eq!(r.details["asserted_affine"].as_array().unwrap().len(), 4);
        assert!(r.details["exempt_nonconvex"].get("abs").is_some());
        assert_eq!(lemma_bas_suite(&[], 1e-9, 200, 0).unwrap().status, Status::Pass);
    }

    #[test]
    fn corpus_parsing() {
        let v = serde_json::json!([
            {"name": "id", "kind": "affine", "M": [[1.0]], "b": [0.0]},
            {"kind": "finite_graph", "points": [[0.0, 0.0]]}
        ]);
        let c = parse_corpus(&v).unwrap();
        assert_eq!(c[0].name, "id");
        assert_eq!(c[1].name, "op1");
        assert!(parse_corpus(&serde_json::json!({})).is_err());
    }
}
