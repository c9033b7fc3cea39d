//! The ε-enlargement `T^ε = { z : <z.x - y, z.xs - y*> >= -ε for all (y, y*) ∈ T }`
//! and a constructive search for graph points near a point of `T^ε`.
//!
//! `inf_{(y,y*)∈T} <z.x - y, z.xs - y*> = π(z) - φ_T(z)`, so membership is exact
//! wherever φ_T has a closed form; elsewhere the infimum runs over the
//! sampled graph and the answer is flagged as window-bounded.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitz::{ExactPhi, MAX_WITNESSES};
use crate::operator::{membership, sample_graph, OperatorSpec, Piece};
use crate::report::{CheckReport, ReportBuilder, Status, Witness};
use crate::space::{norm2, pair_product, sub, ExtReal, PairPoint, Vector, Window};

/// Membership tolerance every returned graph point is held to.
pub const FOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeGap {
    /// `inf <z.x - y, z.xs - y*>` over the graph; `None` for `-∞`.
    pub infimum: Option<f64>,
    /// False when the infimum ran over a window sample only.
    pub exact: bool,
}

pub fn te_gap(spec: &OperatorSpec, z: &PairPoint, window: &Window) -> Result<TeGap> {
    Error::check_dim(spec.dim(), z.dim())?;
    if let Some(e) = ExactPhi::of(spec)? {
        let infimum = match e.eval(z)? {
            ExtReal::Finite(phi) => Some(z.duality() - phi),
            ExtReal::PosInf => None,
        };
        return Ok(TeGap { infimum, exact: true });
    }
    let g = sample_graph(spec, window)?;
    let inf = g.points().iter().map(|y| pair_product(z, y)).fold(f64::INFINITY, f64::min);
    Ok(TeGap { infimum: Some(inf), exact: false })
}

fn within(gap: &TeGap, z: &PairPoint, eps: f64) -> bool {
    match gap.infimum {
        None => false,
        Some(v) => {
            // π - φ cancels terms of size |π|; allow rounding at that scale.
            let slack = 64.0 * f64::EPSILON * (1.0 + z.duality().abs() + v.abs());
            v >= -eps - slack
        }
    }
}

pub fn te_contains(spec: &OperatorSpec, eps: f64, z: &PairPoint, window: &Window) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::input("eps must be non-negative"));
    }
    Ok(within(&te_gap(spec, z, window)?, z, eps))
}

/// Dual grid nodes `x*` of the window with `(x, x*) ∈ T^ε`.
pub fn te_slice(spec: &OperatorSpec, eps: f64, x: &[f64], window: &Window) -> Result<Vec<Vector>> {
    let n = spec.dim();
    Error::check_dim(n, x.len())?;
    let (_, dual) = window.to_pair(n)?.split_pair()?;
    let mut out = Vec::new();
    for xs in dual.points() {
        let z = PairPoint::new(Vector::from(x), Vector::from(xs.clone()))?;
        if te_contains(spec, eps, &z, window)? {
            out.push(Vector::from(xs));
        }
    }
    Ok(out)
}

/// `T⁰ = T` on the window grid.
pub fn t0_check(spec: &OperatorSpec, window: &Window, tol: f64) -> Result<CheckReport> {
    let pair = window.to_pair(spec.dim())?;
    let mut rb = ReportBuilder::new("t0_equals_t", spec.kind()).window(&pair).tol("tol", tol);
    let mut extra = 0u64;
    let mut missing = 0u64;
    let mut bounded = false;
    for z in pair.pair_points()? {
        let gap = te_gap(spec, &z, window)?;
        bounded |= !gap.exact;
        let in_t0 = within(&gap, &z, 0.0);
        let in_t = membership(spec, &z, tol)?;
        rb.evaluations(2);
        if in_t0 != in_t {
            if in_t0 { extra += 1 } else { missing += 1 }
            if rb.witness_count() < MAX_WITNESSES {
                let label = if in_t0 { "enlargement_not_graph" } else { "graph_not_enlargement" };
                let inf = gap.infimum.map_or(ExtReal::PosInf, |v| ExtReal::Finite(-v));
                rb.witness(Witness::point(label, z, &[("neg_infimum", inf)]));
            }
        }
    }
    rb.detail("enlargement_not_graph", extra);
    rb.detail("graph_not_enlargement", missing);
    if bounded {
        rb.note("infimum taken over the window sample only");
    }
    rb.finish(if extra + missing == 0 { Status::Pass } else { Status::Fail })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BRQuery {
    pub x: Vector,
    pub xs: Vector,
    pub eps: f64,
    pub eps_tilde: f64,
    pub lambda: f64,
}

impl BRQuery {
    pub fn validate(&self) -> Result<()> {
        Error::check_dim(self.x.dim(), self.xs.dim())?;
        if !(self.eps >= 0.0) || !(self.eps_tilde > self.eps) || !(self.lambda > 0.0) {
            return Err(Error::input("need eps >= 0, eps_tilde > eps and lambda > 0"));
        }
        Ok(())
    }

    pub fn point(&self) -> PairPoint {
        PairPoint { x: self.x.clone(), xs: self.xs.clone() }
    }

    /// Primal tolerance per unit of the target: `max(primal/λ, dual·λ/ε̃)`.
    fn score(&self, p: &PairPoint) -> (f64, f64, f64) {
        let primal = norm2(&sub(&p.x, &self.x));
        let dual = norm2(&sub(&p.xs, &self.xs));
        (primal, dual, (primal / self.lambda).max(dual * self.lambda / self.eps_tilde))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrStrategy {
    GridScan,
    Prox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BRResult {
    pub found: Option<PairPoint>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `primal < λ` and `dual < ε̃/λ`.
    pub satisfied: bool,
    pub strategy: BrStrategy,
}

/// Resolvent step: `(u, v) ∈ T` with `v = xs - α(u - x)`.
pub fn prox_point(spec: &OperatorSpec, x: &[f64], xs: &[f64], alpha: f64) -> Result<Option<PairPoint>> {
    if !(alpha > 0.0) {
        return Ok(None);
    }
    match spec {
        OperatorSpec::SubdiffPolyhedral { pieces } => Ok(subdiff_prox(pieces, x, xs, alpha)),
        OperatorSpec::Affine { m, b } => {
            let n = b.len();
            let mm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
            let rhs = DVector::from_fn(n, |i, _| xs[i] - b[i] + alpha * x[i]);
            let shifted = &mm + DMatrix::identity(n, n) * alpha;
            let Some(u) = shifted.lu().solve(&rhs) else { return Ok(None) };
            let v = &mm * &u + DVector::from_column_slice(b);
            Ok(Some(PairPoint { x: u.as_slice().into(), xs: v.as_slice().into() }))
        }
        OperatorSpec::Inverse { inner } => {
            Ok(prox_point(inner, xs, x, 1.0 / alpha)?.map(|p| p.swapped()))
        }
        _ => Ok(None),
    }
}

/// `argmin_u max_i(<c_i, u> + d_i) - <xs, u> + α/2 |u - x|²` through its dual
/// over the simplex of piece weights, by active-set enumeration.
fn subdiff_prox(pieces: &[Piece], x: &[f64], xs: &[f64], alpha: f64) -> Option<PairPoint> {
    let m = pieces.len();
    let n = x.len();
    if m > 16 {
        return None;
    }
    let a: Vec<f64> = pieces.iter().map(|p| p.c.dot(x) + p.d).collect();
    let c = DMatrix::from_fn(n, m, |i, j| pieces[j].c[i]);
    let xsv = DVector::from_column_slice(xs);
    let grad = |lam: &DVector<f64>| -> DVector<f64> {
        let g = &c * lam - &xsv;
        DVector::from_fn(m, |i, _| a[i] - c.column(i).dot(&g) / alpha)
    };
    let mut subsets: Vec<u32> = (1u32..(1u32 << m)).filter(|s| s.count_ones() as usize <= n + 1).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let idx: Vec<usize> = (0..m).filter(|i| s >> i & 1 == 1).collect();
        let k = idx.len();
        let cs = DMatrix::from_fn(n, k, |i, j| pieces[idx[j]].c[i]);
        let mut kkt = DMatrix::zeros(k + 1, k + 1);
        let gram = cs.transpose() * &cs / alpha;
        kkt.view_mut((0, 0), (k, k)).copy_from(&gram);
        for j in 0..k {
            kkt[(j, k)] = 1.0;
            kkt[(k, j)] = 1.0;
        }
        let ctx = cs.transpose() * &xsv / alpha;
        let rhs = DVector::from_fn(k + 1, |j, _| if j < k { a[idx[j]] + ctx[j] } else { 1.0 });
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        if !sol.iter().all(|v| v.is_finite()) {
            continue;
        }
        let mu = sol[k];
        let mut lam = DVector::zeros(m);
        for (j, &i) in idx.iter().enumerate() {
            lam[i] = sol[j];
        }
        let scale = 1.0 + mu.abs();
        if lam.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let g = grad(&lam);
        if (0..m).any(|i| g[i] > mu + 1e-10 * scale) {
            continue;
        }
        // Back onto the simplex exactly; a single active piece gets weight 1.
        let lam = lam.map(|l| l.max(0.0));
        let lam = &lam / lam.sum();
        let sub_grad = &c * &lam;
        let u: Vec<f64> = (0..n).map(|i| x[i] - (sub_grad[i] - xs[i]) / alpha).collect();
        return Some(PairPoint { x: u.into(), xs: sub_grad.as_slice().into() });
    }
    None
}

/// Scan window for a query: centred at the query, half-widths `λ` primal
/// and `ε̃/λ` dual.
pub fn br_window(q: &BRQuery, resolution: usize) -> Result<Window> {
    let r = q.eps_tilde / q.lambda;
    let lower = q.x.iter().map(|v| v - q.lambda).chain(q.xs.iter().map(|v| v - r)).collect();
    let upper = q.x.iter().map(|v| v + q.lambda).chain(q.xs.iter().map(|v| v + r)).collect();
    Window::new(lower, upper, vec![resolution])
}

/// Default scan resolution per axis.
pub fn default_br_resolution(n: usize) -> usize {
    if n == 1 { 81 } else { 21 }
}

/// Graph point close to a point of `T^ε`: the resolvent step when the spec
/// has one, and an exhaustive scan of the sampled graph; the better is kept,
/// the resolvent on ties. `window` overrides the scan window.
pub fn br_search(spec: &OperatorSpec, q: &BRQuery, window: Option<&Window>) -> Result<BRResult> {
    q.validate()?;
    let n = spec.dim();
    Error::check_dim(n, q.x.dim())?;
    let z = q.point();
    let scan = match window {
        Some(w) => w.to_pair(n)?,
        None => br_window(q, default_br_resolution(n))?,
    };
    let gap = te_gap(spec, &z, &scan)?;
    if !within(&gap, &z, q.eps) {
        return Err(Error::Refused(format!("the query is not in the {}-enlargement", q.eps)));
    }
    let build = |p: PairPoint, strategy: BrStrategy| {
        let (primal, dual, _) = q.score(&p);
        BRResult {
            satisfied: primal < q.lambda && dual < q.eps_tilde / q.lambda,
            found: Some(p),
            primal_residual: primal,
            dual_residual: dual,
            strategy,
        }
    };
    if membership(spec, &z, 0.0)? {
        return Ok(build(z, BrStrategy::Prox));
    }

    let alpha = 2.0 * q.eps / (q.lambda * q.lambda);
    let mut prox = None;
    if let Some(p) = prox_point(spec, &q.x, &q.xs, alpha)? {
        if membership(spec, &p, FOUND_TOL)? {
            let r = build(p, BrStrategy::Prox);
            if gap.exact {
                let slack = 1e-9;
                let primal_ok = r.primal_residual <= q.lambda * (1.0 + slack);
                let dual_ok = r.dual_residual <= 2.0 * q.eps / q.lambda * (1.0 + slack) + 1e-12;
                if !(primal_ok && dual_ok) {
                    return Err(Error::Internal(format!(
                        "resolvent bounds violated: primal {} dual {}",
                        r.primal_residual, r.dual_residual
                    )));
                }
            }
            prox = Some(r);
        }
    }

    let grid = match sample_graph(spec, &scan) {
        Ok(g) => g.into_points(),
        Err(Error::EmptyGraph) => Vec::new(),
        Err(e) => return Err(e),
    };
    let mut best: Option<(f64, PairPoint)> = None;
    for p in grid {
        let s = q.score(&p).2;
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, p));
        }
    }
    let scanned = best.map(|(_, p)| build(p, BrStrategy::GridScan));

    let score = |r: &BRResult| (r.primal_residual / q.lambda).max(r.dual_residual * q.lambda / q.eps_tilde);
    Ok(match (prox, scanned) {
        (Some(p), Some(g)) => if score(&g) < score(&p) { g } else { p },
        (Some(p), None) => p,
        (None, Some(g)) => g,
        (None, None) => BRResult {
            found: None,
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            satisfied: false,
            strategy: BrStrategy::GridScan,
        },
    })
}

pub fn br_search_report(spec: &OperatorSpec, q: &BRQuery, window: Option<&Window>) -> Result<CheckReport> {
    let mut rb = ReportBuilder::new("br_search", spec.kind())
        .tol("eps", q.eps)
        .tol("eps_tilde", q.eps_tilde)
        .tol("lambda", q.lambda)
        .tol("membership", FOUND_TOL);
    rb.detail("query", q);
    match br_search(spec, q, window) {
        Err(Error::Refused(msg)) => {
            rb.note(msg);
            rb.finish(Status::Refused)
        }
        Err(e) => Err(e),
        Ok(r) => {
            let ok = r.satisfied;
            rb.witness(Witness::BrSearch(r));
            rb.finish(if ok { Status::Pass } else { Status::Fail })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs() -> OperatorSpec {
        OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap()
    }

    fn w1() -> Window {
        Window::cube(1, -2.0, 2.0, 41).unwrap()
    }

    #[test]
    fn enlargement_of_abs() {
        let z = PairPoint::scalar(1.0, 0.0);
        assert_eq!(te_gap(&abs(), &z, &w1()).unwrap(), TeGap { infimum: Some(-1.0), exact: true });
        assert!(te_contains(&abs(), 1.0, &z, &w1()).unwrap());
        assert!(!te_contains(&abs(), 0.5, &z, &w1()).unwrap());
        for z in crate::operator::sample_graph(&abs(), &w1()).unwrap().points() {
            assert!(te_contains(&abs(), 0.0, z, &w1()).unwrap());
        }
    }

    #[test]
    fn slices_grow_with_eps() {
        let w = Window::cube(1, -2.0, 2.0, 21).unwrap();
        let s0 = te_slice(&abs(), 0.0, &[0.0], &w).unwrap();
        assert_eq!(s0.len(), 11);
        assert!(s0.iter().all(|v| v[0].abs() <= 1.0));
        let s1 = te_slice(&abs(), 0.3, &[0.5], &w).unwrap();
        let s2 = te_slice(&abs(), 0.6, &[0.5], &w).unwrap();
        assert!(s1.iter().all(|v| s2.contains(v)) && s2.len() > s1.len());
        // Far outside the window only the graph value x* = 1 survives at ε = 0.
        assert_eq!(te_slice(&abs(), 0.0, &[50.0], &w).unwrap(), vec![Vector::from(vec![1.0])]);
        let id = OperatorSpec::identity(1);
        assert!(te_slice(&id, 0.01, &[50.0], &w).unwrap().is_empty());
    }

    #[test]
    fn t0_examples() {
        assert_eq!(t0_check(&OperatorSpec::identity(1), &w1(), 1e-8).unwrap().status, Status::Pass);
        assert_eq!(t0_check(&abs(), &w1(), 1e-8).unwrap().status, Status::Pass);
        let half = OperatorSpec::restricted(OperatorSpec::identity(1), Window::cube(1, 0.0, 3.0, 2).unwrap()).unwrap();
        let r = t0_check(&half, &w1(), 1e-8).unwrap();
        assert_eq!(r.status, Status::Fail);
        let z = PairPoint::scalar(-1.0, -1.0);
        assert!(te_contains(&half, 0.0, &z, &w1()).unwrap() && !membership(&half, &z, 1e-8).unwrap());
    }

    #[test]
    fn br_on_abs_closed_form() {
        let q = BRQuery { x: vec![1.0].into(), xs: vec![0.0].into(), eps: 1.0, eps_tilde: 1.1, lambda: 1.0 };
        let r = br_search(&abs(), &q, None).unwrap();
        assert_eq!(r.strategy, BrStrategy::Prox);
        let p = r.found.unwrap();
        assert!((p.x[0] - 0.5).abs() < 1e-12 && (p.xs[0] - 1.0).abs() < 1e-12);
        assert!(r.satisfied && r.primal_residual < 1.0 && r.dual_residual < 1.1);
    }

    #[test]
    fn br_graph_point_is_itself() {
        let q = BRQuery { x: vec![0.0].into(), xs: vec![0.3].into(), eps: 0.0, eps_tilde: 0.1, lambda: 0.5 };
        let r = br_search(&abs(), &q, None).unwrap();
        assert_eq!(r.found.unwrap(), PairPoint::scalar(0.0, 0.3));
        assert_eq!((r.primal_residual, r.dual_residual), (0.0, 0.0));
        assert!(r.satisfied);
    }

    #[test]
    fn br_identity_diagonal() {
        // π - φ at (0, 0.1) is -0.0025.
        let q = BRQuery { x: vec![0.0].into(), xs: vec![0.1].into(), eps: 0.0025, eps_tilde: 0.003, lambda: 0.05 };
        let r = br_search(&OperatorSpec::identity(1), &q, None).unwrap();
        let p = r.found.unwrap();
        assert!((p.x[0] - p.xs[0]).abs() < 1e-15);
        assert!(r.primal_residual <= 0.05 && r.dual_residual <= 2.0 * 0.0025 / 0.05 + 1e-15);
    }

    #[test]
    fn br_refuses_outside_enlargement() {
        let q = BRQuery { x: vec![1.0].into(), xs: vec![0.0].into(), eps: 0.5, eps_tilde: 1.0, lambda: 1.0 };
        assert!(matches!(br_search(&abs(), &q, None), Err(Error::Refused(_))));
        assert_eq!(br_search_report(&abs(), &q, None).unwrap().status, Status::Refused);
    }

    #[test]
    fn prox_on_normal_cone() {
        // N_[0,1] as the inverse of ∂max(·, 0).
        let nc = OperatorSpec::inverse(OperatorSpec::subdiff(vec![(vec![0.0], 0.0), (vec![1.0], 0.0)]).unwrap());
        let p = prox_point(&nc, &[1.5], &[0.2], 2.0).unwrap().unwrap();
        assert!(membership(&nc, &p, 1e-12).unwrap(), "{p}");
        // v = xs - α(u - x)
        assert!((p.xs[0] - (0.2 - 2.0 * (p.x[0] - 1.5))).abs() < 1e-12);
    }

    #[test]
    fn prox_two_dimensional_kink() {
        let spec = OperatorSpec::subdiff(vec![
            (vec![1.0, 0.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 0.0),
            (vec![0.0, -1.0], 0.0),
        ])
        .unwrap();
        let p = prox_point(&spec, &[0.1, -0.05], &[0.0, 0.0], 1.0).unwrap().unwrap();
        assert!(membership(&spec, &p, 1e-12).unwrap(), "{p}");
        // Small x is pulled to the kink at the origin.
        assert!(norm2(&p.x) < 1e-12);
    }
}
