//! Monotone polars `A^μ = { z : <z.x - y, z.xs - y*> >= 0 for all (y, y*) ∈ A }`.
//!
//! `z ∈ A^μ ⟺ φ_A(z) <= π(z)`, and the minimum of the monotone products of `z`
//! against `A` is exactly `π(z) - φ_A(z)`; both are computed and compared on
//! every query. `A` has a unique maximal monotone extension when `A^μ` is
//! monotone, which is searched for a counterexample pair here.

use serde::{Deserialize, Serialize};

use crate::convexfn::{conjugate, ConvexFuncRep};
use crate::error::{Error, Result};
use crate::fitz::{b_contains, l_contains, phi_of, s_of, ExactPhi, MAX_WITNESSES};
use crate::operator::{invert_graph, is_monotone_set, sample_graph, FiniteGraph, OperatorSpec};
use crate::optim::{minimize_nonconvex, MultistartConfig};
use crate::report::{CheckReport, ReportBuilder, Status, Witness};
use crate::space::{pair_product, ExtReal, PairPoint, Window};

/// Penalty weight on polar-constraint violation in the certificate search.
pub const PENALTY: f64 = 1e3;
const CONSISTENCY_TOL: f64 = 1e-9;

/// Polar membership for a fixed finite set, with φ_A built once.
#[derive(Debug, Clone)]
pub struct Polar {
    a: FiniteGraph,
    /// Flattened `(y*, y, <y, y*>)` rows of φ_A.
    terms: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

impl Polar {
    pub fn new(a: &FiniteGraph) -> Result<Self> {
        a.require_nonempty()?;
        let terms = a.points().iter().map(|p| (p.xs.to_vec(), p.x.to_vec(), p.duality())).collect();
        Ok(Polar { a: a.clone(), terms })
    }

    pub fn base(&self) -> &FiniteGraph {
        &self.a
    }

    fn phi_flat(&self, x: &[f64], xs: &[f64]) -> f64 {
        self.terms.iter().fold(f64::NEG_INFINITY, |m, (ys, y, c)| {
            let v: f64 = ys.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + y.iter().zip(xs).map(|(a, b)| a * b).sum::<f64>() - c;
            m.max(v)
        })
    }

    /// `φ_A(z) - π(z)`; non-positive exactly on the polar.
    pub fn margin(&self, z: &PairPoint) -> Result<f64> {
        Error::check_dim(self.a.dim().unwrap_or(z.dim()), z.dim())?;
        Ok(self.phi_flat(&z.x, &z.xs) - z.duality())
    }

    /// Direct test over `A`, cross-checked against the φ test.
    pub fn contains(&self, z: &PairPoint) -> Result<bool> {
        let margin = self.margin(z)?;
        let direct = self.a.points().iter().map(|y| pair_product(z, y)).fold(f64::INFINITY, f64::min);
        let scale = 1.0f64.max(direct.abs()).max(margin.abs());
        if (direct + margin).abs() > CONSISTENCY_TOL * scale {
            return Err(Error::Internal(format!(
                "polar tests disagree at {z}: min product {direct}, pi - phi {}",
                -margin
            )));
        }
        Ok(direct >= 0.0)
    }
}

pub fn polar_contains(a: &FiniteGraph, z: &PairPoint) -> Result<bool> {
    Polar::new(a)?.contains(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCertificate {
    pub p: PairPoint,
    pub q: PairPoint,
    pub product: f64,
    /// `φ_A - π` at `p` and `q`.
    pub polar_margins: [f64; 2],
}

impl PolarCertificate {
    /// Recomputes everything from the coordinates.
    pub fn verify(&self, a: &FiniteGraph) -> Result<bool> {
        let polar = Polar::new(a)?;
        Ok(polar.contains(&self.p)? && polar.contains(&self.q)? && pair_product(&self.p, &self.q) < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolarVerdict {
    /// No certificate within the search budget; not a proof.
    Monotone,
    NotMonotone(PolarCertificate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarDecision {
    pub verdict: PolarVerdict,
    pub window: Window,
    /// Products above `-margin` are not accepted as certificates: they are
    /// within reach of sampling artefacts at the grid spacing.
    pub margin: f64,
    pub grid_points: usize,
    pub grid_polar_points: usize,
    pub grid_best_product: Option<f64>,
    pub multistart_value: f64,
    pub multistart_verified: bool,
    pub evaluations: u64,
}

/// Pair window around `A`: its bounding box padded by half its width per
/// axis, with nodes roughly 0.5 apart.
pub fn default_polar_window(a: &FiniteGraph) -> Result<Window> {
    let n = a.require_nonempty()?;
    let d = 2 * n;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in a.points() {
        for (k, v) in p.flat().into_iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    // Keep the grid to about 2·10^4 nodes.
    let cap = (20_000f64.powf(1.0 / d as f64).floor() as usize).max(3);
    let mut res = Vec::with_capacity(d);
    for k in 0..d {
        let w = if hi[k] > lo[k] { hi[k] - lo[k] } else { 1.0 };
        lo[k] -= w / 2.0;
        hi[k] += w / 2.0;
        let r = ((hi[k] - lo[k]) / 0.5).round() as usize + 1;
        res.push(r.clamp(3, cap.max(3)));
    }
    Window::new(lo, hi, res)
}

fn certificate(polar: &Polar, p: PairPoint, q: PairPoint) -> Result<PolarCertificate> {
    Ok(PolarCertificate {
        product: pair_product(&p, &q),
        polar_margins: [polar.margin(&p)?, polar.margin(&q)?],
        p,
        q,
    })
}

/// Searches `A^μ ∩ window` for two points with a negative monotone product:
/// an exhaustive grid scan, then a penalized multistart over pairs. Every
/// certificate returned has been re-verified exactly.
pub fn polar_monotone_decide(a: &FiniteGraph, window: Option<&Window>, cfg: &MultistartConfig) -> Result<PolarDecision> {
    let n = a.require_nonempty()?;
    let mv = is_monotone_set(a)?;
    if !mv.monotone {
        return Err(Error::Refused("the base set is not monotone".into()));
    }
    let window = match window {
        Some(w) => w.to_pair(n)?,
        None => default_polar_window(a)?,
    };
    let polar = Polar::new(a)?;
    let margin = 0.5 * window.min_step().powi(2);

    let grid = window.pair_points()?;
    let mut inside = Vec::new();
    for z in &grid {
        if polar.contains(z)? {
            inside.push(z);
        }
    }
    let mut evaluations = grid.len() as u64;
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..inside.len() {
        for j in i + 1..inside.len() {
            let v = pair_product(inside[i], inside[j]);
            if best.is_none_or(|(b, _, _)| v < b) {
                best = Some((v, i, j));
            }
        }
    }
    let grid_best_product = best.map(|b| b.0);
    let mut found: Option<PolarCertificate> = None;
    if let Some((v, i, j)) = best {
        if v < -margin {
            found = Some(certificate(&polar, inside[i].clone(), inside[j].clone())?);
        }
    }

    // Penalized search over (p, q) ∈ window × window.
    let d = 2 * n;
    let lower: Vec<f64> = window.lower.iter().chain(&window.lower).copied().collect();
    let upper: Vec<f64> = window.upper.iter().chain(&window.upper).copied().collect();
    let obj = |v: &[f64]| {
        let (p, q) = v.split_at(d);
        let prod: f64 = (0..n).map(|k| (p[k] - q[k]) * (p[n + k] - q[n + k])).sum();
        let viol = |z: &[f64]| {
            let pi: f64 = (0..n).map(|k| z[k] * z[n + k]).sum();
            (polar.phi_flat(&z[..n], &z[n..]) - pi).max(0.0)
        };
        prod + PENALTY * (viol(p).powi(2) + viol(q).powi(2))
    };
    let ms = minimize_nonconvex(obj, &lower, &upper, cfg)?;
    evaluations += ms.evaluations;
    let (p, q) = ms.best_point.split_at(d);
    let (p, q) = (PairPoint::from_flat(p)?, PairPoint::from_flat(q)?);
    let product = pair_product(&p, &q);
    let multistart_verified = polar.contains(&p)? && polar.contains(&q)? && product < -margin;
    if multistart_verified && found.as_ref().is_none_or(|c| product < c.product) {
        found = Some(certificate(&polar, p, q)?);
    }

    if let Some(c) = &found {
        if !(polar.contains(&c.p)? && polar.contains(&c.q)? && c.product < 0.0) {
            return Err(Error::Internal("polar certificate failed re-verification".into()));
        }
    }
    Ok(PolarDecision {
        verdict: match found {
            Some(c) => PolarVerdict::NotMonotone(c),
            None => PolarVerdict::Monotone,
        },
        window,
        margin,
        grid_points: grid.len(),
        grid_polar_points: inside.len(),
        grid_best_product,
        multistart_value: ms.best_value,
        multistart_verified,
        evaluations,
    })
}

/// [`polar_monotone_decide`] as a report: fail with the certificate, or
/// bounded-pass.
pub fn polar_decide_report(a: &FiniteGraph, label: &str, window: Option<&Window>, cfg: &MultistartConfig) -> Result<CheckReport> {
    let mut rb = ReportBuilder::new("polar_decide", label).seed(cfg.seed);
    let d = match polar_monotone_decide(a, window, cfg) {
        Err(Error::Refused(msg)) => {
            if let Some((p, q, product)) = is_monotone_set(a)?.violation {
                rb.witness(Witness::Pair { label: "base_violation".into(), p, q, product });
            }
            rb.note(msg);
            return rb.finish(Status::Refused);
        }
        r => r?,
    };
    let mut rb = rb.window(&d.window).tol("certificate_margin", d.margin);
    rb.evaluations(d.evaluations);
    rb.detail("grid_points", d.grid_points);
    rb.detail("grid_polar_points", d.grid_polar_points);
    rb.detail("grid_best_product", d.grid_best_product);
    rb.detail("multistart_value", d.multistart_value);
    rb.detail("multistart_starts", cfg.starts);
    rb.detail("multistart_verified", d.multistart_verified);
    match d.verdict {
        PolarVerdict::NotMonotone(c) => {
            rb.witness(Witness::PolarCertificate(c));
            rb.finish(Status::Fail)
        }
        PolarVerdict::Monotone => {
            rb.note("bounded search: no certificate found within the window and start budget; not a proof");
            rb.finish(Status::BoundedPass)
        }
    }
}

/// Minimum of `φ_A - π` over the window for a spec with an exact φ; pass iff
/// it is at least `-tol` and `b(φ_A) = L(φ_A)` on the grid.
pub fn phi_ge_pi_check(spec: &OperatorSpec, window: &Window, tol: f64, cfg: &MultistartConfig) -> Result<CheckReport> {
    let n = spec.dim();
    let exact = ExactPhi::of(spec)?.ok_or_else(|| {
        Error::Unsupported(format!("{} in dimension {n} has no exact Fitzpatrick function", spec.kind()))
    })?;
    let pair = window.to_pair(n)?;
    let mut rb = ReportBuilder::new("phi_ge_pi", spec.kind()).window(&pair).tol("tol", tol).seed(cfg.seed);
    let gap = |z: &PairPoint| -> Result<ExtReal> {
        Ok(match exact.eval(z)? {
            ExtReal::Finite(v) => ExtReal::Finite(v - z.duality()),
            ExtReal::PosInf => ExtReal::PosInf,
        })
    };
    let grid = pair.pair_points()?;
    let mut min: Option<(f64, &PairPoint)> = None;
    let mut b_not_l = Vec::new();
    for z in &grid {
        let g = gap(z)?;
        if let ExtReal::Finite(v) = g {
            if min.is_none_or(|(m, _)| v < m) {
                min = Some((v, z));
            }
            // b(φ) = L(φ) on the grid: a point with φ <= π must have φ = π.
            if v <= tol && v.abs() > tol {
                b_not_l.push(z.clone());
            }
        }
    }
    rb.evaluations(grid.len() as u64);
    let Some((grid_min, argmin)) = min else {
        rb.note("φ is +∞ on the whole window");
        rb.detail("min_gap", ExtReal::PosInf);
        return rb.finish(Status::Pass);
    };
    // Polish around the grid minimizer.
    let steps: Vec<f64> = (0..2 * n).map(|a| pair.step(a)).collect();
    let flat = argmin.flat();
    let lower: Vec<f64> = flat.iter().zip(&steps).enumerate().map(|(a, (v, s))| (v - s).max(pair.lower[a])).collect();
    let upper: Vec<f64> = flat.iter().zip(&steps).enumerate().map(|(a, (v, s))| (v + s).min(pair.upper[a])).collect();
    let local = MultistartConfig { starts: cfg.starts.min(16), ..cfg.clone() };
    let ms = minimize_nonconvex(
        |v| {
            let z = PairPoint::from_flat_unchecked(v);
            exact.eval(&z).map_or(f64::INFINITY, |e| e.to_f64() - z.duality())
        },
        &lower,
        &upper,
        &local,
    )?;
    rb.evaluations(ms.evaluations);
    let (min_gap, at) = if ms.best_value < grid_min {
        (ms.best_value, PairPoint::from_flat(&ms.best_point)?)
    } else {
        (grid_min, argmin.clone())
    };
    rb.detail("min_gap", min_gap);
    rb.detail("grid_min_gap", grid_min);
    rb.detail("b_minus_l_grid_points", b_not_l.len());
    let mut status = Status::Pass;
    if min_gap < -tol {
        let phi = exact.eval(&at)?;
        rb.witness(Witness::point("phi_below_pi", at.clone(), &[("phi", phi), ("pi", ExtReal::Finite(at.duality()))]));
        status = Status::Fail;
    }
    for z in b_not_l.into_iter().take(MAX_WITNESSES) {
        let phi = exact.eval(&z)?;
        rb.witness(Witness::point("b_not_l", z.clone(), &[("phi", phi), ("pi", ExtReal::Finite(z.duality()))]));
        status = Status::Fail;
    }
    rb.finish(status)
}

#[derive(Debug, Clone)]
enum OracleRule {
    Finite(Polar),
    Exact(ExactPhi),
}

/// Membership in the unique maximal monotone extension of a base set:
/// `z ↦ φ_A(z) <= π(z)`.
#[derive(Debug, Clone)]
pub struct ExtensionOracle {
    pub base: OperatorSpec,
    rule: OracleRule,
    /// The report that established the precondition.
    pub evidence: Status,
}

impl ExtensionOracle {
    pub fn contains(&self, z: &PairPoint) -> Result<bool> {
        let gap = match &self.rule {
            OracleRule::Finite(p) => return p.contains(z),
            OracleRule::Exact(e) => match e.eval(z)? {
                ExtReal::Finite(v) => v - z.duality(),
                ExtReal::PosInf => return Ok(false),
            },
        };
        // Exact φ is a closed form; allow rounding at the size of the terms.
        let scale = 1.0 + z.x.iter().chain(z.xs.iter()).map(|v| v * v).sum::<f64>();
        Ok(gap <= 1e-12 * scale)
    }

    /// Grid nodes of a pair window accepted by the oracle.
    pub fn sample(&self, window: &Window) -> Result<FiniteGraph> {
        let pair = window.to_pair(self.base.dim())?;
        let mut pts = Vec::new();
        for z in pair.pair_points()? {
            if self.contains(&z)? {
                pts.push(z);
            }
        }
        FiniteGraph::new(pts)
    }
}

/// Oracle for the unique maximal monotone extension, refused unless the
/// polar is (boundedly) monotone for a finite base, or `φ_A >= π` holds for
/// a spec with an exact φ.
pub fn unique_extension_oracle(base: &OperatorSpec, window: Option<&Window>, tol: f64, cfg: &MultistartConfig) -> Result<ExtensionOracle> {
    if let OperatorSpec::FiniteGraph(g) = base {
        let d = polar_monotone_decide(g, window, cfg)?;
        if let PolarVerdict::NotMonotone(c) = d.verdict {
            return Err(Error::Refused(format!(
                "the polar is not monotone: product {} at {} and {}",
                c.product, c.p, c.q
            )));
        }
        return Ok(ExtensionOracle { base: base.clone(), rule: OracleRule::Finite(Polar::new(g)?), evidence: Status::BoundedPass });
    }
    let Some(w) = window else {
        return Err(Error::input("a window is needed to check φ >= π"));
    };
    let r = phi_ge_pi_check(base, w, tol, cfg)?;
    if r.status != Status::Pass {
        return Err(Error::Refused("φ >= π fails on the window".into()));
    }
    let exact = ExactPhi::of(base)?.ok_or_else(|| Error::Internal("exact φ vanished".into()))?;
    Ok(ExtensionOracle { base: base.clone(), rule: OracleRule::Exact(exact), evidence: r.status })
}

/// Checks `(S_T)*(x*, x) >= <x*, x>` on the window for a maximal spec.
///
/// `(S_T)*` is computed on the sampled graph both as the conjugate of the
/// hull form and as φ of the inverted sample; the two must agree. The
/// assertion itself uses the exact identity `(S_T)*(x*, x) = φ_T(x, x*)`,
/// since sampling only lowers the conjugate.
pub fn cond_as_check(spec: &OperatorSpec, window: &Window, tol: f64) -> Result<CheckReport> {
    let n = spec.dim();
    let pair = window.to_pair(n)?;
    let mut rb = ReportBuilder::new("cond_as", spec.kind()).window(&pair).tol("tol", tol).tol("path_agreement", crate::fitz::LP_TOL);
    let tags = crate::zoo::classify(spec)?;
    if !tags.maximal {
        rb.note("the operator is not known to be maximal monotone");
        return rb.finish(Status::Refused);
    }
    let Some(exact) = ExactPhi::of(spec)? else {
        rb.note("no exact Fitzpatrick function; a sampled conjugate cannot bound (S_T)* from below");
        return rb.finish(Status::Refused);
    };
    let sample = sample_graph(spec, window)?;
    let via_s = conjugate(&s_of(&sample)?)?;
    let via_inverse = phi_of(&invert_graph(&sample))?;
    let mut max_dev = 0.0f64;
    let mut sampled_min = f64::INFINITY;
    let mut exact_min: Option<(f64, PairPoint)> = None;
    for z in pair.pair_points()? {
        let w = z.swapped();
        let (a, b) = (via_s.eval(&w)?.to_f64(), via_inverse.eval(&w)?.to_f64());
        max_dev = max_dev.max((a - b).abs());
        sampled_min = sampled_min.min(a - z.duality());
        if let ExtReal::Finite(v) = exact.eval(&z)? {
            let g = v - z.duality();
            if exact_min.as_ref().is_none_or(|(m, _)| g < *m) {
                exact_min = Some((g, z));
            }
        }
        rb.evaluations(3);
    }
    if max_dev > crate::fitz::LP_TOL {
        return Err(Error::Internal(format!("the two conjugate paths disagree by {max_dev}")));
    }
    rb.detail("path_max_deviation", max_dev);
    rb.detail("sampled_min_gap", sampled_min);
    rb.detail("sample_size", sample.len());
    let status = match exact_min {
        Some((m, z)) => {
            rb.detail("min_gap", m);
            if m < -tol {
                let phi = exact.eval(&z)?;
                rb.witness(Witness::point("below_pi", z.clone(), &[("s_conj", phi), ("pi", ExtReal::Finite(z.duality()))]));
                Status::Fail
            } else {
                Status::Pass
            }
        }
        None => {
            rb.detail("min_gap", ExtReal::PosInf);
            Status::Pass
        }
    };
    rb.finish(status)
}

/// `b(h) = L(h)` at every listed point.
pub fn b_equals_l(h: &ConvexFuncRep, points: &[PairPoint], tol: f64) -> Result<Option<PairPoint>> {
    for z in points {
        if b_contains(h, z, tol)? != l_contains(h, z, tol)? {
            return Ok(Some(z.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::membership;

    fn two_point() -> FiniteGraph {
        FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0)])
    }

    fn half_line() -> OperatorSpec {
        OperatorSpec::restricted(OperatorSpec::identity(1), Window::cube(1, 0.0, 3.0, 2).unwrap()).unwrap()
    }

    #[test]
    fn polar_membership_examples() {
        let a = two_point();
        assert!(polar_contains(&a, &PairPoint::scalar(0.0, 1.0)).unwrap());
        assert!(!polar_contains(&a, &PairPoint::scalar(2.0, 0.0)).unwrap());
        for p in a.points() {
            assert!(polar_contains(&a, p).unwrap());
        }
    }

    #[test]
    fn antitone_in_the_base() {
        let small = two_point();
        let big = FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        for z in Window::cube(2, -1.0, 3.0, 9).unwrap().pair_points().unwrap() {
            if polar_contains(&big, &z).unwrap() {
                assert!(polar_contains(&small, &z).unwrap());
            }
        }
    }

    #[test]
    fn two_point_certificate() {
        let d = polar_monotone_decide(&two_point(), None, &MultistartConfig::with_seed(7)).unwrap();
        assert_eq!(d.window, Window::cube(2, -0.5, 1.5, 5).unwrap());
        let PolarVerdict::NotMonotone(c) = d.verdict else { panic!("expected a certificate") };
        assert!(c.product <= -1.0 + 1e-12, "{c:?}");
        assert!(c.verify(&two_point()).unwrap());
    }

    #[test]
    fn half_line_certificate() {
        let pts: Vec<(f64, f64)> = (0..=30).map(|i| i as f64 * 0.1).map(|t| (t, t)).collect();
        let a = FiniteGraph::from_scalars(&pts);
        let d = polar_monotone_decide(&a, None, &MultistartConfig::with_seed(1)).unwrap();
        let PolarVerdict::NotMonotone(c) = d.verdict else { panic!("expected a certificate") };
        assert!(c.product < 0.0 && c.verify(&a).unwrap());
        // The known pair from the closed form of the polar.
        let known = certificate(&Polar::new(&a).unwrap(), PairPoint::scalar(-1.0, -5.0), PairPoint::scalar(-5.0, -1.0)).unwrap();
        assert_eq!(known.product, -16.0);
        assert!(known.verify(&a).unwrap());
    }

    #[test]
    fn full_line_polar_is_monotone() {
        let pts: Vec<(f64, f64)> = (0..=160).map(|i| -6.0 + i as f64 * 0.075).map(|t| (t, t)).collect();
        let a = FiniteGraph::from_scalars(&pts);
        let w = Window::cube(2, -3.0, 3.0, 41).unwrap();
        let cfg = MultistartConfig::with_seed(3);
        let d = polar_monotone_decide(&a, Some(&w), &cfg).unwrap();
        assert_eq!(d.verdict, PolarVerdict::Monotone);
        let oracle = unique_extension_oracle(&OperatorSpec::FiniteGraph(a), Some(&w), 1e-8, &cfg).unwrap();
        let s = oracle.sample(&w).unwrap();
        assert_eq!(s.len(), 41);
        assert!(is_monotone_set(&s).unwrap().monotone);
    }

    #[test]
    fn extension_refused_for_two_points() {
        let r = unique_extension_oracle(&OperatorSpec::FiniteGraph(two_point()), None, 1e-8, &MultistartConfig::default());
        assert!(matches!(r, Err(Error::Refused(_))));
    }

    #[test]
    fn extension_of_maximal_affine_is_itself() {
        let w = Window::cube(1, -2.0, 2.0, 9).unwrap();
        let id = OperatorSpec::identity(1);
        let o = unique_extension_oracle(&id, Some(&w), 1e-8, &MultistartConfig::default()).unwrap();
        for z in w.to_pair(1).unwrap().pair_points().unwrap() {
            assert_eq!(o.contains(&z).unwrap(), membership(&id, &z, 1e-12).unwrap(), "{z}");
        }
    }

    #[test]
    fn phi_ge_pi_examples() {
        let w = Window::cube(1, -2.0, 2.0, 41).unwrap();
        let cfg = MultistartConfig::with_seed(0);
        assert_eq!(phi_ge_pi_check(&OperatorSpec::identity(1), &w, 1e-8, &cfg).unwrap().status, Status::Pass);
        let abs = OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap();
        assert_eq!(phi_ge_pi_check(&abs, &w, 1e-8, &cfg).unwrap().status, Status::Pass);
        let r = phi_ge_pi_check(&half_line(), &w, 1e-8, &cfg).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.details["b_minus_l_grid_points"].as_u64().unwrap() > 0);
        // (-1, -1): φ = 0 < π = 1, so it is in b(φ) but not in L(φ).
        let z = PairPoint::scalar(-1.0, -1.0);
        assert_eq!(crate::fitz::phi_exact(&half_line(), &z).unwrap(), ExtReal::Finite(0.0));
        // (0, -1) has φ = π = 0 and lies in L(φ).
        assert_eq!(crate::fitz::phi_exact(&half_line(), &PairPoint::scalar(0.0, -1.0)).unwrap(), ExtReal::Finite(0.0));
        let abs2 = OperatorSpec::subdiff(vec![(vec![1.0, 0.0], 0.0), (vec![-1.0, 0.0], 0.0)]).unwrap();
        assert!(matches!(phi_ge_pi_check(&abs2, &w, 1e-8, &cfg), Err(Error::Unsupported(_)) | Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cond_as_examples() {
        let w = Window::cube(1, -2.0, 2.0, 21).unwrap();
        for spec in [
            OperatorSpec::identity(1),
            OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap(),
        ] {
            let r = cond_as_check(&spec, &w, 1e-6).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = OperatorSpec::affine(vec![vec![c, -c], vec![c, c]], vec![0.0, 0.0]).unwrap();
        let r = cond_as_check(&rot, &Window::cube(2, -1.0, 1.0, 5).unwrap(), 1e-6).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(cond_as_check(&half_line(), &w, 1e-6).unwrap().status, Status::Refused);
    }
}
