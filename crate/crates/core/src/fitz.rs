//! Fitzpatrick functions, S-functions and the Fitzpatrick family.
//!
//! For a set `A` of pairs, `φ_A(x, x*) = sup_{(y,y*)∈A} <x, y*> + <y, x*> - <y, y*>`
//! and `S_A = cl conv(π + δ_A)`. A finite graph gives both exactly (max-affine
//! and hull form). Affine maps and one-dimensional polyhedral operators also
//! have an exact φ over their whole graph, see [`ExactPhi`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::convexfn::{hull_conjugate_lp, j_transform, AffineTerm, ConvexFuncRep, Generator};
use crate::error::{Error, Result};
use crate::oned::Graph1D;
use crate::operator::{sample_graph, FiniteGraph, OperatorSpec};
use crate::report::{CheckReport, ReportBuilder, Status, Witness};
use crate::space::{ExtReal, PairPoint, Window};

/// Tolerance for identities whose two sides are LP or closed-form values.
pub const LP_TOL: f64 = 1e-8;
/// Tolerance for identities checked on grids.
pub const GRID_TOL: f64 = 1e-6;

/// At most this many witnesses are attached to a report.
pub(crate) const MAX_WITNESSES: usize = 8;

pub fn phi_of(g: &FiniteGraph) -> Result<ConvexFuncRep> {
    g.require_nonempty()?;
    ConvexFuncRep::max_affine(
        g.points()
            .iter()
            .map(|p| AffineTerm { u: p.xs.clone(), us: p.x.clone(), c: -p.duality() })
            .collect(),
    )
}

pub fn s_of(g: &FiniteGraph) -> Result<ConvexFuncRep> {
    g.require_nonempty()?;
    Ok(ConvexFuncRep::HullFunc {
        generators: g.points().iter().map(|p| Generator { z: p.clone(), v: p.duality() }).collect(),
    })
}

/// φ of the full graph of a spec, where it has a closed form.
#[derive(Debug, Clone)]
pub enum ExactPhi {
    Graph(ConvexFuncRep),
    Line(Graph1D),
    /// `x ↦ Mx + b`, with the eigen-decomposition of `(M + Mᵀ)/2`.
    Affine { m: DMatrix<f64>, b: DVector<f64>, eig: SymmetricEigen<f64, nalgebra::Dyn> },
    /// φ of the inverse: `φ_{T⁻¹}(x, x*) = φ_T(x*, x)`.
    Swapped(Box<ExactPhi>),
}

impl ExactPhi {
    /// `None` when the spec has no exact path (restrictions and
    /// subdifferentials in dimension two and up).
    pub fn of(spec: &OperatorSpec) -> Result<Option<ExactPhi>> {
        spec.validate()?;
        Ok(Some(match spec {
            OperatorSpec::FiniteGraph(g) => ExactPhi::Graph(phi_of(g)?),
            OperatorSpec::Inverse { inner } => match ExactPhi::of(inner)? {
                Some(e) => ExactPhi::Swapped(Box::new(e)),
                None => return Ok(None),
            },
            OperatorSpec::Affine { m, b } => {
                let n = b.len();
                let m = DMatrix::from_fn(n, n, |i, j| m[i][j]);
                let sym = (&m + m.transpose()) * 0.5;
                ExactPhi::Affine { m, b: DVector::from_column_slice(b), eig: SymmetricEigen::new(sym) }
            }
            _ if spec.dim() == 1 => ExactPhi::Line(Graph1D::from_spec(spec)?),
            _ => return Ok(None),
        }))
    }

    pub fn eval(&self, z: &PairPoint) -> Result<ExtReal> {
        match self {
            ExactPhi::Graph(f) => f.eval(z),
            ExactPhi::Line(g) => {
                Error::check_dim(1, z.dim())?;
                Ok(g.fitzpatrick(z.x[0], z.xs[0]))
            }
            ExactPhi::Swapped(inner) => inner.eval(&z.swapped()),
            ExactPhi::Affine { m, b, eig } => {
                Error::check_dim(b.len(), z.dim())?;
                let x = DVector::from_column_slice(&z.x);
                let xs = DVector::from_column_slice(&z.xs);
                // sup_y <y, g> - yᵀSy with g = Mᵀx + x* - b.
                let g = m.transpose() * &x + &xs - b;
                let scale_s = eig.eigenvalues.amax().max(1.0);
                let scale_g = 1.0 + (m.transpose() * &x).amax() + xs.amax() + b.amax();
                let mut sup = 0.0;
                for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                    let gk = eig.eigenvectors.column(k).dot(&g);
                    if lam > 1e-12 * scale_s {
                        sup += gk * gk / (4.0 * lam);
                    } else if lam < -1e-12 * scale_s || gk.abs() > 1e-12 * scale_g {
                        return Ok(ExtReal::PosInf);
                    }
                }
                Ok(ExtReal::Finite(x.dot(b) + sup))
            }
        }
    }
}

/// Exact φ of a spec at `z`; unsupported where no closed form exists.
pub fn phi_exact(spec: &OperatorSpec, z: &PairPoint) -> Result<ExtReal> {
    match ExactPhi::of(spec)? {
        Some(e) => e.eval(z),
        None => Err(Error::Unsupported(format!("no exact Fitzpatrick function for {} in dimension {}", spec.kind(), spec.dim()))),
    }
}

fn graph_label(g: &FiniteGraph) -> String {
    format!("finite_graph[{}]", g.len())
}

fn sub_ext(a: ExtReal, b: ExtReal) -> Option<f64> {
    Some(a.finite()? - b.finite()?)
}

/// φ_g against `𝒥 S_g`, with the conjugate of `S_g` also solved as an LP at
/// the swapped point.
pub fn bs_identity_check(g: &FiniteGraph, testpoints: &[PairPoint], tol: f64) -> Result<CheckReport> {
    let phi = phi_of(g)?;
    let s = s_of(g)?;
    let js = j_transform(&s)?;
    let ConvexFuncRep::HullFunc { generators } = &s else { unreachable!() };
    let mut rb = ReportBuilder::new("bs_identity", &graph_label(g)).tol("tol", tol);
    let mut max_dev = 0.0f64;
    let mut compared = 0u64;
    for z in testpoints {
        let a = phi.eval(z)?;
        let b = js.eval(z)?;
        let c = ExtReal::Finite(hull_conjugate_lp(generators, &z.swapped())?);
        rb.evaluations(3);
        let (Some(ab), Some(ac)) = (sub_ext(a, b), sub_ext(a, c)) else {
            // Max-affine forms are finite everywhere, so this is a bug.
            return Err(Error::Internal(format!("non-finite value in the conjugation identity at {z}")));
        };
        compared += 1;
        let dev = ab.abs().max(ac.abs());
        if dev > tol && rb.witness_count() < MAX_WITNESSES {
            rb.witness(Witness::point("deviation", z.clone(), &[("phi", a), ("j_s", b), ("lp", c)]));
        }
        max_dev = max_dev.max(dev);
    }
    rb.detail("max_deviation", max_dev);
    rb.detail("points_compared", compared);
    rb.finish(if max_dev <= tol { Status::Pass } else { Status::Fail })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    /// `min (h - π)` over the window grid.
    pub lower_gap: ExtReal,
    /// `max |h - π|` over the sampled graph.
    pub graph_gap: ExtReal,
    pub verdict: Status,
    pub witnesses: Vec<PairPoint>,
}

/// Is `h` in the Fitzpatrick family of `spec`, as far as the window sees?
pub fn in_family_check(h: &ConvexFuncRep, spec: &OperatorSpec, window: &Window, tol: f64) -> Result<FamilyReport> {
    let n = spec.dim();
    if let Some(d) = h.pair_dim() {
        Error::check_dim(n, d)?;
    }
    let pair = window.to_pair(n)?;
    let mut lower = ExtReal::PosInf;
    let mut below: Vec<(f64, PairPoint)> = Vec::new();
    for z in pair.pair_points()? {
        let v = h.eval(&z)?;
        if let ExtReal::Finite(v) = v {
            let gap = v - z.duality();
            if ExtReal::Finite(gap) < lower {
                lower = ExtReal::Finite(gap);
            }
            if gap < -tol {
                below.push((gap, z));
            }
        }
    }
    let mut graph_gap = ExtReal::Finite(0.0);
    let mut off: Vec<(f64, PairPoint)> = Vec::new();
    for z in sample_graph(spec, window)?.into_points() {
        let d = match h.eval(&z)? {
            ExtReal::Finite(v) => (v - z.duality()).abs(),
            ExtReal::PosInf => f64::INFINITY,
        };
        if ExtReal::from_f64(d) > graph_gap {
            graph_gap = ExtReal::from_f64(d);
        }
        if d > tol {
            off.push((-d, z));
        }
    }
    below.sort_by(|a, b| a.0.total_cmp(&b.0));
    off.sort_by(|a, b| a.0.total_cmp(&b.0));
    let witnesses: Vec<PairPoint> = below.into_iter().chain(off).take(MAX_WITNESSES).map(|(_, z)| z).collect();
    let pass = lower >= ExtReal::Finite(-tol) && graph_gap <= ExtReal::Finite(tol);
    Ok(FamilyReport { lower_gap: lower, graph_gap, verdict: if pass { Status::Pass } else { Status::Fail }, witnesses })
}

/// `z ∈ b(h)`: `h(z) <= π(z)`.
pub fn b_contains(h: &ConvexFuncRep, z: &PairPoint, tol: f64) -> Result<bool> {
    Ok(h.eval(z)? <= ExtReal::Finite(z.duality() + tol))
}

/// `z ∈ L(h)`: `h(z) = π(z)`.
pub fn l_contains(h: &ConvexFuncRep, z: &PairPoint, tol: f64) -> Result<bool> {
    Ok(match h.eval(z)? {
        ExtReal::Finite(v) => (v - z.duality()).abs() <= tol,
        ExtReal::PosInf => false,
    })
}

/// `φ_g <= h <= S_g` at every test point, for every `h`.
pub fn family_order_check(g: &FiniteGraph, hs: &[ConvexFuncRep], testpoints: &[PairPoint], tol: f64) -> Result<CheckReport> {
    let phi = phi_of(g)?;
    let s = s_of(g)?;
    let mut rb = ReportBuilder::new("family_order", &graph_label(g)).tol("tol", tol);
    let mut violations = 0u64;
    for z in testpoints {
        let lo = phi.eval(z)?;
        let hi = s.eval(z)?;
        rb.evaluations(2);
        for h in hs {
            let v = h.eval(z)?;
            rb.evaluations(1);
            let below = ExtReal::Finite(lo.to_f64() - tol) > v;
            let above = match (v, hi) {
                (_, ExtReal::PosInf) => false,
                (ExtReal::PosInf, _) => true,
                (ExtReal::Finite(v), ExtReal::Finite(s)) => v > s + tol,
            };
            if below || above {
                violations += 1;
                if rb.witness_count() < MAX_WITNESSES {
                    rb.witness(Witness::point(
                        if below { "below_phi" } else { "above_s" },
                        z.clone(),
                        &[("phi", lo), ("h", v), ("s", hi)],
                    ));
                }
            }
        }
    }
    rb.detail("violations", violations);
    rb.finish(if violations == 0 { Status::Pass } else { Status::Fail })
}
