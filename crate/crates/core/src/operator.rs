//! Operator specifications, graph membership, deterministic graph sampling
//! and the monotonicity primitives on finite graphs.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::oned::Graph1D;
use crate::optim::simplex_combination;
use crate::space::{dot, norm_inf, pair_product, sub, PairPoint, Vector, Window};

/// A nonempty-or-empty finite subset of `R^n × R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteGraph {
    points: Vec<PairPoint>,
}

impl FiniteGraph {
    pub fn new(points: Vec<PairPoint>) -> Result<Self> {
        if let Some(first) = points.first() {
            let n = first.dim();
            for p in &points {
                Error::check_dim(n, p.x.dim())?;
                Error::check_dim(n, p.xs.dim())?;
            }
        }
        Ok(FiniteGraph { points })
    }

    /// Builds a one-dimensional graph from `(x, x*)` pairs.
    pub fn from_scalars(pairs: &[(f64, f64)]) -> Self {
        FiniteGraph { points: pairs.iter().map(|&(x, xs)| PairPoint::scalar(x, xs)).collect() }
    }

    pub fn points(&self) -> &[PairPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(PairPoint::dim)
    }

    pub(crate) fn require_nonempty(&self) -> Result<usize> {
        self.dim().ok_or(Error::EmptyGraph)
    }

    pub fn into_points(self) -> Vec<PairPoint> {
        self.points
    }
}

/// One affine piece `x ↦ <c, x> + d` of a max-affine potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub c: Vector,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    FiniteGraph(FiniteGraph),
    /// `x* = M x + b`.
    Affine { m: Vec<Vec<f64>>, b: Vector },
    /// `∂f` for `f(x) = max_i <c_i, x> + d_i`.
    SubdiffPolyhedral { pieces: Vec<Piece> },
    /// The graph of `inner` intersected with `window` (primal-only or pair window).
    Restricted { inner: Box<OperatorSpec>, window: Window },
    /// `inner⁻¹`, the graph with primal and dual coordinates exchanged.
    Inverse { inner: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn identity(n: usize) -> Self {
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        OperatorSpec::Affine { m, b: Vector::zeros(n) }
    }

    pub fn affine(m: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let spec = OperatorSpec::Affine { m, b: Vector::new(b)? };
        spec.validate()?;
        Ok(spec)
    }

    pub fn subdiff(pieces: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let pieces = pieces
            .into_iter()
            .map(|(c, d)| Ok(Piece { c: Vector::new(c)?, d }))
            .collect::<Result<Vec<_>>>()?;
        let spec = OperatorSpec::SubdiffPolyhedral { pieces };
        spec.validate()?;
        Ok(spec)
    }

    pub fn restricted(inner: OperatorSpec, window: Window) -> Result<Self> {
        let spec = OperatorSpec::Restricted { inner: Box::new(inner), window };
        spec.validate()?;
        Ok(spec)
    }

    pub fn inverse(inner: OperatorSpec) -> Self {
        OperatorSpec::Inverse { inner: Box::new(inner) }
    }

    pub fn finite(points: Vec<PairPoint>) -> Result<Self> {
        let spec = OperatorSpec::FiniteGraph(FiniteGraph::new(points)?);
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            OperatorSpec::FiniteGraph(_) => "finite_graph",
            OperatorSpec::Affine { .. } => "affine",
            OperatorSpec::SubdiffPolyhedral { .. } => "subdiff_polyhedral",
            OperatorSpec::Restricted { .. } => "restricted",
            OperatorSpec::Inverse { .. } => "inverse",
        }
    }

    /// Ambient dimension `n` of `R^n × R^n`. Zero only for an empty finite graph.
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::FiniteGraph(g) => g.dim().unwrap_or(0),
            OperatorSpec::Affine { b, .. } => b.dim(),
            OperatorSpec::SubdiffPolyhedral { pieces } => pieces.first().map_or(0, |p| p.c.dim()),
            OperatorSpec::Restricted { inner, .. } | OperatorSpec::Inverse { inner } => inner.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorSpec::FiniteGraph(g) => {
                g.require_nonempty()?;
                if !g.points().iter().all(PairPoint::is_finite) {
                    return Err(Error::input("finite graph points must be finite"));
                }
            }
            OperatorSpec::Affine { m, b } => {
                let n = b.dim();
                if n == 0 {
                    return Err(Error::input("affine operator needs dimension >= 1"));
                }
                Error::check_dim(n, m.len())?;
                for row in m {
                    Error::check_dim(n, row.len())?;
                    if !row.iter().all(|v| v.is_finite()) {
                        return Err(Error::input("matrix entries must be finite"));
                    }
                }
            }
            OperatorSpec::SubdiffPolyhedral { pieces } => {
                let first = pieces.first().ok_or_else(|| Error::input("subdifferential needs at least one piece"))?;
                let n = first.c.dim();
                if n == 0 {
                    return Err(Error::input("pieces need dimension >= 1"));
                }
                for p in pieces {
                    Error::check_dim(n, p.c.dim())?;
                    if !p.d.is_finite() || !p.c.iter().all(|v| v.is_finite()) {
                        return Err(Error::input("piece data must be finite"));
                    }
                }
            }
            OperatorSpec::Restricted { inner, window } => {
                inner.validate()?;
                let n = inner.dim();
                if window.dim() != n && window.dim() != 2 * n {
                    return Err(Error::DimensionMismatch { expected: n, got: window.dim() });
                }
            }
            OperatorSpec::Inverse { inner } => inner.validate()?,
        }
        Ok(())
    }

    /// Parses the operator JSON schema. Unknown keys (such as `name`) are ignored.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::input("operator must be a JSON object"))?;
        let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| Error::input("missing \"kind\""))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| Error::input(format!("{kind}: missing \"{k}\"")));
        let reals = |v: &Value, what: &str| -> Result<Vec<f64>> {
            serde_json::from_value::<Vec<f64>>(v.clone()).map_err(|e| Error::input(format!("{what}: {e}")))
        };
        let spec = match kind {
            "finite_graph" => {
                let rows: Vec<Vec<f64>> = serde_json::from_value(field("points")?.clone())
                    .map_err(|e| Error::input(format!("points: {e}")))?;
                let points = rows.iter().map(|r| PairPoint::from_flat(r)).collect::<Result<Vec<_>>>()?;
                OperatorSpec::FiniteGraph(FiniteGraph::new(points)?)
            }
            "affine" => {
                let m: Vec<Vec<f64>> =
                    serde_json::from_value(field("M")?.clone()).map_err(|e| Error::input(format!("M: {e}")))?;
                let b = match obj.get("b") {
                    Some(b) => reals(b, "b")?,
                    None => vec![0.0; m.len()],
                };
                OperatorSpec::Affine { m, b: Vector::new(b)? }
            }
            "subdiff_polyhedral" => {
                let pieces: Vec<Piece> = serde_json::from_value(field("pieces")?.clone())
                    .map_err(|e| Error::input(format!("pieces: {e}")))?;
                for p in &pieces {
                    Vector::new(p.c.to_vec())?;
                }
                OperatorSpec::SubdiffPolyhedral { pieces }
            }
            "restricted" => {
                let window: Window = serde_json::from_value(field("window")?.clone())
                    .map_err(|e| Error::input(format!("window: {e}")))?;
                OperatorSpec::Restricted { inner: Box::new(OperatorSpec::from_json(field("inner")?)?), window }
            }
            "inverse" => OperatorSpec::Inverse { inner: Box::new(OperatorSpec::from_json(field("inner")?)?) },
            other => return Err(Error::input(format!("unknown operator kind {other:?}"))),
        };
        spec.validate()?;
        if let Some(dim) = obj.get("dim") {
            let dim = dim.as_u64().ok_or_else(|| Error::input("\"dim\" must be a nonnegative integer"))?;
            Error::check_dim(dim as usize, spec.dim())?;
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> Value {
        let mut v = match self {
            OperatorSpec::FiniteGraph(g) => json!({
                "kind": "finite_graph",
                "points": g.points().iter().map(PairPoint::flat).collect::<Vec<_>>(),
            }),
            OperatorSpec::Affine { m, b } => json!({ "kind": "affine", "M": m, "b": b }),
            OperatorSpec::SubdiffPolyhedral { pieces } => json!({ "kind": "subdiff_polyhedral", "pieces": pieces }),
            OperatorSpec::Restricted { inner, window } => {
                json!({ "kind": "restricted", "inner": inner.to_json(), "window": window })
            }
            OperatorSpec::Inverse { inner } => json!({ "kind": "inverse", "inner": inner.to_json() }),
        };
        v["dim"] = json!(self.dim());
        v
    }

    fn require_dim(&self, n: usize) -> Result<()> {
        Error::check_dim(self.dim(), n)
    }
}

/// Outcome of the all-pairs monotonicity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    /// First violating pair in scan order with its (negative) product.
    pub violation: Option<(PairPoint, PairPoint, f64)>,
}

/// All-pairs check of `<x - y, x* - y*> >= 0`.
pub fn is_monotone_set(g: &FiniteGraph) -> Result<MonotoneVerdict> {
    g.require_nonempty()?;
    let pts = g.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let prod = pair_product(&pts[i], &pts[j]);
            if prod < 0.0 {
                return Ok(MonotoneVerdict {
                    monotone: false,
                    violation: Some((pts[i].clone(), pts[j].clone(), prod)),
                });
            }
        }
    }
    Ok(MonotoneVerdict { monotone: true, violation: None })
}

pub fn invert_graph(g: &FiniteGraph) -> FiniteGraph {
    FiniteGraph { points: g.points().iter().map(PairPoint::swapped).collect() }
}

/// `max_i <c_i, x> + d_i`.
pub fn polyhedral_value(pieces: &[Piece], x: &[f64]) -> f64 {
    pieces.iter().map(|p| dot(&p.c, x) + p.d).fold(f64::NEG_INFINITY, f64::max)
}

/// Conjugate of `max_i <c_i, ·> + d_i` at `s`: the hull LP
/// `min Σ λ_i (-d_i)` over `Σ λ_i c_i = s`, `λ` in the simplex. `None` is `+∞`.
pub fn polyhedral_conjugate(pieces: &[Piece], s: &[f64]) -> Result<Option<f64>> {
    let points: Vec<Vec<f64>> = pieces.iter().map(|p| p.c.to_vec()).collect();
    let costs: Vec<f64> = pieces.iter().map(|p| -p.d).collect();
    Ok(simplex_combination(&points, &costs, s)?.map(|(v, _)| v))
}

fn window_admits(window: &Window, p: &PairPoint) -> bool {
    if window.dim() == p.dim() {
        window.contains(&p.x)
    } else {
        window.contains(&p.flat())
    }
}

/// Whether `p` lies on the graph of `spec` up to `tol`.
pub fn membership(spec: &OperatorSpec, p: &PairPoint, tol: f64) -> Result<bool> {
    spec.require_dim(p.dim())?;
    Error::check_dim(p.x.dim(), p.xs.dim())?;
    Ok(match spec {
        OperatorSpec::FiniteGraph(g) => g
            .points()
            .iter()
            .any(|q| norm_inf(&sub(&p.x, &q.x)) <= tol && norm_inf(&sub(&p.xs, &q.xs)) <= tol),
        OperatorSpec::Affine { m, b } => {
            let r: Vec<f64> = m.iter().zip(b.iter()).zip(p.xs.iter()).map(|((row, bi), xs)| xs - (dot(row, &p.x) + bi)).collect();
            norm_inf(&r) <= tol
        }
        OperatorSpec::SubdiffPolyhedral { pieces } => match polyhedral_conjugate(pieces, &p.xs)? {
            None => false,
            Some(conj) => polyhedral_value(pieces, &p.x) + conj - p.duality() <= tol,
        },
        OperatorSpec::Restricted { inner, window } => window_admits(window, p) && membership(inner, p, tol)?,
        OperatorSpec::Inverse { inner } => membership(inner, &p.swapped(), tol)?,
    })
}

/// Deterministic grid sample of the graph of `spec` inside `window`.
///
/// The window is either primal-only (`R^n`) or a pair window (`R^{2n}`), in
/// which case dual coordinates outside it are dropped. Points are sorted per
/// primal node by their dual coordinates.
pub fn sample_graph(spec: &OperatorSpec, window: &Window) -> Result<FiniteGraph> {
    let n = spec.dim();
    if window.dim() != n && window.dim() != 2 * n {
        return Err(Error::DimensionMismatch { expected: n, got: window.dim() });
    }
    let mut points = sample_raw(spec, window)?;
    if window.dim() == 2 * n {
        points.retain(|p| window.contains(&p.flat()));
    }
    dedup_sorted(&mut points);
    if points.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(FiniteGraph { points })
}

fn dedup_sorted(points: &mut Vec<PairPoint>) {
    points.sort_by(|a, b| {
        let (fa, fb) = (a.flat(), b.flat());
        fa.iter().zip(&fb).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    points.dedup();
}

fn primal_grid(spec_dim: usize, window: &Window) -> Window {
    if window.dim() == spec_dim {
        window.clone()
    } else {
        window.axes(0..spec_dim)
    }
}

fn sample_raw(spec: &OperatorSpec, window: &Window) -> Result<Vec<PairPoint>> {
    let n = spec.dim();
    let grid = primal_grid(n, window);
    Ok(match spec {
        OperatorSpec::FiniteGraph(g) => {
            g.points().iter().filter(|p| grid.contains(&p.x)).cloned().collect()
        }
        OperatorSpec::Affine { m, b } => grid
            .points()
            .into_iter()
            .map(|x| {
                let xs: Vec<f64> = m.iter().zip(b.iter()).map(|(row, bi)| dot(row, &x) + bi).collect();
                PairPoint { x: x.into(), xs: xs.into() }
            })
            .collect(),
        OperatorSpec::SubdiffPolyhedral { pieces } => {
            let mut out = Vec::new();
            for x in grid.points() {
                for s in subgradient_samples(pieces, &x)? {
                    out.push(PairPoint { x: x.clone().into(), xs: s.into() });
                }
            }
            out
        }
        OperatorSpec::Restricted { inner, window: restriction } => {
            let mut pts = sample_raw(inner, window)?;
            pts.retain(|p| window_admits(restriction, p));
            pts
        }
        OperatorSpec::Inverse { inner } => {
            if n == 1 {
                Graph1D::from_spec(spec)?
                    .sample(window)
                    .into_iter()
                    .map(|[x, xs]| PairPoint::scalar(x, xs))
                    .collect()
            } else {
                let swapped = window.to_pair(n)?.swapped_pair()?;
                let pts = sample_raw(inner, &swapped)?;
                pts.iter().map(PairPoint::swapped).filter(|p| grid.contains(&p.x)).collect()
            }
        }
    })
}

/// Active-piece subgradients at `x`; at a breakpoint the vertices of the
/// subdifferential polytope plus their centroid.
fn subgradient_samples(pieces: &[Piece], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let values: Vec<f64> = pieces.iter().map(|p| dot(&p.c, x) + p.d).collect();
    let f = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + f.abs());
    let mut active: Vec<Vec<f64>> =
        pieces.iter().zip(&values).filter(|(_, &v)| v >= f - tol).map(|(p, _)| p.c.to_vec()).collect();
    active.sort_by(|a, b| a.iter().zip(b).map(|(u, v)| u.total_cmp(v)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    active.dedup();
    if active.len() == 1 {
        return Ok(active);
    }
    let mut vertices = Vec::new();
    for (i, c) in active.iter().enumerate() {
        let others: Vec<Vec<f64>> = active.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, o)| o.clone()).collect();
        let zero = vec![0.0; others.len()];
        if simplex_combination(&others, &zero, c)?.is_none() {
            vertices.push(c.clone());
        }
    }
    let k = vertices.len() as f64;
    let centroid: Vec<f64> = (0..x.len()).map(|a| vertices.iter().map(|v| v[a]).sum::<f64>() / k).collect();
    vertices.push(centroid);
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_spec() -> OperatorSpec {
        OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap()
    }

    fn scalars(g: &FiniteGraph) -> Vec<(f64, f64)> {
        g.points().iter().map(|p| (p.x[0], p.xs[0])).collect()
    }

    #[test]
    fn monotone_set_examples() {
        let g = FiniteGraph::from_scalars(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(is_monotone_set(&g).unwrap().monotone);
        let g = FiniteGraph::from_scalars(&[(0.0, 1.0), (1.0, 0.0)]);
        let v = is_monotone_set(&g).unwrap();
        assert!(!v.monotone);
        let (p, q, prod) = v.violation.unwrap();
        assert_eq!((p, q, prod), (PairPoint::scalar(0.0, 1.0), PairPoint::scalar(1.0, 0.0), -1.0));
        assert!(is_monotone_set(&FiniteGraph::from_scalars(&[(3.0, -2.0)])).unwrap().monotone);
        assert_eq!(is_monotone_set(&FiniteGraph::from_scalars(&[])), Err(Error::EmptyGraph));
    }

    #[test]
    fn invert_is_involution() {
        let g = FiniteGraph::from_scalars(&[(1.0, 2.0)]);
        assert_eq!(scalars(&invert_graph(&g)), vec![(2.0, 1.0)]);
        assert_eq!(invert_graph(&invert_graph(&g)), g);
    }

    #[test]
    fn sample_identity_and_abs() {
        let w = Window::new(vec![-1.0], vec![1.0], vec![3]).unwrap();
        let g = sample_graph(&OperatorSpec::identity(1), &w).unwrap();
        assert_eq!(scalars(&g), vec![(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]);
        let g = sample_graph(&abs_spec(), &w).unwrap();
        assert_eq!(scalars(&g), vec![(-1.0, -1.0), (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        for p in g.points() {
            assert!(membership(&abs_spec(), p, 0.0).unwrap(), "{p}");
        }
    }

    #[test]
    fn restricted_sample_drops_negative_x() {
        let r = OperatorSpec::restricted(OperatorSpec::identity(1), Window::new(vec![0.0], vec![1.0], vec![2]).unwrap()).unwrap();
        let w = Window::new(vec![-1.0], vec![1.0], vec![5]).unwrap();
        let g = sample_graph(&r, &w).unwrap();
        assert_eq!(scalars(&g), vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        let w = Window::new(vec![-1.0], vec![-0.5], vec![3]).unwrap();
        assert_eq!(sample_graph(&r, &w), Err(Error::EmptyGraph));
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&abs_spec(), &PairPoint::scalar(0.0, 0.5), 1e-9).unwrap());
        assert!(!membership(&abs_spec(), &PairPoint::scalar(-0.25, 0.0), 1e-9).unwrap());
        assert!(membership(&OperatorSpec::identity(1), &PairPoint::scalar(3.0, 3.0), 0.0).unwrap());
        assert!(!membership(&abs_spec(), &PairPoint::scalar(0.0, 1.5), 1e-9).unwrap());
    }

    #[test]
    fn normal_cone_as_inverse() {
        let nc = OperatorSpec::inverse(OperatorSpec::subdiff(vec![(vec![0.0], 0.0), (vec![1.0], 0.0)]).unwrap());
        assert!(membership(&nc, &PairPoint::scalar(0.0, -3.0), 1e-12).unwrap());
        assert!(membership(&nc, &PairPoint::scalar(0.4, 0.0), 1e-12).unwrap());
        assert!(membership(&nc, &PairPoint::scalar(1.0, 2.0), 1e-12).unwrap());
        assert!(!membership(&nc, &PairPoint::scalar(0.4, 0.1), 1e-12).unwrap());
        assert!(!membership(&nc, &PairPoint::scalar(1.2, 0.0), 1e-12).unwrap());
        let w = Window::cube(2, -1.0, 2.0, 7).unwrap();
        let g = sample_graph(&nc, &w).unwrap();
        assert!(g.points().iter().all(|p| membership(&nc, p, 1e-12).unwrap()));
        assert!(g.points().contains(&PairPoint::scalar(0.5, 0.0)));
        assert!(g.points().contains(&PairPoint::scalar(0.0, -1.0)));
        assert!(g.points().contains(&PairPoint::scalar(1.0, 2.0)));
    }

    #[test]
    fn subdiff_2d_breakpoint_vertices() {
        // f = max(|x1|, |x2|) style pieces: at the origin the subdifferential is the
        // l1 ball with four vertices.
        let spec = OperatorSpec::subdiff(vec![
            (vec![1.0, 0.0], 0.0),
            (vec![-1.0, 0.0], 0.0),
            (vec![0.0, 1.0], 0.0),
            (vec![0.0, -1.0], 0.0),
        ])
        .unwrap();
        let s = subgradient_samples(match &spec { OperatorSpec::SubdiffPolyhedral { pieces } => pieces, _ => unreachable!() }, &[0.0, 0.0]).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[4], vec![0.0, 0.0]);
    }

    #[test]
    fn json_schema_round_trip() {
        let v = serde_json::json!({
            "dim": 1, "kind": "restricted",
            "inner": {"dim": 1, "kind": "affine", "M": [[1.0]], "b": [0.0]},
            "window": {"lower": [0.0], "upper": [3.0], "resolution": [2]}
        });
        let spec = OperatorSpec::from_json(&v).unwrap();
        assert_eq!(OperatorSpec::from_json(&spec.to_json()).unwrap(), spec);
        let bad = serde_json::json!({"dim": 2, "kind": "affine", "M": [[1.0]], "b": [0.0]});
        assert!(OperatorSpec::from_json(&bad).is_err());
        let bad = serde_json::json!({"kind": "subdiff_polyhedral", "pieces": []});
        assert!(OperatorSpec::from_json(&bad).is_err());
        let bad = serde_json::json!({"kind": "mystery"});
        assert!(OperatorSpec::from_json(&bad).is_err());
    }

    #[test]
    fn finite_graph_points_are_flat() {
        let v = serde_json::json!({"dim": 1, "kind": "finite_graph", "points": [[0.0, 0.0], [1.0, 1.0]]});
        let spec = OperatorSpec::from_json(&v).unwrap();
        match &spec {
            OperatorSpec::FiniteGraph(g) => assert_eq!(scalars(g), vec![(0.0, 0.0), (1.0, 1.0)]),
            _ => panic!(),
        }
        assert!(OperatorSpec::from_json(&serde_json::json!({"kind": "finite_graph", "points": [[1.0, 2.0, 3.0]]})).is_err());
    }
}
