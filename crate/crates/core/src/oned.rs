//! Graphs of one-dimensional polyhedral operators as finite unions of
//! parametrized segments and rays in `R × R`.
//!
//! Every operator kind in dimension one (affine lines, subdifferentials of
//! max-affine functions, window restrictions, inverses, finite graphs) has a
//! graph of this form, and the Fitzpatrick supremum over one segment is the
//! maximum of a quadratic on an interval, so it can be taken in closed form.

use crate::error::{Error, Result};
use crate::operator::{OperatorSpec, Piece};
use crate::space::{ExtReal, Window};

/// `{ p + t d : t ∈ [t0, t1] }`; coordinates are `(x, x*)`. Bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub p: [f64; 2],
    pub d: [f64; 2],
    pub t0: f64,
    pub t1: f64,
}

impl Segment {
    fn at(&self, t: f64) -> [f64; 2] {
        [self.p[0] + t * self.d[0], self.p[1] + t * self.d[1]]
    }

    fn swapped(self) -> Segment {
        Segment { p: [self.p[1], self.p[0]], d: [self.d[1], self.d[0]], ..self }
    }

    fn is_vertical(&self) -> bool {
        self.d[0] == 0.0
    }

    /// Clips to `lo[a] <= coordinate a <= hi[a]` for the given axes.
    fn clip(mut self, axis: usize, lo: f64, hi: f64) -> Option<Segment> {
        let (p, d) = (self.p[axis], self.d[axis]);
        if d == 0.0 {
            return (lo <= p && p <= hi).then_some(self);
        }
        let (a, b) = ((lo - p) / d, (hi - p) / d);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.t0 = self.t0.max(a);
        self.t1 = self.t1.min(b);
        (self.t0 <= self.t1).then_some(self)
    }

    /// `sup_t  x·y*(t) + xs·y(t) - y(t)·y*(t)`.
    fn fitzpatrick_sup(&self, x: f64, xs: f64) -> ExtReal {
        let [p0, p1] = self.p;
        let [d0, d1] = self.d;
        let a = -d0 * d1;
        let b = x * d1 + xs * d0 - p0 * d1 - p1 * d0;
        let q = |t: f64| {
            let [y, ys] = self.at(t);
            x * ys + xs * y - y * ys
        };
        if a < 0.0 {
            let t = (-b / (2.0 * a)).clamp(self.t0, self.t1);
            return ExtReal::Finite(q(t));
        }
        // Linear or convex in t: the supremum sits at an end of the interval.
        let mut best = f64::NEG_INFINITY;
        for (t, dir) in [(self.t0, -1.0), (self.t1, 1.0)] {
            if t.is_finite() {
                best = best.max(q(t));
            } else if a > 0.0 || dir * b > 0.0 {
                return ExtReal::PosInf;
            } else if b == 0.0 {
                best = best.max(q(0.0_f64.clamp(self.t0, self.t1)));
            }
        }
        ExtReal::Finite(best)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph1D {
    pub segments: Vec<Segment>,
}

/// Breakpoints of `max_i c_i x + d_i` and the slope on each linear stretch.
/// Returns `(kinks, slopes)` with `slopes.len() == kinks.len() + 1`.
pub fn upper_envelope(pieces: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    let mut lines: Vec<(f64, f64)> = pieces.to_vec();
    lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    lines.dedup_by(|later, kept| later.0 == kept.0);
    let cross = |a: (f64, f64), b: (f64, f64)| (a.1 - b.1) / (b.0 - a.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for l in lines {
        while hull.len() >= 2 {
            let (h1, h2) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(h1, l) <= cross(h1, h2) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let kinks = hull.windows(2).map(|w| cross(w[0], w[1])).collect();
    let slopes = hull.iter().map(|l| l.0).collect();
    (kinks, slopes)
}

impl Graph1D {
    pub fn from_spec(spec: &OperatorSpec) -> Result<Graph1D> {
        if spec.dim() != 1 {
            return Err(Error::Unsupported(format!(
                "segment graphs exist only in dimension one, got {}",
                spec.dim()
            )));
        }
        let segments = match spec {
            OperatorSpec::FiniteGraph(g) => g
                .points()
                .iter()
                .map(|p| Segment { p: [p.x[0], p.xs[0]], d: [0.0, 0.0], t0: 0.0, t1: 0.0 })
                .collect(),
            OperatorSpec::Affine { m, b } => vec![Segment {
                p: [0.0, b[0]],
                d: [1.0, m[0][0]],
                t0: f64::NEG_INFINITY,
                t1: f64::INFINITY,
            }],
            OperatorSpec::SubdiffPolyhedral { pieces } => subdiff_segments(pieces),
            OperatorSpec::Restricted { inner, window } => {
                let inner = Graph1D::from_spec(inner)?;
                return Ok(inner.restricted(window));
            }
            OperatorSpec::Inverse { inner } => {
                Graph1D::from_spec(inner)?.segments.into_iter().map(Segment::swapped).collect()
            }
        };
        Ok(Graph1D { segments })
    }

    pub fn restricted(&self, window: &Window) -> Graph1D {
        let segments = self
            .segments
            .iter()
            .filter_map(|s| {
                let s = s.clip(0, window.lower[0], window.upper[0])?;
                if window.dim() == 2 {
                    s.clip(1, window.lower[1], window.upper[1])
                } else {
                    Some(s)
                }
            })
            .collect();
        Graph1D { segments }
    }

    /// Exact Fitzpatrick function of the graph at `(x, xs)`.
    pub fn fitzpatrick(&self, x: f64, xs: f64) -> ExtReal {
        let mut best = ExtReal::Finite(f64::NEG_INFINITY);
        for s in &self.segments {
            let v = s.fitzpatrick_sup(x, xs);
            if v == ExtReal::PosInf {
                return v;
            }
            if v > best {
                best = v;
            }
        }
        best
    }

    /// Graph points over the primal grid of `window`: the intersection with
    /// every non-vertical segment, and for a vertical segment standing on a
    /// grid node its two ends (clipped to the dual range) and midpoint.
    pub fn sample(&self, window: &Window) -> Vec<[f64; 2]> {
        let pair = window.to_pair(1).expect("window of dimension 1 or 2");
        let (dlo, dhi) = (pair.lower[1], pair.upper[1]);
        let nodes = window.axis_nodes(0);
        let scale = 1.0 + nodes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut out = Vec::new();
        for s in &self.segments {
            if s.is_vertical() {
                let Some(s) = s.clip(1, dlo, dhi) else { continue };
                if !nodes.iter().any(|&x| (x - s.p[0]).abs() <= 1e-12 * scale) {
                    continue;
                }
                let a = s.at(s.t0);
                let b = s.at(s.t1);
                out.push(a);
                out.push(b);
                out.push(s.at(0.5 * (s.t0 + s.t1)));
            } else {
                for &x in &nodes {
                    let t = (x - s.p[0]) / s.d[0];
                    let slack = 1e-12 * (1.0 + t.abs());
                    if t >= s.t0 - slack && t <= s.t1 + slack {
                        let t = t.clamp(s.t0, s.t1);
                        out.push([x, s.p[1] + t * s.d[1]]);
                    }
                }
            }
        }
        out.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        out.dedup();
        out
    }
}

fn subdiff_segments(pieces: &[Piece]) -> Vec<Segment> {
    let lines: Vec<(f64, f64)> = pieces.iter().map(|p| (p.c[0], p.d)).collect();
    let (kinks, slopes) = upper_envelope(&lines);
    let (ninf, pinf) = (f64::NEG_INFINITY, f64::INFINITY);
    if kinks.is_empty() {
        return vec![Segment { p: [0.0, slopes[0]], d: [1.0, 0.0], t0: ninf, t1: pinf }];
    }
    let mut segs = Vec::new();
    let last = kinks.len() - 1;
    segs.push(Segment { p: [kinks[0], slopes[0]], d: [1.0, 0.0], t0: ninf, t1: 0.0 });
    for (j, &k) in kinks.iter().enumerate() {
        segs.push(Segment { p: [k, slopes[j]], d: [0.0, 1.0], t0: 0.0, t1: slopes[j + 1] - slopes[j] });
        let end = if j == last { pinf } else { kinks[j + 1] - k };
        segs.push(Segment { p: [k, slopes[j + 1]], d: [1.0, 0.0], t0: 0.0, t1: end });
    }
    segs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_graph() -> Graph1D {
        Graph1D::from_spec(&OperatorSpec::subdiff(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap()).unwrap()
    }

    #[test]
    fn envelope_of_abs_and_dominated_lines() {
        let (k, s) = upper_envelope(&[(1.0, 0.0), (-1.0, 0.0), (0.0, -5.0), (1.0, -3.0)]);
        assert_eq!(k, vec![0.0]);
        assert_eq!(s, vec![-1.0, 1.0]);
        let (k, s) = upper_envelope(&[(0.0, 0.0), (1.0, 0.0), (2.0, -2.0)]);
        assert_eq!(k, vec![0.0, 2.0]);
        assert_eq!(s, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn fitzpatrick_of_abs() {
        let g = abs_graph();
        assert_eq!(g.fitzpatrick(1.0, 0.0), ExtReal::Finite(1.0));
        assert_eq!(g.fitzpatrick(0.0, 0.5), ExtReal::Finite(0.0));
        // xs beyond the slope range: the ray y -> +inf makes the sup infinite.
        assert_eq!(g.fitzpatrick(0.0, 1.5), ExtReal::PosInf);
        assert_eq!(g.fitzpatrick(0.0, -1.5), ExtReal::PosInf);
    }

    #[test]
    fn fitzpatrick_of_identity_completes_square() {
        let g = Graph1D::from_spec(&OperatorSpec::identity(1)).unwrap();
        for &(x, xs) in &[(1.0, 1.0), (0.3, -2.0), (-1.5, 0.25)] {
            let want = (x + xs) * (x + xs) / 4.0;
            assert!((g.fitzpatrick(x, xs).to_f64() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn half_line_fitzpatrick() {
        let w = Window::new(vec![0.0], vec![3.0], vec![2]).unwrap();
        let g = Graph1D::from_spec(&OperatorSpec::restricted(OperatorSpec::identity(1), w).unwrap()).unwrap();
        assert_eq!(g.fitzpatrick(-1.0, -1.0), ExtReal::Finite(0.0));
        assert_eq!(g.fitzpatrick(0.0, -1.0), ExtReal::Finite(0.0));
        assert_eq!(g.fitzpatrick(1.0, 1.0), ExtReal::Finite(1.0));
        // Vertex t = 5 clamps to the end of the segment at 3.
        assert_eq!(g.fitzpatrick(5.0, 5.0), ExtReal::Finite(3.0 * 10.0 - 9.0));
    }

    #[test]
    fn sample_abs_on_three_nodes() {
        let w = Window::new(vec![-1.0], vec![1.0], vec![3]).unwrap();
        let pts = abs_graph().sample(&w);
        assert_eq!(pts, vec![[-1.0, -1.0], [0.0, -1.0], [0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
    }
}
