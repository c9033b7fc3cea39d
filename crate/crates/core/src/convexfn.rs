//! Extended-real convex functions on `R^n × R^n`: max-affine, convex-hull
//! (epigraph generators) and grid-sampled forms, with Fenchel conjugation
//! between them and the primal/dual swap `𝒥`.
//!
//! Conjugation pairs blocks with blocks: for `w = (a, b)`,
//! `f*(w) = sup_z <z.x, a> + <z.xs, b> - f(z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{simplex_combination, LpProblem};
use crate::space::{dot, ExtReal, PairPoint, Vector, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTerm {
    pub u: Vector,
    pub us: Vector,
    pub c: f64,
}

impl AffineTerm {
    fn value(&self, z: &PairPoint) -> f64 {
        self.u.dot(&z.x) + self.us.dot(&z.xs) + self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub z: PairPoint,
    pub v: f64,
}

/// Values on the nodes of a window over `R^d`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunc {
    pub window: Window,
    pub values: Vec<ExtReal>,
}

impl GridFunc {
    pub fn new(window: Window, values: Vec<ExtReal>) -> Result<Self> {
        Error::check_dim(window.len(), values.len())?;
        if values.iter().any(|v| v.finite().is_some_and(f64::is_nan)) {
            return Err(Error::input("grid values contain NaN"));
        }
        Ok(GridFunc { window, values })
    }

    /// Samples `f` on every node of `window`.
    pub fn sample(window: Window, f: impl Fn(&[f64]) -> ExtReal) -> Result<Self> {
        let values = window.points().iter().map(|p| f(p)).collect();
        GridFunc::new(window, values)
    }

    /// Value at the node nearest to `z`, with that node. Outside the window the
    /// function is `+∞`.
    pub fn eval_node(&self, z: &[f64]) -> Result<(ExtReal, Vec<f64>)> {
        Error::check_dim(self.window.dim(), z.len())?;
        let idx = self.window.nearest(z);
        let node: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| self.window.node(a, i)).collect();
        let inside = z.iter().enumerate().all(|(a, &v)| {
            let half = 0.5 * self.window.step(a);
            self.window.lower[a] - half <= v && v <= self.window.upper[a] + half
        });
        if !inside {
            return Ok((ExtReal::PosInf, node));
        }
        Ok((self.values[self.window.ravel(&idx)], node))
    }

    /// Per-axis range of forward finite-difference slopes between finite nodes.
    pub fn slope_range(&self) -> Window {
        let w = &self.window;
        let mut lower = Vec::with_capacity(w.dim());
        let mut upper = Vec::with_capacity(w.dim());
        for axis in 0..w.dim() {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..w.len() {
                let mut idx = w.unravel(k);
                if idx[axis] + 1 == w.resolution[axis] {
                    continue;
                }
                let ExtReal::Finite(a) = self.values[k] else { continue };
                idx[axis] += 1;
                let ExtReal::Finite(b) = self.values[w.ravel(&idx)] else { continue };
                let s = (b - a) / w.step(axis);
                lo = lo.min(s);
                hi = hi.max(s);
            }
            if !lo.is_finite() || !hi.is_finite() {
                (lo, hi) = (-1.0, 1.0);
            } else if hi - lo < 1e-12 {
                (lo, hi) = (lo - 1.0, hi + 1.0);
            }
            lower.push(lo);
            upper.push(hi);
        }
        Window { lower, upper, resolution: w.resolution.clone() }
    }

    /// Exhaustive discrete Legendre transform onto `dual`.
    pub fn conjugate_on(&self, dual: Window) -> Result<GridFunc> {
        Error::check_dim(self.window.dim(), dual.dim())?;
        let nodes: Vec<(Vec<f64>, f64)> = self
            .window
            .points()
            .into_iter()
            .zip(&self.values)
            .filter_map(|(p, v)| v.finite().map(|v| (p, v)))
            .collect();
        let values = dual
            .points()
            .iter()
            .map(|w| {
                if nodes.is_empty() {
                    // Conjugate of the constant +∞ is -∞, which no representation here carries.
                    return ExtReal::Finite(f64::NEG_INFINITY);
                }
                ExtReal::Finite(nodes.iter().map(|(z, v)| dot(w, z) - v).fold(f64::NEG_INFINITY, f64::max))
            })
            .collect();
        GridFunc::new(dual, values)
    }

    fn swapped(&self) -> Result<GridFunc> {
        let w = &self.window;
        let swapped = w.swapped_pair()?;
        let n = w.dim() / 2;
        let mut values = vec![ExtReal::PosInf; w.len()];
        for (k, v) in self.values.iter().enumerate() {
            let idx = w.unravel(k);
            let moved: Vec<usize> = idx[n..].iter().chain(&idx[..n]).copied().collect();
            values[swapped.ravel(&moved)] = *v;
        }
        GridFunc::new(swapped, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFuncRep {
    /// `max_i <u_i, x> + <us_i, xs> + c_i`.
    MaxAffine { terms: Vec<AffineTerm> },
    /// Largest convex function with value `v_i` at `z_i`; `+∞` off the hull.
    HullFunc { generators: Vec<Generator> },
    GridFunc(GridFunc),
}

impl ConvexFuncRep {
    pub fn max_affine(terms: Vec<AffineTerm>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::input("max-affine function needs a term"))?;
        let n = first.u.dim();
        for t in &terms {
            Error::check_dim(n, t.u.dim())?;
            Error::check_dim(n, t.us.dim())?;
        }
        Ok(ConvexFuncRep::MaxAffine { terms })
    }

    /// Constant zero on `R^n × R^n`.
    pub fn zero(n: usize) -> Self {
        ConvexFuncRep::MaxAffine { terms: vec![AffineTerm { u: Vector::zeros(n), us: Vector::zeros(n), c: 0.0 }] }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexFuncRep::MaxAffine { .. } => "max_affine",
            ConvexFuncRep::HullFunc { .. } => "hull_func",
            ConvexFuncRep::GridFunc(_) => "grid_func",
        }
    }

    pub fn eval(&self, z: &PairPoint) -> Result<ExtReal> {
        match self {
            ConvexFuncRep::MaxAffine { terms } => {
                Error::check_dim(terms[0].u.dim(), z.dim())?;
                Ok(ExtReal::Finite(terms.iter().map(|t| t.value(z)).fold(f64::NEG_INFINITY, f64::max)))
            }
            ConvexFuncRep::HullFunc { generators } => {
                Error::check_dim(generators[0].z.dim(), z.dim())?;
                let points: Vec<Vec<f64>> = generators.iter().map(|g| g.z.flat()).collect();
                let costs: Vec<f64> = generators.iter().map(|g| g.v).collect();
                Ok(match simplex_combination(&points, &costs, &z.flat())? {
                    Some((v, _)) => ExtReal::Finite(v),
                    None => ExtReal::PosInf,
                })
            }
            ConvexFuncRep::GridFunc(g) => Ok(g.eval_node(&z.flat())?.0),
        }
    }

    /// Dimension `n` of the pair space the function lives on.
    pub fn pair_dim(&self) -> Option<usize> {
        match self {
            ConvexFuncRep::MaxAffine { terms } => terms.first().map(|t| t.u.dim()),
            ConvexFuncRep::HullFunc { generators } => generators.first().map(|g| g.z.dim()),
            ConvexFuncRep::GridFunc(g) => (g.window.dim() % 2 == 0).then_some(g.window.dim() / 2),
        }
    }
}

/// Fenchel conjugate. Exact between the two polyhedral forms; grids go
/// through the discrete Legendre transform on the slope-range window.
pub fn conjugate(f: &ConvexFuncRep) -> Result<ConvexFuncRep> {
    Ok(match f {
        ConvexFuncRep::MaxAffine { terms } => ConvexFuncRep::HullFunc {
            generators: terms
                .iter()
                .map(|t| Generator { z: PairPoint { x: t.u.clone(), xs: t.us.clone() }, v: -t.c })
                .collect(),
        },
        ConvexFuncRep::HullFunc { generators } => ConvexFuncRep::MaxAffine {
            terms: generators.iter().map(|g| AffineTerm { u: g.z.x.clone(), us: g.z.xs.clone(), c: -g.v }).collect(),
        },
        ConvexFuncRep::GridFunc(g) => ConvexFuncRep::GridFunc(g.conjugate_on(g.slope_range())?),
    })
}

/// Convex closure of the function equal to `v_i` at `z_i` and `+∞` elsewhere.
pub fn clconv_from_points(data: Vec<(PairPoint, f64)>) -> Result<ConvexFuncRep> {
    let first = data.first().ok_or(Error::EmptyGraph)?;
    let n = first.0.dim();
    for (z, v) in &data {
        Error::check_dim(n, z.dim())?;
        if !v.is_finite() {
            return Err(Error::input("hull values must be finite"));
        }
    }
    Ok(ConvexFuncRep::HullFunc { generators: data.into_iter().map(|(z, v)| Generator { z, v }).collect() })
}

/// `𝒥f(x, x*) = f*(x*, x)`.
pub fn j_transform(f: &ConvexFuncRep) -> Result<ConvexFuncRep> {
    Ok(match conjugate(f)? {
        ConvexFuncRep::MaxAffine { terms } => ConvexFuncRep::MaxAffine {
            terms: terms.into_iter().map(|t| AffineTerm { u: t.us, us: t.u, c: t.c }).collect(),
        },
        ConvexFuncRep::HullFunc { generators } => ConvexFuncRep::HullFunc {
            generators: generators.into_iter().map(|g| Generator { z: g.z.swapped(), v: g.v }).collect(),
        },
        ConvexFuncRep::GridFunc(g) => ConvexFuncRep::GridFunc(g.swapped()?),
    })
}

/// Conjugate of a hull function at `w`, solved as the LP
/// `max_λ Σ λ_i (<w, z_i> - v_i)` over the simplex.
///
/// Independent of the representation swap in [`conjugate`]; used to
/// cross-check it.
pub fn hull_conjugate_lp(generators: &[Generator], w: &PairPoint) -> Result<f64> {
    let first = generators.first().ok_or(Error::EmptyGraph)?;
    Error::check_dim(first.z.dim(), w.dim())?;
    let wf = w.flat();
    let objective: Vec<f64> = generators.iter().map(|g| g.v - dot(&g.z.flat(), &wf)).collect();
    let p = LpProblem { objective, a_eq: vec![vec![1.0; generators.len()]], b_eq: vec![1.0], lower: None };
    let sol = crate::optim::solve_lp(&p)?;
    Ok(-sol.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_hull() -> ConvexFuncRep {
        clconv_from_points(vec![(PairPoint::scalar(0.0, 0.0), 0.0), (PairPoint::scalar(1.0, 1.0), 1.0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let z = PairPoint::scalar(3.0, -4.0);
        assert_eq!(ConvexFuncRep::zero(1).eval(&z).unwrap(), ExtReal::Finite(0.0));
        let h = two_point_hull();
        let v = h.eval(&PairPoint::scalar(0.5, 0.5)).unwrap().to_f64();
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(h.eval(&PairPoint::scalar(2.0, 2.0)).unwrap(), ExtReal::PosInf);
        assert!(h.eval(&PairPoint::from_flat(&[0.0, 0.0, 0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn dominated_generator_is_ignored() {
        let h = clconv_from_points(vec![
            (PairPoint::scalar(0.0, 0.0), 0.0),
            (PairPoint::scalar(1.0, 1.0), 1.0),
            (PairPoint::scalar(0.5, 0.5), 10.0),
        ])
        .unwrap();
        let v = h.eval(&PairPoint::scalar(0.5, 0.5)).unwrap().to_f64();
        assert!((v - 0.5).abs() < 1e-12);
        let single = clconv_from_points(vec![(PairPoint::scalar(0.0, 0.0), 5.0)]).unwrap();
        assert_eq!(single.eval(&PairPoint::scalar(0.0, 0.0)).unwrap(), ExtReal::Finite(5.0));
        assert_eq!(single.eval(&PairPoint::scalar(0.0, 1e-6)).unwrap(), ExtReal::PosInf);
        assert!(clconv_from_points(vec![]).is_err());
    }

    #[test]
    fn affine_conjugate_is_point_indicator() {
        // f(z) = <(2, -1), z> - 3  ->  f* = 3 at (2, -1), +inf elsewhere.
        let f = ConvexFuncRep::max_affine(vec![AffineTerm { u: vec![2.0].into(), us: vec![-1.0].into(), c: -3.0 }]).unwrap();
        let g = conjugate(&f).unwrap();
        assert_eq!(g.eval(&PairPoint::scalar(2.0, -1.0)).unwrap(), ExtReal::Finite(3.0));
        assert_eq!(g.eval(&PairPoint::scalar(2.0, -0.5)).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn j_transform_of_two_point_s() {
        let h = two_point_hull();
        let g = j_transform(&h).unwrap();
        for &(x, xs) in &[(1.0, 0.0), (0.3, 0.9), (-2.0, 1.0), (2.0, 2.0)] {
            let want = f64::max(0.0, x + xs - 1.0);
            assert_eq!(g.eval(&PairPoint::scalar(x, xs)).unwrap(), ExtReal::Finite(want));
        }
        let jz = j_transform(&ConvexFuncRep::zero(1)).unwrap();
        assert_eq!(jz.eval(&PairPoint::scalar(0.0, 0.0)).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(jz.eval(&PairPoint::scalar(0.1, 0.0)).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn biconjugate_and_double_j_at_generators() {
        let h = clconv_from_points(vec![
            (PairPoint::scalar(0.0, 0.0), 0.0),
            (PairPoint::scalar(1.0, 2.0), 2.0),
            (PairPoint::scalar(-1.0, 0.5), 1.0),
        ])
        .unwrap();
        let hh = conjugate(&conjugate(&h).unwrap()).unwrap();
        let jj = j_transform(&j_transform(&h).unwrap()).unwrap();
        let ConvexFuncRep::HullFunc { generators } = &h else { unreachable!() };
        for g in generators {
            let want = h.eval(&g.z).unwrap().to_f64();
            assert!((hh.eval(&g.z).unwrap().to_f64() - want).abs() < 1e-12);
            assert!((jj.eval(&g.z).unwrap().to_f64() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn hull_conjugate_lp_matches_max_affine() {
        let h = two_point_hull();
        let ConvexFuncRep::HullFunc { generators } = &h else { unreachable!() };
        let ma = conjugate(&h).unwrap();
        for &(a, b) in &[(0.0, 0.0), (1.0, 0.5), (-2.0, 3.0)] {
            let w = PairPoint::scalar(a, b);
            let lp = hull_conjugate_lp(generators, &w).unwrap();
            assert!((lp - ma.eval(&w).unwrap().to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_conjugate_of_half_square() {
        let w = Window::new(vec![-2.0], vec![2.0], vec![401]).unwrap();
        let f = GridFunc::sample(w.clone(), |x| ExtReal::Finite(0.5 * x[0] * x[0])).unwrap();
        let ConvexFuncRep::GridFunc(g) = conjugate(&ConvexFuncRep::GridFunc(f)).unwrap() else { unreachable!() };
        let step = w.step(0);
        assert!(g.window.lower[0] < -1.9 && g.window.upper[0] > 1.9);
        let mut worst: f64 = 0.0;
        for k in 0..=200 {
            let s = -1.0 + 0.01 * k as f64;
            let (v, _) = g.eval_node(&[s]).unwrap();
            worst = worst.max((v.to_f64() - 0.5 * s * s).abs());
        }
        assert!(worst <= 2.0 * step, "{worst}");
    }

    #[test]
    fn grid_swap_moves_axes() {
        let w = Window::new(vec![0.0, 10.0], vec![1.0, 12.0], vec![2, 3]).unwrap();
        let f = GridFunc::sample(w, |z| ExtReal::Finite(z[0] + 100.0 * z[1])).unwrap();
        let s = f.swapped().unwrap();
        assert_eq!(s.window.lower, vec![10.0, 0.0]);
        let (v, node) = s.eval_node(&[11.0, 1.0]).unwrap();
        assert_eq!(node, vec![11.0, 1.0]);
        assert_eq!(v, ExtReal::Finite(1.0 + 1100.0));
    }

    #[test]
    fn serde_tags() {
        let s = serde_json::to_value(two_point_hull()).unwrap();
        assert_eq!(s["kind"], "hull_func");
        let back: ConvexFuncRep = serde_json::from_value(s).unwrap();
        assert_eq!(back, two_point_hull());
    }
}
