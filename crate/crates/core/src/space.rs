//! The pair space `R^n × R^n`, its duality product, evaluation windows and
//! extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite vector entry {bad}")));
        }
        Ok(Vector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }
}

/// Unchecked conversion; callers that accept external data go through [`Vector::new`].
impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u - v).collect()
}

/// A point `(x, x*)` of `R^n × R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub x: Vector,
    pub xs: Vector,
}

impl PairPoint {
    pub fn new(x: Vector, xs: Vector) -> Result<Self> {
        Error::check_dim(x.dim(), xs.dim())?;
        Ok(PairPoint { x, xs })
    }

    /// Builds a point from `[x_1..x_n, xs_1..xs_n]`.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.is_empty() || !flat.len().is_multiple_of(2) {
            return Err(Error::input(format!(
                "pair point needs an even, nonzero number of coordinates, got {}",
                flat.len()
            )));
        }
        let n = flat.len() / 2;
        PairPoint::new(Vector::new(flat[..n].to_vec())?, Vector::new(flat[n..].to_vec())?)
    }

    pub(crate) fn from_flat_unchecked(flat: &[f64]) -> Self {
        let n = flat.len() / 2;
        PairPoint { x: flat[..n].into(), xs: flat[n..].into() }
    }

    pub fn scalar(x: f64, xs: f64) -> Self {
        PairPoint { x: vec![x].into(), xs: vec![xs].into() }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dim());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.xs);
        v
    }

    /// `(x, x*) ↦ (x*, x)`.
    pub fn swapped(&self) -> Self {
        PairPoint { x: self.xs.clone(), xs: self.x.clone() }
    }

    pub fn duality(&self) -> f64 {
        self.x.dot(&self.xs)
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.xs.iter()).all(|v| v.is_finite())
    }
}

impl fmt::Display for PairPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", &self.x[..], &self.xs[..])
    }
}

/// The duality product `<x, x*>`.
pub fn duality(p: &PairPoint) -> Result<f64> {
    Error::check_dim(p.x.dim(), p.xs.dim())?;
    Ok(p.duality())
}

/// `<p.x - q.x, p.xs - q.xs>`.
pub fn monotone_product(p: &PairPoint, q: &PairPoint) -> Result<f64> {
    Error::check_dim(p.dim(), q.dim())?;
    Error::check_dim(p.x.dim(), p.xs.dim())?;
    Ok(pair_product(p, q))
}

pub(crate) fn pair_product(p: &PairPoint, q: &PairPoint) -> f64 {
    p.x.iter()
        .zip(q.x.iter())
        .zip(p.xs.iter().zip(q.xs.iter()))
        .map(|((a, b), (c, d))| (a - b) * (c - d))
        .sum()
}

/// Whether `p` and `q` are in monotone relation. Exact, no tolerance.
pub fn mu_related(p: &PairPoint, q: &PairPoint) -> Result<bool> {
    Ok(monotone_product(p, q)? >= 0.0)
}

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// IEEE view, `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

const INF_MARKER: &str = "+inf";

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str(INF_MARKER),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() => Ok(ExtReal::Finite(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("non-finite number {v}"))),
            Raw::Str(s) if s == INF_MARKER || s == "inf" => Ok(ExtReal::PosInf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unknown extended real {s:?}"))),
        }
    }
}

/// An axis-aligned evaluation window with a grid resolution per axis.
///
/// A window over `R^n` constrains only the primal coordinate; a window over
/// `R^{2n}` constrains the full pair `(x, x*)`, primal axes first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Window {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lower: Vec<f64>,
            upper: Vec<f64>,
            resolution: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        Window::new(raw.lower, raw.upper, raw.resolution).map_err(serde::de::Error::custom)
    }
}

impl Window {
    /// `resolution` may hold a single entry, which is used for every axis.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let d = lower.len();
        if d == 0 {
            return Err(Error::input("window needs at least one axis"));
        }
        Error::check_dim(d, upper.len())?;
        let resolution = match resolution.len() {
            1 => vec![resolution[0]; d],
            r if r == d => resolution,
            r => return Err(Error::DimensionMismatch { expected: d, got: r }),
        };
        for i in 0..d {
            if !(lower[i].is_finite() && upper[i].is_finite()) {
                return Err(Error::input("window bounds must be finite"));
            }
            if lower[i] >= upper[i] {
                return Err(Error::input(format!(
                    "window axis {i}: lower {} must be below upper {}",
                    lower[i], upper[i]
                )));
            }
            if resolution[i] < 2 {
                return Err(Error::input(format!("window axis {i}: resolution must be at least 2")));
            }
        }
        Ok(Window { lower, upper, resolution })
    }

    /// The same interval and resolution on every one of `dim` axes.
    pub fn cube(dim: usize, lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        Window::new(vec![lo; dim], vec![hi; dim], vec![resolution])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.resolution[axis] - 1) as f64
    }

    pub fn min_step(&self) -> f64 {
        (0..self.dim()).map(|a| self.step(a)).fold(f64::INFINITY, f64::min)
    }

    /// Node `i` of `axis`; the last node is exactly `upper`.
    pub fn node(&self, axis: usize, i: usize) -> f64 {
        let r = self.resolution[axis];
        if i + 1 == r {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.step(axis)
        }
    }

    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.resolution[axis]).map(|i| self.node(axis, i)).collect()
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of the flat index `k`; the last axis varies fastest.
    pub fn unravel(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = k % self.resolution[axis];
            k /= self.resolution[axis];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.resolution).fold(0, |acc, (i, r)| acc * r + i)
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.unravel(k).iter().enumerate().map(|(a, &i)| self.node(a, i)).collect()
    }

    /// All grid nodes in row-major order (first axis slowest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Grid nodes interpreted as pair points; requires an even dimension.
    pub fn pair_points(&self) -> Result<Vec<PairPoint>> {
        if !self.dim().is_multiple_of(2) {
            return Err(Error::input(format!(
                "a pair-space window needs an even dimension, got {}",
                self.dim()
            )));
        }
        Ok(self.points().iter().map(|p| PairPoint::from_flat_unchecked(p)).collect())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().enumerate().all(|(a, &v)| self.lower[a] <= v && v <= self.upper[a])
    }

    /// Index of the node nearest to `p` on every axis (clamped to the window).
    pub fn nearest(&self, p: &[f64]) -> Vec<usize> {
        p.iter()
            .enumerate()
            .map(|(a, &v)| {
                let t = ((v - self.lower[a]) / self.step(a)).round();
                t.clamp(0.0, (self.resolution[a] - 1) as f64) as usize
            })
            .collect()
    }

    /// Sub-window over axes `range`.
    pub fn axes(&self, range: std::ops::Range<usize>) -> Window {
        Window {
            lower: self.lower[range.clone()].to_vec(),
            upper: self.upper[range.clone()].to_vec(),
            resolution: self.resolution[range].to_vec(),
        }
    }

    /// For a pair-space window over `R^{2n}`, the primal and dual halves.
    pub fn split_pair(&self) -> Result<(Window, Window)> {
        if !self.dim().is_multiple_of(2) {
            return Err(Error::input("pair window needs an even dimension"));
        }
        let n = self.dim() / 2;
        Ok((self.axes(0..n), self.axes(n..2 * n)))
    }

    /// The pair window with primal and dual halves exchanged.
    pub fn swapped_pair(&self) -> Result<Window> {
        let (p, d) = self.split_pair()?;
        Ok(p.concat(&d, true))
    }

    fn concat(&self, other: &Window, other_first: bool) -> Window {
        let (a, b) = if other_first { (other, self) } else { (self, other) };
        Window {
            lower: [a.lower.clone(), b.lower.clone()].concat(),
            upper: [a.upper.clone(), b.upper.clone()].concat(),
            resolution: [a.resolution.clone(), b.resolution.clone()].concat(),
        }
    }

    /// Lifts a window to pair space for an operator on `R^n`: a primal-only
    /// window gets the same bounds on the dual axes.
    pub fn to_pair(&self, n: usize) -> Result<Window> {
        if self.dim() == 2 * n {
            Ok(self.clone())
        } else if self.dim() == n {
            Ok(self.concat(self, false))
        } else {
            Err(Error::DimensionMismatch { expected: 2 * n, got: self.dim() })
        }
    }

    /// Pair window whose nodes contain the grid of `self` on every axis,
    /// refined `factor` times.
    pub fn refined(&self, factor: usize) -> Window {
        Window {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            resolution: self.resolution.iter().map(|r| (r - 1) * factor + 1).collect(),
        }
    }
}
