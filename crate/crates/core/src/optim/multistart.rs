//! Seeded multistart minimization over a box.
//!
//! Starts are the box corners plus uniform draws; each is polished by a
//! compass (coordinate) search whose step halves whenever a full sweep makes
//! no progress.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Corners are enumerated only up to this many box dimensions.
const MAX_CORNER_DIMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub step_tolerance: f64,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        MultistartConfig { starts: 64, seed: 0, max_iterations: 2000, step_tolerance: 1e-10 }
    }
}

impl MultistartConfig {
    pub fn with_seed(seed: u64) -> Self {
        MultistartConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Corner,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartRecord {
    pub kind: StartKind,
    pub start: Vec<f64>,
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultistartResult {
    pub best_value: f64,
    pub best_point: Vec<f64>,
    pub best_corner_value: f64,
    pub evaluations: u64,
    pub starts: Vec<StartRecord>,
}

/// Generator for start `index`: xoshiro256++ seeded through SplitMix64 with
/// `seed + index`.
pub fn start_rng(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_add(index))
}

/// Uniform double in `[0, 1)` from the top 53 bits of one 64-bit draw.
pub fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn polish<F>(f: &F, start: &[f64], lower: &[f64], upper: &[f64], cfg: &MultistartConfig) -> (Vec<f64>, f64, usize, bool, u64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start.to_vec();
    let mut fx = sanitize(f(&x));
    let mut evals = 1u64;
    let mut steps: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| (u - l) / 4.0).collect();
    let width = lower.iter().zip(upper).map(|(l, u)| u - l).fold(1.0f64, f64::max);
    let tol = cfg.step_tolerance * width;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        if steps.iter().all(|&s| s <= tol) {
            return (x, fx, iterations, true, evals);
        }
        iterations += 1;
        let mut improved = false;
        for a in 0..x.len() {
            for dir in [1.0, -1.0] {
                let cand = (x[a] + dir * steps[a]).clamp(lower[a], upper[a]);
                if cand == x[a] {
                    continue;
                }
                let old = x[a];
                x[a] = cand;
                let fc = sanitize(f(&x));
                evals += 1;
                if fc < fx {
                    fx = fc;
                    improved = true;
                    break;
                }
                x[a] = old;
            }
        }
        if !improved {
            steps.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    let converged = steps.iter().all(|&s| s <= tol);
    (x, fx, iterations, converged, evals)
}

/// Minimizes `f` over the box `[lower, upper]`.
///
/// Deterministic for a given `cfg.seed`. The returned value is never above
/// the best corner evaluation. Ties between starts go to the lowest index,
/// corners first.
pub fn minimize_nonconvex<F>(f: F, lower: &[f64], upper: &[f64], cfg: &MultistartConfig) -> Result<MultistartResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Error::check_dim(lower.len(), upper.len())?;
    if lower.is_empty() {
        return Err(Error::input("empty search box"));
    }
    if cfg.starts == 0 {
        return Err(Error::input("multistart needs at least one start"));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
        return Err(Error::input("search box bounds must be finite and ordered"));
    }
    let k = lower.len();

    let mut candidates: Vec<(StartKind, Vec<f64>)> = Vec::new();
    if k <= MAX_CORNER_DIMS {
        for mask in 0u64..(1u64 << k) {
            let c = (0..k).map(|a| if mask >> (k - 1 - a) & 1 == 1 { upper[a] } else { lower[a] }).collect();
            candidates.push((StartKind::Corner, c));
        }
    }
    let corner_values: Vec<f64> = candidates.par_iter().map(|(_, c)| sanitize(f(c))).collect();
    let mut evaluations = corner_values.len() as u64;
    let best_corner = corner_values
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, &v)| match acc {
            Some((_, b)) if b <= v => acc,
            _ => Some((i, v)),
        });
    let best_corner_value = best_corner.map_or(f64::INFINITY, |(_, v)| v);

    // Only the best corner is polished; the rest are plain evaluations.
    let mut starts: Vec<(StartKind, Vec<f64>)> = Vec::new();
    if let Some((i, _)) = best_corner {
        starts.push(candidates[i].clone());
    }
    for s in 0..cfg.starts {
        let mut rng = start_rng(cfg.seed, s as u64);
        let p = lower.iter().zip(upper).map(|(l, u)| l + (u - l) * unit_f64(&mut rng)).collect();
        starts.push((StartKind::Uniform, p));
    }

    let polished: Vec<(StartRecord, u64)> = starts
        .par_iter()
        .map(|(kind, s)| {
            let (point, value, iterations, converged, evals) = polish(&f, s, lower, upper, cfg);
            (StartRecord { kind: *kind, start: s.clone(), point, value, iterations, converged }, evals)
        })
        .collect();

    let mut best_value = f64::INFINITY;
    let mut best_point = starts[0].1.clone();
    let mut records = Vec::with_capacity(polished.len());
    for (rec, evals) in polished {
        evaluations += evals;
        if rec.value < best_value {
            best_value = rec.value;
            best_point = rec.point.clone();
        }
        records.push(rec);
    }
    if best_corner_value < best_value {
        // Polishing the best corner can only descend, so this is unreachable
        // unless f is not a function of its input.
        return Err(Error::Internal("multistart result above best corner".into()));
    }
    Ok(MultistartResult { best_value, best_point, best_corner_value, evaluations, starts: records })
}
