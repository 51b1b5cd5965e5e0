use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use super::{DriftFn, Evaluator};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, weighted_mean};
use crate::rng::stream;
use crate::sl2::GroupElement;

/// Equispaced nodes `2π(j + ½)/n` on the circle.
pub fn circle_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * (j as f64 + 0.5) / n as f64).collect()
}

/// Mean with infinity short-circuit.
fn finite_mean(values: &[f64]) -> f64 {
    if values.iter().any(|v| v.is_infinite()) {
        return f64::INFINITY;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

pub(crate) fn circle_values(func: &DriftFn, ev: &Evaluator, base: &GroupElement, t: f64, nodes: usize) -> Result<Vec<f64>> {
    let at = GroupElement::geodesic(t);
    circle_nodes(nodes)
        .par_iter()
        .map(|&th| func.eval(ev, &(at * GroupElement::rotation(th) * *base)))
        .collect()
}

/// `(A_t f)(x) = (1/2π)∫ f(a_t r_θ x) dθ` at `x = base·s`, by the
/// equispaced trapezoid rule.
pub fn circle_average(func: &DriftFn, ev: &Evaluator, base: &GroupElement, t: f64, nodes: usize) -> Result<f64> {
    if nodes < 16 {
        return Err(Error::Invalid(format!("at least 16 nodes are required, got {nodes}")));
    }
    Ok(finite_mean(&circle_values(func, ev, base, t, nodes)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    /// Time average over [0, t] of sector averages over `[lo, hi]`.
    Sector { t: f64, lo: f64, hi: f64 },
    /// Time average over [0, t] of horocycle averages over `[0, r]`.
    Folner { t: f64, r: f64 },
    /// Mean over k = 1..n of the k-fold convolution powers of μ.
    RandomWalk { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeOptions {
    pub angle_nodes: usize,
    pub time_nodes: usize,
    pub horocycle_nodes: usize,
    pub walk_paths: usize,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions { angle_nodes: 256, time_nodes: 301, horocycle_nodes: 256, walk_paths: 2048 }
    }
}

fn trapezoid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / (n - 1) as f64;
    let nodes = (0..n).map(|i| lo + h * i as f64).collect();
    let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    (nodes, weights)
}

fn tensor_average(
    func: &DriftFn,
    ev: &Evaluator,
    times: &(Vec<f64>, Vec<f64>),
    inner: &(Vec<f64>, Vec<f64>),
    element: impl Fn(f64, f64) -> GroupElement + Sync,
) -> Result<f64> {
    let pairs: Vec<(usize, usize)> =
        (0..times.0.len()).flat_map(|i| (0..inner.0.len()).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| func.eval(ev, &element(times.0[i], inner.0[j])))
        .collect::<Result<_>>()?;
    if values.iter().any(|v| v.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    let weights: Vec<f64> = pairs.iter().map(|&(i, j)| times.1[i] * inner.1[j]).collect();
    Ok(weighted_mean(&values, &weights))
}

fn check_count(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Invalid(format!("{name} must be at least {min}, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Average of `func` over the scheme's probability measure on SL(2,R),
/// applied at the evaluator's base surface. Deterministic given `seed`.
pub fn scheme_average(scheme: Scheme, func: &DriftFn, ev: &Evaluator, seed: u64, opts: &SchemeOptions) -> Result<f64> {
    match scheme {
        Scheme::Sector { t, lo, hi } => {
            check_positive("t", t)?;
            check_positive("sector length", hi - lo)?;
            check_count("time nodes", opts.time_nodes, 2)?;
            check_count("angle nodes", opts.angle_nodes, 2)?;
            let times = trapezoid(0.0, t, opts.time_nodes);
            let angles = if hi - lo >= TAU - 1e-12 {
                let n = opts.angle_nodes;
                (circle_nodes(n).into_iter().map(|th| th + lo).collect(), vec![1.0; n])
            } else {
                trapezoid(lo, hi, opts.angle_nodes)
            };
            tensor_average(func, ev, &times, &angles, |tau, th| GroupElement::geodesic(tau) * GroupElement::rotation(th))
        }
        Scheme::Folner { t, r } => {
            check_positive("t", t)?;
            check_positive("r", r)?;
            check_count("time nodes", opts.time_nodes, 2)?;
            check_count("horocycle nodes", opts.horocycle_nodes, 1)?;
            let times = trapezoid(0.0, t, opts.time_nodes);
            // Rectangle rule on a grid shifted by a seeded offset.
            let shift: f64 = stream(seed, 0).gen();
            let n = opts.horocycle_nodes;
            let horo = ((0..n).map(|j| r * (j as f64 + shift) / n as f64).collect(), vec![1.0; n]);
            tensor_average(func, ev, &times, &horo, |tau, s| GroupElement::geodesic(tau) * GroupElement::horocycle(s))
        }
        Scheme::RandomWalk { n } => {
            check_count("walk length", n, 1)?;
            check_count("walk paths", opts.walk_paths, 1)?;
            let path_means: Vec<f64> = (0..opts.walk_paths as u64)
                .into_par_iter()
                .map(|p| {
                    let mut rng = stream(seed, p);
                    let mut g = GroupElement::IDENTITY;
                    let mut values = Vec::with_capacity(n);
                    for _ in 0..n {
                        let th1 = rng.gen::<f64>() * TAU;
                        let tau = rng.gen::<f64>();
                        let th2 = rng.gen::<f64>() * TAU;
                        let h = GroupElement::rotation(th1) * GroupElement::geodesic(tau) * GroupElement::rotation(th2);
                        g = h * g;
                        values.push(func.eval(ev, &g)?);
                    }
                    Ok(finite_mean(&values))
                })
                .collect::<Result<_>>()?;
            Ok(finite_mean(&path_means))
        }
    }
}
