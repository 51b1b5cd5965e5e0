use std::f64::consts::TAU;

use rayon::prelude::*;

use super::averages::{circle_nodes, circle_values};
use super::{circle_average, DriftFn, Evaluator};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::sl2::{radial_part, GroupElement};

/// Outcome of one averaging-inequality experiment `A_t f(x) ≤ c f(x) + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftReport {
    pub t: f64,
    pub samples: usize,
    pub empirical_average: f64,
    pub input_value: f64,
    pub fitted_c: f64,
    pub fitted_b: f64,
    /// max over τ ∈ {0, ¼, ½, ¾, 1} of the two-sided ratio between f(a_τ x) and f(x).
    pub sigma_bound: f64,
    pub target_c: f64,
    pub target_b: f64,
    pub pass: bool,
}

pub fn drift_check(
    func: &DriftFn,
    ev: &Evaluator,
    base: &GroupElement,
    t: f64,
    nodes: usize,
    target_c: f64,
    target_b: f64,
) -> Result<DriftReport> {
    let input = func.eval(ev, base)?;
    if input.is_infinite() {
        return Err(Error::Infinite);
    }
    let avg = circle_average(func, ev, base, t, nodes)?;
    let mut sigma: f64 = 1.0;
    for tau in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let v = func.eval(ev, &(GroupElement::geodesic(tau) * *base))?;
        let r = v / input;
        sigma = sigma.max(r).max(1.0 / r);
    }
    Ok(DriftReport {
        t,
        samples: nodes,
        empirical_average: avg,
        input_value: input,
        fitted_c: avg / input,
        fitted_b: (avg - target_c * input).max(0.0),
        sigma_bound: sigma,
        target_c,
        target_b,
        pass: avg <= target_c * input + target_b,
    })
}

/// Re-check of the iterated bound `A_{nτ} f ≤ κⁿ f + σ′b₀/(1−κ)` at n = 2, 3,
/// for a chosen contraction `c0`; `b0` is the residual that makes
/// `A_τ f ≤ c₀ f + b₀` hold on the sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationReport {
    pub tau: f64,
    pub c0: f64,
    /// Largest residual `(A_τ f − c₀ f)⁺` at x and on the τ- and 2τ-circles around x.
    pub b0: f64,
    /// `max(1, A_{2τ}f / A_τA_τ f, A_{3τ}f / A_{2τ}A_τ f)`.
    pub sigma_prime: f64,
    pub kappa: f64,
    pub applicable: bool,
    pub bound: [f64; 2],
    pub measured: [f64; 2],
    pub pass: bool,
}

pub fn iteration_check(
    func: &DriftFn,
    ev: &Evaluator,
    base: &GroupElement,
    tau: f64,
    c0: f64,
    nodes: usize,
) -> Result<IterationReport> {
    if !(tau > 0.0 && c0 > 0.0) {
        return Err(Error::Invalid(format!("tau and c0 must be positive, got {tau}, {c0}")));
    }
    let fx = func.eval(ev, base)?;
    let a1 = circle_average(func, ev, base, tau, nodes)?;
    let a2 = circle_average(func, ev, base, 2.0 * tau, nodes)?;
    let a3 = circle_average(func, ev, base, 3.0 * tau, nodes)?;
    let mut b0 = (a1 - c0 * fx).max(0.0);
    let mut iterated = [0.0; 2];
    for (slot, scale) in [(0usize, 1.0), (1, 2.0)] {
        let at = GroupElement::geodesic(scale * tau);
        let inner: Vec<(f64, f64)> = circle_nodes(nodes)
            .par_iter()
            .map(|&th| {
                let y = at * GroupElement::rotation(th) * *base;
                let fy = func.eval(ev, &y)?;
                let ay = compensated_sum(circle_values(func, ev, &y, tau, nodes)?) / nodes as f64;
                Ok((fy, ay))
            })
            .collect::<Result<_>>()?;
        for &(fy, ay) in &inner {
            b0 = b0.max(ay - c0 * fy);
        }
        iterated[slot] = compensated_sum(inner.iter().map(|p| p.1)) / nodes as f64;
    }
    let sigma_prime = 1f64.max(a2 / iterated[0]).max(a3 / iterated[1]);
    let kappa = sigma_prime * c0;
    let applicable = kappa < 1.0 && [fx, a1, a2, a3, b0].iter().all(|v| v.is_finite());
    let tail = if applicable { sigma_prime * b0 / (1.0 - kappa) } else { f64::INFINITY };
    let bound = [kappa.powi(2) * fx + tail, kappa.powi(3) * fx + tail];
    let measured = [a2, a3];
    let pass = applicable && (0..2).all(|i| measured[i] <= bound[i] * (1.0 + 1e-9) + 1e-9);
    Ok(IterationReport { tau, c0, b0, sigma_prime, kappa, applicable, bound, measured, pass })
}

/// Fraction of directions θ whose occupation time of `{sys ≥ eps_k}` along
/// `a_τ r_θ x`, τ ∈ [0, t], is at most t/2.
pub fn recurrence_fraction(ev: &Evaluator, base: &GroupElement, t: f64, eps_k: f64, nodes: usize) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Invalid(format!("t must be positive, got {t}")));
    }
    let steps = (t / 0.05).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let occupied: Vec<bool> = circle_nodes(nodes)
        .par_iter()
        .map(|&th| {
            let r = GroupElement::rotation(th) * *base;
            let mut occ = 0.0;
            for i in 0..=steps {
                let w = if i == 0 || i == steps { 0.5 * h } else { h };
                if ev.systole(&(GroupElement::geodesic(i as f64 * h) * r))? >= eps_k {
                    occ += w;
                }
            }
            Ok(occ <= 0.5 * t)
        })
        .collect::<Result<_>>()?;
    Ok(occupied.iter().filter(|&&b| b).count() as f64 / nodes as f64)
}

/// Share of φ on an equispaced grid for which `t + s − d(a_t r_φ a_s o, o) ≤ δ_obs`,
/// where `δ_obs` is the largest gap among the better half of the grid.
pub fn hyperbolic_fraction(t: f64, s: f64, nodes: usize) -> Result<(f64, f64)> {
    if t < 0.0 || s < 0.0 || nodes == 0 {
        return Err(Error::Invalid("hyperbolic_fraction needs t, s >= 0 and nodes > 0".into()));
    }
    let (at, as_) = (GroupElement::geodesic(t), GroupElement::geodesic(s));
    let mut gaps: Vec<f64> = (0..nodes)
        .map(|j| {
            let phi = TAU * j as f64 / nodes as f64;
            let d = radial_part(&(at * GroupElement::rotation(phi) * as_));
            let gap = t + s - d;
            if gap <= 1e-12 * (1.0 + t + s) {
                0.0
            } else {
                gap
            }
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    let delta_obs = gaps[nodes.div_ceil(2) - 1];
    let count = gaps.iter().filter(|&&g| g <= delta_obs).count();
    Ok((count as f64 / nodes as f64, delta_obs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_zero_s() {
        let (f, d) = hyperbolic_fraction(2.0, 0.0, 64).unwrap();
        assert_eq!(f, 1.0);
        assert_eq!(d, 0.0);
    }
}
