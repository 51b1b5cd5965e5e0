//! Haar sampling on the moduli space of unit-area flat tori, i.e. the modular
//! surface SL(2,Z)\H with the hyperbolic measure.

use rand::Rng;
use rayon::prelude::*;

use super::{u_from_systole, DriftConfig, Observable};
use crate::numeric::{compensated_sum, Vec2};
use crate::rng::stream;

const CHUNK: usize = 1024;
const Y_MIN: f64 = 0.866_025_403_784_438_6;

/// Lattice basis of the unit-area torus at `z = x + iy`.
pub fn torus_basis(x: f64, y: f64) -> (Vec2, Vec2) {
    let r = y.sqrt();
    (Vec2::new(1.0 / r, 0.0), Vec2::new(x / r, r))
}

/// Whether `z` lies in the standard fundamental domain `|x| ≤ ½, |z| ≥ 1`.
pub fn in_fundamental_domain(x: f64, y: f64) -> bool {
    x.abs() <= 0.5 && x * x + y * y >= 1.0
}

/// One Haar sample `(x, y)` by rejection from `dx dy / y²` on `[-½, ½] × [√3/2, ∞)`.
pub fn sample<R: Rng>(rng: &mut R) -> (f64, f64) {
    loop {
        let x = rng.gen::<f64>() - 0.5;
        let y = Y_MIN / (1.0 - rng.gen::<f64>());
        if in_fundamental_domain(x, y) {
            return (x, y);
        }
    }
}

/// Systole of the torus at a point of the fundamental domain.
pub fn systole_at(y: f64) -> f64 {
    y.powf(-0.5)
}

fn chunked<F>(samples: usize, seed: u64, per_chunk: F) -> Vec<(f64, f64)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> (f64, f64) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            per_chunk(&mut rng, n)
        })
        .collect()
}

/// Monte Carlo Haar average of a systole observable.
pub fn haar_average(obs: &Observable, samples: usize, seed: u64) -> f64 {
    let parts = chunked(samples, seed, |rng, n| {
        let vals: Vec<f64> = (0..n).map(|_| obs.eval_systole(systole_at(sample(rng).1))).collect();
        (compensated_sum(vals), n as f64)
    });
    compensated_sum(parts.iter().map(|p| p.0)) / compensated_sum(parts.iter().map(|p| p.1))
}

/// Pareto shape of the cusp proposal used for u.
pub const U_PROPOSAL_SHAPE: f64 = 0.25;

/// Haar average of u by importance sampling: `y` is drawn from the Pareto
/// density ∝ `y^{-1-α}` on `[√3/2, ∞)`, `x` uniformly, points outside the
/// fundamental domain get weight 0, and weights are `y^{-2}/y^{-1-α}`
/// (self-normalized).
pub fn haar_average_u(cfg: &DriftConfig, samples: usize, seed: u64) -> f64 {
    let alpha = U_PROPOSAL_SHAPE;
    let parts = chunked(samples, seed, |rng, n| {
        let mut num = Vec::with_capacity(n);
        let mut den = Vec::with_capacity(n);
        for _ in 0..n {
            let x = rng.gen::<f64>() - 0.5;
            let y = Y_MIN * (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha);
            if !in_fundamental_domain(x, y) {
                continue;
            }
            let w = y.powf(alpha - 1.0);
            num.push(w * u_from_systole(systole_at(y), cfg).u);
            den.push(w);
        }
        (compensated_sum(num), compensated_sum(den))
    });
    compensated_sum(parts.iter().map(|p| p.0)) / compensated_sum(parts.iter().map(|p| p.1))
}
