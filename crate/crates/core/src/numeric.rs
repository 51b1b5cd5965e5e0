//! Small numeric helpers shared across modules.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise angle from `a` to `b`, in `[0, 2π)`.
pub fn ccw_angle(a: &Vec2, b: &Vec2) -> f64 {
    let ang = cross(a, b).atan2(a.dot(b));
    if ang < 0.0 {
        ang + std::f64::consts::TAU
    } else {
        ang
    }
}

/// Reduce an angle into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Lexicographically positive representative of `±v`.
pub fn lex_positive(v: Vec2) -> Vec2 {
    if v.x > 0.0 || (v.x == 0.0 && v.y > 0.0) {
        v
    } else {
        -v
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Weighted mean `Σ wᵢ fᵢ / Σ wᵢ`; returns exactly 1 when every `fᵢ` is 1.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let num = compensated_sum(values.iter().zip(weights).map(|(v, w)| v * w));
    let den = compensated_sum(weights.iter().copied());
    num / den
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}
