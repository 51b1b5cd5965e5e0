//! SL(2,R): generators, KAK decomposition, the action on surfaces and the
//! integer cocycle bookkeeping for tori.

use std::f64::consts::TAU;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::homology::basis_tag;
use crate::numeric::{cross, Vec2};
use crate::surface::{area, stratum_of, Polygon, Side, TranslationSurface};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Geodesic flow `a_t = diag(e^t, e^{-t})`.
    A,
    /// Rotation `r_θ`.
    R,
    /// Horocycle `u_s = ((1, s), (0, 1))`.
    U,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a11: 1.0, a12: 0.0, a21: 0.0, a22: 1.0 };

    /// Checked constructor: the determinant must be 1 within 1e-12 (relative to the entries).
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Self> {
        let g = GroupElement { a11, a12, a21, a22 };
        let scale = 1.0 + a11.abs().max(a12.abs()).max(a21.abs()).max(a22.abs()).powi(2);
        if (g.det() - 1.0).abs() > 1e-12 * scale {
            return Err(Error::Invalid(format!("determinant {} is not 1", g.det())));
        }
        Ok(g)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn inverse(&self) -> Self {
        GroupElement { a11: self.a22, a12: -self.a12, a21: -self.a21, a22: self.a11 }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a21 * v.x + self.a22 * v.y)
    }

    pub fn geodesic(t: f64) -> Self {
        GroupElement { a11: t.exp(), a12: 0.0, a21: 0.0, a22: (-t).exp() }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GroupElement { a11: c, a12: -s, a21: s, a22: c }
    }

    pub fn horocycle(s: f64) -> Self {
        GroupElement { a11: 1.0, a12: s, a21: 0.0, a22: 1.0 }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a11 - other.a11)
            .abs()
            .max((self.a12 - other.a12).abs())
            .max((self.a21 - other.a21).abs())
            .max((self.a22 - other.a22).abs())
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let fro2 = self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22;
        let d = self.det();
        ((fro2 + (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt()) / 2.0).sqrt()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement {
            a11: self.a11 * o.a11 + self.a12 * o.a21,
            a12: self.a11 * o.a12 + self.a12 * o.a22,
            a21: self.a21 * o.a11 + self.a22 * o.a21,
            a22: self.a21 * o.a12 + self.a22 * o.a22,
        }
    }
}

pub fn generator(kind: GeneratorKind, param: f64) -> GroupElement {
    match kind {
        GeneratorKind::A => GroupElement::geodesic(param),
        GeneratorKind::R => GroupElement::rotation(param),
        GeneratorKind::U => GroupElement::horocycle(param),
    }
}

/// `g = r_{θ1} a_t r_{θ2}` with `t ≥ 0` and angles in `[0, 2π)`.
/// When `g` is a rotation, all of it goes into `θ1` and `θ2 = 0`.
pub fn kak(g: &GroupElement) -> (f64, f64, f64) {
    let e = 0.5 * (g.a11 + g.a22);
    let f = 0.5 * (g.a11 - g.a22);
    let gg = 0.5 * (g.a21 + g.a12);
    let h = 0.5 * (g.a21 - g.a12);
    let q = e.hypot(h);
    let r = f.hypot(gg);
    let sigma1 = q + r;
    let t = sigma1.ln().max(0.0);
    let norm = |x: f64| {
        let w = x.rem_euclid(TAU);
        if w >= TAU {
            0.0
        } else {
            w
        }
    };
    if r <= 1e-13 * q {
        return (norm(h.atan2(e)), 0.0, 0.0);
    }
    let a1 = gg.atan2(f);
    let a2 = h.atan2(e);
    let theta1 = 0.5 * (a2 + a1);
    let theta2 = 0.5 * (a2 - a1);
    (norm(theta1), t, norm(theta2))
}

/// Radial part `t` of the KAK decomposition, i.e. the hyperbolic distance
/// `d(g·o, o)` normalized so that `d(a_t·o, o) = t`.
pub fn radial_part(g: &GroupElement) -> f64 {
    g.operator_norm().ln().max(0.0)
}

pub fn act(g: &GroupElement, s: &TranslationSurface) -> TranslationSurface {
    s.map_vertices(|v| g.apply(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleKind {
    /// New period basis = old period basis × matrix (columns are periods).
    Torus([[i64; 2]; 2]),
    /// `relabel[i]` is the new label of square `i`.
    Origami(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleRecord {
    pub kind: CocycleKind,
    pub source: String,
    pub target: String,
}

impl CocycleRecord {
    pub fn torus_matrix(&self) -> Option<[[i64; 2]; 2]> {
        match &self.kind {
            CocycleKind::Torus(m) => Some(*m),
            CocycleKind::Origami(_) => None,
        }
    }

    /// Record of following `self` and then `next`.
    pub fn then(&self, next: &CocycleRecord) -> Result<CocycleRecord> {
        let kind = match (&self.kind, &next.kind) {
            (CocycleKind::Torus(a), CocycleKind::Torus(b)) => CocycleKind::Torus(mat_mul(a, b)),
            (CocycleKind::Origami(a), CocycleKind::Origami(b)) if a.len() == b.len() => {
                CocycleKind::Origami(a.iter().map(|&i| b[i]).collect())
            }
            _ => return Err(Error::Invalid("cannot compose records of different kinds".into())),
        };
        Ok(CocycleRecord { kind, source: self.source.clone(), target: next.target.clone() })
    }
}

pub fn mat_mul(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn torus_from_basis(v1: Vec2, v2: Vec2, label: impl Into<String>) -> TranslationSurface {
    let poly = Polygon::new("p", vec![Vec2::zeros(), v1, v1 + v2, v2]);
    TranslationSurface::new(vec![poly], vec![(Side::new(0, 0), Side::new(0, 2)), (Side::new(0, 1), Side::new(0, 3))], label)
        .expect("parallelogram gluings are structurally valid")
}

/// Gauss reduction of a positively oriented lattice basis. Returns the reduced
/// basis and the integer matrix `M` with `[w1 w2] = [v1 v2] M`.
pub fn gauss_reduce(v1: Vec2, v2: Vec2) -> Result<(Vec2, Vec2, [[i64; 2]; 2])> {
    let det = cross(&v1, &v2);
    let scale = v1.norm_squared() + v2.norm_squared();
    if det.abs() < 1e-12 || det.abs() < 1e-15 * scale {
        return Err(Error::Degenerate(format!("lattice area {} is too small", det)));
    }
    let (mut a, mut b) = (v1, v2);
    let mut m = [[1i64, 0], [0, 1]];
    let col_op = |m: &mut [[i64; 2]; 2], f: &dyn Fn([i64; 2], [i64; 2]) -> ([i64; 2], [i64; 2])| {
        let (c0, c1) = f([m[0][0], m[1][0]], [m[0][1], m[1][1]]);
        *m = [[c0[0], c1[0]], [c0[1], c1[1]]];
    };
    let mut guard = 0;
    loop {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Degenerate("lattice reduction did not converge".into()));
        }
        if b.norm_squared() < a.norm_squared() * (1.0 - 1e-12) {
            // (a, b) -> (b, -a) keeps the orientation.
            (a, b) = (b, -a);
            col_op(&mut m, &|c0, c1| (c1, [-c0[0], -c0[1]]));
        }
        let mu = a.dot(&b) / a.norm_squared();
        let k = mu.round();
        if k != 0.0 && (mu.abs() > 0.5 + 1e-12) {
            b -= a * k;
            let ki = k as i64;
            col_op(&mut m, &|c0, c1| (c0, [c1[0] - ki * c0[0], c1[1] - ki * c0[1]]));
            continue;
        }
        if b.norm_squared() < a.norm_squared() * (1.0 - 1e-12) {
            continue;
        }
        break;
    }
    let lex_pos = a.x > 0.0 || (a.x == 0.0 && a.y > 0.0);
    if !lex_pos {
        a = -a;
        b = -b;
        col_op(&mut m, &|c0, c1| ([-c0[0], -c0[1]], [-c1[0], -c1[1]]));
    }
    if cross(&a, &b) < 0.0 {
        b = -b;
        col_op(&mut m, &|c0, c1| (c0, [-c1[0], -c1[1]]));
    }
    Ok((a, b, m))
}

/// Reduce a genus-1 surface with one vertex class to its Gauss-reduced
/// parallelogram. The record maps the old period basis to the new one.
pub fn torus_reduce(s: &TranslationSurface) -> Result<(TranslationSurface, CocycleRecord)> {
    let st = stratum_of(s)?;
    if st.genus != 1 {
        return Err(Error::Invalid(format!("torus_reduce needs genus 1, got genus {}", st.genus)));
    }
    if st.marked_points != 1 {
        return Err(Error::Unsupported("torus_reduce requires a single vertex class".into()));
    }
    if area(s) < 1e-12 {
        return Err(Error::Degenerate("area below 1e-12".into()));
    }
    let p = crate::homology::periods(s)?;
    let (w1, w2, m) = gauss_reduce(p.column(0), p.column(1))?;
    let reduced = torus_from_basis(w1, w2, s.label().to_string());
    let record = CocycleRecord { kind: CocycleKind::Torus(m), source: basis_tag(s), target: basis_tag(&reduced) };
    Ok((reduced, record))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_example() {
        let g = generator(GeneratorKind::U, 1.0) * generator(GeneratorKind::A, 2f64.ln());
        let want = GroupElement { a11: 2.0, a12: 0.5, a21: 0.0, a22: 0.5 };
        assert!(g.max_abs_diff(&want) < 1e-15);
        let r = generator(GeneratorKind::R, std::f64::consts::FRAC_PI_2);
        assert!(r.max_abs_diff(&GroupElement { a11: 0.0, a12: -1.0, a21: 1.0, a22: 0.0 }) < 1e-15);
    }

    #[test]
    fn kak_examples() {
        assert_eq!(kak(&GroupElement::IDENTITY), (0.0, 0.0, 0.0));
        let (t1, t, t2) = kak(&GroupElement::geodesic(3.0));
        assert!(t1.abs() < 1e-12 && (t - 3.0).abs() < 1e-12 && t2.abs() < 1e-12);
        let (_, t, _) = kak(&GroupElement::horocycle(1.0));
        assert!((t.exp() - ((3.0 + 5f64.sqrt()) / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reduction_of_sheared_lattice() {
        let (a, b, m) = gauss_reduce(Vec2::new(1.0, 0.0), Vec2::new(5.0, 1.0)).unwrap();
        assert_eq!(a, Vec2::new(1.0, 0.0));
        assert!((b - Vec2::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(m, [[1, -5], [0, 1]]);
    }
}
