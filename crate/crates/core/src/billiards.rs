//! Rational billiards: unfolding, cylinder counts and the Cesàro average of
//! the normalized counting function.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flat::{cylinders_capped, DEFAULT_DEVELOPMENT_CAP};
use crate::numeric::{gcd, Vec2};
use crate::surface::{Polygon, Side, TranslationSurface};

pub const DEFAULT_GROUP_CAP: usize = 100_000;

/// The angle `p/q · π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub p: u32,
    pub q: u32,
}

impl Fraction {
    pub fn new(p: u32, q: u32) -> Self {
        Fraction { p, q }
    }

    fn reduced(self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::Invalid(format!("angle fraction {}/{} must be positive", self.p, self.q)));
        }
        let g = gcd(self.p as i64, self.q as i64) as u32;
        Ok(Fraction { p: self.p / g, q: self.q / g })
    }

    pub fn radians(self) -> f64 {
        self.p as f64 * PI / self.q as f64
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// A billiard table whose angles are rational multiples of π.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPolygon {
    vertices: Vec<Vec2>,
    angles: Vec<Fraction>,
}

impl RationalPolygon {
    /// Checks orientation, simplicity of the angle data and that each stated
    /// angle matches the vertex geometry within 1e-9.
    pub fn new(vertices: Vec<Vec2>, angles: Vec<Fraction>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::Invalid("a polygon needs at least 3 vertices".into()));
        }
        if angles.len() != m {
            return Err(Error::Invalid(format!("{} vertices but {} angles", m, angles.len())));
        }
        let angles = angles.into_iter().map(Fraction::reduced).collect::<Result<Vec<_>>>()?;
        let poly = Polygon::new("q", vertices.clone());
        if poly.signed_area() <= 0.0 {
            return Err(Error::Invalid("polygon vertices must be counterclockwise".into()));
        }
        for (i, f) in angles.iter().enumerate() {
            let residual = (poly.corner_angle(i) - f.radians()).abs();
            if residual > 1e-9 {
                return Err(Error::Invalid(format!(
                    "angle {} at vertex {} does not match the geometry (residual {:e}); not a rational polygon",
                    f, i, residual
                )));
            }
        }
        Ok(RationalPolygon { vertices, angles })
    }

    /// Right triangle with legs along the axes: angle π/2 at the origin, angle
    /// `beta` at (1, 0).
    pub fn right_triangle(beta: Fraction) -> Result<Self> {
        let beta = beta.reduced()?;
        let b = beta.radians();
        let third = Fraction::new(beta.q - 2 * beta.p, 2 * beta.q).reduced()?;
        RationalPolygon::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, b.tan())],
            vec![Fraction::new(1, 2), beta, third],
        )
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn angle_fractions(&self) -> &[Fraction] {
        &self.angles
    }

    /// Least common multiple of the angle denominators.
    pub fn denominator_lcm(&self) -> u64 {
        self.angles.iter().fold(1u64, |acc, f| {
            let q = f.q as u64;
            acc / gcd(acc as i64, q as i64) as u64 * q
        })
    }

    pub fn area(&self) -> f64 {
        Polygon::new("q", self.vertices.clone()).signed_area()
    }
}

/// Element `rot(2πk/N) ∘ ρ^s` of the dihedral group, with ρ the reflection in
/// the direction of edge 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Dihedral {
    k: u64,
    s: bool,
}

impl Dihedral {
    fn compose(self, other: Dihedral, n: u64) -> Dihedral {
        let k = if self.s { (self.k + n - other.k) % n } else { (self.k + other.k) % n };
        Dihedral { k, s: self.s ^ other.s }
    }
}

/// The reflection group of `q` (one element per copy, in BFS order from the identity).
fn reflection_group(q: &RationalPolygon, cap: usize) -> Result<(u64, Vec<Dihedral>, Vec<Dihedral>)> {
    let n = q.denominator_lcm();
    let m = q.vertices.len();
    // Edge e has direction φ0 + m_e π / N.
    let mut reflections = Vec::with_capacity(m);
    let mut turn = 0u64;
    for e in 0..m {
        if e > 0 {
            let a = q.angles[e];
            turn = (turn + n - n * a.p as u64 / a.q as u64 % n) % n;
        }
        reflections.push(Dihedral { k: turn % n, s: true });
    }
    let id = Dihedral { k: 0, s: false };
    let mut elems = vec![id];
    let mut index: HashMap<Dihedral, usize> = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for &r in &reflections {
            let h = g.compose(r, n);
            if let Entry::Vacant(slot) = index.entry(h) {
                if elems.len() >= cap {
                    return Err(Error::CapExceeded { what: "reflection group order", cap });
                }
                slot.insert(elems.len());
                elems.push(h);
                queue.push_back(h);
            }
        }
    }
    Ok((n, elems, reflections))
}

fn matrix(g: Dihedral, n: u64, phi0: f64) -> [[f64; 2]; 2] {
    let a = 2.0 * PI * g.k as f64 / n as f64;
    let (sa, ca) = a.sin_cos();
    if !g.s {
        return [[ca, -sa], [sa, ca]];
    }
    let (s2, c2) = (2.0 * phi0).sin_cos();
    let r = [[c2, s2], [s2, -c2]];
    [
        [ca * r[0][0] - sa * r[1][0], ca * r[0][1] - sa * r[1][1]],
        [sa * r[0][0] + ca * r[1][0], sa * r[0][1] + ca * r[1][1]],
    ]
}

/// Order of the reflection group generated by the sides of `q`.
pub fn group_order(q: &RationalPolygon) -> Result<usize> {
    Ok(reflection_group(q, DEFAULT_GROUP_CAP)?.1.len())
}

pub fn unfold(q: &RationalPolygon) -> Result<TranslationSurface> {
    unfold_capped(q, DEFAULT_GROUP_CAP)
}

/// Glue one copy of `q` per element of its reflection group: copy `g`'s side
/// `e` is glued to copy `g∘r_e`'s side `e`.
pub fn unfold_capped(q: &RationalPolygon, cap: usize) -> Result<TranslationSurface> {
    let (n, elems, reflections) = reflection_group(q, cap)?;
    let m = q.vertices.len();
    let e0 = q.vertices[1] - q.vertices[0];
    let phi0 = e0.y.atan2(e0.x);
    let index: HashMap<Dihedral, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let copy_side = |g: Dihedral, e: usize| if g.s { m - 1 - e } else { e };
    let mut polygons = Vec::with_capacity(elems.len());
    for (i, &g) in elems.iter().enumerate() {
        let a = matrix(g, n, phi0);
        let image = |v: &Vec2| Vec2::new(a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y);
        let verts: Vec<Vec2> =
            if g.s { (0..m).map(|j| image(&q.vertices[(m - j) % m])).collect() } else { q.vertices.iter().map(image).collect() };
        polygons.push(Polygon::new(format!("c{}", i), verts));
    }
    let mut gluings = Vec::new();
    for (i, &g) in elems.iter().enumerate() {
        for (e, &r) in reflections.iter().enumerate() {
            let j = index[&g.compose(r, n)];
            if i < j {
                gluings.push((Side::new(i, copy_side(g, e)), Side::new(j, copy_side(elems[j], e))));
            }
        }
    }
    TranslationSurface::new(polygons, gluings, "unfolding")
}

/// N(Q, T): cylinders of waist at most `t` on the unfolding.
pub fn billiard_count(q: &RationalPolygon, t: f64) -> Result<usize> {
    Ok(cylinders_capped(&unfold(q)?, t, DEFAULT_DEVELOPMENT_CAP)?.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    RawCount,
    Cesaro,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountSeries {
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

/// Raw counts N(e^s) and the Cesàro averages (1/t)∫₀ᵗ N(e^s)e^{-2s} ds on the
/// uniform grid s_i = i·t_max/steps, i = 1..=steps.
pub fn count_series(s: &TranslationSurface, t_max: f64, steps: usize) -> Result<(CountSeries, CountSeries)> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Invalid(format!("t_max must be positive, got {t_max}")));
    }
    if steps < 10 {
        return Err(Error::Invalid(format!("steps must be at least 10, got {steps}")));
    }
    let cyls = cylinders_capped(s, t_max.exp(), DEFAULT_DEVELOPMENT_CAP)?;
    let waists: Vec<f64> = cyls.iter().map(|c| c.waist).collect();
    let count = |len: f64| waists.partition_point(|&w| w <= len * (1.0 + 1e-12));
    let h = t_max / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let raw: Vec<f64> = grid.iter().map(|&t| count(t.exp()) as f64).collect();
    let integrand: Vec<f64> = grid.iter().zip(&raw).map(|(&t, &n)| n * (-2.0 * t).exp()).collect();
    let mut integral = 0.0;
    let mut cesaro = Vec::with_capacity(steps);
    for i in 1..=steps {
        integral += 0.5 * h * (integrand[i - 1] + integrand[i]);
        cesaro.push((grid[i], integral / grid[i]));
    }
    let raw = CountSeries { kind: SeriesKind::RawCount, points: grid[1..].iter().copied().zip(raw[1..].iter().copied()).collect() };
    Ok((raw, CountSeries { kind: SeriesKind::Cesaro, points: cesaro }))
}

/// Cesàro series of a surface (the "billiard" is the surface itself).
pub fn cesaro_sv_surface(s: &TranslationSurface, t_max: f64, steps: usize) -> Result<CountSeries> {
    Ok(count_series(s, t_max, steps)?.1)
}

pub fn cesaro_sv(q: &RationalPolygon, t_max: f64, steps: usize) -> Result<CountSeries> {
    cesaro_sv_surface(&unfold(q)?, t_max, steps)
}
