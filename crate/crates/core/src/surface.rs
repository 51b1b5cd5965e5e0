//! Translation surfaces: polygons glued along parallel edges by translations.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{ccw_angle, cross, Vec2};

const EDGE_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-9;

/// Edge `edge` of polygon `polygon`; the edge runs from vertex `edge` to vertex `edge + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub polygon: usize,
    pub edge: usize,
}

impl Side {
    pub fn new(polygon: usize, edge: usize) -> Self {
        Side { polygon, edge }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    pub name: String,
    pub vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn new(name: impl Into<String>, vertices: Vec<Vec2>) -> Self {
        Polygon { name: name.into(), vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[(i + 1) % n] - self.vertices[i]
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            acc += cross(&self.vertices[i], &self.vertices[(i + 1) % n]);
        }
        0.5 * acc
    }

    /// Interior angle at vertex `i`, in `(0, 2π)` for a counterclockwise polygon.
    pub fn corner_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let out = self.vertices[(i + 1) % n] - self.vertices[i];
        let back = self.vertices[(i + n - 1) % n] - self.vertices[i];
        ccw_angle(&out, &back)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(&self.edge(i), &self.edge((i + 1) % n)) >= -1e-12 * self.edge(i).norm() * self.edge((i + 1) % n).norm())
    }

    pub(crate) fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = cross(&(b - a), &(c - a));
    let d2 = cross(&(b - a), &(d - a));
    let d3 = cross(&(d - c), &(a - c));
    let d4 = cross(&(d - c), &(b - c));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// A gluing slot: which gluing a side belongs to, and whether it is the first
/// (orientation-defining) side of that gluing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GluingSlot {
    pub gluing: usize,
    pub first: bool,
}

impl GluingSlot {
    pub fn sign(&self) -> i64 {
        if self.first {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug)]
pub struct TranslationSurface {
    polygons: Vec<Polygon>,
    gluings: Vec<(Side, Side)>,
    label: String,
    slots: Vec<Vec<Option<GluingSlot>>>,
}

impl PartialEq for TranslationSurface {
    fn eq(&self, other: &Self) -> bool {
        self.polygons == other.polygons && self.gluings == other.gluings && self.label == other.label
    }
}

impl TranslationSurface {
    /// Build a surface after structural checks (indices in range, each edge used at most once).
    pub fn new(polygons: Vec<Polygon>, gluings: Vec<(Side, Side)>, label: impl Into<String>) -> Result<Self> {
        let mut slots: Vec<Vec<Option<GluingSlot>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
        for (pi, p) in polygons.iter().enumerate() {
            if p.len() < 3 {
                return Err(Error::Invalid(format!("polygon {} has fewer than 3 vertices", pi)));
            }
        }
        for (g, &(a, b)) in gluings.iter().enumerate() {
            for (side, first) in [(a, true), (b, false)] {
                let slot = slots
                    .get_mut(side.polygon)
                    .and_then(|v| v.get_mut(side.edge))
                    .ok_or_else(|| Error::DanglingEdge(format!("polygon {} edge {}", side.polygon, side.edge)))?;
                if slot.is_some() {
                    return Err(Error::EdgeReused(describe(&polygons, side)));
                }
                *slot = Some(GluingSlot { gluing: g, first });
            }
        }
        Ok(TranslationSurface { polygons, gluings, label: label.into(), slots })
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn gluings(&self) -> &[(Side, Side)] {
        &self.gluings
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn slot(&self, side: Side) -> Option<GluingSlot> {
        self.slots[side.polygon][side.edge]
    }

    pub fn partner(&self, side: Side) -> Option<Side> {
        self.slot(side).map(|s| {
            let (a, b) = self.gluings[s.gluing];
            if s.first {
                b
            } else {
                a
            }
        })
    }

    pub fn side_vector(&self, side: Side) -> Vec2 {
        self.polygons[side.polygon].edge(side.edge)
    }

    /// Holonomy of gluing `g`, oriented along its first side.
    pub fn gluing_vector(&self, g: usize) -> Vec2 {
        self.side_vector(self.gluings[g].0)
    }

    pub fn sides(&self) -> impl Iterator<Item = Side> + '_ {
        self.polygons.iter().enumerate().flat_map(|(p, poly)| (0..poly.len()).map(move |e| Side::new(p, e)))
    }

    pub fn side_count(&self) -> usize {
        self.polygons.iter().map(|p| p.len()).sum()
    }

    /// Apply `f` to every vertex, keeping the combinatorics.
    pub fn map_vertices(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        let polygons = self
            .polygons
            .iter()
            .map(|p| Polygon::new(p.name.clone(), p.vertices.iter().map(|&v| f(v)).collect()))
            .collect();
        TranslationSurface { polygons, gluings: self.gluings.clone(), label: self.label.clone(), slots: self.slots.clone() }
    }

    /// Replace polygon coordinates, keeping the gluing table.
    pub fn with_polygons(&self, polygons: Vec<Polygon>) -> Self {
        assert_eq!(polygons.len(), self.polygons.len());
        TranslationSurface { polygons, gluings: self.gluings.clone(), label: self.label.clone(), slots: self.slots.clone() }
    }

    /// Vertex equivalence classes, built combinatorially from the gluing table.
    pub fn vertex_classes(&self) -> VertexClasses {
        let offsets: Vec<usize> = self
            .polygons
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total = self.side_count();
        let mut uf = UnionFind::new(total);
        for &(a, b) in &self.gluings {
            let na = self.polygons[a.polygon].len();
            let nb = self.polygons[b.polygon].len();
            uf.union(offsets[a.polygon] + a.edge, offsets[b.polygon] + (b.edge + 1) % nb);
            uf.union(offsets[a.polygon] + (a.edge + 1) % na, offsets[b.polygon] + b.edge);
        }
        let mut id_of_root = vec![usize::MAX; total];
        let mut class_of = Vec::with_capacity(self.polygons.len());
        let mut count = 0;
        for (p, poly) in self.polygons.iter().enumerate() {
            let mut row = Vec::with_capacity(poly.len());
            for i in 0..poly.len() {
                let r = uf.find(offsets[p] + i);
                if id_of_root[r] == usize::MAX {
                    id_of_root[r] = count;
                    count += 1;
                }
                row.push(id_of_root[r]);
            }
            class_of.push(row);
        }
        let mut angle = vec![0.0; count];
        let mut corners = vec![Vec::new(); count];
        for (p, poly) in self.polygons.iter().enumerate() {
            for i in 0..poly.len() {
                angle[class_of[p][i]] += poly.corner_angle(i);
                corners[class_of[p][i]].push((p, i));
            }
        }
        VertexClasses { class_of, angle, corners }
    }

    /// The corner following `(p, i)` counterclockwise around its vertex, if the
    /// incoming edge is glued.
    pub fn next_corner_ccw(&self, p: usize, i: usize) -> Option<(usize, usize)> {
        let n = self.polygons[p].len();
        self.partner(Side::new(p, (i + n - 1) % n)).map(|s| (s.polygon, s.edge))
    }
}

fn describe(polygons: &[Polygon], side: Side) -> String {
    match polygons.get(side.polygon) {
        Some(p) => format!("{}.e{}", p.name, side.edge),
        None => format!("polygon {} edge {}", side.polygon, side.edge),
    }
}

#[derive(Clone, Debug)]
pub struct VertexClasses {
    /// `class_of[p][i]` is the class of vertex `i` of polygon `p`.
    pub class_of: Vec<Vec<usize>>,
    /// Total cone angle of each class, in radians.
    pub angle: Vec<f64>,
    /// Corners `(polygon, vertex)` belonging to each class.
    pub corners: Vec<Vec<(usize, usize)>>,
}

impl VertexClasses {
    pub fn count(&self) -> usize {
        self.angle.len()
    }

    /// Cone angle divided by 2π.
    pub fn multiple(&self, class: usize) -> f64 {
        self.angle[class] / TAU
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonSimplePolygon { polygon: usize },
    Clockwise { polygon: usize },
    DegenerateEdge { side: Side },
    UngluedEdge { side: Side },
    NonTranslationGluing { a: Side, b: Side, mismatch: f64 },
    ConeAngle { class: usize, multiple: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonSimplePolygon { polygon } => write!(f, "non-simple polygon {}", polygon),
            Violation::Clockwise { polygon } => write!(f, "polygon {} is not counterclockwise", polygon),
            Violation::DegenerateEdge { side } => write!(f, "degenerate edge {}.e{}", side.polygon, side.edge),
            Violation::UngluedEdge { side } => write!(f, "unglued edge {}.e{}", side.polygon, side.edge),
            Violation::NonTranslationGluing { a, b, mismatch } => write!(
                f,
                "non-translation gluing {}.e{} ~ {}.e{} (mismatch {:.3e})",
                a.polygon, a.edge, b.polygon, b.edge, mismatch
            ),
            Violation::ConeAngle { class, multiple } => {
                write!(f, "cone angle of vertex class {} is {:.12} x 2pi", class, multiple)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Cone angle of each vertex class as a multiple of 2π.
    pub cone_angles: Vec<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.violations.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::Invalid(msgs.join("; ")))
        }
    }
}

pub fn validate_surface(s: &TranslationSurface) -> ValidationReport {
    let mut violations = Vec::new();
    for (p, poly) in s.polygons().iter().enumerate() {
        if !poly.is_simple() {
            violations.push(Violation::NonSimplePolygon { polygon: p });
        } else if poly.signed_area() <= 0.0 {
            violations.push(Violation::Clockwise { polygon: p });
        }
        for e in 0..poly.len() {
            if poly.edge(e).norm() <= EDGE_TOL {
                violations.push(Violation::DegenerateEdge { side: Side::new(p, e) });
            }
        }
    }
    let mut all_glued = true;
    for side in s.sides() {
        if s.slot(side).is_none() {
            all_glued = false;
            violations.push(Violation::UngluedEdge { side });
        }
    }
    for &(a, b) in s.gluings() {
        let mismatch = (s.side_vector(a) + s.side_vector(b)).norm();
        if mismatch > EDGE_TOL {
            violations.push(Violation::NonTranslationGluing { a, b, mismatch });
        }
    }
    let classes = s.vertex_classes();
    let cone_angles: Vec<f64> = (0..classes.count()).map(|c| classes.multiple(c)).collect();
    if all_glued {
        for (class, &m) in cone_angles.iter().enumerate() {
            if m < 0.5 || (m - m.round()).abs() * TAU > ANGLE_TOL * (1.0 + m) {
                violations.push(Violation::ConeAngle { class, multiple: m });
            }
        }
    }
    ValidationReport { violations, cone_angles }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Zero orders in nonincreasing order (cone angle 2π(a+1), a ≥ 1).
    pub alpha: Vec<u32>,
    pub genus: u32,
    pub zero_count: usize,
    /// Vertex classes of cone angle 2π.
    pub marked_points: usize,
}

impl Stratum {
    /// Number of vertex classes (zeros plus marked points).
    pub fn vertex_count(&self) -> usize {
        self.zero_count + self.marked_points
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.alpha.iter().map(|a| a.to_string()).collect();
        parts.extend(std::iter::repeat_n("0".to_string(), self.marked_points));
        write!(f, "H({})", parts.join(","))
    }
}

pub fn stratum_of(s: &TranslationSurface) -> Result<Stratum> {
    let classes = s.vertex_classes();
    let v = classes.count() as i64;
    let e = s.gluings().len() as i64;
    let f = s.polygons().len() as i64;
    let chi = v - e + f;
    if chi > 2 || chi % 2 != 0 {
        return Err(Error::Inconsistent(format!("Euler characteristic {} is not 2 - 2g", chi)));
    }
    let genus = ((2 - chi) / 2) as u32;
    let mut alpha = Vec::new();
    let mut marked = 0;
    for c in 0..classes.count() {
        let m = classes.multiple(c);
        let r = m.round();
        if r < 1.0 || (m - r).abs() * TAU > ANGLE_TOL * (1.0 + m) {
            return Err(Error::Inconsistent(format!("cone angle {} x 2pi is not a positive integer multiple", m)));
        }
        let a = r as u32 - 1;
        if a == 0 {
            marked += 1;
        } else {
            alpha.push(a);
        }
    }
    alpha.sort_unstable_by(|a, b| b.cmp(a));
    let total: u32 = alpha.iter().sum();
    if total as i64 != 2 * genus as i64 - 2 && !(genus == 1 && total == 0) {
        return Err(Error::Inconsistent(format!("sum of zero orders {} differs from 2g-2 with g = {}", total, genus)));
    }
    Ok(Stratum { zero_count: alpha.len(), alpha, genus, marked_points: marked })
}

pub fn area(s: &TranslationSurface) -> f64 {
    crate::numeric::compensated_sum(s.polygons().iter().map(|p| p.signed_area()))
}

pub fn normalize_area(s: &TranslationSurface) -> TranslationSurface {
    let scale = area(s).powf(-0.5);
    s.map_vertices(|v| v * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_torus() -> TranslationSurface {
        let sq = Polygon::new("sq", vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]);
        TranslationSurface::new(vec![sq], vec![(Side::new(0, 0), Side::new(0, 2)), (Side::new(0, 1), Side::new(0, 3))], "torus")
            .unwrap()
    }

    #[test]
    fn torus_is_valid_with_one_class() {
        let t = square_torus();
        let r = validate_surface(&t);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(r.cone_angles.len(), 1);
        assert!((r.cone_angles[0] - 1.0).abs() < 1e-12);
        let st = stratum_of(&t).unwrap();
        assert_eq!(st.genus, 1);
        assert!(st.alpha.is_empty());
        assert_eq!(st.marked_points, 1);
        assert_eq!(st.to_string(), "H(0)");
    }

    #[test]
    fn edge_reuse_rejected() {
        let sq = Polygon::new("sq", vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]);
        let err = TranslationSurface::new(vec![sq], vec![(Side::new(0, 0), Side::new(0, 2)), (Side::new(0, 0), Side::new(0, 3))], "x")
            .unwrap_err();
        assert!(err.to_string().contains("edge reused"));
    }

    #[test]
    fn rotated_gluing_is_flagged() {
        let sq = Polygon::new("sq", vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]);
        let s = TranslationSurface::new(vec![sq], vec![(Side::new(0, 0), Side::new(0, 1)), (Side::new(0, 2), Side::new(0, 3))], "x")
            .unwrap();
        let r = validate_surface(&s);
        assert!(r.violations.iter().any(|v| v.to_string().starts_with("non-translation gluing")));
    }

    #[test]
    fn normalize_idempotent() {
        let t = square_torus();
        let n = normalize_area(&t);
        for (a, b) in t.polygons()[0].vertices.iter().zip(&n.polygons()[0].vertices) {
            assert!((a - b).norm() <= 1e-15);
        }
        let big = t.map_vertices(|v| v * 2.0);
        assert!((area(&normalize_area(&big)) - 1.0).abs() < 1e-12);
    }
}
