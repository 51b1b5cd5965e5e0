//! Convex cell structure used by the geometric algorithms: every polygon is
//! convex, each side knows its neighbor and the translation into it, and each
//! corner knows its angular position inside the cone of its vertex.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numeric::{ccw_angle, cross, wrap, Vec2};
use crate::surface::{Polygon, Side, TranslationSurface, UnionFind};

#[derive(Clone, Debug)]
pub(crate) struct FlatStructure {
    pub polys: Vec<Vec<Vec2>>,
    /// `(polygon, side)` across each side.
    pub neighbor: Vec<Vec<(usize, usize)>>,
    /// Add to local coordinates of a point on side `j` of `p` to get coordinates in the neighbor.
    pub shift: Vec<Vec<Vec2>>,
    pub class: Vec<Vec<usize>>,
    pub corner_offset: Vec<Vec<f64>>,
    pub corner_angle: Vec<Vec<f64>>,
    pub cone: Vec<f64>,
    pub marked: Vec<bool>,
    pub area: f64,
}

#[derive(Clone, Copy, Debug)]
enum SideRef {
    Original(Side),
    Diagonal(usize),
}

/// Ear clipping of a simple counterclockwise polygon; returns vertex index triples.
fn ear_clip(verts: &[Vec2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..verts.len()).collect();
    let mut tris = Vec::new();
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for k in 0..n {
            let (ia, ib, ic) = (idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]);
            let (a, b, c) = (verts[ia], verts[ib], verts[ic]);
            if cross(&(b - a), &(c - b)) <= 0.0 {
                continue;
            }
            let inside = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = verts[j];
                cross(&(b - a), &(p - a)) >= 0.0 && cross(&(c - b), &(p - b)) >= 0.0 && cross(&(a - c), &(p - c)) >= 0.0
            });
            if inside {
                continue;
            }
            tris.push([ia, ib, ic]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

impl FlatStructure {
    pub fn new(s: &TranslationSurface) -> Result<Self> {
        let mut polys: Vec<Vec<Vec2>> = Vec::new();
        let mut refs: Vec<Vec<SideRef>> = Vec::new();
        let mut original_at: std::collections::HashMap<Side, (usize, usize)> = std::collections::HashMap::new();
        let mut diag_count = 0;
        for (p, poly) in s.polygons().iter().enumerate() {
            let n = poly.len();
            if is_strictly_usable(poly) {
                for e in 0..n {
                    original_at.insert(Side::new(p, e), (polys.len(), e));
                }
                polys.push(poly.vertices.clone());
                refs.push((0..n).map(|e| SideRef::Original(Side::new(p, e))).collect());
                continue;
            }
            let tris = ear_clip(&poly.vertices);
            if tris.len() != n - 2 {
                return Err(Error::Invalid(format!("polygon {} could not be triangulated", p)));
            }
            let mut diag_id: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
            for t in tris {
                let mut r = Vec::with_capacity(3);
                for k in 0..3 {
                    let (u, v) = (t[k], t[(k + 1) % 3]);
                    if (u + 1) % n == v {
                        original_at.insert(Side::new(p, u), (polys.len(), k));
                        r.push(SideRef::Original(Side::new(p, u)));
                    } else {
                        let key = (u.min(v), u.max(v));
                        let id = *diag_id.entry(key).or_insert_with(|| {
                            diag_count += 1;
                            diag_count - 1
                        });
                        r.push(SideRef::Diagonal(id));
                    }
                }
                polys.push(t.iter().map(|&i| poly.vertices[i]).collect());
                refs.push(r);
            }
        }
        let mut diag_sides: Vec<Vec<(usize, usize)>> = vec![Vec::new(); diag_count];
        for (q, r) in refs.iter().enumerate() {
            for (j, sr) in r.iter().enumerate() {
                if let SideRef::Diagonal(id) = sr {
                    diag_sides[*id].push((q, j));
                }
            }
        }
        let mut neighbor = Vec::with_capacity(polys.len());
        for r in &refs {
            let mut row = Vec::with_capacity(r.len());
            for sr in r {
                let target = match sr {
                    SideRef::Original(side) => {
                        let other = s
                            .partner(*side)
                            .ok_or_else(|| Error::Invalid(format!("edge {}.e{} is not glued", side.polygon, side.edge)))?;
                        original_at[&other]
                    }
                    SideRef::Diagonal(_) => (usize::MAX, usize::MAX),
                };
                row.push(target);
            }
            neighbor.push(row);
        }
        for pair in &diag_sides {
            let [(q1, j1), (q2, j2)] = pair[..] else {
                return Err(Error::Invalid("inconsistent triangulation".into()));
            };
            neighbor[q1][j1] = (q2, j2);
            neighbor[q2][j2] = (q1, j1);
        }
        let shift: Vec<Vec<Vec2>> = (0..polys.len())
            .map(|p| {
                let m = polys[p].len();
                (0..m)
                    .map(|j| {
                        let (q, k) = neighbor[p][j];
                        polys[q][k] - polys[p][(j + 1) % m]
                    })
                    .collect()
            })
            .collect();

        let offsets: Vec<usize> = polys
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total: usize = polys.iter().map(|p| p.len()).sum();
        let mut uf = UnionFind::new(total);
        for p in 0..polys.len() {
            let m = polys[p].len();
            for j in 0..m {
                let (q, k) = neighbor[p][j];
                let mq = polys[q].len();
                uf.union(offsets[p] + j, offsets[q] + (k + 1) % mq);
                uf.union(offsets[p] + (j + 1) % m, offsets[q] + k);
            }
        }
        // Number classes in the same order as the original surface's vertex classes.
        let orig = s.vertex_classes();
        let mut class_of_root = std::collections::HashMap::new();
        for (p, poly) in s.polygons().iter().enumerate() {
            for i in 0..poly.len() {
                let (q, j) = original_at[&Side::new(p, i)];
                class_of_root.entry(uf.find(offsets[q] + j)).or_insert(orig.class_of[p][i]);
            }
        }
        let class: Vec<Vec<usize>> =
            (0..polys.len()).map(|p| (0..polys[p].len()).map(|i| class_of_root[&uf.find(offsets[p] + i)]).collect()).collect();
        let corner_angle: Vec<Vec<f64>> = polys
            .iter()
            .map(|v| {
                let m = v.len();
                (0..m).map(|i| ccw_angle(&(v[(i + 1) % m] - v[i]), &(v[(i + m - 1) % m] - v[i]))).collect()
            })
            .collect();
        let nclass = orig.count();
        let mut cone = vec![0.0; nclass];
        let mut corner_offset: Vec<Vec<f64>> = polys.iter().map(|v| vec![f64::NAN; v.len()]).collect();
        for p in 0..polys.len() {
            for i in 0..polys[p].len() {
                if !corner_offset[p][i].is_nan() {
                    continue;
                }
                // Walk counterclockwise around this vertex.
                let (mut q, mut j) = (p, i);
                let mut acc = 0.0;
                let mut steps = 0;
                loop {
                    corner_offset[q][j] = acc;
                    acc += corner_angle[q][j];
                    let m = polys[q].len();
                    let (nq, nj) = neighbor[q][(j + m - 1) % m];
                    (q, j) = (nq, nj);
                    steps += 1;
                    if (q, j) == (p, i) {
                        break;
                    }
                    if steps > total {
                        return Err(Error::Invalid("vertex link does not close".into()));
                    }
                }
                cone[class[p][i]] = acc;
            }
        }
        let marked = cone.iter().map(|&c| (c - TAU).abs() < 1e-6).collect();
        let area = polys
            .iter()
            .map(|v| {
                let m = v.len();
                0.5 * (0..m).map(|i| cross(&v[i], &v[(i + 1) % m])).sum::<f64>()
            })
            .sum();
        Ok(FlatStructure { polys, neighbor, shift, class, corner_offset, corner_angle, cone, marked, area })
    }

    /// Corner of `class` whose sector contains cone coordinate `theta`.
    pub fn corner_at(&self, class: usize, theta: f64) -> Option<(usize, usize)> {
        let mut best = None;
        for p in 0..self.polys.len() {
            for i in 0..self.polys[p].len() {
                if self.class[p][i] != class {
                    continue;
                }
                let off = self.corner_offset[p][i];
                let rel = wrap(theta - off + 1e-12, self.cone[class]) - 1e-12;
                if rel >= -1e-12 && rel < self.corner_angle[p][i] - 1e-12 {
                    return Some((p, i));
                }
                if best.is_none() && rel < self.corner_angle[p][i] + 1e-12 {
                    best = Some((p, i));
                }
            }
        }
        best
    }

    pub fn min_side_length(&self) -> f64 {
        self.polys
            .iter()
            .flat_map(|v| {
                let m = v.len();
                (0..m).map(move |i| (v[(i + 1) % m] - v[i]).norm())
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Convex (angles ≤ π) and usable as a development cell.
fn is_strictly_usable(poly: &Polygon) -> bool {
    let n = poly.len();
    (0..n).all(|i| poly.corner_angle(i) <= std::f64::consts::PI + 1e-12)
}
