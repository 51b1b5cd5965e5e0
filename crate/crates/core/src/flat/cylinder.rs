//! Cylinder detection: period lattice for genus one, strip scan over
//! parallel saddle-connection families otherwise.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use super::saddle::{enumerate_zeros, SaddleConnection};
use super::structure::FlatStructure;
use crate::error::{Error, Result};
use crate::numeric::{cross, gcd, wrap, Vec2};
use crate::sl2::gauss_reduce;

/// A maximal flat cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    /// Holonomy of the core curve, lexicographically positive.
    pub holonomy: Vec2,
    pub waist: f64,
    pub height: f64,
    /// Saddle connections on the bottom boundary (empty in genus one).
    pub boundary: Vec<SaddleConnection>,
}

impl Cylinder {
    /// Unit vector along the core curve.
    pub fn direction(&self) -> Vec2 {
        self.holonomy / self.waist
    }

    pub fn area(&self) -> f64 {
        self.waist * self.height
    }
}

pub(crate) fn canonical_positive(v: &Vec2) -> bool {
    let a = v.y.atan2(v.x);
    a > -FRAC_PI_2 + 1e-12 && a <= FRAC_PI_2 + 1e-12
}

pub(crate) fn sort_cylinders(cyls: &mut [Cylinder]) {
    cyls.sort_by(|a, b| {
        a.waist
            .total_cmp(&b.waist)
            .then(a.holonomy.y.atan2(a.holonomy.x).total_cmp(&b.holonomy.y.atan2(b.holonomy.x)))
            .then(a.height.total_cmp(&b.height))
    });
}

/// Cylinders of a genus-one surface from its absolute period lattice.
pub(crate) fn lattice_cylinders(v1: Vec2, v2: Vec2, area: f64, lmax: f64) -> Result<Vec<Cylinder>> {
    let (w1, w2, _) = gauss_reduce(v1, v2)?;
    let covol = cross(&w1, &w2).abs();
    let bound = lmax * (1.0 + 1e-12);
    let amax = (bound * w2.norm() / covol).floor() as i64 + 1;
    let bmax = (bound * w1.norm() / covol).floor() as i64 + 1;
    let mut out = Vec::new();
    for a in -amax..=amax {
        for b in -bmax..=bmax {
            if gcd(a, b) != 1 {
                continue;
            }
            let v = w1 * a as f64 + w2 * b as f64;
            let len = v.norm();
            if len > bound || !canonical_positive(&v) {
                continue;
            }
            out.push(Cylinder { holonomy: v, waist: len, height: area / len, boundary: Vec::new() });
        }
    }
    sort_cylinders(&mut out);
    Ok(out)
}

#[derive(Clone, Copy)]
struct Entry {
    h: f64,
    poly: usize,
    off: Vec2,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // Reversed so the heap pops the lowest entry first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.h.total_cmp(&self.h).then(other.poly.cmp(&self.poly))
    }
}

/// Clip segment `a b` (strip coordinates) to `[x0,x1] x [y0,y1]`, returning the
/// y-range of the clipped part.
fn clip_y_range(a: Vec2, b: Vec2, x0: f64, x1: f64, y0: f64, y1: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, a.x - x0), (d.x, x1 - a.x), (-d.y, a.y - y0), (d.y, y1 - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            t0 = t0.max(r);
        } else {
            t1 = t1.min(r);
        }
        if t0 > t1 {
            return None;
        }
    }
    let (ya, yb) = (a.y + d.y * t0, a.y + d.y * t1);
    Some((ya.min(yb), ya.max(yb)))
}

/// Height of the cylinder lying to the left of a closed chain starting with
/// `first`: develop the strip above the chain lowest-first and stop at the
/// first zero (marked points are transparent).
fn strip_height(fs: &FlatStructure, first: &SaddleConnection, waist: f64, cap: usize) -> Result<f64> {
    let d = first.holonomy / first.length;
    let n = Vec2::new(-d.y, d.x);
    let tol = 1e-9 * (1.0 + waist);
    let theta = wrap(first.start_angle + 1e-9, fs.cone[first.start]);
    let (p0, i0) = fs
        .corner_at(first.start, theta)
        .ok_or_else(|| Error::Degenerate("no corner contains the chain direction".into()))?;
    let frame = |x: Vec2| Vec2::new(x.dot(&d), x.dot(&n));
    let mut best = fs.area / waist * (1.0 + 1e-9) + tol;
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<(usize, i64, i64)> = HashSet::new();
    heap.push(Entry { h: 0.0, poly: p0, off: -fs.polys[p0][i0] });
    let mut developed = 0usize;
    while let Some(Entry { h, poly, off }) = heap.pop() {
        if h >= best - tol {
            break;
        }
        let key = (poly, (off.x * 1e7).round() as i64, (off.y * 1e7).round() as i64);
        if !seen.insert(key) {
            continue;
        }
        developed += 1;
        if developed > cap {
            return Err(Error::CapExceeded { what: "developed polygons", cap });
        }
        let v = &fs.polys[poly];
        let m = v.len();
        let pts: Vec<Vec2> = v.iter().map(|&x| frame(x + off)).collect();
        for j in 0..m {
            let c = fs.class[poly][j];
            if !fs.marked[c] && pts[j].y > tol && pts[j].y < best {
                best = pts[j].y;
            }
        }
        for j in 0..m {
            let Some((lo, hi)) = clip_y_range(pts[j], pts[(j + 1) % m], -tol, waist + tol, 0.0, best) else {
                continue;
            };
            if hi <= tol || lo >= best - tol {
                continue;
            }
            let (q, _) = fs.neighbor[poly][j];
            heap.push(Entry { h: lo, poly: q, off: off - fs.shift[poly][j] });
        }
    }
    Ok(best)
}

/// Cylinders of a surface with at least one true zero, by the strip scan.
pub(crate) fn strip_scan(fs: &FlatStructure, lmax: f64, cap: usize) -> Result<Vec<Cylinder>> {
    let mut pos: Vec<SaddleConnection> =
        enumerate_zeros(fs, lmax, cap)?.into_iter().filter(|c| canonical_positive(&c.holonomy)).collect();
    pos.sort_by(|a, b| {
        a.holonomy.y.atan2(a.holonomy.x).total_cmp(&b.holonomy.y.atan2(b.holonomy.x)).then(a.length.total_cmp(&b.length))
    });
    let mut groups: Vec<Vec<SaddleConnection>> = Vec::new();
    for c in pos {
        let same = groups.last().is_some_and(|g| {
            let d = g[0].holonomy / g[0].length;
            let e = c.holonomy / c.length;
            cross(&d, &e).abs() <= 1e-10 && d.dot(&e) > 0.0
        });
        if same {
            groups.last_mut().unwrap().push(c);
        } else {
            groups.push(vec![c]);
        }
    }
    let per_group: Vec<Result<Vec<Cylinder>>> = groups.par_iter().map(|g| scan_direction(fs, g, lmax, cap)).collect();
    let mut out = Vec::new();
    for r in per_group {
        out.extend(r?);
    }
    sort_cylinders(&mut out);
    Ok(out)
}

fn scan_direction(fs: &FlatStructure, group: &[SaddleConnection], lmax: f64, cap: usize) -> Result<Vec<Cylinder>> {
    let mut by_start: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in group.iter().enumerate() {
        by_start.entry(c.start).or_default().push(i);
    }
    let next = |i: usize| -> Option<usize> {
        let c = &group[i];
        let cone = fs.cone[c.end];
        let target = wrap(c.end_angle - PI, cone);
        by_start.get(&c.end)?.iter().copied().find(|&j| {
            let diff = wrap(group[j].start_angle - target, cone);
            diff.min(cone - diff) < 1e-7
        })
    };
    let bound = lmax * (1.0 + 1e-9);
    let mut visited = vec![false; group.len()];
    let mut out = Vec::new();
    for i in 0..group.len() {
        if visited[i] {
            continue;
        }
        let mut chain = vec![i];
        let mut total = group[i].length;
        let mut cur = next(i);
        let mut closed = false;
        while let Some(j) = cur {
            if j == i {
                closed = true;
                break;
            }
            if visited[j] || chain.len() > group.len() {
                break;
            }
            chain.push(j);
            total += group[j].length;
            if total > bound {
                break;
            }
            cur = next(j);
        }
        for &j in &chain {
            visited[j] = true;
        }
        if !closed || chain.iter().all(|&j| fs.marked[group[j].start]) {
            continue;
        }
        let holonomy: Vec2 = chain.iter().map(|&j| group[j].holonomy).sum();
        let height = strip_height(fs, &group[i], total, cap)?;
        out.push(Cylinder { holonomy, waist: total, height, boundary: chain.iter().map(|&j| group[j].clone()).collect() });
    }
    Ok(out)
}
