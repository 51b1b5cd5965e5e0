//! Saddle connections by development of polygon translates inside a disk
//! around each vertex.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::structure::FlatStructure;
use crate::error::{Error, Result};
use crate::numeric::{ccw_angle, cross, wrap, Vec2};

pub const DEFAULT_DEVELOPMENT_CAP: usize = 200_000_000;

/// A straight segment between vertex classes with no vertex in its interior.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    pub holonomy: Vec2,
    /// Vertex class where the connection starts.
    pub start: usize,
    /// Vertex class where the connection ends.
    pub end: usize,
    pub length: f64,
    /// Position of the outgoing direction inside the cone at `start`.
    pub start_angle: f64,
    /// Position of the reversed incoming direction inside the cone at `end`.
    pub end_angle: f64,
}

impl SaddleConnection {
    pub fn reversed(&self) -> SaddleConnection {
        SaddleConnection {
            holonomy: -self.holonomy,
            start: self.end,
            end: self.start,
            length: self.length,
            start_angle: self.end_angle,
            end_angle: self.start_angle,
        }
    }
}

const INSIDE_TOL: f64 = 1e-12;

/// Counterclockwise angle from a corner's first side to a direction inside
/// the corner; directions along the side give 0, never 2π.
fn sector_angle(side: &Vec2, v: &Vec2) -> f64 {
    let a = ccw_angle(side, v);
    if a > TAU - 1e-9 {
        0.0
    } else {
        a
    }
}

#[inline]
fn strictly_between(s: &Vec2, e: &Vec2, v: &Vec2) -> bool {
    let nv = v.norm();
    cross(s, v) > INSIDE_TOL * s.norm() * nv && cross(v, e) > INSIDE_TOL * nv * e.norm()
}

fn ray_hit(dir: &Vec2, a: &Vec2, b: &Vec2) -> Vec2 {
    let d = b - a;
    let t = cross(a, &d) / cross(dir, &d);
    dir * t
}

fn segment_distance(p: &Vec2, q: &Vec2) -> f64 {
    let d = q - p;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return p.norm();
    }
    let t = (-p.dot(&d) / len2).clamp(0.0, 1.0);
    (p + d * t).norm()
}

struct Item {
    poly: usize,
    entry: usize,
    off: Vec2,
    s: Vec2,
    e: Vec2,
}

/// Where a straight ray through a marked point ends up: the next true zero
/// (developed position, polygon, corner) or nothing within `lmax`.
fn continue_through(
    fs: &FlatStructure,
    mut class: usize,
    mut in_angle: f64,
    mut at: Vec2,
    lmax2: f64,
    steps: &mut usize,
) -> Option<(Vec2, usize, usize)> {
    let d = at.normalize();
    'outer: loop {
        let (q, j) = fs.corner_at(class, wrap(in_angle + PI, fs.cone[class]))?;
        let mut poly = q;
        let mut off = at - fs.polys[q][j];
        let mut x = fs.polys[q][j];
        let mut skip = vec![j, (j + fs.polys[q].len() - 1) % fs.polys[q].len()];
        let mut from_vertex = Some(j);
        loop {
            *steps += 1;
            let v = &fs.polys[poly];
            let m = v.len();
            let mut exit = (f64::INFINITY, usize::MAX);
            for k in 0..m {
                if skip.contains(&k) {
                    continue;
                }
                let e = v[(k + 1) % m] - v[k];
                let denom = cross(&e, &d);
                if denom >= -1e-15 * e.norm() {
                    continue;
                }
                let t = cross(&e, &(x - v[k])) / -denom;
                if t < exit.0 {
                    exit = (t.max(0.0), k);
                }
            }
            let cur = d.dot(&(x + off));
            let mut hit: Option<(f64, usize)> = None;
            for k in 0..m {
                if from_vertex == Some(k) {
                    continue;
                }
                let pos = v[k] + off;
                let along = d.dot(&pos);
                if along <= cur + 1e-12 || along > cur + exit.0 + 1e-9 {
                    continue;
                }
                if cross(&d, &pos).abs() <= 1e-9 * (1.0 + along) && hit.is_none_or(|h| along < h.0) {
                    hit = Some((along, k));
                }
            }
            if let Some((_, k)) = hit {
                let pos = v[k] + off;
                if pos.norm_squared() > lmax2 {
                    return None;
                }
                let c = fs.class[poly][k];
                let side_dir = v[(k + 1) % m] - v[k];
                if fs.marked[c] {
                    in_angle = wrap(fs.corner_offset[poly][k] + sector_angle(&side_dir, &(-d)), fs.cone[c]);
                    class = c;
                    at = pos;
                    continue 'outer;
                }
                return Some((pos, poly, k));
            }
            if exit.1 == usize::MAX {
                return None;
            }
            let p_exit = x + d * exit.0;
            if (p_exit + off).norm_squared() > lmax2 {
                return None;
            }
            let (nq, nk) = fs.neighbor[poly][exit.1];
            x = p_exit + fs.shift[poly][exit.1];
            off -= fs.shift[poly][exit.1];
            poly = nq;
            skip.clear();
            skip.push(nk);
            from_vertex = None;
        }
    }
}

/// Saddle connections leaving corner `(p, i)` with length ≤ `lmax`.
/// With `transparent`, marked points neither end nor block a connection.
/// Returns the connections and the amount of development work.
fn develop_corner(
    fs: &FlatStructure,
    p: usize,
    i: usize,
    lmax: f64,
    cap: usize,
    transparent: bool,
) -> Result<(Vec<SaddleConnection>, usize)> {
    let verts = &fs.polys[p];
    let m = verts.len();
    let origin = verts[i];
    let off0 = -origin;
    let s0 = verts[(i + 1) % m] - origin;
    let e0 = verts[(i + m - 1) % m] - origin;
    let start_class = fs.class[p][i];
    let start_off = fs.corner_offset[p][i];
    let mut out = Vec::new();
    let lmax2 = lmax * lmax * (1.0 + 1e-12);
    let mut walked = 0usize;
    let mut record = |v: Vec2, q: usize, j: usize, side_dir: Vec2, out: &mut Vec<SaddleConnection>| {
        let mut end_class = fs.class[q][j];
        let mut v = v;
        let mut end_off = fs.corner_offset[q][j];
        let mut side_dir = side_dir;
        if transparent && fs.marked[end_class] {
            let in_angle = wrap(end_off + sector_angle(&side_dir, &(-v)), fs.cone[end_class]);
            match continue_through(fs, end_class, in_angle, v, lmax2, &mut walked) {
                Some((pos, q2, j2)) => {
                    let w = &fs.polys[q2];
                    v = pos;
                    end_class = fs.class[q2][j2];
                    end_off = fs.corner_offset[q2][j2];
                    side_dir = w[(j2 + 1) % w.len()] - w[j2];
                }
                None => return,
            }
        }
        out.push(SaddleConnection {
            holonomy: v,
            start: start_class,
            end: end_class,
            length: v.norm(),
            start_angle: wrap(start_off + sector_angle(&s0, &v), fs.cone[start_class]),
            end_angle: wrap(end_off + sector_angle(&side_dir, &(-v)), fs.cone[end_class]),
        });
    };
    if s0.norm_squared() <= lmax2 {
        let j = (i + 1) % m;
        let side_dir = verts[(j + 1) % m] - verts[j];
        record(s0, p, j, side_dir, &mut out);
    }
    let mut stack: Vec<Item> = Vec::new();
    let mut developed = 1usize;
    // (polygon, offset, first chain side, number of chain sides, wedge)
    let mut process = |poly: usize,
                       off: Vec2,
                       first: usize,
                       nsides: usize,
                       s: Vec2,
                       e: Vec2,
                       stack: &mut Vec<Item>,
                       out: &mut Vec<SaddleConnection>| {
        let v = &fs.polys[poly];
        let mq = v.len();
        for k in 0..nsides {
            let j = (first + k) % mq;
            let a = v[j] + off;
            let b = v[(j + 1) % mq] + off;
            if k > 0 && strictly_between(&s, &e, &a) && a.norm_squared() <= lmax2 {
                let side_dir = v[(j + 1) % mq] - v[j];
                record(a, poly, j, side_dir, out);
            }
            let a_in = cross(&s, &a) > 0.0;
            let b_in = cross(&b, &e) > 0.0;
            let lo = if a_in { a } else { s };
            let hi = if b_in { b } else { e };
            if cross(&lo, &hi) <= INSIDE_TOL * lo.norm() * hi.norm() {
                continue;
            }
            let plo = if a_in { a } else { ray_hit(&lo, &a, &b) };
            let phi = if b_in { b } else { ray_hit(&hi, &a, &b) };
            if segment_distance(&plo, &phi) > lmax {
                continue;
            }
            let (q, kq) = fs.neighbor[poly][j];
            stack.push(Item { poly: q, entry: kq, off: off - fs.shift[poly][j], s: lo, e: hi });
        }
    };
    process(p, off0, (i + 1) % m, m - 2, s0, e0, &mut stack, &mut out);
    while let Some(item) = stack.pop() {
        developed += 1;
        if developed > cap {
            return Err(Error::CapExceeded { what: "developed polygons", cap });
        }
        let mq = fs.polys[item.poly].len();
        process(item.poly, item.off, (item.entry + 1) % mq, mq - 1, item.s, item.e, &mut stack, &mut out);
    }
    let work = developed + walked;
    if work > cap {
        return Err(Error::CapExceeded { what: "developed polygons", cap });
    }
    Ok((out, work))
}

/// All saddle connections of length ≤ `lmax`, both orientations, in a
/// deterministic order (length, then direction angle, then cone positions).
pub(crate) fn enumerate(fs: &FlatStructure, lmax: f64, cap: usize) -> Result<Vec<SaddleConnection>> {
    enumerate_with(fs, lmax, cap, false)
}

/// Straight segments between true zeros of length ≤ `lmax` that may pass
/// through marked points: the saddle connections of the surface with its
/// marked points forgotten.
pub(crate) fn enumerate_zeros(fs: &FlatStructure, lmax: f64, cap: usize) -> Result<Vec<SaddleConnection>> {
    enumerate_with(fs, lmax, cap, true)
}

fn enumerate_with(fs: &FlatStructure, lmax: f64, cap: usize, transparent: bool) -> Result<Vec<SaddleConnection>> {
    let corners: Vec<(usize, usize)> = (0..fs.polys.len())
        .flat_map(|p| (0..fs.polys[p].len()).map(move |i| (p, i)))
        .filter(|&(p, i)| !transparent || !fs.marked[fs.class[p][i]])
        .collect();
    let results: Vec<Result<(Vec<SaddleConnection>, usize)>> =
        corners.par_iter().map(|&(p, i)| develop_corner(fs, p, i, lmax, cap, transparent)).collect();
    let mut all = Vec::new();
    let mut developed = 0usize;
    for r in results {
        let (scs, n) = r?;
        developed = developed.saturating_add(n);
        all.extend(scs);
    }
    if developed > cap {
        return Err(Error::CapExceeded { what: "developed polygons", cap });
    }
    sort_and_dedup(&mut all);
    Ok(all)
}

fn sort_and_dedup(all: &mut Vec<SaddleConnection>) {
    all.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.holonomy.y.atan2(a.holonomy.x).total_cmp(&b.holonomy.y.atan2(b.holonomy.x)))
            .then(a.start.cmp(&b.start))
            .then(a.start_angle.total_cmp(&b.start_angle))
            .then(a.end.cmp(&b.end))
    });
    all.dedup_by(|b, a| {
        a.start == b.start
            && a.end == b.end
            && (a.holonomy - b.holonomy).norm() <= 1e-9
            && (a.start_angle - b.start_angle).abs() <= 1e-9
    });
}
