//! Forgetting marked points: the polygons around a vertex of cone angle 2π
//! are merged into one polygon that contains the point in its interior.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::surface::{Polygon, Side, TranslationSurface, VertexClasses};

#[derive(Clone, Copy, Debug)]
enum Src {
    Orig(Side),
    Diag(usize),
}

/// The same flat surface with as many marked points removed as possible.
pub(crate) fn forget_marked_points(s: &TranslationSurface) -> TranslationSurface {
    let mut cur = s.clone();
    for _ in 0..4 * (s.side_count() + 1) {
        let classes = cur.vertex_classes();
        let mut marked: Vec<usize> = (0..classes.count()).filter(|&c| (classes.multiple(c) - 1.0).abs() < 1e-6).collect();
        marked.sort_by_key(|&c| std::cmp::Reverse(classes.corners[c].len()));
        let next = marked.iter().find_map(|&c| straighten(&cur, &classes, c)).or_else(|| marked.iter().find_map(|&c| remove_vertex(&cur, &classes, c)));
        match next {
            Some(n) => cur = n,
            None => return cur,
        }
    }
    cur
}

fn remove_vertex(s: &TranslationSurface, classes: &VertexClasses, c: usize) -> Option<TranslationSurface> {
    let corners = star(s, classes, c)?;
    let mut seen = vec![0usize; s.polygons().len()];
    for &(p, _) in &corners {
        seen[p] += 1;
    }
    if seen.iter().any(|&k| k > 1) {
        let repeated: Vec<usize> = (0..seen.len()).filter(|&p| seen[p] > 1).collect();
        return split_polygons(s, classes, c, &repeated);
    }
    merge_star(s, &corners)
}

/// A marked point with two corners of angle π sits inside a side: drop it
/// from both polygons and join the two pairs of sides.
fn straighten(s: &TranslationSurface, classes: &VertexClasses, c: usize) -> Option<TranslationSurface> {
    let corners = star(s, classes, c)?;
    if corners.len() != 2 {
        return None;
    }
    let polys = s.polygons();
    if corners.iter().any(|&(p, i)| (polys[p].corner_angle(i) - PI).abs() > 1e-9) {
        return None;
    }
    if corners.iter().any(|&(p, _)| polys[p].len() <= 3) {
        return None;
    }
    let drop = |p: usize, i: usize| corners.iter().any(|&(q, j)| q == p && j == i);
    let mut new_polys = Vec::with_capacity(polys.len());
    let mut map: HashMap<Side, Side> = HashMap::new();
    for (p, poly) in polys.iter().enumerate() {
        let m = poly.len();
        let mut verts = Vec::with_capacity(m);
        let mut index = vec![usize::MAX; m];
        for i in 0..m {
            if !drop(p, i) {
                index[i] = verts.len();
                verts.push(poly.vertices[i]);
            }
        }
        for e in 0..m {
            // Edge e starts at vertex e; an edge starting at a dropped vertex
            // becomes part of the edge that starts one vertex earlier.
            let start = if drop(p, e) { (e + m - 1) % m } else { e };
            map.insert(Side::new(p, e), Side::new(p, index[start]));
        }
        new_polys.push(Polygon::new(poly.name.clone(), verts));
    }
    rebuild_mapped(s, new_polys, &map, Vec::new())
}

/// Corners of class `c` in counterclockwise order around the vertex.
fn star(s: &TranslationSurface, classes: &VertexClasses, c: usize) -> Option<Vec<(usize, usize)>> {
    let all = &classes.corners[c];
    let first = *all.first()?;
    let mut out = vec![first];
    let mut cur = s.next_corner_ccw(first.0, first.1)?;
    while cur != first {
        if out.len() > all.len() {
            return None;
        }
        out.push(cur);
        cur = s.next_corner_ccw(cur.0, cur.1)?;
    }
    (out.len() == all.len()).then_some(out)
}

fn merge_star(s: &TranslationSurface, corners: &[(usize, usize)]) -> Option<TranslationSurface> {
    let polys = s.polygons();
    let mut verts = Vec::new();
    let mut srcs = Vec::new();
    for &(p, i) in corners {
        let v = &polys[p].vertices;
        let m = v.len();
        for step in 1..m - 1 {
            let j = (i + step) % m;
            verts.push(v[j] - v[i]);
            srcs.push(Src::Orig(Side::new(p, j)));
        }
    }
    if verts.len() < 3 {
        return None;
    }
    let merged = Polygon::new(format!("{}*", polys[corners[0].0].name), verts);
    let expected: f64 = corners.iter().map(|&(p, _)| polys[p].signed_area()).sum();
    if !merged.is_simple() || (merged.signed_area() - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return None;
    }
    let removed: Vec<bool> = (0..polys.len()).map(|p| corners.iter().any(|c| c.0 == p)).collect();
    let mut out = kept(s, &removed);
    out.push((merged, srcs));
    rebuild(s, out)
}

/// Fan-triangulates the given convex polygons from a corner not of class `c`,
/// so that no triangle has two corners of class `c`.
fn split_polygons(s: &TranslationSurface, classes: &VertexClasses, c: usize, which: &[usize]) -> Option<TranslationSurface> {
    let polys = s.polygons();
    let removed: Vec<bool> = (0..polys.len()).map(|p| which.contains(&p)).collect();
    let mut out = kept(s, &removed);
    let mut next_diag = 0usize;
    for &p in which {
        let poly = &polys[p];
        let m = poly.len();
        if !poly.is_convex() {
            return None;
        }
        let cls = &classes.class_of[p];
        if (0..m).any(|k| cls[k] == c && cls[(k + 1) % m] == c) {
            return None;
        }
        let w = (0..m).find(|&k| cls[k] != c)?;
        let base = next_diag;
        next_diag += m;
        let diag = |j: usize| Src::Diag(base + j);
        for step in 1..m - 1 {
            let (k, k1) = ((w + step) % m, (w + step + 1) % m);
            let verts = vec![poly.vertices[w], poly.vertices[k], poly.vertices[k1]];
            let s0 = if step == 1 { Src::Orig(Side::new(p, w)) } else { diag(k) };
            let s2 = if step == m - 2 { Src::Orig(Side::new(p, k1)) } else { diag(k1) };
            out.push((Polygon::new(format!("{}.{}", poly.name, step), verts), vec![s0, Src::Orig(Side::new(p, k)), s2]));
        }
    }
    rebuild(s, out)
}

fn kept(s: &TranslationSurface, removed: &[bool]) -> Vec<(Polygon, Vec<Src>)> {
    s.polygons()
        .iter()
        .enumerate()
        .filter(|(p, _)| !removed[*p])
        .map(|(p, poly)| (poly.clone(), (0..poly.len()).map(|e| Src::Orig(Side::new(p, e))).collect()))
        .collect()
}

/// Assembles polygons whose sides are either old sides (keeping their old
/// gluing partners) or diagonals paired by id. Old gluings with both sides
/// gone are interior to a merged polygon and disappear.
fn rebuild(s: &TranslationSurface, polys: Vec<(Polygon, Vec<Src>)>) -> Option<TranslationSurface> {
    let mut map: HashMap<Side, Side> = HashMap::new();
    let mut diags: Vec<(usize, Side)> = Vec::new();
    for (pi, (_, srcs)) in polys.iter().enumerate() {
        for (e, src) in srcs.iter().enumerate() {
            match *src {
                Src::Orig(side) => {
                    map.insert(side, Side::new(pi, e));
                }
                Src::Diag(id) => diags.push((id, Side::new(pi, e))),
            }
        }
    }
    diags.sort();
    let mut extra = Vec::new();
    for pair in diags.chunks(2) {
        if pair.len() != 2 || pair[0].0 != pair[1].0 {
            return None;
        }
        extra.push((pair[0].1, pair[1].1));
    }
    rebuild_mapped(s, polys.into_iter().map(|p| p.0).collect(), &map, extra)
}

/// New surface whose gluings are the old ones pushed through `map` (pairs that
/// collapse onto the same new pair are kept once) plus `extra`.
fn rebuild_mapped(
    s: &TranslationSurface,
    polys: Vec<Polygon>,
    map: &HashMap<Side, Side>,
    extra: Vec<(Side, Side)>,
) -> Option<TranslationSurface> {
    let mut gluings: Vec<(Side, Side)> = Vec::new();
    for &(a, b) in s.gluings() {
        match (map.get(&a), map.get(&b)) {
            (Some(&x), Some(&y)) => {
                if !gluings.iter().any(|&(u, v)| (u, v) == (x, y) || (u, v) == (y, x)) {
                    gluings.push((x, y));
                }
            }
            (None, None) => {}
            _ => return None,
        }
    }
    gluings.extend(extra);
    TranslationSurface::new(polys, gluings, s.label()).ok()
}
