//! Relative homology bases and period coordinates.
//!
//! The basis is built from the gluing combinatorics alone: a spanning tree of
//! the dual graph gives one dual cycle per non-tree gluing; their images in
//! absolute homology are reduced to a symplectic basis; spanning-tree edges of
//! the vertex-class graph provide the relative arcs.

use std::collections::VecDeque;

use nalgebra::{DMatrix, Matrix2xX};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::Vec2;
use crate::surface::{Polygon, Side, TranslationSurface};

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMatrix {
    /// Row 0: real parts, row 1: imaginary parts; one column per basis class.
    pub entries: Matrix2xX<f64>,
    pub basis_tag: String,
    pub genus: usize,
}

impl PeriodMatrix {
    pub fn k(&self) -> usize {
        self.entries.ncols()
    }

    /// Number of absolute classes (2g); they occupy the first columns.
    pub fn absolute_count(&self) -> usize {
        2 * self.genus
    }

    pub fn absolute_mask(&self) -> Vec<bool> {
        (0..self.k()).map(|j| j < self.absolute_count()).collect()
    }

    pub fn column(&self, j: usize) -> Vec2 {
        Vec2::new(self.entries[(0, j)], self.entries[(1, j)])
    }

    /// Riemann bilinear sum Σ (Re a_i Im b_i − Im a_i Re b_i), equal to the area.
    pub fn bilinear_area(&self) -> f64 {
        let g = self.genus;
        (0..g)
            .map(|i| {
                let a = self.column(i);
                let b = self.column(g + i);
                a.x * b.y - a.y * b.x
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    /// One integer chain per class (coefficient per gluing, oriented along the
    /// gluing's first side): a_1..a_g, b_1..b_g, then relative arcs.
    pub chains: Vec<Vec<i64>>,
    pub genus: usize,
    pub tag: String,
}

/// Deterministic tag derived from the combinatorics (polygon sizes and gluing table).
pub fn basis_tag(s: &TranslationSurface) -> String {
    let mut text = String::new();
    for p in s.polygons() {
        text.push_str(&format!("{};", p.len()));
    }
    text.push('|');
    for (a, b) in s.gluings() {
        text.push_str(&format!("{}.{}-{}.{};", a.polygon, a.edge, b.polygon, b.edge));
    }
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{:02x}", b)).collect()
}

struct Complex<'a> {
    s: &'a TranslationSurface,
    parent_gluing: Vec<Option<usize>>,
    bfs_order: Vec<usize>,
    non_tree: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Crossing {
    exit: Side,
    entry: Side,
}

impl<'a> Complex<'a> {
    fn new(s: &'a TranslationSurface) -> Result<Self> {
        if let Some(side) = s.sides().find(|&side| s.slot(side).is_none()) {
            return Err(Error::RankDeficient(format!("edge {}.e{} is not glued", side.polygon, side.edge)));
        }
        let f = s.polygons().len();
        let e = s.gluings().len();
        let mut parent_gluing = vec![None; f];
        let mut visited = vec![false; f];
        let mut tree = vec![false; e];
        let mut bfs_order = vec![0];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        while let Some(p) = queue.pop_front() {
            for edge in 0..s.polygons()[p].len() {
                let side = Side::new(p, edge);
                let q = s.partner(side).unwrap().polygon;
                if !visited[q] {
                    visited[q] = true;
                    let g = s.slot(side).unwrap().gluing;
                    parent_gluing[q] = Some(g);
                    tree[g] = true;
                    bfs_order.push(q);
                    queue.push_back(q);
                }
            }
        }
        if bfs_order.len() != f {
            return Err(Error::RankDeficient("surface is disconnected".into()));
        }
        let non_tree: Vec<usize> = (0..e).filter(|&g| !tree[g]).collect();
        Ok(Complex { s, parent_gluing, bfs_order, non_tree })
    }

    fn boundary(&self, p: usize) -> Vec<(usize, i64)> {
        (0..self.s.polygons()[p].len())
            .map(|e| {
                let slot = self.s.slot(Side::new(p, e)).unwrap();
                (slot.gluing, slot.sign())
            })
            .collect()
    }

    /// Coordinates of a chain in C₁ / im ∂₂ (indexed by non-tree gluings).
    fn reduce(&self, chain: &[i64]) -> Vec<i64> {
        let mut c = chain.to_vec();
        for &p in self.bfs_order.iter().skip(1) {
            let g = self.parent_gluing[p].unwrap();
            if c[g] == 0 {
                continue;
            }
            let bd = self.boundary(p);
            let coef = bd.iter().filter(|(h, _)| *h == g).map(|(_, s)| s).sum::<i64>();
            let factor = c[g] * coef;
            for (h, s) in bd {
                c[h] -= factor * s;
            }
        }
        self.non_tree.iter().map(|&g| c[g]).collect()
    }

    fn parent_side(&self, p: usize) -> Side {
        let g = self.parent_gluing[p].unwrap();
        let (a, b) = self.s.gluings()[g];
        if a.polygon == p {
            a
        } else {
            b
        }
    }

    fn depth(&self, mut p: usize) -> usize {
        let mut d = 0;
        while self.parent_gluing[p].is_some() {
            p = self.s.partner(self.parent_side(p)).unwrap().polygon;
            d += 1;
        }
        d
    }

    /// Fundamental dual cycle of a non-tree gluing: cross it from its first side,
    /// then return through the tree.
    fn dual_cycle(&self, g: usize) -> Vec<Crossing> {
        let (a, b) = self.s.gluings()[g];
        let mut out = vec![Crossing { exit: a, entry: b }];
        let (mut x, mut y) = (b.polygon, a.polygon);
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut dx, mut dy) = (self.depth(x), self.depth(y));
        while x != y {
            if dx >= dy {
                let side = self.parent_side(x);
                let other = self.s.partner(side).unwrap();
                up.push(Crossing { exit: side, entry: other });
                x = other.polygon;
                dx -= 1;
            } else {
                let side = self.parent_side(y);
                let other = self.s.partner(side).unwrap();
                down.push(Crossing { exit: other, entry: side });
                y = other.polygon;
                dy -= 1;
            }
        }
        out.extend(up);
        out.extend(down.into_iter().rev());
        out
    }

    /// Push a dual cycle onto the 1-skeleton: in each visited polygon walk the
    /// boundary counterclockwise from the entry side to the exit side.
    fn primal_image(&self, cycle: &[Crossing]) -> Vec<i64> {
        let mut chain = vec![0i64; self.s.gluings().len()];
        let r = cycle.len();
        for k in 0..r {
            let entry = cycle[k].entry;
            let exit = cycle[(k + 1) % r].exit;
            debug_assert_eq!(entry.polygon, exit.polygon);
            let m = self.s.polygons()[entry.polygon].len();
            let mut j = (entry.edge + 1) % m;
            while j != exit.edge {
                let slot = self.s.slot(Side::new(entry.polygon, j)).unwrap();
                chain[slot.gluing] += slot.sign();
                j = (j + 1) % m;
            }
        }
        chain
    }

    fn intersection(&self, chain: &[i64], cycle: &[Crossing]) -> i64 {
        cycle
            .iter()
            .map(|c| {
                let slot = self.s.slot(c.entry).unwrap();
                chain[slot.gluing] * slot.sign()
            })
            .sum()
    }
}

fn div_round(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    let r = a - q * b;
    if 2 * r.abs() > b.abs() || (2 * r.abs() == b.abs() && r != 0 && b > 0 && r > 0) {
        q + b.signum()
    } else {
        q
    }
}

type Pair = (Vec<i64>, Vec<i64>);

/// Reduce an integer alternating form to hyperbolic pairs with pairing +1.
fn symplectic_pairs(omega: &[Vec<i64>]) -> Result<Vec<Pair>> {
    let m = omega.len();
    let form = |x: &[i64], y: &[i64]| -> i64 {
        let mut acc = 0;
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            for j in 0..m {
                acc += x[i] * omega[i][j] * y[j];
            }
        }
        acc
    };
    let mut pool: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            let mut v = vec![0; m];
            v[i] = 1;
            v
        })
        .collect();
    let mut pairs = Vec::new();
    loop {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let w = form(&pool[i], &pool[j]);
                if w != 0 && best.is_none_or(|(_, _, bw)| w.abs() < bw.abs()) {
                    best = Some((i, j, w));
                }
            }
        }
        let Some((i, j, w)) = best else { break };
        let x = pool[i].clone();
        let y = pool[j].clone();
        let mut clean = true;
        for k in 0..pool.len() {
            if k == i || k == j {
                continue;
            }
            let q = div_round(form(&x, &pool[k]), w);
            if q != 0 {
                for t in 0..m {
                    pool[k][t] -= q * y[t];
                }
            }
            let q2 = div_round(form(&y, &pool[k]), -w);
            if q2 != 0 {
                for t in 0..m {
                    pool[k][t] -= q2 * x[t];
                }
            }
            if form(&x, &pool[k]) != 0 || form(&y, &pool[k]) != 0 {
                clean = false;
            }
        }
        if clean {
            if w.abs() != 1 {
                return Err(Error::RankDeficient(format!("intersection form is not unimodular (pairing {})", w)));
            }
            pairs.push(if w == 1 { (x, y) } else { (y, x) });
            let (lo, hi) = (i.min(j), i.max(j));
            pool.remove(hi);
            pool.remove(lo);
        }
    }
    Ok(pairs)
}

fn integer_det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn combine(coefs: &[i64], images: &[Vec<i64>]) -> Vec<i64> {
    let e = images.first().map_or(0, |v| v.len());
    let mut out = vec![0; e];
    for (c, img) in coefs.iter().zip(images) {
        if *c != 0 {
            for g in 0..e {
                out[g] += c * img[g];
            }
        }
    }
    out
}

fn leading(v: &[i64]) -> (usize, i64) {
    v.iter().enumerate().find(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).unwrap_or((usize::MAX, 0))
}

pub fn homology_basis(s: &TranslationSurface) -> Result<HomologyBasis> {
    let cx = Complex::new(s)?;
    let cycles: Vec<Vec<Crossing>> = cx.non_tree.iter().map(|&g| cx.dual_cycle(g)).collect();
    let images: Vec<Vec<i64>> = cycles.iter().map(|c| cx.primal_image(c)).collect();
    let m = cycles.len();
    let omega: Vec<Vec<i64>> = (0..m).map(|i| (0..m).map(|j| cx.intersection(&images[i], &cycles[j])).collect()).collect();
    for i in 0..m {
        for j in 0..m {
            if omega[i][j] != -omega[j][i] {
                return Err(Error::RankDeficient("intersection form is not alternating".into()));
            }
        }
    }
    let mut pairs: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = Vec::new();
    for (x, y) in symplectic_pairs(&omega)? {
        let mut a = combine(&x, &images);
        let mut b = combine(&y, &images);
        let (la, _) = leading(&cx.reduce(&a));
        let (lb, _) = leading(&cx.reduce(&b));
        if lb < la {
            let neg_a: Vec<i64> = a.iter().map(|v| -v).collect();
            a = b;
            b = neg_a;
        }
        let ca = cx.reduce(&a);
        if leading(&ca).1 < 0 {
            a.iter_mut().for_each(|v| *v = -*v);
            b.iter_mut().for_each(|v| *v = -*v);
        }
        let key = cx.reduce(&a);
        pairs.push((key, a, b));
    }
    pairs.sort_by(|p, q| {
        let (lp, lq) = (leading(&p.0).0, leading(&q.0).0);
        lp.cmp(&lq).then_with(|| p.0.cmp(&q.0))
    });
    let genus = pairs.len();

    let classes = s.vertex_classes();
    let nv = classes.count();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (g, (a, _)) in s.gluings().iter().enumerate() {
        let n = s.polygons()[a.polygon].len();
        let from = classes.class_of[a.polygon][a.edge];
        let to = classes.class_of[a.polygon][(a.edge + 1) % n];
        adjacency[from].push((g, to));
        adjacency[to].push((g, from));
    }
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut arcs = Vec::new();
    while let Some(c) = queue.pop_front() {
        for &(g, d) in &adjacency[c] {
            if !seen[d] {
                seen[d] = true;
                arcs.push(g);
                queue.push_back(d);
            }
        }
    }
    let e = s.gluings().len();
    let mut chains: Vec<Vec<i64>> = pairs.iter().map(|p| p.1.clone()).collect();
    chains.extend(pairs.iter().map(|p| p.2.clone()));
    for g in arcs {
        let mut c = vec![0; e];
        c[g] = 1;
        chains.push(c);
    }
    if chains.len() != m {
        return Err(Error::RankDeficient(format!("basis has {} classes, expected {}", chains.len(), m)));
    }
    let coords: Vec<Vec<i128>> = chains.iter().map(|c| cx.reduce(c).into_iter().map(|v| v as i128).collect()).collect();
    let det = if m == 0 { 1 } else { integer_det(coords) };
    if det.abs() != 1 {
        return Err(Error::RankDeficient(format!("basis change has determinant {}", det)));
    }
    Ok(HomologyBasis { chains, genus, tag: basis_tag(s) })
}

fn evaluate(s: &TranslationSurface, basis: &HomologyBasis) -> Matrix2xX<f64> {
    let vectors: Vec<Vec2> = (0..s.gluings().len()).map(|g| s.gluing_vector(g)).collect();
    let mut m = Matrix2xX::zeros(basis.chains.len());
    for (j, chain) in basis.chains.iter().enumerate() {
        let mut acc = Vec2::zeros();
        for (g, &c) in chain.iter().enumerate() {
            if c != 0 {
                acc += vectors[g] * c as f64;
            }
        }
        m[(0, j)] = acc.x;
        m[(1, j)] = acc.y;
    }
    m
}

pub fn periods(s: &TranslationSurface) -> Result<PeriodMatrix> {
    let basis = homology_basis(s)?;
    Ok(PeriodMatrix { entries: evaluate(s, &basis), basis_tag: basis.tag.clone(), genus: basis.genus })
}

/// The surface with the same combinatorics whose periods equal `target`;
/// polygons keep their first vertex.
pub fn surface_with_periods(s: &TranslationSurface, target: &Matrix2xX<f64>) -> Result<TranslationSurface> {
    let basis = homology_basis(s)?;
    let e = s.gluings().len();
    let f = s.polygons().len();
    if target.ncols() != basis.chains.len() {
        return Err(Error::Invalid(format!("expected {} period columns, got {}", basis.chains.len(), target.ncols())));
    }
    let mut a = DMatrix::<f64>::zeros(e, e);
    let mut rhs = DMatrix::<f64>::zeros(e, 2);
    let mut row = 0;
    for p in 1..f {
        for edge in 0..s.polygons()[p].len() {
            let slot = s.slot(Side::new(p, edge)).unwrap();
            a[(row, slot.gluing)] += slot.sign() as f64;
        }
        row += 1;
    }
    for (j, chain) in basis.chains.iter().enumerate() {
        for (g, &c) in chain.iter().enumerate() {
            a[(row, g)] = c as f64;
        }
        rhs[(row, 0)] = target[(0, j)];
        rhs[(row, 1)] = target[(1, j)];
        row += 1;
    }
    let x = a.lu().solve(&rhs).ok_or_else(|| Error::RankDeficient("period system is singular".into()))?;
    let polygons = s
        .polygons()
        .iter()
        .enumerate()
        .map(|(p, poly)| {
            let mut verts = Vec::with_capacity(poly.len());
            let mut cur = poly.vertices[0];
            for edge in 0..poly.len() {
                verts.push(cur);
                let slot = s.slot(Side::new(p, edge)).unwrap();
                cur += Vec2::new(x[(slot.gluing, 0)], x[(slot.gluing, 1)]) * slot.sign() as f64;
            }
            Polygon::new(poly.name.clone(), verts)
        })
        .collect();
    Ok(s.with_polygons(polygons))
}
