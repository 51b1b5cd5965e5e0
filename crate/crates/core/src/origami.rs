//! Square-tiled surfaces encoded by a pair of permutations.
//!
//! Squares are labelled `0..n` internally and `1..=n` in text. `h[i]` is the
//! square to the right of `i`, `v[i]` the square above it.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::Vec2;
use crate::surface::{Polygon, Side, Stratum, TranslationSurface};

pub type Perm = Vec<usize>;

pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push(i);
            i = p[i];
        }
        out.push(cyc);
    }
    out
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &i in p {
        if i >= p.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Parse cycle notation such as `(1 2 3)(4)`; labels are 1-based.
pub fn parse_cycles(text: &str, n: usize) -> std::result::Result<Perm, String> {
    let mut p: Perm = (0..n).collect();
    let mut seen = vec![false; n];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' in {:?}", text))?;
        let close = open.find(')').ok_or_else(|| format!("unclosed cycle in {:?}", text))?;
        let body = &open[..close];
        let labels: Vec<usize> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| format!("bad label {:?}", t)))
            .collect::<std::result::Result<_, _>>()?;
        for &l in &labels {
            if l == 0 || l > n {
                return Err(format!("label {} outside 1..={}", l, n));
            }
            if seen[l - 1] {
                return Err(format!("label {} repeated", l));
            }
            seen[l - 1] = true;
        }
        for k in 0..labels.len() {
            p[labels[k] - 1] = labels[(k + 1) % labels.len()] - 1;
        }
        rest = open[close + 1..].trim_start();
    }
    Ok(p)
}

pub fn format_cycles(p: &[usize]) -> String {
    let mut s = String::new();
    for cyc in cycles(p) {
        s.push('(');
        let labels: Vec<String> = cyc.iter().map(|i| (i + 1).to_string()).collect();
        s.push_str(&labels.join(" "));
        s.push(')');
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origami {
    h: Perm,
    v: Perm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Rotation by a quarter turn, matrix ((0,−1),(1,0)).
    S,
    /// Horizontal shear, matrix ((1,1),(0,1)).
    T,
}

impl Origami {
    pub fn new(h: Perm, v: Perm) -> Result<Self> {
        if h.len() != v.len() || h.is_empty() {
            return Err(Error::Invalid("permutations must have the same positive size".into()));
        }
        if !is_permutation(&h) || !is_permutation(&v) {
            return Err(Error::Invalid("not a permutation".into()));
        }
        let o = Origami { h, v };
        if !o.is_connected() {
            return Err(Error::Invalid("permutation group is not transitive".into()));
        }
        Ok(o)
    }

    pub fn from_cycles(n: usize, h: &str, v: &str) -> Result<Self> {
        let hp = parse_cycles(h, n).map_err(Error::Invalid)?;
        let vp = parse_cycles(v, n).map_err(Error::Invalid)?;
        Origami::new(hp, vp)
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in [self.h[i], self.v[i]] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.n()
    }

    /// `v h v⁻¹ h⁻¹`: its cycles are the vertices; a cycle of length L has cone angle 2πL.
    pub fn commutator(&self) -> Perm {
        let hi = inverse(&self.h);
        let vi = inverse(&self.v);
        compose(&self.v, &compose(&self.h, &compose(&vi, &hi)))
    }

    pub fn stratum(&self) -> Stratum {
        let mut alpha = Vec::new();
        let mut marked = 0;
        for c in cycles(&self.commutator()) {
            if c.len() == 1 {
                marked += 1;
            } else {
                alpha.push(c.len() as u32 - 1);
            }
        }
        alpha.sort_unstable_by(|a, b| b.cmp(a));
        let total: u32 = alpha.iter().sum();
        Stratum { genus: total / 2 + 1, zero_count: alpha.len(), alpha, marked_points: marked }
    }

    /// Expand into unit squares; square `i` sits at `(i, 0)`.
    pub fn to_surface(&self) -> TranslationSurface {
        let n = self.n();
        let vi = inverse(&self.v);
        let polygons = (0..n)
            .map(|i| {
                let x = i as f64;
                Polygon::new(
                    format!("s{}", i + 1),
                    vec![Vec2::new(x, 0.0), Vec2::new(x + 1.0, 0.0), Vec2::new(x + 1.0, 1.0), Vec2::new(x, 1.0)],
                )
            })
            .collect();
        let mut gluings = Vec::with_capacity(2 * n);
        for i in 0..n {
            gluings.push((Side::new(i, 0), Side::new(vi[i], 2)));
            gluings.push((Side::new(i, 1), Side::new(self.h[i], 3)));
        }
        TranslationSurface::new(polygons, gluings, format!("origami h={} v={}", format_cycles(&self.h), format_cycles(&self.v)))
            .expect("origami gluings are structurally valid")
    }

    pub fn act(&self, g: Generator) -> Origami {
        match g {
            Generator::T => Origami { h: self.h.clone(), v: compose(&self.v, &inverse(&self.h)) },
            Generator::S => Origami { h: inverse(&self.v), v: self.h.clone() },
        }
    }

    pub fn relabel(&self, new_label: &[usize]) -> Origami {
        let n = self.n();
        let mut h = vec![0; n];
        let mut v = vec![0; n];
        for i in 0..n {
            h[new_label[i]] = new_label[self.h[i]];
            v[new_label[i]] = new_label[self.v[i]];
        }
        Origami { h, v }
    }

    /// Lexicographically least relabeling among breadth-first labelings
    /// (visit right neighbor, then top neighbor) from every start square.
    /// Returns the canonical origami and the map old label → new label.
    pub fn canonical_with_relabeling(&self) -> (Origami, Perm) {
        let n = self.n();
        let mut best: Option<(Origami, Perm)> = None;
        for start in 0..n {
            let mut label = vec![usize::MAX; n];
            label[start] = 0;
            let mut next = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for j in [self.h[i], self.v[i]] {
                    if label[j] == usize::MAX {
                        label[j] = next;
                        next += 1;
                        queue.push_back(j);
                    }
                }
            }
            let cand = self.relabel(&label);
            let better = match &best {
                None => true,
                Some((b, _)) => (&cand.h, &cand.v) < (&b.h, &b.v),
            };
            if better {
                best = Some((cand, label));
            }
        }
        best.expect("nonempty origami")
    }

    pub fn canonical(&self) -> Origami {
        self.canonical_with_relabeling().0
    }

    pub fn is_isomorphic(&self, other: &Origami) -> bool {
        self.n() == other.n() && self.canonical() == other.canonical()
    }
}

impl fmt::Display for Origami {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "squares {} h {} v {}", self.n(), format_cycles(&self.h), format_cycles(&self.v))
    }
}

#[derive(Clone, Debug)]
pub struct Orbit {
    /// Canonical representatives in discovery order.
    pub members: Vec<Origami>,
    /// False when the cap stopped the search.
    pub complete: bool,
}

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// Breadth-first closure under S and T, deduplicated by canonical form.
pub fn origami_orbit(o: &Origami, cap: usize) -> Orbit {
    let start = o.canonical();
    let mut index: HashMap<Origami, usize> = HashMap::new();
    let mut members = vec![start.clone()];
    index.insert(start, 0);
    let mut head = 0;
    while head < members.len() {
        let cur = members[head].clone();
        head += 1;
        for g in [Generator::S, Generator::T] {
            let next = cur.act(g).canonical();
            if !index.contains_key(&next) {
                if members.len() >= cap {
                    return Orbit { members, complete: false };
                }
                index.insert(next.clone(), members.len());
                members.push(next);
            }
        }
    }
    Orbit { members, complete: true }
}

/// Word in S, T (applied left to right to the surface) whose matrix product
/// sends the primitive vector `(p, q)` to `(1, 0)`.
pub fn word_to_horizontal(p: i64, q: i64) -> Result<Vec<Generator>> {
    if crate::numeric::gcd(p, q) != 1 {
        return Err(Error::Invalid(format!("({}, {}) is not primitive", p, q)));
    }
    // T^{-1} = S^3 T S T S as matrices; applied to a vector the rightmost acts first.
    const T_INV: [Generator; 7] =
        [Generator::S, Generator::T, Generator::S, Generator::T, Generator::S, Generator::S, Generator::S];
    let (mut x, mut y) = (p, q);
    let mut word = Vec::new();
    loop {
        if y == 0 {
            if x == 1 {
                return Ok(word);
            }
            word.extend([Generator::S, Generator::S]);
            x = -x;
            continue;
        }
        let k = -((x as f64) / (y as f64)).round() as i64;
        if k >= 0 {
            word.extend(std::iter::repeat_n(Generator::T, k as usize));
        } else {
            for _ in 0..(-k) {
                word.extend(T_INV);
            }
        }
        x += k * y;
        word.push(Generator::S);
        (x, y) = (-y, x);
    }
}
