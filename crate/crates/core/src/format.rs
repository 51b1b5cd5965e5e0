//! Text formats: `.tsf` surfaces, `.org` origamis, polygon files and sheet catalogs.

use std::collections::{HashMap, HashSet};

use nalgebra::Matrix2xX;

use crate::billiards::{Fraction, RationalPolygon};
use crate::drift::AffineSubspaceSpec;
use crate::error::{Error, Result};
use crate::numeric::Vec2;
use crate::origami::{format_cycles, parse_cycles, Origami};
use crate::surface::{Polygon, Side, TranslationSurface};

/// Non-empty lines with comments (`#`) stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| syntax(line, format!("expected a number, got {:?}", tok)))
}

fn expect_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, kind: &str) -> Result<()> {
    match lines.next() {
        Some((n, l)) => {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks == ["format", kind, "1"] {
                Ok(())
            } else {
                Err(syntax(n, format!("expected `format {} 1`", kind)))
            }
        }
        None => Err(syntax(1, "empty input")),
    }
}

fn parse_edge_ref(tok: &str, names: &HashMap<String, usize>, polys: &[Polygon], line: usize) -> Result<Side> {
    let (name, edge) =
        tok.rsplit_once(".e").ok_or_else(|| syntax(line, format!("edge reference {:?} is not <name>.e<i>", tok)))?;
    let edge: usize = edge.parse().map_err(|_| syntax(line, format!("bad edge index in {:?}", tok)))?;
    let &p = names.get(name).ok_or_else(|| Error::DanglingEdge(format!("line {}: unknown polygon {:?}", line, name)))?;
    if edge >= polys[p].len() {
        return Err(Error::DanglingEdge(format!("line {}: polygon {:?} has no edge {}", line, name, edge)));
    }
    Ok(Side::new(p, edge))
}

pub fn parse_surface(text: &str) -> Result<TranslationSurface> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "tsf")?;
    let mut polys: Vec<Polygon> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut pending: Vec<(usize, String, String)> = Vec::new();
    let mut label = String::new();
    for (n, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("label") => label = line["label".len()..].trim().to_string(),
            Some("polygon") => {
                let name = toks.next().ok_or_else(|| syntax(n, "polygon needs a name"))?;
                let coords: Vec<f64> = toks.map(|t| parse_f64(t, n)).collect::<Result<_>>()?;
                if !coords.len().is_multiple_of(2) || coords.len() < 6 {
                    return Err(syntax(n, "polygon needs at least 3 vertices given as x y pairs"));
                }
                if names.insert(name.to_string(), polys.len()).is_some() {
                    return Err(syntax(n, format!("duplicate polygon name {:?}", name)));
                }
                let verts = coords.chunks(2).map(|c| Vec2::new(c[0], c[1])).collect();
                polys.push(Polygon::new(name, verts));
            }
            Some("glue") => {
                let a = toks.next().ok_or_else(|| syntax(n, "glue needs two edge references"))?;
                let b = toks.next().ok_or_else(|| syntax(n, "glue needs two edge references"))?;
                if toks.next().is_some() {
                    return Err(syntax(n, "trailing tokens after glue"));
                }
                pending.push((n, a.to_string(), b.to_string()));
            }
            Some(other) => return Err(syntax(n, format!("unknown keyword {:?}", other))),
            None => {}
        }
    }
    let mut used: HashSet<Side> = HashSet::new();
    let mut gluings = Vec::with_capacity(pending.len());
    for (n, a, b) in pending {
        let sa = parse_edge_ref(&a, &names, &polys, n)?;
        let sb = parse_edge_ref(&b, &names, &polys, n)?;
        for (side, tok) in [(sa, &a), (sb, &b)] {
            if sa == sb || !used.insert(side) {
                return Err(Error::EdgeReused(format!("line {}: {}", n, tok)));
            }
        }
        gluings.push((sa, sb));
    }
    TranslationSurface::new(polys, gluings, label)
}

pub fn write_surface(s: &TranslationSurface) -> String {
    let mut out = String::from("format tsf 1\n");
    if !s.label().is_empty() {
        out.push_str(&format!("label {}\n", s.label()));
    }
    for p in s.polygons() {
        out.push_str("polygon ");
        out.push_str(&p.name);
        for v in &p.vertices {
            out.push_str(&format!(" {} {}", v.x, v.y));
        }
        out.push('\n');
    }
    for (a, b) in s.gluings() {
        let pa = &s.polygons()[a.polygon].name;
        let pb = &s.polygons()[b.polygon].name;
        out.push_str(&format!("glue {}.e{} {}.e{}\n", pa, a.edge, pb, b.edge));
    }
    out
}

pub fn parse_origami(text: &str) -> Result<Origami> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "origami")?;
    let mut n = None;
    let mut h = None;
    let mut v = None;
    for (ln, line) in lines {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "squares" => n = Some(rest.trim().parse::<usize>().map_err(|_| syntax(ln, "bad square count"))?),
            "h" => h = Some((ln, rest.trim().to_string())),
            "v" => v = Some((ln, rest.trim().to_string())),
            other => return Err(syntax(ln, format!("unknown keyword {:?}", other))),
        }
    }
    let n = n.ok_or_else(|| syntax(1, "missing `squares`"))?;
    let (hl, h) = h.ok_or_else(|| syntax(1, "missing `h`"))?;
    let (vl, v) = v.ok_or_else(|| syntax(1, "missing `v`"))?;
    let hp = parse_cycles(&h, n).map_err(|m| syntax(hl, m))?;
    let vp = parse_cycles(&v, n).map_err(|m| syntax(vl, m))?;
    Origami::new(hp, vp)
}

pub fn write_origami(o: &Origami) -> String {
    format!("format origami 1\nsquares {}\nh {}\nv {}\n", o.n(), format_cycles(o.h()), format_cycles(o.v()))
}

pub fn parse_polygon(text: &str) -> Result<RationalPolygon> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, "poly")?;
    let mut verts = Vec::new();
    let mut angles = None;
    for (n, line) in lines {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("vertex") => {
                let x = parse_f64(toks.next().ok_or_else(|| syntax(n, "vertex needs x y"))?, n)?;
                let y = parse_f64(toks.next().ok_or_else(|| syntax(n, "vertex needs x y"))?, n)?;
                verts.push(Vec2::new(x, y));
            }
            Some("angles") => {
                let fr: Vec<Fraction> = toks
                    .map(|t| {
                        let (p, q) = t.split_once('/').unwrap_or((t, "1"));
                        let p = p.parse::<u32>().map_err(|_| syntax(n, format!("bad fraction {:?}", t)))?;
                        let q = q.parse::<u32>().map_err(|_| syntax(n, format!("bad fraction {:?}", t)))?;
                        Ok(Fraction { p, q })
                    })
                    .collect::<Result<_>>()?;
                angles = Some(fr);
            }
            Some(other) => return Err(syntax(n, format!("unknown keyword {:?}", other))),
            None => {}
        }
    }
    let angles = angles.ok_or_else(|| syntax(1, "missing `angles`"))?;
    RationalPolygon::new(verts, angles)
}

pub fn write_polygon(q: &RationalPolygon) -> String {
    let mut out = String::from("format poly 1\n");
    for v in q.vertices() {
        out.push_str(&format!("vertex {} {}\n", v.x, v.y));
    }
    let fr: Vec<String> = q.angle_fractions().iter().map(|f| format!("{}/{}", f.p, f.q)).collect();
    out.push_str(&format!("angles {}\n", fr.join(" ")));
    out
}

/// Parse a sheet catalog: one or more blocks, each starting with `format sheet 1`.
pub fn parse_sheets(text: &str) -> Result<Vec<AffineSubspaceSpec>> {
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    for (n, line) in content_lines(text) {
        if line.split_whitespace().next() == Some("format") {
            blocks.push(Vec::new());
        }
        match blocks.last_mut() {
            Some(b) => b.push((n, line)),
            None => return Err(syntax(n, "expected `format sheet 1`")),
        }
    }
    blocks.into_iter().map(parse_sheet_block).collect()
}

fn parse_sheet_block(lines: Vec<(usize, &str)>) -> Result<AffineSubspaceSpec> {
    let first_line = lines.first().map_or(1, |l| l.0);
    let mut it = lines.into_iter();
    expect_header(&mut it, "sheet")?;
    let mut tag = None;
    let mut absolute: Option<Vec<usize>> = None;
    let mut equations: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut offset: Option<(usize, Vec<f64>)> = None;
    let mut name = String::new();
    for (n, line) in it {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("name") => name = line["name".len()..].trim().to_string(),
            Some("basis") => tag = Some(toks.next().ok_or_else(|| syntax(n, "basis needs a tag"))?.to_string()),
            Some("absolute") => {
                absolute = Some(
                    toks.map(|t| t.parse::<usize>().map_err(|_| syntax(n, format!("bad index {:?}", t))))
                        .collect::<Result<_>>()?,
                )
            }
            Some("eq") => equations.push((n, toks.map(|t| parse_f64(t, n)).collect::<Result<_>>()?)),
            Some("offset") => offset = Some((n, toks.map(|t| parse_f64(t, n)).collect::<Result<_>>()?)),
            Some(other) => return Err(syntax(n, format!("unknown keyword {:?}", other))),
            None => {}
        }
    }
    let tag = tag.ok_or_else(|| syntax(first_line, "missing `basis`"))?;
    let (on, offset) = offset.ok_or_else(|| syntax(first_line, "missing `offset`"))?;
    if offset.len() % 2 != 0 || offset.is_empty() {
        return Err(syntax(on, "offset needs 2k reals"));
    }
    let k = offset.len() / 2;
    let mut eqs = Vec::new();
    for (n, e) in equations {
        if e.len() != k {
            return Err(syntax(n, format!("equation has {} coefficients, expected {}", e.len(), k)));
        }
        eqs.push(e);
    }
    let absolute = absolute.unwrap_or_default();
    let mut mask = vec![false; k];
    for i in absolute {
        if i >= k {
            return Err(syntax(first_line, format!("absolute index {} out of range", i)));
        }
        mask[i] = true;
    }
    let offset = Matrix2xX::from_row_slice(&offset);
    AffineSubspaceSpec::new(name, tag, eqs, offset, mask)
}

pub fn write_sheet(spec: &AffineSubspaceSpec) -> String {
    let mut out = String::from("format sheet 1\n");
    if !spec.name.is_empty() {
        out.push_str(&format!("name {}\n", spec.name));
    }
    out.push_str(&format!("basis {}\n", spec.basis_tag));
    let abs: Vec<String> = spec.absolute_mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i.to_string()).collect();
    out.push_str(&format!("absolute {}\n", abs.join(" ")));
    for e in &spec.equations {
        let cs: Vec<String> = e.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("eq {}\n", cs.join(" ")));
    }
    let mut vals = Vec::new();
    for r in 0..2 {
        for j in 0..spec.offset.ncols() {
            vals.push(spec.offset[(r, j)].to_string());
        }
    }
    out.push_str(&format!("offset {}\n", vals.join(" ")));
    out
}
