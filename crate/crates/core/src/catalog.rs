//! Shipped example objects, loadable by name.

use nalgebra::{DMatrix, Matrix2xX};

use crate::billiards::{unfold, Fraction, RationalPolygon};
use crate::drift::AffineSubspaceSpec;
use crate::error::{Error, Result};
use crate::homology::periods;
use crate::numeric::Vec2;
use crate::origami::Origami;
use crate::surface::{Polygon, Side, TranslationSurface};

#[derive(Clone, Debug)]
pub enum CatalogItem {
    Surface(TranslationSurface),
    Origami(Origami),
    Polygon(RationalPolygon),
    Sheet(AffineSubspaceSpec),
}

impl CatalogItem {
    /// The translation surface behind the item (origamis are expanded,
    /// polygons unfolded); `None` for sheets.
    pub fn surface(&self) -> Result<Option<TranslationSurface>> {
        Ok(match self {
            CatalogItem::Surface(s) => Some(s.clone()),
            CatalogItem::Origami(o) => Some(o.to_surface()),
            CatalogItem::Polygon(q) => Some(unfold(q)?),
            CatalogItem::Sheet(_) => None,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CatalogItem::Surface(_) => "surface",
            CatalogItem::Origami(_) => "origami",
            CatalogItem::Polygon(_) => "polygon",
            CatalogItem::Sheet(_) => "sheet",
        }
    }
}

pub const CATALOG_NAMES: [&str; 10] = [
    "torus",
    "octagon",
    "l-origami",
    "h11-origami",
    "square-billiard",
    "triangle-iso",
    "triangle-5",
    "triangle-8",
    "zero-rel-sheet",
    "h11-surface",
];

pub fn square_torus() -> TranslationSurface {
    let sq = Polygon::new("sq", vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]);
    TranslationSurface::new(vec![sq], vec![(Side::new(0, 0), Side::new(0, 2)), (Side::new(0, 1), Side::new(0, 3))], "torus")
        .expect("torus gluings are structurally valid")
}

/// Regular octagon with unit sides, opposite sides glued.
pub fn regular_octagon() -> TranslationSurface {
    let mut verts = Vec::with_capacity(8);
    let mut cur = Vec2::zeros();
    for k in 0..8 {
        verts.push(cur);
        let a = k as f64 * std::f64::consts::FRAC_PI_4;
        cur += Vec2::new(a.cos(), a.sin());
    }
    let gluings = (0..4).map(|i| (Side::new(0, i), Side::new(0, i + 4))).collect();
    TranslationSurface::new(vec![Polygon::new("oct", verts)], gluings, "octagon").expect("octagon gluings are structurally valid")
}

pub fn l_origami() -> Origami {
    Origami::from_cycles(3, "(1 2)", "(1 3)").expect("valid origami")
}

/// Four-square origami in H(1,1).
pub fn h11_origami() -> Origami {
    Origami::from_cycles(4, "(1 2 3 4)", "(1 2)(3 4)").expect("valid origami")
}

pub fn square_billiard() -> RationalPolygon {
    let v = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
    RationalPolygon::new(v, vec![Fraction::new(1, 2); 4]).expect("valid polygon")
}

/// Sheet in H(1,1) through the four-square origami: the relative period is a
/// fixed real combination of the absolute periods (least-squares coefficients).
pub fn zero_rel_sheet() -> Result<AffineSubspaceSpec> {
    let s = h11_origami().to_surface();
    let p = periods(&s)?;
    let g = p.absolute_count();
    let k = p.k();
    if k != g + 1 {
        return Err(Error::Inconsistent(format!("expected one relative period, found {}", k - g)));
    }
    let a = DMatrix::from_fn(2, g, |r, j| p.entries[(r, j)]);
    let rel = DMatrix::from_fn(2, 1, |r, _| p.entries[(r, g)]);
    let coeffs = a.svd(true, true).solve(&rel, 1e-12).map_err(|e| Error::RankDeficient(e.to_string()))?;
    let mut eq: Vec<f64> = (0..g).map(|i| -coeffs[(i, 0)]).collect();
    eq.push(1.0);
    AffineSubspaceSpec::new("zero-rel", p.basis_tag.clone(), vec![eq], Matrix2xX::zeros(k), p.absolute_mask())
}

pub fn catalog_load(name: &str) -> Result<CatalogItem> {
    let right = |p, q| RationalPolygon::right_triangle(Fraction::new(p, q)).map(CatalogItem::Polygon);
    match name {
        "torus" => Ok(CatalogItem::Surface(square_torus())),
        "octagon" => Ok(CatalogItem::Surface(regular_octagon())),
        "l-origami" => Ok(CatalogItem::Origami(l_origami())),
        "h11-origami" => Ok(CatalogItem::Origami(h11_origami())),
        "h11-surface" => Ok(CatalogItem::Surface(h11_origami().to_surface().with_label("h11-surface"))),
        "square-billiard" => Ok(CatalogItem::Polygon(square_billiard())),
        "triangle-iso" => right(1, 4),
        "triangle-5" => right(1, 5),
        "triangle-8" => right(1, 8),
        "zero-rel-sheet" => Ok(CatalogItem::Sheet(zero_rel_sheet()?)),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_loads() {
        for name in CATALOG_NAMES {
            assert!(catalog_load(name).is_ok(), "{name}");
        }
        assert!(matches!(catalog_load("nope"), Err(Error::UnknownName(_))));
    }
}
