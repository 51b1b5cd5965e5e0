use nalgebra::{DMatrix, Matrix2xX};

use crate::error::{Error, Result};
use crate::homology::periods;
use crate::sl2::GroupElement;
use crate::surface::TranslationSurface;

/// A sheet `{P : (P - offset)·Wᵀ = 0}` in period coordinates, where each row of
/// `W` is a real covector applied to both rows of the 2×k period matrix.
#[derive(Clone, Debug)]
pub struct AffineSubspaceSpec {
    pub name: String,
    pub basis_tag: String,
    pub equations: Vec<Vec<f64>>,
    pub offset: Matrix2xX<f64>,
    pub absolute_mask: Vec<bool>,
    /// Orthogonal projector onto the row space of `W` (k×k).
    projector: DMatrix<f64>,
}

impl AffineSubspaceSpec {
    pub fn new(
        name: impl Into<String>,
        basis_tag: impl Into<String>,
        equations: Vec<Vec<f64>>,
        offset: Matrix2xX<f64>,
        absolute_mask: Vec<bool>,
    ) -> Result<Self> {
        let k = offset.ncols();
        if absolute_mask.len() != k {
            return Err(Error::Invalid(format!("absolute mask has {} entries, expected {}", absolute_mask.len(), k)));
        }
        if equations.is_empty() {
            return Err(Error::Invalid("a sheet needs at least one equation".into()));
        }
        if let Some(e) = equations.iter().find(|e| e.len() != k) {
            return Err(Error::Invalid(format!("equation has {} coefficients, expected {}", e.len(), k)));
        }
        let r = equations.len();
        let w = DMatrix::from_fn(r, k, |i, j| equations[i][j]);
        let sv = w.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = if r > k { 0.0 } else { sv.min() };
        if smax.is_nan() || smax <= 0.0 || smin <= 1e-10 * smax {
            return Err(Error::RankDeficient(format!("sheet equations have rank < {r}")));
        }
        let gram = &w * w.transpose();
        let inv = gram.try_inverse().ok_or_else(|| Error::RankDeficient("singular equation Gram matrix".into()))?;
        let projector = w.transpose() * inv * &w;
        Ok(AffineSubspaceSpec {
            name: name.into(),
            basis_tag: basis_tag.into(),
            equations,
            offset,
            absolute_mask,
            projector,
        })
    }

    pub fn k(&self) -> usize {
        self.offset.ncols()
    }

    /// The image sheet `g·𝓛` (equations commute with the action on rows).
    pub fn transformed(&self, g: &GroupElement) -> AffineSubspaceSpec {
        let mut offset = self.offset.clone();
        for j in 0..offset.ncols() {
            let (x, y) = (offset[(0, j)], offset[(1, j)]);
            offset[(0, j)] = g.a11 * x + g.a12 * y;
            offset[(1, j)] = g.a21 * x + g.a22 * y;
        }
        AffineSubspaceSpec { offset, ..self.clone() }
    }

    /// Residual `c = (P - offset)·Π`: difference to the nearest sheet point.
    pub fn residual(&self, p: &Matrix2xX<f64>) -> Result<Matrix2xX<f64>> {
        if p.ncols() != self.k() {
            return Err(Error::Invalid(format!("period matrix has {} columns, sheet expects {}", p.ncols(), self.k())));
        }
        let diff = p - &self.offset;
        let mut c = Matrix2xX::zeros(self.k());
        for r in 0..2 {
            for j in 0..self.k() {
                c[(r, j)] = (0..self.k()).map(|i| diff[(r, i)] * self.projector[(i, j)]).sum();
            }
        }
        Ok(c)
    }

    /// Whether `p` lies on the sheet up to 1e-12·(1 + ‖P‖).
    pub fn contains(&self, p: &Matrix2xX<f64>) -> Result<bool> {
        let c = self.residual(p)?;
        Ok(c.norm() <= 1e-12 * (1.0 + p.norm()))
    }
}

/// `min(1, max(‖c_rel‖, ‖c_abs‖^{1/2}))` for the residual `c` of `p`; exactly 0 on the sheet.
pub fn dprime_of_periods(p: &Matrix2xX<f64>, sheet: &AffineSubspaceSpec) -> Result<f64> {
    let c = sheet.residual(p)?;
    if c.norm() <= 1e-12 * (1.0 + p.norm()) {
        return Ok(0.0);
    }
    let (mut abs2, mut rel2) = (0.0, 0.0);
    for j in 0..c.ncols() {
        let s = c[(0, j)].powi(2) + c[(1, j)].powi(2);
        if sheet.absolute_mask[j] {
            abs2 += s;
        } else {
            rel2 += s;
        }
    }
    Ok(rel2.sqrt().max(abs2.sqrt().sqrt()).min(1.0))
}

pub fn dprime(s: &TranslationSurface, sheet: &AffineSubspaceSpec) -> Result<f64> {
    let p = periods(s)?;
    if p.basis_tag != sheet.basis_tag {
        return Err(Error::BasisMismatch { expected: sheet.basis_tag.clone(), found: p.basis_tag });
    }
    dprime_of_periods(&p.entries, sheet)
}
