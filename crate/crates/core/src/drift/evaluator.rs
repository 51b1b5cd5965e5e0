use nalgebra::Matrix2xX;

use super::{check_unit_area, dprime_of_periods, u_from_systole, AffineSubspaceSpec, DriftConfig, Observable};
use crate::error::{Error, Result};
use crate::flat::{saddle_connections, systole};
use crate::homology::{periods, PeriodMatrix};
use crate::numeric::{lex_positive, Vec2};
use crate::sl2::{act, gauss_reduce, GroupElement};
use crate::surface::{stratum_of, TranslationSurface};

const MAX_CACHE_RADIUS: f64 = 64.0;

#[derive(Clone, Debug)]
enum SystoleSource {
    /// Flat torus with one marked point: reduce the image lattice.
    Lattice(Vec2, Vec2),
    /// Saddle-connection holonomies up to `radius`; answers are exact when
    /// `min |g v| · ‖g⁻¹‖ ≤ radius`, otherwise the surface is recomputed.
    Cached { holonomies: Vec<Vec2>, radius: f64 },
}

/// Evaluates functions at `g·x` for a fixed base surface `x` of area 1.
#[derive(Clone, Debug)]
pub struct Evaluator {
    surface: TranslationSurface,
    periods: PeriodMatrix,
    source: SystoleSource,
    cfg: DriftConfig,
}

impl Evaluator {
    pub fn new(s: &TranslationSurface, cfg: &DriftConfig) -> Result<Self> {
        Self::with_reach(s, cfg, 0.0)
    }

    /// Prepares fast systole evaluation for group elements of norm up to `e^reach`.
    pub fn with_reach(s: &TranslationSurface, cfg: &DriftConfig, reach: f64) -> Result<Self> {
        check_unit_area(s)?;
        let p = periods(s)?;
        let st = stratum_of(s)?;
        let source = if st.genus == 1 && st.vertex_count() == 1 {
            SystoleSource::Lattice(p.column(0), p.column(1))
        } else if reach > 0.0 {
            let radius = (1.25 * reach.exp()).min(MAX_CACHE_RADIUS);
            let mut holonomies: Vec<Vec2> =
                saddle_connections(s, radius)?.into_iter().map(|c| lex_positive(c.holonomy)).collect();
            holonomies.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
            holonomies.dedup_by(|a, b| (*a - *b).norm() <= 1e-12 * (1.0 + a.norm()));
            SystoleSource::Cached { holonomies, radius }
        } else {
            SystoleSource::Cached { holonomies: Vec::new(), radius: 0.0 }
        };
        Ok(Evaluator { surface: s.clone(), periods: p, source, cfg: cfg.clone() })
    }

    pub fn surface(&self) -> &TranslationSurface {
        &self.surface
    }

    pub fn config(&self) -> &DriftConfig {
        &self.cfg
    }

    pub fn base_periods(&self) -> &PeriodMatrix {
        &self.periods
    }

    pub fn systole(&self, g: &GroupElement) -> Result<f64> {
        match &self.source {
            SystoleSource::Lattice(v1, v2) => {
                let (w1, _, _) = gauss_reduce(g.apply(*v1), g.apply(*v2))?;
                Ok(w1.norm())
            }
            SystoleSource::Cached { holonomies, radius } => {
                let m = holonomies.iter().map(|v| g.apply(*v).norm()).fold(f64::INFINITY, f64::min);
                if m * g.operator_norm() <= *radius {
                    Ok(m)
                } else {
                    systole(&act(g, &self.surface))
                }
            }
        }
    }

    /// Periods of `g·x` in the basis of `x`.
    pub fn periods(&self, g: &GroupElement) -> Matrix2xX<f64> {
        let p = &self.periods.entries;
        let mut out = p.clone();
        for j in 0..p.ncols() {
            out[(0, j)] = g.a11 * p[(0, j)] + g.a12 * p[(1, j)];
            out[(1, j)] = g.a21 * p[(0, j)] + g.a22 * p[(1, j)];
        }
        out
    }

    pub fn u(&self, g: &GroupElement) -> Result<f64> {
        Ok(u_from_systole(self.systole(g)?, &self.cfg).u)
    }

    /// `s_ε·u^{1/2} + λu`, or +∞ when `g·x` lies on a catalog sheet.
    pub fn margulis(&self, g: &GroupElement, catalog: &[AffineSubspaceSpec]) -> Result<f64> {
        let u = self.u(g)?;
        if catalog.is_empty() {
            return Ok(self.cfg.lambda * u);
        }
        let p = self.periods(g);
        let window = u.powf(-self.cfg.k);
        let exponent = -self.cfg.eps * self.cfg.delta;
        let mut s_eps = 0.0;
        for sheet in catalog {
            if sheet.basis_tag != self.periods.basis_tag {
                return Err(Error::BasisMismatch { expected: sheet.basis_tag.clone(), found: self.periods.basis_tag.clone() });
            }
            let d = dprime_of_periods(&p, sheet)?;
            if d == 0.0 {
                return Ok(f64::INFINITY);
            }
            if d <= window {
                s_eps += d.powf(exponent);
            }
        }
        Ok(s_eps * u.sqrt() + self.cfg.lambda * u)
    }
}

/// Functions that the averaging operators can be applied to.
#[derive(Clone, Debug)]
pub enum DriftFn {
    U,
    Margulis(Vec<AffineSubspaceSpec>),
    Observable(Observable),
}

impl DriftFn {
    pub fn eval(&self, ev: &Evaluator, g: &GroupElement) -> Result<f64> {
        match self {
            DriftFn::U => ev.u(g),
            DriftFn::Margulis(catalog) => ev.margulis(g, catalog),
            DriftFn::Observable(Observable::Constant(c)) => Ok(*c),
            DriftFn::Observable(obs) => Ok(obs.eval_systole(ev.systole(g)?)),
        }
    }
}

/// The Margulis function at `s` (area 1) for a sheet catalog.
pub fn margulis_f(s: &TranslationSurface, catalog: &[AffineSubspaceSpec], cfg: &DriftConfig) -> Result<f64> {
    Evaluator::new(s, cfg)?.margulis(&GroupElement::IDENTITY, catalog)
}
