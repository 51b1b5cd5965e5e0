//! Recurrence function, tautological Hodge norm, distance to affine sheets,
//! the Margulis function and the averaging operators used to test drift.

mod averages;
mod checks;
mod evaluator;
pub mod haar;
mod sheet;

use std::fmt;
use std::str::FromStr;

pub use averages::{circle_average, circle_nodes, scheme_average, Scheme, SchemeOptions};
pub use checks::{
    drift_check, hyperbolic_fraction, iteration_check, recurrence_fraction, DriftReport, IterationReport,
};
pub use evaluator::{margulis_f, DriftFn, Evaluator};
pub use sheet::{dprime, dprime_of_periods, AffineSubspaceSpec};

use crate::error::{Error, Result};
use crate::flat::systole;
use crate::sl2::GroupElement;
use crate::surface::{area, TranslationSurface};

#[derive(Clone, Debug, PartialEq)]
pub struct DriftConfig {
    /// Exponent δ of the sheet distance, in (0, 0.1].
    pub delta: f64,
    pub eps: f64,
    pub lambda: f64,
    /// Sheet window exponent: a sheet counts when dprime ≤ u^{-k}.
    pub k: f64,
    /// δ_u in u = max(2, sys^{-(1+δ_u)}).
    pub u_exponent: f64,
    pub nodes: usize,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig { delta: 0.1, eps: 0.5, lambda: 1.0, k: 1.0, u_exponent: 0.5, nodes: 1024 }
    }
}

impl DriftConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("eps", self.eps), ("lambda", self.lambda), ("k", self.k), ("u_exponent", self.u_exponent)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.delta > 0.0 && self.delta <= 0.1) {
            return Err(Error::Invalid(format!("delta must lie in (0, 0.1], got {}", self.delta)));
        }
        if self.eps * self.delta * self.k > 0.5 {
            return Err(Error::Invalid(format!(
                "eps*delta*k = {} exceeds 1/2",
                self.eps * self.delta * self.k
            )));
        }
        if self.nodes < 16 {
            return Err(Error::Invalid(format!("at least 16 quadrature nodes are required, got {}", self.nodes)));
        }
        Ok(())
    }

    /// Exponent 1 + δ_u, the log-Lipschitz constant of u along a_t.
    pub fn u_power(&self) -> f64 {
        1.0 + self.u_exponent
    }
}

/// Hodge norm at `g·x` of `v1·Re ω + v2·Im ω`: `|(v1, v2)·g^{-1}|`.
pub fn taut_hodge_norm(v1: f64, v2: f64, g: &GroupElement) -> f64 {
    let h = g.inverse();
    let u1 = v1 * h.a11 + v2 * h.a21;
    let u2 = v1 * h.a12 + v2 * h.a22;
    u1.hypot(u2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceValue {
    pub u: f64,
    pub systole_used: f64,
}

pub fn u_from_systole(sys: f64, cfg: &DriftConfig) -> RecurrenceValue {
    RecurrenceValue { u: sys.powf(-cfg.u_power()).max(2.0), systole_used: sys }
}

pub(crate) fn check_unit_area(s: &TranslationSurface) -> Result<()> {
    let a = area(s);
    if (a - 1.0).abs() > 1e-6 {
        return Err(Error::Invalid(format!("surface must have area 1, found {a}")));
    }
    Ok(())
}

pub fn recurrence_u(s: &TranslationSurface, cfg: &DriftConfig) -> Result<RecurrenceValue> {
    check_unit_area(s)?;
    Ok(u_from_systole(systole(s)?, cfg))
}

/// Test functions of the systole with values in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// 0 on [0, s0], 1 on [s1, ∞), linear between.
    SysBump { s0: f64, s1: f64 },
    /// Indicator of {sys ≥ s0}.
    SysIndicator { s0: f64 },
    /// Piecewise-linear in the systole through `(s, value)` knots, constant outside.
    Grid(Vec<(f64, f64)>),
    Constant(f64),
}

impl Observable {
    pub fn sys_bump(s0: f64, s1: f64) -> Result<Self> {
        if !(0.0 <= s0 && s0 < s1) {
            return Err(Error::Invalid(format!("sys_bump needs 0 <= s0 < s1, got {s0}, {s1}")));
        }
        Ok(Observable::SysBump { s0, s1 })
    }

    pub fn grid(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Invalid("grid observable needs at least one knot".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid("grid knots must have distinct systole values".into()));
        }
        if knots.iter().any(|&(_, v)| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Invalid("grid values must lie in [0, 1]".into()));
        }
        Ok(Observable::Grid(knots))
    }

    pub fn eval_systole(&self, sys: f64) -> f64 {
        match self {
            Observable::SysBump { s0, s1 } => ((sys - s0) / (s1 - s0)).clamp(0.0, 1.0),
            Observable::SysIndicator { s0 } => {
                if sys >= *s0 {
                    1.0
                } else {
                    0.0
                }
            }
            Observable::Grid(knots) => {
                let i = knots.partition_point(|k| k.0 <= sys);
                if i == 0 {
                    knots[0].1
                } else if i == knots.len() {
                    knots[i - 1].1
                } else {
                    let (a, b) = (knots[i - 1], knots[i]);
                    a.1 + (b.1 - a.1) * (sys - a.0) / (b.0 - a.0)
                }
            }
            Observable::Constant(c) => *c,
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// `sys_bump:s0:s1`, `sys_indicator:s0`, `grid:s/v,s/v,...` or `const:c`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse observable {text:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["sys_bump", a, b] => Observable::sys_bump(num(a)?, num(b)?),
            ["sys_indicator", a] => Ok(Observable::SysIndicator { s0: num(a)? }),
            ["const", c] => Ok(Observable::Constant(num(c)?)),
            ["grid", knots] => {
                let pts = knots
                    .split(',')
                    .map(|kv| {
                        let (s, v) = kv.split_once('/').ok_or_else(bad)?;
                        Ok((num(s)?, num(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Observable::grid(pts)
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::SysBump { s0, s1 } => write!(f, "sys_bump:{s0}:{s1}"),
            Observable::SysIndicator { s0 } => write!(f, "sys_indicator:{s0}"),
            Observable::Constant(c) => write!(f, "const:{c}"),
            Observable::Grid(k) => {
                let parts: Vec<String> = k.iter().map(|(s, v)| format!("{s}/{v}")).collect();
                write!(f, "grid:{}", parts.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_constraints() {
        assert!(DriftConfig::default().validate().is_ok());
        let bad = DriftConfig { eps: 10.0, ..DriftConfig::default() };
        assert!(bad.validate().is_err());
        let few = DriftConfig { nodes: 8, ..DriftConfig::default() };
        assert!(few.validate().is_err());
    }

    #[test]
    fn hodge_norm_examples() {
        assert_eq!(taut_hodge_norm(1.0, 0.0, &GroupElement::IDENTITY), 1.0);
        let t = 1.3;
        assert!((taut_hodge_norm(1.0, 0.0, &GroupElement::geodesic(t)) - (-t).exp()).abs() < 1e-15);
    }

    #[test]
    fn observables() {
        let b: Observable = "sys_bump:0.3:0.5".parse().unwrap();
        assert_eq!(b.eval_systole(0.2), 0.0);
        assert_eq!(b.eval_systole(0.6), 1.0);
        assert!((b.eval_systole(0.4) - 0.5).abs() < 1e-15);
        let g: Observable = "grid:0.1/0,0.5/1".parse().unwrap();
        assert!((g.eval_systole(0.3) - 0.5).abs() < 1e-15);
        assert_eq!(g.eval_systole(2.0), 1.0);
        assert!("nope".parse::<Observable>().is_err());
        assert_eq!(b.to_string().parse::<Observable>().unwrap(), b);
    }
}
