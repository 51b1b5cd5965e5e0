//! Flat geometry: saddle connections, systole and cylinders.

mod cylinder;
mod forget;
mod saddle;
pub(crate) mod structure;

pub use cylinder::Cylinder;
pub use saddle::{SaddleConnection, DEFAULT_DEVELOPMENT_CAP};

use crate::error::{Error, Result};
use crate::homology::periods;
use crate::surface::{area, stratum_of, TranslationSurface};
use structure::FlatStructure;

/// All saddle connections of length at most `lmax` (both orientations).
pub fn saddle_connections(s: &TranslationSurface, lmax: f64) -> Result<Vec<SaddleConnection>> {
    saddle_connections_capped(s, lmax, DEFAULT_DEVELOPMENT_CAP)
}

pub fn saddle_connections_capped(s: &TranslationSurface, lmax: f64, cap: usize) -> Result<Vec<SaddleConnection>> {
    check_length(lmax)?;
    let fs = FlatStructure::new(s)?;
    saddle::enumerate(&fs, lmax, cap)
}

fn check_length(lmax: f64) -> Result<()> {
    if !(lmax > 0.0 && lmax.is_finite()) {
        return Err(Error::Invalid(format!("length bound must be positive and finite, got {lmax}")));
    }
    Ok(())
}

/// Length of the shortest saddle connection.
pub fn systole(s: &TranslationSurface) -> Result<f64> {
    systole_capped(s, DEFAULT_DEVELOPMENT_CAP)
}

pub fn systole_capped(s: &TranslationSurface, cap: usize) -> Result<f64> {
    let fs = FlatStructure::new(s)?;
    if fs.cone.len() == 1 && fs.marked[0] {
        // A flat torus with one marked point: shortest lattice vector.
        let p = periods(s)?;
        let (w1, _, _) = crate::sl2::gauss_reduce(p.column(0), p.column(1))?;
        return Ok(w1.norm());
    }
    // Every polygon side is a saddle connection, so the shortest side bounds the search.
    let max_len = fs.min_side_length();
    let mut l = max_len / 4.0;
    loop {
        let l_now = l.min(max_len);
        let scs = saddle::enumerate(&fs, l_now, cap)?;
        if let Some(c) = scs.first() {
            return Ok(c.length);
        }
        if l_now >= max_len {
            return Err(Error::Degenerate("no saddle connection found up to the shortest side".into()));
        }
        l *= 2.0;
    }
}

/// Maximal cylinders with waist at most `lmax`, in canonical order
/// (waist, direction angle, height). Marked points are forgotten.
pub fn cylinders(s: &TranslationSurface, lmax: f64) -> Result<Vec<Cylinder>> {
    cylinders_capped(s, lmax, DEFAULT_DEVELOPMENT_CAP)
}

pub fn cylinders_capped(s: &TranslationSurface, lmax: f64, cap: usize) -> Result<Vec<Cylinder>> {
    check_length(lmax)?;
    let st = stratum_of(s)?;
    if st.genus == 1 {
        let p = periods(s)?;
        return cylinder::lattice_cylinders(p.column(0), p.column(1), area(s), lmax);
    }
    let fs = FlatStructure::new(&forget::forget_marked_points(s))?;
    cylinder::strip_scan(&fs, lmax, cap)
}
