//! Fixtures shared by the criterion benches.

use tsf_core::{catalog_load, normalize_area, TranslationSurface};

/// A catalog surface (polygons unfolded, origamis expanded).
pub fn surface(name: &str) -> TranslationSurface {
    catalog_load(name)
        .and_then(|item| item.surface())
        .ok()
        .flatten()
        .unwrap_or_else(|| panic!("{name} is not a surface in the catalog"))
}

/// The same surface scaled to area one.
pub fn unit_surface(name: &str) -> TranslationSurface {
    normalize_area(&surface(name))
}
