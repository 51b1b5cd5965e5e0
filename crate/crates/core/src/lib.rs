//! Translation surfaces in period coordinates, the SL(2,R) action, flat
//! geometry and cylinder counting, rational billiards, and Margulis-function
//! drift experiments.

pub mod billiards;
pub mod catalog;
pub mod drift;
pub mod error;
pub mod export;
pub mod flat;
pub mod format;
pub mod homology;
pub mod numeric;
pub mod origami;
pub mod rng;
pub mod sl2;
pub mod surface;

pub use billiards::{
    billiard_count, cesaro_sv, cesaro_sv_surface, count_series, unfold, CountSeries, Fraction, RationalPolygon, SeriesKind,
};
pub use catalog::{catalog_load, CatalogItem, CATALOG_NAMES};
pub use drift::{
    circle_average, dprime, drift_check, hyperbolic_fraction, iteration_check, margulis_f, recurrence_fraction,
    recurrence_u, scheme_average, taut_hodge_norm, AffineSubspaceSpec, DriftConfig, DriftFn, DriftReport, Evaluator,
    Observable, RecurrenceValue, Scheme, SchemeOptions,
};
pub use error::{Error, Result};
pub use flat::{cylinders, saddle_connections, systole, Cylinder, SaddleConnection};
pub use format::{parse_origami, parse_polygon, parse_sheets, parse_surface, write_origami, write_polygon, write_sheet, write_surface};
pub use homology::{periods, PeriodMatrix};
pub use numeric::Vec2;
pub use origami::{origami_orbit, Generator, Origami};
pub use sl2::{act, generator, kak, torus_reduce, CocycleRecord, GeneratorKind, GroupElement};
pub use surface::{area, normalize_area, stratum_of, validate_surface, Polygon, Side, Stratum, TranslationSurface, ValidationReport};
