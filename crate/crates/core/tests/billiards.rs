use tsf_core::{
    billiard_count, catalog_load, cesaro_sv, cesaro_sv_surface, count_series, stratum_of, unfold, validate_surface,
    CatalogItem, RationalPolygon, SeriesKind, CATALOG_NAMES,
};

fn polygons() -> Vec<(&'static str, RationalPolygon)> {
    CATALOG_NAMES
        .iter()
        .filter_map(|&n| match catalog_load(n).unwrap() {
            CatalogItem::Polygon(q) => Some((n, q)),
            _ => None,
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Half the number of primitive vectors of `scale·Z²` with norm ≤ `r`.
fn lattice_count(scale: f64, r: f64) -> usize {
    let n = (r / scale).floor() as i64 + 1;
    let mut c = 0;
    for p in -n..=n {
        for q in -n..=n {
            let pos = p > 0 || (p == 0 && q > 0);
            if pos && gcd(p, q) == 1 && scale * ((p * p + q * q) as f64).sqrt() <= r * (1.0 + 1e-12) {
                c += 1;
            }
        }
    }
    c
}

#[test]
fn square_billiard_counts() {
    let q = match catalog_load("square-billiard").unwrap() {
        CatalogItem::Polygon(q) => q,
        _ => unreachable!(),
    };
    assert_eq!(billiard_count(&q, 1.9).unwrap(), 0);
    assert_eq!(billiard_count(&q, 2.0).unwrap(), 2);
    for t in [2.5, 3.0, 4.5, 7.0, 11.0] {
        assert_eq!(billiard_count(&q, t).unwrap(), lattice_count(2.0, t), "T = {t}");
    }
}

#[test]
fn every_polygon_unfolds_to_a_closed_surface() {
    for (name, q) in polygons() {
        let s = unfold(&q).unwrap();
        assert!(validate_surface(&s).is_valid(), "{name}");
        assert_eq!(s.polygons().len() as u64, 2 * q.denominator_lcm(), "{name}");
        assert!((tsf_core::area(&s) - s.polygons().len() as f64 * q.area()).abs() < 1e-9);
        stratum_of(&s).unwrap();
    }
}

#[test]
fn counts_are_monotone_integers() {
    for (name, q) in polygons() {
        let mut last = 0;
        for t in [0.5, 1.0, 2.0, 3.0, 5.0, 8.0] {
            let n = billiard_count(&q, t).unwrap();
            assert!(n >= last, "{name}");
            last = n;
        }
    }
}

/// Cesàro series on the torus against the trapezoid rule applied to an
/// independent primitive-vector count.
#[test]
fn torus_cesaro_matches_lattice_oracle() {
    let s = catalog_load("torus").unwrap().surface().unwrap().unwrap();
    let (t_max, steps) = (4.0, 40);
    let series = cesaro_sv_surface(&s, t_max, steps).unwrap();
    assert_eq!(series.kind, SeriesKind::Cesaro);
    assert_eq!(series.points.len(), steps);
    let h = t_max / steps as f64;
    let f = |t: f64| lattice_count(1.0, t.exp()) as f64 * (-2.0 * t).exp();
    let mut integral = 0.0;
    for i in 1..=steps {
        let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
        integral += 0.5 * h * (f(a) + f(b));
        let (t, v) = series.points[i - 1];
        assert!((t - b).abs() < 1e-12);
        assert!((v - integral / b).abs() < 1e-12, "t = {b}: {v} vs {}", integral / b);
    }
}

#[test]
fn short_series_are_well_formed() {
    for (_, q) in polygons() {
        let s = cesaro_sv(&q, 0.5, 10).unwrap();
        assert_eq!(s.points.len(), 10);
        assert!(s.points.iter().all(|p| p.1.is_finite() && p.1 >= 0.0));
    }
}

#[test]
fn cesaro_smooths_the_raw_series() {
    for (name, q) in polygons() {
        let s = unfold(&q).unwrap();
        let (raw, ces) = count_series(&s, 4.0, 40).unwrap();
        let upper = |pts: &[(f64, f64)], scale: bool| -> Vec<f64> {
            pts.iter()
                .filter(|p| p.0 >= 2.0 - 1e-9)
                .map(|&(t, v)| if scale { v * (-2.0 * t).exp() } else { v })
                .collect()
        };
        let var = |xs: Vec<f64>| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        };
        assert!(var(upper(&ces.points, false)) < var(upper(&raw.points, true)), "{name}");
    }
}

#[test]
fn bad_parameters_are_rejected() {
    let (_, q) = polygons().remove(0);
    assert!(cesaro_sv(&q, 0.0, 20).is_err());
    assert!(cesaro_sv(&q, 2.0, 9).is_err());
}
