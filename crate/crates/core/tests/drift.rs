use std::f64::consts::TAU;

use nalgebra::Matrix2xX;
use tsf_core::catalog::{h11_origami, square_torus, zero_rel_sheet};
use tsf_core::drift::haar::haar_average;
use tsf_core::{
    act, circle_average, dprime, drift_check, hyperbolic_fraction, margulis_f, normalize_area, periods, recurrence_fraction,
    recurrence_u, scheme_average, AffineSubspaceSpec, DriftConfig, DriftFn, Error, Evaluator, GroupElement, Observable,
    Scheme, SchemeOptions,
};

/// Shortest nonzero vector of the lattice spanned by `a`, `b`, by brute force.
fn shortest(a: (f64, f64), b: (f64, f64)) -> f64 {
    let mut best = f64::INFINITY;
    for i in -60i32..=60 {
        for j in -60i32..=60 {
            if i == 0 && j == 0 {
                continue;
            }
            let (x, y) = (i as f64 * a.0 + j as f64 * b.0, i as f64 * a.1 + j as f64 * b.1);
            best = best.min(x.hypot(y));
        }
    }
    best
}

fn torus_u_oracle(g: &GroupElement, power: f64) -> f64 {
    let a = (g.a11, g.a21);
    let b = (g.a12, g.a22);
    shortest(a, b).powf(-power).max(2.0)
}

#[test]
fn u_examples() {
    let cfg = DriftConfig::default();
    let t = square_torus();
    let v = recurrence_u(&t, &cfg).unwrap();
    assert_eq!(v.u, 2.0);
    assert_eq!(v.systole_used, 1.0);
    let flowed = act(&GroupElement::geodesic(2.0), &t);
    let v = recurrence_u(&flowed, &cfg).unwrap();
    assert!((v.systole_used - (-2.0f64).exp()).abs() < 1e-12);
    assert!((v.u - 3.0f64.exp()).abs() < 1e-9);
    for th in [0.3, 1.9, 5.0] {
        let r = recurrence_u(&act(&GroupElement::rotation(th), &flowed), &cfg).unwrap();
        assert!((r.u - v.u).abs() < 1e-9 * v.u);
    }
}

#[test]
fn u_requires_unit_area() {
    let s = h11_origami().to_surface();
    assert!(matches!(recurrence_u(&s, &DriftConfig::default()), Err(Error::Invalid(_))));
}

/// Sheet through column 0 shifted by (δ, 0): dprime = √δ on the torus.
fn torus_sheet(shift: f64) -> AffineSubspaceSpec {
    let p = periods(&square_torus()).unwrap();
    let mut offset = p.entries.clone();
    offset[(0, 0)] += shift;
    AffineSubspaceSpec::new("shifted", p.basis_tag.clone(), vec![vec![1.0, 0.0]], offset, p.absolute_mask()).unwrap()
}

#[test]
fn margulis_single_sheet_value() {
    let cfg = DriftConfig { delta: 0.1, eps: 1.0, lambda: 1.0, k: 1.0, u_exponent: 0.5, nodes: 64 };
    let sheet = torus_sheet(0.0625);
    let d0 = dprime(&square_torus(), &sheet).unwrap();
    assert!((d0 - 0.25).abs() < 1e-15);
    let f = margulis_f(&square_torus(), &[sheet], &cfg).unwrap();
    let expected = 0.25f64.powf(-0.1) * 2f64.sqrt() + 2.0;
    assert!((f - expected).abs() < 1e-12, "{f} vs {expected}");
}

#[test]
fn sheets_outside_the_window_do_not_count() {
    let cfg = DriftConfig::default();
    // dprime = √0.49 = 0.7 > u^{-1} = 0.5.
    let f = margulis_f(&square_torus(), &[torus_sheet(0.49)], &cfg).unwrap();
    assert_eq!(f, cfg.lambda * 2.0);
}

#[test]
fn margulis_is_infinite_exactly_on_the_sheet() {
    let cfg = DriftConfig::default();
    let on = normalize_area(&h11_origami().to_surface());
    let sheet = zero_rel_sheet().unwrap();
    assert!(margulis_f(&on, std::slice::from_ref(&sheet), &cfg).unwrap().is_infinite());
    let p = periods(&on).unwrap();
    let mut q = p.entries.clone();
    q[(1, p.k() - 1)] += 1e-4;
    let off = normalize_area(&tsf_core::homology::surface_with_periods(&on, &q).unwrap());
    let f = margulis_f(&off, &[sheet], &cfg).unwrap();
    assert!(f.is_finite() && f > cfg.lambda * recurrence_u(&off, &cfg).unwrap().u);
}

#[test]
fn basis_mismatch_is_reported() {
    let other = AffineSubspaceSpec::new("x", "other", vec![vec![1.0, 0.0]], Matrix2xX::zeros(2), vec![true, true]).unwrap();
    assert!(matches!(dprime(&square_torus(), &other), Err(Error::BasisMismatch { .. })));
}

#[test]
fn circle_average_of_constants_and_at_time_zero() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let one = DriftFn::Observable(Observable::Constant(1.0));
    assert_eq!(circle_average(&one, &ev, &GroupElement::IDENTITY, 3.0, 64).unwrap(), 1.0);
    let base = GroupElement::geodesic(1.2);
    let u = ev.u(&base).unwrap();
    let a0 = circle_average(&DriftFn::U, &ev, &base, 0.0, 64).unwrap();
    assert!((a0 - u).abs() < 1e-9 * u);
    assert!(circle_average(&one, &ev, &base, 1.0, 8).is_err());
}

#[test]
fn circle_average_matches_refined_quadrature() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let ours = circle_average(&DriftFn::U, &ev, &GroupElement::IDENTITY, 3.0, 4096).unwrap();
    let n = 40960;
    let at = GroupElement::geodesic(3.0);
    let oracle: f64 = (0..n)
        .map(|j| torus_u_oracle(&(at * GroupElement::rotation(TAU * j as f64 / n as f64)), cfg.u_power()))
        .sum::<f64>()
        / n as f64;
    assert!((ours - oracle).abs() <= 0.01 * oracle, "{ours} vs {oracle}");
}

#[test]
fn u_contracts_deep_in_the_cusp() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let base = GroupElement::geodesic(2.0);
    let r = drift_check(&DriftFn::U, &ev, &base, 4.0, 4096, 1.0, 0.0).unwrap();
    assert!(r.empirical_average < r.input_value);
    assert!(r.pass);
    assert!(r.empirical_average <= r.fitted_c * r.input_value + r.fitted_b + 1e-12);
    assert!(r.sigma_bound >= 1.0);
}

#[test]
fn drift_at_time_zero_is_exact() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let r = drift_check(&DriftFn::U, &ev, &GroupElement::IDENTITY, 0.0, 64, 1.0, 0.0).unwrap();
    assert_eq!(r.empirical_average, r.input_value);
    assert!(r.pass);
}

#[test]
fn drift_rejects_infinite_base_values() {
    let cfg = DriftConfig::default();
    let on = normalize_area(&h11_origami().to_surface());
    let ev = Evaluator::new(&on, &cfg).unwrap();
    let f = DriftFn::Margulis(vec![zero_rel_sheet().unwrap()]);
    assert!(matches!(drift_check(&f, &ev, &GroupElement::IDENTITY, 1.0, 64, 1.0, 0.0), Err(Error::Infinite)));
}

#[test]
fn schemes_have_unit_mass_and_are_seeded() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let one = DriftFn::Observable(Observable::Constant(1.0));
    let opts = SchemeOptions { angle_nodes: 32, time_nodes: 11, horocycle_nodes: 32, walk_paths: 64 };
    for scheme in [
        Scheme::Sector { t: 3.0, lo: 0.0, hi: TAU },
        Scheme::Sector { t: 3.0, lo: 1.0, hi: 2.0 },
        Scheme::Folner { t: 3.0, r: 2.0 },
        Scheme::RandomWalk { n: 7 },
    ] {
        let v = scheme_average(scheme, &one, &ev, 3, &opts).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{scheme:?}: {v}");
    }
    let bump = DriftFn::Observable(Observable::sys_bump(0.3, 0.5).unwrap());
    let rw = Scheme::RandomWalk { n: 10 };
    let a = scheme_average(rw, &bump, &ev, 5, &opts).unwrap();
    let b = scheme_average(rw, &bump, &ev, 5, &opts).unwrap();
    let c = scheme_average(rw, &bump, &ev, 6, &opts).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn folner_and_sector_agree_with_haar() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    let obs = Observable::sys_bump(0.3, 0.5).unwrap();
    let f = DriftFn::Observable(obs.clone());
    let opts = SchemeOptions::default();
    let sector = scheme_average(Scheme::Sector { t: 15.0, lo: 0.0, hi: TAU }, &f, &ev, 0, &opts).unwrap();
    let folner = scheme_average(Scheme::Folner { t: 15.0, r: 1.0 }, &f, &ev, 0, &opts).unwrap();
    let haar = haar_average(&obs, 50_000, 9);
    assert!((sector - folner).abs() < 0.05);
    assert!((sector - haar).abs() < 0.05 && (folner - haar).abs() < 0.05);
}

#[test]
fn recurrence_fraction_bounds() {
    let cfg = DriftConfig::default();
    let ev = Evaluator::new(&square_torus(), &cfg).unwrap();
    // Every torus has systole at most (2/√3)^{1/2} < 1.1.
    assert_eq!(recurrence_fraction(&ev, &GroupElement::IDENTITY, 2.0, 1.1, 64).unwrap(), 1.0);
    assert_eq!(recurrence_fraction(&ev, &GroupElement::IDENTITY, 2.0, 1e-6, 64).unwrap(), 0.0);
    assert!(recurrence_fraction(&ev, &GroupElement::IDENTITY, 0.0, 0.3, 64).is_err());
}

#[test]
fn hyperbolic_fraction_is_at_least_half() {
    for (t, s) in [(1.0, 1.0), (2.0, 0.5), (3.0, 3.0)] {
        let (frac, delta) = hyperbolic_fraction(t, s, 256).unwrap();
        assert!(frac >= 0.5 && delta >= 0.0);
    }
}
