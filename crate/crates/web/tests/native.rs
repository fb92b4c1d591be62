use std::f64::consts::PI;

use trigzero::kacrice::{independent_ratio, nonuniversal_limit, universal_limit};
use trigzero_web::{build_measure, integrand, limit_of, sample_path, sweep, MAX_SAMPLE_DEGREE};

#[test]
fn measures_parse_and_reject() {
    for (kind, p, q) in [
        ("uniform", 0.0, 0.0),
        ("box", PI / 2.0, 0.0),
        ("annulus", 3.0 * PI / 4.0, PI / 4.0),
        ("poisson", 0.5, 0.0),
        ("constant_corr", 0.3, 0.0),
        ("raised_cosine_squared", 0.0, 0.0),
        ("atomic", 2f64.sqrt(), 0.0),
    ] {
        build_measure(kind, p, q).unwrap_or_else(|e| panic!("{kind}: {e}"));
    }
    assert!(build_measure("box", 4.0, 0.0).is_err());
    assert!(build_measure("annulus", 1.0, 2.0).is_err());
    assert!(build_measure("spiral", 0.0, 0.0).is_err());
}

#[test]
fn limits_match_closed_forms() {
    let box_half = build_measure("box", PI / 2.0, 0.0).unwrap();
    assert!((limit_of(&box_half) - nonuniversal_limit(PI)).abs() < 1e-9);
    let poisson = build_measure("poisson", 0.5, 0.0).unwrap();
    assert_eq!(limit_of(&poisson), universal_limit());
    assert!(limit_of(&build_measure("atomic", 1.0, 0.0).unwrap()).is_nan());
}

#[test]
fn sweep_reproduces_independent_ratios() {
    let m = build_measure("independent", 0.0, 0.0).unwrap();
    let degrees = [1, 7, 64, 300];
    let ratios = sweep(&m, &degrees).unwrap();
    for (n, r) in degrees.iter().zip(ratios) {
        assert!((r - independent_ratio(*n)).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn integrand_profile_is_flat_for_independent_coefficients() {
    let m = build_measure("uniform", 0.0, 0.0).unwrap();
    let (x, y) = integrand(&m, 32, 1024).unwrap();
    assert_eq!(x.len(), 1024);
    let spread = y.iter().fold(0.0f64, |acc, v| acc.max((v - y[0]).abs()));
    assert!(spread < 1e-12, "spread {spread}");
}

#[test]
fn sample_path_roots_are_sign_changes() {
    let m = build_measure("box", PI / 2.0, 0.0).unwrap();
    let path = sample_path(&m, 40, 3, 4096).unwrap();
    assert_eq!(path.x.len(), path.values.len());
    assert!(path.roots.len() <= 80);
    assert!(path.roots.windows(2).all(|w| w[0] < w[1]));
    let grid_changes = path.values.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    // the closing cell wraps around; near-tangent pairs may hide between nodes
    assert!(
        path.roots.len() + 1 >= grid_changes,
        "{} roots vs {grid_changes} sign changes",
        path.roots.len()
    );
    assert_eq!(sample_path(&m, 40, 3, 4096).unwrap().roots, path.roots);
    assert!(sample_path(&m, MAX_SAMPLE_DEGREE + 1, 0, 4096).is_err());
}
