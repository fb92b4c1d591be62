use std::f64::consts::PI;

use proptest::prelude::*;
use trigzero::kernels::two_point_cov;
use trigzero::sampler::CoefficientSampler;
use trigzero::szclt::{
    cf_distance, conditional_cf, default_t_grid, empirical_cf, limit_cf, localized_variance, normalization_sum,
    CharFunctionCurve,
};
use trigzero::{DensitySpec, SpectralMeasure};

fn assert_cf_shape(curve: &CharFunctionCurve) {
    let grid = &curve.t_grid;
    for (i, (&t, v)) in grid.iter().zip(&curve.values).enumerate() {
        assert!(v.norm() <= 1.0 + 1e-12, "|phi({t})| = {}", v.norm());
        if t == 0.0 {
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        let mirror = grid.len() - 1 - i;
        assert_eq!(grid[mirror], -t);
        assert_eq!(curve.values[mirror], v.conj());
    }
}

#[test]
fn curves_are_characteristic_functions_and_triangle_holds() {
    let t_grid = default_t_grid();
    for d in [
        DensitySpec::box_density(PI / 2.0).unwrap(),
        DensitySpec::poisson(0.5).unwrap(),
    ] {
        let limit = limit_cf(&d, &t_grid).unwrap();
        let measure = SpectralMeasure::from_density(d).unwrap();
        for n in [64usize, 512] {
            let m = 4096.max(32 * n);
            let sample = CoefficientSampler::new(&measure, n).unwrap().sample(1, 0);
            let empirical = empirical_cf(&sample, &t_grid, m).unwrap();
            let conditional = conditional_cf(&measure.correlation(n).unwrap(), n, &t_grid, m).unwrap();
            for curve in [&empirical, &conditional, &limit] {
                assert_cf_shape(curve);
            }
            let direct = cf_distance(&empirical, &limit).unwrap();
            let split = cf_distance(&empirical, &conditional).unwrap() + cf_distance(&conditional, &limit).unwrap();
            assert!(direct <= split + 1e-15);
        }
    }
}

fn poisson() -> SpectralMeasure {
    SpectralMeasure::from_density(DensitySpec::poisson(0.5).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn localized_variance_is_quadratic_and_symmetric(
        points in proptest::collection::vec((-4.0..4.0f64, -2.0..2.0f64), 1..5),
        c in -3.0..3.0f64,
        n in 8usize..300,
    ) {
        let measure = poisson();
        let rho = measure.correlation(n).unwrap();
        let (t, l): (Vec<f64>, Vec<f64>) = points.iter().cloned().unzip();
        let base = localized_variance(&measure, &rho, n, 1.0, &t, &l).unwrap();
        let scaled_l: Vec<f64> = l.iter().map(|v| c * v).collect();
        let scaled = localized_variance(&measure, &rho, n, 1.0, &t, &scaled_l).unwrap();
        let tol = |v: f64| 1e-12 * v.abs().max(1.0) * (c * c).max(1.0);
        prop_assert!((scaled.variance_n - c * c * base.variance_n).abs() <= tol(base.variance_n));
        let (vl, sl) = (base.variance_limit.unwrap(), scaled.variance_limit.unwrap());
        prop_assert!((sl - c * c * vl).abs() <= tol(vl));

        let (rt, rl): (Vec<f64>, Vec<f64>) = points.iter().rev().cloned().unzip();
        let reversed = localized_variance(&measure, &rho, n, 1.0, &rt, &rl).unwrap();
        prop_assert!((reversed.variance_n - base.variance_n).abs() <= 1e-12 * base.variance_n.abs().max(1.0));
        prop_assert!((reversed.variance_limit.unwrap() - vl).abs() <= 1e-12 * vl.abs().max(1.0));
    }

    #[test]
    fn normalization_gap_is_order_one_over_n(
        points in proptest::collection::vec((-3.0..3.0f64, -1.0..1.0f64), 1..4),
        n in 1usize..2000,
    ) {
        let (t, l): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let scale: f64 = l.iter().map(|v| v.abs()).sum::<f64>().powi(2);
        let check = normalization_sum(n, &t, &l).unwrap();
        prop_assert!(check.gap <= 10.0 * scale / n as f64 + 1e-12);
    }
}

#[test]
fn two_point_covariance_decays() {
    let measure = poisson();
    let grid = 256;
    let mean_abs = |n: usize| {
        let rho = measure.correlation(n).unwrap();
        let xs: Vec<f64> = (0..grid).map(|j| 2.0 * PI * (j as f64 + 0.5) / grid as f64).collect();
        let mut total = 0.0;
        for &x in &xs {
            for &y in &xs {
                total += two_point_cov(&rho, n, x, y).unwrap().abs();
            }
        }
        total / (grid * grid) as f64
    };
    let values: Vec<f64> = [64usize, 512, 4096].iter().map(|&n| mean_abs(n)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}
