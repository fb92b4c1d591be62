use std::f64::consts::PI;

use proptest::prelude::*;
use trigzero::kernels::{convolution_profile, fejer_eval, ln_eval, moments_at, s0_lower_bound, KernelCoefficients};
use trigzero::{Atom, DensitySpec, SpectralMeasure};

fn poisson(r: f64) -> SpectralMeasure {
    SpectralMeasure::from_density(DensitySpec::poisson(r).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fejer_bounds(n in 1usize..600, x in -PI..PI) {
        let k = fejer_eval(n, x);
        prop_assert!(k >= -1e-12);
        prop_assert!(k <= n as f64 * (1.0 + 1e-12));
        prop_assert!(k <= PI * PI / (n as f64 * x * x) * (1.0 + 1e-12));
        prop_assert!((k - fejer_eval(n, -x)).abs() <= 1e-12 * k.max(1.0));
    }

    #[test]
    fn ln_bounds(n in 1usize..600, x in -PI..PI) {
        let l = ln_eval(n, x);
        prop_assert!(l >= -1e-9);
        prop_assert!(l <= n as f64 * (1.0 + 1e-9));
    }

    #[test]
    fn s0_lower_bound_holds(
        n in 1usize..200,
        x in 0.0..(2.0 * PI),
        alpha in 0.0..PI,
        w in 0.0..0.9,
        r in 0.0..0.95,
    ) {
        let density = DensitySpec::poisson(r).unwrap().with_weight(1.0 - w).unwrap();
        let measure = SpectralMeasure::new(vec![Atom::new(alpha, w).unwrap()], Some(density)).unwrap();
        let rho = measure.correlation(n).unwrap();
        let s0 = moments_at(&rho, n, x).unwrap().0;
        prop_assert!(s0 >= s0_lower_bound(&rho, n, x) - 1e-12);
    }
}

#[test]
fn unit_coefficient_mass() {
    for n in [1usize, 8, 64, 512, 4096] {
        let c = KernelCoefficients::new(n);
        assert_eq!(c.fejer[0], 1.0);
        assert!((c.alpha_n * c.ln_scaled[0] - 1.0).abs() <= 2.0 * f64::EPSILON);
    }
}

#[test]
fn fejer_lebesgue_decrease_for_poisson() {
    let measure = poisson(0.5);
    let psi = |x: f64| measure.psi(x);
    let sup_gap = |n: usize| {
        let rho = measure.correlation(n).unwrap();
        (0..64)
            .map(|j| {
                let x = 2.0 * PI * (j as f64 + 0.5) / 64.0;
                (moments_at(&rho, n, x).unwrap().0 - 2.0 * PI * psi(x)).abs()
            })
            .fold(0.0, f64::max)
    };
    let gaps: Vec<f64> = [64usize, 256, 1024].iter().map(|&n| sup_gap(n)).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn smooth_density_rate_is_order_one_over_n() {
    let measure = SpectralMeasure::from_density(DensitySpec::raised_cosine_squared()).unwrap();
    let degrees = [64usize, 256, 1024, 4096];
    let points: Vec<(f64, f64)> = degrees
        .iter()
        .map(|&n| {
            let rho = measure.correlation(n).unwrap();
            let profile = convolution_profile(&rho, n, 4096.max(4 * n)).unwrap();
            let sup = profile
                .s0
                .iter()
                .enumerate()
                .map(|(j, s)| (s - 2.0 * PI * measure.psi(profile.x(j))).abs())
                .fold(0.0, f64::max);
            ((n as f64).ln(), sup.ln())
        })
        .collect();
    let mx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= -0.9, "slope {slope}");
}
