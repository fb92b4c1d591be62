use std::f64::consts::PI;

use proptest::prelude::*;
use trigzero::sampler::{covariance_check, cross_covariance_check, CoefficientSampler};
use trigzero::{DensitySpec, SpectralMeasure};

fn poisson() -> SpectralMeasure {
    SpectralMeasure::from_density(DensitySpec::poisson(0.5).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), stream in 0u64..1000, n in 1usize..300) {
        let sampler = CoefficientSampler::new(&poisson(), n).unwrap();
        prop_assert_eq!(sampler.sample(seed, stream), sampler.sample(seed, stream));
    }
}

#[test]
fn poisson_autocovariance_and_cross_covariance() {
    let measure = poisson();
    let n = 4096;
    let samples = CoefficientSampler::new(&measure, n).unwrap().sample_many(11, 200);
    let rho = measure.correlation(16).unwrap();
    let auto = covariance_check(&samples, &rho, 16).unwrap();
    assert!(
        auto.pass,
        "{:?}",
        auto.lags.iter().filter(|l| !l.pass).collect::<Vec<_>>()
    );
    let cross = cross_covariance_check(&samples, 8).unwrap();
    assert!(
        cross.pass,
        "{:?}",
        cross.lags.iter().filter(|l| !l.pass).collect::<Vec<_>>()
    );
}

#[test]
fn box_and_mixed_measures_match_their_correlations() {
    for d in [
        DensitySpec::box_density(PI / 2.0).unwrap(),
        DensitySpec::constant_corr(0.3).unwrap(),
    ] {
        let measure = SpectralMeasure::from_density(d).unwrap();
        let samples = CoefficientSampler::new(&measure, 512).unwrap().sample_many(5, 200);
        let rho = measure.correlation(8).unwrap();
        let report = covariance_check(&samples, &rho, 8).unwrap();
        assert!(report.pass, "{:?}", report.lags);
        assert!(cross_covariance_check(&samples, 8).unwrap().pass);
    }
}

#[test]
fn birkhoff_averages_concentrate_for_atomless_measures() {
    let n = 1 << 16;
    let sampler = CoefficientSampler::new(&poisson(), n).unwrap();
    let inside = (0..100u64)
        .filter(|&seed| {
            let avg = sampler.sample(seed, 0).birkhoff_average();
            (0.9..=1.1).contains(&avg)
        })
        .count();
    assert!(inside >= 95, "{inside}/100 inside [0.9, 1.1]");
}

#[test]
fn birkhoff_average_for_an_atom_is_finite() {
    let n = 1 << 16;
    let sampler = CoefficientSampler::new(&SpectralMeasure::atomic(2f64.sqrt()).unwrap(), n).unwrap();
    for seed in 0..10 {
        let avg = sampler.sample(seed, 0).birkhoff_average();
        assert!(avg.is_finite() && avg >= 0.0);
    }
}
