use std::f64::consts::PI;

use proptest::prelude::*;
use trigzero::sampler::CoefficientSampler;
use trigzero::zeros::count_zeros;
use trigzero::{DensitySpec, SpectralMeasure};

fn measure(kind: u8) -> SpectralMeasure {
    match kind {
        0 => SpectralMeasure::uniform(),
        1 => SpectralMeasure::from_density(DensitySpec::box_density(PI / 2.0).unwrap()).unwrap(),
        2 => SpectralMeasure::from_density(DensitySpec::poisson(0.9).unwrap()).unwrap(),
        _ => SpectralMeasure::atomic(2f64.sqrt()).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_respects_degree_bound(kind in 0u8..4, n in 1usize..200, seed in any::<u64>()) {
        let sample = CoefficientSampler::new(&measure(kind), n).unwrap().sample(seed, 0);
        let count = count_zeros(&sample, 0.0, 2.0 * PI).unwrap();
        prop_assert!(count.count <= 2 * n);
    }

    #[test]
    fn count_is_shift_invariant(kind in 0u8..3, n in 1usize..200, seed in any::<u64>(), c in -10.0..10.0f64) {
        let sample = CoefficientSampler::new(&measure(kind), n).unwrap().sample(seed, 0);
        let base = count_zeros(&sample, 0.0, 2.0 * PI).unwrap();
        let shifted = count_zeros(&sample, c, c + 2.0 * PI).unwrap();
        prop_assume!(base.suspicious_cells == 0 && shifted.suspicious_cells == 0);
        prop_assert_eq!(base.count, shifted.count);
    }
}

#[test]
fn close_pair_inside_one_cell_is_counted() {
    // A box(pi/2) draw with a root pair closer than one grid cell for one of
    // the two grid alignments.
    let sample = CoefficientSampler::new(&measure(1), 162)
        .unwrap()
        .sample(6048747756909479112, 0);
    let base = count_zeros(&sample, 0.0, 2.0 * PI).unwrap();
    let c = 9.928486146425747;
    let shifted = count_zeros(&sample, c, c + 2.0 * PI).unwrap();
    assert_eq!(
        (base.count, base.suspicious_cells),
        (shifted.count, shifted.suspicious_cells)
    );
}
