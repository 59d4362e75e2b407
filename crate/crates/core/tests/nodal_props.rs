use std::f64::consts::PI;

use proptest::prelude::*;

use nodal_lab::ensemble::{stream_rng, Ensemble, Phase, TorusSpec};
use nodal_lab::harness::mean_and_stderr;
use nodal_lab::nodal::{
    conormal_pairing, euler_points, find_zeros_circle, marching_cubes, marching_squares, nodal_volume, FormSpec,
    PairingConfig, SpatialWeight, TestForm,
};

/// Coefficients of `a·cos(k·x) + b·sin(k·x)` in the ensemble basis.
fn single_mode(ens: &Ensemble, k: &[i32], a: f64, b: f64) -> Vec<f64> {
    let mut c = vec![0.0; ens.len()];
    for (j, basis) in ens.basis().iter().enumerate() {
        if basis.k == k {
            let amp = if basis.phase == Phase::Cos { a } else { b };
            c[j] = amp / basis.normalization;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_mode_has_two_k_zeros(k in 1i32..=12, phase in 0.0f64..(2.0 * PI)) {
        let ens = Ensemble::new(TorusSpec::new(1, 12.0, 0).unwrap());
        let f = ens.sample_from(single_mode(&ens, &[k], phase.cos(), phase.sin())).unwrap();
        let mesh = find_zeros_circle(&f, 128, 1e-13).unwrap();
        prop_assert_eq!(euler_points(&mesh), 2 * k as i64);
    }

    #[test]
    fn axis_mode_lines_have_exact_length(k in 1i32..=4, phase in 0.0f64..(2.0 * PI), offset in 0.0f64..1.0) {
        // cos(k x₁ + φ) vanishes on 2k vertical lines of length 2π each.
        let ens = Ensemble::new(TorusSpec::new(2, 4.0, 0).unwrap());
        let f = ens.sample_from(single_mode(&ens, &[k, 0], phase.cos(), -phase.sin())).unwrap();
        let mesh = marching_squares(&f, 64, offset).unwrap();
        let length = nodal_volume(&mesh, |_| 1.0);
        prop_assert!((length - 4.0 * PI * k as f64).abs() < 1e-9, "{}", length);
        prop_assert_eq!(mesh.euler_characteristic(), 0);
    }
}

#[test]
fn euler_characteristic_ignores_half_cell_shift() {
    let ens = Ensemble::new(TorusSpec::new(3, 2.0, 11).unwrap());
    for trial in 0..20 {
        let f = ens.sample(&mut stream_rng(11, "shift", trial, 0));
        let a = marching_cubes(&f, 64, 0.0).unwrap().euler_characteristic();
        let b = marching_cubes(&f, 64, 0.5).unwrap().euler_characteristic();
        assert_eq!(a, b, "trial {trial}");
    }
}

#[test]
fn pairing_is_stationary_in_distribution() {
    let ens = Ensemble::new(TorusSpec::new(1, 20.0, 12).unwrap());
    let cfg = PairingConfig::for_cutoff(20.0);
    let form = |shift: f64| {
        TestForm::new(
            1,
            FormSpec {
                weight: SpatialWeight::CosSquared { axis: 0 },
                shift: vec![shift],
                ..FormSpec::default()
            },
        )
        .unwrap()
    };
    let (plain, moved) = (form(0.0), form(1.3));
    let mut a = Vec::new();
    let mut b = Vec::new();
    for trial in 0..2000 {
        let f = ens.sample(&mut stream_rng(12, "stationary", trial, 0));
        a.push(conormal_pairing(&f, &plain, &cfg).unwrap());
        b.push(conormal_pairing(&f, &moved, &cfg).unwrap());
    }
    let (ma, sa) = mean_and_stderr(&a);
    let (mb, sb) = mean_and_stderr(&b);
    assert!((ma - mb).abs() <= 3.0 * (sa * sa + sb * sb).sqrt(), "{ma} ± {sa} vs {mb} ± {sb}");
}
