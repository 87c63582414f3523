use proptest::prelude::*;
use sqg_core::littlewood_paley::{besov_norm, shell_spectrum, sobolev_norm, sparseness_ratio, FilterBank};
use sqg_core::spectral::random::{random_band_field, stream_rng, BandSpec};
use sqg_core::spectral::{GridSpec, SpectralField};

fn field(n: usize, seed: u64, slope: f64) -> SpectralField {
    let g = GridSpec::periodic(n).unwrap();
    random_band_field(g, &BandSpec::new(1.0, n as f64 / 2.0, slope).full_band(), &mut stream_rng(seed, 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shells_reconstruct_mean_free_part(seed in any::<u64>(), slope in -4.0..2.0f64, n in prop::sample::select(vec![16usize, 32, 64])) {
        let theta = field(n, seed, slope);
        let bank = FilterBank::new(*theta.grid());
        let mut sum = SpectralField::zeros(*theta.grid());
        for j in bank.j_range() {
            sum = &sum + &bank.project_shell(&theta, j).field;
        }
        let err = sum.checked_sub(&theta.without_mean()).unwrap().l2_norm();
        prop_assert!(err <= 1e-10 * theta.l2_norm());
    }

    #[test]
    fn distant_shells_are_orthogonal(seed in any::<u64>(), gap in 2i32..5) {
        let theta = field(64, seed, 0.0);
        let bank = FilterBank::new(*theta.grid());
        for i in bank.j_range() {
            let j = i + gap;
            if !bank.contains(j) {
                continue;
            }
            let both = bank.project_shell(&bank.project_shell(&theta, i).field, j).field;
            prop_assert_eq!(both.max_abs_coeff(), 0.0);
        }
    }

    #[test]
    fn shell_sum_matches_sobolev_within_band(seed in any::<u64>(), s in -0.5..2.0f64, slope in -3.0..1.0f64) {
        let theta = field(32, seed, slope);
        let bank = FilterBank::new(*theta.grid());
        let c_eq = bank.equivalence_constant(s);
        let shells = shell_spectrum(&bank, &theta, 2.0).unwrap();
        let ell2 = shells.weighted_l2(s);
        let h = sobolev_norm(&theta, s).unwrap();
        prop_assert!(ell2 <= c_eq * h * (1.0 + 1e-12));
        prop_assert!(h <= c_eq * ell2 * (1.0 + 1e-12));
        let b = besov_norm(&bank, &theta, s, 2.0).unwrap();
        prop_assert!(b <= ell2 * (1.0 + 1e-12));
    }

    #[test]
    fn sparseness_ratio_scale_invariant(seed in any::<u64>(), c in prop_oneof![1e-6..1e-3f64, 0.5..2.0f64, 1e3..1e6f64], cutoff in 0.0..4.0f64, s in 0.5..1.9f64) {
        let theta = field(32, seed, -1.0);
        let bank = FilterBank::new(*theta.grid());
        let a = sparseness_ratio(&bank, &theta, cutoff, s).unwrap();
        let b = sparseness_ratio(&bank, &theta.scaled(c), cutoff, s).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{} vs {}", a, b);
    }

    #[test]
    fn ratio_survives_zero_padding(seed in any::<u64>(), cutoff in 0.0..3.0f64, s in 0.5..1.9f64) {
        let theta = field(32, seed, -1.0);
        let padded = theta.zero_padded(64).unwrap();
        let a = sparseness_ratio(&FilterBank::new(*theta.grid()), &theta, cutoff, s).unwrap();
        let b = sparseness_ratio(&FilterBank::new(*padded.grid()), &padded, cutoff, s).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
    }
}

#[test]
fn partition_of_unity_on_default_banks() {
    for n in [16, 32, 64, 128, 256] {
        let bank = FilterBank::new(GridSpec::periodic(n).unwrap());
        assert!(bank.partition_defect() <= 1e-14, "n = {n}");
    }
}
