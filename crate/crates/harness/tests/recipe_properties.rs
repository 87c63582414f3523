use proptest::prelude::*;
use sqg_core::littlewood_paley::{sobolev_norm, sparseness_ratio, FilterBank};
use sqg_core::spectral::GridSpec;
use sqg_harness::{generate, DataRecipe, RecipeKind};

fn grid() -> GridSpec {
    GridSpec::periodic(64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generation_is_a_function_of_seed_and_stream(seed in any::<u64>(), stream in 0u64..4) {
        let recipe: DataRecipe = RecipeKind::BandLimitedRandom { min_freq: 1.0, max_freq: 12.0, slope: -2.0, amplitude: 1.0 }.into();
        let a = generate(&recipe, grid(), seed, stream).unwrap();
        let b = generate(&recipe, grid(), seed, stream).unwrap();
        prop_assert_eq!(a.coeffs(), b.coeffs());
        let other = generate(&recipe, grid(), seed, stream + 1).unwrap();
        prop_assert_ne!(a.coeffs(), other.coeffs());
    }

    #[test]
    fn normalization_hits_its_target(seed in any::<u64>(), s in 0.0..2.0f64, value in 1e-3..1e3f64) {
        let recipe = DataRecipe::from(RecipeKind::BandLimitedRandom { min_freq: 1.0, max_freq: 12.0, slope: -1.0, amplitude: 1.0 })
            .normalized(s, value);
        let theta = generate(&recipe, grid(), seed, 0).unwrap();
        prop_assert!((sobolev_norm(&theta, s).unwrap() / value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_recipes_sit_on_their_side_of_the_threshold(seed in any::<u64>(), j in 2i32..4, s in 0.5..1.9f64, bound in 1e-3..1.0f64) {
        let bank = FilterBank::new(grid());
        let high: DataRecipe = RecipeKind::HighFrequencyConcentrated { j, s, bound, max_freq: None, slope: -2.0 }.into();
        let theta = generate(&high, grid(), seed, 0).unwrap();
        let ratio = sparseness_ratio(&bank, &theta, j as f64, s).unwrap();
        prop_assert!(ratio <= bound && ratio > 0.99 * bound, "{ratio} vs {bound}");
        let low: DataRecipe = RecipeKind::LowFrequencyDominated { j, s, ratio: 1.0 / bound, max_freq: None, slope: -2.0 }.into();
        let theta = generate(&low, grid(), seed, 0).unwrap();
        let ratio = sparseness_ratio(&bank, &theta, j as f64, s).unwrap();
        prop_assert!((ratio * bound - 1.0).abs() < 1e-9, "{ratio} vs {}", 1.0 / bound);
    }
}

#[test]
fn band_limited_shell_energy_follows_the_slope() {
    let g = GridSpec::periodic(256).unwrap();
    let bank = FilterBank::new(g);
    for slope in [-3.0, -2.0, -1.0] {
        let recipe: DataRecipe = RecipeKind::BandLimitedRandom { min_freq: 1.0, max_freq: 80.0, slope, amplitude: 1.0 }.into();
        let theta = generate(&recipe, g, 9, 0).unwrap();
        let spectrum = sqg_core::littlewood_paley::shell_spectrum(&bank, &theta, 2.0).unwrap();
        // interior shells, away from both ends of the band
        let (x, y): (Vec<f64>, Vec<f64>) = (2..=5).map(|j| (j as f64, spectrum.get(j).powi(2).log2())).unzip();
        let fitted = sqg_core::littlewood_paley::fit_slope(&x, &y);
        assert!((fitted / slope - 1.0).abs() < 0.1, "slope {slope}: fitted {fitted}");
    }
}

#[test]
fn checkpoint_recipe_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let recipe: DataRecipe = RecipeKind::BandLimitedRandom { min_freq: 1.0, max_freq: 12.0, slope: -2.0, amplitude: 1.0 }.into();
    let theta = generate(&recipe, grid(), 4, 0).unwrap();
    let path = dir.path().join("state.bin");
    sqg_harness::store::save_checkpoint(&path, &theta, 0.25, 1.5).unwrap();
    let back = generate(&RecipeKind::Checkpoint { path: path.clone() }.into(), grid(), 0, 0).unwrap();
    assert_eq!(back.coeffs(), theta.coeffs());
    let other = GridSpec::periodic(32).unwrap();
    assert!(generate(&RecipeKind::Checkpoint { path }.into(), other, 0, 0).is_err());
}
