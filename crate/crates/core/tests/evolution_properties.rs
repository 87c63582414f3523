use proptest::prelude::*;
use sqg_core::criteria::{calibrate_c0, CalibrationSettings};
use sqg_core::evolution::{evolve, step, DtPolicy, ProbeSchedule, StepperConfig};
use sqg_core::spectral::random::{random_band_field, stream_rng, BandSpec};
use sqg_core::spectral::{rescale_solution, GridSpec, SpectralField};
use num_complex::Complex64;

fn field(n: usize, seed: u64) -> SpectralField {
    let g = GridSpec::periodic(n).unwrap();
    random_band_field(g, &BandSpec::new(1.0, 4.0, -2.0), &mut stream_rng(seed, 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_bit_deterministic(seed in any::<u64>()) {
        let theta = field(16, seed);
        let cfg = StepperConfig::new(0.3, DtPolicy::Cfl { safety: 0.5, dt_max: 0.05 }, 0.2);
        let schedule = ProbeSchedule::every(0.05).keeping_fields();
        let a = evolve(&theta, &cfg, &schedule).unwrap();
        let b = evolve(&theta, &cfg, &schedule).unwrap();
        prop_assert_eq!(a.fields, b.fields);
        prop_assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn mean_is_conserved_exactly(seed in any::<u64>(), mean in -3.0..3.0f64) {
        let mut theta = field(16, seed);
        theta.set_mode(0, 0, Complex64::new(mean, 0.0));
        let mut t = theta.clone();
        for _ in 0..10 {
            t = step(&t, 0.02, 0.4).unwrap();
        }
        prop_assert_eq!(t.coeff(0, 0), theta.coeff(0, 0));
    }
}

#[test]
fn calibration_on_scaling_family_matches_predicted_slope() {
    let (s, a) = (1.6, 0.25);
    let base = field(32, 11).scaled(8.0);
    // θ_λ = λ^{2α−1}θ(λ·) is an exact symmetry, so doubling times scale exactly
    let family: Vec<_> = [1.0, 2.0, 4.0]
        .iter()
        .map(|l| rescale_solution(&base, *l, a).unwrap())
        .collect();
    let settings = CalibrationSettings {
        // horizons are cap·h^{−5} with h ≈ 250
        cap: 1e12,
        steps: 800,
        probes: 400,
        ..Default::default()
    };
    let c = calibrate_c0(&family, s, a, &settings).unwrap();
    assert!(c.members.iter().all(|m| m.doubling_time.is_some()), "{:?}", c.members);
    let err = c.slope_error().unwrap();
    assert!(err < 0.1, "slope {:?} vs {}", c.fitted_slope, c.predicted_slope);
    assert!(c.c0 < settings.cap);
}
