use dac_secrecy::analytic::{eve_capacity_bound, secrecy_bound};
use dac_secrecy::montecarlo::run_ergodic;
use dac_secrecy::{derive_params, AnKind, DacModel, SystemConfig};

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn null_space_ideal_dac_matches_bound() {
    let config = SystemConfig::new(128, 8, 16).with_snr_db(10.0).with_phi(0.8);
    let mc = run_ergodic(&config, 1000, 11).unwrap();
    let bound = secrecy_bound(&derive_params(&config).unwrap(), AnKind::NullSpace).unwrap();
    assert!(relative(mc.secrecy_rate, bound.secrecy_bound) < 0.05,
        "mc {} bound {}", mc.secrecy_rate, bound.secrecy_bound);
}

#[test]
fn random_two_bit_matches_bound() {
    let config = SystemConfig::new(128, 8, 6)
        .with_snr_db(10.0)
        .with_phi(0.7)
        .with_dac(DacModel::Bits(2))
        .with_an(AnKind::Random);
    let mc = run_ergodic(&config, 1000, 12).unwrap();
    let bound = secrecy_bound(&derive_params(&config).unwrap(), AnKind::Random).unwrap();
    assert!(relative(mc.secrecy_rate, bound.secrecy_bound) < 0.05,
        "mc {} bound {}", mc.secrecy_rate, bound.secrecy_bound);
}

#[test]
fn eavesdropper_capacity_without_an_stays_below_bound() {
    // The bound is what converges to the reported 0.9407 / 2.2985; the finite-N
    // ergodic capacity sits a few percent underneath it.
    for (bits, reported) in [(1, 0.9407), (2, 2.2985)] {
        let config = SystemConfig::new(100, 10, 5).with_dac(DacModel::Bits(bits));
        let bound = eve_capacity_bound(&derive_params(&config).unwrap()).unwrap();
        assert!(relative(bound, reported) < 0.01);
        let mc = run_ergodic(&config, 2000, 13).unwrap();
        assert!(mc.eve_capacity < bound);
        assert!(relative(mc.eve_capacity, bound) < 0.1, "mc {} bound {bound}", mc.eve_capacity);
    }
}

#[test]
fn standard_error_halves_with_four_times_the_trials() {
    let config = SystemConfig::new(64, 4, 4).with_snr_db(5.0).with_phi(0.6).with_dac(DacModel::Bits(2));
    let small = run_ergodic(&config, 400, 14).unwrap();
    let large = run_ergodic(&config, 1600, 14).unwrap();
    let ratio = small.secrecy_se / large.secrecy_se;
    assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    let ratio = small.eve_capacity_se / large.eve_capacity_se;
    assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
}

#[test]
fn result_independent_of_thread_count() {
    let config = SystemConfig::new(48, 4, 4)
        .with_phi(0.7)
        .with_dac(DacModel::Bits(3))
        .with_an(AnKind::Random);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ergodic(&config, 64, 15).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn singular_configuration_is_reported() {
    let config = SystemConfig::new(32, 4, 4);
    assert!(run_ergodic(&config, 4, 1).is_err());
}
