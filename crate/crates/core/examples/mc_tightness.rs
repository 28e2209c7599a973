// Monte Carlo ergodic secrecy rate next to the closed-form lower bound.
//
// `cargo run --release --example mc_tightness -- 1000` for more trials.

use dac_secrecy::analytic::secrecy_value;
use dac_secrecy::montecarlo::run_ergodic;
use dac_secrecy::{derive_params, AnKind, DacModel, SystemConfig};

pub fn run_example_with(trials: usize) -> dac_secrecy::Result<()> {
    let cases = [
        (AnKind::NullSpace, 16, 0.8),
        (AnKind::Random, 6, 0.7),
    ];
    println!("an      dac   snr  bound    mc       se");
    for (kind, m, phi) in cases {
        for dac in [DacModel::Bits(1), DacModel::Ideal] {
            for snr_db in [0.0, 10.0, 20.0] {
                let config = SystemConfig::new(128, 8, m)
                    .with_snr_db(snr_db)
                    .with_phi(phi)
                    .with_dac(dac)
                    .with_an(kind);
                let bound = secrecy_value(&derive_params(&config)?, kind)?;
                let mc = run_ergodic(&config, trials, 1)?;
                println!(
                    "{:<7} {:<5} {snr_db:>3}  {bound:.4}   {:.4}   {:.4}",
                    kind.label(),
                    dac.label(),
                    mc.secrecy_rate,
                    mc.secrecy_se
                );
            }
        }
    }
    Ok(())
}

pub fn run_example() -> dac_secrecy::Result<()> {
    run_example_with(50)
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    run_example_with(trials)
}
