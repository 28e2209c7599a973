// Optimal share of power for the data signals, closed form and numeric.

use dac_secrecy::optimizer::{closed_form_phi, maximize_phi, DEFAULT_TOL};
use dac_secrecy::{derive_params, AnKind, DacModel, SystemConfig};

pub fn run_example() -> dac_secrecy::Result<()> {
    println!("N=128 K=8 M=16");
    println!("an      snr  dac   phi_closed  phi_numeric  Rsec");
    for kind in AnKind::ALL {
        for snr_db in [0.0, 5.0] {
            for dac in [DacModel::Bits(1), DacModel::Bits(2), DacModel::Bits(3), DacModel::Ideal] {
                let config = SystemConfig::new(128, 8, 16)
                    .with_snr_db(snr_db)
                    .with_phi(0.5)
                    .with_dac(dac);
                let dp = derive_params(&config)?;
                let closed = closed_form_phi(&dp, kind).map(|r| r.phi).unwrap_or(f64::NAN);
                let best = maximize_phi(&dp, kind, DEFAULT_TOL)?;
                println!(
                    "{:<7} {snr_db:>3}  {:<5} {closed:.4}      {:.4}       {:.4}",
                    kind.label(),
                    dac.label(),
                    best.phi,
                    best.value
                );
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    run_example()
}
