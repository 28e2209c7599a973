// Large-system rate bounds for a range of DAC resolutions.

use dac_secrecy::analytic::{alpha_bar, beta_bar, secrecy_bound};
use dac_secrecy::{derive_params, AnKind, DacModel, SystemConfig};

pub fn run_example() -> dac_secrecy::Result<()> {
    println!("N=128 K=8 M=16, 10 dB, phi=0.8");
    println!("an      dac   R        Cbar     Rsec     beta_bar  alpha_bar");
    for kind in AnKind::ALL {
        for dac in [DacModel::Bits(1), DacModel::Bits(2), DacModel::Bits(3), DacModel::Ideal] {
            let config = SystemConfig::new(128, 8, 16)
                .with_snr_db(10.0)
                .with_phi(0.8)
                .with_dac(dac)
                .with_an(kind);
            let dp = derive_params(&config)?;
            let r = secrecy_bound(&dp, kind)?;
            let bb = beta_bar(dp.alpha, dp.phi, dp.rho_tilde).unwrap_or(f64::NAN);
            println!(
                "{:<7} {:<5} {:.4}   {:.4}   {:.4}   {:.4}    {:.4}",
                kind.label(),
                dac.label(),
                r.user_rate,
                r.eve_capacity_bound,
                r.secrecy_bound,
                bb,
                alpha_bar(&dp, kind)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    run_example()
}
