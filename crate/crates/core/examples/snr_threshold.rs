// SNR below which coarser DACs raise the secrecy rate: closed form against a
// numeric sign-change search.

use dac_secrecy::analytic::{rho_derivative_coeffs, snr_threshold};
use dac_secrecy::model::linear_to_db;
use dac_secrecy::optimizer::{find_snr_threshold_numeric, DEFAULT_RHO_PROBE};
use dac_secrecy::{derive_params, AnKind, SystemConfig};

pub fn run_example() -> dac_secrecy::Result<()> {
    let cases = [
        (AnKind::NullSpace, SystemConfig::new(128, 8, 16).with_phi(0.8)),
        (AnKind::Random, SystemConfig::new(128, 8, 6).with_phi(0.7)),
    ];
    for (kind, config) in cases {
        let dp = derive_params(&config.with_an(kind))?;
        let q = rho_derivative_coeffs(&dp, kind);
        let closed = snr_threshold(&dp, kind)?;
        let numeric = find_snr_threshold_numeric(&dp, kind, DEFAULT_RHO_PROBE)?;
        println!("{kind:>6}: a={:.6} b={:.6} c={:.6}", q.a, q.b, q.c);
        println!(
            "        threshold {:.4} dB (closed form), {:.4} dB (numeric, rho={DEFAULT_RHO_PROBE})",
            linear_to_db(closed),
            linear_to_db(numeric)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    run_example()
}
