// Lloyd–Max distortion factors, and a check that a real quantizer behaves like
// the Bussgang model used everywhere else.

use dac_secrecy::quantizer::{cached_spec, dac_quantize, estimate_bussgang, rho_table};
use dac_secrecy::sampling::{complex_normal, trial_rng};

pub fn run_example() -> dac_secrecy::Result<()> {
    println!("bits  rho");
    for (bits, rho) in rho_table(4)? {
        println!("{bits:>4}  {rho:.10}");
    }

    let mut rng = trial_rng(2024, 0);
    let x: Vec<_> = (0..200_000).map(|_| complex_normal(&mut rng, 1.0)).collect();
    let scale = (0.5f64).sqrt();
    println!("\nbits  gain      sqrt(1-rho)  rho_hat   corr(x, r)");
    for bits in 1..=4 {
        let spec = cached_spec(bits)?;
        let y = dac_quantize(&x, spec, scale);
        let est = estimate_bussgang(&x, &y)?;
        println!(
            "{bits:>4}  {:.5}   {:.5}      {:.5}   {:.1e}",
            est.gain,
            (1.0 - spec.distortion).sqrt(),
            est.residual_rho,
            est.cross_correlation
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    run_example()
}
