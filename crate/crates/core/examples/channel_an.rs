// One channel draw: zero-forcing precoder and both artificial-noise designs.

use dac_secrecy::channel::{row_power, ChannelRealization};
use dac_secrecy::sampling::trial_rng;
use dac_secrecy::AnKind;

pub fn run_example() -> dac_secrecy::Result<()> {
    let (n, k, m) = (128, 8, 16);
    for kind in AnKind::ALL {
        let mut rng = trial_rng(7, 0);
        let real = ChannelRealization::sample(n, k, m, kind, &mut rng)?;
        let leak = (&real.h * &real.v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tr_w: f64 = row_power(&real.w).iter().sum();
        let tr_v: f64 = row_power(&real.v).iter().sum();
        let per_antenna = real.transmit_power_diag(0.1, 0.2 / 120.0);
        let spread = per_antenna.iter().cloned().fold(0.0, f64::max)
            / per_antenna.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("{kind:>6} AN: ||H V||_F = {leak:.2e}, tr(W W^H) = {tr_w:.3}, tr(V V^H) = {tr_v:.3}");
        println!("        ZF gain c = {:.3}, per-antenna power max/min = {spread:.2}", real.zf_gain);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    run_example()
}
