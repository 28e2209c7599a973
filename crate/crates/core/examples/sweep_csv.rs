// SNR sweep written as CSV, with analytic and Monte Carlo columns.

use std::fs::File;
use std::path::PathBuf;

use dac_secrecy::experiment::{run_sweep, write_sweep_csv, Mode, SweepParam, SweepSpec};
use dac_secrecy::{DacModel, SystemConfig};

pub fn run_example_to(path: PathBuf) -> dac_secrecy::Result<()> {
    let spec = SweepSpec {
        param: SweepParam::SnrDb,
        from: 0.0,
        to: 20.0,
        step: 5.0,
        base: SystemConfig::new(128, 8, 16).with_phi(0.8).with_dac(DacModel::Bits(2)),
        mode: Mode::Both,
        trials: 50,
        seed: 3,
    };
    let rows = run_sweep(&spec)?;
    write_sweep_csv(&rows, &mut File::create(&path)?, false)?;
    print!("{}", std::fs::read_to_string(&path)?);
    Ok(())
}

pub fn run_example() -> dac_secrecy::Result<()> {
    run_example_to(std::env::temp_dir().join("dac_secrecy_sweep.csv"))
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from);
    match path {
        Some(p) => run_example_to(p),
        None => run_example(),
    }
}
