// Tables (and gnuplot scripts) for every result figure.
//
// `cargo run --release --example reproduce_figures -- out/ 1000` adds Monte
// Carlo points with 1000 trials; without a trial count only the closed forms
// are evaluated.

use std::path::{Path, PathBuf};

use dac_secrecy::experiment::{write_figure, FigureOptions, Mode, FIGURE_IDS};

pub fn run_example_in(outdir: &Path, trials: Option<usize>) -> dac_secrecy::Result<()> {
    let opts = FigureOptions {
        mode: if trials.is_some() { Mode::Both } else { Mode::Analytic },
        trials: trials.unwrap_or(1),
        ..FigureOptions::default()
    };
    for id in FIGURE_IDS {
        let files = write_figure(id, outdir, &opts)?;
        println!("figure {id}: {}", files[0].display());
    }
    Ok(())
}

pub fn run_example() -> dac_secrecy::Result<()> {
    run_example_in(&std::env::temp_dir().join("dac_secrecy_figures"), None)
}

#[allow(dead_code)]
fn main() -> dac_secrecy::Result<()> {
    let mut args = std::env::args().skip(1);
    let outdir = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("figures"));
    let trials = args.next().and_then(|s| s.parse().ok());
    run_example_in(&outdir, trials)
}
