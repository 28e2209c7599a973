use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dac_secrecy::experiment::{
    analytic_report, load_config, optimize_phi_report, run_sweep, simulation_report,
    threshold_report, write_figure, write_sweep_csv, ConfigValues, FigureOptions, Mode,
    SweepParam, SweepSpec, DEFAULT_SEED,
};
use dac_secrecy::montecarlo::DEFAULT_TRIALS;
use dac_secrecy::quantizer::{write_rho_table, MAX_BITS};
use dac_secrecy::{AnKind, DacModel, SystemConfig};

#[derive(Parser)]
#[command(name = "dac-secrecy", version, about = "Secrecy rates of massive-MIMO downlinks with low-resolution DACs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form rates, thresholds and optimal phi for one configuration
    Analytic(SystemArgs),
    /// Monte Carlo ergodic rates for one configuration
    Simulate(SystemArgs),
    /// Sweep one parameter and write a CSV
    Sweep(SweepArgs),
    /// Write the tables behind one of the result figures (2..=10)
    Figure(FigureArgs),
    /// Optimal power split, closed form and numeric
    OptimizePhi(SystemArgs),
    /// SNR threshold, beta_bar and alpha_bar
    Threshold(SystemArgs),
    /// Lloyd-Max distortion factor per bit count
    RhoTable(RhoTableArgs),
}

#[derive(Args, Clone)]
struct SystemArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// 1..=8 or inf
    #[arg(long = "dac-bits")]
    dac_bits: Option<DacModel>,
    /// Distortion factor, overrides --dac-bits
    #[arg(long)]
    rho: Option<f64>,
    /// null or random
    #[arg(long)]
    an: Option<AnKind>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// analytic, mc or both
    #[arg(long)]
    mode: Option<Mode>,
    /// key=value file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SystemArgs {
    fn values(&self) -> ConfigValues {
        ConfigValues {
            n: self.n,
            k: self.k,
            m: self.m,
            snr_db: self.snr_db,
            phi: self.phi,
            dac: self.dac_bits,
            rho: self.rho,
            an: self.an,
            trials: self.trials,
            seed: self.seed,
            mode: self.mode,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// snr_db, phi, beta, alpha or dac_bits
    #[arg(long)]
    param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "full-precision")]
    full_precision: bool,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    id: u32,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "both")]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long = "full-precision")]
    full_precision: bool,
}

#[derive(Args)]
struct RhoTableArgs {
    #[arg(long = "max-bits", default_value_t = MAX_BITS)]
    max_bits: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&PathBuf>) -> dac_secrecy::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> dac_secrecy::Result<()> {
    let report = |args: &SystemArgs, f: fn(&SystemConfig) -> dac_secrecy::Result<String>| {
        let run = load_config(args.config.as_deref(), &args.values())?;
        print!("{}", f(&run.system)?);
        Ok(())
    };
    match cli.command {
        Command::Analytic(args) => report(&args, analytic_report),
        Command::OptimizePhi(args) => report(&args, optimize_phi_report),
        Command::Threshold(args) => report(&args, threshold_report),
        Command::Simulate(args) => {
            let run = load_config(args.config.as_deref(), &args.values())?;
            print!("{}", simulation_report(&run)?);
            Ok(())
        }
        Command::Sweep(args) => {
            let mut values = args.system.values();
            // the swept key only needs a placeholder in the base config
            match args.param {
                SweepParam::SnrDb => values.snr_db = values.snr_db.or(Some(args.from)),
                SweepParam::Phi => values.phi = values.phi.or(Some(args.from)),
                _ => {}
            }
            let run = load_config(args.system.config.as_deref(), &values)?;
            let spec = SweepSpec {
                param: args.param,
                from: args.from,
                to: args.to,
                step: args.step,
                base: run.system,
                mode: run.mode,
                trials: run.trials,
                seed: run.seed,
            };
            let rows = run_sweep(&spec)?;
            let mut out = output(args.out.as_ref())?;
            write_sweep_csv(&rows, &mut out, args.full_precision)?;
            out.flush()?;
            Ok(())
        }
        Command::Figure(args) => {
            let opts = FigureOptions {
                mode: args.mode,
                trials: args.trials,
                seed: args.seed,
                full_precision: args.full_precision,
            };
            for path in write_figure(args.id, &args.out, &opts)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::RhoTable(args) => {
            let mut out = output(args.out.as_ref())?;
            write_rho_table(&mut out, args.max_bits)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
