//! Configuration files, parameter sweeps, figure tables and text reports.
//!
//! This is the layer behind the `dac-secrecy` binary; everything is callable
//! from library code as well.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytic::{
    self, alpha_bar, beta_bar, eve_capacity_bound, secrecy_bound, secrecy_value, snr_threshold,
};
use crate::error::{Error, Result};
use crate::model::{
    db_to_linear, derive_params, linear_to_db, validate_regime, AnKind, DacModel, DerivedParams,
    SystemConfig,
};
use crate::montecarlo::{run_ergodic, MonteCarloReport, DEFAULT_TRIALS};
use crate::optimizer::{
    closed_form_phi, find_snr_threshold_numeric, maximize_phi, DEFAULT_RHO_PROBE, DEFAULT_TOL,
};

pub const DEFAULT_SEED: u64 = 1;

pub const SWEEP_HEADER: &str =
    "param,value,R_analytic,Cbar_analytic,Rsec_analytic,R_mc,R_mc_se,C_mc,C_mc_se,Rsec_mc,trials,error";

/// DAC resolutions plotted in every figure.
pub const FIGURE_DACS: [DacModel; 4] = [
    DacModel::Bits(1),
    DacModel::Bits(2),
    DacModel::Bits(3),
    DacModel::Ideal,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    MonteCarlo,
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, Mode::MonteCarlo | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "mc" => Ok(Mode::MonteCarlo),
            "both" => Ok(Mode::Both),
            _ => Err(Error::InvalidArgument(format!(
                "mode '{s}' (expected analytic, mc or both)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// configuration

/// Every setting a config file or command line may provide. `None` means unset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigValues {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub snr_db: Option<f64>,
    pub phi: Option<f64>,
    pub dac: Option<DacModel>,
    pub rho: Option<f64>,
    pub an: Option<AnKind>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
}

pub const CONFIG_KEYS: [&str; 11] = [
    "n", "k", "m", "snr_db", "phi", "dac_bits", "rho", "an", "trials", "seed", "mode",
];

/// A fully resolved run: system plus Monte Carlo options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> std::result::Result<T, String> {
    raw.parse()
        .map_err(|_| format!("cannot parse value '{raw}' for key '{key}'"))
}

impl ConfigValues {
    fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), String> {
        match key {
            "n" => self.n = Some(parse_value(key, raw)?),
            "k" => self.k = Some(parse_value(key, raw)?),
            "m" => self.m = Some(parse_value(key, raw)?),
            "snr_db" => self.snr_db = Some(parse_value(key, raw)?),
            "phi" => self.phi = Some(parse_value(key, raw)?),
            "dac_bits" => self.dac = Some(raw.parse().map_err(|e: Error| e.to_string())?),
            "rho" => self.rho = Some(parse_value(key, raw)?),
            "an" => self.an = Some(raw.parse().map_err(|e: Error| e.to_string())?),
            "trials" => self.trials = Some(parse_value(key, raw)?),
            "seed" => self.seed = Some(parse_value(key, raw)?),
            "mode" => self.mode = Some(raw.parse().map_err(|e: Error| e.to_string())?),
            _ => unreachable!("keys are checked before assignment"),
        }
        Ok(())
    }

    /// Values set in `other` replace ours.
    pub fn overridden_by(self, other: &ConfigValues) -> ConfigValues {
        ConfigValues {
            n: other.n.or(self.n),
            k: other.k.or(self.k),
            m: other.m.or(self.m),
            snr_db: other.snr_db.or(self.snr_db),
            phi: other.phi.or(self.phi),
            dac: other.dac.or(self.dac),
            rho: other.rho.or(self.rho),
            an: other.an.or(self.an),
            trials: other.trials.or(self.trials),
            seed: other.seed.or(self.seed),
            mode: other.mode.or(self.mode),
        }
    }

    /// Requires `n`, `k`, `m` and `snr_db`. `phi` defaults to 1 (no AN), the
    /// DAC to ideal, AN to null-space. An explicit `rho` replaces the DAC model.
    pub fn resolve(&self) -> Result<RunConfig> {
        let n = self.n.ok_or_else(|| Error::MissingKey("n".into()))?;
        let k = self.k.ok_or_else(|| Error::MissingKey("k".into()))?;
        let m = self.m.ok_or_else(|| Error::MissingKey("m".into()))?;
        let snr_db = self.snr_db.ok_or_else(|| Error::MissingKey("snr_db".into()))?;
        let dac = match (self.rho, self.dac) {
            (Some(rho), _) => DacModel::Rho(rho),
            (None, Some(d)) => d,
            (None, None) => DacModel::Ideal,
        };
        let system = SystemConfig::new(n, k, m)
            .with_snr_db(snr_db)
            .with_phi(self.phi.unwrap_or(1.0))
            .with_dac(dac)
            .with_an(self.an.unwrap_or(AnKind::NullSpace));
        Ok(RunConfig {
            system,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            mode: self.mode.unwrap_or(Mode::Analytic),
        })
    }
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse_config_text(text: &str) -> Result<ConfigValues> {
    let mut values = ConfigValues::default();
    let mut seen = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() || value.contains('=') {
            return Err(parse_err(format!("malformed line '{line}'")));
        }
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::UnknownKey(key.to_string()));
        }
        if let Some(first) = seen.insert(key.to_string(), line_no) {
            return Err(parse_err(format!("key '{key}' already set on line {first}")));
        }
        values.set(key, value).map_err(parse_err)?;
    }
    Ok(values)
}

/// Reads an optional config file and applies command-line overrides on top.
pub fn load_config(path: Option<&Path>, overrides: &ConfigValues) -> Result<RunConfig> {
    let base = match path {
        Some(p) => parse_config_text(&fs::read_to_string(p)?)?,
        None => ConfigValues::default(),
    };
    base.overridden_by(overrides).resolve()
}

fn check_regime(system: &SystemConfig) -> Result<()> {
    let v = validate_regime(system);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidRegime(v))
    }
}

// ---------------------------------------------------------------------------
// number formatting

/// Six significant digits in the style of C's `%g`, or seventeen in scientific
/// notation when `full` is set (enough to round-trip an `f64`).
pub fn format_number(x: f64, full: bool) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if full {
        return format!("{x:.16e}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt_number(x: Option<f64>, full: bool) -> String {
    x.map(|v| format_number(v, full)).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

// ---------------------------------------------------------------------------
// sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    SnrDb,
    Phi,
    Beta,
    Alpha,
    DacBits,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::SnrDb => "snr_db",
            SweepParam::Phi => "phi",
            SweepParam::Beta => "beta",
            SweepParam::Alpha => "alpha",
            SweepParam::DacBits => "dac_bits",
        }
    }

    /// Applies one swept value. `beta` and `alpha` set `K` and `M` to the
    /// nearest integer multiple of `1/N`.
    pub fn apply(self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let n = base.num_bs_antennas as f64;
        let count = |ratio: f64| -> Result<usize> {
            if !(ratio >= 0.0) {
                return Err(Error::InvalidArgument(format!("{}={ratio} is negative", self.name())));
            }
            Ok((ratio * n).round() as usize)
        };
        let mut c = base.clone();
        match self {
            SweepParam::SnrDb => c = c.with_snr_db(value),
            SweepParam::Phi => c.power_alloc = value,
            SweepParam::Beta => c.num_users = count(value)?,
            SweepParam::Alpha => c.num_eve_antennas = count(value)?,
            SweepParam::DacBits => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::InvalidArgument(format!("dac_bits={value} is not a bit count")));
                }
                c.dac = DacModel::Bits(value as u32);
            }
        }
        Ok(c)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" => Ok(SweepParam::SnrDb),
            "phi" => Ok(SweepParam::Phi),
            "beta" => Ok(SweepParam::Beta),
            "alpha" => Ok(SweepParam::Alpha),
            "dac_bits" => Ok(SweepParam::DacBits),
            _ => Err(Error::InvalidArgument(format!(
                "sweep parameter '{s}' (expected snr_db, phi, beta, alpha or dac_bits)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub base: SystemConfig,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    /// `from, from + step, ...` up to and including `to` (with a small
    /// tolerance so that `0.02..1.0 step 0.02` ends at 1.0).
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        if !(self.from <= self.to) {
            return Err(Error::InvalidArgument(format!(
                "from={} exceeds to={}",
                self.from, self.to
            )));
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| {
                let v = self.from + i as f64 * self.step;
                // keep the printed grid clean: 0.1 + 2*0.1 prints as 0.3
                (v * 1e12).round() / 1e12
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub analytic: Option<analytic::RateBreakdown>,
    pub mc: Option<MonteCarloReport>,
    pub trials: usize,
    pub error: Option<String>,
}

pub fn run_sweep_point(spec: &SweepSpec, value: f64) -> SweepRow {
    let mut row = SweepRow {
        param: spec.param,
        value,
        analytic: None,
        mc: None,
        trials: 0,
        error: None,
    };
    let config = match spec.param.apply(&spec.base, value).and_then(|c| {
        check_regime(&c)?;
        Ok(c)
    }) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let mut errors = Vec::new();
    if spec.mode.analytic() {
        match derive_params(&config).and_then(|dp| secrecy_bound(&dp, config.an_kind)) {
            Ok(r) => row.analytic = Some(r),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if spec.mode.monte_carlo() {
        match run_ergodic(&config, spec.trials, spec.seed) {
            Ok(r) => {
                row.trials = r.trials;
                row.mc = Some(r);
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        errors.dedup();
        row.error = Some(errors.join("; "));
    }
    row
}

/// One row per swept value; invalid points carry their error instead of numbers.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    Ok(spec.values()?.into_iter().map(|v| run_sweep_point(spec, v)).collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: &mut W, full: bool) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        let a = r.analytic.as_ref();
        let m = r.mc.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.param.name(),
            format_number(r.value, full),
            opt_number(a.map(|x| x.user_rate), full),
            opt_number(a.map(|x| x.eve_capacity_bound), full),
            opt_number(a.map(|x| x.secrecy_bound), full),
            opt_number(m.map(|x| x.user_rate), full),
            opt_number(m.map(|x| x.user_rate_se), full),
            opt_number(m.map(|x| x.eve_capacity), full),
            opt_number(m.map(|x| x.eve_capacity_se), full),
            opt_number(m.map(|x| x.secrecy_rate), full),
            r.trials,
            r.error.as_deref().map(csv_text).unwrap_or_default(),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// text reports

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into())
}

fn fmt_db(x: Option<f64>) -> String {
    x.map(|v| format!("{:.4} dB", linear_to_db(v)))
        .unwrap_or_else(|| "n/a".into())
}

/// Closed-form rates, thresholds and optimal power split of one configuration.
pub fn analytic_report(system: &SystemConfig) -> Result<String> {
    check_regime(system)?;
    let dp = derive_params(system)?;
    let kind = system.an_kind;
    let rates = secrecy_bound(&dp, kind)?;
    let closed = closed_form_phi(&dp, kind).ok();
    let numeric = maximize_phi(&dp, kind, DEFAULT_TOL)?;
    let mut s = String::new();
    writeln!(s, "config      N={} K={} M={} snr={:.4} dB phi={} dac={} rho={:.6} an={}",
        system.num_bs_antennas, system.num_users, system.num_eve_antennas,
        system.snr_db(), system.power_alloc, system.dac, dp.rho, kind).unwrap();
    writeln!(s, "R           {:.6}", rates.user_rate).unwrap();
    writeln!(s, "Cbar        {:.6}", rates.eve_capacity_bound).unwrap();
    writeln!(s, "Rsec        {:.6}", rates.secrecy_bound).unwrap();
    writeln!(s, "beta_bar    {}", fmt_opt(beta_bar(dp.alpha, dp.phi, dp.rho_tilde))).unwrap();
    writeln!(s, "alpha_bar   {:.6}", alpha_bar(&dp, kind)).unwrap();
    writeln!(s, "snr_thresh  {}", fmt_db(snr_threshold(&dp, kind).ok())).unwrap();
    writeln!(s, "phi_closed  {}", fmt_opt(closed.as_ref().map(|r| r.phi))).unwrap();
    writeln!(s, "phi_numeric {:.6} (Rsec {:.6})", numeric.phi, numeric.value).unwrap();
    if numeric.local_maxima.len() > 1 {
        writeln!(s, "warning     several local maxima in phi: {:?}", numeric.local_maxima).unwrap();
    }
    Ok(s)
}

pub fn simulation_report(run: &RunConfig) -> Result<String> {
    check_regime(&run.system)?;
    let mc = run_ergodic(&run.system, run.trials, run.seed)?;
    let dp = derive_params(&run.system)?;
    let bound = secrecy_bound(&dp, run.system.an_kind).ok();
    let mut s = String::new();
    writeln!(s, "trials      {} (seed {})", mc.trials, mc.seed).unwrap();
    writeln!(s, "R_mc        {:.6} ± {:.6}", mc.user_rate, mc.user_rate_se).unwrap();
    writeln!(s, "C_mc        {:.6} ± {:.6}", mc.eve_capacity, mc.eve_capacity_se).unwrap();
    writeln!(s, "Rsec_mc     {:.6} ± {:.6}", mc.secrecy_rate, mc.secrecy_se).unwrap();
    if let Some(b) = bound {
        writeln!(s, "R_bound     {:.6}", b.user_rate).unwrap();
        writeln!(s, "Cbar        {:.6}", b.eve_capacity_bound).unwrap();
        writeln!(s, "Rsec_bound  {:.6}", b.secrecy_bound).unwrap();
    }
    Ok(s)
}

pub fn optimize_phi_report(system: &SystemConfig) -> Result<String> {
    check_regime(system)?;
    let dp = derive_params(system)?;
    let kind = system.an_kind;
    let numeric = maximize_phi(&dp, kind, DEFAULT_TOL)?;
    let mut s = String::new();
    match closed_form_phi(&dp, kind) {
        Ok(c) => writeln!(s, "closed_form  phi={:.6} Rsec={:.6}", c.phi, c.value).unwrap(),
        Err(e) => writeln!(s, "closed_form  unavailable ({e})").unwrap(),
    }
    writeln!(s, "numeric      phi={:.6} Rsec={:.6} ({:?}, {} evaluations)",
        numeric.phi, numeric.value, numeric.method, numeric.iterations).unwrap();
    writeln!(s, "local_maxima {:?}", numeric.local_maxima).unwrap();
    Ok(s)
}

pub fn threshold_report(system: &SystemConfig) -> Result<String> {
    check_regime(system)?;
    let dp = derive_params(system)?;
    let kind = system.an_kind;
    let closed = snr_threshold(&dp, kind);
    let numeric = find_snr_threshold_numeric(&dp, kind, DEFAULT_RHO_PROBE);
    let mut s = String::new();
    match closed {
        Ok(g) => writeln!(s, "snr_thresh_closed  {:.4} dB", linear_to_db(g)).unwrap(),
        Err(e) => writeln!(s, "snr_thresh_closed  unavailable ({e})").unwrap(),
    }
    match numeric {
        Ok(g) => writeln!(s, "snr_thresh_numeric {:.4} dB", linear_to_db(g)).unwrap(),
        Err(e) => writeln!(s, "snr_thresh_numeric unavailable ({e})").unwrap(),
    }
    writeln!(s, "beta_bar           {}", fmt_opt(beta_bar(dp.alpha, dp.phi, dp.rho_tilde))).unwrap();
    writeln!(s, "alpha_bar          {:.6}", alpha_bar(&dp, kind)).unwrap();
    Ok(s)
}

// ---------------------------------------------------------------------------
// figures

pub const FIGURE_IDS: std::ops::RangeInclusive<u32> = 2..=10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub full_precision: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            mode: Mode::Both,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            full_precision: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub series: String,
    pub x: f64,
    pub analytic: Option<f64>,
    pub mc: Option<f64>,
    pub mc_se: Option<f64>,
    pub trials: usize,
    pub error: Option<String>,
}

/// Highlighted point, e.g. a minimizer or an optimal power split.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub series: String,
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u32,
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub rows: Vec<FigureRow>,
    pub markers: Vec<Marker>,
}

impl FigureData {
    pub fn series(&self, name: &str) -> impl Iterator<Item = &FigureRow> + '_ {
        let name = name.to_string();
        self.rows.iter().filter(move |r| r.series == name)
    }
}

fn dac_series(dac: DacModel) -> String {
    format!("b={}", dac.label())
}

fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12).collect()
}

#[derive(Clone, Copy)]
enum Quantity {
    EveCapacity,
    Secrecy,
}

fn evaluate(config: &SystemConfig, what: Quantity, opts: &FigureOptions, series: String, x: f64) -> FigureRow {
    let mut row = FigureRow { series, x, analytic: None, mc: None, mc_se: None, trials: 0, error: None };
    if let Err(e) = check_regime(config) {
        row.error = Some(e.to_string());
        return row;
    }
    let mut errors = Vec::new();
    if opts.mode.analytic() {
        let value = derive_params(config).and_then(|dp| match what {
            Quantity::EveCapacity => eve_capacity_bound(&dp),
            Quantity::Secrecy => secrecy_value(&dp, config.an_kind),
        });
        match value {
            Ok(v) => row.analytic = Some(v),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if opts.mode.monte_carlo() {
        match run_ergodic(config, opts.trials, opts.seed) {
            Ok(r) => {
                let (v, se) = match what {
                    Quantity::EveCapacity => (r.eve_capacity, r.eve_capacity_se),
                    Quantity::Secrecy => (r.secrecy_rate, r.secrecy_se),
                };
                row.mc = Some(v);
                row.mc_se = Some(se);
                row.trials = r.trials;
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        errors.dedup();
        row.error = Some(errors.join("; "));
    }
    row
}

/// Computes the table behind one of the paper's result figures (2 to 10).
pub fn figure_data(id: u32, opts: &FigureOptions) -> Result<FigureData> {
    let mut rows = Vec::new();
    let mut markers = Vec::new();
    let (title, x_label, y_label) = match id {
        2 => {
            for dac in FIGURE_DACS {
                let base = SystemConfig::new(100, 10, 7).with_phi(0.7).with_dac(dac);
                for beta in grid(0.1, 0.9, 0.05) {
                    let mut c = base.clone();
                    c.num_users = (beta * 100.0).round() as usize;
                    rows.push(evaluate(&c, Quantity::EveCapacity, opts, dac_series(dac), beta));
                }
                let dp = derive_params(&base)?;
                if let Some(bb) = beta_bar(dp.alpha, dp.phi, dp.rho_tilde) {
                    let y = eve_capacity_bound(&dp.with_beta(bb))?;
                    markers.push(Marker { series: dac_series(dac), label: "beta_bar".into(), x: bb, y });
                }
            }
            ("eavesdropper capacity vs beta (N=100, M=7, phi=0.7)", "beta", "capacity [bit/s/Hz]")
        }
        3 => {
            for dac in FIGURE_DACS {
                let base = SystemConfig::new(100, 10, 5).with_dac(dac);
                for phi in grid(0.05, 1.0, 0.05) {
                    let c = base.clone().with_phi(phi);
                    rows.push(evaluate(&c, Quantity::EveCapacity, opts, dac_series(dac), phi));
                }
            }
            ("eavesdropper capacity vs phi (N=100, K=10, M=5)", "phi", "capacity [bit/s/Hz]")
        }
        4 | 5 => {
            let (m, phi, kind) = if id == 4 { (16, 0.8, AnKind::NullSpace) } else { (6, 0.7, AnKind::Random) };
            for dac in FIGURE_DACS {
                let base = SystemConfig::new(128, 8, m).with_phi(phi).with_dac(dac).with_an(kind);
                for snr_db in grid(0.0, 20.0, 2.0) {
                    let c = base.clone().with_snr_db(snr_db);
                    rows.push(evaluate(&c, Quantity::Secrecy, opts, dac_series(dac), snr_db));
                }
            }
            let dp = derive_params(&SystemConfig::new(128, 8, m).with_phi(phi))?;
            if let Ok(t) = snr_threshold(&dp, kind) {
                markers.push(Marker { series: "b=inf".into(), label: "snr_threshold".into(), x: linear_to_db(t), y: 0.0 });
            }
            if id == 4 {
                ("secrecy rate vs SNR, null-space AN (N=128, K=8, M=16, phi=0.8)", "snr_db", "secrecy rate [bit/s/Hz]")
            } else {
                ("secrecy rate vs SNR, random AN (N=128, K=8, M=6, phi=0.7)", "snr_db", "secrecy rate [bit/s/Hz]")
            }
        }
        6 => {
            for kind in AnKind::ALL {
                for dac in FIGURE_DACS {
                    let rho = crate::quantizer::distortion_factor(dac)?;
                    let series = format!("{kind}/{}", dac_series(dac));
                    for beta in grid(0.05, 0.95, 0.05) {
                        let dp = analytic_point(beta, db_to_linear(10.0), rho)?;
                        rows.push(FigureRow {
                            series: series.clone(),
                            x: beta,
                            analytic: Some(alpha_bar(&dp, kind)),
                            mc: None,
                            mc_se: None,
                            trials: 0,
                            error: None,
                        });
                    }
                }
            }
            ("threshold ratio alpha_bar vs beta (snr=10 dB)", "beta", "alpha_bar")
        }
        7 | 9 => {
            let kind = if id == 7 { AnKind::NullSpace } else { AnKind::Random };
            for snr_db in [0.0, 5.0] {
                for dac in FIGURE_DACS {
                    let series = format!("{}/{}dB", dac_series(dac), snr_db);
                    let base = SystemConfig::new(128, 8, 16).with_snr_db(snr_db).with_dac(dac).with_an(kind);
                    for phi in grid(0.05, 1.0, 0.05) {
                        let c = base.clone().with_phi(phi);
                        rows.push(evaluate(&c, Quantity::Secrecy, opts, series.clone(), phi));
                    }
                    let dp = derive_params(&base.clone().with_phi(0.5))?;
                    let numeric = maximize_phi(&dp, kind, DEFAULT_TOL)?;
                    markers.push(Marker { series: series.clone(), label: "phi_numeric".into(), x: numeric.phi, y: numeric.value });
                    if let Ok(closed) = closed_form_phi(&dp, kind) {
                        markers.push(Marker { series: series.clone(), label: "phi_closed".into(), x: closed.phi, y: closed.value });
                    }
                }
            }
            if id == 7 {
                ("secrecy rate vs phi, null-space AN (N=128, K=8, M=16)", "phi", "secrecy rate [bit/s/Hz]")
            } else {
                ("secrecy rate vs phi, random AN (N=128, K=8, M=16)", "phi", "secrecy rate [bit/s/Hz]")
            }
        }
        8 | 10 => {
            let (m, kind) = if id == 8 { (16, AnKind::NullSpace) } else { (12, AnKind::Random) };
            for dac in FIGURE_DACS {
                let base = SystemConfig::new(128, 8, m).with_dac(dac).with_an(kind);
                for snr_db in grid(0.0, 20.0, 2.0) {
                    let dp = derive_params(&base.clone().with_snr_db(snr_db).with_phi(0.5))?;
                    let best = maximize_phi(&dp, kind, DEFAULT_TOL)?;
                    let c = base.clone().with_snr_db(snr_db).with_phi(best.phi);
                    rows.push(evaluate(&c, Quantity::Secrecy, opts, dac_series(dac), snr_db));
                    markers.push(Marker { series: dac_series(dac), label: "phi_opt".into(), x: snr_db, y: best.phi });
                }
            }
            if id == 8 {
                ("secrecy rate with optimal phi vs SNR, null-space AN (N=128, K=8, M=16)", "snr_db", "secrecy rate [bit/s/Hz]")
            } else {
                ("secrecy rate with optimal phi vs SNR, random AN (N=128, K=8, M=12)", "snr_db", "secrecy rate [bit/s/Hz]")
            }
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "figure id {id} (expected {}..={})",
                FIGURE_IDS.start(),
                FIGURE_IDS.end()
            )))
        }
    };
    Ok(FigureData { id, title: title.into(), x_label, y_label, rows, markers })
}

/// Parameters with `alpha = 0`, used where only `beta`, SNR and `rho` matter.
fn analytic_point(beta: f64, snr: f64, rho: f64) -> Result<DerivedParams> {
    DerivedParams::from_ratios(0.0, beta, snr, 0.5, rho)
}

pub fn write_figure_csv<W: Write>(fig: &FigureData, out: &mut W, full: bool) -> Result<()> {
    writeln!(out, "series,{},analytic,mc,mc_se,trials,error", fig.x_label)?;
    for r in &fig.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.series,
            format_number(r.x, full),
            opt_number(r.analytic, full),
            opt_number(r.mc, full),
            opt_number(r.mc_se, full),
            r.trials,
            r.error.as_deref().map(csv_text).unwrap_or_default(),
        )?;
    }
    Ok(())
}

pub fn write_markers_csv<W: Write>(fig: &FigureData, out: &mut W, full: bool) -> Result<()> {
    writeln!(out, "series,label,x,y")?;
    for m in &fig.markers {
        writeln!(out, "{},{},{},{}", m.series, m.label, format_number(m.x, full), format_number(m.y, full))?;
    }
    Ok(())
}

/// gnuplot script drawing every series of `csv_name` (analytic as lines, Monte
/// Carlo as points).
pub fn plot_script(fig: &FigureData, csv_name: &str) -> String {
    let mut series: Vec<&str> = Vec::new();
    for r in &fig.rows {
        if !series.contains(&r.series.as_str()) {
            series.push(&r.series);
        }
    }
    let mut s = String::new();
    writeln!(s, "# {}", fig.title).unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key outside right").unwrap();
    writeln!(s, "set xlabel '{}'", fig.x_label).unwrap();
    writeln!(s, "set ylabel '{}'", fig.y_label).unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set output 'fig{}.png'", fig.id).unwrap();
    writeln!(s, "SERIES = \"{}\"", series.join(" ")).unwrap();
    writeln!(
        s,
        "plot for [s in SERIES] \"< awk -F, -v s=\".s.\" '$1==s' {csv_name}\" using 2:3 with lines title s, \\\n     for [s in SERIES] \"< awk -F, -v s=\".s.\" '$1==s' {csv_name}\" using 2:4 with points notitle"
    )
    .unwrap();
    s
}

/// Writes `figN.csv`, `figN_markers.csv` and `figN.gp` into `outdir`.
pub fn write_figure(id: u32, outdir: &Path, opts: &FigureOptions) -> Result<Vec<PathBuf>> {
    let fig = figure_data(id, opts)?;
    fs::create_dir_all(outdir)?;
    let csv_name = format!("fig{id}.csv");
    let csv_path = outdir.join(&csv_name);
    let markers_path = outdir.join(format!("fig{id}_markers.csv"));
    let script_path = outdir.join(format!("fig{id}.gp"));

    let mut f = fs::File::create(&csv_path)?;
    write_figure_csv(&fig, &mut f, opts.full_precision)?;
    let mut f = fs::File::create(&markers_path)?;
    write_markers_csv(&fig, &mut f, opts.full_precision)?;
    fs::write(&script_path, plot_script(&fig, &csv_name))?;
    Ok(vec![csv_path, markers_path, script_path])
}
