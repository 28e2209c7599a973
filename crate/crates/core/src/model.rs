//! Configuration and derived scalar parameters shared by every other module.
//!
//! A [`SystemConfig`] holds the raw experiment knobs (array sizes, power, noise,
//! power split, DAC model, AN design). [`DerivedParams`] holds every scalar that
//! appears in the closed-form expressions: the antenna and loading ratios
//! `alpha = M/N` and `beta = K/N`, the transmit SNR, the per-user signal power
//! `p`, the per-dimension AN power `q`, and the shorthands `rho_tilde`, `nu`,
//! `mu`, `zeta`.

use std::fmt;

use crate::error::{Error, Result};
use crate::quantizer;

/// Artificial-noise shaping design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnKind {
    /// AN confined to the null space of the user channel.
    NullSpace,
    /// Independent unit-norm random directions.
    Random,
}

impl AnKind {
    pub const ALL: [AnKind; 2] = [AnKind::NullSpace, AnKind::Random];

    pub fn label(self) -> &'static str {
        match self {
            AnKind::NullSpace => "null",
            AnKind::Random => "random",
        }
    }
}

impl fmt::Display for AnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for AnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "null" | "nullspace" | "null-space" => Ok(AnKind::NullSpace),
            "random" | "rand" => Ok(AnKind::Random),
            other => Err(Error::InvalidArgument(format!(
                "unknown AN kind '{other}' (expected null or random)"
            ))),
        }
    }
}

/// DAC resolution, either as a bit count resolved through the Lloyd–Max table
/// or as an explicit distortion factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DacModel {
    /// Infinite resolution, `rho = 0`.
    Ideal,
    Bits(u32),
    /// Explicit distortion factor in `[0, 1)`.
    Rho(f64),
}

impl DacModel {
    pub fn label(&self) -> String {
        match self {
            DacModel::Ideal => "inf".to_string(),
            DacModel::Bits(b) => b.to_string(),
            DacModel::Rho(r) => format!("rho={r}"),
        }
    }
}

impl fmt::Display for DacModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for DacModel {
    type Err = Error;

    /// Parses a bit count (`1`..`8`) or `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(DacModel::Ideal);
        }
        let bits: u32 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("invalid DAC bits '{s}'")))?;
        if !(1..=quantizer::MAX_BITS).contains(&bits) {
            return Err(Error::InvalidArgument(format!(
                "DAC bits must be in 1..={} or inf, got {bits}",
                quantizer::MAX_BITS
            )));
        }
        Ok(DacModel::Bits(bits))
    }
}

/// Raw parameters of one downlink experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_bs_antennas: usize,
    pub num_users: usize,
    pub num_eve_antennas: usize,
    /// Total transmit power `P` in linear units.
    pub total_power: f64,
    /// Thermal noise power at the users, linear.
    pub noise_power: f64,
    /// Fraction of `P` given to the confidential signals.
    pub power_alloc: f64,
    pub dac: DacModel,
    pub an_kind: AnKind,
}

impl SystemConfig {
    /// Unit total power, 10 dB SNR, no AN, ideal DACs, null-space AN design.
    pub fn new(num_bs_antennas: usize, num_users: usize, num_eve_antennas: usize) -> Self {
        SystemConfig {
            num_bs_antennas,
            num_users,
            num_eve_antennas,
            total_power: 1.0,
            noise_power: 0.1,
            power_alloc: 1.0,
            dac: DacModel::Ideal,
            an_kind: AnKind::NullSpace,
        }
    }

    /// Sets the noise power so that `P / sigma_n^2` equals the given SNR in dB.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.noise_power = self.total_power / db_to_linear(snr_db);
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.power_alloc = phi;
        self
    }

    pub fn with_dac(mut self, dac: DacModel) -> Self {
        self.dac = dac;
        self
    }

    pub fn with_an(mut self, an_kind: AnKind) -> Self {
        self.an_kind = an_kind;
        self
    }

    pub fn snr_linear(&self) -> f64 {
        self.total_power / self.noise_power
    }

    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.snr_linear())
    }
}

/// One named failed condition reported by [`validate_regime`].
#[derive(Debug, Clone, PartialEq)]
pub enum RegimeViolation {
    ZeroDimension(&'static str),
    UsersNotBelowAntennas,
    RatioSumNotBelowOne,
    PhiOutOfRange(f64),
    RhoOutOfRange(f64),
    ZeroBits,
    NonPositivePower(f64),
    NonPositiveNoise(f64),
}

impl fmt::Display for RegimeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeViolation::ZeroDimension(name) => write!(f, "{name}=0"),
            RegimeViolation::UsersNotBelowAntennas => f.write_str("K≥N"),
            RegimeViolation::RatioSumNotBelowOne => f.write_str("alpha+beta≥1"),
            RegimeViolation::PhiOutOfRange(v) => write!(f, "phi∉(0,1] (phi={v})"),
            RegimeViolation::RhoOutOfRange(v) => write!(f, "rho∉[0,1) (rho={v})"),
            RegimeViolation::ZeroBits => f.write_str("bits<1"),
            RegimeViolation::NonPositivePower(v) => write!(f, "P≤0 (P={v})"),
            RegimeViolation::NonPositiveNoise(v) => write!(f, "noise power≤0 ({v})"),
        }
    }
}

/// Collects every failed parameter condition. Empty means the configuration is usable.
pub fn validate_regime(config: &SystemConfig) -> Vec<RegimeViolation> {
    let mut out = Vec::new();
    let (n, k, m) = (
        config.num_bs_antennas,
        config.num_users,
        config.num_eve_antennas,
    );
    for (name, v) in [("N", n), ("K", k), ("M", m)] {
        if v == 0 {
            out.push(RegimeViolation::ZeroDimension(name));
        }
    }
    if k >= n && n > 0 {
        out.push(RegimeViolation::UsersNotBelowAntennas);
    }
    if m + k >= n && n > 0 {
        out.push(RegimeViolation::RatioSumNotBelowOne);
    }
    let phi = config.power_alloc;
    if !(phi > 0.0 && phi <= 1.0) {
        out.push(RegimeViolation::PhiOutOfRange(phi));
    }
    match config.dac {
        DacModel::Rho(r) if !(0.0..1.0).contains(&r) => {
            out.push(RegimeViolation::RhoOutOfRange(r))
        }
        DacModel::Bits(0) => out.push(RegimeViolation::ZeroBits),
        _ => {}
    }
    if !(config.total_power > 0.0) {
        out.push(RegimeViolation::NonPositivePower(config.total_power));
    }
    if !(config.noise_power > 0.0) {
        out.push(RegimeViolation::NonPositiveNoise(config.noise_power));
    }
    out
}

/// Every scalar symbol of the closed-form layer.
///
/// `n` is the number of BS antennas; it is nominal (1.0) when the parameters were
/// built from ratios only, in which case `p` and `q` are per unit antenna count.
/// All closed forms depend only on the ratios, so the nominal scale is harmless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub n: f64,
    pub total_power: f64,
    pub noise_power: f64,
    pub phi: f64,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Transmit SNR `P / sigma_n^2`, linear.
    pub snr: f64,
    pub p: f64,
    pub q: f64,
    pub rho_tilde: f64,
    pub nu: f64,
    pub mu: f64,
    pub zeta: f64,
}

impl DerivedParams {
    /// Builds the parameter set from ratios, with unit power and nominal `n = 1`.
    ///
    /// `alpha` may be zero here (useful for the `alpha_bar` threshold, which does
    /// not depend on it).
    pub fn from_ratios(alpha: f64, beta: f64, snr: f64, phi: f64, rho: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(beta > 0.0 && beta < 1.0) {
            bad.push(RegimeViolation::UsersNotBelowAntennas);
        }
        if !(alpha >= 0.0 && alpha + beta < 1.0) {
            bad.push(RegimeViolation::RatioSumNotBelowOne);
        }
        check_scalars(phi, rho, snr, &mut bad);
        if !bad.is_empty() {
            return Err(Error::InvalidRegime(bad));
        }
        Ok(Self::build(1.0, alpha, beta, 1.0, 1.0 / snr, phi, rho))
    }

    fn build(
        n: f64,
        alpha: f64,
        beta: f64,
        total_power: f64,
        noise_power: f64,
        phi: f64,
        rho: f64,
    ) -> Self {
        let k = beta * n;
        let rho_tilde = rho / (1.0 - rho);
        DerivedParams {
            n,
            total_power,
            noise_power,
            phi,
            rho,
            alpha,
            beta,
            snr: total_power / noise_power,
            p: phi * total_power / k,
            q: (1.0 - phi) * total_power / (n - k),
            rho_tilde,
            nu: 1.0 - alpha - beta,
            mu: 1.0 - phi + rho_tilde,
            zeta: alpha * beta * (1.0 - phi) * (1.0 - phi),
        }
    }

    /// Same system with a different power split. `phi` must lie in `(0, 1]`.
    pub fn with_phi(&self, phi: f64) -> Self {
        debug_assert!(phi > 0.0 && phi <= 1.0);
        Self::build(
            self.n,
            self.alpha,
            self.beta,
            self.total_power,
            self.noise_power,
            phi,
            self.rho,
        )
    }

    pub fn with_rho(&self, rho: f64) -> Self {
        debug_assert!((0.0..1.0).contains(&rho));
        Self::build(
            self.n,
            self.alpha,
            self.beta,
            self.total_power,
            self.noise_power,
            self.phi,
            rho,
        )
    }

    /// Same system at a different linear transmit SNR (noise power rescaled).
    pub fn with_snr(&self, snr: f64) -> Self {
        Self::build(
            self.n,
            self.alpha,
            self.beta,
            self.total_power,
            self.total_power / snr,
            self.phi,
            self.rho,
        )
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self::build(
            self.n,
            alpha,
            self.beta,
            self.total_power,
            self.noise_power,
            self.phi,
            self.rho,
        )
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self::build(
            self.n,
            self.alpha,
            beta,
            self.total_power,
            self.noise_power,
            self.phi,
            self.rho,
        )
    }

    pub fn num_users(&self) -> f64 {
        self.beta * self.n
    }

    pub fn num_eve_antennas(&self) -> f64 {
        self.alpha * self.n
    }
}

fn check_scalars(phi: f64, rho: f64, snr: f64, bad: &mut Vec<RegimeViolation>) {
    if !(phi > 0.0 && phi <= 1.0) {
        bad.push(RegimeViolation::PhiOutOfRange(phi));
    }
    if !(0.0..1.0).contains(&rho) {
        bad.push(RegimeViolation::RhoOutOfRange(rho));
    }
    if !(snr > 0.0 && snr.is_finite()) {
        bad.push(RegimeViolation::NonPositiveNoise(1.0 / snr));
    }
}

/// Resolves the DAC model and computes every derived scalar.
pub fn derive_params(config: &SystemConfig) -> Result<DerivedParams> {
    let violations = validate_regime(config);
    if !violations.is_empty() {
        return Err(Error::InvalidRegime(violations));
    }
    let rho = quantizer::distortion_factor(config.dac)?;
    let n = config.num_bs_antennas as f64;
    Ok(DerivedParams::build(
        n,
        config.num_eve_antennas as f64 / n,
        config.num_users as f64 / n,
        config.total_power,
        config.noise_power,
        config.power_alloc,
        rho,
    ))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
