//! Gaussian-optimal scalar quantizers and the Bussgang DAC model.
//!
//! The distortion factor `rho(b)` of a `b`-bit DAC is the normalized MSE of the
//! Lloyd–Max quantizer on a unit-variance Gaussian. The table is regenerated here
//! rather than copied from a reference. Simulations use the statistical model
//! `x_q = sqrt(1 - rho) x + n` with `n ~ CN(0, rho diag(E{x xᴴ}))`; the true
//! quantizer ([`scalar_quantize`]) exists to validate that model.

use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::model::DacModel;
use crate::sampling::complex_normal;

pub const MAX_BITS: u32 = 8;

/// Convergence tolerance (max level change) used for the cached `rho` table.
pub const TABLE_TOLERANCE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 2_000_000;
/// Integration domain for distortion; the Gaussian mass beyond is below 1e-32.
const TAIL: f64 = 12.0;
const SIMPSON_PANELS: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerSpec {
    pub bits: u32,
    /// `2^bits` reproduction points for a unit-variance input, increasing.
    pub levels: Vec<f64>,
    /// `2^bits - 1` decision boundaries, increasing.
    pub thresholds: Vec<f64>,
    /// Normalized MSE on a unit-variance Gaussian.
    pub distortion: f64,
}

impl QuantizerSpec {
    /// Cell index of a normalized input. An input exactly on a threshold goes to
    /// the higher cell.
    pub fn index_of(&self, u: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= u)
    }

    /// Gain that makes the output power equal the input power, `1 / sqrt(1 - rho)`.
    ///
    /// A Lloyd–Max quantizer shrinks power to `(1 - rho)`; after this rescaling its
    /// Bussgang gain is `sqrt(1 - rho)` and the residual power is `rho`.
    pub fn power_normalization(&self) -> f64 {
        1.0 / (1.0 - self.distortion).sqrt()
    }
}

fn std_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }
}

/// Upper tail `P(X > x)` for a standard normal.
fn upper_tail(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x == f64::NEG_INFINITY {
        1.0
    } else {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    }
}

/// `P(a < X < b)` computed on the side of zero that avoids cancellation.
fn cell_probability(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        upper_tail(-b) - upper_tail(-a)
    } else {
        1.0 - upper_tail(b) - upper_tail(-a)
    }
}

fn std_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

fn midpoints(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Runs the Lloyd–Max fixed-point iteration for a unit-variance real Gaussian.
pub fn lloyd_max_design(bits: u32, tolerance: f64) -> Result<QuantizerSpec> {
    if !(1..=MAX_BITS).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "bits must be in 1..={MAX_BITS}, got {bits}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let count = 1usize << bits;
    let mut levels: Vec<f64> = (0..count)
        .map(|i| std_quantile((i as f64 + 0.5) / count as f64))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let thresholds = midpoints(&levels);
        let mut next = Vec::with_capacity(count);
        for i in 0..count {
            let a = if i == 0 { f64::NEG_INFINITY } else { thresholds[i - 1] };
            let b = if i + 1 == count { f64::INFINITY } else { thresholds[i] };
            // centroid of the cell
            next.push((std_pdf(a) - std_pdf(b)) / cell_probability(a, b));
        }
        for i in 0..count / 2 {
            let m = 0.5 * (next[count - 1 - i] - next[i]);
            next[i] = -m;
            next[count - 1 - i] = m;
        }
        let delta = levels
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        levels = next;
        if delta < tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Lloyd–Max iteration",
            iterations: MAX_ITERATIONS,
        });
    }
    let thresholds = midpoints(&levels);
    let distortion = gaussian_distortion(&levels, &thresholds);
    Ok(QuantizerSpec {
        bits,
        levels,
        thresholds,
        distortion,
    })
}

/// Mean-squared error of a quantizer on a unit-variance Gaussian, by composite
/// Simpson integration over each cell (truncated to `[-12, 12]`).
pub fn gaussian_distortion(levels: &[f64], thresholds: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &level) in levels.iter().enumerate() {
        let a = if i == 0 { -TAIL } else { thresholds[i - 1].max(-TAIL) };
        let b = if i + 1 == levels.len() { TAIL } else { thresholds[i].min(TAIL) };
        if b <= a {
            continue;
        }
        let h = (b - a) / SIMPSON_PANELS as f64;
        let f = |x: f64| (x - level) * (x - level) * std_pdf(x);
        let mut acc = f(a) + f(b);
        for j in 1..SIMPSON_PANELS {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + j as f64 * h);
        }
        total += acc * h / 3.0;
    }
    total
}

static SPECS: [OnceLock<QuantizerSpec>; MAX_BITS as usize] =
    [const { OnceLock::new() }; MAX_BITS as usize];

/// Cached Lloyd–Max design at [`TABLE_TOLERANCE`].
pub fn cached_spec(bits: u32) -> Result<&'static QuantizerSpec> {
    if !(1..=MAX_BITS).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "bits must be in 1..={MAX_BITS}, got {bits}"
        )));
    }
    let slot = &SPECS[bits as usize - 1];
    if let Some(spec) = slot.get() {
        return Ok(spec);
    }
    let spec = lloyd_max_design(bits, TABLE_TOLERANCE)?;
    Ok(slot.get_or_init(|| spec))
}

/// Resolves a DAC model to its distortion factor.
pub fn distortion_factor(dac: DacModel) -> Result<f64> {
    match dac {
        DacModel::Ideal => Ok(0.0),
        DacModel::Rho(rho) => Ok(rho),
        DacModel::Bits(bits) => Ok(cached_spec(bits)?.distortion),
    }
}

/// `(bits, rho)` for `1..=max_bits`.
pub fn rho_table(max_bits: u32) -> Result<Vec<(u32, f64)>> {
    (1..=max_bits)
        .map(|b| cached_spec(b).map(|s| (b, s.distortion)))
        .collect()
}

/// Writes the `rho` table as CSV with header `bits,rho`.
pub fn write_rho_table<W: Write>(out: &mut W, max_bits: u32) -> Result<()> {
    writeln!(out, "bits,rho")?;
    for (b, rho) in rho_table(max_bits)? {
        writeln!(out, "{b},{rho:.12}")?;
    }
    Ok(())
}

/// Applies the statistical Bussgang DAC model to one transmit vector.
///
/// `cov_diag` is the diagonal of `p diag(W Wᴴ) + q diag(V Vᴴ)`; the returned
/// vector is `sqrt(1 - rho) x + n` with `n_i ~ CN(0, rho cov_diag[i])` drawn
/// fresh from `rng`.
pub fn bussgang_quantize<R: Rng + ?Sized>(
    x: &[Complex64],
    rho: f64,
    cov_diag: &[f64],
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if x.len() != cov_diag.len() {
        return Err(Error::InvalidArgument(format!(
            "x has length {} but cov_diag has length {}",
            x.len(),
            cov_diag.len()
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho={rho} outside [0,1)")));
    }
    if let Some(bad) = cov_diag.iter().find(|&&c| c < 0.0 || c.is_nan()) {
        return Err(Error::InvalidArgument(format!(
            "negative quantization covariance entry {bad}"
        )));
    }
    if rho == 0.0 {
        return Ok(x.to_vec());
    }
    let gain = (1.0 - rho).sqrt();
    Ok(x.iter()
        .zip(cov_diag)
        .map(|(&xi, &c)| gain * xi + complex_normal(rng, rho * c))
        .collect())
}

/// Quantizes real and imaginary parts independently with the given spec.
///
/// `scale` is the per-component standard deviation of the input; inputs are
/// divided by it before the table lookup and outputs multiplied back.
pub fn scalar_quantize(x: &[Complex64], spec: &QuantizerSpec, scale: f64) -> Vec<Complex64> {
    let q = |v: f64| spec.levels[spec.index_of(v / scale)] * scale;
    x.iter().map(|z| Complex64::new(q(z.re), q(z.im))).collect()
}

/// [`scalar_quantize`] followed by the power normalization `1 / sqrt(1 - rho)`,
/// i.e. a DAC whose output power matches its input power.
pub fn dac_quantize(x: &[Complex64], spec: &QuantizerSpec, scale: f64) -> Vec<Complex64> {
    let g = spec.power_normalization();
    scalar_quantize(x, spec, scale)
        .into_iter()
        .map(|z| z * g)
        .collect()
}

/// Empirical Bussgang decomposition of `outputs` against `inputs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BussgangEstimate {
    /// Least-squares real gain of outputs on inputs.
    pub gain: f64,
    /// Residual power over input power.
    pub residual_rho: f64,
    /// `|<x, r>| / (|x| |r|)`; zero when the residual vanishes.
    pub cross_correlation: f64,
}

pub fn estimate_bussgang(inputs: &[Complex64], outputs: &[Complex64]) -> Result<BussgangEstimate> {
    if inputs.len() != outputs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} inputs but {} outputs",
            inputs.len(),
            outputs.len()
        )));
    }
    let input_power: f64 = inputs.iter().map(|z| z.norm_sqr()).sum();
    if !(input_power > 0.0) {
        return Err(Error::Degenerate("input samples have zero variance".into()));
    }
    let cross: Complex64 = inputs.iter().zip(outputs).map(|(x, y)| x.conj() * y).sum();
    let gain = cross.re / input_power;

    let mut residual_power = 0.0;
    let mut residual_cross = Complex64::new(0.0, 0.0);
    for (x, y) in inputs.iter().zip(outputs) {
        let r = y - gain * x;
        residual_power += r.norm_sqr();
        residual_cross += x.conj() * r;
    }
    let cross_correlation = if residual_power > 1e-300 {
        residual_cross.norm() / (input_power * residual_power).sqrt()
    } else {
        0.0
    };
    Ok(BussgangEstimate {
        gain,
        residual_rho: residual_power / input_power,
        cross_correlation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;

    #[test]
    fn one_bit_matches_closed_form() {
        let spec = lloyd_max_design(1, 1e-12).unwrap();
        let expected = 1.0 - 2.0 / std::f64::consts::PI;
        assert!((spec.distortion - expected).abs() < 1e-4);
        // 1-bit Gaussian level is sqrt(2/pi)
        assert!((spec.levels[1] - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-10);
        assert_eq!(spec.thresholds, vec![0.0]);
    }

    #[test]
    fn two_and_three_bit_distortion() {
        assert!((cached_spec(2).unwrap().distortion - 0.1175).abs() < 1e-3);
        assert!((cached_spec(3).unwrap().distortion - 0.03454).abs() < 1e-4);
    }

    #[test]
    fn levels_symmetric_and_interleaved() {
        let spec = cached_spec(4).unwrap();
        let n = spec.levels.len();
        for i in 0..n {
            assert!((spec.levels[i] + spec.levels[n - 1 - i]).abs() < 1e-12);
        }
        for i in 0..n - 1 {
            assert!(spec.levels[i] < spec.thresholds[i]);
            assert!(spec.thresholds[i] < spec.levels[i + 1]);
        }
    }

    #[test]
    fn design_rejects_bad_arguments() {
        assert!(lloyd_max_design(0, 1e-9).is_err());
        assert!(lloyd_max_design(9, 1e-9).is_err());
        assert!(lloyd_max_design(2, 0.0).is_err());
    }

    #[test]
    fn distortion_factor_resolution() {
        assert_eq!(distortion_factor(DacModel::Ideal).unwrap(), 0.0);
        assert_eq!(distortion_factor(DacModel::Rho(0.2)).unwrap(), 0.2);
        let r1 = distortion_factor(DacModel::Bits(1)).unwrap();
        assert!((r1 - 0.3634).abs() < 1e-4);
    }

    #[test]
    fn tie_goes_to_higher_level() {
        let spec = cached_spec(2).unwrap();
        assert_eq!(spec.index_of(spec.thresholds[1]), 2);
        assert_eq!(spec.index_of(0.0), 2);
        let q = scalar_quantize(&[Complex64::new(0.0, 0.0)], spec, 1.0);
        assert_eq!(q[0].re, spec.levels[2]);
        // smallest-magnitude level
        assert!(spec.levels[2] > 0.0 && spec.levels[2] < spec.levels[3]);
    }

    #[test]
    fn one_bit_sign_quantizer() {
        let spec = cached_spec(1).unwrap();
        let scale = 0.5;
        let q = scalar_quantize(&[Complex64::new(0.3, -2.0)], spec, scale);
        let level = scale * (2.0 / std::f64::consts::PI).sqrt();
        assert!((q[0].re - level).abs() < 1e-12);
        assert!((q[0].im + level).abs() < 1e-12);
    }

    #[test]
    fn output_index_is_input_bucket() {
        let spec = cached_spec(3).unwrap();
        for &u in &[-3.0, -1.2, -0.01, 0.4, 0.9, 2.5] {
            let i = spec.index_of(u);
            if i > 0 {
                assert!(u >= spec.thresholds[i - 1]);
            }
            if i < spec.thresholds.len() {
                assert!(u < spec.thresholds[i]);
            }
        }
    }

    #[test]
    fn bussgang_identity_when_ideal() {
        let x = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)];
        let mut rng = trial_rng(0, 0);
        let y = bussgang_quantize(&x, 0.0, &[1.0, 1.0], &mut rng).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn bussgang_rejects_negative_covariance() {
        let x = vec![Complex64::new(1.0, 0.0)];
        let mut rng = trial_rng(0, 0);
        assert!(bussgang_quantize(&x, 0.1, &[-1.0], &mut rng).is_err());
    }

    #[test]
    fn bussgang_noise_variance() {
        let n = 1_000_000;
        let x = vec![Complex64::new(0.0, 0.0); n];
        let cov = vec![1.0; n];
        let mut rng = trial_rng(11, 0);
        let y = bussgang_quantize(&x, 0.5, &cov, &mut rng).unwrap();
        let mean: Complex64 = y.iter().sum::<Complex64>() / n as f64;
        let var = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 0.5).abs() < 0.005);
        assert!(mean.norm() < 0.005);
    }

    #[test]
    fn estimate_linear_outputs() {
        let mut rng = trial_rng(5, 0);
        let x: Vec<Complex64> = (0..1000).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let e = estimate_bussgang(&x, &x).unwrap();
        assert!((e.gain - 1.0).abs() < 1e-12);
        assert!(e.residual_rho < 1e-20);
        let half: Vec<Complex64> = x.iter().map(|z| z * 0.5).collect();
        let e = estimate_bussgang(&x, &half).unwrap();
        assert!((e.gain - 0.5).abs() < 1e-12);
        assert!(e.residual_rho < 1e-20);
    }

    #[test]
    fn estimate_rejects_zero_input() {
        let z = vec![Complex64::new(0.0, 0.0); 10];
        assert!(matches!(
            estimate_bussgang(&z, &z),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn rho_table_csv() {
        let mut buf = Vec::new();
        write_rho_table(&mut buf, 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "bits,rho");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,0.3633"));
    }
}
