//! Per-realization rates and trial-averaged ergodic estimates.
//!
//! Quantization enters through the statistical Bussgang model: the DAC output
//! is `sqrt(1-rho) x + n` with `n` having covariance
//! `C_DA = rho diag(p W Wᴴ + q V Vᴴ)` built from the same realization.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{row_power, CMatrix, ChannelRealization};
use crate::error::{Error, Result};
use crate::model::{derive_params, SystemConfig};
use crate::sampling::trial_rng;

/// Condition number beyond which the eavesdropper covariance counts as singular.
pub const CONDITION_CAP: f64 = 1e12;

pub const DEFAULT_TRIALS: usize = 1000;

/// Received power terms of one user: `gamma = s / (i + q + a + noise)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiqnrTerms {
    pub signal: f64,
    pub interference: f64,
    pub quantization: f64,
    pub artificial_noise: f64,
}

impl SiqnrTerms {
    pub fn siqnr(&self, noise_power: f64) -> f64 {
        self.signal / (self.interference + self.quantization + self.artificial_noise + noise_power)
    }
}

/// Diagonal of `C_DA`.
pub fn quantization_covariance_diag(real: &ChannelRealization, rho: f64, p: f64, q: f64) -> Vec<f64> {
    real.transmit_power_diag(p, q)
        .into_iter()
        .map(|d| rho * d)
        .collect()
}

pub fn siqnr_terms(real: &ChannelRealization, rho: f64, p: f64, q: f64) -> Vec<SiqnrTerms> {
    let k = real.num_users();
    let hw = &real.h * &real.w;
    let an = row_power(&(&real.h * &real.v));
    let c_da = quantization_covariance_diag(real, rho, p, q);
    (0..k)
        .map(|u| {
            let row = hw.row(u);
            let own = row[u].norm_sqr();
            let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            let quantization = real
                .h
                .row(u)
                .iter()
                .zip(&c_da)
                .map(|(h, c)| h.norm_sqr() * c)
                .sum();
            SiqnrTerms {
                signal: (1.0 - rho) * p * own,
                interference: (1.0 - rho) * p * (total - own).max(0.0),
                quantization,
                artificial_noise: (1.0 - rho) * q * an[u],
            }
        })
        .collect()
}

pub fn siqnr_per_user(real: &ChannelRealization, rho: f64, p: f64, q: f64, noise_power: f64) -> Vec<f64> {
    siqnr_terms(real, rho, p, q)
        .iter()
        .map(|t| t.siqnr(noise_power))
        .collect()
}

/// Mean of `log2(1 + gamma_k)` over users.
pub fn user_rate(gamma: &[f64]) -> f64 {
    if gamma.is_empty() {
        return 0.0;
    }
    gamma.iter().map(|g| (1.0 + g).log2()).sum::<f64>() / gamma.len() as f64
}

/// Eavesdropper covariance `X = (1-rho) q H_e V Vᴴ H_eᴴ + H_e C_DA H_eᴴ`.
pub fn eve_covariance(real: &ChannelRealization, rho: f64, p: f64, q: f64) -> CMatrix {
    let c_da = quantization_covariance_diag(real, rho, p, q);
    let mut scaled = real.h_e.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(c_da[j], 0.0);
    }
    let mut x = &scaled * real.h_e.adjoint();
    if q > 0.0 {
        let ev = &real.h_e * &real.v;
        x += (&ev * ev.adjoint()) * Complex64::new((1.0 - rho) * q, 0.0);
    }
    x
}

/// Eavesdropper capacity for every target user of one realization.
pub fn eve_capacities(real: &ChannelRealization, rho: f64, p: f64, q: f64) -> Result<Vec<f64>> {
    let x = eve_covariance(real, rho, p, q);
    let eig = SymmetricEigen::new(x.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min > 0.0) || max / min > CONDITION_CAP {
        return Err(Error::SingularCovariance { phi: p_share(p, q, real), rho });
    }
    let chol = x.cholesky().ok_or(Error::SingularCovariance {
        phi: p_share(p, q, real),
        rho,
    })?;
    let g = &real.h_e * &real.w;
    let solved = chol.solve(&g);
    Ok((0..real.num_users())
        .map(|u| {
            let quad = g.column(u).dotc(&solved.column(u)).re;
            (1.0 + (1.0 - rho) * p * quad.max(0.0)).log2()
        })
        .collect())
}

/// Recovers the signal power share from `p` and `q`, for error reporting only.
fn p_share(p: f64, q: f64, real: &ChannelRealization) -> f64 {
    let k = real.num_users() as f64;
    let rest = (real.num_bs_antennas() - real.num_users()) as f64;
    let total = p * k + q * rest;
    if total > 0.0 {
        p * k / total
    } else {
        1.0
    }
}

/// Capacity of the eavesdropper targeting user `k`.
pub fn eve_capacity(real: &ChannelRealization, rho: f64, p: f64, q: f64, k: usize) -> Result<f64> {
    if k >= real.num_users() {
        return Err(Error::InvalidArgument(format!(
            "user index {k} out of range for K={}",
            real.num_users()
        )));
    }
    Ok(eve_capacities(real, rho, p, q)?[k])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub user_rate: f64,
    pub eve_capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloReport {
    pub user_rate: f64,
    pub user_rate_se: f64,
    pub eve_capacity: f64,
    pub eve_capacity_se: f64,
    /// `[user_rate - eve_capacity]^+`
    pub secrecy_rate: f64,
    /// Standard error of the per-trial differences `R_t - C_t`.
    pub secrecy_se: f64,
    pub trials: usize,
    pub seed: u64,
}

/// One independent realization: rate averaged over users, capacity averaged
/// over target users.
pub fn run_trial(config: &SystemConfig, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let dp = derive_params(config)?;
    trial_with_params(config, dp.rho, dp.p, dp.q, seed, trial)
}

fn trial_with_params(
    config: &SystemConfig,
    rho: f64,
    p: f64,
    q: f64,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(seed, trial);
    let real = ChannelRealization::sample(
        config.num_bs_antennas,
        config.num_users,
        config.num_eve_antennas,
        config.an_kind,
        &mut rng,
    )?;
    let gamma = siqnr_per_user(&real, rho, p, q, config.noise_power);
    let caps = eve_capacities(&real, rho, p, q)?;
    Ok(TrialOutcome {
        user_rate: user_rate(&gamma),
        eve_capacity: caps.iter().sum::<f64>() / caps.len() as f64,
    })
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Ergodic estimates over `trials` independent realizations. Trials run in
/// parallel but are reduced in trial order, so the result depends only on
/// `(config, trials, seed)`.
pub fn run_ergodic(config: &SystemConfig, trials: usize, seed: u64) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let dp = derive_params(config)?;
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_with_params(config, dp.rho, dp.p, dp.q, seed, t))
        .collect::<Result<_>>()?;
    Ok(summarize(&outcomes, seed))
}

pub fn summarize(outcomes: &[TrialOutcome], seed: u64) -> MonteCarloReport {
    let n = outcomes.len();
    let (r, r_se) = mean_and_se(outcomes.iter().map(|o| o.user_rate), n);
    let (c, c_se) = mean_and_se(outcomes.iter().map(|o| o.eve_capacity), n);
    let (_, d_se) = mean_and_se(outcomes.iter().map(|o| o.user_rate - o.eve_capacity), n);
    MonteCarloReport {
        user_rate: r,
        user_rate_se: r_se,
        eve_capacity: c,
        eve_capacity_se: c_se,
        secrecy_rate: (r - c).max(0.0),
        secrecy_se: d_se,
        trials: n,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnKind, DacModel};

    #[test]
    fn user_rate_examples() {
        assert_eq!(user_rate(&[0.0, 0.0, 0.0]), 0.0);
        assert!((user_rate(&[1.0, 3.0]) - 1.5).abs() < 1e-15);
        assert!((user_rate(&[7.0; 4]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn ideal_null_space_cancels_everything_but_signal() {
        let mut rng = trial_rng(11, 0);
        let real = ChannelRealization::sample(64, 4, 4, AnKind::NullSpace, &mut rng).unwrap();
        let (p, q, noise) = (0.2, 0.01, 0.1);
        let terms = siqnr_terms(&real, 0.0, p, q);
        let gammas = siqnr_per_user(&real, 0.0, p, q, noise);
        for (t, g) in terms.iter().zip(&gammas) {
            assert!(t.interference < 1e-12);
            assert_eq!(t.quantization, 0.0);
            assert!(t.artificial_noise < 1e-12);
            let expected = p * real.zf_gain * real.zf_gain / noise;
            assert!((g - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn siqnr_terms_nonnegative() {
        let mut rng = trial_rng(12, 0);
        let real = ChannelRealization::sample(32, 4, 3, AnKind::Random, &mut rng).unwrap();
        for t in siqnr_terms(&real, 0.3, 0.2, 0.02) {
            assert!(t.signal >= 0.0 && t.interference >= 0.0);
            assert!(t.quantization >= 0.0 && t.artificial_noise >= 0.0);
        }
    }

    #[test]
    fn siqnr_approaches_large_system_limit() {
        let config = SystemConfig::new(128, 8, 16)
            .with_snr_db(10.0)
            .with_phi(0.8)
            .with_dac(DacModel::Rho(0.1175));
        let dp = derive_params(&config).unwrap();
        let trials = 200;
        let mut total = 0.0;
        for t in 0..trials {
            let mut rng = trial_rng(13, t);
            let real = ChannelRealization::sample(128, 8, 16, AnKind::NullSpace, &mut rng).unwrap();
            let g = siqnr_per_user(&real, dp.rho, dp.p, dp.q, dp.noise_power);
            total += g.iter().sum::<f64>() / g.len() as f64;
        }
        let mean = total / trials as f64;
        assert!((mean - 48.69).abs() / 48.69 < 0.05, "mean {mean}");
    }

    #[test]
    fn quantization_power_tends_to_rho_p() {
        let (n, k, rho, total_power) = (256, 16, 0.2, 1.0);
        let config = SystemConfig::new(n, k, 8)
            .with_phi(0.6)
            .with_dac(DacModel::Rho(rho));
        let dp = derive_params(&config).unwrap();
        let mut acc = 0.0;
        let mut count = 0;
        for t in 0..20 {
            let mut rng = trial_rng(14, t);
            let real = ChannelRealization::sample(n, k, 8, AnKind::NullSpace, &mut rng).unwrap();
            for term in siqnr_terms(&real, rho, dp.p, dp.q) {
                acc += term.quantization;
                count += 1;
            }
        }
        let mean = acc / count as f64;
        assert!((mean - rho * total_power).abs() / (rho * total_power) < 0.05);
    }

    #[test]
    fn eve_capacity_singular_without_noise_sources() {
        let mut rng = trial_rng(15, 0);
        let real = ChannelRealization::sample(32, 4, 3, AnKind::NullSpace, &mut rng).unwrap();
        let err = eve_capacity(&real, 0.0, 0.25, 0.0, 0).unwrap_err();
        assert!(matches!(err, Error::SingularCovariance { .. }));
    }

    #[test]
    fn eve_capacity_index_checked() {
        let mut rng = trial_rng(15, 1);
        let real = ChannelRealization::sample(32, 4, 3, AnKind::NullSpace, &mut rng).unwrap();
        assert!(eve_capacity(&real, 0.1, 0.2, 0.01, 4).is_err());
        assert!(eve_capacity(&real, 0.1, 0.2, 0.01, 3).unwrap() > 0.0);
    }

    #[test]
    fn single_trial_is_deterministic() {
        let config = SystemConfig::new(32, 4, 3).with_phi(0.7).with_dac(DacModel::Bits(2));
        let a = run_ergodic(&config, 1, 99).unwrap();
        let b = run_ergodic(&config, 1, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.user_rate_se, 0.0);
    }

    #[test]
    fn parallel_matches_serial() {
        let config = SystemConfig::new(32, 4, 3)
            .with_phi(0.7)
            .with_dac(DacModel::Bits(1))
            .with_an(AnKind::Random);
        let report = run_ergodic(&config, 16, 5).unwrap();
        let serial: Vec<_> = (0..16).map(|t| run_trial(&config, 5, t).unwrap()).collect();
        assert_eq!(report, summarize(&serial, 5));
    }

    #[test]
    fn zero_trials_rejected() {
        let config = SystemConfig::new(32, 4, 3).with_phi(0.7);
        assert!(run_ergodic(&config, 0, 1).is_err());
    }
}
