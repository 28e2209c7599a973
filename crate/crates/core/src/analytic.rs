//! Closed-form large-system results.
//!
//! Everything here is a pure function of [`DerivedParams`]. Notation follows the
//! field names: `alpha = M/N`, `beta = K/N`, `snr = P/sigma_n^2`,
//! `rho_tilde = rho/(1-rho)`, `nu = 1-alpha-beta`, `mu = 1-phi+rho_tilde`,
//! `zeta = alpha beta (1-phi)^2`.
//!
//! The eavesdropper is assumed noiseless and able to cancel inter-user
//! interference, so [`eve_capacity_bound`] does not depend on the SNR.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{AnKind, DerivedParams, RegimeViolation};

/// Step of the centered finite differences used where no closed form is given.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub user_rate: f64,
    pub eve_capacity_bound: f64,
    /// `[user_rate - eve_capacity_bound]^+`
    pub secrecy_bound: f64,
    pub an_kind: AnKind,
}

/// Coefficients of `(a g^2 + b g + c) / d`, the `rho -> 0` form of the secrecy
/// rate derivative with respect to `rho` seen as a quadratic in the SNR `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThresholdSet {
    /// Loading ratio minimizing the eavesdropper capacity bound; `None` without AN.
    pub beta_bar: Option<f64>,
    /// Eavesdropper antenna ratio above which no positive secrecy rate exists.
    pub alpha_bar: Option<f64>,
    /// Linear SNR below which lower DAC resolution raises the secrecy bound.
    pub snr_threshold: Option<f64>,
}

/// `(1/beta - 1)`, the asymptotic ZF array gain per unit power.
fn zf_gain(dp: &DerivedParams) -> f64 {
    1.0 / dp.beta - 1.0
}

/// Large-system SIQNR of every user.
pub fn asymptotic_siqnr(dp: &DerivedParams, kind: AnKind) -> f64 {
    let rho = dp.rho;
    let g = dp.snr;
    let num = (1.0 - rho) * zf_gain(dp) * dp.phi * g;
    let den = match kind {
        AnKind::NullSpace => rho * g + 1.0,
        AnKind::Random => rho * g + (1.0 - rho) * (1.0 - dp.phi) * g + 1.0,
    };
    num / den
}

pub fn user_rate_bound(dp: &DerivedParams, kind: AnKind) -> f64 {
    (1.0 + asymptotic_siqnr(dp, kind)).log2()
}

fn check_ratio_regime(dp: &DerivedParams) -> Result<()> {
    if dp.nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRegime(vec![RegimeViolation::RatioSumNotBelowOne]))
    }
}

/// Upper bound on the eavesdropper's ergodic capacity.
///
/// Fails with [`Error::SingularCovariance`] when neither AN nor quantization
/// noise is present (`phi = 1`, `rho = 0`): the capacity is then unbounded.
pub fn eve_capacity_bound(dp: &DerivedParams) -> Result<f64> {
    check_ratio_regime(dp)?;
    let (a, b, rt) = (dp.alpha, dp.beta, dp.rho_tilde);
    let an = 1.0 - dp.phi;
    let num = (a / b) * dp.phi * (an + rt);
    let den = (1.0 - a / (1.0 - b)) * an * an + 2.0 * (1.0 - a) * an * rt + (1.0 - a) * rt * rt;
    if !(den > 0.0) {
        return Err(Error::SingularCovariance {
            phi: dp.phi,
            rho: dp.rho,
        });
    }
    Ok((1.0 + num / den).log2())
}

/// The same bound written with `nu`, `mu`, `zeta`, as it appears inside the
/// secrecy-rate expressions. Algebraically identical to [`eve_capacity_bound`].
pub fn eve_capacity_bound_compact(dp: &DerivedParams) -> Result<f64> {
    check_ratio_regime(dp)?;
    let den = (dp.nu + dp.alpha * dp.beta) * dp.mu * dp.mu - dp.zeta;
    if !(den > 0.0) {
        return Err(Error::SingularCovariance {
            phi: dp.phi,
            rho: dp.rho,
        });
    }
    Ok((1.0 + dp.alpha * dp.phi * zf_gain(dp) * dp.mu / den).log2())
}

/// Capacity bound without AN (`phi = 1`): `log2(1 + alpha / ((1-alpha) beta rho_tilde))`.
pub fn no_an_capacity_bound(alpha: f64, beta: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::SingularCovariance { phi: 1.0, rho });
    }
    let rt = rho / (1.0 - rho);
    Ok((1.0 + alpha / ((1.0 - alpha) * beta * rt)).log2())
}

/// Loading ratio at which the capacity bound stops decreasing in `beta`.
/// `None` for `phi >= 1` (no AN).
pub fn beta_bar(alpha: f64, phi: f64, rho_tilde: f64) -> Option<f64> {
    if phi >= 1.0 {
        return None;
    }
    let an = 1.0 - phi;
    let s = an + rho_tilde;
    let inner = alpha * an * an / ((1.0 - alpha) * s * s + alpha * an * an);
    Some(1.0 - inner.sqrt())
}

/// Lower bound on the achievable secrecy rate per user.
pub fn secrecy_bound(dp: &DerivedParams, kind: AnKind) -> Result<RateBreakdown> {
    let user_rate = user_rate_bound(dp, kind);
    let eve = eve_capacity_bound_compact(dp)?;
    Ok(RateBreakdown {
        user_rate,
        eve_capacity_bound: eve,
        secrecy_bound: (user_rate - eve).max(0.0),
        an_kind: kind,
    })
}

/// Secrecy bound with the unbounded-capacity case mapped to zero, which is
/// its limit as `phi -> 1` at `rho = 0`.
pub fn secrecy_value(dp: &DerivedParams, kind: AnKind) -> Result<f64> {
    match secrecy_bound(dp, kind) {
        Ok(r) => Ok(r.secrecy_bound),
        Err(Error::SingularCovariance { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// `R - C_bar` without the `[.]^+` clamp.
pub fn secrecy_gap(dp: &DerivedParams, kind: AnKind) -> Result<f64> {
    Ok(user_rate_bound(dp, kind) - eve_capacity_bound_compact(dp)?)
}

/// Eavesdropper antenna ratio beyond which the secrecy bound is zero even with
/// almost all power spent on AN (`phi -> 0`).
pub fn alpha_bar(dp: &DerivedParams, kind: AnKind) -> f64 {
    let (b, g, rho) = (dp.beta, dp.snr, dp.rho);
    let lead = match kind {
        AnKind::NullSpace => rho + 1.0,
        AnKind::Random => 2.0,
    };
    (1.0 - b) * g / (lead * g + 1.0 - b * g * rho * (2.0 - rho))
}

/// `beta -> 0` limit of [`alpha_bar`].
pub fn alpha_bar_small_load(snr: f64, rho: f64, kind: AnKind) -> f64 {
    match kind {
        AnKind::NullSpace => snr / ((rho + 1.0) * snr + 1.0),
        AnKind::Random => snr / (2.0 * snr + 1.0),
    }
}

/// `rho -> 0` coefficients of the secrecy-rate derivative in `rho`, as a
/// quadratic in the SNR. `d` is evaluated at `dp.snr`.
pub fn rho_derivative_coeffs(dp: &DerivedParams, kind: AnKind) -> QuadraticCoeffs {
    let (al, be, phi, nu) = (dp.alpha, dp.beta, dp.phi, dp.nu);
    let an = 1.0 - phi;
    let gain = zf_gain(dp);
    let g = dp.snr;

    let a_null = -nu * an * phi * (nu * an + al * phi * gain);
    let b_null = 2.0 * al * al * phi * phi * (1.0 - be) + al * phi.powi(3) * nu * gain
        - nu * nu * an * an * phi;
    let c = al * phi * (nu + 2.0 * al * be);
    let d_common = LN_2 * nu * an * (nu * an * be / (1.0 - be) + al * phi);

    match kind {
        AnKind::NullSpace => QuadraticCoeffs {
            a: a_null,
            b: b_null,
            c,
            d: d_common * (gain * phi * g + 1.0),
        },
        AnKind::Random => QuadraticCoeffs {
            a: a_null + al * phi * an * (nu + 2.0 * al * be) * (gain * phi + an),
            b: b_null + 2.0 * al * phi * an * (nu + 2.0 * al * be),
            c,
            d: d_common * (an * g + 1.0) * (gain * phi * g + an * g + 1.0),
        },
    }
}

/// Positive root `(-b - sqrt(b^2 - 4ac)) / (2a)` of the derivative quadratic.
pub fn snr_threshold(dp: &DerivedParams, kind: AnKind) -> Result<f64> {
    let QuadraticCoeffs { a, b, c, .. } = rho_derivative_coeffs(dp, kind);
    if !(a < 0.0) {
        return Err(Error::NoSolution(format!(
            "leading coefficient a={a} is not negative"
        )));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::NoSolution(format!("negative discriminant {disc}")));
    }
    let root = (-b - disc.sqrt()) / (2.0 * a);
    if root > 0.0 {
        Ok(root)
    } else {
        Err(Error::NoSolution(format!("threshold root {root} is not positive")))
    }
}

/// Exact derivative of the null-space secrecy gap with respect to `rho`.
pub fn null_space_rho_derivative(dp: &DerivedParams) -> Result<f64> {
    check_ratio_regime(dp)?;
    let (g, rho, phi) = (dp.snr, dp.rho, dp.phi);
    let gain = zf_gain(dp);
    let user = -gain * phi * (g + 1.0) * g
        / (LN_2 * (rho * g + 1.0) * (rho * g + (1.0 - rho) * gain * phi * g + 1.0));
    let lead = (dp.nu + dp.alpha * dp.beta) * dp.mu * dp.mu;
    let den = lead - dp.zeta;
    if !(den > 0.0) {
        return Err(Error::SingularCovariance { phi, rho });
    }
    let num = dp.alpha * phi * gain * (lead + dp.zeta);
    let eve = num
        / (LN_2 * (1.0 - rho).powi(2) * den * (den + dp.alpha * phi * gain * dp.mu));
    Ok(user + eve)
}

/// Derivative of the secrecy gap `R - C_bar` with respect to `phi`.
///
/// Null-space AN uses the exact closed form; random AN uses a centered finite
/// difference with step [`FD_STEP`].
pub fn phi_derivative(dp: &DerivedParams, kind: AnKind) -> Result<f64> {
    check_ratio_regime(dp)?;
    match kind {
        AnKind::NullSpace => {
            let (g, rho, phi) = (dp.snr, dp.rho, dp.phi);
            let gain = zf_gain(dp);
            let user =
                (1.0 - rho) * gain * g / (LN_2 * (rho * g + 1.0 + (1.0 - rho) * gain * g * phi));
            let ab = dp.alpha * dp.beta;
            let lead = (dp.nu + ab) * dp.mu * dp.mu;
            let den = lead - dp.zeta;
            if !(den > 0.0) {
                return Err(Error::SingularCovariance { phi, rho });
            }
            let an = 1.0 - phi;
            let bracket = lead / (1.0 - rho) - 2.0 * ab * dp.mu * phi * an - ab * an * an * (dp.mu - phi);
            let eve = dp.alpha * gain * bracket
                / (LN_2 * den * (den + dp.alpha * phi * gain * dp.mu));
            Ok(user - eve)
        }
        AnKind::Random => {
            let lo = (dp.phi - FD_STEP).max(f64::MIN_POSITIVE);
            let hi = (dp.phi + FD_STEP).min(1.0);
            let f_hi = secrecy_gap(&dp.with_phi(hi), kind)?;
            let f_lo = secrecy_gap(&dp.with_phi(lo), kind)?;
            Ok((f_hi - f_lo) / (hi - lo))
        }
    }
}

/// Null-space `phi` derivative with the `alpha beta << 1` simplification; its
/// root is the closed-form optimal power split.
pub fn phi_derivative_small_ab(dp: &DerivedParams) -> f64 {
    let (g, rho, phi) = (dp.snr, dp.rho, dp.phi);
    let gain = zf_gain(dp);
    let user = (1.0 - rho) * gain * g / (LN_2 * (rho * g + 1.0 + (1.0 - rho) * gain * g * phi));
    let nm2 = dp.nu * dp.mu * dp.mu;
    let eve = dp.alpha * gain * nm2 / (1.0 - rho)
        / (LN_2 * nm2 * (nm2 + dp.alpha * phi * gain * dp.mu));
    user - eve
}

/// Closed-form approximate optimal power split (valid for `alpha beta << 1`),
/// clamped to 1 from above. Non-positive or complex values are reported as
/// [`Error::NoSolution`] so callers can fall back to a numeric search.
pub fn optimal_phi_closed(dp: &DerivedParams, kind: AnKind) -> Result<f64> {
    let (al, be, nu, rho, g) = (dp.alpha, dp.beta, dp.nu, dp.rho, dp.snr);
    let load = 1.0 - be - al / be;
    let (num, den) = match kind {
        AnKind::NullSpace => {
            let disc = nu * nu + (al * rho + al / g - nu) * load;
            if disc < 0.0 {
                return Err(Error::NoSolution(format!("negative discriminant {disc}")));
            }
            (nu - disc.sqrt(), (1.0 - rho) * load)
        }
        AnKind::Random => {
            let gap = nu - al;
            let disc = al * (1.0 + g) * ((1.0 / be - 1.0) * gap + load / g);
            if disc < 0.0 {
                return Err(Error::NoSolution(format!("negative discriminant {disc}")));
            }
            (
                (1.0 + g) * gap - disc.sqrt(),
                (1.0 - rho) * (load + g * gap),
            )
        }
    };
    let phi = num / den;
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::NoSolution(format!("closed-form phi*={phi}")));
    }
    Ok(phi.min(1.0))
}

/// Degrees of freedom and scale of the single scaled Wishart matrix whose first
/// two moments match the eavesdropper's interference covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartFit {
    pub eta: f64,
    pub lambda: f64,
}

pub fn wishart_moment_match(dp: &DerivedParams) -> Result<WishartFit> {
    check_ratio_regime(dp)?;
    let (n, rho, phi) = (dp.n, dp.rho, dp.phi);
    let k = dp.num_users();
    let lead = (1.0 - rho) * (1.0 - phi) + rho;
    let an = (1.0 - rho) * (1.0 - phi);
    let spread = lead * lead + an * an * k / (n - k);
    if !(lead > 0.0) {
        return Err(Error::SingularCovariance { phi, rho });
    }
    Ok(WishartFit {
        eta: n * lead * lead / spread,
        lambda: dp.total_power / n * spread / lead,
    })
}

/// Capacity bound reconstructed from the Wishart fit,
/// `log2(1 + (1-rho) p M / (lambda (eta - M)))`.
pub fn eve_capacity_from_wishart(dp: &DerivedParams, fit: &WishartFit) -> Result<f64> {
    let m = dp.num_eve_antennas();
    let excess = fit.eta - m;
    if !(excess > 0.0) {
        return Err(Error::SingularCovariance {
            phi: dp.phi,
            rho: dp.rho,
        });
    }
    Ok((1.0 + (1.0 - dp.rho) * dp.p * m / (fit.lambda * excess)).log2())
}

pub fn thresholds(dp: &DerivedParams, kind: AnKind) -> ThresholdSet {
    ThresholdSet {
        beta_bar: beta_bar(dp.alpha, dp.phi, dp.rho_tilde),
        alpha_bar: Some(alpha_bar(dp, kind)),
        snr_threshold: snr_threshold(dp, kind).ok(),
    }
}
