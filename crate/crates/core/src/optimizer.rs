//! Numeric search over the power split and the SNR threshold.

use crate::analytic::{optimal_phi_closed, secrecy_value};
use crate::error::{Error, Result};
use crate::model::{AnKind, DerivedParams};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const COARSE_GRID: usize = 64;
pub const DEFAULT_RHO_PROBE: f64 = 1e-3;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;
const MAX_GOLDEN_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    ClosedForm,
    GoldenSection,
    GridRefine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub phi: f64,
    /// Secrecy bound at `phi`.
    pub value: f64,
    pub iterations: usize,
    pub method: OptMethod,
    /// Every local maximum seen on the coarse grid. More than one entry means
    /// the bound was not unimodal for this configuration.
    pub local_maxima: Vec<f64>,
}

fn objective(dp: &DerivedParams, kind: AnKind) -> impl Fn(f64) -> Result<f64> + '_ {
    move |phi| secrecy_value(&dp.with_phi(phi), kind)
}

fn grid_local_maxima(points: &[(f64, f64)]) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .filter(|&i| {
            let v = points[i].1;
            let left = i == 0 || points[i - 1].1 < v;
            let right = i + 1 == n || points[i + 1].1 <= v;
            v > 0.0 && left && right
        })
        .map(|i| points[i].0)
        .collect()
}

/// Exhaustive search over `points` equally spaced values of `phi` in `(0, 1]`.
pub fn maximize_phi_grid(dp: &DerivedParams, kind: AnKind, points: usize) -> Result<OptResult> {
    let f = objective(dp, kind);
    let points = points.max(1);
    let mut samples = Vec::with_capacity(points);
    for i in 1..=points {
        let phi = i as f64 / points as f64;
        samples.push((phi, f(phi)?));
    }
    let (phi, value) = samples
        .iter()
        .cloned()
        .fold((1.0, f64::NEG_INFINITY), |best, s| if s.1 > best.1 { s } else { best });
    Ok(OptResult {
        phi,
        value,
        iterations: points,
        method: OptMethod::GridRefine,
        local_maxima: grid_local_maxima(&samples),
    })
}

/// Maximizes the secrecy bound over `phi in (0, 1]`: a coarse grid picks the
/// bracket, golden-section search refines it to `tol`.
pub fn maximize_phi(dp: &DerivedParams, kind: AnKind, tol: f64) -> Result<OptResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let coarse = maximize_phi_grid(dp, kind, COARSE_GRID)?;
    if coarse.value <= 0.0 {
        // zero everywhere on the grid: nothing to refine
        return Ok(coarse);
    }
    let f = objective(dp, kind);
    let step = 1.0 / COARSE_GRID as f64;
    let mut lo = (coarse.phi - step).max(step * 1e-3);
    let mut hi = (coarse.phi + step).min(1.0);

    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = coarse.iterations;
    while hi - lo > tol && iterations < COARSE_GRID + MAX_GOLDEN_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1)?;
        }
        iterations += 1;
    }
    let (mut phi, mut value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    // a maximum on the boundary is only approached from inside by the search
    if hi >= 1.0 {
        let at_one = f(1.0)?;
        if at_one >= value {
            phi = 1.0;
            value = at_one;
        }
    }
    if coarse.value > value {
        phi = coarse.phi;
        value = coarse.value;
    }
    Ok(OptResult {
        phi,
        value,
        iterations,
        method: OptMethod::GoldenSection,
        local_maxima: coarse.local_maxima,
    })
}

/// Closed-form power split evaluated on the exact bound.
pub fn closed_form_phi(dp: &DerivedParams, kind: AnKind) -> Result<OptResult> {
    let phi = optimal_phi_closed(dp, kind)?;
    Ok(OptResult {
        phi,
        value: secrecy_value(&dp.with_phi(phi), kind)?,
        iterations: 0,
        method: OptMethod::ClosedForm,
        local_maxima: Vec::new(),
    })
}

/// Centered difference of the secrecy bound in `rho` around `rho_probe`.
pub fn secrecy_rho_slope(dp: &DerivedParams, kind: AnKind, rho_probe: f64) -> Result<f64> {
    let h = 0.5 * rho_probe;
    let up = secrecy_value(&dp.with_rho(rho_probe + h), kind)?;
    let down = secrecy_value(&dp.with_rho(rho_probe - h), kind)?;
    Ok((up - down) / (2.0 * h))
}

/// Linear SNR at which the `rho` slope of the secrecy bound turns from
/// positive (coarser DACs help) to negative, found by a geometric scan followed
/// by bisection in log-SNR.
pub fn find_snr_threshold_numeric(dp: &DerivedParams, kind: AnKind, rho_probe: f64) -> Result<f64> {
    if !(rho_probe > 0.0 && rho_probe < 0.5) {
        return Err(Error::InvalidArgument(format!("rho_probe={rho_probe} out of (0, 0.5)")));
    }
    let slope = |g: f64| secrecy_rho_slope(&dp.with_snr(g), kind, rho_probe);
    let (start, stop, factor) = (1e-3, 1e7, 1.1);

    let mut g = start;
    let mut positive = None;
    while g < stop {
        if slope(g)? > 0.0 {
            positive = Some(g);
            break;
        }
        g *= factor;
    }
    let mut lo = positive.ok_or(Error::NoSignChange)?;
    let mut hi = lo;
    loop {
        hi *= factor;
        if hi > stop {
            return Err(Error::NoSignChange);
        }
        if slope(hi)? < 0.0 {
            break;
        }
        lo = hi;
    }
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linear_to_db;

    fn dp(m: f64, snr_db: f64, rho: f64) -> DerivedParams {
        DerivedParams::from_ratios(m / 128.0, 8.0 / 128.0, 10f64.powf(snr_db / 10.0), 0.5, rho)
            .unwrap()
    }

    #[test]
    fn random_an_peak() {
        let r = maximize_phi(&dp(16.0, 0.0, 0.0), AnKind::Random, DEFAULT_TOL).unwrap();
        assert!((r.phi - 0.389).abs() < 0.005);
        assert!((r.value - 0.904).abs() < 0.001);
        assert_eq!(r.local_maxima.len(), 1);
    }

    #[test]
    fn null_space_peak() {
        let r = maximize_phi(&dp(16.0, 0.0, 0.0), AnKind::NullSpace, DEFAULT_TOL).unwrap();
        assert!((r.phi - 0.3452).abs() < 0.002);
        assert!((r.value - 1.4788).abs() < 5e-4);
    }

    #[test]
    fn boundary_maximum() {
        let rho1 = 0.3633802276324198;
        let r = maximize_phi(&dp(12.0, 12.0, rho1), AnKind::Random, DEFAULT_TOL).unwrap();
        assert_eq!(r.phi, 1.0);
    }

    #[test]
    fn matches_fine_grid() {
        let d = dp(16.0, 5.0, 0.1175);
        for kind in AnKind::ALL {
            let fine = maximize_phi_grid(&d, kind, 10_000).unwrap();
            let golden = maximize_phi(&d, kind, DEFAULT_TOL).unwrap();
            assert!((fine.phi - golden.phi).abs() < DEFAULT_TOL + 1e-4);
            assert!(golden.value >= fine.value - 1e-9);
        }
    }

    #[test]
    fn closed_form_result_is_evaluated() {
        let r = closed_form_phi(&dp(16.0, 0.0, 0.0), AnKind::NullSpace).unwrap();
        assert_eq!(r.method, OptMethod::ClosedForm);
        assert!((r.value - 1.4788).abs() < 5e-4);
    }

    #[test]
    fn rejects_nonpositive_tol() {
        assert!(maximize_phi(&dp(16.0, 0.0, 0.0), AnKind::NullSpace, 0.0).is_err());
    }

    #[test]
    fn numeric_thresholds_near_closed_form() {
        let null = dp(16.0, 0.0, 0.0).with_phi(0.8);
        let t = find_snr_threshold_numeric(&null, AnKind::NullSpace, DEFAULT_RHO_PROBE).unwrap();
        assert!((linear_to_db(t) - 5.6838).abs() < 0.3);
        let random = dp(6.0, 0.0, 0.0).with_phi(0.7);
        let t = find_snr_threshold_numeric(&random, AnKind::Random, DEFAULT_RHO_PROBE).unwrap();
        assert!((linear_to_db(t) - 6.1303).abs() < 0.3);
    }

    #[test]
    fn no_sign_change_beyond_alpha_bar() {
        let d = DerivedParams::from_ratios(0.6, 0.05, 1.0, 0.5, 0.0).unwrap();
        assert!(matches!(
            find_snr_threshold_numeric(&d, AnKind::Random, DEFAULT_RHO_PROBE),
            Err(Error::NoSignChange)
        ));
        let r = maximize_phi(&d.with_snr(10.0), AnKind::Random, DEFAULT_TOL).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.local_maxima.is_empty());
    }
}
