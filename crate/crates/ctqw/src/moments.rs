//! Position moments of walker distributions and spreading-exponent fits.
//!
//! Stratum moments `<k^q>(t) = sum_k k^q |q_k(t)|^2` are computed either
//! from an amplitude series or from closed forms where the stratum
//! distribution is a known counting law (Poisson for the Hermite walk,
//! negative binomial for Laguerre, the signed-site convention for the
//! line). The spreading exponent `nu` is fitted from `sigma(t) ~ t^nu` in
//! log-log coordinates.

use crate::amplitudes::AmplitudeSeries;
use crate::asymptotics::loglog_fit;
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::special::{rising_factorial, stirling2_row};

/// Tail-mass budget above which a truncated series is rejected for moments.
pub const MOMENT_TAIL_BUDGET: f64 = 1e-8;

/// How stratum indices map to position when forming moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentConvention {
    /// `k` is the stratum index, `k >= 0`.
    Stratum,
    /// Strata fold signed sites `+-k`; odd moments vanish by symmetry and
    /// even moments equal the stratum sum.
    SignedLine,
}

/// Moment `<k^q>(t)` at every grid time of the series.
///
/// The series' recorded tail mass must be below [`MOMENT_TAIL_BUDGET`];
/// otherwise the truncation would bias the sum and the call fails.
pub fn moments_from_series(
    series: &AmplitudeSeries,
    q: usize,
    convention: MomentConvention,
) -> Result<Vec<f64>> {
    if series.tail_mass > MOMENT_TAIL_BUDGET {
        return Err(Error::TailMassExceeded {
            mass: series.tail_mass,
            t: *series.times.last().unwrap_or(&0.0),
            budget: MOMENT_TAIL_BUDGET,
        });
    }
    if convention == MomentConvention::SignedLine && q % 2 == 1 {
        return Ok(vec![0.0; series.times.len()]);
    }
    Ok(series
        .values
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, a)| (k as f64).powi(q as i32) * a.norm_sqr())
                .sum()
        })
        .collect())
}

/// Closed-form moment `<k^q>(t)` for families whose stratum distribution
/// has a known counting law. Supports `q <= 4`.
///
/// - Hermite: Poisson with rate `t^2`, so `<k^q> = sum_j S(q,j) t^(2j)`.
/// - Laguerre: negative binomial, `<k^q> = sum_j S(q,j) (gamma+1)^(j,
///   rising) (a t)^(2j)`.
/// - Line: signed-site convention, `0` for odd `q` and `t^q` for even `q`
///   (the ballistic limit form; only `q <= 2` is cross-checked numerically).
pub fn closed_moments(spec: &FamilySpec, q: usize, t: f64) -> Result<f64> {
    if q > 4 {
        return Err(Error::UnsupportedMomentOrder(q));
    }
    let s = stirling2_row(q);
    let factorial_moment_sum = |shape: Option<f64>, lambda: f64| -> f64 {
        // <k^q> = sum_j S(q,j) m_j with m_j the j-th factorial moment:
        // lambda^j for Poisson, (shape)^(j, rising) lambda^j otherwise.
        (1..=q)
            .map(|j| {
                let base = match shape {
                    None => 1.0,
                    Some(c) => rising_factorial(c, j),
                };
                s[j] * base * lambda.powi(j as i32)
            })
            .sum()
    };
    match spec {
        FamilySpec::HermiteInfinite => {
            if q == 0 {
                return Ok(1.0);
            }
            Ok(factorial_moment_sum(None, t * t))
        }
        FamilySpec::Laguerre { a, gamma } => {
            if q == 0 {
                return Ok(1.0);
            }
            Ok(factorial_moment_sum(Some(gamma + 1.0), a * a * t * t))
        }
        FamilySpec::Line => {
            if q == 0 {
                return Ok(1.0);
            }
            if q % 2 == 1 {
                Ok(0.0)
            } else {
                Ok(t.powi(q as i32))
            }
        }
        other => Err(Error::NoClosedForm {
            family: other.kind_name().to_string(),
            k: q,
        }),
    }
}

/// Standard deviation from the first two moments, clamped at zero.
pub fn sigma_from_moments(m1: f64, m2: f64) -> f64 {
    (m2 - m1 * m1).max(0.0).sqrt()
}

/// Result of a power-law fit `sigma(t) ~ t^nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Standard-error half-width of the exponent.
    pub half_width: f64,
}

/// Fits `ln sigma = nu ln t + const` by least squares over `(t, sigma)`
/// pairs. Requires at least 20 positive samples spanning a decade in `t`.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(t, s)| t > 0.0 && s > 0.0)
        .collect();
    if pts.len() < 20 {
        return Err(Error::InsufficientSpan(format!(
            "need at least 20 positive samples, got {}",
            pts.len()
        )));
    }
    let tmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let tmax = pts.iter().map(|p| p.0).fold(0.0_f64, f64::max);
    if tmax < 10.0 * tmin {
        return Err(Error::InsufficientSpan(format!(
            "times span a factor {:.3}, need at least a decade",
            tmax / tmin
        )));
    }
    let (slope, _, stderr) = loglog_fit(&pts)?;
    Ok(ExponentFit {
        exponent: slope,
        half_width: stderr,
    })
}

/// Moments, widths, and the fitted spreading exponent over a time grid.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub times: Vec<f64>,
    /// First moment `<k>` per time.
    pub mean: Vec<f64>,
    /// Second moment `<k^2>` per time.
    pub second: Vec<f64>,
    /// Width `sigma = sqrt(<k^2> - <k>^2)` per time.
    pub sigma: Vec<f64>,
    /// Spreading-exponent fit, when the grid allows one.
    pub nu: Option<ExponentFit>,
}

/// Builds a [`MomentReport`] from an amplitude series.
pub fn moment_report(series: &AmplitudeSeries, convention: MomentConvention) -> Result<MomentReport> {
    let m1 = moments_from_series(series, 1, convention)?;
    let m2 = moments_from_series(series, 2, convention)?;
    let sigma: Vec<f64> = m1
        .iter()
        .zip(&m2)
        .map(|(&a, &b)| sigma_from_moments(a, b))
        .collect();
    let pairs: Vec<(f64, f64)> = series.times.iter().copied().zip(sigma.iter().copied()).collect();
    let nu = fit_exponent(&pairs).ok();
    Ok(MomentReport {
        times: series.times.clone(),
        mean: m1,
        second: m2,
        sigma,
        nu,
    })
}
