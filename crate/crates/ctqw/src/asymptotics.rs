//! Large-time behavior of amplitude integrals.
//!
//! Endpoint stationary-phase forms for band-limited densities, the Laguerre
//! power-law envelope, the finite-order/infinite-line interchange error, and
//! numerical validation of leading forms against exact series.

use std::f64::consts::PI;

use crate::amplitudes::AmplitudeSeries;
use crate::error::{Error, Result};
use crate::special::{bessel_j, cis, gamma};
use crate::spectral::{EdgeProfile, SpectralMeasure};

/// Leading-order large-time form `C * t^(-p) * cos(Omega t - phi0)`, or the
/// modulus-only envelope `C * t^(-p)` when `oscillatory` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticForm {
    pub amplitude_coeff: f64,
    pub decay_exponent: f64,
    pub frequency: f64,
    pub phase_offset: f64,
    pub oscillatory: bool,
}

impl AsymptoticForm {
    /// Envelope `C * t^(-p)`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.amplitude_coeff * t.powf(-self.decay_exponent)
    }

    /// Full leading-order value at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        if self.oscillatory {
            self.envelope(t) * (self.frequency * t - self.phase_offset).cos()
        } else {
            self.envelope(t)
        }
    }
}

/// Classifies the band edges of a symmetric density and returns the
/// endpoint stationary-phase form of the ground amplitude.
///
/// Inverse-square-root edges `rho ~ kappa (c - |x|)^(-1/2)` give decay
/// exponent 1/2 and phase offset pi/4; square-root edges `rho ~ kappa (c -
/// |x|)^(1/2)` give decay exponent 3/2 and phase offset 3pi/4. The edge
/// coefficient comes from the measure's declared smooth edge factor;
/// densities without a half-power edge profile are rejected.
pub fn stationary_phase_edge(measure: &SpectralMeasure, scale: f64) -> Result<AsymptoticForm> {
    if scale <= 0.0 {
        return Err(Error::ParameterOutOfDomain(format!(
            "needs scale > 0, got {scale}"
        )));
    }
    let (_, (lo, hi), edge) = measure.continuous_piece().ok_or_else(|| {
        Error::UnsupportedEdgeBehavior("measure has no absolutely continuous part".into())
    })?;
    let c = hi;
    if c <= 0.0 || (lo + hi).abs() > 1e-12 * c {
        return Err(Error::UnsupportedEdgeBehavior(format!(
            "support [{lo}, {hi}] is not symmetric about zero"
        )));
    }
    // rho(x) = g(x) ((hi - x)(x - lo))^(+-1/2), so near x = c the half-power
    // coefficient is g(c) (2c)^(-+1/2).
    let (regular, lambda) = match edge {
        EdgeProfile::InverseSqrt { regular } => (regular, 0.5),
        EdgeProfile::SqrtVanishing { regular } => (regular, 1.5),
        EdgeProfile::Smooth => {
            return Err(Error::UnsupportedEdgeBehavior(
                "edge is not a half-power law".into(),
            ));
        }
    };
    let kp = if lambda < 1.0 {
        regular(c) / (2.0 * c).sqrt()
    } else {
        regular(c) * (2.0 * c).sqrt()
    };
    let km = if lambda < 1.0 {
        regular(lo) / (2.0 * c).sqrt()
    } else {
        regular(lo) * (2.0 * c).sqrt()
    };
    if !kp.is_finite() || kp <= 0.0 || !km.is_finite() || km <= 0.0 {
        return Err(Error::UnsupportedEdgeBehavior(
            "edge coefficient vanishes or diverges".into(),
        ));
    }
    if (kp - km).abs() > 1e-3 * kp.max(km) {
        return Err(Error::UnsupportedEdgeBehavior(format!(
            "asymmetric edge coefficients {kp:.6e} vs {km:.6e}"
        )));
    }
    let kappa = 0.5 * (kp + km);
    Ok(AsymptoticForm {
        amplitude_coeff: 2.0 * kappa * gamma(lambda) / scale.powf(lambda),
        decay_exponent: lambda,
        frequency: c * scale,
        phase_offset: 0.5 * PI * lambda,
        oscillatory: true,
    })
}

/// Power-law envelope of the Laguerre amplitudes: `|q_k(t)| ~ C t^-(gamma+1)`
/// with the bound-state oscillation frequency recorded alongside.
pub fn laguerre_asymptotic(a: f64, gamma_param: f64, k: usize) -> Result<AsymptoticForm> {
    if a <= 0.0 {
        return Err(Error::ParameterOutOfDomain(format!(
            "needs a > 0, got a={a}"
        )));
    }
    if gamma_param <= -1.0 {
        return Err(Error::ParameterOutOfDomain(format!(
            "needs gamma > -1, got gamma={gamma_param}"
        )));
    }
    let p = gamma_param + 1.0;
    Ok(AsymptoticForm {
        amplitude_coeff: crate::families::laguerre_prefactor(gamma_param, k) * a.powf(-p),
        decay_exponent: p,
        frequency: -a * (1.0 + gamma_param),
        phase_offset: 0.0,
        oscillatory: false,
    })
}

/// Interchange error between the infinite line's ground amplitude and its
/// order-`n` quadrature truncation:
/// `pi(n,t) = |J_0(t) - (1/n) sum_k e^(-i t cos((2k+1) pi / (2n)))|`.
pub fn finite_infinite_diff(n: usize, t: f64) -> f64 {
    assert!(n >= 1, "quadrature order must be at least 1");
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    for k in 0..n {
        let theta = (2 * k + 1) as f64 * PI / (2 * n) as f64;
        sum += cis(-t * theta.cos());
    }
    (num_complex::Complex64::new(bessel_j(0, t), 0.0) - sum / n as f64).norm()
}

/// Validation report comparing an exact amplitude series against a leading
/// asymptotic form over a time window.
#[derive(Debug, Clone)]
pub struct WkbReport {
    /// Largest `|exact - approx| * t^p` over the window.
    pub max_coeff_error: f64,
    /// Mean `|exact - approx| * t^p` over the window.
    pub mean_coeff_error: f64,
    /// Decay exponent fitted from envelope maxima in log-log coordinates.
    pub fitted_exponent: f64,
    /// Standard-error half-width of the fitted exponent.
    pub fitted_half_width: f64,
    /// Coefficient fitted from envelope maxima.
    pub fitted_coeff: f64,
    /// Number of oscillation periods covered by the window.
    pub periods: f64,
}

/// Compares stratum `k` of an exact series against `approx` on the window.
///
/// The window must cover at least three oscillation periods of the leading
/// form (for modulus-only forms, any nonempty window is accepted). The
/// coefficient errors weight the pointwise deviation by `t^p`; the exponent
/// is re-fitted from local maxima of `|q(t)|`.
pub fn wkb_validate(
    exact: &AmplitudeSeries,
    k: usize,
    approx: &AsymptoticForm,
    window: (f64, f64),
) -> Result<WkbReport> {
    let (t1, t2) = window;
    if !(t2 > t1) {
        return Err(Error::WindowTooShort { t0: t1, t1: t2 });
    }
    let periods = if approx.oscillatory {
        approx.frequency.abs() * (t2 - t1) / (2.0 * PI)
    } else {
        f64::INFINITY
    };
    if approx.oscillatory && periods < 3.0 {
        return Err(Error::WindowTooShort { t0: t1, t1: t2 });
    }

    let mut max_err = 0.0_f64;
    let mut sum_err = 0.0_f64;
    let mut count = 0usize;
    let mut mags: Vec<(f64, f64)> = Vec::new();
    for (i, &t) in exact.times.iter().enumerate() {
        if t < t1 || t > t2 {
            continue;
        }
        let q = exact.values[i][k];
        let err = if approx.oscillatory {
            (q - approx.eval(t)).norm()
        } else {
            (q.norm() - approx.envelope(t)).abs()
        };
        let weighted = err * t.powf(approx.decay_exponent);
        max_err = max_err.max(weighted);
        sum_err += weighted;
        count += 1;
        mags.push((t, q.norm()));
    }
    if count == 0 {
        return Err(Error::WindowTooShort { t0: t1, t1: t2 });
    }

    // Envelope: local maxima of |q| over the window grid, refined by a
    // parabola through the three samples around each peak to remove the
    // finite-grid underestimate.
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 1..mags.len().saturating_sub(1) {
        if mags[i].1 >= mags[i - 1].1 && mags[i].1 >= mags[i + 1].1 && mags[i].1 > 0.0 {
            peaks.push(refine_peak(mags[i - 1], mags[i], mags[i + 1]));
        }
    }
    if !approx.oscillatory {
        // Monotone envelopes have no interior maxima; fit every sample.
        peaks = mags.iter().copied().filter(|&(_, m)| m > 0.0).collect();
    }
    let (slope, intercept, half_width) = loglog_fit(&peaks)?;
    Ok(WkbReport {
        max_coeff_error: max_err,
        mean_coeff_error: sum_err / count as f64,
        fitted_exponent: -slope,
        fitted_half_width: half_width,
        fitted_coeff: intercept.exp(),
        periods,
    })
}

/// Vertex of the parabola through three samples bracketing a local
/// maximum; falls back to the middle sample when degenerate.
fn refine_peak(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x1, y1) = a;
    let (x2, y2) = b;
    let (x3, y3) = c;
    let d21 = (x2 - x1) * (y2 - y3);
    let d23 = (x2 - x3) * (y2 - y1);
    let denom = d21 - d23;
    if denom.abs() < 1e-300 {
        return b;
    }
    let xv = x2 - 0.5 * ((x2 - x1) * d21 - (x2 - x3) * d23) / denom;
    // Evaluate the parabola at its vertex via Lagrange form.
    let l1 = (xv - x2) * (xv - x3) / ((x1 - x2) * (x1 - x3));
    let l2 = (xv - x1) * (xv - x3) / ((x2 - x1) * (x2 - x3));
    let l3 = (xv - x1) * (xv - x2) / ((x3 - x1) * (x3 - x2));
    let yv = y1 * l1 + y2 * l2 + y3 * l3;
    if yv.is_finite() && yv > 0.0 && xv.is_finite() && xv > 0.0 {
        (xv, yv)
    } else {
        b
    }
}

/// Least-squares line through `(ln t, ln y)`: returns (slope, intercept,
/// standard error of the slope).
pub(crate) fn loglog_fit(pairs: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientSpan(format!(
            "need at least 3 envelope points, got {}",
            pairs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientSpan("zero spread in log t".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let dof = (pts.len() as f64 - 2.0).max(1.0);
    let stderr = (ss_res / dof / sxx).sqrt();
    Ok((slope, intercept, stderr))
}
