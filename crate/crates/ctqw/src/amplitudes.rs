//! Walk amplitudes along the stratification.
//!
//! Three independent evaluation routes: quadrature against the spectral
//! measure, direct integration of the coupled first-order recurrence, and a
//! catalog of closed forms for named families. Also time-averaged
//! probabilities, per-site amplitudes, and product composition.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{laguerre_prefactor, FamilySpec};
use crate::graph::{Graph, JacobiSeq, Stratification};
use crate::integrate::{integrate_complex, oscillation_cells, QuadratureOptions};
use crate::special::{bessel_j, binomial, cis, ln_gamma, neg_i_pow};
use crate::spectral::{quadrature_measure, EdgeProfile, SpectralMeasure};

/// Maximum tolerated boundary occupation for a truncated evolution.
pub const TAIL_BUDGET: f64 = 1e-8;

/// How a set of amplitudes was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Ode,
    ClosedForm,
    Product,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Quadrature => "quadrature",
            Method::Ode => "ode",
            Method::ClosedForm => "closed-form",
            Method::Product => "product",
        };
        f.write_str(s)
    }
}

/// Amplitudes `q_k(t)` on a time grid for strata `0..=k_max`.
#[derive(Debug, Clone)]
pub struct AmplitudeSeries {
    pub times: Vec<f64>,
    /// `values[i][k]` is the amplitude at `times[i]`, stratum `k`.
    pub values: Vec<Vec<Complex64>>,
    pub method: Method,
    /// Largest boundary occupation `|q_K(t)|^2` seen on the grid; zero for
    /// untruncated evaluations.
    pub tail_mass: f64,
}

impl AmplitudeSeries {
    /// Largest deviation of the total probability from one over the grid.
    pub fn normalization_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|row| (row.iter().map(|q| q.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Monic polynomial `Q_k(x)` by the forward three-term recurrence.
pub fn eval_poly(j: &JacobiSeq, k: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for i in 1..=k {
        let next = (x - j.alpha(i)) * cur - if i >= 2 { j.omega(i - 1) * prev } else { 0.0 };
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal polynomial values `p_0(x) .. p_{k_max}(x)`.
///
/// `p_k = Q_k / sqrt(omega_1 .. omega_k)`, evaluated by the normalized
/// recurrence so no over/underflowing product is formed.
pub fn orthonormal_row(j: &JacobiSeq, k_max: usize, x: f64) -> Result<Vec<f64>> {
    if let Some(len) = j.strata_len() {
        if k_max >= len {
            return Err(Error::TruncationTooLarge { order: k_max + 1, len });
        }
    }
    let mut row = Vec::with_capacity(k_max + 1);
    row.push(1.0);
    if k_max == 0 {
        return Ok(row);
    }
    row.push((x - j.alpha(1)) / j.omega(1).sqrt());
    for k in 1..k_max {
        let w_next = j.omega(k + 1).sqrt();
        let w_prev = j.omega(k).sqrt();
        let next = ((x - j.alpha(k + 1)) * row[k] - w_prev * row[k - 1]) / w_next;
        row.push(next);
    }
    Ok(row)
}

fn check_stratum(j: &JacobiSeq, k: usize) -> Result<()> {
    if let Some(len) = j.strata_len() {
        if k >= len {
            return Err(Error::TruncationTooLarge { order: k + 1, len });
        }
    }
    Ok(())
}

/// Amplitude `q_k(t)` evaluated against a spectral measure.
///
/// The phase convention is `e^{-i x (scale * t)}` with the scale taken from
/// the coefficient sequence. Discrete parts are summed exactly; continuous
/// parts are integrated adaptively, with half-power edge profiles absorbed
/// exactly by the substitution `x = mid - half * cos(theta)`.
pub fn amplitude_quadrature(
    measure: &SpectralMeasure,
    j: &JacobiSeq,
    k: usize,
    t: f64,
) -> Result<Complex64> {
    amplitude_quadrature_with(measure, j, k, t, &QuadratureOptions::default())
}

/// `amplitude_quadrature` with explicit integration controls.
pub fn amplitude_quadrature_with(
    measure: &SpectralMeasure,
    j: &JacobiSeq,
    k: usize,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    check_stratum(j, k)?;
    let s = j.scale();
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, w) in measure.atom_pairs().iter() {
        total += w * orthonormal_value(j, k, x) * cis(-s * x * t);
    }
    if let Some((density, (lo, hi), edge)) = measure.continuous_piece() {
        let mut opts = opts.clone();
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let jj = j.clone();
        // Half-power edges integrate under x = mid - half cos(theta), where
        // the edge factor and the Jacobian combine exactly: no sample ever
        // evaluates the density near the endpoints, whose distance from x is
        // unrecoverable in floating point.
        match edge {
            EdgeProfile::InverseSqrt { regular } => {
                opts.min_intervals = oscillation_cells(s * t * half, 0.0, PI) + k + 1;
                total += integrate_complex(
                    move |theta: f64| {
                        let x = mid - half * theta.cos();
                        regular(x) * orthonormal_value(&jj, k, x) * cis(-s * x * t)
                    },
                    0.0,
                    PI,
                    &opts,
                )?;
            }
            EdgeProfile::SqrtVanishing { regular } => {
                opts.min_intervals = oscillation_cells(s * t * half, 0.0, PI) + k + 1;
                total += integrate_complex(
                    move |theta: f64| {
                        let x = mid - half * theta.cos();
                        let r = half * theta.sin();
                        regular(x) * r * r * orthonormal_value(&jj, k, x) * cis(-s * x * t)
                    },
                    0.0,
                    PI,
                    &opts,
                )?;
            }
            EdgeProfile::Smooth => {
                opts.min_intervals = oscillation_cells(s * t, lo, hi) + k + 1;
                total += integrate_complex(
                    move |x: f64| density(x) * orthonormal_value(&jj, k, x) * cis(-s * x * t),
                    lo,
                    hi,
                    &opts,
                )?;
            }
        }
    }
    Ok(total)
}

/// Value of the `k`-th orthonormal polynomial at `x`, by rolling recurrence.
/// Callers must have checked `k` against the stratum count.
fn orthonormal_value(j: &JacobiSeq, k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0_f64;
    let mut cur = (x - j.alpha(1)) / j.omega(1).sqrt();
    for n in 1..k {
        let next = ((x - j.alpha(n + 1)) * cur - j.omega(n).sqrt() * prev) / j.omega(n + 1).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Amplitudes for all strata of a finite sequence on a time grid, via the
/// quadrature measure of the full tridiagonal truncation.
pub fn amplitude_series_finite(j: &JacobiSeq, times: &[f64]) -> Result<AmplitudeSeries> {
    let len = j
        .strata_len()
        .ok_or_else(|| Error::InsufficientSpan("infinite sequence needs a truncation".into()))?;
    let measure = quadrature_measure(j, len)?;
    let (nodes, weights) = match &measure {
        SpectralMeasure::Discrete { nodes, weights } => (nodes.clone(), weights.clone()),
        _ => unreachable!("finite truncation yields atoms"),
    };
    // One orthonormal row per node, reused across the whole grid.
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&x| orthonormal_row(j, len - 1, x))
        .collect::<Result<_>>()?;
    let s = j.scale();
    let values = times
        .iter()
        .map(|&t| {
            (0..len)
                .map(|k| {
                    nodes
                        .iter()
                        .zip(&weights)
                        .zip(&rows)
                        .map(|((&x, &w), row)| w * row[k] * cis(-s * x * t))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(AmplitudeSeries {
        times: times.to_vec(),
        values,
        method: Method::Quadrature,
        tail_mass: 0.0,
    })
}

/// Amplitudes by direct integration of `i dq_k/dt = scale * (sqrt(omega_{k+1})
/// q_{k+1} + alpha_{k+1} q_k + sqrt(omega_k) q_{k-1})`, truncated at stratum
/// `truncation` with a reflecting boundary.
///
/// Classical fourth-order stepping with a fixed step bounded both by the
/// off-diagonal scale and by the stability limit of the full spectral
/// radius (diagonal included). Fails if the boundary stratum acquires more
/// than `TAIL_BUDGET` occupation at any grid time while the boundary is
/// artificial; a finite sequence truncated at its natural end reflects
/// exactly and is never rejected.
pub fn amplitude_ode(j: &JacobiSeq, truncation: usize, times: &[f64]) -> Result<AmplitudeSeries> {
    if truncation == 0 {
        return Err(Error::ParameterOutOfDomain(
            "truncation stratum must be at least 1".into(),
        ));
    }
    let mut sorted_ok = true;
    for w in times.windows(2) {
        sorted_ok &= w[0] <= w[1];
    }
    if !sorted_ok || times.first().copied().unwrap_or(0.0) < 0.0 {
        return Err(Error::ParameterOutOfDomain(
            "time grid must be ascending and non-negative".into(),
        ));
    }

    let (k_top, artificial) = match j.strata_len() {
        Some(len) if truncation >= len - 1 => (len - 1, false),
        _ => (truncation, true),
    };
    let s = j.scale();
    let sq: Vec<f64> = (1..=k_top).map(|k| j.omega(k).sqrt()).collect();
    let al: Vec<f64> = (1..=k_top + 1).map(|k| j.alpha(k)).collect();
    let wmax = sq.iter().fold(0.0_f64, |m, &v| m.max(v * v));
    let amax = al.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    // Base step from the off-diagonal scale; the second bound keeps
    // |lambda| h within the stability region when the diagonal dominates.
    let rate = s * (amax + 2.0 * wmax.sqrt());
    let mut h = 0.01_f64.min(0.1 / (s * wmax.sqrt()).max(1e-300));
    if rate > 0.0 {
        h = h.min(2.0 / rate);
    }

    let n = k_top + 1;
    let deriv = |q: &[Complex64], out: &mut Vec<Complex64>| {
        out.clear();
        for k in 0..n {
            let mut v = al[k] * q[k];
            if k + 1 < n {
                v += sq[k] * q[k + 1];
            }
            if k >= 1 {
                v += sq[k - 1] * q[k - 1];
            }
            out.push(Complex64::new(0.0, -s) * v);
        }
    };

    let mut q: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
    q[0] = Complex64::new(1.0, 0.0);
    let mut k1 = Vec::with_capacity(n);
    let mut k2 = Vec::with_capacity(n);
    let mut k3 = Vec::with_capacity(n);
    let mut k4 = Vec::with_capacity(n);
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];

    let mut cur_t = 0.0;
    let mut tail = 0.0_f64;
    let mut values = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - cur_t;
        if span > 0.0 {
            let steps = (span / h).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                deriv(&q, &mut k1);
                for i in 0..n {
                    tmp[i] = q[i] + 0.5 * dt * k1[i];
                }
                deriv(&tmp, &mut k2);
                for i in 0..n {
                    tmp[i] = q[i] + 0.5 * dt * k2[i];
                }
                deriv(&tmp, &mut k3);
                for i in 0..n {
                    tmp[i] = q[i] + dt * k3[i];
                }
                deriv(&tmp, &mut k4);
                for i in 0..n {
                    q[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
                }
            }
            cur_t = target;
        }
        let boundary = q[n - 1].norm_sqr();
        tail = tail.max(boundary);
        if artificial && boundary > TAIL_BUDGET {
            return Err(Error::TailMassExceeded {
                mass: boundary,
                t: target,
                budget: TAIL_BUDGET,
            });
        }
        values.push(q.clone());
    }
    Ok(AmplitudeSeries {
        times: times.to_vec(),
        values,
        method: Method::Ode,
        tail_mass: if artificial { tail } else { 0.0 },
    })
}

/// Closed-form amplitude catalog for named families.
///
/// Covers the families whose amplitudes reduce to finite trigonometric
/// sums, Bessel functions, or elementary envelopes. Everything else reports
/// `NoClosedForm`.
pub fn amplitude_closed_form(spec: &FamilySpec, k: usize, t: f64) -> Result<Complex64> {
    let no_form = || Error::NoClosedForm {
        family: spec.kind_name().to_string(),
        k,
    };
    match *spec {
        FamilySpec::CompleteK { n } => {
            let nf = n as f64;
            match k {
                0 => Ok((cis(-t) + (nf - 1.0) * cis(t / (nf - 1.0))) / nf),
                1 => Ok(((nf - 1.0).sqrt() / nf) * (cis(-t) - cis(t / (nf - 1.0)))),
                _ => Err(no_form()),
            }
        }
        FamilySpec::CycleC { n } => {
            if k != 0 {
                return Err(no_form());
            }
            let nf = n as f64;
            let sum: Complex64 = (0..n)
                .map(|l| cis(-t * (2.0 * PI * l as f64 / nf).cos()))
                .sum();
            Ok(sum / nf)
        }
        FamilySpec::PathP { n } => Ok(sine_chain_amplitude(n, 1.0, k, t)),
        FamilySpec::GluedTreesG { n } => {
            Ok(sine_chain_amplitude(2 * n + 1, 2.0 * 2.0_f64.sqrt(), k, t))
        }
        FamilySpec::Hypercube { n } => {
            if k > n {
                return Err(no_form());
            }
            let (c, s) = ((t / n as f64).cos(), (t / n as f64).sin());
            let excited = Complex64::new(0.0, -s).powu(k as u32);
            Ok(binomial(n, k).sqrt() * c.powi((n - k) as i32) * excited)
        }
        FamilySpec::Line => {
            if k == 0 {
                Ok(Complex64::new(bessel_j(0, t), 0.0))
            } else {
                Ok(2.0_f64.sqrt() * neg_i_pow(k) * bessel_j(k, t))
            }
        }
        FamilySpec::Tchebichef1 { m, n } => {
            let arg = 2.0_f64.powf(m - 1.0) * t;
            match n {
                Some(n) => {
                    if k >= n {
                        return Err(no_form());
                    }
                    let mut sum = Complex64::new(0.0, 0.0);
                    for l in 0..n {
                        let theta = (2 * l + 1) as f64 * PI / (2 * n) as f64;
                        sum += (k as f64 * theta).cos() * cis(-arg * theta.cos());
                    }
                    let norm = if k == 0 { 1.0 } else { 2.0_f64.sqrt() };
                    Ok(norm / n as f64 * sum)
                }
                None => {
                    if k == 0 {
                        Ok(Complex64::new(bessel_j(0, arg), 0.0))
                    } else {
                        Ok(2.0_f64.sqrt() * neg_i_pow(k) * bessel_j(k, arg))
                    }
                }
            }
        }
        FamilySpec::Tchebichef2 { m, n } => {
            let c = 2.0_f64.powf(m);
            match n {
                Some(n) => {
                    if k >= n {
                        return Err(no_form());
                    }
                    Ok(sine_chain_amplitude(n, c, k, t))
                }
                None => Ok(neg_i_pow(k)
                    * (bessel_j(k, c * t) + bessel_j(k + 2, c * t))),
            }
        }
        FamilySpec::HermiteFinite { n } => {
            if n != 3 || k > 3 {
                return Err(no_form());
            }
            let r6 = 6.0_f64.sqrt();
            let xp = (3.0 + r6).sqrt();
            let xm = (3.0 - r6).sqrt();
            let val = match k {
                0 => Complex64::new(0.5 * ((xp * t).cos() + (xm * t).cos()), 0.0),
                1 => Complex64::new(0.0, -1.0) / (2.0 * 3.0_f64.sqrt())
                    * (xp * (xp * t).sin() + xm * (xm * t).sin()),
                2 => Complex64::new(0.5 * ((xp * t).cos() - (xm * t).cos()), 0.0),
                _ => {
                    Complex64::new(0.0, -1.0) / (2.0 * r6)
                        * (xp * (r6 - 2.0) * (xp * t).sin() - xm * (r6 + 2.0) * (xm * t).sin())
                }
            };
            Ok(val)
        }
        FamilySpec::HermiteInfinite => {
            if t == 0.0 {
                return Ok(if k == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                });
            }
            // |t|^k e^{-t^2/2} / sqrt(k!) in log space; t^k carries the sign.
            let kf = k as f64;
            let ln_mag = kf * t.abs().ln() - 0.5 * t * t - 0.5 * ln_gamma(kf + 1.0);
            let sign = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            Ok(sign * ln_mag.exp() * neg_i_pow(k))
        }
        FamilySpec::Laguerre { a, gamma } => {
            if t == 0.0 {
                return Ok(if k == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                });
            }
            let b = -a * (1.0 + gamma);
            let kf = k as f64;
            let power = kf + gamma + 1.0;
            // (-i a t)^k / (1 + i a t)^(k + gamma + 1), modulus in log space.
            let ln_mag = laguerre_prefactor(gamma, k).ln() + kf * (a * t.abs()).ln()
                - 0.5 * power * (1.0 + a * a * t * t).ln();
            let theta = (a * t).atan();
            let sign = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            Ok(sign * ln_mag.exp() * neg_i_pow(k) * cis(-b * t - power * theta))
        }
        FamilySpec::Comb2D => {
            let arg = t / 2.0_f64.sqrt();
            if k == 0 {
                Ok(Complex64::new(bessel_j(0, arg), 0.0))
            } else {
                Ok(2.0_f64.sqrt() * neg_i_pow(k) * bessel_j(k, arg))
            }
        }
        FamilySpec::VectorGraph => {
            if k != 0 {
                return Err(no_form());
            }
            Ok(vector_ground_amplitude(t))
        }
        FamilySpec::AngularMomentum { n } => {
            if k != 0 {
                return Err(no_form());
            }
            Ok(vector_ground_amplitude(t / n as f64).powu(n as u32))
        }
        _ => Err(no_form()),
    }
}

fn vector_ground_amplitude(t: f64) -> Complex64 {
    let r5 = 5.0_f64.sqrt();
    cis(-t) * Complex64::new(2.0 + 3.0 * (r5 * t).cos(), r5 * (r5 * t).sin()) / 5.0
}

/// Amplitude of the uniform chain with `n` strata, atoms at
/// `band * cos(l pi / (n+1))`, and sine-squared weights.
fn sine_chain_amplitude(n: usize, band: f64, k: usize, t: f64) -> Complex64 {
    let denom = (n + 1) as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 1..=n {
        let theta = l as f64 * PI / denom;
        sum += theta.sin() * ((k + 1) as f64 * theta).sin() * cis(-band * t * theta.cos());
    }
    2.0 / denom * sum
}

/// Per-site amplitude `q_k(t) / sqrt(|V_k|)` for the vertex's stratum.
pub fn site_amplitude(
    g: &Graph,
    s: &Stratification,
    j: &JacobiSeq,
    vertex: usize,
    t: f64,
) -> Result<Complex64> {
    if vertex >= g.len() {
        return Err(Error::IndexOutOfRange {
            index: vertex,
            n: g.len(),
        });
    }
    let k = s.distance(vertex);
    let len = j
        .strata_len()
        .ok_or_else(|| Error::InsufficientSpan("infinite sequence needs a truncation".into()))?;
    let measure = quadrature_measure(j, len)?;
    let q = amplitude_quadrature(&measure, j, k, t)?;
    Ok(q / (s.stratum(k).len() as f64).sqrt())
}

/// Time-averaged probability of finding the walker in stratum `k`:
/// `P(k) = sum_l A_l^2 p_k(x_l)^2`, valid only for simple spectra.
pub fn avg_probability(measure: &SpectralMeasure, j: &JacobiSeq, k: usize) -> Result<f64> {
    let atoms = match measure {
        SpectralMeasure::Discrete { nodes, weights } => {
            nodes.iter().copied().zip(weights.iter().copied())
        }
        _ => {
            return Err(Error::ParameterOutOfDomain(
                "time-averaged probabilities need a purely atomic measure".into(),
            ))
        }
    };
    let pairs: Vec<(f64, f64)> = atoms.collect();
    let mut min_gap = f64::INFINITY;
    for w in pairs.windows(2) {
        min_gap = min_gap.min((w[1].0 - w[0].0).abs());
    }
    if pairs.len() >= 2 && min_gap < 1e-9 {
        return Err(Error::DegenerateNodes(min_gap));
    }
    let mut total = 0.0;
    for &(x, w) in &pairs {
        let p = orthonormal_row(j, k, x)?[k];
        total += w * w * p * p;
    }
    Ok(total)
}

/// Ground amplitude of a product graph: the product of the factors' ground
/// amplitudes, each evaluated under its own scale.
pub fn product_amplitude(factors: &[&dyn Fn(f64) -> Complex64], t: f64) -> Complex64 {
    factors
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{closed_form_measure, family_jacobi};
    use approx::assert_abs_diff_eq;

    fn close(a: Complex64, b: Complex64, eps: f64) {
        assert!(
            (a - b).norm() <= eps,
            "expected {b}, got {a} (|diff| = {:.3e})",
            (a - b).norm()
        );
    }

    #[test]
    fn monic_polynomials_by_hand() {
        let line = family_jacobi(&FamilySpec::Line).unwrap();
        assert_eq!(eval_poly(&line, 0, 7.0), 1.0);
        assert_eq!(eval_poly(&line, 2, 2.0), 2.0); // x^2 - 2 at x = 2
        let hermite = family_jacobi(&FamilySpec::HermiteInfinite).unwrap();
        assert_eq!(eval_poly(&hermite, 3, 1.0), -2.0); // x^3 - 3x at x = 1
    }

    #[test]
    fn orthonormal_row_matches_monic_normalization() {
        let j = family_jacobi(&FamilySpec::Laguerre { a: 0.8, gamma: 0.4 }).unwrap();
        let x = 1.7;
        let row = orthonormal_row(&j, 6, x).unwrap();
        let mut norm = 1.0;
        for k in 1..=6 {
            norm *= j.omega(k);
            assert_abs_diff_eq!(
                row[k],
                eval_poly(&j, k, x) / norm.sqrt(),
                epsilon = 1e-10 * row[k].abs().max(1.0)
            );
        }
    }

    #[test]
    fn complete_graph_printed_amplitudes() {
        for n in [2, 3, 5, 9] {
            let spec = FamilySpec::CompleteK { n };
            let j = family_jacobi(&spec).unwrap();
            let m = closed_form_measure(&spec).unwrap();
            let nf = n as f64;
            for t in [0.0, 0.3, 2.0, 11.0] {
                let q0 = amplitude_quadrature(&m, &j, 0, t).unwrap();
                let expect0 = (cis(-t) + (nf - 1.0) * cis(t / (nf - 1.0))) / nf;
                close(q0, expect0, 1e-13);
                let q1 = amplitude_quadrature(&m, &j, 1, t).unwrap();
                let expect1 = ((nf - 1.0).sqrt() / nf) * (cis(-t) - cis(t / (nf - 1.0)));
                close(q1, expect1, 1e-13);
                close(q0, amplitude_closed_form(&spec, 0, t).unwrap(), 1e-13);
                close(q1, amplitude_closed_form(&spec, 1, t).unwrap(), 1e-13);
                assert_abs_diff_eq!(q0.norm_sqr() + q1.norm_sqr(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_match_quadrature_on_finite_families() {
        let cases: Vec<FamilySpec> = vec![
            FamilySpec::CycleC { n: 5 },
            FamilySpec::CycleC { n: 6 },
            FamilySpec::PathP { n: 7 },
            FamilySpec::GluedTreesG { n: 2 },
            FamilySpec::Hypercube { n: 4 },
            FamilySpec::Tchebichef1 { m: 2.0, n: Some(6) },
            FamilySpec::Tchebichef2 { m: 1.5, n: Some(5) },
            FamilySpec::HermiteFinite { n: 3 },
            FamilySpec::VectorGraph,
        ];
        for spec in cases {
            let j = family_jacobi(&spec).unwrap();
            let m = closed_form_measure(&spec).unwrap();
            let len = j.strata_len().unwrap();
            for t in [0.0, 0.7, 4.2] {
                for k in 0..len {
                    let quad = amplitude_quadrature(&m, &j, k, t).unwrap();
                    match amplitude_closed_form(&spec, k, t) {
                        Ok(closed) => close(quad, closed, 1e-11),
                        Err(Error::NoClosedForm { .. }) => {}
                        Err(e) => panic!("unexpected error for {spec}: {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn line_amplitudes_are_bessel() {
        let j = family_jacobi(&FamilySpec::Line).unwrap();
        let m = closed_form_measure(&FamilySpec::Line).unwrap();
        for t in [0.5, 3.0, 12.0] {
            for k in [0usize, 1, 2, 5] {
                let quad = amplitude_quadrature(&m, &j, k, t).unwrap();
                let closed = amplitude_closed_form(&FamilySpec::Line, k, t).unwrap();
                close(quad, closed, 1e-10);
            }
        }
        // Total probability from the Bessel sum rule.
        let t = 7.0;
        let mut total = amplitude_closed_form(&FamilySpec::Line, 0, t)
            .unwrap()
            .norm_sqr();
        for k in 1..60 {
            total += amplitude_closed_form(&FamilySpec::Line, k, t)
                .unwrap()
                .norm_sqr();
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hermite_infinite_is_poisson() {
        let spec = FamilySpec::HermiteInfinite;
        for t in [0.4, 1.3, 3.0] {
            let mut total = 0.0;
            for k in 0..80 {
                let q = amplitude_closed_form(&spec, k, t).unwrap();
                let expect = t.powi(2 * k as i32) * (-t * t).exp()
                    / crate::special::gamma(k as f64 + 1.0);
                assert_abs_diff_eq!(q.norm_sqr(), expect, epsilon = 1e-13);
                total += q.norm_sqr();
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
        // Stable far beyond the naive factorial overflow point.
        let q = amplitude_closed_form(&spec, 400, 20.0).unwrap();
        assert!(q.norm() > 0.0 && q.norm() < 1.0);
    }

    #[test]
    fn laguerre_closed_form_against_measure_quadrature() {
        let spec = FamilySpec::Laguerre { a: 1.0, gamma: 0.5 };
        let j = family_jacobi(&spec).unwrap();
        let m = closed_form_measure(&spec).unwrap();
        for t in [0.3, 1.0, 4.0] {
            for k in [0usize, 1, 3] {
                let quad = amplitude_quadrature(&m, &j, k, t).unwrap();
                let closed = amplitude_closed_form(&spec, k, t).unwrap();
                close(quad, closed, 1e-9);
            }
        }
        // gamma = 0: |q_0|^2 = 1 / (1 + t^2).
        let g0 = FamilySpec::Laguerre { a: 1.0, gamma: 0.0 };
        for t in [0.5, 2.0, 9.0] {
            let q0 = amplitude_closed_form(&g0, 0, t).unwrap();
            assert_abs_diff_eq!(q0.norm_sqr(), 1.0 / (1.0 + t * t), epsilon = 1e-13);
        }
        // Normalization across strata.
        let t = 2.5;
        let total: f64 = (0..400)
            .map(|k| amplitude_closed_form(&spec, k, t).unwrap().norm_sqr())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ode_matches_line_bessel_forms() {
        let j = family_jacobi(&FamilySpec::Line).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let series = amplitude_ode(&j, 80, &times).unwrap();
        assert!(series.tail_mass < TAIL_BUDGET);
        assert!(series.normalization_defect() < 1e-8);
        for (i, &t) in times.iter().enumerate() {
            for k in [0usize, 1, 4, 9] {
                let expect = amplitude_closed_form(&FamilySpec::Line, k, t).unwrap();
                close(series.values[i][k], expect, 1e-7);
            }
        }
    }

    #[test]
    fn ode_truncation_reports_tail_blowup() {
        let j = family_jacobi(&FamilySpec::Line).unwrap();
        let err = amplitude_ode(&j, 6, &[0.0, 20.0]).unwrap_err();
        assert!(matches!(err, Error::TailMassExceeded { .. }));
    }

    #[test]
    fn ode_on_finite_family_reflects_exactly() {
        let spec = FamilySpec::GluedTreesG { n: 2 };
        let j = family_jacobi(&spec).unwrap();
        let times = [0.0, 1.0, 3.0, 8.0];
        let series = amplitude_ode(&j, 100, &times).unwrap();
        assert_eq!(series.tail_mass, 0.0);
        assert!(series.normalization_defect() < 1e-8);
        for (i, &t) in times.iter().enumerate() {
            for k in 0..=4 {
                let expect = amplitude_closed_form(&spec, k, t).unwrap();
                close(series.values[i][k], expect, 5e-7);
            }
        }
    }

    #[test]
    fn hermite_ode_matches_poisson_law() {
        let j = family_jacobi(&FamilySpec::HermiteInfinite).unwrap();
        let times = [0.0, 0.5, 2.0, 4.0];
        let series = amplitude_ode(&j, 80, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            for k in [0usize, 1, 5, 12] {
                let expect = amplitude_closed_form(&FamilySpec::HermiteInfinite, k, t).unwrap();
                close(series.values[i][k], expect, 1e-6);
            }
        }
    }

    #[test]
    fn series_finite_covers_all_strata() {
        let spec = FamilySpec::Hypercube { n: 5 };
        let j = family_jacobi(&spec).unwrap();
        let times = [0.0, 0.9, 6.0];
        let series = amplitude_series_finite(&j, &times).unwrap();
        assert!(series.normalization_defect() < 1e-12);
        for (i, &t) in times.iter().enumerate() {
            for k in 0..=5 {
                let expect = amplitude_closed_form(&spec, k, t).unwrap();
                close(series.values[i][k], expect, 1e-11);
            }
        }
    }

    #[test]
    fn large_cycles_approach_the_line() {
        let spec = FamilySpec::CycleC { n: 240 };
        let j = family_jacobi(&spec).unwrap();
        let m = closed_form_measure(&spec).unwrap();
        for t in [5.0, 20.0] {
            for k in [0usize, 1, 3] {
                let cycle = amplitude_quadrature(&m, &j, k, t).unwrap();
                let line = amplitude_closed_form(&FamilySpec::Line, k, t).unwrap();
                assert!(
                    (cycle - line).norm() < 1e-3,
                    "n=240 k={k} t={t}: |diff| = {:.3e}",
                    (cycle - line).norm()
                );
            }
        }
    }

    #[test]
    fn site_amplitudes_on_small_graphs() {
        use crate::families::family_graph;
        use crate::graph::{extract_jacobi, stratify};

        // K_2 vertex 1: -i sin t.
        let spec = FamilySpec::CompleteK { n: 2 };
        let g = family_graph(&spec).unwrap();
        let s = stratify(&g);
        let j = family_jacobi(&spec).unwrap();
        for t in [0.0, 0.8, 3.1] {
            let a = site_amplitude(&g, &s, &j, 1, t).unwrap();
            close(a, Complex64::new(0.0, -t.sin()), 1e-13);
            let origin = site_amplitude(&g, &s, &j, 0, t).unwrap();
            close(origin, Complex64::new(t.cos(), 0.0), 1e-13);
        }

        // C_4 stratum 1 has two sites sharing q_1 / sqrt(2).
        let spec = FamilySpec::CycleC { n: 4 };
        let g = family_graph(&spec).unwrap();
        let s = stratify(&g);
        let j = extract_jacobi(&g, &s).unwrap().with_scale(0.5);
        let m = closed_form_measure(&spec).unwrap();
        let t = 1.7;
        let q1 = amplitude_quadrature(&m, &j, 1, t).unwrap();
        let a1 = site_amplitude(&g, &s, &j, 1, t).unwrap();
        let a3 = site_amplitude(&g, &s, &j, 3, t).unwrap();
        close(a1, q1 / 2.0_f64.sqrt(), 1e-12);
        close(a3, q1 / 2.0_f64.sqrt(), 1e-12);
    }

    #[test]
    fn average_probabilities() {
        // Single vertex: all mass stays at the origin.
        let j = JacobiSeq::finite(vec![], vec![0.0]).unwrap();
        let m = quadrature_measure(&j, 1).unwrap();
        assert_abs_diff_eq!(avg_probability(&m, &j, 0).unwrap(), 1.0, epsilon = 1e-15);

        for n in [2usize, 3, 5, 8] {
            let spec = FamilySpec::CompleteK { n };
            let j = family_jacobi(&spec).unwrap();
            let m = closed_form_measure(&spec).unwrap();
            let nf = n as f64;
            let p0 = avg_probability(&m, &j, 0).unwrap();
            assert_abs_diff_eq!(p0, ((nf - 1.0).powi(2) + 1.0) / (nf * nf), epsilon = 1e-13);
            let p1 = avg_probability(&m, &j, 1).unwrap();
            assert_abs_diff_eq!(p1, 2.0 * (nf - 1.0) / (nf * nf), epsilon = 1e-13);
            // The time-averaged distribution over all strata sums to one.
            assert_abs_diff_eq!(p0 + p1, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn degenerate_nodes_are_rejected() {
        let j = JacobiSeq::finite(vec![1.0], vec![0.0, 0.0]).unwrap();
        let m = SpectralMeasure::Discrete {
            nodes: vec![1.0, 1.0 + 1e-12],
            weights: vec![0.5, 0.5],
        };
        assert!(matches!(
            avg_probability(&m, &j, 0),
            Err(Error::DegenerateNodes(_))
        ));
    }

    #[test]
    fn products_compose_ground_amplitudes() {
        // n copies of K_2 at scale 1/n give the hypercube ground amplitude.
        let n = 5;
        let k2 = move |t: f64| Complex64::new((t / n as f64).cos(), 0.0);
        let factors: Vec<&dyn Fn(f64) -> Complex64> = vec![&k2; n];
        for t in [0.0, 1.2, 6.0] {
            let prod = product_amplitude(&factors, t);
            let cube = amplitude_closed_form(&FamilySpec::Hypercube { n }, 0, t).unwrap();
            close(prod, cube, 1e-13);
        }

        // Two vector graphs at scale 1/2 give the angular momentum form.
        let half_vector = |t: f64| vector_ground_amplitude(t / 2.0);
        let factors: Vec<&dyn Fn(f64) -> Complex64> = vec![&half_vector, &half_vector];
        for t in [0.4, 2.7] {
            let prod = product_amplitude(&factors, t);
            let ang =
                amplitude_closed_form(&FamilySpec::AngularMomentum { n: 2 }, 0, t).unwrap();
            close(prod, ang, 1e-13);
        }
    }

    #[test]
    fn angular_momentum_ground_amplitude_matches_class_b_quadrature() {
        let spec = FamilySpec::AngularMomentum { n: 2 };
        let j = family_jacobi(&spec).unwrap();
        let m = quadrature_measure(&j, 5).unwrap();
        for t in [0.0, 0.9, 3.3] {
            let quad = amplitude_quadrature(&m, &j, 0, t).unwrap();
            let closed = amplitude_closed_form(&spec, 0, t).unwrap();
            close(quad, closed, 1e-11);
        }
    }

    #[test]
    fn star_and_mixed_measure_amplitudes_conserve_probability() {
        let spec = FamilySpec::StarLattice { n: 4 };
        let j = family_jacobi(&spec).unwrap();
        let m = closed_form_measure(&spec).unwrap();
        let t = 3.0;
        let mut total = 0.0;
        for k in 0..40 {
            total += amplitude_quadrature(&m, &j, k, t).unwrap().norm_sqr();
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn quadrature_rejects_unreachable_strata() {
        let spec = FamilySpec::CompleteK { n: 4 };
        let j = family_jacobi(&spec).unwrap();
        let m = closed_form_measure(&spec).unwrap();
        assert!(matches!(
            amplitude_quadrature(&m, &j, 2, 1.0),
            Err(Error::TruncationTooLarge { .. })
        ));
    }
}
