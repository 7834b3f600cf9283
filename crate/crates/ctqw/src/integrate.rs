//! Adaptive Gauss-Legendre quadrature on finite intervals.
//!
//! Fifteen-point rules on a bisection tree: a cell is accepted when the
//! two-half refinement agrees with the single-cell estimate within the
//! cell's share of the global error budget. Oscillatory integrands should
//! pre-split the interval via [`oscillation_cells`] so that no cell spans
//! more than about half an oscillation period.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::JacobiSeq;
use crate::spectral;

const GL_ORDER: usize = 15;
const MAX_CELLS: usize = 1 << 21;

/// Nodes and weights of the 15-point Gauss-Legendre rule on `[-1, 1]`.
fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| {
        // Legendre recurrence: alpha_k = 0, omega_k = k^2 / (4k^2 - 1).
        let omega: Vec<f64> = (1..GL_ORDER)
            .map(|k| {
                let k = k as f64;
                k * k / (4.0 * k * k - 1.0)
            })
            .collect();
        let alpha = vec![0.0; GL_ORDER];
        let seq = JacobiSeq::finite(omega, alpha).expect("valid recurrence");
        let (nodes, mut weights) =
            spectral::jacobi_to_quadrature(&seq, GL_ORDER).expect("small symmetric eigenproblem");
        // The quadrature normalizes to unit mass; the Legendre weight
        // function has mass 2.
        for w in &mut weights {
            *w *= 2.0;
        }
        (nodes, weights)
    })
}

/// Error-budget controls for adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    /// Budget relative to the accumulated absolute cell mass.
    pub rel_tol: f64,
    /// Absolute error budget floor.
    pub abs_tol: f64,
    /// Initial uniform subdivision before adaptivity.
    pub min_intervals: usize,
    /// Maximum bisection depth below the initial cells.
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-11,
            abs_tol: 1e-12,
            min_intervals: 1,
            max_depth: 48,
        }
    }
}

/// Number of initial cells needed so that a phase of angular frequency
/// `freq` advances at most about pi per cell on `[a, b]`.
pub fn oscillation_cells(freq: f64, a: f64, b: f64) -> usize {
    let cells = (freq.abs() * (b - a).abs() / std::f64::consts::PI).ceil() as usize + 1;
    cells.min(MAX_CELLS)
}

fn gl15_cell<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = gl15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::ZERO;
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    half * acc
}

/// Integrates a complex-valued function over `[a, b]`.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::ZERO);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::ParameterOutOfDomain(format!(
            "integration interval [{a}, {b}] is not finite and ordered"
        )));
    }

    let cells = opts.min_intervals.clamp(1, MAX_CELLS);
    let width = (b - a) / cells as f64;

    // Coarse pass fixes the scale of the budget: the L1 mass of the cell
    // integrals is robust against cancellation in the total.
    let mut work: Vec<(f64, f64, Complex64, u32)> = Vec::with_capacity(cells);
    let mut l1 = 0.0;
    for i in 0..cells {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == cells { b } else { lo + width };
        let est = gl15_cell(&f, lo, hi);
        l1 += est.norm();
        work.push((lo, hi, est, 0));
    }
    let budget_total = opts.abs_tol.max(opts.rel_tol * l1);

    let mut acc = Complex64::ZERO;
    let mut excess = 0.0;
    let mut stack: Vec<(f64, f64, Complex64, u32, f64)> = work
        .into_iter()
        .map(|(lo, hi, est, d)| (lo, hi, est, d, budget_total / cells as f64))
        .collect();

    while let Some((lo, hi, coarse, depth, budget)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl15_cell(&f, lo, mid);
        let right = gl15_cell(&f, mid, hi);
        let refined = left + right;
        let err = (refined - coarse).norm();
        if err <= budget || depth >= opts.max_depth {
            acc += refined;
            if err > budget {
                excess += err - budget;
            }
        } else {
            let half_budget = 0.5 * budget;
            stack.push((lo, mid, left, depth + 1, half_budget));
            stack.push((mid, hi, right, depth + 1, half_budget));
        }
    }

    if excess > 10.0 * budget_total {
        return Err(Error::QuadratureNotConverged(format!(
            "estimated error {excess:.3e} exceeds budget {budget_total:.3e} on [{a}, {b}]"
        )));
    }
    Ok(acc)
}

/// Integrates a real-valued function over `[a, b]`.
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, opts).map(|z| z.re)
}
