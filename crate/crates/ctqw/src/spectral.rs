//! Spectral measures of three-term recurrences.
//!
//! A coefficient sequence `(omega_k, alpha_k)` determines a probability
//! measure on the real line: the spectral measure of the associated
//! tridiagonal operator at the first basis vector. This module recovers that
//! measure three ways: Gauss quadrature rules from the truncated operator's
//! eigendecomposition, Stieltjes transforms evaluated as continuant ratios,
//! and density values via the inversion formula. It also computes measure
//! moments directly from the recurrence.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::graph::JacobiSeq;

/// Shared handle to a pointwise density evaluator.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Behavior of an absolutely continuous density at the support endpoints.
///
/// Half-power edges carry their smooth prefactor `g` explicitly because a
/// pointwise density evaluator cannot recover it near the edge: computing
/// the distance to the endpoint from a rounded abscissa loses all relative
/// accuracy, which both poisons adaptive integration and hides the
/// edge coefficient that long-time asymptotics are built from.
#[derive(Clone)]
pub enum EdgeProfile {
    /// No half-power structure; the density is integrated as given.
    Smooth,
    /// `density(x) = g(x) / sqrt((hi - x)(x - lo))` with smooth `g`.
    InverseSqrt { regular: DensityFn },
    /// `density(x) = g(x) * sqrt((hi - x)(x - lo))` with smooth `g`.
    SqrtVanishing { regular: DensityFn },
}

impl EdgeProfile {
    fn kind(&self) -> &'static str {
        match self {
            EdgeProfile::Smooth => "smooth",
            EdgeProfile::InverseSqrt { .. } => "inverse-sqrt",
            EdgeProfile::SqrtVanishing { .. } => "sqrt-vanishing",
        }
    }
}

/// Spectral measure of a walk generator at the origin stratum.
#[derive(Clone)]
pub enum SpectralMeasure {
    /// Purely atomic: nodes with matching weights, sorted ascending.
    Discrete { nodes: Vec<f64>, weights: Vec<f64> },
    /// Absolutely continuous on `[support.0, support.1]`.
    Continuous {
        density: DensityFn,
        support: (f64, f64),
        edge: EdgeProfile,
    },
    /// Atoms plus an absolutely continuous part.
    Mixed {
        atoms: Vec<(f64, f64)>,
        density: DensityFn,
        support: (f64, f64),
        edge: EdgeProfile,
    },
}

impl SpectralMeasure {
    /// Atomic part as `(node, weight)` pairs; empty for purely continuous
    /// measures.
    pub fn atom_pairs(&self) -> Vec<(f64, f64)> {
        match self {
            SpectralMeasure::Discrete { nodes, weights } => {
                nodes.iter().copied().zip(weights.iter().copied()).collect()
            }
            SpectralMeasure::Continuous { .. } => Vec::new(),
            SpectralMeasure::Mixed { atoms, .. } => atoms.clone(),
        }
    }

    /// Absolutely continuous part: `(density, support, singular_endpoints)`,
    /// the flag marking inverse-square-root endpoint blowup.
    #[allow(clippy::type_complexity)]
    pub fn absolutely_continuous(&self) -> Option<(DensityFn, (f64, f64), bool)> {
        self.continuous_piece().map(|(density, support, edge)| {
            (
                density,
                support,
                matches!(edge, EdgeProfile::InverseSqrt { .. }),
            )
        })
    }

    /// Absolutely continuous part with its edge profile.
    pub fn continuous_piece(&self) -> Option<(DensityFn, (f64, f64), EdgeProfile)> {
        match self {
            SpectralMeasure::Discrete { .. } => None,
            SpectralMeasure::Continuous {
                density,
                support,
                edge,
            }
            | SpectralMeasure::Mixed {
                density,
                support,
                edge,
                ..
            } => Some((density.clone(), *support, edge.clone())),
        }
    }

    /// Absolutely continuous part as a standalone measure, dropping any
    /// atoms; `None` for purely atomic measures.
    pub fn continuous_part(&self) -> Option<SpectralMeasure> {
        self.continuous_piece()
            .map(|(density, support, edge)| SpectralMeasure::Continuous {
                density,
                support,
                edge,
            })
    }

    /// Total atomic mass.
    pub fn atomic_mass(&self) -> f64 {
        self.atom_pairs().iter().map(|&(_, w)| w).sum()
    }

    /// `m`-th moment of a purely atomic measure.
    pub fn discrete_moment(&self, m: usize) -> Option<f64> {
        match self {
            SpectralMeasure::Discrete { nodes, weights } => Some(
                nodes
                    .iter()
                    .zip(weights)
                    .map(|(&x, &w)| w * x.powi(m as i32))
                    .sum(),
            ),
            _ => None,
        }
    }
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralMeasure::Discrete { nodes, weights } => f
                .debug_struct("Discrete")
                .field("nodes", nodes)
                .field("weights", weights)
                .finish(),
            SpectralMeasure::Continuous { support, edge, .. } => f
                .debug_struct("Continuous")
                .field("support", support)
                .field("edge", &edge.kind())
                .finish(),
            SpectralMeasure::Mixed {
                atoms,
                support,
                edge,
                ..
            } => f
                .debug_struct("Mixed")
                .field("atoms", atoms)
                .field("support", support)
                .field("edge", &edge.kind())
                .finish(),
        }
    }
}

/// Gauss quadrature rule of the spectral measure: nodes and weights of the
/// `order`-point rule, nodes ascending, weights summing to one.
///
/// The rule is exact on polynomials of degree `2*order - 1`; for a finite
/// sequence with `order` equal to the number of strata it reproduces the
/// measure itself. Nodes are the eigenvalues of the order-`order` truncation
/// of the tridiagonal operator; weights are the squared first components of
/// its orthonormal eigenvectors.
pub fn jacobi_to_quadrature(seq: &JacobiSeq, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::ParameterOutOfDomain(
            "quadrature order must be at least 1".into(),
        ));
    }
    if let Some(len) = seq.strata_len() {
        if order > len {
            return Err(Error::TruncationTooLarge { order, len });
        }
    }

    let mut m = DMatrix::<f64>::zeros(order, order);
    for k in 0..order {
        m[(k, k)] = seq.alpha(k + 1);
    }
    for k in 0..order - 1 {
        let b = seq.omega(k + 1).sqrt();
        m[(k, k + 1)] = b;
        m[(k + 1, k)] = b;
    }

    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 200 * order + 1024)
        .ok_or(Error::EigenSolverFailure(order))?;

    // Two weight estimates with complementary failure modes. Squared first
    // eigenvector components are absolutely accurate (~ norm * eps), which
    // is relatively useless for tiny tail weights that high-order moments
    // amplify. The Christoffel function 1 / sum_k p_k(x)^2 via the forward
    // recurrence is relatively accurate wherever p_k grows or oscillates,
    // but at a node sitting on a point mass the series converges, p_k is
    // the minimal solution, and forward recursion injects the dominant one;
    // extended precision inside christoffel_weight pushes that injection
    // below target accuracy at practical orders. The eigenvector value is
    // kept as a backstop for orders deep enough to exhaust the extra
    // digits: disagreement at a non-tiny weight means the recurrence went
    // unstable, which forces a large true weight, where the eigenvector
    // value is also relatively accurate.
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            let wv = v0 * v0;
            let (x, wc) = christoffel_weight(seq, order, eig.eigenvalues[i]);
            let agree = (wc - wv).abs() <= 1e-6 * wc.max(wv);
            let w = if agree || wc.max(wv) <= 1e-8 { wc } else { wv };
            (x, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    if order >= 2 {
        let spread = pairs[order - 1].0 - pairs[0].0;
        let mut min_gap = f64::INFINITY;
        for w in pairs.windows(2) {
            min_gap = min_gap.min(w[1].0 - w[0].0);
        }
        if min_gap < spread * 1e-13 {
            return Err(Error::DegenerateNodes(min_gap));
        }
    }

    let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
    let nodes = pairs.iter().map(|&(x, _)| x).collect();
    let weights = pairs.iter().map(|&(_, w)| w / total).collect();
    Ok((nodes, weights))
}

/// Orthonormal values `p_0..p_order`, their derivatives, and the partial
/// sum `sum_{k<order} p_k^2`, all at a double-double abscissa.
fn orthonormal_scan(seq: &JacobiSeq, order: usize, x: Dd) -> (Dd, Dd, Dd) {
    let mut s_prev = Dd::from(seq.omega(1)).sqrt();
    let mut prev = Dd::from(1.0);
    let mut dprev = Dd::from(0.0);
    let mut cur = x.sub(Dd::from(seq.alpha(1))).div(s_prev);
    let mut dcur = s_prev.recip();
    let mut sum = Dd::from(1.0);
    for k in 1..order {
        sum = sum.add(cur.sq());
        let s_next = Dd::from(seq.omega(k + 1)).sqrt();
        let shifted = x.sub(Dd::from(seq.alpha(k + 1)));
        let next = shifted.mul(cur).sub(s_prev.mul(prev)).div(s_next);
        let dnext = shifted
            .mul(dcur)
            .add(cur)
            .sub(s_prev.mul(dprev))
            .div(s_next);
        prev = cur;
        dprev = dcur;
        cur = next;
        dcur = dnext;
        s_prev = s_next;
    }
    (sum, cur, dcur)
}

/// Refines an approximate Gauss node and returns it with its weight, the
/// reciprocal of the Christoffel function `1 / sum_{k<order} p_k(x)^2`.
///
/// Runs in double-double arithmetic: at nodes that converge onto point
/// masses the orthonormal sequence is the minimal solution of the
/// recurrence, and the dominant solution injected by f64 rounding would
/// otherwise reach the size of the sum itself. The same steepness makes
/// the weight sensitive to the eigensolver's absolute node error, so the
/// node is first polished as a zero of `p_order` by Newton steps.
fn christoffel_weight(seq: &JacobiSeq, order: usize, x: f64) -> (f64, f64) {
    if order == 1 {
        return (seq.alpha(1), 1.0);
    }
    let mut z = Dd::from(x);
    let cap = 1e-10 * (1.0 + x.abs());
    for _ in 0..2 {
        let (_, p_n, dp_n) = orthonormal_scan(seq, order, z);
        let step = p_n.div(dp_n).to_f64();
        if !step.is_finite() || step.abs() > cap {
            break;
        }
        z = z.sub(Dd::from(step));
    }
    let (sum, _, _) = orthonormal_scan(seq, order, z);
    (z.to_f64(), sum.recip().to_f64())
}

/// Atomic spectral measure from the `order`-point Gauss rule.
pub fn quadrature_measure(seq: &JacobiSeq, order: usize) -> Result<SpectralMeasure> {
    let (nodes, weights) = jacobi_to_quadrature(seq, order)?;
    Ok(SpectralMeasure::Discrete { nodes, weights })
}

/// Stieltjes transform `G(z) = integral of 1/(z - x)` against the spectral
/// measure, evaluated as the ratio of continuants of the truncated
/// continued fraction with `depth` levels.
///
/// Denominator continuants follow `Q_{k+1} = (z - alpha_{k+1}) Q_k -
/// omega_k Q_{k-1}` from `Q_0 = 1`; the numerator runs the same recurrence
/// with all indices shifted up by one. Both are rescaled on the fly, so the
/// ratio stays finite at depths far beyond what term-by-term evaluation of
/// the fraction tolerates, including at points where an intermediate
/// denominator vanishes exactly. For a finite sequence any `depth` at least
/// the number of strata yields the exact rational transform.
pub fn stieltjes_cf(seq: &JacobiSeq, z: Complex64, depth: usize) -> Result<Complex64> {
    if depth == 0 {
        return Err(Error::ParameterOutOfDomain(
            "continued fraction depth must be at least 1".into(),
        ));
    }

    // Kept low enough that one recurrence step after a rescale cannot
    // overflow norm_sqr even for large omega.
    const RESCALE: f64 = 1e140;

    // Denominator: Q_0..Q_depth. Numerator: shifted continuants up to
    // depth - 1.
    let mut q_prev = Complex64::new(1.0, 0.0);
    let mut q = z - seq.alpha(1);
    let mut eq: i64 = 0;
    let mut p_prev = Complex64::new(1.0, 0.0);
    let mut p = if depth >= 2 {
        z - seq.alpha(2)
    } else {
        Complex64::new(1.0, 0.0) // numerator continuant of depth 1 is 1
    };
    let mut ep: i64 = 0;

    for k in 1..depth {
        let q_next = (z - seq.alpha(k + 1)) * q - seq.omega(k) * q_prev;
        q_prev = q;
        q = q_next;
        if q.norm_sqr().max(q_prev.norm_sqr()) > RESCALE * RESCALE {
            q /= RESCALE;
            q_prev /= RESCALE;
            eq += 1;
        }
        if k + 1 < depth {
            let p_next = (z - seq.alpha(k + 2)) * p - seq.omega(k + 1) * p_prev;
            p_prev = p;
            p = p_next;
            if p.norm_sqr().max(p_prev.norm_sqr()) > RESCALE * RESCALE {
                p /= RESCALE;
                p_prev /= RESCALE;
                ep += 1;
            }
        }
    }

    if q.norm() == 0.0 {
        return Err(Error::DivergentFraction {
            re: z.re,
            im: z.im,
            depth,
        });
    }
    let shift = ep - eq;
    let g = (p / q) * RESCALE.powi(shift as i32);
    if !g.re.is_finite() || !g.im.is_finite() {
        return Err(Error::DivergentFraction {
            re: z.re,
            im: z.im,
            depth,
        });
    }
    Ok(g)
}

/// Density of the absolutely continuous part at `u`, recovered from the
/// Stieltjes transform just above the real axis:
/// `-Im G(u + i*eps) / pi`.
///
/// The result converges to the density as `eps -> 0` provided `depth` grows
/// fast enough that the truncated fraction has converged at height `eps`;
/// for slowly decaying resolvents budget roughly `depth >> 1/eps`.
pub fn stieltjes_inversion(seq: &JacobiSeq, u: f64, eps: f64, depth: usize) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::ParameterOutOfDomain(format!(
            "inversion offset must be positive, got {eps}"
        )));
    }
    let g = stieltjes_cf(seq, Complex64::new(u, eps), depth)?;
    Ok(-g.im / std::f64::consts::PI)
}

/// `m`-th moment of the spectral measure, computed exactly from the
/// recurrence as the origin entry of the `m`-th operator power applied to
/// the first basis vector.
pub fn jacobi_moment(seq: &JacobiSeq, m: usize) -> f64 {
    let len = match seq.strata_len() {
        Some(l) => l.min(m + 1),
        None => m + 1,
    };
    let mut v = vec![0.0; len];
    v[0] = 1.0;
    let mut out = vec![0.0; len];
    for _ in 0..m {
        for k in 0..len {
            let mut acc = seq.alpha(k + 1) * v[k];
            if k + 1 < len {
                acc += seq.omega(k + 1).sqrt() * v[k + 1];
            }
            if k > 0 {
                acc += seq.omega(k).sqrt() * v[k - 1];
            }
            out[k] = acc;
        }
        std::mem::swap(&mut v, &mut out);
    }
    v[0]
}
