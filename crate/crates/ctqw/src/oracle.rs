//! Brute-force ground truth: dense eigendecomposition of the adjacency
//! matrix, exact evolution of the origin state, and stratum projection.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Graph, Stratification};
use crate::special::cis;

/// Default vertex-count cap for dense factorization.
pub const DEFAULT_CAP: usize = 4096;

/// Eigendecomposition of a graph's adjacency matrix, reused across time
/// points. Evolution costs O(n^2) per time after the O(n^3) factorization.
#[derive(Debug, Clone)]
pub struct DenseEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    /// Coefficients of the origin basis vector in the eigenbasis.
    origin_coords: DVector<f64>,
    scale: f64,
}

impl DenseEvolution {
    /// Factorizes the adjacency matrix of `g` with the default size cap.
    pub fn new(g: &Graph, scale: f64) -> Result<Self> {
        Self::with_cap(g, scale, DEFAULT_CAP)
    }

    /// Factorizes with an explicit size cap.
    pub fn with_cap(g: &Graph, scale: f64, cap: usize) -> Result<Self> {
        let n = g.len();
        if n > cap {
            return Err(Error::GraphTooLarge { n, cap });
        }
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in g.edges() {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        let eig = nalgebra::SymmetricEigen::try_new(a, f64::EPSILON, 200 * n + 1024)
            .ok_or(Error::EigenSolverFailure(n))?;
        let origin_coords = eig.eigenvectors.row(g.origin()).transpose();
        Ok(DenseEvolution {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            origin_coords,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.len() == 0
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    /// State at time `t` started from the origin vertex.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let n = self.len();
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for l in 0..n {
            let w = self.origin_coords[l] * cis(-self.scale * self.eigenvalues[l] * t);
            let col = self.eigenvectors.column(l);
            for j in 0..n {
                psi[j] += w * col[j];
            }
        }
        psi
    }

    /// Evolves an arbitrary state vector for time `t`.
    pub fn evolve_vector(&self, v: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let n = self.len();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        // Coefficients c = V^T v, then psi = V (phases .* c).
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        for l in 0..n {
            let col = self.eigenvectors.column(l);
            let mut c = Complex64::new(0.0, 0.0);
            for j in 0..n {
                c += col[j] * v[j];
            }
            coords[l] = c * cis(-self.scale * self.eigenvalues[l] * t);
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for l in 0..n {
            let col = self.eigenvectors.column(l);
            for j in 0..n {
                psi[j] += coords[l] * col[j];
            }
        }
        Ok(psi)
    }
}

/// One-shot evolution of the origin state.
pub fn dense_evolve(g: &Graph, scale: f64, t: f64) -> Result<Vec<Complex64>> {
    Ok(DenseEvolution::new(g, scale)?.state(t))
}

/// Projects a vertex-space state onto the uniform stratum superpositions:
/// `q_k = (1/sqrt(|V_k|)) sum_{i in V_k} psi_i`.
pub fn stratum_project(psi: &[Complex64], s: &Stratification) -> Result<Vec<Complex64>> {
    let total: usize = s.sizes().iter().sum();
    if psi.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: psi.len(),
        });
    }
    Ok(s.strata()
        .iter()
        .map(|stratum| {
            let sum: Complex64 = stratum.iter().map(|&v| psi[v]).sum();
            sum / (stratum.len() as f64).sqrt()
        })
        .collect())
}

/// Cross-method agreement summary for one finite graph.
#[derive(Debug, Clone, Default)]
pub struct AgreementReport {
    pub vertices: usize,
    pub strata: usize,
    /// Largest `|q_k(quadrature) - q_k(oracle)|` over strata and times.
    pub max_oracle_dev: f64,
    /// Largest within-stratum pairwise gap of dense site amplitudes.
    pub max_site_spread: f64,
    /// Largest `|psi_i - q_k / sqrt(|V_k|)|` over sites and times.
    pub max_site_dev: f64,
    /// For named families: largest gap between the extracted recurrence
    /// coefficients and the family's tabulated ones.
    pub max_coeff_dev: f64,
}

/// Compares spectral-quadrature amplitudes against the dense oracle on
/// every stratum of `g` at each time, and checks that dense amplitudes are
/// constant within each stratum.
pub fn verify_graph(g: &Graph, scale: f64, times: &[f64]) -> Result<AgreementReport> {
    let strat = crate::graph::stratify(g);
    let seq = crate::graph::extract_jacobi(g, &strat)?.with_scale(scale);
    let len = strat.strata().len();
    let measure = crate::spectral::quadrature_measure(&seq, len)?;
    let evo = DenseEvolution::new(g, scale)?;
    let mut report = AgreementReport {
        vertices: g.len(),
        strata: len,
        ..AgreementReport::default()
    };
    for &t in times {
        let psi = evo.state(t);
        let proj = stratum_project(&psi, &strat)?;
        for k in 0..len {
            let q = crate::amplitudes::amplitude_quadrature(&measure, &seq, k, t)?;
            report.max_oracle_dev = report.max_oracle_dev.max((q - proj[k]).norm());
            let cell = strat.stratum(k);
            let site = proj[k] / (cell.len() as f64).sqrt();
            for (a, &i) in cell.iter().enumerate() {
                report.max_site_dev = report.max_site_dev.max((psi[i] - site).norm());
                for &j in &cell[a + 1..] {
                    report.max_site_spread =
                        report.max_site_spread.max((psi[i] - psi[j]).norm());
                }
            }
        }
    }
    Ok(report)
}

/// [`verify_graph`] on a named family's explicit graph, with the extracted
/// recurrence coefficients cross-checked against the family table.
pub fn verify_family(spec: &crate::families::FamilySpec, times: &[f64]) -> Result<AgreementReport> {
    let g = crate::families::family_graph(spec)?;
    let table = crate::families::family_jacobi(spec)?;
    let mut report = verify_graph(&g, table.scale(), times)?;
    let strat = crate::graph::stratify(&g);
    let extracted = crate::graph::extract_jacobi(&g, &strat)?;
    for k in 1..strat.strata().len() {
        report.max_coeff_dev = report
            .max_coeff_dev
            .max((extracted.omega(k) - table.omega(k)).abs())
            .max((extracted.alpha(k) - table.alpha(k)).abs());
    }
    report.max_coeff_dev = report
        .max_coeff_dev
        .max((extracted.alpha(strat.strata().len()) - table.alpha(strat.strata().len())).abs());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::amplitude_closed_form;
    use crate::families::{family_graph, family_jacobi, FamilySpec};
    use crate::graph::{build_graph, stratify};
    use approx::assert_abs_diff_eq;

    fn norm(psi: &[Complex64]) -> f64 {
        psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn two_vertex_rotation() {
        let g = build_graph(2, &[(0, 1)], 0).unwrap();
        for t in [0.0, 0.4, 1.9, 6.0] {
            let psi = dense_evolve(&g, 1.0, t).unwrap();
            assert_abs_diff_eq!(psi[0].re, t.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(psi[0].im, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(psi[1].re, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(psi[1].im, -t.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn triangle_origin_return() {
        let g = family_graph(&FamilySpec::CompleteK { n: 3 }).unwrap();
        let t = 2.0 * std::f64::consts::PI;
        let psi = dense_evolve(&g, 0.5, t).unwrap();
        assert_abs_diff_eq!(psi[0].re, -1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(psi[0].im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn start_is_origin_and_norm_is_preserved() {
        let g = family_graph(&FamilySpec::GluedTreesG { n: 2 }).unwrap();
        let ev = DenseEvolution::new(&g, 1.0).unwrap();
        let psi0 = ev.state(0.0);
        assert_abs_diff_eq!(psi0[0].re, 1.0, epsilon = 1e-12);
        assert!(psi0[1..].iter().all(|z| z.norm() < 1e-12));
        for t in [0.3, 2.0, 17.0, 123.0] {
            assert_abs_diff_eq!(norm(&ev.state(t)), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn group_law() {
        let g = family_graph(&FamilySpec::CycleC { n: 7 }).unwrap();
        let ev = DenseEvolution::new(&g, 0.5).unwrap();
        let (t1, t2) = (1.3, 2.9);
        let two_step = ev.evolve_vector(&ev.state(t1), t2).unwrap();
        let one_step = ev.state(t1 + t2);
        for (a, b) in two_step.iter().zip(&one_step) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn stratum_projection_definition() {
        let g = family_graph(&FamilySpec::CycleC { n: 4 }).unwrap();
        let s = stratify(&g);
        let psi = dense_evolve(&g, 0.5, 1.1).unwrap();
        let q = stratum_project(&psi, &s).unwrap();
        let expect = (psi[1] + psi[3]) / 2.0_f64.sqrt();
        assert!((q[1] - expect).norm() < 1e-14);

        assert!(matches!(
            stratum_project(&psi[..3], &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn oracle_matches_printed_complete_graph_amplitudes() {
        let spec = FamilySpec::CompleteK { n: 4 };
        let g = family_graph(&spec).unwrap();
        let s = stratify(&g);
        let scale = family_jacobi(&spec).unwrap().scale();
        let psi = dense_evolve(&g, scale, 1.0).unwrap();
        let q = stratum_project(&psi, &s).unwrap();
        for k in 0..2 {
            let expect = amplitude_closed_form(&spec, k, 1.0).unwrap();
            assert!((q[k] - expect).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn per_site_amplitudes_equal_within_strata() {
        for spec in [
            FamilySpec::GluedTreesG { n: 2 },
            FamilySpec::Hypercube { n: 4 },
            FamilySpec::CompleteK { n: 6 },
        ] {
            let g = family_graph(&spec).unwrap();
            let s = stratify(&g);
            let scale = family_jacobi(&spec).unwrap().scale();
            let psi = dense_evolve(&g, scale, 2.7).unwrap();
            for stratum in s.strata() {
                let first = psi[stratum[0]];
                for &v in stratum {
                    assert!(
                        (psi[v] - first).norm() < 1e-12,
                        "{spec}: vertex {v} deviates"
                    );
                }
            }
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = family_graph(&FamilySpec::Hypercube { n: 4 }).unwrap();
        assert!(matches!(
            DenseEvolution::with_cap(&g, 1.0, 10),
            Err(Error::GraphTooLarge { n: 16, cap: 10 })
        ));
    }

    #[test]
    fn eigendecomposition_reconstructs_adjacency() {
        let g = family_graph(&FamilySpec::CycleC { n: 9 }).unwrap();
        let ev = DenseEvolution::new(&g, 1.0).unwrap();
        let n = g.len();
        // A = V diag(lambda) V^T entrywise, V orthonormal.
        let v = &ev.eigenvectors;
        let vt_v = v.transpose() * v;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(vt_v[(i, j)], expect, epsilon = 1e-10);
            }
        }
        let recon = v * DMatrix::from_diagonal(&ev.eigenvalues) * v.transpose();
        for i in 0..n {
            for j in 0..n {
                let expect = if g.neighbors(i).contains(&j) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(recon[(i, j)], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn agreement_engine_on_named_families() {
        let times = [0.1, 1.0, 5.0];
        for spec in [
            FamilySpec::CompleteK { n: 6 },
            FamilySpec::CycleC { n: 9 },
            FamilySpec::PathP { n: 7 },
            FamilySpec::GluedTreesG { n: 2 },
            FamilySpec::Hypercube { n: 4 },
            FamilySpec::VectorGraph,
        ] {
            let report = verify_family(&spec, &times).unwrap();
            assert!(report.max_oracle_dev < 1e-9, "{spec}: {report:?}");
            assert!(report.max_site_spread < 1e-12, "{spec}: {report:?}");
            assert!(report.max_site_dev < 1e-12, "{spec}: {report:?}");
            assert!(report.max_coeff_dev < 1e-9, "{spec}: {report:?}");
        }
    }

    #[test]
    fn agreement_engine_rejects_irregular_graphs() {
        // A path stratified from a non-central origin has uneven
        // out-degrees within a stratum.
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3)], 1).unwrap();
        assert!(matches!(
            verify_graph(&g, 1.0, &[1.0]),
            Err(Error::NotQDGraph { .. })
        ));
    }
}
