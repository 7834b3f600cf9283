//! Continuous-time quantum walks on distance-regular-like graphs via
//! spectral measures of tridiagonal operators.

// `!(x > 0.0)` guards reject NaN, which `x <= 0.0` would accept; indexed
// loops in the numeric kernels walk several structures in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
//!
//! The pipeline: build a graph, stratify it around an origin, reduce the
//! adjacency operator to a three-term recurrence, turn the recurrence into
//! a spectral measure (discrete quadrature, closed-form density, or a
//! mixture), and integrate oscillatory transforms of that measure to obtain
//! walk amplitudes, their long-time asymptotics, and moment growth laws.

pub mod amplitudes;
pub mod asymptotics;
mod dd;
pub mod error;
pub mod families;
pub mod graph;
pub mod integrate;
pub mod moments;
pub mod oracle;
pub mod special;
pub mod spectral;

pub use amplitudes::{
    amplitude_closed_form, amplitude_ode, amplitude_quadrature, amplitude_series_finite,
    avg_probability, eval_poly, orthonormal_row, product_amplitude, site_amplitude,
    AmplitudeSeries, Method,
};
pub use asymptotics::{
    finite_infinite_diff, laguerre_asymptotic, stationary_phase_edge, wkb_validate,
    AsymptoticForm, WkbReport,
};
pub use error::{DegreeKind, Error, Result};
pub use families::{
    closed_form_measure, family_graph, family_jacobi, product_jacobi_class_a,
    product_jacobi_class_b, FamilySpec,
};
pub use graph::{
    adjacency_csv, apply_adjacency, build_graph, extract_jacobi, graph_from_json, stratify, Graph,
    JacobiSeq, Stratification,
};
pub use integrate::{integrate_complex, integrate_real, oscillation_cells, QuadratureOptions};
pub use moments::{
    closed_moments, fit_exponent, moment_report, moments_from_series, sigma_from_moments,
    ExponentFit, MomentConvention, MomentReport, MOMENT_TAIL_BUDGET,
};
pub use oracle::{
    dense_evolve, stratum_project, verify_family, verify_graph, AgreementReport, DenseEvolution,
};
pub use spectral::{
    jacobi_moment, jacobi_to_quadrature, quadrature_measure, stieltjes_cf, stieltjes_inversion,
    SpectralMeasure,
};
