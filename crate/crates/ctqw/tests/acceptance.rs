//! Acceptance gate: ten numbered criteria, each a test that prints one
//! summary line and asserts its pinned tolerances.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use ctqw::{
    amplitude_closed_form, amplitude_ode, amplitude_quadrature, closed_form_measure,
    closed_moments, family_jacobi, finite_infinite_diff, fit_exponent, laguerre_asymptotic,
    moments_from_series, quadrature_measure, sigma_from_moments, stationary_phase_edge,
    verify_family, wkb_validate, AmplitudeSeries, AsymptoticForm, FamilySpec, Method,
    MomentConvention,
};

fn gamma_fn(x: f64) -> f64 {
    ctqw::special::gamma(x)
}

fn bessel(n: usize, x: f64) -> f64 {
    ctqw::special::bessel_j(n, x)
}

fn linear_grid(t1: f64, t2: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| t1 + (t2 - t1) * i as f64 / (n - 1) as f64)
        .collect()
}

fn log_grid(t1: f64, t2: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| t1 * (t2 / t1).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn series_from(
    f: impl Fn(f64) -> Complex64,
    k: usize,
    times: &[f64],
    method: Method,
) -> AmplitudeSeries {
    let values = times
        .iter()
        .map(|&t| {
            let mut row = vec![Complex64::new(0.0, 0.0); k + 1];
            row[k] = f(t);
            row
        })
        .collect();
    AmplitudeSeries {
        times: times.to_vec(),
        values,
        method,
        tail_mass: 0.0,
    }
}

/// Family matrix shared by criteria 1 and 9.
fn finite_family_matrix() -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    for n in 2..=10 {
        specs.push(FamilySpec::CompleteK { n });
    }
    for n in 3..=12 {
        specs.push(FamilySpec::CycleC { n });
    }
    for n in 2..=12 {
        specs.push(FamilySpec::PathP { n });
    }
    for n in 1..=3 {
        specs.push(FamilySpec::GluedTreesG { n });
    }
    for n in 1..=6 {
        specs.push(FamilySpec::Hypercube { n });
    }
    specs
}

const GRID_T: [f64; 4] = [0.1, 1.0, 5.0, 20.0];

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut worst_family = String::new();
    for spec in finite_family_matrix() {
        let report = verify_family(&spec, &GRID_T).expect("family verifies");
        if report.max_oracle_dev > worst {
            worst = report.max_oracle_dev;
            worst_family = spec.to_string();
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-8 && elapsed < 30.0;
    println!(
        "criterion 1: {} (max |quadrature - oracle| {worst:.3e} < 1e-8, worst at {worst_family}, {elapsed:.2} s < 30 s)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(worst < 1e-8, "worst deviation {worst:.3e} at {worst_family}");
    assert!(elapsed < 30.0, "runtime {elapsed:.2} s");
}

#[test]
fn criterion_02_closed_form_catalog() {
    // Families with printed amplitude formulas, with the stratum list the
    // formulas cover (None = every stratum, capped at 8 for infinite
    // recurrences).
    let cases: Vec<(FamilySpec, Option<Vec<usize>>)> = vec![
        (FamilySpec::CompleteK { n: 5 }, None),
        (FamilySpec::CompleteK { n: 2 }, None),
        (FamilySpec::CycleC { n: 6 }, Some(vec![0])),
        (FamilySpec::CycleC { n: 7 }, Some(vec![0])),
        (FamilySpec::PathP { n: 5 }, None),
        (FamilySpec::PathP { n: 8 }, None),
        (FamilySpec::GluedTreesG { n: 1 }, None),
        (FamilySpec::GluedTreesG { n: 2 }, None),
        (FamilySpec::GluedTreesG { n: 3 }, None),
        (FamilySpec::Hypercube { n: 4 }, None),
        (FamilySpec::Hypercube { n: 6 }, None),
        (FamilySpec::Line, None),
        (
            FamilySpec::Tchebichef1 {
                m: 2.0,
                n: Some(6),
            },
            None,
        ),
        (FamilySpec::Tchebichef1 { m: 2.0, n: None }, None),
        (
            FamilySpec::Tchebichef2 {
                m: 1.0,
                n: Some(5),
            },
            None,
        ),
        (FamilySpec::Tchebichef2 { m: 1.5, n: None }, None),
        (FamilySpec::HermiteFinite { n: 3 }, None),
        (FamilySpec::HermiteInfinite, None),
        (FamilySpec::Laguerre { a: 1.0, gamma: 0.0 }, None),
        (FamilySpec::Laguerre { a: 0.5, gamma: 1.5 }, None),
        (FamilySpec::Comb2D, None),
        (FamilySpec::VectorGraph, Some(vec![0])),
        (FamilySpec::AngularMomentum { n: 2 }, Some(vec![0])),
        (FamilySpec::AngularMomentum { n: 3 }, Some(vec![0])),
    ];
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    for (spec, ks) in cases {
        let seq = family_jacobi(&spec).expect("family coefficients");
        let measure = match closed_form_measure(&spec) {
            Ok(m) => m,
            Err(_) => {
                let len = seq.strata_len().expect("finite fallback");
                quadrature_measure(&seq, len).expect("quadrature measure")
            }
        };
        let ks = ks.unwrap_or_else(|| match seq.strata_len() {
            Some(len) => (0..len).collect(),
            None => (0..=8).collect(),
        });
        for &k in &ks {
            for &t in &GRID_T {
                let closed = amplitude_closed_form(&spec, k, t).expect("printed formula");
                let quad = amplitude_quadrature(&measure, &seq, k, t).expect("quadrature");
                let dev = (closed - quad).norm();
                if dev > worst {
                    worst = dev;
                    worst_at = format!("{spec} k={k} t={t}");
                }
            }
        }
    }
    let pass = worst < 1e-8;
    println!(
        "criterion 2: {} (max |closed - quadrature| {worst:.3e} < 1e-8, worst at {worst_at})",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "worst deviation {worst:.3e} at {worst_at}");
}

#[test]
fn criterion_03_infinite_line_ode_vs_bessel() {
    let seq = family_jacobi(&FamilySpec::Line).unwrap();
    let times: Vec<f64> = (0..=100).map(|i| 0.5 * i as f64).collect();
    let series = amplitude_ode(&seq, 200, &times).expect("line ODE");
    let mut worst = 0.0_f64;
    for (i, &t) in times.iter().enumerate() {
        for k in [0usize, 1, 2, 3, 5, 10, 20] {
            let expect = if k == 0 {
                Complex64::new(bessel(0, t), 0.0)
            } else {
                // sqrt(2) (-i)^k J_k(t): the amplitude carries the
                // conjugated phase of the evolution e^{-iAt}.
                2.0_f64.sqrt() * ctqw::special::neg_i_pow(k) * bessel(k, t)
            };
            worst = worst.max((series.values[i][k] - expect).norm());
        }
    }
    let pass = worst < 1e-6;
    println!(
        "criterion 3: {} (line ODE vs Bessel forms, truncation 200, t <= 50, max dev {worst:.3e} < 1e-6)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "worst deviation {worst:.3e}");
}

#[test]
fn criterion_04_hermite_poisson_law() {
    let spec = FamilySpec::HermiteInfinite;
    // Closed form: |q_k|^2 is exactly Poisson with rate t^2.
    let mut worst_closed = 0.0_f64;
    for &t in &[0.3, 1.0, 2.5, 7.0, 10.0] {
        let mut log_fact = 0.0;
        for k in 0..=30usize {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            let q = amplitude_closed_form(&spec, k, t).unwrap();
            let expect = (2.0 * (k as f64) * t.ln() - t * t - log_fact).exp();
            let rel = (q.norm_sqr() - expect).abs() / expect.max(1e-300);
            worst_closed = worst_closed.max(rel);
        }
    }
    // ODE against the closed form.
    let seq = family_jacobi(&spec).unwrap();
    let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let series = amplitude_ode(&seq, 400, &times).expect("hermite ODE");
    let mut worst_ode = 0.0_f64;
    for (i, &t) in times.iter().enumerate() {
        for k in (0..=12).chain([20, 50]) {
            let closed = amplitude_closed_form(&spec, k, t).unwrap();
            worst_ode = worst_ode.max((series.values[i][k] - closed).norm());
        }
    }
    let pass = worst_closed < 1e-12 && worst_ode < 1e-6;
    println!(
        "criterion 4: {} (Poisson law exact to rel {worst_closed:.3e} < 1e-12; ODE dev {worst_ode:.3e} < 1e-6 for t <= 10, truncation 400)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(worst_closed < 1e-12, "closed-form law off by {worst_closed:.3e}");
    assert!(worst_ode < 1e-6, "ODE deviation {worst_ode:.3e}");
}

#[test]
fn criterion_05_laguerre_inverse_time_decay() {
    let spec = FamilySpec::Laguerre { a: 1.0, gamma: 0.0 };
    let times = log_grid(100.0, 1000.0, 300);
    let series = series_from(
        |t| amplitude_closed_form(&spec, 0, t).unwrap(),
        0,
        &times,
        Method::ClosedForm,
    );
    let form = laguerre_asymptotic(1.0, 0.0, 0).unwrap();
    let report = wkb_validate(&series, 0, &form, (100.0, 1000.0)).unwrap();
    let pass = (report.fitted_exponent - 1.0).abs() <= 0.01;
    println!(
        "criterion 5: {} (fitted modulus exponent -{:.4} = -1.00 +- 0.01 over t in [100, 1000])",
        if pass { "PASS" } else { "FAIL" },
        report.fitted_exponent,
    );
    assert!(pass, "fitted exponent {:.4}", report.fitted_exponent);
}

#[test]
fn criterion_06_moment_universality() {
    // Hermite width is exactly t from the closed moments.
    let hermite = FamilySpec::HermiteInfinite;
    let mut worst_sigma = 0.0_f64;
    for &t in &[0.3, 1.0, 3.7, 10.0] {
        let m1 = closed_moments(&hermite, 1, t).unwrap();
        let m2 = closed_moments(&hermite, 2, t).unwrap();
        let sigma = sigma_from_moments(m1, m2);
        worst_sigma = worst_sigma.max((sigma - t).abs() / t);
    }

    let fit_over = |pairs: &[(f64, f64)]| fit_exponent(pairs).unwrap().exponent;

    let hermite_nu = {
        let pairs: Vec<(f64, f64)> = log_grid(0.5, 10.0, 40)
            .into_iter()
            .map(|t| {
                let m1 = closed_moments(&hermite, 1, t).unwrap();
                let m2 = closed_moments(&hermite, 2, t).unwrap();
                (t, sigma_from_moments(m1, m2))
            })
            .collect();
        fit_over(&pairs)
    };

    let line_nu = {
        let spec = FamilySpec::Line;
        let times = log_grid(1.5, 20.0, 40);
        let k_max = 64;
        let values: Vec<Vec<Complex64>> = times
            .iter()
            .map(|&t| {
                (0..=k_max)
                    .map(|k| amplitude_closed_form(&spec, k, t).unwrap())
                    .collect()
            })
            .collect();
        let series = AmplitudeSeries {
            times: times.clone(),
            values,
            method: Method::ClosedForm,
            tail_mass: 0.0,
        };
        let m1 = moments_from_series(&series, 1, MomentConvention::SignedLine).unwrap();
        let m2 = moments_from_series(&series, 2, MomentConvention::SignedLine).unwrap();
        let pairs: Vec<(f64, f64)> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, sigma_from_moments(m1[i], m2[i])))
            .collect();
        fit_over(&pairs)
    };

    let laguerre_nu = {
        let spec = FamilySpec::Laguerre { a: 1.0, gamma: 0.0 };
        let pairs: Vec<(f64, f64)> = log_grid(5.0, 200.0, 40)
            .into_iter()
            .map(|t| {
                let m1 = closed_moments(&spec, 1, t).unwrap();
                let m2 = closed_moments(&spec, 2, t).unwrap();
                (t, sigma_from_moments(m1, m2))
            })
            .collect();
        fit_over(&pairs)
    };

    let pass = worst_sigma < 1e-12
        && (hermite_nu - 1.0).abs() <= 0.01
        && (line_nu - 1.0).abs() <= 0.02
        && (laguerre_nu - 2.0).abs() <= 0.02;
    println!(
        "criterion 6: {} (Hermite sigma = t exact to rel {worst_sigma:.3e}; nu fits: Hermite {hermite_nu:.4} = 1.00 +- 0.01, line {line_nu:.4} = 1.00 +- 0.02, Laguerre {laguerre_nu:.4} = 2.00 +- 0.02)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(worst_sigma < 1e-12);
    assert!((hermite_nu - 1.0).abs() <= 0.01, "{hermite_nu}");
    assert!((line_nu - 1.0).abs() <= 0.02, "{line_nu}");
    assert!((laguerre_nu - 2.0).abs() <= 0.02, "{laguerre_nu}");
}

#[test]
fn criterion_07_interchange_error_threshold() {
    let sup = |n: usize| {
        (0..=2000)
            .map(|j| finite_infinite_diff(n, 0.5 * j as f64))
            .fold(0.0_f64, f64::max)
    };
    let high = sup(600);
    let low = sup(300);
    let pass = high < 1e-3 && low >= 1e-2;
    println!(
        "criterion 7: {} (sup pi(600,t) = {high:.3e} < 1e-3; sup pi(300,t) = {low:.3e} >= 1e-2; t in [0, 1000])",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(high < 1e-3, "{high:.3e}");
    assert!(low >= 1e-2, "{low:.3e}");
}

#[test]
fn criterion_08_wkb_envelopes() {
    // Comb: the printed leading form sqrt(2 sqrt(2) / (pi t))
    // cos(t/sqrt(2) - pi/4) must hold within 5% for t >= 50.
    let comb = FamilySpec::Comb2D;
    let comb_seq = family_jacobi(&comb).unwrap();
    let comb_measure = closed_form_measure(&comb).unwrap();
    let comb_form = stationary_phase_edge(&comb_measure, comb_seq.scale()).unwrap();
    let c_comb_printed = (2.0 * 2.0_f64.sqrt() / PI).sqrt();
    let comb_times = linear_grid(50.0, 500.0, 2200);
    let comb_series = series_from(
        |t| amplitude_closed_form(&comb, 0, t).unwrap(),
        0,
        &comb_times,
        Method::ClosedForm,
    );
    let comb_report = wkb_validate(&comb_series, 0, &comb_form, (50.0, 500.0)).unwrap();
    let comb_coeff_rel = (comb_report.fitted_coeff - c_comb_printed).abs() / c_comb_printed;
    let comb_point_rel = comb_report.max_coeff_error / c_comb_printed;
    let comb_exp_ok = (comb_report.fitted_exponent - 0.5).abs() <= 0.02;
    let comb_ok = comb_coeff_rel <= 0.05
        && comb_point_rel <= 0.05
        && comb_exp_ok
        && (comb_form.amplitude_coeff - c_comb_printed).abs() <= 1e-9;

    // Star lattice: the printed leading form claims
    // (4 N Gamma(3/2) / (pi (N-2)^2)) t^(-1/2); measure the actual
    // envelope and report the mismatch, then validate the corrected
    // band-edge tail (exponent 3/2, coefficient halved) on the
    // absolutely continuous part alone.
    let mut star_lines = Vec::new();
    let mut star_ok = true;
    for n in [3usize, 4, 5] {
        let spec = FamilySpec::StarLattice { n };
        let seq = family_jacobi(&spec).unwrap();
        let measure = closed_form_measure(&spec).unwrap();
        let nf = n as f64;
        let c_printed = 4.0 * nf * gamma_fn(1.5) / (PI * (nf - 2.0).powi(2));
        let printed_form = AsymptoticForm {
            amplitude_coeff: c_printed,
            decay_exponent: 0.5,
            frequency: 2.0 * seq.scale(),
            phase_offset: 3.0 * PI / 4.0,
            oscillatory: true,
        };

        let times = linear_grid(50.0, 200.0, 800);
        let full = series_from(
            |t| amplitude_quadrature(&measure, &seq, 0, t).unwrap(),
            0,
            &times,
            Method::Quadrature,
        );
        let full_report = wkb_validate(&full, 0, &printed_form, (50.0, 200.0)).unwrap();
        let atom_amp = (nf - 2.0) / (nf - 1.0);
        let flat = full_report.fitted_exponent.abs() <= 0.05;
        let at_atom_level = (full_report.fitted_coeff - atom_amp).abs() <= 0.05 * atom_amp;
        let printed_matches = (full_report.fitted_exponent - 0.5).abs() <= 0.02
            && (full_report.fitted_coeff - c_printed).abs() <= 0.05 * c_printed;

        // Corrected form from the band edge of the continuous part. The
        // density's poles sit just outside the band (nearest for N=3), so
        // the tail carries 1/t corrections; fit on a later window where
        // the leading order dominates.
        let corrected = stationary_phase_edge(&measure, seq.scale()).unwrap();
        let ac_measure = measure.continuous_part().unwrap();
        let ac_times = linear_grid(400.0, 850.0, 2300);
        let ac = series_from(
            |t| amplitude_quadrature(&ac_measure, &seq, 0, t).unwrap(),
            0,
            &ac_times,
            Method::Quadrature,
        );
        let ac_report = wkb_validate(&ac, 0, &corrected, (400.0, 850.0)).unwrap();
        let ac_exp_ok = (ac_report.fitted_exponent - 1.5).abs() <= 0.05;
        let ac_coeff_rel =
            (ac_report.fitted_coeff - corrected.amplitude_coeff).abs() / corrected.amplitude_coeff;

        star_ok &= flat && at_atom_level && !printed_matches && ac_exp_ok && ac_coeff_rel <= 0.05;
        star_lines.push(format!(
            "star N={n}: printed C={c_printed:.4} t^-0.5 MISMATCH (envelope flat at {:.4} ~ (N-2)/(N-1) = {atom_amp:.4}, fitted exponent {:.4}); continuous part fits t^-{:.3} with C {:.4} vs corrected {:.4} (half the printed coefficient, exponent 3/2)",
            full_report.fitted_coeff,
            full_report.fitted_exponent,
            ac_report.fitted_exponent,
            ac_report.fitted_coeff,
            corrected.amplitude_coeff,
        ));
    }

    let pass = comb_ok && star_ok;
    println!(
        "criterion 8: {} (comb envelope within {:.2}% of printed, exponent {:.4} = 0.50 +- 0.02; star mismatches reported below)",
        if pass { "PASS" } else { "FAIL" },
        100.0 * comb_coeff_rel.max(comb_point_rel),
        comb_report.fitted_exponent,
    );
    for line in &star_lines {
        println!("criterion 8: {line}");
    }
    assert!(comb_ok, "comb: coeff rel {comb_coeff_rel:.4}, pointwise rel {comb_point_rel:.4}, exponent {:.4}", comb_report.fitted_exponent);
    assert!(star_ok, "{star_lines:?}");
}

#[test]
fn criterion_09_stratum_site_equality() {
    let mut specs = finite_family_matrix();
    specs.push(FamilySpec::VectorGraph);
    let mut worst_spread = 0.0_f64;
    let mut worst_site = 0.0_f64;
    for spec in specs {
        let report = verify_family(&spec, &GRID_T).expect("family verifies");
        worst_spread = worst_spread.max(report.max_site_spread);
        worst_site = worst_site.max(report.max_site_dev);
    }
    let pass = worst_spread < 1e-12 && worst_site < 1e-12;
    println!(
        "criterion 9: {} (within-stratum spread {worst_spread:.3e} < 1e-12; site vs q_k/sqrt(|V_k|) {worst_site:.3e} < 1e-12)",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(worst_spread < 1e-12, "{worst_spread:.3e}");
    assert!(worst_site < 1e-12, "{worst_site:.3e}");
}

#[test]
fn criterion_10_quadrature_exactness_order_30() {
    let families: Vec<FamilySpec> = vec![
        FamilySpec::Charlier { a: 1.3, d: 0.8 },
        FamilySpec::Meixner2 {
            a: 0.9,
            delta: 0.6,
            eta: 0.4,
        },
        FamilySpec::EllipticA { a: 0.8, k: 0.6 },
        FamilySpec::EllipticB { a: 0.8, k: 0.6 },
        FamilySpec::EllipticC { k: 0.6 },
        FamilySpec::EllipticD { k: 0.6 },
        FamilySpec::CarlitzF { a: 0.7, k: 0.5 },
        FamilySpec::CarlitzG { a: 0.7, k: 0.5 },
        FamilySpec::CarlitzGstar { a: 0.7, k: 0.5 },
    ];
    let order = 30;
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    for spec in families {
        let seq = family_jacobi(&spec).expect("coefficients");
        let measure = quadrature_measure(&seq, order).expect("order-30 quadrature");
        let atoms = measure.atom_pairs();
        for m in 0..=(2 * order - 1) {
            let truth = ctqw::jacobi_moment(&seq, m);
            let quad: f64 = atoms.iter().map(|&(x, w)| w * x.powi(m as i32)).sum();
            // Odd moments of symmetric measures are exactly zero; normalize
            // by the absolute moment so the target stays meaningful.
            let abs_moment: f64 = atoms.iter().map(|&(x, w)| w * x.abs().powi(m as i32)).sum();
            let rel = (quad - truth).abs() / truth.abs().max(abs_moment);
            if rel > worst {
                worst = rel;
                worst_at = format!("{spec} m={m}");
            }
        }
    }
    let pass = worst < 1e-10;
    println!(
        "criterion 10: {} (order-30 quadrature integrates x^m, m <= 59, max rel err {worst:.3e} < 1e-10, worst at {worst_at})",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "worst relative error {worst:.3e} at {worst_at}");
}
