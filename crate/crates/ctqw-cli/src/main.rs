//! Command-line front end: amplitudes, spectral measures, moments,
//! asymptotics, and oracle verification for walk families or graph files.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 graph fails the
//! stratification regularity check, 4 numerical failure. Errors print one
//! JSON line on standard error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ctqw::{
    amplitude_closed_form, amplitude_ode, amplitude_quadrature, amplitude_series_finite,
    closed_form_measure, closed_moments, extract_jacobi, family_jacobi, fit_exponent,
    graph_from_json, laguerre_asymptotic, moment_report, quadrature_measure,
    stationary_phase_edge, stratify, verify_family, verify_graph, wkb_validate, AmplitudeSeries,
    AsymptoticForm, FamilySpec, JacobiSeq, Method, MomentConvention, SpectralMeasure,
};
use output::{csv_table, fmt_f64, json_envelope, json_string, par_map, write_out};

#[derive(Parser)]
#[command(
    name = "ctqw",
    version,
    about = "continuous-time quantum walk amplitudes on stratified graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Walk amplitudes q_k(t) over a time grid.
    Amplitudes(AmplitudesCmd),
    /// Spectral-measure export: quadrature nodes/weights or sampled density.
    Measure(MeasureCmd),
    /// Position moments, widths, and the spreading exponent.
    Moments(MomentsCmd),
    /// Large-time asymptotic forms, validation reports, and the
    /// finite-order interchange-error table.
    Asymptotics(AsymptoticsCmd),
    /// Dense-oracle agreement check for a finite family or graph file.
    Verify(VerifyCmd),
    /// List the named coefficient families and their parameters.
    ListFamilies,
}

#[derive(Args)]
struct SourceArgs {
    /// Named family, e.g. cycle:n=7 or laguerre:a=1,gamma=0.
    #[arg(long, conflicts_with = "graph")]
    family: Option<String>,
    /// Graph JSON file {"n":int,"edges":[[i,j],...],"origin":int}.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Evolution scale for graph files (named families carry their own).
    #[arg(long, requires = "graph")]
    scale: Option<f64>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file (atomic write); stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Quadrature,
    Ode,
    ClosedForm,
}

#[derive(Args)]
struct AmplitudesCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Time grid start:end:steps (inclusive) or a comma list.
    #[arg(long)]
    t: String,
    /// Highest stratum index to emit (default: last stratum, or 8 when
    /// the recurrence is infinite).
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    method: MethodArg,
    /// Quadrature order override (defaults to the stratum count, or
    /// max(64, ceil(4 t_max)) for infinite recurrences without an exact
    /// measure).
    #[arg(long)]
    order: Option<usize>,
    /// Truncation depth for the ODE method on infinite recurrences.
    #[arg(long)]
    truncation: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MeasureCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Export the discrete quadrature measure of this order.
    #[arg(long)]
    order: Option<usize>,
    /// Sample the continuous density at this many interior points instead
    /// of exporting nodes and weights.
    #[arg(long, conflicts_with = "order")]
    density: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct MomentsCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Time grid start:end:steps (inclusive) or a comma list.
    #[arg(long)]
    t: String,
    /// series: sum k^q |q_k|^2 from computed amplitudes; closed-form:
    /// counting-law moments (Hermite, Laguerre, line only).
    #[arg(long, value_enum, default_value_t = MomentMethodArg::Series)]
    method: MomentMethodArg,
    /// Truncation depth for infinite recurrences (raise until the tail
    /// check passes).
    #[arg(long)]
    truncation: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MomentMethodArg {
    Series,
    ClosedForm,
}

#[derive(Args)]
struct AsymptoticsCmd {
    /// Named family (asymptotic forms need a density description).
    #[arg(long)]
    family: String,
    /// Emit the interchange-error table sup_{t<=T} pi(n,t) (line only).
    #[arg(long)]
    pi_table: bool,
    /// Order grid start:end:step (inclusive) or comma list, for the table.
    #[arg(long)]
    n: Option<String>,
    /// Time horizon T for the table.
    #[arg(long)]
    t: Option<f64>,
    /// Validation window t1:t2.
    #[arg(long, default_value = "50:500")]
    window: String,
    /// Log-spaced sample count across the window (default: enough for
    /// eight samples per oscillation arch).
    #[arg(long)]
    points: Option<usize>,
    /// Stratum index to validate.
    #[arg(long, default_value_t = 0)]
    stratum: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    source: SourceArgs,
    /// Comparison times (comma list or start:end:steps).
    #[arg(long, default_value = "0.1,1,5,20")]
    t: String,
    /// Largest allowed |quadrature - oracle| deviation.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Usage(String),
    NotQd(ctqw::Error),
    Numeric(ctqw::Error),
    Io(std::io::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotQd(_) => 3,
            Failure::Numeric(_) | Failure::Io(_) => 4,
        }
    }

    fn json(&self) -> String {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::NotQd(e) => ("not_qd_graph", e.to_string()),
            Failure::Numeric(e) => ("numerical", e.to_string()),
            Failure::Io(e) => ("io", e.to_string()),
        };
        format!(
            "{{\"error\":{},\"message\":{}}}",
            json_string(kind),
            json_string(&message)
        )
    }
}

/// Errors raised while assembling the run configuration.
fn setup(e: ctqw::Error) -> Failure {
    match e {
        ctqw::Error::NotQDGraph { .. } => Failure::NotQd(e),
        other => Failure::Usage(other.to_string()),
    }
}

/// Errors raised while computing.
fn compute(e: ctqw::Error) -> Failure {
    match e {
        ctqw::Error::NotQDGraph { .. } => Failure::NotQd(e),
        other => Failure::Numeric(other),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!(
                "{{\"error\":\"usage\",\"message\":{}}}",
                json_string(&e.to_string())
            );
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.json());
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Amplitudes(c) => run_amplitudes(c),
        Cmd::Measure(c) => run_measure(c),
        Cmd::Moments(c) => run_moments(c),
        Cmd::Asymptotics(c) => run_asymptotics(c),
        Cmd::Verify(c) => run_verify(c),
        Cmd::ListFamilies => run_list_families(),
    }
}

struct Source {
    /// Family kind, or "graph" for file inputs.
    family: String,
    /// Canonical parameter string, or the file path for graph inputs.
    params: String,
    spec: Option<FamilySpec>,
    seq: JacobiSeq,
}

fn resolve_source(args: &SourceArgs) -> Result<Source, Failure> {
    match (&args.family, &args.graph) {
        (Some(f), None) => {
            let spec: FamilySpec = f.parse().map_err(setup)?;
            let seq = family_jacobi(&spec).map_err(setup)?;
            let canonical = spec.to_string();
            let (family, params) = match canonical.split_once(':') {
                Some((k, p)) => (k.to_string(), p.to_string()),
                None => (canonical, String::new()),
            };
            Ok(Source {
                family,
                params,
                spec: Some(spec),
                seq,
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("graph file {}: {e}", path.display())))?;
            let g = graph_from_json(&text).map_err(setup)?;
            let strat = stratify(&g);
            let seq = extract_jacobi(&g, &strat)
                .map_err(setup)?
                .with_scale(args.scale.unwrap_or(1.0));
            Ok(Source {
                family: "graph".into(),
                params: path.display().to_string(),
                spec: None,
                seq,
            })
        }
        _ => Err(Failure::Usage(
            "exactly one of --family or --graph is required".into(),
        )),
    }
}

/// Inclusive linear grid `start:end:steps`, or a comma list. Times must be
/// nonnegative and ascending.
fn parse_time_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |msg: &str| Failure::Usage(format!("time grid {s:?}: {msg}"));
    let times = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:steps"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let end: f64 = parts[1].parse().map_err(|_| bad("bad end"))?;
        let steps: usize = parts[2].parse().map_err(|_| bad("bad steps"))?;
        if !(start >= 0.0) || !(end > start) || steps < 1 {
            return Err(bad("needs end > start >= 0 and steps >= 1"));
        }
        if steps == 1 {
            vec![start]
        } else {
            (0..steps)
                .map(|i| start + (end - start) * i as f64 / (steps - 1) as f64)
                .collect()
        }
    } else {
        let mut out = Vec::new();
        for tok in s.split(',') {
            let t: f64 = tok.trim().parse().map_err(|_| bad("bad entry"))?;
            out.push(t);
        }
        out
    };
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(bad("times must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("times must be strictly ascending"));
    }
    Ok(times)
}

/// Inclusive stepped integer grid `start:end:step`, or a comma list.
fn parse_order_grid(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = |msg: &str| Failure::Usage(format!("order grid {s:?}: {msg}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:step"));
        }
        let start: usize = parts[0].parse().map_err(|_| bad("bad start"))?;
        let end: usize = parts[1].parse().map_err(|_| bad("bad end"))?;
        let step: usize = parts[2].parse().map_err(|_| bad("bad step"))?;
        if start < 1 || end < start || step < 1 {
            return Err(bad("needs 1 <= start <= end and step >= 1"));
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        let mut out = Vec::new();
        for tok in s.split(',') {
            let n: usize = tok.trim().parse().map_err(|_| bad("bad entry"))?;
            if n < 1 {
                return Err(bad("orders must be at least 1"));
            }
            out.push(n);
        }
        if out.is_empty() {
            return Err(bad("empty"));
        }
        Ok(out)
    }
}

fn default_depth(seq: &JacobiSeq, t_max: f64) -> usize {
    match seq.strata_len() {
        Some(len) => len.saturating_sub(1),
        None => 64.max((4.0 * t_max).ceil() as usize),
    }
}

fn pick_measure(
    source: &Source,
    order: Option<usize>,
    t_max: f64,
) -> Result<SpectralMeasure, Failure> {
    if let Some(o) = order {
        return quadrature_measure(&source.seq, o).map_err(compute);
    }
    if let Some(spec) = &source.spec {
        match closed_form_measure(spec) {
            Ok(m) => return Ok(m),
            Err(ctqw::Error::NoClosedFormMeasure(_)) => {}
            Err(e) => return Err(compute(e)),
        }
    }
    let order = match source.seq.strata_len() {
        Some(len) => len,
        None => 64.max((4.0 * t_max).ceil() as usize),
    };
    quadrature_measure(&source.seq, order).map_err(compute)
}

fn run_amplitudes(c: AmplitudesCmd) -> Result<(), Failure> {
    let source = resolve_source(&c.source)?;
    let times = parse_time_grid(&c.t)?;
    let t_max = *times.last().expect("grid nonempty");
    let k_max = c.kmax.unwrap_or_else(|| match source.seq.strata_len() {
        Some(len) => len - 1,
        None => 8,
    });

    let series: AmplitudeSeries = match c.method {
        MethodArg::Quadrature => {
            let measure = pick_measure(&source, c.order, t_max)?;
            let rows = par_map(times.len(), |i| -> ctqw::Result<Vec<Complex64>> {
                (0..=k_max)
                    .map(|k| amplitude_quadrature(&measure, &source.seq, k, times[i]))
                    .collect()
            });
            let values = rows
                .into_iter()
                .collect::<ctqw::Result<Vec<_>>>()
                .map_err(compute)?;
            AmplitudeSeries {
                times: times.clone(),
                values,
                method: Method::Quadrature,
                tail_mass: 0.0,
            }
        }
        MethodArg::Ode => {
            let depth = c
                .truncation
                .unwrap_or_else(|| default_depth(&source.seq, t_max));
            let series = amplitude_ode(&source.seq, depth, &times).map_err(compute)?;
            let have = series.values.first().map(|r| r.len()).unwrap_or(0);
            if k_max + 1 > have {
                return Err(compute(ctqw::Error::TruncationTooLarge {
                    order: k_max + 1,
                    len: have,
                }));
            }
            series
        }
        MethodArg::ClosedForm => {
            let spec = source.spec.as_ref().ok_or_else(|| {
                Failure::Usage("the closed-form method needs --family".into())
            })?;
            let rows = par_map(times.len(), |i| -> ctqw::Result<Vec<Complex64>> {
                (0..=k_max)
                    .map(|k| amplitude_closed_form(spec, k, times[i]))
                    .collect()
            });
            let values = rows
                .into_iter()
                .collect::<ctqw::Result<Vec<_>>>()
                .map_err(compute)?;
            AmplitudeSeries {
                times: times.clone(),
                values,
                method: Method::ClosedForm,
                tail_mass: 0.0,
            }
        }
    };

    let mut rows = Vec::with_capacity(times.len() * (k_max + 1));
    for (i, &t) in series.times.iter().enumerate() {
        for k in 0..=k_max {
            let q = series.values[i][k];
            rows.push(vec![
                fmt_f64(t),
                k.to_string(),
                fmt_f64(q.re),
                fmt_f64(q.im),
                fmt_f64(q.norm_sqr()),
            ]);
        }
    }
    let columns = ["t", "k", "re", "im", "prob"];
    let method = series.method.to_string();
    emit_table(&c.out, &source, &method, &columns, &rows)
}

fn run_measure(c: MeasureCmd) -> Result<(), Failure> {
    let source = resolve_source(&c.source)?;
    if let Some(npts) = c.density {
        if npts < 1 {
            return Err(Failure::Usage("--density needs at least one point".into()));
        }
        let spec = source
            .spec
            .as_ref()
            .ok_or_else(|| Failure::Usage("--density needs --family".into()))?;
        let measure = closed_form_measure(spec).map_err(compute)?;
        let (density, (lo, hi), _) = measure.absolutely_continuous().ok_or_else(|| {
            compute(ctqw::Error::ParameterOutOfDomain(
                "measure has no continuous part".into(),
            ))
        })?;
        let rows: Vec<Vec<String>> = (0..npts)
            .map(|i| {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / npts as f64;
                vec![fmt_f64(x), fmt_f64(density(x))]
            })
            .collect();
        return emit_table(&c.out, &source, "density", &["x", "density"], &rows);
    }

    let measure = match (&source.spec, c.order) {
        (_, Some(o)) => quadrature_measure(&source.seq, o).map_err(compute)?,
        (Some(spec), None) => match closed_form_measure(spec) {
            Ok(m @ SpectralMeasure::Discrete { .. }) => m,
            _ => quadrature_measure(&source.seq, default_quadrature_order(&source.seq))
                .map_err(compute)?,
        },
        (None, None) => quadrature_measure(&source.seq, default_quadrature_order(&source.seq))
            .map_err(compute)?,
    };
    let rows: Vec<Vec<String>> = measure
        .atom_pairs()
        .iter()
        .map(|&(x, w)| vec![fmt_f64(x), fmt_f64(w)])
        .collect();
    emit_table(&c.out, &source, "quadrature", &["node", "weight"], &rows)
}

fn default_quadrature_order(seq: &JacobiSeq) -> usize {
    seq.strata_len().unwrap_or(64)
}

fn run_moments(c: MomentsCmd) -> Result<(), Failure> {
    let source = resolve_source(&c.source)?;
    let times = parse_time_grid(&c.t)?;
    let t_max = *times.last().expect("grid nonempty");
    let convention = match source.spec {
        Some(FamilySpec::Line) => MomentConvention::SignedLine,
        _ => MomentConvention::Stratum,
    };

    let (method_name, report) = match c.method {
        MomentMethodArg::Series => {
            let series = match source.seq.strata_len() {
                Some(_) => amplitude_series_finite(&source.seq, &times).map_err(compute)?,
                None => {
                    let depth = c
                        .truncation
                        .unwrap_or_else(|| default_depth(&source.seq, t_max));
                    amplitude_ode(&source.seq, depth, &times).map_err(compute)?
                }
            };
            let report = moment_report(&series, convention).map_err(compute)?;
            (series.method.to_string(), report)
        }
        MomentMethodArg::ClosedForm => {
            let spec = source.spec.as_ref().ok_or_else(|| {
                Failure::Usage("the closed-form method needs --family".into())
            })?;
            let mut mean = Vec::with_capacity(times.len());
            let mut second = Vec::with_capacity(times.len());
            let mut sigma = Vec::with_capacity(times.len());
            for &t in &times {
                let m1 = closed_moments(spec, 1, t).map_err(compute)?;
                let m2 = closed_moments(spec, 2, t).map_err(compute)?;
                mean.push(m1);
                second.push(m2);
                sigma.push(ctqw::sigma_from_moments(m1, m2));
            }
            let pairs: Vec<(f64, f64)> =
                times.iter().copied().zip(sigma.iter().copied()).collect();
            let nu = fit_exponent(&pairs).ok();
            (
                Method::ClosedForm.to_string(),
                ctqw::MomentReport {
                    times: times.clone(),
                    mean,
                    second,
                    sigma,
                    nu,
                },
            )
        }
    };

    match c.out.format {
        FormatArg::Csv => {
            let rows: Vec<Vec<String>> = report
                .times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    vec![
                        fmt_f64(t),
                        fmt_f64(report.mean[i]),
                        fmt_f64(report.second[i]),
                        fmt_f64(report.sigma[i]),
                    ]
                })
                .collect();
            let text = csv_table(&["t", "moment_q1", "moment_q2", "sigma"], &rows);
            write_out(c.out.output.as_deref(), &text).map_err(Failure::Io)
        }
        FormatArg::Json => {
            let (nu, half_width) = match report.nu {
                Some(fit) => (fmt_f64(fit.exponent), fmt_f64(fit.half_width)),
                None => ("null".into(), "null".into()),
            };
            let text = format!(
                "{{\"family\":{},\"params\":{},\"method\":{},\"nu\":{},\"half_width\":{},\"points\":{},\"window\":[{},{}]}}\n",
                json_string(&source.family),
                json_string(&source.params),
                json_string(&method_name),
                nu,
                half_width,
                report.times.len(),
                fmt_f64(times[0]),
                fmt_f64(t_max),
            );
            write_out(c.out.output.as_deref(), &text).map_err(Failure::Io)
        }
    }
}

fn run_asymptotics(c: AsymptoticsCmd) -> Result<(), Failure> {
    let spec: FamilySpec = c.family.parse().map_err(setup)?;
    let seq = family_jacobi(&spec).map_err(setup)?;
    let canonical = spec.to_string();

    if c.pi_table {
        if spec != FamilySpec::Line {
            return Err(Failure::Usage(
                "the interchange-error table is defined for --family line".into(),
            ));
        }
        let orders = parse_order_grid(
            c.n.as_deref()
                .ok_or_else(|| Failure::Usage("--pi-table needs --n".into()))?,
        )?;
        let horizon = c.t.unwrap_or(1000.0);
        if !(horizon > 0.0) {
            return Err(Failure::Usage("--t must be positive".into()));
        }
        let samples = (2.0 * horizon).ceil() as usize + 1;
        let rows = par_map(orders.len(), |i| {
            let n = orders[i];
            let sup = (0..samples)
                .map(|j| ctqw::finite_infinite_diff(n, 0.5 * j as f64))
                .fold(0.0_f64, f64::max);
            vec![n.to_string(), fmt_f64(sup)]
        });
        let text = match c.out.format {
            FormatArg::Csv => csv_table(&["n", "max_pi"], &rows),
            FormatArg::Json => json_envelope(
                "line",
                "",
                "pi-table",
                &["n", "max_pi"],
                &rows,
            ),
        };
        return write_out(c.out.output.as_deref(), &text).map_err(Failure::Io);
    }

    let (t1, t2) = parse_window(&c.window)?;
    let form = asymptotic_form(&spec, &seq, c.stratum)?;
    let points = c.points.unwrap_or_else(|| {
        if form.oscillatory {
            let arches = form.frequency.abs() * (t2 - t1) / std::f64::consts::PI;
            ((10.0 * arches).ceil() as usize).clamp(400, 40000)
        } else {
            400
        }
    });
    if points < 8 {
        return Err(Failure::Usage("--points must be at least 8".into()));
    }
    // Linear sampling for oscillatory forms (uniform arch coverage: the
    // envelope peaks land log-dense on their own); log sampling otherwise.
    let times: Vec<f64> = (0..points)
        .map(|i| {
            let u = i as f64 / (points - 1) as f64;
            if form.oscillatory {
                t1 + (t2 - t1) * u
            } else {
                t1 * (t2 / t1).powf(u)
            }
        })
        .collect();
    let series = exact_series(&spec, &seq, c.stratum, &times)?;
    let report = wkb_validate(&series, c.stratum, &form, (t1, t2)).map_err(compute)?;

    match c.out.format {
        FormatArg::Json => {
            let text = format!(
                "{{\"family\":{},\"p_fitted\":{},\"p_theory\":{},\"C_fitted\":{},\"C_theory\":{},\"window\":[{},{}]}}\n",
                json_string(&canonical),
                fmt_f64(report.fitted_exponent),
                fmt_f64(form.decay_exponent),
                fmt_f64(report.fitted_coeff),
                fmt_f64(form.amplitude_coeff),
                fmt_f64(t1),
                fmt_f64(t2),
            );
            write_out(c.out.output.as_deref(), &text).map_err(Failure::Io)
        }
        FormatArg::Csv => {
            let rows: Vec<Vec<String>> = times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let q = series.values[i][c.stratum];
                    let exact = if form.oscillatory { q.re } else { q.norm() };
                    vec![fmt_f64(t), fmt_f64(exact), fmt_f64(form.eval(t))]
                })
                .collect();
            let text = csv_table(&["t", "exact", "approx"], &rows);
            write_out(c.out.output.as_deref(), &text).map_err(Failure::Io)
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Usage(format!("window {s:?}: expected t1:t2 with 0 < t1 < t2"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let t1: f64 = a.parse().map_err(|_| bad())?;
    let t2: f64 = b.parse().map_err(|_| bad())?;
    if !(t1 > 0.0 && t2 > t1) {
        return Err(bad());
    }
    Ok((t1, t2))
}

fn asymptotic_form(
    spec: &FamilySpec,
    seq: &JacobiSeq,
    stratum: usize,
) -> Result<AsymptoticForm, Failure> {
    match spec {
        FamilySpec::Laguerre { a, gamma } => {
            laguerre_asymptotic(*a, *gamma, stratum).map_err(compute)
        }
        _ => {
            let measure = closed_form_measure(spec).map_err(compute)?;
            stationary_phase_edge(&measure, seq.scale()).map_err(compute)
        }
    }
}

/// Exact amplitudes for one stratum on a grid: closed form when available,
/// otherwise quadrature against the family's exact measure.
fn exact_series(
    spec: &FamilySpec,
    seq: &JacobiSeq,
    stratum: usize,
    times: &[f64],
) -> Result<AmplitudeSeries, Failure> {
    let closed_ok = amplitude_closed_form(spec, stratum, times[0]).is_ok();
    let one = |t: f64| -> ctqw::Result<Complex64> {
        if closed_ok {
            amplitude_closed_form(spec, stratum, t)
        } else {
            let measure = closed_form_measure(spec)?;
            amplitude_quadrature(&measure, seq, stratum, t)
        }
    };
    let rows = par_map(times.len(), |i| -> ctqw::Result<Vec<Complex64>> {
        let mut row = vec![Complex64::new(0.0, 0.0); stratum + 1];
        row[stratum] = one(times[i])?;
        Ok(row)
    });
    let values = rows
        .into_iter()
        .collect::<ctqw::Result<Vec<_>>>()
        .map_err(compute)?;
    Ok(AmplitudeSeries {
        times: times.to_vec(),
        values,
        method: if closed_ok {
            Method::ClosedForm
        } else {
            Method::Quadrature
        },
        tail_mass: 0.0,
    })
}

fn run_verify(c: VerifyCmd) -> Result<(), Failure> {
    let source = resolve_source(&c.source)?;
    let times = parse_time_grid(&c.t)?;
    let report = match &source.spec {
        Some(spec) => verify_family(spec, &times).map_err(compute)?,
        None => {
            let text = std::fs::read_to_string(c.source.graph.as_ref().expect("resolved"))
                .map_err(Failure::Io)?;
            let g = graph_from_json(&text).map_err(setup)?;
            verify_graph(&g, c.source.scale.unwrap_or(1.0), &times).map_err(compute)?
        }
    };
    let label = if source.params.is_empty() {
        source.family.clone()
    } else {
        format!("{}:{}", source.family, source.params)
    };
    let ok = report.max_oracle_dev < c.tol && report.max_site_spread < c.tol;
    let text = format!(
        "source {label}\n\
         vertices {}\n\
         strata {}\n\
         max deviation (quadrature vs oracle) {}\n\
         max within-stratum spread {}\n\
         max site-projection gap {}\n\
         max coefficient gap {}\n\
         tolerance {}\n\
         status {}\n",
        report.vertices,
        report.strata,
        fmt_f64(report.max_oracle_dev),
        fmt_f64(report.max_site_spread),
        fmt_f64(report.max_site_dev),
        fmt_f64(report.max_coeff_dev),
        fmt_f64(c.tol),
        if ok { "OK" } else { "FAIL" },
    );
    write_out(c.out.output.as_deref(), &text).map_err(Failure::Io)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Numeric(ctqw::Error::QuadratureNotConverged(
            format!(
                "verification deviation {:.3e} exceeds tolerance {:.3e}",
                report.max_oracle_dev.max(report.max_site_spread),
                c.tol
            ),
        )))
    }
}

fn run_list_families() -> Result<(), Failure> {
    let text = "\
complete:n=N                 complete graph on N vertices (N >= 2)
cycle:n=N                    N-cycle (N >= 3)
path:n=N                     path on N vertices (N >= 2)
gluedtrees:n=N               two depth-N binary trees glued leaf to leaf (N >= 1)
hypercube:n=N                N-dimensional hypercube (1 <= N <= 26)
line                         integer line, arcsine band measure
star:n=N                     N-fold star product of half-lines (N >= 1)
comb                         two-dimensional comb lattice
vector                       seven-vertex two-stratum example graph
angular:n=N                  N-fold product walk of the vector example (N >= 1)
tchebichef1:m=M[,n=N]        first-kind Chebyshev weights, bandwidth 2^M (optional finite order N)
tchebichef2:m=M[,n=N]        second-kind Chebyshev weights, bandwidth 2^M (optional finite order N)
hermite-finite:n=N           truncated Hermite recurrence with N+1 strata (N >= 1)
hermite-infinite             Hermite recurrence, Gaussian measure
laguerre:a=A,gamma=G         Laguerre recurrence (A > 0, G > -1)
charlier:a=A,d=D             Charlier recurrence (A > 0, D > 0)
meixner2:a=A,delta=D,eta=E   Meixner second-kind recurrence (A > 0, E > -2)
elliptic-a:a=A,k=K           elliptic recurrence, class A (A > 0, 0 < K < 1)
elliptic-b:a=A,k=K           elliptic recurrence, class B (A > 0, 0 < K < 1)
elliptic-c:k=K               elliptic recurrence, class C (0 < K < 1)
elliptic-d:k=K               elliptic recurrence, class D (0 < K < 1)
carlitz-f:a=A,k=K            Carlitz recurrence F (A > 0, 0 < K < 1)
carlitz-g:a=A,k=K            Carlitz recurrence G (A > 0, 0 < K < 1)
carlitz-gstar:a=A,k=K        Carlitz recurrence G* (A > 0, 0 < K < 1)
class-a:a=A,b=B,n=N          finite product recurrence, first kind (N >= 1)
class-b:a=A,b=B,n=N          finite product recurrence, second kind (N >= 1)
";
    write_out(None, text).map_err(Failure::Io)
}

fn emit_table(
    out: &OutArgs,
    source: &Source,
    method: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<(), Failure> {
    let text = match out.format {
        FormatArg::Csv => csv_table(columns, rows),
        FormatArg::Json => json_envelope(&source.family, &source.params, method, columns, rows),
    };
    write_out(out.output.as_deref(), &text).map_err(Failure::Io)
}
