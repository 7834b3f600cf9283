//! Named graph and coefficient families.
//!
//! Each family supplies some subset of: an explicit finite graph, a
//! recurrence coefficient sequence with a per-family Hamiltonian scale, and
//! a closed-form spectral measure. Product composition rules build
//! coefficient sequences for powers of two-level and three-level factors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, JacobiSeq};
use crate::spectral::{jacobi_to_quadrature, DensityFn, EdgeProfile, SpectralMeasure};
use crate::special::{binomial, ln_gamma};

/// Family selector with parameters.
///
/// Finite graph families carry vertex or depth counts; infinite families
/// carry the real parameters of their recurrence coefficients. `Tchebichef1`
/// and `Tchebichef2` are finite chains when `n` (the number of strata) is
/// given and infinite otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// Complete graph on `n` vertices.
    CompleteK { n: usize },
    /// Cycle on `n` vertices.
    CycleC { n: usize },
    /// Path on `n` vertices, walker started at an end vertex.
    PathP { n: usize },
    /// Two depth-`n` balanced binary trees glued leaf-to-leaf.
    GluedTreesG { n: usize },
    /// `n`-dimensional hypercube.
    Hypercube { n: usize },
    /// Integer line, walker started at the origin.
    Line,
    /// First-kind Tchebichef chain with size parameter `m` (support
    /// half-width `2^m`); finite with `n` strata when given.
    Tchebichef1 { m: f64, n: Option<usize> },
    /// Second-kind Tchebichef chain; finite with `n` strata when given.
    Tchebichef2 { m: f64, n: Option<usize> },
    /// Finite chain with decreasing coefficients `n, n-1, ..., 1`.
    HermiteFinite { n: usize },
    /// Infinite chain with coefficients `omega_k = k`.
    HermiteInfinite,
    /// Infinite chain with `omega_k = a^2 k (k + gamma)` and linear
    /// diagonal.
    Laguerre { a: f64, gamma: f64 },
    /// `n`-fold star power of the half line.
    StarLattice { n: usize },
    /// Two-dimensional comb lattice.
    Comb2D,
    /// Seven-vertex three-stratum graph with coefficients
    /// `omega = (2, 2)`, `alpha = (0, 1, 2)`.
    VectorGraph,
    /// `n`-fold product of vector graphs.
    AngularMomentum { n: usize },
    Charlier { a: f64, d: f64 },
    Meixner2 { a: f64, delta: f64, eta: f64 },
    EllipticA { a: f64, k: f64 },
    EllipticB { a: f64, k: f64 },
    EllipticC { k: f64 },
    EllipticD { k: f64 },
    CarlitzF { a: f64, k: f64 },
    CarlitzG { a: f64, k: f64 },
    CarlitzGstar { a: f64, k: f64 },
    /// `n`-fold product of two-stratum factors with `omega_1 = a`,
    /// `alpha_2 = b`.
    ProductClassA { a: f64, b: f64, n: usize },
    /// `n`-fold product of three-stratum factors with
    /// `omega_1 = omega_2 = a`, `alpha_2 = b`, `alpha_3 = 2b`.
    ProductClassB { a: f64, b: f64, n: usize },
}

impl FamilySpec {
    /// Canonical kind name as used in the CLI syntax.
    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::CompleteK { .. } => "complete",
            FamilySpec::CycleC { .. } => "cycle",
            FamilySpec::PathP { .. } => "path",
            FamilySpec::GluedTreesG { .. } => "gluedtrees",
            FamilySpec::Hypercube { .. } => "hypercube",
            FamilySpec::Line => "line",
            FamilySpec::Tchebichef1 { .. } => "tchebichef1",
            FamilySpec::Tchebichef2 { .. } => "tchebichef2",
            FamilySpec::HermiteFinite { .. } => "hermite-finite",
            FamilySpec::HermiteInfinite => "hermite-infinite",
            FamilySpec::Laguerre { .. } => "laguerre",
            FamilySpec::StarLattice { .. } => "star",
            FamilySpec::Comb2D => "comb",
            FamilySpec::VectorGraph => "vector",
            FamilySpec::AngularMomentum { .. } => "angular",
            FamilySpec::Charlier { .. } => "charlier",
            FamilySpec::Meixner2 { .. } => "meixner2",
            FamilySpec::EllipticA { .. } => "elliptic-a",
            FamilySpec::EllipticB { .. } => "elliptic-b",
            FamilySpec::EllipticC { .. } => "elliptic-c",
            FamilySpec::EllipticD { .. } => "elliptic-d",
            FamilySpec::CarlitzF { .. } => "carlitz-f",
            FamilySpec::CarlitzG { .. } => "carlitz-g",
            FamilySpec::CarlitzGstar { .. } => "carlitz-gstar",
            FamilySpec::ProductClassA { .. } => "class-a",
            FamilySpec::ProductClassB { .. } => "class-b",
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind_name();
        match self {
            FamilySpec::Line
            | FamilySpec::HermiteInfinite
            | FamilySpec::Comb2D
            | FamilySpec::VectorGraph => write!(f, "{kind}"),
            FamilySpec::CompleteK { n }
            | FamilySpec::CycleC { n }
            | FamilySpec::PathP { n }
            | FamilySpec::GluedTreesG { n }
            | FamilySpec::Hypercube { n }
            | FamilySpec::HermiteFinite { n }
            | FamilySpec::StarLattice { n }
            | FamilySpec::AngularMomentum { n } => write!(f, "{kind}:n={n}"),
            FamilySpec::Tchebichef1 { m, n } | FamilySpec::Tchebichef2 { m, n } => match n {
                Some(n) => write!(f, "{kind}:m={m},n={n}"),
                None => write!(f, "{kind}:m={m}"),
            },
            FamilySpec::Laguerre { a, gamma } => write!(f, "{kind}:a={a},gamma={gamma}"),
            FamilySpec::Charlier { a, d } => write!(f, "{kind}:a={a},d={d}"),
            FamilySpec::Meixner2 { a, delta, eta } => {
                write!(f, "{kind}:a={a},delta={delta},eta={eta}")
            }
            FamilySpec::EllipticA { a, k }
            | FamilySpec::EllipticB { a, k }
            | FamilySpec::CarlitzF { a, k }
            | FamilySpec::CarlitzG { a, k }
            | FamilySpec::CarlitzGstar { a, k } => write!(f, "{kind}:a={a},k={k}"),
            FamilySpec::EllipticC { k } | FamilySpec::EllipticD { k } => {
                write!(f, "{kind}:k={k}")
            }
            FamilySpec::ProductClassA { a, b, n } | FamilySpec::ProductClassB { a, b, n } => {
                write!(f, "{kind}:a={a},b={b},n={n}")
            }
        }
    }
}

struct Params<'a> {
    pairs: Vec<(&'a str, &'a str)>,
    used: Vec<bool>,
}

impl<'a> Params<'a> {
    fn parse(s: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        if !s.is_empty() {
            for item in s.split(',') {
                let (k, v) = item.split_once('=').ok_or_else(|| {
                    Error::ParameterOutOfDomain(format!(
                        "expected key=value, got {item:?}"
                    ))
                })?;
                pairs.push((k.trim(), v.trim()));
            }
        }
        let used = vec![false; pairs.len()];
        Ok(Params { pairs, used })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        for (i, &(k, v)) in self.pairs.iter().enumerate() {
            if k == key && !self.used[i] {
                self.used[i] = true;
                return Some(v);
            }
        }
        None
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let raw = self.take(key).ok_or_else(|| {
            Error::ParameterOutOfDomain(format!("missing parameter {key:?}"))
        })?;
        raw.parse::<f64>().map_err(|_| {
            Error::ParameterOutOfDomain(format!("parameter {key:?} is not a number: {raw:?}"))
        })
    }

    fn usize(&mut self, key: &str) -> Result<usize> {
        let raw = self.take(key).ok_or_else(|| {
            Error::ParameterOutOfDomain(format!("missing parameter {key:?}"))
        })?;
        raw.parse::<usize>().map_err(|_| {
            Error::ParameterOutOfDomain(format!(
                "parameter {key:?} is not a non-negative integer: {raw:?}"
            ))
        })
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<usize>().map(Some).map_err(|_| {
                Error::ParameterOutOfDomain(format!(
                    "parameter {key:?} is not a non-negative integer: {raw:?}"
                ))
            }),
        }
    }

    fn finish(self) -> Result<()> {
        for (i, &(k, _)) in self.pairs.iter().enumerate() {
            if !self.used[i] {
                return Err(Error::ParameterOutOfDomain(format!(
                    "unknown parameter {k:?}"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses the CLI syntax `kind:param=value,param=value`, e.g.
    /// `cycle:n=7` or `laguerre:a=1,gamma=0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r),
            None => (s.trim(), ""),
        };
        let mut p = Params::parse(rest)?;
        let spec = match kind {
            "complete" => FamilySpec::CompleteK { n: p.usize("n")? },
            "cycle" => FamilySpec::CycleC { n: p.usize("n")? },
            "path" => FamilySpec::PathP { n: p.usize("n")? },
            "gluedtrees" => FamilySpec::GluedTreesG { n: p.usize("n")? },
            "hypercube" => FamilySpec::Hypercube { n: p.usize("n")? },
            "line" => FamilySpec::Line,
            "tchebichef1" => FamilySpec::Tchebichef1 {
                m: p.f64("m")?,
                n: p.usize_opt("n")?,
            },
            "tchebichef2" => FamilySpec::Tchebichef2 {
                m: p.f64("m")?,
                n: p.usize_opt("n")?,
            },
            "hermite-finite" => FamilySpec::HermiteFinite { n: p.usize("n")? },
            "hermite-infinite" => FamilySpec::HermiteInfinite,
            "laguerre" => FamilySpec::Laguerre {
                a: p.f64("a")?,
                gamma: p.f64("gamma")?,
            },
            "star" => FamilySpec::StarLattice { n: p.usize("n")? },
            "comb" => FamilySpec::Comb2D,
            "vector" => FamilySpec::VectorGraph,
            "angular" => FamilySpec::AngularMomentum { n: p.usize("n")? },
            "charlier" => FamilySpec::Charlier {
                a: p.f64("a")?,
                d: p.f64("d")?,
            },
            "meixner2" => FamilySpec::Meixner2 {
                a: p.f64("a")?,
                delta: p.f64("delta")?,
                eta: p.f64("eta")?,
            },
            "elliptic-a" => FamilySpec::EllipticA {
                a: p.f64("a")?,
                k: p.f64("k")?,
            },
            "elliptic-b" => FamilySpec::EllipticB {
                a: p.f64("a")?,
                k: p.f64("k")?,
            },
            "elliptic-c" => FamilySpec::EllipticC { k: p.f64("k")? },
            "elliptic-d" => FamilySpec::EllipticD { k: p.f64("k")? },
            "carlitz-f" => FamilySpec::CarlitzF {
                a: p.f64("a")?,
                k: p.f64("k")?,
            },
            "carlitz-g" => FamilySpec::CarlitzG {
                a: p.f64("a")?,
                k: p.f64("k")?,
            },
            "carlitz-gstar" => FamilySpec::CarlitzGstar {
                a: p.f64("a")?,
                k: p.f64("k")?,
            },
            "class-a" => FamilySpec::ProductClassA {
                a: p.f64("a")?,
                b: p.f64("b")?,
                n: p.usize("n")?,
            },
            "class-b" => FamilySpec::ProductClassB {
                a: p.f64("a")?,
                b: p.f64("b")?,
                n: p.usize("n")?,
            },
            other => return Err(Error::UnsupportedFamily(other.to_string())),
        };
        p.finish()?;
        validate(&spec)?;
        Ok(spec)
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParameterOutOfDomain(msg.into()))
    }
}

fn validate(spec: &FamilySpec) -> Result<()> {
    match *spec {
        FamilySpec::CompleteK { n } => require(n >= 2, "complete graph needs n >= 2"),
        FamilySpec::CycleC { n } => require(n >= 3, "cycle needs n >= 3"),
        FamilySpec::PathP { n } => require(n >= 1, "path needs n >= 1"),
        FamilySpec::GluedTreesG { n } => require(n >= 1, "glued trees need n >= 1"),
        FamilySpec::Hypercube { n } => {
            require(n >= 1 && n <= 26, "hypercube needs 1 <= n <= 26")
        }
        FamilySpec::Tchebichef1 { m, n } | FamilySpec::Tchebichef2 { m, n } => {
            require(m.is_finite(), "size parameter m must be finite")?;
            require(n != Some(0), "finite chain needs n >= 1")
        }
        FamilySpec::HermiteFinite { n } => require(n >= 1, "finite chain needs n >= 1"),
        FamilySpec::Laguerre { a, gamma } => {
            require(a > 0.0, format!("needs a > 0, got a={a}"))?;
            require(gamma > -1.0, format!("needs gamma > -1, got gamma={gamma}"))
        }
        FamilySpec::StarLattice { n } => require(n >= 1, "star power needs n >= 1"),
        FamilySpec::AngularMomentum { n } => require(n >= 1, "needs n >= 1"),
        FamilySpec::Charlier { a, d } => {
            require(a > 0.0, format!("needs a > 0, got a={a}"))?;
            require(d > 0.0, format!("needs d > 0, got d={d}"))
        }
        FamilySpec::Meixner2 { a, eta, .. } => {
            require(a > 0.0, format!("needs a > 0, got a={a}"))?;
            require(eta > -2.0, format!("needs eta > -2, got eta={eta}"))
        }
        FamilySpec::EllipticA { a, k }
        | FamilySpec::EllipticB { a, k }
        | FamilySpec::CarlitzF { a, k }
        | FamilySpec::CarlitzG { a, k }
        | FamilySpec::CarlitzGstar { a, k } => {
            require(a > 0.0, format!("needs a > 0, got a={a}"))?;
            require(k > 0.0 && k < 1.0, format!("needs 0 < k < 1, got k={k}"))
        }
        FamilySpec::EllipticC { k } | FamilySpec::EllipticD { k } => {
            require(k > 0.0 && k < 1.0, format!("needs 0 < k < 1, got k={k}"))
        }
        FamilySpec::ProductClassA { a, n, .. } | FamilySpec::ProductClassB { a, n, .. } => {
            require(a > 0.0, format!("needs a > 0, got a={a}"))?;
            require(n >= 1, "product needs n >= 1")
        }
        FamilySpec::Line
        | FamilySpec::HermiteInfinite
        | FamilySpec::Comb2D
        | FamilySpec::VectorGraph => Ok(()),
    }
}

/// Explicit graph of a finite family, with canonical vertex numbering and
/// the walk origin at vertex 0.
pub fn family_graph(spec: &FamilySpec) -> Result<Graph> {
    validate(spec)?;
    match *spec {
        FamilySpec::CompleteK { n } => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            build_graph(n, &edges, 0)
        }
        FamilySpec::CycleC { n } => {
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            build_graph(n, &edges, 0)
        }
        FamilySpec::PathP { n } => {
            let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            build_graph(n, &edges, 0)
        }
        FamilySpec::GluedTreesG { n } => {
            // Left tree in heap order (heap index h -> vertex h-1); the
            // right tree's internal nodes follow, its leaves identified
            // with the left tree's leaves in matching order.
            let leaves = 1usize << n;
            let left_size = 2 * leaves - 1;
            let total = 3 * leaves - 2;
            let right_vertex = |h: usize| {
                if h >= leaves {
                    h - 1 // shared leaf, same vertex as in the left tree
                } else {
                    left_size - 1 + h
                }
            };
            let mut edges = Vec::new();
            for h in 1..leaves {
                edges.push((h - 1, 2 * h - 1));
                edges.push((h - 1, 2 * h));
                edges.push((right_vertex(h), right_vertex(2 * h)));
                edges.push((right_vertex(h), right_vertex(2 * h + 1)));
            }
            build_graph(total, &edges, 0)
        }
        FamilySpec::Hypercube { n } => {
            let total = 1usize << n;
            let mut edges = Vec::new();
            for v in 0..total {
                for b in 0..n {
                    let w = v ^ (1 << b);
                    if v < w {
                        edges.push((v, w));
                    }
                }
            }
            build_graph(total, &edges, 0)
        }
        FamilySpec::VectorGraph => build_graph(
            7,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 5),
                (2, 6),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 3),
            ],
            0,
        ),
        _ => Err(Error::UnsupportedFamily(format!(
            "{} has no explicit graph form",
            spec.kind_name()
        ))),
    }
}

/// Recurrence coefficients with the family's default Hamiltonian scale.
pub fn family_jacobi(spec: &FamilySpec) -> Result<JacobiSeq> {
    validate(spec)?;
    let seq = match *spec {
        FamilySpec::CompleteK { n } => {
            let nf = n as f64;
            JacobiSeq::finite(vec![nf - 1.0], vec![0.0, nf - 2.0])?
                .with_scale(1.0 / (nf - 1.0))
        }
        FamilySpec::CycleC { n } => {
            let m = n / 2;
            let (mut omega, alpha);
            if n % 2 == 1 {
                omega = vec![1.0; m];
                omega[0] = 2.0;
                let mut a = vec![0.0; m + 1];
                a[m] = 1.0;
                alpha = a;
            } else {
                omega = vec![1.0; m];
                omega[0] = 2.0;
                omega[m - 1] = 2.0;
                alpha = vec![0.0; m + 1];
            }
            JacobiSeq::finite(omega, alpha)?.with_scale(0.5)
        }
        FamilySpec::PathP { n } => {
            JacobiSeq::finite(vec![1.0; n - 1], vec![0.0; n])?.with_scale(0.5)
        }
        FamilySpec::GluedTreesG { n } => {
            JacobiSeq::finite(vec![2.0; 2 * n], vec![0.0; 2 * n + 1])?.with_scale(1.0)
        }
        FamilySpec::Hypercube { n } => {
            product_jacobi_class_a(1.0, 0.0, n)?.with_scale(1.0 / n as f64)
        }
        FamilySpec::Line => {
            JacobiSeq::from_fn(|k| (if k == 1 { 2.0 } else { 1.0 }, 0.0)).with_scale(0.5)
        }
        FamilySpec::Tchebichef1 { m, n } => {
            let w = 4.0_f64.powf(m - 1.0);
            match n {
                Some(n) => {
                    let mut omega = vec![w; n - 1];
                    if n >= 2 {
                        omega[0] = 2.0 * w;
                    }
                    JacobiSeq::finite(omega, vec![0.0; n])?.with_scale(0.5)
                }
                None => JacobiSeq::from_fn(move |k| (if k == 1 { 2.0 * w } else { w }, 0.0))
                    .with_scale(0.5),
            }
        }
        FamilySpec::Tchebichef2 { m, n } => {
            let w = 4.0_f64.powf(m - 1.0);
            match n {
                Some(n) => JacobiSeq::finite(vec![w; n - 1], vec![0.0; n])?.with_scale(1.0),
                None => JacobiSeq::from_fn(move |_| (w, 0.0)).with_scale(1.0),
            }
        }
        FamilySpec::HermiteFinite { n } => {
            let omega: Vec<f64> = (1..=n).map(|k| (n - k + 1) as f64).collect();
            JacobiSeq::finite(omega, vec![0.0; n + 1])?
        }
        FamilySpec::HermiteInfinite => JacobiSeq::from_fn(|k| (k as f64, 0.0)),
        FamilySpec::Laguerre { a, gamma } => JacobiSeq::from_fn(move |k| {
            let kf = k as f64;
            (a * a * kf * (kf + gamma), 2.0 * (kf - 1.0) * a)
        }),
        FamilySpec::StarLattice { n } => {
            let nf = n as f64;
            JacobiSeq::from_fn(move |k| (if k == 1 { nf } else { 1.0 }, 0.0))
        }
        FamilySpec::Comb2D => {
            JacobiSeq::from_fn(|k| (if k == 1 { 4.0 } else { 2.0 }, 0.0)).with_scale(0.25)
        }
        FamilySpec::VectorGraph => {
            JacobiSeq::finite(vec![2.0, 2.0], vec![0.0, 1.0, 2.0])?
        }
        FamilySpec::AngularMomentum { n } => {
            product_jacobi_class_b(2.0, 1.0, n)?.with_scale(1.0 / n as f64)
        }
        FamilySpec::Charlier { a, d } => JacobiSeq::from_fn(move |k| {
            let kf = k as f64;
            (a * a * kf * d, (kf - 1.0) * a)
        }),
        FamilySpec::Meixner2 { a, delta, eta } => JacobiSeq::from_fn(move |k| {
            let kf = k as f64;
            (
                a * a * kf * (kf + eta + 1.0) * (delta * delta + 1.0),
                2.0 * a * (kf - 1.0) * delta,
            )
        }),
        FamilySpec::EllipticA { a, k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            (
                4.0 * a * a * jf * jf * (4.0 * jf * jf - 1.0) * k * k,
                4.0 * a * (jf - 1.0) * jf * (1.0 + k * k),
            )
        }),
        FamilySpec::EllipticB { a, k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            (
                4.0 * a * a * jf * (jf + 1.0) * (2.0 * jf + 1.0).powi(2) * k * k,
                4.0 * a * (jf - 1.0) * (jf + 1.0) * (1.0 + k * k),
            )
        }),
        FamilySpec::EllipticC { k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            let w = if j % 2 == 1 { jf * jf } else { jf * jf * k * k };
            (w, 0.0)
        }),
        FamilySpec::EllipticD { k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            let w = if j % 2 == 1 { jf * jf * k * k } else { jf * jf };
            (w, 0.0)
        }),
        FamilySpec::CarlitzF { a, k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            (
                4.0 * a * a * jf * jf * (2.0 * jf - 1.0).powi(2) * k * k,
                4.0 * a * (jf - 1.0) * ((jf - 1.0) * (1.0 + k * k) + 1.0),
            )
        }),
        FamilySpec::CarlitzG { a, k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            (
                4.0 * a * a * jf * jf * (2.0 * jf - 1.0).powi(2) * k * k,
                4.0 * a * (jf - 1.0) * ((jf - 1.0) * (1.0 + k * k) + k * k),
            )
        }),
        FamilySpec::CarlitzGstar { a, k } => JacobiSeq::from_fn(move |j| {
            let jf = j as f64;
            (
                4.0 * a * a * jf * jf * (2.0 * jf + 1.0).powi(2) * k * k,
                4.0 * a * (jf - 1.0) * jf * (1.0 + k * k),
            )
        }),
        FamilySpec::ProductClassA { a, b, n } => product_jacobi_class_a(a, b, n)?,
        FamilySpec::ProductClassB { a, b, n } => product_jacobi_class_b(a, b, n)?,
    };
    Ok(seq)
}

/// Coefficients of the `n`-fold product of two-stratum factors with
/// `omega_1 = a` and `alpha_2 = b`: `omega_k = k (n - k + 1) a`,
/// `alpha_k = (k - 1) b`.
pub fn product_jacobi_class_a(a: f64, b: f64, n: usize) -> Result<JacobiSeq> {
    require(a > 0.0, format!("needs a > 0, got a={a}"))?;
    require(n >= 1, "product needs n >= 1")?;
    let omega: Vec<f64> = (1..=n)
        .map(|k| (k * (n - k + 1)) as f64 * a)
        .collect();
    let alpha: Vec<f64> = (0..=n).map(|k| k as f64 * b).collect();
    JacobiSeq::finite(omega, alpha)
}

/// Coefficients of the `n`-fold product of three-stratum factors with
/// `omega_1 = omega_2 = a`, `alpha_2 = b`, `alpha_3 = 2b`:
/// `omega_{2k+1} = (2k+1)(n-k) a`, `omega_{2k} = k (2n-2k+1) a`,
/// `alpha_k = (k-1) b`.
pub fn product_jacobi_class_b(a: f64, b: f64, n: usize) -> Result<JacobiSeq> {
    require(a > 0.0, format!("needs a > 0, got a={a}"))?;
    require(n >= 1, "product needs n >= 1")?;
    let omega: Vec<f64> = (1..=2 * n)
        .map(|j| {
            if j % 2 == 1 {
                let k = (j - 1) / 2;
                (j * (n - k)) as f64 * a
            } else {
                let k = j / 2;
                (k * (2 * n - 2 * k + 1)) as f64 * a
            }
        })
        .collect();
    let alpha: Vec<f64> = (0..=2 * n).map(|k| k as f64 * b).collect();
    JacobiSeq::finite(omega, alpha)
}

fn atoms_measure(mut atoms: Vec<(f64, f64)>) -> SpectralMeasure {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = atoms.into_iter().unzip();
    SpectralMeasure::Discrete { nodes, weights }
}

/// Closed-form spectral measure of the family, where one exists.
///
/// Finite families yield atoms summing to one; infinite families yield the
/// density of the absolutely continuous part on a finite support interval,
/// plus bound-state atoms where the family has any (star powers with
/// `n >= 3`). Unbounded-support densities (Laguerre, Hermite) are truncated
/// where the omitted tail mass is below 1e-13.
pub fn closed_form_measure(spec: &FamilySpec) -> Result<SpectralMeasure> {
    validate(spec)?;
    match *spec {
        FamilySpec::CompleteK { n } => {
            let nf = n as f64;
            Ok(atoms_measure(vec![
                (-1.0, (nf - 1.0) / nf),
                (nf - 1.0, 1.0 / nf),
            ]))
        }
        FamilySpec::CycleC { n } => {
            let nf = n as f64;
            let mut atoms = vec![(2.0, 1.0 / nf)];
            let m = n / 2;
            if n % 2 == 0 {
                atoms.push((-2.0, 1.0 / nf));
                for l in 1..m {
                    atoms.push((2.0 * (2.0 * PI * l as f64 / nf).cos(), 2.0 / nf));
                }
            } else {
                for l in 1..=m {
                    atoms.push((2.0 * (2.0 * PI * l as f64 / nf).cos(), 2.0 / nf));
                }
            }
            Ok(atoms_measure(atoms))
        }
        FamilySpec::PathP { n } => Ok(atoms_measure(sine_chain_atoms(n, 1.0))),
        FamilySpec::GluedTreesG { n } => {
            Ok(atoms_measure(sine_chain_atoms(2 * n + 1, 2.0_f64.sqrt())))
        }
        FamilySpec::Hypercube { n } => {
            let total = 2.0_f64.powi(n as i32);
            let atoms = (0..=n)
                .map(|k| ((n as f64) - 2.0 * k as f64, binomial(n, k) / total))
                .collect();
            Ok(atoms_measure(atoms))
        }
        FamilySpec::Line => Ok(arcsine_measure(2.0)),
        FamilySpec::Tchebichef1 { m, n } => {
            let c = 2.0_f64.powf(m);
            match n {
                Some(n) => {
                    let atoms = (0..n)
                        .map(|l| {
                            let theta = (2 * l + 1) as f64 * PI / (2 * n) as f64;
                            (c * theta.cos(), 1.0 / n as f64)
                        })
                        .collect();
                    Ok(atoms_measure(atoms))
                }
                None => Ok(arcsine_measure(c)),
            }
        }
        FamilySpec::Tchebichef2 { m, n } => {
            let c = 2.0_f64.powf(m);
            match n {
                Some(n) => {
                    let atoms = sine_chain_atoms(n, c / 2.0);
                    Ok(atoms_measure(atoms))
                }
                None => {
                    let c2 = c * c;
                    Ok(SpectralMeasure::Continuous {
                        density: Arc::new(move |x: f64| {
                            2.0 * (c2 - x * x).max(0.0).sqrt() / (PI * c2)
                        }),
                        support: (-c, c),
                        edge: EdgeProfile::SqrtVanishing {
                            regular: Arc::new(move |_| 2.0 / (PI * c2)),
                        },
                    })
                }
            }
        }
        FamilySpec::HermiteFinite { n } => {
            let seq = family_jacobi(spec)?;
            let (nodes, _) = jacobi_to_quadrature(&seq, n + 1)?;
            let w = 1.0 / (n + 1) as f64;
            let weights = vec![w; n + 1];
            Ok(SpectralMeasure::Discrete { nodes, weights })
        }
        FamilySpec::HermiteInfinite => {
            let norm = 1.0 / (2.0 * PI).sqrt();
            Ok(SpectralMeasure::Continuous {
                density: Arc::new(move |x: f64| norm * (-0.5 * x * x).exp()),
                support: (-12.0, 12.0),
                edge: EdgeProfile::Smooth,
            })
        }
        FamilySpec::Laguerre { a, gamma } => {
            let b = -a * (1.0 + gamma);
            let norm = 1.0 / (a * crate::special::gamma(gamma + 1.0));
            let cutoff = gamma + 1.0 + 45.0 + 10.0 * (gamma + 1.0).sqrt();
            Ok(SpectralMeasure::Continuous {
                density: Arc::new(move |x: f64| {
                    let u = (x - b) / a;
                    if u <= 0.0 {
                        0.0
                    } else {
                        norm * u.powf(gamma) * (-u).exp()
                    }
                }),
                support: (b, b + a * cutoff),
                edge: EdgeProfile::Smooth,
            })
        }
        FamilySpec::StarLattice { n } => {
            let nf = n as f64;
            let density: DensityFn = Arc::new(move |x: f64| {
                let s = (4.0 - x * x).max(0.0).sqrt();
                nf * s / (2.0 * PI * (nf * nf - (nf - 1.0) * x * x))
            });
            let edge = EdgeProfile::SqrtVanishing {
                regular: Arc::new(move |x: f64| {
                    nf / (2.0 * PI * (nf * nf - (nf - 1.0) * x * x))
                }),
            };
            match n {
                1 => Ok(SpectralMeasure::Continuous {
                    density,
                    support: (-2.0, 2.0),
                    edge,
                }),
                2 => Ok(arcsine_measure(2.0)),
                _ => {
                    // Poles of the resolvent outside the band carry the
                    // bound-state mass (n - 2) / (2 (n - 1)) each.
                    let x0 = nf / (nf - 1.0).sqrt();
                    let w = (nf - 2.0) / (2.0 * (nf - 1.0));
                    Ok(SpectralMeasure::Mixed {
                        atoms: vec![(-x0, w), (x0, w)],
                        density,
                        support: (-2.0, 2.0),
                        edge,
                    })
                }
            }
        }
        FamilySpec::Comb2D => Ok(arcsine_measure(2.0 * 2.0_f64.sqrt())),
        FamilySpec::VectorGraph => {
            let r5 = 5.0_f64.sqrt();
            Ok(atoms_measure(vec![
                (1.0 - r5, (3.0 + r5) / 10.0),
                (1.0, 2.0 / 5.0),
                (1.0 + r5, (3.0 - r5) / 10.0),
            ]))
        }
        _ => Err(Error::NoClosedFormMeasure(spec.kind_name().to_string())),
    }
}

/// Atoms of the uniform chain with `n` strata and off-diagonal entries
/// `half_width`: nodes `2 h cos(l pi / (n + 1))` with sine-squared weights.
fn sine_chain_atoms(n: usize, half_width: f64) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|l| {
            let theta = l as f64 * PI / (n + 1) as f64;
            (
                2.0 * half_width * theta.cos(),
                2.0 / (n + 1) as f64 * theta.sin().powi(2),
            )
        })
        .collect()
}

fn arcsine_measure(c: f64) -> SpectralMeasure {
    let c2 = c * c;
    SpectralMeasure::Continuous {
        density: Arc::new(move |x: f64| {
            let d = c2 - x * x;
            if d <= 0.0 {
                0.0
            } else {
                1.0 / (PI * d.sqrt())
            }
        }),
        support: (-c, c),
        edge: EdgeProfile::InverseSqrt {
            regular: Arc::new(|_| 1.0 / PI),
        },
    }
}

/// Log of the factorial-ratio prefactor `sqrt((gamma+k)! / (k! gamma!))`
/// appearing in the Laguerre amplitudes, computed in log space.
pub fn laguerre_prefactor(gamma: f64, k: usize) -> f64 {
    let kf = k as f64;
    (0.5 * (ln_gamma(gamma + kf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(gamma + 1.0))).exp()
}
