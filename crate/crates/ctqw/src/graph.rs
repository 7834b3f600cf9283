//! Graphs, distance stratifications and the tridiagonal coefficient
//! sequences they induce.
//!
//! A walk started at a fixed origin only sees the adjacency operator through
//! the distance partition `V_0, V_1, ...` around that origin. When every
//! vertex of a stratum has the same number of neighbours one level down,
//! within the level, and one level up, the adjacency operator restricted to
//! the uniform superpositions over strata is tridiagonal, and the whole walk
//! reduces to a three-term recurrence described by a [`JacobiSeq`].

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{DegreeKind, Error, Result};

/// Simple undirected graph with a distinguished origin vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    origin: usize,
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The origin vertex the stratification is anchored at.
    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Deduplicated edge list with `i < j` per edge.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }
}

/// Builds a graph on `n` vertices from an undirected edge list.
///
/// Edges are deduplicated and normalized to `i < j`. Fails on self loops,
/// out-of-range indices, and edge lists that leave any vertex unreachable
/// from `origin`.
pub fn build_graph(n: usize, edges: &[(usize, usize)], origin: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::IndexOutOfRange { index: origin, n });
    }
    if origin >= n {
        return Err(Error::IndexOutOfRange { index: origin, n });
    }
    let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        for v in [a, b] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        normalized.push((a.min(b), a.max(b)));
    }
    normalized.sort_unstable();
    normalized.dedup();

    let mut neighbors = vec![Vec::new(); n];
    for &(a, b) in &normalized {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }

    let graph = Graph {
        n,
        origin,
        neighbors,
        edges: normalized,
    };

    // Connectivity check doubles as the distance computation later reused
    // by stratify; here only reachability matters.
    let dist = bfs_distances(&graph);
    if let Some(v) = dist.iter().position(|d| d.is_none()) {
        return Err(Error::DisconnectedGraph(v));
    }
    Ok(graph)
}

fn bfs_distances(g: &Graph) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n];
    dist[g.origin] = Some(0);
    let mut queue = VecDeque::from([g.origin]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &w in g.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Distance partition of a graph around its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    strata: Vec<Vec<usize>>,
    distance: Vec<usize>,
}

impl Stratification {
    /// Number of strata (graph eccentricity of the origin plus one).
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Vertices at distance `k` from the origin, sorted ascending.
    pub fn stratum(&self, k: usize) -> &[usize] {
        &self.strata[k]
    }

    /// All strata in distance order.
    pub fn strata(&self) -> &[Vec<usize>] {
        &self.strata
    }

    /// Distance of vertex `v` from the origin.
    pub fn distance(&self, v: usize) -> usize {
        self.distance[v]
    }

    /// Stratum cardinalities `|V_0|, |V_1|, ...`.
    pub fn sizes(&self) -> Vec<usize> {
        self.strata.iter().map(|s| s.len()).collect()
    }
}

/// Partitions the vertices by breadth-first distance from the origin.
///
/// The result is independent of edge input order: strata are sorted by
/// vertex index.
pub fn stratify(g: &Graph) -> Stratification {
    let dist = bfs_distances(g);
    let distance: Vec<usize> = dist
        .iter()
        .map(|d| d.expect("graph construction guarantees connectivity"))
        .collect();
    let depth = distance.iter().copied().max().unwrap_or(0);
    let mut strata = vec![Vec::new(); depth + 1];
    for (v, &d) in distance.iter().enumerate() {
        strata[d].push(v);
    }
    // Vertex iteration is already in index order, so each stratum is sorted.
    Stratification { strata, distance }
}

/// Three-term recurrence coefficients `(omega_k, alpha_k)` together with a
/// Hamiltonian scale.
///
/// The sequence describes the tridiagonal action of the (scaled) adjacency
/// operator on the stratum basis: diagonal `alpha_1, alpha_2, ...` and
/// off-diagonal `sqrt(omega_1), sqrt(omega_2), ...`. Finite sequences carry
/// `alpha_1..alpha_S` and `omega_1..omega_{S-1}` for `S` strata; unbounded
/// sequences are backed by a generator indexed from 1.
#[derive(Clone)]
pub struct JacobiSeq {
    terms: Terms,
    scale: f64,
}

#[derive(Clone)]
enum Terms {
    Finite { omega: Vec<f64>, alpha: Vec<f64> },
    Infinite(Arc<dyn Fn(usize) -> (f64, f64) + Send + Sync>),
}

impl JacobiSeq {
    /// Finite sequence for a graph with `alpha.len()` strata.
    ///
    /// Requires `alpha.len() == omega.len() + 1` and all `omega > 0`.
    pub fn finite(omega: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != omega.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: omega.len() + 1,
                got: alpha.len(),
            });
        }
        if let Some(&bad) = omega.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::ParameterOutOfDomain(format!(
                "omega entries must be positive and finite, got {bad}"
            )));
        }
        Ok(JacobiSeq {
            terms: Terms::Finite { omega, alpha },
            scale: 1.0,
        })
    }

    /// Unbounded sequence from a generator `k -> (omega_k, alpha_k)`, `k >= 1`.
    pub fn from_fn<F>(gen: F) -> Self
    where
        F: Fn(usize) -> (f64, f64) + Send + Sync + 'static,
    {
        JacobiSeq {
            terms: Terms::Infinite(Arc::new(gen)),
            scale: 1.0,
        }
    }

    /// `omega_k` for `k >= 1`; zero past the end of a finite sequence.
    pub fn omega(&self, k: usize) -> f64 {
        assert!(k >= 1, "omega is indexed from 1");
        match &self.terms {
            Terms::Finite { omega, .. } => omega.get(k - 1).copied().unwrap_or(0.0),
            Terms::Infinite(gen) => gen(k).0,
        }
    }

    /// `alpha_k` for `k >= 1`; zero past the end of a finite sequence.
    pub fn alpha(&self, k: usize) -> f64 {
        assert!(k >= 1, "alpha is indexed from 1");
        match &self.terms {
            Terms::Finite { alpha, .. } => alpha.get(k - 1).copied().unwrap_or(0.0),
            Terms::Infinite(gen) => gen(k).1,
        }
    }

    /// Number of strata for a finite sequence, `None` when unbounded.
    pub fn strata_len(&self) -> Option<usize> {
        match &self.terms {
            Terms::Finite { alpha, .. } => Some(alpha.len()),
            Terms::Infinite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.strata_len().is_some()
    }

    /// Hamiltonian scale `gamma`; the walk evolves under `exp(-i*gamma*A*t)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Returns a copy with the Hamiltonian scale replaced.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Finite coefficient vectors `(omega, alpha)` when available.
    pub fn finite_coeffs(&self) -> Option<(&[f64], &[f64])> {
        match &self.terms {
            Terms::Finite { omega, alpha } => Some((omega, alpha)),
            Terms::Infinite(_) => None,
        }
    }
}

impl fmt::Debug for JacobiSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.terms {
            Terms::Finite { omega, alpha } => f
                .debug_struct("JacobiSeq")
                .field("omega", omega)
                .field("alpha", alpha)
                .field("scale", &self.scale)
                .finish(),
            Terms::Infinite(_) => f
                .debug_struct("JacobiSeq")
                .field("terms", &"<generator>")
                .field("scale", &self.scale)
                .finish(),
        }
    }
}

/// Per-stratum degree profile: (down, flat, up) neighbour counts.
fn degree_profile(g: &Graph, s: &Stratification, v: usize) -> (usize, usize, usize) {
    let d = s.distance(v);
    let mut down = 0;
    let mut flat = 0;
    let mut up = 0;
    for &w in g.neighbors(v) {
        match s.distance(w) {
            dw if dw + 1 == d => down += 1,
            dw if dw == d => flat += 1,
            dw if dw == d + 1 => up += 1,
            _ => unreachable!("BFS strata differ by at most one across an edge"),
        }
    }
    (down, flat, up)
}

/// Extracts the three-term recurrence coefficients of the stratified
/// adjacency action.
///
/// Every vertex of stratum `k` must share the same downward, within-stratum
/// and upward degree; otherwise the span of the uniform stratum vectors is
/// not invariant under the adjacency operator and the reduction does not
/// exist. On success, `omega_k` equals `kappa_down(V_k) * kappa_up(V_{k-1})`
/// (an integer, computed exactly) and `alpha_{k+1}` is the within-stratum
/// degree of `V_k`. The scale of the returned sequence is 1.
pub fn extract_jacobi(g: &Graph, s: &Stratification) -> Result<JacobiSeq> {
    let strata_count = s.len();
    let mut down = vec![0usize; strata_count];
    let mut flat = vec![0usize; strata_count];
    let mut up = vec![0usize; strata_count];

    for (k, stratum) in s.strata().iter().enumerate() {
        let first = stratum[0];
        let profile = degree_profile(g, s, first);
        for &v in &stratum[1..] {
            let other = degree_profile(g, s, v);
            let mismatch = [
                (profile.0, other.0, DegreeKind::Down),
                (profile.1, other.1, DegreeKind::Flat),
                (profile.2, other.2, DegreeKind::Up),
            ]
            .into_iter()
            .find(|(x, y, _)| x != y);
            if let Some((da, db, kind)) = mismatch {
                return Err(Error::NotQDGraph {
                    stratum: k,
                    a: first,
                    b: v,
                    kind,
                    da,
                    db,
                });
            }
        }
        down[k] = profile.0;
        flat[k] = profile.1;
        up[k] = profile.2;
    }

    // omega_k = kappa_down(V_k)^2 * |V_k| / |V_{k-1}|; the edge count between
    // consecutive strata makes this equal to kappa_down(V_k)*kappa_up(V_{k-1}),
    // which is exact in integer arithmetic.
    let mut omega = Vec::with_capacity(strata_count.saturating_sub(1));
    for k in 1..strata_count {
        let sizes = (s.stratum(k - 1).len(), s.stratum(k).len());
        debug_assert_eq!(sizes.1 * down[k], sizes.0 * up[k - 1]);
        omega.push((down[k] * up[k - 1]) as f64);
    }
    let alpha: Vec<f64> = flat.iter().map(|&f| f as f64).collect();
    JacobiSeq::finite(omega, alpha)
}

/// Applies the adjacency operator to a complex vertex vector.
pub fn apply_adjacency(g: &Graph, state: &[Complex64]) -> Result<Vec<Complex64>> {
    if state.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: state.len(),
        });
    }
    let mut out = vec![Complex64::ZERO; g.len()];
    for v in 0..g.len() {
        let mut acc = Complex64::ZERO;
        for &w in g.neighbors(v) {
            acc += state[w];
        }
        out[v] = acc;
    }
    Ok(out)
}

#[derive(serde::Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
    origin: usize,
}

/// Parses a graph from its JSON description
/// `{"n": int, "edges": [[i,j],...], "origin": int}`.
pub fn graph_from_json(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| Error::ParameterOutOfDomain(format!("graph file: {e}")))?;
    build_graph(file.n, &file.edges, file.origin)
}

/// Sparse-triplet CSV of the adjacency matrix, one `i,j,1` row per
/// undirected edge with `i < j`, sorted.
pub fn adjacency_csv(g: &Graph) -> String {
    let mut rows: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    rows.sort_unstable();
    let mut out = String::from("i,j,weight\n");
    for (i, j) in rows {
        out.push_str(&format!("{i},{j},1\n"));
    }
    out
}
