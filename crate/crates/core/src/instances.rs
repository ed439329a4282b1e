//! Generators for the structured instances: the four-point line, the spaced
//! line, the clique embedding, the graph encoding, random projections and
//! random fixtures. Every generator is a pure function of its parameters.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dendrogram::{Dendrogram, NodeId, TreeBuilder};
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::seed::Seed;

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// The points `0, Δ, 2Δ, 3Δ`.
pub fn four_point_instance(delta: f64) -> Result<PointSet> {
    four_point_shifted(delta, 0.0)
}

/// `0, Δ + s, 2Δ - s, 3Δ`: moving the two middle points toward each other
/// by `s` makes the middle pair the unique closest one.
pub fn four_point_shifted(delta: f64, shift: f64) -> Result<PointSet> {
    positive("delta", delta)?;
    if !(shift.is_finite() && shift >= 0.0 && 2.0 * shift < delta) {
        return Err(Error::invalid(format!("shift must lie in [0, delta/2), got {shift}")));
    }
    PointSet::from_1d(&[0.0, delta + shift, 2.0 * delta - shift, 3.0 * delta])
}

/// `n` points on a line whose adjacent Gaussian weights are
/// `(1 - (i-1) ε) e^{-Δ²/2σ²}` for `i = 1..n-1`.
pub fn spaced_line_instance(n: usize, delta: f64, epsilon: f64, sigma: f64) -> Result<PointSet> {
    if n < 3 {
        return Err(Error::invalid("spaced line needs at least 3 points"));
    }
    positive("delta", delta)?;
    positive("sigma", sigma)?;
    if !(epsilon > 0.0 && epsilon * (n as f64) < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/n), got {epsilon}")));
    }
    let mut xs = Vec::with_capacity(n);
    xs.push(0.0);
    for i in 1..n {
        let factor = 1.0 - (i - 1) as f64 * epsilon;
        let gap = (delta * delta - 2.0 * sigma * sigma * factor.ln()).sqrt();
        xs.push(xs[i - 1] + gap);
    }
    PointSet::from_1d(&xs)
}

/// Exact integer cube root, if any.
fn cube_root(n: usize) -> Option<usize> {
    let guess = (n as f64).cbrt().round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&k| k * k * k == n)
}

/// Side length of the clique grid, `k = n^{1/3}`.
pub fn clique_side(n: usize) -> Result<usize> {
    match cube_root(n) {
        Some(k) if k >= 1 => Ok(k),
        _ => Err(Error::invalid(format!("clique embedding needs a perfect cube, got {n}"))),
    }
}

/// `Δ` of the clique embedding: `Δ² = 2σ² c ln n`.
pub fn clique_delta(n: usize, sigma: f64, c: f64) -> f64 {
    (2.0 * sigma * sigma * c * (n as f64).ln()).sqrt()
}

/// Points `v_{i,j} = Δ (e_i + (1+τ) e_{k+j})` for `i < k`, `j < k²`, in
/// `R^{k + k²}`. Point `v_{i,j}` has index `i k² + j`.
pub fn clique_embed_instance(n: usize, tau: f64, sigma: f64, c: f64) -> Result<PointSet> {
    let k = clique_side(n)?;
    positive("tau", tau)?;
    positive("sigma", sigma)?;
    if !(c.is_finite() && c > 1.0) {
        return Err(Error::invalid(format!("c must exceed 1, got {c}")));
    }
    let delta = clique_delta(n, sigma, c);
    let d = k + k * k;
    let mut data = vec![0.0; n * d];
    for i in 0..k {
        for j in 0..k * k {
            let row = &mut data[(i * k * k + j) * d..][..d];
            row[i] = delta;
            row[k + j] = delta * (1.0 + tau);
        }
    }
    PointSet::from_flat(data, d)
}

/// A simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates: endpoints in range, no self-loops, no repeated edges.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), n });
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("repeated edge {{{u}, {v}}}")));
            }
        }
        Ok(Graph { n, edges })
    }

    /// Each pair independently with probability `p`.
    pub fn random(n: usize, p: f64, seed: Seed) -> Result<Self> {
        let mut rng = seed.rng();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

/// Unit vectors whose Gaussian weights take exactly two values, with
/// `w_nonedge = ε w_edge`, and the bandwidth that achieves it.
///
/// Coordinates `0..C(n,2)` hold one basis vector `x_e` per node pair;
/// `y_v` is the sum of `x_e` over the edges at `v`. Coordinates
/// `C(n,2)..C(n,2)+n` hold the basis vectors `z_v`. Then
/// `k_v = sqrt(1 - d_v/n) z_v + sqrt(1/n) y_v` has unit norm, and
/// `<k_u, k_v>` is `1/n` on edges and 0 otherwise. With
/// `σ = (n ln(1/ε))^{-1/2}` the weight ratio is `e^{-1/(nσ²)} = ε`.
pub fn encode_graph(graph: &Graph, epsilon: f64) -> Result<(PointSet, f64)> {
    let g = Graph::new(graph.n, graph.edges.clone())?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let n = g.n;
    let pairs = n * (n - 1) / 2;
    let d = pairs + n;
    let pair_index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        a * n - a * (a + 1) / 2 + (b - a - 1)
    };
    let deg = g.degrees();
    let edge_coord = (1.0 / n as f64).sqrt();
    let mut data = vec![0.0; n * d];
    for &(u, v) in &g.edges {
        let e = pair_index(u, v);
        data[u * d + e] = edge_coord;
        data[v * d + e] = edge_coord;
    }
    for v in 0..n {
        data[v * d + pairs + v] = (1.0 - deg[v] as f64 / n as f64).sqrt();
    }
    let sigma = (n as f64 * (1.0 / epsilon).ln()).powf(-0.5);
    Ok((PointSet::from_flat(data, d)?, sigma))
}

/// Multiplies every point by a `target_dim × d` matrix of independent
/// `N(0, 1/target_dim)` entries.
pub fn jl_project(points: &PointSet, target_dim: usize, seed: Seed) -> Result<PointSet> {
    if target_dim == 0 {
        return Err(Error::invalid("target dimension must be at least 1"));
    }
    let d = points.dim();
    let scale = 1.0 / (target_dim as f64).sqrt();
    let mut rng = seed.rng();
    let matrix: Vec<f64> = (0..target_dim * d)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut out = Vec::with_capacity(points.len() * target_dim);
    for v in points.rows() {
        for row in matrix.chunks_exact(d) {
            out.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
        }
    }
    PointSet::from_flat(out, target_dim)
}

/// `n` sorted points uniform on `[lo, hi]`.
pub fn random_1d(n: usize, lo: f64, hi: f64, seed: Seed) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::invalid("need at least one point"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid(format!("bad range [{lo}, {hi}]")));
    }
    let mut rng = seed.rng();
    let mut xs: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    xs.sort_by(f64::total_cmp);
    PointSet::from_1d(&xs)
}

/// `n` points in `R^d` with independent standard normal coordinates.
pub fn gaussian_cloud(n: usize, d: usize, seed: Seed) -> Result<PointSet> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("need at least one point of dimension at least 1"));
    }
    let mut rng = seed.rng();
    let data = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    PointSet::from_flat(data, d)
}

/// A random tree on `n` leaves: repeatedly joins two uniformly chosen
/// subtrees.
pub fn random_tree(n: usize, seed: Seed) -> Result<Dendrogram> {
    if n == 0 {
        return Err(Error::invalid("a tree needs at least one leaf"));
    }
    let mut rng = seed.rng();
    let mut b = TreeBuilder::with_leaves(n);
    let mut roots: Vec<NodeId> = (0..n).map(|p| b.leaf(p)).collect();
    while roots.len() > 1 {
        let i = rng.random_range(0..roots.len());
        let x = roots.swap_remove(i);
        let j = rng.random_range(0..roots.len());
        let y = roots.swap_remove(j);
        let joined = if rng.random::<bool>() { b.join(x, y) } else { b.join(y, x) };
        roots.push(joined);
    }
    b.build(roots[0])
}

fn default_c() -> f64 {
    4.0
}

/// A serializable description of a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceSpec {
    FourPoint {
        delta: f64,
        sigma: f64,
        #[serde(default)]
        shift: f64,
    },
    SpacedLine {
        n: usize,
        delta: f64,
        epsilon: f64,
        sigma: f64,
    },
    CliqueEmbed {
        n: usize,
        tau: f64,
        sigma: f64,
        #[serde(default = "default_c")]
        c: f64,
    },
    GraphEncode {
        graph: Graph,
        epsilon: f64,
    },
    #[serde(rename = "random_1d")]
    Random1D {
        n: usize,
        lo: f64,
        hi: f64,
        #[serde(default)]
        seed: Seed,
    },
    RandomGaussianCloud {
        n: usize,
        d: usize,
        #[serde(default)]
        seed: Seed,
    },
}

/// Points plus the bandwidth the family was built for, if it has one.
#[derive(Debug, Clone)]
pub struct Instance {
    pub points: PointSet,
    pub sigma: Option<f64>,
}

impl InstanceSpec {
    pub fn generate(&self) -> Result<Instance> {
        let (points, sigma) = match *self {
            InstanceSpec::FourPoint { delta, sigma, shift } => {
                positive("sigma", sigma)?;
                (four_point_shifted(delta, shift)?, Some(sigma))
            }
            InstanceSpec::SpacedLine { n, delta, epsilon, sigma } => {
                (spaced_line_instance(n, delta, epsilon, sigma)?, Some(sigma))
            }
            InstanceSpec::CliqueEmbed { n, tau, sigma, c } => {
                (clique_embed_instance(n, tau, sigma, c)?, Some(sigma))
            }
            InstanceSpec::GraphEncode { ref graph, epsilon } => {
                let (p, s) = encode_graph(graph, epsilon)?;
                (p, Some(s))
            }
            InstanceSpec::Random1D { n, lo, hi, seed } => (random_1d(n, lo, hi, seed)?, None),
            InstanceSpec::RandomGaussianCloud { n, d, seed } => (gaussian_cloud(n, d, seed)?, None),
        };
        Ok(Instance { points, sigma })
    }
}
