//! kNN probabilistic hypergraph over samples and its Laplacian ingredients.
//!
//! Each vertex `i` generates one hyperedge `eᵢ = {i} ∪ kNN(i)`. Edge weights
//! sum the heat-kernel affinities from the anchor to every member, and the
//! solver consumes `S = H W D_E⁻¹ Hᵀ` together with the vertex degrees `D_V`
//! (the Laplacian is `D_V − S`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{unfold_tr, DenseTensor, Matrix};

/// Which manifold regularizer the solver attaches to the sample core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    /// kNN hyperedges, one per vertex.
    #[default]
    Hypergraph,
    /// Ordinary kNN graph with heat-kernel weights, expressed as size-2
    /// hyperedges so that `D_V − S` is the graph Laplacian `D − W`.
    PairwiseGraph,
    /// No regularizer; the solver reduces to plain NTR.
    None,
}

impl std::str::FromStr for GraphMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypergraph" => Ok(Self::Hypergraph),
            "pairwise-graph" | "graph" => Ok(Self::PairwiseGraph),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidArgument(format!("unknown graph mode {other:?}"))),
        }
    }
}

/// Rows of `X_[N]`: one sample per index of the last mode.
pub fn samples_from_tensor(x: &DenseTensor) -> Result<Matrix> {
    unfold_tr(x, x.order() - 1)
}

/// Sparse 0/1 incidence matrix stored as the member list of every edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incidence {
    n_vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Incidence {
    /// Members are sorted and deduplicated; empty edges and out-of-range
    /// vertices are rejected.
    pub fn new(n_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(edges.len());
        for (e, mut members) in edges.into_iter().enumerate() {
            members.sort_unstable();
            members.dedup();
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("hyperedge {e} is empty")));
            }
            if let Some(&v) = members.last().filter(|&&v| v >= n_vertices) {
                return Err(Error::InvalidArgument(format!(
                    "hyperedge {e} references vertex {v} of {n_vertices}"
                )));
            }
            clean.push(members);
        }
        Ok(Self {
            n_vertices,
            edges: clean,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn contains(&self, v: usize, e: usize) -> bool {
        self.edges[e].binary_search(&v).is_ok()
    }

    /// `d_E(e)`: column sums of `H`.
    pub fn edge_degrees(&self) -> Vec<f64> {
        self.edges.iter().map(|m| m.len() as f64).collect()
    }

    /// Dense `|V| × |E|` view of `H`.
    pub fn to_dense(&self) -> Matrix {
        let mut h = Matrix::zeros(self.n_vertices, self.edges.len());
        for (e, members) in self.edges.iter().enumerate() {
            for &v in members {
                h.set(v, e, 1.0);
            }
        }
        h
    }
}

fn squared_distances(samples: &Matrix) -> Matrix {
    let n = samples.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s: f64 = samples
                .row(i)
                .iter()
                .zip(samples.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d.set(i, j, s);
            d.set(j, i, s);
        }
    }
    d
}

fn check_finite(samples: &Matrix) -> Result<()> {
    if samples.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples contain non-finite values".into()));
    }
    Ok(())
}

/// Nearest neighbours of every vertex, ties broken by lower index.
fn knn_lists(dist2: &Matrix, k: usize) -> Vec<Vec<usize>> {
    let n = dist2.rows();
    (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| dist2.get(i, a).total_cmp(&dist2.get(i, b)).then(a.cmp(&b)));
            others.truncate(k);
            others
        })
        .collect()
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "neighbour count {k} must satisfy 1 <= k < {n}"
        )));
    }
    Ok(())
}

/// One hyperedge per vertex: `eᵢ = {i} ∪ {k nearest neighbours of i}`.
pub fn build_knn_hyperedges(samples: &Matrix, k: usize) -> Result<Incidence> {
    check_finite(samples)?;
    check_k(samples.rows(), k)?;
    let d = squared_distances(samples);
    knn_incidence(&d, k)
}

fn knn_incidence(dist2: &Matrix, k: usize) -> Result<Incidence> {
    let edges = knn_lists(dist2, k)
        .into_iter()
        .enumerate()
        .map(|(i, mut nb)| {
            nb.push(i);
            nb
        })
        .collect();
    Incidence::new(dist2.rows(), edges)
}

/// Mean Euclidean distance over distinct pairs.
fn mean_distance(dist2: &Matrix) -> f64 {
    let n = dist2.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += dist2.get(i, j).sqrt();
        }
    }
    sum / (n * (n - 1) / 2) as f64
}

fn heat_kernel(dist2: &Matrix, sigma: f64) -> Matrix {
    let s2 = sigma * sigma;
    Matrix::from_fn(dist2.rows(), dist2.cols(), |i, j| (-dist2.get(i, j) / s2).exp())
}

fn sigma_of(dist2: &Matrix) -> Result<f64> {
    if dist2.rows() < 2 {
        return Err(Error::InvalidArgument("affinity needs at least two samples".into()));
    }
    let sigma = mean_distance(dist2);
    if sigma <= 0.0 {
        return Err(Error::Degenerate(
            "all samples coincide; the mean pairwise distance is zero".into(),
        ));
    }
    Ok(sigma)
}

/// Heat-kernel affinity `A_ij = exp(−‖vᵢ−vⱼ‖²/σ²)` with σ the mean pairwise
/// distance. Returns `(A, σ)`.
pub fn affinity(samples: &Matrix) -> Result<(Matrix, f64)> {
    check_finite(samples)?;
    let d = squared_distances(samples);
    let sigma = sigma_of(&d)?;
    Ok((heat_kernel(&d, sigma), sigma))
}

/// `Wᵢ = Σ_{j ∈ eᵢ} A(i, j)` for edges anchored at their generating vertex.
pub fn edge_weights(h: &Incidence, a: &Matrix) -> Result<Vec<f64>> {
    if h.n_edges() != h.n_vertices() || a.rows() != h.n_vertices() {
        return Err(Error::Shape(format!(
            "anchored weights need |E| = |V| = affinity size; got |E|={}, |V|={}, A is {}x{}",
            h.n_edges(),
            h.n_vertices(),
            a.rows(),
            a.cols()
        )));
    }
    (0..h.n_edges())
        .map(|i| {
            let members = h.edge(i);
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("hyperedge {i} is empty")));
            }
            Ok(members.iter().map(|&j| a.get(i, j)).sum())
        })
        .collect()
}

/// `S = H W D_E⁻¹ Hᵀ` and the vertex degrees `d_V(v) = Σ_e w(e) h(v,e)`.
pub fn laplacian(h: &Incidence, w: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    if w.len() != h.n_edges() {
        return Err(Error::Shape(format!(
            "{} weights for {} hyperedges",
            w.len(),
            h.n_edges()
        )));
    }
    let n = h.n_vertices();
    let mut s = Matrix::zeros(n, n);
    let mut dv = vec![0.0; n];
    for (members, &we) in h.edges().iter().zip(w) {
        let c = we / members.len() as f64;
        for &i in members {
            dv[i] += we;
            for &j in members {
                let v = s.get(i, j) + c;
                s.set(i, j, v);
            }
        }
    }
    Ok((s, dv))
}

/// Hypergraph with the derived matrices the solver needs.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    incidence: Incidence,
    edge_weights: Vec<f64>,
    vertex_degrees: Vec<f64>,
    edge_degrees: Vec<f64>,
    similarity: Matrix,
    sigma: f64,
}

impl Hypergraph {
    /// kNN probabilistic hypergraph over the rows of `samples`.
    pub fn knn(samples: &Matrix, k: usize) -> Result<Self> {
        check_finite(samples)?;
        check_k(samples.rows(), k)?;
        let d = squared_distances(samples);
        let sigma = sigma_of(&d)?;
        let a = heat_kernel(&d, sigma);
        let incidence = knn_incidence(&d, k)?;
        let weights = edge_weights(&incidence, &a)?;
        Self::from_parts(incidence, weights, sigma)
    }

    /// kNN graph (symmetrized) with heat-kernel weights as size-2 edges.
    /// Each edge carries weight `2·A_ij`, which makes `D_V − S` equal to the
    /// graph Laplacian `D − A|_kNN`.
    pub fn pairwise_knn(samples: &Matrix, k: usize) -> Result<Self> {
        check_finite(samples)?;
        check_k(samples.rows(), k)?;
        let d = squared_distances(samples);
        let sigma = sigma_of(&d)?;
        let a = heat_kernel(&d, sigma);
        let mut pairs: Vec<(usize, usize)> = knn_lists(&d, k)
            .into_iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.into_iter().map(move |j| (i.min(j), i.max(j))))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let weights = pairs.iter().map(|&(i, j)| 2.0 * a.get(i, j)).collect();
        let incidence = Incidence::new(
            samples.rows(),
            pairs.into_iter().map(|(i, j)| vec![i, j]).collect(),
        )?;
        Self::from_parts(incidence, weights, sigma)
    }

    /// Assembles a hypergraph from an incidence structure and edge weights.
    pub fn from_parts(incidence: Incidence, edge_weights: Vec<f64>, sigma: f64) -> Result<Self> {
        if edge_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument(
                "edge weights must be finite and nonnegative".into(),
            ));
        }
        let (similarity, vertex_degrees) = laplacian(&incidence, &edge_weights)?;
        let edge_degrees = incidence.edge_degrees();
        Ok(Self {
            incidence,
            edge_weights,
            vertex_degrees,
            edge_degrees,
            similarity,
            sigma,
        })
    }

    pub fn incidence(&self) -> &Incidence {
        &self.incidence
    }

    pub fn n_vertices(&self) -> usize {
        self.incidence.n_vertices()
    }

    pub fn n_edges(&self) -> usize {
        self.incidence.n_edges()
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn vertex_degrees(&self) -> &[f64] {
        &self.vertex_degrees
    }

    pub fn edge_degrees(&self) -> &[f64] {
        &self.edge_degrees
    }

    /// `S = H W D_E⁻¹ Hᵀ`.
    pub fn similarity(&self) -> &Matrix {
        &self.similarity
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Dense `L = D_V − S`.
    pub fn laplacian(&self) -> Matrix {
        let mut l = self.similarity.clone();
        l.scale(-1.0);
        for (i, d) in self.vertex_degrees.iter().enumerate() {
            let v = l.get(i, i) + d;
            l.set(i, i, v);
        }
        l
    }
}
