//! Undirected simple graphs and the spectral data of their walk operators.
//!
//! A [`Graph`] is a connected-or-not undirected simple graph held as a 0/1
//! adjacency matrix. The walk transition matrix `H = K^{-1} A` (row `i`: jump
//! uniformly to a neighbor of `i`) is row-stochastic but not symmetric; its
//! spectral decomposition is obtained from the symmetrized operator
//! `S = K^{-1/2} A K^{-1/2}`, giving a real eigenvalue ladder
//! `1 = lambda_1 >= lambda_2 >= ... >= -1` and biorthonormal left/right
//! eigenvector pairs. The leading pair is rescaled to `v_1 = ones` and
//! `vbar_1 = stationary distribution`, so `v_1 vbar_1^T` is the projector
//! every aperiodic walk relaxes to; `lambda = -1` (reached exactly on
//! bipartite graphs) makes that relaxation fail and is rejected by the
//! checked decomposition.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Tolerance for declaring the bottom eigenvalue "at -1" (bipartite).
pub const BIPARTITE_TOL: f64 = 1e-10;
/// Tolerance for snapping the top eigenvalue to exactly 1.
const UNIT_SNAP_TOL: f64 = 1e-10;

/// Undirected simple graph on nodes `0..n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: DMatrix<f64>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Wraps an adjacency matrix after validating it is square with `n >= 2`,
    /// symmetric, zero on the diagonal, and 0/1-valued.
    pub fn from_adjacency(adjacency: DMatrix<f64>) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::invalid_graph(format!(
                "adjacency matrix must be square, got {}x{}",
                n,
                adjacency.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::invalid_graph(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::invalid_graph(format!(
                    "self-loop at node {i} (diagonal must be zero)"
                )));
            }
            for j in 0..n {
                let a = adjacency[(i, j)];
                if a != 0.0 && a != 1.0 {
                    return Err(Error::invalid_graph(format!(
                        "adjacency entries must be 0 or 1, got {a} at ({i}, {j})"
                    )));
                }
                if a != adjacency[(j, i)] {
                    return Err(Error::invalid_graph(format!(
                        "adjacency must be symmetric; differs at ({i}, {j})"
                    )));
                }
            }
        }
        let degrees = (0..n).map(|i| adjacency.row(i).sum()).collect();
        Ok(Self { adjacency, degrees })
    }

    /// Graph on `n` nodes from an undirected edge list. Self-loops and
    /// duplicate edges (in either orientation) are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid_graph(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        let mut a = DMatrix::<f64>::zeros(n, n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid_graph(format!(
                    "edge ({i}, {j}) references a node >= {n}"
                )));
            }
            if i == j {
                return Err(Error::invalid_graph(format!("self-loop at node {i}")));
            }
            if a[(i, j)] != 0.0 {
                return Err(Error::invalid_graph(format!("duplicate edge ({i}, {j})")));
            }
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        Self::from_adjacency(a)
    }

    /// Parses a whitespace-separated edge list, one `i j` pair per line,
    /// 0-based node ids; blank lines and lines starting with `#` are skipped.
    /// The node count is the largest id plus one.
    pub fn from_edge_list_str(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or_else(|| {
                    Error::invalid_graph(format!("line {}: expected 'i j'", lineno + 1))
                })?
                .parse::<usize>()
                .map_err(|e| {
                    Error::invalid_graph(format!("line {}: {e}", lineno + 1))
                })
            };
            let i = parse(it.next())?;
            let j = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::invalid_graph(format!(
                    "line {}: expected exactly two node ids",
                    lineno + 1
                )));
            }
            n = n.max(i + 1).max(j + 1);
            edges.push((i, j));
        }
        Self::from_edges(n.max(2), &edges)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Star graph `S_n`: hub node 0 joined to `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (1..n).map(|j| (0, j)).collect();
        Self::from_edges(n, &edges)
    }

    /// Erdos-Renyi `G(n, p)` sample: each unordered pair is an edge
    /// independently with probability `p`, drawn from a seeded
    /// ChaCha12 stream so the graph is reproducible across runs and
    /// platforms. Connectivity is *not* enforced here; the transition-matrix
    /// constructor reports [`Error::Disconnected`] when it matters.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid_graph(format!(
                "edge probability must lie in [0, 1], got {p}"
            )));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] == 1.0
    }

    /// Breadth-first reachability from node 0; `Ok` iff connected.
    fn check_connected(&self) -> Result<()> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && self.adjacency[(i, j)] == 1.0 {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(unreached) => Err(Error::Disconnected { unreached }),
        }
    }
}

/// Row-stochastic walk matrix `H = K^{-1} A` and graph Laplacian `L = K - A`
/// of a connected graph.
pub fn transition_matrix(g: &Graph) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    g.check_connected()?;
    let n = g.node_count();
    let mut h = g.adjacency.clone();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = g.degrees[i];
        for j in 0..n {
            h[(i, j)] /= k;
            l[(i, j)] = if i == j { k } else { 0.0 } - g.adjacency[(i, j)];
        }
    }
    Ok((h, l))
}

/// Spectral data of the walk matrix `H = K^{-1} A`.
///
/// Eigenvalues are sorted descending with `eigenvalues[0] = 1` exactly.
/// Columns `m` of `right` / `left` hold the biorthonormal pair
/// `(v_m, vbar_m)`: `H v_m = lambda_m v_m`, `vbar_m^T H = lambda_m vbar_m^T`,
/// `vbar_i^T v_j = delta_ij`, and `H^t = sum_m lambda_m^t v_m vbar_m^T`.
/// The leading pair is normalized to `v_1 = ones`, `vbar_1 = stationary`.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub right: DMatrix<f64>,
    pub left: DMatrix<f64>,
    /// Stationary distribution `pi_i = K_i / sum_j K_j`.
    pub stationary: DVector<f64>,
}

impl SpectralDecomp {
    /// `sum_m lambda_m^t v_m vbar_m^T`, the closed form of `H^t`.
    pub fn power(&self, t: u32) -> DMatrix<f64> {
        let n = self.stationary.len();
        let mut out = DMatrix::<f64>::zeros(n, n);
        for (m, &lam) in self.eigenvalues.iter().enumerate() {
            let w = lam.powi(t as i32);
            if w != 0.0 {
                out += w * self.right.column(m) * self.left.column(m).transpose();
            }
        }
        out
    }

    /// Projector onto the stationary state, `ones * stationary^T`.
    pub fn stationary_projector(&self) -> DMatrix<f64> {
        self.right.column(0) * self.left.column(0).transpose()
    }
}

/// Spectral decomposition of the walk matrix, rejecting bipartite graphs
/// (an eigenvalue within [`BIPARTITE_TOL`] of -1), whose walks never relax.
pub fn spectral_decompose(g: &Graph) -> Result<SpectralDecomp> {
    let d = spectral_decompose_allow_bipartite(g)?;
    if let Some(&bottom) = d.eigenvalues.last() {
        if bottom <= -1.0 + BIPARTITE_TOL {
            return Err(Error::BipartiteSpectrum { eigenvalue: bottom });
        }
    }
    Ok(d)
}

/// Spectral decomposition without the bipartite rejection: eigenvalues within
/// [`BIPARTITE_TOL`] of -1 are snapped to exactly -1 and kept. Finite-horizon
/// walk formulas remain valid on bipartite graphs; only the `t -> infinity`
/// relaxation fails there.
pub fn spectral_decompose_allow_bipartite(g: &Graph) -> Result<SpectralDecomp> {
    g.check_connected()?;
    let n = g.node_count();
    let inv_sqrt_k: Vec<f64> = g.degrees.iter().map(|k| 1.0 / k.sqrt()).collect();
    let mut s = g.adjacency.clone();
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] *= inv_sqrt_k[i] * inv_sqrt_k[j];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut right = DMatrix::<f64>::zeros(n, n);
    let mut left = DMatrix::<f64>::zeros(n, n);
    for (m, &idx) in order.iter().enumerate() {
        let mut lam = eig.eigenvalues[idx];
        if (lam - 1.0).abs() <= UNIT_SNAP_TOL {
            lam = 1.0;
        }
        if (lam + 1.0).abs() <= BIPARTITE_TOL {
            lam = -1.0;
        }
        eigenvalues.push(lam);
        let phi = eig.eigenvectors.column(idx);
        for i in 0..n {
            right[(i, m)] = phi[i] * inv_sqrt_k[i];
            left[(i, m)] = phi[i] / inv_sqrt_k[i];
        }
    }

    let total_degree: f64 = g.degrees.iter().sum();
    let stationary = DVector::from_iterator(n, g.degrees.iter().map(|k| k / total_degree));
    // Rescale the leading pair to (ones, stationary); biorthonormality is
    // preserved because stationary^T ones = 1.
    for i in 0..n {
        right[(i, 0)] = 1.0;
        left[(i, 0)] = stationary[i];
    }

    Ok(SpectralDecomp {
        eigenvalues,
        right,
        left,
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adjacency_validation() {
        let bad_diag = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert_eq!(
            Graph::from_adjacency(bad_diag).unwrap_err().code(),
            "INVALID_GRAPH"
        );
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            Graph::from_adjacency(asym).unwrap_err().code(),
            "INVALID_GRAPH"
        );
        let weighted = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(
            Graph::from_adjacency(weighted).unwrap_err().code(),
            "INVALID_GRAPH"
        );
        let tiny = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert_eq!(
            Graph::from_adjacency(tiny).unwrap_err().code(),
            "INVALID_GRAPH"
        );
    }

    #[test]
    fn edge_construction() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(1), 2.0);
        assert!(g.is_edge(2, 0));
        assert_eq!(
            Graph::from_edges(3, &[(0, 0)]).unwrap_err().code(),
            "INVALID_GRAPH"
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]).unwrap_err().code(),
            "INVALID_GRAPH"
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 5)]).unwrap_err().code(),
            "INVALID_GRAPH"
        );
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::from_edge_list_str("# triangle\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.degree(0), 2.0);
        assert_eq!(
            Graph::from_edge_list_str("0 1 2").unwrap_err().code(),
            "INVALID_GRAPH"
        );
        assert_eq!(
            Graph::from_edge_list_str("0 x").unwrap_err().code(),
            "INVALID_GRAPH"
        );
    }

    #[test]
    fn named_families() {
        let k5 = Graph::complete(5).unwrap();
        assert!((0..5).all(|i| k5.degree(i) == 4.0));
        let s6 = Graph::star(6).unwrap();
        assert_eq!(s6.degree(0), 5.0);
        assert!((1..6).all(|i| s6.degree(i) == 1.0));
    }

    #[test]
    fn erdos_renyi_is_reproducible() {
        let a = Graph::erdos_renyi(30, 0.2, 12345).unwrap();
        let b = Graph::erdos_renyi(30, 0.2, 12345).unwrap();
        assert_eq!(a, b);
        let c = Graph::erdos_renyi(30, 0.2, 54321).unwrap();
        assert_ne!(a, c);
        let edges: f64 = a.adjacency().sum() / 2.0;
        assert!(edges > 40.0 && edges < 140.0, "edge count {edges}");
    }

    #[test]
    fn transition_and_laplacian_structure() {
        let g = Graph::complete(4).unwrap();
        let (h, l) = transition_matrix(&g).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(h.row(i).sum(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(l.row(i).sum(), 0.0, epsilon = 1e-14);
            assert_eq!(l[(i, i)], 3.0);
        }
        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        match transition_matrix(&two_triangles).unwrap_err() {
            Error::Disconnected { unreached } => assert_eq!(unreached, 3),
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn triangle_spectrum() {
        let g = Graph::complete(3).unwrap();
        let d = spectral_decompose(&g).unwrap();
        assert_eq!(d.eigenvalues[0], 1.0);
        assert_abs_diff_eq!(d.eigenvalues[1], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.eigenvalues[2], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn bipartite_rejection_and_override() {
        for g in [Graph::star(6).unwrap(), Graph::from_edges(2, &[(0, 1)]).unwrap()] {
            match spectral_decompose(&g).unwrap_err() {
                Error::BipartiteSpectrum { eigenvalue } => {
                    assert_abs_diff_eq!(eigenvalue, -1.0, epsilon = 1e-10)
                }
                other => panic!("expected BipartiteSpectrum, got {other:?}"),
            }
            let d = spectral_decompose_allow_bipartite(&g).unwrap();
            assert_eq!(*d.eigenvalues.last().unwrap(), -1.0);
        }
    }

    #[test]
    fn biorthonormal_and_complete() {
        let g = Graph::erdos_renyi(12, 0.4, 99).unwrap();
        let d = spectral_decompose(&g).unwrap();
        let n = g.node_count();
        let gram = d.left.transpose() * &d.right;
        let mut completeness = DMatrix::<f64>::zeros(n, n);
        for m in 0..n {
            completeness += d.right.column(m) * d.left.column(m).transpose();
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(i, j)], want, epsilon = 1e-10);
                assert_abs_diff_eq!(completeness[(i, j)], want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn reconstruction_and_relaxation() {
        let g = Graph::complete(5).unwrap();
        let (h, _) = transition_matrix(&g).unwrap();
        let d = spectral_decompose(&g).unwrap();
        let h_spec = d.power(1);
        let mut h64 = DMatrix::<f64>::identity(5, 5);
        for _ in 0..64 {
            h64 = &h64 * &h;
        }
        let proj = d.stationary_projector();
        for i in 0..5 {
            assert_abs_diff_eq!(d.stationary[i], 0.2, epsilon = 1e-14);
            for j in 0..5 {
                assert_abs_diff_eq!(h_spec[(i, j)], h[(i, j)], epsilon = 1e-12);
                assert_abs_diff_eq!(h64[(i, j)], proj[(i, j)], epsilon = 1e-12);
            }
        }
        // Stationarity: pi^T H = pi^T.
        let pi_h = d.stationary.transpose() * &h;
        for j in 0..5 {
            assert_abs_diff_eq!(pi_h[(0, j)], d.stationary[j], epsilon = 1e-14);
        }
    }
}
