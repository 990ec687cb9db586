//! Weighted graphs, combinatorial Laplacians and canonical generators.
//!
//! Weights are stored dense. Undirected graphs must be simple: symmetric,
//! nonnegative weights and an empty diagonal.

mod io;
mod product;

pub use io::{read_graph_json, write_graph_json, GraphFile};
pub use product::{
    eq2_permutation, kronecker_sum_adjacency, kronecker_sum_laplacian, permute_symmetric,
    product_adjacency, product_laplacian, MultiIndex, ProductGraph,
};

use ndarray::{Array2, Axis};

use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: Array2<f64>,
    directed: bool,
}

impl Graph {
    /// Wraps a dense weight matrix, checking the graph invariants.
    pub fn new(weights: Array2<f64>, directed: bool) -> Result<Self> {
        let (rows, cols) = weights.dim();
        if rows == 0 || rows != cols {
            return Err(Error::shape(format!(
                "weight matrix must be square and non-empty, got {rows}x{cols}"
            )));
        }
        if let Some(((i, j), w)) = weights.indexed_iter().find(|(_, w)| !w.is_finite()) {
            return Err(Error::param(format!("non-finite weight {w} at ({i}, {j})")));
        }
        if !directed {
            let scale = weights.iter().fold(1.0_f64, |m, w| m.max(w.abs()));
            for i in 0..rows {
                if weights[[i, i]] != 0.0 {
                    return Err(Error::UnsupportedGraph(format!("self-loop at node {i}")));
                }
                for j in (i + 1)..rows {
                    let (a, b) = (weights[[i, j]], weights[[j, i]]);
                    if a < 0.0 || b < 0.0 {
                        return Err(Error::param(format!("negative weight between {i} and {j}")));
                    }
                    if (a - b).abs() > SYMMETRY_TOL * scale {
                        return Err(Error::shape(format!(
                            "undirected weights not symmetric at ({i}, {j}): {a} vs {b}"
                        )));
                    }
                }
            }
        }
        Ok(Graph { weights, directed })
    }

    /// Builds a graph from `(i, j, w)` triples. Undirected edges set both
    /// `W[i][j]` and `W[j][i]` and must be listed once.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph must have at least one node"));
        }
        let mut w = Array2::<f64>::zeros((n, n));
        for &(i, j, weight) in edges {
            if i >= n || j >= n {
                return Err(Error::param(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if w[[i, j]] != 0.0 || (!directed && w[[j, i]] != 0.0) {
                return Err(Error::param(format!("edge ({i}, {j}) listed twice")));
            }
            w[[i, j]] = weight;
            if !directed {
                w[[j, i]] = weight;
            }
        }
        Graph::new(w, directed)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Nonzero entries as `(i, j, w)`. Undirected graphs report each edge once with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            let start = if self.directed { 0 } else { i + 1 };
            for j in start..n {
                let w = self.weights[[i, j]];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Row sums of the weight matrix.
    pub fn degrees(&self) -> Vec<f64> {
        self.weights.sum_axis(Axis(1)).to_vec()
    }

    /// Weak connectivity (edge direction ignored).
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && (self.weights[[u, v]] != 0.0 || self.weights[[v, u]] != 0.0) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Combinatorial Laplacian `D - W` of an undirected graph.
pub fn laplacian(g: &Graph) -> Result<Array2<f64>> {
    if g.directed {
        return Err(Error::UnsupportedGraph(
            "the combinatorial Laplacian is defined for undirected graphs only".into(),
        ));
    }
    let mut l = g.weights.mapv(|w| -w);
    for (i, d) in g.degrees().into_iter().enumerate() {
        l[[i, i]] += d;
    }
    Ok(l)
}

/// Unit-weight path `0 - 1 - … - (n-1)`.
pub fn build_path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("path needs n >= 1"));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    Graph::from_edges(n, false, &edges)
}

/// Unit-weight cycle on `n >= 3` nodes.
pub fn build_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param("cycle needs n >= 3"));
    }
    let edges: Vec<_> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n), 1.0)).collect();
    Graph::from_edges(n, false, &edges)
}

/// Unit-weight `rows × cols` grid, i.e. `P_rows □ P_cols`. Node `(r, c)` has index `r·cols + c`.
pub fn build_grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::param("grid needs rows, cols >= 1"));
    }
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                edges.push((i, i + 1, 1.0));
            }
            if r + 1 < rows {
                edges.push((i, i + cols, 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, false, &edges)
}
