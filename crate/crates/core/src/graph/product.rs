//! Cartesian product graphs assembled from Kronecker sums of their factors.
//!
//! The adjacency sum follows `W1 ⊗ I + I ⊗ W2`, which indexes product vertices
//! row-major (last factor fastest). The Laplacian sum follows
//! `I ⊗ L1 + L2 ⊗ I`, which indexes them with the *first* factor fastest.
//! [`eq2_permutation`] converts between the two layouts.

use std::fmt;

use ndarray::Array2;

use super::{laplacian, Graph};
use crate::linalg::kron;
use crate::{Error, Result};

/// Frequency or vertex index `(ℓ1, …, ℓm)` on a product graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        MultiIndex(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks arity and bounds against factor sizes.
    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.0.len() != dims.len() {
            return Err(Error::shape(format!(
                "multi-index has {} entries, product has {} factors",
                self.0.len(),
                dims.len()
            )));
        }
        for (axis, (&l, &n)) in self.0.iter().zip(dims).enumerate() {
            if l >= n {
                return Err(Error::shape(format!("index {l} out of range 0..{n} on axis {axis}")));
            }
        }
        Ok(())
    }

    /// Row-major flat position: `ℓ1·(N2⋯Nm) + … + ℓm`.
    pub fn flat(&self, dims: &[usize]) -> usize {
        self.0.iter().zip(dims).fold(0, |acc, (&l, &n)| acc * n + l)
    }

    pub fn from_flat(mut flat: usize, dims: &[usize]) -> Self {
        let mut out = vec![0; dims.len()];
        for (slot, &n) in out.iter_mut().zip(dims).rev() {
            *slot = flat % n;
            flat /= n;
        }
        MultiIndex(out)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Ordered factors of `G1 □ … □ Gm`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGraph {
    factors: Vec<Graph>,
}

impl ProductGraph {
    pub fn new(factors: Vec<Graph>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::param("a product graph needs at least one factor"));
        }
        Ok(ProductGraph { factors })
    }

    pub fn factors(&self) -> &[Graph] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Graph::n).collect()
    }

    pub fn node_count(&self) -> usize {
        self.factors.iter().map(Graph::n).product()
    }

    /// The assembled product as a single graph in row-major vertex order.
    pub fn to_graph(&self) -> Result<Graph> {
        let directed = self.factors.iter().any(Graph::directed);
        Graph::new(product_adjacency(self)?, directed)
    }
}

fn check_square(m: &Array2<f64>, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::shape(format!("{what} must be square, got {r}x{c}")));
    }
    Ok(r)
}

/// `W1 ⊗ I_{N2} + I_{N1} ⊗ W2`.
pub fn kronecker_sum_adjacency(w1: &Array2<f64>, w2: &Array2<f64>) -> Result<Array2<f64>> {
    let n1 = check_square(w1, "first factor")?;
    let n2 = check_square(w2, "second factor")?;
    Ok(kron(w1, &Array2::eye(n2)) + kron(&Array2::eye(n1), w2))
}

/// `I_{N2} ⊗ L1 + L2 ⊗ I_{N1}`.
pub fn kronecker_sum_laplacian(l1: &Array2<f64>, l2: &Array2<f64>) -> Result<Array2<f64>> {
    let n1 = check_square(l1, "first factor")?;
    let n2 = check_square(l2, "second factor")?;
    Ok(kron(&Array2::eye(n2), l1) + kron(l2, &Array2::eye(n1)))
}

/// Left fold of [`kronecker_sum_adjacency`]; row-major vertex order.
pub fn product_adjacency(pg: &ProductGraph) -> Result<Array2<f64>> {
    let mut acc = pg.factors[0].weights().clone();
    for g in &pg.factors[1..] {
        acc = kronecker_sum_adjacency(&acc, g.weights())?;
    }
    Ok(acc)
}

/// Left fold of [`kronecker_sum_laplacian`] over `((G1 □ G2) □ …) □ Gm`.
///
/// The result indexes vertices with the first factor fastest; apply
/// [`permute_symmetric`] with [`eq2_permutation`] to obtain the row-major layout.
pub fn product_laplacian(pg: &ProductGraph) -> Result<Array2<f64>> {
    let mut acc = laplacian(&pg.factors[0])?;
    for g in &pg.factors[1..] {
        acc = kronecker_sum_laplacian(&acc, &laplacian(g)?)?;
    }
    Ok(acc)
}

/// `perm[row_major] = first_factor_fastest` for the vertex with the same multi-index.
pub fn eq2_permutation(dims: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|flat| {
            let idx = MultiIndex::from_flat(flat, dims);
            idx.0.iter().zip(dims).rev().fold(0, |acc, (&l, &n)| acc * n + l)
        })
        .collect()
}

/// `out[a][b] = m[perm[a]][perm[b]]`.
pub fn permute_symmetric<T: Copy>(m: &Array2<T>, perm: &[usize]) -> Array2<T> {
    Array2::from_shape_fn((perm.len(), perm.len()), |(a, b)| m[[perm[a], perm[b]]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle, build_grid, build_path};
    use ndarray::array;

    // Cartesian-product edge rule: (u1,u2) ~ (v1,v2) iff one coordinate equal, other adjacent.
    fn enumerate_product_adjacency(a: &Graph, b: &Graph) -> Array2<f64> {
        let (n1, n2) = (a.n(), b.n());
        let mut w = Array2::zeros((n1 * n2, n1 * n2));
        for u1 in 0..n1 {
            for u2 in 0..n2 {
                for v1 in 0..n1 {
                    for v2 in 0..n2 {
                        let weight = if u1 == v1 {
                            b.weights()[[u2, v2]]
                        } else if u2 == v2 {
                            a.weights()[[u1, v1]]
                        } else {
                            0.0
                        };
                        w[[u1 * n2 + u2, v1 * n2 + v2]] = weight;
                    }
                }
            }
        }
        w
    }

    #[test]
    fn adjacency_sum_of_two_edges_is_square() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        let sum = kronecker_sum_adjacency(&w, &w).unwrap();
        let p2 = build_path(2).unwrap();
        assert_eq!(sum, enumerate_product_adjacency(&p2, &p2));
        assert_eq!(&sum, build_grid(2, 2).unwrap().weights());
        // it is a 4-cycle: every vertex has degree 2
        assert!(sum.rows().into_iter().all(|r| r.sum() == 2.0));
    }

    #[test]
    fn adjacency_sum_trivial_factors() {
        let w1 = build_cycle(3).unwrap().weights().clone();
        let zero1 = Array2::<f64>::zeros((1, 1));
        assert_eq!(kronecker_sum_adjacency(&w1, &zero1).unwrap(), w1);
        let w2 = build_path(3).unwrap().weights().clone();
        let z2 = Array2::<f64>::zeros((2, 2));
        assert_eq!(kronecker_sum_adjacency(&z2, &w2).unwrap(), kron(&Array2::eye(2), &w2));
    }

    #[test]
    fn non_square_rejected() {
        let bad = Array2::<f64>::zeros((2, 3));
        let ok = Array2::<f64>::zeros((2, 2));
        assert!(kronecker_sum_adjacency(&bad, &ok).is_err());
        assert!(kronecker_sum_laplacian(&ok, &bad).is_err());
    }

    #[test]
    fn laplacian_sum_trivial_second_factor() {
        let l1 = laplacian(&build_path(2).unwrap()).unwrap();
        let z = Array2::<f64>::zeros((1, 1));
        assert_eq!(kronecker_sum_laplacian(&l1, &z).unwrap(), l1);
    }

    #[test]
    fn laplacian_sum_matches_enumerated_grid_after_permutation() {
        let (p2, p3) = (build_path(2).unwrap(), build_path(3).unwrap());
        let l = kronecker_sum_laplacian(&laplacian(&p2).unwrap(), &laplacian(&p3).unwrap()).unwrap();
        let enumerated = Graph::new(enumerate_product_adjacency(&p2, &p3), false).unwrap();
        let expected = laplacian(&enumerated).unwrap();
        assert_eq!(permute_symmetric(&l, &eq2_permutation(&[2, 3])), expected);
    }

    #[test]
    fn product_laplacian_matches_grid_exactly() {
        for (r, c) in [(1, 1), (2, 2), (3, 4), (5, 2)] {
            let pg = ProductGraph::new(vec![build_path(r).unwrap(), build_path(c).unwrap()]).unwrap();
            let folded = product_laplacian(&pg).unwrap();
            let grid = laplacian(&build_grid(r, c).unwrap()).unwrap();
            assert_eq!(permute_symmetric(&folded, &eq2_permutation(&[r, c])), grid);
            assert_eq!(&product_adjacency(&pg).unwrap(), build_grid(r, c).unwrap().weights());
        }
    }

    #[test]
    fn product_laplacian_fold_base_cases() {
        let p3 = build_path(3).unwrap();
        let single = ProductGraph::new(vec![p3.clone()]).unwrap();
        assert_eq!(product_laplacian(&single).unwrap(), laplacian(&p3).unwrap());
        let c4 = build_cycle(4).unwrap();
        let pair = ProductGraph::new(vec![p3.clone(), c4.clone()]).unwrap();
        let direct =
            kronecker_sum_laplacian(&laplacian(&p3).unwrap(), &laplacian(&c4).unwrap()).unwrap();
        assert_eq!(product_laplacian(&pair).unwrap(), direct);
        assert!(ProductGraph::new(vec![]).is_err());
    }

    #[test]
    fn multi_index_round_trip() {
        let dims = [3, 4, 2];
        for flat in 0..24 {
            let idx = MultiIndex::from_flat(flat, &dims);
            idx.validate(&dims).unwrap();
            assert_eq!(idx.flat(&dims), flat);
        }
        assert!(MultiIndex::new(vec![3, 0, 0]).validate(&dims).is_err());
        assert!(MultiIndex::new(vec![0, 0]).validate(&dims).is_err());
        assert_eq!(MultiIndex::new(vec![1, 2]).to_string(), "(1,2)");
    }

    #[test]
    fn eq2_permutation_reverses_factor_order() {
        // dims (2,3): row-major (n1,n2) -> n1 + 2*n2
        assert_eq!(eq2_permutation(&[2, 3]), vec![0, 2, 4, 1, 3, 5]);
    }
}
