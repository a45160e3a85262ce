//! Spanning-tree counts of multigraphs via the Matrix-Tree theorem.

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

fn reduced_laplacian(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut lap = vec![vec![0i64; n]; n];
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        lap[a][a] += 1;
        lap[b][b] += 1;
        lap[a][b] -= 1;
        lap[b][a] -= 1;
    }
    lap.pop();
    for row in &mut lap {
        row.pop();
    }
    lap
}

/// Exact number of spanning trees of a multigraph on `n` nodes. Parallel
/// edges count separately; loops are ignored.
pub fn count_spanning_trees(n: usize, edges: &[(usize, usize)]) -> BigUint {
    if n <= 1 {
        return BigUint::one();
    }
    let lap = reduced_laplacian(n, edges);
    let mut a: Vec<Vec<BigInt>> = lap
        .into_iter()
        .map(|row| row.into_iter().map(BigInt::from).collect())
        .collect();
    let det = bareiss_determinant(&mut a);
    det.to_biguint().unwrap_or_default()
}

/// Fraction-free Gaussian elimination; consumes the matrix.
fn bareiss_determinant(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// `log10` of the spanning-tree count, via a floating Cholesky factorization of
/// the reduced Laplacian. Returns `-inf` for a disconnected graph.
pub fn log10_spanning_trees(n: usize, edges: &[(usize, usize)]) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let lap = reduced_laplacian(n, edges);
    let m = lap.len();
    let dense = DMatrix::from_fn(m, m, |i, j| lap[i][j] as f64);
    match dense.cholesky() {
        Some(chol) => chol.l().diagonal().iter().map(|x| 2.0 * x.log10()).sum(),
        None => f64::NEG_INFINITY,
    }
}
