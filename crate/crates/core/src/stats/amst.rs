//! Edge inclusion probabilities for the average over MSTs on subjects.
//!
//! An MST on categories with degrees `deg` embeds into `prod_k m_k^deg(k)`
//! MSTs on subjects, which is the product of `m_u m_v` over its edges. So the
//! average over subject MSTs weights each category MST by that product, and
//! the statistic only needs, per category edge, the weighted share of MSTs
//! containing it. MSTs are independent choices of one spanning tree per
//! block, so shares are computed block by block: for a weighted graph, the
//! weighted share of spanning trees through `e` is `w_e` times the effective
//! resistance across `e`.

use nalgebra::DMatrix;

use crate::graph::{MstBlock, MstStructure};

/// Weighted inclusion probability of each edge of the union of MSTs.
pub fn edge_inclusion(structure: &MstStructure, margins: &[u64]) -> Vec<((usize, usize), f64)> {
    let mut out = Vec::new();
    for block in structure.blocks() {
        if block.is_forced() {
            out.extend(block.category_edges.iter().map(|&e| (e, 1.0)));
        } else {
            out.extend(block_inclusion(block, margins));
        }
    }
    out
}

fn block_inclusion(block: &MstBlock, margins: &[u64]) -> Vec<((usize, usize), f64)> {
    let n = block.nodes;
    let weights: Vec<f64> = block
        .category_edges
        .iter()
        .map(|&(u, v)| margins[u] as f64 * margins[v] as f64)
        .collect();
    // Laplacian with the last node grounded
    let mut lap = DMatrix::<f64>::zeros(n - 1, n - 1);
    for (&(a, b), &w) in block.local_edges.iter().zip(&weights) {
        if a < n - 1 {
            lap[(a, a)] += w;
        }
        if b < n - 1 {
            lap[(b, b)] += w;
        }
        if a < n - 1 && b < n - 1 {
            lap[(a, b)] -= w;
            lap[(b, a)] -= w;
        }
    }
    let inv = lap
        .cholesky()
        .expect("block Laplacian is positive definite")
        .inverse();
    let g = |i: usize, j: usize| if i < n - 1 && j < n - 1 { inv[(i, j)] } else { 0.0 };
    block
        .local_edges
        .iter()
        .zip(&block.category_edges)
        .zip(&weights)
        .map(|((&(a, b), &e), &w)| {
            let resistance = g(a, a) + g(b, b) - 2.0 * g(a, b);
            (e, (w * resistance).clamp(0.0, 1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceMatrix;
    use crate::graph::enumerate_msts;

    /// Inclusion shares by explicit enumeration of the MSTs.
    fn by_enumeration(d: &DistanceMatrix, margins: &[u64]) -> Vec<((usize, usize), f64)> {
        let trees = enumerate_msts(d, 1 << 20).unwrap();
        let weight = |t: &crate::graph::CategoryGraph| -> f64 {
            t.edges()
                .iter()
                .map(|&(u, v)| (margins[u] * margins[v]) as f64)
                .product()
        };
        let total: f64 = trees.iter().map(weight).sum();
        let union = crate::graph::umst_edges(d);
        union
            .edges()
            .iter()
            .map(|&e| {
                let through: f64 = trees.iter().filter(|t| t.contains(e.0, e.1)).map(weight).sum();
                (e, through / total)
            })
            .collect()
    }

    #[test]
    fn matches_enumeration() {
        let cases: Vec<(DistanceMatrix, Vec<u64>)> = vec![
            (DistanceMatrix::from_fn(4, |_, _| 1.0).unwrap(), vec![1, 2, 3, 4]),
            (
                DistanceMatrix::from_fn(5, |i, j| ((i + j) % 3 + 1) as f64).unwrap(),
                vec![2, 1, 5, 1, 3],
            ),
            (
                DistanceMatrix::from_fn(6, |i, j| ((i * j) % 2 + 1) as f64).unwrap(),
                vec![1, 1, 2, 2, 3, 7],
            ),
        ];
        for (d, margins) in cases {
            let structure = MstStructure::new(&d);
            let mut got = edge_inclusion(&structure, &margins);
            got.sort_by_key(|a| a.0);
            let want = by_enumeration(&d, &margins);
            assert_eq!(got.len(), want.len());
            for ((e1, p1), (e2, p2)) in got.iter().zip(&want) {
                assert_eq!(e1, e2);
                assert!((p1 - p2).abs() < 1e-12, "{e1:?}: {p1} vs {p2}");
            }
            // each block contributes nodes - 1 expected edges
            let total: f64 = got.iter().map(|x| x.1).sum();
            assert!((total - (d.k() - 1) as f64).abs() < 1e-9);
        }
    }
}
