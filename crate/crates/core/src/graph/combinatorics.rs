use num_bigint::BigUint;
use num_traits::{One, Pow};

use super::CategoryGraph;
use crate::error::{Error, Result};
use crate::table::ContingencyTable;

/// Number of ways to realize a category spanning tree on subjects:
/// `prod_k m_k^deg(k)`.
pub fn count_embeddings(tree: &CategoryGraph, table: &ContingencyTable) -> Result<BigUint> {
    if tree.k() != table.k() || !tree.is_spanning_tree() {
        return Err(Error::NotSpanningTree { k: table.k() });
    }
    Ok(tree
        .degrees()
        .iter()
        .zip(table.margins())
        .map(|(&deg, &m)| Pow::pow(BigUint::from(m), deg))
        .product())
}

/// Labeled trees on `m` nodes, `m^(m-2)`.
pub fn cayley_count(m: u64) -> Result<BigUint> {
    match m {
        0 => Err(Error::CayleyZero),
        1 | 2 => Ok(BigUint::one()),
        _ => Ok(Pow::pow(BigUint::from(m), m - 2)),
    }
}
