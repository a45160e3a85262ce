//! Minimum spanning trees of the complete graph on categories.
//!
//! All MST questions here go through the same weight-class decomposition.
//! Edges are processed in classes of tied weight, in increasing order, on top
//! of the forest of components built from strictly lighter classes. Within a
//! class, an edge joining two different components belongs to some MST, and
//! the edges joining components form a multigraph whose connected pieces
//! ("blocks") are independent: the MSTs are exactly the unions of one spanning
//! tree per block, over all classes. Contracting the class then yields the
//! forest for the next one.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::matrix_tree::{count_spanning_trees, log10_spanning_trees};
use super::spanning::enumerate_spanning_trees;
use super::union_find::UnionFind;
use super::CategoryGraph;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Default bound on the number of MSTs the enumerating code will materialize.
pub const DEFAULT_MST_CAP: u64 = 1_000_000;

// Blocks above this size are first sized by a floating log-determinant.
const EXACT_BLOCK_LIMIT: usize = 160;

/// Complete-graph edges grouped into classes of tied weight, ascending.
/// Within a class edges are ordered by `(u, v)`.
fn weight_classes(d: &DistanceMatrix) -> Vec<(f64, Vec<(usize, usize)>)> {
    let k = d.k();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for u in 0..k {
        for v in u + 1..k {
            edges.push((d.get(u, v), u, v));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let tol = d.tolerance();
    let mut classes: Vec<(f64, Vec<(usize, usize)>)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (w, u, v) in edges {
        match classes.last_mut() {
            Some((_, class)) if w - last <= tol => class.push((u, v)),
            _ => classes.push((w, vec![(u, v)])),
        }
        last = w;
    }
    for (_, class) in &mut classes {
        class.sort_unstable();
    }
    classes
}

/// One independent piece of the MST choice: a connected multigraph on
/// components of the lighter forest, all of whose edges tie in weight.
#[derive(Clone, Debug)]
pub struct MstBlock {
    /// Number of components joined by this block.
    pub nodes: usize,
    /// Block edges on local component indices `0..nodes`.
    pub local_edges: Vec<(usize, usize)>,
    /// The category edge behind each local edge.
    pub category_edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl MstBlock {
    /// True when the block has exactly one spanning tree (it is a tree).
    pub fn is_forced(&self) -> bool {
        self.local_edges.len() + 1 == self.nodes
    }

    pub fn count(&self) -> BigUint {
        if self.is_forced() {
            BigUint::one()
        } else {
            count_spanning_trees(self.nodes, &self.local_edges)
        }
    }

    /// Spanning trees of the block as sorted lists of local edge indices.
    pub fn trees(&self, cap: u64) -> Result<Vec<Vec<usize>>> {
        if self.is_forced() {
            return Ok(vec![(0..self.local_edges.len()).collect()]);
        }
        enumerate_spanning_trees(self.nodes, &self.local_edges, cap)
    }
}

/// Weight-class decomposition of the MSTs of a distance matrix.
#[derive(Clone, Debug)]
pub struct MstStructure {
    k: usize,
    blocks: Vec<MstBlock>,
}

impl MstStructure {
    pub fn new(d: &DistanceMatrix) -> Self {
        let k = d.k();
        let mut forest = UnionFind::new(k);
        let mut blocks = Vec::new();
        for (weight, class) in weight_classes(d) {
            let candidates: Vec<(usize, usize, usize, usize)> = class
                .into_iter()
                .filter_map(|(u, v)| {
                    let (ru, rv) = (forest.find(u), forest.find(v));
                    (ru != rv).then_some((u, v, ru, rv))
                })
                .collect();
            if candidates.is_empty() {
                continue;
            }
            // group candidate edges into blocks by connectivity over roots
            let mut joined = UnionFind::new(k);
            for &(_, _, ru, rv) in &candidates {
                joined.union(ru, rv);
            }
            let mut block_of_root = std::collections::HashMap::new();
            let mut local_of_root = std::collections::HashMap::new();
            let first_block = blocks.len();
            for &(u, v, ru, rv) in &candidates {
                let key = joined.find(ru);
                let b = *block_of_root.entry(key).or_insert_with(|| {
                    blocks.push(MstBlock {
                        nodes: 0,
                        local_edges: Vec::new(),
                        category_edges: Vec::new(),
                        weight,
                    });
                    blocks.len() - 1
                });
                let mut local = |root: usize, blocks: &mut Vec<MstBlock>| {
                    *local_of_root.entry(root).or_insert_with(|| {
                        let idx = blocks[b].nodes;
                        blocks[b].nodes += 1;
                        idx
                    })
                };
                let lu = local(ru, &mut blocks);
                let lv = local(rv, &mut blocks);
                blocks[b].local_edges.push((lu, lv));
                blocks[b].category_edges.push((u, v));
            }
            debug_assert!(blocks[first_block..].iter().all(|b| b.nodes >= 2));
            for &(u, v, _, _) in &candidates {
                forest.union(u, v);
            }
        }
        Self { k, blocks }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[MstBlock] {
        &self.blocks
    }

    /// Edges that belong to at least one MST.
    pub fn union_edges(&self) -> CategoryGraph {
        CategoryGraph::new(
            self.k,
            self.blocks.iter().flat_map(|b| b.category_edges.iter().copied()),
        )
        .expect("block edges are valid category edges")
    }

    /// Exact number of MSTs.
    pub fn count(&self) -> BigUint {
        self.blocks.iter().map(MstBlock::count).product()
    }

    /// `log10` of the number of MSTs; large blocks use a floating estimate.
    pub fn log10_count(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| !b.is_forced())
            .map(|b| {
                if b.nodes <= EXACT_BLOCK_LIMIT {
                    log10_big(&b.count())
                } else {
                    log10_spanning_trees(b.nodes, &b.local_edges)
                }
            })
            .sum()
    }

    /// The number of MSTs if it is at most `cap`, otherwise `CapExceeded`.
    pub fn count_within(&self, cap: u64) -> Result<u64> {
        let exceeded = |count: String| Error::CapExceeded {
            what: "minimum spanning trees",
            count,
            cap,
        };
        let estimate = self.log10_count();
        if estimate > (cap.max(1) as f64).log10() + 0.5 {
            let has_large = self
                .blocks
                .iter()
                .any(|b| !b.is_forced() && b.nodes > EXACT_BLOCK_LIMIT);
            let count = if has_large || estimate > 60.0 {
                format!("about {}", format_log10(estimate))
            } else {
                self.count().to_string()
            };
            return Err(exceeded(count));
        }
        let exact = self.count();
        match exact.to_u64() {
            Some(m) if m <= cap => Ok(m),
            _ => Err(exceeded(exact.to_string())),
        }
    }

    /// All MSTs, in a fixed order, provided there are at most `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<CategoryGraph>> {
        self.count_within(cap)?;
        let per_block: Vec<Vec<Vec<usize>>> = self
            .blocks
            .iter()
            .map(|b| b.trees(cap))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        let mut choice = vec![0usize; per_block.len()];
        loop {
            let edges = choice.iter().enumerate().flat_map(|(b, &c)| {
                per_block[b][c]
                    .iter()
                    .map(move |&e| self.blocks[b].category_edges[e])
            });
            out.push(CategoryGraph::new(self.k, edges).expect("valid tree edges"));
            // odometer over block choices, last block fastest
            let mut pos = per_block.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < per_block[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }
}

fn log10_big(n: &BigUint) -> f64 {
    let digits = n.to_string();
    let lead: f64 = digits[..digits.len().min(15)].parse().unwrap_or(1.0);
    lead.log10() + (digits.len() - digits.len().min(15)) as f64
}

fn format_log10(x: f64) -> String {
    let exp = x.floor();
    format!("{:.3}e{}", 10f64.powf(x - exp), exp as i64)
}

/// A single MST; among ties, Kruskal order on `(weight, u, v)` decides.
pub fn mst_single(d: &DistanceMatrix) -> CategoryGraph {
    let mut forest = UnionFind::new(d.k());
    let mut edges = Vec::with_capacity(d.k().saturating_sub(1));
    for (_, class) in weight_classes(d) {
        for (u, v) in class {
            if forest.union(u, v) {
                edges.push((u, v));
            }
        }
    }
    CategoryGraph::new(d.k(), edges).expect("Kruskal edges are valid")
}

/// Edges that appear in at least one MST.
pub fn umst_edges(d: &DistanceMatrix) -> CategoryGraph {
    MstStructure::new(d).union_edges()
}

/// Exact number of distinct MSTs.
pub fn count_msts(d: &DistanceMatrix) -> BigUint {
    MstStructure::new(d).count()
}

/// All distinct MSTs, or `CapExceeded` when there are more than `cap`.
pub fn enumerate_msts(d: &DistanceMatrix, cap: u64) -> Result<Vec<CategoryGraph>> {
    MstStructure::new(d).enumerate(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{pairwise_distance, Items, Metric};

    fn chain() -> DistanceMatrix {
        DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap()
    }

    pub(crate) fn hypercube(len: usize) -> DistanceMatrix {
        let ids: Vec<String> = (0..1usize << len)
            .map(|x| format!("{x:0len$b}"))
            .collect();
        pairwise_distance(Metric::Hamming, &Items::Strings(ids)).unwrap()
    }

    #[test]
    fn chain_has_unique_mst() {
        let d = chain();
        let t = mst_single(&d);
        assert_eq!(t.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(t.total_weight(&d), 2.0);
        assert_eq!(umst_edges(&d).edges(), &[(0, 1), (1, 2)]);
        assert_eq!(count_msts(&d), BigUint::one());
        assert_eq!(enumerate_msts(&d, 10).unwrap(), vec![t]);
    }

    #[test]
    fn tiny_sizes() {
        let one = DistanceMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(mst_single(&one).is_empty());
        assert_eq!(count_msts(&one), BigUint::one());
        assert_eq!(enumerate_msts(&one, 1).unwrap().len(), 1);
        let two = DistanceMatrix::from_fn(2, |_, _| 3.0).unwrap();
        assert_eq!(mst_single(&two).edges(), &[(0, 1)]);
    }

    #[test]
    fn all_ties() {
        let d = DistanceMatrix::from_fn(3, |_, _| 1.0).unwrap();
        assert_eq!(umst_edges(&d).len(), 3);
        assert_eq!(count_msts(&d), BigUint::from(3u32));
        let trees = enumerate_msts(&d, 10).unwrap();
        assert_eq!(trees.len(), 3);
        assert!(trees.iter().all(|t| t.is_spanning_tree()));
    }

    #[test]
    fn square_hypercube() {
        let d = hypercube(2);
        // 00,01,10,11: the 4-cycle, diagonals (distance 2) excluded
        assert_eq!(umst_edges(&d).edges(), &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let trees = enumerate_msts(&d, 10).unwrap();
        assert_eq!(trees.len(), 4);
        for t in &trees {
            assert_eq!(t.len(), 3);
            assert_eq!(t.total_weight(&d), 3.0);
        }
    }

    #[test]
    fn hypercube_counts() {
        assert_eq!(count_msts(&hypercube(2)), BigUint::from(4u32));
        assert_eq!(count_msts(&hypercube(3)), BigUint::from(384u32));
        assert_eq!(count_msts(&hypercube(4)), BigUint::from(42_467_328u64));
    }

    #[test]
    fn cap_reports_count() {
        let err = enumerate_msts(&hypercube(3), 100).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "minimum spanning trees",
                count: "384".into(),
                cap: 100
            }
        );
        let s = MstStructure::new(&hypercube(6));
        let err = s.count_within(DEFAULT_MST_CAP).unwrap_err().to_string();
        assert!(err.contains(" 1657509127047778993870601546036901052416000000,"), "{err}");
    }

    #[test]
    fn real_valued_ties_use_tolerance() {
        let d = DistanceMatrix::from_rows(&[
            vec![0.0, 0.5, 0.5 + 1e-12],
            vec![0.5, 0.0, 0.5],
            vec![0.5 + 1e-12, 0.5, 0.0],
        ])
        .unwrap();
        assert_eq!(count_msts(&d), BigUint::from(3u32));
    }
}
