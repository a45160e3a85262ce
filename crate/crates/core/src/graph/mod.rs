//! Graphs on categories: minimum spanning trees and their union, all-MST
//! enumeration and counting, union nearest-neighbour graphs, minimum
//! matchings, and the degree summaries the null moments are built from.

mod combinatorics;
mod matching;
mod matrix_tree;
mod mst;
mod spanning;
mod union_find;

use std::fmt::Write as _;

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::table::ContingencyTable;

pub use combinatorics::{cayley_count, count_embeddings};
pub use matching::{enumerate_min_matchings, enumerate_min_matchings_by, Matching};
pub use matrix_tree::{count_spanning_trees, log10_spanning_trees};
pub use mst::{
    count_msts, enumerate_msts, mst_single, umst_edges, MstBlock, MstStructure, DEFAULT_MST_CAP,
};
pub use spanning::enumerate_spanning_trees;
pub use union_find::UnionFind;

/// Simple undirected graph on category indices `0..k`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CategoryGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl CategoryGraph {
    /// Normalizes edge orientation and drops duplicate edges. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(k: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == v || u >= k || v >= k {
                return Err(Error::InvalidEdge { u, v, k });
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { k, edges: out })
    }

    pub fn empty(k: usize) -> Self {
        Self { k, edges: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.k];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.k];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn is_spanning_tree(&self) -> bool {
        if self.edges.len() + 1 != self.k {
            return false;
        }
        let mut uf = UnionFind::new(self.k);
        self.edges.iter().all(|&(u, v)| uf.union(u, v))
    }

    pub fn union(&self, other: &CategoryGraph) -> Result<CategoryGraph> {
        if self.k != other.k {
            return Err(Error::SizeMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        CategoryGraph::new(self.k, self.edges.iter().chain(&other.edges).copied())
    }

    pub fn total_weight(&self, d: &DistanceMatrix) -> f64 {
        self.edges.iter().map(|&(u, v)| d.get(u, v)).sum()
    }

    /// `u,v` lines with category ids, no header.
    pub fn to_csv<S: AsRef<str>>(&self, ids: &[S]) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{},{}", ids[u].as_ref(), ids[v].as_ref());
        }
        out
    }

    /// Graphviz rendering with each node labelled `id (n_a, n_b)`.
    pub fn to_dot(&self, table: &ContingencyTable) -> String {
        let mut out = String::from("graph categories {\n");
        for (k, id) in table.ids().iter().enumerate() {
            let _ = writeln!(
                out,
                "  {k} [label=\"{} ({}, {})\"];",
                id.replace('"', "\\\""),
                table.counts_a()[k],
                table.counts_b()[k]
            );
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Union nearest-neighbour graph on categories: `(u, v)` is an edge when `v`
/// is among the closest categories to `u` or vice versa, with ties included.
pub fn unng_categories(d: &DistanceMatrix) -> CategoryGraph {
    let k = d.k();
    let tol = d.tolerance();
    let mut edges = Vec::new();
    for u in 0..k {
        let nearest = (0..k)
            .filter(|&w| w != u)
            .map(|w| d.get(u, w))
            .fold(f64::INFINITY, f64::min);
        for v in 0..k {
            if v != u && d.get(u, v) <= nearest + tol {
                edges.push((u, v));
            }
        }
    }
    CategoryGraph::new(k, edges).expect("nearest neighbours are valid edges")
}

/// Degree-based quantities of a category graph paired with a table's margins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    /// `|E_u|`, the degree of each category.
    pub degrees: Vec<usize>,
    /// `|E_{u,2}|`: edges with at least one endpoint adjacent to `u`.
    pub two_hop: Vec<usize>,
    /// `sum_{v adjacent to u} m_v`.
    pub neighbor_mass: Vec<u64>,
    /// Maximum degree.
    pub lambda: usize,
    /// Maximum margin.
    pub beta: u64,
    pub n_edges: usize,
    pub sum_inv_m: f64,
    pub sum_deg_over_m: f64,
    pub sum_deg_sq_over_m: f64,
    /// `sum over edges of 1 / (m_u m_v)`.
    pub sum_inv_edge_mass: f64,
}

pub fn graph_summary(g: &CategoryGraph, table: &ContingencyTable) -> Result<GraphSummary> {
    if g.k() != table.k() {
        return Err(Error::SizeMismatch {
            expected: table.k(),
            found: g.k(),
        });
    }
    let m = table.margins();
    let adj = g.adjacency();
    let degrees = g.degrees();
    let k = g.k();

    let mut marks = vec![usize::MAX; k];
    let mut two_hop = vec![0; k];
    for u in 0..k {
        for &v in &adj[u] {
            marks[v] = u;
        }
        // edges touching a neighbour, minus those counted from both ends
        let mut touching = 0;
        let mut inside = 0;
        for &v in &adj[u] {
            touching += degrees[v];
            inside += adj[v].iter().filter(|&&w| marks[w] == u).count();
        }
        two_hop[u] = touching - inside / 2;
    }

    let neighbor_mass = adj
        .iter()
        .map(|nbrs| nbrs.iter().map(|&v| m[v]).sum())
        .collect();
    let mf: Vec<f64> = m.iter().map(|&x| x as f64).collect();
    Ok(GraphSummary {
        lambda: degrees.iter().copied().max().unwrap_or(0),
        beta: m.iter().copied().max().unwrap_or(0),
        n_edges: g.len(),
        sum_inv_m: mf.iter().map(|x| 1.0 / x).sum(),
        sum_deg_over_m: degrees.iter().zip(&mf).map(|(&e, x)| e as f64 / x).sum(),
        sum_deg_sq_over_m: degrees
            .iter()
            .zip(&mf)
            .map(|(&e, x)| (e * e) as f64 / x)
            .sum(),
        sum_inv_edge_mass: g.edges().iter().map(|&(u, v)| 1.0 / (mf[u] * mf[v])).sum(),
        degrees,
        two_hop,
        neighbor_mass,
    })
}
