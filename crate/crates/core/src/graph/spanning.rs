//! Enumeration of all spanning trees of a small multigraph by edge exchange.
//!
//! The traversal starts from a depth-first spanning tree `T0` and walks the
//! exchange graph as a search tree: the parent of a tree `T != T0` is obtained
//! by inserting the lowest-indexed edge `f` of `T0` missing from `T` and
//! deleting the lowest-indexed non-`T0` edge on the cycle `f` closes. Every
//! spanning tree has exactly one parent and parents share one more edge with
//! `T0`, so a depth-first walk over children visits each tree once.

use crate::error::{Error, Result};

struct Multigraph<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
}

impl Multigraph<'_> {
    fn tree_adjacency(&self, in_tree: &[bool]) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if in_tree[e] {
                adj[a].push((e, b));
                adj[b].push((e, a));
            }
        }
        adj
    }

    fn dfs_tree(&self) -> Option<Vec<bool>> {
        let mut incident = vec![Vec::new(); self.n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a != b {
                incident[a].push((e, b));
                incident[b].push((e, a));
            }
        }
        let mut in_tree = vec![false; self.edges.len()];
        let mut seen = vec![false; self.n];
        let mut stack = vec![(0usize, 0usize)];
        seen[0] = true;
        let mut reached = 1;
        while let Some((node, next)) = stack.last_mut() {
            let node = *node;
            if *next >= incident[node].len() {
                stack.pop();
                continue;
            }
            let (e, other) = incident[node][*next];
            *next += 1;
            if !seen[other] {
                seen[other] = true;
                reached += 1;
                in_tree[e] = true;
                stack.push((other, 0));
            }
        }
        (reached == self.n).then_some(in_tree)
    }

    /// Edges on the tree path between `from` and `to`.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
        let mut via = vec![usize::MAX; self.n];
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &(e, y) in &adj[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    via[y] = e;
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = to;
        while x != from {
            path.push(via[x]);
            x = prev[x];
        }
        path
    }
}

struct Search<'a> {
    graph: Multigraph<'a>,
    in_t0: Vec<bool>,
    cap: u64,
    out: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn emit(&mut self, in_tree: &[bool]) -> Result<()> {
        if self.out.len() as u64 >= self.cap {
            return Err(Error::CapExceeded {
                what: "spanning trees",
                count: format!("more than {}", self.cap),
                cap: self.cap,
            });
        }
        self.out.push(
            in_tree
                .iter()
                .enumerate()
                .filter_map(|(e, &t)| t.then_some(e))
                .collect(),
        );
        Ok(())
    }

    fn visit(&mut self, in_tree: &mut Vec<bool>) -> Result<()> {
        self.emit(in_tree)?;
        let edges = self.graph.edges;
        let first_missing = (0..edges.len())
            .find(|&e| self.in_t0[e] && !in_tree[e])
            .unwrap_or(edges.len());

        for f in 0..first_missing {
            if !(self.in_t0[f] && in_tree[f]) {
                continue;
            }
            in_tree[f] = false;
            let adj = self.graph.tree_adjacency(in_tree);
            let side = reachable(&adj, edges[f].0, self.graph.n);
            for g in 0..edges.len() {
                let (x, y) = edges[g];
                if self.in_t0[g] || in_tree[g] || x == y || side[x] == side[y] {
                    continue;
                }
                in_tree[g] = true;
                let adj_child = self.graph.tree_adjacency(in_tree);
                let cycle = self.graph.tree_path(&adj_child, edges[f].0, edges[f].1);
                let leaving = cycle.iter().copied().filter(|&e| !self.in_t0[e]).min();
                if leaving == Some(g) {
                    self.visit(in_tree)?;
                }
                in_tree[g] = false;
            }
            in_tree[f] = true;
        }
        Ok(())
    }
}

fn reachable(adj: &[Vec<(usize, usize)>], start: usize, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for &(_, y) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// All spanning trees of the multigraph on `n` nodes, each given as the sorted
/// list of its edge indices. A disconnected graph has none; a single node has
/// one empty tree. Fails once more than `cap` trees have been found.
pub fn enumerate_spanning_trees(
    n: usize,
    edges: &[(usize, usize)],
    cap: u64,
) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let graph = Multigraph { n, edges };
    let Some(t0) = graph.dfs_tree() else {
        return Ok(Vec::new());
    };
    let mut search = Search {
        graph,
        in_t0: t0.clone(),
        cap,
        out: Vec::new(),
    };
    let mut current = t0;
    search.visit(&mut current)?;
    Ok(search.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::matrix_tree::count_spanning_trees;
    use crate::graph::UnionFind;
    use itertools::Itertools;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Every (n-1)-subset of edges that is acyclic.
    fn brute_force(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
        if n == 1 {
            return BTreeSet::from([vec![]]);
        }
        (0..edges.len())
            .combinations(n - 1)
            .filter(|subset| {
                let mut uf = UnionFind::new(n);
                subset.iter().all(|&e| uf.union(edges[e].0, edges[e].1))
            })
            .collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(enumerate_spanning_trees(1, &[], 10).unwrap(), vec![Vec::<usize>::new()]);
        let tri = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(enumerate_spanning_trees(3, &tri, 10).unwrap().len(), 3);
        assert!(enumerate_spanning_trees(3, &[(0, 1)], 10).unwrap().is_empty());
        let doubled = [(0, 1), (0, 1), (1, 2)];
        assert_eq!(enumerate_spanning_trees(3, &doubled, 10).unwrap().len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert_eq!(enumerate_spanning_trees(4, &k4, 16).unwrap().len(), 16);
        assert!(matches!(
            enumerate_spanning_trees(4, &k4, 15),
            Err(Error::CapExceeded { .. })
        ));
    }

    fn multigraph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..=6).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((0..n, 0..n), 0..12))
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force_and_matrix_tree((n, edges) in multigraph()) {
            let found = enumerate_spanning_trees(n, &edges, 1 << 20).unwrap();
            let unique: BTreeSet<Vec<usize>> = found.iter().cloned().collect();
            prop_assert_eq!(unique.len(), found.len());
            prop_assert_eq!(&unique, &brute_force(n, &edges));
            prop_assert_eq!(
                num_bigint::BigUint::from(found.len()),
                count_spanning_trees(n, &edges)
            );
        }
    }
}
