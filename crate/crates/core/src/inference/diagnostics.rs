use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::graph::{graph_summary, CategoryGraph};
use crate::table::ContingencyTable;

pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// Ratios whose growth would undermine the normal approximation. Only the
/// ratios that must vanish asymptotically are compared to the threshold; the
/// bounded-order ratios are reported for information.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub flags: Vec<String>,
    pub ratios: BTreeMap<String, f64>,
}

const VANISHING: [&str; 4] = [
    "hub_nodes/K^1.5",
    "hub_edges/K^1.5",
    "beta^6*lambda^2/K",
    "lambda^8/K",
];

pub fn condition_diagnostics(
    table: &ContingencyTable,
    c0: &CategoryGraph,
    threshold: f64,
) -> Result<Diagnostics> {
    let s = graph_summary(c0, table)?;
    let m: Vec<f64> = table.margins().iter().map(|&x| x as f64).collect();
    let deg: Vec<f64> = s.degrees.iter().map(|&x| x as f64).collect();
    let hop: Vec<f64> = s.two_hop.iter().map(|&x| x as f64).collect();
    let nbr: Vec<f64> = s.neighbor_mass.iter().map(|&x| x as f64).collect();
    let k = table.k() as f64;
    let n = table.total() as f64;

    let hub_nodes: f64 = (0..m.len())
        .map(|u| m[u] * (m[u] + deg[u]) * (m[u] + nbr[u] + hop[u]))
        .sum();
    let adj = c0.adjacency();
    let hub_edges: f64 = c0
        .edges()
        .iter()
        .map(|&(u, v)| {
            let mut around: Vec<usize> = adj[u].iter().chain(&adj[v]).copied().collect();
            around.sort_unstable();
            around.dedup();
            let mass: f64 = around.iter().map(|&w| m[w]).sum();
            (m[u] + m[v] + deg[u] + deg[v]) * (m[u] + m[v] + mass + hop[u] + hop[v])
        })
        .sum();
    let theorem3: f64 = (0..m.len()).map(|u| m[u] * (m[u] + nbr[u]).powi(2)).sum();
    let beta = s.beta as f64;
    let lambda = s.lambda as f64;

    let mut ratios = BTreeMap::new();
    ratios.insert("hub_nodes/K^1.5".to_string(), hub_nodes / k.powf(1.5));
    ratios.insert("hub_edges/K^1.5".to_string(), hub_edges / k.powf(1.5));
    ratios.insert("beta^6*lambda^2/K".to_string(), beta.powi(6) * lambda.powi(2) / k);
    ratios.insert("lambda^8/K".to_string(), lambda.powi(8) / k);
    ratios.insert("N/K".to_string(), n / k);
    ratios.insert("|C0|/K".to_string(), s.n_edges as f64 / k);
    ratios.insert("sum_inv_edge_mass/K".to_string(), s.sum_inv_edge_mass / k);
    ratios.insert("star_mass/N".to_string(), theorem3 / n);

    let flags = VANISHING
        .iter()
        .filter(|name| ratios[**name] > threshold)
        .map(|name| {
            format!(
                "normal approximation questionable: {name} = {:.4} exceeds {threshold}",
                ratios[*name]
            )
        })
        .collect();
    Ok(Diagnostics { flags, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singletons(k: usize) -> ContingencyTable {
        let rows: Vec<(String, i64, i64)> = (0..k)
            .map(|i| (format!("c{i}"), (i % 2) as i64, 1 - (i % 2) as i64))
            .collect();
        ContingencyTable::from_records(&rows).unwrap()
    }

    #[test]
    fn path_ratios_vanish() {
        let at = |k: usize| {
            let g = CategoryGraph::new(k, (1..k).map(|i| (i - 1, i))).unwrap();
            condition_diagnostics(&singletons(k), &g, DEFAULT_THRESHOLD).unwrap()
        };
        let (small, large) = (at(100), at(10_000));
        for name in VANISHING {
            assert!(large.ratios[name] < 0.2 * small.ratios[name], "{name}");
        }
        assert!(large.flags.is_empty());
    }

    #[test]
    fn star_is_flagged() {
        let k = 100;
        let g = CategoryGraph::new(k, (1..k).map(|i| (0, i))).unwrap();
        let d = condition_diagnostics(&singletons(k), &g, DEFAULT_THRESHOLD).unwrap();
        assert!(d.ratios["lambda^8/K"] > 1e13);
        assert!(d.flags.iter().any(|f| f.contains("lambda^8/K")));
    }

    #[test]
    fn perfect_matching_is_tame() {
        let k = 10_000;
        let g = CategoryGraph::new(k, (0..k / 2).map(|i| (2 * i, 2 * i + 1))).unwrap();
        let d = condition_diagnostics(&singletons(k), &g, DEFAULT_THRESHOLD).unwrap();
        assert!(d.flags.is_empty());
        assert!(d.ratios["lambda^8/K"] < 1e-3);
        assert!(d.ratios["hub_nodes/K^1.5"] < 0.1);
    }
}
