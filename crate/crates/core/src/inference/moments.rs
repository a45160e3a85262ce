use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{graph_summary, CategoryGraph};
use crate::stats::MixingPlan;
use crate::table::ContingencyTable;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullMoments {
    pub mean: f64,
    pub variance: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p4: Option<f64>,
}

impl NullMoments {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Probabilities that two, and four, fixed distinct subjects straddle the
/// groups in the pattern the moment formulas need, under relabeling with
/// fixed group sizes.
pub fn p1_p2(n_a: u64, n_b: u64) -> (f64, f64) {
    let (a, b) = (n_a as f64, n_b as f64);
    let n = a + b;
    let p1 = a * b / (n * (n - 1.0));
    let p2 = 4.0 * a * (a - 1.0) * b * (b - 1.0) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
    (p1, p2)
}

/// Same, with labels drawn independently at the observed group frequencies.
pub fn p3_p4(n_a: u64, n_b: u64) -> (f64, f64) {
    let (a, b) = (n_a as f64, n_b as f64);
    let n = a + b;
    let p3 = a * b / (n * n);
    (p3, 4.0 * p3 * p3)
}

fn check(table: &ContingencyTable, c0: &CategoryGraph) -> Result<()> {
    if table.total() < 4 {
        return Err(Error::TooFewSubjects(table.total() as usize));
    }
    if c0.k() != table.k() {
        return Err(Error::SizeMismatch {
            expected: table.k(),
            found: c0.k(),
        });
    }
    Ok(())
}

/// Shared bracket of the R_C0 variance:
/// `N - K + 2|C0| + sum |E_u|^2/(4 m_u) - sum |E_u|/m_u`.
fn r_bracket(table: &ContingencyTable, c0: &CategoryGraph) -> Result<(f64, f64, f64, f64)> {
    let s = graph_summary(c0, table)?;
    let n = table.total() as f64;
    let k = table.k() as f64;
    let edges = c0.len() as f64;
    let bracket = n - k + 2.0 * edges + s.sum_deg_sq_over_m / 4.0 - s.sum_deg_over_m;
    Ok((bracket, k - s.sum_inv_m, s.sum_inv_edge_mass, n - k + edges))
}

/// Permutation-null mean and variance of the mixing potential on `c0`.
pub fn perm_moments_r(table: &ContingencyTable, c0: &CategoryGraph) -> Result<NullMoments> {
    check(table, c0)?;
    let (p1, p2) = p1_p2(table.n_a(), table.n_b());
    let (bracket, k_minus_inv, inv_edge, size) = r_bracket(table, c0)?;
    let variance = 4.0 * (p1 - p2) * bracket
        + (6.0 * p2 - 4.0 * p1) * k_minus_inv
        + p2 * inv_edge
        + size * size * (p2 - 4.0 * p1 * p1);
    Ok(NullMoments {
        mean: size * 2.0 * p1,
        variance: variance.max(0.0),
        p1,
        p2,
        p3: None,
        p4: None,
    })
}

/// Permutation-null mean and variance of the cross-pair count on `c0`.
pub fn perm_moments_t(table: &ContingencyTable, c0: &CategoryGraph) -> Result<NullMoments> {
    check(table, c0)?;
    let (p1, p2) = p1_p2(table.n_a(), table.n_b());
    let m: Vec<f64> = table.margins().iter().map(|&x| x as f64).collect();
    let summary = graph_summary(c0, table)?;
    // twice the number of subject pairs joined
    let pairs2: f64 = m.iter().map(|x| x * (x - 1.0)).sum::<f64>()
        + 2.0 * c0.edges().iter().map(|&(u, v)| m[u] * m[v]).sum::<f64>();
    let star: f64 = m
        .iter()
        .zip(&summary.neighbor_mass)
        .map(|(&mu, &nb)| {
            let reach = mu + nb as f64;
            mu * (reach - 1.0) * (reach - 2.0)
        })
        .sum();
    // the last term carries pairs2^2 / 4, the squared number of joined pairs
    let variance = (p1 - p2) * star
        + (p1 - p2 / 2.0) * pairs2
        + (p2 - 4.0 * p1 * p1) * pairs2 * pairs2 / 4.0;
    Ok(NullMoments {
        mean: pairs2 * p1,
        variance: variance.max(0.0),
        p1,
        p2,
        p3: None,
        p4: None,
    })
}

/// Bootstrap-null mean and variance of the mixing potential on `c0`.
pub fn bootstrap_moments_r(table: &ContingencyTable, c0: &CategoryGraph) -> Result<NullMoments> {
    if c0.k() != table.k() {
        return Err(Error::SizeMismatch {
            expected: table.k(),
            found: c0.k(),
        });
    }
    let (p1, p2) = p1_p2(table.n_a(), table.n_b());
    let (p3, p4) = p3_p4(table.n_a(), table.n_b());
    let (bracket, k_minus_inv, inv_edge, size) = r_bracket(table, c0)?;
    let variance =
        4.0 * (p3 - p4) * bracket + (6.0 * p4 - 4.0 * p3) * k_minus_inv + p4 * inv_edge;
    Ok(NullMoments {
        mean: size * 2.0 * p3,
        variance: variance.max(0.0),
        p1: if p1.is_finite() { p1 } else { 0.0 },
        p2: if p2.is_finite() { p2 } else { 0.0 },
        p3: Some(p3),
        p4: Some(p4),
    })
}

/// Subject-level sums of a weighted pair statistic: total weight `W`, sum of
/// squared weights, and sum over subjects of squared weighted degree.
fn pair_weight_sums(plan: &MixingPlan) -> (f64, f64, f64) {
    let m: Vec<f64> = plan.margins().iter().map(|&x| x as f64).collect();
    let node = plan.node_weights();
    let mut strength: Vec<f64> = (0..m.len()).map(|k| node[k] * (m[k] - 1.0)).collect();
    let mut w = 0.0;
    let mut w2 = 0.0;
    for k in 0..m.len() {
        let pairs = m[k] * (m[k] - 1.0) / 2.0;
        w += node[k] * pairs;
        w2 += node[k] * node[k] * pairs;
    }
    for &(u, v, c) in plan.edge_weights() {
        let pairs = m[u] * m[v];
        w += c * pairs;
        w2 += c * c * pairs;
        strength[u] += c * m[v];
        strength[v] += c * m[u];
    }
    let a = m.iter().zip(&strength).map(|(mk, s)| mk * s * s).sum();
    (w, w2, a)
}

/// Permutation-null moments of any statistic in weighted pair form, from
/// first principles: a pair is cross with probability `2 p1`, two pairs
/// sharing a subject both are with probability `p1`, disjoint pairs with `p2`.
pub fn perm_moments_mixing(plan: &MixingPlan, n_a: u64) -> Result<NullMoments> {
    let n: u64 = plan.margins().iter().sum();
    if n < 4 {
        return Err(Error::TooFewSubjects(n as usize));
    }
    let (p1, p2) = p1_p2(n_a, n - n_a);
    let (w, w2, a) = pair_weight_sums(plan);
    let second = 2.0 * p1 * w2 + p1 * (a - 2.0 * w2) + p2 * (w * w - a + w2);
    Ok(NullMoments {
        mean: 2.0 * p1 * w,
        variance: (second - 4.0 * p1 * p1 * w * w).max(0.0),
        p1,
        p2,
        p3: None,
        p4: None,
    })
}

/// Bootstrap-null counterpart of [`perm_moments_mixing`].
pub fn bootstrap_moments_mixing(plan: &MixingPlan, n_a: u64) -> NullMoments {
    let n: u64 = plan.margins().iter().sum();
    let (p3, p4) = p3_p4(n_a, n - n_a);
    let (w, w2, a) = pair_weight_sums(plan);
    let variance = 2.0 * p3 * w2 + p3 * (a - 2.0 * w2) + p4 * (w2 - a);
    let (p1, p2) = if n >= 4 { p1_p2(n_a, n - n_a) } else { (0.0, 0.0) };
    NullMoments {
        mean: 2.0 * p3 * w,
        variance: variance.max(0.0),
        p1,
        p2,
        p3: Some(p3),
        p4: Some(p4),
    }
}
