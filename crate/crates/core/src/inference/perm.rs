//! Permutation null: Monte Carlo draws and exact enumeration.
//!
//! Draw `b` relabels the subjects with a ChaCha8 generator seeded from the
//! master seed and switched to stream `b`, so every draw is a pure function of
//! `(seed, b)` and results do not depend on how draws are spread over threads.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::ContingencyTable;

const EXACT_LIMIT: u128 = 1_000_000;

/// Generator for draw `index` under `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Group-`a` counts for one uniform relabeling with the group sizes fixed.
fn draw_counts(
    template: &[u32],
    buffer: &mut Vec<u32>,
    counts: &mut [u64],
    n_a: usize,
    rng: &mut ChaCha8Rng,
) {
    buffer.clear();
    buffer.extend_from_slice(template);
    let (chosen, _) = buffer.partial_shuffle(rng, n_a);
    counts.iter_mut().for_each(|c| *c = 0);
    for &k in chosen.iter() {
        counts[k as usize] += 1;
    }
}

/// Evaluates `f` on `b` permuted count vectors, in draw order.
pub fn permutation_map<T, F>(table: &ContingencyTable, b: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[u64]) -> T + Sync,
{
    let template: Vec<u32> = table
        .margins()
        .iter()
        .enumerate()
        .flat_map(|(k, &m)| std::iter::repeat_n(k as u32, m as usize))
        .collect();
    let n_a = table.n_a() as usize;
    let k = table.k();
    (0..b as u64)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(template.len()), vec![0u64; k]),
            |(buffer, counts), index| {
                let mut rng = draw_rng(seed, index);
                draw_counts(&template, buffer, counts, n_a, &mut rng);
                f(counts)
            },
        )
        .collect()
}

fn tie_tolerance(observed: f64) -> f64 {
    1e-9 * observed.abs().max(1.0)
}

/// Add-one Monte Carlo p-value from null draws. Lower tail unless `upper`.
pub fn pvalue_from_draws(observed: f64, draws: &[f64], upper: bool) -> f64 {
    let tol = tie_tolerance(observed);
    let extreme = draws
        .iter()
        .filter(|&&s| {
            if upper {
                s >= observed - tol
            } else {
                s <= observed + tol
            }
        })
        .count();
    (1 + extreme) as f64 / (draws.len() + 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermOutcome {
    pub p: f64,
    pub b: usize,
    pub seed: u64,
    /// Mean and variance of the draws.
    pub mean: f64,
    pub variance: f64,
}

/// Monte Carlo permutation p-value, `(1 + #{S_b at least as extreme}) / (B + 1)`.
/// A table with an empty group gets `p = 1`.
pub fn mc_perm_pvalue<F>(
    statistic: F,
    table: &ContingencyTable,
    b: usize,
    seed: u64,
    upper: bool,
) -> Result<PermOutcome>
where
    F: Fn(&[u64]) -> f64 + Sync,
{
    if b == 0 {
        return Err(Error::InvalidParameter("need at least one permutation".into()));
    }
    if table.n_a() == 0 || table.n_b() == 0 {
        log::warn!("one group is empty; every relabeling is identical, p = 1");
        let value = statistic(table.counts_a());
        return Ok(PermOutcome {
            p: 1.0,
            b,
            seed,
            mean: value,
            variance: 0.0,
        });
    }
    let observed = statistic(table.counts_a());
    let draws = permutation_map(table, b, seed, &statistic);
    let (mean, variance) = mean_var(&draws);
    Ok(PermOutcome {
        p: pvalue_from_draws(observed, &draws, upper),
        b,
        seed,
        mean,
        variance,
    })
}

pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Every relabeling with fixed group sizes, grouped by the count vector it
/// produces.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    /// `(value, number of relabelings giving it)`, one entry per count vector.
    pub atoms: Vec<(f64, u64)>,
    pub total: u64,
}

impl ExactDistribution {
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, w)| v * w as f64).sum::<f64>() / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.atoms
            .iter()
            .map(|&(v, w)| (v - mean).powi(2) * w as f64)
            .sum::<f64>()
            / self.total as f64
    }

    /// Exact p-value of `observed`; lower tail unless `upper`.
    pub fn pvalue(&self, observed: f64, upper: bool) -> f64 {
        let tol = tie_tolerance(observed);
        let hits: u64 = self
            .atoms
            .iter()
            .filter(|&&(v, _)| if upper { v >= observed - tol } else { v <= observed + tol })
            .map(|&(_, w)| w)
            .sum();
        hits as f64 / self.total as f64
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    out
}

/// Exact permutation distribution, for tables with at most 10^6 relabelings.
pub fn exact_perm_distribution<F>(statistic: F, table: &ContingencyTable) -> Result<ExactDistribution>
where
    F: Fn(&[u64]) -> f64,
{
    let total = binomial_u128(table.total(), table.n_a());
    if total > EXACT_LIMIT {
        return Err(Error::TooLarge(total));
    }
    let margins = table.margins();
    let mut atoms = Vec::new();
    let mut counts = vec![0u64; margins.len()];
    // remaining capacity of categories k.. to absorb group-a subjects
    let mut tail = vec![0u64; margins.len() + 1];
    for k in (0..margins.len()).rev() {
        tail[k] = tail[k + 1] + margins[k];
    }
    fill(0, table.n_a(), 1, margins, &tail, &mut counts, &statistic, &mut atoms);
    Ok(ExactDistribution {
        atoms,
        total: total as u64,
    })
}

#[allow(clippy::too_many_arguments)]
fn fill<F: Fn(&[u64]) -> f64>(
    k: usize,
    left: u64,
    weight: u64,
    margins: &[u64],
    tail: &[u64],
    counts: &mut [u64],
    statistic: &F,
    atoms: &mut Vec<(f64, u64)>,
) {
    if k == margins.len() {
        atoms.push((statistic(counts), weight));
        return;
    }
    let lo = left.saturating_sub(tail[k + 1]);
    for a in lo..=left.min(margins[k]) {
        counts[k] = a;
        let w = weight * binomial_u128(margins[k], a) as u64;
        fill(k + 1, left - a, w, margins, tail, counts, statistic, atoms);
    }
    counts[k] = 0;
}
