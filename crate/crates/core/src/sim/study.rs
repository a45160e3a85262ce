use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DEFAULT_MST_CAP;
use crate::inference::{draw_rng, normal_pvalue, null_moments, permutation_map, pvalue_from_draws};
use crate::stats::{StatSpec, Statistic};
use crate::table::ContingencyTable;

use super::{HaplotypeModel, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StudyConfig {
    pub runs: usize,
    /// Permutations per run.
    pub permutations: usize,
    pub seed: u64,
    /// Enumeration cap for aMST and aMDP.
    pub cap: u64,
}

impl StudyConfig {
    pub fn new(runs: usize, permutations: usize, seed: u64) -> Self {
        Self {
            runs,
            permutations,
            seed,
            cap: DEFAULT_MST_CAP,
        }
    }

    fn check(&self) -> Result<()> {
        if self.runs == 0 || self.permutations == 0 {
            return Err(Error::InvalidParameter("need runs >= 1 and permutations >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerRow {
    pub statistic: String,
    pub alpha: f64,
    pub power: f64,
    pub stderr: f64,
    /// Runs in which the statistic could be computed.
    #[serde(skip)]
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerStudy {
    pub rows: Vec<PowerRow>,
    /// Permutation p-values per statistic, in run order; `None` where the
    /// statistic could not be built.
    pub pvalues: Vec<(StatSpec, Vec<Option<f64>>)>,
}

fn build_all(stats: &[StatSpec], table: &ContingencyTable, d: &crate::DistanceMatrix, cap: u64) -> Vec<Option<Statistic>> {
    stats
        .iter()
        .map(|spec| match spec.build(table, d, cap) {
            Ok(s) => Some(s),
            Err(e) => {
                log::warn!("{spec} skipped in this run: {e}");
                None
            }
        })
        .collect()
}

/// Permutation p-values of every statistic, sharing one set of draws.
fn shared_pvalues(table: &ContingencyTable, built: &[Option<Statistic>], b: usize, seed: u64) -> Vec<Option<f64>> {
    if table.n_a() == 0 || table.n_b() == 0 {
        return built.iter().map(|s| s.as_ref().map(|_| 1.0)).collect();
    }
    let draws = permutation_map(table, b, seed, |c| {
        built
            .iter()
            .map(|s| s.as_ref().map_or(f64::NAN, |s| s.eval(c)))
            .collect::<Vec<f64>>()
    });
    built
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.as_ref().map(|s| {
                let column: Vec<f64> = draws.iter().map(|row| row[i]).collect();
                pvalue_from_draws(s.eval(table.counts_a()), &column, s.kind().upper_tail())
            })
        })
        .collect()
}

/// Fraction of runs with permutation p-value at most `alpha`, per statistic
/// and level.
pub fn power_study(
    scenario: &Scenario,
    stats: &[StatSpec],
    alphas: &[f64],
    config: &StudyConfig,
) -> Result<PowerStudy> {
    config.check()?;
    let per_run: Vec<Vec<Option<f64>>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = draw_rng(config.seed, run);
            let perm_seed: u64 = rng.random();
            let (table, d) = scenario.generate(&mut rng)?;
            let built = build_all(stats, &table, &d, config.cap);
            Ok(shared_pvalues(&table, &built, config.permutations, perm_seed))
        })
        .collect::<Result<_>>()?;

    let pvalues: Vec<(StatSpec, Vec<Option<f64>>)> = stats
        .iter()
        .enumerate()
        .map(|(i, &spec)| (spec, per_run.iter().map(|run| run[i]).collect()))
        .collect();
    let mut rows = Vec::new();
    for (spec, ps) in &pvalues {
        let ok: Vec<f64> = ps.iter().flatten().copied().collect();
        for &alpha in alphas {
            let n = ok.len();
            let power = if n == 0 {
                f64::NAN
            } else {
                ok.iter().filter(|&&p| p <= alpha + 1e-12).count() as f64 / n as f64
            };
            rows.push(PowerRow {
                statistic: spec.name().to_string(),
                alpha,
                power,
                stderr: (power * (1.0 - power) / n as f64).sqrt(),
                runs: n,
            });
        }
    }
    Ok(PowerStudy { rows, pvalues })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub length: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub statistic: String,
    pub run: usize,
    /// `p_normal - p_perm`.
    pub diff: f64,
}

/// For each `(length, N)` cell, null haplotype data and the difference
/// between normal-approximation and permutation p-values per run.
pub fn pvalue_accuracy(
    lengths: &[usize],
    sizes: &[usize],
    stats: &[StatSpec],
    config: &StudyConfig,
) -> Result<Vec<AccuracyRow>> {
    config.check()?;
    let mut rows = Vec::new();
    for (cell, (&length, &n)) in lengths
        .iter()
        .flat_map(|l| sizes.iter().map(move |n| (l, n)))
        .enumerate()
    {
        let scenario = Scenario::Haplotype {
            model: HaplotypeModel::null(length),
            n_subjects: n,
        };
        let cell_seed: u64 = draw_rng(config.seed, cell as u64).random();
        let per_run: Vec<Vec<Option<f64>>> = (0..config.runs as u64)
            .into_par_iter()
            .map(|run| {
                let mut rng = draw_rng(cell_seed, run);
                let perm_seed: u64 = rng.random();
                let (table, d) = scenario.generate(&mut rng)?;
                let built = build_all(stats, &table, &d, config.cap);
                let perm = shared_pvalues(&table, &built, config.permutations, perm_seed);
                Ok(built
                    .iter()
                    .zip(perm)
                    .map(|(s, p_perm)| {
                        let s = s.as_ref()?;
                        let moments = null_moments(s, &table).ok()??;
                        let value = s.eval(table.counts_a());
                        let (_, p_normal) = normal_pvalue(value, &moments, s.kind().upper_tail()).ok()?;
                        Some(p_normal - p_perm?)
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (run, diffs) in per_run.into_iter().enumerate() {
            for (spec, diff) in stats.iter().zip(diffs) {
                match diff {
                    Some(diff) => rows.push(AccuracyRow {
                        length,
                        n,
                        statistic: spec.name().to_string(),
                        run,
                        diff,
                    }),
                    None => log::warn!("{spec}: no normal p-value in run {run} (length {length}, N {n})"),
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracySummary {
    pub length: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub statistic: String,
    pub runs: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub median_abs: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Boxplot quartiles of the differences per cell and statistic.
pub fn summarize_accuracy(rows: &[AccuracyRow]) -> Vec<AccuracySummary> {
    let mut cells: BTreeMap<(usize, usize, String), Vec<f64>> = BTreeMap::new();
    for r in rows {
        cells
            .entry((r.length, r.n, r.statistic.clone()))
            .or_default()
            .push(r.diff);
    }
    cells
        .into_iter()
        .map(|((length, n, statistic), mut diffs)| {
            diffs.sort_by(f64::total_cmp);
            let mut abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            abs.sort_by(f64::total_cmp);
            AccuracySummary {
                length,
                n,
                statistic,
                runs: diffs.len(),
                min: diffs[0],
                q1: quantile(&diffs, 0.25),
                median: quantile(&diffs, 0.5),
                q3: quantile(&diffs, 0.75),
                max: diffs[diffs.len() - 1],
                median_abs: quantile(&abs, 0.5),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_run_power_is_zero_or_one() {
        let s = Scenario::named("normal-shift").unwrap();
        let study = power_study(&s, &[StatSpec::UMst, StatSpec::Pearson], &[0.05], &StudyConfig::new(1, 99, 3)).unwrap();
        assert_eq!(study.rows.len(), 2);
        for row in &study.rows {
            assert!(row.power == 0.0 || row.power == 1.0);
        }
    }

    #[test]
    fn study_is_reproducible() {
        let s = Scenario::named("mallows").unwrap();
        let stats = [StatSpec::CUMst, StatSpec::CUNng, StatSpec::Deviance];
        let config = StudyConfig::new(8, 99, 21);
        let first = power_study(&s, &stats, &[0.01, 0.05], &config).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let second = pool.install(|| power_study(&s, &stats, &[0.01, 0.05], &config)).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.rows.len(), 6);
    }

    #[test]
    fn quartiles() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&xs, 0.5), 3.0);
        assert_eq!(quantile(&xs, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn accuracy_rows() {
        let rows = pvalue_accuracy(&[5], &[60], &[StatSpec::CUMst], &StudyConfig::new(4, 199, 2)).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.diff.abs() < 1.0 && r.length == 5 && r.n == 60));
        let summary = summarize_accuracy(&rows);
        assert_eq!(summary.len(), 1);
        assert!(summary[0].q1 <= summary[0].median && summary[0].median <= summary[0].q3);
    }
}
