//! Scenario generators and the power and p-value accuracy studies.
//!
//! Replicate `r` of a study draws its data from a ChaCha8 generator seeded
//! with the master seed and switched to stream `r`, the same scheme the
//! permutation draws use, so a study is reproducible from one `u64`.

mod study;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Normal, Uniform};

use crate::distance::{pairwise_distance, DistanceMatrix, Items, Metric, Ranking};
use crate::error::{Error, Result};
use crate::inference::draw_rng;
use crate::table::ContingencyTable;

pub use study::{
    power_study, pvalue_accuracy, summarize_accuracy, AccuracyRow, AccuracySummary, PowerRow,
    PowerStudy, StudyConfig,
};

const MAX_MALLOWS_OBJECTS: usize = 8;
const MAX_HAPLOTYPE_LENGTH: usize = 16;

/// A continuous sampling distribution for the binned scenarios.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dist {
    Normal { mean: f64, variance: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Dist {
    pub fn normal(mean: f64, variance: f64) -> Self {
        Dist::Normal { mean, variance }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Dist::Uniform { lo, hi }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            Dist::Normal { mean, variance } => mean.is_finite() && variance.is_finite() && variance > 0.0,
            Dist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad distribution {self}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            Dist::Normal { mean, variance } => {
                let normal = Normal::new(mean, variance.sqrt()).expect("checked parameters");
                (0..n).map(|_| normal.sample(rng)).collect()
            }
            Dist::Uniform { lo, hi } => {
                let uniform = Uniform::new(lo, hi).expect("checked parameters");
                (0..n).map(|_| uniform.sample(rng)).collect()
            }
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Normal { mean, variance } => write!(f, "normal({mean},{variance})"),
            Dist::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
        }
    }
}

impl FromStr for Dist {
    type Err = Error;

    /// `normal(mean,variance)` or `uniform(lo,hi)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse distribution '{s}'"));
        let (name, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let args: Vec<f64> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let dist = match (name.trim().to_ascii_lowercase().as_str(), args.as_slice()) {
            ("normal" | "n", [m, v]) => Dist::normal(*m, *v),
            ("uniform" | "u", [lo, hi]) => Dist::uniform(*lo, *hi),
            _ => return Err(bad()),
        };
        dist.check()?;
        Ok(dist)
    }
}

/// Pools `n_per_group` draws from each distribution, cuts the pooled range
/// into `bins` equal-width bins and keeps the nonempty ones. Category ids are
/// the 1-based bin numbers; distances are differences in rank among the kept
/// bins.
pub fn binned_scenario<R: Rng + ?Sized>(
    dist_a: Dist,
    dist_b: Dist,
    n_per_group: usize,
    bins: usize,
    rng: &mut R,
) -> Result<(ContingencyTable, DistanceMatrix)> {
    if n_per_group == 0 || bins < 2 {
        return Err(Error::InvalidParameter(
            "binned scenario needs n_per_group >= 1 and bins >= 2".into(),
        ));
    }
    dist_a.check()?;
    dist_b.check()?;
    let xa = dist_a.sample(n_per_group, rng);
    let xb = dist_b.sample(n_per_group, rng);
    bin_samples(&xa, &xb, bins)
}

/// Equal-width binning of two observed samples over their pooled range.
pub fn bin_samples(xa: &[f64], xb: &[f64], bins: usize) -> Result<(ContingencyTable, DistanceMatrix)> {
    if bins < 2 {
        return Err(Error::InvalidParameter("need at least 2 bins".into()));
    }
    if xa.iter().chain(xb).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample value".into()));
    }
    let (lo, hi) = xa
        .iter()
        .chain(xb)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if hi <= lo {
        return Err(Error::DegenerateSample);
    }
    let width = (hi - lo) / bins as f64;
    let bin_of = |x: f64| (((x - lo) / width) as usize).min(bins - 1);
    let mut counts = vec![(0i64, 0i64); bins];
    for &x in xa {
        counts[bin_of(x)].0 += 1;
    }
    for &x in xb {
        counts[bin_of(x)].1 += 1;
    }
    let rows: Vec<(String, i64, i64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| a + b > 0)
        .map(|(i, &(a, b))| ((i + 1).to_string(), a, b))
        .collect();
    let table = ContingencyTable::from_records(&rows)?;
    let d = DistanceMatrix::from_fn(table.k(), |i, j| j as f64 - i as f64)?;
    Ok((table, d))
}

/// Exact Mallows distribution `P(z) ∝ exp(-theta d(z, zeta0))` over all
/// rankings of up to 8 objects.
#[derive(Clone, Debug)]
pub struct Mallows {
    support: Vec<Ranking>,
    probabilities: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl Mallows {
    pub fn new(zeta0: &Ranking, theta: f64, metric: Metric) -> Result<Self> {
        let n = zeta0.len();
        if n > MAX_MALLOWS_OBJECTS {
            return Err(Error::TooManyObjects(n));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be finite, got {theta}")));
        }
        let support = Ranking::all(n);
        let distances = support
            .iter()
            .map(|z| metric.distance(z, zeta0).map(|d| d as f64))
            .collect::<Result<Vec<_>>>()?;
        // shift by the smallest exponent so that negative theta cannot overflow
        let shift = distances
            .iter()
            .map(|d| -theta * d)
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = distances.iter().map(|d| (-theta * d - shift).exp()).collect();
        let total: f64 = weights.iter().sum();
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let sampler = WeightedIndex::new(&probabilities)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self {
            support,
            probabilities,
            sampler,
        })
    }

    pub fn support(&self) -> &[Ranking] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, z: &Ranking) -> f64 {
        self.support
            .iter()
            .position(|r| r == z)
            .map_or(0.0, |i| self.probabilities[i])
    }

    /// Index into [`Mallows::support`] of one draw.
    pub fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Ranking> {
        (0..n).map(|_| self.support[self.draw_index(rng)].clone()).collect()
    }
}

/// `n` independent draws from the Mallows model around `zeta0`.
pub fn mallows_sample(
    n: usize,
    zeta0: &Ranking,
    theta: f64,
    metric: Metric,
    seed: u64,
) -> Result<Vec<Ranking>> {
    let model = Mallows::new(zeta0, theta, metric)?;
    Ok(model.sample(n, &mut draw_rng(seed, 0)))
}

/// Group `a` ranks uniformly, group `b` follows a Mallows model; categories
/// are the observed rankings with distances under `graph_metric`.
pub fn mallows_scenario<R: Rng + ?Sized>(
    zeta0: &Ranking,
    theta: f64,
    generate: Metric,
    graph_metric: Metric,
    n_per_group: usize,
    rng: &mut R,
) -> Result<(ContingencyTable, DistanceMatrix)> {
    let uniform = Mallows::new(zeta0, 0.0, generate)?;
    let model = Mallows::new(zeta0, theta, generate)?;
    let mut counts: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    for _ in 0..n_per_group {
        counts.entry(uniform.draw_index(rng)).or_default().0 += 1;
    }
    for _ in 0..n_per_group {
        counts.entry(model.draw_index(rng)).or_default().1 += 1;
    }
    let rankings: Vec<Ranking> = counts.keys().map(|&i| model.support[i].clone()).collect();
    let rows: Vec<(String, i64, i64)> = counts
        .iter()
        .map(|(&i, &(a, b))| (model.support[i].to_string(), a, b))
        .collect();
    let table = ContingencyTable::from_records(&rows)?;
    let d = pairwise_distance(graph_metric, &Items::Rankings(rankings))?;
    Ok((table, d))
}

/// Disease model on binary haplotypes: a subject is a patient (group `a`)
/// with probability `base + step * matches`, where `matches` counts the
/// informative positions at which the haplotype agrees with `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaplotypeModel {
    pub length: usize,
    pub informative: Vec<usize>,
    /// Full-length 0/1 string; only informative positions are compared.
    pub target: String,
    pub base: f64,
    pub step: f64,
}

impl HaplotypeModel {
    /// Four informative positions out of `length`, target all ones,
    /// probabilities 0.3 to 0.7.
    pub fn association(length: usize) -> Self {
        Self {
            length,
            informative: (0..length.min(4)).collect(),
            target: "1".repeat(length),
            base: 0.3,
            step: 0.1,
        }
    }

    /// Labels independent of haplotype, each group equally likely.
    pub fn null(length: usize) -> Self {
        Self {
            length,
            informative: Vec::new(),
            target: "0".repeat(length),
            base: 0.5,
            step: 0.0,
        }
    }

    fn target_bits(&self) -> Result<u32> {
        if self.length == 0 || self.length > MAX_HAPLOTYPE_LENGTH {
            return Err(Error::InvalidParameter(format!(
                "haplotype length must be in 1..={MAX_HAPLOTYPE_LENGTH}, got {}",
                self.length
            )));
        }
        if self.target.len() != self.length || !self.target.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidParameter(format!(
                "target must be a 0/1 string of length {}",
                self.length
            )));
        }
        if let Some(&p) = self.informative.iter().find(|&&p| p >= self.length) {
            return Err(Error::InvalidParameter(format!("informative position {p} out of range")));
        }
        for matches in [0, self.informative.len()] {
            let p = self.disease_probability(matches);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "disease probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(u32::from_str_radix(&self.target, 2).expect("checked 0/1 string"))
    }

    pub fn disease_probability(&self, matches: usize) -> f64 {
        self.base + self.step * matches as f64
    }
}

/// `n_subjects` uniform haplotypes labelled by `model`; categories are the
/// observed haplotypes as 0/1 strings, with Hamming distances.
pub fn haplotype_scenario<R: Rng + ?Sized>(
    model: &HaplotypeModel,
    n_subjects: usize,
    rng: &mut R,
) -> Result<(ContingencyTable, DistanceMatrix)> {
    let target = model.target_bits()?;
    let len = model.length;
    // string position p is bit len-1-p of the code
    let mask: u32 = model.informative.iter().map(|&p| 1u32 << (len - 1 - p)).fold(0, |a, b| a | b);
    let mut counts: BTreeMap<u32, (i64, i64)> = BTreeMap::new();
    for _ in 0..n_subjects {
        let code: u32 = rng.random_range(0..1u32 << len);
        let matches = (!(code ^ target) & mask).count_ones() as usize;
        let entry = counts.entry(code).or_default();
        if rng.random_bool(model.disease_probability(matches)) {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    let codes: Vec<u32> = counts.keys().copied().collect();
    let rows: Vec<(String, i64, i64)> = counts
        .iter()
        .map(|(&c, &(a, b))| (format!("{c:0len$b}"), a, b))
        .collect();
    let table = ContingencyTable::from_records(&rows)?;
    let d = DistanceMatrix::from_fn(codes.len(), |i, j| (codes[i] ^ codes[j]).count_ones() as f64)?;
    Ok((table, d))
}

/// A data-generating setup; each replicate is a `(table, distances)` pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Binned {
        a: Dist,
        b: Dist,
        n_per_group: usize,
        bins: usize,
    },
    Mallows {
        zeta0: Ranking,
        theta: f64,
        generate: Metric,
        graph_metric: Metric,
        n_per_group: usize,
    },
    Haplotype {
        model: HaplotypeModel,
        n_subjects: usize,
    },
}

impl Scenario {
    pub const NAMES: [&'static str; 9] = [
        "normal-shift",
        "normal-scale",
        "normal-shift-scale",
        "uniform-shift",
        "normal-null",
        "mallows",
        "mallows-null",
        "haplotype",
        "haplotype-null",
    ];

    /// Built-in setups at their default sizes.
    pub fn named(name: &str) -> Result<Self> {
        let binned = |a, b| Scenario::Binned {
            a,
            b,
            n_per_group: 30,
            bins: 12,
        };
        let mallows = |theta| Scenario::Mallows {
            zeta0: Ranking::identity(4),
            theta,
            generate: Metric::SpearmanSq,
            graph_metric: Metric::SpearmanSq,
            n_per_group: 20,
        };
        Ok(match name {
            "normal-shift" => binned(Dist::normal(0.0, 1.0), Dist::normal(1.0, 1.0)),
            "normal-scale" => binned(Dist::normal(0.0, 1.0), Dist::normal(0.0, 4.0)),
            "normal-shift-scale" => binned(Dist::normal(0.0, 1.0), Dist::normal(1.0, 4.0)),
            "uniform-shift" => binned(Dist::uniform(0.0, 5.0), Dist::uniform(1.0, 6.0)),
            "normal-null" => binned(Dist::normal(0.0, 1.0), Dist::normal(0.0, 1.0)),
            "mallows" => mallows(5.0),
            "mallows-null" => mallows(0.0),
            "haplotype" => Scenario::Haplotype {
                model: HaplotypeModel::association(11),
                n_subjects: 1000,
            },
            "haplotype-null" => Scenario::Haplotype {
                model: HaplotypeModel::null(8),
                n_subjects: 500,
            },
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown scenario '{name}'; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(ContingencyTable, DistanceMatrix)> {
        match self {
            Scenario::Binned {
                a,
                b,
                n_per_group,
                bins,
            } => binned_scenario(*a, *b, *n_per_group, *bins, rng),
            Scenario::Mallows {
                zeta0,
                theta,
                generate,
                graph_metric,
                n_per_group,
            } => mallows_scenario(zeta0, *theta, *generate, *graph_metric, *n_per_group, rng),
            Scenario::Haplotype { model, n_subjects } => haplotype_scenario(model, *n_subjects, rng),
        }
    }

    /// Replicate `index` under `seed`.
    pub fn replicate(&self, seed: u64, index: u64) -> Result<(ContingencyTable, DistanceMatrix)> {
        self.generate(&mut draw_rng(seed, index))
    }
}
