//! Distances between categories.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance for ties and symmetry on real-valued matrices.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Symmetric `K x K` matrix of nonnegative distances with zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceMatrix {
    k: usize,
    data: Vec<f64>,
    integral: bool,
}

impl DistanceMatrix {
    /// Validates a dense matrix given row by row.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(raw: &[Vec<f64>]) -> Result<Self> {
        let k = raw.len();
        for (row, r) in raw.iter().enumerate() {
            if r.len() != k {
                return Err(Error::NotSquare {
                    rows: k,
                    row,
                    len: r.len(),
                });
            }
        }
        for i in 0..k {
            for j in 0..k {
                let x = raw[i][j];
                if !x.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if x < 0.0 {
                    return Err(Error::NegativeEntry { i, j, value: x });
                }
            }
        }
        for i in 0..k {
            if raw[i][i] != 0.0 {
                return Err(Error::NonzeroDiagonal { i, value: raw[i][i] });
            }
            for j in i + 1..k {
                let (a, b) = (raw[i][j], raw[j][i]);
                if (a - b).abs() > TIE_TOLERANCE {
                    return Err(Error::Asymmetric { i, j, a, b });
                }
                if a == 0.0 {
                    return Err(Error::ZeroOffDiagonal { i, j });
                }
            }
        }
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let x = raw[i][j];
                data[i * k + j] = x;
                data[j * k + i] = x;
            }
        }
        Ok(Self::from_data(k, data))
    }

    /// Loads a matrix whose rows and columns are labelled by `ids`, reordered
    /// to follow `wanted`. Extra ids in the matrix are ignored.
    pub fn load<S: AsRef<str>, T: AsRef<str>>(
        raw: &[Vec<f64>],
        ids: &[S],
        wanted: &[T],
    ) -> Result<Self> {
        if raw.len() != ids.len() {
            return Err(Error::LengthMismatch {
                expected: ids.len(),
                found: raw.len(),
            });
        }
        let full = Self::from_rows(raw)?;
        let mut index = Vec::with_capacity(wanted.len());
        for w in wanted {
            let w = w.as_ref();
            let pos = ids.iter().position(|x| x.as_ref() == w).ok_or_else(|| {
                Error::InvalidParameter(format!("distance matrix has no category {w:?}"))
            })?;
            index.push(pos);
        }
        Ok(full.restrict(&index))
    }

    /// Builds a matrix from a distance function on index pairs `i < j`.
    #[allow(clippy::needless_range_loop)]
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut raw = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let x = f(i, j);
                raw[i][j] = x;
                raw[j][i] = x;
            }
        }
        Self::from_rows(&raw)
    }

    fn from_data(k: usize, data: Vec<f64>) -> Self {
        let integral = data.iter().all(|x| x.fract() == 0.0);
        Self { k, data, integral }
    }

    /// Sub-matrix on the given category indices, in that order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let k = keep.len();
        let mut data = vec![0.0; k * k];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                data[a * k + b] = self.get(i, j);
            }
        }
        Self::from_data(k, data)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    /// True when every entry is an integer, in which case ties are exact.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Tolerance used when deciding whether two distances tie.
    pub fn tolerance(&self) -> f64 {
        if self.integral {
            0.0
        } else {
            TIE_TOLERANCE
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| self.data[i * self.k..(i + 1) * self.k].to_vec())
            .collect()
    }
}

/// A full ranking of `n` objects: entry `i` is the rank (1-based) of object `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking(Vec<usize>);

impl Ranking {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            if r == 0 || r > n || seen[r - 1] {
                return Err(Error::InvalidPermutation(format!("{ranks:?}")));
            }
            seen[r - 1] = true;
        }
        Ok(Self(ranks))
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    /// `(self ∘ sigma)(i) = self(sigma(i))`, relabelling objects by `sigma`.
    pub fn compose(&self, sigma: &Ranking) -> Result<Ranking> {
        if self.len() != sigma.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: sigma.len(),
            });
        }
        Ok(Ranking(sigma.0.iter().map(|&s| self.0[s - 1]).collect()))
    }

    /// All `n!` rankings in lexicographic order.
    pub fn all(n: usize) -> Vec<Ranking> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Ranking(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl FromStr for Ranking {
    type Err = Error;

    /// Accepts `"2134"` (single digits) or `"2,1,3,4"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let ranks: Option<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|x| x.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        let ranks = ranks.ok_or_else(|| Error::InvalidPermutation(s.to_owned()))?;
        Ranking::new(ranks)
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() < 10 {
            for r in &self.0 {
                write!(f, "{r}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

pub fn kendall(x: &Ranking, y: &Ranking) -> usize {
    let (x, y) = (x.ranks(), y.ranks());
    let n = x.len();
    let mut discordant = 0;
    for i in 0..n {
        for j in i + 1..n {
            let a = x[i] as i64 - x[j] as i64;
            let b = y[i] as i64 - y[j] as i64;
            if a * b < 0 {
                discordant += 1;
            }
        }
    }
    discordant
}

pub fn spearman_sq(x: &Ranking, y: &Ranking) -> usize {
    x.ranks()
        .iter()
        .zip(y.ranks())
        .map(|(&a, &b)| a.abs_diff(b).pow(2))
        .sum()
}

pub fn spearman_footrule(x: &Ranking, y: &Ranking) -> usize {
    x.ranks().iter().zip(y.ranks()).map(|(&a, &b)| a.abs_diff(b)).sum()
}

pub fn hamming(x: &str, y: &str) -> usize {
    x.chars().zip(y.chars()).filter(|(a, b)| a != b).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Kendall,
    SpearmanSq,
    SpearmanFootrule,
    Hamming,
    RankDiff,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Kendall => "kendall",
            Metric::SpearmanSq => "spearman_sq",
            Metric::SpearmanFootrule => "spearman_footrule",
            Metric::Hamming => "hamming",
            Metric::RankDiff => "rank_diff",
        }
    }

    pub fn distance(self, x: &Ranking, y: &Ranking) -> Result<usize> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        match self {
            Metric::Kendall => Ok(kendall(x, y)),
            Metric::SpearmanSq => Ok(spearman_sq(x, y)),
            Metric::SpearmanFootrule => Ok(spearman_footrule(x, y)),
            Metric::Hamming | Metric::RankDiff => Err(Error::MetricNotApplicable {
                metric: self.name(),
                items: "rankings",
            }),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kendall" => Ok(Metric::Kendall),
            "spearman" | "spearman_sq" => Ok(Metric::SpearmanSq),
            "footrule" | "spearman_footrule" => Ok(Metric::SpearmanFootrule),
            "hamming" => Ok(Metric::Hamming),
            "rank_diff" | "rank" => Ok(Metric::RankDiff),
            _ => Err(Error::UnknownMetric(s.to_owned())),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Category representations that the built-in metrics understand.
#[derive(Clone, Debug, PartialEq)]
pub enum Items {
    Rankings(Vec<Ranking>),
    Strings(Vec<String>),
    Ranks(Vec<i64>),
}

impl Items {
    /// Interprets category ids as representations suitable for `metric`.
    pub fn parse<S: AsRef<str>>(metric: Metric, ids: &[S]) -> Result<Self> {
        match metric {
            Metric::Kendall | Metric::SpearmanSq | Metric::SpearmanFootrule => ids
                .iter()
                .map(|s| s.as_ref().parse())
                .collect::<Result<Vec<Ranking>>>()
                .map(Items::Rankings),
            Metric::Hamming => Ok(Items::Strings(
                ids.iter().map(|s| s.as_ref().to_owned()).collect(),
            )),
            Metric::RankDiff => ids
                .iter()
                .map(|s| {
                    let s = s.as_ref();
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::InvalidParameter(format!("{s:?} is not an integer rank")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Items::Ranks),
        }
    }

    fn len(&self) -> usize {
        match self {
            Items::Rankings(v) => v.len(),
            Items::Strings(v) => v.len(),
            Items::Ranks(v) => v.len(),
        }
    }
}

/// Distance matrix of `items` under `metric`.
pub fn pairwise_distance(metric: Metric, items: &Items) -> Result<DistanceMatrix> {
    let k = items.len();
    let mut raw = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = match (metric, items) {
                (Metric::Kendall | Metric::SpearmanSq | Metric::SpearmanFootrule, Items::Rankings(r)) => {
                    metric.distance(&r[i], &r[j])?
                }
                (Metric::Hamming, Items::Strings(s)) => {
                    let (a, b) = (s[i].chars().count(), s[j].chars().count());
                    if a != b {
                        return Err(Error::LengthMismatch { expected: a, found: b });
                    }
                    hamming(&s[i], &s[j])
                }
                (Metric::RankDiff, Items::Ranks(r)) => r[i].abs_diff(r[j]) as usize,
                (_, Items::Rankings(_)) => {
                    return Err(Error::MetricNotApplicable {
                        metric: metric.name(),
                        items: "rankings",
                    })
                }
                (_, Items::Strings(_)) => {
                    return Err(Error::MetricNotApplicable {
                        metric: metric.name(),
                        items: "strings",
                    })
                }
                (_, Items::Ranks(_)) => {
                    return Err(Error::MetricNotApplicable {
                        metric: metric.name(),
                        items: "integer ranks",
                    })
                }
            };
            if d == 0 {
                return Err(Error::DuplicateItem(i, j));
            }
            raw[i][j] = d as f64;
            raw[j][i] = d as f64;
        }
    }
    DistanceMatrix::from_rows(&raw)
}
