//! Null moments, permutation and normal p-values, and checks on when the
//! normal approximation can be trusted.

mod diagnostics;
mod moments;
mod perm;

use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::{StatKind, Statistic, StatisticValue};
use crate::table::ContingencyTable;

pub use diagnostics::{condition_diagnostics, Diagnostics, DEFAULT_THRESHOLD};
pub use moments::{
    bootstrap_moments_mixing, bootstrap_moments_r, p1_p2, p3_p4, perm_moments_mixing,
    perm_moments_r, perm_moments_t, NullMoments,
};
pub use perm::{
    draw_rng, exact_perm_distribution, mc_perm_pvalue, permutation_map, pvalue_from_draws,
    ExactDistribution, PermOutcome,
};

/// `z = (value - mean) / sd` and its normal tail probability; lower tail
/// unless `upper`.
pub fn normal_pvalue(value: f64, moments: &NullMoments, upper: bool) -> Result<(f64, f64)> {
    if moments.variance <= 0.0 || !moments.variance.is_finite() {
        return Err(Error::ZeroVariance);
    }
    let z = (value - moments.mean) / moments.sd();
    let normal = Normal::standard();
    let p = if upper { normal.sf(z) } else { normal.cdf(z) };
    Ok((z, p))
}

/// Closed-form permutation moments for statistics that have them.
pub fn null_moments(stat: &Statistic, table: &ContingencyTable) -> Result<Option<NullMoments>> {
    let graph = stat.graph();
    Ok(match (stat.kind(), graph) {
        (StatKind::C0, Some(g)) => Some(perm_moments_r(table, g)?),
        (StatKind::TC0 | StatKind::UMst | StatKind::UNngSubjects, Some(g)) => {
            Some(perm_moments_t(table, g)?)
        }
        (StatKind::AMst, _) => {
            let plan = stat.mixing_plan().expect("aMST has a pair form");
            Some(perm_moments_mixing(plan, table.n_a())?)
        }
        _ => None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PValueMethod {
    Perm(usize),
    Normal,
    Exact,
    Both(usize),
}

impl PValueMethod {
    fn permutations(self) -> usize {
        match self {
            PValueMethod::Perm(b) | PValueMethod::Both(b) => b,
            _ => 0,
        }
    }
}

impl FromStr for PValueMethod {
    type Err = Error;

    /// `perm:B`, `normal`, `exact`, `both` or `both:B` (default B = 1000).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown p-value method '{s}'"));
        let (name, count) = match s.split_once(':') {
            Some((name, b)) => (name, Some(b.parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (name, count) {
            ("perm", _) if count != Some(0) => {
                Ok(PValueMethod::Perm(count.unwrap_or(1000)))
            }
            ("both", _) if count != Some(0) => Ok(PValueMethod::Both(count.unwrap_or(1000))),
            ("normal", None) => Ok(PValueMethod::Normal),
            ("exact", None) => Ok(PValueMethod::Exact),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestConfig {
    pub method: PValueMethod,
    pub seed: u64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub kind: StatKind,
    pub mean: f64,
    pub variance: f64,
    pub z: Option<f64>,
    pub p_normal: Option<f64>,
    pub p_perm: Option<f64>,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub value: StatisticValue,
}

/// Computes the statistic, its null moments, and the requested p-values.
pub fn run_test(
    table: &ContingencyTable,
    stat: &Statistic,
    config: &TestConfig,
) -> Result<TestResult> {
    let value = stat.value(table)?;
    let kind = stat.kind();
    let upper = kind.upper_tail();
    let mut diagnostics = match stat.graph() {
        Some(g) => condition_diagnostics(table, g, config.threshold)?,
        None => Diagnostics::default(),
    };

    let b = config.method.permutations();
    let perm = if b > 0 {
        Some(mc_perm_pvalue(|c| stat.eval(c), table, b, config.seed, upper)?)
    } else {
        None
    };
    let mut p_perm = perm.as_ref().map(|o| o.p);
    if config.method == PValueMethod::Exact {
        let dist = exact_perm_distribution(|c| stat.eval(c), table)?;
        p_perm = Some(dist.pvalue(value.value, upper));
        diagnostics
            .flags
            .push(format!("p_perm is exact over {} relabelings", dist.total));
    }

    let (mean, variance, z, p_normal);
    if upper {
        // chi-square statistics are referred to their asymptotic distribution
        let df = table.k().saturating_sub(1).max(1) as f64;
        mean = df;
        variance = 2.0 * df;
        z = Some((value.value - df) / variance.sqrt());
        p_normal = Some(ChiSquared::new(df).expect("df > 0").sf(value.value));
        diagnostics
            .flags
            .push(format!("p_normal uses the chi-square reference with {df} df"));
    } else {
        let moments = match null_moments(stat, table)? {
            Some(m) => Some(m),
            None => perm.as_ref().map(|o| {
                diagnostics
                    .flags
                    .push("mean and variance estimated from the permutation draws".into());
                NullMoments {
                    mean: o.mean,
                    variance: o.variance,
                    p1: 0.0,
                    p2: 0.0,
                    p3: None,
                    p4: None,
                }
            }),
        };
        match moments {
            Some(m) => {
                mean = m.mean;
                variance = m.variance;
                match normal_pvalue(value.value, &m, false) {
                    Ok((zz, p)) => {
                        z = Some(zz);
                        p_normal = Some(p);
                    }
                    Err(_) => {
                        z = None;
                        p_normal = None;
                        diagnostics.flags.push("null variance is zero".into());
                    }
                }
            }
            None => {
                mean = f64::NAN;
                variance = f64::NAN;
                z = None;
                p_normal = None;
                diagnostics.flags.push(format!(
                    "no closed-form null moments for {kind}; request permutations"
                ));
            }
        }
    }

    Ok(TestResult {
        statistic: value.value,
        kind,
        mean,
        variance,
        z,
        p_normal,
        p_perm,
        b,
        seed: config.seed,
        diagnostics,
        value,
    })
}
