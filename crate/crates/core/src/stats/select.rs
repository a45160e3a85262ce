use std::fmt;
use std::str::FromStr;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{umst_edges, unng_categories};
use crate::table::ContingencyTable;

use super::{ChiSquareKind, StatKind, Statistic};

/// Statistics that are fully determined by a table and a distance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatSpec {
    AMst,
    UMst,
    /// Mixing potential on the uMST on categories.
    CUMst,
    /// Mixing potential on the uNNG on categories.
    CUNng,
    AMdp,
    UNng,
    Pearson,
    Deviance,
}

impl StatSpec {
    pub const ALL: [StatSpec; 8] = [
        StatSpec::AMst,
        StatSpec::UMst,
        StatSpec::CUMst,
        StatSpec::CUNng,
        StatSpec::AMdp,
        StatSpec::UNng,
        StatSpec::Pearson,
        StatSpec::Deviance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatSpec::AMst => "aMST",
            StatSpec::UMst => "uMST",
            StatSpec::CUMst => "C-uMST",
            StatSpec::CUNng => "C-uNNG",
            StatSpec::AMdp => "aMDP",
            StatSpec::UNng => "uNNG",
            StatSpec::Pearson => "pearson",
            StatSpec::Deviance => "deviance",
        }
    }

    /// `cap` bounds MST and matching enumeration where it applies.
    pub fn build(self, table: &ContingencyTable, d: &DistanceMatrix, cap: u64) -> Result<Statistic> {
        match self {
            StatSpec::AMst => Statistic::r_amst(table, d, cap),
            StatSpec::UMst => Statistic::r_umst(table, d),
            StatSpec::CUMst => Ok(Statistic::r_c0(table, &umst_edges(d))?
                .with_kind(StatKind::C0, "C-uMST")),
            StatSpec::CUNng => Ok(Statistic::r_c0(table, &unng_categories(d))?
                .with_kind(StatKind::C0, "C-uNNG")),
            StatSpec::AMdp => Statistic::r_amdp(table, d, cap),
            StatSpec::UNng => Statistic::r_unng_subjects(table, d),
            StatSpec::Pearson => Statistic::chisq(table, ChiSquareKind::Pearson),
            StatSpec::Deviance => Statistic::chisq(table, ChiSquareKind::Deviance),
        }
    }
}

impl FromStr for StatSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        StatSpec::ALL
            .into_iter()
            .find(|spec| spec.name().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "unng-subjects" => Some(StatSpec::UNng),
                "chisq" => Some(StatSpec::Pearson),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown statistic '{s}'")))
    }
}

impl fmt::Display for StatSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
