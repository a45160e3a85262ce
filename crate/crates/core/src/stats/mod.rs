//! Test statistics on a contingency table.
//!
//! Every statistic here is a function of `counts_a` once the margins, the
//! distances and the category graph are fixed. A [`Statistic`] captures that
//! fixed part, so permutation loops only re-evaluate the cheap remainder.
//!
//! Graph statistics are small when the groups separate; the chi-square
//! statistics are large.

mod amst;
mod mdp;
mod select;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::{umst_edges, CategoryGraph, MstStructure};
use crate::table::{ContingencyTable, Group};

pub use amst::edge_inclusion;
pub use mdp::{r0, MdpPlan};
pub use select::StatSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatKind {
    #[serde(rename = "aMST")]
    AMst,
    #[serde(rename = "uMST")]
    UMst,
    C0,
    #[serde(rename = "T_C0")]
    TC0,
    #[serde(rename = "aMDP")]
    AMdp,
    #[serde(rename = "uNNG_subjects")]
    UNngSubjects,
    #[serde(rename = "pearson")]
    Pearson,
    #[serde(rename = "deviance")]
    Deviance,
}

impl StatKind {
    pub fn name(self) -> &'static str {
        match self {
            StatKind::AMst => "aMST",
            StatKind::UMst => "uMST",
            StatKind::C0 => "C0",
            StatKind::TC0 => "T_C0",
            StatKind::AMdp => "aMDP",
            StatKind::UNngSubjects => "uNNG_subjects",
            StatKind::Pearson => "pearson",
            StatKind::Deviance => "deviance",
        }
    }

    /// Whether large values, rather than small ones, count against the null.
    pub fn upper_tail(self) -> bool {
        matches!(self, StatKind::Pearson | StatKind::Deviance)
    }
}

impl std::fmt::Display for StatKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiSquareKind {
    Pearson,
    Deviance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticValue {
    pub kind: StatKind,
    pub value: f64,
    /// Short description of the category graph the value was computed on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fallbacks: Vec<String>,
}

/// Weighted cross-pair sum
/// `sum_k node[k] n_ak n_bk + sum_(u,v) c (n_au n_bv + n_av n_bu)`.
///
/// Every graph statistic except aMDP has this form. On subjects it is the
/// weighted count of cross-group pairs, with weight `node[k]` for a pair
/// inside category `k` and `c` for a pair across edge `(u, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingPlan {
    margins: Vec<u64>,
    node: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl MixingPlan {
    pub fn new(margins: &[u64], node: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Self {
        debug_assert_eq!(margins.len(), node.len());
        Self {
            margins: margins.to_vec(),
            node,
            edges,
        }
    }

    /// Node weight `2/m_k`, edge weight `1/(m_u m_v)`.
    pub fn r_c0(margins: &[u64], c0: &CategoryGraph) -> Self {
        let m: Vec<f64> = margins.iter().map(|&x| x as f64).collect();
        Self::new(
            margins,
            m.iter().map(|x| 2.0 / x).collect(),
            c0.edges()
                .iter()
                .map(|&(u, v)| (u, v, 1.0 / (m[u] * m[v])))
                .collect(),
        )
    }

    /// Unit weights: a plain count of cross-group subject pairs.
    pub fn t_c0(margins: &[u64], c0: &CategoryGraph) -> Self {
        Self::new(
            margins,
            vec![1.0; margins.len()],
            c0.edges().iter().map(|&(u, v)| (u, v, 1.0)).collect(),
        )
    }

    pub fn margins(&self) -> &[u64] {
        &self.margins
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node
    }

    pub fn edge_weights(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn eval(&self, counts_a: &[u64]) -> f64 {
        let b = |k: usize| (self.margins[k] - counts_a[k]) as f64;
        let nodes: f64 = (0..self.margins.len())
            .map(|k| self.node[k] * counts_a[k] as f64 * b(k))
            .sum();
        let edges: f64 = self
            .edges
            .iter()
            .map(|&(u, v, c)| c * (counts_a[u] as f64 * b(v) + counts_a[v] as f64 * b(u)))
            .sum();
        nodes + edges
    }
}

#[derive(Clone, Debug)]
enum Plan {
    Mixing(MixingPlan),
    Mdp(MdpPlan),
    ChiSquare {
        kind: ChiSquareKind,
        margins: Vec<u64>,
        n_a: u64,
    },
}

/// A statistic with everything that does not depend on `counts_a` resolved.
#[derive(Clone, Debug)]
pub struct Statistic {
    kind: StatKind,
    plan: Plan,
    graph: Option<CategoryGraph>,
    graph_label: Option<String>,
    fallbacks: Vec<String>,
}

fn check_k(table: &ContingencyTable, k: usize) -> Result<()> {
    if table.k() != k {
        return Err(Error::SizeMismatch {
            expected: table.k(),
            found: k,
        });
    }
    Ok(())
}

impl Statistic {
    fn mixing(kind: StatKind, plan: MixingPlan, graph: CategoryGraph, label: String) -> Self {
        Self {
            kind,
            plan: Plan::Mixing(plan),
            graph_label: Some(format!("{label} ({} edges)", graph.len())),
            graph: Some(graph),
            fallbacks: Vec::new(),
        }
    }

    /// Mixing potential on a given category graph.
    pub fn r_c0(table: &ContingencyTable, c0: &CategoryGraph) -> Result<Self> {
        check_k(table, c0.k())?;
        let plan = MixingPlan::r_c0(table.margins(), c0);
        Ok(Self::mixing(StatKind::C0, plan, c0.clone(), "C0".into()))
    }

    /// Cross-pair count on subjects for a given category graph.
    pub fn t_c0(table: &ContingencyTable, c0: &CategoryGraph) -> Result<Self> {
        check_k(table, c0.k())?;
        let plan = MixingPlan::t_c0(table.margins(), c0);
        Ok(Self::mixing(StatKind::TC0, plan, c0.clone(), "C0".into()))
    }

    /// Cross-pair count on the union of all MSTs on subjects.
    pub fn r_umst(table: &ContingencyTable, d: &DistanceMatrix) -> Result<Self> {
        check_k(table, d.k())?;
        let g = umst_edges(d);
        let plan = MixingPlan::t_c0(table.margins(), &g);
        Ok(Self::mixing(StatKind::UMst, plan, g, "uMST".into()))
    }

    /// Cross-pair count averaged over all MSTs on subjects. Fails with
    /// `CapExceeded` when there are more than `cap` MSTs on categories.
    pub fn r_amst(table: &ContingencyTable, d: &DistanceMatrix, cap: u64) -> Result<Self> {
        check_k(table, d.k())?;
        let structure = MstStructure::new(d);
        let count = structure.count_within(cap)?;
        let m: Vec<f64> = table.margins().iter().map(|&x| x as f64).collect();
        let edges = edge_inclusion(&structure, table.margins())
            .into_iter()
            .map(|((u, v), p)| (u, v, p / (m[u] * m[v])))
            .collect();
        let plan = MixingPlan::new(
            table.margins(),
            m.iter().map(|x| 2.0 / x).collect(),
            edges,
        );
        let g = structure.union_edges();
        let label = format!("{count} MST(s), union");
        Ok(Self::mixing(StatKind::AMst, plan, g, label))
    }

    /// Cross-pair count averaged over all minimum-distance pairings of
    /// subjects, with subjects paired inside their own category first.
    pub fn r_amdp(table: &ContingencyTable, d: &DistanceMatrix, cap: u64) -> Result<Self> {
        check_k(table, d.k())?;
        let plan = MdpPlan::new(table.margins(), d, cap)?;
        let label = format!(
            "{} minimum matching(s) on {} odd categories",
            plan.matchings(),
            plan.odd_categories().len()
        );
        Ok(Self {
            kind: StatKind::AMdp,
            plan: Plan::Mdp(plan),
            graph: None,
            graph_label: Some(label),
            fallbacks: Vec::new(),
        })
    }

    /// Cross-pair count on the union nearest-neighbour graph on subjects.
    pub fn r_unng_subjects(table: &ContingencyTable, d: &DistanceMatrix) -> Result<Self> {
        check_k(table, d.k())?;
        if table.total() < 2 {
            return Err(Error::TooFewSubjects(table.total() as usize));
        }
        let g = unng_subject_graph(table.margins(), d);
        let plan = MixingPlan::t_c0(table.margins(), &g);
        Ok(Self::mixing(
            StatKind::UNngSubjects,
            plan,
            g,
            "uNNG between categories".into(),
        ))
    }

    pub fn chisq(table: &ContingencyTable, kind: ChiSquareKind) -> Result<Self> {
        if table.n_a() == 0 {
            return Err(Error::EmptyGroup('a'));
        }
        if table.n_b() == 0 {
            return Err(Error::EmptyGroup('b'));
        }
        Ok(Self {
            kind: match kind {
                ChiSquareKind::Pearson => StatKind::Pearson,
                ChiSquareKind::Deviance => StatKind::Deviance,
            },
            plan: Plan::ChiSquare {
                kind,
                margins: table.margins().to_vec(),
                n_a: table.n_a(),
            },
            graph: None,
            graph_label: None,
            fallbacks: Vec::new(),
        })
    }

    pub fn kind(&self) -> StatKind {
        self.kind
    }

    /// The category graph behind a mixing statistic, if any.
    pub fn graph(&self) -> Option<&CategoryGraph> {
        self.graph.as_ref()
    }

    /// The weighted pair form, for statistics that have one.
    pub fn mixing_plan(&self) -> Option<&MixingPlan> {
        match &self.plan {
            Plan::Mixing(p) => Some(p),
            _ => None,
        }
    }

    pub fn margins(&self) -> &[u64] {
        match &self.plan {
            Plan::Mixing(p) => p.margins(),
            Plan::Mdp(p) => p.margins(),
            Plan::ChiSquare { margins, .. } => margins,
        }
    }

    /// Records a fallback taken while building this statistic.
    pub fn with_fallback(mut self, note: impl Into<String>) -> Self {
        self.fallbacks.push(note.into());
        self
    }

    pub fn with_kind(mut self, kind: StatKind, label: impl Into<String>) -> Self {
        self.kind = kind;
        if let Some(g) = &self.graph {
            self.graph_label = Some(format!("{} ({} edges)", label.into(), g.len()));
        }
        self
    }

    /// Value at group-`a` counts `counts_a`, with the margins held fixed.
    pub fn eval(&self, counts_a: &[u64]) -> f64 {
        match &self.plan {
            Plan::Mixing(p) => p.eval(counts_a),
            Plan::Mdp(p) => p.eval(counts_a),
            Plan::ChiSquare { kind, margins, n_a } => chisq_value(*kind, margins, *n_a, counts_a),
        }
    }

    pub fn value(&self, table: &ContingencyTable) -> Result<StatisticValue> {
        if table.margins() != self.margins() {
            return Err(Error::SizeMismatch {
                expected: self.margins().len(),
                found: table.k(),
            });
        }
        Ok(StatisticValue {
            kind: self.kind,
            value: self.eval(table.counts_a()),
            graph: self.graph_label.clone(),
            fallbacks: self.fallbacks.clone(),
        })
    }
}

fn chisq_value(kind: ChiSquareKind, margins: &[u64], n_a: u64, counts_a: &[u64]) -> f64 {
    let n = margins.iter().sum::<u64>() as f64;
    let n_b = n - n_a as f64;
    let mut total = 0.0;
    for (k, &m) in margins.iter().enumerate() {
        let m = m as f64;
        let cells = [
            (counts_a[k] as f64, n_a as f64 * m / n),
            (m - counts_a[k] as f64, n_b * m / n),
        ];
        for (observed, expected) in cells {
            total += match kind {
                ChiSquareKind::Pearson => (observed - expected).powi(2) / expected,
                ChiSquareKind::Deviance if observed > 0.0 => {
                    2.0 * observed * (observed / expected).ln()
                }
                ChiSquareKind::Deviance => 0.0,
            };
        }
    }
    total
}

/// Category pairs whose subjects are joined in the uNNG on subjects. A subject
/// shares its category with distance-0 mates whenever `m_u > 1`, so only
/// singleton categories reach out to their nearest other categories.
pub fn unng_subject_graph(margins: &[u64], d: &DistanceMatrix) -> CategoryGraph {
    let k = d.k();
    let tol = d.tolerance();
    let mut edges = Vec::new();
    for u in (0..k).filter(|&u| margins[u] == 1) {
        let nearest = (0..k)
            .filter(|&w| w != u)
            .map(|w| d.get(u, w))
            .fold(f64::INFINITY, f64::min);
        edges.extend((0..k).filter(|&v| v != u && d.get(u, v) <= nearest + tol).map(|v| (u, v)));
    }
    CategoryGraph::new(k, edges).expect("valid category pairs")
}

/// Number of edges whose endpoints carry different group labels.
pub fn cross_edge_count(edges: &[(usize, usize)], labels: &[Group]) -> usize {
    edges.iter().filter(|&&(i, j)| labels[i] != labels[j]).count()
}

pub fn r_c0(table: &ContingencyTable, c0: &CategoryGraph) -> Result<StatisticValue> {
    Statistic::r_c0(table, c0)?.value(table)
}

pub fn t_c0(table: &ContingencyTable, c0: &CategoryGraph) -> Result<StatisticValue> {
    Statistic::t_c0(table, c0)?.value(table)
}

pub fn r_umst(table: &ContingencyTable, d: &DistanceMatrix) -> Result<StatisticValue> {
    Statistic::r_umst(table, d)?.value(table)
}

pub fn r_amst(table: &ContingencyTable, d: &DistanceMatrix, cap: u64) -> Result<StatisticValue> {
    Statistic::r_amst(table, d, cap)?.value(table)
}

pub fn r_amdp(table: &ContingencyTable, d: &DistanceMatrix, cap: u64) -> Result<StatisticValue> {
    Statistic::r_amdp(table, d, cap)?.value(table)
}

pub fn r_unng_subjects(table: &ContingencyTable, d: &DistanceMatrix) -> Result<StatisticValue> {
    Statistic::r_unng_subjects(table, d)?.value(table)
}

pub fn chisq(table: &ContingencyTable, kind: ChiSquareKind) -> Result<StatisticValue> {
    Statistic::chisq(table, kind)?.value(table)
}
