//! Two-group contingency tables.
//!
//! A table holds, for each of `K` categories, the number of subjects from
//! group `a` and group `b`. Categories that nobody falls into are dropped on
//! construction, so every margin `m_k` is at least one and categories are
//! addressed by a dense index `0..K` in input order.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub fn other(self) -> Group {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::A => f.write_str("a"),
            Group::B => f.write_str("b"),
        }
    }
}

/// Subjects listed one by one: category index and group mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubjectList {
    pub categories: Vec<usize>,
    pub labels: Vec<Group>,
}

impl SubjectList {
    pub fn new(categories: Vec<usize>, labels: Vec<Group>) -> Result<Self> {
        if categories.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: categories.len(),
                found: labels.len(),
            });
        }
        Ok(Self { categories, labels })
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    ids: Vec<String>,
    counts_a: Vec<u64>,
    counts_b: Vec<u64>,
    margins: Vec<u64>,
    n_a: u64,
    n_b: u64,
}

impl ContingencyTable {
    /// Builds a table from `(id, count_a, count_b)` rows, dropping rows whose
    /// margin is zero.
    pub fn from_records<S: AsRef<str>>(rows: &[(S, i64, i64)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(rows.len());
        let mut ids = Vec::with_capacity(rows.len());
        let mut counts_a = Vec::with_capacity(rows.len());
        let mut counts_b = Vec::with_capacity(rows.len());
        for (id, a, b) in rows {
            let id = id.as_ref();
            if !seen.insert(id.to_owned()) {
                return Err(Error::DuplicateId(id.to_owned()));
            }
            for value in [*a, *b] {
                if value < 0 {
                    return Err(Error::NegativeCount {
                        id: id.to_owned(),
                        value,
                    });
                }
            }
            if *a == 0 && *b == 0 {
                log::info!("dropping category {id:?} with zero margin");
                continue;
            }
            ids.push(id.to_owned());
            counts_a.push(*a as u64);
            counts_b.push(*b as u64);
        }
        Self::from_parts(ids, counts_a, counts_b)
    }

    /// Tallies a subject list into a table over the categories named by `ids`.
    pub fn from_subjects<S: AsRef<str>>(subjects: &SubjectList, ids: &[S]) -> Result<Self> {
        let k = ids.len();
        let mut a = vec![0i64; k];
        let mut b = vec![0i64; k];
        for (&cat, &label) in subjects.categories.iter().zip(&subjects.labels) {
            if cat >= k {
                return Err(Error::IndexOutOfRange { index: cat, k });
            }
            match label {
                Group::A => a[cat] += 1,
                Group::B => b[cat] += 1,
            }
        }
        let rows: Vec<(&str, i64, i64)> = ids
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(id, (&x, &y))| (id.as_ref(), x, y))
            .collect();
        Self::from_records(&rows)
    }

    fn from_parts(ids: Vec<String>, counts_a: Vec<u64>, counts_b: Vec<u64>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::AllMarginsZero);
        }
        let margins: Vec<u64> = counts_a.iter().zip(&counts_b).map(|(a, b)| a + b).collect();
        let n_a = counts_a.iter().sum();
        let n_b = counts_b.iter().sum();
        Ok(Self {
            ids,
            counts_a,
            counts_b,
            margins,
            n_a,
            n_b,
        })
    }

    /// Same margins and ids, new group-`a` counts. Used by permutation code.
    pub fn with_counts_a(&self, counts_a: &[u64]) -> Result<Self> {
        if counts_a.len() != self.k() {
            return Err(Error::SizeMismatch {
                expected: self.k(),
                found: counts_a.len(),
            });
        }
        let mut counts_b = Vec::with_capacity(self.k());
        for (k, (&a, &m)) in counts_a.iter().zip(&self.margins).enumerate() {
            if a > m {
                return Err(Error::InvalidParameter(format!(
                    "count {a} exceeds margin {m} in category {k}"
                )));
            }
            counts_b.push(m - a);
        }
        Self::from_parts(self.ids.clone(), counts_a.to_vec(), counts_b)
    }

    /// Expands the table into subjects, category-major with group `a` first.
    pub fn to_subjects(&self) -> SubjectList {
        let n = self.total() as usize;
        let mut categories = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for k in 0..self.k() {
            for _ in 0..self.counts_a[k] {
                categories.push(k);
                labels.push(Group::A);
            }
            for _ in 0..self.counts_b[k] {
                categories.push(k);
                labels.push(Group::B);
            }
        }
        SubjectList { categories, labels }
    }

    /// Swaps the roles of the two groups.
    pub fn swapped(&self) -> Self {
        Self {
            ids: self.ids.clone(),
            counts_a: self.counts_b.clone(),
            counts_b: self.counts_a.clone(),
            margins: self.margins.clone(),
            n_a: self.n_b,
            n_b: self.n_a,
        }
    }

    pub fn k(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn counts_a(&self) -> &[u64] {
        &self.counts_a
    }

    pub fn counts_b(&self) -> &[u64] {
        &self.counts_b
    }

    pub fn margins(&self) -> &[u64] {
        &self.margins
    }

    pub fn n_a(&self) -> u64 {
        self.n_a
    }

    pub fn n_b(&self) -> u64 {
        self.n_b
    }

    /// Total number of subjects `N`.
    pub fn total(&self) -> u64 {
        self.n_a + self.n_b
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> ContingencyTable {
        ContingencyTable::from_records(&[("c1", 2, 0), ("c2", 1, 1), ("c3", 0, 2)]).unwrap()
    }

    #[test]
    fn margins_of_chain_table() {
        let t = chain();
        assert_eq!(t.k(), 3);
        assert_eq!(t.total(), 6);
        assert_eq!((t.n_a(), t.n_b()), (3, 3));
        assert_eq!(t.margins(), &[2, 2, 2]);
    }

    #[test]
    fn zero_margin_rows_are_dropped() {
        let t = ContingencyTable::from_records(&[("c1", 1, 1), ("c2", 0, 0)]).unwrap();
        assert_eq!(t.k(), 1);
        assert_eq!(t.total(), 2);
        assert_eq!(t.ids(), &["c1".to_string()]);
    }

    #[test]
    fn rejects_bad_records() {
        assert!(matches!(
            ContingencyTable::from_records(&[("c1", -1, 0)]),
            Err(Error::NegativeCount { .. })
        ));
        assert_eq!(
            ContingencyTable::from_records(&[("c1", 1, 0), ("c1", 0, 1)]),
            Err(Error::DuplicateId("c1".into()))
        );
        assert_eq!(
            ContingencyTable::from_records(&[("c1", 0, 0)]),
            Err(Error::AllMarginsZero)
        );
    }

    #[test]
    fn tally_subjects() {
        let s = SubjectList::new(vec![0, 0, 1], vec![Group::A, Group::B, Group::B]).unwrap();
        let t = ContingencyTable::from_subjects(&s, &["c1", "c2"]).unwrap();
        assert_eq!(t.counts_a(), &[1, 0]);
        assert_eq!(t.counts_b(), &[1, 1]);

        let empty = SubjectList::new(vec![], vec![]).unwrap();
        assert_eq!(
            ContingencyTable::from_subjects(&empty, &["c1"]),
            Err(Error::AllMarginsZero)
        );

        let one = SubjectList::new(vec![0], vec![Group::A]).unwrap();
        assert_eq!(
            ContingencyTable::from_subjects(&one, &["c1", "c2"]).unwrap().k(),
            1
        );

        let bad = SubjectList::new(vec![2], vec![Group::A]).unwrap();
        assert!(matches!(
            ContingencyTable::from_subjects(&bad, &["c1", "c2"]),
            Err(Error::IndexOutOfRange { index: 2, k: 2 })
        ));
    }

    #[test]
    fn canonical_expansion() {
        let t = ContingencyTable::from_records(&[("x", 1, 1)]).unwrap();
        let s = t.to_subjects();
        assert_eq!(s.categories, vec![0, 0]);
        assert_eq!(s.labels, vec![Group::A, Group::B]);

        let s = chain().to_subjects();
        assert_eq!(s.len(), 6);
        assert_eq!(&s.categories[..2], &[0, 0]);
        assert_eq!(&s.labels[..2], &[Group::A, Group::A]);
    }

    #[test]
    fn swapped_exchanges_groups() {
        let t = chain().swapped();
        assert_eq!(t.counts_a(), &[0, 1, 2]);
        assert_eq!(t.n_a(), 3);
    }
}
