//! CSV readers for tables, distance matrices and edge lists.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;

use catgraph::distance::{pairwise_distance, Items};
use catgraph::{CategoryGraph, ContingencyTable, DistanceMatrix, Metric};
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Deserialize)]
struct TableRow {
    category: String,
    group_a: i64,
    group_b: i64,
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))
}

/// The table, plus every id listed in the file (zero rows included).
pub fn read_table(path: &Path) -> Result<(ContingencyTable, Vec<String>), Failure> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    let mut rows = Vec::new();
    for (line, row) in reader.deserialize::<TableRow>().enumerate() {
        let row = row.map_err(|e| Failure::input(format!("{}: row {}: {e}", path.display(), line + 1)))?;
        rows.push((row.category, row.group_a, row.group_b));
    }
    let listed = rows.iter().map(|r| r.0.clone()).collect();
    let table = ContingencyTable::from_records(&rows)?;
    Ok((table, listed))
}

/// Ids from the header and the matrix rows, checked for consistent labelling.
pub fn read_distance_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), Failure> {
    let bad = |msg: String| Failure::input(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(open(path)?);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let mut ids: Vec<String> = header.iter().map(str::to_owned).collect();
    // the corner cell above the row labels is optional
    let mut rows = Vec::new();
    let mut row_ids = Vec::new();
    for record in records {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let mut cells = record.iter();
        row_ids.push(cells.next().unwrap_or_default().to_owned());
        let values = cells
            .map(|c| c.parse::<f64>().map_err(|_| bad(format!("{c:?} is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    if ids.len() == rows.len() + 1 {
        ids.remove(0);
    }
    if ids != row_ids {
        return Err(bad("row labels do not match the header".into()));
    }
    Ok((ids, rows))
}

/// Distances restricted to the table's categories, in table order. The file
/// must list exactly the ids of the table file.
pub fn read_distances(path: &Path, table: &ContingencyTable, listed: &[String]) -> Result<DistanceMatrix, Failure> {
    let (ids, rows) = read_distance_rows(path)?;
    let have: BTreeSet<&String> = ids.iter().collect();
    let want: BTreeSet<&String> = listed.iter().collect();
    if have != want {
        let missing: Vec<_> = want.difference(&have).collect();
        let extra: Vec<_> = have.difference(&want).collect();
        return Err(Failure::input(format!(
            "{}: categories differ from the table (missing {missing:?}, extra {extra:?})",
            path.display()
        )));
    }
    Ok(DistanceMatrix::load(&rows, &ids, table.ids())?)
}

pub fn metric_distances(metric: &str, ids: &[String]) -> Result<DistanceMatrix, Failure> {
    let metric: Metric = metric.parse()?;
    let items = Items::parse(metric, ids)?;
    Ok(pairwise_distance(metric, &items)?)
}

/// Custom graph from `u,v` lines; an optional `u,v` header and `#` comments
/// are skipped. Edges to categories absent from the table are dropped.
pub fn read_edges(path: &Path, ids: &[String]) -> Result<CategoryGraph, Failure> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    let mut edges = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(Failure::input(format!("{}: line {} needs two ids", path.display(), line + 1)));
        }
        if line == 0 && &record[0] == "u" && &record[1] == "v" {
            continue;
        }
        match (index.get(&record[0]), index.get(&record[1])) {
            (Some(&u), Some(&v)) if u != v => edges.push((u, v)),
            (Some(_), Some(_)) => {
                return Err(Failure::input(format!("{}: self-loop on {}", path.display(), &record[0])))
            }
            _ => log::warn!("edge {},{} names a category not in the table; dropped", &record[0], &record[1]),
        }
    }
    Ok(CategoryGraph::new(ids.len(), edges)?)
}
