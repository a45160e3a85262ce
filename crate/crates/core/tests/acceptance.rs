//! Acceptance criteria, checked against brute-force oracles and simulation.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use catgraph::graph::{count_embeddings, count_msts, enumerate_msts, umst_edges, DEFAULT_MST_CAP};
use catgraph::inference::{exact_perm_distribution, perm_moments_r, perm_moments_t};
use catgraph::sim::{power_study, pvalue_accuracy, summarize_accuracy, HaplotypeModel, Scenario, StudyConfig};
use catgraph::stats::{r_amdp, r_amst, r_umst, t_c0};
use catgraph::{CategoryGraph, ContingencyTable, DistanceMatrix, StatSpec, Statistic};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// All labeled trees on `n` vertices, by Prüfer decoding.
fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 | 1 => return vec![vec![]],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let seq: Vec<usize> = (0..len)
            .map(|_| {
                let x = code % n;
                code /= n;
                x
            })
            .collect();
        let mut degree = vec![1usize; n];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf.min(x), leaf.max(x)));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// All perfect pairings of `0..n` (`n` even).
fn pairings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let other = free.remove(i);
            cur.push((first, other));
            go(free, cur, out);
            cur.pop();
            free.insert(i, other);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Random table with every margin at least one and `total <= max_total`.
fn random_table(rng: &mut ChaCha8Rng, k: usize, max_total: u64) -> ContingencyTable {
    loop {
        let rows: Vec<(String, i64, i64)> = (0..k)
            .map(|i| {
                let a = rng.random_range(0..=2);
                let b = rng.random_range(0..=2);
                let (a, b) = if a + b == 0 { (1, 0) } else { (a, b) };
                (format!("c{i}"), a, b)
            })
            .collect();
        let t = ContingencyTable::from_records(&rows).unwrap();
        if t.total() <= max_total {
            return t;
        }
    }
}

fn random_distances(rng: &mut ChaCha8Rng, k: usize, values: &[f64]) -> DistanceMatrix {
    DistanceMatrix::from_fn(k, |_, _| values[rng.random_range(0..values.len())]).unwrap()
}

/// Subjects as `(category, is_a)`, in category order.
fn subjects(t: &ContingencyTable) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for k in 0..t.k() {
        out.extend(std::iter::repeat_n((k, true), t.counts_a()[k] as usize));
        out.extend(std::iter::repeat_n((k, false), t.counts_b()[k] as usize));
    }
    out
}

fn subject_distance(d: &DistanceMatrix, s: &[(usize, bool)], i: usize, j: usize) -> f64 {
    if s[i].0 == s[j].0 {
        0.0
    } else {
        d.get(s[i].0, s[j].0)
    }
}

fn cross(s: &[(usize, bool)], edges: &[(usize, usize)]) -> usize {
    edges.iter().filter(|&&(i, j)| s[i].1 != s[j].1).count()
}

/// Minimum spanning trees on subjects, by exhaustive search.
fn subject_msts(t: &ContingencyTable, d: &DistanceMatrix) -> Vec<Vec<(usize, usize)>> {
    let s = subjects(t);
    let trees = labeled_trees(s.len());
    let weight = |tree: &Vec<(usize, usize)>| -> f64 {
        tree.iter().map(|&(i, j)| subject_distance(d, &s, i, j)).sum()
    };
    let best = trees.iter().map(weight).fold(f64::INFINITY, f64::min);
    trees.into_iter().filter(|tr| weight(tr) <= best + 1e-9).collect()
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let instances = 200;
    for _ in 0..instances {
        let k = rng.random_range(2..=4);
        let t = random_table(&mut rng, k, 7);
        let d = random_distances(&mut rng, k, &[1.0, 2.0, 3.0]);
        let s = subjects(&t);
        let msts = subject_msts(&t, &d);
        let brute = msts.iter().map(|tr| cross(&s, tr) as f64).sum::<f64>() / msts.len() as f64;
        let got = r_amst(&t, &d, DEFAULT_MST_CAP).map_err(|e| e.to_string())?.value;
        worst = worst.max((got - brute).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("{instances} instances, max |diff| {worst:.2e}"))
    } else {
        Err(format!("max |diff| {worst:.3e} > 1e-9"))
    }
}

fn random_graph(rng: &mut ChaCha8Rng, k: usize) -> CategoryGraph {
    let edges: Vec<(usize, usize)> = (0..k)
        .flat_map(|u| (u + 1..k).map(move |v| (u, v)))
        .filter(|_| rng.random_bool(0.5))
        .collect();
    CategoryGraph::new(k, edges).unwrap()
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 150 {
        let k = rng.random_range(2..=5);
        let t = random_table(&mut rng, k, 10);
        if t.total() < 4 || t.n_a() == 0 || t.n_b() == 0 {
            continue;
        }
        let g = random_graph(&mut rng, k);
        let r = Statistic::r_c0(&t, &g).unwrap();
        let tc = Statistic::t_c0(&t, &g).unwrap();
        let exact_r = exact_perm_distribution(|c| r.eval(c), &t).unwrap();
        let exact_t = exact_perm_distribution(|c| tc.eval(c), &t).unwrap();
        let lemma_r = perm_moments_r(&t, &g).map_err(|e| e.to_string())?;
        let lemma_t = perm_moments_t(&t, &g).map_err(|e| e.to_string())?;
        for diff in [
            lemma_r.mean - exact_r.mean(),
            lemma_r.variance - exact_r.variance(),
            lemma_t.mean - exact_t.mean(),
            lemma_t.variance - exact_t.variance(),
        ] {
            worst = worst.max(diff.abs());
        }
        done += 1;
    }
    if worst <= 1e-9 {
        Ok(format!("{done} instances, max |diff| {worst:.2e}"))
    } else {
        Err(format!("max |diff| {worst:.3e} > 1e-9"))
    }
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    let instances = 150;
    for _ in 0..instances {
        let k = rng.random_range(1..=3);
        let t = random_table(&mut rng, k, 8);
        let d = random_distances(&mut rng, k, &[3.0, 4.0, 5.0]);
        let s = subjects(&t);
        let n = s.len();
        // an odd subject count gets a pseudo point at distance 0 from everyone
        let points = n + n % 2;
        let dist = |i: usize, j: usize| {
            if i >= n || j >= n {
                0.0
            } else {
                subject_distance(&d, &s, i, j)
            }
        };
        let all = pairings(points);
        let weight = |p: &Vec<(usize, usize)>| p.iter().map(|&(i, j)| dist(i, j)).sum::<f64>();
        let best = all.iter().map(weight).fold(f64::INFINITY, f64::min);
        let min: Vec<_> = all.iter().filter(|p| weight(p) <= best + 1e-9).collect();
        let brute = min
            .iter()
            .map(|p| p.iter().filter(|&&(i, j)| i < n && j < n && s[i].1 != s[j].1).count() as f64)
            .sum::<f64>()
            / min.len() as f64;
        let got = r_amdp(&t, &d, DEFAULT_MST_CAP).map_err(|e| e.to_string())?.value;
        worst = worst.max((got - brute).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("{instances} instances, max |diff| {worst:.2e}"))
    } else {
        Err(format!("max |diff| {worst:.3e} > 1e-9"))
    }
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let instances = 200;
    for case in 0..instances {
        let k = rng.random_range(2..=6);
        let d = random_distances(&mut rng, k, &[1.0, 2.0, 3.0, 4.0]);
        let trees = labeled_trees(k);
        let weight = |tr: &Vec<(usize, usize)>| tr.iter().map(|&(u, v)| d.get(u, v)).sum::<f64>();
        let best = trees.iter().map(weight).fold(f64::INFINITY, f64::min);
        let brute: BTreeSet<Vec<(usize, usize)>> = trees
            .iter()
            .filter(|tr| weight(tr) <= best + 1e-9)
            .map(|tr| {
                let mut tr = tr.clone();
                tr.sort_unstable();
                tr
            })
            .collect();
        if count_msts(&d) != BigUint::from(brute.len()) {
            return Err(format!("case {case}: count {} vs brute {}", count_msts(&d), brute.len()));
        }
        let union: BTreeSet<(usize, usize)> = brute.iter().flatten().copied().collect();
        let umst: BTreeSet<(usize, usize)> = umst_edges(&d).edges().iter().copied().collect();
        if union != umst {
            return Err(format!("case {case}: uMST {umst:?} vs brute union {union:?}"));
        }
        let listed = enumerate_msts(&d, DEFAULT_MST_CAP).map_err(|e| e.to_string())?;
        let listed: BTreeSet<Vec<(usize, usize)>> = listed
            .iter()
            .map(|g| {
                if (g.total_weight(&d) - best).abs() > 1e-9 {
                    Err(format!("case {case}: enumerated tree of weight {}", g.total_weight(&d)))
                } else {
                    Ok(g.edges().to_vec())
                }
            })
            .collect::<Result<_, _>>()?;
        if listed != brute {
            return Err(format!("case {case}: enumeration differs from brute force"));
        }
    }
    Ok(format!("{instances} matrices: counts, unions and enumerations agree"))
}

fn hypercube(length: u32) -> DistanceMatrix {
    DistanceMatrix::from_fn(1 << length, |i, j| (i ^ j).count_ones() as f64).unwrap()
}

fn hypercube_formula(n: u32) -> BigUint {
    let mut out = BigUint::from(2u32).pow((1u32 << n) - n - 1);
    for i in 2..=n {
        let choose = (0..i).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64);
        out *= BigUint::from(i).pow(choose as u32);
    }
    out
}

fn criterion_5() -> Check {
    for (length, want) in [(2, 4u64), (3, 384), (4, 42_467_328)] {
        let got = count_msts(&hypercube(length));
        if got != BigUint::from(want) {
            return Err(format!("length {length}: {got} vs {want}"));
        }
    }
    let got = count_msts(&hypercube(5));
    let want = hypercube_formula(5);
    if got != want {
        return Err(format!("length 5: {got} vs closed form {want}"));
    }
    Ok(format!("4, 384, 42467328 exact; length 5 = {got}"))
}

fn criterion_6() -> Check {
    let tree = CategoryGraph::new(6, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]).unwrap();
    let rows: Vec<(String, i64, i64)> = [2, 3, 1, 4, 3, 2]
        .iter()
        .enumerate()
        .map(|(i, &m)| (format!("c{i}"), m, 0))
        .collect();
    let t = ContingencyTable::from_records(&rows).unwrap();
    let degrees = tree.degrees();
    let got = count_embeddings(&tree, &t).map_err(|e| e.to_string())?;
    if degrees == [1, 3, 1, 2, 2, 1] && got == BigUint::from(15552u32) {
        Ok(format!("degrees {degrees:?} give {got}"))
    } else {
        Err(format!("degrees {degrees:?} give {got}"))
    }
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let instances = 1000;
    let mut brute_checked = 0;
    for case in 0..instances {
        let k = rng.random_range(2..=6);
        let t = random_table(&mut rng, k, 12);
        let d = random_distances(&mut rng, k, &[1.0, 2.0, 3.0]);
        let via_c0 = t_c0(&t, &umst_edges(&d)).unwrap().value;
        let direct = r_umst(&t, &d).unwrap().value;
        if via_c0 != direct || direct.fract() != 0.0 {
            return Err(format!("case {case}: {via_c0} vs {direct}"));
        }
        if t.total() <= 7 {
            let s = subjects(&t);
            let union: BTreeSet<(usize, usize)> = subject_msts(&t, &d).into_iter().flatten().collect();
            let edges: Vec<(usize, usize)> = union.into_iter().collect();
            if cross(&s, &edges) as f64 != direct {
                return Err(format!("case {case}: brute uMST on subjects gives {}", cross(&s, &edges)));
            }
            brute_checked += 1;
        }
    }
    Ok(format!("{instances} instances equal ({brute_checked} also against subject-level brute force)"))
}

fn criterion_8() -> Check {
    let scenario = Scenario::named("normal-shift").unwrap();
    let stats = [StatSpec::AMst, StatSpec::AMdp, StatSpec::UNng];
    let study = power_study(&scenario, &stats, &[0.05], &StudyConfig::new(300, 300, 20_130_808))
        .map_err(|e| e.to_string())?;
    let power: Vec<f64> = study.rows.iter().map(|r| r.power).collect();
    let detail = format!(
        "power at 0.05: aMST {:.3}, aMDP {:.3}, uNNG {:.3}",
        power[0], power[1], power[2]
    );
    if power[0] > power[1] && power[1] > power[2] && (power[0] - 0.762).abs() <= 0.10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Check {
    let config = StudyConfig::new(50, 2000, 6_300);
    let rows = pvalue_accuracy(&[8], &[500], &[StatSpec::CUMst, StatSpec::CUNng], &config)
        .map_err(|e| e.to_string())?;
    let small = pvalue_accuracy(&[8], &[100], &[StatSpec::UMst], &config).map_err(|e| e.to_string())?;
    let mut summary = summarize_accuracy(&rows);
    summary.extend(summarize_accuracy(&small));
    let find = |name: &str| summary.iter().find(|s| s.statistic == name).unwrap();
    let (cumst, cunng, umst) = (find("C-uMST"), find("C-uNNG"), find("uMST"));
    let detail = format!(
        "median |diff| C-uMST {:.4}, C-uNNG {:.4}; uMST (N=100) median diff {:.4}",
        cumst.median_abs, cunng.median_abs, umst.median
    );
    if cumst.median_abs <= 0.02 && cunng.median_abs <= 0.02 && umst.median < 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Check {
    let scenario = Scenario::Haplotype {
        model: HaplotypeModel::null(6),
        n_subjects: 200,
    };
    let runs = 1000;
    let study = power_study(&scenario, &[StatSpec::CUMst], &[0.05], &StudyConfig::new(runs, 999, 1010))
        .map_err(|e| e.to_string())?;
    let mut ps: Vec<f64> = study.pvalues[0].1.iter().flatten().copied().collect();
    if ps.len() != runs {
        return Err(format!("only {} of {runs} runs produced a p-value", ps.len()));
    }
    ps.sort_by(f64::total_cmp);
    let n = ps.len() as f64;
    let ks = ps
        .iter()
        .enumerate()
        .map(|(i, &p)| (p - i as f64 / n).max((i + 1) as f64 / n - p))
        .fold(0.0, f64::max);
    let critical = 1.628 / n.sqrt();
    let rate = study.rows[0].power;
    let se = (0.05 * 0.95 / n).sqrt();
    let detail = format!("KS D {ks:.4} (1% critical {critical:.4}), rejection rate {rate:.3} (0.05 +- {:.3})", 3.0 * se);
    if ks <= critical && (rate - 0.05).abs() <= 3.0 * se {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 aMST equals average over MSTs on subjects", criterion_1),
        ("2 permutation moments match enumeration", criterion_2),
        ("3 aMDP equals average over minimum pairings", criterion_3),
        ("4 MST count, union and enumeration", criterion_4),
        ("5 hypercube MST counts", criterion_5),
        ("6 embedding count", criterion_6),
        ("7 T on uMST equals R_uMST", criterion_7),
        ("8 binned normal-shift power", criterion_8),
        ("9 normal p-value accuracy", criterion_9),
        ("10 null p-values uniform", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
