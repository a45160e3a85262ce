mod args;
mod failure;
mod input;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use catgraph::graph::{mst_single, umst_edges, unng_categories};
use catgraph::inference::{
    bootstrap_moments_r, perm_moments_r, perm_moments_t, run_test, PValueMethod, TestConfig,
};
use catgraph::sim::{
    power_study, pvalue_accuracy, summarize_accuracy, HaplotypeModel, Scenario, StudyConfig,
};
use catgraph::{CategoryGraph, ContingencyTable, DistanceMatrix, Error, StatKind, StatSpec, Statistic};
use clap::Parser;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use args::{
    AccuracyArgs, Cli, Command, GraphArgs, GraphFormat, GraphKind, MomentsArgs, PowerArgs,
    Similarity, SimulateCommand, StudyArgs, TestArgs,
};
use failure::{is_cap, Failure};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot set up {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Moments(a) => cmd_moments(a),
        Command::Simulate(SimulateCommand::Power(a)) => cmd_power(a),
        Command::Simulate(SimulateCommand::PvalueAccuracy(a)) => cmd_accuracy(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let seed = rand::rng().random();
        eprintln!("seed: {seed}");
        seed
    })
}

fn distances(
    similarity: &Similarity,
    table: &ContingencyTable,
    listed: &[String],
) -> Result<Option<DistanceMatrix>, Failure> {
    match (&similarity.dist, &similarity.metric) {
        (Some(path), _) => Ok(Some(input::read_distances(path, table, listed)?)),
        (None, Some(metric)) => Ok(Some(input::metric_distances(metric, table.ids())?)),
        (None, None) => Ok(None),
    }
}

fn category_graph(
    kind: GraphKind,
    d: Option<&DistanceMatrix>,
    similarity: &Similarity,
    ids: &[String],
) -> Result<CategoryGraph, Failure> {
    if kind == GraphKind::Custom {
        let path = similarity
            .edges
            .as_ref()
            .ok_or_else(|| Failure::input("a custom graph needs --edges"))?;
        return input::read_edges(path, ids);
    }
    let d = d.ok_or_else(|| Failure::input("this graph needs --dist or --metric"))?;
    Ok(match kind {
        GraphKind::Mst => mst_single(d),
        GraphKind::Umst => umst_edges(d),
        GraphKind::CUnng => unng_categories(d),
        GraphKind::Custom => unreachable!(),
    })
}

fn cap_advice(stat: &str, e: &Error) -> Failure {
    let alternative = if stat == "aMDP" { "uNNG" } else { "C-uMST" };
    Failure {
        message: format!("{e}; rerun with --stat {alternative}, or pass --fallback to switch automatically"),
        cap: true,
    }
}

fn build_statistic(
    args: &TestArgs,
    table: &ContingencyTable,
    d: Option<&DistanceMatrix>,
) -> Result<Statistic, Failure> {
    let name = args.stat.as_str();
    if matches!(name.to_ascii_lowercase().as_str(), "c0" | "t-c0" | "t_c0") {
        let kind = args.graph.unwrap_or(if args.similarity.edges.is_some() {
            GraphKind::Custom
        } else {
            GraphKind::Umst
        });
        let g = category_graph(kind, d, &args.similarity, table.ids())?;
        return Ok(if name.eq_ignore_ascii_case("c0") {
            Statistic::r_c0(table, &g)?
        } else {
            Statistic::t_c0(table, &g)?
        });
    }
    let spec: StatSpec = name.parse()?;
    let needs_distances = !matches!(spec, StatSpec::Pearson | StatSpec::Deviance);
    let placeholder;
    let d = match d {
        Some(d) => d,
        None if needs_distances => {
            return Err(Failure::input(format!("{spec} needs --dist or --metric")));
        }
        None => {
            placeholder = DistanceMatrix::from_fn(table.k(), |_, _| 1.0)?;
            &placeholder
        }
    };
    match spec.build(table, d, args.cap) {
        Ok(s) => Ok(s),
        Err(e) if is_cap(&e) && matches!(spec, StatSpec::AMst | StatSpec::AMdp) => {
            if !args.fallback {
                return Err(cap_advice(spec.name(), &e));
            }
            let (replacement, kind) = match spec {
                StatSpec::AMst => (StatSpec::CUMst, StatKind::C0),
                _ => (StatSpec::UNng, StatKind::UNngSubjects),
            };
            log::warn!("{spec}: {e}; using {replacement}");
            Ok(replacement
                .build(table, d, args.cap)?
                .with_kind(kind, replacement.name())
                .with_fallback(format!("{spec} replaced by {replacement}: {e}")))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_test(args: TestArgs) -> Result<(), Failure> {
    let (table, listed) = input::read_table(&args.table)?;
    let d = distances(&args.similarity, &table, &listed)?;
    let stat = build_statistic(&args, &table, d.as_ref())?;
    let method: PValueMethod = args.pvalue.parse()?;
    let seed = resolve_seed(args.seed);
    let config = TestConfig {
        method,
        seed,
        threshold: args.threshold,
    };
    let result = run_test(&table, &stat, &config).map_err(|e| match e {
        Error::TooLarge(_) => Failure {
            message: format!("{e}; use --pvalue perm:B instead"),
            cap: true,
        },
        e => e.into(),
    })?;
    let mut value = serde_json::to_value(&result).expect("result serializes");
    value["name"] = json!(args.stat);
    value["graph"] = json!(result.value.graph);
    value["fallbacks"] = json!(result.value.fallbacks);
    let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
    emit(args.output.as_deref(), &text)
}

fn cmd_graph(args: GraphArgs) -> Result<(), Failure> {
    let (table, ids, d) = match &args.table {
        Some(path) => {
            let (table, listed) = input::read_table(path)?;
            let d = distances(&args.similarity, &table, &listed)?;
            let ids = table.ids().to_vec();
            (Some(table), ids, d)
        }
        None => {
            let path = args.similarity.dist.as_ref().ok_or_else(|| {
                Failure::input("graph needs --table, or --dist to take categories from")
            })?;
            let (ids, rows) = input::read_distance_rows(path)?;
            let d = DistanceMatrix::from_rows(&rows)?;
            (None, ids, Some(d))
        }
    };
    let g = category_graph(args.kind, d.as_ref(), &args.similarity, &ids)?;
    let text = match args.format {
        GraphFormat::Csv => g.to_csv(&ids),
        GraphFormat::Dot => {
            let table = table.ok_or_else(|| Failure::input("DOT output needs --table for the count labels"))?;
            g.to_dot(&table)
        }
    };
    emit(args.output.as_deref(), &text)
}

fn cmd_moments(args: MomentsArgs) -> Result<(), Failure> {
    let (table, listed) = input::read_table(&args.table)?;
    let d = distances(&args.similarity, &table, &listed)?;
    let g = category_graph(args.graph, d.as_ref(), &args.similarity, table.ids())?;
    let pair = |m: catgraph::inference::NullMoments| json!({"mean": m.mean, "variance": m.variance});
    let value = json!({
        "K": table.k(),
        "N": table.total(),
        "n_a": table.n_a(),
        "n_b": table.n_b(),
        "edges": g.len(),
        "R_permutation": pair(perm_moments_r(&table, &g)?),
        "T_permutation": pair(perm_moments_t(&table, &g)?),
        "R_bootstrap": pair(bootstrap_moments_r(&table, &g)?),
    });
    let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
    emit(args.output.as_deref(), &text)
}

fn parse_stats(names: &[String], default: &[StatSpec]) -> Result<Vec<StatSpec>, Failure> {
    if names.is_empty() {
        return Ok(default.to_vec());
    }
    Ok(names.iter().map(|s| s.parse()).collect::<Result<_, _>>()?)
}

fn study_config(study: &StudyArgs) -> StudyConfig {
    StudyConfig {
        runs: study.runs,
        permutations: study.perms,
        seed: resolve_seed(study.seed),
        cap: study.cap,
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Failure::input(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Failure::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn apply_overrides(scenario: &mut Scenario, args: &PowerArgs) -> Result<(), Failure> {
    match scenario {
        Scenario::Binned { n_per_group, bins, .. } => {
            *n_per_group = args.n.unwrap_or(*n_per_group);
            *bins = args.bins.unwrap_or(*bins);
        }
        Scenario::Mallows {
            theta,
            generate,
            graph_metric,
            n_per_group,
            ..
        } => {
            *n_per_group = args.n.unwrap_or(*n_per_group);
            *theta = args.theta.unwrap_or(*theta);
            if let Some(m) = &args.generate_metric {
                *generate = m.parse()?;
            }
            if let Some(m) = &args.graph_metric {
                *graph_metric = m.parse()?;
            }
        }
        Scenario::Haplotype { model, n_subjects } => {
            *n_subjects = args.n.unwrap_or(*n_subjects);
            if let Some(length) = args.length {
                *model = if model.step == 0.0 {
                    HaplotypeModel::null(length)
                } else {
                    HaplotypeModel::association(length)
                };
            }
        }
    }
    Ok(())
}

fn cmd_power(args: PowerArgs) -> Result<(), Failure> {
    let mut scenario = Scenario::named(&args.scenario)?;
    apply_overrides(&mut scenario, &args)?;
    let default: &[StatSpec] = match scenario {
        Scenario::Binned { .. } => &[
            StatSpec::AMst,
            StatSpec::UMst,
            StatSpec::AMdp,
            StatSpec::UNng,
            StatSpec::Deviance,
            StatSpec::Pearson,
        ],
        _ => &[
            StatSpec::UMst,
            StatSpec::CUMst,
            StatSpec::CUNng,
            StatSpec::Deviance,
            StatSpec::Pearson,
        ],
    };
    let stats = parse_stats(&args.study.stats, default)?;
    let config = study_config(&args.study);
    let study = power_study(&scenario, &stats, &args.alphas, &config)?;
    for row in &study.rows {
        eprintln!(
            "{} {}: alpha {} power {:.3} (se {:.3}, {} runs)",
            args.scenario, row.statistic, row.alpha, row.power, row.stderr, row.runs
        );
    }
    emit(args.study.output.as_deref(), &to_csv(&study.rows)?)
}

fn cmd_accuracy(args: AccuracyArgs) -> Result<(), Failure> {
    let stats = parse_stats(&args.study.stats, &[StatSpec::CUMst, StatSpec::CUNng, StatSpec::UMst])?;
    let config = study_config(&args.study);
    let rows = pvalue_accuracy(&args.lengths, &args.sizes, &stats, &config)?;
    let summary = summarize_accuracy(&rows);
    for s in &summary {
        eprintln!(
            "length {} N {} {}: median diff {:.4}, IQR [{:.4}, {:.4}], median |diff| {:.4}",
            s.length, s.n, s.statistic, s.median, s.q1, s.q3, s.median_abs
        );
    }
    if let Some(path) = &args.summary {
        emit(Some(path), &to_csv(&summary)?)?;
    }
    emit(args.study.output.as_deref(), &to_csv(&rows)?)
}
