use catgraph::graph::{count_msts, umst_edges, MstStructure};
use catgraph::inference::{draw_rng, mc_perm_pvalue};
use catgraph::sim::{HaplotypeModel, Scenario};
use catgraph::{DistanceMatrix, StatSpec};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn hypercube(length: u32) -> DistanceMatrix {
    DistanceMatrix::from_fn(1 << length, |i, j| (i ^ j).count_ones() as f64).unwrap()
}

fn mst_counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_msts/hypercube");
    for length in [4, 5, 6] {
        let d = hypercube(length);
        group.bench_with_input(BenchmarkId::from_parameter(length), &d, |b, d| {
            b.iter(|| count_msts(black_box(d)))
        });
    }
    group.finish();
}

fn haplotype_graphs(c: &mut Criterion) {
    let scenario = Scenario::Haplotype {
        model: HaplotypeModel::association(11),
        n_subjects: 1000,
    };
    let (_, d) = scenario.generate(&mut draw_rng(1, 0)).unwrap();
    c.bench_function("umst_edges/haplotype_11x1000", |b| b.iter(|| umst_edges(black_box(&d))));
    c.bench_function("mst_structure/haplotype_11x1000", |b| {
        b.iter(|| MstStructure::new(black_box(&d)).log10_count())
    });
}

fn permutation_loop(c: &mut Criterion) {
    let scenario = Scenario::named("haplotype").unwrap();
    let (table, d) = scenario.generate(&mut draw_rng(2, 0)).unwrap();
    let mut group = c.benchmark_group("perm_1000/haplotype_11x1000");
    group.sample_size(20);
    for spec in [StatSpec::CUMst, StatSpec::UMst, StatSpec::Pearson] {
        let stat = spec.build(&table, &d, 1_000_000).unwrap();
        let upper = stat.kind().upper_tail();
        group.bench_function(spec.name(), |b| {
            b.iter(|| mc_perm_pvalue(|x| stat.eval(x), &table, 1000, 7, upper).unwrap().p)
        });
    }
    group.finish();
}

criterion_group!(benches, mst_counting, haplotype_graphs, permutation_loop);
criterion_main!(benches);
