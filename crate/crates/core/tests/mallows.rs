use catgraph::inference::draw_rng;
use catgraph::sim::Mallows;
use catgraph::{Metric, Ranking};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn goodness_of_fit(metric: Metric, theta: f64, seed: u64) -> f64 {
    let zeta0: Ranking = "3142".parse().unwrap();
    let model = Mallows::new(&zeta0, theta, metric).unwrap();
    let n = 100_000;
    let mut counts = vec![0usize; model.support().len()];
    let mut rng = draw_rng(seed, 0);
    for _ in 0..n {
        counts[model.draw_index(&mut rng)] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(model.probabilities())
        .map(|(&c, &p)| (c as f64 - n as f64 * p).powi(2) / (n as f64 * p))
        .sum();
    ChiSquared::new((counts.len() - 1) as f64).unwrap().sf(stat)
}

#[test]
fn samples_match_exact_table() {
    for (metric, theta) in [(Metric::Kendall, 0.5), (Metric::SpearmanSq, 0.2), (Metric::Kendall, 0.0)] {
        let p = goodness_of_fit(metric, theta, 17);
        assert!(p > 0.001, "{metric} theta {theta}: p = {p}");
    }
}

#[test]
fn probabilities_sum_to_one() {
    for n in 1..=6 {
        let m = Mallows::new(&Ranking::identity(n), 1.3, Metric::SpearmanFootrule).unwrap();
        let total: f64 = m.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
