use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use crowdnet_core::centrality::{betweenness, closeness, worker_rank};
use crowdnet_core::community::greedy_cluster;
use crowdnet_core::data::generate_synthetic;
use crowdnet_core::graph::{build_bipartite, project_workers};
use crowdnet_core::metrics::build_metric_table;
use crowdnet_core::stats::{f_cdf, one_way_anova};
use crowdnet_core::{Dataset, EdgeWeighting, SynthConfig, WorkerGraph};

fn planted(workers: usize, seed: u64) -> Dataset {
    let mut cfg = SynthConfig::planted(workers, 4, seed);
    // Keep roughly a dozen tasks per worker at every size.
    cfg.p_in = (12.0 / (cfg.task_count as f64 / 4.0)).min(0.2);
    cfg.p_out = cfg.p_in / 20.0;
    generate_synthetic(&cfg).expect("valid config").dataset
}

fn network(d: &Dataset) -> WorkerGraph {
    project_workers(&build_bipartite(&d.events))
}

fn projection(c: &mut Criterion) {
    let mut group = c.benchmark_group("projection");
    for n in [160, 640] {
        let d = planted(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| b.iter(|| network(black_box(d))));
    }
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_cluster");
    group.sample_size(10);
    for n in [160, 640, 2300] {
        let g = network(&planted(n, 2));
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| greedy_cluster(black_box(g), EdgeWeighting::Unweighted).unwrap())
        });
    }
    group.finish();
}

fn centrality(c: &mut Criterion) {
    let mut group = c.benchmark_group("centrality");
    group.sample_size(10);
    let g = network(&planted(640, 3));
    group.bench_function("betweenness/640", |b| b.iter(|| betweenness(black_box(&g))));
    group.bench_function("closeness/640", |b| b.iter(|| closeness(black_box(&g))));
    group.bench_function("worker_rank/640", |b| b.iter(|| worker_rank(black_box(&g))));
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let d = planted(640, 4);
    let g = network(&d);
    let p = greedy_cluster(&g, EdgeWeighting::Unweighted).unwrap();
    let clusters = g.nodes().iter().cloned().zip(p.assignment.iter().copied()).collect();
    c.bench_function("metric_table/640", |b| b.iter(|| build_metric_table(black_box(&d), &clusters).unwrap()));
}

fn statistics(c: &mut Criterion) {
    c.bench_function("f_cdf", |b| b.iter(|| f_cdf(black_box(2.7), black_box(3.0), black_box(2255.0)).unwrap()));
    let groups: Vec<Vec<f64>> =
        (0..4).map(|g| (0..500).map(|i| ((i * 37 + g * 11) % 100) as f64 / 100.0).collect()).collect();
    c.bench_function("one_way_anova/4x500", |b| b.iter(|| one_way_anova(black_box(&groups)).unwrap()));
}

criterion_group!(benches, projection, clustering, centrality, metrics, statistics);
criterion_main!(benches);
