//! Sequential versus rayon execution of the ensemble workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use morseph::distance::{self, DistanceOptions, Ensemble, Metric};
use morseph::models::ModelSpec;
use morseph::par::{self, Execution};
use morseph::pipeline::{self, PipelineConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ensembles(count: usize) -> Vec<Ensemble> {
    ["er:n=200,p=0.02", "ws:n=200,k=4,p=0.5", "ba:n=200,m=2"]
        .iter()
        .map(|text| {
            let spec: ModelSpec = text.parse().unwrap();
            Ensemble {
                label: spec.family().to_owned(),
                diagrams: (0..count as u64)
                    .map(|seed| pipeline::diagram(&spec.generate(seed).unwrap(), &PipelineConfig::new(seed)).unwrap())
                    .collect(),
            }
        })
        .collect()
}

fn bench_distance_matrix(c: &mut Criterion) {
    let data = ensembles(4);
    let opts = DistanceOptions::default();
    let mut group = c.benchmark_group("distance_matrix");
    group.sample_size(10);
    for metric in [Metric::Bottleneck, Metric::Wasserstein(1.0)] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(metric.name(), name), &exec, |b, &exec| {
                b.iter(|| distance::distance_matrix(&data, metric, &opts, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_ensemble_pipeline(c: &mut Criterion) {
    let spec: ModelSpec = "hgg:n=1000,k=4,gamma=2".parse().unwrap();
    let graphs: Vec<_> = (0..8).map(|seed| spec.generate(seed).unwrap()).collect();
    let mut group = c.benchmark_group("ensemble_pipeline");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                par::map_slice_with(exec, &graphs, |g| {
                    pipeline::analyze(g, &PipelineConfig::new(1)).unwrap().summary.mu
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_distance_matrix, bench_ensemble_pipeline);
criterion_main!(benches);
