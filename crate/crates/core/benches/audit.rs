use affine_surject::cli::{example_2_2_bundle, punctured_bundle};
use affine_surject::verify::{audit_surjectivity, Execution, SampleConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn config(execution: Execution) -> SampleConfig {
    SampleConfig {
        samples: 200,
        execution,
        ..SampleConfig::default()
    }
}

fn audit(c: &mut Criterion) {
    let bundles = [
        ("nodal", example_2_2_bundle().unwrap()),
        ("punctured-4", punctured_bundle(4).unwrap()),
    ];
    let mut group = c.benchmark_group("audit_surjectivity");
    group.sample_size(10);
    for (name, bundle) in &bundles {
        for (label, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            group.bench_with_input(BenchmarkId::new(label, name), bundle, |b, bundle| {
                b.iter(|| audit_surjectivity(bundle, &config(exec)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, audit);
criterion_main!(benches);
