use conceptor_bench::{conceptor, load_params, network, patterns, reservoir};
use conceptor_core::{load_patterns, GenerateOptions};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("algebra");
    for n in [10, 100, 400] {
        let a = conceptor(n);
        let b = a.adapt_aperture(0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("and", n), &n, |bench, _| bench.iter(|| black_box(&a).and(&b).unwrap()));
        group.bench_with_input(BenchmarkId::new("or", n), &n, |bench, _| bench.iter(|| black_box(&a).or(&b).unwrap()));
        group.bench_with_input(BenchmarkId::new("aperture", n), &n, |bench, _| {
            bench.iter(|| black_box(&a).adapt_aperture(2.0).unwrap())
        });
    }
    group.finish();
}

fn drive(c: &mut Criterion) {
    let res = reservoir(100);
    let p = &patterns(1500)[0];
    c.bench_function("drive/n100/1500", |b| b.iter(|| res.drive(black_box(p), 500).unwrap()));
}

fn load(c: &mut Criterion) {
    let res = reservoir(100);
    let ps = patterns(1500);
    let params = load_params();
    let mut group = c.benchmark_group("load");
    group.sample_size(10);
    group.bench_function("batch/n100/4", |b| b.iter(|| load_patterns(&res, black_box(&ps), &params).unwrap()));
    group.finish();
}

fn generate(c: &mut Criterion) {
    let net = network(100);
    let cj = net.stored()[0].conceptor.clone();
    let opts = GenerateOptions::new(500);
    c.bench_function("generate/n100/500", |b| {
        b.iter(|| conceptor_core::generation::generate(&net, black_box(&cj), &opts).unwrap())
    });
}

criterion_group!(benches, algebra, drive, load, generate);
criterion_main!(benches);
