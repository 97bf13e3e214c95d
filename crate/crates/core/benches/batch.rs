//! Proving a batch of random systems sequentially and through `batch::map`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kbosat::batch;
use kbosat::kbo::PrecedenceMode;
use kbosat::proof::EngineKind;
use kbosat::prover::{prove, RunConfig};
use kbosat::random::{random_family, Family};
use kbosat::term::Trs;

fn verdicts(systems: &[Trs], cfg: &RunConfig, parallel: bool) -> usize {
    let run = |t: &Trs| prove(t, cfg).map(|o| o.verdict.is_yes()).unwrap_or(false);
    let out = if parallel { batch::map(systems, run) } else { batch::map_sequential(systems, run) };
    out.into_iter().filter(|&y| y).count()
}

fn bench_batch(c: &mut Criterion) {
    let family = Family { max_symbols: 4, max_arity: 2, max_depth: 3, max_rules: 4 };
    let systems = random_family(42, 64, &family);
    let mut group = c.benchmark_group("prove-64-random");
    group.sample_size(10);
    for engine in [EngineKind::Sat, EngineKind::Pbc] {
        let cfg = RunConfig { timeout: None, ..RunConfig::new(engine, 3, PrecedenceMode::Quasi) };
        group.bench_with_input(BenchmarkId::new("sequential", engine), &cfg, |b, cfg| {
            b.iter(|| verdicts(black_box(&systems), cfg, false))
        });
        let label = if batch::is_parallel() { "parallel" } else { "parallel-disabled" };
        group.bench_with_input(BenchmarkId::new(label, engine), &cfg, |b, cfg| {
            b.iter(|| verdicts(black_box(&systems), cfg, true))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_batch);
criterion_main!(benches);
