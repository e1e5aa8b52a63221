use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qss_core::adversary::AttackSpec;
use qss_core::belltest::{chsh4_exact, chsh4_sampled, default_settings};
use qss_core::protocol::TranscriptDetail;
use qss_core::qstate::{partial_transpose, smolin_state};
use qss_core::{run_session, Rng, SessionConfig};

fn exact(c: &mut Criterion) {
    let s = smolin_state();
    let table = default_settings();
    c.bench_function("chsh4_exact", |b| b.iter(|| chsh4_exact(black_box(&s), &table).unwrap()));
    c.bench_function("partial_transpose_eigen", |b| {
        b.iter(|| partial_transpose(black_box(&s), &[0]).unwrap().min_eigenvalue())
    });
}

fn sampled(c: &mut Criterion) {
    let s = smolin_state();
    let table = default_settings();
    let mut group = c.benchmark_group("chsh4_sampled");
    for rounds in [1_000u64, 100_000] {
        group.bench_with_input(BenchmarkId::from_parameter(rounds), &rounds, |b, &rounds| {
            let mut rng = Rng::new(1);
            b.iter(|| chsh4_sampled(&s, &table, rounds, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn session(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_session");
    group.sample_size(10);
    for (name, attack) in [
        ("honest", None),
        ("clone", Some(AttackSpec::clone_depolarize(2.0 / 3.0).unwrap())),
        ("bell-resend", Some(AttackSpec::bell_resend())),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| {
                run_session(SessionConfig {
                    n_copies: 10_000,
                    master_seed: 7,
                    attack,
                    detail: TranscriptDetail::Summary,
                    ..SessionConfig::default()
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, exact, sampled, session);
criterion_main!(benches);
