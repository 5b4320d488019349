use std::hint::black_box;

use cogfeed_bench::{config, params};
use cogfeed_core::analysis::{optimal_bit_allocation, theorem1_su_outage};
use cogfeed_core::feedback::{quantize_cdi_rvq, CodebookKind, MIN_CODEBOOK_SAMPLES};
use cogfeed_core::mathkit::{regularized_upper_gamma, upper_incomplete_gamma};
use cogfeed_core::sim::{trial_rng, Stage};
use cogfeed_core::{build_ipc_codebook, sample_channels, BeamMode, Bits};
use criterion::{criterion_group, criterion_main, Criterion};

fn special_functions(c: &mut Criterion) {
    c.bench_function("upper_incomplete_gamma", |b| {
        b.iter(|| black_box(upper_incomplete_gamma(black_box(3), black_box(0.03)).unwrap()))
    });
    c.bench_function("regularized_upper_gamma", |b| {
        b.iter(|| black_box(regularized_upper_gamma(black_box(4), black_box(2.5)).unwrap()))
    });
    let p = params();
    c.bench_function("ocb_outage", |b| b.iter(|| black_box(theorem1_su_outage(&p, Bits::Finite(12)))));
    c.bench_function("bit_allocation_f12", |b| b.iter(|| black_box(optimal_bit_allocation(&p, 12).unwrap())));
}

fn quantizers(c: &mut Criterion) {
    let p = params();
    let mut rng = trial_rng(1, 0, Stage::Channel);
    let ch = sample_channels(&p, &mut rng);
    let mut group = c.benchmark_group("rvq");
    for bits in [6u32, 10] {
        group.bench_function(format!("B{bits}"), |b| {
            b.iter(|| black_box(quantize_cdi_rvq(&ch.s_x, &ch.s_s, Bits::Finite(bits), &mut rng).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("codebook_build");
    group.sample_size(10);
    for kind in [CodebookKind::Eta, CodebookKind::Nu] {
        let cfg = config(BeamMode::Ocb, false, Bits::Finite(6), 1);
        group.bench_function(format!("{kind:?}"), |b| {
            b.iter(|| black_box(build_ipc_codebook(&cfg.params, kind, MIN_CODEBOOK_SAMPLES, 7).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, special_functions, quantizers);
criterion_main!(benches);
