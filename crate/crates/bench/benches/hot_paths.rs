use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tailcheck::intervals::{clopper_pearson, zielinski_shortest, TailSpec};
use tailcheck::rng_stream;
use tailcheck::roc::{bootstrap_auc_difference_test, venkatraman_test};
use tailcheck::scenarios::{
    equal_median_scenario, generate_roc_dataset, generate_survival_dataset, RocScenarioParams,
};
use tailcheck::survival::{weighted_logrank, WeightScheme};

fn roc(c: &mut Criterion) {
    let data =
        generate_roc_dataset(&RocScenarioParams::calibrated_default(), &rng_stream(1, 0)).unwrap();
    let rng = rng_stream(1, 1);
    c.bench_function("venkatraman 200 subjects x 999 permutations", |b| {
        b.iter(|| venkatraman_test(black_box(&data), 999, &rng).unwrap())
    });
    c.bench_function("bootstrap auc 200 subjects x 1000 resamples", |b| {
        b.iter(|| bootstrap_auc_difference_test(black_box(&data), 1000, &rng).unwrap())
    });
}

fn intervals(c: &mut Criterion) {
    c.bench_function("zielinski shortest n=30, all x", |b| {
        b.iter(|| {
            (0..=30)
                .map(|x| zielinski_shortest(x, black_box(30), 0.05).unwrap().width())
                .sum::<f64>()
        })
    });
    let tails = TailSpec::equal(0.05).unwrap();
    c.bench_function("clopper-pearson n=30, all x", |b| {
        b.iter(|| {
            (0..=30)
                .map(|x| clopper_pearson(x, black_box(30), tails).unwrap().width())
                .sum::<f64>()
        })
    });
}

fn survival(c: &mut Criterion) {
    let data = generate_survival_dataset(&equal_median_scenario(), &rng_stream(1, 0)).unwrap();
    let mut group = c.benchmark_group("weighted log-rank 1000 records");
    for scheme in WeightScheme::STANDARD {
        group.bench_function(scheme.name(), |b| {
            b.iter(|| weighted_logrank(black_box(&data), scheme).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, roc, intervals, survival);
criterion_main!(benches);
