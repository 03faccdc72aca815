use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use frontsheaf::chd::{aug_to_chd, enumerate_augmentations, DEFAULT_BOUND};
use frontsheaf::{build_dga, build_sheaf, build_strata, verify_axioms, FrontComplex, PrimeField};

fn load(name: &str) -> FrontComplex {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.toml"));
    FrontComplex::load_validated(&path).unwrap()
}

fn pipeline(c: &mut Criterion) {
    let f2 = PrimeField::new(2).unwrap();
    for name in ["unknot_sphere", "crossing_circle", "triple_point_vertex"] {
        let front = load(name);
        let dga = build_dga(&front).unwrap();
        let augs = enumerate_augmentations(&dga, f2, DEFAULT_BOUND).unwrap();
        let chd = aug_to_chd(&dga, &augs[0]);
        let poset = build_strata(&front).unwrap();

        let mut g = c.benchmark_group(name);
        g.sample_size(10);
        g.bench_function("dga", |b| b.iter(|| build_dga(&front).unwrap()));
        g.bench_function("augmentations", |b| {
            b.iter(|| enumerate_augmentations(&dga, f2, DEFAULT_BOUND).unwrap())
        });
        g.bench_function("strata", |b| b.iter(|| build_strata(&front).unwrap()));
        g.bench_function("sheaf", |b| b.iter(|| build_sheaf(&poset, &chd).unwrap()));
        let sheaf = build_sheaf(&poset, &chd).unwrap();
        g.bench_function("verify", |b| b.iter(|| verify_axioms(&sheaf)));
        g.finish();
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
