use std::path::Path;

use criterion::{criterion_group, Criterion};
use minioo::{check, parse_source, run, ParseContext, Source, Store};

fn corpus(name: &str) -> Source {
    Source::read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)).unwrap()
}

fn pipeline(c: &mut Criterion) {
    let prelude = corpus("prelude.moo");
    for case in ["shapes.moo", "colored.moo", "listobj.moo"] {
        let src = corpus(case);
        c.bench_function(&format!("parse {case}"), |b| {
            b.iter(|| {
                let mut ctx = ParseContext::default();
                parse_source(&prelude.text, &prelude.name, &mut ctx).unwrap();
                parse_source(&src.text, &src.name, &mut ctx).unwrap()
            })
        });
        c.bench_function(&format!("check {case}"), |b| b.iter(|| check(Some(&prelude), &src).unwrap()));
        c.bench_function(&format!("run {case}"), |b| {
            b.iter(|| run(Some(&prelude), &src, Store::capture()).1.is_ok())
        });
    }
}

criterion_group!(benches, pipeline);

fn main() {
    minioo::with_big_stack(|| {
        benches();
        Criterion::default().configure_from_args().final_summary();
    });
}
