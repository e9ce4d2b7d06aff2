use std::hint::black_box;
use std::sync::Arc;

use ariel_core::grammar::sample_sentence;
use ariel_core::{fixtures, Codec, CodecConfig, Grammar, SymbolModel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup() -> (Arc<Grammar>, Vec<Vec<String>>) {
    let g = Arc::new(Grammar::parse(fixtures::QUESTION_GRAMMAR).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sentences = (0..256)
        .map(|_| sample_sentence(&g, &SymbolModel::UniformSentence, &mut rng))
        .collect();
    (g, sentences)
}

fn configs() -> Vec<(String, CodecConfig)> {
    vec![
        ("16".into(), CodecConfig::new(16)),
        ("512".into(), CodecConfig::new(512)),
        ("512-rotated".into(), CodecConfig::new(512).with_rotation(0)),
    ]
}

fn encode(c: &mut Criterion) {
    let (g, sentences) = setup();
    let mut group = c.benchmark_group("encode");
    for (name, cfg) in configs() {
        let codec = Codec::new(g.clone(), cfg).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &sentences, |b, s| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % s.len();
                black_box(codec.encode(&s[i]).unwrap())
            })
        });
    }
    group.finish();
}

fn decode(c: &mut Criterion) {
    let (g, sentences) = setup();
    let mut group = c.benchmark_group("decode");
    for (name, cfg) in configs() {
        let codec = Codec::new(g.clone(), cfg).unwrap();
        let vectors: Vec<Vec<f64>> = sentences.iter().map(|s| codec.encode(s).unwrap().0).collect();
        group.bench_with_input(BenchmarkId::from_parameter(name), &vectors, |b, v| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % v.len();
                black_box(codec.decode(&v[i]).unwrap())
            })
        });
    }
    group.finish();
}

fn sample(c: &mut Criterion) {
    let (g, _) = setup();
    let codec = Codec::new(g.clone(), CodecConfig::new(16)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("sample/latent-16", |b| b.iter(|| black_box(codec.sample(&mut rng))));
    c.bench_function("sample/grammar", |b| {
        b.iter(|| black_box(sample_sentence(&g, &SymbolModel::UniformSentence, &mut rng)))
    });
    c.bench_function("decode/random-16", |b| {
        b.iter(|| {
            let v: Vec<f64> = (0..16).map(|_| rng.gen()).collect();
            black_box(codec.decode(&v).unwrap())
        })
    });
}

criterion_group!(benches, encode, decode, sample);
criterion_main!(benches);
