use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qae_core::{
    build_qubo, exact_diagonalize, generate_ci_like_matrix, simulated_anneal, AnnealSchedule,
    EncodingState,
};

fn anneal(c: &mut Criterion) {
    let h = generate_ci_like_matrix(9, 1.0, 0.2, 0).unwrap();
    let enc = EncodingState::initial(3, 10).unwrap();
    let model = build_qubo(&h.submatrix(&[0, 1, 2]).unwrap(), h.get(0, 0), &enc).unwrap();
    let schedule = AnnealSchedule::for_model(&model, 1000).unwrap();
    c.bench_function("anneal_30var_100reads", |b| {
        b.iter(|| simulated_anneal(black_box(&model), 100, &schedule, 7).unwrap())
    });
}

fn qubo_construction(c: &mut Criterion) {
    let h = generate_ci_like_matrix(16, 1.0, 0.2, 0).unwrap();
    let enc = EncodingState::new(vec![0.1; 16], 10, 3).unwrap();
    c.bench_function("build_qubo_16x16_k10", |b| {
        b.iter(|| build_qubo(black_box(&h), -0.5, &enc).unwrap())
    });
}

fn jacobi(c: &mut Criterion) {
    let h = generate_ci_like_matrix(16, 1.0, 0.2, 0).unwrap();
    c.bench_function("jacobi_16x16", |b| b.iter(|| exact_diagonalize(black_box(&h)).unwrap()));
}

criterion_group!(benches, anneal, qubo_construction, jacobi);
criterion_main!(benches);
