//! Parallel against sequential execution on the three sweep shapes the
//! library runs: per-modulus residue tables, character-sum windows, and the
//! per-n L-value map behind Ψ_Γ.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gausslab::characters::{exponent_fit_by, quad_symbol};
use gausslab::gaussian::{canon, enumerate, GaussianInt as G, NormRange};
use gausslab::geodesics::{PsiEngine, KAPPA};
use gausslab::kloosterman::{rho_table, ResidueSystem};
use gausslab::par::{self, Exec};
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn moduli(max_norm: u64) -> Vec<G> {
    let mut cs: Vec<G> = enumerate(NormRange::new(0, max_norm).unwrap()).into_iter().map(|c| canon(c).unwrap()).collect();
    cs.sort();
    cs.dedup();
    cs
}

fn rho_tables(c: &mut Criterion) {
    let cs = moduli(400);
    let mut group = c.benchmark_group("rho_tables");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                let sums = par::map(exec, &cs, |&c| {
                    let rs = ResidueSystem::new(c).unwrap();
                    rho_table(&rs).unwrap().iter().map(|&v| v as u64).sum::<u64>()
                });
                black_box(sums)
            })
        });
    }
    group.finish();
}

fn character_windows(c: &mut Criterion) {
    let ds: Vec<G> = [(3, 2), (5, 4), (7, 2), (11, 6), (13, 10), (17, 8)].map(|(a, b)| G::new(a, b)).to_vec();
    let ys = [200.0, 800.0, 3200.0];
    let mut group = c.benchmark_group("character_windows");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(exponent_fit_by(exec, &ds, &ys, |d, n| quad_symbol(d, n).unwrap_or(0) as f64)))
        });
    }
    group.finish();
}

fn psi_map(c: &mut Criterion) {
    // warm the L-value cache so the comparison measures the map, not the first fill
    let engine = PsiEngine::global();
    engine.psi_by(Exec::Parallel, 2000.0, KAPPA).unwrap();
    let mut group = c.benchmark_group("psi_cached");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(engine.psi_by(exec, 2000.0, KAPPA).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, rho_tables, character_windows, psi_map);
criterion_main!(benches);
