use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zulf_core::config::Config;
use zulf_core::gqsp::GqspPlan;
use zulf_core::lcost::{aggregate, CostLedger};
use zulf_core::oracle::{correlator, InitialState, Observable};
use zulf_core::physest::{optimize, HardwareModel, Job};
use zulf_core::report::Molecule;
use zulf_core::structio::{
    parse_structure, DipolarMode, NucleusSet, RegimeConfig, StructureFormat,
};

fn strychnine_bytes() -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/strychnine.mol");
    std::fs::read(path).expect("fixture present")
}

fn hetero() -> Config {
    Config {
        regime: RegimeConfig::new(NucleusSet::Heteronuclear, DipolarMode::None),
        ..Config::default()
    }
}

fn pipeline(c: &mut Criterion) {
    let bytes = strychnine_bytes();
    let config = hetero();
    c.bench_function("analyze_strychnine_hetero", |b| {
        b.iter(|| {
            let g = parse_structure(black_box(&bytes), StructureFormat::MolV2000).unwrap();
            Molecule::analyze(g, &config).unwrap()
        })
    });

    let g = parse_structure(&bytes, StructureFormat::MolV2000).unwrap();
    let molecule = Molecule::analyze(g, &config).unwrap();
    c.bench_function("aggregate_400_points", |b| {
        b.iter(|| {
            aggregate(
                &molecule.clusters,
                &config.budget,
                20,
                CostLedger::standard(),
            )
            .unwrap()
        })
    });
}

fn phases(c: &mut Criterion) {
    let mut group = c.benchmark_group("gqsp_phases");
    for tau in [10.0, 50.0, 200.0] {
        group.bench_with_input(BenchmarkId::from_parameter(tau), &tau, |b, &tau| {
            b.iter(|| GqspPlan::for_tau(tau, 1e-3).unwrap().with_phases().unwrap())
        });
    }
    group.finish();
}

fn physical(c: &mut Criterion) {
    let hw = HardwareModel::default();
    let job = Job {
        n_t: 1_000_000_000,
        n_logical: 100,
    };
    c.bench_function("optimize_distances", |b| {
        b.iter(|| optimize(black_box(job), &hw, 1e-3).unwrap())
    });
}

fn dense_oracle(c: &mut Criterion) {
    let bytes = std::fs::read(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/ethanol.mol"),
    )
    .unwrap();
    let g = parse_structure(&bytes, StructureFormat::MolV2000).unwrap();
    let config = hetero();
    let molecule = Molecule::analyze(g, &config).unwrap();
    let h = &molecule.clusters.clusters[0].hamiltonian;
    let gammas = molecule.cluster_gammas(0).unwrap();
    let obs = Observable::mz(&gammas, config.regime.gyromagnetic.h1);
    let times: Vec<f64> = (0..512).map(|i| i as f64 / 511.0).collect();
    c.bench_function("correlator_ethanol_hetero", |b| {
        b.iter(|| correlator(h, &InitialState::Uniform, &obs, &times).unwrap())
    });
}

criterion_group!(benches, pipeline, phases, physical, dense_oracle);
criterion_main!(benches);
