//! Cross-module properties on small random instances, checked against the
//! exhaustive oracles.

use divkit::dispersion::{brute_force_dispersion, greedy_dispersion, qptas_dispersion, QptasConfig};
use divkit::dks::{brute_force_subdks, submodular_dks, SubDksParams};
use divkit::io::{parse_document, to_json, Document, Instance};
use divkit::ranking::{brute_force_dcg, dcg_value, ptas_dcg, solve_dcg_lp, PtasConfig};
use divkit::lp::PivotRule;
use divkit::submodular::ZeroFunction;
use divkit::{CoverSet, DksInstance, GainFunction, MetricInstance, RngState, SetSystemInstance};
use proptest::prelude::*;

fn points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngState::new(seed);
    (0..n).map(|_| vec![rng.unit(), rng.unit()]).collect()
}

fn setsystem(n: usize, m: usize, seed: u64) -> SetSystemInstance {
    let mut rng = RngState::new(seed);
    let all: Vec<usize> = (0..n).collect();
    let sets = (0..m)
        .map(|_| {
            let size = 1 + rng.below(n);
            let members = rng.subset(&all, size);
            let k = 1 + rng.below(size);
            CoverSet { members, k }
        })
        .collect();
    SetSystemInstance::new(n, sets).unwrap()
}

fn dks(n: usize, k: usize, seed: u64) -> DksInstance<f64> {
    let mut rng = RngState::new(seed);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            triples.push((i, j, rng.unit()));
        }
    }
    DksInstance::new(n, &triples, vec![], k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn documents_round_trip(n in 2usize..8, m in 1usize..5, seed in any::<u64>()) {
        let docs = [
            Document::new(Instance::Metric(MetricInstance::from_points(points(n, seed)).unwrap())),
            Document::new(Instance::SetSystem(setsystem(n, m, seed))),
            Document::new(Instance::Dks(dks(n, 1 + seed as usize % n, seed))),
        ];
        for doc in docs {
            let text = to_json(&doc);
            let back = parse_document(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn relaxation_and_ptas_bracket_the_optimum(n in 2usize..7, m in 1usize..5, seed in any::<u64>()) {
        let inst = setsystem(n, m, seed);
        let (best, opt): (_, f64) = brute_force_dcg(&inst).unwrap();
        prop_assert!((dcg_value::<f64>(best.perm(), &inst, GainFunction::DcgStandard).unwrap() - opt).abs() < 1e-12);
        let lp = solve_dcg_lp::<f64>(&inst, GainFunction::DcgStandard, 200, PivotRule::Bland).unwrap();
        prop_assert!(lp.objective() >= opt - 1e-6);
        let mut cfg = PtasConfig::new(0.1);
        cfg.u = Some(1);
        cfg.trials = 10;
        let out = ptas_dcg::<f64>(&inst, &cfg, &mut RngState::new(seed)).unwrap();
        prop_assert!(out.value <= opt + 1e-9);
        prop_assert!(out.diagnostics.lp_bound >= opt - 1e-6);
    }

    #[test]
    fn dispersion_between_half_and_optimum(n in 3usize..10, seed in any::<u64>()) {
        let m = MetricInstance::from_points(points(n, seed)).unwrap();
        let p = 2 + seed as usize % (n - 1);
        let (_, opt) = brute_force_dispersion(&m, p).unwrap();
        let greedy = m.disp(&greedy_dispersion(&m, p).unwrap()).unwrap();
        prop_assert!(greedy >= 0.5 * opt - 1e-12);
        let out = qptas_dispersion(&m, p, &QptasConfig::exact(0.5), &mut RngState::new(seed)).unwrap();
        prop_assert_eq!(out.set.len(), p);
        prop_assert!(out.value >= greedy - 1e-12 && out.value <= opt + 1e-12);
    }

    #[test]
    fn single_part_dks_is_exact(n in 3usize..9, seed in any::<u64>()) {
        let inst = dks(n, 2 + seed as usize % (n - 1), seed);
        let zero = ZeroFunction { n };
        let (_, opt) = brute_force_subdks(&inst, &zero).unwrap();
        let mut params = SubDksParams::new(0.1);
        params.s = Some(1);
        let out = submodular_dks(&inst, &zero, &params, &mut RngState::new(seed)).unwrap();
        prop_assert!((out.den - opt).abs() < 1e-12);
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let pts = points(8, 3);
    let m64 = MetricInstance::from_points(pts.clone()).unwrap();
    let m32 = MetricInstance::<f32>::from_points(pts.iter().map(|p| p.iter().map(|&x| x as f32).collect()).collect()).unwrap();
    let (s64, v64) = brute_force_dispersion(&m64, 3).unwrap();
    let (s32, v32) = brute_force_dispersion(&m32, 3).unwrap();
    assert_eq!(s64, s32);
    assert!((v64 - v32 as f64).abs() < 1e-5);
    let out = qptas_dispersion(&m32, 3, &QptasConfig::exact(0.5), &mut RngState::new(1)).unwrap();
    assert!((out.value - v32).abs() < 1e-5);

    let inst = setsystem(5, 3, 9);
    let (_, d64): (_, f64) = brute_force_dcg(&inst).unwrap();
    let (_, d32): (_, f32) = brute_force_dcg(&inst).unwrap();
    assert!((d64 - d32 as f64).abs() < 1e-5);
}
