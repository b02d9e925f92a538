use proptest::prelude::*;
use spinlab_core::models::{build_chain, build_kerr};
use spinlab_core::{c64, ChainSpec, KerrSpec};
use spinlab_liouville::{observables, spectrum, steady_state, vectorize, SpectrumOptions, Strategy};

fn dimer(s: f64, gg: f64, gl: f64) -> spinlab_core::ModelOperators {
    build_chain(&ChainSpec::dimer(s, 1.0, gg, gl)).unwrap()
}

#[test]
fn strong_pumping_gives_antialigned_dimer() {
    let model = dimer(2.0, 10.0, 10.0);
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let obs = observables(&st, &model).unwrap();
    assert!(obs.magnetization[0][2] > 1.8, "{:?}", obs.magnetization);
    assert!(obs.magnetization[1][2] < -1.8);
}

#[test]
fn weak_pumping_on_symmetry_line_is_nearly_fully_mixed() {
    let model = dimer(4.0, 0.2, 0.2);
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let obs = observables(&st, &model).unwrap();
    assert!(obs.impurity / 81.0 > 0.5, "{}", obs.impurity / 81.0);
}

#[test]
fn deep_antialigned_joint_distribution_has_single_corner_peak() {
    let model = dimer(4.0, 10.0, 10.0);
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let joint = observables(&st, &model).unwrap().joint_distribution.unwrap();
    // index 0 is m = +S, index 2S is m = -S
    assert!(joint[0][8] > 0.8, "{}", joint[0][8]);
}

#[test]
fn steady_state_has_no_transverse_coherence() {
    let model = dimer(1.5, 0.7, 1.3);
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    for m in observables(&st, &model).unwrap().magnetization {
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1], 0.0);
    }
}

#[test]
fn symmetric_rates_give_pt_invariant_state() {
    let model = dimer(2.0, 0.6, 0.6);
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let d = 5;
    let swap = |i: usize| (i % d) * d + i / d;
    // sublattice exchange combined with the spin flip m -> -m, which maps
    // S^+ onto S^- and therefore gain onto loss
    let flip = |i: usize| {
        let (a, b) = (i / d, i % d);
        (d - 1 - a) * d + (d - 1 - b)
    };
    let mut worst = 0.0f64;
    for i in 0..25 {
        for j in 0..25 {
            let mapped = st.rho[(flip(swap(i)), flip(swap(j)))];
            worst = worst.max((st.rho[(i, j)] - mapped).norm());
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn residual_is_small_relative_to_generator_norm() {
    for (s, gg, gl) in [(1.0, 0.3, 0.2), (2.5, 2.0, 1.0), (3.0, 0.5, 0.5)] {
        let l = vectorize(&dimer(s, gg, gl)).unwrap();
        let st = steady_state(&l).unwrap();
        assert!(st.residual < 1e-10 * l.norm());
        assert!((st.trace().re - 1.0).abs() < 1e-10);
        let eig = st.rho.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        assert!(eig.iter().all(|&x| x > -1e-8));
    }
}

#[test]
fn free_kerr_cavity_reaches_coherent_state() {
    let (d, f, gamma) = (2.0, 0.8, 1.0);
    let spec = KerrSpec { delta: 0.0, u: 0.0, f, gamma, d, cutoff: 40 };
    let model = build_kerr(&spec).unwrap();
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let obs = observables(&st, &model).unwrap();
    let want = d * f * f / (gamma * gamma);
    assert!((obs.photon_number.unwrap() - want).abs() < 1e-9, "{:?}", obs.photon_number);
    assert!((obs.purity - 1.0).abs() < 1e-9);
}

#[test]
fn undriven_kerr_relaxes_to_vacuum() {
    let spec = KerrSpec::with_default_cutoff(10.0, 10.0, 0.0, 1.0, 5.0);
    let model = build_kerr(&spec).unwrap();
    let st = steady_state(&vectorize(&model).unwrap()).unwrap();
    let obs = observables(&st, &model).unwrap();
    assert!((obs.purity - 1.0).abs() < 1e-12);
    assert!(obs.photon_number.unwrap().abs() < 1e-12);
}

#[test]
fn kerr_reference_point_builds_at_default_cutoff() {
    let spec = KerrSpec::with_default_cutoff(10.0, 10.0, 1.76, 1.0, 50.0);
    assert_eq!(spec.cutoff, 200);
    assert_eq!(build_kerr(&spec).unwrap().dim(), 201);
}

#[test]
fn gap_matches_full_dense_diagonalization() {
    let l = vectorize(&dimer(1.0, 2.0, 2.0)).unwrap();
    let full = l.matrix().to_dense().eigenvalues().unwrap();
    let mut sorted: Vec<c64> = full.clone();
    sorted.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let oracle = sorted[1..].iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
    for strategy in [Strategy::Dense, Strategy::ShiftInvert] {
        let res = spectrum(&l, SpectrumOptions::new(10, strategy)).unwrap();
        assert!((res.gap - oracle).abs() < 1e-8, "{strategy:?}: {} vs {oracle}", res.gap);
    }
}

#[test]
fn gap_at_symmetric_point_shrinks_with_spin() {
    let mut last = f64::INFINITY;
    for s in [2.0, 4.0, 6.0, 8.0] {
        let l = vectorize(&dimer(s, 1.0, 1.0)).unwrap();
        let mut opts = SpectrumOptions::new(8, Strategy::ShiftInvert);
        opts.per_sector = 4;
        let gap = spectrum(&l, opts).unwrap().gap;
        assert!(gap < last, "S={s}: {gap} >= {last}");
        last = gap;
    }
}

#[test]
fn slow_modes_multiply_at_symmetric_transition() {
    let count = |s: f64| {
        let l = vectorize(&dimer(s, 1.0, 1.0)).unwrap();
        let res = spectrum(&l, SpectrumOptions::new(usize::MAX, Strategy::Dense)).unwrap();
        res.count_near_zero(0.25)
    };
    let (c2, c4) = (count(2.0), count(4.0));
    assert!(c4 > c2, "{c2} -> {c4}");
}

#[test]
fn spectrum_is_closed_under_conjugation() {
    let l = vectorize(&dimer(1.5, 0.8, 0.4)).unwrap();
    let ev = spectrum(&l, SpectrumOptions::new(usize::MAX, Strategy::Dense)).unwrap().eigenvalues;
    for z in &ev {
        assert!(z.re < 1e-10);
        assert!(ev.iter().any(|w| (w - z.conj()).norm() < 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn generated_generators_preserve_trace(two_s in 1u32..5, gg in 0.0f64..3.0, gl in 0.0f64..3.0, g in 0.0f64..2.0) {
        let model = build_chain(&ChainSpec::dimer(two_s as f64 / 2.0, g, gg, gl)).unwrap();
        let l = vectorize(&model).unwrap();
        prop_assert!(l.trace_defect() < 1e-10 * l.norm().max(1.0));
    }

    #[test]
    fn steady_states_are_physical(two_s in 1u32..5, gg in 0.05f64..3.0, gl in 0.05f64..3.0) {
        let model = build_chain(&ChainSpec::dimer(two_s as f64 / 2.0, 1.0, gg, gl)).unwrap();
        let l = vectorize(&model).unwrap();
        let st = steady_state(&l).unwrap();
        prop_assert!((st.trace().re - 1.0).abs() < 1e-10);
        let d = st.dim();
        for i in 0..d {
            for j in 0..d {
                prop_assert!((st.rho[(i, j)] - st.rho[(j, i)].conj()).norm() < 1e-10);
            }
        }
        let eig = st.rho.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        prop_assert!(eig.iter().all(|&x| x > -1e-8));
    }
}
