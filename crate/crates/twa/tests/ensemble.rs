use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinlab_core::c64;
use spinlab_hpa::{correlation_length, magnetizations, Phase};
use spinlab_meanfield::{integrate_mf, MfOptions, MfParams, MfState};
use spinlab_twa::*;

fn quiet(mut cfg: TwaConfig) -> TwaConfig {
    cfg.noise = NoiseMode::Off;
    cfg.n_traj = 1;
    cfg
}

#[test]
fn noise_off_conserves_schwinger_weights() {
    let mut cfg = quiet(TwaConfig::new(4, 10.0, 1.0, 0.5, 0.8, 0.6));
    cfg.t_max = 100.0;
    cfg.dt = 0.005;
    let init = InitialSpec::Sites((0..8).map(|i| (0.3 + 0.35 * i as f64, 0.7 * i as f64)).collect());
    let f = trajectory_endpoint(&cfg, &init, 0).unwrap().unwrap();
    for i in 0..8 {
        let rel = (f.weight(i) - 20.0).abs() / 20.0;
        assert!(rel < 1e-6, "site {i}: {rel:e}");
    }
}

#[test]
fn noise_off_without_pumps_conserves_total_charge() {
    let mut cfg = quiet(TwaConfig::new(3, 6.0, 1.0, 0.8, 0.0, 0.0));
    cfg.t_max = 20.0;
    let orient: Vec<(f64, f64)> = (0..6).map(|i| (0.4 * i as f64 + 0.2, 1.1 * i as f64)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f0 = sample_initial(&orient, 6.0, &mut rng, Sampling::Sharp);
    let f = trajectory_endpoint(&cfg, &InitialSpec::Sites(orient), 0).unwrap().unwrap();
    let charge = |f: &SchwingerField| (0..6).map(|i| f.s_z(i)).sum::<f64>();
    assert!((charge(&f) - charge(&f0)).abs() < 1e-6 * 12.0 * 6.0);
}

#[test]
fn noise_off_follows_mean_field_flow() {
    let gaps: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&s| mf_gap(s)).collect();
    for (g, s) in gaps.iter().zip([1e3, 1e4, 1e5]) {
        assert!(g * s < 10.0, "S = {s}: relative gap {g:e}");
    }
    assert!(gaps[2] / gaps[0] < 0.02, "{gaps:?}");
}

/// Largest deviation, relative to `S`, between the noiseless fields and the
/// mean-field equations after `t = 5/g`.
fn mf_gap(s: f64) -> f64 {
    let (ta, tb) = (1.0, 2.2);
    let params = MfParams { s, g: 1.0, h: 0.5, gamma_g: 0.7, gamma_l: 0.4 };
    let mf = integrate_mf(MfState::tilted(s, ta, tb), &params, 5.0, MfOptions::default()).unwrap();
    let end = mf.last();
    let mut cfg = quiet(TwaConfig::new(2, s, 1.0, 0.5, 0.7, 0.4));
    cfg.t_max = 5.0;
    cfg.dt = 0.002;
    let f = trajectory_endpoint(&cfg, &InitialSpec::Sublattice { a: (ta, 0.0), b: (tb, 0.0) }, 0).unwrap().unwrap();
    let mut gap: f64 = 0.0;
    for (site, spin) in [(0, end.a()), (1, end.b())] {
        let sp = f.s_plus(site);
        let twa = [sp.re, sp.im, f.s_z(site)];
        for k in 0..3 {
            gap = gap.max((twa[k] - spin[k]).abs() / s);
        }
    }
    gap
}

#[test]
fn noise_off_fixed_point_stays_fixed() {
    let mut cfg = quiet(TwaConfig::new(3, 50.0, 1.0, 0.5, 0.4, 0.2));
    cfg.t_max = 30.0;
    let f = trajectory_endpoint(&cfg, &InitialSpec::Uniform { theta: 0.0, phi: 0.0 }, 0).unwrap().unwrap();
    for i in 0..6 {
        assert!((f.s_z(i) - 50.0).abs() < 1e-12);
        assert!(f.s_plus(i).norm() < 1e-12);
    }
}

fn sampled_means(theta: f64, phi: f64, n: usize, seed: u64) -> ([f64; 3], [f64; 3]) {
    let s = 20.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = [[0.0; 2]; 3];
    for _ in 0..n {
        let f = sample_initial(&[(theta, phi)], s, &mut rng, Sampling::SpinCoherent);
        let sp = f.s_plus(0);
        for (k, v) in [sp.re, sp.im, f.s_z(0)].into_iter().enumerate() {
            acc[k][0] += v;
            acc[k][1] += v * v;
        }
    }
    let nf = n as f64;
    let mean = [acc[0][0] / nf, acc[1][0] / nf, acc[2][0] / nf];
    let se = [0, 1, 2].map(|k| ((acc[k][1] / nf - mean[k].powi(2)) / (nf - 1.0)).sqrt());
    (mean, se)
}

#[test]
fn sampled_poles_and_equator() {
    let s = 20.0;
    let (m, se) = sampled_means(0.0, 0.0, 20_000, 1);
    assert!((m[2] - s).abs() < 3.0 * se[2] + 1e-12, "{m:?} {se:?}");
    let (m, se) = sampled_means(std::f64::consts::FRAC_PI_2, 0.0, 20_000, 2);
    assert!((m[0] - s).abs() < 3.0 * se[0], "{m:?} {se:?}");
    assert!(m[2].abs() < 3.0 * se[2]);
}

#[test]
fn spin_coherent_sampling_fixes_the_spin_length() {
    let s = 20.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 40_000;
    let (mut w, mut w2) = (0.0, 0.0);
    for _ in 0..n {
        let f = sample_initial(&[(1.3, 0.4)], s, &mut rng, Sampling::SpinCoherent);
        let x = f.weight(0);
        w += x;
        w2 += x * x;
    }
    let mean = w / n as f64;
    let var = w2 / n as f64 - mean * mean;
    // Weyl symbol of N = a^dag a + b^dag b is |alpha|^2 + |beta|^2 - 1;
    // Var(N) = Var(w) - 1/2 for two modes
    assert!((mean - 1.0 - 2.0 * s).abs() < 0.02);
    assert!((var - 0.5).abs() < 0.03, "{var}");
}

fn small_config(seed: u64, n_traj: usize) -> TwaConfig {
    let mut cfg = TwaConfig::new(6, 50.0, 1.0, 0.5, 2.0, 2.0);
    cfg.n_traj = n_traj;
    cfg.t_max = 10.0;
    cfg.steady_from = 5.0;
    cfg.seed = seed;
    cfg
}

fn neel() -> InitialSpec {
    InitialSpec::Sublattice { a: (0.3, 0.0), b: (std::f64::consts::PI - 0.3, 0.0) }
}

#[test]
fn seeds_are_reproducible_and_independent() {
    let a = run_ensemble(&small_config(7, 40), &neel()).unwrap();
    let b = run_ensemble(&small_config(7, 40), &neel()).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| run_ensemble(&small_config(7, 40), &neel()).unwrap());
    assert_eq!(a, c);
    let d = run_ensemble(&small_config(8, 40), &neel()).unwrap();
    assert_ne!(a.sz_a, d.sz_a);
    let last = a.times.len() - 1;
    let (x, y) = (a.sz_a[last], d.sz_a[last]);
    assert!((x.mean - y.mean).abs() < 4.0 * x.stderr.hypot(y.stderr));
}

#[test]
fn stderr_shrinks_with_ensemble_size() {
    let a = run_ensemble(&small_config(1, 100), &neel()).unwrap();
    let b = run_ensemble(&small_config(101, 400), &neel()).unwrap();
    let (x, y) = (a.steady_sz[0], b.steady_sz[0]);
    assert!((x.mean - y.mean).abs() < 4.0 * x.stderr.hypot(y.stderr));
    let ratio = y.stderr / x.stderr;
    assert!(ratio > 0.35 && ratio < 0.7, "{ratio}");
}

#[test]
fn global_rotation_maps_observables() {
    let chi = 1.2;
    let cfg = small_config(5, 200);
    let base = InitialSpec::Uniform { theta: 1.2, phi: 0.0 };
    let turned = InitialSpec::Uniform { theta: 1.2, phi: chi };
    let a = run_ensemble(&cfg, &base).unwrap();
    let b = run_ensemble(&cfg, &turned).unwrap();
    for r in (0..a.times.len()).step_by(4) {
        let (x, y) = (a.sz_a[r], b.sz_a[r]);
        assert!((x.mean - y.mean).abs() < 4.0 * x.stderr.hypot(y.stderr), "t = {}", a.times[r]);
        let (p, q) = (a.s_perp_a[r], b.s_perp_a[r]);
        assert!((p.mean - q.mean).abs() < 4.0 * p.stderr.hypot(q.stderr));
        let rotated = a.s_plus_a[r] * c64::from_polar(1.0, chi);
        assert!((rotated - b.s_plus_a[r]).norm() < 4.0 * p.stderr.hypot(q.stderr));
    }
    let (c, d) = (&a.steady_correlator[1], &b.steady_correlator[1]);
    assert!((c.mean - d.mean).norm() < 4.0 * c.stderr.hypot(d.stderr));
}

#[test]
fn euler_maruyama_agrees_with_heun() {
    let mut cfg = small_config(9, 200);
    let heun = run_ensemble(&cfg, &neel()).unwrap();
    cfg.scheme = Scheme::EulerMaruyama;
    cfg.dt *= 0.25;
    cfg.record_every *= 4;
    let em = run_ensemble(&cfg, &neel()).unwrap();
    for k in 0..2 {
        let (x, y) = (heun.steady_sz[k], em.steady_sz[k]);
        assert!((x.mean - y.mean).abs() < 4.0 * x.stderr.hypot(y.stderr), "{x:?} {y:?}");
    }
}

fn am_config(n_traj: usize) -> TwaConfig {
    let mut cfg = TwaConfig::new(50, 1000.0, 1.0, 0.5, 2.0, 2.0);
    cfg.n_traj = n_traj;
    cfg.t_max = 30.0;
    cfg.steady_from = 10.0;
    cfg
}

fn am_start() -> InitialSpec {
    InitialSpec::Sublattice { a: (0.0, 0.0), b: (std::f64::consts::PI, 0.0) }
}

#[test]
fn antialigned_offset_matches_linearized_theory() {
    let series = run_ensemble(&am_config(200), &am_start()).unwrap();
    let m = magnetizations(2.0, 2.0, 1.0, 0.5, Phase::Am).unwrap();
    let offset = 1000.0 - series.steady_sz[0].mean;
    assert!((offset / m.n_a - 1.0).abs() < 0.1, "{offset} vs {}", m.n_a);
    assert!(series.excluded == 0);
}

#[test]
fn aligned_loss_sublattice_points_up() {
    let mut cfg = TwaConfig::new(20, 1000.0, 1.0, 0.5, 0.4, 0.2);
    cfg.n_traj = 100;
    cfg.t_max = 40.0;
    cfg.steady_from = 20.0;
    let series = run_ensemble(&cfg, &InitialSpec::Uniform { theta: 0.0, phi: 0.0 }).unwrap();
    let m = magnetizations(0.4, 0.2, 1.0, 0.5, Phase::FmUp).unwrap();
    let (_, sz_b) = m.sz(1000.0);
    let twa_b = series.steady_sz[1].mean;
    assert!(twa_b > 0.99 * 1000.0);
    assert!(((1000.0 - twa_b) / (1000.0 - sz_b) - 1.0).abs() < 0.15, "{twa_b} vs {sz_b}");
}

#[test]
fn fluctuations_dominate_the_ppt_phase() {
    let am = run_ensemble(&am_config(50), &am_start()).unwrap();
    let mut cfg = TwaConfig::new(50, 1000.0, 1.0, 0.5, 1.0, 1.0);
    cfg.n_traj = 50;
    cfg.t_max = 60.0;
    cfg.steady_from = 30.0;
    let ppt = run_ensemble(&cfg, &am_start()).unwrap();
    assert!(ppt.steady_var_sz[0].mean > 10.0 * am.steady_var_sz[0].mean);
}

#[test]
fn correlation_length_near_the_boundary() {
    let gamma = 1.6;
    let mut cfg = TwaConfig::new(50, 1000.0, 1.0, 0.5, gamma, gamma);
    cfg.n_traj = 100;
    cfg.t_max = 100.0;
    cfg.steady_from = 40.0;
    let series = run_ensemble(&cfg, &am_start()).unwrap();
    let fit = correlation_fit(&series).unwrap();
    let xi = correlation_length(gamma, gamma, 1.0, 0.5).unwrap();
    assert!((fit.xi / xi - 1.0).abs() < 0.15, "{} vs {xi}", fit.xi);
    assert!(fit.separations.len() >= 4);
}

fn synthetic(values: &[(f64, f64)]) -> ObservableSeries {
    let mut steady_correlator = vec![CorrelatorPoint { separation: 0, mean: c64::new(1.0, 0.0), stderr: 0.0 }];
    for (d, &(v, se)) in values.iter().enumerate() {
        steady_correlator.push(CorrelatorPoint { separation: d + 1, mean: c64::new(v, 0.0), stderr: se });
    }
    ObservableSeries {
        n_cells: 4 * values.len(),
        s: 1.0,
        times: vec![],
        sz_a: vec![],
        sz_b: vec![],
        var_sz_a: vec![],
        var_sz_b: vec![],
        s_perp_a: vec![],
        s_perp_b: vec![],
        s_plus_a: vec![],
        s_plus_b: vec![],
        correlator: vec![],
        steady_correlator,
        steady_window: (0.0, 0.0),
        steady_sz: [Stat { mean: 0.0, stderr: 0.0 }; 2],
        steady_var_sz: [Stat { mean: 0.0, stderr: 0.0 }; 2],
        n_traj: 0,
        excluded: 0,
    }
}

#[test]
fn fit_of_uncorrelated_input_is_sub_lattice() {
    let noise: Vec<(f64, f64)> = (0..12).map(|d| (if d % 2 == 0 { 0.01 } else { -0.02 }, 0.05)).collect();
    let fit = correlation_fit(&synthetic(&noise)).unwrap();
    assert_eq!(fit.xi, 0.0);
}

#[test]
fn fit_rejects_non_exponential_profile() {
    let bumpy: Vec<(f64, f64)> = (1..=12).map(|d| (if d % 2 == 0 { 1.0 } else { 0.3 }, 1e-3)).collect();
    assert!(matches!(correlation_fit(&synthetic(&bumpy)), Err(TwaError::FitQuality { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fit_recovers_exponential(xi in 0.8f64..6.0, amp in 1.0f64..1e4) {
        let vals: Vec<(f64, f64)> = (1..=12).map(|d| (amp * (-(d as f64) / xi).exp(), 1e-6 * amp)).collect();
        let fit = correlation_fit(&synthetic(&vals)).unwrap();
        prop_assert!((fit.xi / xi - 1.0).abs() < 1e-6);
        prop_assert!((fit.amplitude / amp - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coherent_mean_orientation(theta in 0.0f64..std::f64::consts::PI, phi in -3.0f64..3.0, s in 0.5f64..50.0) {
        let (a, b) = coherent_amplitudes(s, theta, phi);
        let sp = a.conj() * b;
        prop_assert!((sp - c64::from_polar(s * theta.sin(), phi)).norm() < 1e-10 * s.max(1.0));
        prop_assert!((0.5 * (a.norm_sqr() - b.norm_sqr()) - s * theta.cos()).abs() < 1e-10 * s.max(1.0));
    }
}

#[test]
fn restoration_needs_noise() {
    let mut cfg = TwaConfig::new(10, 4.0, 1.0, 0.5, 1.0, 1.0);
    cfg.n_traj = 100;
    cfg.t_max = 40.0;
    let noisy = symmetry_restoration_time(&cfg, &InitialSpec::x_polarized()).unwrap();
    assert!(!noisy.censored);
    assert!(noisy.tau > 1.0 && noisy.tau < 40.0);
    assert!(noisy.stderr > 0.0 && noisy.stderr < 0.3 * noisy.tau);
    cfg.noise = NoiseMode::Off;
    cfg.n_traj = 1;
    let quiet = symmetry_restoration_time(&cfg, &InitialSpec::x_polarized()).unwrap();
    assert!(quiet.censored);
    assert_eq!(quiet.tau, 40.0);
    assert!(quiet.s_perp.iter().all(|&v| v > 0.5 * quiet.s_perp[0]));
}
