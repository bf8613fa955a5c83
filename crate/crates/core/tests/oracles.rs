use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use twinbeam::channel::sample_wigner;
use twinbeam::fock::{
    extract_variances, integrate, integrate_fixed_step, partial_transpose_min_eigenvalue,
    twin_beam_fock, IntegratorConfig,
};
use twinbeam::{
    evolve, evolve_by_convolution, gaussian_overlap_fidelity, green_function, wigner_eval,
    ChannelParams, CoherentGaussian, PhasePoint, TwinBeamParams, VariancePair,
};

fn tb(lambda: f64) -> TwinBeamParams {
    TwinBeamParams::from_lambda(lambda).unwrap()
}

fn cp(gamma: f64, m: f64) -> ChannelParams {
    ChannelParams::new(gamma, m).unwrap()
}

/// Trapezoid rule on `[a, b]` with `n` panels; spectrally accurate for
/// Gaussians that have decayed at both ends.
fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

#[test]
fn green_function_is_normalised() {
    for (g, m, t, xp) in [
        (1.0, 0.5, 0.3, 0.7),
        (2.0, 0.0, 0.01, -1.5),
        (0.5, 2.0, 4.0, 3.0),
    ] {
        let c = cp(g, m);
        let total = trapezoid(
            |x| green_function(&c, t, x, xp).unwrap(),
            -20.0,
            20.0,
            40_000,
        );
        assert!((total - 1.0).abs() < 1e-8, "Γ={g}, M={m}, t={t}: {total}");
    }
}

#[test]
fn overlap_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let a = CoherentGaussian::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.25..1.0),
        )
        .unwrap();
        let b = CoherentGaussian::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.25..1.0),
        )
        .unwrap();
        let inner = |x: f64| trapezoid(|y| a.wigner(x, y) * b.wigner(x, y), -10.0, 10.0, 800);
        let quad = std::f64::consts::PI * trapezoid(inner, -10.0, 10.0, 800);
        let closed = gaussian_overlap_fidelity(&a, &b).unwrap();
        assert!(
            (quad - closed).abs() < 1e-8,
            "{a:?} {b:?}: {quad} vs {closed}"
        );
    }
}

#[test]
fn wigner_integrates_to_one() {
    for v in [
        VariancePair::new(0.6, 0.11).unwrap(),
        VariancePair::vacuum(),
    ] {
        let s2 = v.var_plus;
        let s = s2.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let mut p = [0.0; 4];
            for q in &mut p {
                let z: f64 = StandardNormal.sample(&mut rng);
                *q = s * z;
            }
            let r2: f64 = p.iter().map(|x| x * x).sum();
            let density = (-r2 / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).powi(2);
            let w = wigner_eval(&v, &PhasePoint::from_array(p)) / density;
            sum += w;
            sum_sq += w * w;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 0.01, "{v:?}: {mean}");
        assert!(
            (mean - 1.0).abs() < 3.0 * se.max(1e-12),
            "{v:?}: {mean} ± {se}"
        );
    }
}

#[test]
fn convolution_matches_closed_form_on_a_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = [
        (0.3, 0.5, 1.0, 0.5),
        (1.0, 0.1, 1.0, 0.2),
        (0.6, 1.0, 3.0, 0.1),
        (0.2, 0.0, 1.0, 1.0),
    ];
    let mut k = 0;
    for &(l, m, g, t) in &cases {
        let (t_, c) = (tb(l), cp(g, m));
        let v = evolve(&t_, &c, t).unwrap().variances;
        for _ in 0..5 {
            let p = sample_wigner(&v, &mut rng);
            let est = evolve_by_convolution(&t_, &c, t, &p, 100_000, k).unwrap();
            let exact = wigner_eval(&v, &p);
            assert!(
                (est.value - exact).abs() < 4.0 * est.std_error,
                "λ={l}, M={m}: {} ± {} vs {exact}",
                est.value,
                est.std_error
            );
            k += 1;
        }
    }
    assert_eq!(k, 20);
}

#[test]
fn oracle_matches_closed_form_at_dim_16() {
    let (t, c) = (tb(0.4), cp(1.0, 0.5));
    let cfg = IntegratorConfig::new(0.0125, 16, 1e-8).unwrap();
    let rho0 = twin_beam_fock(&t, 16).unwrap();
    let rho = integrate(&rho0, &c, 0.5, &cfg).unwrap();
    let got = extract_variances(&rho).unwrap();
    let want = evolve(&t, &c, 0.5).unwrap().variances;
    assert!((got.var_plus - want.var_plus).abs() < 1e-6);
    assert!((got.var_minus - want.var_minus).abs() < 1e-6);
}

#[test]
fn integration_preserves_state_structure() {
    let (t, c) = (tb(0.5), cp(1.0, 0.3));
    let rho0 = twin_beam_fock(&t, 16).unwrap();
    let mut checked = 0;
    integrate_fixed_step(&rho0, &c, 1.0, 0.02, |_, rho| {
        let tr = rho.trace();
        assert!((tr.re - 1.0).abs() < 1e-9 && tr.im.abs() < 1e-12);
        assert!(rho.hermiticity_deviation() < 1e-10);
        assert!(rho.min_diagonal() > -1e-12);
        assert!(rho.selection_rule_violation() <= 1e-12);
        checked += 1;
    })
    .unwrap();
    assert_eq!(checked, 50);
}

#[test]
fn partial_transpose_sign_tracks_threshold() {
    let (t, c) = (tb(0.5), cp(1.0, 0.5));
    let ts = twinbeam::threshold_time(&t, &c).value().unwrap();
    let cfg = IntegratorConfig::auto(&t, &c).unwrap();
    let rho0 = twin_beam_fock(&t, cfg.dim).unwrap();
    let before = integrate(&rho0, &c, 0.5 * ts, &cfg).unwrap();
    let after = integrate(&rho0, &c, 1.5 * ts, &cfg).unwrap();
    assert!(partial_transpose_min_eigenvalue(&before) < -1e-3);
    assert!(partial_transpose_min_eigenvalue(&after) > -1e-9);
}
