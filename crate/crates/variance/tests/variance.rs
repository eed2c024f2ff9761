use std::sync::Arc;

use proptest::prelude::*;
use psdpp_hypgeom::{Point, C64};
use psdpp_kernels::{KernelCoeffs, RadialProfile, WeightSpec};
use psdpp_psinterp::{RkhsSpace, TestFunction};
use psdpp_sampler::{GafSpec, HkpvMode, HkpvSpec};
use psdpp_variance::*;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

fn o() -> Point {
    Point::origin(1)
}

fn disk(x: f64) -> Point {
    Point::disk(x, 0.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Composite Simpson rule, independent of the adaptive integrator.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Variance of `Σ Φ(x) x^n` from the eigen-expansion
/// `Σ_k (k+1)[m₂(n+k) - (n+k+1) m₁(n+k)²]`, `m_p(q) = ∫ Φ^p t^q dt`.
fn moment_series_variance<M1, M2>(n: u32, m1: M1, m2: M2, terms: usize) -> f64
where
    M1: Fn(f64) -> f64,
    M2: Fn(f64) -> f64,
{
    (0..terms)
        .map(|k| {
            let q = (n as usize + k) as f64;
            (k as f64 + 1.0) * (m2(q) - (q + 1.0) * m1(q).powi(2))
        })
        .sum()
}

#[test]
fn count_variance_matches_closed_form() {
    let r = var_scalar_quadrature(&Radial::Profile(RadialProfile::indicator(2.0)), &TestFunction::one(1), &o()).unwrap();
    let t = 1f64.tanh();
    let exact = t * t / (1.0 - t.powi(4));
    assert!(rel(r.value, exact) < 1e-8, "{} vs {exact}", r.value);
    assert!((r.value - 0.874098).abs() < 1e-6);
    assert_eq!(r.method, Method::Quadrature);
}

#[test]
fn constant_weight_has_zero_variance() {
    let r = var_scalar_quadrature(&Radial::Profile(RadialProfile::indicator(2.0)), &TestFunction::constant(1, C64::new(0.0, 0.0)), &o()).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn indicator_monomials_match_moment_series() {
    for radius in [1.0, 2.0, 3.0] {
        let tt = (0.5f64 * radius).tanh().powi(2);
        let m = move |q: f64| tt.powf(q + 1.0) / (q + 1.0);
        for n in [0u32, 1, 4, 9] {
            let terms = (40.0 / (1.0 - tt)) as usize + 200;
            let exact = moment_series_variance(n, m, m, terms);
            let r = var_scalar_quadrature(
                &Radial::Profile(RadialProfile::indicator(radius)),
                &TestFunction::monomial(n),
                &o(),
            )
            .unwrap();
            assert!(rel(r.value, exact) < 1e-7, "R={radius} n={n}: {} vs {exact}", r.value);
        }
    }
}

#[test]
fn bump_monomials_match_moment_series() {
    let radius = 3.0;
    let bump = RadialProfile::bump(radius);
    let tmax = (0.5f64 * radius).tanh().powi(2);
    let phi = |t: f64| bump.eval_hyperbolic(2.0 * t.sqrt().atanh());
    let m1 = |q: f64| simpson(|t| phi(t) * t.powf(q), 0.0, tmax, 4000);
    let m2 = |q: f64| simpson(|t| phi(t).powi(2) * t.powf(q), 0.0, tmax, 4000);
    for n in [0u32, 2, 5] {
        let exact = moment_series_variance(n, m1, m2, 1500);
        let r = var_scalar_quadrature(&Radial::Profile(bump.clone()), &TestFunction::monomial(n), &o()).unwrap();
        assert!(rel(r.value, exact) < 1e-6, "n={n}: {} vs {exact}", r.value);
    }
}

#[test]
fn poincare_monomials_match_moment_series_at_s2() {
    // Φ = ((1-r)/(1+r))² with r = √t; the bracket decays like k^{-4}
    let s = 2.0;
    let k = 3000;
    let c = (gamma(2.0 * s + 1.0) - gamma(s + 1.0).powi(2)) / 16f64.powf(s);
    for n in [0u32, 1, 3] {
        // m_p(q) by Simpson in r, where t^q dt = 2 r^{2q+1} dr
        let mp = |p: i32, q: f64| simpson(|r| ((1.0 - r) / (1.0 + r)).powf(s * p as f64) * 2.0 * r.powf(2.0 * q + 1.0), 0.0, 1.0, 40000);
        let head = moment_series_variance(n, |q| mp(1, q), |q| mp(2, q), k);
        // tail Σ_{j>K} (j+1)·c·j^{-2s-1} ≈ c K^{1-2s}/(2s-1)
        let kt = (k + n as usize) as f64;
        let tail = c * kt.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
        let exact = head + tail;
        let r = var_scalar_quadrature(&Radial::poincare(s).unwrap(), &TestFunction::monomial(n), &o()).unwrap();
        assert!(rel(r.value, exact) < 1e-5, "n={n}: {} vs {exact}", r.value);
    }
}

#[test]
fn large_monomial_modes_follow_the_asymptotic_law() {
    for s in [1.2, 1.5] {
        let c = (gamma(2.0 * s + 1.0) - gamma(s + 1.0).powi(2)) / 16f64.powf(s) / (2.0 * s * (2.0 * s - 1.0));
        for k in [12u32, 16, 19] {
            let n = 2f64.powi(k as i32);
            let f = TestFunction::lacunary_terms(vec![(k, 1.0)]).unwrap();
            let v = var_scalar_quadrature(&Radial::poincare(s).unwrap(), &f, &o()).unwrap().value;
            let a = c * n.powf(1.0 - 2.0 * s);
            assert!(rel(v, a) < 1e-6, "s={s} n=2^{k}: {v} vs {a}");
        }
    }
}

#[test]
fn monomial_variance_lies_in_a_two_sided_band() {
    let mut ratios = Vec::new();
    for s in [1.2, 1.5, 2.0] {
        for n in [0u32, 1, 4] {
            let v = var_scalar_quadrature(&Radial::poincare(s).unwrap(), &TestFunction::monomial(n), &o()).unwrap().value;
            // ∫|z^n|²(1-|w|²)^{2s-2} dA = B(n+1, 2s-1)
            ratios.push(v / beta(n as f64 + 1.0, 2.0 * s - 1.0));
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    println!("band [{lo:.4}, {hi:.4}]");
    assert!(lo > 0.0 && hi / lo < 20.0);
}

#[test]
fn real_part_is_half_the_first_mode() {
    let w = Radial::poincare(1.5).unwrap();
    let re = var_scalar_quadrature(&w, &TestFunction::real_part(1), &o()).unwrap().value;
    let z1 = var_scalar_quadrature(&w, &TestFunction::monomial(1), &o()).unwrap().value;
    assert!(rel(re, 0.5 * z1) < 1e-12);
}

#[test]
fn lacunary_is_the_weighted_sum_of_its_modes() {
    let w = Radial::poincare(1.3).unwrap();
    let terms = vec![(1u32, 2.0), (2, -1.0), (3, 0.5)];
    let lac = TestFunction::lacunary_terms(terms.clone()).unwrap();
    let v = var_scalar_quadrature(&w, &lac, &o()).unwrap().value;
    let modes: f64 = terms
        .iter()
        .map(|&(k, c)| c * c * var_scalar_quadrature(&w, &TestFunction::monomial(1 << k), &o()).unwrap().value)
        .sum();
    assert!(rel(v, modes) < 1e-12);
}

#[test]
fn non_radial_statistics_are_rejected() {
    let w = Radial::poincare(1.5).unwrap();
    let err = var_scalar_quadrature(&w, &TestFunction::monomial(2), &disk(0.3)).unwrap_err();
    assert!(matches!(err, VarError::Contract(_)));
    let err = var_scalar_quadrature(&w, &TestFunction::poisson(0.0), &o()).unwrap_err();
    assert!(matches!(err, VarError::Contract(_)));
    assert!(matches!(Radial::poincare(1.0), Err(VarError::Domain(_))));
}

#[test]
fn constant_statistic_is_transport_invariant() {
    let w = Radial::poincare(1.4).unwrap();
    let a = var_scalar_quadrature(&w, &TestFunction::one(1), &o()).unwrap().value;
    let b = var_scalar_quadrature(&w, &TestFunction::one(1), &disk(0.6)).unwrap().value;
    assert_eq!(a, b);
}

#[test]
fn iz_routes_agree() {
    for p in [RadialProfile::indicator(2.0), RadialProfile::bump(3.0)] {
        for z in [0.0, 0.5] {
            let a = identity_iz(&p, &disk(z)).unwrap();
            let b = identity_iz_angular(&p, &disk(z)).unwrap();
            assert!(rel(a.value, b.value) < 1e-6, "{} z={z}: {} vs {}", p.label(), a.value, b.value);
        }
    }
}

#[test]
fn iz_at_origin_matches_unit_weight_kernel_variance() {
    let k = KernelCoeffs::compute(&WeightSpec::unit(1), 4096, 0.5).unwrap();
    for p in [RadialProfile::indicator(1.5), RadialProfile::bump(2.5)] {
        let a = identity_iz(&p, &o()).unwrap().value;
        let b = var_kernel_weighted(&k, &Radial::Profile(p.clone())).unwrap().value;
        assert!(rel(a, b) < 1e-6, "{}: {a} vs {b}", p.label());
    }
}

#[test]
fn iz_polynomial_specialisations() {
    for u in [0.0, 0.3, 0.9] {
        assert_eq!(iz_polynomial(u, 0.0), 1.0 + 3.0 * u);
        let a = 0.25;
        let direct = 1.0 + (3.0 + 8.0 * a) * u + (3.0 * a * a + 8.0 * a) * u * u + a * a * u * u * u;
        assert!((iz_polynomial(u, a) - direct).abs() < 1e-15);
    }
}

#[test]
fn iz_requires_compact_support() {
    let err = identity_iz(&RadialProfile::exponential(1.5), &o()).unwrap_err();
    assert!(matches!(err, VarError::Contract(_)));
}

#[test]
fn residue_closed_form_matches_trapezoid() {
    let cases = [(0.5, 0.5, 0.0), (0.3, 0.6, 0.5), (0.7, 0.2, 0.3), (0.45, 0.8, -0.6), (0.9, 0.6, 0.2)];
    for (x, y, z) in cases {
        let (q, c) = residue_jz_check(x, y, &disk(z)).unwrap();
        assert!(rel(q, c) < 1e-8, "({x},{y},{z}): {q} vs {c}");
    }
    let t: f64 = 0.5;
    let (q, _) = residue_jz_check(t, t, &o()).unwrap();
    let u = t.powi(4);
    assert!(rel(q, (1.0 + 3.0 * u) / (1.0 - u).powi(5)) < 1e-8);
    for z in [0.0, 0.4, 0.7] {
        let (q, c) = residue_jz_check(0.0, 0.6, &disk(z)).unwrap();
        let e = 1.0 / (1.0 - z * z).powi(2);
        assert!(rel(q, e) < 1e-10 && rel(c, e) < 1e-14);
    }
    let z = Point::new(vec![C64::new(0.1, 0.3)]).unwrap();
    let (q, c) = residue_jz_check(0.55, 0.35, &z).unwrap();
    assert!(rel(q, c) < 1e-8);
}

#[test]
fn impossibility_bound_holds_on_the_battery() {
    let mut profiles: Vec<RadialProfile> = (1..=12).map(|k| RadialProfile::indicator(0.5 * k as f64)).collect();
    profiles.push(RadialProfile::bump(3.0));
    for z in [0.0, 0.4] {
        let min = profiles
            .iter()
            .map(|p| impossibility_ratio(p, &disk(z)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min > 1.0 / 128.0, "z={z}: {min}");
    }
}

#[test]
fn impossibility_rejects_zero_mass() {
    let zero = RadialProfile::hyperbolic("zero", |_| 0.0, 1.0, vec![]);
    assert!(matches!(impossibility_ratio(&zero, &o()), Err(VarError::Domain(_))));
}

#[test]
fn claim_a_at_origin() {
    let c = claim_a_uv(0, 1.0).unwrap();
    let u = (1.5 - 2.0 * 2f64.ln()).powi(2);
    let v = 0.5 * (8.0 * 2f64.ln() - 5.5);
    assert!(rel(c.u, u) < 1e-10);
    assert!(rel(c.v, v) < 1e-10);
    assert!((c.ratio - 0.5724).abs() < 1e-4);
}

#[test]
fn claim_a_matches_simpson_at_large_n() {
    for (n, s) in [(17u64, 1.3), (150, 1.9)] {
        let p = 2.0 * n as f64 + 1.0;
        let a = simpson(|r| ((1.0 - r) / (1.0 + r)).powf(s) * r.powf(p), 0.0, 1.0, 200000);
        let b = simpson(|r| ((1.0 - r) / (1.0 + r)).powf(2.0 * s) * r.powf(p), 0.0, 1.0, 200000) / (2.0 * n as f64 + 2.0);
        let c = claim_a_uv(n, s).unwrap();
        assert!(rel(c.u, a * a) < 1e-7 && rel(c.v, b) < 1e-7, "n={n}: {c:?}");
    }
}

#[test]
fn claim_a_ratio_stays_below_point_nine() {
    let mut max = 0f64;
    for n in 0..=200 {
        for j in 0..=20 {
            max = max.max(claim_a_uv(n, 1.0 + 0.05 * j as f64).unwrap().ratio);
        }
    }
    assert!(max < 0.9, "{max}");
    assert!(claim_a_uv(3, 2.5).is_err());
}

#[test]
fn sharp_functional_diverges_below_three_halves() {
    let a = sharp_divergence_bound(1.25, 5).unwrap();
    let b = sharp_divergence_bound(1.25, 20).unwrap();
    assert!(b > 10.0 * a, "{a} {b}");
    assert!(sharp_divergence_bound(1.5, 40).unwrap() > sharp_divergence_bound(1.5, 10).unwrap());
    let c20 = sharp_functional(2.0, 20).unwrap();
    let c40 = sharp_functional(2.0, 40).unwrap();
    assert!((c40 - c20).abs() < 0.05 * c20);
    assert!(matches!(sharp_divergence_bound(2.0, 5), Err(VarError::Domain(_))));
}

#[test]
fn sharp_functional_matches_direct_integral() {
    for (s, n) in [(2.0, 3u32), (1.25, 2)] {
        // t = 1 - r² on the truncated range r ≤ tanh((N+1)/2)
        let r_n = (0.5 * (n as f64 + 1.0)).tanh();
        let g = |r: f64| ((1.0 - r) / (1.0 + r)).powf(2.0 * s) * 2.0 * r / (1.0 - r * r).powi(4);
        let direct = simpson(g, 0.0, r_n, 200000) / 128.0;
        let v = sharp_functional(s, n).unwrap();
        assert!(rel(v, direct) < 1e-9, "s={s} N={n}: {v} vs {direct}");
    }
}

#[test]
fn pluri_bound_matches_direct_summation() {
    for (m, s, d) in [(3u64, 1.5, 1usize), (7, 2.5, 2)] {
        let mf = m as f64;
        let direct: f64 = (1..2_000_000u64)
            .map(|k| {
                let k = k as f64;
                k.powi(d as i32) * mf.powf(2.0 * s - d as f64) / (k + mf).powf(2.0 * s + 1.0)
            })
            .sum();
        let b = pluri_ratio_bound(m, s, d).unwrap();
        // the direct sum misses a tail of order K^{d-2s}
        assert!(rel(b, direct) < 1e-6, "{b} vs {direct}");
    }
}

#[test]
fn pluri_bound_tends_to_beta_limit_from_below() {
    for (d, s) in [(1usize, 1.5), (2, 3.0), (2, 2.05)] {
        let vals: Vec<f64> = [1u64, 10, 100, 1000].iter().map(|&m| pluri_ratio_bound(m, s, d).unwrap()).collect();
        let lim = pluri_ratio_limit(s, d);
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
        assert!(vals.iter().all(|v| *v < lim));
        assert!(rel(vals[3], lim) < 1e-3, "{vals:?} vs {lim}");
    }
    assert!(pluri_ratio_bound(0, 1.5, 1).is_err());
    assert!(pluri_ratio_bound(5, 0.5, 1).is_err());
}

#[test]
fn pluri_inner_sum_is_bounded() {
    for d in [1usize, 2, 3] {
        for m in [1u64, 2, 5, 10, 100, 1000] {
            let s = pluri_inner_sum(d, m).unwrap();
            assert!(s.sum <= s.bound, "d={d} m={m}: {s:?}");
        }
    }
}

#[test]
fn critical_weight_variance_floor() {
    let k = KernelCoeffs::compute(&WeightSpec::critical(1), 4096, 0.5).unwrap();
    let floor: Vec<f64> = [1.2, 1.1, 1.05, 1.02]
        .iter()
        .map(|&s| var_kernel_weighted(&k, &Radial::poincare(s).unwrap()).unwrap().value * (s - 1.0) * (s - 1.0))
        .collect();
    println!("critical Var·(s-1)² = {floor:?}");
    assert!(floor.iter().all(|f| *f > 0.5 * floor[0]));
}

#[test]
fn jackknife_of_a_constant_is_zero() {
    let xs = vec![C64::new(2.5, -1.0); 300];
    let (v, se) = jackknife_variance(&xs).unwrap();
    assert!(v.abs() < 1e-20 && se.abs() < 1e-20);
    assert!(jackknife_variance(&xs[..2]).is_err());
}

#[test]
fn jackknife_matches_textbook_variance() {
    let xs: Vec<C64> = (0..50).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64).sqrt())).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<C64>() / n;
    let var = xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    let (v, se) = jackknife_variance(&xs).unwrap();
    assert!(rel(v, var) < 1e-12);
    // brute-force leave-one-out
    let loo: Vec<f64> = (0..xs.len())
        .map(|i| {
            let ys: Vec<C64> = xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
            let m = ys.iter().sum::<C64>() / (n - 1.0);
            ys.iter().map(|y| (y - m).norm_sqr()).sum::<f64>() / (n - 2.0)
        })
        .collect();
    let lm = loo.iter().sum::<f64>() / n;
    let jse = ((n - 1.0) / n * loo.iter().map(|l| (l - lm).powi(2)).sum::<f64>()).sqrt();
    assert!(rel(se, jse) < 1e-9);
}

#[test]
fn mc_needs_enough_seeds() {
    let st = McStatistic::Count { radius: 2.0, z: o() };
    let spec = SamplerSpec::Hkpv(HkpvSpec::new(1, 3.0, HkpvMode::Window));
    assert!(matches!(var_mc(&st, &spec, 0..50, 1), Err(VarError::Argument(_))));
}

#[test]
fn mc_count_variance_matches_quadrature() {
    let st = McStatistic::Count { radius: 2.0, z: o() };
    let q = var_scalar_quadrature(&Radial::Profile(RadialProfile::indicator(2.0)), &TestFunction::one(1), &o()).unwrap();
    let spec = SamplerSpec::Hkpv(HkpvSpec::new(1, 3.0, HkpvMode::Window));
    let r = var_mc(&st, &spec, 0..2000, 2).unwrap();
    assert_eq!(r.n_samples, Some(2000));
    assert!((r.value - q.value).abs() < 3.0 * r.err, "{} ± {} vs {}", r.value, r.err, q.value);
    let r = var_mc(&st, &SamplerSpec::Gaf(GafSpec::new(3.0)), 0..400, 2).unwrap();
    assert!((r.value - q.value).abs() < 3.0 * r.err, "gaf {} ± {} vs {}", r.value, r.err, q.value);
}

#[test]
fn mc_does_not_depend_on_thread_count() {
    let st = McStatistic::Poincare { s: 1.5, z: o() };
    let spec = SamplerSpec::Hkpv(HkpvSpec::new(1, 3.0, HkpvMode::Window));
    let a = var_mc(&st, &spec, 0..240, 1).unwrap();
    let b = var_mc(&st, &spec, 0..240, 3).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.err, b.err);
}

#[test]
fn mc_kernel_statistic_matches_iz() {
    let p = RadialProfile::indicator(1.5);
    let z = disk(0.3);
    let k = KernelCoeffs::compute(&WeightSpec::unit(1), 64, 0.9).unwrap();
    let st = McStatistic::Kernel {
        profile: p.clone(),
        z: z.clone(),
        space: Arc::new(RkhsSpace::Kernel(k)),
    };
    let spec = SamplerSpec::Hkpv(HkpvSpec::new(1, 3.5, HkpvMode::Window));
    let r = var_mc(&st, &spec, 0..2000, 2).unwrap();
    let q = identity_iz(&p, &z).unwrap();
    let tol = (0.05 * q.value).max(4.0 * r.err);
    assert!((r.value - q.value).abs() < tol, "{} ± {} vs {}", r.value, r.err, q.value);
}

#[test]
fn reports_render_as_csv() {
    let r = identity_iz(&RadialProfile::indicator(2.0), &disk(0.5)).unwrap();
    let row = r.csv_row();
    assert!(row.starts_with("gR[indicator(2);F_D],quadrature,"));
    assert!(row.contains("route=closed"));
    assert_eq!(REPORT_HEADER.split(',').count(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_variance_is_nonnegative(radius in 0.3f64..4.0, n in 0u32..12) {
        let r = var_scalar_quadrature(&Radial::Profile(RadialProfile::indicator(radius)), &TestFunction::monomial(n), &o()).unwrap();
        prop_assert!(r.value >= 0.0);
    }

    #[test]
    fn poincare_variance_decreases_in_n(s in 1.1f64..2.0, n in 0u32..20) {
        let w = Radial::poincare(s).unwrap();
        let a = var_scalar_quadrature(&w, &TestFunction::monomial(n), &o()).unwrap().value;
        let b = var_scalar_quadrature(&w, &TestFunction::monomial(n + 1), &o()).unwrap().value;
        prop_assert!(b < a);
    }

    #[test]
    fn claim_a_u_below_v(n in 0u64..400, s in 1.0f64..2.0) {
        let c = claim_a_uv(n, s).unwrap();
        prop_assert!(c.u < c.v);
    }

    #[test]
    fn impossibility_ratio_above_bound(radius in 0.3f64..6.0, z in 0.0f64..0.7) {
        let r = impossibility_ratio(&RadialProfile::indicator(radius), &disk(z)).unwrap();
        prop_assert!(r > 1.0 / 128.0);
    }

    #[test]
    fn jackknife_is_shift_invariant(shift in -50.0f64..50.0) {
        let xs: Vec<C64> = (0..40).map(|i| C64::new((i as f64).cos(), 0.1 * i as f64)).collect();
        let ys: Vec<C64> = xs.iter().map(|x| x + shift).collect();
        let (a, sa) = jackknife_variance(&xs).unwrap();
        let (b, sb) = jackknife_variance(&ys).unwrap();
        prop_assert!((a - b).abs() < 1e-10 && (sa - sb).abs() < 1e-10);
    }
}
