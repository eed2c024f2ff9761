use std::f64::consts::PI;

use proptest::prelude::*;
use psdpp_hypgeom::{Point, C64};
use psdpp_kernels::*;
use psdpp_quad::{integrate, Tolerance};

fn crit(n: usize, rho: f64) -> KernelCoeffs {
    KernelCoeffs::compute(&WeightSpec::critical(1), n, rho).unwrap()
}

#[test]
fn critical_constant_term() {
    let k = crit(4, 0.5);
    assert!((k.coeffs[0] - 4f64.ln()).abs() < 1e-8);
    // K_W(o, o) = a_0
    let o = Point::origin(1);
    let v = weighted_kernel_eval(&k, &o, &o).unwrap();
    assert_eq!(v.value, C64::new(k.coeffs[0], 0.0));
}

#[test]
fn unit_weight_matches_closed_form() {
    let k = KernelCoeffs::for_range(&WeightSpec::unit(1), 0.81, 1e-9).unwrap();
    let z = Point::disk(0.9 * 0.6, 0.9 * 0.8).unwrap();
    let w = Point::disk(-0.9, 0.0).unwrap();
    let v = weighted_kernel_eval(&k, &z, &w).unwrap();
    let exact = bergman_kernel(&z, &w).unwrap();
    assert!(v.tail_bound < 1e-9);
    assert!((v.value - exact).norm() <= v.tail_bound + 1e-10 * exact.norm());

    let k2 = KernelCoeffs::for_range(&WeightSpec::unit(2), 0.5, 1e-9).unwrap();
    let z = Point::new(vec![C64::new(0.3, 0.2), C64::new(-0.4, 0.1)]).unwrap();
    let w = Point::new(vec![C64::new(0.1, -0.5), C64::new(0.5, 0.3)]).unwrap();
    let v = weighted_kernel_eval(&k2, &z, &w).unwrap();
    assert!((v.value - bergman_kernel(&z, &w).unwrap()).norm() <= v.tail_bound + 1e-12);
}

#[test]
fn bergman_kernel_spot_values() {
    assert_eq!(bergman_kernel(&Point::origin(3), &Point::origin(3)).unwrap(), C64::new(1.0, 0.0));
    let z = Point::disk(0.5f64.sqrt(), 0.0).unwrap();
    assert!((bergman_kernel(&z, &z).unwrap().re - 4.0).abs() < 1e-12);
    let z = Point::new(vec![C64::new(0.3, 0.1), C64::new(0.2, -0.4)]).unwrap();
    let diag = bergman_kernel(&z, &z).unwrap().re;
    assert!((diag - psdpp_hypgeom::invariant_density(&z)).abs() < 1e-12 * diag);
}

#[test]
fn critical_coefficient_band() {
    let k = crit(2000, 0.5);
    let ratios: Vec<f64> = k
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| a / (4.0 * (n as f64 + 1.0)).ln())
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi / lo <= 10.0, "band [{lo}, {hi}]");
    assert!(k.coeffs.iter().all(|a| *a > 0.0));
}

#[test]
fn claim_integral_bounds() {
    for k in 0..=10_000u64 {
        let v = critical_claim_integral(k) * (4.0 * k as f64 + 4.0).ln();
        assert!((0.2..=2.0).contains(&v), "k = {k}: {v}");
    }
}

#[test]
fn claim_integral_against_direct_quadrature() {
    for &k in &[1u64, 7, 100, 5000] {
        let direct = integrate(
            |x: f64| (1.0 - 4.0 * (-x).exp()).powi(k as i32) / (x * x),
            4f64.ln(),
            4f64.ln() + 200.0,
            Tolerance::new(0.0, 1e-12).with_max_intervals(20_000),
        )
        .unwrap()
        .value
            + 1.0 / (4f64.ln() + 200.0);
        let v = critical_claim_integral(k);
        assert!((v - direct).abs() < 1e-8 * v, "k = {k}: {v} vs {direct}");
    }
}

#[test]
fn critical_diagonal_band() {
    let k = KernelCoeffs::for_range(&WeightSpec::critical(1), 0.999, 1e-9).unwrap();
    let mut lo = f64::MAX;
    let mut hi = 0.0f64;
    for i in 0..=200 {
        let t2 = 0.999 * i as f64 / 200.0;
        let v = k.eval_diag(t2).unwrap();
        assert!(v.tail_bound < 1e-9);
        let r = v.value * (1.0 - t2) / (2.0 / (1.0 - t2)).ln();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    assert!(hi / lo <= 10.0, "[{lo}, {hi}]");
}

#[test]
fn supercritical_diagonal_vanishes_relative_to_critical_model() {
    let w = WeightSpec::supercritical(0.5, 1).unwrap();
    let k = KernelCoeffs::for_range(&w, 0.999, 1e-9).unwrap();
    let r: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&t2| k.eval_diag(t2).unwrap().value * (1.0 - t2) / (2.0 / (1.0 - t2)).ln())
        .collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn supercritical_ratio() {
    let w = WeightSpec::supercritical(0.5, 1).unwrap();
    let r = supercritical_ratio_decay(&w, &[0.0, 0.9f64.sqrt(), 0.999f64.sqrt()]).unwrap();
    let a0 = KernelCoeffs::compute(&w, 1, 0.5).unwrap().coeffs[0];
    assert!((r[0] - a0 / 4f64.ln()).abs() < 1e-12);
    assert!(r[0] > 0.0 && r[2] < r[1], "{r:?}");
}

#[test]
fn dsharp_unit_weight_closed_form() {
    let k = KernelCoeffs::compute(&WeightSpec::unit(1), 4096, 0.999).unwrap();
    for &u in &[0.0f64, 0.3, 0.7, 0.95, 0.999] {
        let v = u * u;
        let exact = (1.0 + 3.0 * v) / (1.0 - v).powi(5);
        let got = angular_average_dsharp(&k, u).unwrap().value;
        assert!((got - exact).abs() < 1e-9 * exact, "u = {u}: {got} vs {exact}");
    }
    // Far below the summable range: ε⁴ D^♯ = (1 + 3v)/ε.
    let s = DsharpSeries::tabulated(&k).unwrap();
    for &eps in &[1e-6f64, 1e-30, 1e-200, 1e-290] {
        let want = (4.0 - 3.0 * eps).ln() - eps.ln();
        let got = s.ln_scaled(eps).unwrap();
        assert!((got - want).abs() < 1e-9 * want.abs(), "ε = {eps}: {got} vs {want}");
        let direct = s.scaled_direct(eps).unwrap().value.ln();
        assert!((direct - want).abs() < 1e-10 * want.abs());
    }
}

#[test]
fn dsharp_critical_matches_naive_series() {
    let k = crit(4096, 0.99);
    for &u in &[0.0, 0.4, 0.7, 0.9] {
        let v: f64 = u * u;
        let naive: f64 = k
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let n = n as f64;
                a * v.powf(n) * ((n + 1.0) / (1.0 - v).powi(2) + 2.0 * v / (1.0 - v).powi(3))
            })
            .sum();
        let got = angular_average_dsharp(&k, u).unwrap().value;
        assert!((got - naive).abs() < 1e-11 * naive, "u = {u}: {got} vs {naive}");
    }
    assert!((angular_average_dsharp(&k, 0.0).unwrap().value - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn dsharp_tail_continuation_is_consistent() {
    // The Euler–Maclaurin continuation must agree with plain summation of
    // many more stored coefficients.
    let k_big = crit(60_000, 0.9999);
    let k_small = crit(4096, 0.9999);
    let small = DsharpSeries::new(&k_small).unwrap();
    for &eps in &[2e-3, 1e-3, 8e-4] {
        let v = 1.0 - eps;
        let mut naive = 0.0;
        let mut vn = 1.0;
        for (n, a) in k_big.coeffs.iter().enumerate() {
            naive += eps * a * vn * ((n as f64 + 1.0) * eps + 2.0 * v);
            vn *= v;
        }
        let em = small.scaled_direct(eps).unwrap().value;
        assert!((em - naive).abs() < 1e-9 * naive, "ε = {eps}: {em} vs {naive}");
    }
}

#[test]
fn dsharp_table_matches_summation() {
    for w in [WeightSpec::critical(1), WeightSpec::supercritical(0.5, 1).unwrap()] {
        let k = KernelCoeffs::compute(&w, 4096, 0.5).unwrap();
        let s = DsharpSeries::tabulated(&k).unwrap();
        assert!(s.table_tail() < 1e-10, "{}: {}", w.id(), s.table_tail());
        for i in 0..60 {
            let sigma = 0.013 + 11.7 * i as f64;
            let eps = (-sigma).exp();
            let t = s.ln_scaled(eps).unwrap();
            let d = s.scaled_direct(eps).unwrap().value.ln();
            assert!((t - d).abs() < 1e-10 * (1.0 + d.abs()), "{} σ = {sigma}: {t} vs {d}", w.id());
        }
    }
}

#[test]
fn dsharp_critical_dominates_e_function() {
    let k = KernelCoeffs::compute(&WeightSpec::critical(1), 4096, 0.5).unwrap();
    let s = DsharpSeries::tabulated(&k).unwrap();
    let mut lo = f64::MAX;
    let mut hi = 0.0f64;
    for i in 0..=100 {
        let t = 0.1 + 0.89 * i as f64 / 100.0;
        let r = s.eval_eps(1.0 - t).unwrap() / e_function(t);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    assert!(lo > 0.0 && hi / lo < 10.0, "[{lo}, {hi}]");
}

#[test]
fn log_series_band() {
    for d in 1..=3 {
        let mut lo = f64::MAX;
        let mut hi = 0.0f64;
        for &t in &[0.0, 0.3, 0.6, 0.9, 0.99, 0.999, 0.9999] {
            let r = log_series(d, t) * (1.0 - t).powi(d as i32) / (2.0 / (1.0 - t)).ln();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(lo > 0.0 && hi / lo < 10.0, "d = {d}: [{lo}, {hi}]");
    }
}

/// `∫_D K_W(w, z) |K_D(z, w)|² dA(w)` in polar coordinates; the angular
/// integral of a smooth periodic function uses the trapezoid rule.
fn reproducing_integral(k: &KernelCoeffs, z: C64) -> f64 {
    let n_theta = 512;
    integrate(
        |r: f64| {
            let mut acc = 0.0;
            for j in 0..n_theta {
                let w = C64::from_polar(r, 2.0 * PI * j as f64 / n_theta as f64);
                let kw = k.eval_inner(w * z.conj()).unwrap().value;
                let kd = (C64::new(1.0, 0.0) - z * w.conj()).powi(-2);
                acc += (kw * kd.norm_sqr()).re;
            }
            2.0 * r * acc / n_theta as f64
        },
        0.0,
        1.0,
        Tolerance::new(0.0, 1e-10),
    )
    .unwrap()
    .value
}

#[test]
fn reproducing_identity() {
    for w in [WeightSpec::unit(1), WeightSpec::critical(1)] {
        let k = KernelCoeffs::for_range(&w, 0.5, 1e-12).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(0.4, 0.0), C64::new(0.4, 0.3)] {
            let lhs = reproducing_integral(&k, z);
            let rhs = k.eval_diag(z.norm_sqr()).unwrap().value / (1.0 - z.norm_sqr()).powi(2);
            assert!((lhs - rhs).abs() < 1e-6 * rhs, "{} z = {z}: {lhs} vs {rhs}", w.id());
        }
    }
}

fn leading_minors(g: &[Vec<C64>]) -> Vec<f64> {
    // Gaussian elimination without pivoting; the pivots' running products
    // are the leading principal minors.
    let n = g.len();
    let mut a = g.to_vec();
    let mut out = Vec::with_capacity(n);
    let mut det = 1.0;
    for i in 0..n {
        let p = a[i][i];
        det *= p.re;
        out.push(det);
        for r in i + 1..n {
            let f = a[r][i] / p;
            for c in i..n {
                let v = a[i][c];
                a[r][c] -= f * v;
            }
        }
    }
    out
}

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0f64..0.85, 0.0f64..(2.0 * PI)).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_symmetry(z in disk_point(), w in disk_point()) {
        let k = KernelCoeffs::for_range(&WeightSpec::critical(1), 0.7225, 1e-12).unwrap();
        let a = k.eval_inner(z * w.conj()).unwrap().value;
        let b = k.eval_inner(w * z.conj()).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn gram_matrix_positive(pts in prop::collection::vec(disk_point(), 5)) {
        let k = KernelCoeffs::for_range(&WeightSpec::critical(1), 0.7225, 1e-12).unwrap();
        let g: Vec<Vec<C64>> = pts
            .iter()
            .map(|x| pts.iter().map(|y| k.eval_inner(x * y.conj()).unwrap().value).collect())
            .collect();
        for m in leading_minors(&g) {
            prop_assert!(m > 0.0, "minor {m}");
        }
    }

    #[test]
    fn tail_bound_shrinks_with_degree(n in 2usize..400, x in 0.05f64..0.95) {
        let w = WeightSpec::supercritical(0.5, 1).unwrap();
        let a = KernelCoeffs::compute(&w, n, 0.95).unwrap();
        let b = KernelCoeffs::compute(&w, n + 1, 0.95).unwrap();
        prop_assert!(b.tail_bound(x) <= a.tail_bound(x));
    }
}
