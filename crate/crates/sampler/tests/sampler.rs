use proptest::prelude::*;
use psdpp_hypgeom::{ball_volume, disk, Point, C64};
use psdpp_quad::{integrate, Tolerance};
use psdpp_sampler::roots::horner;
use psdpp_sampler::*;

fn gaf_batch(r: f64, seeds: std::ops::Range<u64>) -> Vec<Configuration> {
    let spec = GafSpec::new(r);
    seeds.map(|s| sample_gaf(&spec, s).unwrap()).collect()
}

fn coefficients_of(c: &Configuration) -> Vec<C64> {
    // Each rejected attempt moves to the next stream.
    gaf_coefficients(c.seed, c.meta.rejected, c.meta.degree)
}

#[test]
fn gaf_is_deterministic() {
    let spec = GafSpec::new(2.5);
    for seed in [0u64, 7, 123456789] {
        let a = sample_gaf(&spec, seed).unwrap();
        let b = sample_gaf(&spec, seed).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn hkpv_is_deterministic() {
    for mode in [HkpvMode::Truncated, HkpvMode::Window] {
        let spec = HkpvSpec::new(2, 1.5, mode);
        assert_eq!(sample_hkpv(&spec, 3).unwrap(), sample_hkpv(&spec, 3).unwrap());
    }
}

#[test]
fn window_safety_under_doubled_degree() {
    let mut spec = GafSpec::new(3.0);
    for seed in 0..20u64 {
        let a = sample_gaf(&spec, seed).unwrap();
        spec.degree_floor = 2 * a.meta.degree;
        let b = sample_gaf(&spec, seed).unwrap();
        spec.degree_floor = 0;
        assert!(b.meta.degree >= 2 * a.meta.degree);
        assert_eq!(a.len(), b.len(), "seed {seed}");
        for p in a.disk_points() {
            let closest = b.disk_points().iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-8, "seed {seed}: zero moved by {closest:e}");
        }
    }
}

#[test]
fn root_residuals_after_polish() {
    for c in gaf_batch(3.0, 0..30) {
        let a = coefficients_of(&c);
        let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for z in c.disk_points() {
            assert!(horner(&a, z).norm() < 1e-10 * scale);
        }
    }
}

/// Winding number of `p` around `|z| = ρ` from argument increments between
/// `m` nodes; an arc whose increment exceeds 0.5 rad is bisected until the
/// phase is resolved, which handles zeros close to the contour.
fn winding_number(a: &[C64], rho: f64, m: usize) -> f64 {
    fn arc(a: &[C64], rho: f64, t0: f64, t1: f64, p0: C64, p1: C64, depth: u32) -> f64 {
        let inc = (p1 / p0).arg();
        if inc.abs() < 0.5 || depth == 0 {
            assert!(inc.abs() < 1.0, "contour unresolved near angle {t0}");
            return inc;
        }
        let tm = 0.5 * (t0 + t1);
        let pm = horner(a, C64::from_polar(rho, tm));
        arc(a, rho, t0, tm, p0, pm, depth - 1) + arc(a, rho, tm, t1, pm, p1, depth - 1)
    }
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let vals: Vec<C64> = (0..=m).map(|k| horner(a, C64::from_polar(rho, k as f64 * h))).collect();
    (0..m)
        .map(|k| arc(a, rho, k as f64 * h, (k + 1) as f64 * h, vals[k], vals[k + 1], 40))
        .sum::<f64>()
        / (2.0 * std::f64::consts::PI)
}

#[test]
fn zero_count_matches_argument_principle() {
    let r = 3.0;
    let rho = disk::euclidean_radius(r);
    let m = 8192;
    for c in gaf_batch(r, 100..150) {
        let a = coefficients_of(&c);
        let winding = winding_number(&a, rho, m);
        assert!((winding - winding.round()).abs() < 1e-9, "seed {}: winding {winding}", c.seed);
        assert_eq!(winding.round() as usize, c.len(), "seed {}", c.seed);
    }
}

#[test]
fn configurations_satisfy_invariants() {
    for c in gaf_batch(3.0, 0..20) {
        c.check_invariants().unwrap();
        assert!(c.meta.tail_margin <= 1e-3);
    }
    let c = sample_hkpv(&HkpvSpec::new(2, 2.0, HkpvMode::Window), 1).unwrap();
    c.check_invariants().unwrap();
}

#[test]
fn gaf_first_and_second_order_statistics() {
    let configs = gaf_batch(3.0, 0..400);
    let report = validate_statistics(&configs, &[1.0, 2.0]).unwrap();
    for r in &report.radii {
        assert!(r.mean_z.abs() < 3.0, "radius {}: z = {}", r.radius, r.mean_z);
    }
    assert!((report.radii[1].expected_mean - 1.381097).abs() < 1e-6);
    // Repulsion: pairs at distance below 0.25 are essentially absent.
    assert!(report.pairs[0].empirical < 0.05);
    assert!(validate_statistics(&configs[..50], &[1.0]).is_err());
    assert!(validate_statistics(&configs, &[3.5]).is_err());
}

#[test]
fn gaf_count_variance_in_disk() {
    let configs = gaf_batch(2.0, 0..2000);
    let report = validate_statistics(&configs, &[2.0]).unwrap();
    let r = &report.radii[0];
    assert!((r.expected_variance - 0.874098).abs() < 1e-6);
    assert!(r.variance_rel_err.abs() < 0.10, "relative error {}", r.variance_rel_err);
}

#[test]
fn count_variance_matches_double_integral() {
    // Var = ∫_B K - ∬_{B×B} |K|², with the angular average of |K|² by trapezoid.
    let t = 1f64.tanh();
    let avg = |x: f64| {
        let m = 256;
        (0..m)
            .map(|k| {
                let e = C64::from_polar(x, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                (C64::new(1.0, 0.0) - e).norm_sqr().powi(-2)
            })
            .sum::<f64>()
            / m as f64
    };
    let tol = Tolerance::new(1e-13, 1e-11);
    let inner = |r1: f64| integrate(|r2| 4.0 * r1 * r2 * avg(r1 * r2), 0.0, t, tol).unwrap().value;
    let double = integrate(inner, 0.0, t, tol).unwrap().value;
    let first = integrate(|r| 2.0 * r / (1.0 - r * r).powi(2), 0.0, t, tol).unwrap().value;
    assert!((first - double - count_variance(1, t)).abs() < 1e-9);
}

#[test]
fn hkpv_constant_basis_is_uniform() {
    let mut spec = HkpvSpec::new(1, 30.0, HkpvMode::Truncated);
    spec.degree_cutoff = Some(0);
    let n = 4000;
    let r2: Vec<f64> = (0..n)
        .map(|s| {
            let c = sample_hkpv(&spec, s).unwrap();
            assert_eq!(c.len(), 1);
            c.points[0].norm_sqr()
        })
        .collect();
    let mean = r2.iter().sum::<f64>() / n as f64;
    // |z|² is uniform on [0, 1]: standard error sqrt(1/12/n).
    assert!((mean - 0.5).abs() < 4.0 * (1.0 / 12.0 / n as f64).sqrt(), "mean {mean}");
}

#[test]
fn hkpv_disk_count_matches_volume() {
    for mode in [HkpvMode::Window, HkpvMode::Truncated] {
        let spec = HkpvSpec::new(1, 2.0, mode);
        let configs: Vec<_> = (0..400).map(|s| sample_hkpv(&spec, s).unwrap()).collect();
        let report = validate_statistics(&configs, &[2.0]).unwrap();
        assert!(report.radii[0].mean_z.abs() < 3.0, "{mode:?}: {:?}", report.radii[0]);
    }
}

#[test]
fn hkpv_ball_count_matches_volume_d2() {
    let spec = HkpvSpec::new(2, 2.0, HkpvMode::Window);
    let configs: Vec<_> = (0..400).map(|s| sample_hkpv(&spec, s).unwrap()).collect();
    let report = validate_statistics(&configs, &[1.0, 2.0]).unwrap();
    assert!((report.radii[0].expected_mean - ball_volume(1.0, 2)).abs() < 1e-12);
    for r in &report.radii {
        assert!(r.mean_z.abs() < 3.0, "{r:?}");
    }
    assert!(report.radii[1].variance_rel_err.abs() < 0.2, "{:?}", report.radii[1]);
}

#[test]
fn hkpv_truncated_places_basis_size_points() {
    let mut spec = HkpvSpec::new(3, 30.0, HkpvMode::Truncated);
    spec.degree_cutoff = Some(4);
    let c = sample_hkpv(&spec, 11).unwrap();
    // #{α ∈ N³ : |α| ≤ 4} = C(7, 3)
    assert_eq!(c.len(), 35);
    assert_eq!(c.meta.accepted, 35);
}

#[test]
fn archive_round_trip_of_samples() {
    for c in gaf_batch(3.0, 0..5) {
        let back = Configuration::from_archive(&c.to_archive()).unwrap();
        assert_eq!(back, c);
    }
    let c = sample_hkpv(&HkpvSpec::new(2, 1.5, HkpvMode::Window), 2).unwrap();
    assert_eq!(Configuration::from_archive(&c.to_archive()).unwrap(), c);
    assert!(Configuration::from_archive("# dpp d=1 generator=gaf seed=1 R=2 N=3\n0.1,0.2,0.3\n").is_err());
}

proptest! {
    #[test]
    fn archive_round_trip_is_exact(
        raw in prop::collection::vec((0.0f64..0.7, -std::f64::consts::PI..std::f64::consts::PI, 0.0f64..0.7, -3.0f64..3.0), 0..20),
        seed in any::<u64>(),
        r in 0.1f64..20.0,
    ) {
        let points: Vec<Point> = raw
            .iter()
            .map(|&(a, t1, b, t2)| Point::new(vec![C64::from_polar(a, t1), C64::from_polar(b, t2)]).unwrap())
            .collect();
        let c = Configuration {
            points,
            window_radius: r,
            seed,
            generator: Generator::Hkpv,
            d: 2,
            meta: TruncationMeta { degree: 17, tail_margin: 3.5e-7, accepted: 20, rejected: 41 },
        };
        prop_assert_eq!(Configuration::from_archive(&c.to_archive()).unwrap(), c);
    }
}
