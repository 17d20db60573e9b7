use freeboundary::catalog::{
    catenoid_scale, critical_catenoid, critical_t0, equatorial_disk, exterior_catenoid_piece,
    noncritical_catenoid, CatenoidMap, EdgeLabel, SurfaceMap, DISK_Y_MAX,
};
use freeboundary::holomorphic::HolomorphicModel;
use freeboundary::reflection::{
    reflect_patch, schwarz_extend, verify_schwarz_condition, ReflectOptions,
};
use freeboundary::{Error, Stage};
use num_complex::Complex64;
use std::f64::consts::PI;

fn closed_form() -> CatenoidMap {
    let t0 = critical_t0();
    CatenoidMap {
        scale: catenoid_scale(t0),
        t_top: t0,
    }
}

/// Classical RK4 for `Φ' = s (iΦ - Λ)` along a straight segment.
fn rk4(
    lambda: &HolomorphicModel,
    s: f64,
    z0: Complex64,
    phi0: Complex64,
    z1: Complex64,
    n: usize,
) -> Complex64 {
    let i = Complex64::i();
    let h = (z1 - z0) / n as f64;
    let f = |z: Complex64, p: Complex64| s * (i * p - lambda.eval(z).unwrap());
    let mut p = phi0;
    for k in 0..n {
        let z = z0 + h * k as f64;
        let k1 = f(z, p);
        let k2 = f(z + h * 0.5, p + k1 * h * 0.5);
        let k3 = f(z + h * 0.5, p + k2 * h * 0.5);
        let k4 = f(z + h, p + k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * h / 6.0;
    }
    p
}

#[test]
fn mode_solution_matches_path_integration() {
    let s = critical_catenoid();
    for edge in [EdgeLabel::Gamma1, EdgeLabel::Gamma2] {
        let patch = reflect_patch(&s, edge, &ReflectOptions::default()).unwrap();
        let sign = patch.edge.side.sign();
        let depth = patch
            .normalization
            .h
            .eval(Complex64::new(0.0, s.domain.height()))
            .unwrap()
            .im;
        for (m, l) in patch.models.iter().zip(&patch.lambdas) {
            for k in 0..4 {
                let z0 = Complex64::new(patch.normalization.p * k as f64 / 4.0, 0.0);
                let z1 = z0 - Complex64::new(0.0, depth);
                let want = m.eval(z1).unwrap();
                let got = rk4(l, sign, z0, m.eval(z0).unwrap(), z1, 400);
                assert!(
                    (got - want).norm() <= 1e-7 * (1.0 + want.norm()),
                    "{edge} {got} {want}"
                );
            }
        }
    }
}

#[test]
fn both_edges_continue_the_catenoid() {
    let s = critical_catenoid();
    let oracle = closed_form();
    for edge in [EdgeLabel::Gamma1, EdgeLabel::Gamma2] {
        let patch = reflect_patch(&s, edge, &ReflectOptions::default()).unwrap();
        let (lo, hi) = patch.y_range;
        let mut worst = 0.0f64;
        for i in 0..64 {
            for j in 0..=32 {
                let (x, y) = (2.0 * PI * i as f64 / 64.0, lo + (hi - lo) * j as f64 / 32.0);
                worst = worst
                    .max((patch.jet(x, y).unwrap().pos - oracle.jet(x, y).unwrap().pos).norm());
            }
        }
        assert!(worst <= 1e-6, "{edge}: {worst}");
        // periodic in x
        for &y in &[lo + 0.1, 0.5 * (lo + hi)] {
            let a = patch.jet(0.3, y).unwrap().pos;
            let b = patch.jet(0.3 + 2.0 * PI, y).unwrap().pos;
            assert!((a - b).norm() <= 1e-10);
        }
    }
}

#[test]
fn exterior_piece_reflects_inward() {
    let ext = exterior_catenoid_piece();
    let patch = reflect_patch(&ext, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
    let (lo, hi) = patch.y_range;
    let t0 = critical_t0();
    assert!((lo - 2.0 * t0).abs() < 1e-12 && (hi - 4.0 * t0).abs() < 1e-12);
    let oracle = CatenoidMap {
        scale: catenoid_scale(t0),
        t_top: 3.0 * t0,
    };
    for i in 0..32 {
        for j in 0..=16 {
            let (x, y) = (2.0 * PI * i as f64 / 32.0, lo + (hi - lo) * j as f64 / 16.0);
            let p = patch.jet(x, y).unwrap().pos;
            assert!((p - oracle.jet(x, y).unwrap().pos).norm() <= 1e-6);
            assert!(p.norm() <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn reflecting_back_returns_the_original() {
    let s = critical_catenoid();
    let patch = reflect_patch(&s, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
    let back = reflect_patch(
        &patch.as_surface(),
        EdgeLabel::Gamma1,
        &ReflectOptions::default(),
    )
    .unwrap();
    let (lo, hi) = back.y_range;
    assert!(lo.abs() < 1e-12 && (hi - s.domain.height()).abs() < 1e-12);
    for i in 0..16 {
        for j in 0..=8 {
            let (x, y) = (0.39 * i as f64, lo + (hi - lo) * j as f64 / 8.0);
            assert!((back.jet(x, y).unwrap().pos - s.position(x, y).unwrap()).norm() <= 1e-6);
        }
    }
}

#[test]
fn flat_disk_reflects_into_the_plane() {
    let d = equatorial_disk(DISK_Y_MAX);
    let patch = reflect_patch(&d, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
    let (lo, hi) = patch.y_range;
    for i in 0..32 {
        for j in 0..=32 {
            let (x, y) = (2.0 * PI * i as f64 / 32.0, lo + (hi - lo) * j as f64 / 32.0);
            let p = patch.jet(x, y).unwrap().pos;
            assert!(p.z.abs() <= 1e-10);
            assert!(p.norm() >= 1.0 - 1e-12);
        }
    }
}

#[test]
fn reflected_coordinates_are_harmonic() {
    let s = critical_catenoid();
    let patch = reflect_patch(&s, EdgeLabel::Gamma2, &ReflectOptions::default()).unwrap();
    let (x, y) = (1.1, 0.5 * (patch.y_range.0 + patch.y_range.1));
    let lap = |h: f64| {
        let v = |dx: f64, dy: f64| patch.jet(x + dx, y + dy).unwrap().pos;
        ((v(h, 0.0) + v(-h, 0.0) + v(0.0, h) + v(0.0, -h) - v(0.0, 0.0) * 4.0) / (h * h)).norm()
    };
    assert!(lap(1e-2) < 1e-4);
    assert!(lap(2e-2) / lap(1e-2) > 3.0);
}

#[test]
fn negative_control_fails_schwarz_when_forced() {
    let bad = noncritical_catenoid(0.9).unwrap();
    match reflect_patch(&bad, EdgeLabel::Gamma1, &ReflectOptions::default()) {
        Err(Error::Stage {
            stage: Stage::Steklov,
            ..
        }) => {}
        other => panic!("{other:?}"),
    }
    let lax = ReflectOptions {
        steklov_tol: 1.0,
        schwarz_tol: 1.0,
        match_tol: 1.0,
        ..ReflectOptions::default()
    };
    let patch = reflect_patch(&bad, EdgeLabel::Gamma1, &lax).unwrap();
    assert!(patch.residuals.schwarz > 1e-2, "{:?}", patch.residuals);
}

#[test]
fn schwarz_examples() {
    let xs: Vec<f64> = (0..16).map(|k| 2.0 * PI * k as f64 / 16.0).collect();
    let c = HolomorphicModel::constant(Complex64::new(1.5, 0.0));
    let e = schwarz_extend(&c, &xs, 1e-10).unwrap();
    assert!((e.eval(Complex64::new(0.3, -2.0)).unwrap() - 1.5).norm() < 1e-15);
    // sin Z = (e^{iZ} - e^{-iZ}) / 2i
    let sin = HolomorphicModel::exp(1.0, Complex64::new(0.0, -0.5))
        .add(&HolomorphicModel::exp(-1.0, Complex64::new(0.0, 0.5)));
    assert!(verify_schwarz_condition(&[sin.clone()], &xs).unwrap() < 1e-15);
    let e = schwarz_extend(&sin, &xs, 1e-10).unwrap();
    let z = Complex64::new(0.7, -0.4);
    assert!((e.eval(z).unwrap() - z.sin()).norm() < 1e-14);
    assert!((e.eval(z.conj()).unwrap() - e.eval(z).unwrap().conj()).norm() < 1e-14);
    let not_real = HolomorphicModel::constant(Complex64::new(0.0, 0.1));
    assert!(schwarz_extend(&not_real, &xs, 1e-10).is_err());
}
