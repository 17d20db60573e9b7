use freeboundary::catalog::EdgeLabel;
use freeboundary::catalog::{
    catenoid_scale, critical_catenoid, critical_t0, equatorial_disk, noncritical_catenoid, plane,
    CatenoidMap, DISK_Y_MAX,
};
use freeboundary::extension::{extend, to_punctured_plane};
use freeboundary::geometry::{
    boundary_convexity, curvature_line_forms_check, fd_jet, forms_from_jet, fundamental_forms,
    gauss_map_samples, hopf_scan, injectivity_scan, plane_samples, superharmonic_checks,
    surface_total_curvature, total_curvature, CheckStatus,
};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn flat_surfaces_have_no_curvature() {
    let p = plane(2.0, 1.0);
    let f = fundamental_forms(p.map.as_ref(), 0.4, 0.3).unwrap();
    assert_eq!((f.l, f.m, f.n, f.k), (0.0, 0.0, 0.0, 0.0));
    let normals = gauss_map_samples(&p, 4, 4).unwrap();
    assert!(normals
        .iter()
        .all(|s| (s.normal.z.abs() - 1.0).abs() < 1e-15));
    // a plane's Gauss map is constant, far from injective
    assert!(injectivity_scan(&normals) < 1e-15);
}

#[test]
fn catenoid_normals_are_distinct() {
    let s = critical_catenoid();
    let a = injectivity_scan(&gauss_map_samples(&s, 16, 8).unwrap());
    assert!(a > 1e-2, "{a}");
}

#[test]
fn noncritical_hopf_data() {
    let ext = extend(&noncritical_catenoid(0.9).unwrap(), 0).unwrap();
    let plane = to_punctured_plane(&ext);
    let h = hopf_scan(&plane, &plane_samples(&plane, 16, 8)).unwrap();
    // still a catenoid, so α is constant; the scale differs from the critical one
    assert!(h.beta_max < 1e-12 && h.alpha_spread < 1e-10);
    assert!((h.alpha_mean + catenoid_scale(0.9 * critical_t0())).abs() < 1e-10);
}

#[test]
fn total_curvature_converges_with_the_grid() {
    let s = critical_catenoid();
    let coarse = surface_total_curvature(&s, 8).unwrap();
    let fine = surface_total_curvature(&s, 16).unwrap();
    let t0 = critical_t0();
    // ∫K dA = -4π tanh t0 over |t| < t0
    let want = -4.0 * PI * t0.tanh();
    assert!((fine - want).abs() < 1e-10, "{fine} {want}");
    assert!((coarse - fine).abs() < 1e-10);
    // two steps cover t ∈ (-5t0, 3t0)
    let ext = extend(&s, 2).unwrap();
    let tc = total_curvature(&ext, 16).unwrap();
    let covered = -2.0 * PI * ((5.0 * t0).tanh() + (3.0 * t0).tanh());
    assert!((tc.value - covered).abs() < 1e-9, "{tc:?} {covered}");
    assert!((tc.total + 4.0 * PI).abs() < 1e-8, "{tc:?}");
}

#[test]
fn disk_is_flat_and_log_r_harmonic() {
    let d = equatorial_disk(DISK_Y_MAX);
    let r = superharmonic_checks(&d, 200, 3).unwrap();
    assert!(r.lap_r2 < 1e-12);
    assert!(r.lap_neg_log_r_max.abs() < 1e-12 && r.lap_neg_log_r_min.abs() < 1e-12);
    assert!(r.boundary_k < 1e-15 && r.boundary_dk < 1e-12);
    let c = boundary_convexity(&d, EdgeLabel::Gamma1, 64).unwrap();
    // the equator is a great circle
    assert!(c.min_geodesic_curvature.abs() < 1e-12 && c.max_geodesic_curvature.abs() < 1e-12);
}

#[test]
fn catenoid_strip_is_a_curvature_line_chart() {
    let ext = extend(&critical_catenoid(), 2).unwrap();
    let r = curvature_line_forms_check(&ext.as_surface(), 16, 24).unwrap();
    assert_eq!(r.status, CheckStatus::Applied);
    assert!(
        r.diagonalization < 1e-12 && r.first_form < 1e-10 && r.second_form < 1e-10,
        "{r:?}"
    );
    let flat = curvature_line_forms_check(&plane(1.0, 1.0), 4, 4).unwrap();
    assert_eq!(flat.status, CheckStatus::Skipped);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn catenoid_forms(scale in 0.2f64..3.0, x in 0.0f64..2.0 * PI, t in -2.0f64..2.0) {
        let m = CatenoidMap { scale, t_top: 0.0 };
        let y = -t;
        let f = fundamental_forms(&m, x, y).unwrap();
        let ch = t.cosh();
        // Λ = c² cosh² t, K = -1/(c² cosh⁴ t), H = 0
        prop_assert!((f.lambda - scale * scale * ch * ch).abs() <= 1e-12 * f.lambda);
        prop_assert!((f.k + 1.0 / (scale * scale * ch.powi(4))).abs() <= 1e-11 * f.k.abs());
        prop_assert!(f.h_mean.abs() <= 1e-12 * f.k.abs().sqrt());
        prop_assert!((f.l.abs() - scale).abs() <= 1e-12 * scale && f.m.abs() <= 1e-12 * scale);
        let g = forms_from_jet(&fd_jet(&m, x, y, 1e-3).unwrap()).unwrap();
        prop_assert!((g.k - f.k).abs() <= 1e-4 * f.k.abs());
    }
}
