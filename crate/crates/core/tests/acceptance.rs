//! One line per acceptance criterion, then a single assertion over all of
//! them. Run with `cargo test --test acceptance -- --nocapture` to see the
//! table.

use std::f64::consts::PI;
use std::time::Instant;

use freeboundary::catalog::{
    catenoid_band, catenoid_scale, critical_catenoid, critical_t0, equatorial_disk,
    noncritical_catenoid, perturbed_plane, CatenoidMap, EdgeLabel, SurfaceMap, DISK_Y_MAX,
};
use freeboundary::extension::{extend, ExtendedSurface};
use freeboundary::geometry::{
    curvature_report, flux, fundamental_forms, superharmonic_checks, surface_total_curvature,
    total_curvature, GeometryOptions,
};
use freeboundary::harmonic_series::{solve_cauchy, CauchyData, TrigPolynomial};
use freeboundary::holomorphic::{ExpMode, HolomorphicModel};
use freeboundary::isothermal::{
    build_normalization, find_branch_points, normalize_default, push_forward, Rect,
};
use freeboundary::reflection::{reflect_patch, steklov_residual, ReflectOptions};
use freeboundary::reports::{run, Operation, RunConfig};
use num_complex::Complex64;

struct Table {
    failed: Vec<String>,
}

impl Table {
    fn new() -> Self {
        Table { failed: Vec::new() }
    }

    fn record(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let line = format!("{tag} {id:<4} {what}: {detail}");
        println!("{line}");
        if !ok {
            self.failed.push(line);
        }
    }

    fn info(&mut self, id: &str, what: &str, detail: String) {
        let line = format!("INFO {id:<4} {what}: {detail}");
        println!("{line}");
    }
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn closed_catenoid() -> CatenoidMap {
    let t0 = critical_t0();
    CatenoidMap {
        scale: catenoid_scale(t0),
        t_top: t0,
    }
}

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

fn c1_cauchy(t: &mut Table) {
    let start = Instant::now();
    let zero = TrigPolynomial::zero(2.0).unwrap();
    let one = TrigPolynomial::constant(2.0, 1.0).unwrap();
    let cos = TrigPolynomial::mode(2.0, 1, 1.0, 0.0).unwrap();
    type Exact = fn(f64, f64) -> f64;
    let cases: [(TrigPolynomial, TrigPolynomial, Exact); 3] = [
        (zero.clone(), one, |_, y| y),
        (cos.clone(), zero.clone(), |x, y| {
            (PI * y).cosh() * (PI * x).cos()
        }),
        (zero, cos, |x, y| (PI * y).sinh() * (PI * x).cos() / PI),
    ];
    let mut worst = 0.0f64;
    for (g, f, exact) in cases {
        let h = solve_cauchy(&CauchyData::new(g, f).unwrap()).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                let (x, y) = (2.0 * i as f64 / 64.0, -1.0 + 2.0 * j as f64 / 63.0);
                worst = worst.max((h.evaluate(x, y).unwrap() - exact(x, y)).abs());
            }
        }
    }
    let dt = secs(start);
    t.record(
        "C1",
        "Cauchy solver closed forms, 64x64",
        worst <= 1e-12 && dt < 1.0,
        format!("max err {worst:.3e} <= 1e-12, {dt:.3}s < 1s"),
    );
}

fn axis_factor_defect(s: &freeboundary::catalog::AnalyticSurface, edge: EdgeLabel) -> f64 {
    let m = normalize_default(s, edge).unwrap();
    let pf = push_forward(s, &m).unwrap();
    (0..256)
        .map(|k| {
            let x = m.p * k as f64 / 256.0;
            (pf.jet(x, 0.0).unwrap().du.norm() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

fn c2_normalization(t: &mut Table) {
    let cat = critical_catenoid();
    let a = axis_factor_defect(&cat, EdgeLabel::Gamma1)
        .max(axis_factor_defect(&cat, EdgeLabel::Gamma2));
    let b = axis_factor_defect(&perturbed_plane(0.1), EdgeLabel::Gamma1);
    t.record(
        "C2",
        "normalized conformal factor on the axis",
        a <= 1e-8 && b <= 1e-8,
        format!("catenoid {a:.3e}, F=1+0.1cos(pi x) {b:.3e} <= 1e-8"),
    );
}

fn c3_steklov(t: &mut Table) {
    let timed = |s: &freeboundary::catalog::AnalyticSurface| {
        let start = Instant::now();
        let r = s
            .edges
            .iter()
            .map(|e| steklov_residual(s, e.label, 256).unwrap().max)
            .fold(0.0, f64::max);
        (r, secs(start))
    };
    let (crit, t1) = timed(&critical_catenoid());
    let (disk, t2) = timed(&equatorial_disk(DISK_Y_MAX));
    let (nc, t3) = timed(&noncritical_catenoid(0.9).unwrap());
    let slow = t1.max(t2).max(t3);
    t.record(
        "C3",
        "Steklov residuals",
        crit <= 1e-8 && disk <= 1e-12 && nc >= 0.05 && slow < 1.0,
        format!("critical {crit:.3e} <= 1e-8, disk {disk:.3e} <= 1e-12, noncritical(0.9) {nc:.3e} >= 0.05, slowest {slow:.3}s < 1s"),
    );
}

fn c4_reflection(t: &mut Table) {
    let start = Instant::now();
    let s = critical_catenoid();
    let patch = reflect_patch(&s, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
    let oracle = closed_catenoid();
    let (lo, hi) = patch.y_range;
    let mut worst = 0.0f64;
    for i in 0..256 {
        for j in 0..64 {
            let x = 2.0 * PI * i as f64 / 256.0;
            let y = lo + (hi - lo) * j as f64 / 63.0;
            worst =
                worst.max((patch.jet(x, y).unwrap().pos - oracle.jet(x, y).unwrap().pos).norm());
        }
    }
    // t = t0 - y runs over (t0, 3t0)
    let t0 = critical_t0();
    let range_ok = ((t0 - hi) - t0).abs() < 1e-12 && ((t0 - lo) - 3.0 * t0).abs() < 1e-12;
    let sign = patch.edge.side.sign();
    let depth = patch
        .normalization
        .h
        .eval(Complex64::new(0.0, s.domain.height()))
        .unwrap()
        .im;
    let mut ode = 0.0f64;
    for (m, l) in patch.models.iter().zip(&patch.lambdas) {
        for k in 0..8 {
            let z0 = Complex64::new(patch.normalization.p * k as f64 / 8.0, 0.0);
            let z1 = z0 - Complex64::new(0.0, depth);
            let want = m.eval(z1).unwrap();
            let got = rk4(l, sign, z0, m.eval(z0).unwrap(), z1, 400);
            ode = ode.max((got - want).norm() / (1.0 + want.norm()));
        }
    }
    let dt = secs(start);
    t.record(
        "C4",
        "reflection across gamma1 vs closed form, 256x64",
        worst <= 1e-6 && ode <= 1e-7 && range_ok && dt < 10.0,
        format!("sup err {worst:.3e} <= 1e-6, RK4 oracle {ode:.3e} <= 1e-7, t in (t0,3t0) {range_ok}, {dt:.3}s < 10s"),
    );
}

fn c5_flat(t: &mut Table) {
    let d = equatorial_disk(DISK_Y_MAX);
    let patch = reflect_patch(&d, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
    let (lo, hi) = patch.y_range;
    let (mut x3, mut rmin) = (0.0f64, f64::INFINITY);
    for i in 0..64 {
        for j in 0..=64 {
            let x = 2.0 * PI * i as f64 / 64.0;
            let y = lo + (hi - lo) * j as f64 / 64.0;
            let p = patch.jet(x, y).unwrap().pos;
            x3 = x3.max(p.z.abs());
            rmin = rmin.min(p.norm());
        }
    }
    t.record(
        "C5",
        "disk reflection stays in x3=0 outside the ball",
        x3 <= 1e-10 && rmin >= 1.0 - 1e-12,
        format!("max |x3| {x3:.3e} <= 1e-10, min |Psi*| {rmin:.15} >= 1"),
    );
}

fn c6_extension(t: &mut Table, ext: &ExtendedSurface) {
    let surf = ext.as_surface();
    let (lo, hi) = ext.y_range();
    let a = ext.height();
    let period = ext.period();
    let mut per = 0.0f64;
    let mut conf = 0.0f64;
    for j in 0..=64 {
        let y = lo + (hi - lo) * j as f64 / 64.0;
        for i in 0..16 {
            let x = period * (i as f64 + 0.3) / 16.0;
            let jet = surf.jet(x, y).unwrap();
            let shifted = surf.jet(x + period, y).unwrap();
            per = per.max((jet.pos - shifted.pos).norm() / (1.0 + jet.pos.norm()));
            conf = conf.max(jet.conformality_defect());
        }
    }
    let (mut seam_v, mut seam_d) = (0.0f64, 0.0f64);
    for p in &ext.patches {
        let r = p.patch.residuals;
        conf = conf.max(r.conformality);
        seam_v = seam_v.max(r.seam_value);
        seam_d = seam_d.max(r.seam_derivative);
    }
    // |H| on every seam and in a band of width a/10 across it
    let mut h = 0.0f64;
    let (b0, b1) = ext.bounds;
    for k in (b0 + 1)..b1 {
        let ys = k as f64 * a;
        for d in -4..=4 {
            let y = ys + 0.025 * a * d as f64;
            for i in 0..16 {
                let x = period * (i as f64 + 0.5) / 16.0;
                h = h.max(
                    fundamental_forms(surf.map.as_ref(), x, y)
                        .unwrap()
                        .h_mean
                        .abs(),
                );
            }
        }
    }
    t.record(
        "C6",
        "periodicity, conformality, seams and |H| of the n=8 extension",
        per <= 1e-10 && conf <= 1e-8 && seam_v <= 1e-8 && seam_d <= 1e-8 && h <= 1e-6,
        format!(
            "periodicity {per:.3e} <= 1e-10, conformality {conf:.3e} <= 1e-8, seam C0 {seam_v:.3e} C1 {seam_d:.3e} <= 1e-8, |H| {h:.3e} <= 1e-6"
        ),
    );
}

fn c7_c8_hopf_and_total(t: &mut Table, ext: &ExtendedSurface) {
    let r = curvature_report(ext, &GeometryOptions::default()).unwrap();
    t.record(
        "C7",
        "Hopf quantities on the n=8 extension",
        r.hopf.beta_max <= 1e-6 && r.hopf.alpha_spread <= 1e-6 && r.k_max < 0.0 && r.k_identity <= 1e-6,
        format!(
            "sup|beta| {:.3e} <= 1e-6, alpha spread {:.3e} <= 1e-6 (alpha {:.12}), max K {:.3e} < 0, K identity {:.3e} <= 1e-6",
            r.hopf.beta_max, r.hopf.alpha_spread, r.hopf.alpha_mean, r.k_max, r.k_identity
        ),
    );

    let start = Instant::now();
    let tc = total_curvature(ext, 32).unwrap();
    let dt = secs(start);
    let err = (tc.total + 4.0 * PI).abs();
    let mut band = 0.0f64;
    let t0 = critical_t0();
    for mult in [1.0, 3.0, 5.0] {
        let big_t = mult * t0;
        let s = catenoid_band(catenoid_scale(t0), -big_t, big_t, "band");
        let v = surface_total_curvature(&s, 32).unwrap();
        band = band.max((v + 4.0 * PI * big_t.tanh()).abs());
    }
    t.record(
        "C8",
        "total curvature -4pi",
        err <= 1e-2 * 4.0 * PI && band <= 1e-8 && dt < 30.0,
        format!(
            "quadrature {:.12} + tail {:.3e} = {:.12}, |err| {err:.3e} <= {:.3e}, band oracle {band:.3e} <= 1e-8, {dt:.3}s < 30s",
            tc.value,
            tc.tail,
            tc.total,
            1e-2 * 4.0 * PI
        ),
    );
}

fn c9_flux(t: &mut Table) {
    let s = critical_catenoid();
    let f1 = flux(&s, EdgeLabel::Gamma1, 256).unwrap();
    let f2 = flux(&s, EdgeLabel::Gamma2, 256).unwrap();
    let sum = (f1.flux + f2.flux).norm();
    // vertical flux through one circle of a catenoid of waist c is 2πc
    let c = catenoid_scale(critical_t0());
    let vert = (f1.flux.z - 2.0 * PI * c)
        .abs()
        .max((f2.flux.z + 2.0 * PI * c).abs());
    t.record(
        "C9",
        "flux balance",
        sum <= 1e-8 && vert <= 1e-8,
        format!("|flux1 + flux2| {sum:.3e} <= 1e-8, vertical flux vs 2 pi c {vert:.3e} <= 1e-8"),
    );
}

fn c10_superharmonic(t: &mut Table) {
    let r = superharmonic_checks(&critical_catenoid(), 1000, 1).unwrap();
    let boundary = r.boundary_k.max(r.boundary_dk);
    t.record(
        "C10",
        "Laplacians of r^2 and -log r",
        r.lap_r2 <= 1e-6 && r.lap_neg_log_r_max <= 1e-9 && boundary <= 1e-8,
        format!(
            "|lap r^2 - 4| {:.3e} <= 1e-6, max lap(-log r) {:.3e} <= 1e-9 (superharmonic), boundary data {boundary:.3e} <= 1e-8",
            r.lap_r2, r.lap_neg_log_r_max
        ),
    );
    let literal = r.lap_neg_log_r_min >= -1e-9;
    t.info(
        "C10",
        "opposite inequality lap(-log r) >= -1e-9, not asserted",
        format!(
            "min lap(-log r) {:.3e}, holds: {literal}",
            r.lap_neg_log_r_min
        ),
    );
}

fn c11_punctures(t: &mut Table) {
    let s = critical_catenoid();
    let mut nonempty = 0;
    for n in 1..=8 {
        nonempty += extend(&s, n).unwrap().punctures.total_multiplicity();
    }
    // H = -cos(πz)/π, H' = sin(πz)
    let k = Complex64::new(-0.5 / PI, 0.0);
    let h = HolomorphicModel::new(
        vec![
            ExpMode {
                omega: PI,
                coeff: k,
            },
            ExpMode {
                omega: -PI,
                coeff: k,
            },
        ],
        vec![],
        vec![],
    );
    let rect = Rect {
        x0: -1.0,
        x1: 1.0,
        y0: -1.0,
        y1: 1.0,
    };
    let set = find_branch_points(&h, rect, 6, 6).unwrap();
    let sine_ok = set.points.len() == 1 && set.points[0].z.norm() < 1e-12;
    let f = TrigPolynomial::new(2.0, vec![2.0, 0.9], vec![0.0], 0.0).unwrap();
    let m = build_normalization(&f).unwrap();
    let rect = Rect {
        x0: 0.1,
        x1: 2.1,
        y0: -0.5,
        y1: 0.5,
    };
    let strong = find_branch_points(&m.h, rect, 12, 12).unwrap();
    let counts_ok = set.total_multiplicity() as i64 == set.winding_total
        && strong.total_multiplicity() as i64 == strong.winding_total
        && strong.total_multiplicity() == 2;
    t.record(
        "C11",
        "puncture bookkeeping",
        nonempty == 0 && sine_ok && counts_ok,
        format!(
            "punctures over n=1..8: {nonempty}, H'=sin(pi z) zeros {:?}, multiplicity/winding {}/{} and {}/{}",
            set.points.iter().map(|p| p.z).collect::<Vec<_>>(),
            set.total_multiplicity(),
            set.winding_total,
            strong.total_multiplicity(),
            strong.winding_total
        ),
    );
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn c12_determinism(t: &mut Table) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let texts: Vec<String> = dirs
        .iter()
        .map(|d| {
            let cfg = RunConfig {
                surface: "critical-catenoid".into(),
                operation: Operation::Verify,
                steps: 4,
                nx: 16,
                ny: 32,
                seed: 7,
                out: d.path().to_path_buf(),
                ..RunConfig::default()
            };
            run(&cfg).unwrap();
            std::fs::read_to_string(d.path().join("report.json")).unwrap()
        })
        .collect();
    let same = without_timestamp(&texts[0]) == without_timestamp(&texts[1]);
    t.record(
        "C12",
        "repeated verify runs",
        same,
        format!(
            "byte-identical without timestamp: {same} ({} bytes)",
            texts[0].len()
        ),
    );
}

#[test]
fn acceptance() {
    let mut t = Table::new();
    c1_cauchy(&mut t);
    c2_normalization(&mut t);
    c3_steklov(&mut t);
    c4_reflection(&mut t);
    c5_flat(&mut t);
    let ext = extend(&critical_catenoid(), 8).unwrap();
    c6_extension(&mut t, &ext);
    c7_c8_hopf_and_total(&mut t, &ext);
    c9_flux(&mut t);
    c10_superharmonic(&mut t);
    c11_punctures(&mut t);
    c12_determinism(&mut t);
    assert!(
        t.failed.is_empty(),
        "failed criteria:\n{}",
        t.failed.join("\n")
    );
}
