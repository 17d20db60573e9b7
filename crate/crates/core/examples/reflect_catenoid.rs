//! Reflect the critical catenoid across its lower boundary circle and
//! compare with the closed-form catenoid beyond the sphere.

use freeboundary::catalog::{
    catenoid_scale, critical_catenoid, critical_t0, CatenoidMap, EdgeLabel, SurfaceMap,
};
use freeboundary::reflection::{reflect_patch, verify_steklov, ReflectOptions};

fn main() -> freeboundary::Result<()> {
    let s = critical_catenoid();
    let t0 = critical_t0();
    println!("t0 = {t0:.15}, c = {:.15}", catenoid_scale(t0));
    for e in &s.edges {
        println!(
            "Steklov residual on {}: {:.2e}",
            e.label,
            verify_steklov(&s, e.label)?.max
        );
    }
    let patch = reflect_patch(&s, EdgeLabel::Gamma1, &ReflectOptions::default())?;
    println!(
        "patch covers y in ({:.6}, {:.6})",
        patch.y_range.0, patch.y_range.1
    );
    println!("residuals {:#?}", patch.residuals);
    let exact = CatenoidMap {
        scale: catenoid_scale(t0),
        t_top: t0,
    };
    let (lo, hi) = patch.y_range;
    for j in 0..=4 {
        let y = lo + (hi - lo) * j as f64 / 4.0;
        let p = patch.jet(0.7, y)?.pos;
        let err = (p - exact.jet(0.7, y)?.pos).norm();
        println!("y = {y:>9.6}  |Psi*| = {:.9}  err = {err:.2e}", p.norm());
    }
    Ok(())
}
