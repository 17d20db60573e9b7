//! Hopf quantities, Gauss curvature identity, total curvature and flux for
//! the extended critical catenoid.

use freeboundary::catalog::critical_catenoid;
use freeboundary::extension::extend;
use freeboundary::geometry::{curvature_report, GeometryOptions};

fn main() -> freeboundary::Result<()> {
    let ext = extend(&critical_catenoid(), 8)?;
    let r = curvature_report(&ext, &GeometryOptions::default())?;
    println!(
        "alpha = {:.15} (spread {:.2e}), sup |beta| = {:.2e}",
        r.hopf.alpha_mean, r.hopf.alpha_spread, r.hopf.beta_max
    );
    println!(
        "K in [{:.3e}, {:.3e}], K identity residual {:.2e}",
        r.k_min, r.k_max, r.k_identity
    );
    let tc = r.total_curvature;
    println!(
        "int K dA = {:.15} + tail {:.2e} = {:.15}",
        tc.value, tc.tail, tc.total
    );
    for e in &r.edges {
        println!(
            "{}: flux {:?}, min geodesic curvature {:.6}",
            e.label,
            e.flux.flux.as_slice(),
            e.convexity.min_geodesic_curvature
        );
    }
    println!("|flux sum| = {:.2e}", r.flux_sum.norm());
    println!(
        "max lap(-log r) = {:.3e}",
        r.superharmonic.lap_neg_log_r_max
    );
    Ok(())
}
