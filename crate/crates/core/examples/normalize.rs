//! Isothermal normalization along a free boundary: after the change of
//! coordinates the conformal factor is 1 on the axis.

use freeboundary::catalog::{critical_catenoid, perturbed_plane, EdgeLabel};
use freeboundary::isothermal::{boundary_conformal_factor, normalize_default, push_forward};

fn main() -> freeboundary::Result<()> {
    for (name, surface) in [
        ("critical catenoid", critical_catenoid()),
        ("perturbed plane", perturbed_plane(0.1)),
    ] {
        let f = boundary_conformal_factor(&surface, EdgeLabel::Gamma1, 16)?;
        let m = normalize_default(&surface, EdgeLabel::Gamma1)?;
        let pf = push_forward(&surface, &m)?;
        let worst = (0..128)
            .map(|k| m.p * k as f64 / 128.0)
            .map(|x| pf.jet(x, 0.0).map(|j| (j.du.norm() - 1.0).abs()))
            .collect::<freeboundary::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!(
            "{name}: F(0) = {:.12}, period {:.12} -> {:.12}, max |F_H - 1| = {worst:.2e}",
            f.eval(0.0),
            surface.domain.period,
            m.p
        );
    }
    Ok(())
}
