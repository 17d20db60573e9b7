//! Differential-geometric diagnostics: fundamental forms, Hopf quantities,
//! curvature integrals, flux, boundary convexity, Gauss map sampling and
//! the `r²`, `-log r` Laplacian checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{AnalyticSurface, EdgeLabel, EdgePosition, SurfaceMap};
use crate::error::{Error, Result};
use crate::extension::{ExtendedSurface, PlaneModel};
use crate::jet::{Jet, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    /// metric factor, `ds² = Λ (du² + dv²)`
    pub lambda: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub h_mean: f64,
    pub k: f64,
    pub normal: Vec3,
    /// relative residual of the Gauss formulas for a conformal chart
    pub gauss_residual: f64,
}

/// Forms of a conformal chart from its jet.
pub fn forms_from_jet(j: &Jet) -> Result<FundamentalForms> {
    let lambda = 0.5 * (j.du.norm_squared() + j.dv.norm_squared());
    let cross = j.du.cross(&j.dv);
    let area = cross.norm();
    if !(area > 1e-14 * lambda) || lambda == 0.0 {
        return Err(Error::Degenerate {
            x: f64::NAN,
            y: f64::NAN,
            speed: lambda.sqrt(),
        });
    }
    let normal = cross / area;
    let (l, m, n) = (j.duu.dot(&normal), j.duv.dot(&normal), j.dvv.dot(&normal));
    let lu = j.du.dot(&j.duu) + j.dv.dot(&j.duv);
    let lv = j.du.dot(&j.duv) + j.dv.dot(&j.dvv);
    let k2 = 0.5 / lambda;
    let r_uu = j.duu - (j.du * lu - j.dv * lv) * k2 - normal * l;
    let r_uv = j.duv - (j.du * lv + j.dv * lu) * k2 - normal * m;
    let r_vv = j.dvv - (-j.du * lu + j.dv * lv) * k2 - normal * n;
    let size = j.duu.norm().max(j.duv.norm()).max(j.dvv.norm()).max(1e-300);
    let gauss_residual = r_uu.norm().max(r_uv.norm()).max(r_vv.norm()) / size;
    Ok(FundamentalForms {
        lambda,
        l,
        m,
        n,
        h_mean: (l + n) / (2.0 * lambda),
        k: (l * n - m * m) / (lambda * lambda),
        normal,
        gauss_residual,
    })
}

pub fn fundamental_forms(map: &dyn SurfaceMap, x: f64, y: f64) -> Result<FundamentalForms> {
    forms_from_jet(&map.jet(x, y)?).map_err(|e| match e {
        Error::Degenerate { speed, .. } => Error::Degenerate { x, y, speed },
        other => other,
    })
}

/// Jet from centered differences of positions only, Richardson
/// extrapolated from steps `h` and `h/2`.
pub fn fd_jet(map: &dyn SurfaceMap, x: f64, y: f64, h: f64) -> Result<Jet> {
    let p = |dx: f64, dy: f64| -> Result<Vec3> { Ok(map.jet(x + dx, y + dy)?.pos) };
    let raw = |h: f64| -> Result<[Vec3; 5]> {
        let c = p(0.0, 0.0)?;
        let (xp, xm, yp, ym) = (p(h, 0.0)?, p(-h, 0.0)?, p(0.0, h)?, p(0.0, -h)?);
        let (pp, pm, mp, mm) = (p(h, h)?, p(h, -h)?, p(-h, h)?, p(-h, -h)?);
        Ok([
            (xp - xm) / (2.0 * h),
            (yp - ym) / (2.0 * h),
            (xp - c * 2.0 + xm) / (h * h),
            (pp - pm - mp + mm) / (4.0 * h * h),
            (yp - c * 2.0 + ym) / (h * h),
        ])
    };
    let a = raw(h)?;
    let b = raw(0.5 * h)?;
    let r = |k: usize| (b[k] * 4.0 - a[k]) / 3.0;
    Ok(Jet {
        pos: p(0.0, 0.0)?,
        du: r(0),
        dv: r(1),
        duu: r(2),
        duv: r(3),
        dvv: r(4),
    })
}

/// `w² f(w)` with `f = (ℒ - 𝒩)/2 - iℳ` in the plane coordinates.
pub fn hopf_field(plane: &PlaneModel, w: Complex64) -> Result<Complex64> {
    let f = forms_from_jet(&plane.jet_w(w)?)?;
    Ok(w * w * Complex64::new(0.5 * (f.l - f.n), -f.m))
}

/// `(α, β) = (Re, Im) w² f(w)`.
pub fn hopf_quantities(plane: &PlaneModel, w: Complex64) -> Result<(f64, f64)> {
    let v = hopf_field(plane, w)?;
    Ok((v.re, v.im))
}

/// `|∂_w̄ (w² f)|` by centered differences with step `h·|w|`, relative to
/// `|w| (|ℒ| + |𝒩| + 2|ℳ|)`.
pub fn hopf_holomorphy_residual(plane: &PlaneModel, w: Complex64, h: f64) -> Result<f64> {
    let d = h * w.norm();
    let fx = (hopf_field(plane, w + d)? - hopf_field(plane, w - d)?) / (2.0 * d);
    let iy = Complex64::new(0.0, d);
    let fy = (hopf_field(plane, w + iy)? - hopf_field(plane, w - iy)?) / (2.0 * d);
    let dbar = 0.5 * (fx + Complex64::i() * fy);
    let f = forms_from_jet(&plane.jet_w(w)?)?;
    let size = w.norm() * (f.l.abs() + f.n.abs() + 2.0 * f.m.abs());
    Ok(if size > 0.0 {
        dbar.norm() / size
    } else {
        dbar.norm()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfSummary {
    pub beta_max: f64,
    pub alpha_mean: f64,
    pub alpha_std: f64,
    /// max `|α - mean| / |mean|`
    pub alpha_spread: f64,
    pub samples: usize,
}

pub fn hopf_scan(plane: &PlaneModel, ws: &[Complex64]) -> Result<HopfSummary> {
    let vals: Vec<(f64, f64)> = ws
        .par_iter()
        .map(|&w| hopf_quantities(plane, w))
        .collect::<Result<Vec<_>>>()?;
    let n = vals.len().max(1) as f64;
    let mean = vals.iter().map(|v| v.0).sum::<f64>() / n;
    let var = vals.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / n;
    let spread = vals.iter().map(|v| (v.0 - mean).abs()).fold(0.0, f64::max);
    Ok(HopfSummary {
        beta_max: vals.iter().map(|v| v.1.abs()).fold(0.0, f64::max),
        alpha_mean: mean,
        alpha_std: var.sqrt(),
        alpha_spread: if mean != 0.0 {
            spread / mean.abs()
        } else {
            spread
        },
        samples: vals.len(),
    })
}

/// Plane points on an `nx × ny` grid of cell centres of the covered strip.
pub fn plane_samples(plane: &PlaneModel, nx: usize, ny: usize) -> Vec<Complex64> {
    let d = plane.surface.domain;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = d.y_lo + d.height() * (j as f64 + 0.5) / ny as f64;
        for i in 0..nx {
            let x = d.period * (i as f64 + 0.37) / nx as f64;
            out.push(plane.w(Complex64::new(x, y)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRelations {
    pub label: EdgeLabel,
    pub radius: f64,
    pub sigma: f64,
    /// `sup |X_ρ - σ√Λ X| / √Λ`
    pub x_rho: f64,
    /// `sup |1/ρ + F_ρ/F - σF| / F`
    pub log_factor: f64,
    /// `sup |β|`
    pub beta: f64,
}

/// Boundary relations on each free-boundary circle of the plane model.
/// `σ = -1` where `ρ` increases into the surface, `+1` where it
/// decreases, flipped for surfaces outside the sphere.
pub fn boundary_curvature_relations(
    plane: &PlaneModel,
    samples: usize,
) -> Result<Vec<BoundaryRelations>> {
    let mut out = Vec::new();
    for e in &plane.surface.edges {
        let sigma = match e.position {
            EdgePosition::Lower => -1.0,
            EdgePosition::Upper => 1.0,
        } * e.side.sign();
        let rho = plane.radius_of(e.y);
        let (mut x_rho, mut log_factor, mut beta) = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / samples as f64;
            let w = Complex64::from_polar(rho, theta);
            let j = plane.jet_w(w)?;
            let (c, s) = (theta.cos(), theta.sin());
            let lambda = 0.5 * (j.du.norm_squared() + j.dv.norm_squared());
            let f = lambda.sqrt();
            let xr = j.du * c + j.dv * s;
            x_rho = x_rho.max((xr - j.pos * (sigma * f)).norm() / f);
            let lu = j.du.dot(&j.duu) + j.dv.dot(&j.duv);
            let lv = j.du.dot(&j.duv) + j.dv.dot(&j.dvv);
            let lr = lu * c + lv * s;
            log_factor = log_factor.max((1.0 / rho + lr / (2.0 * lambda) - sigma * f).abs() / f);
            beta = beta.max(hopf_quantities(plane, w)?.1.abs());
        }
        out.push(BoundaryRelations {
            label: e.label,
            radius: rho,
            sigma,
            x_rho,
            log_factor,
            beta,
        });
    }
    Ok(out)
}

/// `sup |K - (-|c|²/(|w|⁴ Λ²))| / |K|` over the sample points.
pub fn gaussian_curvature_identity(
    plane: &PlaneModel,
    ws: &[Complex64],
    c: Complex64,
) -> Result<f64> {
    let res: Vec<f64> = ws
        .par_iter()
        .map(|&w| -> Result<f64> {
            let f = forms_from_jet(&plane.jet_w(w)?)?;
            let predicted = -c.norm_sqr() / (w.norm_sqr().powi(2) * f.lambda * f.lambda);
            let d = (f.k - predicted).abs();
            Ok(if f.k != 0.0 { d / f.k.abs() } else { d })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_27),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_361_98),
    (0.183_434_642_495_649_8, 0.362_683_783_378_361_98),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_27),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// `∫ f dx` over one period at fixed `y`, periodic trapezoid rule.
pub fn row_integral(
    map: &dyn SurfaceMap,
    period: f64,
    y: f64,
    nx: usize,
    f: &(dyn Fn(&Jet) -> f64 + Sync),
) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..nx {
        let x = period * i as f64 / nx as f64;
        s += f(&map.jet(x, y)?);
    }
    Ok(s * period / nx as f64)
}

/// `∫∫ f dx dy` over `[0, L) × (y0, y1)`: periodic trapezoid in `x`,
/// composite 8-point Gauss–Legendre in `y` on panels of width ≤ 1/4.
pub fn integrate_rows(
    map: &dyn SurfaceMap,
    period: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    f: &(dyn Fn(&Jet) -> f64 + Sync),
) -> Result<f64> {
    if y1 <= y0 {
        return Ok(0.0);
    }
    let panels = ((y1 - y0) / 0.25).ceil().max(1.0) as usize;
    let h = (y1 - y0) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|p| -> Result<f64> {
            let a = y0 + p as f64 * h;
            let mut s = 0.0;
            for &(t, wt) in &GL8 {
                let y = a + 0.5 * h * (t + 1.0);
                s += wt * row_integral(map, period, y, nx, f)?;
            }
            Ok(0.5 * h * s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.iter().sum())
}

fn curvature_density(j: &Jet) -> f64 {
    forms_from_jet(j).map(|f| f.k * f.lambda).unwrap_or(0.0)
}

/// `∫ K dA` over a surface's strip.
pub fn surface_total_curvature(surface: &AnalyticSurface, nx: usize) -> Result<f64> {
    let d = surface.domain;
    integrate_rows(
        surface.map.as_ref(),
        d.period,
        d.y_lo,
        d.y_hi,
        nx,
        &curvature_density,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalCurvature {
    /// quadrature over the covered strip
    pub value: f64,
    /// estimated contribution beyond both ends
    pub tail: f64,
    pub total: f64,
    /// relative misfit of the tail model at a fourth row
    pub fit_residual: f64,
}

/// Tail of a row profile `I(s) = A sech²(b (s - s_c))` sampled at
/// `s = 0, δ, 2δ, 3δ` inward from an end: the integral over `s < 0` and
/// the relative misfit at the fourth row.
fn sech2_tail(rows: [f64; 4], delta: f64) -> Option<(f64, f64)> {
    let sign = rows[0].signum();
    if rows.iter().any(|r| *r == 0.0 || r.signum() != sign) {
        return None;
    }
    let g: Vec<f64> = rows.iter().map(|r| 1.0 / r.abs().sqrt()).collect();
    let ch = (g[0] + g[2]) / (2.0 * g[1]);
    if !(ch > 1.0) {
        return None;
    }
    let bd = ch.acosh();
    let b = bd / delta;
    // tanh of b (0 - s_c)
    let th = (g[1] / g[0] - ch) / bd.sinh();
    if !(th.abs() < 1.0) {
        return None;
    }
    let u = th.atanh();
    let amp = (u.cosh() / g[0]).powi(2);
    let tail = sign * amp / b * (1.0 + th);
    let predicted = sign * amp / (u + 3.0 * bd).cosh().powi(2);
    Some((tail, ((predicted - rows[3]) / rows[3]).abs()))
}

/// `∫ K dA` of the extension, integrated piece by piece, plus a
/// catenoid-type `sech²` estimate of what lies beyond the covered strip.
pub fn total_curvature(ext: &ExtendedSurface, nx: usize) -> Result<TotalCurvature> {
    let surf = ext.as_surface();
    let map = surf.map.as_ref();
    let period = ext.period();
    let mut bands: Vec<(f64, f64)> = ext.pieces().into_iter().map(|p| p.1).collect();
    bands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut value = 0.0;
    for (lo, hi) in bands {
        value += integrate_rows(map, period, lo, hi, nx, &curvature_density)?;
    }
    let (y_lo, y_hi) = ext.y_range();
    let delta = 0.25 * ext.height();
    let mut tail = 0.0;
    let mut fit_residual = 0.0f64;
    for (end, dir) in [(y_lo, 1.0), (y_hi, -1.0)] {
        let mut rows = [0.0; 4];
        for (k, r) in rows.iter_mut().enumerate() {
            *r = row_integral(
                map,
                period,
                end + dir * delta * k as f64,
                nx,
                &curvature_density,
            )?;
        }
        if let Some((t, res)) = sech2_tail(rows, delta) {
            tail += t;
            fit_residual = fit_residual.max(res);
        }
    }
    Ok(TotalCurvature {
        value,
        tail,
        total: value + tail,
        fit_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    /// `∫ ∂Ψ/∂ν ds` with the outward conormal
    pub flux: Vec3,
    /// `±∫ Ψ ds`, signed by the side of the sphere; equal to the flux
    /// along a free boundary
    pub position_integral: Vec3,
}

pub fn flux(surface: &AnalyticSurface, edge: EdgeLabel, samples: usize) -> Result<FluxReport> {
    if samples < 64 {
        return Err(Error::InvalidInput(format!(
            "flux needs at least 64 samples, got {samples}"
        )));
    }
    let e = surface.edge(edge)?;
    let chart = surface.chart(&e);
    let period = surface.domain.period;
    let (mut fl, mut pos) = (Vec3::zeros(), Vec3::zeros());
    for k in 0..samples {
        let x = period * k as f64 / samples as f64;
        let j = chart.chart_jet(surface.map.as_ref(), x, 0.0)?;
        fl -= j.dv;
        pos += j.pos * j.du.norm();
    }
    let h = period / samples as f64;
    Ok(FluxReport {
        flux: fl * h,
        position_integral: pos * (h * e.side.sign()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub min_geodesic_curvature: f64,
    pub max_geodesic_curvature: f64,
    /// `min σ κ_g` with `σ` the sign of the mean; positive means strictly
    /// convex on the sphere
    pub indicator: f64,
}

/// Geodesic curvature `(γ' × γ'')·γ / |γ'|³` of a boundary curve on the
/// unit sphere.
pub fn boundary_convexity(
    surface: &AnalyticSurface,
    edge: EdgeLabel,
    samples: usize,
) -> Result<ConvexityReport> {
    let e = surface.edge(edge)?;
    let chart = surface.chart(&e);
    let period = surface.domain.period;
    let mut kg = Vec::with_capacity(samples);
    for k in 0..samples {
        let x = period * k as f64 / samples as f64;
        let j = chart.chart_jet(surface.map.as_ref(), x, 0.0)?;
        kg.push(j.du.cross(&j.duu).dot(&j.pos) / j.du.norm().powi(3));
    }
    let mean = kg.iter().sum::<f64>() / kg.len().max(1) as f64;
    let sigma = if mean < 0.0 { -1.0 } else { 1.0 };
    Ok(ConvexityReport {
        min_geodesic_curvature: kg.iter().copied().fold(f64::INFINITY, f64::min),
        max_geodesic_curvature: kg.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        indicator: kg.iter().map(|v| sigma * v).fold(f64::INFINITY, f64::min),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussSample {
    pub x: f64,
    pub y: f64,
    pub normal: Vec3,
}

/// Unit normals at the cell centres of an `nx × ny` grid.
pub fn gauss_map_samples(
    surface: &AnalyticSurface,
    nx: usize,
    ny: usize,
) -> Result<Vec<GaussSample>> {
    let d = surface.domain;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = d.y_lo + d.height() * (j as f64 + 0.5) / ny as f64;
        for i in 0..nx {
            let x = d.period * (i as f64 + 0.5) / nx as f64;
            let f = fundamental_forms(surface.map.as_ref(), x, y)?;
            out.push(GaussSample {
                x,
                y,
                normal: f.normal,
            });
        }
    }
    Ok(out)
}

/// Smallest angle between normals at distinct sample points.
pub fn injectivity_scan(samples: &[GaussSample]) -> f64 {
    (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let a = &samples[i];
            let mut best = f64::INFINITY;
            for b in &samples[i + 1..] {
                if (a.x - b.x).abs() + (a.y - b.y).abs() < 1e-12 {
                    continue;
                }
                let chord = (a.normal - b.normal).norm();
                best = best.min(2.0 * (0.5 * chord).min(1.0).asin());
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperharmonicReport {
    pub samples: usize,
    /// `sup |Δr² - 4|`
    pub lap_r2: f64,
    /// `sup Δ(-log r)`; superharmonic means `≤ 0`
    pub lap_neg_log_r_max: f64,
    pub lap_neg_log_r_min: f64,
    /// `sup |Δr²(exact) - Δr²(finite differences)|`
    pub fd_discrepancy: f64,
    /// `sup |k|` on the free boundary, `k = -log r`
    pub boundary_k: f64,
    /// `sup |∂k/∂ν - 1|` with the conormal pointing into the surface
    pub boundary_dk: f64,
}

fn laplacians(j: &Jet) -> (f64, f64) {
    let lambda = 0.5 * (j.du.norm_squared() + j.dv.norm_squared());
    let u = j.pos.norm_squared();
    let ux = 2.0 * j.pos.dot(&j.du);
    let uy = 2.0 * j.pos.dot(&j.dv);
    let lap_u =
        2.0 * (j.du.norm_squared() + j.dv.norm_squared()) + 2.0 * j.pos.dot(&(j.duu + j.dvv));
    let lap_log_r = 0.5 * (lap_u / u - (ux * ux + uy * uy) / (u * u));
    (lap_u / lambda, -lap_log_r / lambda)
}

fn fd_laplacian(
    map: &dyn SurfaceMap,
    x: f64,
    y: f64,
    h: f64,
    f: impl Fn(&Vec3) -> f64,
) -> Result<f64> {
    let v = |dx: f64, dy: f64| -> Result<f64> { Ok(f(&map.jet(x + dx, y + dy)?.pos)) };
    let c = v(0.0, 0.0)?;
    let l = |h: f64| -> Result<f64> {
        Ok((v(h, 0.0)? + v(-h, 0.0)? + v(0.0, h)? + v(0.0, -h)? - 4.0 * c) / (h * h))
    };
    Ok((4.0 * l(0.5 * h)? - l(h)?) / 3.0)
}

/// Laplace–Beltrami checks of `r²` and `-log r` at `samples` random
/// interior points, and boundary data of `-log r` on each free boundary.
pub fn superharmonic_checks(
    surface: &AnalyticSurface,
    samples: usize,
    seed: u64,
) -> Result<SuperharmonicReport> {
    let d = surface.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|_| (rng.gen_range(0.0..d.period), rng.gen_range(d.y_lo..d.y_hi)))
        .collect();
    let map = surface.map.as_ref();
    let vals: Vec<(f64, f64, f64)> = pts
        .par_iter()
        .map(|&(x, y)| -> Result<(f64, f64, f64)> {
            let j = map.jet(x, y)?;
            let (lr2, lnl) = laplacians(&j);
            let fd = fd_laplacian(map, x, y, 1e-2, |p| p.norm_squared())?;
            let lambda = 0.5 * (j.du.norm_squared() + j.dv.norm_squared());
            Ok((lr2, lnl, (fd / lambda - lr2).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = SuperharmonicReport {
        samples,
        lap_r2: 0.0,
        lap_neg_log_r_max: f64::NEG_INFINITY,
        lap_neg_log_r_min: f64::INFINITY,
        fd_discrepancy: 0.0,
        boundary_k: 0.0,
        boundary_dk: 0.0,
    };
    for (lr2, lnl, fd) in vals {
        rep.lap_r2 = rep.lap_r2.max((lr2 - 4.0).abs());
        rep.lap_neg_log_r_max = rep.lap_neg_log_r_max.max(lnl);
        rep.lap_neg_log_r_min = rep.lap_neg_log_r_min.min(lnl);
        rep.fd_discrepancy = rep.fd_discrepancy.max(fd);
    }
    for e in &surface.edges {
        let chart = surface.chart(e);
        let target = e.side.sign();
        for k in 0..256 {
            let x = d.period * k as f64 / 256.0;
            let j = chart.chart_jet(map, x, 0.0)?;
            let r2 = j.pos.norm_squared();
            let f = j.du.norm();
            rep.boundary_k = rep.boundary_k.max((0.5 * r2.ln()).abs());
            let dk = -j.pos.dot(&j.dv) / (r2 * f);
            rep.boundary_dk = rep.boundary_dk.max((dk - target).abs());
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckStatus {
    Applied,
    /// `K < 0` fails somewhere, so curvature-line coordinates do not exist
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureLineReport {
    pub status: CheckStatus,
    /// `s²` with the rescaled chart `(s x, s y)`
    pub scale: f64,
    /// `sup |Λ/s² - 1/κ| κ`, `κ = |ℒ|/Λ`
    pub first_form: f64,
    /// `sup (|ℒ/s² ∓ 1|, |𝒩/s² ± 1|)`
    pub second_form: f64,
    /// `sup |ℳ| / max(|ℒ|, |𝒩|)`
    pub diagonalization: f64,
}

/// Checks that the chart, rescaled by `s = sqrt(mean |ℒ|)`, is a
/// curvature-line chart with `I = (1/κ)(dx² + dy²)` and
/// `II = ±(dx² - dy²)`.
pub fn curvature_line_forms_check(
    surface: &AnalyticSurface,
    nx: usize,
    ny: usize,
) -> Result<CurvatureLineReport> {
    let d = surface.domain;
    let mut forms = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = d.y_lo + d.height() * (j as f64 + 0.5) / ny as f64;
        for i in 0..nx {
            let x = d.period * (i as f64 + 0.5) / nx as f64;
            forms.push(fundamental_forms(surface.map.as_ref(), x, y)?);
        }
    }
    let diagonalization = forms
        .iter()
        .map(|f| f.m.abs() / f.l.abs().max(f.n.abs()).max(1e-300))
        .fold(0.0, f64::max);
    if forms.iter().any(|f| !(f.k < 0.0)) {
        return Ok(CurvatureLineReport {
            status: CheckStatus::Skipped,
            scale: 0.0,
            first_form: f64::NAN,
            second_form: f64::NAN,
            diagonalization,
        });
    }
    let scale = forms.iter().map(|f| f.l.abs()).sum::<f64>() / forms.len() as f64;
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for f in &forms {
        let kappa = f.l.abs() / f.lambda;
        first = first.max((f.lambda / scale - 1.0 / kappa).abs() * kappa);
        let e = f.l.signum();
        second = second
            .max((f.l / scale - e).abs())
            .max((f.n / scale + e).abs());
    }
    Ok(CurvatureLineReport {
        status: CheckStatus::Applied,
        scale,
        first_form: first,
        second_form: second,
        diagonalization,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GeometryOptions {
    /// grid used for curvature sampling, Gauss map and quadrature rows
    pub nx: usize,
    pub ny: usize,
    /// random points for the Laplacian checks
    pub samples: usize,
    pub seed: u64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            nx: 32,
            ny: 64,
            samples: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGeometry {
    pub label: EdgeLabel,
    pub steklov: f64,
    pub flux: FluxReport,
    pub convexity: ConvexityReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub hopf: HopfSummary,
    pub hopf_holomorphy: f64,
    pub k_max: f64,
    pub k_min: f64,
    pub h_mean_max: f64,
    pub gauss_residual_max: f64,
    pub k_identity: f64,
    pub boundary: Vec<BoundaryRelations>,
    pub total_curvature: TotalCurvature,
    pub edges: Vec<EdgeGeometry>,
    pub flux_sum: Vec3,
    /// largest patch residuals over all reflection steps
    pub schwarz_max: f64,
    pub conformality_max: f64,
    pub seam_value_max: f64,
    pub seam_derivative_max: f64,
    pub superharmonic: SuperharmonicReport,
    pub curvature_lines: CurvatureLineReport,
    pub gauss_map_min_angle: f64,
}

/// All geometric checks for an extension, with the free-boundary data
/// taken from the original surface.
pub fn curvature_report(ext: &ExtendedSurface, opts: &GeometryOptions) -> Result<CurvatureReport> {
    let view = ext.as_surface();
    let plane = crate::extension::to_punctured_plane(ext);
    let ws = plane_samples(&plane, opts.nx, opts.ny);
    let hopf = hopf_scan(&plane, &ws)?;
    let hopf_holomorphy = ws
        .iter()
        .step_by((ws.len() / 16).max(1))
        .map(|&w| hopf_holomorphy_residual(&plane, w, 1e-4))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let d = view.domain;
    let mut forms = Vec::with_capacity(opts.nx * opts.ny);
    for j in 0..opts.ny {
        let y = d.y_lo + d.height() * (j as f64 + 0.5) / opts.ny as f64;
        for i in 0..opts.nx {
            let x = d.period * (i as f64 + 0.37) / opts.nx as f64;
            forms.push(fundamental_forms(view.map.as_ref(), x, y)?);
        }
    }
    let k_identity =
        gaussian_curvature_identity(&plane, &ws, Complex64::new(hopf.alpha_mean, 0.0))?;
    let mut edges = Vec::new();
    let mut flux_sum = Vec3::zeros();
    for e in &ext.original.edges {
        let st = crate::reflection::steklov_residual(&ext.original, e.label, 256)?;
        let fl = flux(&ext.original, e.label, 256)?;
        flux_sum += fl.flux;
        edges.push(EdgeGeometry {
            label: e.label,
            steklov: st.max,
            flux: fl,
            convexity: boundary_convexity(&ext.original, e.label, 256)?,
        });
    }
    let pr = |f: fn(&crate::reflection::PatchResiduals) -> f64| {
        ext.patches
            .iter()
            .map(|p| f(&p.patch.residuals))
            .fold(0.0, f64::max)
    };
    Ok(CurvatureReport {
        hopf,
        hopf_holomorphy,
        k_max: forms.iter().map(|f| f.k).fold(f64::NEG_INFINITY, f64::max),
        k_min: forms.iter().map(|f| f.k).fold(f64::INFINITY, f64::min),
        h_mean_max: forms.iter().map(|f| f.h_mean.abs()).fold(0.0, f64::max),
        gauss_residual_max: forms.iter().map(|f| f.gauss_residual).fold(0.0, f64::max),
        k_identity,
        boundary: boundary_curvature_relations(&plane, 256)?,
        total_curvature: total_curvature(ext, opts.nx)?,
        edges,
        flux_sum,
        schwarz_max: pr(|r| r.schwarz),
        conformality_max: pr(|r| r.conformality),
        seam_value_max: pr(|r| r.seam_value),
        seam_derivative_max: pr(|r| r.seam_derivative),
        superharmonic: superharmonic_checks(&ext.original, opts.samples, opts.seed)?,
        curvature_lines: curvature_line_forms_check(&view, opts.nx, opts.ny)?,
        gauss_map_min_angle: injectivity_scan(&gauss_map_samples(&view, opts.nx, opts.ny)?),
    })
}
