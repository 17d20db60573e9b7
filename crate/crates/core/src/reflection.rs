//! Reflection of a free boundary minimal surface across the unit sphere.
//!
//! Along a free boundary in normalized coordinates the Steklov identity
//! `ψ = ∂ψ/∂ν` becomes `Im(iΦ - sΦ') = 0` on the real axis, where `Φ` is
//! the holomorphic completion of a coordinate function and `s = ±1`
//! selects the conormal. The field `Λ = iΦ - sΦ'` then extends across the
//! axis by `Λ(Z̄) = conj Λ(Z)`, and solving `iΦ - sΦ' = Λ` on the mirror
//! side continues `Φ` there.

use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::{
    AnalyticSurface, Edge, EdgeChart, EdgeLabel, EdgePosition, Side, StripDomain, SurfaceMap,
};
use crate::error::{Error, Result, Stage};
use crate::harmonic_series::{
    fourier_analyze, solve_cauchy, CauchyData, HarmonicStripFunction, DEFAULT_MODES, DEFAULT_PRUNE,
};
use crate::holomorphic::{ExpMode, HolomorphicModel};
use crate::isothermal::{normalize_edge, NormalizationMap};
use crate::jet::{Jet, Vec3};

const RESONANCE_TOL: f64 = 1e-9;

/// Residual of `Ψ = ∂Ψ/∂ν` along an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteklovReport {
    pub max: f64,
    pub mean: f64,
    /// max `||Ψ| - 1|` over the same samples
    pub sphere: f64,
    /// chart abscissa of the largest residual
    pub worst_x: f64,
}

/// Steklov residual without the unit-sphere precondition.
pub fn steklov_residual(
    surface: &AnalyticSurface,
    edge: EdgeLabel,
    samples: usize,
) -> Result<SteklovReport> {
    let e = surface.edge(edge)?;
    let chart = surface.chart(&e);
    let s = e.side.sign();
    let period = surface.domain.period;
    let (mut max, mut sum, mut sphere, mut worst_x) = (0.0f64, 0.0, 0.0f64, 0.0);
    for k in 0..samples {
        let x = period * k as f64 / samples as f64;
        let j = chart.chart_jet(surface.map.as_ref(), x, 0.0)?;
        let f = j.du.norm();
        if !(f > 1e-12) {
            return Err(Error::Degenerate {
                x,
                y: 0.0,
                speed: f,
            });
        }
        let conormal = -j.dv * (s / f);
        let r = (j.pos - conormal).norm();
        if r > max {
            max = r;
            worst_x = x;
        }
        sum += r;
        sphere = sphere.max((j.pos.norm() - 1.0).abs());
    }
    Ok(SteklovReport {
        max,
        mean: sum / samples as f64,
        sphere,
        worst_x,
    })
}

/// Steklov residual on 256 edge samples, after checking that the edge
/// lies on the unit sphere to `1e-8`.
pub fn verify_steklov(surface: &AnalyticSurface, edge: EdgeLabel) -> Result<SteklovReport> {
    let r = steklov_residual(surface, edge, 256)?;
    if r.sphere > 1e-8 {
        let period = surface.domain.period;
        let e = surface.edge(edge)?;
        let chart = surface.chart(&e);
        let mut worst = (0.0, 0.0);
        for k in 0..256 {
            let x = period * k as f64 / 256.0;
            let d = (chart.chart_jet(surface.map.as_ref(), x, 0.0)?.pos.norm() - 1.0).abs();
            if d > worst.0 {
                worst = (d, x);
            }
        }
        return Err(Error::NotOnSphere {
            residual: r.sphere,
            x: worst.1,
        });
    }
    Ok(r)
}

/// Holomorphic `Φ` with `Re Φ = φ` and `Im Φ(i·y0) = 0`, `y0` the axis
/// of `φ`.
pub fn holomorphic_completion(phi: &HarmonicStripFunction) -> HolomorphicModel {
    let m = HolomorphicModel::from_harmonic(phi);
    let v = m
        .eval(Complex64::new(0.0, phi.axis()))
        .expect("the axis is inside the guard");
    m.add_constant(Complex64::new(0.0, -v.im))
}

/// `Λ = iΦ - sΦ'`, `s = side.sign()`.
pub fn lambda_field(phi: &HolomorphicModel, side: Side) -> HolomorphicModel {
    phi.scale(Complex64::i())
        .add(&phi.differentiate().scale(Complex64::new(-side.sign(), 0.0)))
}

/// `sup |Im Λ_j(x)|` over the given axis abscissae.
pub fn verify_schwarz_condition(lambdas: &[HolomorphicModel], xs: &[f64]) -> Result<f64> {
    let mut r = 0.0f64;
    for l in lambdas {
        for &x in xs {
            r = r.max(l.eval(Complex64::new(x, 0.0))?.im.abs());
        }
    }
    Ok(r)
}

/// Extension of `Λ` across the real axis: the symmetric part
/// `(Λ(Z) + conj Λ(Z̄)) / 2`, which coincides with `Λ` when the Schwarz
/// condition holds. Refuses if `sup|Im Λ|` on `xs` exceeds `tol`.
pub fn schwarz_extend(lambda: &HolomorphicModel, xs: &[f64], tol: f64) -> Result<HolomorphicModel> {
    let residual = verify_schwarz_condition(std::slice::from_ref(lambda), xs)?;
    if residual > tol {
        return Err(Error::SchwarzResidual { residual, tol });
    }
    let (lo, hi) = lambda.strip();
    let half = lo.abs().max(hi.abs());
    let ext = lambda
        .add(&lambda.reflected())
        .scale(Complex64::new(0.5, 0.0))
        .with_strip(-half, half);
    let width = xs.last().copied().unwrap_or(1.0).abs().max(1.0);
    for k in 0..8 {
        let z = Complex64::new(width * k as f64 / 8.0, 0.05 + 0.1 * k as f64);
        let (a, b) = match (ext.eval(z), ext.eval(z.conj())) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if (b - a.conj()).norm() > 1e-10 * (1.0 + a.norm()) {
            return Err(Error::SchwarzResidual {
                residual: (b - a.conj()).norm(),
                tol: 1e-10,
            });
        }
    }
    Ok(ext)
}

fn is_commensurate(period: f64) -> bool {
    let q = period / (2.0 * std::f64::consts::PI);
    q.round() >= 1.0 && (q - q.round()).abs() <= 1e-9 * q
}

/// Solve `iΦ - sΦ' = Λ` mode by mode and fix the homogeneous part
/// `C e^{isZ}` by least squares against the axis trace `Re Φ(X, 0)`.
/// Returns the solution and the largest trace mismatch.
pub fn solve_reflection_ode(
    lambda: &HolomorphicModel,
    side: Side,
    trace: &[(f64, f64)],
    period: f64,
) -> Result<(HolomorphicModel, f64)> {
    let s = side.sign();
    let i = Complex64::i();
    let scale = lambda
        .modes()
        .iter()
        .map(|m| m.coeff.norm())
        .chain(lambda.poly().iter().map(|c| c.norm()))
        .fold(1e-300, f64::max);

    let mut modes = Vec::new();
    let mut secular = Vec::new();
    for m in lambda.modes() {
        if (m.omega - s).abs() <= RESONANCE_TOL {
            if m.coeff.norm() <= 1e-13 * scale {
                continue;
            }
            // Z e^{isZ} solves iΦ - sΦ' = -s e^{isZ}.
            secular.push(ExpMode {
                omega: s,
                coeff: -s * m.coeff,
            });
        } else {
            modes.push(ExpMode {
                omega: m.omega,
                coeff: m.coeff / (i * (1.0 - s * m.omega)),
            });
        }
    }
    for m in lambda.secular() {
        if (m.omega - s).abs() <= RESONANCE_TOL {
            return Err(Error::Resonance {
                omega: m.omega,
                reason: "secular forcing at the resonant frequency".into(),
            });
        }
        let d = i * (1.0 - s * m.omega);
        let alpha = m.coeff / d;
        secular.push(ExpMode {
            omega: m.omega,
            coeff: alpha,
        });
        modes.push(ExpMode {
            omega: m.omega,
            coeff: s * alpha / d,
        });
    }
    let q = lambda.poly();
    let mut p = vec![Complex64::default(); q.len()];
    for k in (0..q.len()).rev() {
        let next = if k + 1 < q.len() {
            s * (k + 1) as f64 * p[k + 1]
        } else {
            Complex64::default()
        };
        p[k] = -i * (q[k] + next);
    }
    let mut phi = HolomorphicModel::new(modes, secular, p)
        .with_period(Some(period))
        .with_guard(lambda.guard());
    let (lo, hi) = lambda.strip();
    phi = phi.with_strip(lo, hi);

    if is_commensurate(period) && !trace.is_empty() {
        // Re(C e^{isX}) = u cos(sX) - v sin(sX)
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, target) in trace {
            let r = target - phi.eval(Complex64::new(x, 0.0))?.re;
            let (c, sn) = ((s * x).cos(), -(s * x).sin());
            a11 += c * c;
            a12 += c * sn;
            a22 += sn * sn;
            b1 += c * r;
            b2 += sn * r;
        }
        let det = a11 * a22 - a12 * a12;
        if det.abs() > 1e-12 * (a11 * a22).max(1e-300) {
            let u = (a22 * b1 - a12 * b2) / det;
            let v = (a11 * b2 - a12 * b1) / det;
            phi = phi.add(&HolomorphicModel::exp(s, Complex64::new(u, v)));
        }
    }
    let mut mismatch = 0.0f64;
    for &(x, target) in trace {
        mismatch = mismatch.max((phi.eval(Complex64::new(x, 0.0))?.re - target).abs());
    }
    Ok((phi, mismatch))
}

/// Fixed-step RK4 integration of `dΦ/dZ = s(iΦ - Λ)` along the segment
/// from `z0` (where `Φ = phi0`) to `z1`.
pub fn rk4_path(
    lambda: &HolomorphicModel,
    side: Side,
    z0: Complex64,
    phi0: Complex64,
    z1: Complex64,
    steps: usize,
) -> Result<Complex64> {
    let s = side.sign();
    let i = Complex64::i();
    let dz = (z1 - z0) / steps as f64;
    let rhs = |z: Complex64, p: Complex64| -> Result<Complex64> {
        Ok(s * (i * p - lambda.eval(z)?) * dz)
    };
    let mut phi = phi0;
    for k in 0..steps {
        let z = z0 + dz * k as f64;
        let k1 = rhs(z, phi)?;
        let k2 = rhs(z + 0.5 * dz, phi + 0.5 * k1)?;
        let k3 = rhs(z + 0.5 * dz, phi + 0.5 * k2)?;
        let k4 = rhs(z + dz, phi + k3)?;
        phi += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    Ok(phi)
}

#[derive(Debug, Clone, Copy)]
pub struct ReflectOptions {
    /// Fourier modes used for the normalized axis data.
    pub modes: usize,
    pub steklov_tol: f64,
    /// relative to the size of the axis data
    pub schwarz_tol: f64,
    /// relative to the size of the axis data
    pub match_tol: f64,
    /// Width of the mirror band in source `y`; defaults to the strip height.
    pub width: Option<f64>,
}

impl Default for ReflectOptions {
    fn default() -> Self {
        ReflectOptions {
            modes: DEFAULT_MODES,
            steklov_tol: 1e-8,
            schwarz_tol: 1e-8,
            match_tol: 1e-8,
            width: None,
        }
    }
}

/// Residuals measured while building a patch. All but `steklov` are
/// relative to the size of the data they compare.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PatchResiduals {
    pub steklov: f64,
    pub schwarz: f64,
    pub axis_match: f64,
    pub ode: f64,
    pub conformality: f64,
    pub seam_value: f64,
    pub seam_derivative: f64,
}

/// The spherical mirror image of a surface across one free boundary,
/// evaluated in the source surface's coordinates.
#[derive(Debug, Clone)]
pub struct ReflectedPatch {
    /// `Φ*_j` in normalized coordinates.
    pub models: [HolomorphicModel; 3],
    /// Completions `Φ_j` of the source data.
    pub source_models: [HolomorphicModel; 3],
    /// Extended reflection fields.
    pub lambdas: [HolomorphicModel; 3],
    pub normalization: NormalizationMap,
    pub edge: Edge,
    pub source_name: String,
    /// Source `y` range of the mirror band.
    pub y_range: (f64, f64),
    pub period: f64,
    pub residuals: PatchResiduals,
}

impl ReflectedPatch {
    pub fn chart(&self) -> EdgeChart {
        self.normalization.chart
    }

    /// `Z = H(z')` with `dZ/dz` and `d²Z/dz²` at a source point.
    pub fn normalized_point(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let chart = self.chart();
        let (h, h1, h2) = self.normalization.eval3(chart.to_chart(z))?;
        Ok((h, h1 * chart.orientation(), h2))
    }

    /// Jet of a triple of holomorphic models composed with `z -> Z`.
    fn composed_jet(&self, models: &[HolomorphicModel; 3], x: f64, y: f64) -> Result<Jet> {
        let (zz, g1, g2) = self.normalized_point(Complex64::new(x, y))?;
        let mut v = [Complex64::default(); 3];
        let mut d1 = v;
        let mut d2 = v;
        for (k, m) in models.iter().enumerate() {
            let (a, b, c) = m.eval3(zz)?;
            v[k] = a;
            d1[k] = b * g1;
            d2[k] = c * g1 * g1 + b * g2;
        }
        Ok(Jet::from_holomorphic(v, d1, d2))
    }

    /// Jet of the source surface as rebuilt from its axis data; used to
    /// cross-check the patch on the source side.
    pub fn source_jet(&self, x: f64, y: f64) -> Result<Jet> {
        self.composed_jet(&self.source_models, x, y)
    }

    /// The edge as seen from the patch: opposite strip side and opposite
    /// side of the sphere.
    pub fn patch_edge(&self) -> Edge {
        Edge {
            label: self.edge.label,
            position: match self.edge.position {
                EdgePosition::Lower => EdgePosition::Upper,
                EdgePosition::Upper => EdgePosition::Lower,
            },
            side: self.edge.side.flipped(),
            y: self.edge.y,
        }
    }

    pub fn as_surface(&self) -> AnalyticSurface {
        AnalyticSurface {
            map: Arc::new(self.clone()),
            domain: StripDomain {
                y_lo: self.y_range.0,
                y_hi: self.y_range.1,
                period: self.period,
            },
            edges: vec![self.patch_edge()],
            name: format!("{}*{}", self.source_name, self.edge.label),
            params: vec![],
        }
    }
}

impl SurfaceMap for ReflectedPatch {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        self.composed_jet(&self.models, x, y)
    }
}

/// Normalized axis data at an edge: node abscissae `X_k`, traces
/// `ψ(X_k, 0)` and normal derivatives `ψ_Y(X_k, 0)`.
struct AxisData {
    xs: Vec<f64>,
    value: Vec<Vec3>,
    normal: Vec<Vec3>,
}

fn axis_data(surface: &AnalyticSurface, map: &NormalizationMap, m: usize) -> Result<AxisData> {
    let mut data = AxisData {
        xs: Vec::with_capacity(m),
        value: Vec::with_capacity(m),
        normal: Vec::with_capacity(m),
    };
    for k in 0..m {
        let xz = map.p * k as f64 / m as f64;
        let xp = map.axis_preimage(xz)?;
        let j = map.chart.chart_jet(surface.map.as_ref(), xp, 0.0)?;
        let f = map.ftrace.eval(xp);
        data.xs.push(xz);
        data.value.push(j.pos);
        data.normal.push(j.dv / f);
    }
    Ok(data)
}

/// Reflect `surface` across the free boundary `edge`.
pub fn reflect_patch(
    surface: &AnalyticSurface,
    edge: EdgeLabel,
    opts: &ReflectOptions,
) -> Result<ReflectedPatch> {
    let e = surface.edge(edge)?;
    let side = e.side;

    let steklov = verify_steklov(surface, edge).map_err(|err| err.at(Stage::Steklov))?;
    if steklov.max > opts.steklov_tol {
        return Err(Error::SteklovResidual {
            residual: steklov.max,
            tol: opts.steklov_tol,
        }
        .at(Stage::Steklov));
    }

    let map = normalize_edge(surface, edge, opts.modes)?;
    let n = opts.modes;
    let coarse = axis_data(surface, &map, 2 * n + 1).map_err(|err| err.at(Stage::PushForward))?;
    let fine = axis_data(surface, &map, 4 * n + 1).map_err(|err| err.at(Stage::PushForward))?;
    let data_scale = fine.value.iter().map(|v| v.amax()).fold(1.0, f64::max);

    // Extent of the surface on its side of the edge.
    let depth = match e.position {
        EdgePosition::Lower => surface.domain.y_hi - e.y,
        EdgePosition::Upper => e.y - surface.domain.y_lo,
    };
    let width = opts.width.unwrap_or(depth);
    let mut y_top = f64::INFINITY;
    for k in 0..16 {
        let x = map.period * k as f64 / 16.0;
        y_top = y_top.min(map.eval(Complex64::new(x, depth))?.im);
    }

    let mut source_models = Vec::with_capacity(3);
    for j in 0..3 {
        let g: Vec<(f64, f64)> = coarse
            .xs
            .iter()
            .zip(&coarse.value)
            .map(|(&x, v)| (x, v[j]))
            .collect();
        let f: Vec<(f64, f64)> = coarse
            .xs
            .iter()
            .zip(&coarse.normal)
            .map(|(&x, v)| (x, v[j]))
            .collect();
        let build = || -> Result<HolomorphicModel> {
            let g = fourier_analyze(&g, map.p)?.pruned(DEFAULT_PRUNE);
            let f = fourier_analyze(&f, map.p)?.pruned(DEFAULT_PRUNE);
            let h = solve_cauchy(&CauchyData::new(g, f)?)?;
            Ok(holomorphic_completion(&h).with_strip(0.0, y_top))
        };
        source_models.push(build().map_err(|err| err.at(Stage::Completion))?);
    }

    let lambdas: Vec<HolomorphicModel> = source_models
        .iter()
        .map(|p| lambda_field(p, side))
        .collect();
    let schwarz = verify_schwarz_condition(&lambdas, &fine.xs)
        .map_err(|err| err.at(Stage::Schwarz))?
        / data_scale;
    if schwarz > opts.schwarz_tol {
        return Err(Error::SchwarzResidual {
            residual: schwarz,
            tol: opts.schwarz_tol,
        }
        .at(Stage::Schwarz));
    }
    let mut extended = Vec::with_capacity(3);
    for l in &lambdas {
        extended.push(
            schwarz_extend(l, &fine.xs, opts.schwarz_tol * data_scale)
                .map_err(|err| err.at(Stage::Schwarz))?,
        );
    }

    let mut models = Vec::with_capacity(3);
    let mut axis_match = 0.0f64;
    for (j, l) in extended.iter().enumerate() {
        let trace: Vec<(f64, f64)> = fine
            .xs
            .iter()
            .zip(&fine.value)
            .map(|(&x, v)| (x, v[j]))
            .collect();
        let (phi, mismatch) =
            solve_reflection_ode(l, side, &trace, map.p).map_err(|err| err.at(Stage::Ode))?;
        axis_match = axis_match.max(mismatch / data_scale);
        models.push(phi);
    }
    if axis_match > opts.match_tol {
        return Err(Error::AxisMismatch {
            residual: axis_match,
            tol: opts.match_tol,
        }
        .at(Stage::Matching));
    }

    let chart = map.chart;
    let mut patch = ReflectedPatch {
        models: models.try_into().expect("three components"),
        source_models: source_models.try_into().expect("three components"),
        lambdas: extended.try_into().expect("three components"),
        normalization: map,
        edge: e,
        source_name: surface.name.clone(),
        y_range: chart.mirror_range(width),
        period: surface.domain.period,
        residuals: PatchResiduals::default(),
    };
    patch.residuals = measure_residuals(&patch, surface, side)?;
    patch.residuals.steklov = steklov.max;
    patch.residuals.schwarz = schwarz;
    patch.residuals.axis_match = axis_match;
    Ok(patch)
}

fn measure_residuals(
    patch: &ReflectedPatch,
    surface: &AnalyticSurface,
    side: Side,
) -> Result<PatchResiduals> {
    let mut r = PatchResiduals::default();
    let (lo, hi) = patch.y_range;
    let period = patch.period;
    let (nx, ny) = (32, 8);
    for i in 0..nx {
        let x = period * i as f64 / nx as f64;
        for k in 0..=ny {
            let y = lo + (hi - lo) * k as f64 / ny as f64;
            let j = patch.jet(x, y)?;
            r.conformality = r.conformality.max(j.conformality_defect());
        }
    }
    let y_edge = patch.chart().y_edge;
    for i in 0..nx {
        let x = period * i as f64 / nx as f64;
        let a = patch.jet(x, y_edge)?;
        let b = surface.jet(x, y_edge)?;
        let size = b.pos.norm().max(1.0);
        let speed = b.du.norm().max(1e-300);
        r.seam_value = r.seam_value.max((a.pos - b.pos).norm() / size);
        r.seam_derivative = r
            .seam_derivative
            .max((a.dv - b.dv).norm().max((a.du - b.du).norm()) / speed);
    }
    let s = side.sign();
    let i = Complex64::i();
    for (m, l) in patch.models.iter().zip(&patch.lambdas) {
        for k in 0..8 {
            let z = Complex64::new(
                patch.normalization.p * k as f64 / 8.0,
                -0.1 * (k + 1) as f64,
            );
            let (v, d1, _) = m.eval3(z)?;
            let lz = l.eval(z)?;
            r.ode = r.ode.max((i * v - s * d1 - lz).norm() / (1.0 + lz.norm()));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{critical_catenoid, equatorial_disk, noncritical_catenoid, DISK_Y_MAX};
    use crate::harmonic_series::{HarmonicStripFunction, Mode};

    #[test]
    fn lambda_examples() {
        let e = HolomorphicModel::exp(1.0, Complex64::new(1.0, 0.0));
        assert!(lambda_field(&e, Side::Interior).modes().is_empty());
        let a = HolomorphicModel::constant(Complex64::new(2.0, 0.0));
        let l = lambda_field(&a, Side::Interior);
        assert_eq!(l.poly()[0], Complex64::new(0.0, 2.0));
        let z = HolomorphicModel::polynomial(vec![Complex64::default(), Complex64::new(1.0, 0.0)]);
        let l = lambda_field(&z, Side::Interior);
        let p = Complex64::new(0.3, 0.4);
        assert!((l.eval(p).unwrap() - (Complex64::i() * p - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn completion_of_y_is_minus_iz() {
        let h = HarmonicStripFunction::new(
            1.0,
            0.0,
            vec![Mode::Poly(vec![
                Complex64::default(),
                Complex64::new(0.0, -1.0),
            ])],
        );
        let m = holomorphic_completion(&h);
        let z = Complex64::new(0.7, -0.2);
        assert!((m.eval(z).unwrap() + Complex64::i() * z).norm() < 1e-15);
    }

    #[test]
    fn ode_trivial_cases() {
        let tr: Vec<(f64, f64)> = (0..9)
            .map(|k| {
                let x = 2.0 * std::f64::consts::PI * k as f64 / 9.0;
                (x, x.cos())
            })
            .collect();
        let (phi, mis) = solve_reflection_ode(
            &HolomorphicModel::zero(),
            Side::Interior,
            &tr,
            2.0 * std::f64::consts::PI,
        )
        .unwrap();
        assert!(mis < 1e-14);
        let z = Complex64::new(0.3, -0.5);
        assert!((phi.eval(z).unwrap() - (Complex64::i() * z).exp()).norm() < 1e-14);

        let (phi, _) = solve_reflection_ode(
            &HolomorphicModel::constant(Complex64::i()),
            Side::Interior,
            &[],
            3.0,
        )
        .unwrap();
        assert!((phi.eval(z).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn steklov_controls() {
        let c = critical_catenoid();
        assert!(verify_steklov(&c, EdgeLabel::Gamma1).unwrap().max < 1e-10);
        assert!(verify_steklov(&c, EdgeLabel::Gamma2).unwrap().max < 1e-10);
        assert!(
            verify_steklov(&equatorial_disk(DISK_Y_MAX), EdgeLabel::Gamma1)
                .unwrap()
                .max
                < 1e-15
        );
        let bad = noncritical_catenoid(0.9).unwrap();
        assert!(verify_steklov(&bad, EdgeLabel::Gamma1).unwrap().max > 0.05);
    }

    #[test]
    fn catenoid_reflection_is_the_catenoid() {
        let c = critical_catenoid();
        let patch = reflect_patch(&c, EdgeLabel::Gamma1, &ReflectOptions::default()).unwrap();
        let (lo, hi) = patch.y_range;
        for i in 0..16 {
            for k in 0..=8 {
                let x = 0.4 * i as f64;
                let y = lo + (hi - lo) * k as f64 / 8.0;
                let d = (patch.jet(x, y).unwrap().pos - c.position(x, y).unwrap()).norm();
                assert!(d < 1e-9, "{x} {y} {d}");
            }
        }
        assert!(patch.residuals.conformality < 1e-10);
        assert!(patch.residuals.seam_value < 1e-12);
    }

    #[test]
    fn negative_control_is_refused() {
        let bad = noncritical_catenoid(0.9).unwrap();
        match reflect_patch(&bad, EdgeLabel::Gamma1, &ReflectOptions::default()) {
            Err(Error::Stage {
                stage: Stage::Steklov,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }
}
