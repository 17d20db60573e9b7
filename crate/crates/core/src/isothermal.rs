//! Coordinates in which the conformal factor is one along a free boundary,
//! and the branch points of the normalizing map.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::{
    AnalyticSurface, Edge, EdgeChart, EdgeLabel, EdgePosition, StripDomain, SurfaceMap,
};
use crate::error::{Error, Result, Stage};
use crate::harmonic_series::{
    conjugate_harmonic, fourier_analyze, parse_lines, solve_cauchy_neumann, HarmonicStripFunction,
    TrigPolynomial, DEFAULT_MODES, DEFAULT_PRUNE,
};
use crate::holomorphic::HolomorphicModel;
use crate::jet::Jet;

/// Default exclusion radius around punctures, in source coordinates.
pub const DEFAULT_EXCLUSION: f64 = 1e-3;

/// `F(x, 0) = |Ψ_x(x, 0)|` along an edge, in that edge's chart, analysed
/// from `2·modes + 1` samples.
pub fn boundary_conformal_factor(
    surface: &AnalyticSurface,
    edge: EdgeLabel,
    modes: usize,
) -> Result<TrigPolynomial> {
    let e = surface.edge(edge)?;
    let chart = surface.chart(&e);
    let period = surface.domain.period;
    let m = 2 * modes + 1;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let x = period * k as f64 / m as f64;
        let j = chart.chart_jet(surface.map.as_ref(), x, 0.0)?;
        let speed = j.du.norm();
        if !(speed > 1e-12) {
            return Err(Error::Degenerate { x, y: 0.0, speed });
        }
        samples.push((x, speed));
    }
    Ok(fourier_analyze(&samples, period)?.pruned(DEFAULT_PRUNE))
}

/// `H = X + iY` with `Y` the Cauchy solution `Y(x,0) = 0`, `Y_y(x,0) = F`
/// and `X` its conjugate, `X(0,0) = 0`.
#[derive(Debug, Clone)]
pub struct NormalizationMap {
    pub x: HarmonicStripFunction,
    pub y: HarmonicStripFunction,
    pub h: HolomorphicModel,
    pub ftrace: TrigPolynomial,
    /// Source period `L`.
    pub period: f64,
    /// Increase of `X` over one source period along the axis.
    pub p: f64,
    /// Edge chart the map is expressed in.
    pub chart: EdgeChart,
    dh: HolomorphicModel,
    d2h: HolomorphicModel,
}

pub fn build_normalization(ftrace: &TrigPolynomial) -> Result<NormalizationMap> {
    let period = ftrace.period();
    let m = 8 * ftrace.order().max(8) + 1;
    for k in 0..m {
        let x = period * k as f64 / m as f64;
        let v = ftrace.eval(x);
        if !(v > 0.0) {
            return Err(Error::NonPositiveFactor { x, value: v });
        }
    }
    if ftrace.drift() != 0.0 {
        return Err(Error::InvalidInput(
            "conformal factor trace must be periodic".into(),
        ));
    }
    let y = solve_cauchy_neumann(ftrace);
    let x = conjugate_harmonic(&y);
    let h = HolomorphicModel::from_harmonic(&y).scale(Complex64::i());
    let h0 = h.eval(Complex64::default())?;
    let h = h.add_constant(Complex64::new(-h0.re, 0.0));
    let dh = h.differentiate();
    let d2h = dh.differentiate();
    Ok(NormalizationMap {
        x,
        y,
        p: 0.5 * ftrace.a(0) * period,
        period,
        ftrace: ftrace.clone(),
        h,
        chart: EdgeChart::identity(),
        dh,
        d2h,
    })
}

/// Normalization at an edge of a surface, expressed in that edge's chart.
pub fn normalize_edge(
    surface: &AnalyticSurface,
    edge: EdgeLabel,
    modes: usize,
) -> Result<NormalizationMap> {
    let e = surface.edge(edge)?;
    let f = boundary_conformal_factor(surface, edge, modes)
        .map_err(|err| err.at(Stage::ConformalFactor))?;
    let mut map = build_normalization(&f).map_err(|err| err.at(Stage::Normalization))?;
    map.chart = surface.chart(&e);
    Ok(map)
}

impl NormalizationMap {
    pub fn with_chart(mut self, chart: EdgeChart) -> Self {
        self.chart = chart;
        self
    }

    /// `(H, H', H'')` at a chart point.
    pub fn eval3(&self, zp: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        Ok((self.h.eval(zp)?, self.dh.eval(zp)?, self.d2h.eval(zp)?))
    }

    pub fn eval(&self, zp: Complex64) -> Result<Complex64> {
        self.h.eval(zp)
    }

    pub fn derivative(&self, zp: Complex64) -> Result<Complex64> {
        self.dh.eval(zp)
    }

    /// `x` with `X(x, 0) = target`.
    pub fn axis_preimage(&self, target: f64) -> Result<f64> {
        let k = (target / self.p).floor();
        let t = target - k * self.p;
        let mut x = t * self.period / self.p;
        for _ in 0..60 {
            let v = self.h.eval(Complex64::new(x, 0.0))?.re;
            let f = self.ftrace.eval(x);
            let dx = (v - t) / f;
            x -= dx;
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                return Ok(x + k * self.period);
            }
        }
        let v = self.h.eval(Complex64::new(x, 0.0))?.re;
        if (v - t).abs() <= 1e-12 * (1.0 + t.abs()) {
            return Ok(x + k * self.period);
        }
        Err(Error::NewtonDiverged {
            target: Complex64::new(target, 0.0),
        })
    }

    /// Text form: a `component=X` block with the axis trace of `X` (drift
    /// `P/L`) and a `component=Y` block with the normal derivative of `Y`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f = &self.ftrace;
        // X(x,0) = ∫_0^x F: the integral of each mode of F.
        let n = f.order();
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n];
        let mut c0 = 0.0;
        for k in 1..=n {
            let w = f.frequency(k);
            sin[k - 1] = f.a(k) / w;
            cos[k] = -f.b(k) / w;
            c0 += f.b(k) / w;
        }
        cos[0] = 2.0 * c0;
        let xtrace =
            TrigPolynomial::new(self.period, cos, sin, 0.5 * f.a(0)).expect("finite coefficients");
        let _ = writeln!(out, "component=X");
        out.push_str(&xtrace.to_text());
        let _ = writeln!(out, "component=Y");
        out.push_str(&f.to_text());
        out
    }

    pub fn from_text(text: &str) -> Result<NormalizationMap> {
        let mut blocks: Vec<(String, Vec<(usize, &str)>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(tag) = line.strip_prefix("component=") {
                blocks.push((tag.trim().to_string(), Vec::new()));
            } else if let Some(b) = blocks.last_mut() {
                b.1.push((i + 1, raw));
            } else if !line.is_empty() && !line.starts_with('#') {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected component=X or component=Y".into(),
                });
            }
        }
        let find = |tag: &str| blocks.iter().find(|b| b.0 == tag);
        let yb = find("Y").ok_or(Error::Parse {
            line: 1,
            message: "missing component=Y block".into(),
        })?;
        let map = build_normalization(&parse_lines(&yb.1, None)?)?;
        if let Some(xb) = find("X") {
            let xt = parse_lines(&xb.1, Some(map.period))?;
            for k in 0..16 {
                let x = map.period * k as f64 / 16.0;
                let want = map.h.eval(Complex64::new(x, 0.0))?.re;
                if (xt.eval(x) - want).abs() > 1e-9 * (1.0 + want.abs()) {
                    return Err(Error::Parse {
                        line: xb.1.first().map(|l| l.0).unwrap_or(1),
                        message: "X block is not the conjugate of the Y block".into(),
                    });
                }
            }
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Puncture {
    pub z: Complex64,
    pub multiplicity: usize,
}

/// Zeros of `H'` with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct PunctureSet {
    pub points: Vec<Puncture>,
    pub exclusion_radius: f64,
    /// Sum of the argument-principle windings of all cells.
    pub winding_total: i64,
}

impl PunctureSet {
    pub fn empty(exclusion_radius: f64) -> Self {
        PunctureSet {
            points: vec![],
            exclusion_radius,
            winding_total: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn check_outside(&self, z: Complex64) -> Result<()> {
        for p in &self.points {
            if (z - p.z).norm() < self.exclusion_radius {
                return Err(Error::InsidePuncture {
                    point: z,
                    puncture: p.z,
                });
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &PunctureSet) {
        for p in &other.points {
            if !self
                .points
                .iter()
                .any(|q| (q.z - p.z).norm() < 2.0 * self.exclusion_radius)
            {
                self.points.push(*p);
            }
        }
        self.winding_total += other.winding_total;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

struct ZeroOnBoundary;

/// Change of `arg f` along the segment `a -> b`, refined until consecutive
/// samples differ by less than a quarter turn.
fn arg_change(
    f: &impl Fn(Complex64) -> Result<Complex64>,
    a: Complex64,
    b: Complex64,
    fa: Complex64,
    fb: Complex64,
    tiny: f64,
    depth: u32,
) -> Result<std::result::Result<f64, ZeroOnBoundary>> {
    let d = (fb / fa).arg();
    if d.abs() < std::f64::consts::FRAC_PI_4 || depth > 24 {
        return Ok(Ok(d));
    }
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    if fm.norm() < tiny {
        return Ok(Err(ZeroOnBoundary));
    }
    let left = match arg_change(f, a, m, fa, fm, tiny, depth + 1)? {
        Ok(v) => v,
        Err(e) => return Ok(Err(e)),
    };
    let right = match arg_change(f, m, b, fm, fb, tiny, depth + 1)? {
        Ok(v) => v,
        Err(e) => return Ok(Err(e)),
    };
    Ok(Ok(left + right))
}

fn cell_winding(
    f: &impl Fn(Complex64) -> Result<Complex64>,
    corners: [Complex64; 4],
    per_side: usize,
    tiny: f64,
) -> Result<std::result::Result<i64, ZeroOnBoundary>> {
    let mut total = 0.0;
    for s in 0..4 {
        let (a, b) = (corners[s], corners[(s + 1) % 4]);
        let mut prev = a;
        let mut fprev = f(a)?;
        if fprev.norm() < tiny {
            return Ok(Err(ZeroOnBoundary));
        }
        for k in 1..=per_side {
            let z = a + (b - a) * (k as f64 / per_side as f64);
            let fz = f(z)?;
            if fz.norm() < tiny {
                return Ok(Err(ZeroOnBoundary));
            }
            match arg_change(f, prev, z, fprev, fz, tiny, 0)? {
                Ok(d) => total += d,
                Err(e) => return Ok(Err(e)),
            }
            prev = z;
            fprev = fz;
        }
    }
    Ok(Ok((total / (2.0 * std::f64::consts::PI)).round() as i64))
}

/// Zeros of `H'` in `rect` located by the argument principle on an
/// `nx × ny` grid and polished by Newton iteration. The rectangle is inset
/// slightly so zeros on its boundary are excluded.
pub fn find_branch_points(
    h: &HolomorphicModel,
    rect: Rect,
    nx: usize,
    ny: usize,
) -> Result<PunctureSet> {
    find_branch_points_with(h, rect, nx, ny, DEFAULT_EXCLUSION)
}

pub fn find_branch_points_with(
    h: &HolomorphicModel,
    rect: Rect,
    nx: usize,
    ny: usize,
    exclusion_radius: f64,
) -> Result<PunctureSet> {
    let dh = h.differentiate();
    let d2h = dh.differentiate();
    let f = |z: Complex64| dh.eval(z);
    let inset = 1e-3 * (rect.x1 - rect.x0).min(rect.y1 - rect.y0);
    let r = Rect {
        x0: rect.x0 + inset,
        x1: rect.x1 - inset,
        y0: rect.y0 + inset,
        y1: rect.y1 - inset,
    };
    // Scale for deciding that a boundary sample is a zero.
    let mut scale = 0.0f64;
    for i in 0..=8 {
        for j in 0..=8 {
            let z = Complex64::new(
                r.x0 + (r.x1 - r.x0) * i as f64 / 8.0,
                r.y0 + (r.y1 - r.y0) * j as f64 / 8.0,
            );
            scale = scale.max(f(z)?.norm());
        }
    }
    let tiny = 1e-10 * scale.max(1e-300);

    'attempt: for attempt in 0..=3 {
        let (mx, my) = (nx.max(1) + attempt, ny.max(1) + attempt);
        let dx = (r.x1 - r.x0) / mx as f64;
        let dy = (r.y1 - r.y0) / my as f64;
        let mut found: Vec<Puncture> = Vec::new();
        let mut total = 0i64;
        for i in 0..mx {
            for j in 0..my {
                let (xa, ya) = (r.x0 + i as f64 * dx, r.y0 + j as f64 * dy);
                let corners = [
                    Complex64::new(xa, ya),
                    Complex64::new(xa + dx, ya),
                    Complex64::new(xa + dx, ya + dy),
                    Complex64::new(xa, ya + dy),
                ];
                let w = match cell_winding(&f, corners, 8, tiny)? {
                    Ok(w) => w,
                    Err(ZeroOnBoundary) => continue 'attempt,
                };
                total += w;
                if w <= 0 {
                    continue;
                }
                let m = w as f64;
                let mut z = Complex64::new(xa + 0.5 * dx, ya + 0.5 * dy);
                let mut fz = f(z)?;
                for _ in 0..100 {
                    if fz.norm() <= 1e-12 {
                        break;
                    }
                    let step = m * fz / d2h.eval(z)?;
                    let mut lam = 1.0;
                    let mut next = z - step * lam;
                    let mut fnext = f(next)?;
                    while fnext.norm() > fz.norm() && lam > 1e-6 {
                        lam *= 0.5;
                        next = z - step * lam;
                        fnext = f(next)?;
                    }
                    if next == z {
                        break;
                    }
                    z = next;
                    fz = fnext;
                }
                if fz.norm() > 1e-8 {
                    return Err(Error::NewtonDiverged { target: z });
                }
                if let Some(p) = found
                    .iter_mut()
                    .find(|p| (p.z - z).norm() < 2.0 * exclusion_radius)
                {
                    p.multiplicity += w as usize;
                } else {
                    found.push(Puncture {
                        z,
                        multiplicity: w as usize,
                    });
                }
            }
        }
        return Ok(PunctureSet {
            points: found,
            exclusion_radius,
            winding_total: total,
        });
    }
    Err(Error::ZeroOnCellBoundary { attempts: 3 })
}

/// `Ψ ∘ H⁻¹` in the normalized coordinates `Z = X + iY`.
#[derive(Debug)]
pub struct PushForwardMap {
    source: Arc<dyn SurfaceMap>,
    map: NormalizationMap,
    table: Vec<(Complex64, Complex64)>,
    punctures: PunctureSet,
}

impl PushForwardMap {
    pub fn new(
        source: Arc<dyn SurfaceMap>,
        map: NormalizationMap,
        height: f64,
        punctures: PunctureSet,
    ) -> Result<Self> {
        let (nx, ny) = (64, 16);
        let mut table = Vec::with_capacity(nx * (ny + 1));
        for i in 0..nx {
            for j in 0..=ny {
                let zp = Complex64::new(
                    map.period * i as f64 / nx as f64,
                    height * j as f64 / ny as f64,
                );
                table.push((map.eval(zp)?, zp));
            }
        }
        Ok(PushForwardMap {
            source,
            map,
            table,
            punctures,
        })
    }

    /// Chart point `z'` with `H(z') = target`.
    pub fn inverse(&self, target: Complex64) -> Result<Complex64> {
        let (p, l) = (self.map.p, self.map.period);
        let k = (target.re / p).floor();
        let t = target - k * p;
        let mut z = self
            .table
            .iter()
            .min_by(|a, b| (a.0 - t).norm().total_cmp(&(b.0 - t).norm()))
            .map(|e| e.1)
            .unwrap_or(t);
        let tol = 1e-13 * (1.0 + t.norm());
        let mut r = self.map.eval(z)? - t;
        for _ in 0..80 {
            if r.norm() <= tol {
                break;
            }
            let d = self.map.derivative(z)?;
            let step = r / d;
            let mut lam = 1.0;
            let mut next = z - step;
            let mut rn = self.map.eval(next)? - t;
            while rn.norm() > r.norm() && lam > 1e-8 {
                lam *= 0.5;
                next = z - step * lam;
                rn = self.map.eval(next)? - t;
            }
            if next == z {
                break;
            }
            z = next;
            r = rn;
        }
        if r.norm() > 1e-10 * (1.0 + t.norm()) {
            return Err(Error::NewtonDiverged { target });
        }
        let z = z + k * l;
        self.punctures.check_outside(z)?;
        Ok(z)
    }
}

impl SurfaceMap for PushForwardMap {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let zp = self.inverse(Complex64::new(x, y))?;
        let (_, d1, d2) = self.map.eval3(zp)?;
        let j = self
            .map
            .chart
            .chart_jet(self.source.as_ref(), zp.re, zp.im)?;
        let g1 = d1.inv();
        let g2 = -d2 * g1 * g1 * g1;
        Ok(j.reparam(g1, g2))
    }
}

/// Reparametrize `surface` by `Z = H(z')`, with `map` built at one of its
/// edges. The result's lower edge is the normalized free boundary.
pub fn push_forward(surface: &AnalyticSurface, map: &NormalizationMap) -> Result<AnalyticSurface> {
    push_forward_excluding(surface, map, PunctureSet::empty(DEFAULT_EXCLUSION))
}

pub fn push_forward_excluding(
    surface: &AnalyticSurface,
    map: &NormalizationMap,
    punctures: PunctureSet,
) -> Result<AnalyticSurface> {
    let edge = surface
        .edges
        .iter()
        .find(|e| surface.chart(e) == map.chart)
        .copied()
        .unwrap_or(Edge {
            label: EdgeLabel::Gamma1,
            position: EdgePosition::Lower,
            side: crate::catalog::Side::Interior,
            y: 0.0,
        });
    let height = match map.chart.position {
        EdgePosition::Lower => surface.domain.y_hi - map.chart.y_edge,
        EdgePosition::Upper => map.chart.y_edge - surface.domain.y_lo,
    };
    let mut y_hi = f64::INFINITY;
    for k in 0..64 {
        let x = map.period * k as f64 / 64.0;
        y_hi = y_hi.min(map.eval(Complex64::new(x, height))?.im);
    }
    let pf = PushForwardMap::new(surface.map.clone(), map.clone(), height, punctures)?;
    Ok(AnalyticSurface {
        map: Arc::new(pf),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi,
            period: map.p,
        },
        edges: vec![Edge {
            position: EdgePosition::Lower,
            y: 0.0,
            ..edge
        }],
        name: format!("{}-normalized", surface.name),
        params: surface.params.clone(),
    })
}

/// Normalization with the default number of modes.
pub fn normalize_default(surface: &AnalyticSurface, edge: EdgeLabel) -> Result<NormalizationMap> {
    normalize_edge(surface, edge, DEFAULT_MODES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catenoid_scale, critical_catenoid, critical_t0, perturbed_plane};

    #[test]
    fn constant_factor_gives_linear_map() {
        let f = TrigPolynomial::constant(3.0, 0.7).unwrap();
        let m = build_normalization(&f).unwrap();
        let z = Complex64::new(0.4, 0.9);
        assert!((m.eval(z).unwrap() - 0.7 * z).norm() < 1e-14);
        assert!((m.p - 2.1).abs() < 1e-14);
    }

    #[test]
    fn catenoid_factor() {
        let s = critical_catenoid();
        let t0 = critical_t0();
        let kappa = catenoid_scale(t0) * t0.cosh();
        for e in [EdgeLabel::Gamma1, EdgeLabel::Gamma2] {
            let f = boundary_conformal_factor(&s, e, 16).unwrap();
            assert!((0.5 * f.a(0) - kappa).abs() < 1e-14);
            assert_eq!(f.order(), 0);
        }
    }

    #[test]
    fn pushed_perturbed_plane_has_unit_factor() {
        let s = perturbed_plane(0.1);
        let m = normalize_default(&s, EdgeLabel::Gamma1).unwrap();
        let pf = push_forward(&s, &m).unwrap();
        for k in 0..40 {
            let x = m.p * k as f64 / 40.0;
            let j = pf.jet(x, 0.0).unwrap();
            assert!((j.du.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn text_roundtrip() {
        let f = TrigPolynomial::new(2.0, vec![2.0, 0.1], vec![0.05], 0.0).unwrap();
        let m = build_normalization(&f).unwrap();
        let back = NormalizationMap::from_text(&m.to_text()).unwrap();
        let z = Complex64::new(0.3, 0.2);
        assert!((back.eval(z).unwrap() - m.eval(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn sine_derivative_zero() {
        let pi = std::f64::consts::PI;
        // H = -cos(πz)/π, H' = sin(πz)
        let h = HolomorphicModel::new(
            vec![
                crate::holomorphic::ExpMode {
                    omega: pi,
                    coeff: Complex64::new(-0.5 / pi, 0.0),
                },
                crate::holomorphic::ExpMode {
                    omega: -pi,
                    coeff: Complex64::new(-0.5 / pi, 0.0),
                },
            ],
            vec![],
            vec![],
        );
        let set = find_branch_points(
            &h,
            Rect {
                x0: -1.0,
                x1: 1.0,
                y0: -1.0,
                y1: 1.0,
            },
            6,
            6,
        )
        .unwrap();
        assert_eq!(set.points.len(), 1);
        assert!(set.points[0].z.norm() < 1e-12);
        assert_eq!(set.total_multiplicity() as i64, set.winding_total);
    }
}
