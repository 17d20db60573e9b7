//! Built-in surfaces with exact derivatives, and surface-spec ingestion.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harmonic_series::{
    fourier_analyze, parse_lines, solve_cauchy, CauchyData, DEFAULT_PRUNE,
};
use crate::holomorphic::{ExpMode, HolomorphicModel};
use crate::jet::{Jet, Vec3};

/// A parametrization `(x, y) -> R^3` with exact second-order jets.
pub trait SurfaceMap: Send + Sync + fmt::Debug {
    fn jet(&self, x: f64, y: f64) -> Result<Jet>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Gamma1,
    Gamma2,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeLabel::Gamma1 => "gamma1",
            EdgeLabel::Gamma2 => "gamma2",
        })
    }
}

impl std::str::FromStr for EdgeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma1" | "g1" | "1" => Ok(EdgeLabel::Gamma1),
            "gamma2" | "g2" | "2" => Ok(EdgeLabel::Gamma2),
            other => Err(Error::UnknownEdge(other.to_string())),
        }
    }
}

/// Which side of the strip the edge bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgePosition {
    Lower,
    Upper,
}

/// Side of the sphere the surface lies on near the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    /// `+1` for interior surfaces (outward conormal), `-1` for exterior.
    pub fn sign(self) -> f64 {
        match self {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Interior => Side::Exterior,
            Side::Exterior => Side::Interior,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub label: EdgeLabel,
    /// Which side of the line `y = y` the surface lies on: above for
    /// `Lower`, below for `Upper`.
    pub position: EdgePosition,
    pub side: Side,
    pub y: f64,
}

/// `x` periodic with period `period`, `y ∈ (y_lo, y_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripDomain {
    pub y_lo: f64,
    pub y_hi: f64,
    pub period: f64,
}

impl StripDomain {
    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }
}

/// Local coordinate `z' = x' + i y'` at an edge: the edge is `y' = 0` and
/// the surface lies in `y' > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeChart {
    pub position: EdgePosition,
    pub y_edge: f64,
}

impl EdgeChart {
    pub fn identity() -> EdgeChart {
        EdgeChart {
            position: EdgePosition::Lower,
            y_edge: 0.0,
        }
    }

    /// `dz/dz'`.
    pub fn orientation(&self) -> f64 {
        match self.position {
            EdgePosition::Lower => 1.0,
            EdgePosition::Upper => -1.0,
        }
    }

    pub fn to_source(&self, zp: Complex64) -> Complex64 {
        self.orientation() * zp + Complex64::new(0.0, self.y_edge)
    }

    pub fn to_chart(&self, z: Complex64) -> Complex64 {
        self.orientation() * (z - Complex64::new(0.0, self.y_edge))
    }

    /// Jet of the surface in chart coordinates.
    pub fn chart_jet(&self, surface: &dyn SurfaceMap, xp: f64, yp: f64) -> Result<Jet> {
        let z = self.to_source(Complex64::new(xp, yp));
        let j = surface.jet(z.re, z.im)?;
        Ok(match self.position {
            EdgePosition::Lower => j,
            EdgePosition::Upper => j.reparam(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)),
        })
    }

    /// Source-coordinate `y` range of the mirror image of a band of the
    /// given width.
    pub fn mirror_range(&self, width: f64) -> (f64, f64) {
        match self.position {
            EdgePosition::Lower => (self.y_edge - width, self.y_edge),
            EdgePosition::Upper => (self.y_edge, self.y_edge + width),
        }
    }
}

/// Conformal harmonic parametrization over a periodic strip, with
/// free-boundary edge labels.
#[derive(Debug, Clone)]
pub struct AnalyticSurface {
    pub map: Arc<dyn SurfaceMap>,
    pub domain: StripDomain,
    pub edges: Vec<Edge>,
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl AnalyticSurface {
    pub fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        self.map.jet(x, y)
    }

    pub fn position(&self, x: f64, y: f64) -> Result<Vec3> {
        Ok(self.map.jet(x, y)?.pos)
    }

    pub fn edge(&self, label: EdgeLabel) -> Result<Edge> {
        self.edges
            .iter()
            .find(|e| e.label == label)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(format!("{label} on surface {}", self.name)))
    }

    pub fn chart(&self, edge: &Edge) -> EdgeChart {
        EdgeChart {
            position: edge.position,
            y_edge: edge.y,
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|p| p.1)
    }
}

impl SurfaceMap for AnalyticSurface {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        self.map.jet(x, y)
    }
}

/// Root of `f` in `[lo, hi]` by bisection, stopped once the bracket is
/// narrower than `tol` or can no longer shrink.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo * fhi > 0.0 {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `t0` with `t0 tanh t0 = 1`, the orthogonality condition.
pub fn critical_t0() -> f64 {
    // Bisection down to machine resolution; the bracket ends well below 1e-12.
    bisect(|t| t * t.tanh() - 1.0, 1.0, 1.5, 0.0).expect("bracket contains the root")
}

/// Scale `c` placing the catenoid band `|t| <= t` on the unit sphere.
pub fn catenoid_scale(t: f64) -> f64 {
    1.0 / (t.cosh().powi(2) + t * t).sqrt()
}

/// `c (cosh t cos x, cosh t sin x, t)` with `t = t_top - y`.
#[derive(Debug, Clone, Copy)]
pub struct CatenoidMap {
    pub scale: f64,
    pub t_top: f64,
}

impl SurfaceMap for CatenoidMap {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let c = self.scale;
        let t = self.t_top - y;
        let (ch, sh) = (t.cosh(), t.sinh());
        let (s, co) = x.sin_cos();
        Ok(Jet {
            pos: Vec3::new(ch * co, ch * s, t) * c,
            du: Vec3::new(-ch * s, ch * co, 0.0) * c,
            dv: Vec3::new(-sh * co, -sh * s, -1.0) * c,
            duu: Vec3::new(-ch * co, -ch * s, 0.0) * c,
            duv: Vec3::new(sh * s, -sh * co, 0.0) * c,
            dvv: Vec3::new(ch * co, ch * s, 0.0) * c,
        })
    }
}

/// The catenoid in its `(u, v) = (t, θ)` chart.
#[derive(Debug, Clone, Copy)]
pub struct CatenoidTTheta {
    pub scale: f64,
}

impl SurfaceMap for CatenoidTTheta {
    fn jet(&self, t: f64, theta: f64) -> Result<Jet> {
        let c = self.scale;
        let (ch, sh) = (t.cosh(), t.sinh());
        let (s, co) = theta.sin_cos();
        Ok(Jet {
            pos: Vec3::new(ch * co, ch * s, t) * c,
            du: Vec3::new(sh * co, sh * s, 1.0) * c,
            dv: Vec3::new(-ch * s, ch * co, 0.0) * c,
            duu: Vec3::new(ch * co, ch * s, 0.0) * c,
            duv: Vec3::new(-sh * s, sh * co, 0.0) * c,
            dvv: Vec3::new(-ch * co, -ch * s, 0.0) * c,
        })
    }
}

/// `e^{-y} (cos x, sin x, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct PolarDiskMap;

impl SurfaceMap for PolarDiskMap {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let r = (-y).exp();
        let (s, c) = x.sin_cos();
        let pos = Vec3::new(c, s, 0.0) * r;
        let du = Vec3::new(-s, c, 0.0) * r;
        Ok(Jet {
            pos,
            du,
            dv: -pos,
            duu: -pos,
            duv: -du,
            dvv: pos,
        })
    }
}

/// Round sphere of radius `r` in Mercator coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SphereMap {
    pub radius: f64,
}

impl SurfaceMap for SphereMap {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let r = self.radius;
        let s = 1.0 / y.cosh();
        let th = y.tanh();
        let (sn, co) = x.sin_cos();
        let d2 = s * (th * th - s * s);
        Ok(Jet {
            pos: Vec3::new(s * co, s * sn, th) * r,
            du: Vec3::new(-s * sn, s * co, 0.0) * r,
            dv: Vec3::new(-s * th * co, -s * th * sn, s * s) * r,
            duu: Vec3::new(-s * co, -s * sn, 0.0) * r,
            duv: Vec3::new(s * th * sn, -s * th * co, 0.0) * r,
            dvv: Vec3::new(d2 * co, d2 * sn, -2.0 * s * s * th) * r,
        })
    }
}

/// `Ψ_j = Re Φ_j(z)` for three holomorphic models.
#[derive(Debug, Clone)]
pub struct ModeSurface {
    pub components: [HolomorphicModel; 3],
}

impl ModeSurface {
    /// Planar surface `(Re G, Im G, 0)`.
    pub fn planar(g: HolomorphicModel) -> ModeSurface {
        let rot = g.scale(-Complex64::i());
        ModeSurface {
            components: [g, rot, HolomorphicModel::zero()],
        }
    }
}

impl SurfaceMap for ModeSurface {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let z = Complex64::new(x, y);
        let mut v = [Complex64::default(); 3];
        let mut d1 = v;
        let mut d2 = v;
        for (k, m) in self.components.iter().enumerate() {
            (v[k], d1[k], d2[k]) = m.eval3(z)?;
        }
        Ok(Jet::from_holomorphic(v, d1, d2))
    }
}

fn interior_edges(lower: Option<f64>, upper: Option<f64>) -> Vec<Edge> {
    let mut edges = Vec::new();
    if let Some(y) = lower {
        edges.push(Edge {
            label: EdgeLabel::Gamma1,
            position: EdgePosition::Lower,
            side: Side::Interior,
            y,
        });
    }
    if let Some(y) = upper {
        edges.push(Edge {
            label: EdgeLabel::Gamma2,
            position: EdgePosition::Upper,
            side: Side::Interior,
            y,
        });
    }
    edges
}

/// Catenoid band `t ∈ (t_lo, t_hi)` scaled by `scale`, parametrized with
/// `y = t_hi - t` so that the `t = t_hi` circle is the lower edge.
pub fn catenoid_band(scale: f64, t_lo: f64, t_hi: f64, name: &str) -> AnalyticSurface {
    AnalyticSurface {
        map: Arc::new(CatenoidMap { scale, t_top: t_hi }),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi: t_hi - t_lo,
            period: 2.0 * std::f64::consts::PI,
        },
        edges: interior_edges(Some(0.0), Some(t_hi - t_lo)),
        name: name.to_string(),
        params: vec![
            ("scale".into(), scale),
            ("t_lo".into(), t_lo),
            ("t_hi".into(), t_hi),
        ],
    }
}

/// The critical catenoid: `|t| < t0`, meeting the unit sphere orthogonally.
/// `γ1` is the `t = t0` circle (lower edge), `γ2` the `t = -t0` circle.
pub fn critical_catenoid() -> AnalyticSurface {
    let t0 = critical_t0();
    catenoid_band(catenoid_scale(t0), -t0, t0, "critical-catenoid")
}

/// The critical catenoid scaled by `s` (free boundary on the sphere of
/// radius `s`).
pub fn scaled_catenoid(s: f64) -> AnalyticSurface {
    let t0 = critical_t0();
    let mut surf = catenoid_band(s * catenoid_scale(t0), -t0, t0, "scaled-catenoid");
    surf.params.push(("sphere_radius".into(), s));
    surf
}

/// Catenoid band cut at `fraction·t0` and rescaled to reach the unit
/// sphere; meets it at a non-right angle.
pub fn noncritical_catenoid(fraction: f64) -> Result<AnalyticSurface> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "fraction must lie in (0,1), got {fraction}"
        )));
    }
    let t = fraction * critical_t0();
    let mut surf = catenoid_band(catenoid_scale(t), -t, t, "noncritical-catenoid");
    surf.params.push(("fraction".into(), fraction));
    Ok(surf)
}

/// The part `t ∈ (t0, 3t0)` of the critical catenoid, outside the ball.
/// Its free boundary `t = t0` is the upper edge, labelled `γ1`.
pub fn exterior_catenoid_piece() -> AnalyticSurface {
    let t0 = critical_t0();
    let mut surf = catenoid_band(catenoid_scale(t0), t0, 3.0 * t0, "exterior-catenoid");
    surf.edges = vec![Edge {
        label: EdgeLabel::Gamma1,
        position: EdgePosition::Upper,
        side: Side::Exterior,
        y: 2.0 * t0,
    }];
    surf
}

pub const DISK_Y_MAX: f64 = 8.0;

/// Flat equatorial disk `e^{-y}(cos x, sin x, 0)`, `y ∈ (0, y_max)`.
pub fn equatorial_disk(y_max: f64) -> AnalyticSurface {
    AnalyticSurface {
        map: Arc::new(PolarDiskMap),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi: y_max,
            period: 2.0 * std::f64::consts::PI,
        },
        edges: interior_edges(Some(0.0), None),
        name: "equatorial-disk".into(),
        params: vec![("y_max".into(), y_max)],
    }
}

/// Round sphere patch of radius `r`, `|y| < 2`; not minimal.
pub fn sphere_patch(r: f64) -> AnalyticSurface {
    AnalyticSurface {
        map: Arc::new(SphereMap { radius: r }),
        domain: StripDomain {
            y_lo: -2.0,
            y_hi: 2.0,
            period: 2.0 * std::f64::consts::PI,
        },
        edges: vec![],
        name: "sphere-patch".into(),
        params: vec![("radius".into(), r)],
    }
}

/// Flat plane `(x, y, 0)` over a strip.
pub fn plane(period: f64, height: f64) -> AnalyticSurface {
    let g = HolomorphicModel::polynomial(vec![Complex64::default(), Complex64::new(1.0, 0.0)]);
    AnalyticSurface {
        map: Arc::new(ModeSurface::planar(g)),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi: height,
            period,
        },
        edges: vec![],
        name: "plane".into(),
        params: vec![],
    }
}

/// Planar surface `G(z) = z + ε sin(πz)/π` with period 2, whose boundary
/// conformal factor is `1 + ε cos(πx)`.
pub fn perturbed_plane(eps: f64) -> AnalyticSurface {
    let pi = std::f64::consts::PI;
    // sin(πz)/π = (e^{iπz} - e^{-iπz}) / (2iπ)
    let k = Complex64::new(0.0, -0.5 * eps / pi);
    let g = HolomorphicModel::new(
        vec![
            ExpMode {
                omega: pi,
                coeff: k,
            },
            ExpMode {
                omega: -pi,
                coeff: -k,
            },
        ],
        vec![],
        vec![Complex64::default(), Complex64::new(1.0, 0.0)],
    );
    AnalyticSurface {
        map: Arc::new(ModeSurface::planar(g)),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi: 1.0,
            period: 2.0,
        },
        edges: interior_edges(Some(0.0), None),
        name: "perturbed-plane".into(),
        params: vec![("eps".into(), eps)],
    }
}

/// Resolve a surface selector: `critical-catenoid`, `exterior-catenoid`,
/// `noncritical-catenoid:<fraction>`, `scaled-catenoid:<s>`,
/// `equatorial-disk[:<y_max>]`, `sphere-patch[:<r>]`,
/// `perturbed-plane[:<eps>]`, or `file:<path>`.
pub fn from_selector(sel: &str) -> Result<AnalyticSurface> {
    let (name, arg) = match sel.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (sel.trim(), None),
    };
    let num = |default: Option<f64>| -> Result<f64> {
        match arg {
            Some(a) => a.parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("bad parameter {a:?} in surface selector {sel:?}"))
            }),
            None => default
                .ok_or_else(|| Error::InvalidInput(format!("surface {name} needs a parameter"))),
        }
    };
    match name {
        "critical-catenoid" => Ok(critical_catenoid()),
        "exterior-catenoid" => Ok(exterior_catenoid_piece()),
        "noncritical-catenoid" => noncritical_catenoid(num(Some(0.9))?),
        "scaled-catenoid" => Ok(scaled_catenoid(num(None)?)),
        "equatorial-disk" => Ok(equatorial_disk(num(Some(DISK_Y_MAX))?)),
        "sphere-patch" => Ok(sphere_patch(num(Some(1.0))?)),
        "perturbed-plane" => Ok(perturbed_plane(num(Some(0.1))?)),
        "file" => load_surface(arg.unwrap_or_default()),
        _ => Err(Error::InvalidInput(format!("unknown surface {sel:?}"))),
    }
}

/// Residuals of the defining invariants at random interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    /// max `|ΔΨ| / F^2`
    pub harmonic: f64,
    /// max scale-free conformality defect
    pub conformal: f64,
    /// max `||Ψ| - 1|` over edge samples (0 without edges)
    pub sphere: f64,
}

pub fn check_invariants(
    surface: &AnalyticSurface,
    samples: usize,
    seed: u64,
) -> Result<InvariantReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = surface.domain;
    let (mut harmonic, mut conformal) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = rng.gen_range(0.0..d.period);
        let y = rng.gen_range(d.y_lo..d.y_hi);
        let j = surface.jet(x, y)?;
        let f2 = j.conformal_factor().powi(2);
        harmonic = harmonic.max(j.laplacian().norm() / f2);
        conformal = conformal.max(j.conformality_defect());
    }
    let mut sphere = 0.0f64;
    for e in &surface.edges {
        let chart = surface.chart(e);
        for k in 0..256 {
            let x = d.period * k as f64 / 256.0;
            let p = chart.chart_jet(surface.map.as_ref(), x, 0.0)?.pos;
            sphere = sphere.max((p.norm() - 1.0).abs());
        }
    }
    Ok(InvariantReport {
        harmonic,
        conformal,
        sphere,
    })
}

/// Surface-spec text for `surface`: axis traces of each component and of
/// its `y`-derivative at `y = y_lo`, with `modes` Fourier modes.
pub fn surface_spec_text(surface: &AnalyticSurface, modes: usize) -> Result<String> {
    let d = surface.domain;
    let m = 2 * modes + 1;
    let mut jets = Vec::with_capacity(m);
    for k in 0..m {
        let x = d.period * k as f64 / m as f64;
        jets.push((x, surface.jet(x, d.y_lo)?));
    }
    let mut out = String::new();
    let _ = writeln!(out, "period={:.16e}", d.period);
    let _ = writeln!(out, "height={:.16e}", d.height());
    for e in &surface.edges {
        let pos = match e.position {
            EdgePosition::Lower => "lower",
            EdgePosition::Upper => "upper",
        };
        let side = match e.side {
            Side::Interior => "interior",
            Side::Exterior => "exterior",
        };
        let _ = writeln!(out, "edge={pos},{side}");
    }
    for k in 0..3 {
        let g: Vec<(f64, f64)> = jets.iter().map(|(x, j)| (*x, j.pos[k])).collect();
        let f: Vec<(f64, f64)> = jets.iter().map(|(x, j)| (*x, j.dv[k])).collect();
        let g = fourier_analyze(&g, d.period)?.pruned(DEFAULT_PRUNE);
        let f = fourier_analyze(&f, d.period)?.pruned(DEFAULT_PRUNE);
        let _ = writeln!(out, "component={}", k + 1);
        let _ = writeln!(out, "g:");
        for line in g.to_text().lines().skip(1) {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "f:");
        for line in f.to_text().lines().skip(1) {
            let _ = writeln!(out, "  {line}");
        }
    }
    Ok(out)
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<AnalyticSurface> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    parse_surface(&text, &name)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse surface-spec text. Each component is rebuilt as the Cauchy
/// solution of its traces and completed to a holomorphic model; the result
/// is rejected if it is not conformal.
pub fn parse_surface(text: &str, name: &str) -> Result<AnalyticSurface> {
    let mut period = None;
    let mut height = None;
    let mut edges: Vec<(EdgePosition, Side)> = Vec::new();
    // component index -> (g lines, f lines)
    let mut blocks: [(Vec<(usize, &str)>, Vec<(usize, &str)>); 3] = Default::default();
    let mut seen = [false; 3];
    let mut current: Option<(usize, bool)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "g:" || line == "f:" {
            let (comp, _) =
                current.ok_or_else(|| parse_err(line_no, "trace block outside a component"))?;
            current = Some((comp, line == "g:"));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key=value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    parse_err(
                        line_no,
                        format!("field {key}: cannot parse {value:?} as a number"),
                    )
                })
        };
        match key {
            "period" if current.is_none() => period = Some(number()?),
            "height" => height = Some(number()?),
            "edge" => {
                let (p, s) = value.split_once(',').ok_or_else(|| {
                    parse_err(line_no, "edge expects <lower|upper>,<interior|exterior>")
                })?;
                let p = match p.trim() {
                    "lower" => EdgePosition::Lower,
                    "upper" => EdgePosition::Upper,
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("unknown edge position {other:?}"),
                        ))
                    }
                };
                let s = match s.trim() {
                    "interior" => Side::Interior,
                    "exterior" => Side::Exterior,
                    other => {
                        return Err(parse_err(line_no, format!("unknown edge side {other:?}")))
                    }
                };
                edges.push((p, s));
            }
            "component" => {
                let k: usize = value
                    .parse()
                    .ok()
                    .filter(|k| (1..=3).contains(k))
                    .ok_or_else(|| {
                        parse_err(
                            line_no,
                            format!("component must be 1, 2 or 3, got {value:?}"),
                        )
                    })?;
                if seen[k - 1] {
                    return Err(parse_err(line_no, format!("duplicate component {k}")));
                }
                seen[k - 1] = true;
                current = Some((k - 1, true));
            }
            _ => {
                let (comp, is_g) = current
                    .ok_or_else(|| parse_err(line_no, format!("unexpected field {key:?}")))?;
                if is_g {
                    blocks[comp].0.push((line_no, raw));
                } else {
                    blocks[comp].1.push((line_no, raw));
                }
            }
        }
    }
    let period = period.ok_or_else(|| parse_err(1, "missing period"))?;
    let height = height.ok_or_else(|| parse_err(1, "missing height"))?;
    if !(period > 0.0 && height > 0.0) {
        return Err(parse_err(1, "period and height must be positive"));
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(parse_err(
            text.lines().count(),
            format!("missing component {}", k + 1),
        ));
    }
    let mut comps = Vec::with_capacity(3);
    for (g_lines, f_lines) in &blocks {
        let g = parse_lines(g_lines, Some(period))?;
        let f = parse_lines(f_lines, Some(period))?;
        let h = solve_cauchy(&CauchyData::new(g, f)?)?;
        comps.push(HolomorphicModel::from_harmonic(&h));
    }
    let components: [HolomorphicModel; 3] = comps.try_into().expect("three components");
    if edges.is_empty() {
        edges.push((EdgePosition::Lower, Side::Interior));
    }
    let edges = edges
        .into_iter()
        .map(|(position, side)| Edge {
            label: match position {
                EdgePosition::Lower => EdgeLabel::Gamma1,
                EdgePosition::Upper => EdgeLabel::Gamma2,
            },
            position,
            side,
            y: match position {
                EdgePosition::Lower => 0.0,
                EdgePosition::Upper => height,
            },
        })
        .collect();
    let surface = AnalyticSurface {
        map: Arc::new(ModeSurface { components }),
        domain: StripDomain {
            y_lo: 0.0,
            y_hi: height,
            period,
        },
        edges,
        name: name.to_string(),
        params: vec![],
    };
    let report = check_invariants(&surface, 64, 0)?;
    if report.conformal > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "surface data is not conformal: residual {:.3e}",
            report.conformal
        )));
    }
    Ok(surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_constants() {
        let t0 = critical_t0();
        assert!((t0 - 1.1996786).abs() < 1e-7);
        assert!((t0 * t0.tanh() - 1.0).abs() < 1e-14);
        let c = catenoid_scale(t0);
        // high-precision reference value
        assert!((c - 0.460_485_088_250_133_9).abs() < 1e-12);
        assert!((c * t0.cosh() - 0.833_556_559_600_964_7).abs() < 1e-12);
        assert!(((c * t0.cosh()).powi(2) + (c * t0).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn catalog_invariants() {
        for s in [
            critical_catenoid(),
            equatorial_disk(DISK_Y_MAX),
            noncritical_catenoid(0.9).unwrap(),
            exterior_catenoid_piece(),
        ] {
            let r = check_invariants(&s, 200, 1).unwrap();
            assert!(r.harmonic < 1e-10, "{} {:?}", s.name, r);
            assert!(r.conformal < 1e-10, "{} {:?}", s.name, r);
            assert!(r.sphere < 1e-10, "{} {:?}", s.name, r);
        }
    }

    #[test]
    fn upper_chart_is_holomorphic_flip() {
        let s = critical_catenoid();
        let e = s.edge(EdgeLabel::Gamma2).unwrap();
        let ch = s.chart(&e);
        let j = ch.chart_jet(s.map.as_ref(), 0.3, 0.2).unwrap();
        let direct = s.jet(-0.3, s.domain.y_hi - 0.2).unwrap();
        assert!((j.pos - direct.pos).norm() < 1e-15);
        assert!((j.du + direct.du).norm() < 1e-15);
        assert!((j.dv + direct.dv).norm() < 1e-15);
        assert!(j.conformality_defect() < 1e-12);
    }

    #[test]
    fn spec_roundtrip_disk() {
        let disk = equatorial_disk(DISK_Y_MAX);
        let text = surface_spec_text(&disk, 8).unwrap();
        let back = parse_surface(&text, "disk").unwrap();
        for &(x, y) in &[(0.1, 0.2), (2.0, 1.5), (4.0, 5.0)] {
            let d = (back.position(x, y).unwrap() - disk.position(x, y).unwrap()).norm();
            assert!(d < 1e-10, "{d}");
        }
    }

    #[test]
    fn parse_errors_name_line() {
        let text = "period=6.283185307179586\nheight=1\ncomponent=1\ng:\n  a0=oops\n";
        match parse_surface(text, "bad") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
