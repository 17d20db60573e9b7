//! Run configuration, verification reports and mesh/grid export.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{check_invariants, from_selector, AnalyticSurface, EdgeLabel, SurfaceMap};
use crate::error::{Error, Result};
use crate::extension::{coverage_monitor, extend_with, ExtendedSurface};
use crate::geometry::{curvature_report, CheckStatus, CurvatureReport, GeometryOptions};
use crate::isothermal::{normalize_edge, NormalizationMap};
use crate::jet::Vec3;
use crate::reflection::{reflect_patch, steklov_residual, ReflectOptions, ReflectedPatch};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FREEBOUND_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Reflect,
    Extend,
    Verify,
    Report,
    ExportMesh,
}

impl FromStr for Operation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "reflect" => Operation::Reflect,
            "extend" => Operation::Extend,
            "verify" => Operation::Verify,
            "report" => Operation::Report,
            "export-mesh" => Operation::ExportMesh,
            _ => return Err(Error::InvalidInput(format!("unknown operation {s:?}"))),
        })
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Reflect => "reflect",
            Operation::Extend => "extend",
            Operation::Verify => "verify",
            Operation::Report => "report",
            Operation::ExportMesh => "export-mesh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Obj,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(ExportFormat::Obj),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::InvalidInput(format!("unknown export format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub surface: String,
    pub operation: Operation,
    pub steps: usize,
    pub nx: usize,
    pub ny: usize,
    pub steklov_tol: f64,
    pub match_tol: f64,
    /// relative tolerance of the total curvature target
    pub quad_tol: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    /// close the periodic direction in exported meshes
    pub wrap: bool,
    pub export: Vec<ExportFormat>,
    /// edge used by `reflect`
    pub edge: EdgeLabel,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: "critical-catenoid".into(),
            operation: Operation::Verify,
            steps: 2,
            nx: 32,
            ny: 64,
            steklov_tol: 1e-8,
            match_tol: 1e-8,
            quad_tol: 1e-2,
            out: std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: 1,
            threads: None,
            wrap: false,
            export: vec![],
            edge: EdgeLabel::Gamma1,
        }
    }
}

/// `NXxNY`, e.g. `64x32`.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("grid must look like NXxNY, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("{key}: not a number: {v:?}")))
        };
        let int = |v: &str| -> Result<u64> {
            v.parse::<u64>().map_err(|_| {
                Error::InvalidInput(format!("{key}: not a non-negative integer: {v:?}"))
            })
        };
        match key {
            "surface" => self.surface = value.to_string(),
            "operation" => self.operation = value.parse()?,
            "steps" => self.steps = int(value)? as usize,
            "grid" => (self.nx, self.ny) = parse_grid(value)?,
            "steklov_tol" | "tol_steklov" => self.steklov_tol = num(value)?,
            "match_tol" => self.match_tol = num(value)?,
            "quad_tol" => self.quad_tol = num(value)?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = int(value)?,
            "threads" => self.threads = Some(int(value)? as usize),
            "wrap" => {
                self.wrap = value.parse().map_err(|_| {
                    Error::InvalidInput(format!("wrap: expected true or false, got {value:?}"))
                })?
            }
            "export" => {
                self.export = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "edge" => self.edge = value.parse()?,
            _ => return Err(Error::InvalidInput(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be at least 8x8, got {}x{}",
                self.nx, self.ny
            )));
        }
        for (name, v) in [
            ("steklov_tol", self.steklov_tol),
            ("match_tol", self.match_tol),
            ("quad_tol", self.quad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
    Above,
    /// measured and recorded, never fails
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

impl Check {
    pub fn compare(
        name: impl Into<String>,
        value: f64,
        relation: Relation,
        tolerance: f64,
        note: impl Into<String>,
    ) -> Check {
        let ok = match relation {
            Relation::AtMost => value <= tolerance,
            Relation::AtLeast => value >= tolerance,
            Relation::Below => value < tolerance,
            Relation::Above => value > tolerance,
            Relation::Report => true,
        };
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value,
            tolerance,
            relation,
            note: note.into(),
            location: None,
        }
    }

    pub fn at_most(
        name: impl Into<String>,
        value: f64,
        tolerance: f64,
        note: impl Into<String>,
    ) -> Check {
        Check::compare(name, value, Relation::AtMost, tolerance, note)
    }

    pub fn report(name: impl Into<String>, value: f64, note: impl Into<String>) -> Check {
        Check::compare(name, value, Relation::Report, f64::NAN, note)
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Skipped,
            value: f64::NAN,
            tolerance: f64::NAN,
            relation: Relation::Report,
            note: note.into(),
            location: None,
        }
    }

    pub fn failed(name: impl Into<String>, err: &Error) -> Check {
        Check {
            name: name.into(),
            status: Status::Fail,
            value: f64::NAN,
            tolerance: f64::NAN,
            relation: Relation::Report,
            note: err.to_string(),
            location: None,
        }
    }

    pub fn at(mut self, location: impl Into<String>) -> Check {
        if self.status == Status::Fail {
            self.location = Some(location.into());
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub surface: String,
    pub operation: Operation,
    pub seed: u64,
    pub steps: usize,
    pub grid: (usize, usize),
    pub checks: Vec<Check>,
    pub lineage: String,
    pub bounds: (i64, i64),
    pub y_range: (f64, f64),
    pub punctures: Vec<(f64, f64, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<Value>,
    pub files: Vec<String>,
    pub timestamp: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// Pretty JSON with every float printed to 17 significant digits.
struct ExactFloats(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        ExactFloats(serde_json::ser::PrettyFormatter::new()),
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn v3(v: Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

pub fn curvature_json(r: &CurvatureReport) -> Value {
    json!({
        "beta_sup": r.hopf.beta_max,
        "alpha_mean": r.hopf.alpha_mean,
        "alpha_std": r.hopf.alpha_std,
        "alpha_spread": r.hopf.alpha_spread,
        "c_estimate": r.hopf.alpha_mean,
        "hopf_holomorphy": r.hopf_holomorphy,
        "k_max": r.k_max,
        "k_min": r.k_min,
        "h_mean_max": r.h_mean_max,
        "gauss_formula_residual": r.gauss_residual_max,
        "k_identity": r.k_identity,
        "boundary_relations": r.boundary.iter().map(|b| json!({
            "edge": b.label.to_string(),
            "radius": b.radius,
            "sigma": b.sigma,
            "x_rho": b.x_rho,
            "log_factor": b.log_factor,
            "beta": b.beta,
        })).collect::<Vec<_>>(),
        "total_curvature": {
            "value": r.total_curvature.value,
            "tail": r.total_curvature.tail,
            "total": r.total_curvature.total,
            "fit_residual": r.total_curvature.fit_residual,
        },
        "edges": r.edges.iter().map(|e| json!({
            "edge": e.label.to_string(),
            "steklov": e.steklov,
            "flux": v3(e.flux.flux),
            "position_integral": v3(e.flux.position_integral),
            "convexity_min": e.convexity.indicator,
            "geodesic_curvature": [e.convexity.min_geodesic_curvature, e.convexity.max_geodesic_curvature],
        })).collect::<Vec<_>>(),
        "flux_sum": v3(r.flux_sum),
        "schwarz_max": r.schwarz_max,
        "conformality_max": r.conformality_max,
        "seam_value_max": r.seam_value_max,
        "seam_derivative_max": r.seam_derivative_max,
        "superharmonic": {
            "samples": r.superharmonic.samples,
            "lap_r2_minus_4": r.superharmonic.lap_r2,
            "lap_neg_log_r_max": r.superharmonic.lap_neg_log_r_max,
            "lap_neg_log_r_min": r.superharmonic.lap_neg_log_r_min,
            "fd_discrepancy": r.superharmonic.fd_discrepancy,
            "boundary_k": r.superharmonic.boundary_k,
            "boundary_dk": r.superharmonic.boundary_dk,
        },
        "curvature_lines": {
            "status": match r.curvature_lines.status { CheckStatus::Applied => "applied", CheckStatus::Skipped => "skipped" },
            "scale": r.curvature_lines.scale,
            "first_form": r.curvature_lines.first_form,
            "second_form": r.curvature_lines.second_form,
            "diagonalization": r.curvature_lines.diagonalization,
        },
        "gauss_map_min_angle": r.gauss_map_min_angle,
    })
}

/// One object group of an exported mesh.
#[derive(Clone)]
pub struct MeshPiece {
    pub name: String,
    pub map: Arc<dyn SurfaceMap>,
    pub y_range: (f64, f64),
    pub period: f64,
    /// normalization used for the `X, Y` columns of the grid export
    pub normalization: Option<NormalizationMap>,
}

impl fmt::Debug for MeshPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeshPiece")
            .field("name", &self.name)
            .field("y_range", &self.y_range)
            .finish()
    }
}

pub fn surface_piece(surface: &AnalyticSurface) -> MeshPiece {
    MeshPiece {
        name: surface.name.clone(),
        map: surface.map.clone(),
        y_range: (surface.domain.y_lo, surface.domain.y_hi),
        period: surface.domain.period,
        normalization: surface.edges.first().and_then(|e| {
            normalize_edge(surface, e.label, crate::harmonic_series::DEFAULT_MODES).ok()
        }),
    }
}

pub fn patch_piece(name: String, patch: &Arc<ReflectedPatch>, band: (f64, f64)) -> MeshPiece {
    MeshPiece {
        name,
        map: patch.clone(),
        y_range: band,
        period: patch.period,
        normalization: Some(patch.normalization.clone()),
    }
}

/// Original surface first, then one piece per reflection step.
pub fn extension_pieces(ext: &ExtendedSurface) -> Vec<MeshPiece> {
    let mut out = vec![surface_piece(&ext.original)];
    for (k, e) in ext.patches.iter().enumerate() {
        out.push(patch_piece(
            format!("step{}-{}", k + 1, e.patch.edge.label),
            &e.patch,
            e.band,
        ));
    }
    out
}

fn grid_x(period: f64, i: usize, nx: usize, wrap: bool) -> f64 {
    if wrap {
        period * i as f64 / nx as f64
    } else {
        period * i as f64 / (nx - 1) as f64
    }
}

fn grid_y(range: (f64, f64), j: usize, ny: usize) -> f64 {
    range.0 + (range.1 - range.0) * j as f64 / (ny - 1) as f64
}

fn check_resolution(nx: usize, ny: usize) -> Result<()> {
    if nx < 8 || ny < 8 {
        return Err(Error::InvalidInput(format!(
            "mesh resolution must be at least 8x8, got {nx}x{ny}"
        )));
    }
    Ok(())
}

/// Wavefront OBJ: row-major vertices per piece, each grid quad split into
/// two triangles, one `o` group per piece. With `wrap` the periodic
/// direction is sampled without the duplicate seam column and closed.
pub fn export_mesh(pieces: &[MeshPiece], nx: usize, ny: usize, wrap: bool) -> Result<String> {
    use std::fmt::Write;
    check_resolution(nx, ny)?;
    let mut out = String::new();
    let mut base = 1usize;
    for p in pieces {
        let _ = writeln!(out, "o {}", p.name);
        for j in 0..ny {
            let y = grid_y(p.y_range, j, ny);
            for i in 0..nx {
                let v = p.map.jet(grid_x(p.period, i, nx, wrap), y)?.pos;
                let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
            }
        }
        let cols = if wrap { nx } else { nx - 1 };
        for j in 0..ny - 1 {
            for i in 0..cols {
                let a = base + j * nx + i;
                let b = base + j * nx + (i + 1) % nx;
                let c = a + nx;
                let d = b + nx;
                let _ = writeln!(out, "f {a} {b} {d}");
                let _ = writeln!(out, "f {a} {d} {c}");
            }
        }
        base += nx * ny;
    }
    Ok(out)
}

/// CSV grid with columns `x,y,X,Y,psi1,psi2,psi3`; `X + iY` is the
/// piece's normalized coordinate, or `x + iy` when it has none.
pub fn export_grid(pieces: &[MeshPiece], nx: usize, ny: usize) -> Result<String> {
    use std::fmt::Write;
    check_resolution(nx, ny)?;
    let mut out = String::from("x,y,X,Y,psi1,psi2,psi3\n");
    for p in pieces {
        for j in 0..ny {
            let y = grid_y(p.y_range, j, ny);
            for i in 0..nx {
                let x = grid_x(p.period, i, nx, true);
                let z = Complex64::new(x, y);
                let zz = match &p.normalization {
                    Some(n) => n.eval(n.chart.to_chart(z))?,
                    None => z,
                };
                let v = p.map.jet(x, y)?.pos;
                let _ = writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    x, y, zz.re, zz.im, v.x, v.y, v.z
                );
            }
        }
    }
    Ok(out)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| {
        Error::Io(io::Error::new(
            e.kind(),
            format!("cannot write {}: {e}", path.display()),
        ))
    })
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub files: Vec<PathBuf>,
    /// 0 when every asserted check passes, 1 otherwise
    pub exit_code: i32,
}

/// Which checks apply to a surface: annulus-only claims are skipped for
/// surfaces with fewer than two free boundaries.
fn is_annulus(s: &AnalyticSurface) -> bool {
    s.edges.len() == 2
}

fn reflect_options(cfg: &RunConfig) -> ReflectOptions {
    ReflectOptions {
        steklov_tol: cfg.steklov_tol,
        match_tol: cfg.match_tol,
        ..ReflectOptions::default()
    }
}

fn invariant_checks(s: &AnalyticSurface, cfg: &RunConfig, checks: &mut Vec<Check>) -> Result<()> {
    let inv = check_invariants(s, 1000, cfg.seed)?;
    checks.push(Check::at_most(
        "surface.harmonic",
        inv.harmonic,
        1e-10,
        "max |ΔΨ|/F² at random interior points",
    ));
    checks.push(Check::at_most(
        "surface.conformal",
        inv.conformal,
        1e-10,
        "max conformality defect",
    ));
    checks.push(Check::at_most(
        "surface.sphere",
        inv.sphere,
        1e-10,
        "max ||Ψ|-1| along free boundaries",
    ));
    Ok(())
}

/// Steklov check per edge; returns whether all edges passed.
fn steklov_checks(s: &AnalyticSurface, cfg: &RunConfig, checks: &mut Vec<Check>) -> Result<bool> {
    let mut ok = true;
    if s.edges.is_empty() {
        checks.push(Check::skipped("steklov", "surface has no free boundary"));
        return Ok(false);
    }
    for e in &s.edges {
        let r = steklov_residual(s, e.label, 256)?;
        let c = Check::at_most(
            format!("steklov.{}", e.label),
            r.max,
            cfg.steklov_tol,
            "sup |Ψ - ∂Ψ/∂ν| along the edge",
        )
        .at(format!("x = {:.16e}", r.worst_x));
        ok &= c.status == Status::Pass;
        checks.push(c);
        checks.push(Check::at_most(
            format!("steklov.{}.sphere", e.label),
            r.sphere,
            1e-8,
            "edge lies on the unit sphere",
        ));
    }
    Ok(ok)
}

fn patch_checks(prefix: &str, p: &ReflectedPatch, cfg: &RunConfig, checks: &mut Vec<Check>) {
    let r = p.residuals;
    let loc = format!("edge {}", p.edge.label);
    for (name, v, tol, note) in [
        (
            "schwarz",
            r.schwarz,
            1e-8,
            "Schwarz condition on the axis, relative",
        ),
        (
            "axis_match",
            r.axis_match,
            cfg.match_tol,
            "reflected data against axis data, relative",
        ),
        ("ode", r.ode, 1e-8, "reflection ODE identity, relative"),
        (
            "conformality",
            r.conformality,
            1e-8,
            "conformality defect of the patch",
        ),
        (
            "seam_value",
            r.seam_value,
            1e-8,
            "patch against surface on the seam",
        ),
        (
            "seam_derivative",
            r.seam_derivative,
            1e-8,
            "first derivatives across the seam",
        ),
    ] {
        checks.push(Check::at_most(format!("{prefix}.{name}"), v, tol, note).at(loc.clone()));
    }
}

fn geometry_checks(
    s: &AnalyticSurface,
    r: &CurvatureReport,
    cfg: &RunConfig,
    checks: &mut Vec<Check>,
) {
    let annulus = is_annulus(s);
    let skip = |name: &str, checks: &mut Vec<Check>| {
        checks.push(Check::skipped(name, "requires a free-boundary annulus"));
    };
    checks.push(Check::at_most(
        "geometry.minimality",
        r.h_mean_max,
        1e-6,
        "sup |H|",
    ));
    checks.push(Check::at_most(
        "geometry.gauss_formulas",
        r.gauss_residual_max,
        1e-8,
        "Gauss formula residual, relative",
    ));
    checks.push(Check::at_most(
        "hopf.holomorphy",
        r.hopf_holomorphy,
        1e-6,
        "finite-difference ∂/∂w̄ of w²f, relative",
    ));
    if annulus {
        checks.push(Check::at_most(
            "hopf.beta",
            r.hopf.beta_max,
            1e-6,
            "sup |β| on the plane model",
        ));
        checks.push(Check::at_most(
            "hopf.alpha_spread",
            r.hopf.alpha_spread,
            1e-6,
            "max |α - mean| / |mean|",
        ));
        checks.push(Check::compare(
            "curvature.k_negative",
            r.k_max,
            Relation::Below,
            0.0,
            "max K over the sample grid",
        ));
        checks.push(Check::at_most(
            "curvature.k_identity",
            r.k_identity,
            1e-6,
            "K = -|c|²/(|w|⁴Λ²), relative",
        ));
        let t = r.total_curvature.total;
        let target = -4.0 * std::f64::consts::PI;
        checks.push(Check::at_most(
            "curvature.total",
            (t - target).abs(),
            cfg.quad_tol * target.abs(),
            format!("|∫K dA + tail + 4π|; total {t:.16e}"),
        ));
    } else {
        for n in [
            "hopf.beta",
            "hopf.alpha_spread",
            "curvature.k_negative",
            "curvature.k_identity",
            "curvature.total",
        ] {
            skip(n, checks);
        }
    }
    checks.push(Check::report(
        "curvature.fit_residual",
        r.total_curvature.fit_residual,
        "tail fit at a third row",
    ));
    for b in &r.boundary {
        let loc = format!("circle rho = {:.16e}", b.radius);
        checks.push(
            Check::at_most(
                format!("boundary.{}.x_rho", b.label),
                b.x_rho,
                1e-6,
                "X_ρ = σ√Λ X",
            )
            .at(loc.clone()),
        );
        checks.push(
            Check::at_most(
                format!("boundary.{}.log_factor", b.label),
                b.log_factor,
                1e-6,
                "1/ρ + F_ρ/F = σF",
            )
            .at(loc.clone()),
        );
        checks.push(
            Check::at_most(
                format!("boundary.{}.beta", b.label),
                b.beta,
                1e-6,
                "β on the circle",
            )
            .at(loc),
        );
    }
    if annulus {
        checks.push(Check::at_most(
            "flux.sum",
            r.flux_sum.norm(),
            1e-8,
            "|Σ flux| over free boundaries",
        ));
    } else if !s.edges.is_empty() {
        checks.push(Check::report(
            "flux.sum",
            r.flux_sum.norm(),
            "|Σ flux| over free boundaries",
        ));
    }
    for e in &r.edges {
        checks.push(Check::at_most(
            format!("flux.{}.position_identity", e.label),
            (e.flux.flux - e.flux.position_integral).norm(),
            1e-8,
            "∫∂Ψ/∂ν ds = ∫Ψ ds",
        ));
        if annulus {
            checks.push(Check::compare(
                format!("convexity.{}", e.label),
                e.convexity.indicator,
                Relation::Above,
                0.0,
                "min geodesic curvature on the sphere",
            ));
        } else {
            checks.push(Check::report(
                format!("convexity.{}", e.label),
                e.convexity.indicator,
                "min geodesic curvature on the sphere",
            ));
        }
    }
    let sh = &r.superharmonic;
    checks.push(Check::at_most(
        "superharmonic.lap_r2",
        sh.lap_r2,
        1e-6,
        "sup |Δr² - 4|",
    ));
    checks.push(Check::at_most(
        "superharmonic.lap_neg_log_r",
        sh.lap_neg_log_r_max,
        1e-9,
        "sup Δ(-log r)",
    ));
    checks.push(Check::at_most(
        "superharmonic.fd_cross_check",
        sh.fd_discrepancy,
        1e-6,
        "exact vs finite-difference Δr²",
    ));
    if !s.edges.is_empty() {
        checks.push(Check::at_most(
            "superharmonic.boundary_k",
            sh.boundary_k,
            1e-8,
            "sup |k| on free boundaries",
        ));
        checks.push(Check::at_most(
            "superharmonic.boundary_dk",
            sh.boundary_dk,
            1e-8,
            "sup |∂k/∂ν - 1|",
        ));
    }
    let cl = &r.curvature_lines;
    match cl.status {
        CheckStatus::Applied => {
            checks.push(Check::at_most(
                "curvature_lines.first_form",
                cl.first_form,
                1e-6,
                "I = (1/κ)(dx² + dy²)",
            ));
            checks.push(Check::at_most(
                "curvature_lines.second_form",
                cl.second_form,
                1e-6,
                "II = ±(dx² - dy²)",
            ));
        }
        CheckStatus::Skipped => checks.push(Check::skipped(
            "curvature_lines",
            "K < 0 fails on the sample grid",
        )),
    }
    checks.push(Check::report(
        "curvature_lines.diagonalization",
        cl.diagonalization,
        "sup |ℳ| / max(|ℒ|, |𝒩|)",
    ));
    checks.push(Check::report(
        "gauss_map.min_angle",
        r.gauss_map_min_angle,
        "smallest angle between normals at distinct samples",
    ));
}

/// Steps actually taken: alternating reflection needs both edges.
fn effective_steps(s: &AnalyticSurface, steps: usize) -> usize {
    match s.edges.len() {
        0 => 0,
        1 => steps.min(1),
        _ => steps,
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Execute one configured operation, writing `report.json`, `timings.json`
/// and any requested exports into `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(|| run_inner(cfg)),
        None => run_inner(cfg),
    }
}

fn run_inner(cfg: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut timings: Vec<(String, f64)> = Vec::new();
    let mut lap = |name: &str, t: &mut Instant| {
        timings.push((name.to_string(), t.elapsed().as_secs_f64()));
        *t = Instant::now();
    };
    let mut t = Instant::now();
    let surface = from_selector(&cfg.surface)?;
    fs::create_dir_all(&cfg.out)?;
    let mut checks = Vec::new();
    let mut ext = ExtendedSurface::from_surface(&surface);
    let mut coverage = None;
    let mut curvature = None;
    let mut files = Vec::new();
    let opts = reflect_options(cfg);
    let gopts = GeometryOptions {
        nx: cfg.nx,
        ny: cfg.ny,
        samples: 1000,
        seed: cfg.seed,
    };
    lap("load", &mut t);

    match cfg.operation {
        Operation::Reflect => {
            steklov_checks(&surface, cfg, &mut checks)?;
            match reflect_patch(&surface, cfg.edge, &opts) {
                Ok(p) => {
                    patch_checks(&format!("reflect.{}", cfg.edge), &p, cfg, &mut checks);
                    let bounds = match p.edge.position {
                        crate::catalog::EdgePosition::Lower => (-1, 1),
                        crate::catalog::EdgePosition::Upper => (0, 2),
                    };
                    ext.patches.push(crate::extension::PatchEntry {
                        band: p.y_range,
                        patch: Arc::new(p),
                        bounds,
                    });
                    ext.bounds = bounds;
                    ext.lineage.push(cfg.edge);
                }
                Err(e) => checks.push(Check::failed(format!("reflect.{}", cfg.edge), &e)),
            }
            lap("reflect", &mut t);
        }
        Operation::Extend | Operation::ExportMesh => {
            let n = effective_steps(&surface, cfg.steps);
            match extend_with(&surface, n, &opts) {
                Ok(e) => {
                    for (k, p) in e.patches.iter().enumerate() {
                        patch_checks(&format!("extend.step{}", k + 1), &p.patch, cfg, &mut checks);
                    }
                    checks.push(Check::at_most(
                        "extend.punctures",
                        e.punctures.total_multiplicity() as f64,
                        0.0,
                        "branch points of the normalization maps",
                    ));
                    ext = e;
                }
                Err(e) => checks.push(Check::failed("extend", &e)),
            }
            if cfg.operation == Operation::Extend {
                let cov = coverage_monitor(&ext, cfg.nx)?;
                coverage = Some(Value::Array(
                    cov.iter()
                        .map(|c| {
                            json!({
                                "step": c.step,
                                "edge": c.edge.map(|e| e.to_string()),
                                "bounds": [c.bounds.0, c.bounds.1],
                                "y_range": [c.y_range.0, c.y_range.1],
                                "abs_curvature": c.abs_curvature,
                            })
                        })
                        .collect(),
                ));
            }
            lap("extend", &mut t);
        }
        Operation::Verify | Operation::Report => {
            invariant_checks(&surface, cfg, &mut checks)?;
            let fb = steklov_checks(&surface, cfg, &mut checks)?;
            lap("steklov", &mut t);
            if fb {
                for e in &surface.edges {
                    match reflect_patch(&surface, e.label, &opts) {
                        Ok(p) => {
                            patch_checks(&format!("reflect.{}", e.label), &p, cfg, &mut checks)
                        }
                        Err(err) => {
                            checks.push(Check::failed(format!("reflect.{}", e.label), &err))
                        }
                    }
                }
                let n = effective_steps(&surface, cfg.steps);
                match extend_with(&surface, n, &opts) {
                    Ok(e) => {
                        checks.push(Check::at_most(
                            "extend.punctures",
                            e.punctures.total_multiplicity() as f64,
                            0.0,
                            "branch points of the normalization maps",
                        ));
                        ext = e;
                    }
                    Err(err) => checks.push(Check::failed("extend", &err)),
                }
            } else {
                checks.push(Check::skipped("reflect", "free boundary condition not met"));
                checks.push(Check::skipped("extend", "free boundary condition not met"));
            }
            lap("reflect", &mut t);
            let r = curvature_report(&ext, &gopts)?;
            geometry_checks(&surface, &r, cfg, &mut checks);
            curvature = Some(curvature_json(&r));
            lap("geometry", &mut t);
        }
    }

    let pieces_needed = cfg.operation == Operation::ExportMesh || !cfg.export.is_empty();
    if pieces_needed {
        let pieces = extension_pieces(&ext);
        let mut formats = cfg.export.clone();
        if cfg.operation == Operation::ExportMesh && formats.is_empty() {
            formats = vec![ExportFormat::Obj, ExportFormat::Csv];
        }
        for f in formats {
            let (name, text) = match f {
                ExportFormat::Obj => ("mesh.obj", export_mesh(&pieces, cfg.nx, cfg.ny, cfg.wrap)?),
                ExportFormat::Csv => ("grid.csv", export_grid(&pieces, cfg.nx, cfg.ny)?),
            };
            let path = cfg.out.join(name);
            write_file(&path, &text)?;
            files.push(path);
        }
        lap("export", &mut t);
    }

    let report = VerificationReport {
        surface: surface.name.clone(),
        operation: cfg.operation,
        seed: cfg.seed,
        steps: ext.steps(),
        grid: (cfg.nx, cfg.ny),
        checks,
        lineage: ext.lineage_string(),
        bounds: ext.bounds,
        y_range: ext.y_range(),
        punctures: ext
            .punctures
            .points
            .iter()
            .map(|p| (p.z.re, p.z.im, p.multiplicity))
            .collect(),
        coverage,
        curvature,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        timestamp: unix_time(),
    };
    let path = cfg.out.join("report.json");
    write_file(&path, &report.to_json()?)?;
    files.push(path);
    timings.push(("total".into(), start.elapsed().as_secs_f64()));
    let tpath = cfg.out.join("timings.json");
    let tj: serde_json::Map<String, Value> =
        timings.into_iter().map(|(k, v)| (k, json!(v))).collect();
    write_file(&tpath, &to_json_string(&tj)?)?;
    files.push(tpath);

    let exit_code = match cfg.operation {
        Operation::Report => 0,
        _ if report.passed() => 0,
        _ => 1,
    };
    Ok(RunOutcome {
        report,
        files,
        exit_code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::plane;

    #[test]
    fn mesh_counts() {
        let p = surface_piece(&plane(1.0, 1.0));
        let obj = export_mesh(&[p.clone()], 8, 8, false).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 98);
        let obj = export_mesh(&[p.clone(), p], 8, 8, true).unwrap();
        assert_eq!(
            obj.lines().filter(|l| l.starts_with("f ")).count(),
            2 * 2 * 8 * 7
        );
        assert_eq!(obj.lines().filter(|l| l.starts_with("o ")).count(), 2);
        assert!(obj.contains("f 65 66 74"));
    }

    #[test]
    fn config_text_and_validation() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\nsurface = equatorial-disk\ngrid = 16x12\nsteps=3\nexport = obj, csv\n",
        )
        .unwrap();
        assert_eq!((c.nx, c.ny, c.steps), (16, 12, 3));
        assert_eq!(c.export, vec![ExportFormat::Obj, ExportFormat::Csv]);
        let err = c.apply_text("seed = 1\nsteps = -2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        c.nx = 4;
        assert!(c.validate().is_err());
        assert!(parse_grid("12by4").is_err());
    }

    #[test]
    fn floats_print_seventeen_digits() {
        let s = to_json_string(&json!({"a": 0.1, "b": f64::NAN})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("null"));
    }
}
