//! Repeated reflection across the two free boundaries of an annulus, and
//! the punctured-plane model `w = e^{-2πiz/L}` of the result.

use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::{AnalyticSurface, EdgeLabel, EdgePosition, StripDomain, SurfaceMap};
use crate::error::{Error, Result};
use crate::geometry::integrate_rows;
use crate::isothermal::{find_branch_points, PunctureSet, Rect, DEFAULT_EXCLUSION};
use crate::jet::Jet;
use crate::reflection::{reflect_patch, ReflectOptions, ReflectedPatch};

/// A reflected patch together with the band it contributes.
#[derive(Debug, Clone)]
pub struct PatchEntry {
    pub patch: Arc<ReflectedPatch>,
    /// Newly covered source `y` band.
    pub band: (f64, f64),
    /// Bounds after this step, in multiples of the strip height.
    pub bounds: (i64, i64),
}

/// The original surface with an ordered list of reflected patches.
#[derive(Debug, Clone)]
pub struct ExtendedSurface {
    pub original: AnalyticSurface,
    pub patches: Vec<PatchEntry>,
    /// Strip bounds in multiples of the original height `a`.
    pub bounds: (i64, i64),
    pub lineage: Vec<EdgeLabel>,
    pub punctures: PunctureSet,
}

#[derive(Debug)]
struct ExtendedMap {
    original: Arc<dyn SurfaceMap>,
    core: (f64, f64),
    patches: Vec<(Arc<ReflectedPatch>, (f64, f64))>,
    range: (f64, f64),
}

impl SurfaceMap for ExtendedMap {
    fn jet(&self, x: f64, y: f64) -> Result<Jet> {
        let tol = 1e-12 * (1.0 + y.abs());
        if y >= self.core.0 - tol && y <= self.core.1 + tol {
            return self.original.jet(x, y);
        }
        for (p, band) in &self.patches {
            if y >= band.0 - tol && y <= band.1 + tol {
                return p.jet(x, y);
            }
        }
        Err(Error::OutOfDomain {
            y,
            lo: self.range.0,
            hi: self.range.1,
        })
    }
}

impl ExtendedSurface {
    pub fn from_surface(surface: &AnalyticSurface) -> Self {
        ExtendedSurface {
            original: surface.clone(),
            patches: vec![],
            bounds: (0, 1),
            lineage: vec![],
            punctures: PunctureSet::empty(DEFAULT_EXCLUSION),
        }
    }

    /// Height `a` of the original strip.
    pub fn height(&self) -> f64 {
        self.original.domain.height()
    }

    pub fn steps(&self) -> usize {
        self.lineage.len()
    }

    pub fn period(&self) -> f64 {
        self.original.domain.period
    }

    /// Source `y` range covered.
    pub fn y_range(&self) -> (f64, f64) {
        let (a, y0) = (self.height(), self.original.domain.y_lo);
        (y0 + self.bounds.0 as f64 * a, y0 + self.bounds.1 as f64 * a)
    }

    pub fn lineage_string(&self) -> String {
        self.lineage
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// The extension as one surface over the widened strip; its edges are
    /// the original free boundaries, now interior lines.
    pub fn as_surface(&self) -> AnalyticSurface {
        let range = self.y_range();
        let d = self.original.domain;
        AnalyticSurface {
            map: Arc::new(ExtendedMap {
                original: self.original.map.clone(),
                core: (d.y_lo, d.y_hi),
                patches: self
                    .patches
                    .iter()
                    .map(|e| (e.patch.clone(), e.band))
                    .collect(),
                range,
            }),
            domain: StripDomain {
                y_lo: range.0,
                y_hi: range.1,
                period: d.period,
            },
            edges: self.original.edges.clone(),
            name: if self.lineage.is_empty() {
                self.original.name.clone()
            } else {
                format!("{}[{}]", self.original.name, self.lineage_string())
            },
            params: self.original.params.clone(),
        }
    }

    /// Source `y` band of each piece: original first, then patches.
    pub fn pieces(&self) -> Vec<(String, (f64, f64))> {
        let d = self.original.domain;
        let mut out = vec![(self.original.name.clone(), (d.y_lo, d.y_hi))];
        for (k, e) in self.patches.iter().enumerate() {
            out.push((format!("step{}-{}", k + 1, e.patch.edge.label), e.band));
        }
        out
    }

    /// One more reflection, across `γ1` on odd steps and `γ2` on even ones.
    pub fn step(&self, opts: &ReflectOptions) -> Result<ExtendedSurface> {
        let n = self.lineage.len() + 1;
        let label = if n % 2 == 1 {
            EdgeLabel::Gamma1
        } else {
            EdgeLabel::Gamma2
        };
        let view = self.as_surface();
        let edge = view.edge(label)?;
        let patch = reflect_patch(&view, label, opts)?;
        let (lo, hi) = self.bounds;
        let (y_lo, y_hi) = self.y_range();
        let (bounds, band) = match edge.position {
            EdgePosition::Lower => ((-hi, hi), (2.0 * edge.y - y_hi, y_lo)),
            EdgePosition::Upper => ((lo, 2 - lo), (y_hi, 2.0 * edge.y - y_lo)),
        };
        let chart = patch.chart();
        let depth = patch.y_range.1 - patch.y_range.0;
        let (nx, ny) = (16, 16);
        let found = find_branch_points(
            &patch.normalization.h,
            Rect {
                x0: 0.0,
                x1: self.period(),
                y0: -depth,
                y1: depth,
            },
            nx,
            ny,
        )?;
        let mut punctures = self.punctures.clone();
        let mapped = PunctureSet {
            points: found
                .points
                .iter()
                .map(|p| crate::isothermal::Puncture {
                    z: chart.to_source(p.z),
                    multiplicity: p.multiplicity,
                })
                .collect(),
            exclusion_radius: found.exclusion_radius,
            winding_total: found.winding_total,
        };
        punctures.merge(&mapped);
        let mut next = self.clone();
        next.patches.push(PatchEntry {
            patch: Arc::new(patch),
            band,
            bounds,
        });
        next.bounds = bounds;
        next.lineage.push(label);
        next.punctures = punctures;
        Ok(next)
    }
}

/// Reflect `steps` times, alternating `γ1`, `γ2`, `γ1`, ...
pub fn extend(surface: &AnalyticSurface, steps: usize) -> Result<ExtendedSurface> {
    extend_with(surface, steps, &ReflectOptions::default())
}

pub fn extend_with(
    surface: &AnalyticSurface,
    steps: usize,
    opts: &ReflectOptions,
) -> Result<ExtendedSurface> {
    let mut ext = ExtendedSurface::from_surface(surface);
    for _ in 0..steps {
        ext = ext.step(opts).map_err(|err| Error::Extension {
            completed: ext.lineage_string(),
            source: Box::new(err),
        })?;
    }
    Ok(ext)
}

/// The extension over the punctured plane: `w = e^{-2πiz/L}`, so
/// `|w| = e^{2πy/L}`.
#[derive(Debug, Clone)]
pub struct PlaneModel {
    pub surface: AnalyticSurface,
    pub period: f64,
    pub punctures: Vec<Complex64>,
    pub exclusion_radius: f64,
}

pub fn to_punctured_plane(ext: &ExtendedSurface) -> PlaneModel {
    let surface = ext.as_surface();
    let period = ext.period();
    let punctures = ext
        .punctures
        .points
        .iter()
        .map(|p| PlaneModel::w_of(period, p.z))
        .collect();
    PlaneModel {
        surface,
        period,
        punctures,
        exclusion_radius: ext.punctures.exclusion_radius,
    }
}

impl PlaneModel {
    fn w_of(period: f64, z: Complex64) -> Complex64 {
        (-Complex64::i() * z * (2.0 * std::f64::consts::PI / period)).exp()
    }

    pub fn w(&self, z: Complex64) -> Complex64 {
        Self::w_of(self.period, z)
    }

    /// Principal branch of `z = (L/2π) i log w`.
    pub fn z(&self, w: Complex64) -> Complex64 {
        Complex64::i() * w.ln() * (self.period / (2.0 * std::f64::consts::PI))
    }

    /// Radii `(ρ_lo, ρ_hi)` of the annulus covered.
    pub fn radii(&self) -> (f64, f64) {
        let k = 2.0 * std::f64::consts::PI / self.period;
        let d = self.surface.domain;
        ((k * d.y_lo).exp(), (k * d.y_hi).exp())
    }

    /// Radius of the circle that is the image of `y = const`.
    pub fn radius_of(&self, y: f64) -> f64 {
        (2.0 * std::f64::consts::PI * y / self.period).exp()
    }

    /// Jet in the coordinates `w = u + iv`.
    pub fn jet_w(&self, w: Complex64) -> Result<Jet> {
        for p in &self.punctures {
            if (w - p).norm() < self.exclusion_radius {
                return Err(Error::InsidePuncture {
                    point: w,
                    puncture: *p,
                });
            }
        }
        let k = self.period / (2.0 * std::f64::consts::PI);
        let z = self.z(w);
        let g1 = Complex64::i() * k / w;
        let g2 = -Complex64::i() * k / (w * w);
        Ok(self.surface.jet(z.re, z.im)?.reparam(g1, g2))
    }
}

impl SurfaceMap for PlaneModel {
    fn jet(&self, u: f64, v: f64) -> Result<Jet> {
        self.jet_w(Complex64::new(u, v))
    }
}

/// Growth of the extension step by step.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRecord {
    pub step: usize,
    pub edge: Option<EdgeLabel>,
    pub bounds: (i64, i64),
    pub y_range: (f64, f64),
    /// Cumulative `∫|K| dA` over the covered region.
    pub abs_curvature: f64,
}

/// Cumulative `∫|K| dA` after each step, integrating only the new band.
pub fn coverage_monitor(ext: &ExtendedSurface, nx: usize) -> Result<Vec<CoverageRecord>> {
    let surf = ext.as_surface();
    let map = surf.map.as_ref();
    let period = ext.period();
    let abs_k = |j: &Jet| -> f64 {
        crate::geometry::forms_from_jet(j)
            .map(|f| (f.k * f.lambda).abs())
            .unwrap_or(0.0)
    };
    let d = ext.original.domain;
    let mut total = integrate_rows(map, period, d.y_lo, d.y_hi, nx, &abs_k)?;
    let mut out = vec![CoverageRecord {
        step: 0,
        edge: None,
        bounds: (0, 1),
        y_range: (d.y_lo, d.y_hi),
        abs_curvature: total,
    }];
    let a = ext.height();
    for (k, e) in ext.patches.iter().enumerate() {
        total += integrate_rows(map, period, e.band.0, e.band.1, nx, &abs_k)?;
        out.push(CoverageRecord {
            step: k + 1,
            edge: Some(e.patch.edge.label),
            bounds: e.bounds,
            y_range: (
                d.y_lo + e.bounds.0 as f64 * a,
                d.y_lo + e.bounds.1 as f64 * a,
            ),
            abs_curvature: total,
        });
    }
    Ok(out)
}
