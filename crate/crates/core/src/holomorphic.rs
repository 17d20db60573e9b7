//! Periodic holomorphic functions on a strip:
//! `Σ c_k e^{iω_k Z} + Σ r_k Z e^{iω_k Z} + Σ p_j Z^j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic_series::{poly_eval, HarmonicStripFunction, Mode, DEFAULT_GUARD};

const MERGE_TOL: f64 = 1e-12;

/// Coefficient of `e^{iωZ}` (or `Z e^{iωZ}` for secular terms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpMode {
    pub omega: f64,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicModel {
    modes: Vec<ExpMode>,
    secular: Vec<ExpMode>,
    poly: Vec<Complex64>,
    period: Option<f64>,
    strip: (f64, f64),
    guard: f64,
}

fn canonical(mut modes: Vec<ExpMode>) -> Vec<ExpMode> {
    modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let mut out: Vec<ExpMode> = Vec::with_capacity(modes.len());
    for m in modes {
        match out.last_mut() {
            Some(last) if (last.omega - m.omega).abs() <= MERGE_TOL * last.omega.abs().max(1.0) => {
                last.coeff += m.coeff;
            }
            _ => out.push(m),
        }
    }
    out.retain(|m| m.coeff.norm() != 0.0);
    out
}

fn add_poly(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or_default() + b.get(k).copied().unwrap_or_default())
        .collect()
}

impl HolomorphicModel {
    pub fn new(modes: Vec<ExpMode>, secular: Vec<ExpMode>, poly: Vec<Complex64>) -> Self {
        HolomorphicModel {
            modes: canonical(modes),
            secular: canonical(secular),
            poly,
            period: None,
            strip: (f64::NEG_INFINITY, f64::INFINITY),
            guard: DEFAULT_GUARD,
        }
    }

    pub fn zero() -> Self {
        Self::new(vec![], vec![], vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![], vec![], vec![c])
    }

    pub fn exp(omega: f64, coeff: Complex64) -> Self {
        Self::new(vec![ExpMode { omega, coeff }], vec![], vec![])
    }

    pub fn polynomial(poly: Vec<Complex64>) -> Self {
        Self::new(vec![], vec![], poly)
    }

    pub fn with_period(mut self, period: Option<f64>) -> Self {
        self.period = period;
        self
    }

    pub fn with_strip(mut self, lo: f64, hi: f64) -> Self {
        self.strip = (lo, hi);
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn modes(&self) -> &[ExpMode] {
        &self.modes
    }

    pub fn secular(&self) -> &[ExpMode] {
        &self.secular
    }

    pub fn poly(&self) -> &[Complex64] {
        &self.poly
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn strip(&self) -> (f64, f64) {
        self.strip
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Holomorphic `Φ` with `Re Φ = h`, written in the absolute coordinate
    /// `Z = x + iy`. The imaginary constant is left as produced by the
    /// mode conversion.
    pub fn from_harmonic(h: &HarmonicStripFunction) -> Self {
        let y0 = h.axis();
        let shift = Complex64::new(0.0, -y0); // ζ = Z - i y0
        let mut modes = Vec::new();
        let mut poly: Vec<Complex64> = vec![];
        for m in h.modes() {
            match *m {
                Mode::Constant(c) => poly = add_poly(&poly, &[Complex64::new(c, 0.0)]),
                Mode::Poly(ref q) => poly = add_poly(&poly, &shift_poly(q, shift)),
                Mode::Cosh { omega, a, b } => {
                    let up = (omega * y0).exp();
                    modes.push(ExpMode {
                        omega,
                        coeff: Complex64::new(a, -b) * (0.5 * up),
                    });
                    modes.push(ExpMode {
                        omega: -omega,
                        coeff: Complex64::new(a, b) * (0.5 / up),
                    });
                }
                Mode::Sinh { omega, a, b } => {
                    let up = (omega * y0).exp();
                    modes.push(ExpMode {
                        omega,
                        coeff: Complex64::new(-a, b) * (0.5 * up / omega),
                    });
                    modes.push(ExpMode {
                        omega: -omega,
                        coeff: Complex64::new(a, b) * (0.5 / (up * omega)),
                    });
                }
            }
        }
        HolomorphicModel::new(modes, vec![], poly)
            .with_period(Some(h.period()))
            .with_guard(h.guard())
    }

    fn check_guard(&self, z: Complex64) -> Result<()> {
        let w = self
            .modes
            .iter()
            .chain(self.secular.iter())
            .map(|m| (m.omega * z.im).abs())
            .fold(0.0, f64::max);
        if w > self.guard {
            return Err(Error::TruncationExit {
                omega_y: w,
                bound: self.guard,
            });
        }
        Ok(())
    }

    /// Value, first and second derivative at `z`.
    pub fn eval3(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        self.check_guard(z)?;
        let i = Complex64::i();
        let (mut v, mut d1, mut d2) = poly_eval(&self.poly, z);
        for m in &self.modes {
            let iw = i * m.omega;
            let e = m.coeff * (iw * z).exp();
            v += e;
            d1 += iw * e;
            d2 += iw * iw * e;
        }
        for m in &self.secular {
            let iw = i * m.omega;
            let e = m.coeff * (iw * z).exp();
            v += z * e;
            d1 += e + iw * z * e;
            d2 += 2.0 * iw * e + iw * iw * z * e;
        }
        Ok((v, d1, d2))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval3(z)?.0)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval3(z)?.1)
    }

    /// Exact derivative as a model.
    pub fn differentiate(&self) -> HolomorphicModel {
        let i = Complex64::i();
        let mut modes: Vec<ExpMode> = self
            .modes
            .iter()
            .map(|m| ExpMode {
                omega: m.omega,
                coeff: i * m.omega * m.coeff,
            })
            .collect();
        modes.extend(self.secular.iter().copied());
        let secular = self
            .secular
            .iter()
            .map(|m| ExpMode {
                omega: m.omega,
                coeff: i * m.omega * m.coeff,
            })
            .collect();
        let poly = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        self.rebuild(modes, secular, poly)
    }

    fn rebuild(
        &self,
        modes: Vec<ExpMode>,
        secular: Vec<ExpMode>,
        poly: Vec<Complex64>,
    ) -> HolomorphicModel {
        HolomorphicModel {
            modes: canonical(modes),
            secular: canonical(secular),
            poly,
            period: self.period,
            strip: self.strip,
            guard: self.guard,
        }
    }

    pub fn scale(&self, k: Complex64) -> HolomorphicModel {
        let sc = |v: &[ExpMode]| {
            v.iter()
                .map(|m| ExpMode {
                    omega: m.omega,
                    coeff: m.coeff * k,
                })
                .collect()
        };
        self.rebuild(
            sc(&self.modes),
            sc(&self.secular),
            self.poly.iter().map(|c| c * k).collect(),
        )
    }

    pub fn add(&self, other: &HolomorphicModel) -> HolomorphicModel {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().copied());
        let mut secular = self.secular.clone();
        secular.extend(other.secular.iter().copied());
        self.rebuild(modes, secular, add_poly(&self.poly, &other.poly))
    }

    pub fn add_constant(&self, c: Complex64) -> HolomorphicModel {
        self.rebuild(
            self.modes.clone(),
            self.secular.clone(),
            add_poly(&self.poly, &[c]),
        )
    }

    /// `Z ↦ conj(self(conj Z))`, the mirror image across the real axis.
    pub fn reflected(&self) -> HolomorphicModel {
        let flip = |v: &[ExpMode]| {
            v.iter()
                .map(|m| ExpMode {
                    omega: -m.omega,
                    coeff: m.coeff.conj(),
                })
                .collect()
        };
        let (lo, hi) = self.strip;
        HolomorphicModel {
            modes: canonical(flip(&self.modes)),
            secular: canonical(flip(&self.secular)),
            poly: self.poly.iter().map(|c| c.conj()).collect(),
            period: self.period,
            strip: (-hi, -lo),
            guard: self.guard,
        }
    }

    /// Coefficient of `e^{iωZ}` (zero if absent).
    pub fn coefficient(&self, omega: f64) -> Complex64 {
        self.modes
            .iter()
            .find(|m| (m.omega - omega).abs() <= MERGE_TOL * omega.abs().max(1.0))
            .map(|m| m.coeff)
            .unwrap_or_default()
    }

    /// Largest `|ω|` among nonzero terms.
    pub fn max_frequency(&self) -> f64 {
        self.modes
            .iter()
            .chain(self.secular.iter())
            .map(|m| m.omega.abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficients of `q(Z + shift)` in powers of `Z`.
fn shift_poly(q: &[Complex64], shift: Complex64) -> Vec<Complex64> {
    let n = q.len();
    let mut out = vec![Complex64::default(); n];
    for (k, &c) in q.iter().enumerate() {
        // c (Z + shift)^k = c Σ_j C(k,j) Z^j shift^(k-j)
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += c * binom * shift.powu((k - j) as u32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}
