use num_complex::Complex64;

use super::trig::{check_period, TrigPolynomial};
use crate::error::{Error, Result};

/// Default bound on `|ω_max (y - y0)|` before evaluation refuses.
pub const DEFAULT_GUARD: f64 = 30.0;

/// One term of a harmonic function on a strip, written in the shifted
/// coordinate `s = y - y0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Constant(f64),
    /// `Re Σ q_k ζ^k` with `ζ = x + i s`; covers the linear, drift and
    /// quadratic conjugate terms.
    Poly(Vec<Complex64>),
    /// `cosh(ω s) (a cos ωx + b sin ωx)`
    Cosh {
        omega: f64,
        a: f64,
        b: f64,
    },
    /// `sinh(ω s)/ω (a cos ωx + b sin ωx)`
    Sinh {
        omega: f64,
        a: f64,
        b: f64,
    },
}

/// Value and derivatives up to second order of a scalar function.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScalarJet {
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl ScalarJet {
    fn add(&mut self, o: ScalarJet) {
        self.v += o.v;
        self.x += o.x;
        self.y += o.y;
        self.xx += o.xx;
        self.xy += o.xy;
        self.yy += o.yy;
    }
}

impl Mode {
    fn jet(&self, x: f64, s: f64) -> ScalarJet {
        match *self {
            Mode::Constant(c) => ScalarJet {
                v: c,
                ..Default::default()
            },
            Mode::Poly(ref q) => {
                let z = Complex64::new(x, s);
                let (p, d1, d2) = poly_eval(q, z);
                ScalarJet {
                    v: p.re,
                    x: d1.re,
                    y: -d1.im,
                    xx: d2.re,
                    xy: -d2.im,
                    yy: -d2.re,
                }
            }
            Mode::Cosh { omega, a, b } => {
                let (sn, cs) = (omega * x).sin_cos();
                let t = a * cs + b * sn;
                let tp = omega * (-a * sn + b * cs);
                let (ch, sh) = ((omega * s).cosh(), (omega * s).sinh());
                ScalarJet {
                    v: ch * t,
                    x: ch * tp,
                    y: omega * sh * t,
                    xx: -omega * omega * ch * t,
                    xy: omega * sh * tp,
                    yy: omega * omega * ch * t,
                }
            }
            Mode::Sinh { omega, a, b } => {
                let (sn, cs) = (omega * x).sin_cos();
                let t = a * cs + b * sn;
                let tp = omega * (-a * sn + b * cs);
                let (ch, sh) = ((omega * s).cosh(), (omega * s).sinh());
                ScalarJet {
                    v: sh * t / omega,
                    x: sh * tp / omega,
                    y: ch * t,
                    xx: -omega * sh * t,
                    xy: ch * tp,
                    yy: omega * sh * t,
                }
            }
        }
    }

    fn frequency(&self) -> f64 {
        match *self {
            Mode::Cosh { omega, a, b } | Mode::Sinh { omega, a, b } if a != 0.0 || b != 0.0 => {
                omega
            }
            _ => 0.0,
        }
    }

    fn scaled(&self, k: f64) -> Mode {
        match *self {
            Mode::Constant(c) => Mode::Constant(k * c),
            Mode::Poly(ref q) => Mode::Poly(q.iter().map(|c| c * k).collect()),
            Mode::Cosh { omega, a, b } => Mode::Cosh {
                omega,
                a: k * a,
                b: k * b,
            },
            Mode::Sinh { omega, a, b } => Mode::Sinh {
                omega,
                a: k * a,
                b: k * b,
            },
        }
    }
}

/// Value, first and second derivative of `Σ q_k z^k`.
pub(crate) fn poly_eval(q: &[Complex64], z: Complex64) -> (Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut d1, mut d2) = (zero, zero, zero);
    for &c in q.iter().rev() {
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + p;
        p = p * z + c;
    }
    (p, d1, d2)
}

/// Entire harmonic function on a strip, given as an exact mode sum.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicStripFunction {
    period: f64,
    y0: f64,
    modes: Vec<Mode>,
    guard: f64,
}

impl HarmonicStripFunction {
    pub fn new(period: f64, y0: f64, modes: Vec<Mode>) -> Self {
        HarmonicStripFunction {
            period,
            y0,
            modes,
            guard: DEFAULT_GUARD,
        }
    }

    pub fn zero(period: f64) -> Self {
        Self::new(period, 0.0, vec![])
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn axis(&self) -> f64 {
        self.y0
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Largest frequency carrying a nonzero coefficient.
    pub fn max_frequency(&self) -> f64 {
        self.modes.iter().map(Mode::frequency).fold(0.0, f64::max)
    }

    fn check_guard(&self, y: f64) -> Result<()> {
        let w = self.max_frequency() * (y - self.y0).abs();
        if w > self.guard {
            return Err(Error::TruncationExit {
                omega_y: w,
                bound: self.guard,
            });
        }
        Ok(())
    }

    pub fn jet(&self, x: f64, y: f64) -> Result<ScalarJet> {
        self.check_guard(y)?;
        let s = y - self.y0;
        let mut out = ScalarJet::default();
        for m in &self.modes {
            out.add(m.jet(x, s));
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.jet(x, y)?.v)
    }

    pub fn evaluate_gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let j = self.jet(x, y)?;
        Ok((j.x, j.y))
    }

    pub fn scale(&self, k: f64) -> Self {
        HarmonicStripFunction {
            modes: self.modes.iter().map(|m| m.scaled(k)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_period(self.period, other.period)?;
        if self.y0 != other.y0 {
            return Err(Error::InvalidInput(format!(
                "cannot add strip functions with axes {} and {}",
                self.y0, other.y0
            )));
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Ok(HarmonicStripFunction {
            period: self.period,
            y0: self.y0,
            modes,
            guard: self.guard.min(other.guard),
        })
    }
}

/// Cauchy data on the axis `y = y0`: trace `g` and flat normal derivative
/// `f = h_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub g: TrigPolynomial,
    pub f: TrigPolynomial,
    pub y0: f64,
}

impl CauchyData {
    pub fn new(g: TrigPolynomial, f: TrigPolynomial) -> Result<Self> {
        check_period(g.period(), f.period())?;
        Ok(CauchyData { g, f, y0: 0.0 })
    }

    pub fn at_axis(mut self, y0: f64) -> Self {
        self.y0 = y0;
        self
    }
}

fn neumann_about(f: &TrigPolynomial, y0: f64) -> HarmonicStripFunction {
    let mut modes = Vec::new();
    let i = Complex64::i();
    let mut poly = vec![Complex64::new(0.0, 0.0); 3];
    // a0/2 · s = Re(-i a0/2 ζ), drift b0·x·s = Re(-i b0/2 ζ^2)
    poly[1] = -i * (0.5 * f.a(0));
    poly[2] = -i * (0.5 * f.drift());
    if f.drift() == 0.0 {
        poly.truncate(2);
    }
    if poly.iter().any(|c| c.norm() != 0.0) {
        modes.push(Mode::Poly(poly));
    }
    for n in 1..=f.order() {
        let (a, b) = (f.a(n), f.b(n));
        if a != 0.0 || b != 0.0 {
            modes.push(Mode::Sinh {
                omega: f.frequency(n),
                a,
                b,
            });
        }
    }
    HarmonicStripFunction::new(f.period(), y0, modes)
}

fn dirichlet_about(g: &TrigPolynomial, y0: f64) -> HarmonicStripFunction {
    let mut modes = Vec::new();
    if g.a(0) != 0.0 {
        modes.push(Mode::Constant(0.5 * g.a(0)));
    }
    if g.drift() != 0.0 {
        modes.push(Mode::Poly(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(g.drift(), 0.0),
        ]));
    }
    for n in 1..=g.order() {
        let (a, b) = (g.a(n), g.b(n));
        if a != 0.0 || b != 0.0 {
            modes.push(Mode::Cosh {
                omega: g.frequency(n),
                a,
                b,
            });
        }
    }
    HarmonicStripFunction::new(g.period(), y0, modes)
}

/// Harmonic `h` with `h(x,0) = 0`, `h_y(x,0) = f(x)`.
pub fn solve_cauchy_neumann(f: &TrigPolynomial) -> HarmonicStripFunction {
    neumann_about(f, 0.0)
}

/// Harmonic `h` with `h(x,0) = g(x)`, `h_y(x,0) = 0`.
pub fn solve_cauchy_dirichlet(g: &TrigPolynomial) -> HarmonicStripFunction {
    dirichlet_about(g, 0.0)
}

/// Harmonic `h` with `h = g` and `h_y = f` on the axis `y = y0`.
pub fn solve_cauchy(data: &CauchyData) -> Result<HarmonicStripFunction> {
    check_period(data.g.period(), data.f.period())?;
    dirichlet_about(&data.g, data.y0).add(&neumann_about(&data.f, data.y0))
}

/// Harmonic conjugate `h*` with `h*_x = h_y`, `h*_y = -h_x` and
/// `h*(0, y0) = 0`.
pub fn conjugate_harmonic(h: &HarmonicStripFunction) -> HarmonicStripFunction {
    let i = Complex64::i();
    let mut modes: Vec<Mode> = h
        .modes
        .iter()
        .filter_map(|m| match *m {
            Mode::Constant(_) => None,
            Mode::Poly(ref q) => Some(Mode::Poly(q.iter().map(|c| i * c).collect())),
            Mode::Cosh { omega, a, b } => Some(Mode::Sinh {
                omega,
                a: -omega * b,
                b: omega * a,
            }),
            Mode::Sinh { omega, a, b } => Some(Mode::Cosh {
                omega,
                a: -b / omega,
                b: a / omega,
            }),
        })
        .collect();
    let offset: f64 = modes.iter().map(|m| m.jet(0.0, 0.0).v).sum();
    if offset != 0.0 {
        modes.push(Mode::Constant(-offset));
    }
    HarmonicStripFunction {
        period: h.period,
        y0: h.y0,
        modes,
        guard: h.guard,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_pi() -> TrigPolynomial {
        TrigPolynomial::mode(2.0, 1, 1.0, 0.0).unwrap()
    }

    #[test]
    fn neumann_constant_is_y() {
        let h = solve_cauchy_neumann(&TrigPolynomial::constant(2.0, 1.0).unwrap());
        assert!((h.evaluate(3.0, 2.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn neumann_zero_is_zero() {
        let h = solve_cauchy_neumann(&TrigPolynomial::zero(2.0).unwrap());
        assert_eq!(h.evaluate(0.3, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_modes() {
        let h = solve_cauchy_neumann(&cos_pi());
        let want = |x: f64, y: f64| (PI * y).sinh() * (PI * x).cos() / PI;
        assert!((h.evaluate(0.0, 1.0).unwrap() - 3.676_077_910_374_978).abs() < 1e-12);
        let d = solve_cauchy_dirichlet(&cos_pi());
        let dsin = solve_cauchy_dirichlet(&TrigPolynomial::mode(2.0, 1, 0.0, 1.0).unwrap());
        for &(x, y) in &[(0.1, 0.2), (-0.7, 0.9), (1.3, -0.4)] {
            assert!((h.evaluate(x, y).unwrap() - want(x, y)).abs() < 1e-13);
            assert!((d.evaluate(x, y).unwrap() - (PI * y).cosh() * (PI * x).cos()).abs() < 1e-13);
            assert!(
                (dsin.evaluate(x, y).unwrap() - (PI * y).cosh() * (PI * x).sin()).abs() < 1e-13
            );
        }
        let j = d.jet(0.0, 0.0).unwrap();
        assert!((j.v - 1.0).abs() < 1e-15 && j.x.abs() < 1e-15 && j.y.abs() < 1e-15);
    }

    #[test]
    fn conjugates() {
        let y = solve_cauchy_neumann(&TrigPolynomial::constant(2.0, 1.0).unwrap());
        let x = conjugate_harmonic(&y);
        assert!((x.evaluate(1.7, -0.3).unwrap() - 1.7).abs() < 1e-15);

        let h = solve_cauchy_neumann(&cos_pi());
        let hs = conjugate_harmonic(&h);
        for &(px, py) in &[(0.2, 0.3), (-0.5, 1.1)] {
            let want = (PI * py).cosh() * (PI * px).sin() / PI;
            assert!((hs.evaluate(px, py).unwrap() - want).abs() < 1e-13);
        }

        let c = HarmonicStripFunction::new(2.0, 0.0, vec![Mode::Constant(4.0)]);
        assert_eq!(conjugate_harmonic(&c).evaluate(0.3, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn guard_refuses_deep_evaluation() {
        let h = solve_cauchy_dirichlet(&TrigPolynomial::mode(2.0, 10, 1.0, 0.0).unwrap());
        assert!(h.evaluate(0.0, 0.9).is_ok());
        assert!(matches!(
            h.evaluate(0.0, 1.0),
            Err(Error::TruncationExit { .. })
        ));
    }

    #[test]
    fn drift_term_is_harmonic_xy() {
        let f = TrigPolynomial::new(2.0, vec![0.0], vec![], 0.5).unwrap();
        let h = solve_cauchy_neumann(&f);
        assert!((h.evaluate(1.5, 0.4).unwrap() - 0.5 * 1.5 * 0.4).abs() < 1e-15);
        let j = h.jet(0.8, 0.0).unwrap();
        assert!((j.y - 0.4).abs() < 1e-15 && j.v.abs() < 1e-15);
    }
}
