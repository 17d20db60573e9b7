use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Truncated Fourier data of a boundary function:
/// `a0/2 + Σ (a_n cos ω_n x + b_n sin ω_n x) + drift·x`, `ω_n = 2πn/L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    period: f64,
    cos: Vec<f64>,
    // sin[0] is always zero so both vectors share indexing.
    sin: Vec<f64>,
    drift: f64,
}

impl TrigPolynomial {
    pub fn new(period: f64, cos: Vec<f64>, sin_from_one: Vec<f64>, drift: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "period must be positive, got {period}"
            )));
        }
        let n = cos.len().max(sin_from_one.len() + 1).max(1);
        let mut c = cos;
        c.resize(n, 0.0);
        let mut s = Vec::with_capacity(n);
        s.push(0.0);
        s.extend(sin_from_one);
        s.resize(n, 0.0);
        for (i, v) in c
            .iter()
            .chain(s.iter())
            .chain(std::iter::once(&drift))
            .enumerate()
        {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(TrigPolynomial {
            period,
            cos: c,
            sin: s,
            drift,
        })
    }

    /// The constant function `value`.
    pub fn constant(period: f64, value: f64) -> Result<Self> {
        Self::new(period, vec![2.0 * value], vec![], 0.0)
    }

    /// The single mode `a cos ω_n x + b sin ω_n x`.
    pub fn mode(period: f64, n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Self::constant(period, a);
        }
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n];
        cos[n] = a;
        sin[n - 1] = b;
        Self::new(period, cos, sin, 0.0)
    }

    pub fn zero(period: f64) -> Result<Self> {
        Self::new(period, vec![0.0], vec![], 0.0)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Highest stored mode index.
    pub fn order(&self) -> usize {
        self.cos.len() - 1
    }

    /// Highest mode index with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..self.cos.len())
            .rev()
            .find(|&n| self.cos[n] != 0.0 || self.sin[n] != 0.0)
            .unwrap_or(0)
    }

    pub fn frequency(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.period
    }

    pub fn a(&self, n: usize) -> f64 {
        self.cos.get(n).copied().unwrap_or(0.0)
    }

    pub fn b(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.sin.get(n).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = 0.5 * self.cos[0] + self.drift * x;
        for n in 1..self.cos.len() {
            let (s, c) = (self.frequency(n) * x).sin_cos();
            sum += self.cos[n] * c + self.sin[n] * s;
        }
        sum
    }

    /// Value of the `order`-th derivative at `x`.
    pub fn eval_derivative(&self, x: f64, order: u32) -> f64 {
        if order == 0 {
            return self.eval(x);
        }
        let mut sum = if order == 1 { self.drift } else { 0.0 };
        for n in 1..self.cos.len() {
            let w = self.frequency(n);
            let phase = w * x + order as f64 * 0.5 * PI;
            let (s, c) = phase.sin_cos();
            sum += w.powi(order as i32) * (self.cos[n] * c + self.sin[n] * s);
        }
        sum
    }

    pub fn scale(&self, k: f64) -> TrigPolynomial {
        TrigPolynomial {
            period: self.period,
            cos: self.cos.iter().map(|v| v * k).collect(),
            sin: self.sin.iter().map(|v| v * k).collect(),
            drift: self.drift * k,
        }
    }

    pub fn add(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        check_period(self.period, other.period)?;
        let n = self.cos.len().max(other.cos.len());
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for i in 0..n {
            cos[i] = self.a(i) + other.a(i);
            sin[i] = self.b(i) + other.b(i);
        }
        Ok(TrigPolynomial {
            period: self.period,
            cos,
            sin,
            drift: self.drift + other.drift,
        })
    }

    /// Keep modes `0..=n`; returns the truncated polynomial and the tail
    /// bound `Σ_{k>n} (|a_k| + |b_k|)`.
    pub fn truncate(&self, n: usize) -> (TrigPolynomial, f64) {
        let keep = (n + 1).min(self.cos.len());
        let tail = (keep..self.cos.len())
            .map(|k| self.cos[k].abs() + self.sin[k].abs())
            .sum();
        (
            TrigPolynomial {
                period: self.period,
                cos: self.cos[..keep].to_vec(),
                sin: self.sin[..keep].to_vec(),
                drift: self.drift,
            },
            tail,
        )
    }

    /// Zero every coefficient below `rel_tol` times the largest one and
    /// drop trailing empty modes.
    pub fn pruned(&self, rel_tol: f64) -> TrigPolynomial {
        let scale = self
            .cos
            .iter()
            .chain(self.sin.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let cut = rel_tol * scale;
        let clip = |v: f64| if v.abs() <= cut { 0.0 } else { v };
        let mut out = TrigPolynomial {
            period: self.period,
            cos: self.cos.iter().map(|&v| clip(v)).collect(),
            sin: self.sin.iter().map(|&v| clip(v)).collect(),
            drift: self.drift,
        };
        let deg = out.degree();
        out.cos.truncate(deg + 1);
        out.sin.truncate(deg + 1);
        out
    }

    /// Text record: `period=`, then `a<n>=`, `b<n>=` and `b0=` (drift)
    /// lines. Zero coefficients other than `a0` are omitted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "period={}", fmt_real(self.period));
        let _ = writeln!(out, "a0={}", fmt_real(self.cos[0]));
        for n in 1..self.cos.len() {
            if self.cos[n] != 0.0 {
                let _ = writeln!(out, "a{n}={}", fmt_real(self.cos[n]));
            }
            if self.sin[n] != 0.0 {
                let _ = writeln!(out, "b{n}={}", fmt_real(self.sin[n]));
            }
        }
        if self.drift != 0.0 {
            let _ = writeln!(out, "b0={}", fmt_real(self.drift));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TrigPolynomial> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        parse_lines(&lines, None)
    }
}

/// Parse a block of `key=value` lines; `default_period` is used when the
/// block has no `period=` line.
pub(crate) fn parse_lines(
    lines: &[(usize, &str)],
    default_period: Option<f64>,
) -> Result<TrigPolynomial> {
    let mut period = default_period;
    let mut cos: Vec<f64> = vec![0.0];
    let mut sin: Vec<f64> = vec![0.0];
    let mut drift = 0.0;
    for &(line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim();
        let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("field {key}: cannot parse {:?} as a number", value.trim()),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("field {key}: non-finite value"),
            });
        }
        let bad_key = || Error::Parse {
            line: line_no,
            message: format!("unknown field {key:?}"),
        };
        if key == "period" {
            period = Some(value);
        } else if key == "b0" {
            drift = value;
        } else if let Some(idx) = key.strip_prefix('a') {
            let n: usize = idx.parse().map_err(|_| bad_key())?;
            if cos.len() <= n {
                cos.resize(n + 1, 0.0);
            }
            cos[n] = value;
        } else if let Some(idx) = key.strip_prefix('b') {
            let n: usize = idx.parse().map_err(|_| bad_key())?;
            if sin.len() <= n {
                sin.resize(n + 1, 0.0);
            }
            sin[n] = value;
        } else {
            return Err(bad_key());
        }
    }
    let period = period.ok_or(Error::Parse {
        line: lines.first().map(|l| l.0).unwrap_or(0),
        message: "missing period".into(),
    })?;
    sin.remove(0);
    TrigPolynomial::new(period, cos, sin, drift)
}

pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn check_period(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(Error::PeriodMismatch { left: a, right: b });
    }
    Ok(())
}

/// `m` uniform samples `(x_j, f(x_j))`, `x_j = x0 + j·L/m`.
pub fn sample_uniform(f: impl Fn(f64) -> f64, x0: f64, period: f64, m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|j| {
            let x = x0 + period * j as f64 / m as f64;
            (x, f(x))
        })
        .collect()
}

fn validate_samples(samples: &[(f64, f64)], period: f64, closed: bool) -> Result<()> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidInput(format!(
            "period must be positive, got {period}"
        )));
    }
    let needed = if closed { 4 } else { 3 };
    if samples.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    for (i, &(x, v)) in samples.iter().enumerate() {
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    let intervals = if closed {
        samples.len() - 1
    } else {
        samples.len()
    };
    let expected = period / intervals as f64;
    for w in samples.windows(2) {
        let gap = w[1].0 - w[0].0;
        if (gap - expected).abs() > 1e-9 * expected {
            return Err(Error::NonUniformSpacing { gap, expected });
        }
    }
    Ok(())
}

/// Discrete Fourier analysis of uniformly spaced samples covering one
/// period (endpoint excluded). With an odd sample count `2N+1` the result
/// interpolates the samples exactly; an even count drops the Nyquist mode.
pub fn fourier_analyze(samples: &[(f64, f64)], period: f64) -> Result<TrigPolynomial> {
    validate_samples(samples, period, false)?;
    let m = samples.len();
    let n_modes = (m - 1) / 2;
    let norm = 2.0 / m as f64;
    let mut cos = vec![0.0; n_modes + 1];
    let mut sin = vec![0.0; n_modes];
    cos[0] = norm * samples.iter().map(|s| s.1).sum::<f64>();
    for n in 1..=n_modes {
        let w = 2.0 * PI * n as f64 / period;
        let (mut ca, mut sa) = (0.0, 0.0);
        for &(x, v) in samples {
            let (s, c) = (w * x).sin_cos();
            ca += v * c;
            sa += v * s;
        }
        cos[n] = norm * ca;
        sin[n - 1] = norm * sa;
    }
    TrigPolynomial::new(period, cos, sin, 0.0)
}

/// Fourier analysis of non-periodic data sampled on the closed interval
/// `[x0, x0 + L]`: the linear drift `b0 = (f(x0+L) - f(x0)) / L` is split
/// off and the periodic remainder analyzed.
pub fn fourier_analyze_with_drift(samples: &[(f64, f64)], period: f64) -> Result<TrigPolynomial> {
    validate_samples(samples, period, true)?;
    let first = samples[0].1;
    let last = samples[samples.len() - 1].1;
    let drift = (last - first) / period;
    let rest: Vec<(f64, f64)> = samples[..samples.len() - 1]
        .iter()
        .map(|&(x, v)| (x, v - drift * x))
        .collect();
    let mut tp = fourier_analyze(&rest, period)?;
    tp.drift = drift;
    Ok(tp)
}
