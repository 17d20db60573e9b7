//! Second-order jets of maps into R^3 and their transformation under
//! holomorphic changes of the parameter.

use nalgebra::Vector3;
use num_complex::Complex64;

pub type Vec3 = Vector3<f64>;

/// Value, first and second partial derivatives of a map `(u, v) -> R^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub pos: Vec3,
    pub du: Vec3,
    pub dv: Vec3,
    pub duu: Vec3,
    pub duv: Vec3,
    pub dvv: Vec3,
}

/// A complex 3-vector stored as real and imaginary parts.
#[derive(Debug, Clone, Copy)]
struct CVec {
    re: Vec3,
    im: Vec3,
}

impl CVec {
    fn scale(self, c: Complex64) -> CVec {
        CVec {
            re: self.re * c.re - self.im * c.im,
            im: self.re * c.im + self.im * c.re,
        }
    }

    fn add(self, other: CVec) -> CVec {
        CVec {
            re: self.re + other.re,
            im: self.im + other.im,
        }
    }
}

impl Jet {
    pub fn zero() -> Jet {
        Jet {
            pos: Vec3::zeros(),
            du: Vec3::zeros(),
            dv: Vec3::zeros(),
            duu: Vec3::zeros(),
            duv: Vec3::zeros(),
            dvv: Vec3::zeros(),
        }
    }

    /// Jet of `Re Phi` in the coordinates `Z = X + iY`, given the
    /// holomorphic components of `Phi` and their first two derivatives.
    pub fn from_holomorphic(value: [Complex64; 3], d1: [Complex64; 3], d2: [Complex64; 3]) -> Jet {
        let re = |v: [Complex64; 3]| Vec3::new(v[0].re, v[1].re, v[2].re);
        let im = |v: [Complex64; 3]| Vec3::new(v[0].im, v[1].im, v[2].im);
        Jet {
            pos: re(value),
            du: re(d1),
            dv: -im(d1),
            duu: re(d2),
            duv: -im(d2),
            dvv: -re(d2),
        }
    }

    /// Jet of `self ∘ g` where `g` is holomorphic with `g' = d1` and
    /// `g'' = d2` at the evaluation point.
    pub fn reparam(&self, d1: Complex64, d2: Complex64) -> Jet {
        // X_z = (X_x - i X_y) / 2, X_zz = (X_xx - X_yy - 2i X_xy) / 4,
        // X_{z zbar} = (X_xx + X_yy) / 4.
        let xz = CVec {
            re: self.du * 0.5,
            im: -self.dv * 0.5,
        };
        let xzz = CVec {
            re: (self.duu - self.dvv) * 0.25,
            im: -self.duv * 0.5,
        };
        let lap = (self.duu + self.dvv) * 0.25;

        let xw = xz.scale(d1);
        let xww = xzz.scale(d1 * d1).add(xz.scale(d2));
        let xwwbar = lap * d1.norm_sqr();

        Jet {
            pos: self.pos,
            du: xw.re * 2.0,
            dv: -xw.im * 2.0,
            duu: xww.re * 2.0 + xwwbar * 2.0,
            duv: -xww.im * 2.0,
            dvv: -xww.re * 2.0 + xwwbar * 2.0,
        }
    }

    /// Metric factor `F` with `ds^2 = F^2 (du^2 + dv^2)`, averaged over
    /// both directions.
    pub fn conformal_factor(&self) -> f64 {
        (0.5 * (self.du.norm_squared() + self.dv.norm_squared())).sqrt()
    }

    /// Scale-free conformality defect: `(||X_u|^2 - |X_v|^2| + 2|X_u·X_v|) / F^2`.
    pub fn conformality_defect(&self) -> f64 {
        let f2 = 0.5 * (self.du.norm_squared() + self.dv.norm_squared());
        if f2 == 0.0 {
            return 0.0;
        }
        ((self.du.norm_squared() - self.dv.norm_squared()).abs()
            + 2.0 * self.du.dot(&self.dv).abs())
            / f2
    }

    pub fn laplacian(&self) -> Vec3 {
        self.duu + self.dvv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Jet of (u, v) -> (Re w^2, Im w^2, 0) computed by hand.
    fn square_jet(u: f64, v: f64) -> Jet {
        Jet {
            pos: Vec3::new(u * u - v * v, 2.0 * u * v, 0.0),
            du: Vec3::new(2.0 * u, 2.0 * v, 0.0),
            dv: Vec3::new(-2.0 * v, 2.0 * u, 0.0),
            duu: Vec3::new(2.0, 0.0, 0.0),
            duv: Vec3::new(0.0, 2.0, 0.0),
            dvv: Vec3::new(-2.0, 0.0, 0.0),
        }
    }

    #[test]
    fn reparam_matches_direct_composition() {
        // (z^2) ∘ (w^3): compare against the jet of w^6 at a sample point.
        let w = Complex64::new(0.3, -0.7);
        let z = w * w * w;
        let inner = square_jet(z.re, z.im);
        let got = inner.reparam(3.0 * w * w, 6.0 * w);

        let f = |w: Complex64| w.powi(6);
        let d1 = 6.0 * w.powi(5);
        let d2 = 30.0 * w.powi(4);
        let zero = Complex64::new(0.0, 0.0);
        let want = Jet::from_holomorphic(
            [f(w), -Complex64::i() * f(w), zero],
            [d1, -Complex64::i() * d1, zero],
            [d2, -Complex64::i() * d2, zero],
        );
        let err = [
            got.pos - want.pos,
            got.du - want.du,
            got.dv - want.dv,
            got.duu - want.duu,
            got.duv - want.duv,
            got.dvv - want.dvv,
        ]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn conformal_defect_zero_for_holomorphic() {
        let j = square_jet(0.4, 1.1);
        assert!(j.conformality_defect() < 1e-15);
        assert!(j.laplacian().norm() < 1e-15);
    }
}
