//! Solve the Cauchy problem for the Laplacian on a periodic strip and
//! compare with the closed form `1 + sinh(πy) cos(πx) / π`.

use freeboundary::harmonic_series::{conjugate_harmonic, solve_cauchy, CauchyData, TrigPolynomial};

fn main() -> freeboundary::Result<()> {
    let g = TrigPolynomial::constant(2.0, 1.0)?;
    let f = TrigPolynomial::mode(2.0, 1, 1.0, 0.0)?;
    let h = solve_cauchy(&CauchyData::new(g, f)?)?;
    let conj = conjugate_harmonic(&h);
    let pi = std::f64::consts::PI;
    println!(
        "{:>6} {:>6} {:>20} {:>12} {:>20}",
        "x", "y", "h", "error", "conjugate"
    );
    for &(x, y) in &[(0.0, 0.0), (0.25, 0.5), (1.0, -0.75), (1.5, 1.0)] {
        let v = h.evaluate(x, y)?;
        let exact = 1.0 + (pi * y).sinh() * (pi * x).cos() / pi;
        println!(
            "{x:>6.2} {y:>6.2} {v:>20.15} {:>12.3e} {:>20.15}",
            (v - exact).abs(),
            conj.evaluate(x, y)?
        );
    }
    Ok(())
}
