//! Locate zeros of H' with the argument principle for a strongly
//! perturbed boundary factor `F = 1 + 0.9 cos(πx)`.

use freeboundary::harmonic_series::TrigPolynomial;
use freeboundary::isothermal::{build_normalization, find_branch_points, Rect};

fn main() -> freeboundary::Result<()> {
    let f = TrigPolynomial::new(2.0, vec![2.0, 0.9], vec![0.0], 0.0)?;
    let m = build_normalization(&f)?;
    let rect = Rect {
        x0: 0.1,
        x1: 2.1,
        y0: -0.5,
        y1: 0.5,
    };
    for n in [8, 16, 32] {
        let set = find_branch_points(&m.h, rect, n, n)?;
        println!(
            "grid {n:>2}: winding {} multiplicity {}",
            set.winding_total,
            set.total_multiplicity()
        );
        for p in &set.points {
            println!(
                "    z = {:.12} {:+.12}i  (x{})",
                p.z.re, p.z.im, p.multiplicity
            );
        }
    }
    Ok(())
}
