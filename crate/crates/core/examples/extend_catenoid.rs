//! Alternate reflections across the two boundary circles and watch the
//! total absolute curvature approach 4π.

use freeboundary::catalog::critical_catenoid;
use freeboundary::extension::{coverage_monitor, extend};

fn main() -> freeboundary::Result<()> {
    let steps = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    let ext = extend(&critical_catenoid(), steps)?;
    println!("lineage {}", ext.lineage_string());
    println!(
        "{:>4} {:>6} {:>10} {:>20}",
        "step", "edge", "bounds", "int |K| dA"
    );
    for r in coverage_monitor(&ext, 32)? {
        let edge = r.edge.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "{:>4} {edge:>6} {:>10} {:>20.15}",
            r.step,
            format!("({},{})", r.bounds.0, r.bounds.1),
            r.abs_curvature
        );
    }
    println!("4 pi = {:.15}", 4.0 * std::f64::consts::PI);
    Ok(())
}
