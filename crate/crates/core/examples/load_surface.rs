//! Serialize a catalog surface to surface-spec text, parse it back and
//! compare positions.

use freeboundary::catalog::{critical_catenoid, parse_surface, surface_spec_text};

fn main() -> freeboundary::Result<()> {
    let s = critical_catenoid();
    let text = surface_spec_text(&s, 4)?;
    println!("{text}");
    let back = parse_surface(&text, "catenoid-copy")?;
    let d = s.domain;
    let mut worst = 0.0f64;
    for i in 0..32 {
        for j in 0..=8 {
            let (x, y) = (
                d.period * i as f64 / 32.0,
                d.y_lo + d.height() * j as f64 / 8.0,
            );
            worst = worst.max((back.position(x, y)? - s.position(x, y)?).norm());
        }
    }
    println!("round trip max error {worst:.2e}");
    Ok(())
}
