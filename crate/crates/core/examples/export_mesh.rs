//! Write an OBJ mesh of the extended catenoid, one object group per piece.

use freeboundary::catalog::critical_catenoid;
use freeboundary::extension::extend;
use freeboundary::reports::{export_mesh, extension_pieces};

fn main() -> freeboundary::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "catenoid.obj".into());
    let ext = extend(&critical_catenoid(), 4)?;
    let pieces = extension_pieces(&ext);
    let obj = export_mesh(&pieces, 48, 12, true)?;
    std::fs::write(&path, &obj)?;
    println!(
        "{} pieces, {} lines -> {path}",
        pieces.len(),
        obj.lines().count()
    );
    Ok(())
}
