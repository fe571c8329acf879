//! Geometry of the Riccati foliation attached to a lifted system: the
//! tangency divisor of horizontal sections has total multiplicity 2 at
//! every height, twelve special fibers, and leaf self-intersection -4.

use anyhow::Result;
use isomonodromy::fuchsian::PoleConfig;
use isomonodromy::genus2::{
    self_intersection, tangency_points, twelve_special_fibers, Genus2System, Height, Tangency,
};
use isomonodromy::numkit::c64;

fn main() -> Result<()> {
    let t = PoleConfig::new(c64(2.0, 0.5), c64(-1.3, 0.8), c64(0.6, -1.7))?;
    let sys = Genus2System::new(
        t,
        (c64(0.7, -0.1), c64(-0.4, 0.6)),
        (c64(0.2, 0.5), c64(0.9, -0.3)),
    )?;

    for p in [c64(0.3, -0.8), c64(-1.2, 0.4), c64(0.0, 0.0)] {
        let pts = tangency_points(&sys, Height::Finite(p))?;
        let total: u32 = pts.iter().map(Tangency::multiplicity).sum();
        print!("height p = {p:+.2}: tangency divisor");
        for pt in &pts {
            match pt {
                Tangency::Simple { x, y } => {
                    print!("  simple at x = {x:+.4} (sheet y = {y:+.4})");
                }
                Tangency::DoubleWeierstrass { x } => print!("  double at Weierstrass x = {x:+.4}"),
                Tangency::DoubleAtInfinity => print!("  double over x = infinity"),
            }
        }
        println!("  (total multiplicity {total})");
    }
    let pts = tangency_points(&sys, Height::Infinity)?;
    let total: u32 = pts.iter().map(Tangency::multiplicity).sum();
    println!("height p = infinity: total multiplicity {total}");

    let fibers = twelve_special_fibers(&sys)?;
    let total: u32 = fibers.iter().map(|f| f.multiplicity).sum();
    println!("\nspecial fibers ({} heights, total multiplicity {total}):", fibers.len());
    for f in &fibers {
        println!("  {f:?}");
    }

    let si = self_intersection(&sys)?;
    println!(
        "\nself-intersection: c1(tangency line bundle) = {}, branch count = {}, \
         c1(det) = {}, value = {}",
        si.c1_line, si.branch_count, si.c1_det, si.value
    );
    Ok(())
}
