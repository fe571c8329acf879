//! The transversality determinant of the three Garnier vector fields on
//! the locus Sigma: closed form against a direct evaluation, and its
//! vanishing exactly on the reducible locus, where the tangent cone of
//! the isomonodromy foliation degenerates to a non-smooth conic.

use anyhow::Result;
use isomonodromy::darboux::{q_quantities, sigma_to_sigma_darb};
use isomonodromy::fuchsian::PoleConfig;
use isomonodromy::numkit::c64;
use isomonodromy::transversality::{
    tangent_cone_conic, transversality_det_closed, transversality_det_numeric,
};

fn main() -> Result<()> {
    let t = PoleConfig::new(c64(2.0, 0.5), c64(-1.3, 0.8), c64(0.6, -1.7))?;

    let (p1, p2, q3) = (c64(0.8, -0.2), c64(-0.5, 0.7), c64(1.4, 0.3));
    let closed = transversality_det_closed(&t, p1, p2, q3)?;
    let numeric = transversality_det_numeric(&t, p1, p2, q3)?;
    println!("closed-form determinant:  {closed:+.10e}");
    println!("direct vector-field det:  {numeric:+.10e}");
    println!("relative disagreement:    {:.3e}", (closed - numeric).norm() / closed.norm());

    // The reducible locus in Sigma coordinates: for fixed coefficients c
    // the residual R(z) is linear in z, so it has exactly one root.
    let c1 = c64(0.8, 0.2);
    let c2 = c64(-0.5, 0.4);
    let c = [c1, c2, -c1 - c2];
    let (q0, q1, qinf) = q_quantities(&t, c);
    let z_red = (q1 - qinf) / (q0 + q1);
    println!("\nreducible locus at z = {z_red:+.6}");

    for (label, z) in [("on the locus ", z_red), ("generic point", z_red + c64(0.5, 0.3))] {
        let (p1, p2, q3) = sigma_to_sigma_darb(&t, z, c)?;
        let det = transversality_det_closed(&t, p1, p2, q3)?;
        let (form, smooth) = tangent_cone_conic(&t, z, c1, c2);
        println!(
            "{label}: |det| = {:.3e}, conic |det| = {:.3e}, cone smooth: {smooth}",
            det.norm(),
            form.det().norm()
        );
    }
    Ok(())
}
