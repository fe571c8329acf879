//! Round-trip the spectral Darboux chart: psi maps Darboux coordinates
//! (q, p) to moduli (z, c), psi_inverse recovers them, and the chart is
//! symplectic up to finite-difference accuracy.

use anyhow::Result;
use isomonodromy::darboux::{
    psi, psi_inverse, sigma_darb_to_sigma, sigma_to_sigma_darb, symplectic_defect, DarbouxPoint,
};
use isomonodromy::fuchsian::PoleConfig;
use isomonodromy::numkit::c64;

fn main() -> Result<()> {
    let t = PoleConfig::new(c64(2.0, 0.5), c64(-1.3, 0.8), c64(0.6, -1.7))?;
    let d = DarbouxPoint::new(
        [c64(0.4, 0.9), c64(-1.1, -0.3), c64(1.9, 0.6)],
        [c64(0.8, -0.2), c64(-0.5, 0.7), c64(0.3, 0.4)],
    );

    let (z, c) = psi(&t, &d)?;
    println!("psi(q, p):");
    for k in 0..3 {
        println!("  z{} = {:+.6}  c{} = {:+.6}", k + 1, z[k], k + 1, c[k]);
    }

    let back = psi_inverse(&t, z, c)?;
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        // psi_inverse returns q's in sorted order; match by nearest.
        let m = (0..3)
            .min_by(|&a, &b| {
                (back.q[a] - d.q[k]).norm().total_cmp(&(back.q[b] - d.q[k]).norm())
            })
            .unwrap();
        worst = worst.max((back.q[m] - d.q[k]).norm());
        worst = worst.max((back.p[m] - d.p[k]).norm());
    }
    println!("round trip psi_inverse(psi(q, p)) error: {worst:.3e}");

    let defect = symplectic_defect(&t, &d)?;
    println!("symplectic defect |J^T Omega J - Omega|: {defect:.3e}");

    // On the locus Sigma all three z's coincide and the coefficients sum
    // to zero; the chart degenerates to scalar coordinates (p1, p2, q3).
    let c1 = c64(0.8, 0.2);
    let c2 = c64(-0.5, 0.4);
    let zs = c64(0.45, -0.3);
    let cs = [c1, c2, -c1 - c2];
    let (p1, p2, q3) = sigma_to_sigma_darb(&t, zs, cs)?;
    println!("Sigma point (z = {zs:+.4}) maps to p1 = {p1:+.4}, p2 = {p2:+.4}, q3 = {q3:+.4}");
    let (zb, cb) = sigma_darb_to_sigma(&t, p1, p2, q3)?;
    let mut res = (zb - zs).norm();
    for k in 0..3 {
        res = res.max((cb[k] - cs[k]).norm());
    }
    println!("Sigma round trip error: {res:.3e}");
    Ok(())
}
