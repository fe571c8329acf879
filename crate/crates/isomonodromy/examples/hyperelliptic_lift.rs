//! Lift a system on the line to the genus-2 hyperelliptic double cover:
//! the determinant quadratic's discriminant identity, the two-valued
//! section of the lift, and parallel transport on the curve matching the
//! even-word monodromy downstairs.

use anyhow::Result;
use isomonodromy::fuchsian::{FuchsianSystem, PoleLabel, PoleConfig};
use isomonodromy::genus2::{det_quadratic, phi_lift, section_phi, RootChoice};
use isomonodromy::monodromy::{
    default_basepoint, even_word_traces, fuchsian_monodromy, hyperelliptic_continuation,
    standard_loops,
};
use isomonodromy::numkit::c64;

fn main() -> Result<()> {
    let t = PoleConfig::new(c64(2.0, 0.5), c64(-1.3, 0.8), c64(0.6, -1.7))?;
    let c1 = c64(0.8, 0.2);
    let c2 = c64(-0.5, 0.4);
    let c = [c1, c2, -c1 - c2];
    let z = c64(0.45, -0.3);

    let g2 = phi_lift(&t, z, c)?;
    let nu = det_quadratic(&g2);
    println!("determinant quadratic nu = ({:+.4}) + ({:+.4}) x + ({:+.4}) x^2", nu.nu0, nu.nu1, nu.nu2);
    let det = g2.reducibility_determinant();
    println!(
        "discriminant identity |disc(nu) - det^2| = {:.3e}",
        (nu.discriminant() - det * det).norm()
    );

    // The fiber of the lift over nu is the two root choices; both project
    // to the same even-word traces.
    let loops = standard_loops(&t, default_basepoint(&t))?;
    let words: Vec<&[usize]> = vec![&[0, 1], &[0, 2], &[1, 2], &[0, 3], &[1, 4]];
    let mut both = Vec::new();
    for root in [RootChoice::First, RootChoice::Second] {
        let (zr, cr) = section_phi(&t, &nu, root)?;
        let sys = FuchsianSystem::new(t, [zr, zr, zr], cr);
        let rep = fuchsian_monodromy(&sys, &loops, 1e-10)?;
        both.push(even_word_traces(&rep, &words)?);
    }
    let branch_gap = both[0]
        .iter()
        .zip(&both[1])
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("two branches of the section, max even-trace gap: {branch_gap:.3e}");

    // Transport on the curve around a loop encircling the branch points 0
    // and 1 equals the even word M0 M1 downstairs, on both sheets.
    let sys = FuchsianSystem::new(t, [z, z, z], c);
    let rep = fuchsian_monodromy(&sys, &loops, 1e-10)?;
    let l0 = loops.iter().find(|l| l.label() == PoleLabel::Zero).unwrap();
    let l1 = loops.iter().find(|l| l.label() == PoleLabel::One).unwrap();
    let even_loop = l0.path().concat(l1.path())?;
    let word_trace = even_word_traces(&rep, &[&[0usize, 1][..]])?[0];
    for sheet in [1i8, -1] {
        let tr = hyperelliptic_continuation(&g2, &even_loop, sheet, 1e-10)?;
        println!(
            "sheet {sheet:+}: returns to sheet {:+}, |trace - tr(M0 M1)| = {:.3e} ({} rhs evals)",
            tr.sheet,
            (tr.matrix.trace() - word_trace).norm(),
            tr.stats.rhs_evals
        );
    }
    Ok(())
}
