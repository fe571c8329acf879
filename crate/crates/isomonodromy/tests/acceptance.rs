//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line with its pinned tolerances and runtime budget. The
//! deterministic suite configurations live in the library; this file only
//! pins seeds, sample counts, and budgets.

use std::time::{Duration, Instant};

use isomonodromy::experiments::{format_summary, run_experiment, ExperimentConfig};
use isomonodromy::fuchsian::{FuchsianSystem, PoleConfig, PoleLabel};
use isomonodromy::genus2::{section_phi, QuadraticDifferential, RootChoice};
use isomonodromy::monodromy::{
    default_basepoint, even_word_traces, fuchsian_monodromy, hyperelliptic_continuation,
    standard_loops, DEFAULT_WORDS,
};
use isomonodromy::numkit::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs a canonical suite with a pinned seed and sample count, prints the
/// criterion line, and fails the test when any case fails or the budget
/// is exceeded.
fn criterion_suite(number: u32, name: &str, seed: u64, samples: usize, budget: Duration) {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::for_experiment(name);
    cfg.seed = seed;
    cfg.samples = samples;
    let report = run_experiment(&cfg).expect("suite construction must succeed");
    let elapsed = started.elapsed();
    let ok = report.pass && elapsed <= budget;
    println!(
        "criterion {number} ({name}): {} [{}/{} checks, {:.1}s of {:.0}s budget]",
        if ok { "PASS" } else { "FAIL" },
        report.aggregates.passed,
        report.aggregates.cases,
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
    );
    if !ok {
        print!("{}", format_summary(&report));
        panic!(
            "criterion {number} failed: pass={}, elapsed {:.1}s vs budget {:.0}s",
            report.pass,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
}

#[test]
fn criterion_1_identities() {
    criterion_suite(1, "identities", 0, 100, Duration::from_secs(10));
}

#[test]
fn criterion_2_transversality() {
    criterion_suite(2, "transversality", 0, 100, Duration::from_secs(30));
}

#[test]
fn criterion_3_monodromy_invariants() {
    criterion_suite(3, "monodromy-invariants", 0, 10, Duration::from_secs(60));
}

#[test]
fn criterion_4_isomonodromy() {
    criterion_suite(4, "isomonodromy", 0, 5, Duration::from_secs(300));
}

#[test]
fn criterion_5_rh_rank() {
    criterion_suite(5, "rh-rank", 12, 10, Duration::from_secs(600));
}

#[test]
fn criterion_6_riccati_geometry() {
    criterion_suite(6, "riccati-geometry", 0, 20, Duration::from_secs(10));
}

/// Double-cover consistency is checked directly: the two branches of the
/// section agree on even words within 1e-8, and parallel transport on the
/// curve around two-branch-point loops reproduces the even-word traces
/// within 1e-6, for 3 seeded irreducible nu.
#[test]
fn criterion_7_double_cover() {
    let started = Instant::now();
    let budget = Duration::from_secs(120);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draw = |half: f64, rng: &mut ChaCha8Rng| {
        c64(rng.gen_range(-half..half), rng.gen_range(-half..half))
    };

    let mut branch_gap: f64 = 0.0;
    let mut transport_gap: f64 = 0.0;
    let mut done = 0;
    let mut attempts = 0;
    while done < 3 {
        attempts += 1;
        assert!(attempts < 500, "sampling exhausted");

        let t = {
            let t1 = draw(3.0, &mut rng);
            let t2 = draw(3.0, &mut rng);
            let t3 = draw(3.0, &mut rng);
            let clear = [t1, t2, t3].iter().all(|v| {
                v.norm() > 0.3 && (v - c64(1.0, 0.0)).norm() > 0.3
            }) && (t1 - t2).norm() > 0.3
                && (t1 - t3).norm() > 0.3
                && (t2 - t3).norm() > 0.3;
            if !clear {
                continue;
            }
            match PoleConfig::new(t1, t2, t3) {
                Ok(t) => t,
                Err(_) => continue,
            }
        };
        let nu = QuadraticDifferential::new(
            draw(1.0, &mut rng),
            draw(1.0, &mut rng),
            draw(1.0, &mut rng),
        );
        let scale = nu.scale();
        if nu.nu2.norm() <= 0.1 * scale || nu.discriminant().norm() <= 0.1 * scale * scale {
            continue;
        }

        // Both branches of the section over nu.
        let mut reps = Vec::new();
        let mut traces = Vec::new();
        let loops = match standard_loops(&t, default_basepoint(&t)) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let mut bad = false;
        for root in [RootChoice::First, RootChoice::Second] {
            let Ok((z, c)) = section_phi(&t, &nu, root) else {
                bad = true;
                break;
            };
            let sys = FuchsianSystem::new(t, [z, z, z], c);
            let Ok(rep) = fuchsian_monodromy(&sys, &loops, 1e-11) else {
                bad = true;
                break;
            };
            traces.push(even_word_traces(&rep, &DEFAULT_WORDS).unwrap());
            reps.push(rep);
        }
        if bad {
            continue;
        }
        for (a, b) in traces[0].iter().zip(&traces[1]) {
            branch_gap = branch_gap.max((a - b).norm());
        }

        // Transport upstairs around loops encircling two branch points at a
        // time, compared with the corresponding even words downstairs.
        let g2 = {
            let Ok((z, c)) = section_phi(&t, &nu, RootChoice::First) else {
                continue;
            };
            match isomonodromy::genus2::phi_lift(&t, z, c) {
                Ok(g) => g,
                Err(_) => continue,
            }
        };
        let labels = [PoleLabel::Zero, PoleLabel::One, PoleLabel::T1];
        let mut sample_gap: f64 = 0.0;
        let mut transport_ok = true;
        for pair in [(0usize, 1usize), (0, 2), (1, 2)] {
            let la = loops.iter().find(|l| l.label() == labels[pair.0]).unwrap();
            let lb = loops.iter().find(|l| l.label() == labels[pair.1]).unwrap();
            let path = la.path().concat(lb.path()).unwrap();
            let word = even_word_traces(&reps[0], &[&[pair.0, pair.1][..]]).unwrap()[0];
            for sheet in [1i8, -1] {
                let Ok(tr) = hyperelliptic_continuation(&g2, &path, sheet, 1e-11) else {
                    transport_ok = false;
                    break;
                };
                assert_eq!(tr.sheet, sheet, "two-branch-point loops preserve the sheet");
                sample_gap = sample_gap.max((tr.matrix.trace() - word).norm());
            }
            if !transport_ok {
                break;
            }
        }
        if !transport_ok {
            continue;
        }
        transport_gap = transport_gap.max(sample_gap);
        done += 1;
    }

    let elapsed = started.elapsed();
    let ok = branch_gap < 1e-8 && transport_gap < 1e-6 && elapsed <= budget;
    println!(
        "criterion 7 (double-cover): {} [branch gap {branch_gap:.2e} < 1e-8, \
         transport gap {transport_gap:.2e} < 1e-6, {:.1}s of {:.0}s budget]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
    );
    assert!(ok, "branch gap {branch_gap:.3e}, transport gap {transport_gap:.3e}");
}
