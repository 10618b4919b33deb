//! Acceptance criteria. Runs as a plain binary (`harness = false`) so that
//! the one-line verdicts are always printed.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use index_lint::{lint_corpus, Code};
use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetrad_audit::audit::{best_fit_r, candidate_r_table, tetrad_trace, trace_contraction, LHS_RHS_TOL};
use tetrad_audit::*;

const SEED: u64 = 20_070_101;

fn sample(m: &MetricSpec, rng: &mut ChaCha8Rng) -> CoordinatePoint {
    let x = match m.name() {
        "schwarzschild" => [
            rng.gen_range(-5.0..5.0),
            rng.gen_range(3.0..30.0),
            rng.gen_range(0.3..PI - 0.3),
            rng.gen_range(0.0..2.0 * PI),
        ],
        "flrw" => [
            rng.gen_range(0.5..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ],
        _ => std::array::from_fn(|_| rng.gen_range(-2.0..2.0)),
    };
    m.point(x).unwrap()
}

fn tetrads(m: &MetricSpec) -> Vec<Tetrad> {
    let d = diagonal_tetrad(m).unwrap();
    let b = lorentz_transform_tetrad(&d, Rapidity::Linear { coeff: 0.1, coord: 1 }, (0, 1)).unwrap();
    vec![d, b]
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Max-abs postulate residual over 4 metrics x 2 tetrads x 50 points.
fn tetrad_postulate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for m in MetricSpec::catalog() {
        for t in tetrads(&m) {
            for _ in 0..50 {
                let p = sample(&m, &mut rng);
                let w = spin_connection(&t, &p, Step::default()).map_err(|e| e.to_string())?;
                worst = worst.max(tetrad_postulate_residual(&t, &w, &p, Step::default()).map_err(|e| e.to_string())?);
                n += 1;
            }
        }
    }
    check(
        worst < 1e-8,
        format!("{n} configurations, max |D_mu q^a_l| = {worst:.2e} (< 1e-8)"),
    )
}

fn christoffel_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst: f64 = 0.0;
    for m in [MetricSpec::schwarzschild(1.0).unwrap(), MetricSpec::flrw()] {
        for _ in 0..50 {
            let p = sample(&m, &mut rng);
            let f = christoffel(&m, &p, Step::default()).map_err(|e| e.to_string())?;
            worst = worst.max(f.closed_form_deviation.ok_or("no closed form")?);
        }
    }
    check(
        worst < 1e-6,
        format!("100 points, max |Gamma_fd - Gamma_exact| = {worst:.2e} (< 1e-6)"),
    )
}

fn box_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for m in MetricSpec::catalog() {
        for t in tetrads(&m) {
            for _ in 0..10 {
                let p = sample(&m, &mut rng);
                for v in Variant::BOTH {
                    let r = audit(
                        &t,
                        &p,
                        AuditOptions {
                            variant: v,
                            step: Step::default(),
                        },
                    )
                    .map_err(|e| e.to_string())?;
                    worst = worst.max(r.lhs_rhs_defect);
                    n += 1;
                }
            }
        }
    }
    check(
        worst < LHS_RHS_TOL,
        format!("{n} (metric, tetrad, variant, point) cases, max |box q - rhs| = {worst:.2e} (< 1e-5)"),
    )
}

fn refutation_witness() -> Outcome {
    let cases = [
        (MetricSpec::schwarzschild(1.0).unwrap(), [0.0, 10.0, PI / 3.0, 0.0]),
        (MetricSpec::flrw(), [1.0, 0.0, 0.0, 0.0]),
        (MetricSpec::poly_diag(), [1.0, 2.0, 1.0, 1.0]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, x) in cases {
        let t = diagonal_tetrad(&m).unwrap();
        let p = m.point(x).unwrap();
        for v in Variant::BOTH {
            let r = audit(
                &t,
                &p,
                AuditOptions {
                    variant: v,
                    step: Step::default(),
                },
            )
            .map_err(|e| e.to_string())?;
            ok &= r.spread_rel > 0.1 && r.best_fit_residual > 0.05 && r.reliable;
            parts.push(format!(
                "{}/{} spread_rel {:.3} residual {:.3}",
                m.name(),
                v.name(),
                r.spread_rel,
                r.best_fit_residual
            ));
        }
    }
    check(
        ok,
        format!("spread_rel > 0.1 and residual > 0.05: {}", parts.join("; ")),
    )
}

fn proportional_control() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst = [0.0f64; 3];
    for m in MetricSpec::catalog() {
        for t in tetrads(&m) {
            for _ in 0..10 {
                let p = sample(&m, &mut rng);
                let c: f64 = rng.gen_range(-10.0..10.0);
                let q = t.eval(&p).map_err(|e| e.to_string())?;
                let qinv = inverse_tetrad(&t, &p).map_err(|e| e.to_string())?;
                let rhs: Matrix4<f64> = q * c;
                let table = candidate_r_table(&rhs, &q);
                let fit = best_fit_r(&rhs, &q);
                worst[0] = worst[0].max(table.spread_abs);
                worst[1] = worst[1].max((fit.r_star - c).abs());
                worst[2] = worst[2].max((trace_contraction(&qinv, &rhs) - 4.0 * c).abs());
            }
        }
    }
    check(
        worst[0] < 1e-9 && worst[1] < 1e-10 && worst[2] < 1e-8,
        format!(
            "rhs = c q: spread_abs {:.1e} (< 1e-9), |R* - c| {:.1e} (< 1e-10), |trace R - 4c| {:.1e} (< 1e-8)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn trace_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst: f64 = 0.0;
    for m in MetricSpec::catalog() {
        for t in tetrads(&m) {
            for _ in 0..100 {
                let p = sample(&m, &mut rng);
                worst = worst.max((tetrad_trace(&t, &p).map_err(|e| e.to_string())? - 4.0).abs());
            }
        }
    }
    check(
        worst < 1e-12,
        format!("800 points, max |q^l_a q^a_l - 4| = {worst:.1e} (< 1e-12)"),
    )
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn linter_corpus() -> Outcome {
    let read = |n: &str| std::fs::read_to_string(corpus(n)).map_err(|e| e.to_string());
    let postulate = lint_corpus(&read("tetrad_postulate.tix")?);
    let first = lint_corpus(&read("evans_first_proof.tix")?);
    let cartan = lint_corpus(&read("cartan_convention.tix")?);
    let covdiv = first
        .diagnostics
        .iter()
        .filter(|d| d.diagnostic.code == Code::NonTensorCovDiv)
        .count();
    let warn: Vec<_> = cartan.diagnostics.iter().collect();
    let warn_ok = warn.len() == 1
        && warn[0].diagnostic.code == Code::ContractionIdentity
        && warn[0].diagnostic.message.contains("dimension 4");
    check(
        postulate.diagnostics.is_empty() && covdiv >= 2 && warn_ok,
        format!(
            "postulate: {} diagnostics; Leibniz split: {covdiv} E-NONTENSOR-COVDIV; contraction: {} diagnostic(s), suggests 4: {warn_ok}",
            postulate.diagnostics.len(),
            cartan.diagnostics.len()
        ),
    )
}

fn determinism() -> Outcome {
    let args = [
        "audit",
        "--metric",
        "schwarzschild",
        "--M",
        "1",
        "--tetrad",
        "boost:01:0.1",
        "--grid",
        "r=6:20:3,theta=1.0:2.0:2",
        "--variant",
        "both",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_tetrad-audit"))
            .args(args)
            .env("TETRAD_AUDIT_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("audit exited with {:?}", out.status.code()));
        }
        outputs.push(out.stdout);
    }
    let again = tetrad_audit_cli::decode_json(std::str::from_utf8(&outputs[0]).unwrap()).map_err(|e| e.to_string())?;
    let reencoded = again.to_json().map_err(|e| e.to_string())?;
    check(
        outputs[0] == outputs[1] && reencoded.as_bytes() == outputs[0].as_slice(),
        format!(
            "two runs (1 and 4 threads): {} bytes, identical: {}; decode/re-encode identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1],
            reencoded.as_bytes() == outputs[0].as_slice()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("tetrad postulate certification", tetrad_postulate),
        ("Christoffel oracle agreement", christoffel_oracle),
        ("box q identity", box_identity),
        ("refutation witness", refutation_witness),
        ("proportionality control", proportional_control),
        ("trace identity", trace_identity),
        ("linter golden corpus", linter_corpus),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.2}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.2}s) {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
