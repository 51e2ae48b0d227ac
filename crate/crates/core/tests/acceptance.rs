//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the table is always
//! printed.
//!
//! Each criterion runs the library's self-check from `validation` (whose
//! tolerances are pinned there) and, where the expected value is derived,
//! an independent computation made here from first principles.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use dlambda_fwm::analytic::{optimal_delta, steady_closed_form};
use dlambda_fwm::dynamics::expected_delay;
use dlambda_fwm::experiments::figure_preset;
use dlambda_fwm::params::{DetuningSet, DriveParams, MediumParams};
use dlambda_fwm::validation::{self, Outcome};

/// Γ = 2π × 6 MHz, in rad/s.
const GAMMA: f64 = 2.0 * PI * 6e6;
/// kHz per Γ unit of angular detuning.
const KHZ_PER_GAMMA: f64 = 6e3;

const RICCATI_STEPS: usize = 8000;
const RICCATI_TOL: f64 = 1e-8;

fn with_check(mut o: Outcome, ok: bool, detail: String) -> Outcome {
    o.passed &= ok;
    o.detail = format!("{}; independent: {detail}", o.detail);
    o
}

/// Closed form against the Riccati reference on a deterministic grid.
fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for alpha in [1.0, 37.0, 130.0, 200.0] {
        for omega in [0.2, 1.2, 3.0] {
            for dkl in [-2.5, 0.134 * PI, 3.0] {
                for delta in [-0.04, 0.013] {
                    let m = MediumParams::new(alpha, 0.0, dkl).unwrap();
                    let cf = steady_closed_form(&m, omega, delta).unwrap();
                    let d = DriveParams::balanced(omega).unwrap();
                    let (p, s) = common::riccati_solve(&d, &DetuningSet::two_photon(delta), &m, RICCATI_STEPS);
                    worst = worst.max((cf.probe_out - p).norm()).max((cf.signal_out - s).norm());
                    n += 1;
                }
            }
        }
    }
    with_check(
        validation::oracle_equivalence(),
        worst <= RICCATI_TOL,
        format!("closed form vs Riccati on {n} points, max |Δ| {worst:.1e}"),
    )
}

/// δ*/2π = −ΔkL Ω² / α in Γ units, converted to kHz.
fn criterion_2() -> Outcome {
    let spot = -0.134 * PI * 1.2f64.powi(2) / 130.0 * KHZ_PER_GAMMA;
    let mot = -0.447 * PI * 0.6f64.powi(2) / 45.0 * KHZ_PER_GAMMA;
    let lib = |alpha: f64, dkl: f64, omega: f64| {
        let m = MediumParams::new(alpha, 0.0, dkl).unwrap();
        m.gamma_to_khz(optimal_delta(&m, omega).unwrap())
    };
    let ok = (lib(130.0, 0.134 * PI, 1.2) - spot).abs() < 1e-9 && (lib(45.0, 0.447 * PI, 0.6) - mot).abs() < 1e-9;
    with_check(
        validation::optimal_detuning(),
        ok,
        format!("formula gives {spot:.2} / {mot:.2} kHz"),
    )
}

/// φ = δ α γ31 / Ω_c² with δ converted from kHz.
fn criterion_5() -> Outcome {
    let phi = |khz: f64| khz / KHZ_PER_GAMMA * 130.0 / 1.44 / PI;
    let (a, c) = (phi(-27.0), phi(-147.0));
    let ok = (a + 0.129).abs() <= 0.005 && (c + 0.704).abs() <= 0.005;
    with_check(validation::phase_shifts(), ok, format!("formula gives {a:.4}π / {c:.4}π"))
}

/// Slow-light delay α / (Ω_c² Γ).
fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, alpha, omega) in [("fig2a", 45.0, 0.6), ("fig2b", 130.0, 1.2)] {
        let want = alpha / (omega * omega * GAMMA);
        let s = figure_preset(name).unwrap().scenario().unwrap();
        ok &= (expected_delay(&s.medium, &s.drive) - want).abs() <= 1e-12 * want;
        parts.push(format!("{name} {:.3} us", want * 1e6));
    }
    with_check(validation::slow_light_delay(), ok, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        validation::peak_ce_dark_spot,
        validation::peak_ce_mot,
        criterion_5,
        criterion_6,
        validation::dynamics_steady_consistency,
        validation::passivity_and_limits,
        validation::balanced_drive_optimality,
        validation::conversion_bandwidth,
    ];
    let mut failed = 0;
    println!("acceptance criteria");
    for run in criteria {
        let o = run();
        failed += usize::from(!o.passed);
        println!("{}", o.line());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
