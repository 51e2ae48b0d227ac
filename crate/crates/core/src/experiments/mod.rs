//! Parameter sweeps, peak finding, conversion bandwidth and figure presets.

mod io;
mod presets;

pub use io::{fmt_sig, sweep_json, write_pulse_csv, write_sweep_csv, FORMAT_TAG};
pub use presets::{figure_preset, Preset, PresetMode, PresetSpec, PULSE_DURATION};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::steady_closed_form_for;
use crate::error::{Error, Result};
use crate::numeric::transfer_solve;
use crate::params::{DetuningSet, DriveParams, MediumParams, Scenario, SteadyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Driving Rabi frequency, Γ units.
    #[value(alias = "omega_d")]
    OmegaD,
    /// Two-photon detuning δ/2π, kHz.
    Delta,
    /// One-photon detuning Δp/2π, kHz.
    #[value(alias = "delta_p")]
    DeltaP,
    /// Optical depth.
    Alpha,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::OmegaD => "omega_d",
            SweepVariable::Delta => "delta",
            SweepVariable::DeltaP => "delta_p",
            SweepVariable::Alpha => "alpha",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweepVariable::OmegaD => "gamma",
            SweepVariable::Delta | SweepVariable::DeltaP => "kHz",
            SweepVariable::Alpha => "1",
        }
    }

    /// `base` with this variable set to `value` (in the variable's unit).
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut s = *base;
        match self {
            SweepVariable::OmegaD => s.drive.omega_d = value,
            SweepVariable::Delta => s.detuning.two_photon = s.medium.khz_to_gamma(value),
            SweepVariable::DeltaP => s.detuning.one_photon = s.medium.khz_to_gamma(value),
            SweepVariable::Alpha => s.medium.alpha = value,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    ClosedForm,
    Exact,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::ClosedForm => "closed_form",
            Solver::Exact => "exact",
        }
    }
}

/// Steady state of one parameter bundle with the chosen solver.
pub fn evaluate(s: &Scenario, solver: Solver) -> Result<SteadyResult> {
    s.validate()?;
    match solver {
        Solver::Exact => transfer_solve(&s.drive, &s.detuning, &s.medium),
        Solver::ClosedForm => steady_closed_form_for(&s.drive, &s.detuning, &s.medium),
    }
}

/// Inclusive grid `start, start + step, …` up to `stop`.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub base: Scenario,
    pub solver: Solver,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Range("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Range("sweep grid contains a non-finite value".into()));
        }
        let increasing = self.grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Range("sweep grid must be strictly monotonic".into()));
        }
        self.base.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub transmittance: f64,
    pub ce: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = spec
        .grid
        .par_iter()
        .map(|&value| {
            let at = |source: Error| Error::AtGridPoint {
                value,
                source: Box::new(source),
            };
            let r = evaluate(&spec.variable.apply(&spec.base, value), spec.solver).map_err(at)?;
            if !r.is_physical() {
                return Err(at(Error::Domain(format!(
                    "non-physical result T = {}, CE = {}",
                    r.transmittance, r.ce
                ))));
            }
            Ok(SweepRow {
                value,
                transmittance: r.transmittance,
                ce: r.ce,
                loss: r.loss,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub value: f64,
    pub ce: f64,
    /// The grid maximum sits on the first or last row; no refinement.
    pub on_boundary: bool,
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (d0, d2) = (x[1] - x[0], x[1] - x[2]);
    let denom = d0 * (y[1] - y[2]) - d2 * (y[1] - y[0]);
    if denom == 0.0 {
        return None;
    }
    let xv = x[1] - 0.5 * (d0 * d0 * (y[1] - y[2]) - d2 * d2 * (y[1] - y[0])) / denom;
    // Lagrange form evaluated at the vertex.
    let l = |i: usize, j: usize, k: usize| (xv - x[j]) * (xv - x[k]) / ((x[i] - x[j]) * (x[i] - x[k]));
    let yv = y[0] * l(0, 1, 2) + y[1] * l(1, 0, 2) + y[2] * l(2, 0, 1);
    Some((xv, yv))
}

/// Grid argmax of CE, refined by a three-point parabola when interior.
pub fn find_peak(r: &SweepResult) -> Result<Peak> {
    let rows = &r.rows;
    if rows.len() < 3 {
        return Err(Error::Range(format!("peak search needs >= 3 rows, got {}", rows.len())));
    }
    let best = rows
        .iter()
        .enumerate()
        .fold(0, |b, (i, row)| if row.ce > rows[b].ce { i } else { b });
    if best == 0 || best == rows.len() - 1 {
        return Ok(Peak {
            value: rows[best].value,
            ce: rows[best].ce,
            on_boundary: true,
        });
    }
    let x = [rows[best - 1].value, rows[best].value, rows[best + 1].value];
    let y = [rows[best - 1].ce, rows[best].ce, rows[best + 1].ce];
    let (value, ce) = parabola_vertex(x, y).unwrap_or((x[1], y[1]));
    Ok(Peak {
        value,
        ce,
        on_boundary: false,
    })
}

/// Step of the probe-detuning scan, Γ units.
pub const BANDWIDTH_STEP: f64 = 1e-3;
const BANDWIDTH_START_HALF_RANGE: f64 = 0.5;
const BANDWIDTH_MAX_HALF_RANGE: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthScan {
    /// Full width at half maximum of CE, MHz.
    pub fwhm_mhz: f64,
    /// Half-maximum crossings relative to the base probe frequency, MHz.
    pub lower_mhz: f64,
    pub upper_mhz: f64,
    pub peak_ce: f64,
    pub peak_offset_mhz: f64,
}

/// CE versus probe detuning around `det_base`.
///
/// Shifting the probe frequency by x moves the one-, two- and three-photon
/// detunings together; the half-maximum crossings are located by linear
/// interpolation on a grid of step [`BANDWIDTH_STEP`].
pub fn bandwidth_scan(m: &MediumParams, d: &DriveParams, det_base: &DetuningSet) -> Result<BandwidthScan> {
    let mut half_range = BANDWIDTH_START_HALF_RANGE;
    loop {
        let n = (half_range / BANDWIDTH_STEP).round() as i64;
        let xs: Vec<f64> = (-n..=n).map(|k| k as f64 * BANDWIDTH_STEP).collect();
        let ce = xs
            .par_iter()
            .map(|&x| transfer_solve(d, &det_base.probe_shifted(x), m).map(|r| r.ce))
            .collect::<Result<Vec<f64>>>()?;
        let best = ce.iter().enumerate().fold(0, |b, (i, &v)| if v > ce[b] { i } else { b });
        let peak = ce[best];
        if !(peak > 1e-12) {
            return Err(Error::Range(format!("no conversion peak (max CE = {peak:.3e})")));
        }
        let half = peak / 2.0;
        if ce[0] < half && ce[ce.len() - 1] < half {
            let cross = |i: usize, j: usize| xs[i] + (half - ce[i]) / (ce[j] - ce[i]) * (xs[j] - xs[i]);
            let mut hi = best;
            while ce[hi] >= half {
                hi += 1;
            }
            let mut lo = best;
            while ce[lo] >= half {
                lo -= 1;
            }
            let upper = cross(hi - 1, hi);
            let lower = cross(lo, lo + 1);
            let to_mhz = m.gamma_phys / (2.0 * std::f64::consts::PI * 1e6);
            return Ok(BandwidthScan {
                fwhm_mhz: (upper - lower) * to_mhz,
                lower_mhz: lower * to_mhz,
                upper_mhz: upper * to_mhz,
                peak_ce: peak,
                peak_offset_mhz: xs[best] * to_mhz,
            });
        }
        half_range *= 2.0;
        if half_range > BANDWIDTH_MAX_HALF_RANGE {
            return Err(Error::Range(format!(
                "CE stays above half maximum within ±{BANDWIDTH_MAX_HALF_RANGE} Γ"
            )));
        }
    }
}

/// FWHM of CE versus probe detuning, MHz.
pub fn bandwidth_fwhm(m: &MediumParams, d: &DriveParams, det_base: &DetuningSet) -> Result<f64> {
    bandwidth_scan(m, d, det_base).map(|b| b.fwhm_mhz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parse_config;

    fn dark_spot() -> Scenario {
        parse_config("alpha=130\nomega_c=1.2\nomega_d=1.2\ngamma21=7e-4\ndelta_kL_pi=0.134\ndelta_khz=-27").unwrap()
    }

    fn result_from(values: &[f64], ce: &[f64]) -> SweepResult {
        SweepResult {
            spec: SweepSpec {
                variable: SweepVariable::Delta,
                grid: values.to_vec(),
                base: dark_spot(),
                solver: Solver::Exact,
            },
            rows: values
                .iter()
                .zip(ce)
                .map(|(&value, &ce)| SweepRow {
                    value,
                    transmittance: 0.0,
                    ce,
                    loss: 1.0 - ce,
                })
                .collect(),
        }
    }

    #[test]
    fn grid_construction() {
        let g = uniform_grid(-200.0, 150.0, 5.0);
        assert_eq!(g.len(), 71);
        assert_eq!(g[0], -200.0);
        assert_eq!(*g.last().unwrap(), 150.0);
        assert_eq!(uniform_grid(0.1, 2.5, 0.05).len(), 49);
    }

    #[test]
    fn grid_validation() {
        let mut spec = SweepSpec {
            variable: SweepVariable::Delta,
            grid: vec![],
            base: dark_spot(),
            solver: Solver::Exact,
        };
        assert!(run_sweep(&spec).is_err());
        spec.grid = vec![1.0, 1.0];
        assert!(run_sweep(&spec).is_err());
        spec.grid = vec![3.0, 2.0, 1.0];
        assert_eq!(run_sweep(&spec).unwrap().rows.len(), 3);
    }

    #[test]
    fn single_point_matches_direct_solve() {
        let spec = SweepSpec {
            variable: SweepVariable::Delta,
            grid: vec![-27.0],
            base: dark_spot(),
            solver: Solver::Exact,
        };
        let r = run_sweep(&spec).unwrap();
        let s = dark_spot();
        let direct = transfer_solve(&s.drive, &s.detuning, &s.medium).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].ce, direct.ce);
        assert_eq!(r.rows[0].transmittance, direct.transmittance);
    }

    #[test]
    fn closed_form_outside_regime_is_rejected() {
        let spec = SweepSpec {
            variable: SweepVariable::Delta,
            grid: vec![-27.0, -20.0],
            base: dark_spot(),
            solver: Solver::ClosedForm,
        };
        let err = run_sweep(&spec).unwrap_err();
        assert!(matches!(err, Error::AtGridPoint { ref source, .. } if matches!(**source, Error::Regime(_))));
    }

    #[test]
    fn peak_refinement_is_exact_on_parabolas() {
        let xs = [-3.0, -1.0, 0.5, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.9 - 0.01 * (x - 0.3) * (x - 0.3)).collect();
        let p = find_peak(&result_from(&xs, &ys)).unwrap();
        assert!(!p.on_boundary);
        assert!((p.value - 0.3).abs() < 1e-12);
        assert!((p.ce - 0.9).abs() < 1e-12);
    }

    #[test]
    fn monotone_data_peaks_on_boundary() {
        let p = find_peak(&result_from(&[1.0, 2.0, 3.0, 4.0], &[0.1, 0.2, 0.3, 0.4])).unwrap();
        assert!(p.on_boundary);
        assert_eq!(p.value, 4.0);
        assert!(find_peak(&result_from(&[1.0, 2.0], &[0.1, 0.2])).is_err());
    }

    #[test]
    fn bandwidth_grows_with_drive_power() {
        let s = dark_spot();
        let base = bandwidth_fwhm(&s.medium, &s.drive, &s.detuning).unwrap();
        let strong = DriveParams::balanced(2.4).unwrap();
        let det = DetuningSet::two_photon(crate::analytic::optimal_delta(&s.medium, 2.4).unwrap());
        assert!(bandwidth_fwhm(&s.medium, &strong, &det).unwrap() > base);
    }

    #[test]
    fn bandwidth_without_medium_is_an_error() {
        let mut s = dark_spot();
        s.medium.alpha = 0.0;
        assert!(matches!(
            bandwidth_fwhm(&s.medium, &s.drive, &s.detuning),
            Err(Error::Range(_))
        ));
    }
}
