//! Command-line frontend.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or solver error, 3 a
//! failed validation criterion. Data goes to stdout (or `--out`), all
//! diagnostics to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analytic::{in_regime, optimal_delta, steady_closed_form_for};
use crate::dynamics::{energy_budget, group_delay, simulate_pulse, PulseSpec, DEFAULT_SPACE_POINTS};
use crate::error::Error;
use crate::experiments::{
    bandwidth_scan, figure_preset, find_peak, fmt_sig, run_sweep, sweep_json, uniform_grid, write_pulse_csv,
    write_sweep_csv, PresetMode, PresetSpec, Solver, SweepResult, SweepSpec, SweepVariable, FORMAT_TAG,
};
use crate::numeric::transfer_solve;
use crate::params::{ConfigDocument, Scenario, SteadyResult};
use crate::validation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dlambda-fwm", version, about = "Backward four-wave mixing in a double-Λ EIT medium")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state transmittance, conversion efficiency and loss.
    Steady {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Two-photon detuning that cancels the phase mismatch.
    OptimizeDelta {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep one parameter and tabulate the steady state.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: Output,
        /// Swept parameter (defaults to the sweep preset's variable).
        #[arg(long, value_enum)]
        variable: Option<SweepVariable>,
        /// First grid value, in the variable's unit.
        #[arg(long, requires_all = ["stop", "step"], allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, requires_all = ["start", "step"], allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long, requires_all = ["start", "stop"])]
        step: Option<f64>,
    },
    /// Simulate a probe pulse and write boundary intensity traces.
    Pulse {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        pulse: PulseArgs,
    },
    /// Conversion bandwidth (FWHM of CE against probe detuning).
    Bandwidth {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Use the phase-matched two-photon detuning instead of the configured one.
        #[arg(long)]
        at_optimum: bool,
    },
    /// Reproduce a figure preset (sweep or pulse) with optional overrides.
    Preset {
        /// Preset name, e.g. fig4b.
        name: String,
        /// key=value override; repeatable, last value wins.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        pulse: PulseArgs,
    },
    /// Run the self-validation suite and print a pass/fail table.
    Validate,
}

#[derive(Debug, Args)]
struct Input {
    /// Start from a figure preset.
    #[arg(long)]
    preset: Option<String>,
    /// Configuration file (`key = value` lines), layered on the preset.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// key=value override; repeatable, last value wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Transfer-matrix solver (default).
    #[arg(long, conflicts_with = "closed_form")]
    exact: bool,
    /// Closed-form solver; balanced drive and no dephasing only.
    #[arg(long)]
    closed_form: bool,
}

impl SolverFlags {
    fn solver(&self) -> Solver {
        if self.closed_form {
            Solver::ClosedForm
        } else {
            Solver::Exact
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[value(alias = "json-like")]
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Write data here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Gaussian,
    FlatTop,
}

#[derive(Debug, Args)]
struct PulseArgs {
    #[arg(long, value_enum)]
    shape: Option<Shape>,
    /// Pulse duration in μs (1/e² full width or hold time).
    #[arg(long, value_name = "US")]
    duration_us: Option<f64>,
    /// Spatial grid points.
    #[arg(long, default_value_t = DEFAULT_SPACE_POINTS)]
    n_z: usize,
}

impl PulseArgs {
    fn spec(&self, preset: Option<PulseSpec>) -> PulseSpec {
        let base = preset.unwrap_or_else(|| PulseSpec::gaussian(crate::experiments::PULSE_DURATION));
        if self.shape.is_none() && self.duration_us.is_none() {
            return base;
        }
        let duration = self.duration_us.map_or(base.duration, |us| us * 1e-6);
        match self.shape {
            Some(Shape::FlatTop) => PulseSpec::flat_top(duration),
            Some(Shape::Gaussian) => PulseSpec::gaussian(duration),
            None => match base.shape {
                crate::dynamics::PulseShape::Gaussian => PulseSpec::gaussian(duration),
                crate::dynamics::PulseShape::FlatTop { .. } => PulseSpec::flat_top(duration),
            },
        }
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
    Io(io::Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            // clap reports a bare invocation as a help display.
            return if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                EXIT_USAGE
            } else {
                code
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
        Err(Failure::Validation) => EXIT_VALIDATION,
    }
}

fn load_preset(name: &str) -> Result<PresetSpec, Failure> {
    figure_preset(name).map_err(|e| Failure::Usage(e.to_string()))
}

fn layered_document(input: &Input) -> Result<(ConfigDocument, Option<PresetSpec>), Failure> {
    let preset = input.preset.as_deref().map(load_preset).transpose()?;
    let mut doc = preset.as_ref().map(|p| p.document.clone()).unwrap_or_default();
    if let Some(path) = &input.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        doc.merge(&ConfigDocument::parse(&text)?);
    }
    for (i, a) in input.overrides.iter().enumerate() {
        doc.apply_override(a, i + 1).map_err(|e| match e {
            Error::Config { message, .. } => Failure::Usage(format!("--set `{a}`: {message}")),
            other => Failure::Domain(other),
        })?;
    }
    Ok((doc, preset))
}

fn open_output(out: &Output) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(w: &mut dyn Write, v: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)
}

fn write_record(w: &mut dyn Write, format: Format, fields: &[(&str, Value)], meta: &[(String, String)]) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "{FORMAT_TAG}")?;
            for (k, v) in meta {
                writeln!(w, "# {k}={v}")?;
            }
            writeln!(w, "quantity,value")?;
            for (k, v) in fields {
                match v.as_f64() {
                    Some(x) => writeln!(w, "{k},{}", fmt_sig(x))?,
                    None => writeln!(w, "{k},{}", v.as_str().unwrap_or(&v.to_string()))?,
                }
            }
            Ok(())
        }
        Format::Json => {
            let meta: serde_json::Map<String, Value> =
                meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            let data: serde_json::Map<String, Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            write_json(w, &json!({ "format": FORMAT_TAG.trim_start_matches("# "), "metadata": meta, "data": data }))
        }
    }
}

fn scenario_metadata(s: &Scenario) -> Vec<(String, String)> {
    s.metadata().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn steady_fields(r: &SteadyResult) -> Vec<(&'static str, Value)> {
    vec![
        ("transmittance", json!(r.transmittance)),
        ("ce", json!(r.ce)),
        ("loss", json!(r.loss)),
        ("probe_out_re", json!(r.probe_out.re)),
        ("probe_out_im", json!(r.probe_out.im)),
        ("signal_out_re", json!(r.signal_out.re)),
        ("signal_out_im", json!(r.signal_out.im)),
    ]
}

fn write_sweep(out: &Output, r: &SweepResult) -> Result<(), Failure> {
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => write_sweep_csv(&mut w, r)?,
        Format::Json => write_json(&mut w, &sweep_json(r))?,
    }
    w.flush()?;
    if let Ok(peak) = find_peak(r) {
        eprintln!(
            "peak CE {:.4} at {} = {:.4} {}{}",
            peak.ce,
            r.spec.variable.name(),
            peak.value,
            r.spec.variable.unit(),
            if peak.on_boundary { " (grid boundary)" } else { "" }
        );
    }
    Ok(())
}

fn write_pulse(out: &Output, s: &Scenario, pulse: &PulseSpec, n_z: usize) -> Result<(), Failure> {
    let trace = simulate_pulse(&s.medium, &s.drive, &s.detuning, pulse, n_z)?;
    let budget = energy_budget(&trace);
    let mut meta = scenario_metadata(s);
    meta.push(("pulse_shape".into(), format!("{:?}", pulse.shape)));
    meta.push(("duration_us".into(), fmt_sig(pulse.duration * 1e6)));
    meta.push(("n_t".into(), pulse.grid.n_t.to_string()));
    meta.push(("n_z".into(), n_z.to_string()));
    let mut w = open_output(out)?;
    match out.format {
        Format::Csv => write_pulse_csv(&mut w, &trace, &meta)?,
        Format::Json => {
            let meta: serde_json::Map<String, Value> = meta.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            write_json(
                &mut w,
                &json!({
                    "format": FORMAT_TAG.trim_start_matches("# "),
                    "metadata": meta,
                    "columns": ["t_us", "probe_in", "probe_out", "signal_out"],
                    "rows": (0..trace.t.len())
                        .map(|k| json!([trace.t[k] * 1e6, trace.probe_in[k], trace.probe_out[k], trace.signal_out[k]]))
                        .collect::<Vec<_>>(),
                }),
            )?
        }
    }
    w.flush()?;
    eprintln!(
        "pulse T {:.4}, CE {:.4}, loss {:.4}{}",
        budget.transmittance,
        budget.ce,
        budget.loss,
        if budget.truncated { " (output truncated by the time window)" } else { "" }
    );
    if let Ok(delay) = group_delay(&trace) {
        eprintln!("probe delay {:.3} us", delay * 1e6);
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Steady { input, solver, output } => {
            let (doc, _) = layered_document(&input)?;
            let s = doc.to_scenario()?;
            let (r, discrepancy) = match solver.solver() {
                Solver::ClosedForm => (steady_closed_form_for(&s.drive, &s.detuning, &s.medium)?, None),
                Solver::Exact => {
                    let r = transfer_solve(&s.drive, &s.detuning, &s.medium)?;
                    let cf = in_regime(&s.drive, &s.detuning, &s.medium)
                        .ok()
                        .and_then(|()| steady_closed_form_for(&s.drive, &s.detuning, &s.medium).ok());
                    (r, cf.map(|cf| (cf.ce - r.ce).abs()))
                }
            };
            let mut fields = steady_fields(&r);
            if let Some(d) = discrepancy {
                fields.push(("closed_form_ce_discrepancy", json!(d)));
            }
            let mut meta = vec![("solver".to_string(), solver.solver().name().to_string())];
            meta.extend(scenario_metadata(&s));
            let mut w = open_output(&output)?;
            write_record(&mut w, output.format, &fields, &meta)?;
            w.flush()?;
            Ok(())
        }
        Command::OptimizeDelta { input, output } => {
            let (doc, _) = layered_document(&input)?;
            let s = doc.to_scenario()?;
            let delta = optimal_delta(&s.medium, s.drive.omega_c)?;
            let fields = [
                ("delta_star_gamma", json!(delta)),
                ("delta_star_khz", json!(s.medium.gamma_to_khz(delta))),
            ];
            let mut w = open_output(&output)?;
            write_record(&mut w, output.format, &fields, &scenario_metadata(&s))?;
            w.flush()?;
            Ok(())
        }
        Command::Sweep {
            input,
            solver,
            output,
            variable,
            start,
            stop,
            step,
        } => {
            let (doc, preset) = layered_document(&input)?;
            let base = doc.to_scenario()?;
            let preset_sweep = preset.as_ref().and_then(|p| match &p.mode {
                PresetMode::Sweep { variable, grid } => Some((*variable, grid.clone())),
                PresetMode::Pulse(_) => None,
            });
            let (variable, grid) = match (variable, start, stop, step, preset_sweep) {
                (Some(v), Some(a), Some(b), Some(h), _) => (v, grid_from(a, b, h)?),
                (v, None, None, None, Some((pv, grid))) if v.is_none() || v == Some(pv) => (pv, grid),
                _ => {
                    return Err(Failure::Usage(
                        "sweep needs --variable with --start/--stop/--step, or a sweep preset".into(),
                    ))
                }
            };
            let r = run_sweep(&SweepSpec {
                variable,
                grid,
                base,
                solver: solver.solver(),
            })?;
            write_sweep(&output, &r)
        }
        Command::Pulse { input, output, pulse } => {
            let (doc, preset) = layered_document(&input)?;
            let s = doc.to_scenario()?;
            let spec = pulse.spec(preset.and_then(|p| p.pulse_spec()));
            write_pulse(&output, &s, &spec, pulse.n_z)
        }
        Command::Bandwidth {
            input,
            output,
            at_optimum,
        } => {
            let (doc, _) = layered_document(&input)?;
            let s = doc.to_scenario()?;
            let mut det = s.detuning;
            if at_optimum {
                det.two_photon = optimal_delta(&s.medium, s.drive.omega_c)?;
            }
            let b = bandwidth_scan(&s.medium, &s.drive, &det)?;
            let fields = [
                ("fwhm_mhz", json!(b.fwhm_mhz)),
                ("lower_mhz", json!(b.lower_mhz)),
                ("upper_mhz", json!(b.upper_mhz)),
                ("peak_ce", json!(b.peak_ce)),
                ("peak_offset_mhz", json!(b.peak_offset_mhz)),
            ];
            let mut w = open_output(&output)?;
            write_record(&mut w, output.format, &fields, &scenario_metadata(&s))?;
            w.flush()?;
            Ok(())
        }
        Command::Preset {
            name,
            overrides,
            solver,
            output,
            pulse,
        } => {
            let input = Input {
                preset: Some(name),
                config: None,
                overrides,
            };
            let (doc, preset) = layered_document(&input)?;
            let preset = preset.expect("preset given");
            let s = doc.to_scenario()?;
            match &preset.mode {
                PresetMode::Sweep { .. } => {
                    let spec = preset.sweep_spec(s, solver.solver()).expect("sweep preset");
                    write_sweep(&output, &run_sweep(&spec)?)
                }
                PresetMode::Pulse(p) => write_pulse(&output, &s, &pulse.spec(Some(*p)), pulse.n_z),
            }
        }
        Command::Validate => {
            let outcomes = validation::run_all();
            let mut out = io::stdout().lock();
            for o in &outcomes {
                writeln!(out, "{}", o.line())?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            writeln!(out, "{} of {} criteria passed", outcomes.len() - failed, outcomes.len())?;
            if failed > 0 {
                Err(Failure::Validation)
            } else {
                Ok(())
            }
        }
    }
}

fn grid_from(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Failure::Usage("grid needs step > 0 and stop >= start".into()));
    }
    Ok(uniform_grid(start, stop, step))
}
