use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlambda-fwm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, name: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no `{name}` in\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty() || !o.stdout.is_empty());
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn steady_on_the_dark_spot_preset() {
    let o = run(&["steady", "--preset", "fig4a"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!((field(&text, "ce") - 0.91).abs() <= 0.03);
    let (t, ce, loss) = (field(&text, "transmittance"), field(&text, "ce"), field(&text, "loss"));
    assert!((t + ce + loss - 1.0).abs() < 1e-8);
}

#[test]
fn steady_reports_closed_form_discrepancy_in_regime() {
    let o = run(&["steady", "--preset", "fig4a", "--set", "gamma21=0", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "closed_form_ce_discrepancy") < 1e-8);
    let o = run(&["steady", "--preset", "fig4a"]);
    assert!(!stdout(&o).contains("discrepancy"));
}

#[test]
fn optimize_delta_on_the_dark_spot_preset() {
    let o = run(&["optimize-delta", "--preset", "fig4a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&stdout(&o), "delta_star_khz") + 28.0).abs() <= 0.5);
}

#[test]
fn config_file_then_overrides_last_wins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spot.cfg");
    std::fs::write(
        &path,
        "# dark SPOT\nalpha = 130\nomega_c = 1.2\nomega_d = 1.2\ngamma21 = 7e-4\ndelta_kL_pi = 0.134\ndelta_khz = -27\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let from_file = stdout(&run(&["steady", "--config", path]));
    let from_preset = stdout(&run(&["steady", "--preset", "fig4a"]));
    assert_eq!(field(&from_file, "ce"), field(&from_preset, "ce"));

    let o = run(&["steady", "--config", path, "--set", "alpha=10", "--set", "alpha=130"]);
    assert_eq!(field(&stdout(&o), "ce"), field(&from_file, "ce"));
    let o = run(&["steady", "--config", path, "--set", "omega_d=0"]);
    assert_eq!(field(&stdout(&o), "ce"), 0.0);
}

#[test]
fn error_exit_codes() {
    // Unknown override key and unknown preset are usage errors.
    assert_eq!(run(&["steady", "--preset", "fig4a", "--set", "bogus=1"]).status.code(), Some(1));
    assert_eq!(run(&["steady", "--preset", "fig9x"]).status.code(), Some(1));
    assert_eq!(run(&["steady", "--frobnicate"]).status.code(), Some(1));
    // Invalid values and solver-regime violations are domain errors.
    let o = run(&["steady", "--preset", "fig4a", "--set", "alpha=-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty() && !o.stderr.is_empty());
    assert_eq!(run(&["steady", "--preset", "fig4a", "--closed-form"]).status.code(), Some(2));
    assert_eq!(run(&["steady", "--set", "alpha=1"]).status.code(), Some(2));
}

#[test]
fn sweep_output_is_reproducible_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4b.csv");
    let o = run(&["sweep", "--preset", "fig4b", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read(&out).unwrap();
    assert_eq!(stdout(&run(&["sweep", "--preset", "fig4b"])).into_bytes(), written);
    assert_eq!(stdout(&run(&["preset", "fig4b"])).into_bytes(), written);
}

#[test]
fn explicit_sweep_grid_and_json_output() {
    let o = run(&[
        "sweep", "--preset", "fig4a", "--variable", "delta", "--start", "-40", "--stop", "-20", "--step", "5",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["metadata"]["variable"], "delta");
    assert_eq!(v["columns"][2], "ce");
    let o = run(&["sweep", "--preset", "fig5a"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pulse_trace_csv() {
    let o = run(&["pulse", "--preset", "fig2a", "--n-z", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip_while(|l| l.starts_with('#')).collect();
    assert_eq!(rows[0], "t_us,probe_in,probe_out,signal_out");
    assert!(rows.len() > 1000);
    assert!(String::from_utf8_lossy(&o.stderr).contains("probe delay"));
}

#[test]
fn bandwidth_command() {
    let o = run(&["bandwidth", "--preset", "fig4b", "--at-optimum"]);
    assert_eq!(o.status.code(), Some(0));
    let fwhm = field(&stdout(&o), "fwhm_mhz");
    assert!(fwhm > 0.0 && fwhm.is_finite());
}
