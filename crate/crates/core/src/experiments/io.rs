//! CSV and JSON emission for sweeps and pulse traces.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::dynamics::PulseTrace;

use super::SweepResult;

/// First line of every CSV file.
pub const FORMAT_TAG: &str = concat!("# dlambda-fwm v", env!("CARGO_PKG_VERSION"));

/// Nine significant digits in scientific notation.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

fn write_header<W: Write>(w: &mut W, metadata: &[(String, String)]) -> io::Result<()> {
    writeln!(w, "{FORMAT_TAG}")?;
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

fn sweep_metadata(r: &SweepResult) -> Vec<(String, String)> {
    let mut meta = vec![
        ("solver".to_string(), r.spec.solver.name().to_string()),
        ("variable".to_string(), r.spec.variable.name().to_string()),
        ("unit".to_string(), r.spec.variable.unit().to_string()),
    ];
    meta.extend(r.spec.base.metadata().into_iter().map(|(k, v)| (k.to_string(), v)));
    meta
}

pub fn write_sweep_csv<W: Write>(w: &mut W, r: &SweepResult) -> io::Result<()> {
    write_header(w, &sweep_metadata(r))?;
    writeln!(w, "value,transmittance,ce,loss")?;
    for row in &r.rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_sig(row.value),
            fmt_sig(row.transmittance),
            fmt_sig(row.ce),
            fmt_sig(row.loss)
        )?;
    }
    Ok(())
}

pub fn sweep_json(r: &SweepResult) -> Value {
    let meta: serde_json::Map<String, Value> = sweep_metadata(r)
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    json!({
        "format": FORMAT_TAG.trim_start_matches("# "),
        "metadata": meta,
        "columns": ["value", "transmittance", "ce", "loss"],
        "rows": r.rows.iter().map(|row| json!([row.value, row.transmittance, row.ce, row.loss])).collect::<Vec<_>>(),
    })
}

pub fn write_pulse_csv<W: Write>(w: &mut W, trace: &PulseTrace, metadata: &[(String, String)]) -> io::Result<()> {
    write_header(w, metadata)?;
    writeln!(w, "t_us,probe_in,probe_out,signal_out")?;
    for k in 0..trace.t.len() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_sig(trace.t[k] * 1e6),
            fmt_sig(trace.probe_in[k]),
            fmt_sig(trace.probe_out[k]),
            fmt_sig(trace.signal_out[k])
        )?;
    }
    Ok(())
}
