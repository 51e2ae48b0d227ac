//! Parameter types, unit conversions and the configuration dialect.
//!
//! Every rate, detuning and Rabi frequency is stored in units of Γ. The
//! physical value of Γ (`gamma_phys`, rad/s) is only needed to convert
//! frequencies given in kHz and times given in seconds.
//!
//! # Configuration dialect
//!
//! A configuration document is a list of `key = value` lines. `#` starts a
//! comment, either on its own line or after a value. Blank lines are
//! ignored, keys are case-sensitive, and a key may appear only once per
//! document. Unknown keys are rejected.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `alpha` | optical depth | required |
//! | `omega_c` | coupling Rabi frequency (Γ) | required |
//! | `omega_d` | driving Rabi frequency (Γ) | 0 |
//! | `omega_p0` | input probe amplitude (Γ), `re` or `re,im` | 1 |
//! | `gamma21` | ground-state dephasing (Γ) | 0 |
//! | `gamma31`, `gamma41` | optical coherence decay (Γ) | 1 |
//! | `gamma_phys_mhz` | Γ/2π in MHz | 6.0 |
//! | `delta_kL_pi` | phase mismatch ΔkL in units of π | 0 |
//! | `delta_khz` | two-photon detuning δ/2π in kHz | 0 |
//! | `delta_p_khz` | one-photon detuning Δp/2π in kHz | 0 |
//! | `Delta_khz` | three-photon detuning Δ/2π in kHz | 0 |

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Γ/2π used when none is given, in MHz.
pub const DEFAULT_GAMMA_MHZ: f64 = 6.0;

/// Default physical Γ in rad/s (2π × 6 MHz).
pub const DEFAULT_GAMMA_PHYS: f64 = 2.0 * PI * DEFAULT_GAMMA_MHZ * 1e6;

/// Numerical slack for the passivity invariants of [`SteadyResult`].
pub const PASSIVITY_SLACK: f64 = 1e-9;

/// Converts δ/2π in kHz to Γ units.
pub fn khz_to_gamma(khz: f64, gamma_phys: f64) -> f64 {
    2.0 * PI * khz * 1e3 / gamma_phys
}

/// Converts a detuning in Γ units to δ/2π in kHz.
pub fn gamma_to_khz(x: f64, gamma_phys: f64) -> f64 {
    x * gamma_phys / (2.0 * PI * 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumParams {
    /// Optical depth, shared by probe and signal transitions.
    pub alpha: f64,
    pub gamma21: f64,
    pub gamma31: f64,
    pub gamma41: f64,
    /// Phase-mismatch product ΔkL in radians.
    pub delta_kl: f64,
    /// Physical Γ in rad/s.
    pub gamma_phys: f64,
}

impl MediumParams {
    /// Medium with γ31 = γ41 = 1 and the default physical Γ.
    pub fn new(alpha: f64, gamma21: f64, delta_kl: f64) -> Result<Self> {
        let m = Self {
            alpha,
            gamma21,
            gamma31: 1.0,
            gamma41: 1.0,
            delta_kl,
            gamma_phys: DEFAULT_GAMMA_PHYS,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.alpha >= 0.0 && self.alpha.is_finite(), "alpha", self.alpha, "must be finite and >= 0")?;
        check(self.gamma21 >= 0.0 && self.gamma21.is_finite(), "gamma21", self.gamma21, "must be finite and >= 0")?;
        check(self.gamma31 > 0.0 && self.gamma31.is_finite(), "gamma31", self.gamma31, "must be finite and > 0")?;
        check(self.gamma41 > 0.0 && self.gamma41.is_finite(), "gamma41", self.gamma41, "must be finite and > 0")?;
        check(self.gamma_phys > 0.0 && self.gamma_phys.is_finite(), "gamma_phys", self.gamma_phys, "must be finite and > 0")?;
        check(self.delta_kl.is_finite(), "delta_kL", self.delta_kl, "must be finite")
    }

    pub fn khz_to_gamma(&self, khz: f64) -> f64 {
        khz_to_gamma(khz, self.gamma_phys)
    }

    pub fn gamma_to_khz(&self, x: f64) -> f64 {
        gamma_to_khz(x, self.gamma_phys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    pub omega_c: f64,
    pub omega_d: f64,
    /// Input probe amplitude at z = 0. Every reported ratio is normalized by it.
    pub omega_p0: C64,
}

impl DriveParams {
    pub fn new(omega_c: f64, omega_d: f64) -> Result<Self> {
        let d = Self {
            omega_c,
            omega_d,
            omega_p0: C64::new(1.0, 0.0),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn balanced(omega: f64) -> Result<Self> {
        Self::new(omega, omega)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.omega_c >= 0.0 && self.omega_c.is_finite(), "omega_c", self.omega_c, "must be finite and >= 0")?;
        check(self.omega_d >= 0.0 && self.omega_d.is_finite(), "omega_d", self.omega_d, "must be finite and >= 0")?;
        check(
            self.omega_p0.re.is_finite() && self.omega_p0.im.is_finite() && self.omega_p0.norm() > 0.0,
            "omega_p0",
            self.omega_p0.norm(),
            "must be finite and nonzero",
        )
    }
}

/// Detunings in Γ units. Signs follow δ = (ωp − ωc) − ω21.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DetuningSet {
    pub two_photon: f64,
    pub one_photon: f64,
    pub three_photon: f64,
}

impl DetuningSet {
    pub fn two_photon(delta: f64) -> Self {
        Self {
            two_photon: delta,
            ..Self::default()
        }
    }

    /// Shifts the probe frequency by `x`, which moves every detuning that
    /// contains ωp.
    pub fn probe_shifted(&self, x: f64) -> Self {
        Self {
            two_photon: self.two_photon + x,
            one_photon: self.one_photon + x,
            three_photon: self.three_photon + x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.two_photon.is_finite(), "delta", self.two_photon, "must be finite")?;
        check(self.one_photon.is_finite(), "delta_p", self.one_photon, "must be finite")?;
        check(self.three_photon.is_finite(), "Delta", self.three_photon, "must be finite")
    }
}

/// A complete parameter bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub medium: MediumParams,
    pub drive: DriveParams,
    pub detuning: DetuningSet,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        self.drive.validate()?;
        self.detuning.validate()
    }

    /// Key/value pairs in the configuration dialect, in documented order.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let m = &self.medium;
        let d = &self.drive;
        let det = &self.detuning;
        vec![
            ("alpha", fmt_num(m.alpha)),
            ("gamma21", fmt_num(m.gamma21)),
            ("gamma31", fmt_num(m.gamma31)),
            ("gamma41", fmt_num(m.gamma41)),
            ("gamma_phys_mhz", fmt_num(m.gamma_phys / (2.0 * PI * 1e6))),
            ("delta_kL_pi", fmt_num(m.delta_kl / PI)),
            ("omega_c", fmt_num(d.omega_c)),
            ("omega_d", fmt_num(d.omega_d)),
            ("omega_p0", format!("{},{}", fmt_num(d.omega_p0.re), fmt_num(d.omega_p0.im))),
            ("delta_khz", fmt_num(m.gamma_to_khz(det.two_photon))),
            ("delta_p_khz", fmt_num(m.gamma_to_khz(det.one_photon))),
            ("Delta_khz", fmt_num(m.gamma_to_khz(det.three_photon))),
        ]
    }
}

fn fmt_num(x: f64) -> String {
    format!("{:.12e}", x)
}

fn check(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}

/// Steady-state output amplitudes, normalized by the input probe amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyResult {
    /// Ω_p(L) / Ω_p0.
    pub probe_out: C64,
    /// Ω_s(0) / Ω_p0.
    pub signal_out: C64,
    pub transmittance: f64,
    pub ce: f64,
    pub loss: f64,
}

impl SteadyResult {
    pub fn from_amplitudes(probe_out: C64, signal_out: C64) -> Self {
        let transmittance = probe_out.norm_sqr();
        let ce = signal_out.norm_sqr();
        Self {
            probe_out,
            signal_out,
            transmittance,
            ce,
            loss: 1.0 - transmittance - ce,
        }
    }

    /// Empty medium: the probe passes unchanged and nothing is converted.
    pub fn vacuum() -> Self {
        Self::from_amplitudes(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Non-negativity and passivity within [`PASSIVITY_SLACK`].
    pub fn is_physical(&self) -> bool {
        self.transmittance >= 0.0
            && self.ce >= 0.0
            && self.loss >= -PASSIVITY_SLACK
            && self.transmittance + self.ce <= 1.0 + PASSIVITY_SLACK
    }
}

pub const REQUIRED_KEYS: [&str; 2] = ["alpha", "omega_c"];

pub const KNOWN_KEYS: [&str; 12] = [
    "alpha",
    "gamma21",
    "gamma31",
    "gamma41",
    "gamma_phys_mhz",
    "delta_kL_pi",
    "omega_c",
    "omega_d",
    "omega_p0",
    "delta_khz",
    "delta_p_khz",
    "Delta_khz",
];

/// Where a configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override(usize),
    Preset,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(n) => write!(f, "--set #{n}"),
            Origin::Preset => write!(f, "preset"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    origin: Origin,
}

/// A parsed but not yet validated configuration document.
///
/// Documents can be layered: presets, then a file, then `--set` overrides,
/// with later values replacing earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDocument {
    entries: Vec<Entry>,
}

fn config_error(key: &str, origin: Origin, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        line: match origin {
            Origin::Line(n) => n,
            Origin::Override(_) | Origin::Preset => 0,
        },
        at: origin.to_string(),
        message: message.into(),
    }
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line).ok_or_else(|| {
                config_error(line, Origin::Line(line_no), "expected `key = value`")
            })?;
            if doc.entries.iter().any(|e| e.key == key) {
                return Err(config_error(key, Origin::Line(line_no), "duplicate key"));
            }
            doc.insert(key, value, Origin::Line(line_no))?;
        }
        Ok(doc)
    }

    /// Builds a document from literal pairs, as used by presets.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut doc = Self::default();
        for (k, v) in pairs {
            doc.insert(k, v, Origin::Preset)?;
        }
        Ok(doc)
    }

    /// Applies a `key=value` override; the last value for a key wins.
    pub fn apply_override(&mut self, assignment: &str, index: usize) -> Result<()> {
        let origin = Origin::Override(index);
        let (key, value) = split_pair(assignment)
            .ok_or_else(|| config_error(assignment, origin, "expected `key=value`"))?;
        self.insert(key, value, origin)
    }

    /// Layers `other` on top of `self`.
    pub fn merge(&mut self, other: &ConfigDocument) {
        for e in &other.entries {
            self.entries.retain(|x| x.key != e.key);
            self.entries.push(e.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.key == key).map(|e| e.value.as_str())
    }

    fn insert(&mut self, key: &str, value: &str, origin: Origin) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(config_error(key, origin, "unknown key"));
        }
        if value.is_empty() {
            return Err(config_error(key, origin, "empty value"));
        }
        self.entries.retain(|e| e.key != key);
        self.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            origin,
        });
        Ok(())
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.entries.iter().find(|e| e.key == key) {
            Some(e) => e
                .value
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| config_error(key, e.origin, format!("malformed number `{}`", e.value))),
            None => default.ok_or_else(|| Error::MissingKeys(vec![key.to_string()])),
        }
    }

    fn complex(&self, key: &str, default: C64) -> Result<C64> {
        let Some(e) = self.entries.iter().find(|e| e.key == key) else {
            return Ok(default);
        };
        let bad = || config_error(key, e.origin, format!("malformed complex number `{}`", e.value));
        let mut parts = e.value.split(',').map(str::trim);
        let re = parts.next().and_then(|s| s.parse::<f64>().ok()).ok_or_else(bad)?;
        let im = match parts.next() {
            Some(s) => s.parse::<f64>().map_err(|_| bad())?,
            None => 0.0,
        };
        if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
            return Err(bad());
        }
        Ok(C64::new(re, im))
    }

    fn origin(&self, key: &str) -> Origin {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.origin)
            .unwrap_or(Origin::Preset)
    }

    /// Validates the document and converts it to Γ units.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let missing: Vec<String> = REQUIRED_KEYS
            .iter()
            .filter(|k| self.get(k).is_none())
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingKeys(missing));
        }

        let gamma_mhz = self.number("gamma_phys_mhz", Some(DEFAULT_GAMMA_MHZ))?;
        let medium = MediumParams {
            alpha: self.number("alpha", None)?,
            gamma21: self.number("gamma21", Some(0.0))?,
            gamma31: self.number("gamma31", Some(1.0))?,
            gamma41: self.number("gamma41", Some(1.0))?,
            delta_kl: self.number("delta_kL_pi", Some(0.0))? * PI,
            gamma_phys: 2.0 * PI * gamma_mhz * 1e6,
        };
        let drive = DriveParams {
            omega_c: self.number("omega_c", None)?,
            omega_d: self.number("omega_d", Some(0.0))?,
            omega_p0: self.complex("omega_p0", C64::new(1.0, 0.0))?,
        };
        let detuning = DetuningSet {
            two_photon: medium.khz_to_gamma(self.number("delta_khz", Some(0.0))?),
            one_photon: medium.khz_to_gamma(self.number("delta_p_khz", Some(0.0))?),
            three_photon: medium.khz_to_gamma(self.number("Delta_khz", Some(0.0))?),
        };

        let scenario = Scenario { medium, drive, detuning };
        scenario.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason, .. } => {
                let key = config_key_for(name);
                config_error(key, self.origin(key), reason)
            }
            other => other,
        })?;
        Ok(scenario)
    }
}

fn config_key_for(param: &str) -> &str {
    match param {
        "gamma_phys" => "gamma_phys_mhz",
        "delta_kL" => "delta_kL_pi",
        "delta" => "delta_khz",
        "delta_p" => "delta_p_khz",
        "Delta" => "Delta_khz",
        other => other,
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    (!k.is_empty()).then_some((k, v.trim()))
}

/// Parses a configuration document into a validated parameter bundle.
pub fn parse_config(text: &str) -> Result<Scenario> {
    ConfigDocument::parse(text)?.to_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn khz_examples() {
        assert!((khz_to_gamma(-27.0, DEFAULT_GAMMA_PHYS) + 0.0045).abs() < 1e-15);
        assert_eq!(khz_to_gamma(0.0, DEFAULT_GAMMA_PHYS), 0.0);
        assert!((khz_to_gamma(-70.0, DEFAULT_GAMMA_PHYS) + 0.011_666_666_666_666_7).abs() < 1e-15);
    }

    #[test]
    fn parses_dark_spot_document() {
        let s = parse_config("alpha = 130\nomega_c=1.2 # coupling\n").unwrap();
        assert_eq!(s.medium.alpha, 130.0);
        assert_eq!(s.drive.omega_c, 1.2);
        assert_eq!(s.drive.omega_d, 0.0);
        assert_eq!(s.medium.gamma31, 1.0);
        assert_eq!(s.drive.omega_p0, C64::new(1.0, 0.0));
    }

    #[test]
    fn full_document() {
        let text = "\
# dark SPOT
alpha = 130
gamma21 = 7e-4
delta_kL_pi = 0.134
omega_c = 1.2
omega_d = 1.2
omega_p0 = 0.5, -0.5
delta_khz = -27
gamma_phys_mhz = 6
";
        let s = parse_config(text).unwrap();
        assert!((s.medium.delta_kl - 0.134 * PI).abs() < 1e-15);
        assert!((s.detuning.two_photon + 0.0045).abs() < 1e-15);
        assert_eq!(s.drive.omega_p0, C64::new(0.5, -0.5));
    }

    #[test]
    fn negative_alpha_names_key_and_line() {
        let err = parse_config("omega_c = 1\nalpha = -1\n").unwrap_err();
        match err {
            Error::Config { key, line, .. } => {
                assert_eq!(key, "alpha");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_document_lists_required_keys() {
        let err = parse_config("").unwrap_err();
        assert_eq!(err, Error::MissingKeys(vec!["alpha".into(), "omega_c".into()]));
        assert!(err.to_string().contains("alpha, omega_c"));
    }

    #[test]
    fn rejects_unknown_malformed_and_duplicate() {
        assert!(matches!(
            parse_config("alpha=1\nomega_c=1\nfoo=2\n"),
            Err(Error::Config { ref key, line: 3, .. }) if key == "foo"
        ));
        assert!(matches!(
            parse_config("alpha=1x\nomega_c=1\n"),
            Err(Error::Config { ref key, line: 1, .. }) if key == "alpha"
        ));
        assert!(matches!(
            parse_config("alpha=1\nalpha=2\nomega_c=1"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(parse_config("alpha 1\n"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn overrides_are_last_wins() {
        let mut doc = ConfigDocument::parse("alpha = 45\nomega_c = 0.6\n").unwrap();
        doc.apply_override("alpha=100", 1).unwrap();
        doc.apply_override("alpha=130", 2).unwrap();
        assert_eq!(doc.to_scenario().unwrap().medium.alpha, 130.0);
        assert!(doc.apply_override("nope=1", 3).is_err());
    }

    #[test]
    fn metadata_round_trips() {
        let s = parse_config("alpha=130\nomega_c=1.2\nomega_d=1.1\ndelta_khz=-27\ndelta_kL_pi=0.134\ngamma21=7e-4").unwrap();
        let text: String = s
            .metadata()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let back = parse_config(&text).unwrap();
        assert!((back.detuning.two_photon - s.detuning.two_photon).abs() < 1e-15);
        assert!((back.medium.delta_kl - s.medium.delta_kl).abs() < 1e-15);
        assert_eq!(back.drive, s.drive);
    }

    #[test]
    fn steady_result_invariants() {
        let r = SteadyResult::from_amplitudes(C64::new(0.1, 0.2), C64::new(0.9, 0.0));
        assert!((r.loss - (1.0 - 0.05 - 0.81)).abs() < 1e-15);
        assert!(r.is_physical());
        assert!(!SteadyResult::from_amplitudes(C64::new(1.0, 0.0), C64::new(0.1, 0.0)).is_physical());
    }

    proptest! {
        #[test]
        fn unit_round_trip(x in -1e6f64..1e6, mhz in 0.5f64..50.0) {
            let g = 2.0 * PI * mhz * 1e6;
            let back = gamma_to_khz(khz_to_gamma(x, g), g);
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300));
        }

        #[test]
        fn parsing_is_deterministic(alpha in 0.0f64..300.0, oc in 0.0f64..5.0, d in -500.0f64..500.0) {
            let text = format!("alpha={alpha}\nomega_c={oc}\ndelta_khz={d}\n");
            prop_assert_eq!(parse_config(&text).unwrap(), parse_config(&text).unwrap());
        }
    }
}
