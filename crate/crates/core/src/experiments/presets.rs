//! Reference parameter sets for the MOT and dark-SPOT configurations.
//!
//! fig2*: EIT slow light (no driving field). fig3*: MOT, α = 45.
//! fig4*: dark SPOT, α = 130. fig5*: pulsed FWM on the fig4 medium.
//! The `a` panels sweep Ω_d, the `b` panels sweep δ.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::PulseSpec;
use crate::error::{Error, Result};
use crate::params::{ConfigDocument, Scenario};

use super::{uniform_grid, Solver, SweepSpec, SweepVariable};

/// Probe pulse length used for the slow-light and pulsed-FWM figures, s.
pub const PULSE_DURATION: f64 = 30e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig5c,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig4a,
        Preset::Fig4b,
        Preset::Fig5a,
        Preset::Fig5b,
        Preset::Fig5c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
            Preset::Fig5c => "fig5c",
        }
    }

    fn pairs(self) -> Vec<(&'static str, &'static str)> {
        const MOT: [(&str, &str); 5] = [
            ("alpha", "45"),
            ("omega_c", "0.6"),
            ("omega_d", "0.6"),
            ("gamma21", "2e-4"),
            ("delta_kL_pi", "0.447"),
        ];
        const SPOT: [(&str, &str); 5] = [
            ("alpha", "130"),
            ("omega_c", "1.2"),
            ("omega_d", "1.2"),
            ("gamma21", "7e-4"),
            ("delta_kL_pi", "0.134"),
        ];
        let with = |base: &[(&'static str, &'static str)], delta: &'static str| {
            let mut v = base.to_vec();
            v.push(("delta_khz", delta));
            v
        };
        match self {
            Preset::Fig2a => vec![("alpha", "45"), ("omega_c", "0.6"), ("gamma21", "2e-4")],
            Preset::Fig2b => vec![("alpha", "130"), ("omega_c", "1.2"), ("gamma21", "7e-4")],
            Preset::Fig3a | Preset::Fig3b => with(&MOT, "-54"),
            Preset::Fig4a | Preset::Fig4b | Preset::Fig5a => with(&SPOT, "-27"),
            Preset::Fig5b => with(&SPOT, "93"),
            Preset::Fig5c => with(&SPOT, "-147"),
        }
    }

    fn mode(self) -> PresetMode {
        match self {
            Preset::Fig3a | Preset::Fig4a => PresetMode::Sweep {
                variable: SweepVariable::OmegaD,
                grid: uniform_grid(0.1, 2.5, 0.05),
            },
            Preset::Fig3b | Preset::Fig4b => PresetMode::Sweep {
                variable: SweepVariable::Delta,
                grid: uniform_grid(-200.0, 150.0, 5.0),
            },
            _ => PresetMode::Pulse(PulseSpec::gaussian(PULSE_DURATION)),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetMode {
    Sweep { variable: SweepVariable, grid: Vec<f64> },
    Pulse(PulseSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetSpec {
    pub preset: Preset,
    /// Preset parameters in the configuration dialect.
    pub document: ConfigDocument,
    pub mode: PresetMode,
}

impl PresetSpec {
    pub fn scenario(&self) -> Result<Scenario> {
        self.document.to_scenario()
    }

    /// Sweep over `base`, for the sweep presets.
    pub fn sweep_spec(&self, base: Scenario, solver: Solver) -> Option<SweepSpec> {
        match &self.mode {
            PresetMode::Sweep { variable, grid } => Some(SweepSpec {
                variable: *variable,
                grid: grid.clone(),
                base,
                solver,
            }),
            PresetMode::Pulse(_) => None,
        }
    }

    pub fn pulse_spec(&self) -> Option<PulseSpec> {
        match &self.mode {
            PresetMode::Pulse(p) => Some(*p),
            PresetMode::Sweep { .. } => None,
        }
    }
}

pub fn figure_preset(name: &str) -> Result<PresetSpec> {
    let preset: Preset = name.parse()?;
    Ok(PresetSpec {
        preset,
        document: ConfigDocument::from_pairs(&preset.pairs())?,
        mode: preset.mode(),
    })
}
