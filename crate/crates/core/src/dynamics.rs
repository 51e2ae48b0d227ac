//! Time-domain propagation of probe pulses through the FWM medium.
//!
//! The optical coherences ρ31 and ρ41 relax at Γ/2, much faster than any
//! pulse envelope of interest, and are eliminated adiabatically. The
//! transit time L/c is negligible, so at each instant the fields follow from
//! a quasi-static spatial solve with the ground-state coherence ρ21(z)
//! frozen: the probe is integrated forward from z = 0, the signal backward
//! from Ω_s(L) = 0. ρ21 is then advanced with the implicit trapezoidal rule.
//!
//! Validity: pulse spectral width well below Γ (≲ 0.1Γ), and the linear
//! response regime of [`crate::numeric`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DetuningSet, DriveParams, MediumParams, DEFAULT_GAMMA_PHYS};
use crate::C64;

/// Upper bound on dt·Γ for the implicit step.
pub const MAX_DT_GAMMA: f64 = 0.5;
pub const MIN_TIME_STEPS: usize = 100;
pub const MIN_SPACE_POINTS: usize = 50;
pub const DEFAULT_SPACE_POINTS: usize = 200;
pub const MAX_ITERATIONS: usize = 50;
pub const ITERATION_TOL: f64 = 1e-12;
/// Grid slack after the pulse, in multiples of the expected EIT delay.
pub const DELAY_MARGIN: f64 = 3.0;
/// Output tail, relative to the peak, above which a trace counts as truncated.
pub const TAIL_THRESHOLD: f64 = 1e-4;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PulseShape {
    /// Gaussian; `duration` is the full width at 1/e² of the intensity.
    /// The envelope is cut at ±2 widths from its centre.
    Gaussian,
    /// Hold for `duration` between sin² ramps of length `ramp`.
    FlatTop { ramp: f64 },
}

/// Uniform time grid with `n_t` steps (n_t + 1 samples), in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl TimeGrid {
    /// Grid over `[t_min, t_max]` fine enough for the default Γ.
    pub fn covering(t_min: f64, t_max: f64) -> Self {
        let steps = ((t_max - t_min) * DEFAULT_GAMMA_PHYS / (0.95 * MAX_DT_GAMMA)).ceil() as usize;
        Self {
            t_min,
            t_max,
            n_t: steps.max(MIN_TIME_STEPS),
        }
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.n_t as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.dt()
    }

    /// Same span with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_t: self.n_t * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Seconds.
    pub duration: f64,
    /// Peak probe amplitude Ω_p0 in Γ units.
    pub peak_amplitude: C64,
    /// Start of the pulse support, seconds.
    pub t_start: f64,
    pub grid: TimeGrid,
}

impl PulseSpec {
    /// Gaussian pulse starting at t = 0 on a window of five widths.
    pub fn gaussian(duration: f64) -> Self {
        Self {
            shape: PulseShape::Gaussian,
            duration,
            peak_amplitude: C64::new(1.0, 0.0),
            t_start: 0.0,
            grid: TimeGrid::covering(0.0, 5.0 * duration),
        }
    }

    /// Flat-top pulse with ramps of a tenth of the hold time.
    pub fn flat_top(duration: f64) -> Self {
        let ramp = duration / 10.0;
        let support = 2.0 * ramp + duration;
        Self {
            shape: PulseShape::FlatTop { ramp },
            duration,
            peak_amplitude: C64::new(1.0, 0.0),
            t_start: 0.0,
            grid: TimeGrid::covering(0.0, support + duration / 2.0),
        }
    }

    /// `[start, end]` of the nonzero envelope.
    pub fn support(&self) -> (f64, f64) {
        let len = match self.shape {
            PulseShape::Gaussian => 4.0 * self.duration,
            PulseShape::FlatTop { ramp } => 2.0 * ramp + self.duration,
        };
        (self.t_start, self.t_start + len)
    }

    /// Interval where a flat-top pulse holds its peak value.
    pub fn hold_window(&self) -> Option<(f64, f64)> {
        match self.shape {
            PulseShape::FlatTop { ramp } => {
                Some((self.t_start + ramp, self.t_start + ramp + self.duration))
            }
            PulseShape::Gaussian => None,
        }
    }

    /// Input amplitude Ω_p(0, t).
    pub fn envelope(&self, t: f64) -> C64 {
        let (start, end) = self.support();
        if t < start || t > end {
            return C64::new(0.0, 0.0);
        }
        let shape = match self.shape {
            PulseShape::Gaussian => {
                let x = (t - start - 2.0 * self.duration) / self.duration;
                (-4.0 * x * x).exp()
            }
            PulseShape::FlatTop { ramp } => {
                let s = (t - start).min(end - t);
                if s >= ramp {
                    1.0
                } else {
                    let u = (std::f64::consts::FRAC_PI_2 * s / ramp).sin();
                    u * u
                }
            }
        };
        self.peak_amplitude * shape
    }

    /// Checks the pulse against the grid and the medium's time scales.
    pub fn validate(&self, m: &MediumParams, d: &DriveParams) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::Precondition(format!("pulse duration must be > 0, got {}", self.duration)));
        }
        if let PulseShape::FlatTop { ramp } = self.shape {
            if !(ramp > 0.0) {
                return Err(Error::Precondition(format!("ramp must be > 0, got {ramp}")));
            }
        }
        if self.peak_amplitude.norm() == 0.0 || !self.peak_amplitude.norm().is_finite() {
            return Err(Error::Precondition("peak amplitude must be finite and nonzero".into()));
        }
        if self.grid.n_t < MIN_TIME_STEPS {
            return Err(Error::Precondition(format!("n_t = {} < {MIN_TIME_STEPS}", self.grid.n_t)));
        }
        let dt_gamma = self.grid.dt() * m.gamma_phys;
        if !(dt_gamma > 0.0 && dt_gamma <= MAX_DT_GAMMA) {
            return Err(Error::Precondition(format!(
                "dt·Γ = {dt_gamma:.4} exceeds {MAX_DT_GAMMA}; increase n_t"
            )));
        }
        let (start, end) = self.support();
        let needed = end + DELAY_MARGIN * expected_delay(m, d);
        if self.grid.t_min > start || self.grid.t_max < needed {
            return Err(Error::Precondition(format!(
                "time grid [{:.3e}, {:.3e}] s must cover [{start:.3e}, {needed:.3e}] s",
                self.grid.t_min, self.grid.t_max
            )));
        }
        Ok(())
    }
}

/// First-order EIT group delay α γ31 / (Ω_c² Γ) in seconds; zero without a
/// coupling field.
pub fn expected_delay(m: &MediumParams, d: &DriveParams) -> f64 {
    if d.omega_c > 0.0 {
        m.alpha * m.gamma31 / (d.omega_c * d.omega_c * m.gamma_phys)
    } else {
        0.0
    }
}

/// Boundary intensities normalized by |Ω_p0|².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseTrace {
    /// Seconds.
    pub t: Vec<f64>,
    pub probe_in: Vec<f64>,
    pub probe_out: Vec<f64>,
    pub signal_out: Vec<f64>,
}

impl PulseTrace {
    /// Mean (T, CE) over samples with `t0 <= t <= t1`, relative to the input.
    pub fn window_ratios(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        let (mut pin, mut pout, mut sout) = (0.0, 0.0, 0.0);
        for k in 0..self.t.len() {
            if self.t[k] >= t0 && self.t[k] <= t1 {
                pin += self.probe_in[k];
                pout += self.probe_out[k];
                sout += self.signal_out[k];
            }
        }
        (pin > 0.0).then(|| (pout / pin, sout / pin))
    }
}

/// φ_k(x) = Σ_n xⁿ / (n + k)! for k = 1..=4.
fn phi_functions(x: C64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    if x.norm() < 1.0 {
        let mut first = 1.0;
        for (k, slot) in out.iter_mut().enumerate() {
            first /= (k + 1) as f64;
            let mut term = C64::new(first, 0.0);
            let mut sum = term;
            for n in 1..30 {
                term = term * x / (n + k + 1) as f64;
                sum += term;
            }
            *slot = sum;
        }
    } else {
        // φ_{k+1} = (φ_k − 1/k!) / x, stable once |x| ≥ 1.
        let (mut prev, mut inv_fact) = (x.exp(), 1.0);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (prev - inv_fact) / x;
            prev = *slot;
            inv_fact /= (k + 1) as f64;
        }
    }
    out
}

/// Node offsets, in steps from the start of the interval, of the cubic
/// stencils used at the first, interior and last intervals.
const STENCILS: [[f64; 4]; 3] = [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.0, 1.0, 2.0], [-2.0, -1.0, 0.0, 1.0]];

/// Monomial coefficients of the Lagrange basis polynomial `i` on `nodes`.
fn lagrange_monomials(nodes: &[f64; 4], i: usize) -> [f64; 4] {
    let mut c = [1.0, 0.0, 0.0, 0.0];
    let mut degree = 0;
    for (j, &t) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        let scale = 1.0 / (nodes[i] - t);
        for m in (0..=degree + 1).rev() {
            let lower = if m > 0 { c[m - 1] } else { 0.0 };
            c[m] = (lower - t * c[m]) * scale;
        }
        degree += 1;
    }
    c
}

/// Exponential integrator for y' = a y + g(x) on a uniform grid, with g
/// interpolated by the cubic through four neighbouring nodes. Exact for
/// cubic sources, fourth order otherwise.
#[derive(Debug, Clone, Copy)]
struct Propagator {
    decay: C64,
    weights: [[C64; 4]; 3],
}

impl Propagator {
    fn new(a: C64, h: f64) -> Self {
        let phi = phi_functions(a * h);
        // h ∫₀¹ e^{ah(1−θ)} θ^m dθ = h m! φ_{m+1}(ah)
        let moments = [phi[0] * h, phi[1] * h, phi[2] * (2.0 * h), phi[3] * (6.0 * h)];
        let mut weights = [[C64::new(0.0, 0.0); 4]; 3];
        for (row, nodes) in weights.iter_mut().zip(&STENCILS) {
            for (i, w) in row.iter_mut().enumerate() {
                let c = lagrange_monomials(nodes, i);
                *w = (0..4).map(|m| moments[m] * c[m]).sum();
            }
        }
        Self {
            decay: (a * h).exp(),
            weights,
        }
    }

    /// y at node `j + 1` of `n` from its value at node `j`; `g(i)` is the
    /// source at node `i`.
    fn advance(&self, y: C64, j: usize, n: usize, g: impl Fn(usize) -> C64) -> C64 {
        let (stencil, first) = if j == 0 {
            (0, 0)
        } else if j + 2 >= n {
            (2, n - 4)
        } else {
            (1, j - 1)
        };
        self.weights[stencil]
            .iter()
            .enumerate()
            .fold(self.decay * y, |acc, (i, w)| acc + w * g(first + i))
    }
}

/// Coefficients of the eliminated model, all in Γ units and z in units of L.
struct Model {
    /// dρ21/dτ = local ρ21 + field_c Ω_p + field_d Ω_s.
    local: C64,
    field_c: C64,
    field_d: C64,
    /// Ω_p' = a_p Ω_p + a_p Ω_c ρ21
    probe: Propagator,
    probe_src: C64,
    /// In y = 1 − z: Ω_s' = −a_s Ω_s − e_s ρ21
    signal: Propagator,
    signal_src: C64,
}

impl Model {
    fn new(m: &MediumParams, d: &DriveParams, det: &DetuningSet, n_z: usize) -> Self {
        let d3 = C64::new(m.gamma31 / 2.0, -det.one_photon);
        let d4 = C64::new(m.gamma41 / 2.0, -det.three_photon);
        let (wc, wd) = (d.omega_c, d.omega_d);
        let h = 1.0 / (n_z - 1) as f64;
        let a_p = -m.alpha * m.gamma31 / (4.0 * d3);
        let a_s = -I * m.delta_kl + m.alpha * m.gamma41 / (4.0 * d4);
        let e_s = m.alpha * m.gamma41 * wd / (4.0 * d4);
        Self {
            local: -wc * wc / (4.0 * d3) - wd * wd / (4.0 * d4) + I * det.two_photon - m.gamma21 / 2.0,
            field_c: -wc / (4.0 * d3),
            field_d: -wd / (4.0 * d4),
            probe: Propagator::new(a_p, h),
            probe_src: a_p * wc,
            signal: Propagator::new(-a_s, h),
            signal_src: -e_s,
        }
    }

    /// Quasi-static fields for frozen ρ21(z).
    fn fields(&self, rho: &[C64], input: C64, probe: &mut [C64], signal: &mut [C64]) {
        let n = rho.len();
        probe[0] = input;
        for j in 0..n - 1 {
            probe[j + 1] = self.probe.advance(probe[j], j, n, |i| self.probe_src * rho[i]);
        }
        // Signal steps run along y = 1 − z, node i of y being node n − 1 − i of z.
        signal[n - 1] = C64::new(0.0, 0.0);
        for j in 0..n - 1 {
            let z = n - 1 - j;
            signal[z - 1] = self.signal.advance(signal[z], j, n, |i| self.signal_src * rho[n - 1 - i]);
        }
    }

    fn field_drive(&self, probe: C64, signal: C64) -> C64 {
        self.field_c * probe + self.field_d * signal
    }
}

/// Propagates the pulse `p` and returns the boundary intensity traces.
pub fn simulate_pulse(
    m: &MediumParams,
    d: &DriveParams,
    det: &DetuningSet,
    p: &PulseSpec,
    n_z: usize,
) -> Result<PulseTrace> {
    m.validate()?;
    d.validate()?;
    det.validate()?;
    if n_z < MIN_SPACE_POINTS {
        return Err(Error::Precondition(format!("n_z = {n_z} < {MIN_SPACE_POINTS}")));
    }
    p.validate(m, d)?;

    let model = Model::new(m, d, det, n_z);
    let dt = p.grid.dt() * m.gamma_phys;
    let denom = 1.0 - 0.5 * dt * model.local;
    let norm = p.peak_amplitude.norm_sqr();
    let samples = p.grid.n_t + 1;

    let zero = C64::new(0.0, 0.0);
    let mut rho = vec![zero; n_z];
    let mut guess = vec![zero; n_z];
    let mut rate = vec![zero; n_z];
    let mut base = vec![zero; n_z];
    let mut probe = vec![zero; n_z];
    let mut signal = vec![zero; n_z];

    let mut trace = PulseTrace {
        t: Vec::with_capacity(samples),
        probe_in: Vec::with_capacity(samples),
        probe_out: Vec::with_capacity(samples),
        signal_out: Vec::with_capacity(samples),
    };
    let mut record = |k: usize, input: C64, probe: &[C64], signal: &[C64]| {
        trace.t.push(p.grid.time(k));
        trace.probe_in.push(input.norm_sqr() / norm);
        trace.probe_out.push(probe[n_z - 1].norm_sqr() / norm);
        trace.signal_out.push(signal[0].norm_sqr() / norm);
    };

    let input0 = p.envelope(p.grid.time(0));
    model.fields(&rho, input0, &mut probe, &mut signal);
    for j in 0..n_z {
        rate[j] = model.local * rho[j] + model.field_drive(probe[j], signal[j]);
    }
    record(0, input0, &probe, &signal);

    for k in 1..samples {
        let input = p.envelope(p.grid.time(k));
        for j in 0..n_z {
            base[j] = rho[j] + 0.5 * dt * rate[j];
            guess[j] = rho[j] + dt * rate[j];
        }
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            model.fields(&guess, input, &mut probe, &mut signal);
            let (mut diff, mut scale) = (0.0f64, 0.0f64);
            for j in 0..n_z {
                let next = (base[j] + 0.5 * dt * model.field_drive(probe[j], signal[j])) / denom;
                diff = diff.max((next - guess[j]).norm());
                scale = scale.max(next.norm());
                guess[j] = next;
            }
            if diff <= ITERATION_TOL * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                step: k,
                iterations: MAX_ITERATIONS,
            });
        }
        rho.copy_from_slice(&guess);
        model.fields(&rho, input, &mut probe, &mut signal);
        for j in 0..n_z {
            rate[j] = model.local * rho[j] + model.field_drive(probe[j], signal[j]);
        }
        record(k, input, &probe, &signal);
    }
    Ok(trace)
}

fn trapezoid(t: &[f64], y: impl Fn(usize) -> f64) -> f64 {
    (1..t.len()).map(|k| 0.5 * (t[k] - t[k - 1]) * (y(k) + y(k - 1))).sum()
}

fn centroid(t: &[f64], y: &[f64]) -> Option<f64> {
    let energy = trapezoid(t, |k| y[k]);
    (energy > 0.0 && energy.is_finite()).then(|| trapezoid(t, |k| t[k] * y[k]) / energy)
}

/// Intensity-centroid delay of the transmitted probe, seconds.
pub fn group_delay(trace: &PulseTrace) -> Result<f64> {
    let out = centroid(&trace.t, &trace.probe_out)
        .ok_or_else(|| Error::Domain("transmitted probe carries no energy".into()))?;
    let inp = centroid(&trace.t, &trace.probe_in)
        .ok_or_else(|| Error::Domain("input probe carries no energy".into()))?;
    Ok(out - inp)
}

/// Pulse-integrated transmission, conversion and loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBudget {
    pub transmittance: f64,
    pub ce: f64,
    pub loss: f64,
    /// Set when an output trace still exceeds [`TAIL_THRESHOLD`] of its peak
    /// at the end of the grid.
    pub truncated: bool,
}

pub fn energy_budget(trace: &PulseTrace) -> EnergyBudget {
    let t = &trace.t;
    let e_in = trapezoid(t, |k| trace.probe_in[k]);
    let e_p = trapezoid(t, |k| trace.probe_out[k]);
    let e_s = trapezoid(t, |k| trace.signal_out[k]);
    let cut = |y: &[f64]| {
        let peak = y.iter().cloned().fold(0.0, f64::max);
        peak > 0.0 && y.last().is_some_and(|&v| v > TAIL_THRESHOLD * peak)
    };
    let (transmittance, ce) = if e_in > 0.0 { (e_p / e_in, e_s / e_in) } else { (0.0, 0.0) };
    EnergyBudget {
        transmittance,
        ce,
        loss: 1.0 - transmittance - ce,
        truncated: cut(&trace.probe_out) || cut(&trace.signal_out),
    }
}
