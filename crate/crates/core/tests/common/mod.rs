//! Reference steady-state solver shared by the integration tests.
//!
//! Built directly from the Bloch and propagation equations, with nothing
//! taken from the library's solver path: the steady coherences come from
//! Cramer's rule and the boundary-value problem is solved by invariant
//! imbedding. With Ω_s(z) = R(z) Ω_p(z), R obeys a Riccati equation that is
//! integrated from R(1) = 0 towards z = 0, where it is contracting, so no
//! growing mode is ever propagated. Then
//!
//! ```text
//! Ω_s(0) / Ω_p(0) = R(0)
//! Ω_p(1) / Ω_p(0) = exp ∫ (M_pp + M_ps R) dz
//! ```

#![allow(dead_code)]

use dlambda_fwm::params::{DetuningSet, DriveParams, MediumParams};
use dlambda_fwm::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn det3(m: &[[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Steady (ρ21, ρ31, ρ41) for given probe and signal amplitudes.
pub fn coherences(probe: C64, signal: C64, d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> [C64; 3] {
    let half = |x: f64| I * (x / 2.0);
    // Rows: dρ21/dt, dρ31/dt, dρ41/dt = 0, unknowns (ρ21, ρ31, ρ41).
    let a = [
        [C64::new(-m.gamma21 / 2.0, det.two_photon), half(d.omega_c), half(d.omega_d)],
        [half(d.omega_c), C64::new(-m.gamma31 / 2.0, det.one_photon), C64::new(0.0, 0.0)],
        [half(d.omega_d), C64::new(0.0, 0.0), C64::new(-m.gamma41 / 2.0, det.three_photon)],
    ];
    let b = [C64::new(0.0, 0.0), -I * probe / 2.0, -I * signal / 2.0];
    let full = det3(&a);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut a_col = a;
        for row in 0..3 {
            a_col[row][col] = b[row];
        }
        *slot = det3(&a_col) / full;
    }
    out
}

/// Right-hand side of the steady propagation equations, z in units of L.
pub fn derivative(probe: C64, signal: C64, d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> (C64, C64) {
    let [_, rho31, rho41] = coherences(probe, signal, d, det, m);
    (
        I * (m.alpha * m.gamma31 / 2.0) * rho31,
        -I * m.delta_kl * signal - I * (m.alpha * m.gamma41 / 2.0) * rho41,
    )
}

/// (probe_out, signal_out) for Ω_p(0) = 1, Ω_s(1) = 0, using `steps` RK4 steps.
pub fn riccati_solve(d: &DriveParams, det: &DetuningSet, m: &MediumParams, steps: usize) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (pp, sp) = derivative(one, zero, d, det, m);
    let (ps, ss) = derivative(zero, one, d, det, m);
    let riccati = |r: C64| sp + ss * r - r * (pp + ps * r);

    let h = 1.0 / steps as f64;
    let mut r = vec![zero; steps + 1];
    for k in (0..steps).rev() {
        let y = r[k + 1];
        let k1 = riccati(y);
        let k2 = riccati(y - k1 * (h / 2.0));
        let k3 = riccati(y - k2 * (h / 2.0));
        let k4 = riccati(y - k3 * h);
        r[k] = y - (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    // Composite Simpson on the node values; `steps` must be even.
    assert!(steps.is_multiple_of(2));
    let rate = |r: C64| pp + ps * r;
    let mut integral = rate(r[0]) + rate(r[steps]);
    for (k, &rk) in r.iter().enumerate().take(steps).skip(1) {
        integral += rate(rk) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    integral *= h / 3.0;
    (integral.exp(), r[0])
}

/// Closed-form amplitudes in their direct trigonometric form
/// (cos, sin, cot), with `sign` selecting the branch of q.
pub fn closed_form_textbook(alpha: f64, omega: f64, dkl: f64, delta: f64, sign: f64) -> (C64, C64) {
    let w2 = omega * omega;
    let xi = dkl + delta * alpha / w2;
    let kappa = C64::new(alpha - 2.0 * dkl * delta / w2, -2.0 * xi);
    let beta = ((C64::new(dkl, alpha) * C64::new(dkl * delta, w2 * xi)) / C64::new(delta, w2)).sqrt();
    let shifted = C64::new(xi, -dkl * delta / w2);
    let q = ((shifted + I * alpha) * shifted).sqrt() * sign;
    let half = beta / 2.0;
    let probe = q * 2.0 / (q * 2.0 * half.cos() + kappa * half.sin()) * (-I * (dkl / 2.0)).exp();
    let signal = alpha / (kappa + q * 2.0 * (half.cos() / half.sin()));
    (probe, signal)
}
