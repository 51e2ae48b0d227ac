//! Closed-form steady state of the backward FWM medium.
//!
//! Valid for balanced drive (Ω_c = Ω_d = Ω), resonant one- and three-photon
//! detunings, no ground-state dephasing and γ31 = γ41 = Γ. With the boundary
//! conditions Ω_p(0) = Ω_p0 and Ω_s(L) = 0,
//!
//! ```text
//! Ω_p(L)/Ω_p0 = 2q / (2q cos(β/2) + κ sin(β/2)) · e^{-iΔkL/2}
//! Ω_s(0)/Ω_p0 = α / (κ + 2q cot(β/2))
//! κ = (α − 2ΔkLδ/Ω²) − 2iξ
//! β = sqrt((ΔkL + iα)(ΔkLδ + iΩ²ξ) / (iΩ² + δ))
//! q = sqrt((ξ − iΔkLδ/Ω² + iα)(ξ − iΔkLδ/Ω²))
//! ξ = ΔkL + δα/Ω²
//! ```
//!
//! Only the relative sign of β and q matters. It is fixed by writing
//! q = β · sqrt(q²/β²) with the principal root of the ratio, which tends to
//! 1 as δ → 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DetuningSet, DriveParams, MediumParams, SteadyResult};
use crate::C64;

/// |β| below which the closed form is treated as 0/0.
pub const BETA_SINGULAR_THRESHOLD: f64 = 1e-6;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormAux {
    pub kappa: C64,
    pub beta: C64,
    pub q: C64,
    pub xi: f64,
}

/// Whether the closed form applies to these parameters.
pub fn in_regime(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> std::result::Result<(), String> {
    if d.omega_c != d.omega_d {
        return Err(format!("omega_c ({}) != omega_d ({})", d.omega_c, d.omega_d));
    }
    if d.omega_c <= 0.0 {
        return Err("omega must be > 0".into());
    }
    if m.gamma21 != 0.0 {
        return Err(format!("gamma21 = {} (must be 0)", m.gamma21));
    }
    if m.gamma31 != 1.0 || m.gamma41 != 1.0 {
        return Err("gamma31 and gamma41 must equal 1".into());
    }
    if det.one_photon != 0.0 || det.three_photon != 0.0 {
        return Err("one- and three-photon detunings must be 0".into());
    }
    Ok(())
}

fn require_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Rabi frequency must be > 0, got {omega}")))
    }
}

/// κ, β, q and ξ with the branch of q resolved against β.
pub fn closed_form_aux(m: &MediumParams, omega: f64, delta: f64) -> Result<ClosedFormAux> {
    require_omega(omega)?;
    let w2 = omega * omega;
    let a = m.alpha;
    let dkl = m.delta_kl;

    let xi = dkl + delta * a / w2;
    // ξ − iΔkLδ/Ω², shared by β and q.
    let xi_c = C64::new(xi, -dkl * delta / w2);
    let kappa = C64::new(a - 2.0 * dkl * delta / w2, -2.0 * xi);
    // (ΔkLδ + iΩ²ξ)/(iΩ² + δ) = ξ_c / (1 − iδ/Ω²)
    let detuning_factor = C64::new(1.0, -delta / w2);
    let mismatch = C64::new(dkl, a);
    let beta = (mismatch * xi_c / detuning_factor).sqrt();

    let q = if mismatch.norm() == 0.0 {
        // α = 0 and ΔkL = 0: β = 0 and the ratio is undefined.
        (xi_c * xi_c).sqrt()
    } else {
        beta * ((xi_c + I * a) * detuning_factor / mismatch).sqrt()
    };
    Ok(ClosedFormAux { kappa, beta, q, xi })
}

/// tan(z) and sec(z), evaluated without overflow for large |Im z|.
fn tan_sec(z: C64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    if z.im >= 0.0 {
        let w = (I * 2.0 * z).exp();
        (-I * (w - one) / (w + one), 2.0 * (I * z).exp() / (w + one))
    } else {
        let w = (-I * 2.0 * z).exp();
        (-I * (one - w) / (one + w), 2.0 * (-I * z).exp() / (one + w))
    }
}

/// Closed-form steady state for balanced drive Ω and two-photon detuning δ.
pub fn steady_closed_form(m: &MediumParams, omega: f64, delta: f64) -> Result<SteadyResult> {
    require_omega(omega)?;
    if m.alpha == 0.0 {
        return Ok(SteadyResult::vacuum());
    }
    let aux = closed_form_aux(m, omega, delta)?;
    if aux.beta.norm() < BETA_SINGULAR_THRESHOLD {
        return Err(Error::NearSingularClosedForm {
            beta_abs: aux.beta.norm(),
        });
    }
    let (tan, sec) = tan_sec(aux.beta / 2.0);
    let two_q = aux.q * 2.0;
    // Both amplitudes divided through by cos(β/2).
    let probe = two_q * sec / (two_q + aux.kappa * tan) * (-I * (m.delta_kl / 2.0)).exp();
    let signal = m.alpha * tan / (aux.kappa * tan + two_q);
    Ok(SteadyResult::from_amplitudes(probe, signal))
}

/// Closed form for a full parameter bundle, after checking the regime.
pub fn steady_closed_form_for(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> Result<SteadyResult> {
    in_regime(d, det, m).map_err(Error::Regime)?;
    steady_closed_form(m, d.omega_c, det.two_photon)
}

/// Two-photon detuning that cancels the phase mismatch (ξ = 0), Γ units.
pub fn optimal_delta(m: &MediumParams, omega: f64) -> Result<f64> {
    require_omega(omega)?;
    if !(m.alpha > 0.0) {
        return Err(Error::Domain("optical depth must be > 0".into()));
    }
    Ok(-m.delta_kl * omega * omega / m.alpha)
}

/// First-order estimate of the probe phase shift from detuned EIT, radians.
///
/// φ = δ α γ31 / Ω_c², the linear term of the EIT dispersion. It ignores
/// absorption and higher orders in δ, so it degrades once |δ| approaches
/// the transparency window.
pub fn eit_phase_shift(m: &MediumParams, omega_c: f64, delta: f64) -> Result<f64> {
    require_omega(omega_c)?;
    Ok(delta * m.alpha * m.gamma31 / (omega_c * omega_c))
}
