//! General steady-state solver.
//!
//! With the time derivatives set to zero, the optical Bloch equations for
//! ρ21, ρ31 and ρ41 form a 3×3 linear system driven by the probe and signal
//! amplitudes. Feeding the coherences back into the propagation equations
//! gives a constant 2×2 coupling matrix M, d/dz (Ω_p, Ω_s) = M (Ω_p, Ω_s),
//! with z measured in units of the medium length. The two-point boundary
//! problem Ω_p(0) = Ω_p0, Ω_s(1) = 0 is then solved exactly.
//!
//! The model is strictly linear response: the ground state keeps all the
//! population (ρ11 = 1), which is valid for |Ω_p| ≪ Ω_c.

use nalgebra::{Matrix3, Matrix3x2};

use crate::error::{Error, Result};
use crate::linalg::{eigen2, matrix_exponential, CMatrix2};
use crate::params::{DetuningSet, DriveParams, MediumParams, SteadyResult};
use crate::C64;

/// Largest accepted condition number of the coherence system.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative pivot size below which the boundary solve is reported singular.
pub const BOUNDARY_SINGULAR_TOL: f64 = 1e-14;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Linear-response coefficients of the coherences.
///
/// Each field holds the pair (coefficient on Ω_p, coefficient on Ω_s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceResponse {
    pub rho21: [C64; 2],
    pub rho31: [C64; 2],
    pub rho41: [C64; 2],
}

impl CoherenceResponse {
    /// Coherences (ρ21, ρ31, ρ41) for the given field amplitudes.
    pub fn apply(&self, omega_p: C64, omega_s: C64) -> (C64, C64, C64) {
        let f = |c: [C64; 2]| c[0] * omega_p + c[1] * omega_s;
        (f(self.rho21), f(self.rho31), f(self.rho41))
    }
}

fn describe(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> String {
    format!(
        "alpha={}, omega_c={}, omega_d={}, delta={}, delta_p={}, Delta={}, gamma21={}, delta_kL={}",
        m.alpha, d.omega_c, d.omega_d, det.two_photon, det.one_photon, det.three_photon, m.gamma21, m.delta_kl
    )
}

/// Steady-state Bloch system matrix acting on (ρ21, ρ31, ρ41).
fn bloch_matrix(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> Matrix3<C64> {
    let half_i = I * 0.5;
    let zero = C64::new(0.0, 0.0);
    Matrix3::new(
        I * det.two_photon - m.gamma21 / 2.0,
        half_i * d.omega_c,
        half_i * d.omega_d,
        half_i * d.omega_c,
        I * det.one_photon - m.gamma31 / 2.0,
        zero,
        half_i * d.omega_d,
        zero,
        I * det.three_photon - m.gamma41 / 2.0,
    )
}

/// Solves the steady Bloch equations for unit probe and unit signal drive.
pub fn coherence_response(
    d: &DriveParams,
    det: &DetuningSet,
    m: &MediumParams,
) -> Result<CoherenceResponse> {
    let zero = C64::new(0.0, 0.0);
    if d.omega_c == 0.0 && d.omega_d == 0.0 {
        // ρ21 is not driven and stays zero; two independent two-level systems.
        return Ok(CoherenceResponse {
            rho21: [zero, zero],
            rho31: [-I * 0.5 / (I * det.one_photon - m.gamma31 / 2.0), zero],
            rho41: [zero, -I * 0.5 / (I * det.three_photon - m.gamma41 / 2.0)],
        });
    }
    let a = bloch_matrix(d, det, m);
    let sv = a.svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularCoherence {
            condition,
            context: describe(d, det, m),
        });
    }
    let rhs = Matrix3x2::new(zero, zero, -I * 0.5, zero, zero, -I * 0.5);
    let x = a.lu().solve(&rhs).ok_or_else(|| Error::SingularCoherence {
        condition,
        context: describe(d, det, m),
    })?;
    Ok(CoherenceResponse {
        rho21: [x[(0, 0)], x[(0, 1)]],
        rho31: [x[(1, 0)], x[(1, 1)]],
        rho41: [x[(2, 0)], x[(2, 1)]],
    })
}

/// Steady coherences (ρ21, ρ31, ρ41) for local field amplitudes.
pub fn steady_coherences(
    omega_p: C64,
    omega_s: C64,
    d: &DriveParams,
    det: &DetuningSet,
    m: &MediumParams,
) -> Result<(C64, C64, C64)> {
    Ok(coherence_response(d, det, m)?.apply(omega_p, omega_s))
}

/// Dimensionless coupling matrix M·L of the steady propagation equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix(pub CMatrix2);

pub fn coupling_matrix(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> Result<CouplingMatrix> {
    let r = coherence_response(d, det, m)?;
    let probe = I * (m.alpha * m.gamma31 / 2.0);
    // Signal runs backward: -dΩs/dz - iΔk Ωs = i α γ41/2 ρ41.
    let signal = -I * (m.alpha * m.gamma41 / 2.0);
    Ok(CouplingMatrix(CMatrix2::new(
        probe * r.rho31[0],
        probe * r.rho31[1],
        signal * r.rho41[0],
        signal * r.rho41[1] - I * m.delta_kl,
    )))
}

/// exp(M·L), mapping (Ω_p, Ω_s) at z = 0 to z = L.
pub fn transfer_matrix(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> Result<CMatrix2> {
    Ok(matrix_exponential(&coupling_matrix(d, det, m)?.0))
}

/// Exact steady state for arbitrary parameters.
///
/// Mathematically this is T = exp(M·L) followed by the two-point boundary
/// solve. When M has distinct eigenvalues the solve is carried out in the
/// eigenbasis, with each mode normalized at the boundary where it is
/// largest; this avoids the cancellation between e^{+λ} and e^{-λ} terms of
/// T at large optical depth.
pub fn transfer_solve(d: &DriveParams, det: &DetuningSet, m: &MediumParams) -> Result<SteadyResult> {
    let mm = coupling_matrix(d, det, m)?.0;
    let singular = || Error::SingularBoundary(describe(d, det, m));

    let (probe_out, signal_out) = match eigen2(&mm) {
        Some(e) => {
            let one = C64::new(1.0, 0.0);
            // g(z) per mode at z = 0 and z = 1, each bounded by 1 in modulus.
            let ends: Vec<(C64, C64)> = e
                .values
                .iter()
                .map(|&l| if l.re <= 0.0 { (one, l.exp()) } else { ((-l).exp(), one) })
                .collect();
            let v = &e.vectors;
            let a00 = ends[0].0 * v[(0, 0)];
            let a01 = ends[1].0 * v[(0, 1)];
            let a10 = ends[0].1 * v[(1, 0)];
            let a11 = ends[1].1 * v[(1, 1)];
            let det_a = a00 * a11 - a01 * a10;
            let scale = (a00.norm() + a01.norm()) * (a10.norm() + a11.norm());
            if !(det_a.norm() > BOUNDARY_SINGULAR_TOL * scale) {
                return Err(singular());
            }
            // Ω_p(0) = 1, Ω_s(1) = 0.
            let c0 = a11 / det_a;
            let c1 = -a10 / det_a;
            let probe = c0 * ends[0].1 * v[(0, 0)] + c1 * ends[1].1 * v[(0, 1)];
            let signal = c0 * ends[0].0 * v[(1, 0)] + c1 * ends[1].0 * v[(1, 1)];
            (probe, signal)
        }
        None => {
            let t = matrix_exponential(&mm);
            let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !(t[(1, 1)].norm() > BOUNDARY_SINGULAR_TOL * tnorm) {
                return Err(singular());
            }
            let s0 = -t[(1, 0)] / t[(1, 1)];
            (t[(0, 0)] + t[(0, 1)] * s0, s0)
        }
    };
    Ok(SteadyResult::from_amplitudes(probe_out, signal_out))
}
