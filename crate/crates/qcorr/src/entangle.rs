//! Concurrence and entanglement of formation, used to cross-check the
//! entanglement bounds on the closed-form measures and the pure-state limit.

use crate::closed::{bell_diag_info_loss, bell_diag_spectrum, ClosedError};
use crate::entropy::EntropySpec;
use crate::state::{pauli, BlochState};
use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EntangleError {
    #[error("concurrence {0} outside [0, 1]")]
    Domain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    WoottersGeneral,
    XClosed,
    BellDiag,
}

impl ConcurrenceMethod {
    pub fn label(&self) -> &'static str {
        match self {
            ConcurrenceMethod::WoottersGeneral => "wootters_general",
            ConcurrenceMethod::XClosed => "x_closed",
            ConcurrenceMethod::BellDiag => "bell_diag",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceReport {
    pub value: f64,
    pub method: ConcurrenceMethod,
}

/// Concurrence of an arbitrary two-qubit state, routed through the cheapest
/// formula the state's structure allows. The three routes agree on their
/// overlapping families.
pub fn concurrence(state: &BlochState) -> ConcurrenceReport {
    let tol = 1e-9;
    if state.r_a.norm() <= tol && state.r_b.norm() <= tol {
        ConcurrenceReport {
            value: concurrence_bell_diag(state),
            method: ConcurrenceMethod::BellDiag,
        }
    } else if state.is_x_form(tol) {
        ConcurrenceReport {
            value: concurrence_x(state),
            method: ConcurrenceMethod::XClosed,
        }
    } else {
        ConcurrenceReport {
            value: concurrence_wootters(state),
            method: ConcurrenceMethod::WoottersGeneral,
        }
    }
}

/// max(2 p1 - 1, 0) for maximally mixed marginals; p1 is the largest
/// eigenvalue of the state.
fn concurrence_bell_diag(state: &BlochState) -> f64 {
    let p1 = state.to_density().spectrum()[0];
    (2.0 * p1 - 1.0).max(0.0)
}

/// Closed form on the X-state block entries:
/// max(|a+| - sqrt(c+ c-), |a-| - sqrt(a+ a-), 0) / 2.
fn concurrence_x(state: &BlochState) -> f64 {
    let (ra, rb) = (state.r_a.z, state.r_b.z);
    let (jx, jy, jz) = (state.j[(0, 0)], state.j[(1, 1)], state.j[(2, 2)]);
    let a_plus = 1.0 + jz + (ra + rb);
    let a_minus = 1.0 + jz - (ra + rb);
    let c_plus = 1.0 - jz + (ra - rb);
    let c_minus = 1.0 - jz - (ra - rb);
    let al_plus = jx - jy;
    let al_minus = jx + jy;
    let t1 = al_plus.abs() - (c_plus * c_minus).max(0.0).sqrt();
    let t2 = al_minus.abs() - (a_plus * a_minus).max(0.0).sqrt();
    0.5 * t1.max(t2).max(0.0)
}

/// Spin-flip construction: square roots of the eigenvalues of
/// rho (sy x sy) rho* (sy x sy), computed through the Hermitian product
/// sqrt(rho) rho~ sqrt(rho) so only self-adjoint solvers are involved.
fn concurrence_wootters(state: &BlochState) -> f64 {
    let rho = state.to_density();
    let m = (rho.matrix() + rho.matrix().adjoint()) * C64::new(0.5, 0.0);
    let sy = pauli()[1];
    let flip = sy.kronecker(&sy);
    let tilde = flip * m.map(|z| z.conj()) * flip;

    let eig = m.symmetric_eigen();
    let mut sqrt_rho = Matrix4::<C64>::zeros();
    for i in 0..4 {
        let root = eig.eigenvalues[i].max(0.0).sqrt();
        let v = eig.eigenvectors.column(i);
        sqrt_rho += v * v.adjoint() * C64::new(root, 0.0);
    }
    let prod = sqrt_rho * tilde * sqrt_rho;
    let herm = (prod + prod.adjoint()) * C64::new(0.5, 0.0);
    let mut lam: Vec<f64> = herm
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&x| x.max(-1e-12).max(0.0).sqrt())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
}

/// Entanglement of formation from the concurrence: the binary entropy of
/// (1 + sqrt(1 - c^2)) / 2 in bits.
pub fn eof(c: f64) -> Result<f64, EntangleError> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(EntangleError::Domain(c));
    }
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    let f = EntropySpec::VonNeumann;
    Ok(f.f_raw(x) + f.f_raw(1.0 - x))
}

/// Check that a closed-form measure upper-bounds the squared concurrence on
/// a maximally-mixed-marginals state.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub info_loss: f64,
    pub concurrence: f64,
    pub concurrence_squared: f64,
    pub holds: bool,
    /// The bound saturates exactly when the two smallest eigenvalues vanish
    /// (and the state is entangled).
    pub equality: bool,
}

pub fn entanglement_bound_bell_diag(
    jx: f64,
    jy: f64,
    jz: f64,
    spec: EntropySpec,
) -> Result<BoundReport, ClosedError> {
    let p = bell_diag_spectrum(jx, jy, jz)?;
    let c = (2.0 * p[0] - 1.0).max(0.0);
    let info_loss = bell_diag_info_loss(jx, jy, jz, spec)?.value;
    let csq = c * c;
    Ok(BoundReport {
        info_loss,
        concurrence: c,
        concurrence_squared: csq,
        holds: info_loss >= csq - 1e-12,
        equality: c > 0.0 && p[2].abs() <= 1e-12 && p[3].abs() <= 1e-12,
    })
}
