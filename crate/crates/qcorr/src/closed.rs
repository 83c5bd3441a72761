//! Closed-form minimum information losses.
//!
//! The quadratic and cubic measures reduce, for any two-qubit state, to the
//! eigenvalues of a 3x3 symmetric moment matrix; states with maximally mixed
//! marginals admit a universal formula valid for every entropy; X states
//! reduce to the three principal axes plus a one-parameter interior root;
//! and the mixture of two aligned spin states has explicit piecewise
//! branches with known critical angles.

use crate::entropy::EntropySpec;
use crate::measure::{
    cond_spectrum, stationary_residual, Direction, MeasurementReport, Method,
};
use crate::state::{bell_diagonal_state, BlochState};
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClosedError {
    #[error("state is not in principal-axes X form")]
    NotXState,
    #[error("bell-diagonal parameters give a negative probability ({0:e})")]
    InvalidBellDiagonal(f64),
    #[error("largest eigenvalue {0} outside [1/4, 1]")]
    InfeasibleP1(f64),
}

/// Eigenvalue tie below which the leading eigenspace counts as degenerate.
const EIG_TIE: f64 = 1e-12;

/// Symmetric 3x3 moment matrix whose spectrum carries a closed-form measure,
/// with eigenvalues sorted decreasing and a deterministic leading direction.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    matrix: Matrix3<f64>,
    eigenvalues: [f64; 3],
    leading: Vector3<f64>,
    degenerate: bool,
}

impl MomentMatrix {
    /// r_b r_b^t + j^t j; its two sub-leading eigenvalues give the
    /// quadratic measure.
    pub fn quadratic(state: &BlochState) -> Self {
        let jt = state.j.transpose();
        Self::from_symmetric(state.r_b * state.r_b.transpose() + jt * state.j)
    }

    /// r_b r_b^t + j^t j + r_b r_a^t j + j^t r_a r_b^t; carries the cubic
    /// measure (together with det j).
    pub fn cubic(state: &BlochState) -> Self {
        let jt = state.j.transpose();
        let cross = state.r_b * (state.r_a.transpose() * state.j);
        Self::from_symmetric(
            state.r_b * state.r_b.transpose() + jt * state.j + cross + cross.transpose(),
        )
    }

    fn from_symmetric(m: Matrix3<f64>) -> Self {
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = [
            eig.eigenvalues[order[0]],
            eig.eigenvalues[order[1]],
            eig.eigenvalues[order[2]],
        ];
        let tie = EIG_TIE * eigenvalues[0].abs().max(1.0);
        let degenerate = eigenvalues[0] - eigenvalues[1] <= tie;
        let leading = if degenerate {
            // project a fixed probe onto the leading eigenspace: largest |z|
            // wins, falling back to x, so reported directions are stable
            let dims = if eigenvalues[0] - eigenvalues[2] <= tie { 3 } else { 2 };
            let mut proj = Matrix3::zeros();
            for &o in order.iter().take(dims) {
                let v: Vector3<f64> = eig.eigenvectors.column(o).into();
                proj += v * v.transpose();
            }
            let wz = proj * Vector3::z();
            let w = if wz.norm() > 1e-9 { wz } else { proj * Vector3::x() };
            w.normalize()
        } else {
            let v: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
            orient(v)
        };
        Self {
            matrix: sym,
            eigenvalues,
            leading,
            degenerate,
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// Sorted decreasing.
    pub fn eigenvalues(&self) -> [f64; 3] {
        self.eigenvalues
    }

    pub fn leading_direction(&self) -> Vector3<f64> {
        self.leading
    }

    pub fn leading_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Flips an eigenvector so its largest-magnitude component is positive.
fn orient(v: Vector3<f64>) -> Vector3<f64> {
    let mut imax = 0;
    for i in 1..3 {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        -v
    } else {
        v
    }
}

/// Quadratic information loss at a fixed direction:
/// (tr M2 - k^t M2 k) / 2.
pub fn loss_quadratic_at(state: &BlochState, kv: &Vector3<f64>) -> f64 {
    let jt = state.j.transpose();
    let m2 = state.r_b * state.r_b.transpose() + jt * state.j;
    0.5 * (m2.trace() - (kv.transpose() * m2 * kv)[0])
}

/// Cubic information loss at a fixed direction:
/// (tr M3 - 2 det j - k^t M3 k) / 4.
pub fn loss_cubic_at(state: &BlochState, kv: &Vector3<f64>) -> f64 {
    let jt = state.j.transpose();
    let cross = state.r_b * (state.r_a.transpose() * state.j);
    let m3 = state.r_b * state.r_b.transpose() + jt * state.j + cross + cross.transpose();
    0.25 * (m3.trace() - 2.0 * state.j.determinant() - (kv.transpose() * m3 * kv)[0])
}

fn closed_report(state: &BlochState, value: f64, leading: Vector3<f64>, degenerate: bool, spec: EntropySpec) -> MeasurementReport {
    let direction = Direction::from_vector(leading)
        .expect("leading eigenvector is unit length")
        .canonical();
    let stationary = stationary_residual(state, &direction, spec);
    MeasurementReport {
        value,
        direction,
        cond_spectrum: cond_spectrum(state, &direction),
        residual: stationary.residual,
        method: Method::ClosedForm,
        degenerate,
        singular: stationary.flagged(),
        converged: true,
    }
}

/// Exact minimum of the quadratic information loss: half the sum of the two
/// sub-leading eigenvalues of M2, minimized along its leading eigenvector.
/// Twice the geometric discord.
pub fn info_loss_quadratic(state: &BlochState) -> MeasurementReport {
    let m2 = MomentMatrix::quadratic(state);
    let [_, l2, l3] = m2.eigenvalues();
    closed_report(
        state,
        0.5 * (l2 + l3),
        m2.leading_direction(),
        m2.leading_degenerate(),
        EntropySpec::Linear,
    )
}

/// Exact minimum of the cubic information loss:
/// (l2 + l3) / 4 - det(j) / 2 from the spectrum of M3.
pub fn info_loss_cubic(state: &BlochState) -> MeasurementReport {
    let m3 = MomentMatrix::cubic(state);
    let [_, l2, l3] = m3.eigenvalues();
    closed_report(
        state,
        0.25 * (l2 + l3) - 0.5 * state.j.determinant(),
        m3.leading_direction(),
        m3.leading_degenerate(),
        EntropySpec::Cubic,
    )
}

/// Canonical relabeling of diagonal correlations: |jz| >= |jx| >= |jy| with
/// jz, jx >= 0 (axis permutations plus paired sign flips, all realizable by
/// local rotations, so measures are unchanged).
#[derive(Debug, Clone, Copy)]
struct BellCanonical {
    jx: f64,
    jy: f64,
    jz: f64,
    /// Original axis index (0 = x, 1 = y, 2 = z) that carries the largest
    /// |correlation| and hosts the least disturbing measurement.
    main_axis: usize,
    /// Gap between the two largest |correlations|.
    axis_gap: f64,
}

fn canonicalize_bell(jx: f64, jy: f64, jz: f64) -> BellCanonical {
    let vals = [jx, jy, jz];
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs()));
    let (mut z, mut x, mut y) = (vals[order[0]], vals[order[1]], vals[order[2]]);
    // pair flips only: the sign of the product is a rotation invariant
    if z < 0.0 && x < 0.0 {
        z = -z;
        x = -x;
    } else if z < 0.0 {
        z = -z;
        y = -y;
    } else if x < 0.0 {
        x = -x;
        y = -y;
    }
    BellCanonical {
        jx: x,
        jy: y,
        jz: z,
        main_axis: order[0],
        axis_gap: vals[order[0]].abs() - vals[order[1]].abs(),
    }
}

/// Eigenvalues of a maximally-mixed-marginals state, sorted decreasing:
/// (1 + jz +- (jx - jy)) / 4 and (1 - jz +- (jx + jy)) / 4 after
/// canonicalization.
pub fn bell_diag_spectrum(jx: f64, jy: f64, jz: f64) -> Result<[f64; 4], ClosedError> {
    let c = canonicalize_bell(jx, jy, jz);
    let mut p = [
        0.25 * (1.0 + c.jz + (c.jx - c.jy)),
        0.25 * (1.0 + c.jz - (c.jx - c.jy)),
        0.25 * (1.0 - c.jz + (c.jx + c.jy)),
        0.25 * (1.0 - c.jz - (c.jx + c.jy)),
    ];
    for &v in &p {
        if v < -1e-10 || v.is_nan() {
            return Err(ClosedError::InvalidBellDiagonal(v));
        }
    }
    p.sort_by(|a, b| b.total_cmp(a));
    Ok(p)
}

/// The universal formula `2f((p1+p2)/2) + 2f((p3+p4)/2) - sum f(p_i)` on a
/// decreasing spectrum.
fn universal_value(p: &[f64; 4], spec: EntropySpec) -> f64 {
    let f = |x: f64| spec.f_raw(x.max(0.0));
    2.0 * f(0.5 * (p[0] + p[1])) + 2.0 * f(0.5 * (p[2] + p[3]))
        - f(p[0])
        - f(p[1])
        - f(p[2])
        - f(p[3])
}

/// Minimum information loss of a maximally-mixed-marginals state for any
/// entropy. The minimizing direction is the axis of largest |correlation|,
/// independent of the entropic choice; the residual vanishes identically.
pub fn bell_diag_info_loss(
    jx: f64,
    jy: f64,
    jz: f64,
    spec: EntropySpec,
) -> Result<MeasurementReport, ClosedError> {
    let p = bell_diag_spectrum(jx, jy, jz)?;
    let c = canonicalize_bell(jx, jy, jz);
    let mut axis = Vector3::zeros();
    axis[c.main_axis] = 1.0;
    let direction = Direction::from_vector(axis).unwrap();
    let state = bell_diagonal_state(jx, jy, jz);
    Ok(MeasurementReport {
        value: universal_value(&p, spec),
        direction,
        cond_spectrum: cond_spectrum(&state, &direction),
        residual: 0.0,
        method: Method::ClosedForm,
        degenerate: c.axis_gap <= 1e-12,
        singular: false,
        converged: true,
    })
}

/// Ratio I_f / I_2 for weakly correlated maximally-mixed-marginals states;
/// approaches the universal coefficient -f''(1/4)/4 as ||j|| -> 0.
pub fn small_j_ratio(jx: f64, jy: f64, jz: f64, spec: EntropySpec) -> Result<f64, ClosedError> {
    let general = bell_diag_info_loss(jx, jy, jz, spec)?.value;
    let quadratic = bell_diag_info_loss(jx, jy, jz, EntropySpec::Linear)?.value;
    Ok(general / quadratic)
}

// ---------------------------------------------------------------------------
// X states
// ---------------------------------------------------------------------------

/// Spectral data of an X state in its canonical frame (|jx| >= |jy|).
struct XForm {
    r_a: f64,
    r_b: f64,
    jx: f64,
    jy: f64,
    jz: f64,
    swapped: bool,
    base: f64,
}

impl XForm {
    fn new(state: &BlochState, spec: EntropySpec) -> Result<Self, ClosedError> {
        if !state.is_x_form(1e-9) {
            return Err(ClosedError::NotXState);
        }
        let (dx, dy, dz) = (state.j[(0, 0)], state.j[(1, 1)], state.j[(2, 2)]);
        let swapped = dy.abs() > dx.abs();
        let (jx, jy) = if swapped { (dy, dx) } else { (dx, dy) };
        let (r_a, r_b) = (state.r_a.z, state.r_b.z);
        // eigenvalues of the state itself, in closed form
        let mut base = 0.0;
        for nu in [1.0f64, -1.0] {
            let root = ((r_a + nu * r_b).powi(2) + (jx - nu * jy).powi(2)).sqrt();
            for mu in [1.0f64, -1.0] {
                base += spec.f_raw((0.25 * (1.0 + nu * dz + mu * root)).clamp(0.0, 1.0));
            }
        }
        Ok(Self {
            r_a,
            r_b,
            jx,
            jy,
            jz: dz,
            swapped,
            base,
        })
    }

    /// I_f at k = (sin g, 0, cos g) in the canonical frame.
    fn loss_in_plane(&self, gamma: f64, spec: EntropySpec) -> f64 {
        let (sg, cg) = gamma.sin_cos();
        let rbk = self.r_b * cg;
        let mut s = 0.0;
        for nu in [1.0f64, -1.0] {
            let root = ((self.r_a + nu * self.jz * cg).powi(2) + (nu * self.jx * sg).powi(2)).sqrt();
            for mu in [1.0f64, -1.0] {
                s += spec.f_raw((0.25 * (1.0 + nu * rbk + mu * root)).clamp(0.0, 1.0));
            }
        }
        s - self.base
    }

    /// I_f at the canonical y axis, where the conditional spectrum is
    /// nu-independent.
    fn loss_y(&self, spec: EntropySpec) -> f64 {
        let root = (self.r_a * self.r_a + self.jy * self.jy).sqrt();
        let mut s = 0.0;
        for mu in [1.0f64, -1.0] {
            s += 2.0 * spec.f_raw((0.25 * (1.0 + mu * root)).clamp(0.0, 1.0));
        }
        s - self.base
    }

    /// Right-hand side of the interior stationarity fixed point
    /// cos g = (a1 r_b + a2 jz r_a) / (a3 (jx^2 - jz^2)).
    fn interior_rhs(&self, gamma: f64, spec: EntropySpec) -> Option<f64> {
        let (sg, cg) = gamma.sin_cos();
        let rbk = self.r_b * cg;
        let mut a1 = 0.0;
        let mut a2 = 0.0;
        let mut a3 = 0.0;
        for nu in [1.0f64, -1.0] {
            let n_nu = ((self.r_a + nu * self.jz * cg).powi(2) + (nu * self.jx * sg).powi(2)).sqrt();
            if n_nu < 1e-12 {
                return None;
            }
            for mu in [1.0f64, -1.0] {
                let p = 0.25 * (1.0 + nu * rbk + mu * n_nu);
                let (fp, _) = spec.f_derivative(p);
                a1 += 0.25 * nu * fp;
                a2 += 0.25 * nu * mu * fp / n_nu;
                a3 += 0.25 * mu * fp / n_nu;
            }
        }
        let denom = a3 * (self.jx * self.jx - self.jz * self.jz);
        if denom.abs() < 1e-14 {
            return None;
        }
        Some((a1 * self.r_b + a2 * self.jz * self.r_a) / denom)
    }
}

/// Minimum information loss of an X state: the three principal axes are
/// always stationary; interior candidates in the plane of the dominant
/// transverse correlation are found by damped fixed-point iteration.
pub fn x_state_info_loss(
    state: &BlochState,
    spec: EntropySpec,
) -> Result<MeasurementReport, ClosedError> {
    let x = XForm::new(state, spec)?;

    // candidates as (value, gamma, phi) in the canonical frame
    let mut candidates: Vec<(f64, f64, f64, bool)> = vec![
        (x.loss_in_plane(0.0, spec), 0.0, 0.0, false),
        (
            x.loss_in_plane(std::f64::consts::FRAC_PI_2, spec),
            std::f64::consts::FRAC_PI_2,
            0.0,
            false,
        ),
        (
            x.loss_y(spec),
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
            false,
        ),
    ];

    let mut dropped = false;
    for start in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3] {
        let mut c = start.cos();
        let mut converged = false;
        let mut no_equation = false;
        for _ in 0..200 {
            let gamma = c.clamp(-1.0, 1.0).acos();
            let Some(rhs) = x.interior_rhs(gamma, spec) else {
                // degenerate denominator (|jx| = |jz|) or merged branch:
                // there is no interior equation here, not an iteration
                // failure
                no_equation = true;
                break;
            };
            let next = 0.5 * c + 0.5 * rhs;
            if (next - c).abs() < 1e-13 {
                c = next;
                converged = true;
                break;
            }
            if !next.is_finite() || next.abs() > 1e3 {
                break;
            }
            c = next;
        }
        if !converged {
            // escaping toward an axis is fine; only a genuinely wandering
            // iteration counts as a dropped candidate
            if !no_equation && c.abs() < 1.0 - 1e-6 && c.is_finite() {
                dropped = true;
            }
            continue;
        }
        if c > 1e-8 && c < 1.0 - 1e-8 {
            let gamma = c.acos();
            candidates.push((x.loss_in_plane(gamma, spec), gamma, 0.0, true));
        }
    }

    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0;
    for (i, cand) in candidates.iter().enumerate().skip(1) {
        if (cand.0 - candidates[0].0).abs() <= 1e-9 && cand.1 < candidates[best].1 - 1e-12 {
            best = i;
        }
    }
    let (value, gamma, phi, interior) = candidates[best];
    let tie = candidates.iter().enumerate().any(|(i, c)| {
        i != best && (c.0 - value).abs() <= 1e-9 && (c.1 - gamma).abs() + (c.2 - phi).abs() > 1e-3
    });

    // map the canonical-frame direction back to the caller's axes
    let canon = Direction::from_angles(gamma, phi).vector();
    let kv = if x.swapped {
        Vector3::new(-canon.y, canon.x, canon.z)
    } else {
        canon
    };
    let direction = Direction::from_vector(kv).unwrap().canonical();
    let stationary = stationary_residual(state, &direction, spec);
    Ok(MeasurementReport {
        value,
        direction,
        cond_spectrum: cond_spectrum(state, &direction),
        residual: stationary.residual,
        method: Method::ClosedForm,
        degenerate: interior || tie,
        singular: stationary.flagged(),
        converged: !dropped,
    })
}

// ---------------------------------------------------------------------------
// mixture of two aligned states
// ---------------------------------------------------------------------------

/// Equal mixture of two product states with both spins tilted by +-theta
/// from z in the xz plane: j = diag(sin^2, 0, cos^2), r_a = r_b = cos theta
/// along z. Separable for every theta, classical only at theta = pi/2.
pub fn aligned_state(theta: f64) -> BlochState {
    let c = theta.cos();
    let s2 = theta.sin() * theta.sin();
    BlochState {
        r_a: Vector3::new(0.0, 0.0, c),
        r_b: Vector3::new(0.0, 0.0, c),
        j: Matrix3::from_diagonal(&Vector3::new(s2, 0.0, c * c)),
    }
}

/// Which principal axis carries the minimum on the aligned family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignedBranch {
    Z,
    X,
}

impl AlignedBranch {
    pub fn label(&self) -> &'static str {
        match self {
            AlignedBranch::Z => "z",
            AlignedBranch::X => "x",
        }
    }
}

/// Piecewise closed forms of the quadratic and cubic measures on the
/// aligned family, with the branch taken on each side of the critical
/// angles.
#[derive(Debug, Clone, Copy)]
pub struct AlignedClosed {
    pub i2: f64,
    pub i3: f64,
    pub branch2: AlignedBranch,
    pub branch3: AlignedBranch,
}

/// Angle where the quadratic branches cross: cos^2 = 1/3.
pub fn critical_angle_quadratic() -> f64 {
    (1.0 / 3.0f64).sqrt().acos()
}

/// Angle where the cubic branches cross: cos^2 = (sqrt(17) - 3) / 4.
pub fn critical_angle_cubic() -> f64 {
    (((17.0f64).sqrt() - 3.0) / 4.0).sqrt().acos()
}

pub fn aligned_closed(theta: f64) -> AlignedClosed {
    let s4 = theta.sin().powi(4);
    let c2 = theta.cos().powi(2);
    let c4 = theta.cos().powi(4);
    let (i2, branch2) = if theta <= critical_angle_quadratic() {
        (0.5 * s4, AlignedBranch::Z)
    } else {
        (0.5 * (c2 + c4), AlignedBranch::X)
    };
    let (i3, branch3) = if theta <= critical_angle_cubic() {
        (0.25 * s4, AlignedBranch::Z)
    } else {
        (0.25 * (c2 + 3.0 * c4), AlignedBranch::X)
    };
    AlignedClosed {
        i2,
        i3,
        branch2,
        branch3,
    }
}

// ---------------------------------------------------------------------------
// envelope over maximally-mixed-marginals spectra
// ---------------------------------------------------------------------------

/// Extremes of the universal measure over all decreasing spectra with a
/// fixed largest eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumEnvelope {
    pub min: f64,
    pub max: f64,
    pub argmin: [f64; 4],
    pub argmax: [f64; 4],
}

fn envelope_candidates(p1: f64) -> Vec<[f64; 4]> {
    let rest = 1.0 - p1;
    let mut c = Vec::with_capacity(5);
    if rest <= p1 + 1e-15 {
        c.push([p1, rest, 0.0, 0.0]);
    }
    if p1 <= 0.5 + 1e-15 {
        let tail = (0.5 * (1.0 - 2.0 * p1)).max(0.0);
        c.push([p1, p1, tail, tail]);
    }
    c.push([p1, rest / 3.0, rest / 3.0, rest / 3.0]);
    if rest / 2.0 <= p1 + 1e-15 {
        c.push([p1, rest / 2.0, rest / 2.0, 0.0]);
    }
    if 1.0 - 3.0 * p1 >= -1e-15 {
        c.push([p1, p1, p1, (1.0 - 3.0 * p1).max(0.0)]);
    }
    c
}

/// Scans the closed candidate configurations plus a feasibility-grid safety
/// net of resolution `grid_m` over (p2, p3).
pub fn spectrum_envelope(
    p1: f64,
    spec: EntropySpec,
    grid_m: usize,
) -> Result<SpectrumEnvelope, ClosedError> {
    if !(0.25 - 1e-12..=1.0 + 1e-12).contains(&p1) {
        return Err(ClosedError::InfeasibleP1(p1));
    }
    let p1 = p1.clamp(0.25, 1.0);
    let mut best_min: Option<(f64, [f64; 4])> = None;
    let mut best_max: Option<(f64, [f64; 4])> = None;
    let mut consider = |p: [f64; 4]| {
        let v = universal_value(&p, spec);
        if best_min.is_none_or(|(m, _)| v < m) {
            best_min = Some((v, p));
        }
        if best_max.is_none_or(|(m, _)| v > m) {
            best_max = Some((v, p));
        }
    };

    for p in envelope_candidates(p1) {
        consider(p);
    }

    let rest = 1.0 - p1;
    let m = grid_m.max(2);
    let p2_lo = rest / 3.0;
    let p2_hi = p1.min(rest);
    if p2_hi >= p2_lo {
        for i in 0..=m {
            let p2 = p2_lo + (p2_hi - p2_lo) * i as f64 / m as f64;
            let left = rest - p2;
            let p3_lo = (left / 2.0).max(0.0);
            let p3_hi = p2.min(left);
            if p3_hi < p3_lo - 1e-15 {
                continue;
            }
            for k in 0..=m {
                let p3 = p3_lo + (p3_hi - p3_lo) * k as f64 / m as f64;
                let p4 = (left - p3).max(0.0);
                consider([p1, p2, p3, p4]);
            }
        }
    }

    let (min, argmin) = best_min.expect("candidate set is never empty");
    let (max, argmax) = best_max.expect("candidate set is never empty");
    Ok(SpectrumEnvelope {
        min,
        max,
        argmin,
        argmax,
    })
}

/// p1 where the envelope maximum switches from the (p2 = p3, p4 = 0)
/// configuration to the fully degenerate tail (p2 = p3 = p4), located by
/// scan plus bisection on the candidate difference.
pub fn envelope_max_switch(spec: EntropySpec) -> Option<f64> {
    let diff = |p1: f64| {
        let rest = 1.0 - p1;
        universal_value(&[p1, rest / 3.0, rest / 3.0, rest / 3.0], spec)
            - universal_value(&[p1, rest / 2.0, rest / 2.0, 0.0], spec)
    };
    let n = 512;
    let lo = 1.0 / 3.0 + 1e-9;
    let hi = 1.0 - 1e-6;
    let mut prev = diff(lo);
    for i in 1..=n {
        let p = lo + (hi - lo) * i as f64 / n as f64;
        let cur = diff(p);
        if prev <= 0.0 && cur > 0.0 {
            let (mut a, mut b) = (p - (hi - lo) / n as f64, p);
            while b - a > 1e-9 {
                let mid = 0.5 * (a + b);
                if diff(mid) > 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = cur;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Direction, InfoLossEvaluator};
    use crate::state::{random_bloch, schmidt_state, SampleMethod};
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_pure_schmidt() {
        for p in [0.1, 0.3, 0.5, 0.7] {
            let rep = info_loss_quadratic(&schmidt_state(p));
            assert_abs_diff_eq!(rep.value, 4.0 * p * (1.0 - p), epsilon = 1e-12);
        }
    }

    #[test]
    fn quadratic_bell_diagonal_value_and_spectrum_form() {
        let rep = info_loss_quadratic(&bell_diagonal_state(0.3, 0.2, 0.4));
        assert_abs_diff_eq!(rep.value, 0.065, epsilon = 1e-14);
        // same number from the eigenvalue differences of the state spectrum
        let p = bell_diag_spectrum(0.3, 0.2, 0.4).unwrap();
        let alt = (p[0] - p[1]).powi(2) + (p[2] - p[3]).powi(2);
        assert_abs_diff_eq!(rep.value, alt, epsilon = 1e-14);
    }

    #[test]
    fn quadratic_x_state_formula() {
        let s = BlochState::new(
            Vector3::new(0.0, 0.0, 0.2),
            Vector3::new(0.0, 0.0, 0.35),
            Matrix3::from_diagonal(&Vector3::new(0.5, 0.15, 0.3)),
        );
        let (jx, jy, jz, rb): (f64, f64, f64, f64) = (0.5, 0.15, 0.3, 0.35);
        let expect = 0.5 * (jy * jy + (jx * jx).min(rb * rb + jz * jz));
        assert_abs_diff_eq!(info_loss_quadratic(&s).value, expect, epsilon = 1e-14);
    }

    #[test]
    fn cubic_examples() {
        for p in [0.2, 0.3, 0.6] {
            let rep = info_loss_cubic(&schmidt_state(p));
            assert_abs_diff_eq!(rep.value, 4.0 * p * (1.0 - p), epsilon = 1e-12);
        }
        let rep = info_loss_cubic(&bell_diagonal_state(0.3, 0.2, 0.4));
        assert_abs_diff_eq!(rep.value, 0.0205, epsilon = 1e-14);
        let p = bell_diag_spectrum(0.3, 0.2, 0.4).unwrap();
        let alt = (p[0] - p[1]).powi(2) * (p[0] + p[1]) + (p[2] - p[3]).powi(2) * (p[2] + p[3]);
        assert_abs_diff_eq!(rep.value, alt, epsilon = 1e-14);
        let bell = info_loss_cubic(&bell_diagonal_state(1.0, -1.0, 1.0));
        assert_abs_diff_eq!(bell.value, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn cubic_trace_identity() {
        // (tr M3 - 2 det j - l1)/4 equals (l2 + l3)/4 - det(j)/2
        for seed in 0..50u64 {
            let s = random_bloch(seed, SampleMethod::GinibreLike);
            let m3 = MomentMatrix::cubic(&s);
            let [l1, l2, l3] = m3.eigenvalues();
            let via_trace = 0.25 * (m3.matrix().trace() - 2.0 * s.j.determinant() - l1);
            let via_sum = 0.25 * (l2 + l3) - 0.5 * s.j.determinant();
            assert_abs_diff_eq!(via_trace, via_sum, epsilon = 1e-12);
            assert_abs_diff_eq!(info_loss_cubic(&s).value, via_sum, epsilon = 1e-12);
        }
    }

    #[test]
    fn moment_matrices_positive_semidefinite() {
        for seed in 0..50u64 {
            let s = random_bloch(seed, SampleMethod::MixtureOfPure);
            assert!(MomentMatrix::quadratic(&s).eigenvalues()[2] >= -1e-12);
            assert!(MomentMatrix::cubic(&s).eigenvalues()[2] >= -1e-12);
        }
    }

    #[test]
    fn bell_spectrum_cases() {
        assert_eq!(bell_diag_spectrum(0.0, 0.0, 0.0).unwrap(), [0.25; 4]);
        let p = bell_diag_spectrum(0.3, 0.2, 0.4).unwrap();
        for (got, want) in p.iter().zip([0.375, 0.325, 0.275, 0.025]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        // matches dense diagonalization of the reconstructed state
        let dense = bell_diagonal_state(0.3, 0.2, 0.4).to_density().spectrum();
        for i in 0..4 {
            assert_abs_diff_eq!(p[i], dense[i], epsilon = 1e-12);
        }
        // werner triple canonicalizes to signs with one negative
        let x = 0.8;
        let p = bell_diag_spectrum(-x, -x, -x).unwrap();
        assert_abs_diff_eq!(p[0], (1.0 + 3.0 * x) / 4.0, epsilon = 1e-14);
        for tail in &p[1..] {
            assert_abs_diff_eq!(*tail, (1.0 - x) / 4.0, epsilon = 1e-14);
        }
        assert!(bell_diag_spectrum(0.5, 0.3, 0.7).is_err());
    }

    #[test]
    fn universal_formula_cases() {
        let bell = bell_diag_info_loss(1.0, -1.0, 1.0, EntropySpec::VonNeumann).unwrap();
        assert_abs_diff_eq!(bell.value, 1.0, epsilon = 1e-12);
        let lin = bell_diag_info_loss(0.3, 0.2, 0.4, EntropySpec::Linear).unwrap();
        assert_abs_diff_eq!(lin.value, 0.065, epsilon = 1e-14);
        assert!(lin.direction.axis_angle_to(&Direction::z()) < 1e-14);
        assert!(!lin.degenerate);
        // isotropic correlations tie all axes
        let iso = bell_diag_info_loss(-0.5, -0.5, -0.5, EntropySpec::Linear).unwrap();
        assert!(iso.degenerate);
        assert_abs_diff_eq!(iso.value, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn universal_formula_matches_spectral_scan() {
        // coarse directional scan of the spectral loss never beats the formula
        for (seed, spec) in [(3u64, EntropySpec::VonNeumann), (9, EntropySpec::tsallis(0.7).unwrap())] {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let p = {
                let mut w: Vec<f64> = (0..4).map(|_| -(rand::Rng::gen::<f64>(&mut rng)).ln()).collect();
                let t: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= t);
                w
            };
            let jz = 2.0 * (p[0] + p[1]) - 1.0;
            let jx = p[0] - p[1] + p[2] - p[3];
            let jy = p[2] - p[3] - (p[0] - p[1]);
            let formula = bell_diag_info_loss(jx, jy, jz, spec).unwrap().value;
            let ev = InfoLossEvaluator::new(&bell_diagonal_state(jx, jy, jz), spec);
            let mut best = f64::INFINITY;
            for i in 0..=24 {
                for k in 0..48 {
                    let d = Direction::from_angles(
                        std::f64::consts::FRAC_PI_2 * i as f64 / 24.0,
                        std::f64::consts::TAU * k as f64 / 48.0,
                    );
                    best = best.min(ev.at(&d.vector()));
                }
            }
            assert!(formula <= best + 1e-12, "{formula} > {best}");
            assert!(best - formula < 2e-3, "scan should approach the formula");
        }
    }

    #[test]
    fn small_correlation_universality() {
        let lin = small_j_ratio(0.02, 0.01, 0.03, EntropySpec::Linear).unwrap();
        assert_abs_diff_eq!(lin, 1.0, epsilon = 1e-12);
        let cub = small_j_ratio(0.02, 0.01, 0.03, EntropySpec::Cubic).unwrap();
        assert!((cub - 0.5).abs() < 0.05, "{cub}");
        let vn = small_j_ratio(0.01, 0.02, 0.015, EntropySpec::VonNeumann).unwrap();
        assert!((vn - 1.0 / std::f64::consts::LN_2).abs() < 0.05, "{vn}");
    }

    #[test]
    fn x_state_matches_moment_closed_forms() {
        let states = [
            BlochState::new(
                Vector3::new(0.0, 0.0, 0.2),
                Vector3::new(0.0, 0.0, 0.35),
                Matrix3::from_diagonal(&Vector3::new(0.5, 0.15, 0.3)),
            ),
            BlochState::new(
                Vector3::new(0.0, 0.0, -0.3),
                Vector3::new(0.0, 0.0, 0.1),
                Matrix3::from_diagonal(&Vector3::new(0.2, -0.45, 0.25)),
            ),
        ];
        for s in states {
            let x2 = x_state_info_loss(&s, EntropySpec::Linear).unwrap();
            assert_abs_diff_eq!(x2.value, info_loss_quadratic(&s).value, epsilon = 1e-10);
            let x3 = x_state_info_loss(&s, EntropySpec::Cubic).unwrap();
            assert_abs_diff_eq!(x3.value, info_loss_cubic(&s).value, epsilon = 1e-10);
        }
        assert!(x_state_info_loss(
            &random_bloch(1, SampleMethod::GinibreLike),
            EntropySpec::Linear
        )
        .is_err());
    }

    #[test]
    fn x_state_quadratic_cubic_minimizers_stay_on_axes() {
        // the moment matrices are diagonal on X states, so the quadratic and
        // cubic measures never produce interior-angle minimizers
        use rand::{Rng, SeedableRng};
        for seed in 0..300u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = loop {
                let ra = 2.0 * rng.gen::<f64>() - 1.0;
                let rb = 2.0 * rng.gen::<f64>() - 1.0;
                let (jx, jy, jz) = (
                    2.0 * rng.gen::<f64>() - 1.0,
                    2.0 * rng.gen::<f64>() - 1.0,
                    2.0 * rng.gen::<f64>() - 1.0,
                );
                let valid = [1.0f64, -1.0].iter().all(|&nu| {
                    1.0 + nu * jz - ((ra + nu * rb).powi(2) + (jx - nu * jy).powi(2)).sqrt()
                        >= 1e-9
                });
                if valid {
                    break BlochState::new(
                        Vector3::new(0.0, 0.0, ra),
                        Vector3::new(0.0, 0.0, rb),
                        Matrix3::from_diagonal(&Vector3::new(jx, jy, jz)),
                    );
                }
            };
            for spec in [EntropySpec::Linear, EntropySpec::Cubic] {
                let rep = x_state_info_loss(&s, spec).unwrap();
                let g = rep.direction.gamma();
                let on_axis = g < 1e-6 || g > std::f64::consts::FRAC_PI_2 - 1e-6;
                assert!(on_axis && !rep.degenerate, "seed {seed} {spec}: gamma {g}");
            }
        }
    }

    #[test]
    fn x_state_degenerate_transverse_longitudinal_correlations() {
        // |jx| = |jz| kills the interior equation's denominator; that must
        // not be reported as a dropped candidate
        let s = aligned_state(std::f64::consts::FRAC_PI_4);
        for spec in [EntropySpec::VonNeumann, EntropySpec::Linear] {
            let rep = x_state_info_loss(&s, spec).unwrap();
            assert!(rep.converged, "{spec}");
        }
        let vn = x_state_info_loss(&s, EntropySpec::VonNeumann).unwrap();
        let grid = crate::measure::minimize_info_loss(
            &s,
            EntropySpec::VonNeumann,
            &crate::measure::OptimizerOptions::default(),
        );
        assert_abs_diff_eq!(vn.value, grid.value, epsilon = 1e-8);
    }

    #[test]
    fn x_state_interior_root_in_transition_window() {
        let s = aligned_state(0.55 * std::f64::consts::FRAC_PI_2);
        let rep = x_state_info_loss(&s, EntropySpec::VonNeumann).unwrap();
        let g = rep.direction.gamma();
        assert!(
            g > 1e-3 && g < std::f64::consts::FRAC_PI_2 - 1e-3,
            "expected interior angle, got {g}"
        );
        assert!(rep.degenerate);
        // the interior point beats both axes
        let x = XForm::new(&s, EntropySpec::VonNeumann).unwrap();
        assert!(rep.value < x.loss_in_plane(0.0, EntropySpec::VonNeumann) - 1e-12);
        assert!(
            rep.value
                < x.loss_in_plane(std::f64::consts::FRAC_PI_2, EntropySpec::VonNeumann) - 1e-12
        );
    }

    #[test]
    fn aligned_state_limits() {
        let pure = aligned_state(0.0);
        assert_abs_diff_eq!(1.5 - 0.5 * pure.invariant_norm_sum(), 0.0, epsilon = 1e-14);
        let rho = pure.to_density();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);

        let classical = aligned_state(std::f64::consts::FRAC_PI_2);
        assert!(classical.r_a.norm() < 1e-15);
        assert_abs_diff_eq!(classical.j[(0, 0)], 1.0, epsilon = 1e-15);

        let third = aligned_state(std::f64::consts::PI / 3.0);
        assert_abs_diff_eq!(third.r_a.z, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(third.j[(0, 0)], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(third.j[(2, 2)], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn aligned_piecewise_values() {
        let quarter = aligned_closed(std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(quarter.i2, 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(quarter.i3, 0.0625, epsilon = 1e-14);
        assert_eq!(quarter.branch2, AlignedBranch::Z);
        assert_eq!(quarter.branch3, AlignedBranch::Z);

        let third = aligned_closed(std::f64::consts::PI / 3.0);
        assert_abs_diff_eq!(third.i2, 5.0 / 32.0, epsilon = 1e-14);
        assert_abs_diff_eq!(third.i3, 7.0 / 64.0, epsilon = 1e-14);
        assert_eq!(third.branch2, AlignedBranch::X);
        assert_eq!(third.branch3, AlignedBranch::X);
    }

    #[test]
    fn aligned_branches_continuous_at_critical_angles() {
        let tc2 = critical_angle_quadratic();
        let s4 = tc2.sin().powi(4);
        assert_abs_diff_eq!(0.5 * s4, 2.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            0.5 * s4,
            0.5 * (tc2.cos().powi(2) + tc2.cos().powi(4)),
            epsilon = 1e-14
        );
        let tc3 = critical_angle_cubic();
        assert_abs_diff_eq!(
            0.25 * tc3.sin().powi(4),
            0.25 * (tc3.cos().powi(2) + 3.0 * tc3.cos().powi(4)),
            epsilon = 1e-14
        );
        // the closed forms agree with the moment matrices across the family
        for i in 0..=40 {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 40.0;
            let closed = aligned_closed(theta);
            let s = aligned_state(theta);
            assert_abs_diff_eq!(closed.i2, info_loss_quadratic(&s).value, epsilon = 1e-12);
            assert_abs_diff_eq!(closed.i3, info_loss_cubic(&s).value, epsilon = 1e-12);
        }
    }

    #[test]
    fn aligned_measures_peak_at_the_critical_angle() {
        // dense sampling: continuous, single interior maximum at the branch
        // crossover, rising before and falling after
        let n = 4000;
        let tc2 = critical_angle_quadratic();
        let tc3 = critical_angle_cubic();
        let mut prev = aligned_closed(0.0);
        let (mut argmax2, mut max2) = (0.0, f64::NEG_INFINITY);
        let (mut argmax3, mut max3) = (0.0, f64::NEG_INFINITY);
        for i in 1..=n {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
            let cur = aligned_closed(theta);
            assert!((cur.i2 - prev.i2).abs() < 2e-3, "i2 discontinuity at {theta}");
            assert!((cur.i3 - prev.i3).abs() < 2e-3, "i3 discontinuity at {theta}");
            let rising2 = theta < tc2 - 1e-3;
            let falling2 = theta > tc2 + 1e-3;
            if rising2 {
                assert!(cur.i2 >= prev.i2);
            }
            if falling2 {
                assert!(cur.i2 <= prev.i2);
            }
            if cur.i2 > max2 {
                (max2, argmax2) = (cur.i2, theta);
            }
            if cur.i3 > max3 {
                (max3, argmax3) = (cur.i3, theta);
            }
            prev = cur;
        }
        let step = std::f64::consts::FRAC_PI_2 / n as f64;
        assert!((argmax2 - tc2).abs() <= step, "{argmax2} vs {tc2}");
        assert!((argmax3 - tc3).abs() <= step, "{argmax3} vs {tc3}");
    }

    #[test]
    fn envelope_candidates_dominate_the_grid() {
        // the closed candidate configurations already realize both extremes;
        // refining the safety-net grid never moves them
        for spec in [EntropySpec::Linear, EntropySpec::Cubic, EntropySpec::VonNeumann] {
            for i in 0..=30 {
                let p1 = 0.25 + 0.75 * i as f64 / 30.0;
                let coarse = spectrum_envelope(p1, spec, 2).unwrap();
                let fine = spectrum_envelope(p1, spec, 300).unwrap();
                assert!(
                    (coarse.min - fine.min).abs() < 1e-9,
                    "{spec} p1={p1}: min {} vs {}",
                    coarse.min,
                    fine.min
                );
                assert!(
                    (coarse.max - fine.max).abs() < 1e-9,
                    "{spec} p1={p1}: max {} vs {}",
                    coarse.max,
                    fine.max
                );
            }
        }
    }

    #[test]
    fn envelope_reference_points() {
        let lin = spectrum_envelope(0.5, EntropySpec::Linear, 60).unwrap();
        assert_abs_diff_eq!(lin.max, 0.125, epsilon = 1e-9);
        assert_abs_diff_eq!(lin.min, 0.0, epsilon = 1e-12);
        for (got, want) in lin.argmax.iter().zip([0.5, 0.25, 0.25, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        let cub = spectrum_envelope(0.5, EntropySpec::Cubic, 60).unwrap();
        assert_abs_diff_eq!(cub.max, 2.0 / 27.0, epsilon = 1e-9);
        for (got, want) in cub.argmax.iter().zip([0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        for spec in [EntropySpec::Linear, EntropySpec::Cubic] {
            let e = spectrum_envelope(0.8, spec, 60).unwrap();
            assert_abs_diff_eq!(e.min, 0.36, epsilon = 1e-9);
            for (got, want) in e.argmin.iter().zip([0.8, 0.2, 0.0, 0.0]) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
            }
        }
        assert!(spectrum_envelope(0.2, EntropySpec::Linear, 10).is_err());
        assert!(spectrum_envelope(1.1, EntropySpec::Linear, 10).is_err());
    }

    #[test]
    fn von_neumann_envelope_falls_below_entanglement_of_formation() {
        // for large enough p1 even the largest von Neumann measure drops
        // below the entanglement of formation; the crossover sits near 0.91
        let diff = |p1: f64| {
            let m = spectrum_envelope(p1, EntropySpec::VonNeumann, 200).unwrap().max;
            m - crate::entangle::eof((2.0 * p1 - 1.0).max(0.0)).unwrap()
        };
        assert!(diff(0.85) > 0.0);
        assert!(diff(0.95) < 0.0);
        let (mut lo, mut hi) = (0.85, 0.95);
        while hi - lo > 1e-4 {
            let mid = 0.5 * (lo + hi);
            if diff(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let crossing = 0.5 * (lo + hi);
        assert!((0.895..0.915).contains(&crossing), "{crossing}");
    }

    #[test]
    fn envelope_switch_points() {
        let lin = envelope_max_switch(EntropySpec::Linear).unwrap();
        assert_abs_diff_eq!(lin, 7.0 / 13.0, epsilon = 1e-7);
        let cub = envelope_max_switch(EntropySpec::Cubic).unwrap();
        assert!((cub - 0.44).abs() < 0.01, "{cub}");
        let vn = envelope_max_switch(EntropySpec::VonNeumann).unwrap();
        assert!((vn - 0.86).abs() < 0.02, "{vn}");
    }

    #[test]
    fn quadratic_closed_is_global_minimum() {
        for seed in 0..10u64 {
            let s = random_bloch(seed, SampleMethod::GinibreLike);
            let rep = info_loss_quadratic(&s);
            let ev = InfoLossEvaluator::new(&s, EntropySpec::Linear);
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            for _ in 0..1000 {
                let v = Vector3::new(
                    rand::Rng::gen::<f64>(&mut rng) - 0.5,
                    rand::Rng::gen::<f64>(&mut rng) - 0.5,
                    rand::Rng::gen::<f64>(&mut rng) - 0.5,
                );
                if v.norm() < 1e-6 {
                    continue;
                }
                assert!(rep.value <= ev.at(&v.normalize()) + 1e-10);
            }
        }
    }
}
