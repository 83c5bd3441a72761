//! Two-qubit states in density-matrix and Bloch/correlation form.
//!
//! The Bloch form carries two local 3-vectors and a 3x3 correlation matrix;
//! the density form is the 4x4 Hermitian matrix in the standard basis
//! |00>, |01>, |10>, |11> of sigma_z eigenstates (sigma_z |0> = +|0>),
//! first factor = party A. The X-state block structure used throughout
//! depends on this convention.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Max elementwise deviation from Hermiticity accepted by `validate`.
pub const TOL_HERM: f64 = 1e-12;
/// Accepted deviation of the trace from 1.
pub const TOL_TRACE: f64 = 1e-12;
/// Eigenvalues above `-TOL_PSD` count as non-negative. File input may be
/// marginally non-PSD; 4x4 eigensolvers themselves are good to ~1e-14.
pub const TOL_PSD: f64 = 1e-10;
/// Tolerance on the purity inequalities.
pub const TOL_PURITY: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StateError {
    #[error(
        "invalid density matrix: hermiticity dev {herm:.3e}, trace dev {trace:.3e}, min eigenvalue {min_eig:.3e}"
    )]
    Invalid { herm: f64, trace: f64, min_eig: f64 },
}

/// Two-qubit state as local Bloch vectors plus the spin correlation matrix
/// `j[(mu, nu)] = <sigma_A_mu sigma_B_nu>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub r_a: Vector3<f64>,
    pub r_b: Vector3<f64>,
    pub j: Matrix3<f64>,
}

/// 4x4 complex density matrix, row-major in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<C64>,
}

/// Diagnostic output of `DensityMatrix::validate`.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub valid: bool,
}

/// The two purity inequalities every valid state satisfies, with the
/// pure-state saturation flag for the first.
#[derive(Debug, Clone, Copy)]
pub struct BoundsReport {
    /// |r_a|^2 + |r_b|^2 + ||j||^2, bounded by 3.
    pub norm_sum: f64,
    /// r_a' J r_b - det J, bounded by `cubic_rhs`.
    pub cubic_lhs: f64,
    /// 1 - S_2 / 3.
    pub cubic_rhs: f64,
    pub pure_saturation: bool,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateTag {
    Pure,
    BellDiagonal,
    XState,
    General,
}

/// Classification of a state for method selection and reporting.
#[derive(Debug, Clone, Copy)]
pub struct StateClass {
    pub tag: StateTag,
    pub tolerance: f64,
}

/// Result of rotating a state onto the principal axes of its correlation
/// matrix: `canonical.j` is diagonal and `j = rot_a * canonical.j * rot_b^t`
/// with proper rotations on both parties.
#[derive(Debug, Clone)]
pub struct PrincipalAxes {
    pub canonical: BlochState,
    pub rot_a: Matrix3<f64>,
    pub rot_b: Matrix3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMethod {
    /// rho = G G^dag / Tr, G with iid complex-normal entries.
    GinibreLike,
    /// Convex mixture of up to four random pure (product or entangled)
    /// states with simplex-uniform-ish weights.
    MixtureOfPure,
}

pub(crate) fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

impl BlochState {
    pub fn new(r_a: Vector3<f64>, r_b: Vector3<f64>, j: Matrix3<f64>) -> Self {
        Self { r_a, r_b, j }
    }

    /// Reconstructs the 4x4 density matrix
    /// `(I + r_a.sigma_A + r_b.sigma_B + sigma_A' j sigma_B) / 4`.
    pub fn to_density(&self) -> DensityMatrix {
        let id2 = Matrix2::<C64>::identity();
        let s = pauli();
        let mut m = Matrix4::<C64>::identity();
        for mu in 0..3 {
            m += s[mu].kronecker(&id2) * C64::new(self.r_a[mu], 0.0);
            m += id2.kronecker(&s[mu]) * C64::new(self.r_b[mu], 0.0);
            for nu in 0..3 {
                m += s[mu].kronecker(&s[nu]) * C64::new(self.j[(mu, nu)], 0.0);
            }
        }
        DensityMatrix { m: m * C64::new(0.25, 0.0) }
    }

    /// |r_a|^2 + |r_b|^2 + ||j||^2 (Frobenius); appears in the quadratic
    /// entropy and the first purity bound.
    pub fn invariant_norm_sum(&self) -> f64 {
        self.r_a.norm_squared() + self.r_b.norm_squared() + self.j.norm_squared()
    }

    /// r_a' J r_b - det J; appears in the cubic entropy and the second
    /// purity bound.
    pub fn cubic_invariant(&self) -> f64 {
        self.r_a.dot(&(self.j * self.r_b)) - self.j.determinant()
    }

    /// Both purity inequalities evaluated on this state.
    pub fn purity_bounds(&self) -> BoundsReport {
        let norm_sum = self.invariant_norm_sum();
        let s2 = 1.5 - 0.5 * norm_sum;
        let cubic_lhs = self.cubic_invariant();
        let cubic_rhs = 1.0 - s2 / 3.0;
        BoundsReport {
            norm_sum,
            cubic_lhs,
            cubic_rhs,
            pure_saturation: (norm_sum - 3.0).abs() <= TOL_PURITY,
            satisfied: norm_sum <= 3.0 + TOL_PURITY && cubic_lhs <= cubic_rhs + TOL_PURITY,
        }
    }

    /// True when both Bloch vectors lie along z and j is diagonal, i.e. the
    /// state is in principal-axes X form.
    pub fn is_x_form(&self, tol: f64) -> bool {
        let planar = self.r_a.x.abs().max(self.r_a.y.abs()).max(self.r_b.x.abs()).max(self.r_b.y.abs());
        let mut off = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    off = off.max(self.j[(r, c)].abs());
                }
            }
        }
        planar <= tol && off <= tol
    }

    pub fn classify(&self, tolerance: f64) -> StateClass {
        let s2 = 1.5 - 0.5 * self.invariant_norm_sum();
        let tag = if s2.abs() <= tolerance {
            StateTag::Pure
        } else if self.r_a.norm() <= tolerance && self.r_b.norm() <= tolerance {
            StateTag::BellDiagonal
        } else if self.is_x_form(tolerance) {
            StateTag::XState
        } else {
            StateTag::General
        };
        StateClass { tag, tolerance }
    }

    /// Swaps the roles of the two parties: r_a <-> r_b, j -> j^t. Measures
    /// on "B" of the swapped state are measures on A of the original.
    pub fn swap_parties(&self) -> Self {
        Self {
            r_a: self.r_b,
            r_b: self.r_a,
            j: self.j.transpose(),
        }
    }

    /// Rotates the local frames: r_a -> rot_a^t r_a, r_b -> rot_b^t r_b,
    /// j -> rot_a^t j rot_b. This is how Bloch data transforms under the
    /// local unitaries corresponding to the two rotations.
    pub fn rotate_local(&self, rot_a: &Matrix3<f64>, rot_b: &Matrix3<f64>) -> Self {
        Self {
            r_a: rot_a.transpose() * self.r_a,
            r_b: rot_b.transpose() * self.r_b,
            j: rot_a.transpose() * self.j * rot_b,
        }
    }

    /// Diagonalizes the correlation matrix by proper rotations on both
    /// parties. If an odd number of sign flips is needed to keep both
    /// rotations proper, the diagonal entry of smallest magnitude takes the
    /// sign, minimizing distortion of the dominant correlation.
    pub fn principal_axes(&self) -> PrincipalAxes {
        let mut off = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    off = off.max(self.j[(r, c)].abs());
                }
            }
        }
        if off < 1e-15 {
            return PrincipalAxes {
                canonical: *self,
                rot_a: Matrix3::identity(),
                rot_b: Matrix3::identity(),
            };
        }

        let svd = self.j.svd(true, true);
        let u0 = svd.u.expect("svd with u requested");
        let v0 = svd.v_t.expect("svd with v_t requested").transpose();
        let s0 = svd.singular_values;

        // sort singular values descending for a deterministic layout
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| s0[b].total_cmp(&s0[a]));
        let mut u = Matrix3::zeros();
        let mut v = Matrix3::zeros();
        let mut d = Vector3::zeros();
        for (new, &old) in order.iter().enumerate() {
            u.set_column(new, &u0.column(old));
            v.set_column(new, &v0.column(old));
            d[new] = s0[old];
        }

        let neg_u = u.determinant() < 0.0;
        let neg_v = v.determinant() < 0.0;
        // index of the smallest-magnitude singular value after sorting
        let i_min = 2;
        match (neg_u, neg_v) {
            (true, true) => {
                let cu = -u.column(i_min);
                u.set_column(i_min, &cu);
                let cv = -v.column(i_min);
                v.set_column(i_min, &cv);
            }
            (true, false) => {
                let cu = -u.column(i_min);
                u.set_column(i_min, &cu);
                d[i_min] = -d[i_min];
            }
            (false, true) => {
                let cv = -v.column(i_min);
                v.set_column(i_min, &cv);
                d[i_min] = -d[i_min];
            }
            (false, false) => {}
        }

        PrincipalAxes {
            canonical: self.rotate_local(&u, &v),
            rot_a: u,
            rot_b: v,
        }
    }
}

impl DensityMatrix {
    pub fn from_matrix(m: Matrix4<C64>) -> Self {
        Self { m }
    }

    /// Projector onto a (normalized) pure state vector.
    pub fn from_pure(psi: &Vector4<C64>) -> Self {
        let n = psi.norm();
        let psi = psi / C64::new(n, 0.0);
        Self { m: psi * psi.adjoint() }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity() * C64::new(0.25, 0.0),
        }
    }

    /// Eigenvalues of the Hermitian part, sorted decreasing.
    pub fn spectrum(&self) -> [f64; 4] {
        let h = (self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut vals = [0.0f64; 4];
        for (v, e) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *v = *e;
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    pub fn validate(&self) -> ValidationReport {
        let mut herm = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                herm = herm.max((self.m[(r, c)] - self.m[(c, r)].conj()).norm());
            }
        }
        let trace_deviation = (self.m.trace() - C64::new(1.0, 0.0)).norm();
        let spectrum = self.spectrum();
        let min_eigenvalue = spectrum[3];
        ValidationReport {
            hermiticity_deviation: herm,
            trace_deviation,
            min_eigenvalue,
            valid: herm <= TOL_HERM && trace_deviation <= TOL_TRACE && min_eigenvalue >= -TOL_PSD,
        }
    }

    /// Extracts (r_a, r_b, j) by Pauli traces after validating.
    pub fn to_bloch(&self) -> Result<BlochState, StateError> {
        let report = self.validate();
        if !report.valid {
            return Err(StateError::Invalid {
                herm: report.hermiticity_deviation,
                trace: report.trace_deviation,
                min_eig: report.min_eigenvalue,
            });
        }
        Ok(self.bloch_unchecked())
    }

    /// Pauli-trace extraction without validation.
    pub fn bloch_unchecked(&self) -> BlochState {
        let id2 = Matrix2::<C64>::identity();
        let s = pauli();
        let mut r_a = Vector3::zeros();
        let mut r_b = Vector3::zeros();
        let mut j = Matrix3::zeros();
        for mu in 0..3 {
            r_a[mu] = (self.m * s[mu].kronecker(&id2)).trace().re;
            r_b[mu] = (self.m * id2.kronecker(&s[mu])).trace().re;
            for nu in 0..3 {
                j[(mu, nu)] = (self.m * s[mu].kronecker(&s[nu])).trace().re;
            }
        }
        BlochState { r_a, r_b, j }
    }

    /// Conjugation by a pair of local unitaries.
    pub fn apply_local_unitaries(&self, u_a: &Matrix2<C64>, u_b: &Matrix2<C64>) -> Self {
        let u = u_a.kronecker(u_b);
        Self {
            m: u * self.m * u.adjoint(),
        }
    }
}

/// Pure state with Schmidt weights (p, 1-p) on the z axes:
/// sqrt(p)|00> + sqrt(1-p)|11>.
pub fn schmidt_state(p: f64) -> BlochState {
    let c = 2.0 * (p * (1.0 - p)).max(0.0).sqrt();
    BlochState {
        r_a: Vector3::new(0.0, 0.0, 2.0 * p - 1.0),
        r_b: Vector3::new(0.0, 0.0, 2.0 * p - 1.0),
        j: Matrix3::from_diagonal(&Vector3::new(c, -c, 1.0)),
    }
}

/// State with maximally mixed marginals and diagonal correlations.
pub fn bell_diagonal_state(jx: f64, jy: f64, jz: f64) -> BlochState {
    BlochState {
        r_a: Vector3::zeros(),
        r_b: Vector3::zeros(),
        j: Matrix3::from_diagonal(&Vector3::new(jx, jy, jz)),
    }
}

/// Deterministic random density matrix; always passes `validate`.
pub fn random_density(seed: u64, method: SampleMethod) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match method {
        SampleMethod::GinibreLike => ginibre_density(&mut rng),
        SampleMethod::MixtureOfPure => mixture_density(&mut rng),
    }
}

/// Bloch form of a seeded random state (convenience for property runs).
pub fn random_bloch(seed: u64, method: SampleMethod) -> BlochState {
    random_density(seed, method).bloch_unchecked()
}

fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = Matrix4::from_fn(|_, _| complex_normal(rng));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix {
        m: m / C64::new(tr, 0.0),
    }
}

fn mixture_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    let n = rng.gen_range(1..=4usize);
    let mut weights = [0.0f64; 4];
    let mut total = 0.0;
    for w in weights.iter_mut().take(n) {
        *w = -rng.gen::<f64>().max(1e-16).ln();
        total += *w;
    }
    let mut m = Matrix4::<C64>::zeros();
    for &w in weights.iter().take(n) {
        let psi = if rng.gen_bool(0.5) {
            // product of two random pure qubits
            let a = nalgebra::Vector2::new(complex_normal(rng), complex_normal(rng)).normalize();
            let b = nalgebra::Vector2::new(complex_normal(rng), complex_normal(rng)).normalize();
            a.kronecker(&b)
        } else {
            Vector4::from_fn(|_, _| complex_normal(rng)).normalize()
        };
        m += psi * psi.adjoint() * C64::new(w / total, 0.0);
    }
    DensityMatrix { m }
}

/// Proper random rotation via QR of a Gaussian matrix.
pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let g = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..3 {
        if r[(c, c)] < 0.0 {
            let col = -q.column(c);
            q.set_column(c, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(2);
        q.set_column(2, &col);
    }
    q
}

/// SU(2) element rotating spin by `angle` about `axis`:
/// cos(a/2) I - i sin(a/2) axis.sigma.
pub fn su2(axis: &Vector3<f64>, angle: f64) -> Matrix2<C64> {
    let n = axis.normalize();
    let s = pauli();
    let (sin, cos) = (angle / 2.0).sin_cos();
    let mut u = Matrix2::identity() * C64::new(cos, 0.0);
    for mu in 0..3 {
        u -= s[mu] * C64::new(0.0, sin * n[mu]);
    }
    u
}

/// The SO(3) action of a 2x2 unitary on Bloch vectors, defined so that
/// extracting Bloch data from `u rho u^dag` equals applying this matrix to
/// the original Bloch data via `rotate_local`.
pub fn rotation_from_su2(u: &Matrix2<C64>) -> Matrix3<f64> {
    let s = pauli();
    Matrix3::from_fn(|mu, nu| 0.5 * (u.adjoint() * s[mu] * u * s[nu]).trace().re).transpose()
}
