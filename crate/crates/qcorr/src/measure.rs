//! Local spin measurements on party B: post-measurement states, conditional
//! spectra, the information loss `I_f^k = S_f(rho') - S_f(rho)`, the
//! stationary condition for the least disturbing direction, derivative-free
//! minimization over directions, and the quantum discord.

use crate::closed;
use crate::entropy::{entropy_of_spectrum, EntropySpec, EPS_CLAMP};
use crate::state::BlochState;
use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("direction vector has near-zero norm ({0:e})")]
    ZeroDirection(f64),
}

/// Unit measurement direction, also addressable by polar/azimuthal angles
/// with k = (sin g cos p, sin g sin p, cos g).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    k: Vector3<f64>,
}

impl Direction {
    pub fn from_vector(v: Vector3<f64>) -> Result<Self, MeasureError> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(MeasureError::ZeroDirection(n));
        }
        Ok(Self { k: v / n })
    }

    pub fn from_angles(gamma: f64, phi: f64) -> Self {
        let (sg, cg) = gamma.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            k: Vector3::new(sg * cp, sg * sp, cg),
        }
    }

    pub fn x() -> Self {
        Self { k: Vector3::x() }
    }
    pub fn y() -> Self {
        Self { k: Vector3::y() }
    }
    pub fn z() -> Self {
        Self { k: Vector3::z() }
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.k.z.clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self) -> f64 {
        let p = self.k.y.atan2(self.k.x);
        if p < 0.0 {
            p + std::f64::consts::TAU
        } else {
            p
        }
    }

    /// Representative of the antipodal pair in the upper hemisphere
    /// (gamma <= pi/2), with a fixed half-plane at the equator and phi = 0
    /// at the pole, so reported directions are reproducible.
    pub fn canonical(&self) -> Self {
        let mut k = self.k;
        if k.z < -1e-12 {
            k = -k;
        } else if k.z.abs() <= 1e-12 {
            if k.y < -1e-12 || (k.y.abs() <= 1e-12 && k.x < 0.0) {
                k = -k;
            }
            k.z = 0.0;
        }
        if k.z > 1.0 - 1e-15 {
            return Self { k: Vector3::z() };
        }
        Self { k: k.normalize() }
    }

    /// Angle between measurement axes, identifying k with -k.
    pub fn axis_angle_to(&self, other: &Direction) -> f64 {
        self.k.dot(&other.k).abs().min(1.0).acos()
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    GridRefine,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::GridRefine => "grid_refine",
        }
    }
}

/// Result of minimizing an information loss over measurement directions.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementReport {
    /// Minimal information loss found.
    pub value: f64,
    /// Minimizing direction (canonical hemisphere representative).
    pub direction: Direction,
    /// Conditional eigenvalues of the post-measurement state at `direction`,
    /// ordered [p(+|+), p(-|+), p(+|-), p(-|-)] by (mu, nu) signs.
    pub cond_spectrum: [f64; 4],
    /// Norm of the stationary-condition cross product at `direction`.
    pub residual: f64,
    pub method: Method,
    /// Another local minimum ties the best value at a distinct direction.
    pub degenerate: bool,
    /// A derivative clamp or a merged degenerate branch entered the
    /// residual; the residual is then only indicative.
    pub singular: bool,
    /// False when the local refinement hit its iteration cap.
    pub converged: bool,
}

/// Options for the direction optimizer.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerOptions {
    /// Nominal polar resolution; the sphere grid is grid_n x 2 grid_n with
    /// the antipodal half skipped.
    pub grid_n: usize,
    /// Convergence tolerance on the refined direction (radians).
    pub xtol: f64,
    /// Iteration cap for each simplex refinement.
    pub max_iter: usize,
    /// Use the quadratic/cubic closed forms when the entropy allows it.
    pub allow_closed: bool,
    /// Two minima closer in value than this count as tied.
    pub value_tie: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            grid_n: 64,
            xtol: 1e-10,
            max_iter: 500,
            allow_closed: true,
            value_tie: 1e-9,
        }
    }
}

/// Applies the unread measurement along k: r_b -> (r_b.k) k, j -> j k k^t.
/// Idempotent for fixed k.
pub fn post_measurement_state(state: &BlochState, k: &Direction) -> BlochState {
    let kv = k.vector();
    BlochState {
        r_a: state.r_a,
        r_b: kv * state.r_b.dot(&kv),
        j: (state.j * kv) * kv.transpose(),
    }
}

/// Bloch vector of party B after the measurement: (r_b.k) k.
pub fn local_state_after(state: &BlochState, k: &Direction) -> Vector3<f64> {
    let kv = k.vector();
    kv * state.r_b.dot(&kv)
}

/// Conditional eigenvalues (1 + nu r_b.k + mu |r_a + nu j k|) / 4 of the
/// post-measurement state, ordered [(+,+), (-,+), (+,-), (-,-)] in (mu, nu).
pub fn cond_spectrum(state: &BlochState, k: &Direction) -> [f64; 4] {
    let kv = k.vector();
    let rbk = state.r_b.dot(&kv);
    let jk = state.j * kv;
    let n_plus = (state.r_a + jk).norm();
    let n_minus = (state.r_a - jk).norm();
    [
        0.25 * (1.0 + rbk + n_plus),
        0.25 * (1.0 + rbk - n_plus),
        0.25 * (1.0 - rbk + n_minus),
        0.25 * (1.0 - rbk - n_minus),
    ]
}

/// Reusable spectral evaluator of `I_f^k` for one state: the base entropy
/// is diagonalized once, each direction costs only the conditional spectrum.
/// This route never touches the closed-form moment matrices, so it can serve
/// as their independent cross-check.
#[derive(Debug, Clone)]
pub struct InfoLossEvaluator {
    state: BlochState,
    spec: EntropySpec,
    base: f64,
}

impl InfoLossEvaluator {
    pub fn new(state: &BlochState, spec: EntropySpec) -> Self {
        let spectrum = state.to_density().spectrum();
        let base = entropy_of_spectrum(&spectrum, spec)
            .unwrap_or_else(|_| spectrum.iter().map(|&p| spec.f_raw(p.max(0.0))).sum());
        Self {
            state: *state,
            spec,
            base,
        }
    }

    pub fn base_entropy(&self) -> f64 {
        self.base
    }

    #[inline]
    pub fn at(&self, kv: &Vector3<f64>) -> f64 {
        let rbk = self.state.r_b.dot(kv);
        let jk = self.state.j * kv;
        let n_plus = (self.state.r_a + jk).norm();
        let n_minus = (self.state.r_a - jk).norm();
        let f = |p: f64| self.spec.f_raw(p);
        f(0.25 * (1.0 + rbk + n_plus))
            + f(0.25 * (1.0 + rbk - n_plus))
            + f(0.25 * (1.0 - rbk + n_minus))
            + f(0.25 * (1.0 - rbk - n_minus))
            - self.base
    }
}

/// Information loss `S_f(rho') - S_f(rho)` for a measurement along k.
/// Quadratic and cubic entropies go through their moment-matrix closed
/// forms; everything else is evaluated spectrally.
pub fn info_loss(state: &BlochState, k: &Direction, spec: EntropySpec) -> f64 {
    match spec {
        EntropySpec::Linear => closed::loss_quadratic_at(state, &k.vector()),
        EntropySpec::Cubic => closed::loss_cubic_at(state, &k.vector()),
        _ => InfoLossEvaluator::new(state, spec).at(&k.vector()),
    }
}

/// Stationary-condition diagnostics at a direction.
#[derive(Debug, Clone, Copy)]
pub struct StationaryReport {
    /// |k x (a1 r_b + a2 j^t r_a + a3 j^t j k)|; zero iff k is stationary.
    pub residual: f64,
    /// A derivative was clamped near a vanishing eigenvalue.
    pub clamped: bool,
    /// A |r_a + nu j k| denominator vanished; that branch was merged and
    /// its direction term dropped.
    pub merged: bool,
}

impl StationaryReport {
    pub fn flagged(&self) -> bool {
        self.clamped || self.merged
    }
}

fn stationary_coefficients(
    state: &BlochState,
    kv: &Vector3<f64>,
    spec: EntropySpec,
) -> (f64, f64, f64, bool, bool) {
    let rbk = state.r_b.dot(kv);
    let jk = state.j * kv;
    let mut a1 = 0.0;
    let mut a2 = 0.0;
    let mut a3 = 0.0;
    let mut clamped = false;
    let mut merged = false;
    for nu in [1.0f64, -1.0] {
        let n_nu = (state.r_a + jk * nu).norm();
        for mu in [1.0f64, -1.0] {
            let p = 0.25 * (1.0 + nu * rbk + mu * n_nu);
            let (fp, cl) = spec.f_derivative(p);
            clamped |= cl;
            a1 += 0.25 * nu * fp;
            if n_nu >= EPS_CLAMP {
                a2 += 0.25 * nu * mu * fp / n_nu;
                a3 += 0.25 * mu * fp / n_nu;
            } else {
                merged = true;
            }
        }
    }
    (a1, a2, a3, clamped, merged)
}

/// Residual of the general stationary condition for the least disturbing
/// direction. Vanishes exactly when k solves
/// `a1 r_b + a2 j^t r_a + a3 j^t j k = lambda k` (the multiplier is
/// eliminated by the cross product).
pub fn stationary_residual(state: &BlochState, k: &Direction, spec: EntropySpec) -> StationaryReport {
    let kv = k.vector();
    let (a1, a2, a3, clamped, merged) = stationary_coefficients(state, &kv, spec);
    let jt = state.j.transpose();
    let d = state.r_b * a1 + jt * state.r_a * a2 + jt * (state.j * kv) * a3;
    StationaryReport {
        residual: kv.cross(&d).norm(),
        clamped,
        merged,
    }
}

/// Residual of the discord's modified stationary condition: the local term
/// shifts a1 by eta = log2(p_- / p_+) / 2 with p_nu the eigenvalues of the
/// measured local state.
pub fn discord_stationary_residual(state: &BlochState, k: &Direction) -> StationaryReport {
    let spec = EntropySpec::VonNeumann;
    let kv = k.vector();
    let (a1, a2, a3, mut clamped, merged) = stationary_coefficients(state, &kv, spec);
    let rbk = state.r_b.dot(&kv);
    let mut eta = 0.0;
    for nu in [1.0f64, -1.0] {
        let p = 0.5 * (1.0 + nu * rbk);
        let (fp, cl) = spec.f_derivative(p);
        clamped |= cl;
        eta += 0.5 * nu * fp;
    }
    let jt = state.j.transpose();
    let d = state.r_b * (a1 - eta) + jt * state.r_a * a2 + jt * (state.j * kv) * a3;
    StationaryReport {
        residual: kv.cross(&d).norm(),
        clamped,
        merged,
    }
}

// ---------------------------------------------------------------------------
// derivative-free minimization over the direction sphere
// ---------------------------------------------------------------------------

struct SphereMinimum {
    value: f64,
    direction: Direction,
    degenerate: bool,
    converged: bool,
}

pub(crate) fn refine_simplex<F: Fn(&Vector3<f64>) -> f64>(
    f: &F,
    start: (f64, f64),
    h: f64,
    opts: &OptimizerOptions,
) -> (f64, f64, f64, bool) {
    let eval = |g: f64, p: f64| f(&Direction::from_angles(g, p).vector());
    let mut pts = [
        (start.0, start.1),
        (start.0 + h, start.1),
        (start.0, start.1 + h),
    ];
    let mut vals = [eval(pts[0].0, pts[0].1), eval(pts[1].0, pts[1].1), eval(pts[2].0, pts[2].1)];
    let mut converged = false;
    for _ in 0..opts.max_iter {
        // order best..worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);

        // size in embedded k space is pole-safe, unlike raw angle spread
        let kb = Direction::from_angles(pts[b].0, pts[b].1).vector();
        let km = Direction::from_angles(pts[m].0, pts[m].1).vector();
        let kw = Direction::from_angles(pts[w].0, pts[w].1).vector();
        let size = (kb - km)
            .norm()
            .max((kb - kw).norm())
            .max((km - kw).norm());
        let spread = vals[w] - vals[b];
        if size < opts.xtol || spread < 1e-15 * (1.0 + vals[b].abs()) {
            converged = true;
            break;
        }

        let centroid = (
            0.5 * (pts[b].0 + pts[m].0),
            0.5 * (pts[b].1 + pts[m].1),
        );
        let refl = (
            centroid.0 + (centroid.0 - pts[w].0),
            centroid.1 + (centroid.1 - pts[w].1),
        );
        let fr = eval(refl.0, refl.1);
        if fr < vals[b] {
            let exp = (
                centroid.0 + 2.0 * (centroid.0 - pts[w].0),
                centroid.1 + 2.0 * (centroid.1 - pts[w].1),
            );
            let fe = eval(exp.0, exp.1);
            if fe < fr {
                pts[w] = exp;
                vals[w] = fe;
            } else {
                pts[w] = refl;
                vals[w] = fr;
            }
        } else if fr < vals[m] {
            pts[w] = refl;
            vals[w] = fr;
        } else {
            let con = (
                centroid.0 + 0.5 * (pts[w].0 - centroid.0),
                centroid.1 + 0.5 * (pts[w].1 - centroid.1),
            );
            let fc = eval(con.0, con.1);
            if fc < vals[w] {
                pts[w] = con;
                vals[w] = fc;
            } else {
                // shrink toward the best vertex
                for i in 0..3 {
                    if i != b {
                        pts[i] = (
                            pts[b].0 + 0.5 * (pts[i].0 - pts[b].0),
                            pts[b].1 + 0.5 * (pts[i].1 - pts[b].1),
                        );
                        vals[i] = eval(pts[i].0, pts[i].1);
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (vals[best], pts[best].0, pts[best].1, converged)
}

/// Coarse hemisphere grid (k and -k give the same measurement), then local
/// simplex refinement of the well-separated best grid basins.
fn minimize_on_sphere<F: Fn(&Vector3<f64>) -> f64>(f: &F, opts: &OptimizerOptions) -> SphereMinimum {
    let n_gamma = (opts.grid_n / 2).max(4);
    let n_phi = (2 * opts.grid_n).max(8);
    let dg = std::f64::consts::FRAC_PI_2 / n_gamma as f64;
    let dp = std::f64::consts::TAU / n_phi as f64;

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(n_gamma * n_phi + 1);
    grid.push((f(&Vector3::z()), 0.0, 0.0));
    for i in 1..=n_gamma {
        let gamma = dg * i as f64;
        for jp in 0..n_phi {
            let phi = dp * jp as f64;
            let v = f(&Direction::from_angles(gamma, phi).vector());
            grid.push((v, gamma, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    // non-maximum suppression: keep the best few well-separated basins
    let sep = 3.5 * dg.max(dp / 4.0);
    let mut starts: Vec<(f64, f64, f64)> = Vec::new();
    for &(v, g, p) in &grid {
        let dir = Direction::from_angles(g, p);
        if starts
            .iter()
            .all(|&(_, sg, sp)| Direction::from_angles(sg, sp).axis_angle_to(&dir) > sep)
        {
            starts.push((v, g, p));
            if starts.len() >= 6 {
                break;
            }
        }
    }

    let h = 0.5 * dg;
    let mut refined: Vec<(f64, Direction, bool)> = starts
        .iter()
        .map(|&(_, g, p)| {
            let (mut v, mut rg, mut rp, mut conv) = refine_simplex(f, (g, p), h, opts);
            // fresh-simplex restarts recover from premature collapse in
            // nearly flat valleys
            for shrink in [8.0, 64.0] {
                let (v2, g2, p2, c2) = refine_simplex(f, (rg, rp), h / shrink, opts);
                if v2 < v {
                    (v, rg, rp, conv) = (v2, g2, p2, c2);
                }
            }
            (v, Direction::from_angles(rg, rp).canonical(), conv)
        })
        .collect();
    refined.sort_by(|a, b| a.0.total_cmp(&b.0));

    // value first, then smaller polar angle among ties
    let best_value = refined[0].0;
    let mut best = 0;
    for (i, r) in refined.iter().enumerate().skip(1) {
        if (r.0 - best_value).abs() <= opts.value_tie
            && r.1.gamma() < refined[best].1.gamma() - 1e-12
        {
            best = i;
        }
    }
    let degenerate = refined.iter().enumerate().any(|(i, r)| {
        i != best
            && (r.0 - refined[best].0).abs() <= opts.value_tie
            && r.1.axis_angle_to(&refined[best].1) > 1e-3
    });

    SphereMinimum {
        value: refined[best].0,
        direction: refined[best].1,
        degenerate,
        converged: refined[best].2,
    }
}

/// Minimal information loss over all measurement directions.
///
/// Quadratic and cubic entropies use the exact moment-matrix result when
/// `opts.allow_closed` is set; every other entropy (or `allow_closed =
/// false`) runs the spectral grid-and-refine search.
pub fn minimize_info_loss(
    state: &BlochState,
    spec: EntropySpec,
    opts: &OptimizerOptions,
) -> MeasurementReport {
    if opts.allow_closed {
        match spec {
            EntropySpec::Linear => return closed::info_loss_quadratic(state),
            EntropySpec::Cubic => return closed::info_loss_cubic(state),
            _ => {}
        }
    }
    let eval = InfoLossEvaluator::new(state, spec);
    let min = minimize_on_sphere(&|k| eval.at(k), opts);
    let stationary = stationary_residual(state, &min.direction, spec);
    MeasurementReport {
        value: min.value,
        direction: min.direction,
        cond_spectrum: cond_spectrum(state, &min.direction),
        residual: stationary.residual,
        method: Method::GridRefine,
        degenerate: min.degenerate,
        singular: stationary.flagged(),
        converged: min.converged,
    }
}

/// Quantum discord under projective measurements: minimizes
/// `[S(rho') - S(rho)] - [S(rho_b') - S(rho_b)]` with the von Neumann
/// entropy. The residual uses the modified stationary condition.
pub fn discord(state: &BlochState, opts: &OptimizerOptions) -> MeasurementReport {
    let spec = EntropySpec::VonNeumann;
    let joint = InfoLossEvaluator::new(state, spec);
    let rb = state.r_b.norm();
    let base_local = spec.f_raw(0.5 * (1.0 + rb)) + spec.f_raw(0.5 * (1.0 - rb));
    let objective = |kv: &Vector3<f64>| {
        let rbk = state.r_b.dot(kv);
        let local = spec.f_raw(0.5 * (1.0 + rbk)) + spec.f_raw(0.5 * (1.0 - rbk));
        joint.at(kv) - (local - base_local)
    };
    let min = minimize_on_sphere(&objective, opts);
    let stationary = discord_stationary_residual(state, &min.direction);
    MeasurementReport {
        value: min.value,
        direction: min.direction,
        cond_spectrum: cond_spectrum(state, &min.direction),
        residual: stationary.residual,
        method: Method::GridRefine,
        degenerate: min.degenerate,
        singular: stationary.flagged(),
        converged: min.converged,
    }
}
