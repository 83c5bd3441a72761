//! Batch drivers behind the CLI subcommands: family sweeps, spectrum
//! envelopes, and randomized property runs. All of them evaluate
//! independent points in parallel and assemble output in index order, so
//! results are deterministic for fixed inputs.

use crate::closed::{
    aligned_state, info_loss_cubic, info_loss_quadratic, spectrum_envelope, ClosedError,
};
use crate::entangle::{entanglement_bound_bell_diag, eof};
use crate::entropy::EntropySpec;
use crate::io::state_json;
use crate::measure::{
    discord, minimize_info_loss, InfoLossEvaluator, MeasurementReport, OptimizerOptions,
};
use crate::oracle::grid_oracle;
use crate::state::{
    bell_diagonal_state, random_bloch, random_rotation, BlochState, SampleMethod,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// One (theta, entropy) result of an aligned-family sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub value: f64,
    /// Polar angle of the minimizing direction, radians.
    pub gamma: f64,
    /// "closed"/"grid" plus the axis region the minimizer fell in.
    pub branch: String,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Radians.
    pub theta: f64,
    pub cells: Vec<SweepCell>,
    pub discord_value: Option<f64>,
    pub discord_gamma: Option<f64>,
}

fn branch_label(report: &MeasurementReport) -> String {
    let gamma = report.direction.gamma();
    let region = if gamma < 1e-2 {
        "z"
    } else if gamma > FRAC_PI_2 - 1e-2 {
        "x"
    } else {
        "mid"
    };
    format!("{}:{}", report.method.label(), region)
}

/// Sweeps the aligned-mixture family over theta, minimizing every requested
/// entropy; the quantum discord rides along whenever "vn" is requested.
pub fn sweep_aligned(
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    specs: &[EntropySpec],
    opts: &OptimizerOptions,
) -> Vec<SweepRow> {
    assert!(steps >= 2, "sweep needs at least two steps");
    let with_discord = specs.contains(&EntropySpec::VonNeumann);
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let theta =
                theta_min + (theta_max - theta_min) * i as f64 / (steps - 1) as f64;
            let state = aligned_state(theta);
            let cells = specs
                .iter()
                .map(|&spec| {
                    let rep = minimize_info_loss(&state, spec, opts);
                    SweepCell {
                        value: rep.value,
                        gamma: rep.direction.gamma(),
                        branch: branch_label(&rep),
                        converged: rep.converged,
                    }
                })
                .collect();
            let (discord_value, discord_gamma) = if with_discord {
                let rep = discord(&state, opts);
                (Some(rep.value), Some(rep.direction.gamma()))
            } else {
                (None, None)
            };
            SweepRow {
                theta,
                cells,
                discord_value,
                discord_gamma,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopeRow {
    pub p1: f64,
    pub min: f64,
    pub max: f64,
    pub concurrence_squared: f64,
    pub eof: f64,
}

/// Envelope of the universal measure across a range of largest eigenvalues,
/// with the concurrence references alongside.
pub fn envelope_rows(
    p1_min: f64,
    p1_max: f64,
    steps: usize,
    spec: EntropySpec,
    grid_m: usize,
) -> Result<Vec<EnvelopeRow>, ClosedError> {
    assert!(steps >= 2, "envelope needs at least two steps");
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let p1 = p1_min + (p1_max - p1_min) * i as f64 / (steps - 1) as f64;
            let env = spectrum_envelope(p1, spec, grid_m)?;
            let c = (2.0 * p1 - 1.0).max(0.0);
            Ok(EnvelopeRow {
                p1,
                min: env.min,
                max: env.max,
                concurrence_squared: c * c,
                eof: eof(c).expect("concurrence in range"),
            })
        })
        .collect()
}

/// Property checks available to the random runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    PurityBounds,
    NonNegativity,
    ClosedVsOracle,
    RotationInvariance,
    BellCubicBelowQuadratic,
    ConcurrenceBounds,
    RoundTrip,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::PurityBounds,
        CheckKind::NonNegativity,
        CheckKind::ClosedVsOracle,
        CheckKind::RotationInvariance,
        CheckKind::BellCubicBelowQuadratic,
        CheckKind::ConcurrenceBounds,
        CheckKind::RoundTrip,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::PurityBounds => "purity_bounds",
            CheckKind::NonNegativity => "non_negativity",
            CheckKind::ClosedVsOracle => "closed_vs_oracle",
            CheckKind::RotationInvariance => "rotation_invariance",
            CheckKind::BellCubicBelowQuadratic => "bell_i3_le_i2",
            CheckKind::ConcurrenceBounds => "concurrence_bounds",
            CheckKind::RoundTrip => "round_trip",
        }
    }

    pub fn parse(s: &str) -> Option<CheckKind> {
        Self::ALL.iter().copied().find(|c| c.label() == s.trim())
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub passed: usize,
    pub failed: usize,
    /// Largest violation observed (negative means comfortable margin).
    pub worst: f64,
}

#[derive(Debug, Clone)]
pub struct RandomRunReport {
    pub count: usize,
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
    pub all_passed: bool,
    /// First failing case, serialized for reproduction.
    pub first_failure: Option<serde_json::Value>,
}

fn sample_state(seed: u64) -> BlochState {
    let method = if seed.is_multiple_of(2) {
        SampleMethod::GinibreLike
    } else {
        SampleMethod::MixtureOfPure
    };
    random_bloch(seed, method)
}

/// Random valid maximally-mixed-marginals correlation triple: a simplex
/// point mapped back to correlations, scrambled by the allowed sign flips.
pub fn random_bell_triple(seed: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let mut w = [0.0f64; 4];
    let mut total = 0.0;
    for x in &mut w {
        *x = -rng.gen::<f64>().max(1e-16).ln();
        total += *x;
    }
    for x in &mut w {
        *x /= total;
    }
    w.sort_by(|a, b| b.total_cmp(a));
    let jz = 2.0 * (w[0] + w[1]) - 1.0;
    let jx = w[0] - w[1] + w[2] - w[3];
    let jy = w[2] - w[3] - (w[0] - w[1]);
    // un-canonicalize: paired sign flips keep the state valid
    let (mut jx, mut jy, mut jz) = (jx, jy, jz);
    if rng.gen_bool(0.5) {
        jx = -jx;
        jy = -jy;
    }
    if rng.gen_bool(0.5) {
        jy = -jy;
        jz = -jz;
    }
    (jx, jy, jz)
}

struct CheckAccum {
    passed: usize,
    failed: usize,
    worst: f64,
    first_failure: Option<(u64, serde_json::Value)>,
}

impl CheckAccum {
    fn new() -> Self {
        Self {
            passed: 0,
            failed: 0,
            worst: f64::NEG_INFINITY,
            first_failure: None,
        }
    }

    fn merge(mut self, other: CheckAccum) -> Self {
        self.passed += other.passed;
        self.failed += other.failed;
        self.worst = self.worst.max(other.worst);
        self.first_failure = match (self.first_failure.take(), other.first_failure) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn record(&mut self, seed: u64, violation: f64, tol: f64, detail: serde_json::Value) {
        self.worst = self.worst.max(violation);
        if violation <= tol {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some((seed, detail));
            }
        }
    }
}

fn run_check(check: CheckKind, seed: u64, oracle_n: usize, acc: &mut CheckAccum) {
    match check {
        CheckKind::PurityBounds => {
            let s = sample_state(seed);
            let report = s.to_density().validate();
            let b = s.purity_bounds();
            let mut violation = (b.norm_sum - 3.0).max(b.cubic_lhs - b.cubic_rhs);
            if !report.valid {
                violation = f64::INFINITY;
            }
            acc.record(
                seed,
                violation,
                1e-9,
                serde_json::json!({"check": "purity_bounds", "seed": seed, "state": state_json(&s)}),
            );
        }
        CheckKind::NonNegativity => {
            let s = sample_state(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let mut worst = f64::NEG_INFINITY;
            for spec in [
                EntropySpec::VonNeumann,
                EntropySpec::Linear,
                EntropySpec::Cubic,
                EntropySpec::Tsallis { q: 0.6 },
            ] {
                let ev = InfoLossEvaluator::new(&s, spec);
                for _ in 0..4 {
                    let v = nalgebra::Vector3::new(
                        rng.gen::<f64>() - 0.5,
                        rng.gen::<f64>() - 0.5,
                        rng.gen::<f64>() - 0.5,
                    );
                    if v.norm() < 1e-9 {
                        continue;
                    }
                    worst = worst.max(-ev.at(&v.normalize()));
                }
            }
            acc.record(
                seed,
                worst,
                1e-10,
                serde_json::json!({"check": "non_negativity", "seed": seed, "state": state_json(&s)}),
            );
        }
        CheckKind::ClosedVsOracle => {
            let s = sample_state(seed);
            let gap2 =
                (info_loss_quadratic(&s).value - grid_oracle(&s, EntropySpec::Linear, oracle_n).value).abs();
            let gap3 =
                (info_loss_cubic(&s).value - grid_oracle(&s, EntropySpec::Cubic, oracle_n).value).abs();
            acc.record(
                seed,
                gap2.max(gap3),
                1e-6,
                serde_json::json!({"check": "closed_vs_oracle", "seed": seed, "gap2": gap2, "gap3": gap3, "state": state_json(&s)}),
            );
        }
        CheckKind::RotationInvariance => {
            let s = sample_state(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let rot = s.rotate_local(&random_rotation(&mut rng), &random_rotation(&mut rng));
            let d2 = (info_loss_quadratic(&s).value - info_loss_quadratic(&rot).value).abs();
            let d3 = (info_loss_cubic(&s).value - info_loss_cubic(&rot).value).abs();
            acc.record(
                seed,
                d2.max(d3),
                1e-9,
                serde_json::json!({"check": "rotation_invariance", "seed": seed, "state": state_json(&s)}),
            );
        }
        CheckKind::BellCubicBelowQuadratic => {
            let (jx, jy, jz) = random_bell_triple(seed);
            let s = bell_diagonal_state(jx, jy, jz);
            let violation = info_loss_cubic(&s).value - info_loss_quadratic(&s).value;
            acc.record(
                seed,
                violation,
                1e-12,
                serde_json::json!({"check": "bell_i3_le_i2", "seed": seed, "j": [jx, jy, jz]}),
            );
        }
        CheckKind::ConcurrenceBounds => {
            let (jx, jy, jz) = random_bell_triple(seed);
            let mut violation = f64::NEG_INFINITY;
            for spec in [EntropySpec::Linear, EntropySpec::Cubic] {
                match entanglement_bound_bell_diag(jx, jy, jz, spec) {
                    Ok(b) => violation = violation.max(b.concurrence_squared - b.info_loss),
                    Err(_) => violation = violation.max(f64::INFINITY),
                }
            }
            acc.record(
                seed,
                violation,
                1e-12,
                serde_json::json!({"check": "concurrence_bounds", "seed": seed, "j": [jx, jy, jz]}),
            );
        }
        CheckKind::RoundTrip => {
            let s = sample_state(seed);
            // density round trip
            let back = s.to_density().bloch_unchecked();
            let mut dev = (s.r_a - back.r_a)
                .norm()
                .max((s.r_b - back.r_b).norm())
                .max((s.j - back.j).norm());
            // file round trip
            let text = serde_json::to_string(&state_json(&s)).unwrap();
            match crate::io::parse_state_json(&text) {
                Ok(p) => {
                    dev = dev
                        .max((s.r_a - p.r_a).norm())
                        .max((s.r_b - p.r_b).norm())
                        .max((s.j - p.j).norm());
                }
                Err(_) => dev = f64::INFINITY,
            }
            acc.record(
                seed,
                dev,
                1e-12,
                serde_json::json!({"check": "round_trip", "seed": seed, "state": state_json(&s)}),
            );
        }
    }
}

/// Runs the selected checks over `count` seeded samples.
pub fn random_run(
    count: usize,
    seed: u64,
    checks: &[CheckKind],
    oracle_n: usize,
) -> RandomRunReport {
    assert!(count >= 1, "need at least one sample");
    let mut outcomes = Vec::new();
    let mut all_passed = true;
    let mut first_failure = None;
    for &check in checks {
        let acc = (0..count as u64)
            .into_par_iter()
            .fold(CheckAccum::new, |mut acc, i| {
                run_check(check, seed.wrapping_add(i), oracle_n, &mut acc);
                acc
            })
            .reduce(CheckAccum::new, CheckAccum::merge);
        if acc.failed > 0 {
            all_passed = false;
            if first_failure.is_none() {
                first_failure = acc.first_failure.clone().map(|(_, v)| v);
            }
        }
        outcomes.push(CheckOutcome {
            check,
            passed: acc.passed,
            failed: acc.failed,
            worst: acc.worst,
        });
    }
    RandomRunReport {
        count,
        seed,
        outcomes,
        all_passed,
        first_failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::bell_diag_spectrum;

    #[test]
    fn sweep_reports_quadratic_transition() {
        let specs = [EntropySpec::Linear];
        let rows = sweep_aligned(0.0, FRAC_PI_2, 129, &specs, &OptimizerOptions::default());
        assert_eq!(rows.len(), 129);
        // gamma jumps from 0 to pi/2 somewhere near the known critical angle
        let jump = rows
            .windows(2)
            .find(|w| (w[1].cells[0].gamma - w[0].cells[0].gamma).abs() > 1.0)
            .expect("expected a sharp transition");
        let tc = crate::closed::critical_angle_quadratic();
        assert!(jump[0].theta <= tc + 0.02 && tc <= jump[1].theta + 0.02);
        assert!(rows[5].cells[0].branch.starts_with("closed"));
    }

    #[test]
    fn sweep_includes_discord_only_with_vn() {
        let rows = sweep_aligned(
            0.2,
            0.8,
            5,
            &[EntropySpec::VonNeumann],
            &OptimizerOptions::default(),
        );
        assert!(rows[0].discord_value.is_some());
        let rows = sweep_aligned(0.2, 0.8, 3, &[EntropySpec::Linear], &OptimizerOptions::default());
        assert!(rows[0].discord_value.is_none());
    }

    #[test]
    fn envelope_rows_match_references() {
        let rows = envelope_rows(0.5, 1.0, 3, EntropySpec::Linear, 40).unwrap();
        assert!((rows[0].max - 0.125).abs() < 1e-9);
        assert!((rows[2].min - 1.0).abs() < 1e-9);
        assert!((rows[2].concurrence_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_bell_triples_are_valid() {
        for seed in 0..200u64 {
            let (jx, jy, jz) = random_bell_triple(seed);
            assert!(bell_diag_spectrum(jx, jy, jz).is_ok(), "seed {seed}");
        }
    }

    #[test]
    fn random_run_small_all_pass() {
        let report = random_run(40, 7, &CheckKind::ALL, 48);
        assert!(report.all_passed, "{:?}", report.outcomes);
        assert!(report.first_failure.is_none());
        for o in &report.outcomes {
            assert_eq!(o.passed, 40);
        }
    }

    #[test]
    fn random_run_is_deterministic() {
        let a = random_run(10, 3, &[CheckKind::ClosedVsOracle], 32);
        let b = random_run(10, 3, &[CheckKind::ClosedVsOracle], 32);
        assert_eq!(a.outcomes[0].worst.to_bits(), b.outcomes[0].worst.to_bits());
    }
}
