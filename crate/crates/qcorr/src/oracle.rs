//! Brute-force reference for the minimal information loss: an exhaustive
//! direction grid evaluated through the spectral route, polished by
//! golden-section searches on the best axis-aligned slices and a small
//! simplex tail. Shares no algebra with the moment-matrix closed forms, so
//! agreement between the two is a genuine cross-check.

use crate::entropy::EntropySpec;
use crate::measure::{refine_simplex, Direction, InfoLossEvaluator, OptimizerOptions};
use crate::state::BlochState;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub value: f64,
    pub direction: Direction,
    pub evaluations: usize,
}

fn golden_min<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Exhaustive n x 2n grid over the full (gamma, phi) rectangle followed by
/// local polish. `n` is clamped below at 8.
pub fn grid_oracle(state: &BlochState, spec: EntropySpec, n: usize) -> OracleReport {
    let n = n.max(8);
    let eval = InfoLossEvaluator::new(state, spec);
    let mut evaluations = 0usize;
    let mut f = |g: f64, p: f64| {
        evaluations += 1;
        eval.at(&Direction::from_angles(g, p).vector())
    };

    let dg = PI / (n - 1) as f64;
    let dp = TAU / (2 * n) as f64;
    let mut best = (f(0.0, 0.0), 0.0, 0.0);
    for i in 0..n {
        let gamma = dg * i as f64;
        for jp in 0..2 * n {
            let phi = dp * jp as f64;
            let v = f(gamma, phi);
            if v < best.0 {
                best = (v, gamma, phi);
            }
        }
    }

    // alternating golden-section passes on the two coordinate slices
    let (mut value, mut gamma, mut phi) = best;
    for _ in 0..60 {
        let before = value;
        let (g, vg) = golden_min(&mut |g| f(g, phi), gamma - 2.0 * dg, gamma + 2.0 * dg, 1e-12);
        if vg < value {
            value = vg;
            gamma = g;
        }
        let (p, vp) = golden_min(&mut |p| f(gamma, p), phi - 2.0 * dp, phi + 2.0 * dp, 1e-12);
        if vp < value {
            value = vp;
            phi = p;
        }
        if before - value < 1e-16 {
            break;
        }
    }

    // simplex tail guards against coordinate-descent stalling in oblique
    // valleys
    let opts = OptimizerOptions {
        xtol: 1e-11,
        max_iter: 400,
        ..OptimizerOptions::default()
    };
    let count = std::cell::Cell::new(0usize);
    let (v, g, p, _) = refine_simplex(
        &|k| {
            count.set(count.get() + 1);
            eval.at(k)
        },
        (gamma, phi),
        2e-3,
        &opts,
    );
    evaluations += count.get();
    if v < value {
        value = v;
        gamma = g;
        phi = p;
    }

    OracleReport {
        value,
        direction: Direction::from_angles(gamma, phi).canonical(),
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{bell_diag_info_loss, info_loss_cubic, info_loss_quadratic};
    use crate::state::{bell_diagonal_state, random_bloch, SampleMethod};

    #[test]
    fn oracle_matches_quadratic_closed_form() {
        for seed in 0..8u64 {
            let s = random_bloch(seed, SampleMethod::GinibreLike);
            let oracle = grid_oracle(&s, EntropySpec::Linear, 96);
            let closed = info_loss_quadratic(&s);
            assert!(
                (oracle.value - closed.value).abs() < 1e-7,
                "seed {seed}: {} vs {}",
                oracle.value,
                closed.value
            );
        }
    }

    #[test]
    fn oracle_matches_cubic_closed_form() {
        for seed in 0..8u64 {
            let s = random_bloch(seed, SampleMethod::MixtureOfPure);
            let oracle = grid_oracle(&s, EntropySpec::Cubic, 96);
            let closed = info_loss_cubic(&s);
            assert!(
                (oracle.value - closed.value).abs() < 1e-7,
                "seed {seed}: {} vs {}",
                oracle.value,
                closed.value
            );
        }
    }

    #[test]
    fn oracle_matches_universal_formula_off_the_fast_paths() {
        let spec = EntropySpec::tsallis(0.7).unwrap();
        let formula = bell_diag_info_loss(0.3, 0.2, 0.4, spec).unwrap();
        let oracle = grid_oracle(&bell_diagonal_state(0.3, 0.2, 0.4), spec, 96);
        assert!((oracle.value - formula.value).abs() < 1e-7);
        assert!(oracle.direction.axis_angle_to(&formula.direction) < 1e-3);
    }
}
