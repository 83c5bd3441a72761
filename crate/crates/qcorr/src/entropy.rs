//! Generalized entropic forms `S_f = Tr f(rho)` for strictly concave `f` with
//! `f(0) = f(1) = 0`, normalized so that `2 f(1/2) = 1` (a maximally mixed
//! qubit has unit entropy). Includes the von Neumann entropy (base-2 log),
//! the Tsallis family, and dedicated quadratic/cubic fast paths together with
//! their two-qubit closed forms.

use crate::state::BlochState;
use thiserror::Error;

/// Largest supported Tsallis index; beyond this `p^q` underflow dominates.
pub const MAX_Q: f64 = 50.0;

/// Probabilities below this are clamped before evaluating singular
/// derivatives (von Neumann and Tsallis q < 1).
pub const EPS_CLAMP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("probability {0} outside [0, 1]")]
    Domain(f64),
    #[error("tsallis index must be in (0, {MAX_Q}] (got {0})")]
    InvalidQ(f64),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("unrecognized entropy spec '{0}' (expected vn | lin | cub | q=<r>)")]
    Parse(String),
}

/// Choice of concave function behind `S_f`.
///
/// `Linear` and `Cubic` are the Tsallis q = 2 and q = 3 members with
/// polynomial fast paths; `tsallis` snaps onto them (and onto `VonNeumann`
/// at q = 1) so the closed forms downstream are always reachable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropySpec {
    VonNeumann,
    Tsallis { q: f64 },
    /// f(p) = 2 p (1 - p); entropy 2(1 - Tr rho^2).
    Linear,
    /// f(p) = (4/3)(p - p^3); entropy (4/3)(1 - Tr rho^3).
    Cubic,
}

impl EntropySpec {
    pub fn tsallis(q: f64) -> Result<Self, EntropyError> {
        if !q.is_finite() || q <= 0.0 || q > MAX_Q {
            return Err(EntropyError::InvalidQ(q));
        }
        if (q - 1.0).abs() < 1e-12 {
            Ok(EntropySpec::VonNeumann)
        } else if (q - 2.0).abs() < 1e-12 {
            Ok(EntropySpec::Linear)
        } else if (q - 3.0).abs() < 1e-12 {
            Ok(EntropySpec::Cubic)
        } else {
            Ok(EntropySpec::Tsallis { q })
        }
    }

    /// Parses the CLI grammar: `"vn" | "lin" | "cub" | "q=<positive real>"`.
    pub fn parse(s: &str) -> Result<Self, EntropyError> {
        match s.trim() {
            "vn" => Ok(EntropySpec::VonNeumann),
            "lin" => Ok(EntropySpec::Linear),
            "cub" => Ok(EntropySpec::Cubic),
            other => match other.strip_prefix("q=") {
                Some(num) => {
                    let q: f64 = num
                        .trim()
                        .parse()
                        .map_err(|_| EntropyError::Parse(other.to_string()))?;
                    Self::tsallis(q)
                }
                None => Err(EntropyError::Parse(other.to_string())),
            },
        }
    }

    /// True when the derivative diverges at p = 0 and clamping may engage.
    pub fn singular_at_zero(&self) -> bool {
        match self {
            EntropySpec::VonNeumann => true,
            EntropySpec::Tsallis { q } => *q < 1.0,
            _ => false,
        }
    }

    /// f(p) without the domain check; out-of-range inputs are clamped.
    /// This is the hot path used by the grid optimizers.
    #[inline]
    pub fn f_raw(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            EntropySpec::VonNeumann => {
                if p <= 0.0 || p >= 1.0 {
                    0.0
                } else {
                    -p * p.log2()
                }
            }
            EntropySpec::Tsallis { q } => (p - p.powf(*q)) / (1.0 - (1.0 - q).exp2()),
            EntropySpec::Linear => 2.0 * p * (1.0 - p),
            EntropySpec::Cubic => (4.0 / 3.0) * (p - p * p * p),
        }
    }

    /// f(p) for p in [0, 1] (tolerance 1e-12 outside).
    pub fn f_value(&self, p: f64) -> Result<f64, EntropyError> {
        if !(-1e-12..=1.0 + 1e-12).contains(&p) {
            return Err(EntropyError::Domain(p));
        }
        Ok(self.f_raw(p))
    }

    /// Analytic f'(p). Returns the value and whether the clamp at
    /// [`EPS_CLAMP`] engaged (singular specs evaluated near p = 0).
    pub fn f_derivative(&self, p: f64) -> (f64, bool) {
        let mut clamped = false;
        let p = if self.singular_at_zero() && p < EPS_CLAMP {
            clamped = true;
            EPS_CLAMP
        } else {
            p.clamp(0.0, 1.0)
        };
        let value = match self {
            EntropySpec::VonNeumann => -(p.ln() + 1.0) / std::f64::consts::LN_2,
            EntropySpec::Tsallis { q } => (1.0 - q * p.powf(q - 1.0)) / (1.0 - (1.0 - q).exp2()),
            EntropySpec::Linear => 2.0 - 4.0 * p,
            EntropySpec::Cubic => (4.0 / 3.0) * (1.0 - 3.0 * p * p),
        };
        (value, clamped)
    }

    /// -f''(1/4)/4: the universal ratio I_f / I_2 near the maximally mixed
    /// state, common to every entropic choice.
    pub fn small_correlation_coefficient(&self) -> f64 {
        match self {
            EntropySpec::VonNeumann => 1.0 / std::f64::consts::LN_2,
            EntropySpec::Tsallis { q } => {
                q * (q - 1.0) * (1.0 - q).exp2() * (1.0 - q).exp2() / (1.0 - (1.0 - q).exp2())
            }
            EntropySpec::Linear => 1.0,
            EntropySpec::Cubic => 0.5,
        }
    }

    /// Grammar-compatible label, used for CSV column names.
    pub fn label(&self) -> String {
        match self {
            EntropySpec::VonNeumann => "vn".to_string(),
            EntropySpec::Tsallis { q } => format!("q={q}"),
            EntropySpec::Linear => "lin".to_string(),
            EntropySpec::Cubic => "cub".to_string(),
        }
    }
}

impl std::fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// `sum_i f(p_i)` over a probability spectrum.
///
/// The spectrum must sum to 1 within 1e-9; entries may dip to -1e-10
/// (eigensolver round-off) and are clamped to zero.
pub fn entropy_of_spectrum(probs: &[f64], spec: EntropySpec) -> Result<f64, EntropyError> {
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EntropyError::InvalidSpectrum(format!(
            "sum {sum} deviates from 1 by {:e}",
            sum - 1.0
        )));
    }
    for &p in probs {
        if !(-1e-10..=1.0 + 1e-10).contains(&p) {
            return Err(EntropyError::InvalidSpectrum(format!(
                "entry {p} outside [0, 1]"
            )));
        }
    }
    Ok(probs.iter().map(|&p| spec.f_raw(p.max(0.0))).sum())
}

/// Quadratic entropy of a two-qubit state from its correlation data alone:
/// `3/2 - (|r_a|^2 + |r_b|^2 + ||j||^2) / 2`.
pub fn s2_closed(state: &BlochState) -> f64 {
    1.5 - 0.5 * state.invariant_norm_sum()
}

/// Cubic entropy of a two-qubit state:
/// `[S_2 + 1 - (r_a' J r_b - det J)] / 2`.
pub fn s3_closed(state: &BlochState) -> f64 {
    0.5 * (s2_closed(state) + 1.0 - state.cubic_invariant())
}
