//! JSON state files.
//!
//! Two accepted input shapes:
//! `{"bloch": {"r_a": [x,y,z], "r_b": [x,y,z], "j": [[..],[..],[..]]}}` or
//! `{"rho": [[[re,im]; 4]; 4]}` (row-major, standard basis). The writer
//! always emits both representations.

use crate::state::{BlochState, DensityMatrix};
use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("state file needs a \"bloch\" or \"rho\" entry")]
    MissingState,
    #[error("state failed validation: hermiticity dev {herm:.3e}, trace dev {trace:.3e}, min eigenvalue {min_eig:.3e}")]
    Invalid { herm: f64, trace: f64, min_eig: f64 },
}

#[derive(Serialize, Deserialize)]
struct BlochJson {
    r_a: [f64; 3],
    r_b: [f64; 3],
    j: [[f64; 3]; 3],
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    bloch: Option<BlochJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<[[[f64; 2]; 4]; 4]>,
}

fn validated(rho: &DensityMatrix) -> Result<BlochState, IoError> {
    let report = rho.validate();
    if !report.valid {
        return Err(IoError::Invalid {
            herm: report.hermiticity_deviation,
            trace: report.trace_deviation,
            min_eig: report.min_eigenvalue,
        });
    }
    Ok(rho.bloch_unchecked())
}

/// Parses either representation and validates the reconstructed matrix.
pub fn parse_state_json(text: &str) -> Result<BlochState, IoError> {
    let parsed: StateJson = serde_json::from_str(text)?;
    if let Some(b) = parsed.bloch {
        let state = BlochState::new(
            Vector3::from_row_slice(&b.r_a),
            Vector3::from_row_slice(&b.r_b),
            Matrix3::from_fn(|r, c| b.j[r][c]),
        );
        validated(&state.to_density())?;
        return Ok(state);
    }
    if let Some(entries) = parsed.rho {
        let m = Matrix4::from_fn(|r, c| C64::new(entries[r][c][0], entries[r][c][1]));
        return validated(&DensityMatrix::from_matrix(m));
    }
    Err(IoError::MissingState)
}

pub fn read_state_file<P: AsRef<Path>>(path: P) -> Result<BlochState, IoError> {
    parse_state_json(&std::fs::read_to_string(path)?)
}

/// Serializes both representations of a state.
pub fn state_json(state: &BlochState) -> serde_json::Value {
    let rho = state.to_density();
    let m = rho.matrix();
    let mut entries = [[[0.0f64; 2]; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            entries[r][c] = [m[(r, c)].re, m[(r, c)].im];
        }
    }
    serde_json::to_value(StateJson {
        bloch: Some(BlochJson {
            r_a: [state.r_a.x, state.r_a.y, state.r_a.z],
            r_b: [state.r_b.x, state.r_b.y, state.r_b.z],
            j: std::array::from_fn(|r| std::array::from_fn(|c| state.j[(r, c)])),
        }),
        rho: Some(entries),
    })
    .expect("state serialization cannot fail")
}

pub fn write_state_file<P: AsRef<Path>>(path: P, state: &BlochState) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(&state_json(state))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
