//! Minimal library walk-through on the aligned-mixture family.

use qcorr::{aligned_state, discord, info_loss_quadratic, minimize_info_loss};
use qcorr::{EntropySpec, OptimizerOptions};

fn main() {
    let state = aligned_state(std::f64::consts::PI / 3.0);

    let quad = info_loss_quadratic(&state);
    println!(
        "quadratic measure {:.6} along gamma = {:.4}",
        quad.value,
        quad.direction.gamma()
    );

    let opts = OptimizerOptions::default();
    let spec = EntropySpec::tsallis(0.7).unwrap();
    let low_q = minimize_info_loss(&state, spec, &opts);
    println!(
        "q = 0.7 measure {:.6} along gamma = {:.4} ({})",
        low_q.value,
        low_q.direction.gamma(),
        low_q.method.label()
    );

    let disc = discord(&state, &opts);
    println!(
        "discord {:.6} along gamma = {:.4}",
        disc.value,
        disc.direction.gamma()
    );
}
