//! Three wires through one point, one of them optionally carrying a
//! different coupling.
//!
//! With all couplings equal (`λ = −1`) and 120° between the wires the
//! skeleton has a kernel at `k = √2`. With `λ = 0` the third wire drops out
//! and a right-angle scissor gives `k = 1`.

use std::f64::consts::PI;

use skeleton_spectra::quadrature::QuadratureRule;
use skeleton_spectra::skeleton::{zero_crossings, WireAngles};

fn report(label: &str, z: &skeleton_spectra::skeleton::ZeroCrossings) {
    for c in &z.crossings {
        println!(
            "{label}: k = {:.10}  E = {:.10}  |mu| = {:.1e}",
            c.k, c.energy, c.mu
        );
    }
    if !z.unresolved.is_empty() {
        println!("{label}: unresolved intervals {:?}", z.unresolved);
    }
}

fn main() -> skeleton_spectra::Result<()> {
    let rule = QuadratureRule::full_line(200, 1.0)?;
    report(
        "equilateral, lambda=-1",
        &zero_crossings(WireAngles::equilateral(), -1.0, &rule, (0.8, 1.5), 8)?,
    );
    report(
        "scissor pi/2, lambda=0",
        &zero_crossings(WireAngles::scissor(PI / 2.0)?, 0.0, &rule, (0.8, 1.2), 5)?,
    );
    let skew = WireAngles::new(PI / 3.0, 3.0 * PI / 4.0, 5.0 * PI / 12.0)?;
    report(
        "skew, lambda=0.5",
        &zero_crossings(skew, 0.5, &rule, (0.75, 1.6), 10)?,
    );
    Ok(())
}
