//! The three closed-form eigenpairs, checked on a 400-node Nyström rule.
//!
//! `cargo run --release --example exact_eigenpairs`

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use skeleton_spectra::eigensolve::eigvalsh;
use skeleton_spectra::kernels::{t0, Angle, CrossingKernel, EnergyParameter, Sign};
use skeleton_spectra::quadrature::{diag_multiplication, nystrom, QuadratureRule};
use skeleton_spectra::skeleton::{
    apply_exact_vector, build_sector, build_tilde, tilde_eigenfunction,
};

fn main() -> skeleton_spectra::Result<()> {
    let rule = QuadratureRule::half_line(400, 1.0)?;

    // T_0 + T_{π/2}: eigenvalue 1, φ(p) = √(2/π)/(p²+1)
    let right = build_sector(Angle::crossing(FRAC_PI_2)?, Sign::Plus, Sign::Plus, &rule)?;
    let top = *eigvalsh(&right.op.matrix)?.last().unwrap();
    let c = apply_exact_vector(&right.op, |p| (2.0 / PI).sqrt() / (p * p + 1.0))?;
    println!(
        "T0 + T(pi/2):   top = {top:.12}  rayleigh = {:.12}  residual = {:.1e}",
        c.rayleigh, c.residual
    );

    // T_0 + 2T^+_{2π/3}: eigenvalue √2
    let kernel = CrossingKernel::unit(Angle::crossing(2.0 * PI / 3.0)?)?;
    let mcguire = diag_multiplication(|p| t0(EnergyParameter::UNIT, p), &rule)
        .add_scaled(&nystrom(|p, q| kernel.parity(Sign::Plus, p, q), &rule), 2.0)?;
    let c = apply_exact_vector(&mcguire, |p| 1.0 / (2.0 * p * p + 3.0))?;
    println!(
        "T0 + 2T(2pi/3): rayleigh = {:.12}  (sqrt 2 = {SQRT_2:.12})  residual = {:.1e}",
        c.rayleigh, c.residual
    );

    // T̃^-_{2π/3}: eigenvalue −1
    let tilde = build_tilde(Angle::crossing(2.0 * PI / 3.0)?, &rule)?;
    let values = eigvalsh(&tilde.matrix)?;
    let c = apply_exact_vector(&tilde, tilde_eigenfunction)?;
    println!(
        "tilde(2pi/3):   bottom = {:.12}  gap = {:.4}  residual = {:.1e}  |phi|^2 = {:.9} (exact {:.9})",
        values[0],
        values[1] - values[0],
        c.residual,
        2.0 * c.norm_sq,
        (6.0 - 3f64.sqrt() * PI) / 18.0
    );
    Ok(())
}
