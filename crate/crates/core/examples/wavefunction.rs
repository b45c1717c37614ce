//! Planar wavefunction of the first (+,−) state at θ = 0.75π.
//!
//! Writes `x,y,psi` to `wavefunction.csv` and reports the reflection
//! symmetries of the sampled field.

use std::f64::consts::PI;

use skeleton_spectra::kernels::{Angle, SectorLabel, Sign};
use skeleton_spectra::quadrature::QuadratureRule;
use skeleton_spectra::scissor::{reconstruct_state, GridSpec};
use skeleton_spectra::skeleton::{bound_states, build_hamiltonian_sector, DEFAULT_MARGIN};

fn main() -> skeleton_spectra::Result<()> {
    let theta = Angle::crossing(0.75 * PI)?;
    let sector = SectorLabel::new(Sign::Plus, Sign::Minus);
    let rule = QuadratureRule::half_line(400, 1.0)?;
    let op = build_hamiltonian_sector(theta, sector, &rule)?;
    let state = bound_states(&op, DEFAULT_MARGIN)?.remove(0);
    println!("k = {:.9}, E = {:.9}", state.level.k, state.level.energy());

    let grid = reconstruct_state(theta, sector, &state, &rule, &GridSpec::square(4.0, 61))?;
    println!("x -> -x defect: {:?}", grid.x_parity_defect());
    println!("y -> -y defect: {:?}", grid.y_parity_defect());
    let mid = grid.xs.len() / 2;
    let on_axis = (0..grid.ys.len())
        .map(|iy| grid.at(mid, iy).abs())
        .fold(0.0, f64::max);
    println!("max |psi| on x = 0: {on_axis:.2e}");
    std::fs::write("wavefunction.csv", grid.to_csv())?;
    Ok(())
}
