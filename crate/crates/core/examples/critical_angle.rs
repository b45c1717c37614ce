//! Angle at which `inf T̃_θ^-` reaches −1, at two resolutions.

use std::f64::consts::PI;

use skeleton_spectra::quadrature::QuadratureRule;
use skeleton_spectra::scissor::{
    critical_angle, default_critical_bracket, fh_derivative, fh_finite_difference,
};

fn main() -> skeleton_spectra::Result<()> {
    for n in [200, 400, 800] {
        let rule = QuadratureRule::half_line(n, 1.0)?;
        let c = critical_angle(&rule, default_critical_bracket())?;
        println!(
            "n = {n:4}: theta_c = {:.12}  |theta_c - 2pi/3| = {:.2e}  ({} evaluations)",
            c.theta_c,
            (c.theta_c - 2.0 * PI / 3.0).abs(),
            c.samples.len()
        );
    }
    // slope of the crossing eigenvalue there
    let rule = QuadratureRule::half_line(400, 1.0)?;
    let fh = fh_derivative(&rule)?;
    println!(
        "d/dtheta inf T~ at 2pi/3: {:.9} (finite difference {:.9})",
        fh.value,
        fh_finite_difference(&rule, 1e-4)?
    );
    Ok(())
}
