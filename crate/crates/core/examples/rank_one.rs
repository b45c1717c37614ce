//! Truncated rank-one expansion of `T_θ` and its coefficient mass.
//!
//! Prints the Frobenius distance to the Nyström kernel and the tail bound
//! as the number of levels grows.

use std::f64::consts::PI;

use skeleton_spectra::eigensolve::frobenius;
use skeleton_spectra::kernels::{t_theta, Angle, EnergyParameter};
use skeleton_spectra::quadrature::{nystrom, QuadratureRule};
use skeleton_spectra::rankone::{
    coefficient_mass, coefficient_mass_exact, truncated_decomposition,
};

fn main() -> skeleton_spectra::Result<()> {
    let theta = Angle::crossing(2.0 * PI / 3.0)?;
    let s_rule = QuadratureRule::half_line(200, 1.0)?;
    let p_rule = QuadratureRule::full_line(200, 1.0)?;
    let kernel = nystrom(
        |p, q| t_theta(theta, EnergyParameter::UNIT, p, q).unwrap(),
        &p_rule,
    );

    println!("levels  frobenius_error  tail_bound");
    for levels in [5, 10, 20, 40, 60] {
        let dec = truncated_decomposition(theta, levels, &s_rule, &p_rule)?;
        let err = frobenius(&dec.operator.matrix.add_scaled(&kernel.matrix, -1.0)?);
        println!("{levels:6}  {err:15.3e}  {:10.3e}", dec.tail_bound);
    }
    println!(
        "coefficient mass: {:.12} (closed form {:.12})",
        coefficient_mass(theta, 4000, &s_rule)?,
        coefficient_mass_exact(theta)?
    );
    Ok(())
}
