//! Closed-form traces and norms against their Nyström counterparts.

use std::f64::consts::PI;

use skeleton_spectra::eigensolve::{eigvalsh, frobenius, trace};
use skeleton_spectra::kernels::{
    t_parity, t_theta, tilde_kernel_minus, Angle, EnergyParameter, Sign,
};
use skeleton_spectra::quadrature::{nystrom, QuadratureRule};
use skeleton_spectra::rankone::{tilde_trace_bound, trace_formulas};

fn main() -> skeleton_spectra::Result<()> {
    let half = QuadratureRule::half_line(400, 1.0)?;
    let full = QuadratureRule::full_line(400, 1.0)?;
    println!("theta/pi   tr T (exact, num)        tr T+ (exact, num)       |T|_HS (exact, num)      |T~-|_1 (bound, num)");
    for frac in [1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 0.9] {
        let theta = Angle::crossing(frac * PI)?;
        let f = trace_formulas(theta)?;
        let plus = trace(&nystrom(|p, q| t_parity(theta, Sign::Plus, p, q).unwrap(), &half).matrix);
        let minus =
            trace(&nystrom(|p, q| t_parity(theta, Sign::Minus, p, q).unwrap(), &half).matrix);
        let hs = frobenius(
            &nystrom(
                |p, q| t_theta(theta, EnergyParameter::UNIT, p, q).unwrap(),
                &full,
            )
            .matrix,
        );
        let tilde = nystrom(|p, q| tilde_kernel_minus(theta, p, q).unwrap(), &half);
        let norm1: f64 = eigvalsh(&tilde.matrix)?.iter().map(|v| v.abs()).sum();
        println!(
            "{frac:8.4}   {:.8} {:.8}   {:.8} {:.8}   {:.8} {:.8}   {:.6} {:.6}",
            f.tr_total,
            plus + minus,
            f.tr_plus,
            plus,
            1.0 / (2.0 * PI * theta.sin()).sqrt(),
            hs,
            tilde_trace_bound(theta)?,
            norm1
        );
    }
    Ok(())
}
