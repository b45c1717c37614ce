//! Special functions: `ln Γ` for the rank-one coefficients and `K₀` for the
//! planar Green's function `(1/π) K₀(√2 k r)`.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        // ln Γ(x) = ln Γ(x + 1) - ln x keeps the argument in the Lanczos range.
        return Ok(lanczos(x + 1.0) - x.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `Γ(a) / Γ(b)` evaluated in log space.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

/// Modified Bessel function of the second kind, order zero.
///
/// Three regimes: the ascending series for `x <= 2`, the trapezoid rule on
/// `K₀(x) = ∫₀^∞ exp(-x cosh t) dt` for `2 < x < 25` (the integrand is
/// analytic in a strip so the rule converges geometrically in the step), and
/// the asymptotic expansion beyond.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain(format!("bessel_k0 needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x <= 2.0 {
        k0_series(x)
    } else if x < 25.0 {
        k0_trapezoid(x)
    } else {
        k0_asymptotic(x)
    })
}

fn k0_series(x: f64) -> f64 {
    // K0 = -(ln(x/2) + γ) I0(x) + Σ_{k≥1} (x²/4)^k / (k!)² H_k
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

fn k0_trapezoid(x: f64) -> f64 {
    const STEP: f64 = 0.1;
    let mut sum = 0.5;
    for j in 1..2000 {
        let half = 0.5 * j as f64 * STEP;
        // cosh t - 1 = 2 sinh²(t/2), free of cancellation near t = 0
        let s = half.sinh();
        let term = (-2.0 * x * s * s).exp();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    (-x).exp() * STEP * sum
}

fn k0_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = -term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}
