//! Closed-form kernels of the crossing-wire operators in the Fourier frame.
//!
//! `T_θ(k)` couples two wires crossing at angle θ, `T_0(k)` is the diagonal
//! (same-wire) multiplier. Everything downstream is built from these.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernels reject angles with `|sin θ|` below this.
pub const MIN_SIN: f64 = 1e-8;

/// Crossing angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("angle must be finite, got {theta}")));
        }
        Ok(Angle(theta))
    }

    /// Angle for kernel evaluation: `0 < θ < π` with `|sin θ| >= 1e-8`.
    pub fn crossing(theta: f64) -> Result<Self> {
        let a = Angle::new(theta)?;
        a.check_crossing()?;
        Ok(a)
    }

    /// Angle inside the scissor domain `[π/2, π)`.
    pub fn scissor(theta: f64) -> Result<Self> {
        let a = Angle::crossing(theta)?;
        if theta < 0.5 * PI - 1e-12 {
            return Err(Error::Domain(format!("scissor angle {theta} below π/2")));
        }
        Ok(a)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    /// `π - θ`.
    pub fn reflected(self) -> Self {
        Angle(PI - self.0)
    }

    pub(crate) fn check_crossing(self) -> Result<()> {
        if !(self.0 > 0.0 && self.0 < PI) || self.0.sin().abs() < MIN_SIN {
            return Err(Error::SingularAngle { theta: self.0 });
        }
        Ok(())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.7}", self.0)
    }
}

/// A ±1 label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Domain(format!("sign label must be ±1, got {v}"))),
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Symmetry sector `(α, β)`.
///
/// For the planar Hamiltonian, `α` is the parity under `y -> -y` (reflection
/// across the scissor axis) and `β` the parity under `x -> -x`. For the
/// skeleton, `α` is the parity under `p -> -p` and `β` the exchange parity of
/// the two wire components. Use [`SectorLabel::skeleton`] to go from the
/// first to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorLabel {
    pub alpha: Sign,
    pub beta: Sign,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 4] = [
        SectorLabel::new(Sign::Plus, Sign::Plus),
        SectorLabel::new(Sign::Plus, Sign::Minus),
        SectorLabel::new(Sign::Minus, Sign::Plus),
        SectorLabel::new(Sign::Minus, Sign::Minus),
    ];

    pub const fn new(alpha: Sign, beta: Sign) -> Self {
        SectorLabel { alpha, beta }
    }

    /// Hamiltonian sector `(α, β)` -> skeleton sector `(αβ, β)`.
    ///
    /// The map is an involution, so it also takes skeleton labels back.
    pub fn skeleton(self) -> SectorLabel {
        SectorLabel::new(self.alpha * self.beta, self.beta)
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.alpha, self.beta)
    }
}

/// Spectral parameter `k > 0`, energy `E = -k²`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyParameter(f64);

impl EnergyParameter {
    /// `k = 1`, the scaled frame all sector work happens in.
    pub const UNIT: EnergyParameter = EnergyParameter(1.0);

    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("k must be positive, got {k}")));
        }
        Ok(EnergyParameter(k))
    }

    pub fn k(self) -> f64 {
        self.0
    }

    pub fn energy(self) -> f64 {
        -self.0 * self.0
    }

    /// `E = -k² < -1/2`, i.e. below the essential spectrum.
    pub fn is_below_threshold(self) -> bool {
        self.0 > FRAC_1_SQRT_2
    }
}

/// `T_θ(k)` with the trigonometry hoisted out of the kernel loop.
///
/// `T_θ(p, q; k) = (sin θ / π) / (p² + q² - 2pq cos θ + 2 k² sin² θ)`, the
/// same function as `(1/(2π sin θ)) / ((p² - 2cos θ pq + q²)/(2 sin² θ) + k²)`.
#[derive(Clone, Copy, Debug)]
pub struct CrossingKernel {
    sin: f64,
    cos: f64,
    gap: f64,
    k2: f64,
}

impl CrossingKernel {
    pub fn new(theta: Angle, k: EnergyParameter) -> Result<Self> {
        theta.check_crossing()?;
        let (sin, cos) = (theta.sin(), theta.cos());
        let k2 = k.k() * k.k();
        Ok(CrossingKernel {
            sin,
            cos,
            gap: 2.0 * k2 * sin * sin,
            k2,
        })
    }

    /// The scaled kernel `T_θ = T_θ(1)`.
    pub fn unit(theta: Angle) -> Result<Self> {
        Self::new(theta, EnergyParameter::UNIT)
    }

    #[inline]
    pub fn eval(&self, p: f64, q: f64) -> f64 {
        (self.sin / PI) / (p * p + q * q - 2.0 * self.cos * (p * q) + self.gap)
    }

    /// Half-line kernel of the parity part: `T(p, q) ± T(p, -q)`.
    ///
    /// With `D∓ = A ∓ 2cos θ pq`, `A = p² + q² + 2k² sin² θ`, the sum and
    /// difference are `2A/(D₋D₊)` and `4cos θ pq/(D₋D₊)` times `sin θ/π`;
    /// the difference form avoids cancellation near the origin.
    #[inline]
    pub fn parity(&self, sign: Sign, p: f64, q: f64) -> f64 {
        let pq = p * q;
        let a = p * p + q * q + self.gap;
        let prod = (a - 2.0 * self.cos * pq) * (a + 2.0 * self.cos * pq);
        let num = match sign {
            Sign::Plus => 2.0 * a,
            Sign::Minus => 4.0 * self.cos * pq,
        };
        (self.sin / PI) * num / prod
    }

    /// `∂_θ T_θ(p, q; k)`.
    #[inline]
    pub fn dtheta(&self, p: f64, q: f64) -> f64 {
        let d = p * p + q * q - 2.0 * self.cos * (p * q) + self.gap;
        let dd = 2.0 * p * q * self.sin + 4.0 * self.k2 * self.sin * self.cos;
        self.cos / (PI * d) - self.sin * dd / (PI * d * d)
    }

    /// `∂_θ [T(p, q) - T(p, -q)]`, differentiated from the product form of
    /// [`parity`](Self::parity) so the factor `pq` stays explicit.
    #[inline]
    pub fn dtheta_minus(&self, p: f64, q: f64) -> f64 {
        let pq = p * q;
        let a = p * p + q * q + self.gap;
        let prod = (a - 2.0 * self.cos * pq) * (a + 2.0 * self.cos * pq);
        let sc = self.sin * self.cos;
        let dprod = 8.0 * sc * (a * self.k2 + pq * pq);
        let dnum = self.cos * self.cos - self.sin * self.sin;
        (4.0 * pq / PI) * (dnum / prod - sc * dprod / (prod * prod))
    }
}

/// `T_θ(p, q; k)` for `0 < θ < π`.
pub fn t_theta(theta: Angle, k: EnergyParameter, p: f64, q: f64) -> Result<f64> {
    Ok(CrossingKernel::new(theta, k)?.eval(p, q))
}

/// The same-wire multiplier `T_0(p; k) = 1/√(p² + 2k²)`.
#[inline]
pub fn t0(k: EnergyParameter, p: f64) -> f64 {
    1.0 / (p * p + 2.0 * k.k() * k.k()).sqrt()
}

/// `T_θ` after the unitary scaling `p -> p sin θ`; defined for every θ.
#[inline]
pub fn t_sharp(theta: Angle, p: f64, q: f64) -> f64 {
    (1.0 / PI) / (p * p + q * q - 2.0 * p * q * theta.cos() + 2.0)
}

/// Half-line kernel `K^±(p, q) = T_θ(p, q) ± T_θ(p, -q)` at `k = 1`.
///
/// Even (odd) functions on the line map isometrically onto the half-line by
/// `f -> √2 f|_{p>0}`, and `T_θ^±` becomes the integral operator with this kernel.
pub fn t_parity(theta: Angle, sign: Sign, p: f64, q: f64) -> Result<f64> {
    Ok(CrossingKernel::unit(theta)?.parity(sign, p, q))
}

/// `(2^{-1/2} - T_0(p))^{-1/2}` at `k = 1`, for `p > 0`.
pub fn tilde_weight(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("tilde weight needs p > 0, got {p}")));
    }
    Ok(tilde_weight_unchecked(p))
}

#[inline]
pub(crate) fn tilde_weight_unchecked(p: f64) -> f64 {
    // 2^{-1/2} - (p²+2)^{-1/2} = p² / (√2 √(p²+2) (√(p²+2) + √2)), no cancellation at small p
    let r = (p * p + 2.0).sqrt();
    let gap = p * p / (std::f64::consts::SQRT_2 * r * (r + std::f64::consts::SQRT_2));
    1.0 / gap.sqrt()
}

/// `W(p) K^-(p, q) W(q)` with `W` the tilde weight; the kernel of `T̃_θ^-`.
pub fn tilde_kernel_minus(theta: Angle, p: f64, q: f64) -> Result<f64> {
    let kernel = CrossingKernel::unit(theta)?;
    Ok(tilde_weight(p)? * kernel.parity(Sign::Minus, p, q) * tilde_weight(q)?)
}

/// `∂_θ K^-(p, q)` at `k = 1`.
pub fn dtheta_kernel_minus(theta: Angle, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Domain(format!(
            "half-line kernel needs p, q > 0, got ({p}, {q})"
        )));
    }
    Ok(CrossingKernel::unit(theta)?.dtheta_minus(p, q))
}
