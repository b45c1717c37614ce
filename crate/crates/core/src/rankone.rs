//! Rank-one decomposition of `T_θ` into Gaussian-monomial projectors, and the
//! closed-form traces and trace norms that follow from it.
//!
//! ```text
//! T_θ = Σ_n ∫ ds c_n(s) |g_{n,s}⟩⟨g_{n,s}|,
//! g_{n,s}(p) = √((2s)^{n+1/2} / Γ(n+1/2)) pⁿ e^{-p² s},
//! c_n(s) = 2^{-1/2} (sin θ/π) Γ(n+1/2)/Γ(n+1) cosⁿθ s^{-1/2} e^{-2 sin²θ s}.
//! ```

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::eigensolve::Matrix;
use crate::error::{Error, Result};
use crate::kernels::Angle;
use crate::quadrature::{DiscreteOperator, Domain, OperatorKind, QuadratureRule};
use crate::specfun::{gamma_ratio, log_gamma};

/// Normalized Gaussian monomial `g_{n,s}(p)`.
///
/// Evaluated in log space so large `n` neither overflows nor loses the
/// prefactor; underflows to zero far out.
pub fn g_vec(n: usize, s: f64, p: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("g_vec needs s > 0, got {s}")));
    }
    let nf = n as f64;
    let log_norm = 0.5 * ((nf + 0.5) * (2.0 * s).ln() - log_gamma(nf + 0.5)?);
    if p == 0.0 {
        return Ok(if n == 0 { log_norm.exp() } else { 0.0 });
    }
    let magnitude = (log_norm + nf * p.abs().ln() - p * p * s).exp();
    Ok(if p < 0.0 && n % 2 == 1 {
        -magnitude
    } else {
        magnitude
    })
}

/// One projector `c_n(s) |g_{n,s}⟩⟨g_{n,s}|` of the decomposition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RankOneTerm {
    pub n: usize,
    pub s: f64,
    pub coefficient: f64,
}

impl RankOneTerm {
    pub fn new(theta: Angle, n: usize, s: f64) -> Result<Self> {
        theta.check_crossing()?;
        if !(s > 0.0) {
            return Err(Error::Domain(format!("s must be positive, got {s}")));
        }
        let sin = theta.sin();
        let coefficient = FRAC_1_SQRT_2 * (sin / PI) * level_weight(theta, n)? / s.sqrt()
            * (-2.0 * sin * sin * s).exp();
        Ok(RankOneTerm { n, s, coefficient })
    }

    pub fn g(&self, p: f64) -> Result<f64> {
        g_vec(self.n, self.s, p)
    }
}

/// `Γ(n+1/2)/Γ(n+1) cosⁿθ`.
fn level_weight(theta: Angle, n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(gamma_ratio(nf + 0.5, nf + 1.0)? * theta.cos().powi(n as i32))
}

/// Truncation of the decomposition to `n < levels`, with the discarded trace-norm mass.
#[derive(Clone, Debug, Serialize)]
pub struct TruncatedDecomposition {
    pub operator: DiscreteOperator,
    /// Upper bound on `‖T_θ − truncation‖₁` from the dropped levels.
    pub tail_bound: f64,
    pub levels: usize,
}

/// Bound on `Σ_{n≥N} |c_n|` integrated over `s`, i.e. the trace norm of the
/// dropped levels: `Γ(N+½)/(2√π Γ(N+1)) |cos θ|^N / (1 − |cos θ|)`.
pub fn tail_bound(theta: Angle, levels: usize) -> Result<f64> {
    theta.check_crossing()?;
    let c = theta.cos().abs();
    if levels > 0 && c == 0.0 {
        return Ok(0.0);
    }
    let nf = levels as f64;
    Ok(gamma_ratio(nf + 0.5, nf + 1.0)? / (2.0 * PI.sqrt()) * c.powi(levels as i32) / (1.0 - c))
}

/// `Σ_{n<levels} ∫ ds c_n(s) |g_{n,s}⟩⟨g_{n,s}|` sampled on `p_rule` in the
/// Nyström frame. The `s` integral uses `s = u²` on the half-line rule
/// `s_rule`, which turns `s^{-1/2} ds` into `2 du`.
pub fn truncated_decomposition(
    theta: Angle,
    levels: usize,
    s_rule: &QuadratureRule,
    p_rule: &QuadratureRule,
) -> Result<TruncatedDecomposition> {
    theta.check_crossing()?;
    if levels == 0 {
        return Err(Error::Domain("need at least one level".into()));
    }
    if s_rule.domain() != Domain::HalfLine {
        return Err(Error::Domain("s-integration needs a half-line rule".into()));
    }
    let sin2 = theta.sin().powi(2);
    let prefactor = FRAC_1_SQRT_2 * theta.sin() / PI;
    let sw = p_rule.sqrt_weights();
    let np = p_rule.len();

    // one row of `h` per (n, u) term, already carrying √w_i
    let mut coefficients = Vec::with_capacity(levels * s_rule.len());
    let mut h = Vec::with_capacity(levels * s_rule.len() * np);
    for n in 0..levels {
        let weight = level_weight(theta, n)?;
        if weight == 0.0 {
            continue;
        }
        for (&u, &wu) in s_rule.nodes().iter().zip(s_rule.weights()) {
            let s = u * u;
            let c = prefactor * weight * 2.0 * wu * (-2.0 * sin2 * s).exp();
            if c == 0.0 {
                continue;
            }
            coefficients.push(c);
            for (&p, &w) in p_rule.nodes().iter().zip(&sw) {
                h.push(w * g_vec(n, s, p)?);
            }
        }
    }

    let rows: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; np - i];
            for (t, &c) in coefficients.iter().enumerate() {
                let ht = &h[t * np..(t + 1) * np];
                let a = c * ht[i];
                if a == 0.0 {
                    continue;
                }
                for (r, &x) in row.iter_mut().zip(&ht[i..]) {
                    *r += a * x;
                }
            }
            row
        })
        .collect();
    let mut matrix = Matrix::zeros(np);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            matrix.set(i, i + off, v);
            matrix.set(i + off, i, v);
        }
    }
    Ok(TruncatedDecomposition {
        operator: DiscreteOperator {
            matrix,
            rule: p_rule.clone(),
            kind: OperatorKind::Sum,
        },
        tail_bound: tail_bound(theta, levels)?,
        levels,
    })
}

/// `Σ_{n<levels} Γ(n+½)/Γ(n+1) |cos θ|ⁿ · 2^{-1/2}(sin θ/π) ∫ s^{-1/2} e^{-2 sin²θ s} ds`,
/// with the `s` integral done on `s_rule` after `s = u²`.
pub fn coefficient_mass(theta: Angle, levels: usize, s_rule: &QuadratureRule) -> Result<f64> {
    theta.check_crossing()?;
    let sin = theta.sin();
    let c = theta.cos().abs();
    let s_integral = s_rule.integrate(|u| 2.0 * (-2.0 * sin * sin * u * u).exp());
    let mut series = 0.0;
    for n in 0..levels {
        let nf = n as f64;
        series += gamma_ratio(nf + 0.5, nf + 1.0)? * c.powi(n as i32);
    }
    Ok(series * FRAC_1_SQRT_2 * sin / PI * s_integral)
}

/// Closed form of the full coefficient mass, `1/(2√(1 − |cos θ|))`.
pub fn coefficient_mass_exact(theta: Angle) -> Result<f64> {
    theta.check_crossing()?;
    Ok(0.5 / (1.0 - theta.cos().abs()).sqrt())
}

/// Traces and trace norms of `T_θ` and its parity parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceFormulas {
    pub tr_plus: f64,
    pub tr_minus: f64,
    pub norm1_minus: f64,
    pub tr_total: f64,
    pub norm1_total: f64,
}

pub fn trace_formulas(theta: Angle) -> Result<TraceFormulas> {
    theta.check_crossing()?;
    let t = theta.radians();
    let (c, s) = ((0.5 * t).cos(), (0.5 * t).sin());
    let denom = 2.0 * SQRT_2 * theta.sin();
    Ok(TraceFormulas {
        tr_plus: (c + s) / denom,
        tr_minus: (c - s) / denom,
        norm1_minus: (c - s).abs() / denom,
        tr_total: 1.0 / (2.0 * SQRT_2 * s),
        norm1_total: c.max(s) / (SQRT_2 * theta.sin()),
    })
}

/// Upper bound on `‖T̃_θ^-‖₁`.
///
/// `(4 sin θ atanh(cos θ) + π(9cos(θ/2) − cos(5θ/2) − 9sin(θ/2) + sin(5θ/2))) / (4π sin²θ)`
/// for `θ ≤ π/2`, extended by `θ → π − θ`.
pub fn tilde_trace_bound(theta: Angle) -> Result<f64> {
    theta.check_crossing()?;
    let t = if theta.radians() > PI / 2.0 {
        PI - theta.radians()
    } else {
        theta.radians()
    };
    let (sin, cos) = t.sin_cos();
    let h = 0.5 * t;
    let trig = 9.0 * h.cos() - (5.0 * h).cos() - 9.0 * h.sin() + (5.0 * h).sin();
    Ok((4.0 * sin * cos.atanh() + PI * trig) / (4.0 * PI * sin * sin))
}
