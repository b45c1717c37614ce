//! Gauss–Legendre rules, algebraic maps to the half-line and full line, and
//! symmetrized Nyström assembly.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigensolve::Matrix;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// The interval (−1, 1).
    Reference,
    /// (0, ∞) via `p = L(1+u)/(1−u)`.
    HalfLine,
    /// ℝ via `p = L u/(1−u²)`.
    FullLine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
    scale: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    /// `√w_i`, the factor that converts function samples to the Nyström frame.
    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `n`-node Gauss–Legendre rule mapped to (0, ∞) with scale `l`.
    pub fn half_line(n: usize, l: f64) -> Result<Self> {
        map_halfline(&gauss_legendre(n)?, l)
    }

    /// `n`-node Gauss–Legendre rule mapped to ℝ with scale `l`.
    pub fn full_line(n: usize, l: f64) -> Result<Self> {
        map_fullline(&gauss_legendre(n)?, l)
    }

    /// Same domain and scale, twice the nodes.
    pub fn refined(&self) -> Result<Self> {
        let base = gauss_legendre(2 * self.len())?;
        match self.domain {
            Domain::Reference => Ok(base),
            Domain::HalfLine => map_halfline(&base, self.scale),
            Domain::FullLine => map_fullline(&base, self.scale),
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on (−1, 1).
///
/// Newton iteration on `P_n` from Chebyshev guesses; the upper half is
/// computed and mirrored so the rule is exactly symmetric.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_ORDER).contains(&n) {
        return Err(Error::OrderOutOfRange(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                dp = legendre(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::Reference,
        scale: 1.0,
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn require_reference(rule: &QuadratureRule, l: f64) -> Result<()> {
    if rule.domain != Domain::Reference {
        return Err(Error::Domain("map expects a rule on (-1, 1)".into()));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!(
            "map scale must be positive, got {l}"
        )));
    }
    Ok(())
}

/// `p = L(1+u)/(1−u)`, `w ← w·2L/(1−u)²`.
pub fn map_halfline(rule: &QuadratureRule, l: f64) -> Result<QuadratureRule> {
    require_reference(rule, l)?;
    let (nodes, weights) = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| {
            let d = 1.0 - u;
            (l * (1.0 + u) / d, w * 2.0 * l / (d * d))
        })
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::HalfLine,
        scale: l,
    })
}

/// `p = L u/(1−u²)`, `w ← w·L(1+u²)/(1−u²)²`.
pub fn map_fullline(rule: &QuadratureRule, l: f64) -> Result<QuadratureRule> {
    require_reference(rule, l)?;
    let (nodes, weights) = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| {
            let d = 1.0 - u * u;
            (l * u / d, w * l * (1.0 + u * u) / (d * d))
        })
        .unzip();
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::FullLine,
        scale: l,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    Integral,
    Multiplication,
    Sum,
}

/// A symmetric matrix in the `√(w_i w_j)` Nyström frame together with its grid.
#[derive(Clone, Debug, Serialize)]
pub struct DiscreteOperator {
    pub matrix: Matrix,
    pub rule: QuadratureRule,
    pub kind: OperatorKind,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `self + factor * other` on the same grid.
    pub fn add_scaled(&self, other: &DiscreteOperator, factor: f64) -> Result<DiscreteOperator> {
        if self.rule != other.rule {
            return Err(Error::Domain("operators live on different grids".into()));
        }
        Ok(DiscreteOperator {
            matrix: self.matrix.add_scaled(&other.matrix, factor)?,
            rule: self.rule.clone(),
            kind: OperatorKind::Sum,
        })
    }
}

/// `A_ij = √(w_i w_j) K(p_i, p_j)`.
///
/// Only the upper triangle is evaluated; the lower one is a copy, so the
/// result is exactly symmetric whatever the kernel's rounding.
pub fn nystrom<K>(kernel: K, rule: &QuadratureRule) -> DiscreteOperator
where
    K: Fn(f64, f64) -> f64 + Sync,
{
    let n = rule.len();
    let p = rule.nodes();
    let sw = rule.sqrt_weights();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| sw[i] * sw[j] * kernel(p[i], p[j])).collect())
        .collect();
    let mut matrix = Matrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            matrix.set(i, i + off, v);
            matrix.set(i + off, i, v);
        }
    }
    DiscreteOperator {
        matrix,
        rule: rule.clone(),
        kind: OperatorKind::Integral,
    }
}

/// Diagonal `D_ii = m(p_i)`, no weights.
pub fn diag_multiplication(m: impl Fn(f64) -> f64, rule: &QuadratureRule) -> DiscreteOperator {
    let diag: Vec<f64> = rule.nodes().iter().map(|&p| m(p)).collect();
    DiscreteOperator {
        matrix: Matrix::from_diagonal(&diag),
        rule: rule.clone(),
        kind: OperatorKind::Multiplication,
    }
}
