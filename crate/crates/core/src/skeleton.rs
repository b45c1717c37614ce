//! Discretized skeleton operators and their spectra.
//!
//! On the half-line the scissor splits into four sector operators
//! `T_0 + β K^α`, whose eigenvalues `k > 2^{-1/2}` are the bound states
//! `E = -k²`. The general three-wire skeleton `S(k)` is assembled on the
//! full line; its kernel detects eigenvalues directly.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::eigensolve::{dot, eigh, eigvalsh, Matrix, SpectralResult};
use crate::error::{Error, Result};
use crate::kernels::{
    t0, tilde_weight_unchecked, Angle, CrossingKernel, EnergyParameter, SectorLabel, Sign,
};
use crate::quadrature::{diag_multiplication, nystrom, DiscreteOperator, Domain, QuadratureRule};

/// Top of `spect T_0 = [0, 2^{-1/2}]`.
pub const ESSENTIAL_EDGE: f64 = FRAC_1_SQRT_2;

/// Default distance above the edge an eigenvalue must clear to count.
pub const DEFAULT_MARGIN: f64 = 1e-7;

/// Eigenvalues closer than this are reported as one degenerate level.
pub const CLUSTER_TOL: f64 = 1e-6;

fn require_domain(rule: &QuadratureRule, domain: Domain) -> Result<()> {
    if rule.domain() != domain {
        return Err(Error::Domain(format!(
            "expected a {domain:?} rule, got {:?}",
            rule.domain()
        )));
    }
    Ok(())
}

/// `T_0 + β K^α` on a half-line grid, labelled by its skeleton sector `(α, β)`.
#[derive(Clone, Debug, Serialize)]
pub struct SectorOperator {
    pub theta: Angle,
    pub sector: SectorLabel,
    pub op: DiscreteOperator,
}

impl SectorOperator {
    pub const fn essential_edge(&self) -> f64 {
        ESSENTIAL_EDGE
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.op.rule
    }

    /// Same operator on the rule with twice the nodes.
    pub fn refined(&self) -> Result<SectorOperator> {
        build_sector(
            self.theta,
            self.sector.alpha,
            self.sector.beta,
            &self.rule().refined()?,
        )
    }
}

/// `diag(T_0) + β · Nyström(K^α)` with `K^± = T_θ(p, q) ± T_θ(p, -q)`.
pub fn build_sector(
    theta: Angle,
    alpha: Sign,
    beta: Sign,
    rule: &QuadratureRule,
) -> Result<SectorOperator> {
    require_domain(rule, Domain::HalfLine)?;
    let kernel = CrossingKernel::unit(theta)?;
    let diag = diag_multiplication(|p| t0(EnergyParameter::UNIT, p), rule);
    let k = nystrom(|p, q| kernel.parity(alpha, p, q), rule);
    let op = diag.add_scaled(&k, beta.value())?;
    Ok(SectorOperator {
        theta,
        sector: SectorLabel::new(alpha, beta),
        op,
    })
}

/// Sector operator for the Hamiltonian sector `h`, i.e. skeleton sector `(αβ, β)`.
pub fn build_hamiltonian_sector(
    theta: Angle,
    h: SectorLabel,
    rule: &QuadratureRule,
) -> Result<SectorOperator> {
    let s = h.skeleton();
    build_sector(theta, s.alpha, s.beta, rule)
}

/// Outcome of testing a trial function against a discretized operator.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactVectorCheck {
    pub rayleigh: f64,
    /// `‖Aφ − ρφ‖ / ‖φ‖` in the Nyström frame.
    pub residual: f64,
    /// `∫ φ² dp` over the rule's domain.
    pub norm_sq: f64,
}

/// Rayleigh quotient and relative residual of `φ` sampled as `√w_i φ(p_i)`.
pub fn apply_exact_vector(
    op: &DiscreteOperator,
    phi: impl Fn(f64) -> f64,
) -> Result<ExactVectorCheck> {
    let x: Vec<f64> = op
        .rule
        .nodes()
        .iter()
        .zip(op.rule.sqrt_weights())
        .map(|(&p, sw)| sw * phi(p))
        .collect();
    let norm_sq = dot(&x, &x);
    if norm_sq == 0.0 || !norm_sq.is_finite() {
        return Err(Error::ZeroVector);
    }
    let ax = op.matrix.mul_vec(&x);
    let rayleigh = dot(&x, &ax) / norm_sq;
    let res: f64 = ax
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - rayleigh * b).powi(2))
        .sum();
    Ok(ExactVectorCheck {
        rayleigh,
        residual: (res / norm_sq).sqrt(),
        norm_sq,
    })
}

/// Eigenfunction of `T̃^-_{2π/3}` for the eigenvalue −1,
/// `φ(p) = √(2^{-1/2} − T_0(p)) / (p(2p² + 3))`, for `p > 0`.
///
/// Evaluated as `1/(W(p) p (2p²+3))`, which keeps full precision near the origin.
pub fn tilde_eigenfunction(p: f64) -> f64 {
    1.0 / (tilde_weight_unchecked(p) * p * (2.0 * p * p + 3.0))
}

/// Nyström matrix of `W(p) K^-(p, q) W(q)` with `W = (2^{-1/2} − T_0)^{-1/2}`.
pub fn build_tilde(theta: Angle, rule: &QuadratureRule) -> Result<DiscreteOperator> {
    require_domain(rule, Domain::HalfLine)?;
    let kernel = CrossingKernel::unit(theta)?;
    let w: Vec<f64> = rule
        .nodes()
        .iter()
        .map(|&p| tilde_weight_unchecked(p))
        .collect();
    let mut op = nystrom(|p, q| kernel.parity(Sign::Minus, p, q), rule);
    let n = op.dim();
    for i in 0..n {
        for j in 0..n {
            op.matrix.set(i, j, w[i] * op.matrix.get(i, j) * w[j]);
        }
    }
    Ok(op)
}

/// Convert a unit Nyström-frame vector into function samples `φ(p_i) = v_i / √w_i`.
///
/// The sign is fixed so the largest-magnitude entry is positive.
pub fn deweight(v: &[f64], rule: &QuadratureRule) -> Result<Vec<f64>> {
    if v.len() != rule.len() {
        return Err(Error::Dimension {
            expected: rule.len(),
            found: v.len(),
        });
    }
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sign = pivot.signum();
    Ok(v.iter()
        .zip(rule.sqrt_weights())
        .map(|(x, sw)| sign * x / sw)
        .collect())
}

/// A skeleton eigenvalue above the essential edge, i.e. a bound state `E = −k²`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundLevel {
    pub k: f64,
    /// `|k(n) − k(2n)|`.
    pub refine_err: f64,
    /// Number of levels (this one included) within `CLUSTER_TOL`.
    pub multiplicity: usize,
}

impl BoundLevel {
    pub fn energy(&self) -> f64 {
        -self.k * self.k
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundState {
    pub level: BoundLevel,
    pub nodes: Vec<f64>,
    /// Function samples on `nodes`, normalized to `∫_0^∞ φ² dp = 1`.
    pub phi: Vec<f64>,
}

fn candidates(values: &[f64], threshold: f64) -> Vec<f64> {
    values
        .iter()
        .rev()
        .copied()
        .take_while(|&v| v > threshold)
        .collect()
}

/// Keep eigenvalues above `edge + margin` that survive `n → 2n` within `margin/10`.
fn confirm(op: &SectorOperator, values: &[f64], margin: f64) -> Result<Vec<BoundLevel>> {
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(Error::Config(format!(
            "margin must be positive, got {margin}"
        )));
    }
    let threshold = ESSENTIAL_EDGE + margin;
    let coarse = candidates(values, threshold);
    if coarse.is_empty() {
        return Ok(vec![]);
    }
    let allowed = 0.1 * margin;
    let fine_values = eigvalsh(&op.refined()?.op.matrix)?;
    let fine = candidates(&fine_values, threshold - allowed);
    for (i, &k) in coarse.iter().enumerate() {
        let Some(&kf) = fine.get(i) else {
            return Err(Error::Unstable {
                value: k,
                shift: k - threshold,
                allowed,
            });
        };
        let shift = (k - kf).abs();
        if shift > allowed {
            return Err(Error::Unstable {
                value: k,
                shift,
                allowed,
            });
        }
    }
    if let Some(&extra) = fine.get(coarse.len()) {
        if extra > threshold + allowed {
            return Err(Error::Unstable {
                value: extra,
                shift: extra - threshold,
                allowed,
            });
        }
    }
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(&k, &kf)| BoundLevel {
            k,
            refine_err: (k - kf).abs(),
            multiplicity: coarse
                .iter()
                .filter(|&&o| (o - k).abs() <= CLUSTER_TOL)
                .count(),
        })
        .collect())
}

/// Bound-state levels only, largest `k` first.
pub fn bound_state_levels(op: &SectorOperator, margin: f64) -> Result<Vec<BoundLevel>> {
    let values = eigvalsh(&op.op.matrix)?;
    confirm(op, &values, margin)
}

/// Bound states with de-weighted eigenvectors, largest `k` first.
pub fn bound_states(op: &SectorOperator, margin: f64) -> Result<Vec<BoundState>> {
    let spectrum = eigh(&op.op.matrix)?;
    let levels = confirm(op, &spectrum.eigenvalues, margin)?;
    let n = spectrum.len();
    levels
        .into_iter()
        .enumerate()
        .map(|(i, level)| {
            let phi = deweight(spectrum.eigenvector(n - 1 - i), op.rule())?;
            Ok(BoundState {
                level,
                nodes: op.rule().nodes().to_vec(),
                phi,
            })
        })
        .collect()
}

/// The three pairwise angles of a three-wire star, as unsigned angles in (0, π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WireAngles {
    pub theta12: Angle,
    pub theta13: Angle,
    pub theta23: Angle,
}

impl WireAngles {
    /// Checks that the three angles close: `θ13` must be `θ12 + θ23`,
    /// `|θ12 − θ23|` or `2π − θ12 − θ23`.
    pub fn new(theta12: f64, theta13: f64, theta23: f64) -> Result<Self> {
        let (a, b, c) = (
            Angle::crossing(theta12)?,
            Angle::crossing(theta13)?,
            Angle::crossing(theta23)?,
        );
        let options = [
            theta12 + theta23,
            (theta12 - theta23).abs(),
            2.0 * PI - theta12 - theta23,
        ];
        if !options.iter().any(|o| (o - theta13).abs() <= 1e-9) {
            return Err(Error::Config(format!(
                "inconsistent wire angles θ12={theta12}, θ13={theta13}, θ23={theta23}"
            )));
        }
        Ok(WireAngles {
            theta12: a,
            theta13: b,
            theta23: c,
        })
    }

    /// Three wires at mutual angle 2π/3.
    pub fn equilateral() -> Self {
        let t = 2.0 * PI / 3.0;
        WireAngles::new(t, t, t).expect("consistent")
    }

    /// Two wires at angle `θ` with the third along their bisector; with
    /// `λ = 0` only `θ12` enters.
    pub fn scissor(theta: f64) -> Result<Self> {
        WireAngles::new(theta, 0.5 * theta, 0.5 * theta)
    }
}

/// Block skeleton `S(k)` on a full-line grid.
///
/// Diagonal blocks `−1 + T_0(k)`, `−1 + T_0(k)`, `λ^{-1} + T_0(k)`;
/// off-diagonal blocks `T_{θij}(k)`. With `λ = 0` the third wire is absent.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralSkeleton {
    pub k: EnergyParameter,
    pub angles: WireAngles,
    pub lambda: f64,
    pub blocks: usize,
    pub matrix: Matrix,
    pub rule: QuadratureRule,
}

impl GeneralSkeleton {
    /// `λ < 0` lies outside the range where the essential spectrum of `S(k)` is proven.
    pub fn outside_proof_range(&self) -> bool {
        self.lambda < 0.0
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.matrix)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < -1.0 {
        return Err(Error::Domain(format!("λ must be ≥ −1, got {lambda}")));
    }
    if lambda != 0.0 && lambda.abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "|λ| = {lambda:e} makes 1/λ ill-conditioned"
        )));
    }
    Ok(())
}

pub fn build_general(
    k: EnergyParameter,
    angles: WireAngles,
    lambda: f64,
    rule: &QuadratureRule,
) -> Result<GeneralSkeleton> {
    require_domain(rule, Domain::FullLine)?;
    check_lambda(lambda)?;
    let n = rule.len();
    let blocks = if lambda == 0.0 { 2 } else { 3 };
    let diagonal: Vec<f64> = rule.nodes().iter().map(|&p| t0(k, p)).collect();
    let shifts = [-1.0, -1.0, if lambda == 0.0 { 0.0 } else { 1.0 / lambda }];
    let mut pairs = vec![(0, 1, angles.theta12)];
    if blocks == 3 {
        pairs.push((0, 2, angles.theta13));
        pairs.push((1, 2, angles.theta23));
    }
    let off: Vec<(usize, usize, DiscreteOperator)> = pairs
        .into_par_iter()
        .map(|(a, b, theta)| {
            let kernel = CrossingKernel::new(theta, k)?;
            Ok((a, b, nystrom(|p, q| kernel.eval(p, q), rule)))
        })
        .collect::<Result<_>>()?;

    let mut matrix = Matrix::zeros(blocks * n);
    for b in 0..blocks {
        for i in 0..n {
            matrix.set(b * n + i, b * n + i, shifts[b] + diagonal[i]);
        }
    }
    for (a, b, op) in &off {
        for i in 0..n {
            for j in 0..n {
                let v = op.matrix.get(i, j);
                matrix.set(a * n + i, b * n + j, v);
                matrix.set(b * n + j, a * n + i, v);
            }
        }
    }
    Ok(GeneralSkeleton {
        k,
        angles,
        lambda,
        blocks,
        matrix,
        rule: rule.clone(),
    })
}

/// A root of `k ↦ μ(S(k))`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Crossing {
    pub k: f64,
    pub energy: f64,
    /// `|μ|` at the returned `k`.
    pub mu: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ZeroCrossings {
    pub crossings: Vec<Crossing>,
    /// Grid intervals where branch tracking by eigenvector overlap and the
    /// sign-change count disagree.
    pub unresolved: Vec<(f64, f64)>,
}

/// Sign changes between two spectra counted by following eigenvectors, or
/// `None` when the following is ambiguous.
///
/// Only branches with `|μ| ≤ drift` can change sign, where
/// `drift = ‖S(k_b) − S(k_a)‖₂` bounds every eigenvalue's move (Weyl). Each
/// such branch of `a` spreads its squared overlap over the eigenvectors of
/// `b` within `drift` of its value; it is counted as flipped if at least
/// 90% of that mass lands on the opposite sign, kept if 90% stays, and
/// ambiguous otherwise.
fn tracked_sign_changes(a: &SpectralResult, b: &SpectralResult, drift: f64) -> Option<usize> {
    let mut changes = 0;
    for (i, &va) in a.eigenvalues.iter().enumerate() {
        if va.abs() > drift {
            continue;
        }
        let xa = a.eigenvector(i);
        let (mut same, mut opposite) = (0.0, 0.0);
        for (j, &vb) in b.eigenvalues.iter().enumerate() {
            if (vb - va).abs() > drift {
                continue;
            }
            let w = dot(xa, b.eigenvector(j)).powi(2);
            if (vb > 0.0) == (va > 0.0) {
                same += w;
            } else {
                opposite += w;
            }
        }
        let total = same + opposite;
        if total < 0.5 {
            return None;
        }
        if opposite >= 0.9 * total {
            changes += 1;
        } else if same < 0.9 * total {
            return None;
        }
    }
    Some(changes)
}

/// Roots of the eigenvalues of `S(k)` on `k_range`, located on a grid of
/// `k_steps` points and refined by bisection to `|μ| < 1e-8`.
pub fn zero_crossings(
    angles: WireAngles,
    lambda: f64,
    rule: &QuadratureRule,
    k_range: (f64, f64),
    k_steps: usize,
) -> Result<ZeroCrossings> {
    let (lo, hi) = k_range;
    if !(lo > ESSENTIAL_EDGE && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!(
            "k range ({lo}, {hi}) must lie in (2^-1/2, ∞)"
        )));
    }
    if k_steps < 2 {
        return Err(Error::Config("need at least two k grid points".into()));
    }
    check_lambda(lambda)?;
    let ks: Vec<f64> = (0..k_steps)
        .map(|i| lo + (hi - lo) * i as f64 / (k_steps - 1) as f64)
        .collect();
    let build = |k: f64| build_general(EnergyParameter::new(k)?, angles, lambda, rule);
    let mu = |k: f64, j: usize| -> Result<f64> { Ok(eigvalsh(&build(k)?.matrix)?[j]) };

    let mut out = ZeroCrossings::default();
    let mut prev_s = build(ks[0])?;
    let mut prev = eigh(&prev_s.matrix)?;
    for w in 1..k_steps {
        let (ka, kb) = (ks[w - 1], ks[w]);
        let s = build(kb)?;
        let spec = eigh(&s.matrix)?;
        let d = eigvalsh(&s.matrix.add_scaled(&prev_s.matrix, -1.0)?)?;
        let drift = d[0].abs().max(d[d.len() - 1].abs());
        let (a, b) = (&prev.eigenvalues, &spec.eigenvalues);
        let flipped: Vec<usize> = (0..a.len())
            .filter(|&j| (a[j] > 0.0) != (b[j] > 0.0) || a[j] == 0.0)
            .collect();
        if tracked_sign_changes(&prev, &spec, drift) != Some(flipped.len()) {
            out.unresolved.push((ka, kb));
        }
        for j in flipped {
            let (k, m) = bisect(|k| mu(k, j), ka, kb, a[j])?;
            out.crossings.push(Crossing {
                k,
                energy: -k * k,
                mu: m.abs(),
                multiplicity: 1,
            });
        }
        prev_s = s;
        prev = spec;
    }
    out.crossings.sort_by(|x, y| x.k.total_cmp(&y.k));
    let ks: Vec<f64> = out.crossings.iter().map(|c| c.k).collect();
    for c in &mut out.crossings {
        c.multiplicity = ks
            .iter()
            .filter(|&&o| (o - c.k).abs() <= CLUSTER_TOL)
            .count();
    }
    Ok(out)
}

/// Illinois-modified regula falsi on a bracketed sign change.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, fa0: f64) -> Result<(f64, f64)> {
    let mut fa = if fa0 == 0.0 { return Ok((a, 0.0)) } else { fa0 };
    let mut fb = f(b)?;
    if fb == 0.0 {
        return Ok((b, 0.0));
    }
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) {
            c
        } else {
            0.5 * (a + b)
        };
        let fc = f(c)?;
        if fc.abs() < 1e-8 && (b - a).abs() < 1e-6 || fc == 0.0 || (b - a).abs() < 1e-14 {
            return Ok((c, fc));
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Numerical(format!("no converged root in [{a}, {b}]")))
}
