//! The two-wire scissor: bound-state sweeps over the crossing angle, the
//! critical angle where the `(+,−)` sector acquires its first state, the
//! Feynman–Hellmann slope there, and reconstruction of `Ψ(x, y)`.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::eigensolve::eigvalsh;
use crate::error::{Error, Result};
use crate::kernels::{t0, tilde_weight, Angle, CrossingKernel, EnergyParameter, SectorLabel, Sign};
use crate::quadrature::{gauss_legendre, Domain, QuadratureRule};
use crate::skeleton::{
    bound_state_levels, build_hamiltonian_sector, build_tilde, BoundState, ESSENTIAL_EDGE,
};
use crate::specfun::bessel_k0;

/// `−π / (2(6 − √3π))`, the slope of `inf T̃_θ^-` at `θ = 2π/3`.
pub const FH_REFERENCE: f64 = -2.812_013_9;

pub fn fh_reference() -> f64 {
    -PI / (2.0 * (6.0 - 3f64.sqrt() * PI))
}

/// `steps` equispaced angles on `[a, b]`.
pub fn theta_grid(a: f64, b: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(a > 0.0 && b < PI && a <= b) {
        return Err(Error::Config(format!("invalid θ range {a}:{b}:{steps}")));
    }
    if steps == 1 {
        return Ok(vec![a]);
    }
    Ok((0..steps)
        .map(|i| a + (b - a) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// 64 points on `[π/2, 0.97π]`.
pub fn default_theta_grid() -> Vec<f64> {
    theta_grid(FRAC_PI_2, 0.97 * PI, 64).expect("valid default range")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundStateRow {
    pub theta: f64,
    /// Hamiltonian sector `(α, β)`: parities under `y → −y` and `x → −x`.
    pub sector: SectorLabel,
    /// Skeleton sector `(αβ, β)`, i.e. the operator `T_0 + β T^{αβ}`.
    pub skeleton_sector: SectorLabel,
    /// 0 is the ground state of the sector.
    pub index: usize,
    pub k: f64,
    pub energy: f64,
    pub refine_err: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundStateTable {
    pub rows: Vec<BoundStateRow>,
}

pub const SWEEP_HEADER: &str = "theta_rad,alpha,beta,index,k,energy,refine_err";

impl BoundStateTable {
    pub fn count(&self, theta: f64, sector: SectorLabel) -> usize {
        self.rows
            .iter()
            .filter(|r| r.theta == theta && r.sector == sector)
            .count()
    }

    pub fn in_sector(&self, sector: SectorLabel) -> impl Iterator<Item = &BoundStateRow> {
        self.rows.iter().filter(move |r| r.sector == sector)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:.7},{},{},{},{:.6},{:.6},{:.3e}\n",
                r.theta, r.sector.alpha, r.sector.beta, r.index, r.k, r.energy, r.refine_err
            ));
        }
        out
    }

    /// JSON array mirroring the CSV columns.
    pub fn to_json(&self) -> serde_json::Value {
        self.rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "theta_rad": r.theta,
                    "alpha": r.sector.alpha.value() as i32,
                    "beta": r.sector.beta.value() as i32,
                    "index": r.index,
                    "k": r.k,
                    "energy": r.energy,
                    "refine_err": r.refine_err,
                })
            })
            .collect()
    }
}

/// Bound states of every requested Hamiltonian sector at every angle.
///
/// Angles are processed in parallel; rows come out ordered by angle, then
/// sector in the order given, then decreasing `k`.
pub fn sweep(
    thetas: &[f64],
    sectors: &[SectorLabel],
    rule: &QuadratureRule,
    margin: f64,
) -> Result<BoundStateTable> {
    let per_theta: Vec<Vec<BoundStateRow>> = thetas
        .par_iter()
        .map(|&theta| {
            let angle = Angle::crossing(theta)?;
            let mut rows = Vec::new();
            for &sector in sectors {
                let op = build_hamiltonian_sector(angle, sector, rule)?;
                for (index, level) in bound_state_levels(&op, margin)?.into_iter().enumerate() {
                    rows.push(BoundStateRow {
                        theta,
                        sector,
                        skeleton_sector: sector.skeleton(),
                        index,
                        k: level.k,
                        energy: level.energy(),
                        refine_err: level.refine_err,
                        multiplicity: level.multiplicity,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(BoundStateTable {
        rows: per_theta.into_iter().flatten().collect(),
    })
}

/// `inf T̃_θ^-` on the given rule.
pub fn tilde_bottom(theta: f64, rule: &QuadratureRule) -> Result<f64> {
    let t = build_tilde(Angle::crossing(theta)?, rule)?;
    Ok(eigvalsh(&t.matrix)?[0])
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalAngle {
    pub theta_c: f64,
    /// `(θ, inf T̃_θ^- + 1)` at every evaluation, sorted by θ.
    pub samples: Vec<(f64, f64)>,
}

/// Angle where `inf T̃_θ^-` crosses `−1`, by safeguarded regula falsi.
///
/// The tracked eigenvalue must be nonincreasing in θ over all sampled
/// points; a violation is reported as a numerical failure.
pub fn critical_angle(rule: &QuadratureRule, bracket: (f64, f64)) -> Result<CriticalAngle> {
    let (mut a, mut b) = bracket;
    if !(a > 0.0 && b < PI && a < b) {
        return Err(Error::Config(format!("invalid bracket ({a}, {b})")));
    }
    let f = |t: f64| tilde_bottom(t, rule).map(|v| v + 1.0);
    let mut samples = Vec::new();
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    samples.push((a, fa));
    samples.push((b, fb));
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::Bracket {
            what: "inf T̃ + 1",
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    let mut side = 0;
    let mut c = 0.5 * (a + b);
    for _ in 0..200 {
        c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        samples.push((c, fc));
        if fc == 0.0 || (b - a) < 1e-9 || fc.abs() < 1e-13 {
            break;
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    samples.dedup_by(|x, y| x.0 == y.0);
    if let Some(w) = samples.windows(2).find(|w| w[1].1 > w[0].1 + 1e-12) {
        return Err(Error::Numerical(format!(
            "inf T̃ increased from {} at θ={} to {} at θ={}",
            w[0].1, w[0].0, w[1].1, w[1].0
        )));
    }
    Ok(CriticalAngle {
        theta_c: c,
        samples,
    })
}

pub fn default_critical_bracket() -> (f64, f64) {
    (FRAC_PI_2, 0.97 * PI)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FeynmanHellmann {
    /// `⟨g, ∂_θ K^- g⟩ / ‖φ‖²`.
    pub value: f64,
    /// `∫_ℝ φ² dp` for `φ = √(2^{-1/2} − T_0) / (p(2p²+3))`.
    pub norm_sq: f64,
}

/// Slope of `inf T̃_θ^-` at `2π/3` from the analytic θ-derivative of the kernel.
///
/// With `W = (2^{-1/2} − T_0)^{-1/2}` and the eigenvector `φ = g / W`,
/// `g = 1/(p(2p²+3))`, the pairing `⟨φ, W ∂K W φ⟩` is `⟨g, ∂K g⟩`.
pub fn fh_derivative(rule: &QuadratureRule) -> Result<FeynmanHellmann> {
    if rule.domain() != Domain::HalfLine {
        return Err(Error::Domain(
            "the Feynman–Hellmann pairing needs a half-line rule".into(),
        ));
    }
    let kernel = CrossingKernel::unit(Angle::crossing(2.0 * PI / 3.0)?)?;
    let p = rule.nodes();
    let w = rule.weights();
    let g: Vec<f64> = p.iter().map(|&p| 1.0 / (p * (2.0 * p * p + 3.0))).collect();
    let num: f64 = (0..p.len())
        .into_par_iter()
        .map(|i| {
            let row: f64 = (0..p.len())
                .map(|j| w[j] * kernel.dtheta_minus(p[i], p[j]) * g[j])
                .sum();
            w[i] * g[i] * row
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let half_norm: f64 = p
        .iter()
        .zip(w)
        .zip(&g)
        .map(|((&p, &w), &g)| tilde_weight(p).map(|wt| w * g * g / (wt * wt)))
        .sum::<Result<f64>>()?;
    Ok(FeynmanHellmann {
        value: num / half_norm,
        norm_sq: 2.0 * half_norm,
    })
}

/// Central difference of `inf T̃_θ^-` at `2π/3` with step `h`.
pub fn fh_finite_difference(rule: &QuadratureRule, h: f64) -> Result<f64> {
    let t = 2.0 * PI / 3.0;
    Ok((tilde_bottom(t + h, rule)? - tilde_bottom(t - h, rule)?) / (2.0 * h))
}

/// Kernel of `(−Δ/2 + k²)^{-1}` in the plane: `(1/π) K_0(√2 k r)`.
pub fn green_function(k: f64, r: f64) -> Result<f64> {
    Ok(bessel_k0(2f64.sqrt() * k * r)? / PI)
}

/// Rectangular sample grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    /// `n × n` points on `[−half_width, half_width]²`.
    pub fn square(half_width: f64, n: usize) -> Self {
        GridSpec {
            x_min: -half_width,
            x_max: half_width,
            nx: n,
            y_min: -half_width,
            y_max: half_width,
            ny: n,
        }
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.ny)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.nx >= 1
            && self.ny >= 1
            && self.nx * self.ny <= 4_000_000
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
            && [self.x_min, self.x_max, self.y_min, self.y_max]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid grid {self:?}")))
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(4.0, 81)
    }
}

/// `Ψ(x, y)` on a grid, normalized to `max |Ψ| = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct WavefunctionGrid {
    pub theta: f64,
    pub sector: SectorLabel,
    pub k: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major in `y`: `psi[iy * nx + ix]`.
    pub psi: Vec<f64>,
    /// Points lying on a wire, where the field's transform converges slowly.
    pub on_wire: Vec<bool>,
}

impl WavefunctionGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.psi[iy * self.xs.len() + ix]
    }

    /// `max |Ψ(x, y) − s Ψ(−x, y)|` over mirrored grid points, with `s = β`.
    /// `None` if the grid is not symmetric in `x`.
    pub fn x_parity_defect(&self) -> Option<f64> {
        let nx = self.xs.len();
        if !mirrored(&self.xs) {
            return None;
        }
        let s = self.sector.beta.value();
        let mut worst: f64 = 0.0;
        for iy in 0..self.ys.len() {
            for ix in 0..nx {
                worst = worst.max((self.at(ix, iy) - s * self.at(nx - 1 - ix, iy)).abs());
            }
        }
        Some(worst)
    }

    /// Same as [`x_parity_defect`](Self::x_parity_defect) for `y → −y` with `s = α`.
    pub fn y_parity_defect(&self) -> Option<f64> {
        let ny = self.ys.len();
        if !mirrored(&self.ys) {
            return None;
        }
        let s = self.sector.alpha.value();
        let mut worst: f64 = 0.0;
        for iy in 0..ny {
            for ix in 0..self.xs.len() {
                worst = worst.max((self.at(ix, iy) - s * self.at(ix, ny - 1 - iy)).abs());
            }
        }
        Some(worst)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,psi\n");
        for (iy, &y) in self.ys.iter().enumerate() {
            for (ix, &x) in self.xs.iter().enumerate() {
                out.push_str(&format!("{:.6},{:.6},{:.9e}\n", x, y, self.at(ix, iy)));
            }
        }
        out
    }
}

fn mirrored(v: &[f64]) -> bool {
    let n = v.len();
    (0..n).all(|i| (v[i] + v[n - 1 - i]).abs() <= 1e-12 * v[i].abs().max(1.0))
}

/// Composite 8-point Gauss–Legendre nodes on `[0, upper]`, panel width ≤ `width`.
fn panel_rule(upper: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let base = gauss_legendre(8).expect("8 is in range");
    let panels = (upper / width).ceil().max(1.0) as usize;
    let h = upper / panels as f64;
    let mut nodes = Vec::with_capacity(8 * panels);
    let mut weights = Vec::with_capacity(8 * panels);
    for m in 0..panels {
        let mid = (m as f64 + 0.5) * h;
        for (&u, &w) in base.nodes().iter().zip(base.weights()) {
            nodes.push(mid + 0.5 * h * u);
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Field of a line source along the `a` axis at `(a, d)`.
///
/// For a density whose transform in the scaled variable `ξ = kq` is `F(q)`,
/// the convolution with `(1/π) K_0(√2 k r)` equals
/// `(1/π) ∫_0^∞ F(q) trig(kqa) e^{−k√(q²+2)|d|} / √(q²+2) dq` with `cos` for
/// even `F` and `sin` for odd `F` (up to a common factor `i`).
fn line_field(q: &[f64], wq: &[f64], f: &[f64], parity: Sign, k: f64, a: f64, d: f64) -> f64 {
    let mut acc = 0.0;
    for ((&q, &w), &f) in q.iter().zip(wq).zip(f) {
        let r = (q * q + 2.0).sqrt();
        let decay = (-k * r * d.abs()).exp();
        if decay == 0.0 {
            continue;
        }
        let trig = match parity {
            Sign::Plus => (k * q * a).cos(),
            Sign::Minus => (k * q * a).sin(),
        };
        acc += w * f * trig * decay / r;
    }
    acc / PI
}

/// Upper limit of the transform variable.
const Q_MAX: f64 = 80.0;

/// `Ψ = R_0(−k²) τ* φ` on a grid.
///
/// `phi` holds de-weighted samples of the sector eigenvector on `rule`
/// (the scaled frame, eigenvalue `k`). Off the nodes it is extended by the
/// Nyström interpolant `φ(q) = β Σ_j w_j K(q, q_j) φ_j / (k − T_0(q))`.
/// Wire 1 runs along `(−sin θ/2, cos θ/2)`, wire 2 along `(sin θ/2, cos θ/2)`;
/// the density on wire 2 is `β` times that on wire 1.
pub fn reconstruct(
    theta: Angle,
    sector: SectorLabel,
    k: f64,
    phi: &[f64],
    rule: &QuadratureRule,
    grid: &GridSpec,
) -> Result<WavefunctionGrid> {
    grid.validate()?;
    if rule.domain() != Domain::HalfLine {
        return Err(Error::Domain(
            "reconstruction needs the half-line rule of the eigenvector".into(),
        ));
    }
    if phi.len() != rule.len() {
        return Err(Error::Dimension {
            expected: rule.len(),
            found: phi.len(),
        });
    }
    if !(k > ESSENTIAL_EDGE) {
        return Err(Error::Domain(format!(
            "k = {k} is not above the essential edge"
        )));
    }
    let skeleton = sector.skeleton();
    let kernel = CrossingKernel::unit(theta)?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let half = 0.5 * theta.radians();
    let dirs = [(-half.sin(), half.cos()), (half.sin(), half.cos())];
    let reach = xs
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .hypot(ys.iter().map(|y| y.abs()).fold(0.0, f64::max));
    let width = 0.25f64.min(PI / (4.0 * k * reach.max(1e-12)));
    let (q, wq) = panel_rule(Q_MAX, width);

    let (nodes, weights) = (rule.nodes(), rule.weights());
    let beta = skeleton.beta.value();
    let f: Vec<f64> = q
        .par_iter()
        .map(|&qq| {
            let s: f64 = nodes
                .iter()
                .zip(weights)
                .zip(phi)
                .map(|((&qj, &wj), &pj)| wj * kernel.parity(skeleton.alpha, qq, qj) * pj)
                .sum();
            beta * s / (k - t0(EnergyParameter::UNIT, qq))
        })
        .collect();

    let wire_tol = 1e-9 * reach.max(1.0);
    let points: Vec<(f64, f64)> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .collect();
    let values: Vec<(f64, bool)> = points
        .par_iter()
        .map(|&(x, y)| {
            let mut psi = 0.0;
            let mut on_wire = false;
            for (i, &(ux, uy)) in dirs.iter().enumerate() {
                let a = x * ux + y * uy;
                let d = -x * uy + y * ux;
                on_wire |= d.abs() <= wire_tol;
                let c = if i == 0 { 1.0 } else { sector.beta.value() };
                psi += c * line_field(&q, &wq, &f, skeleton.alpha, k, a, d);
            }
            (psi, on_wire)
        })
        .collect();
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.0.abs()));
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Numerical(
            "reconstructed wavefunction vanishes on the grid".into(),
        ));
    }
    Ok(WavefunctionGrid {
        theta: theta.radians(),
        sector,
        k,
        xs,
        ys,
        psi: values.iter().map(|v| v.0 / max).collect(),
        on_wire: values.iter().map(|v| v.1).collect(),
    })
}

/// Reconstruct from a [`BoundState`] computed on `rule`.
pub fn reconstruct_state(
    theta: Angle,
    sector: SectorLabel,
    state: &BoundState,
    rule: &QuadratureRule,
    grid: &GridSpec,
) -> Result<WavefunctionGrid> {
    reconstruct(theta, sector, state.level.k, &state.phi, rule, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{bound_states, DEFAULT_MARGIN};
    use std::f64::consts::FRAC_1_SQRT_2;

    const PP: SectorLabel = SectorLabel::new(Sign::Plus, Sign::Plus);
    const PM: SectorLabel = SectorLabel::new(Sign::Plus, Sign::Minus);

    fn half(n: usize) -> QuadratureRule {
        QuadratureRule::half_line(n, 1.0).unwrap()
    }

    #[test]
    fn grids() {
        let g = default_theta_grid();
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], FRAC_PI_2);
        assert!((g[63] - 0.97 * PI).abs() < 1e-15);
        assert_eq!(theta_grid(1.0, 1.0, 1).unwrap(), vec![1.0]);
        assert!(theta_grid(0.0, 1.0, 3).is_err());
        assert!(theta_grid(1.0, 3.5, 3).is_err());
        assert!(theta_grid(2.0, 1.0, 3).is_err());
        assert!(theta_grid(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn right_angle_row() {
        let table = sweep(&[FRAC_PI_2], &SectorLabel::ALL, &half(200), DEFAULT_MARGIN).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert_eq!(row.sector, PP);
        assert!((row.k - 1.0).abs() < 1e-10);
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("1.5707963,+1,+1,0,1.000000,-1.000000,"));
    }

    #[test]
    fn plus_minus_sector_opens_past_critical_angle() {
        let table = sweep(&[0.6 * PI, 0.7 * PI], &[PM], &half(200), DEFAULT_MARGIN).unwrap();
        assert_eq!(table.count(0.6 * PI, PM), 0);
        assert_eq!(table.count(0.7 * PI, PM), 1);
        assert_eq!(
            table.rows[0].skeleton_sector,
            SectorLabel::new(Sign::Minus, Sign::Minus)
        );
    }

    #[test]
    fn critical_angle_at_two_thirds_pi() {
        let c = critical_angle(&half(200), default_critical_bracket()).unwrap();
        assert!((c.theta_c - 2.0 * PI / 3.0).abs() < 1e-6, "{}", c.theta_c);
        assert!(matches!(
            critical_angle(&half(100), (FRAC_PI_2, 0.65 * PI)),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn feynman_hellmann() {
        assert!((fh_reference() - FH_REFERENCE).abs() < 1e-7);
        let rule = half(200);
        let fh = fh_derivative(&rule).unwrap();
        assert!(
            (fh.value - fh_reference()).abs() < 1e-6 * fh_reference().abs(),
            "{}",
            fh.value
        );
        assert!((fh.norm_sq - (6.0 - 3f64.sqrt() * PI) / 18.0).abs() < 1e-10);
        let fd = fh_finite_difference(&rule, 1e-4).unwrap();
        assert!((fd - fh.value).abs() < 1e-4 * fh.value.abs());
    }

    #[test]
    fn green_function_solves_helmholtz() {
        let k = 0.9;
        let h = 1e-3;
        for &(x, y) in &[(0.7, 0.2), (1.5, -0.4), (-0.3, 2.0)] {
            let g = |x: f64, y: f64| green_function(k, x.hypot(y)).unwrap();
            let lap =
                (g(x + h, y) + g(x - h, y) + g(x, y + h) + g(x, y - h) - 4.0 * g(x, y)) / (h * h);
            let residual = -0.5 * lap + k * k * g(x, y);
            assert!(
                residual.abs() < 1e-5 * g(x, y).max(1e-3),
                "({x},{y}): {residual}"
            );
        }
    }

    #[test]
    fn line_field_matches_direct_convolution() {
        // density ½e^{−|s|} has transform 1/(1+ξ²)
        let k = 1.1;
        let (q, wq) = panel_rule(Q_MAX, 0.05);
        let f: Vec<f64> = q.iter().map(|&q| 1.0 / (1.0 + (k * q).powi(2))).collect();
        // split at the kink of the density
        let s_rule = QuadratureRule::half_line(800, 1.0).unwrap();
        for &(a, d) in &[(0.0, 0.5), (0.8, 0.3), (-1.7, 1.2)] {
            let mixed = line_field(&q, &wq, &f, Sign::Plus, k, a, d);
            let direct = s_rule.integrate(|s| {
                let g = green_function(k, (a - s).hypot(d)).unwrap()
                    + green_function(k, (a + s).hypot(d)).unwrap();
                g * 0.5 * (-s).exp()
            });
            assert!(
                (mixed - direct).abs() < 1e-6 * direct,
                "({a},{d}): {mixed} vs {direct}"
            );
        }
    }

    #[test]
    fn right_angle_wavefunction_is_exact() {
        let rule = half(200);
        let theta = Angle::crossing(FRAC_PI_2).unwrap();
        let op = build_hamiltonian_sector(theta, PP, &rule).unwrap();
        let state = &bound_states(&op, DEFAULT_MARGIN).unwrap()[0];
        let grid = GridSpec::square(2.0, 21);
        let wf = reconstruct_state(theta, PP, state, &rule, &grid).unwrap();
        assert!(wf.x_parity_defect().unwrap() < 1e-12);
        assert!(wf.y_parity_defect().unwrap() < 1e-12);
        // Ψ ∝ e^{−|d1|−|d2|} with d_i the distances to the wires. The max sits at
        // the crossing, on both wires, so compare shapes against an off-wire point.
        let s = FRAC_1_SQRT_2;
        let exact = |x: f64, y: f64| (-(s * (x + y)).abs() - (s * (x - y)).abs()).exp();
        let (rx, ry) = (12, 10);
        let scale = exact(wf.xs[rx], wf.ys[ry]) / wf.at(rx, ry);
        assert!(!wf.on_wire[ry * 21 + rx]);
        assert!((scale - 1.0).abs() < 1e-3);
        for (iy, &y) in wf.ys.iter().enumerate() {
            for (ix, &x) in wf.xs.iter().enumerate() {
                let tol = if wf.on_wire[iy * wf.xs.len() + ix] {
                    1e-3
                } else {
                    1e-7
                };
                let got = scale * wf.at(ix, iy);
                assert!(
                    (got - exact(x, y)).abs() < tol,
                    "({x},{y}): {got} vs {}",
                    exact(x, y)
                );
            }
        }
        assert!(wf.on_wire[10 * 21 + 10]);
        assert!(wf.to_csv().starts_with("x,y,psi\n"));
    }

    #[test]
    fn plus_minus_wavefunction_vanishes_on_y_axis() {
        let rule = half(200);
        let theta = Angle::crossing(0.75 * PI).unwrap();
        let op = build_hamiltonian_sector(theta, PM, &rule).unwrap();
        let state = &bound_states(&op, DEFAULT_MARGIN).unwrap()[0];
        let wf = reconstruct_state(theta, PM, state, &rule, &GridSpec::square(3.0, 25)).unwrap();
        assert!(wf.x_parity_defect().unwrap() < 1e-10);
        assert!(wf.y_parity_defect().unwrap() < 1e-10);
        for iy in 0..25 {
            assert!(wf.at(12, iy).abs() < 1e-10);
        }
        let off_axis = (0..25).map(|iy| wf.at(6, iy).abs()).fold(0.0, f64::max);
        assert!(off_axis > 1e-2);
    }

    #[test]
    fn reconstruct_rejects_bad_input() {
        let rule = half(20);
        let theta = Angle::crossing(2.0).unwrap();
        let phi = vec![1.0; 20];
        assert!(reconstruct(theta, PP, 1.0, &phi[..5], &rule, &GridSpec::default()).is_err());
        assert!(reconstruct(theta, PP, 0.5, &phi, &rule, &GridSpec::default()).is_err());
        let bad = GridSpec {
            nx: 0,
            ..GridSpec::default()
        };
        assert!(reconstruct(theta, PP, 1.0, &phi, &rule, &bad).is_err());
    }
}
