//! Dense symmetric eigensolvers.
//!
//! [`eigh`] reduces to tridiagonal form with Householder reflections and
//! diagonalizes with implicit-shift QL; [`eigvalsh`] does the same without
//! accumulating vectors. [`eigh_jacobi`] is the cyclic Jacobi reference used
//! to cross-check them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Matrix, factor: f64) -> Result<Matrix> {
        if other.n != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + factor * b)
            .collect();
        Ok(Matrix { n: self.n, data })
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Copy of rows/columns `idx` in the given order.
    pub fn permuted(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Ascending eigenvalues with orthonormal eigenvectors and residuals.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// Row `j` is the unit eigenvector of `eigenvalues[j]`.
    pub eigenvectors: Matrix,
    /// `‖A v_j - λ_j v_j‖`.
    pub residuals: Vec<f64>,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        self.eigenvectors.row(j)
    }

    /// Largest eigenvalue and its vector.
    pub fn top(&self) -> (f64, &[f64]) {
        let j = self.len() - 1;
        (self.eigenvalues[j], self.eigenvector(j))
    }

    pub fn bottom(&self) -> (f64, &[f64]) {
        (self.eigenvalues[0], self.eigenvector(0))
    }

    /// `max |V^T V - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d =
                    dot(self.eigenvector(i), self.eigenvector(j)) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    let asym = a.max_asymmetry();
    if asym > 1e-12 * a.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Full spectral decomposition of a symmetric matrix.
pub fn eigh(a: &Matrix) -> Result<SpectralResult> {
    check_symmetric(a)?;
    let n = a.dim();
    if n == 0 {
        return Ok(SpectralResult {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0),
            residuals: vec![],
        });
    }
    let mut work = a.clone();
    let (mut d, mut e, z) = tridiagonalize(&mut work, true);
    let mut z = z.expect("requested");
    tql(&mut d, &mut e, Some(&mut z))?;
    let (eigenvalues, eigenvectors) = sort_pairs(d, z);
    let residuals = residuals(a, &eigenvalues, &eigenvectors);
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Ascending eigenvalues only.
pub fn eigvalsh(a: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    if a.dim() == 0 {
        return Ok(vec![]);
    }
    let mut work = a.clone();
    let (mut d, mut e, _) = tridiagonalize(&mut work, false);
    tql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

pub fn top_eigenpair(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    let r = eigh(a)?;
    let (v, x) = r.top();
    Ok((v, x.to_vec()))
}

pub fn bottom_eigenpair(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    let r = eigh(a)?;
    let (v, x) = r.bottom();
    Ok((v, x.to_vec()))
}

pub fn trace(a: &Matrix) -> f64 {
    (0..a.dim()).map(|i| a.get(i, i)).sum()
}

pub fn frobenius(a: &Matrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Householder reduction `A = Q T Q^T`.
///
/// Returns the diagonal, the subdiagonal (`e[i]` couples `i` and `i + 1`,
/// last entry zero) and optionally `Q^T` (row `j` is column `j` of `Q`).
/// The trailing block is updated row by row so every inner loop is contiguous.
fn tridiagonalize(a: &mut Matrix, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<Matrix>) {
    let n = a.dim();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut reflectors: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = k + 1;
        // x = A[k, k+1..], equal to the column below the diagonal
        let x: Vec<f64> = a.row(k)[m..].to_vec();
        let alpha_norm = norm(&x);
        diag[k] = a.get(k, k);
        if alpha_norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -alpha_norm } else { alpha_norm };
        let mut v = x;
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        if vtv == 0.0 {
            off[k] = alpha;
            continue;
        }
        let beta = 2.0 / vtv;
        off[k] = alpha;

        // p = β A_sub v
        let len = n - m;
        for i in 0..len {
            let row = &a.row(m + i)[m..];
            p[i] = beta * dot(row, &v);
        }
        // w = p - (β p·v / 2) v
        let c = 0.5 * beta * dot(&p[..len], &v);
        for i in 0..len {
            p[i] -= c * v[i];
        }
        // A_sub -= v w^T + w v^T
        for i in 0..len {
            let (vi, wi) = (v[i], p[i]);
            let start = (m + i) * n + m;
            let row = &mut a.data[start..start + len];
            for (j, r) in row.iter_mut().enumerate() {
                *r -= vi * p[j] + wi * v[j];
            }
        }
        // the reduced row/column of A now holds (alpha, 0, ..., 0)
        if want_q {
            reflectors.push((m, beta, v));
        }
    }
    if n >= 2 {
        diag[n - 2] = a.get(n - 2, n - 2);
        off[n - 2] = a.get(n - 2, n - 1);
    }
    diag[n - 1] = a.get(n - 1, n - 1);
    off[n - 1] = 0.0;

    let q_t = want_q.then(|| {
        // Q^T = H_last ... H_1 H_0, applied to the identity from the left.
        let mut qt = Matrix::identity(n);
        let mut acc = vec![0.0; n];
        for (m, beta, v) in &reflectors {
            let m = *m;
            acc.iter_mut().for_each(|x| *x = 0.0);
            for (i, vi) in v.iter().enumerate() {
                let row = qt.row(m + i);
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += vi * r;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let s = beta * vi;
                let start = (m + i) * n;
                for (r, a) in qt.data[start..start + n].iter_mut().zip(&acc) {
                    *r -= s * a;
                }
            }
        }
        qt
    });
    (diag, off, q_t)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `z` holds vectors as rows; rotations mix rows `i` and `i + 1`.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Matrix>) -> Result<()> {
    const MAX_ITER: usize = 60;
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NoConvergence(MAX_ITER));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let nn = z.n;
                        let (lo, hi) = z.data.split_at_mut((i + 1) * nn);
                        let zi = &mut lo[i * nn..];
                        let zi1 = &mut hi[..nn];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sort_pairs(values: Vec<f64>, vectors: Matrix) -> (Vec<f64>, Matrix) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut data = Vec::with_capacity(n * n);
    for &i in &order {
        data.extend_from_slice(vectors.row(i));
    }
    (sorted_values, Matrix { n, data })
}

fn residuals(a: &Matrix, values: &[f64], vectors: &Matrix) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let v = vectors.row(j);
            let av = a.mul_vec(v);
            av.iter()
                .zip(v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Cyclic Jacobi: at most 30 sweeps, stop when the off-diagonal Frobenius
/// norm drops below `1e-12 ‖A‖_F`.
pub fn eigh_jacobi(a: &Matrix) -> Result<SpectralResult> {
    const MAX_SWEEPS: usize = 30;
    check_symmetric(a)?;
    let n = a.dim();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = 1e-12 * frobenius(a);
    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off_norm(&m) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let (mpk, mqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                // rows of v are eigenvector candidates
                for k in 0..n {
                    let (vp, vq) = (v.get(p, k), v.get(q, k));
                    v.set(p, k, c * vp - s * vq);
                    v.set(q, k, s * vp + c * vq);
                }
            }
        }
        converged = off_norm(&m) <= threshold;
    }
    let d: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    let (eigenvalues, eigenvectors) = sort_pairs(d, v);
    let residuals = residuals(a, &eigenvalues, &eigenvectors);
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}
