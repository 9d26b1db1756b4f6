//! Dense complex linear algebra and the fixed-step integrator shared by every
//! other module.
//!
//! Matrices are small (at most a few hundred rows for superoperators, ~900 for
//! the two-mode Fock oracles), so everything is stored densely in row-major
//! order. Hermitian eigendecomposition and SVD are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances used by the matrix routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
    /// Upper bound on the Taylor order used by [`mat_exp`] and [`expm_multiply`].
    pub max_exp_terms: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: 1e-12,
            rtol: 1e-10,
            max_exp_terms: 60,
        }
    }
}

impl Tolerances {
    pub fn new(atol: f64, rtol: f64, max_exp_terms: usize) -> Result<Self> {
        if !(atol > 0.0 && rtol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be positive (atol={atol}, rtol={rtol})"
            )));
        }
        if max_exp_terms == 0 {
            return Err(Error::InvalidArgument("max_exp_terms must be positive".into()));
        }
        Ok(Self {
            atol,
            rtol,
            max_exp_terms,
        })
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::from_vec",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Projector |v><v| (not normalized).
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise distance; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |m - m†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// (m + m†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// [a, b] = ab - ba
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// {a, b} = ab + ba
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product; `a` is the left (slow-index) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The input is scaled so that its 1-norm is at most 1/2, the series is summed
/// until the next term is below machine precision relative to the partial
/// sum, and the result is squared back.
pub fn mat_exp(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::NumericalFailure("mat_exp: non-finite input".into()));
    }
    let norm = m.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale_real(0.5f64.powi(squarings));

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    let mut converged = false;
    for k in 1..=tol.max_exp_terms {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() <= f64::EPSILON * 0.5 * result.max_abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "mat_exp: Taylor series did not converge within {} terms",
            tol.max_exp_terms
        )));
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    if !result.is_finite() {
        return Err(Error::NumericalFailure("mat_exp: overflow while squaring".into()));
    }
    Ok(result)
}

/// Action of the exponential, exp(m)·v, without forming exp(m).
///
/// Splits exp(m) into `s` equal factors with ‖m‖₁/s ≤ 1 and applies a
/// Taylor series to the vector for each factor.
pub fn expm_multiply(m: &ComplexMatrix, v: &[C64], tol: &Tolerances) -> Result<Vec<C64>> {
    let n = m.ensure_square()?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            context: "expm_multiply",
            expected: n,
            found: v.len(),
        });
    }
    let norm = m.norm_one();
    let steps = norm.ceil().max(1.0) as usize;
    let scaled = m.scale_real(1.0 / steps as f64);
    let vnorm = |x: &[C64]| x.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        let mut converged = false;
        for k in 1..=tol.max_exp_terms {
            term = scaled.apply(&term);
            let inv = 1.0 / k as f64;
            term.iter_mut().for_each(|z| *z *= inv);
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if vnorm(&term) <= f64::EPSILON * 0.5 * vnorm(&acc) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure(format!(
                "expm_multiply: Taylor series did not converge within {} terms",
                tol.max_exp_terms
            )));
        }
        out = acc;
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("expm_multiply: non-finite result".into()));
    }
    Ok(out)
}

/// Classical fourth-order Runge-Kutta with a fixed step `dt`. The last step is
/// shortened so the trajectory ends exactly at `t1`.
pub fn rk4_integrate<F>(mut rhs: F, state0: &ComplexMatrix, t0: f64, t1: f64, dt: f64) -> Result<ComplexMatrix>
where
    F: FnMut(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidArgument(format!("rk4: dt must be positive, got {dt}")));
    }
    if t1.is_nan() || t0.is_nan() || t1 < t0 {
        return Err(Error::InvalidArgument(format!("rk4: need t1 >= t0 (t0={t0}, t1={t1})")));
    }
    let span = t1 - t0;
    let full_steps = (span / dt).floor() as u64;
    let remainder = span - full_steps as f64 * dt;
    let mut state = state0.clone();

    let mut step = |t: f64, h: f64, y: &ComplexMatrix| -> Result<ComplexMatrix> {
        let k1 = rhs(t, y)?;
        let k2 = rhs(t + 0.5 * h, &(y + &k1.scale_real(0.5 * h)))?;
        let k3 = rhs(t + 0.5 * h, &(y + &k2.scale_real(0.5 * h)))?;
        let k4 = rhs(t + h, &(y + &k3.scale_real(h)))?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        let next = y + &incr.scale_real(h / 6.0);
        if !next.is_finite() {
            return Err(Error::NumericalFailure(format!("rk4: non-finite state at t={t}")));
        }
        Ok(next)
    };

    for k in 0..full_steps {
        let t = t0 + k as f64 * dt;
        state = step(t, dt, &state)?;
    }
    if remainder > 1e-12 * dt {
        state = step(t0 + full_steps as f64 * dt, remainder, &state)?;
    }
    Ok(state)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::from_real_diag(&self.values);
        self.vectors.matmul(&lambda).matmul(&self.vectors.dagger())
    }
}

fn check_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    m.ensure_square()?;
    let dev = m.hermiticity_deviation();
    if dev > tol.atol + tol.rtol * m.max_abs() {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

pub fn eig_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    check_hermitian(m, tol)?;
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    check_hermitian(m, tol)?;
    let mut values: Vec<f64> = m
        .hermitian_part()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Sum of singular values.
///
/// Hermitian inputs (the partial transposes this is used on) go through the
/// eigenvalue route, Σ|λ|; anything else through an SVD.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_square()?;
    let tol = Tolerances::default();
    if m.hermiticity_deviation() <= tol.atol + tol.rtol * m.max_abs() {
        return Ok(eigvals_hermitian(m, &tol)?.iter().map(|x| x.abs()).sum());
    }
    let sv = m.to_nalgebra().singular_values();
    Ok(sv.iter().sum())
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n).hermitian_part()
    }

    /// Random unitary from the exponential of an anti-Hermitian matrix.
    pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let h = random_hermitian(rng, n);
        mat_exp(&h.scale(I), &Tolerances::default()).unwrap()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(m: &ComplexMatrix) -> C64 {
        let n = m.rows();
        let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[pivot][col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..n {
                let factor = a[row][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, v) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= factor * v;
                }
            }
        }
        det
    }
}
