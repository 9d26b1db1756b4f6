//! Truncated bosonic Fock spaces, mode operators and the composite two-mode
//! space. Mode `a` is always the left tensor factor.

use crate::error::{Error, Result};
use crate::numerics::{self, kron, ComplexMatrix, Tolerances, C64, ZERO};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Number states |0>, ..., |dim-1> of one mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
    label: String,
}

impl FockSpace {
    pub fn new(dim: usize, label: impl Into<String>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "Fock space needs at least 2 levels, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoModeSpace {
    pub mode_a: FockSpace,
    pub mode_b: FockSpace,
}

impl TwoModeSpace {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        Ok(Self {
            mode_a: FockSpace::new(dim_a, "a")?,
            mode_b: FockSpace::new(dim_b, "b")?,
        })
    }

    /// Equal truncation on both modes.
    pub fn symmetric(dim: usize) -> Result<Self> {
        Self::new(dim, dim)
    }

    pub fn dim(&self) -> usize {
        self.mode_a.dim * self.mode_b.dim
    }

    pub fn mode(&self, which: Mode) -> &FockSpace {
        match which {
            Mode::A => &self.mode_a,
            Mode::B => &self.mode_b,
        }
    }

    /// Composite index of |n_a, n_b>.
    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        debug_assert!(n_a < self.mode_a.dim && n_b < self.mode_b.dim);
        n_a * self.mode_b.dim + n_b
    }

    /// Inverse of [`TwoModeSpace::index`].
    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / self.mode_b.dim, index % self.mode_b.dim)
    }

    pub fn basis_vector(&self, n_a: usize, n_b: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[self.index(n_a, n_b)] = C64::new(1.0, 0.0);
        v
    }
}

/// The Hilbert space a density matrix lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpace {
    Single(FockSpace),
    Two(TwoModeSpace),
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        match self {
            StateSpace::Single(s) => s.dim(),
            StateSpace::Two(s) => s.dim(),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on a Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: StateSpace,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity
    /// (smallest eigenvalue >= -1e-8).
    pub fn new(space: StateSpace, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_parts_unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the shape; the caller is responsible for the physical
    /// invariants (used for integrator output, which is validated by tests).
    pub fn from_parts_unchecked(space: StateSpace, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.ensure_square()?;
        if n != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "DensityMatrix",
                expected: space.dim(),
                found: n,
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn pure(space: StateSpace, psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2.is_nan() || norm2 <= 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let m = ComplexMatrix::outer(psi, psi).scale_real(1.0 / norm2);
        Self::from_parts_unchecked(space, m)
    }

    pub fn validate(&self) -> Result<()> {
        let dev = self.matrix.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = self.matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr} != 1")));
        }
        let min = numerics::eigvals_hermitian(&self.matrix, &Tolerances::default())?[0];
        if min < -1e-8 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn two_mode_space(&self) -> Result<&TwoModeSpace> {
        match &self.space {
            StateSpace::Two(s) => Ok(s),
            StateSpace::Single(_) => Err(Error::InvalidArgument("operation requires a two-mode state".into())),
        }
    }

    /// Tr(A ρ)
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        op.matmul(&self.matrix).trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }
}

/// Truncated annihilation operator: (n-1, n) entry is √n.
pub fn annihilation(space: &FockSpace) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(space.dim, space.dim);
    for n in 1..space.dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(space: &FockSpace) -> ComplexMatrix {
    annihilation(space).dagger()
}

/// diag(0, 1, ..., dim-1)
pub fn number(space: &FockSpace) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&(0..space.dim).map(|n| n as f64).collect::<Vec<_>>())
}

/// Lift a single-mode operator into the two-mode space: op⊗I or I⊗op.
pub fn embed(op: &ComplexMatrix, which: Mode, space: &TwoModeSpace) -> Result<ComplexMatrix> {
    let target = space.mode(which).dim;
    if op.rows() != target || op.cols() != target {
        return Err(Error::DimensionMismatch {
            context: "embed",
            expected: target,
            found: op.rows().max(op.cols()),
        });
    }
    Ok(match which {
        Mode::A => kron(op, &ComplexMatrix::identity(space.mode_b.dim)),
        Mode::B => kron(&ComplexMatrix::identity(space.mode_a.dim), op),
    })
}

/// Embedded annihilation operators (a⊗I, I⊗b).
pub fn mode_operators(space: &TwoModeSpace) -> (ComplexMatrix, ComplexMatrix) {
    let a = embed(&annihilation(&space.mode_a), Mode::A, space).expect("matching dims");
    let b = embed(&annihilation(&space.mode_b), Mode::B, space).expect("matching dims");
    (a, b)
}

/// Geometric occupation weight n̄ⁿ/(n̄+1)ⁿ⁺¹.
pub fn thermal_weight(n_bar: f64, n: usize) -> f64 {
    if n_bar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ratio = n_bar / (n_bar + 1.0);
    ratio.powi(n as i32) / (n_bar + 1.0)
}

/// Thermal state with mean occupation `n_bar`, renormalized after truncation.
pub fn thermal_state(n_bar: f64, space: &FockSpace) -> Result<DensityMatrix> {
    if !n_bar.is_finite() || n_bar < 0.0 {
        return Err(Error::InvalidArgument(format!("n_bar must be >= 0, got {n_bar}")));
    }
    let weights: Vec<f64> = (0..space.dim).map(|n| thermal_weight(n_bar, n)).collect();
    let total: f64 = weights.iter().sum();
    let diag: Vec<f64> = weights.iter().map(|w| w / total).collect();
    DensityMatrix::from_parts_unchecked(StateSpace::Single(space.clone()), ComplexMatrix::from_real_diag(&diag))
}

/// Product of two thermal states on the two-mode space.
pub fn thermal_two_mode(n_bar_a: f64, n_bar_b: f64, space: &TwoModeSpace) -> Result<DensityMatrix> {
    let ra = thermal_state(n_bar_a, &space.mode_a)?;
    let rb = thermal_state(n_bar_b, &space.mode_b)?;
    DensityMatrix::from_parts_unchecked(StateSpace::Two(space.clone()), kron(ra.matrix(), rb.matrix()))
}

/// Bose-Einstein occupation 1/(exp(ħω/k_BT) - 1) for SI inputs.
pub fn bose_einstein_nbar(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || omega <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    if x > 700.0 {
        return 0.0;
    }
    1.0 / x.exp_m1()
}

/// Reduced density matrix of the kept mode.
pub fn partial_trace(rho: &DensityMatrix, keep: Mode) -> Result<DensityMatrix> {
    let space = rho.two_mode_space()?;
    let (da, db) = (space.mode_a.dim, space.mode_b.dim);
    let m = rho.matrix();
    let reduced = match keep {
        Mode::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Mode::B => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    };
    DensityMatrix::from_parts_unchecked(StateSpace::Single(space.mode(keep).clone()), reduced)
}

/// Transpose of the chosen mode's indices.
pub fn partial_transpose(rho: &DensityMatrix, which: Mode) -> Result<ComplexMatrix> {
    let space = rho.two_mode_space()?;
    Ok(partial_transpose_matrix(rho.matrix(), space, which))
}

pub(crate) fn partial_transpose_matrix(m: &ComplexMatrix, space: &TwoModeSpace, which: Mode) -> ComplexMatrix {
    let db = space.mode_b.dim;
    ComplexMatrix::from_fn(m.rows(), m.cols(), |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        match which {
            Mode::B => m[(i * db + l, j * db + k)],
            Mode::A => m[(j * db + k, i * db + l)],
        }
    })
}

/// S(ξ)|0,0> with ξ = r e^{iφ} and S(ξ) = exp(ξ a†b† − ξ* ab), written through
/// its Schmidt expansion (1/cosh r) Σ (e^{iφ} tanh r)ⁿ |n,n> and renormalized
/// after truncation.
pub fn two_mode_squeezed_vacuum(space: &TwoModeSpace, r: f64, phi: f64) -> Vec<C64> {
    let mut psi = vec![ZERO; space.dim()];
    let n_max = space.mode_a.dim.min(space.mode_b.dim);
    let lambda = C64::from_polar(r.tanh(), phi);
    let mut amp = C64::new(1.0 / r.cosh(), 0.0);
    for n in 0..n_max {
        psi[space.index(n, n)] = amp;
        amp *= lambda;
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    psi
}
