//! Thermofield doubling: |ρ⟩ = (ρ ⊗ I)|I⟩ on ℋ ⊗ ℋ*.
//!
//! With |I⟩ = Σₙ |n, ñ⟩ the vectorized state is vec(ρ) = Σ ρ_mn |m, ñ⟩,
//! i.e. the row-major flattening of ρ. A left product Aρ becomes A ⊗ I and
//! a right product ρX becomes I ⊗ Xᵀ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, StateSpace, TwoModeSpace};
use crate::lindblad::{LindbladGenerator, ModelOperators, ModelParams};
use crate::numerics::{self, kron, ComplexMatrix, Tolerances, C64, I, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubledSpace {
    pub physical: TwoModeSpace,
    pub tilde: TwoModeSpace,
}

impl DoubledSpace {
    pub fn new(physical: TwoModeSpace) -> Self {
        Self {
            tilde: physical.clone(),
            physical,
        }
    }

    pub fn from_parts(physical: TwoModeSpace, tilde: TwoModeSpace) -> Result<Self> {
        if physical.mode_a.dim() != tilde.mode_a.dim() || physical.mode_b.dim() != tilde.mode_b.dim() {
            return Err(Error::DimensionMismatch {
                context: "doubled space",
                expected: physical.dim(),
                found: tilde.dim(),
            });
        }
        Ok(Self { physical, tilde })
    }

    pub fn physical_dim(&self) -> usize {
        self.physical.dim()
    }

    pub fn dim(&self) -> usize {
        self.physical.dim() * self.tilde.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub space: DoubledSpace,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(space: DoubledSpace, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "state vector",
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::NumericalFailure("non-finite state vector".into()));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// ⟨I|self⟩, i.e. the trace of the underlying operator.
    pub fn trace(&self) -> C64 {
        let n = self.space.physical_dim();
        (0..n).map(|k| self.amplitudes[k * n + k]).sum()
    }
}

/// |I⟩ = Σₙ |n, ñ⟩
pub fn identity_vector(space: &DoubledSpace) -> StateVector {
    let n = space.physical_dim();
    let mut amp = vec![ZERO; n * n];
    for k in 0..n {
        amp[k * n + k] = ONE;
    }
    StateVector {
        space: space.clone(),
        amplitudes: amp,
    }
}

fn check_operator(m: &ComplexMatrix, space: &DoubledSpace) -> Result<()> {
    let n = m.ensure_square()?;
    if n != space.physical_dim() {
        return Err(Error::DimensionMismatch {
            context: "operator on physical space",
            expected: space.physical_dim(),
            found: n,
        });
    }
    Ok(())
}

fn check_superoperator(m: &ComplexMatrix, space: &DoubledSpace) -> Result<()> {
    let n = m.ensure_square()?;
    if n != space.dim() {
        return Err(Error::DimensionMismatch {
            context: "superoperator",
            expected: space.dim(),
            found: n,
        });
    }
    Ok(())
}

/// Vectorize an arbitrary operator: (A ⊗ I)|I⟩.
pub fn vec_operator(m: &ComplexMatrix, space: &DoubledSpace) -> Result<StateVector> {
    check_operator(m, space)?;
    StateVector::new(space.clone(), m.as_slice().to_vec())
}

/// |ρ⟩ = (ρ ⊗ I)|I⟩
pub fn vec(rho: &DensityMatrix, space: &DoubledSpace) -> Result<StateVector> {
    vec_operator(rho.matrix(), space)
}

/// Inverse of `vec_operator`.
pub fn unvec(v: &StateVector) -> ComplexMatrix {
    let n = v.space.physical_dim();
    ComplexMatrix::from_vec(n, n, v.amplitudes.clone()).expect("state vector length is n²")
}

/// Inverse of `vec`, validated as a density matrix within the loose
/// tolerances used for integrated states.
pub fn unvec_density(v: &StateVector) -> Result<DensityMatrix> {
    DensityMatrix::from_parts_unchecked(StateSpace::Two(v.space.physical.clone()), unvec(v))
}

/// A ⊗ I
pub fn embed_physical(op: &ComplexMatrix, space: &DoubledSpace) -> Result<ComplexMatrix> {
    check_operator(op, space)?;
    Ok(kron(op, &ComplexMatrix::identity(space.tilde.dim())))
}

/// Ã = I ⊗ conj(A)
pub fn tilde_op(op: &ComplexMatrix, space: &DoubledSpace) -> Result<ComplexMatrix> {
    check_operator(op, space)?;
    Ok(kron(&ComplexMatrix::identity(space.physical_dim()), &op.conj()))
}

/// Ĥ = H ⊗ I − H̃
pub fn hat_superoperator(h: &ComplexMatrix, space: &DoubledSpace) -> Result<ComplexMatrix> {
    check_operator(h, space)?;
    let tol = Tolerances::default();
    let dev = h.hermiticity_deviation();
    if dev > tol.atol + tol.rtol * h.max_abs() {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(&embed_physical(h, space)? - &tilde_op(h, space)?)
}

/// Which a-mode energy enters the doubled generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonConvention {
    /// ε₀ a†a, as in the Hamiltonian.
    #[default]
    Full,
    /// (ε₀/2) a†a, the coefficient printed in the doubled generator.
    HalvedModeA,
}

/// −iĤ₁ for a static field (the drive evaluated at t = 0).
pub fn liouvillian_superoperator(p: &ModelParams, space: &DoubledSpace) -> Result<ComplexMatrix> {
    liouvillian_superoperator_with(p, space, EpsilonConvention::Full)
}

pub fn liouvillian_superoperator_with(
    p: &ModelParams,
    space: &DoubledSpace,
    convention: EpsilonConvention,
) -> Result<ComplexMatrix> {
    p.validate()?;
    let ops = ModelOperators::new(&space.physical);
    let mut params = *p;
    if convention == EpsilonConvention::HalvedModeA {
        params.eps0 *= 0.5;
    }
    let h = ops.hamiltonian(&params, 0.0);
    let mut out = hat_superoperator(&h, space)?.scale(-I);
    if p.gamma1 != 0.0 {
        let j = &ops.hop;
        let jdj = j.dagger().matmul(j);
        // J ρ J† ↔ J ⊗ conj(J); J†J ρ ↔ J†J ⊗ I; ρ J†J ↔ I ⊗ conj(J†J)
        let sandwich = embed_physical(j, space)?.matmul(&tilde_op(j, space)?);
        let left = embed_physical(&jdj, space)?;
        let right = tilde_op(&jdj, space)?;
        let diss = &sandwich - &(&left + &right).scale_real(0.5);
        out = &out + &diss.scale_real(p.gamma1);
    }
    Ok(out)
}

/// Same generator as a check against the oracle: apply the Lindblad
/// right-hand side column by column.
pub fn liouvillian_from_generator(
    gen: &LindbladGenerator,
    p: &ModelParams,
    space: &DoubledSpace,
) -> Result<ComplexMatrix> {
    let n = space.physical_dim();
    let dim = space.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(col / n, col % n)] = ONE;
        let image = gen.rhs_matrix(p, &e, 0.0);
        for (row, z) in image.as_slice().iter().enumerate() {
            out[(row, col)] = *z;
        }
    }
    Ok(out)
}

/// exp(superop · t)|v0⟩
pub fn evolve_vectorized(v0: &StateVector, superop: &ComplexMatrix, t: f64) -> Result<StateVector> {
    check_superoperator(superop, &v0.space)?;
    if t == 0.0 {
        return Ok(v0.clone());
    }
    let amp = numerics::expm_multiply(&superop.scale_real(t), &v0.amplitudes, &Tolerances::default())?;
    StateVector::new(v0.space.clone(), amp)
}
