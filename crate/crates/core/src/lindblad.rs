//! The physical model and its brute-force master-equation integrator.
//!
//! H = ε₀a†a + ε₁b†b + g₁(a†b E₁(t) + b†a E₁*(t)) with E₁(t) = Ē₁e^{−iω₁t},
//! and a single Lindblad channel with jump operator J = a†b at rate γ₁
//! (ħ = 1). Both H and J conserve n_a + n_b, so truncating each mode at
//! (max total excitation + 1) levels is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, Mode, StateSpace, TwoModeSpace};
use crate::numerics::{self, ComplexMatrix, Tolerances, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps0: f64,
    pub eps1: f64,
    pub g1: f64,
    /// Field amplitude Ē₁.
    pub e1: C64,
    /// Drive frequency ω₁; zero means a static field.
    #[serde(default)]
    pub omega1: f64,
    pub gamma1: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.eps0,
            self.eps1,
            self.g1,
            self.e1.re,
            self.e1.im,
            self.omega1,
            self.gamma1,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("model parameters must be finite".into()));
        }
        if self.gamma1 < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma1 must be non-negative, got {}",
                self.gamma1
            )));
        }
        Ok(())
    }

    /// E₁(t) = Ē₁ e^{−iω₁t}
    pub fn field(&self, t: f64) -> C64 {
        self.e1 * (-I * self.omega1 * t).exp()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.omega1 != 0.0 && self.g1 != 0.0 && self.e1 != C64::new(0.0, 0.0)
    }
}

/// Operators of the model on a fixed truncated two-mode space.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub space: TwoModeSpace,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub n_a: ComplexMatrix,
    pub n_b: ComplexMatrix,
    /// a†b
    pub hop: ComplexMatrix,
}

impl ModelOperators {
    pub fn new(space: &TwoModeSpace) -> Self {
        let (a, b) = fock::mode_operators(space);
        let n_a = a.dagger().matmul(&a);
        let n_b = b.dagger().matmul(&b);
        let hop = a.dagger().matmul(&b);
        Self {
            space: space.clone(),
            a,
            b,
            n_a,
            n_b,
            hop,
        }
    }

    pub fn total_number(&self) -> ComplexMatrix {
        &self.n_a + &self.n_b
    }

    pub fn hamiltonian(&self, p: &ModelParams, t: f64) -> ComplexMatrix {
        let e = p.field(t);
        let coupling = &self.hop.scale(e * p.g1) + &self.hop.dagger().scale(e.conj() * p.g1);
        &(&self.n_a.scale_real(p.eps0) + &self.n_b.scale_real(p.eps1)) + &coupling
    }
}

pub fn build_hamiltonian(p: &ModelParams, space: &TwoModeSpace, t: f64) -> ComplexMatrix {
    ModelOperators::new(space).hamiltonian(p, t)
}

/// Hamiltonian (at t = 0), jump operator J = a†b and rate γ₁.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    pub hamiltonian: ComplexMatrix,
    pub jump: ComplexMatrix,
    pub rate: f64,
    jump_dag_jump: ComplexMatrix,
    ops: ModelOperators,
}

impl LindbladGenerator {
    pub fn new(p: &ModelParams, space: &TwoModeSpace) -> Result<Self> {
        p.validate()?;
        let ops = ModelOperators::new(space);
        let hamiltonian = ops.hamiltonian(p, 0.0);
        let jump = ops.hop.clone();
        let jump_dag_jump = jump.dagger().matmul(&jump);
        Ok(Self {
            hamiltonian,
            jump,
            rate: p.gamma1,
            jump_dag_jump,
            ops,
        })
    }

    pub fn space(&self) -> &TwoModeSpace {
        &self.ops.space
    }

    pub fn operators(&self) -> &ModelOperators {
        &self.ops
    }

    fn dissipate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let sandwich = self.jump.matmul(rho).matmul(&self.jump.dagger());
        let anti = self.jump_dag_jump.anticommutator(rho).scale_real(0.5);
        (&sandwich - &anti).scale_real(self.rate)
    }

    fn hamiltonian_at(&self, p: &ModelParams, t: f64) -> ComplexMatrix {
        if p.is_time_dependent() {
            self.ops.hamiltonian(p, t)
        } else {
            self.hamiltonian.clone()
        }
    }

    /// −i[H(t), ρ] + D(ρ) on a bare matrix.
    pub fn rhs_matrix(&self, p: &ModelParams, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let h = self.hamiltonian_at(p, t);
        &h.commutator(rho).scale(-I) + &self.dissipate(rho)
    }
}

fn check_dims(rho: &DensityMatrix, gen: &LindbladGenerator) -> Result<()> {
    let n = rho.matrix().rows();
    if n != gen.jump.rows() {
        return Err(Error::DimensionMismatch {
            context: "lindblad",
            expected: gen.jump.rows(),
            found: n,
        });
    }
    Ok(())
}

/// γ₁(JρJ† − ½{J†J, ρ}).
pub fn dissipator_rhs(rho: &DensityMatrix, gen: &LindbladGenerator) -> Result<ComplexMatrix> {
    check_dims(rho, gen)?;
    Ok(gen.dissipate(rho.matrix()))
}

/// dρ/dt = −i[H(t), ρ] + D(ρ)
pub fn master_rhs(rho: &DensityMatrix, p: &ModelParams, gen: &LindbladGenerator, t: f64) -> Result<ComplexMatrix> {
    check_dims(rho, gen)?;
    Ok(gen.rhs_matrix(p, rho.matrix(), t))
}

/// RK4 trajectory of the master equation from t = 0 to `t1`.
pub fn integrate_master(
    rho0: &DensityMatrix,
    p: &ModelParams,
    gen: &LindbladGenerator,
    t1: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    check_dims(rho0, gen)?;
    let out = numerics::rk4_integrate(|t, rho| Ok(gen.rhs_matrix(p, rho, t)), rho0.matrix(), 0.0, t1, dt)?;
    DensityMatrix::from_parts_unchecked(rho0.space().clone(), out)
}

/// Sample the trajectory at `n_samples` equally spaced times in [0, t1]
/// (including both ends), continuing a single RK4 run between samples.
pub fn integrate_master_trajectory(
    rho0: &DensityMatrix,
    p: &ModelParams,
    gen: &LindbladGenerator,
    t1: f64,
    dt: f64,
    n_samples: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    check_dims(rho0, gen)?;
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let mut out = Vec::with_capacity(n_samples);
    let mut state = rho0.matrix().clone();
    out.push((0.0, rho0.clone()));
    for k in 1..n_samples {
        let ta = t1 * (k - 1) as f64 / (n_samples - 1) as f64;
        let tb = t1 * k as f64 / (n_samples - 1) as f64;
        state = numerics::rk4_integrate(|t, rho| Ok(gen.rhs_matrix(p, rho, t)), &state, ta, tb, dt)?;
        out.push((
            tb,
            DensityMatrix::from_parts_unchecked(rho0.space().clone(), state.clone())?,
        ));
    }
    Ok(out)
}

/// ln‖ρ^{T_B}‖₁
pub fn fock_log_negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = fock::partial_transpose(rho, Mode::B)?;
    Ok(numerics::trace_norm(&pt)?.ln())
}

/// −Tr ρ ln ρ over eigenvalues above the absolute tolerance.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let tol = Tolerances::default();
    let values = numerics::eigvals_hermitian(rho.matrix(), &tol)?;
    Ok(values.into_iter().filter(|&l| l > tol.atol).map(|l| -l * l.ln()).sum())
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB) from the Fock-space density matrix.
pub fn fock_mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s_a = von_neumann_entropy(&fock::partial_trace(rho, Mode::A)?)?;
    let s_b = von_neumann_entropy(&fock::partial_trace(rho, Mode::B)?)?;
    let s_ab = von_neumann_entropy(rho)?;
    Ok(s_a + s_b - s_ab)
}

/// Convenience: wrap a matrix on a two-mode space as a density matrix.
pub fn two_mode_state(space: &TwoModeSpace, m: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(StateSpace::Two(space.clone()), m)
}


#[cfg(test)]
mod tests {
    use super::test_states::random_density;
    use super::*;
    use crate::numerics::test_support::*;
    use crate::numerics::{kron, ZERO};

    fn params(eps0: f64, eps1: f64, g1: f64, e1: f64, gamma1: f64) -> ModelParams {
        ModelParams {
            eps0,
            eps1,
            g1,
            e1: C64::new(e1, 0.0),
            omega1: 0.0,
            gamma1,
        }
    }

    fn projector(space: &TwoModeSpace, na: usize, nb: usize) -> ComplexMatrix {
        let v = space.basis_vector(na, nb);
        ComplexMatrix::outer(&v, &v)
    }

    #[test]
    fn hamiltonian_without_coupling_is_diagonal() {
        let sp = TwoModeSpace::new(3, 4).unwrap();
        let h = build_hamiltonian(&params(0.7, 1.3, 0.0, 1.0, 0.0), &sp, 0.0);
        for i in 0..sp.dim() {
            for j in 0..sp.dim() {
                if i != j {
                    assert_eq!(h[(i, j)], ZERO);
                }
            }
            let (na, nb) = sp.occupations(i);
            assert!((h[(i, i)].re - (0.7 * na as f64 + 1.3 * nb as f64)).abs() < 1e-14);
        }
        let v = sp.basis_vector(1, 0);
        let e: C64 = v.iter().zip(h.apply(&v)).map(|(x, y)| x.conj() * y).sum();
        assert!((e.re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let sp = TwoModeSpace::symmetric(4).unwrap();
        let h = build_hamiltonian(&params(1.0, 0.5, 0.3, 2.0, 0.1), &sp, 0.0);
        assert_eq!(h, h.dagger());
        let mut p = params(1.0, 0.5, 0.3, 2.0, 0.1);
        p.e1 = C64::new(0.4, -1.1);
        p.omega1 = 0.9;
        assert!(build_hamiltonian(&p, &sp, 0.37).is_hermitian(1e-15));
    }

    #[test]
    fn dissipator_dark_state_and_transfer() {
        let sp = TwoModeSpace::symmetric(2).unwrap();
        let p = params(0.0, 0.0, 0.0, 0.0, 0.3);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let vac = two_mode_state(&sp, projector(&sp, 0, 0)).unwrap();
        assert_eq!(dissipator_rhs(&vac, &gen).unwrap().max_abs(), 0.0);

        let rho = two_mode_state(&sp, projector(&sp, 0, 1)).unwrap();
        let d = dissipator_rhs(&rho, &gen).unwrap();
        let expected = (&projector(&sp, 1, 0) - &projector(&sp, 0, 1)).scale_real(0.3);
        assert!(d.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn dissipator_equals_two_commutator_form() {
        let sp = TwoModeSpace::symmetric(3).unwrap();
        let p = params(0.4, 0.9, 0.2, 1.0, 0.17);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let mut r = rng(41);
        for _ in 0..5 {
            let rho = random_density(&mut r, &sp);
            let m = rho.matrix();
            let j = &gen.jump;
            let jd = j.dagger();
            // (γ/2)[Jρ, J†] + (γ/2)[J, ρJ†]
            let literal = &j.matmul(m).commutator(&jd).scale_real(0.5 * p.gamma1)
                + &j.commutator(&m.matmul(&jd)).scale_real(0.5 * p.gamma1);
            let d = dissipator_rhs(&rho, &gen).unwrap();
            assert!(d.max_abs_diff(&literal) < 1e-14);
            assert!(d.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn master_rhs_properties() {
        let sp = TwoModeSpace::symmetric(3).unwrap();
        // stationary diagonal state without dissipation
        let p0 = params(0.4, 0.9, 0.0, 1.0, 0.0);
        let gen0 = LindbladGenerator::new(&p0, &sp).unwrap();
        let diag = two_mode_state(
            &sp,
            ComplexMatrix::from_real_diag(&[0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.05, 0.05]),
        )
        .unwrap();
        assert!(master_rhs(&diag, &p0, &gen0, 0.0).unwrap().max_abs() < 1e-16);

        let p = params(0.4, 0.9, 0.25, 1.2, 0.1);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let ntot = gen.operators().total_number();
        let mut r = rng(8);
        for _ in 0..10 {
            let rho = random_density(&mut r, &sp);
            let d = master_rhs(&rho, &p, &gen, 0.0).unwrap();
            assert!(d.is_hermitian(1e-14));
            assert!(d.trace().norm() < 1e-12);
            assert!(ntot.matmul(&d).trace().norm() < 1e-12);
        }
    }

    #[test]
    fn integrate_zero_time_returns_initial_state() {
        let sp = TwoModeSpace::symmetric(2).unwrap();
        let p = params(1.0, 1.0, 0.2, 1.0, 0.1);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let rho0 = two_mode_state(&sp, projector(&sp, 0, 1)).unwrap();
        let out = integrate_master(&rho0, &p, &gen, 0.0, 1e-3).unwrap();
        assert_eq!(out, rho0);
    }

    #[test]
    fn decay_follows_rate_equation() {
        let sp = TwoModeSpace::symmetric(2).unwrap();
        let gamma = 0.4;
        let p = params(0.0, 0.0, 0.0, 0.0, gamma);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let rho0 = two_mode_state(&sp, projector(&sp, 0, 1)).unwrap();
        let t = 2.5;
        let out = integrate_master(&rho0, &p, &gen, t, 1e-3).unwrap();
        let i01 = sp.index(0, 1);
        let i10 = sp.index(1, 0);
        let pop = out.matrix()[(i01, i01)].re;
        assert!((pop - (-gamma * t).exp()).abs() < 1e-12);
        assert!((out.matrix()[(i10, i10)].re - (1.0 - (-gamma * t).exp())).abs() < 1e-12);
    }

    #[test]
    fn purity_non_increasing_under_dissipation() {
        let sp = TwoModeSpace::symmetric(3).unwrap();
        let p = params(0.5, 0.8, 0.3, 1.0, 0.2);
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let psi: Vec<C64> = (0..9)
            .map(|k| C64::new(1.0 / (1.0 + k as f64), 0.1 * k as f64))
            .collect();
        let rho0 = DensityMatrix::pure(StateSpace::Two(sp.clone()), &psi).unwrap();
        let traj = integrate_master_trajectory(&rho0, &p, &gen, 5.0, 1e-3, 26).unwrap();
        let mut last = f64::INFINITY;
        for (_, rho) in &traj {
            let purity = rho.purity();
            assert!(purity <= last + 1e-8);
            last = purity;
        }
    }

    #[test]
    fn unitary_evolution_preserves_spectrum() {
        let sp = TwoModeSpace::symmetric(3).unwrap();
        let mut p = params(0.5, 0.8, 0.3, 1.0, 0.0);
        p.omega1 = 0.6;
        let gen = LindbladGenerator::new(&p, &sp).unwrap();
        let mut r = rng(77);
        let rho0 = random_density(&mut r, &sp);
        let out = integrate_master(&rho0, &p, &gen, 3.0, 1e-3).unwrap();
        let tol = Tolerances::default();
        let e0 = numerics::eigvals_hermitian(rho0.matrix(), &tol).unwrap();
        let e1 = numerics::eigvals_hermitian(out.matrix(), &tol).unwrap();
        for (x, y) in e0.iter().zip(&e1) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn log_negativity_cases() {
        let sp = TwoModeSpace::symmetric(2).unwrap();
        let prod = two_mode_state(&sp, projector(&sp, 1, 0)).unwrap();
        assert!(fock_log_negativity(&prod).unwrap().abs() < 1e-12);
        let s = 0.5f64.sqrt();
        let bell = DensityMatrix::pure(
            StateSpace::Two(sp.clone()),
            &[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)],
        )
        .unwrap();
        assert!((fock_log_negativity(&bell).unwrap() - 2f64.ln()).abs() < 1e-12);

        let sp25 = TwoModeSpace::symmetric(25).unwrap();
        let psi = fock::two_mode_squeezed_vacuum(&sp25, 0.3, 0.0);
        let tmsv = DensityMatrix::pure(StateSpace::Two(sp25), &psi).unwrap();
        assert!((fock_log_negativity(&tmsv).unwrap() - 0.6).abs() < 1e-6);
    }

    #[test]
    fn log_negativity_invariant_under_local_unitaries() {
        let sp = TwoModeSpace::symmetric(3).unwrap();
        let mut r = rng(90);
        let rho = random_density(&mut r, &sp);
        let u = kron(&random_unitary(&mut r, 3), &random_unitary(&mut r, 3));
        let rotated = two_mode_state(&sp, u.matmul(rho.matrix()).matmul(&u.dagger()).hermitian_part()).unwrap();
        let a = fock_log_negativity(&rho).unwrap();
        let b = fock_log_negativity(&rotated).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn entropy_cases() {
        let sp = TwoModeSpace::symmetric(2).unwrap();
        let pure = two_mode_state(&sp, projector(&sp, 1, 1)).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let s = fock::FockSpace::new(2, "a").unwrap();
        let mixed = DensityMatrix::new(StateSpace::Single(s), ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 2f64.ln()).abs() < 1e-14);
        let big = fock::FockSpace::new(80, "a").unwrap();
        let thermal = fock::thermal_state(1.0, &big).unwrap();
        assert!((von_neumann_entropy(&thermal).unwrap() - 1.386_294_361_119_890_6).abs() < 1e-9);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let p = params(1.0, 1.0, 0.0, 0.0, 0.1);
        let gen = LindbladGenerator::new(&p, &TwoModeSpace::symmetric(3).unwrap()).unwrap();
        let sp2 = TwoModeSpace::symmetric(2).unwrap();
        let rho = two_mode_state(&sp2, projector(&sp2, 0, 0)).unwrap();
        assert!(dissipator_rhs(&rho, &gen).is_err());
        let mut bad = p;
        bad.gamma1 = -1.0;
        assert!(LindbladGenerator::new(&bad, &sp2).is_err());
    }
}
