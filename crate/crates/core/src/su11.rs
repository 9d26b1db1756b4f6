//! su(1,1) realizations and the disentangled form of exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋).
//!
//! Normalization is canonical: [K₃, K±] = ±K±, [K₋, K₊] = 2K₃.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockSpace, TwoModeSpace};
use crate::hartree_fock::{QuadraticHamiltonian, SingleModeQuadratic};
use crate::numerics::{self, ComplexMatrix, Tolerances, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU11Coeffs {
    pub xi3: C64,
    pub xi_plus: C64,
    pub xi_minus: C64,
}

impl SU11Coeffs {
    pub fn new(xi3: C64, xi_plus: C64, xi_minus: C64) -> Self {
        Self { xi3, xi_plus, xi_minus }
    }

    /// φ with φ² = ξ₃²/4 − ξ₊ξ₋ (principal root).
    pub fn phi(&self) -> C64 {
        (self.xi3 * self.xi3 / 4.0 - self.xi_plus * self.xi_minus).sqrt()
    }

    /// Coefficients of t·(m(a†a + b†b) + n(ab + a†b†) + offset), together
    /// with the scalar left over from K₃ = (a†a + b†b + 1)/2.
    pub fn from_two_mode(h: &QuadraticHamiltonian, t: f64) -> Result<(Self, C64)> {
        if h.hopping != ZERO || (h.diag_a - h.diag_b).norm() > 1e-12 * (1.0 + h.diag_a.norm()) {
            return Err(Error::InvalidArgument(
                "two-mode su(1,1) form needs equal diagonals and no hopping".into(),
            ));
        }
        let m = h.diag_a;
        let coeffs = Self::new(2.0 * m * t, h.pair * t, h.pair * t);
        Ok((coeffs, (h.offset - m) * t))
    }

    /// Same for t·(d A†A + p(A² + A†²) + offset), with K₃ = (2A†A + 1)/4.
    pub fn from_single_mode(h: &SingleModeQuadratic, t: f64) -> (Self, C64) {
        let coeffs = Self::new(2.0 * h.diag * t, 2.0 * h.pair * t, 2.0 * h.pair * t);
        (coeffs, (h.offset - 0.5 * h.diag) * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactors {
    pub gamma_plus: C64,
    pub gamma3: C64,
    pub gamma_minus: C64,
    pub phi: C64,
    /// ln Γ₃ on the branch that makes exp(ln Γ₃ K₃) exact.
    pub log_gamma3: C64,
}

/// sinh(φ)/φ
fn sinhc(phi: C64) -> C64 {
    if phi.norm() < 1e-4 {
        let p2 = phi * phi;
        1.0 + p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sinh() / phi
    }
}

/// exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋) = exp(Γ₊K₊) exp(ln Γ₃ K₃) exp(Γ₋K₋)
pub fn disentangle(c: &SU11Coeffs) -> Result<GammaFactors> {
    let phi = c.phi();
    let s = sinhc(phi);
    let half_den = phi.cosh() - 0.5 * c.xi3 * s;
    if !half_den.is_finite() || half_den.norm() < 1e-14 {
        return Err(Error::DegenerateFactorization {
            denominator: half_den.norm(),
        });
    }
    let log_gamma3 = -2.0 * half_den.ln();
    Ok(GammaFactors {
        gamma_plus: c.xi_plus * s / half_den,
        gamma3: 1.0 / (half_den * half_den),
        gamma_minus: c.xi_minus * s / half_den,
        phi,
        log_gamma3,
    })
}

fn k_matrices_2x2() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let kp = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
    let km = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, -1.0, 0.0]).unwrap();
    let k3 = ComplexMatrix::from_real_diag(&[0.5, -0.5]);
    (kp, km, k3)
}

/// exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋) in the faithful 2×2 representation.
pub fn rep2x2(c: &SU11Coeffs) -> Result<ComplexMatrix> {
    let (kp, km, k3) = k_matrices_2x2();
    let gen = &(&k3.scale(c.xi3) + &kp.scale(c.xi_plus)) + &km.scale(c.xi_minus);
    numerics::mat_exp(&gen, &Tolerances::default())
}

/// exp(Γ₊K₊) exp(ln Γ₃ K₃) exp(Γ₋K₋) in the same representation.
pub fn rep2x2_factored(g: &GammaFactors) -> ComplexMatrix {
    let h = (0.5 * g.log_gamma3).exp();
    let upper =
        ComplexMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0), g.gamma_plus, ZERO, C64::new(1.0, 0.0)]).unwrap();
    let middle = ComplexMatrix::from_diag(&[h, 1.0 / h]);
    let lower =
        ComplexMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0), ZERO, -g.gamma_minus, C64::new(1.0, 0.0)]).unwrap();
    upper.matmul(&middle).matmul(&lower)
}

/// Fock realization of K₊, K₋, K₃ on a truncated space.
#[derive(Debug, Clone)]
pub struct Su11Realization {
    pub k_plus: ComplexMatrix,
    pub k_minus: ComplexMatrix,
    pub k3: ComplexMatrix,
    /// Basis states next to the truncation edge, used for the overflow check.
    boundary: Vec<bool>,
}

/// K₊ = a†b†, K₋ = ab, K₃ = (a†a + b†b + 1)/2
pub fn two_mode_generators(space: &TwoModeSpace) -> Su11Realization {
    let (a, b) = fock::mode_operators(space);
    let k_minus = a.matmul(&b);
    let k_plus = k_minus.dagger();
    let n = &a.dagger().matmul(&a) + &b.dagger().matmul(&b);
    let k3 = (&n + &ComplexMatrix::identity(space.dim())).scale_real(0.5);
    let (da, db) = (space.mode_a.dim(), space.mode_b.dim());
    let boundary = (0..space.dim())
        .map(|k| {
            let (na, nb) = space.occupations(k);
            na + 2 >= da || nb + 2 >= db
        })
        .collect();
    Su11Realization {
        k_plus,
        k_minus,
        k3,
        boundary,
    }
}

/// K₊ = A†²/2, K₋ = A²/2, K₃ = (2A†A + 1)/4
pub fn single_mode_generators(space: &FockSpace) -> Su11Realization {
    let a = fock::annihilation(space);
    let k_minus = a.matmul(&a).scale_real(0.5);
    let k_plus = k_minus.dagger();
    let n = fock::number(space);
    let k3 = (&n.scale_real(2.0) + &ComplexMatrix::identity(space.dim())).scale_real(0.25);
    let d = space.dim();
    let boundary = (0..d).map(|k| k + 2 >= d).collect();
    Su11Realization {
        k_plus,
        k_minus,
        k3,
        boundary,
    }
}

impl Su11Realization {
    pub fn dim(&self) -> usize {
        self.k3.rows()
    }

    pub fn generator(&self, c: &SU11Coeffs) -> ComplexMatrix {
        &(&self.k3.scale(c.xi3) + &self.k_plus.scale(c.xi_plus)) + &self.k_minus.scale(c.xi_minus)
    }

    fn check_state(&self, state: &[C64]) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "su(1,1) state",
                expected: self.dim(),
                found: state.len(),
            });
        }
        Ok(())
    }

    fn check_overflow(&self, state: &[C64]) -> Result<()> {
        let total: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        let edge: f64 = state
            .iter()
            .zip(&self.boundary)
            .filter(|(_, &b)| b)
            .map(|(z, _)| z.norm_sqr())
            .sum();
        let weight = if total > 0.0 { edge / total } else { 0.0 };
        if weight.is_nan() || weight >= 1e-10 {
            return Err(Error::TruncationOverflow { weight });
        }
        Ok(())
    }

    /// exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋)|ψ⟩ by a single exponential.
    pub fn evolve_direct(&self, state0: &[C64], c: &SU11Coeffs, scalar_phase: C64) -> Result<Vec<C64>> {
        self.check_state(state0)?;
        let tol = Tolerances::default();
        let out = numerics::expm_multiply(&self.generator(c), state0, &tol)?;
        let f = scalar_phase.exp();
        Ok(out.into_iter().map(|z| z * f).collect())
    }

    /// exp(Γ₊K₊) exp(ln Γ₃ K₃) exp(Γ₋K₋) e^{scalar}|ψ⟩, right to left.
    pub fn evolve_factored(&self, state0: &[C64], g: &GammaFactors, scalar_phase: C64) -> Result<Vec<C64>> {
        self.check_state(state0)?;
        let tol = Tolerances::default();
        let v = numerics::expm_multiply(&self.k_minus.scale(g.gamma_minus), state0, &tol)?;
        // K₃ is diagonal in the number basis
        let v: Vec<C64> = v
            .iter()
            .enumerate()
            .map(|(k, z)| z * (g.log_gamma3 * self.k3[(k, k)]).exp())
            .collect();
        let v = numerics::expm_multiply(&self.k_plus.scale(g.gamma_plus), &v, &tol)?;
        let f = scalar_phase.exp();
        let out: Vec<C64> = v.into_iter().map(|z| z * f).collect();
        if out.iter().any(|z| !z.is_finite()) {
            return Err(Error::NumericalFailure(
                "factored evolution produced non-finite values".into(),
            ));
        }
        self.check_overflow(&out)?;
        Ok(out)
    }
}

/// Two-mode convenience wrapper.
pub fn evolve_factored(state0: &[C64], g: &GammaFactors, scalar_phase: C64, space: &TwoModeSpace) -> Result<Vec<C64>> {
    two_mode_generators(space).evolve_factored(state0, g, scalar_phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::test_support::rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_diff(u: &[C64], v: &[C64]) -> f64 {
        u.iter().zip(v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pure_k3_collapses() {
        let g = disentangle(&SU11Coeffs::new(c(0.7, 0.2), ZERO, ZERO)).unwrap();
        assert_eq!(g.gamma_plus, ZERO);
        assert_eq!(g.gamma_minus, ZERO);
        assert!((g.gamma3 - c(0.7, 0.2).exp()).norm() < 1e-14);
        assert!((g.log_gamma3 - c(0.7, 0.2)).norm() < 1e-14);
    }

    #[test]
    fn squeeze_factorization() {
        let xi = 0.8;
        let g = disentangle(&SU11Coeffs::new(ZERO, c(xi, 0.0), c(-xi, 0.0))).unwrap();
        assert!((g.gamma_plus - xi.tanh()).norm() < 1e-15);
        assert!((g.gamma_minus + xi.tanh()).norm() < 1e-15);
        assert!((g.gamma3 - 1.0 / xi.cosh().powi(2)).norm() < 1e-15);

        let g = disentangle(&SU11Coeffs::new(ZERO, c(xi, 0.0), c(xi, 0.0))).unwrap();
        assert!((g.gamma_plus - xi.tan()).norm() < 1e-14);
        assert!((g.gamma_minus - xi.tan()).norm() < 1e-14);
        assert!((g.gamma3 - 1.0 / xi.cos().powi(2)).norm() < 1e-14);
    }

    #[test]
    fn rep2x2_cases() {
        let id = rep2x2(&SU11Coeffs::new(ZERO, ZERO, ZERO)).unwrap();
        assert_eq!(id, ComplexMatrix::identity(2));
        let d = rep2x2(&SU11Coeffs::new(c(2.0, 0.0), ZERO, ZERO)).unwrap();
        assert!(d.max_abs_diff(&ComplexMatrix::from_real_diag(&[1f64.exp(), (-1f64).exp()])) < 1e-14);
        let (kp, km, k3) = k_matrices_2x2();
        assert_eq!(km.commutator(&kp), k3.scale_real(2.0));
        assert_eq!(k3.commutator(&kp), kp);
        assert_eq!(k3.commutator(&km), km.scale_real(-1.0));
    }

    #[test]
    fn factored_form_matches_single_exponential() {
        let mut r = rng(2024);
        let mut checked = 0;
        while checked < 200 {
            let mut z = || c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let co = SU11Coeffs::new(z(), z(), z());
            let phi = co.phi();
            let den = phi.cosh() - 0.5 * co.xi3 * sinhc(phi);
            if phi.norm() > 2.0 || den.norm() < 1e-3 {
                continue;
            }
            let g = disentangle(&co).unwrap();
            let lhs = rep2x2(&co).unwrap();
            let rhs = rep2x2_factored(&g);
            assert!(lhs.max_abs_diff(&rhs) / lhs.max_abs().max(1.0) < 1e-12);
            checked += 1;
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        for base in [c(0.3, 0.1), c(-1.0, 0.5)] {
            // choose ξ₊ξ₋ so that φ is tiny: ξ₃²/4 − ξ₊ξ₋ = δ²
            let make = |delta: f64| {
                let xp = c(0.6, -0.2);
                let xm = (base * base / 4.0 - c(delta * delta, 0.0)) / xp;
                disentangle(&SU11Coeffs::new(base, xp, xm)).unwrap()
            };
            let near = make(1e-3);
            let tiny = make(1e-5);
            assert!((near.phi.norm() - 1e-3).abs() < 1e-9);
            assert!((near.gamma_plus - tiny.gamma_plus).norm() < 1e-6);
            // the series and direct formula agree at the switch point
            let phi = c(1e-3, 0.0);
            let direct = phi.sinh() / phi;
            let p2 = phi * phi;
            assert!((direct - (1.0 + p2 / 6.0 + p2 * p2 / 120.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        // φ = 0 and ξ₃ = 2 gives cosh φ − ξ₃/2 = 0
        let co = SU11Coeffs::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(disentangle(&co), Err(Error::DegenerateFactorization { .. })));
    }

    #[test]
    fn two_mode_generator_algebra() {
        let sp = TwoModeSpace::symmetric(6).unwrap();
        let k = two_mode_generators(&sp);
        let vac = sp.basis_vector(0, 0);
        assert!(k.k_minus.apply(&vac).iter().all(|z| *z == ZERO));
        assert_eq!(k.k_plus.apply(&vac), sp.basis_vector(1, 1));
        let comm = &k.k_minus.commutator(&k.k_plus) - &k.k3.scale_real(2.0);
        for i in 0..sp.dim() {
            let (na, nb) = sp.occupations(i);
            if na + nb <= 6 - 3 {
                for j in 0..sp.dim() {
                    assert!(comm[(i, j)].norm() < 1e-13);
                }
            }
        }
        assert!(k.k3.commutator(&k.k_plus).max_abs_diff(&k.k_plus) < 1e-13);
    }

    #[test]
    fn single_mode_generator_algebra() {
        let sp = FockSpace::new(8, "A").unwrap();
        let k = single_mode_generators(&sp);
        let e = |n: usize| {
            let mut v = vec![ZERO; 8];
            v[n] = c(1.0, 0.0);
            v
        };
        assert!(k.k_minus.apply(&e(0)).iter().all(|z| *z == ZERO));
        assert!(k.k_minus.apply(&e(1)).iter().all(|z| *z == ZERO));
        let up = k.k_plus.apply(&e(0));
        assert!((up[2] - 0.5 * 2f64.sqrt()).norm() < 1e-15);
        let comm = &k.k_minus.commutator(&k.k_plus) - &k.k3.scale_real(2.0);
        for i in 0..6 {
            for j in 0..8 {
                assert!(comm[(i, j)].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn factored_evolution_cases() {
        let sp = TwoModeSpace::symmetric(30).unwrap();
        let k = two_mode_generators(&sp);
        let psi = sp.basis_vector(1, 2);
        let g = GammaFactors {
            gamma_plus: ZERO,
            gamma3: c(1.0, 0.0),
            gamma_minus: ZERO,
            phi: ZERO,
            log_gamma3: ZERO,
        };
        assert_eq!(k.evolve_factored(&psi, &g, ZERO).unwrap(), psi);

        let xi = 0.4;
        let co = SU11Coeffs::new(ZERO, c(xi, 0.0), c(-xi, 0.0));
        let g = disentangle(&co).unwrap();
        let vac = sp.basis_vector(0, 0);
        let out = k.evolve_factored(&vac, &g, ZERO).unwrap();
        let expected = fock::two_mode_squeezed_vacuum(&sp, xi, 0.0);
        assert!(max_diff(&out, &expected) < 1e-12);
        let direct = k.evolve_direct(&vac, &co, ZERO).unwrap();
        assert!(max_diff(&out, &direct) < 1e-8);

        let co = SU11Coeffs::new(c(0.3, -0.2), c(0.15, 0.05), c(-0.1, 0.12));
        let g = disentangle(&co).unwrap();
        let psi = sp.basis_vector(1, 1);
        let phase = c(-0.2, 0.4);
        let out = k.evolve_factored(&psi, &g, phase).unwrap();
        let direct = k.evolve_direct(&psi, &co, phase).unwrap();
        assert!(max_diff(&out, &direct) < 1e-8);
    }

    #[test]
    fn factored_evolution_keeps_number_difference_and_reality() {
        let sp = TwoModeSpace::symmetric(25).unwrap();
        let k = two_mode_generators(&sp);
        let co = SU11Coeffs::new(c(0.5, 0.0), c(0.2, 0.0), c(0.2, 0.0));
        let g = disentangle(&co).unwrap();
        let psi = sp.basis_vector(2, 0);
        let out = k.evolve_factored(&psi, &g, ZERO).unwrap();
        for (idx, z) in out.iter().enumerate() {
            let (na, nb) = sp.occupations(idx);
            if na != nb + 2 {
                assert!(z.norm() < 1e-14);
            }
            assert!(z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn truncation_overflow_detected() {
        let sp = TwoModeSpace::symmetric(5).unwrap();
        let co = SU11Coeffs::new(ZERO, c(1.5, 0.0), c(-1.5, 0.0));
        let g = disentangle(&co).unwrap();
        let r = evolve_factored(&sp.basis_vector(0, 0), &g, ZERO, &sp);
        assert!(matches!(r, Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn single_mode_squeezing_matches_direct() {
        let sp = FockSpace::new(40, "A").unwrap();
        let k = single_mode_generators(&sp);
        let h = SingleModeQuadratic {
            diag: c(0.0, -0.6),
            pair: c(0.05, -0.02),
            offset: ZERO,
        };
        let (co, scalar) = SU11Coeffs::from_single_mode(&h, 1.0);
        let g = disentangle(&co).unwrap();
        let mut vac = vec![ZERO; 40];
        vac[0] = c(1.0, 0.0);
        let out = k.evolve_factored(&vac, &g, scalar).unwrap();
        let tol = Tolerances::default();
        let direct = numerics::expm_multiply(&h.to_matrix(&sp), &vac, &tol).unwrap();
        assert!(max_diff(&out, &direct) < 1e-10);
    }

    #[test]
    fn two_mode_quadratic_conversion() {
        let sp = TwoModeSpace::symmetric(20).unwrap();
        let k = two_mode_generators(&sp);
        let h = QuadraticHamiltonian::symmetric(c(0.0, -0.9), ZERO, c(-0.03, 0.01));
        let (co, scalar) = SU11Coeffs::from_two_mode(&h, 1.5).unwrap();
        let psi = sp.basis_vector(0, 0);
        let out = k.evolve_direct(&psi, &co, scalar).unwrap();
        let tol = Tolerances::default();
        let direct = numerics::expm_multiply(&h.to_matrix(&sp).scale_real(1.5), &psi, &tol).unwrap();
        assert!(max_diff(&out, &direct) < 1e-10);
        let hop = QuadraticHamiltonian::symmetric(ZERO, c(0.1, 0.0), ZERO);
        assert!(SU11Coeffs::from_two_mode(&hop, 1.0).is_err());
    }
}
