//! Mean-field (Hartree-Fock) reduction of the doubled generator.
//!
//! Quartic terms are factorized with Δ = ⟨ab⟩ and Δ₁ = ⟨a†b⟩, which leaves
//! a quadratic generator −iH₁ on each side of the doubled space. The
//! short-time mean-field formulas below keep Δ at its initial value inside
//! the time integrals, so every result is exactly linear in t.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockSpace, TwoModeSpace};
use crate::lindblad::{ModelOperators, ModelParams};
use crate::numerics::{ComplexMatrix, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFields {
    /// Δ = ⟨ab⟩ at t = 0.
    pub delta: C64,
    /// Δ₁ = ⟨a†b⟩ at t = 0.
    pub delta1: C64,
    /// Integration constant multiplying the initial values.
    pub c: C64,
}

impl MeanFields {
    pub fn new(delta: C64, delta1: C64, c: C64) -> Self {
        Self { delta, delta1, c }
    }

    pub fn zero() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// ε₀/(2i) − γ₁/2
    pub r: C64,
    /// ε₁/i − γ₁/2
    pub s: C64,
    /// g₁E₁/i + γ₁Δ₁/2
    pub eta: C64,
    /// 𝒲 = rs, taken as a real number.
    pub w: f64,
    /// 𝒲′ = √𝒲(√𝒲 − η)
    pub w_prime: f64,
}

impl DerivedParams {
    pub fn from_model(p: &ModelParams, mf: &MeanFields) -> Self {
        let r = -I * (0.5 * p.eps0) - 0.5 * p.gamma1;
        let s = -I * p.eps1 - 0.5 * p.gamma1;
        let eta = -I * (p.g1 * p.e1) + 0.5 * p.gamma1 * mf.delta1;
        let rs = r * s;
        if rs.im.abs() > 1e-9 {
            log::warn!("rs = {rs} has a non-negligible imaginary part; using its real part as W");
        }
        let mut out = Self {
            r,
            s,
            eta,
            w: rs.re,
            w_prime: f64::NAN,
        };
        out.w_prime = out.w_prime_for(rs.re);
        out
    }

    /// Replace 𝒲 by a user-supplied value.
    pub fn with_w(mut self, w: f64) -> Self {
        self.w = w;
        self.w_prime = self.w_prime_for(w);
        self
    }

    fn w_prime_for(&self, w: f64) -> f64 {
        if self.eta.im.abs() > 1e-9 {
            log::warn!("eta = {} is not real; W' uses its real part", self.eta);
        }
        let sw = w.sqrt();
        sw * (sw - self.eta.re)
    }

    pub fn rs(&self) -> C64 {
        self.r * self.s
    }
}

/// d_a a†a + d_b b†b + hopping (a†b + b†a) + pair (ab + a†b†) + offset
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticHamiltonian {
    pub diag_a: C64,
    pub diag_b: C64,
    pub hopping: C64,
    pub pair: C64,
    pub offset: C64,
}

impl QuadraticHamiltonian {
    pub fn symmetric(diag: C64, hopping: C64, pair: C64) -> Self {
        Self {
            diag_a: diag,
            diag_b: diag,
            hopping,
            pair,
            offset: C64::new(0.0, 0.0),
        }
    }

    /// Matrix on the truncated two-mode space.
    pub fn to_matrix(&self, space: &TwoModeSpace) -> ComplexMatrix {
        let ops = ModelOperators::new(space);
        let pair = ops.a.matmul(&ops.b);
        let terms = [
            (self.diag_a, &ops.n_a),
            (self.diag_b, &ops.n_b),
            (self.hopping, &ops.hop),
            (self.hopping, &ops.hop.dagger()),
            (self.pair, &pair),
            (self.pair, &pair.dagger()),
        ];
        let mut out = ComplexMatrix::identity(space.dim()).scale(self.offset);
        for (coeff, op) in terms {
            if coeff != C64::new(0.0, 0.0) {
                out = &out + &op.scale(coeff);
            }
        }
        out
    }

    /// Rewrite in the modes A = (a+b)/√2, B = (a−b)/√2. Needs d_a = d_b.
    pub fn split_modes(&self) -> Result<(SingleModeQuadratic, SingleModeQuadratic)> {
        if (self.diag_a - self.diag_b).norm() > 1e-12 * (1.0 + self.diag_a.norm()) {
            return Err(Error::InvalidArgument(
                "mode splitting needs equal diagonal coefficients".into(),
            ));
        }
        let d = self.diag_a;
        let mode_a = SingleModeQuadratic {
            diag: d + self.hopping,
            pair: 0.5 * self.pair,
            offset: self.offset,
        };
        let mode_b = SingleModeQuadratic {
            diag: d - self.hopping,
            pair: -0.5 * self.pair,
            offset: C64::new(0.0, 0.0),
        };
        Ok((mode_a, mode_b))
    }
}

/// diag A†A + pair (A² + A†²) + offset
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleModeQuadratic {
    pub diag: C64,
    pub pair: C64,
    pub offset: C64,
}

impl SingleModeQuadratic {
    pub fn to_matrix(&self, space: &FockSpace) -> ComplexMatrix {
        self.in_terms_of(&fock::annihilation(space))
    }

    /// Build from a given annihilation operator (any representation).
    pub fn in_terms_of(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let ad = a.dagger();
        let sq = a.matmul(a);
        let n = ad.matmul(a);
        let id = ComplexMatrix::identity(a.rows());
        &(&n.scale(self.diag) + &(&sq + &sq.dagger()).scale(self.pair)) + &id.scale(self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearized {
    /// −iH₁ in terms of 𝒲 = rs.
    pub h1: QuadraticHamiltonian,
    /// iH̃₁, written on the tilde operators.
    pub h1_tilde: QuadraticHamiltonian,
    pub derived: DerivedParams,
}

/// Mean-field generator with 𝒲 = rs common to both modes.
pub fn linearize(p: &ModelParams, mf: &MeanFields) -> Linearized {
    let derived = DerivedParams::from_model(p, mf);
    let rs = derived.rs();
    let srs = rs.sqrt();
    let pair = -0.5 * p.gamma1 * mf.delta * srs;
    let h1 = QuadraticHamiltonian::symmetric(rs, derived.eta * srs, pair);
    let h1_tilde = QuadraticHamiltonian::symmetric(-rs, -derived.eta.conj() * srs, pair);
    Linearized { h1, h1_tilde, derived }
}

/// The same generator before the 𝒲 rewrite: r a†a + s b†b + η(a†b + b†a)
/// − (γ₁Δ/2)(ab + a†b†), and its tilde partner.
pub fn mean_field_generator(p: &ModelParams, mf: &MeanFields) -> (QuadraticHamiltonian, QuadraticHamiltonian) {
    let d = DerivedParams::from_model(p, mf);
    let pair = -0.5 * p.gamma1 * mf.delta;
    let h1 = QuadraticHamiltonian {
        diag_a: d.r,
        diag_b: d.s,
        hopping: d.eta,
        pair,
        offset: C64::new(0.0, 0.0),
    };
    let h1_tilde = QuadraticHamiltonian {
        diag_a: -d.r,
        diag_b: -d.s,
        hopping: -d.eta,
        pair,
        offset: C64::new(0.0, 0.0),
    };
    (h1, h1_tilde)
}

/// μ = m/√(m² − n²), ν = n/√(m² − n²)
pub fn bogoliubov_coeffs(m: C64, n: C64) -> Result<(C64, C64)> {
    if m.norm() <= n.norm() {
        return Err(Error::UnstableRegime {
            m_abs: m.norm(),
            n_abs: n.norm(),
        });
    }
    let norm = (m * m - n * n).sqrt();
    Ok((m / norm, n / norm))
}

/// Inputs of the short-time mean-field formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeModel {
    pub gamma1: f64,
    pub w: f64,
    pub fields: MeanFields,
}

impl ShortTimeModel {
    pub fn new(gamma1: f64, w: f64, fields: MeanFields) -> Result<Self> {
        if !(gamma1.is_finite() && w.is_finite()) || w < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "need finite gamma1 and W >= 0, got gamma1={gamma1}, W={w}"
            )));
        }
        Ok(Self { gamma1, w, fields })
    }

    fn with_delta(&self, delta: C64) -> Self {
        let mut out = *self;
        out.fields.delta = delta;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSum {
    pub nbar1: f64,
    pub nbar2: f64,
    pub n_max: usize,
}

impl ThermalSum {
    pub fn new(nbar1: f64, nbar2: f64, n_max: usize) -> Result<Self> {
        if !(nbar1 >= 0.0 && nbar2 >= 0.0 && nbar1.is_finite() && nbar2.is_finite()) {
            return Err(Error::InvalidArgument(
                "mean occupations must be finite and >= 0".into(),
            ));
        }
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { nbar1, nbar2, n_max })
    }

    /// Σ_{n,m=lo}^{n_max} w_n(n̄₁) w_m(n̄₂) f(n, m)
    fn sum(&self, lo: usize, f: impl Fn(f64, f64) -> C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for n in lo..=self.n_max {
            let wn = fock::thermal_weight(self.nbar1, n);
            if wn == 0.0 {
                continue;
            }
            for m in lo..=self.n_max {
                let wm = fock::thermal_weight(self.nbar2, m);
                if wm != 0.0 {
                    acc += wn * wm * f(n as f64, m as f64);
                }
            }
        }
        acc
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Δ(t) for η = 0, first order in t.
pub fn delta_case1(t: f64, model: &ShortTimeModel, thermal: &ThermalSum) -> Result<C64> {
    check_time(t)?;
    let g = model.gamma1;
    let w = model.w;
    let sw = w.sqrt();
    let d0 = model.fields.delta;
    let (mu, nu) = bogoliubov_coeffs(C64::new(w, 0.0), -0.5 * g * d0 * sw)?;
    let sinh2 = 2.0 * mu * nu;
    let cosh2 = mu * mu + nu * nu;
    let half_g_d = 0.5 * g * d0;

    let vacuum = model.fields.c * model.fields.delta
        + half_g_d * w * sw * (1.0 - I * w * t + I * g * t * sw / 2.0)
        + I * (g * g * w * w / 2.0) * d0 * nu * nu * t;
    let thermal_part = thermal.sum(1, |n, m| {
        let k = m + n + 1.0;
        -0.5 * sinh2 * k
            + I * (w / 2.0) * sinh2 * k * t
            + I * half_g_d * sw * (1.0 + cosh2 * (m + n) + 2.0 * mu * mu) * t
    });
    Ok(vacuum + thermal_part)
}

/// Δ(t) for η ≠ 0, first order in t.
pub fn delta_case2(t: f64, model: &ShortTimeModel, thermal: &ThermalSum) -> Result<C64> {
    check_time(t)?;
    let g = model.gamma1;
    let w = model.w;
    let d0 = model.fields.delta;
    let (mu, nu) = bogoliubov_coeffs(C64::new(w, 0.0), 0.5 * g * d0 * w.sqrt())?;
    let cosh2 = mu * mu + nu * nu;
    let base = model.fields.c * d0 - 2.0 * I * g * d0 * w * w * t - I * (g.powi(3) / 2.0) * w * d0.powi(3) * t;
    let thermal_part = thermal.sum(1, |n, m| I * 2.0 * g * d0 * cosh2 * (m + n + 1.0) * t);
    Ok(base - thermal_part)
}

/// Δ₁(t) for η ≠ 0, first order in t.
pub fn delta1_case2(t: f64, model: &ShortTimeModel, thermal: &ThermalSum) -> Result<C64> {
    check_time(t)?;
    let g = model.gamma1;
    let w = model.w;
    let sw = w.sqrt();
    let d0 = model.fields.delta;
    let (mu, nu) = bogoliubov_coeffs(C64::new(w, 0.0), 0.5 * g * d0 * sw)?;
    let sinh2 = 2.0 * mu * nu;
    let cosh2 = mu * mu + nu * nu;
    let rate = 4.0 * I * (-w * sinh2 + 0.5 * g * d0 * sw * cosh2) * mu * nu;
    let base = model.fields.c * model.fields.delta1 + 2.0 * cosh2 + rate * t;
    let thermal_part = thermal.sum(0, |n, m| cosh2 * (n - m) + rate * t * (2.0 * m + 1.0));
    Ok(base + thermal_part)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tolerance: f64,
    pub damping: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            damping: 0.5,
            max_iterations: 500,
        }
    }
}

/// Damped iteration Δ ← (1−λ)Δ + λ F(Δ), where F is one of the short-time
/// formulas with Δ substituted on its right-hand side (cΔ(0) held fixed).
pub fn self_consistent_delta(
    t: f64,
    model: &ShortTimeModel,
    thermal: &ThermalSum,
    formula: fn(f64, &ShortTimeModel, &ThermalSum) -> Result<C64>,
    opts: &FixedPointOptions,
) -> Result<C64> {
    let constant = model.fields.c * model.fields.delta;
    let mut delta = model.fields.delta;
    for _ in 0..opts.max_iterations {
        let mut m = model.with_delta(delta);
        // keep the integration-constant term at its initial value
        m.fields.c = if delta == C64::new(0.0, 0.0) {
            model.fields.c
        } else {
            constant / delta
        };
        let next = (1.0 - opts.damping) * delta + opts.damping * formula(t, &m, thermal)?;
        if !next.is_finite() || next.norm() > 1e6 {
            return Err(Error::NumericalFailure(format!(
                "mean-field iteration diverged at t={t} (|Delta|={:e})",
                next.norm()
            )));
        }
        if (next - delta).norm() <= opts.tolerance * (1.0 + next.norm()) {
            return Ok(next);
        }
        delta = next;
    }
    Err(Error::NumericalFailure(format!(
        "mean-field iteration did not converge at t={t}"
    )))
}

/// (|r|, φ) of the η = 0 squeezing.
pub fn squeeze_case1(t: f64, gamma1: f64, w: f64, delta: C64) -> (f64, f64) {
    let r = (gamma1 * gamma1 * w * w / 4.0) * delta * t * (1.0 + w * t / 2.0);
    (r.norm(), -w * t / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Squeeze {
    pub r_a: C64,
    pub r_b: C64,
    pub phi_a: f64,
    pub phi_b: f64,
}

/// Complex squeezing of the A and B modes, with 𝒲_A = √𝒲(√𝒲 + η) and
/// 𝒲_B = √𝒲(√𝒲 − η).
pub fn squeeze_case2(t: f64, gamma1: f64, w: f64, delta: C64, eta: f64) -> Case2Squeeze {
    let sw = w.sqrt();
    let wa = sw * (sw + eta);
    let wb = sw * (sw - eta);
    let r = |wx: f64| (gamma1 * t / 2.0) * sw * delta * (1.0 - I * gamma1 * wx * wx * t);
    Case2Squeeze {
        r_a: r(wa),
        r_b: r(wb),
        phi_a: wa * t / 2.0,
        phi_b: wb * t / 2.0,
    }
}
