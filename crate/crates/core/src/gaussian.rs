//! Two-mode Gaussian states: covariance matrices, symplectic eigenvalues,
//! logarithmic negativity and mutual information.
//!
//! Vacuum variance is 1/2, so the vacuum covariance is I₄/2.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the physicality conditions.
const PHYS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance4 {
    entries: [[f64; 4]; 4],
}

impl Covariance4 {
    #[allow(clippy::needless_range_loop)]
    pub fn new(entries: [[f64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                let x = entries[i][j];
                if !x.is_finite() {
                    return Err(Error::UnphysicalCovariance("non-finite entry".into()));
                }
                if (x - entries[j][i]).abs() > 1e-12 {
                    return Err(Error::UnphysicalCovariance(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn vacuum() -> Self {
        let mut e = [[0.0; 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 0.5;
        }
        Self { entries: e }
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    fn block_det(&self, r: usize, c: usize) -> f64 {
        let e = &self.entries;
        e[r][c] * e[r + 1][c + 1] - e[r][c + 1] * e[r + 1][c]
    }

    pub fn det_a(&self) -> f64 {
        self.block_det(0, 0)
    }

    pub fn det_b(&self) -> f64 {
        self.block_det(2, 2)
    }

    pub fn det_c(&self) -> f64 {
        self.block_det(0, 2)
    }

    pub fn det(&self) -> f64 {
        Matrix4::from_fn(|i, j| self.entries[i][j]).determinant()
    }

    pub fn c_block_is_zero(&self) -> bool {
        (0..2).all(|i| (2..4).all(|j| self.entries[i][j] == 0.0))
    }

    /// Untransposed d₋ ≥ 1/2 within tolerance.
    pub fn is_physical(&self) -> bool {
        matches!(symplectic_eigs(self, false), Ok((_, dm)) if dm >= 0.5 - PHYS_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    pub r_mag: f64,
    pub phi: f64,
}

impl SqueezeSpec {
    pub fn new(r_mag: f64, phi: f64) -> Result<Self> {
        if !(r_mag >= 0.0 && r_mag.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "squeeze magnitude must be finite and >= 0 (got r={r_mag}, phi={phi})"
            )));
        }
        Ok(Self { r_mag, phi })
    }
}

/// Two-mode squeezed vacuum S(ξ)|0,0⟩ with ξ = r e^{iφ}, quadrature order
/// (x_a, p_a, x_b, p_b).
pub fn cov_two_mode_squeezed(s: &SqueezeSpec) -> Covariance4 {
    let (r, phi) = (s.r_mag, s.phi);
    let f = 0.5 * (2.0 * r).cosh();
    let g = -0.5 * (2.0 * r).sinh() * (2.0 * phi).sin();
    let h = 0.5 * (2.0 * r).sinh() * (2.0 * phi).cos();
    Covariance4 {
        entries: [[f, 0.0, h, g], [0.0, f, g, -h], [h, g, f, 0.0], [g, -h, 0.0, f]],
    }
}

/// Covariance of the pair of single-mode squeezed states.
pub fn cov_two_single_mode_squeezed(s: &SqueezeSpec) -> Covariance4 {
    let (r, phi) = (s.r_mag, s.phi);
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let c = 0.5 * (ch + sh * (2.0 * phi).cos());
    let d = 0.5 * (ch - sh * (2.0 * phi).cos());
    let e = 0.5 * sh * (2.0 * phi).sin();
    Covariance4 {
        entries: [[c, 0.0, 0.0, e], [0.0, d, e, 0.0], [0.0, e, c, 0.0], [e, 0.0, 0.0, d]],
    }
}

/// (d₊, d₋) of σ, or of its partial transpose when `transposed`.
///
/// The invariant Δ = DetA + DetB ± 2DetC screens the discriminant; the
/// eigenvalues themselves are the singular values of √σ Ω √σ, which come in
/// pairs d₊, d₊, d₋, d₋. This stays accurate when d₊ = d₋ (pure states),
/// where the closed-form square root loses half the digits.
pub fn symplectic_eigs(sigma: &Covariance4, transposed: bool) -> Result<(f64, f64)> {
    let sign = if transposed { -2.0 } else { 2.0 };
    let delta = sigma.det_a() + sigma.det_b() + sign * sigma.det_c();
    let det = sigma.det();
    let disc = delta * delta - 4.0 * det;
    if disc < -1e-12 {
        return Err(Error::UnphysicalCovariance(format!(
            "negative discriminant {disc:e} in symplectic eigenvalues"
        )));
    }

    let mut m = Matrix4::from_fn(|i, j| sigma.entries[i][j]);
    if transposed {
        // p_b → −p_b
        for k in 0..4 {
            m[(3, k)] = -m[(3, k)];
            m[(k, 3)] = -m[(k, 3)];
        }
    }
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::UnphysicalCovariance(
            "covariance matrix is not positive definite".into(),
        ));
    }
    let root =
        eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    // real antisymmetric, singular values d₊, d₊, d₋, d₋
    let k = root * omega * root;
    let mut sv: Vec<f64> = k.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((0.5 * (sv[0] + sv[1]), 0.5 * (sv[2] + sv[3])))
}

fn check_physical(sigma: &Covariance4) -> Result<(f64, f64)> {
    let (dp, dm) = symplectic_eigs(sigma, false)?;
    if dm < 0.5 - PHYS_TOL {
        return Err(Error::UnphysicalCovariance(format!(
            "smallest symplectic eigenvalue {dm} < 1/2"
        )));
    }
    Ok((dp, dm))
}

/// Smallest symplectic eigenvalue of the partial transpose.
pub fn d_minus_tilde(sigma: &Covariance4) -> Result<f64> {
    check_physical(sigma)?;
    Ok(symplectic_eigs(sigma, true)?.1)
}

/// max(0, −ln 2d̃₋)
pub fn log_negativity(sigma: &Covariance4) -> Result<f64> {
    let dm = d_minus_tilde(sigma)?;
    if sigma.c_block_is_zero() {
        // product state; skip the rounding noise in d̃₋
        return Ok(0.0);
    }
    Ok((-(2.0 * dm).ln()).max(0.0))
}

/// (x+½)ln(x+½) − (x−½)ln(x−½), the entropy of a thermal mode with
/// symplectic eigenvalue x.
pub fn entropy_function(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.5 - PHYS_TOL {
        return Err(Error::UnphysicalCovariance(format!("symplectic eigenvalue {x} < 1/2")));
    }
    if x <= 0.5 {
        return Ok(0.0);
    }
    let (p, m) = (x + 0.5, x - 0.5);
    Ok(p * p.ln() - if m > 0.0 { m * m.ln() } else { 0.0 })
}

/// f(√DetA) + f(√DetB) − f(d₊) − f(d₋)
pub fn mutual_information(sigma: &Covariance4) -> Result<f64> {
    let (dp, dm) = check_physical(sigma)?;
    if sigma.c_block_is_zero() {
        return Ok(0.0);
    }
    let sa = entropy_function(sigma.det_a().max(0.0).sqrt())?;
    let sb = entropy_function(sigma.det_b().max(0.0).sqrt())?;
    Ok(sa + sb - entropy_function(dp)? - entropy_function(dm)?)
}
