//! Time sweeps of the squeezing-based entanglement measures, oracle
//! validation, and mean-field evolution tables, plus their text output.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, StateSpace, TwoModeSpace};
use crate::gaussian::{self, Covariance4, SqueezeSpec};
use crate::hartree_fock::{self, MeanFields, ShortTimeModel, ThermalSum};
use crate::lindblad::{self, LindbladGenerator, ModelParams};
use crate::numerics::{self, C64};
use crate::su11::{self, SU11Coeffs};
use crate::tfd::{self, DoubledSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// η = 0: two-mode squeezing.
    EtaZero,
    /// η ≠ 0: two single-mode squeezed modes.
    EtaNonzero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    #[default]
    FromFormula,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Δ held at Δ(0).
    #[default]
    Constant,
    /// Δ(t) from the short-time mean-field formulas.
    ShortTime,
}

fn default_c() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    2
}

fn default_truncation() -> usize {
    25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub case: Case,
    pub gamma1: f64,
    #[serde(alias = "W")]
    pub w: f64,
    pub delta0: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub phi_mode: PhiMode,
    #[serde(default)]
    pub phi_fixed: f64,
    pub t_max: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub delta_mode: DeltaMode,
    #[serde(default)]
    pub nbar1: f64,
    #[serde(default)]
    pub nbar2: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Δ₁(0), used by the Δ₁ evolution.
    #[serde(default)]
    pub delta1: f64,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("gamma1", self.gamma1),
            ("w", self.w),
            ("delta0", self.delta0),
            ("c", self.c),
            ("eta", self.eta),
            ("phi_fixed", self.phi_fixed),
            ("t_max", self.t_max),
            ("nbar1", self.nbar1),
            ("nbar2", self.nbar2),
            ("delta1", self.delta1),
        ];
        for (name, x) in finite {
            if !x.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.t_max <= 0.0 {
            return Err(Error::Config(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if self.n_steps < 2 {
            return Err(Error::Config(format!("n_steps must be >= 2, got {}", self.n_steps)));
        }
        if self.truncation < 2 {
            return Err(Error::Config(format!(
                "truncation must be >= 2, got {}",
                self.truncation
            )));
        }
        if self.gamma1 < 0.0 || self.w < 0.0 {
            return Err(Error::Config("gamma1 and w must be >= 0".into()));
        }
        if self.nbar1 < 0.0 || self.nbar2 < 0.0 {
            return Err(Error::Config("nbar1 and nbar2 must be >= 0".into()));
        }
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be >= 1".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_steps - 1) as f64;
        (0..self.n_steps).map(|i| self.t_max * i as f64 / last).collect()
    }

    fn short_time_model(&self) -> Result<(ShortTimeModel, ThermalSum)> {
        let fields = MeanFields::new(
            C64::new(self.delta0, 0.0),
            C64::new(self.delta1, 0.0),
            C64::new(self.c, 0.0),
        );
        Ok((
            ShortTimeModel::new(self.gamma1, self.w, fields)?,
            ThermalSum::new(self.nbar1, self.nbar2, self.n_max)?,
        ))
    }

    fn delta_at(&self, t: f64, model: &ShortTimeModel, thermal: &ThermalSum) -> Result<C64> {
        match (self.delta_mode, self.case) {
            (DeltaMode::Constant, _) => Ok(C64::new(self.delta0, 0.0)),
            (DeltaMode::ShortTime, Case::EtaZero) => hartree_fock::delta_case1(t, model, thermal),
            (DeltaMode::ShortTime, Case::EtaNonzero) => hartree_fock::delta_case2(t, model, thermal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub r_mag: f64,
    pub phi: f64,
    pub d_minus_tilde: f64,
    #[serde(rename = "E_N")]
    pub e_n: f64,
    #[serde(rename = "I_M")]
    pub i_m: f64,
}

/// Squeezing and covariance at one time point.
pub fn squeezing_at(cfg: &SweepConfig, t: f64, delta: C64) -> Result<(SqueezeSpec, Covariance4)> {
    let (r, phi) = match cfg.case {
        Case::EtaZero => hartree_fock::squeeze_case1(t, cfg.gamma1, cfg.w, delta),
        Case::EtaNonzero => {
            let s = hartree_fock::squeeze_case2(t, cfg.gamma1, cfg.w, delta, cfg.eta);
            (s.r_a.norm(), s.phi_a)
        }
    };
    let phi = match cfg.phi_mode {
        PhiMode::FromFormula => phi,
        PhiMode::Fixed => cfg.phi_fixed,
    } + 0.0; // no signed zero in output
    let spec = SqueezeSpec::new(r, phi)?;
    let sigma = match cfg.case {
        Case::EtaZero => gaussian::cov_two_mode_squeezed(&spec),
        Case::EtaNonzero => gaussian::cov_two_single_mode_squeezed(&spec),
    };
    Ok((spec, sigma))
}

fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let (model, thermal) = cfg.short_time_model()?;
    cfg.times()
        .into_iter()
        .map(|t| {
            let delta = cfg.delta_at(t, &model, &thermal)?;
            let (spec, sigma) = squeezing_at(cfg, t, delta)?;
            Ok(SweepRow {
                t,
                r_mag: spec.r_mag,
                phi: spec.phi,
                d_minus_tilde: gaussian::d_minus_tilde(&sigma)?,
                e_n: gaussian::log_negativity(&sigma)?,
                i_m: gaussian::mutual_information(&sigma)?,
            })
        })
        .collect()
}

/// Logarithmic-negativity sweep.
pub fn run_negativity_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    run_sweep(cfg)
}

/// Mutual-information sweep (same rows; the headline column differs).
pub fn run_mutualinfo_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    run_sweep(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub t: f64,
    pub delta: C64,
    pub delta1: C64,
}

/// Δ(t) and Δ₁(t) from the short-time formulas.
pub fn run_delta_evolution(cfg: &SweepConfig) -> Result<Vec<DeltaRow>> {
    cfg.validate()?;
    let (model, thermal) = cfg.short_time_model()?;
    cfg.times()
        .into_iter()
        .map(|t| {
            let delta = match cfg.case {
                Case::EtaZero => hartree_fock::delta_case1(t, &model, &thermal)?,
                Case::EtaNonzero => hartree_fock::delta_case2(t, &model, &thermal)?,
            };
            let delta1 = hartree_fock::delta1_case2(t, &model, &thermal)?;
            Ok(DeltaRow { t, delta, delta1 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(residual: f64, threshold: f64) -> Self {
        Self {
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

pub type OracleReport = BTreeMap<String, CheckResult>;

pub const TFD_THRESHOLD: f64 = 1e-10;
pub const NEGATIVITY_THRESHOLD: f64 = 1e-6;
pub const MUTUAL_INFO_THRESHOLD: f64 = 1e-5;
pub const DISENTANGLE_THRESHOLD: f64 = 1e-12;
pub const DISENTANGLE_FOCK_THRESHOLD: f64 = 1e-8;

fn oracle_model() -> ModelParams {
    ModelParams {
        eps0: 1.0,
        eps1: 1.3,
        g1: 0.4,
        e1: C64::new(0.8, 0.0),
        omega1: 0.0,
        gamma1: 0.1,
    }
}

/// Max entry of (−iĤ₁)vec(ρ) − vec(master_rhs(ρ)) over `samples` random states.
pub fn tfd_residual(levels: usize, samples: usize, seed: u64) -> Result<f64> {
    let ds = DoubledSpace::new(TwoModeSpace::symmetric(levels)?);
    let p = oracle_model();
    let gen = LindbladGenerator::new(&p, &ds.physical)?;
    let l = tfd::liouvillian_superoperator(&p, &ds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_density(&mut rng, &ds.physical)?;
        let lhs = l.apply(&tfd::vec(&rho, &ds)?.amplitudes);
        let rhs = lindblad::master_rhs(&rho, &p, &gen, 0.0)?;
        for (x, y) in lhs.iter().zip(rhs.as_slice()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// Random full-rank density matrix (Ginibre ensemble).
pub fn random_density(rng: &mut impl Rng, space: &TwoModeSpace) -> Result<DensityMatrix> {
    let n = space.dim();
    let g = numerics::ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = g.matmul(&g.dagger());
    let m = m.scale_real(1.0 / m.trace().re).hermitian_part();
    DensityMatrix::new(StateSpace::Two(space.clone()), m)
}

fn tmsv_density(levels: usize, r: f64) -> Result<DensityMatrix> {
    let sp = TwoModeSpace::symmetric(levels)?;
    let psi = fock::two_mode_squeezed_vacuum(&sp, r, 0.0);
    DensityMatrix::pure(StateSpace::Two(sp), &psi)
}

/// (|E_N gaussian − E_N fock|, |I_M gaussian − I_M fock|) for the two-mode
/// squeezed vacuum at squeeze r.
pub fn gaussian_vs_fock(r: f64, negativity_levels: usize, entropy_levels: usize) -> Result<(f64, f64)> {
    let sigma = gaussian::cov_two_mode_squeezed(&SqueezeSpec::new(r, 0.0)?);
    let en = lindblad::fock_log_negativity(&tmsv_density(negativity_levels, r)?)?;
    let im = lindblad::fock_mutual_information(&tmsv_density(entropy_levels, r)?)?;
    Ok((
        (gaussian::log_negativity(&sigma)? - en).abs(),
        (gaussian::mutual_information(&sigma)? - im).abs(),
    ))
}

/// Draw su(1,1) coefficients with |φ| ≤ 2 and a factorization denominator
/// of at least 1e-3.
pub fn draw_su11_coeffs(rng: &mut impl Rng, count: usize) -> Vec<SU11Coeffs> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut z = || C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let c = SU11Coeffs::new(z(), z(), z());
        let phi = c.phi();
        let s = if phi.norm() < 1e-4 {
            C64::new(1.0, 0.0)
        } else {
            phi.sinh() / phi
        };
        let den = phi.cosh() - 0.5 * c.xi3 * s;
        if phi.norm() <= 2.0 && den.norm() >= 1e-3 {
            out.push(c);
        }
    }
    out
}

/// Worst relative residual between the 2×2 single exponential and the
/// factored product over `count` draws.
pub fn disentangle_residual(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for c in draw_su11_coeffs(&mut rng, count) {
        let g = su11::disentangle(&c)?;
        let direct = su11::rep2x2(&c)?;
        let product = su11::rep2x2_factored(&g);
        worst = worst.max(direct.max_abs_diff(&product) / direct.max_abs().max(1.0));
    }
    Ok(worst)
}

/// Factored vs direct evolution on the Fock space for inputs |0,0⟩ and |1,1⟩.
pub fn disentangle_fock_residual(levels: usize) -> Result<f64> {
    let sp = TwoModeSpace::symmetric(levels)?;
    let k = su11::two_mode_generators(&sp);
    let coeffs = [
        SU11Coeffs::new(C64::new(0.0, -1.5), C64::new(0.1, -0.05), C64::new(0.1, -0.05)),
        SU11Coeffs::new(C64::new(0.3, 0.2), C64::new(-0.2, 0.1), C64::new(0.15, 0.05)),
        SU11Coeffs::new(C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(-0.5, 0.0)),
    ];
    let mut worst: f64 = 0.0;
    for c in &coeffs {
        let g = su11::disentangle(c)?;
        for (na, nb) in [(0, 0), (1, 1)] {
            let psi = sp.basis_vector(na, nb);
            let a = k.evolve_factored(&psi, &g, C64::new(0.0, 0.0))?;
            let b = k.evolve_direct(&psi, c, C64::new(0.0, 0.0))?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    Ok(worst)
}

/// All oracle checks at the given truncation, squeeze and seed.
pub fn run_oracle_validation(truncation: usize, r: f64, seed: u64) -> Result<OracleReport> {
    if truncation < 3 {
        return Err(Error::Config(format!("truncation must be >= 3, got {truncation}")));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Config(format!("r must be finite and >= 0, got {r}")));
    }
    let mut report = OracleReport::new();
    let tfd_levels = truncation.min(5);
    report.insert(
        "tfd_equivalence".into(),
        CheckResult::new(tfd_residual(tfd_levels, 20, seed)?, TFD_THRESHOLD),
    );
    let (en, im) = gaussian_vs_fock(r, truncation.max(25), truncation.max(30))?;
    report.insert("log_negativity".into(), CheckResult::new(en, NEGATIVITY_THRESHOLD));
    report.insert("mutual_information".into(), CheckResult::new(im, MUTUAL_INFO_THRESHOLD));
    report.insert(
        "disentangle_2x2".into(),
        CheckResult::new(disentangle_residual(100, seed)?, DISENTANGLE_THRESHOLD),
    );
    report.insert(
        "disentangle_fock".into(),
        CheckResult::new(
            disentangle_fock_residual(truncation.max(30))?,
            DISENTANGLE_FOCK_THRESHOLD,
        ),
    );
    Ok(report)
}

/// printf-style `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mant), sign, exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (16 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_header(out: &mut impl Write, command: &str, cfg_json: &str) -> std::io::Result<()> {
    writeln!(out, "# tfdyn {command}")?;
    writeln!(out, "# config {cfg_json}")
}

pub fn write_sweep_csv(
    out: &mut impl Write,
    command: &str,
    cfg: &SweepConfig,
    rows: &[SweepRow],
) -> std::io::Result<()> {
    write_header(out, command, &cfg.to_json())?;
    writeln!(out, "t,r_mag,phi,d_minus_tilde,E_N,I_M")?;
    for r in rows {
        let cols = [r.t, r.r_mag, r.phi, r.d_minus_tilde, r.e_n, r.i_m].map(format_g17);
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

pub fn write_delta_csv(out: &mut impl Write, cfg: &SweepConfig, rows: &[DeltaRow]) -> std::io::Result<()> {
    write_header(out, "delta-evolve", &cfg.to_json())?;
    writeln!(out, "t,re_delta,im_delta,re_delta1,im_delta1")?;
    for r in rows {
        let cols = [r.t, r.delta.re, r.delta.im, r.delta1.re, r.delta1.im].map(format_g17);
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_sweep(case: Case) -> SweepConfig {
        SweepConfig {
            case,
            gamma1: 0.1,
            w: 1.5,
            delta0: 0.1,
            c: 1.0,
            eta: 0.0,
            phi_mode: PhiMode::FromFormula,
            phi_fixed: 0.0,
            t_max: 10.0,
            n_steps: 101,
            delta_mode: DeltaMode::Constant,
            nbar1: 0.0,
            nbar2: 0.0,
            n_max: 2,
            truncation: 25,
            delta1: 0.0,
        }
    }

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (0.0, "0"),
            (6.02214076e23, "6.0221407599999999e+23"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g17(x), s, "{x}");
        }
    }

    #[test]
    fn config_parsing() {
        let cfg =
            SweepConfig::from_json(r#"{"case":"eta_zero","gamma1":0.1,"w":1.5,"delta0":0.1,"t_max":10,"n_steps":5}"#)
                .unwrap();
        assert_eq!(cfg.n_max, 2);
        assert_eq!(cfg.delta_mode, DeltaMode::Constant);
        assert_eq!(cfg.c, 1.0);
        assert_eq!(cfg.times(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        let unknown = SweepConfig::from_json(
            r#"{"case":"eta_zero","gamma1":0.1,"w":1.5,"delta0":0.1,"t_max":10,"n_steps":5,"bogus":1}"#,
        );
        assert!(matches!(unknown, Err(Error::Config(_))));
        let bad =
            SweepConfig::from_json(r#"{"case":"eta_zero","gamma1":0.1,"w":1.5,"delta0":0.1,"t_max":0,"n_steps":5}"#);
        assert!(matches!(bad, Err(Error::Config(_))));
        let mut cfg2 = cfg.clone();
        cfg2.n_steps = 1;
        assert!(cfg2.validate().is_err());
        assert_eq!(SweepConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn case1_sweep_matches_closed_form() {
        let rows = run_negativity_sweep(&base_sweep(Case::EtaZero)).unwrap();
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0].e_n, 0.0);
        for w in rows.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].e_n >= w[0].e_n);
        }
        for r in &rows[1..] {
            assert!(r.e_n > 0.0);
            assert!((r.e_n - 2.0 * r.r_mag).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_delta_gives_no_correlations() {
        let mut cfg = base_sweep(Case::EtaZero);
        cfg.delta0 = 0.0;
        for r in run_mutualinfo_sweep(&cfg).unwrap() {
            assert_eq!((r.e_n, r.i_m), (0.0, 0.0));
        }
    }

    #[test]
    fn mutual_information_sweep_closed_form() {
        let mut cfg = base_sweep(Case::EtaZero);
        cfg.w = 0.1;
        let rows = run_mutualinfo_sweep(&cfg).unwrap();
        assert_eq!(rows[0].i_m, 0.0);
        for r in &rows {
            let x = 0.5 * (2.0 * r.r_mag).cosh();
            let expected = 2.0 * gaussian::entropy_function(x).unwrap();
            assert!((r.i_m - expected).abs() < 1e-9);
            assert!(r.i_m >= 0.0);
        }
    }

    #[test]
    fn case2_eta_zero_uses_single_mode_pair() {
        let cfg = base_sweep(Case::EtaNonzero);
        for r in run_negativity_sweep(&cfg).unwrap() {
            let s = hartree_fock::squeeze_case2(r.t, 0.1, 1.5, C64::new(0.1, 0.0), 0.0);
            assert_eq!(s.r_a, s.r_b);
            let sigma = gaussian::cov_two_single_mode_squeezed(&SqueezeSpec::new(s.r_a.norm(), 0.75 * r.t).unwrap());
            assert!((r.e_n - gaussian::log_negativity(&sigma).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_phase_and_short_time_modes() {
        let mut cfg = base_sweep(Case::EtaNonzero);
        cfg.phi_mode = PhiMode::Fixed;
        cfg.phi_fixed = std::f64::consts::FRAC_PI_4;
        for r in run_negativity_sweep(&cfg).unwrap() {
            assert_eq!(r.phi, std::f64::consts::FRAC_PI_4);
            assert!((r.e_n - 2.0 * r.r_mag).abs() < 1e-9);
        }
        cfg.delta_mode = DeltaMode::ShortTime;
        cfg.eta = 0.2;
        cfg.nbar1 = 0.3;
        let rows = run_negativity_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.e_n >= 0.0 && r.i_m >= -1e-10));
    }

    #[test]
    fn delta_evolution_cases() {
        let mut cfg = base_sweep(Case::EtaZero);
        cfg.t_max = 1.0;
        cfg.n_steps = 11;
        cfg.c = 0.5;
        let rows = run_delta_evolution(&cfg).unwrap();
        let slope = rows[1].delta.im / rows[1].t;
        assert!(slope < 0.0);
        for r in &rows {
            assert!((r.delta.im - slope * r.t).abs() < 1e-15);
        }

        let mut cfg = base_sweep(Case::EtaNonzero);
        cfg.c = 0.5;
        let rows = run_delta_evolution(&cfg).unwrap();
        assert!((rows[0].delta - 0.05).norm() < 1e-16);
        cfg.gamma1 = 0.0;
        for r in run_delta_evolution(&cfg).unwrap() {
            assert!((r.delta - 0.05).norm() < 1e-16);
        }
    }

    #[test]
    fn csv_output_is_deterministic() {
        let cfg = base_sweep(Case::EtaZero);
        let rows = run_negativity_sweep(&cfg).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_sweep_csv(&mut a, "sweep-negativity", &cfg, &rows).unwrap();
        write_sweep_csv(&mut b, "sweep-negativity", &cfg, &run_negativity_sweep(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# "));
        assert_eq!(lines[2], "t,r_mag,phi,d_minus_tilde,E_N,I_M");
        assert_eq!(lines.len(), 3 + 101);
        assert!(lines[3].starts_with("0,0,0,0.5"), "{}", lines[3]);
    }

    #[test]
    fn oracle_validation_small() {
        let report = run_oracle_validation(4, 0.3, 7).unwrap();
        for (name, check) in &report {
            assert!(check.pass, "{name}: {check:?}");
        }
        let zero = run_oracle_validation(3, 0.0, 1).unwrap();
        assert_eq!(zero["log_negativity"].residual, 0.0);
        assert!(matches!(run_oracle_validation(1, 0.3, 7), Err(Error::Config(_))));
    }
}
