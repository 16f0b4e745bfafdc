//! Evaluation of the Weyl function pair (M+, M−) and D = M+ − M−.
//!
//! Every pair is backed by a finite-zone quadruple: the constant potential is
//! the gapless case, and the two elliptic one-zone families are the two
//! edge-divisor configurations of the same band picture (Q ≡ 0, divisor at a
//! gap edge). M± are Herglotz on ℂ₊, real λ takes boundary values from above,
//! and ℂ₋ is reached by the symmetric reflection `M(z̄) = conj M(z)`. A
//! separate "star" evaluator continues the pair through the spectral gaps
//! into ℂ₋ for argument-principle work around real points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bands::{solve_qs, BandStructure, BandsError, FiniteZoneData, Interval, Side};

#[derive(Debug, Error)]
pub enum WeylError {
    #[error("λ coincides with the real pole at θ = {theta}")]
    PoleHit { theta: f64 },
    #[error(transparent)]
    Bands(#[from] BandsError),
}

/// Square root with the cut along ℝ₊, fixed by √(−1) = i; values on the cut
/// are the limits from above, so √x ≥ 0 for x ≥ 0.
pub fn sqrt_cut(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        z.sqrt()
    } else {
        -z.sqrt()
    }
}

/// Which closed-form family a pair was built from (all evaluate through the
/// same finite-zone machinery).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    FiniteZone,
    Const { a: f64 },
    Example1 { xi: f64, k2: f64 },
    Example2 { xi: f64, k2: f64 },
}

/// Evaluator for (M+, M−) on ℂ₊ and its boundary.
#[derive(Clone, Debug)]
pub struct WeylPair {
    pub data: FiniteZoneData,
    pub family: Family,
    /// Literal reading of the second elliptic family: M−(λ) = −M+(λ)
    /// instead of the default M−(λ) = −M+(−λ).
    pub literal_minus: bool,
}

/// JSON description of a closed-form pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosedFormSpec {
    pub kind: String,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub k2: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub literal_minus: bool,
}

fn check_modulus(k2: f64) -> Result<(), BandsError> {
    if !(0.0 < k2 && k2 < 1.0) {
        return Err(BandsError::InvalidBands(format!("k² = {k2} must lie in (0, 1)")));
    }
    Ok(())
}

impl WeylPair {
    pub fn from_data(data: FiniteZoneData) -> Self {
        WeylPair { data, family: Family::FiniteZone, literal_minus: false }
    }

    pub fn finite_zone(b: &BandStructure) -> Result<Self, WeylError> {
        Ok(Self::from_data(solve_qs(b)?))
    }

    /// Constant potential `q ≡ a`: bands `[a, ∞)`, `M± = ±i/√(±λ − a)`.
    pub fn constant(a: f64) -> Result<Self, WeylError> {
        let b = BandStructure { mu_r: vec![a], mu_l: vec![], xi: vec![], signs: vec![] };
        let mut w = Self::finite_zone(&b)?;
        w.family = Family::Const { a };
        Ok(w)
    }

    /// One-zone elliptic family with bands `[ξ, ξ+k²] ∪ [ξ+1, ∞)` and the
    /// divisor at the upper edge `ξ+1` (so S vanishes at both edges of the
    /// first band): `M+(λ) = i√(λ−(ξ+1)) / √((λ−ξ)(λ−(ξ+k²)))`.
    pub fn example1(xi: f64, k2: f64) -> Result<Self, WeylError> {
        check_modulus(k2)?;
        let b = BandStructure {
            mu_r: vec![xi, xi + 1.0],
            mu_l: vec![xi + k2],
            xi: vec![xi + 1.0],
            signs: vec![1],
        };
        let mut w = Self::finite_zone(&b)?;
        w.family = Family::Example1 { xi, k2 };
        Ok(w)
    }

    /// One-zone elliptic family with the same bands but the divisor at the
    /// gap's left edge `ξ+k²`: `M+(λ) = i√(λ−(ξ+k²)) / √((λ−ξ)(λ−(ξ+1)))`.
    pub fn example2(xi: f64, k2: f64, literal_minus: bool) -> Result<Self, WeylError> {
        check_modulus(k2)?;
        let b = BandStructure {
            mu_r: vec![xi, xi + 1.0],
            mu_l: vec![xi + k2],
            xi: vec![xi + k2],
            signs: vec![1],
        };
        let mut w = Self::finite_zone(&b)?;
        w.family = Family::Example2 { xi, k2 };
        w.literal_minus = literal_minus;
        Ok(w)
    }

    pub fn from_spec(spec: &ClosedFormSpec) -> Result<Self, WeylError> {
        let missing = |f: &str| BandsError::InvalidBands(format!("missing field `{f}`"));
        match spec.kind.as_str() {
            "const" => Self::constant(spec.a.ok_or_else(|| missing("a"))?),
            "example1" => Self::example1(
                spec.xi.ok_or_else(|| missing("xi"))?,
                spec.k2.ok_or_else(|| missing("k2"))?,
            ),
            "example2" => Self::example2(
                spec.xi.ok_or_else(|| missing("xi"))?,
                spec.k2.ok_or_else(|| missing("k2"))?,
                spec.literal_minus,
            ),
            other => Err(BandsError::InvalidBands(format!("unknown closed form `{other}`")).into()),
        }
    }

    /// Real poles of the boundary values of M±.
    pub fn poles(&self, side: Side) -> Vec<f64> {
        let eff = if self.literal_minus { Side::Plus } else { side };
        let tol = 1e-9 * self.data.scale();
        self.data
            .tau
            .iter()
            .filter(|&&t| !self.data.edges.iter().any(|&e| (e - t).abs() <= tol))
            .filter(|&&t| {
                let g = self.data.g_upper(Complex64::new(t, 0.0));
                let q = Complex64::new(self.data.q.eval_real(t), 0.0);
                let numer = match eff {
                    Side::Plus => q + Complex64::i() * g,
                    Side::Minus => (q - Complex64::i() * g).conj(),
                };
                numer.norm() > 1e-10 * (q.norm() + g.norm()).max(1e-300)
            })
            .map(|&t| eff.sign() * t)
            .collect()
    }

    fn pole_check(&self, side: Side, lambda: Complex64) -> Result<(), WeylError> {
        if lambda.im == 0.0 {
            for theta in self.poles(side) {
                if (lambda.re - theta).abs() <= 1e-12 * (1.0 + theta.abs()) {
                    return Err(WeylError::PoleHit { theta });
                }
            }
        }
        Ok(())
    }

    /// M±(λ) for λ ∈ ℂ₊ ∪ ℝ ∪ ℂ₋; real λ is the boundary value from above,
    /// ℂ₋ the symmetric continuation conj M(conj λ).
    pub fn eval_m(&self, side: Side, lambda: Complex64) -> Result<Complex64, WeylError> {
        self.pole_check(side, lambda)?;
        if self.literal_minus && side == Side::Minus {
            return Ok(-self.eval_m(Side::Plus, lambda)?);
        }
        if lambda.im >= 0.0 {
            Ok(self.data.m_upper(side, lambda))
        } else {
            Ok(self.data.m_upper(side, lambda.conj()).conj())
        }
    }

    /// D(λ) = M+(λ) − M−(λ).
    pub fn eval_d(&self, lambda: Complex64) -> Result<Complex64, WeylError> {
        Ok(self.eval_m(Side::Plus, lambda)? - self.eval_m(Side::Minus, lambda)?)
    }

    /// Continuation of M± from ℂ₊ across the spectral gaps into ℂ₋ (the
    /// starred functions used for generalized orders and winding counts).
    /// Not the same as `eval_m` on ℂ₋, which is the second R-function sheet.
    pub fn m_star(&self, side: Side, z: Complex64) -> Complex64 {
        if self.literal_minus && side == Side::Minus {
            return -self.m_star(Side::Plus, z);
        }
        if z.im >= 0.0 {
            return self.data.m_upper(side, z);
        }
        match side {
            Side::Plus => {
                // through-gap continuation of √R: G is purely imaginary on
                // gaps, so the continuation is −conj(G(z̄))
                let g = -self.data.g_upper(z.conj()).conj();
                (self.data.q.eval(z) + Complex64::i() * g) / self.data.s.eval(z)
            }
            Side::Minus => {
                // M− is real on the reflected gaps; Schwarz reflection there
                // gives M−*(z) = H(−z) with H = (Q − i√R)/S on ℂ₊
                let w = -z;
                (self.data.q.eval(w) - Complex64::i() * self.data.g_upper(w)) / self.data.s.eval(w)
            }
        }
    }

    /// Starred difference *M+ − *M−, analytic across the common gaps.
    pub fn d_star(&self, z: Complex64) -> Complex64 {
        self.m_star(Side::Plus, z) - self.m_star(Side::Minus, z)
    }

    /// Bands of the underlying half-line operator (side + support).
    pub fn bands_plus(&self) -> Vec<Interval> {
        self.data.bands()
    }

    pub fn scale(&self) -> f64 {
        self.data.scale()
    }

    /// Fits |M±| along rays in ℂ₊ against the asymptote ±i/√(±λ).
    pub fn asymptotics_check(&self) -> AsymptoticsReport {
        let radii = [1e2, 1e4, 1e6];
        let angles = [
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
            3.0 * std::f64::consts::FRAC_PI_4,
        ];
        let mut entries = Vec::new();
        for side in [Side::Plus, Side::Minus] {
            for &phi in &angles {
                let mut logs = Vec::new();
                let mut last_ratio = Complex64::new(0.0, 0.0);
                for &rho in &radii {
                    let lambda = Complex64::from_polar(rho, phi);
                    let m = self.eval_m(side, lambda).expect("off-axis evaluation");
                    logs.push((rho.ln(), m.norm().ln()));
                    let asym = side.sign() * Complex64::i() / sqrt_cut(side.sign() * lambda);
                    last_ratio = m / asym;
                }
                let exponent = fit_slope(&logs);
                entries.push(RayFit { side, angle: phi, exponent, leading_ratio: last_ratio });
            }
        }
        let mismatch = entries.iter().any(|e| (e.exponent + 0.5).abs() > 0.05);
        AsymptoticsReport { entries, mismatch }
    }
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Copy, Clone, Debug)]
pub struct RayFit {
    pub side: Side,
    pub angle: f64,
    pub exponent: f64,
    /// M(λ)/(±i/√(±λ)) at the outermost sample; → 1 for the true asymptote.
    pub leading_ratio: Complex64,
}

#[derive(Clone, Debug)]
pub struct AsymptoticsReport {
    pub entries: Vec<RayFit>,
    pub mismatch: bool,
}
