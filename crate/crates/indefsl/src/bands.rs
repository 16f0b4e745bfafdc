//! Finite-zone band structures and the polynomial quadruple (P, Q, R, S).
//!
//! A band structure holds the gap edges and divisor points of a finite-zone
//! potential class. From it this module builds real polynomials with
//! `P·S − Q² = R`, from which both Weyl functions derive, and exposes the
//! associated spectral measures: absolutely continuous densities on the bands
//! and point masses at the interior roots of `S`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{PolyError, RealPoly};

/// Which Weyl function / spectral measure a quantity refers to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Closed real interval; endpoints may be ±∞ for half-infinite pieces.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn interior_contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }

    pub fn reflected(&self) -> Self {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

#[derive(Debug, Error)]
pub enum BandsError {
    #[error("invalid band structure: {0}")]
    InvalidBands(String),
    #[error("synthetic division left relative remainder {residual:e}")]
    DivisionRemainder { residual: f64 },
    #[error("root {tau} of S violates gap placement")]
    TauOutOfGap { tau: f64 },
    #[error("Im M{side:?} = {im:e} at λ = {lambda} fails the Herglotz screen")]
    NotHerglotz { lambda: Complex64, im: f64, side: Side },
    #[error("point mass at θ = {theta} has imaginary part {im:e}")]
    ComplexResidue { theta: f64, im: f64 },
    #[error("point mass at θ = {theta} is not positive: {mass}")]
    NonPositiveMass { theta: f64, mass: f64 },
    #[error(transparent)]
    Roots(#[from] PolyError),
}

/// Band edges, gap points, and divisor data defining a finite-zone class.
///
/// `mu_r` lists the right gap edges `r̄μ_0 … r̄μ_N`, `mu_l` the left gap
/// edges `l̄μ_1 … l̄μ_N`; the spectrum of the underlying half-line operator
/// is `[r̄μ_0, l̄μ_1] ∪ … ∪ [r̄μ_N, ∞)`. `xi[j]` is the divisor point in the
/// closed j-th gap and `signs[j] ∈ {±1}` picks the square-root sheet there.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandStructure {
    pub mu_r: Vec<f64>,
    pub mu_l: Vec<f64>,
    pub xi: Vec<f64>,
    pub signs: Vec<i8>,
}

impl BandStructure {
    pub fn n_gaps(&self) -> usize {
        self.mu_l.len()
    }

    pub fn validate(&self) -> Result<(), BandsError> {
        let n = self.mu_l.len();
        if self.mu_r.len() != n + 1 {
            return Err(BandsError::InvalidBands(format!(
                "expected {} right edges for {} gaps, got {}",
                n + 1,
                n,
                self.mu_r.len()
            )));
        }
        if self.xi.len() != n || self.signs.len() != n {
            return Err(BandsError::InvalidBands(format!(
                "expected {n} divisor points and signs, got {} and {}",
                self.xi.len(),
                self.signs.len()
            )));
        }
        for (j, &s) in self.signs.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(BandsError::InvalidBands(format!("signs[{j}] = {s} is not ±1")));
            }
        }
        let edges = self.edges();
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(BandsError::InvalidBands("non-finite edge".into()));
        }
        for w in edges.windows(2) {
            if !(w[0] < w[1]) {
                return Err(BandsError::InvalidBands(format!(
                    "edges must interlace strictly: {} !< {}",
                    w[0], w[1]
                )));
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.mu_l[j], self.mu_r[j + 1]);
            if !(lo <= self.xi[j] && self.xi[j] <= hi) {
                return Err(BandsError::InvalidBands(format!(
                    "divisor point ξ_{} = {} outside its gap [{lo}, {hi}]",
                    j + 1,
                    self.xi[j]
                )));
            }
        }
        for j in 1..n {
            if self.xi[j] == self.xi[j - 1] {
                return Err(BandsError::InvalidBands(
                    "repeated divisor points are not supported".into(),
                ));
            }
        }
        Ok(())
    }

    /// All branch points `r̄μ_0 < l̄μ_1 < r̄μ_1 < …` in ascending order.
    pub fn edges(&self) -> Vec<f64> {
        let mut edges = vec![self.mu_r[0]];
        for j in 0..self.mu_l.len() {
            edges.push(self.mu_l[j]);
            edges.push(self.mu_r[j + 1]);
        }
        edges
    }
}

/// The quadruple (P, Q, R, S) with `P·S − Q² = R`, plus the roots `τ_j` of S
/// and the branch points (roots of R) in ascending order.
#[derive(Clone, Debug)]
pub struct FiniteZoneData {
    pub p: RealPoly,
    pub q: RealPoly,
    pub r: RealPoly,
    pub s: RealPoly,
    pub tau: Vec<f64>,
    pub edges: Vec<f64>,
}

/// Value of an absolutely continuous density at a point.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Density {
    Finite(f64),
    /// Band-edge evaluation where S vanishes: the density behaves like
    /// `|t − t₀|^(−1/2)`.
    Infinite,
}

impl Density {
    pub fn finite(self) -> Option<f64> {
        match self {
            Density::Finite(v) => Some(v),
            Density::Infinite => None,
        }
    }
}

/// A point mass of a spectral measure.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Absolutely continuous densities plus point-mass lists for (dΣ+, dΣ−).
#[derive(Clone, Debug)]
pub struct MeasurePair {
    pub data: FiniteZoneData,
    pub atoms_plus: Vec<Atom>,
    pub atoms_minus: Vec<Atom>,
}

/// `P(λ) = Π(λ − ξ_j)` and `R(λ) = (λ − r̄μ_0)·Π(λ − l̄μ_j)(λ − r̄μ_j)`.
pub fn build_pr(b: &BandStructure) -> Result<(RealPoly, RealPoly), BandsError> {
    b.validate()?;
    let p = RealPoly::from_roots(&b.xi);
    let r = RealPoly::from_roots(&b.edges());
    Ok((p, r))
}

/// Builds the full quadruple: Q is the Lagrange interpolant through
/// `(ξ_j, σ_j·√(−R(ξ_j)))`, S comes from synthetic division of `R + Q²` by P,
/// and the result is validated (identity residual, τ placement, Herglotz
/// screen) before being returned.
pub fn solve_qs(b: &BandStructure) -> Result<FiniteZoneData, BandsError> {
    let (p, r) = build_pr(b)?;
    let n = b.n_gaps();
    let edges = b.edges();

    // Interpolation data for Q: at each divisor point the identity forces
    // Q(ξ_j)² = −R(ξ_j) ≥ 0 (R is nonpositive on closed gaps).
    let mut q = RealPoly::zero();
    if n > 0 {
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            let neg_r = -r.eval_real(b.xi[j]);
            if neg_r < -1e-12 * r.norm1() {
                return Err(BandsError::InvalidBands(format!(
                    "−R(ξ_{}) = {neg_r} is negative",
                    j + 1
                )));
            }
            values.push(f64::from(b.signs[j]) * neg_r.max(0.0).sqrt());
        }
        q = lagrange(&b.xi, &values);
    }

    let numerator = r.add(&q.mul(&q));
    let (s, rem) = numerator.div_rem(&p);
    let residual = rem.norm1() / numerator.norm1().max(1e-300);
    if residual > 1e-9 {
        return Err(BandsError::DivisionRemainder { residual });
    }

    let tau = real_roots_sorted(&s)?;
    if tau.len() != n + 1 {
        return Err(BandsError::TauOutOfGap {
            tau: tau.first().copied().unwrap_or(f64::NAN),
        });
    }
    let scale = span_scale(&edges);
    let tol = 1e-9 * scale;
    if tau[0] > b.mu_r[0] + tol {
        return Err(BandsError::TauOutOfGap { tau: tau[0] });
    }
    for j in 1..=n {
        if tau[j] < b.mu_l[j - 1] - tol || tau[j] > b.mu_r[j] + tol {
            return Err(BandsError::TauOutOfGap { tau: tau[j] });
        }
    }

    let data = FiniteZoneData { p, q, r, s, tau, edges };
    data.check_identity()?;
    data.herglotz_screen()?;
    Ok(data)
}

fn lagrange(nodes: &[f64], values: &[f64]) -> RealPoly {
    let mut acc = RealPoly::zero();
    for (j, (&xj, &yj)) in nodes.iter().zip(values).enumerate() {
        let mut term = RealPoly::constant(yj);
        for (m, &xm) in nodes.iter().enumerate() {
            if m != j {
                term = term.mul(&RealPoly::new(vec![-xm, 1.0])).scale(1.0 / (xj - xm));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

fn real_roots_sorted(s: &RealPoly) -> Result<Vec<f64>, BandsError> {
    let mut out = Vec::new();
    for root in s.roots()? {
        if root.value.im != 0.0 {
            return Err(BandsError::TauOutOfGap { tau: root.value.re });
        }
        for _ in 0..root.multiplicity {
            out.push(root.value.re);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn span_scale(edges: &[f64]) -> f64 {
    let span = edges.last().unwrap_or(&0.0) - edges.first().unwrap_or(&0.0);
    let mag = edges.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    span.max(1.0).max(mag * 1e-3)
}

impl FiniteZoneData {
    pub fn n_gaps(&self) -> usize {
        self.tau.len().saturating_sub(1)
    }

    /// Characteristic length of the band picture, used for relative tolerances.
    pub fn scale(&self) -> f64 {
        span_scale(&self.edges)
    }

    /// Bands of the half-line operator: `[e_0, e_1] ∪ … ∪ [e_{2N}, ∞)`.
    pub fn bands(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut k = 0;
        while k + 1 < self.edges.len() {
            out.push(Interval::new(self.edges[k], self.edges[k + 1]));
            k += 2;
        }
        out.push(Interval::new(self.edges[self.edges.len() - 1], f64::INFINITY));
        out
    }

    /// Bands supporting dΣ for the given side (side − is the reflection).
    pub fn bands_for(&self, side: Side) -> Vec<Interval> {
        match side {
            Side::Plus => self.bands(),
            Side::Minus => {
                let mut v: Vec<Interval> = self.bands().iter().map(Interval::reflected).collect();
                v.reverse();
                v
            }
        }
    }

    pub fn check_identity(&self) -> Result<(), BandsError> {
        let lhs = self.p.mul(&self.s).sub(&self.q.mul(&self.q));
        let diff = lhs.sub(&self.r);
        let denom = self.r.coeffs().iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let num = diff.coeffs().iter().fold(0.0f64, |a, c| a.max(c.abs()));
        if num > 1e-10 * denom.max(1e-300) {
            return Err(BandsError::InvalidBands(format!(
                "PS − Q² − R has coefficient residual {:e}",
                num / denom
            )));
        }
        Ok(())
    }

    /// `√R(z)` on the closed upper half-plane as the product of principal
    /// square roots over the branch points. On band interiors this is real
    /// with `√R/S > 0`, which makes `(Q + i√R)/S` the Herglotz branch.
    pub fn g_upper(&self, z: Complex64) -> Complex64 {
        let mut g = Complex64::new(1.0, 0.0);
        for &e in &self.edges {
            g *= (z - e).sqrt();
        }
        g
    }

    /// M±(λ) for Im λ ≥ 0 (real λ is the boundary value from above).
    pub fn m_upper(&self, side: Side, lambda: Complex64) -> Complex64 {
        match side {
            Side::Plus => {
                (self.q.eval(lambda) + Complex64::i() * self.g_upper(lambda)) / self.s.eval(lambda)
            }
            Side::Minus => {
                let w = -lambda.conj();
                let h = (self.q.eval(w) - Complex64::i() * self.g_upper(w)) / self.s.eval(w);
                h.conj()
            }
        }
    }

    /// Necessary screen for branch/sign correctness: Im M± > 0 on a fixed
    /// log-polar grid in ℂ₊ (25 radii × 8 arguments).
    pub fn herglotz_screen(&self) -> Result<(), BandsError> {
        let scale = self.scale();
        let center = (self.edges[0] + self.edges[self.edges.len() - 1]) / 2.0;
        for ir in 0..25 {
            let rho = scale * 10f64.powf(-3.0 + 6.0 * ir as f64 / 24.0);
            for ia in 1..=8 {
                let phi = std::f64::consts::PI * ia as f64 / 9.0;
                let lambda = Complex64::new(center + rho * phi.cos(), rho * phi.sin());
                for side in [Side::Plus, Side::Minus] {
                    let im = self.m_upper(side, lambda).im;
                    if !(im > 0.0) {
                        return Err(BandsError::NotHerglotz { lambda, im, side });
                    }
                }
            }
        }
        Ok(())
    }

    /// Σ′_ac±(t): `(1/π)·√R(±t)/|S(±t)|` inside the matching bands, 0 outside
    /// the closed bands, and an infinite marker at edges where S vanishes.
    pub fn spectral_density(&self, side: Side, t: f64) -> Density {
        let u = side.sign() * t;
        let bands = self.bands();
        let inside = bands.iter().any(|b| b.interior_contains(u));
        let at_edge = self.edges.iter().any(|&e| e == u);
        if !inside && !at_edge {
            return Density::Finite(0.0);
        }
        let s = self.s.eval_real(u);
        if s == 0.0 {
            return Density::Infinite;
        }
        let r = self.r.eval_real(u).max(0.0);
        Density::Finite(r.sqrt() / (std::f64::consts::PI * s.abs()))
    }

    /// Point masses of dΣ± at `±τ_j` for the interior gap roots of S where the
    /// numerator of M± does not vanish. Masses are minus the residues of M±.
    pub fn discrete_masses(&self, side: Side) -> Result<Vec<Atom>, BandsError> {
        let tol = 1e-9 * self.scale();
        let sp = self.s.derivative();
        let mut out = Vec::new();
        for &tau in &self.tau {
            if self.edges.iter().any(|&e| (e - tau).abs() <= tol) {
                continue;
            }
            let g = self.g_upper(Complex64::new(tau, 0.0));
            let qv = Complex64::new(self.q.eval_real(tau), 0.0);
            // numerator of M+ at τ is Q + i√R; for M− it is the conjugate
            // picture at −λ, i.e. Q − i·conj(√R) there.
            let numer = match side {
                Side::Plus => qv + Complex64::i() * g,
                Side::Minus => (qv - Complex64::i() * g).conj(),
            };
            let numer_scale = self.q.eval_real(tau).abs() + g.norm() + self.r.norm1().sqrt() * 1e-3;
            if numer.norm() <= 1e-10 * numer_scale.max(1e-300) {
                continue; // divisor point sits on this sheet: pole is removable
            }
            let residue = numer / sp.eval_real(tau);
            // Res_θ M± = −mass for a Herglotz pole; for side − the pole sits
            // at θ = −τ and the reflection flips the residue's sign once more.
            let mass_c = match side {
                Side::Plus => -residue,
                Side::Minus => residue.conj(),
            };
            let theta = side.sign() * tau;
            if mass_c.im.abs() > 1e-8 * mass_c.norm().max(1e-300) {
                return Err(BandsError::ComplexResidue { theta, im: mass_c.im });
            }
            let mass = mass_c.re;
            if mass <= 0.0 {
                // a pole grazing a band edge carries numerically-zero mass;
                // only a genuinely negative mass violates the Herglotz property
                if mass.abs() <= 1e-10 * self.scale() {
                    continue;
                }
                return Err(BandsError::NonPositiveMass { theta, mass });
            }
            out.push(Atom { location: theta, mass });
        }
        out.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(out)
    }

    pub fn measures(&self) -> Result<MeasurePair, BandsError> {
        Ok(MeasurePair {
            data: self.clone(),
            atoms_plus: self.discrete_masses(Side::Plus)?,
            atoms_minus: self.discrete_masses(Side::Minus)?,
        })
    }
}

impl MeasurePair {
    pub fn atoms(&self, side: Side) -> &[Atom] {
        match side {
            Side::Plus => &self.atoms_plus,
            Side::Minus => &self.atoms_minus,
        }
    }

    pub fn density(&self, side: Side, t: f64) -> Density {
        self.data.spectral_density(side, t)
    }

    /// Topological support of dΣ±: closed bands plus atom locations.
    pub fn support(&self, side: Side) -> (Vec<Interval>, Vec<f64>) {
        let intervals = self.data.bands_for(side);
        let points = self.atoms(side).iter().map(|a| a.location).collect();
        (intervals, points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_zone() -> BandStructure {
        BandStructure {
            mu_r: vec![0.0, 1.0],
            mu_l: vec![0.5],
            xi: vec![0.75],
            signs: vec![1],
        }
    }

    #[test]
    fn build_pr_one_zone() {
        let (p, r) = build_pr(&one_zone()).unwrap();
        assert_eq!(p.coeffs(), &[-0.75, 1.0]);
        // λ(λ−0.5)(λ−1) = λ³ − 1.5λ² + 0.5λ
        assert_relative_eq!(r.coeffs()[0], 0.0);
        assert_relative_eq!(r.coeffs()[1], 0.5);
        assert_relative_eq!(r.coeffs()[2], -1.5);
        assert_relative_eq!(r.coeffs()[3], 1.0);
    }

    #[test]
    fn build_pr_gapless() {
        let b = BandStructure { mu_r: vec![2.0], mu_l: vec![], xi: vec![], signs: vec![] };
        let (p, r) = build_pr(&b).unwrap();
        assert_eq!(p.coeffs(), &[1.0]);
        assert_eq!(r.coeffs(), &[-2.0, 1.0]);
    }

    #[test]
    fn build_pr_two_zone_degrees() {
        let b = BandStructure {
            mu_r: vec![0.0, 1.0, 3.0],
            mu_l: vec![0.5, 2.0],
            xi: vec![0.75, 2.5],
            signs: vec![1, -1],
        };
        let (p, r) = build_pr(&b).unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(r.degree(), Some(5));
    }

    #[test]
    fn solve_qs_one_zone() {
        let d = solve_qs(&one_zone()).unwrap();
        // Q ≡ +√(−R(0.75)) = √0.046875
        assert_eq!(d.q.degree(), Some(0));
        assert_relative_eq!(d.q.coeffs()[0], 0.046875f64.sqrt(), max_relative = 1e-12);
        assert_eq!(d.s.degree(), Some(2));
        assert_relative_eq!(d.s.leading(), 1.0, max_relative = 1e-12);
        // identity at 20 random points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let t: f64 = rng.gen_range(-3.0..3.0);
            let lhs = d.p.eval_real(t) * d.s.eval_real(t) - d.q.eval_real(t).powi(2);
            let rhs = d.r.eval_real(t);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_qs_gapless() {
        let b = BandStructure { mu_r: vec![-1.0], mu_l: vec![], xi: vec![], signs: vec![] };
        let d = solve_qs(&b).unwrap();
        assert!(d.q.is_zero());
        assert_eq!(d.s.coeffs(), &[1.0, 1.0]);
        assert_eq!(d.tau, vec![-1.0]);
    }

    #[test]
    fn solve_qs_edge_divisor() {
        let b = BandStructure {
            mu_r: vec![0.0, 1.0],
            mu_l: vec![0.5],
            xi: vec![0.5],
            signs: vec![1],
        };
        let d = solve_qs(&b).unwrap();
        assert!(d.q.is_zero());
        // S = R/P = λ(λ−1)
        assert_relative_eq!(d.s.eval_real(0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.s.eval_real(1.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.s.eval_real(2.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn both_signs_give_valid_quadruples() {
        for sign in [1i8, -1] {
            let mut b = one_zone();
            b.signs = vec![sign];
            let d = solve_qs(&b).unwrap();
            d.check_identity().unwrap();
            d.herglotz_screen().unwrap();
            assert_relative_eq!(
                d.q.coeffs()[0],
                f64::from(sign) * 0.046875f64.sqrt(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn density_gapless() {
        let b = BandStructure { mu_r: vec![0.0], mu_l: vec![], xi: vec![], signs: vec![] };
        let d = solve_qs(&b).unwrap();
        let v = d.spectral_density(Side::Plus, 4.0).finite().unwrap();
        assert_relative_eq!(v, 1.0 / (std::f64::consts::PI * 2.0), max_relative = 1e-12);
        assert_eq!(d.spectral_density(Side::Plus, -1.0), Density::Finite(0.0));
        // side − is the reflection
        let vm = d.spectral_density(Side::Minus, -4.0).finite().unwrap();
        assert_relative_eq!(vm, v, max_relative = 1e-12);
    }

    #[test]
    fn density_matches_boundary_imaginary_part() {
        let d = solve_qs(&one_zone()).unwrap();
        let t = 0.25;
        let dens = d.spectral_density(Side::Plus, t).finite().unwrap();
        assert!(dens > 0.0);
        let m = d.m_upper(Side::Plus, Complex64::new(t, 1e-9));
        assert_relative_eq!(std::f64::consts::PI * dens, m.im, max_relative = 1e-6);
        // zero in the open gap
        assert_eq!(d.spectral_density(Side::Plus, 0.75), Density::Finite(0.0));
    }

    #[test]
    fn density_infinite_at_edge_root_of_s() {
        let b = BandStructure {
            mu_r: vec![0.0, 1.0],
            mu_l: vec![0.5],
            xi: vec![0.5],
            signs: vec![1],
        };
        let d = solve_qs(&b).unwrap();
        assert_eq!(d.spectral_density(Side::Plus, 0.0), Density::Infinite);
    }

    #[test]
    fn masses_empty_for_gapless_and_edge_divisor() {
        let b = BandStructure { mu_r: vec![1.0], mu_l: vec![], xi: vec![], signs: vec![] };
        let d = solve_qs(&b).unwrap();
        assert!(d.discrete_masses(Side::Plus).unwrap().is_empty());

        let b = BandStructure {
            mu_r: vec![0.0, 1.0],
            mu_l: vec![0.5],
            xi: vec![0.5],
            signs: vec![1],
        };
        let d = solve_qs(&b).unwrap();
        assert!(d.discrete_masses(Side::Plus).unwrap().is_empty());
        assert!(d.discrete_masses(Side::Minus).unwrap().is_empty());
    }

    #[test]
    fn mass_matches_contour_integral() {
        // Q(τ)² = −R(τ) at every root of S, so each interior τ feeds an atom
        // on exactly one side, selected by the divisor sign. With σ = −1 the
        // gap root τ1 ∈ (0.5, 1) carries the side + atom.
        let mut b = one_zone();
        b.signs = vec![-1];
        let d = solve_qs(&b).unwrap();
        let atoms = d.discrete_masses(Side::Plus).unwrap();
        assert_eq!(atoms.len(), 1);
        let gap_atom = atoms[0];
        let theta = gap_atom.location;
        assert!(0.5 < theta && theta < 1.0);
        // −(1/2πi)∮ M+ dλ around θ equals the mass
        let radius = 0.5 * (theta - 0.5).min(1.0 - theta);
        let n = 4096;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let z = Complex64::new(theta + radius * phi.cos(), radius * phi.sin());
            // integrand uses the ℂ₊ branch reflected symmetrically into ℂ₋
            let m = if z.im >= 0.0 {
                d.m_upper(Side::Plus, z)
            } else {
                d.m_upper(Side::Plus, z.conj()).conj()
            };
            let dz = Complex64::i() * (z - theta);
            acc += m * dz;
        }
        // mass = −Res = −(1/2πi)·∮ M dλ = −acc/(i·n)
        let contour_mass = -acc.im / n as f64;
        assert_relative_eq!(contour_mass, gap_atom.mass, max_relative = 1e-6);

        // the other root τ0 < 0 carries the side − atom at −τ0 > 0
        let atoms_m = d.discrete_masses(Side::Minus).unwrap();
        assert_eq!(atoms_m.len(), 1);
        assert_relative_eq!(atoms_m[0].location, -d.tau[0], max_relative = 1e-10);
        assert!(atoms_m[0].mass > 0.0);

        // with σ = +1 the roles swap: side + atom at τ0, side − atom at −τ1
        let d = solve_qs(&one_zone()).unwrap();
        let ap = d.discrete_masses(Side::Plus).unwrap();
        let am = d.discrete_masses(Side::Minus).unwrap();
        assert_eq!((ap.len(), am.len()), (1, 1));
        assert_relative_eq!(ap[0].location, d.tau[0], max_relative = 1e-10);
        assert_relative_eq!(am[0].location, -d.tau[1], max_relative = 1e-10);
    }

    #[test]
    fn random_instances_satisfy_identity_and_screen() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let n = rng.gen_range(1..=2usize);
            let mut pts: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
            pts.sort_by(f64::total_cmp);
            if pts.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let mu_r: Vec<f64> = std::iter::once(pts[0])
                .chain((1..=n).map(|j| pts[2 * j]))
                .collect();
            let mu_l: Vec<f64> = (1..=n).map(|j| pts[2 * j - 1]).collect();
            let xi: Vec<f64> = (1..=n)
                .map(|j| {
                    let a = pts[2 * j - 1];
                    let b = pts[2 * j];
                    a + (b - a) * rng.gen_range(0.0..1.0)
                })
                .collect();
            let signs: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let b = BandStructure { mu_r, mu_l, xi, signs };
            let d = solve_qs(&b).unwrap();
            // spot-check the identity at 50 random points
            for _ in 0..50 {
                let t: f64 = rng.gen_range(-5.0..5.0);
                let lhs = d.p.eval_real(t) * d.s.eval_real(t) - d.q.eval_real(t).powi(2);
                assert_relative_eq!(lhs, d.r.eval_real(t), max_relative = 1e-9, epsilon = 1e-9);
            }
            for band in d.bands() {
                let t = if band.hi.is_finite() {
                    0.5 * (band.lo + band.hi)
                } else {
                    band.lo + 1.0
                };
                if let Density::Finite(v) = d.spectral_density(Side::Plus, t) {
                    assert!(v >= 0.0);
                }
            }
        }
    }

    #[test]
    fn corrupted_branch_data_fails_herglotz_screen() {
        let good = solve_qs(&one_zone()).unwrap();
        // move a root of S into a band interior: Im M+ changes sign there
        let tau1 = good.tau[1];
        let bad = FiniteZoneData {
            s: RealPoly::from_roots(&[0.25, tau1]),
            tau: vec![0.25, tau1],
            ..good
        };
        match bad.herglotz_screen() {
            Err(BandsError::NotHerglotz { .. }) => {}
            other => panic!("expected NotHerglotz, got {other:?}"),
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        let mut b = one_zone();
        b.mu_l = vec![1.5];
        assert!(matches!(build_pr(&b), Err(BandsError::InvalidBands(_))));

        let mut b = one_zone();
        b.xi = vec![0.2];
        assert!(matches!(build_pr(&b), Err(BandsError::InvalidBands(_))));
    }
}
