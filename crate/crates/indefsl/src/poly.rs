//! Real polynomial arithmetic and complex root finding.
//!
//! Coefficients are stored in ascending degree order. Roots are found by
//! Aberth's simultaneous iteration with a Newton polish and relative-tolerance
//! clustering for multiple roots.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("root iteration failed to converge after {0} iterations")]
    NonConvergence(usize),
    #[error("cannot take roots of a polynomial of degree < 1")]
    DegreeTooLow,
}

/// A real polynomial, coefficients ascending in degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl RealPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = RealPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = Self::constant(1.0);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, 1.0]));
        }
        p
    }

    fn trim(&mut self) {
        while let Some(&c) = self.coeffs.last() {
            if c == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluate p(-x).
    pub fn eval_real_neg(&self, x: f64) -> f64 {
        self.eval_real(-x)
    }

    /// The polynomial p(-λ).
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .collect();
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs.get(k).copied().unwrap_or(0.0)
                + other.coeffs.get(k).copied().unwrap_or(0.0);
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Synthetic division: returns (quotient, remainder).
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.degree() < divisor.degree() {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = divisor.coeffs.len();
        let lead = divisor.leading();
        let qn = rem.len() - dn + 1;
        let mut quot = vec![0.0; qn];
        for k in (0..qn).rev() {
            let q = rem[k + dn - 1] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
        }
        rem.truncate(dn - 1);
        (Self::new(quot), Self::new(rem))
    }

    /// Cauchy bound on root magnitudes.
    /// Fujiwara's bound `2·max_k |a_{n−k}/a_n|^{1/k}`: unlike the Cauchy
    /// bound it stays moderate for high degrees, keeping the Aberth
    /// starting circle inside the range where evaluation cannot overflow.
    fn root_bound(&self) -> f64 {
        let n = self.coeffs.len() - 1;
        let lead = self.leading().abs();
        let m = (1..=n)
            .map(|k| (self.coeffs[n - k].abs() / lead).powf(1.0 / k as f64))
            .fold(0.0f64, f64::max);
        2.0 * m.max(0.5)
    }

    /// All complex roots with multiplicities (Aberth iteration).
    ///
    /// Near-real roots are snapped to the axis at a relative tolerance of
    /// 1e-9 and clusters within 1e-6·(1+|root|) are merged into a single
    /// multiple root. Conjugate pairing is enforced for the (real) input.
    pub fn roots(&self) -> Result<Vec<Root>, PolyError> {
        self.roots_with(200)
    }

    pub fn roots_with(&self, max_iter: usize) -> Result<Vec<Root>, PolyError> {
        let deg = self.degree().ok_or(PolyError::DegreeTooLow)?;
        if deg < 1 {
            return Err(PolyError::DegreeTooLow);
        }
        let n = deg;
        let dp = self.derivative();
        let bound = self.root_bound();

        // Staggered starting circle; the offset angle avoids symmetry locking.
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.7;
                Complex64::from_polar(0.5 * bound, th)
            })
            .collect();

        let mut converged = false;
        for _ in 0..max_iter {
            let mut max_step = 0.0f64;
            let snapshot = z.clone();
            for k in 0..n {
                let zk = snapshot[k];
                let f = self.eval(zk);
                let df = dp.eval(zk);
                let newton = if df.norm() > 0.0 { f / df } else { f };
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, &zj) in snapshot.iter().enumerate() {
                    if j != k {
                        let d = zk - zj;
                        if d.norm() > 1e-300 {
                            sum += d.inv();
                        }
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * sum;
                let step = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                let next = zk - step;
                if next.re.is_finite() && next.im.is_finite() {
                    z[k] = next;
                    max_step = max_step.max(step.norm() / (1.0 + zk.norm()));
                } else {
                    // overflow in the correction: pull the approximant inward
                    z[k] = zk * 0.5;
                    max_step = f64::INFINITY;
                }
            }
            if max_step < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            // Residual check: accept if every approximant already annihilates p.
            let scale = self.norm1();
            if !z
                .iter()
                .all(|&zk| self.eval(zk).norm() <= 1e-10 * scale * (1.0 + zk.norm().powi(n as i32)))
            {
                return Err(PolyError::NonConvergence(max_iter));
            }
        }

        // Newton polish from the simultaneous solution.
        for zk in z.iter_mut() {
            for _ in 0..3 {
                let df = dp.eval(*zk);
                if df.norm() < 1e-300 {
                    break;
                }
                *zk -= self.eval(*zk) / df;
            }
        }

        if z.iter().any(|zk| !zk.re.is_finite() || !zk.im.is_finite()) {
            return Err(PolyError::NonConvergence(max_iter));
        }

        // Snap near-real roots to the axis.
        for zk in z.iter_mut() {
            if zk.im.abs() < 1e-9 * (1.0 + zk.norm()) {
                zk.im = 0.0;
            }
        }

        Ok(cluster_roots(&z))
    }
}

/// Merge root approximants within the relative clustering tolerance and
/// enforce conjugate symmetry of the resulting multiset.
fn cluster_roots(roots: &[Complex64]) -> Vec<Root> {
    let mut used = vec![false; roots.len()];
    let mut out: Vec<Root> = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        // Grow the cluster until stable under the relative tolerance.
        loop {
            let center: Complex64 =
                members.iter().sum::<Complex64>() / members.len() as f64;
            let tol = 1e-6 * (1.0 + center.norm());
            let mut grew = false;
            for (j, &r) in roots.iter().enumerate() {
                if !used[j] && (r - center).norm() < tol {
                    members.push(r);
                    used[j] = true;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let mut center: Complex64 = members.iter().sum::<Complex64>() / members.len() as f64;
        if center.im.abs() < 1e-9 * (1.0 + center.norm()) {
            center.im = 0.0;
        }
        out.push(Root {
            value: center,
            multiplicity: members.len(),
        });
    }

    // Pair conjugates: average |Im| across partners so the multiset is exactly
    // conjugation-symmetric.
    for i in 0..out.len() {
        if out[i].value.im > 0.0 {
            for j in 0..out.len() {
                if i != j && out[j].value.im < 0.0 {
                    let a = out[i].value;
                    let b = out[j].value;
                    let tol = 1e-6 * (1.0 + a.norm());
                    if (a - b.conj()).norm() < tol && out[i].multiplicity == out[j].multiplicity {
                        let re = 0.5 * (a.re + b.re);
                        let im = 0.5 * (a.im - b.im);
                        out[i].value = Complex64::new(re, im);
                        out[j].value = Complex64::new(re, -im);
                        break;
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im))
    });
    out
}
