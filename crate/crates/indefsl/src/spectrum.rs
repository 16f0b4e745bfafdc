//! Essential spectrum, eigenvalues with algebraic multiplicities, point-mass
//! classification, and definitizability.
//!
//! Eigenvalue search rationalizes `M+(λ) = M−(λ)` into a polynomial equation
//! by isolating the two radicals and squaring twice, filters the candidate
//! roots by the direct residual `|D(λ)|` with the correct branches, and
//! verifies every multiplicity by the argument principle over small
//! rectangles. Disagreement between the two counts is an error, never
//! silently resolved.

use num_complex::Complex64;
use thiserror::Error;

use crate::bands::{Atom, BandsError, Interval, MeasurePair, Side};
use crate::poly::{PolyError, RealPoly};
use crate::weyl::{WeylError, WeylPair};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("argument-principle count {winding} at {location} disagrees with the candidate filter")]
    WindingMismatch { location: Complex64, winding: f64 },
    #[error("phase integration failed to resolve the winding at {location}")]
    PhaseUnresolved { location: Complex64 },
    #[error("integral of |t−{lambda0}|^(−{exponent}) neither converges nor diverges after refinement")]
    QuadratureDivergenceUndecided { lambda0: f64, exponent: u32 },
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Bands(#[from] BandsError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An eigenvalue with its multiplicities; geometric multiplicity is always 1.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub alg_mult: u32,
    pub geo_mult: u32,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub essential: Vec<Interval>,
    pub eigenvalues: Vec<Eigenvalue>,
}

/// σ_ess(A) = σ(L) ∪ (−σ(L)) as a merged sorted interval list.
pub fn essential_spectrum(w: &WeylPair) -> Vec<Interval> {
    let mut parts: Vec<Interval> = w.bands_plus();
    parts.extend(w.bands_plus().iter().map(Interval::reflected));
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::new();
    for p in parts {
        match merged.last_mut() {
            Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
            _ => merged.push(p),
        }
    }
    merged
}

fn in_essential(w: &WeylPair, t: f64, tol: f64) -> bool {
    essential_spectrum(w)
        .iter()
        .any(|iv| t >= iv.lo - tol && t <= iv.hi + tol)
}

/// Polynomial whose real and complex roots contain every solution of
/// `M+(λ) = M−(λ)`: writing `D·S(λ)S(−λ) = a + i(u·√R(λ) + v·√R(−λ))` with
/// `a = Q(λ)S(−λ) − Q(−λ)S(λ)`, `u = S(−λ)`, `v = S(λ)`, two squarings give
/// `(a² + u²R(λ) + v²R(−λ))² − 4u²v²R(λ)R(−λ) = 0`.
pub fn rationalized_difference(w: &WeylPair) -> RealPoly {
    let d = &w.data;
    if w.literal_minus {
        // D = 2M+; zeros require Q(λ)² = −R(λ) on the right sheet
        return d.q.mul(&d.q).add(&d.r);
    }
    let s_neg = d.s.reflect();
    let q_neg = d.q.reflect();
    let r_neg = d.r.reflect();
    let a = d.q.mul(&s_neg).sub(&q_neg.mul(&d.s));
    let u2r1 = s_neg.mul(&s_neg).mul(&d.r);
    let v2r2 = d.s.mul(&d.s).mul(&r_neg);
    let inner = a.mul(&a).add(&u2r1).add(&v2r2);
    let cross = u2r1.mul(&v2r2).scale(4.0);
    inner.mul(&inner).sub(&cross)
}

/// Winding number of `f` around a rectangle, by adaptive phase integration
/// seeded at `base` points per side.
pub fn winding_number<F: Fn(Complex64) -> Complex64>(
    f: &F,
    center: Complex64,
    half_w: f64,
    half_h: f64,
    base: usize,
) -> Result<i32, SpectrumError> {
    let corners = [
        center + Complex64::new(half_w, -half_h),
        center + Complex64::new(half_w, half_h),
        center + Complex64::new(-half_w, half_h),
        center + Complex64::new(-half_w, -half_h),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        let (za, zb) = (corners[k], corners[(k + 1) % 4]);
        let mut prev_z = za;
        let mut prev_f = f(za);
        for j in 1..=base {
            let z = za + (zb - za) * (j as f64 / base as f64);
            let fz = f(z);
            total += phase_step(f, prev_z, prev_f, z, fz, 0)
                .ok_or(SpectrumError::PhaseUnresolved { location: center })?;
            prev_z = z;
            prev_f = fz;
        }
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.25 {
        return Err(SpectrumError::WindingMismatch { location: center, winding });
    }
    Ok(rounded as i32)
}

fn phase_step<F: Fn(Complex64) -> Complex64>(
    f: &F,
    za: Complex64,
    fa: Complex64,
    zb: Complex64,
    fb: Complex64,
    depth: usize,
) -> Option<f64> {
    if fa.norm() == 0.0 || fb.norm() == 0.0 {
        return None;
    }
    let step = (fb / fa).arg();
    if step.abs() < std::f64::consts::FRAC_PI_2 {
        return Some(step);
    }
    if depth >= 24 {
        return None;
    }
    let zm = (za + zb) / 2.0;
    let fm = f(zm);
    Some(phase_step(f, za, fa, zm, fm, depth + 1)? + phase_step(f, zm, fm, zb, fb, depth + 1)?)
}

fn polish_root<F: Fn(Complex64) -> Complex64>(f: &F, mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let h = 1e-7 * (1.0 + z.norm());
        let fz = f(z);
        let df = (f(z + h) - f(z - h)) / (2.0 * h);
        if df.norm() == 0.0 {
            break;
        }
        let next = z - fz / df;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        if (next - z).norm() < 1e-15 * (1.0 + z.norm()) {
            return next;
        }
        z = next;
    }
    z
}

/// Eigenvalues of A: rationalized candidates, direct-residual filter, and
/// argument-principle verification of every multiplicity, plus a global
/// upper-half-plane count cross-check.
pub fn eigenvalues(w: &WeylPair) -> Result<SpectrumResult, SpectrumError> {
    let scale = w.scale();
    let essential = essential_spectrum(w);
    let edges = &w.data.edges;
    let span = edges[edges.len() - 1] - edges[0];
    let max_edge = edges.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let bound = 2.0 * (span + 1.0) + max_edge;

    let poly = rationalized_difference(w);
    let mut candidates: Vec<Complex64> = Vec::new();
    if poly.degree().map_or(false, |d| d >= 1) {
        for root in poly.roots()? {
            let mut z = root.value;
            // the double squaring limits root accuracy; snap near-real roots
            if z.im.abs() < 1e-7 * (1.0 + z.re.abs()) {
                z.im = 0.0;
            }
            if z.re.abs() <= bound && z.im.abs() <= bound {
                candidates.push(z);
            }
        }
    }

    // drop lower-half duplicates: conjugation symmetry is restored at the end
    candidates.retain(|z| z.im >= 0.0);
    // merge near-coincident candidates
    candidates.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).norm() < 1e-7 * scale);

    let common_atoms = common_atom_points(w)?;
    let tol = 1e-7 * scale;
    let mut eigen: Vec<Eigenvalue> = Vec::new();

    // verification rectangles must enclose a single zero each
    let mut all_points: Vec<Complex64> = candidates.clone();
    all_points.extend(common_atoms.iter().map(|&a| Complex64::new(a, 0.0)));
    let separation = |z: Complex64| {
        all_points
            .iter()
            .filter(|&&o| (o - z).norm() > tol)
            .fold(f64::INFINITY, |acc, &o| acc.min((o - z).norm()))
    };

    for z in candidates.clone() {
        if z.im == 0.0 {
            let t = z.re;
            if in_essential(w, t, 1e-9 * scale) {
                continue;
            }
            if common_atoms.iter().any(|&a| (a - t).abs() < tol) {
                continue; // handled by the common-atom pass below
            }
            if w.poles(Side::Plus).iter().chain(w.poles(Side::Minus).iter()).any(|&p| (p - t).abs() < tol) {
                continue; // pole of one side only: not a zero of D
            }
            // polish along the gap, where D is real-analytic
            let f = |zz: Complex64| w.d_star(zz);
            let zr = polish_root(&f, Complex64::new(t, 0.0), 30);
            let t = zr.re;
            // a spurious candidate can send Newton onto an embedded zero of
            // D inside a band; re-apply the location filters after polishing
            if in_essential(w, t, 1e-9 * scale)
                || common_atoms.iter().any(|&a| (a - t).abs() < tol)
                || w.poles(Side::Plus)
                    .iter()
                    .chain(w.poles(Side::Minus).iter())
                    .any(|&p| (p - t).abs() < tol)
            {
                continue;
            }
            let m_scale = boundary_m_scale(w, t);
            let dval = w.eval_d(Complex64::new(t, 0.0))?;
            if dval.norm() >= 1e-8 * m_scale {
                continue; // spurious root introduced by squaring
            }
            let gap_dist = essential
                .iter()
                .flat_map(|iv| [iv.lo, iv.hi])
                .filter(|e| e.is_finite())
                .fold(f64::INFINITY, |acc, e| acc.min((e - t).abs()));
            if eigen.iter().any(|e| (e.value.re - t).abs() < 1e-6 * scale && e.value.im == 0.0) {
                continue; // a second candidate polished into the same zero
            }
            let half = (0.5 * gap_dist.min(separation(zr)).min(1.0)).max(1e-6);
            let mult = winding_number(&f, Complex64::new(t, 0.0), half, half, 512)?;
            if mult == 0 {
                continue; // squaring artifact: no zero of D is enclosed
            }
            if mult < 0 {
                return Err(SpectrumError::WindingMismatch {
                    location: Complex64::new(t, 0.0),
                    winding: mult as f64,
                });
            }
            eigen.push(Eigenvalue { value: Complex64::new(t, 0.0), alg_mult: mult as u32, geo_mult: 1 });
        } else {
            let f = |zz: Complex64| w.eval_d(zz).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let z = polish_root(&f, z, 30);
            if z.im <= 1e-7 * (1.0 + z.re.abs()) {
                // collapsed onto the real axis: the real-candidate pass owns
                // that point (or it is an embedded zero, not an eigenvalue)
                continue;
            }
            let ms = w.eval_m(Side::Plus, z)?.norm().max(w.eval_m(Side::Minus, z)?.norm());
            if f(z).norm() >= 1e-8 * ms.max(1e-300) {
                continue;
            }
            if eigen.iter().any(|e| (e.value - z).norm() < 1e-6 * scale) {
                continue; // a second candidate polished into the same zero
            }
            let half = (0.45 * z.im.min(separation(z)).min(1.0)).max(1e-9);
            let mult = winding_number(&f, z, half, half, 512)?;
            if mult == 0 {
                continue; // squaring artifact: no zero of D is enclosed
            }
            if mult < 0 {
                return Err(SpectrumError::WindingMismatch { location: z, winding: mult as f64 });
            }
            eigen.push(Eigenvalue { value: z, alg_mult: mult as u32, geo_mult: 1 });
        }
    }

    // common atoms of dΣ+ and dΣ−: multiplicity is the zero order of
    // 1/M+ − 1/M− at the point
    for &theta in &common_atoms {
        let f = |zz: Complex64| {
            let mp = w.m_star(Side::Plus, zz);
            let mm = w.m_star(Side::Minus, zz);
            1.0 / mp - 1.0 / mm
        };
        let gap_dist = essential
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|e| e.is_finite())
            .fold(f64::INFINITY, |acc, e| acc.min((e - theta).abs()));
        let sep = separation(Complex64::new(theta, 0.0));
        let half = (0.5 * gap_dist.min(sep).min(1.0)).max(1e-6);
        let mult = winding_number(&f, Complex64::new(theta, 0.0), half, half, 512)?;
        if mult > 0 {
            eigen.push(Eigenvalue {
                value: Complex64::new(theta, 0.0),
                alg_mult: mult as u32,
                geo_mult: 1,
            });
        }
    }

    // global cross-check: after dividing out the zeros already found, one
    // rectangle high in ℂ₊ must wind zero times. Deflating first keeps the
    // phase slowly varying near known zeros close to the contour, where a
    // raw winding can silently skip a full 2π loop between samples.
    let upper: Vec<(Complex64, u32)> = eigen
        .iter()
        .filter(|e| e.value.im > 0.0)
        .map(|e| (e.value, e.alg_mult))
        .collect();
    let min_im = upper.iter().fold(f64::INFINITY, |a, (z, _)| a.min(z.im));
    let delta = if min_im.is_finite() { 0.5 * min_im } else { 1e-3 * scale };
    let f = |zz: Complex64| {
        let mut v = w.eval_d(zz).unwrap_or(Complex64::new(f64::NAN, 0.0));
        for (z, m) in &upper {
            v /= (zz - z).powu(*m);
        }
        v
    };
    let center = Complex64::new(0.0, (bound + delta) / 2.0);
    let global = winding_number(&f, center, bound, (bound - delta) / 2.0, 512)?;
    if global != 0 {
        return Err(SpectrumError::WindingMismatch {
            location: center,
            winding: global as f64,
        });
    }

    // restore conjugate partners
    let mut full = Vec::new();
    for e in &eigen {
        full.push(*e);
        if e.value.im > 0.0 {
            full.push(Eigenvalue { value: e.value.conj(), ..*e });
        }
    }
    full.sort_by(|a, b| {
        (a.value.re, a.value.im).partial_cmp(&(b.value.re, b.value.im)).unwrap()
    });
    Ok(SpectrumResult { essential, eigenvalues: full })
}

fn boundary_m_scale(w: &WeylPair, t: f64) -> f64 {
    let z = Complex64::new(t, 0.0);
    let mp = w.eval_m(Side::Plus, z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    let mm = w.eval_m(Side::Minus, z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    mp.max(mm).max(1e-300)
}

fn common_atom_points(w: &WeylPair) -> Result<Vec<f64>, SpectrumError> {
    let tol = 1e-9 * w.scale();
    let ap = w.data.discrete_masses(Side::Plus)?;
    let am = w.data.discrete_masses(Side::Minus)?;
    let mut out = Vec::new();
    for a in &ap {
        if am.iter().any(|b| (b.location - a.location).abs() <= tol) {
            out.push(a.location);
        }
    }
    Ok(out)
}

/// Outcome of the point-mass eigenvalue classification.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum AtomClass {
    NotEigenvalue,
    Eigenvalue { alg_mult: u32, capped: bool },
}

/// Largest multiplicity probed by the moment-condition ladder.
pub const MULT_CAP: u32 = 8;

#[derive(Copy, Clone, Debug, PartialEq)]
enum Trend {
    Convergent(f64),
    Divergent,
    Undecided,
}

/// Point-spectrum classification of λ0 from the two measures alone:
/// an atom of both measures is an eigenvalue whose simplicity and higher
/// multiplicity follow the equal-mass, inverse-square-integrability, and
/// moment-equality ladder; an atom of one side only is never an eigenvalue;
/// a regular point needs convergent inverse-square integrals on both sides
/// and equal first inverse moments.
pub fn atom_multiplicity(mp: &MeasurePair, lambda0: f64) -> Result<AtomClass, SpectrumError> {
    let scale = mp.data.scale();
    let tol = 1e-9 * scale;
    let atom_p = mp.atoms_plus.iter().find(|a| (a.location - lambda0).abs() <= tol).copied();
    let atom_m = mp.atoms_minus.iter().find(|a| (a.location - lambda0).abs() <= tol).copied();

    match (atom_p, atom_m) {
        (Some(ap), Some(am)) => both_atoms(mp, lambda0, ap, am),
        (None, None) => regular_point(mp, lambda0),
        _ => Ok(AtomClass::NotEigenvalue),
    }
}

fn both_atoms(
    mp: &MeasurePair,
    lambda0: f64,
    ap: Atom,
    am: Atom,
) -> Result<AtomClass, SpectrumError> {
    let mass_tol = 1e-8 * ap.mass.max(am.mass);
    let masses_equal = (ap.mass - am.mass).abs() <= mass_tol;
    let conv_p = convergence_trend(mp, Side::Plus, lambda0, 1)?;
    let conv_m = convergence_trend(mp, Side::Minus, lambda0, 1)?;
    if !masses_equal || conv_p == Trend::Divergent || conv_m == Trend::Divergent {
        return Ok(AtomClass::Eigenvalue { alg_mult: 1, capped: false });
    }
    // all three simplicity conditions hold: multiplicity starts at 2 and the
    // ladder uses conditions indexed j = 2 … k−1
    let mut k = 2u32;
    while k < MULT_CAP {
        let j = k; // next rung: conditions at j give multiplicity j + 1
        if !ladder_rung(mp, lambda0, j, j - 1)? {
            break;
        }
        k = j + 1;
    }
    Ok(AtomClass::Eigenvalue { alg_mult: k, capped: k >= MULT_CAP })
}

fn regular_point(mp: &MeasurePair, lambda0: f64) -> Result<AtomClass, SpectrumError> {
    for side in [Side::Plus, Side::Minus] {
        match convergence_trend(mp, side, lambda0, 1)? {
            Trend::Divergent => return Ok(AtomClass::NotEigenvalue),
            Trend::Undecided => {
                return Err(SpectrumError::QuadratureDivergenceUndecided { lambda0, exponent: 2 })
            }
            Trend::Convergent(_) => {}
        }
    }
    if !moments_equal(mp, lambda0, 1)? {
        return Ok(AtomClass::NotEigenvalue);
    }
    let mut k = 1u32;
    while k < MULT_CAP {
        let j = k + 1; // conditions at j extend the multiplicity to j
        if !ladder_rung(mp, lambda0, j, j)? {
            break;
        }
        k = j;
    }
    Ok(AtomClass::Eigenvalue { alg_mult: k, capped: k >= MULT_CAP })
}

/// One rung of the multiplicity ladder: `∫|t−λ0|^(−2j) dΣ± < ∞` on both
/// sides and equal signed moments of order `moment_pow`.
fn ladder_rung(
    mp: &MeasurePair,
    lambda0: f64,
    j: u32,
    moment_pow: u32,
) -> Result<bool, SpectrumError> {
    for side in [Side::Plus, Side::Minus] {
        match convergence_trend(mp, side, lambda0, j)? {
            Trend::Divergent => return Ok(false),
            Trend::Undecided => {
                return Err(SpectrumError::QuadratureDivergenceUndecided {
                    lambda0,
                    exponent: 2 * j,
                })
            }
            Trend::Convergent(_) => {}
        }
    }
    moments_equal(mp, lambda0, moment_pow)
}

fn moments_equal(mp: &MeasurePair, lambda0: f64, pow: u32) -> Result<bool, SpectrumError> {
    if pow == 0 {
        return Ok(true);
    }
    let eps = 1e-9 * mp.data.scale();
    let ip = measure_integral(mp, Side::Plus, lambda0, eps, |d| d.powi(-(pow as i32)));
    let im = measure_integral(mp, Side::Minus, lambda0, eps, |d| d.powi(-(pow as i32)));
    let denom = ip.abs().max(im.abs()).max(1e-12);
    Ok((ip - im).abs() <= 1e-6 * denom)
}

/// Tri-state decision on `∫ |t−λ0|^(−2j) dΣ_side < ∞` via dyadic shrinking of
/// the exclusion window: increments growing by ≥ 1.8 over three levels mean
/// divergence, increments decaying by ≤ 0.6 mean convergence.
fn convergence_trend(
    mp: &MeasurePair,
    side: Side,
    lambda0: f64,
    j: u32,
) -> Result<Trend, SpectrumError> {
    let scale = mp.data.scale();
    let pow = -2.0 * j as f64;
    let mut values = Vec::new();
    for m in 0..=24u32 {
        let eps = scale * 0.25 * 0.5f64.powi(m as i32);
        values.push(measure_integral(mp, side, lambda0, eps, |d| d.abs().powf(pow)));
    }
    let increments: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let tail = &increments[increments.len() - 4..];
    let total = values.last().unwrap().abs().max(1e-300);
    if tail.iter().all(|&d| d <= 1e-10 * total) {
        return Ok(Trend::Convergent(*values.last().unwrap()));
    }
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0].max(1e-300)).collect();
    if ratios.iter().all(|&r| r >= 1.8) {
        Ok(Trend::Divergent)
    } else if ratios.iter().all(|&r| r <= 0.6) {
        Ok(Trend::Convergent(*values.last().unwrap()))
    } else {
        Ok(Trend::Undecided)
    }
}

/// `∫ f(t−λ0) dΣ_side(t)` over `|t−λ0| > eps`: absolutely continuous part by
/// singularity-aware quadrature over the bands plus the point masses.
fn measure_integral<F: Fn(f64) -> f64>(
    mp: &MeasurePair,
    side: Side,
    lambda0: f64,
    eps: f64,
    f: F,
) -> f64 {
    let mut total = 0.0;
    for atom in mp.atoms(side) {
        if (atom.location - lambda0).abs() > eps {
            total += f(atom.location - lambda0) * atom.mass;
        }
    }
    let data = &mp.data;
    let tail_cut = data.edges.iter().fold(1.0f64, |a, e| a.max(e.abs())) * 4.0 + lambda0.abs() + 10.0;
    for band in data.bands_for(side) {
        let lo = band.lo.max(-tail_cut);
        let hi = band.hi.min(tail_cut);
        if hi <= lo {
            continue;
        }
        let g = |t: f64| {
            if (t - lambda0).abs() <= eps {
                return 0.0;
            }
            match data.spectral_density(side, t) {
                crate::bands::Density::Finite(v) => f(t - lambda0) * v,
                crate::bands::Density::Infinite => 0.0,
            }
        };
        // split at the excluded window and at the edges; substitute away the
        // possible |t−edge|^(−1/2) behavior at the band ends
        let mut cuts = vec![lo, hi];
        // dyadic shells around the excluded window keep the steep integrand
        // resolvable panel by panel
        let mut shell = eps;
        while shell < (hi - lo) + (lambda0 - lo).abs() + (lambda0 - hi).abs() {
            for c in [lambda0 - shell, lambda0 + shell] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
            shell *= 2.0;
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for wpair in cuts.windows(2) {
            let (a, b) = (wpair[0], wpair[1]);
            if b - a <= 0.0 {
                continue;
            }
            let near_lo_edge = band.lo.is_finite() && (a - band.lo).abs() < 1e-12 * (1.0 + band.lo.abs());
            let near_hi_edge = band.hi.is_finite() && (b - band.hi).abs() < 1e-12 * (1.0 + band.hi.abs());
            total += if near_lo_edge {
                // u = √(t − a)
                let w = (b - a).sqrt();
                adaptive_simpson(&|u: f64| 2.0 * u * g(a + u * u), 0.0, w, 1e-10, 24)
            } else if near_hi_edge {
                let w = (b - a).sqrt();
                adaptive_simpson(&|u: f64| 2.0 * u * g(b - u * u), 0.0, w, 1e-10, 24)
            } else {
                adaptive_simpson(&g, a, b, 1e-10, 24)
            };
        }
        // tail of the half-infinite band via t = 1/s
        if band.hi == f64::INFINITY {
            let g_tail = |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                let t = 1.0 / s;
                g(t) / (s * s)
            };
            total += adaptive_simpson(&g_tail, 1e-12, 1.0 / tail_cut, 1e-10, 24);
        }
    }
    total
}

pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol * (1.0 + (left + right).abs()) {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Decision of the finite-separation criterion for the supports of dΣ±.
#[derive(Clone, Debug, PartialEq)]
pub enum Definitizability {
    /// Separation points α_1 < … < α_m with supp dΣ− and supp dΣ+ alternating.
    Definitizable { partition: Vec<f64> },
    No { witness: Interval },
}

/// Decides whether finitely many points separate the two supports, each given
/// as closed intervals plus a finite point set. Any shared interval of
/// positive length is a witness against separability.
pub fn definitizable(
    supp_plus: (&[Interval], &[f64]),
    supp_minus: (&[Interval], &[f64]),
) -> Definitizability {
    // positive-length overlap of interval parts
    for ip in supp_plus.0 {
        for im in supp_minus.0 {
            let lo = ip.lo.max(im.lo);
            let hi = ip.hi.min(im.hi);
            if hi > lo {
                return Definitizability::No { witness: Interval::new(lo, hi) };
            }
        }
    }
    // a point of one support interior to an interval of the other, or a
    // coinciding pair of points, also blocks separation
    for (&pts, ivs) in [(&supp_plus.1, supp_minus.0), (&supp_minus.1, supp_plus.0)] {
        for &p in pts {
            if ivs.iter().any(|iv| iv.interior_contains(p)) {
                return Definitizability::No { witness: Interval::new(p, p) };
            }
        }
    }
    for &p in supp_plus.1 {
        if supp_minus.1.iter().any(|&q| q == p) {
            return Definitizability::No { witness: Interval::new(p, p) };
        }
    }

    // sweep the components in order and place a separation point at every
    // sign change
    #[derive(Copy, Clone)]
    struct Comp {
        lo: f64,
        hi: f64,
        plus: bool,
    }
    let mut comps: Vec<Comp> = Vec::new();
    for (ivs, pts, plus) in [
        (supp_plus.0, supp_plus.1, true),
        (supp_minus.0, supp_minus.1, false),
    ] {
        comps.extend(ivs.iter().map(|iv| Comp { lo: iv.lo, hi: iv.hi, plus }));
        comps.extend(pts.iter().map(|&p| Comp { lo: p, hi: p, plus }));
    }
    comps.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut partition = Vec::new();
    for w in comps.windows(2) {
        if w[0].plus != w[1].plus {
            partition.push(if w[0].hi == w[1].lo {
                w[0].hi
            } else {
                0.5 * (w[0].hi + w[1].lo)
            });
        }
    }
    partition.dedup();
    Definitizability::Definitizable { partition }
}

/// Finite-separation decision for the pair behind a Weyl evaluator.
pub fn definitizable_for(w: &WeylPair) -> Result<Definitizability, SpectrumError> {
    let measures = w.data.measures()?;
    let (iv_p, pt_p) = measures.support(Side::Plus);
    let (iv_m, pt_m) = measures.support(Side::Minus);
    Ok(definitizable((&iv_p, &pt_p), (&iv_m, &pt_m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::{solve_qs, BandStructure};
    use approx::assert_relative_eq;

    #[test]
    fn essential_spectrum_constant() {
        let w = WeylPair::constant(1.0).unwrap();
        let ess = essential_spectrum(&w);
        assert_eq!(ess.len(), 2);
        assert_eq!((ess[0].lo, ess[0].hi), (f64::NEG_INFINITY, -1.0));
        assert_eq!((ess[1].lo, ess[1].hi), (1.0, f64::INFINITY));

        let w = WeylPair::constant(-1.0).unwrap();
        let ess = essential_spectrum(&w);
        assert_eq!(ess.len(), 1);
        assert_eq!((ess[0].lo, ess[0].hi), (f64::NEG_INFINITY, f64::INFINITY));
    }

    #[test]
    fn essential_spectrum_one_zone() {
        let w = WeylPair::example1(0.0, 0.5).unwrap();
        let ess = essential_spectrum(&w);
        // ±([0, 0.5] ∪ [1, ∞)): the two middle bands touch at 0 and merge
        assert_eq!(ess.len(), 3);
        assert_eq!((ess[0].lo, ess[0].hi), (f64::NEG_INFINITY, -1.0));
        assert_eq!((ess[1].lo, ess[1].hi), (-0.5, 0.5));
        assert_eq!((ess[2].lo, ess[2].hi), (1.0, f64::INFINITY));
    }

    #[test]
    fn no_eigenvalues_for_constant_potential() {
        for a in [1.0, 0.0, -1.0] {
            let w = WeylPair::constant(a).unwrap();
            let res = eigenvalues(&w).unwrap();
            assert!(res.eigenvalues.is_empty(), "a = {a}: {:?}", res.eigenvalues);
        }
    }

    #[test]
    fn first_family_real_pair() {
        let w = WeylPair::example1(0.0, 0.5).unwrap();
        let res = eigenvalues(&w).unwrap();
        assert_eq!(res.eigenvalues.len(), 2);
        let expect = 0.5f64.sqrt();
        assert_relative_eq!(res.eigenvalues[0].value.re, -expect, max_relative = 1e-8);
        assert_relative_eq!(res.eigenvalues[1].value.re, expect, max_relative = 1e-8);
        for e in &res.eigenvalues {
            assert_eq!(e.alg_mult, 1);
            assert_eq!(e.value.im, 0.0);
        }
    }

    #[test]
    fn first_family_imaginary_pair() {
        let w = WeylPair::example1(-1.0, 0.5).unwrap();
        let res = eigenvalues(&w).unwrap();
        assert_eq!(res.eigenvalues.len(), 2);
        let expect = 0.5f64.sqrt();
        assert_relative_eq!(res.eigenvalues[1].value.im, expect, max_relative = 1e-8);
        assert_relative_eq!(res.eigenvalues[0].value.im, -expect, max_relative = 1e-8);
        assert!(res.eigenvalues.iter().all(|e| e.value.re.abs() < 1e-8));
    }

    #[test]
    fn eigenvalue_formula_across_xi_grid() {
        let k2 = 0.5;
        let mut xi = -1.6f64;
        while xi <= 0.6 {
            let inner = (xi + 1.0) * (xi + 1.0) - (1.0 - k2);
            // skip near-edge parameters where λ± degenerates into the bands
            if inner.abs() > 1e-2 && (inner.sqrt() - (xi + k2).abs()).abs() > 1e-2 {
                let w = WeylPair::example1(xi, k2).unwrap();
                let res = eigenvalues(&w).unwrap();
                let expected = Complex64::new(inner.max(0.0).sqrt(), (-inner).max(0.0).sqrt());
                let in_ess = expected.im == 0.0
                    && essential_spectrum(&w).iter().any(|iv| iv.contains(expected.re));
                if in_ess {
                    assert!(res.eigenvalues.is_empty(), "xi = {xi}");
                } else {
                    assert_eq!(res.eigenvalues.len(), 2, "xi = {xi}");
                    let top = res.eigenvalues.last().unwrap().value;
                    assert_relative_eq!((top - expected).norm(), 0.0, epsilon = 1e-7);
                }
            }
            xi += 0.2;
        }
    }

    #[test]
    fn second_family_has_no_eigenvalues() {
        for xi in [-1.5, -0.75, -0.4, 0.5] {
            let w = WeylPair::example2(xi, 0.25, false).unwrap();
            let res = eigenvalues(&w).unwrap();
            assert!(res.eigenvalues.is_empty(), "xi = {xi}: {:?}", res.eigenvalues);
        }
    }

    #[test]
    fn conjugation_symmetry_of_eigenvalues() {
        let w = WeylPair::example1(-0.6, 0.5).unwrap();
        let res = eigenvalues(&w).unwrap();
        for e in &res.eigenvalues {
            let partner = e.value.conj();
            assert!(res
                .eigenvalues
                .iter()
                .any(|o| (o.value - partner).norm() < 1e-10 && o.alg_mult == e.alg_mult));
        }
    }

    #[test]
    fn nonnegative_band_structures_have_real_spectrum() {
        // all bands in [0, ∞): J-nonnegativity forces no nonreal eigenvalues
        for xi_div in [0.6, 0.75, 1.0] {
            let b = BandStructure {
                mu_r: vec![0.1, 1.0],
                mu_l: vec![0.5],
                xi: vec![xi_div],
                signs: vec![-1],
            };
            let w = WeylPair::finite_zone(&b).unwrap();
            let res = eigenvalues(&w).unwrap();
            assert!(res.eigenvalues.iter().all(|e| e.value.im == 0.0));
        }
    }

    fn synthetic_measures() -> MeasurePair {
        // gapless band [2, ∞) keeps the continuous part far from the probes
        let b = BandStructure { mu_r: vec![2.0], mu_l: vec![], xi: vec![], signs: vec![] };
        MeasurePair {
            data: solve_qs(&b).unwrap(),
            atoms_plus: vec![],
            atoms_minus: vec![],
        }
    }

    #[test]
    fn atoms_with_unequal_masses_are_simple() {
        let mut mp = synthetic_measures();
        mp.atoms_plus = vec![Atom { location: 0.0, mass: 1.0 }];
        mp.atoms_minus = vec![Atom { location: 0.0, mass: 2.0 }];
        assert_eq!(
            atom_multiplicity(&mp, 0.0).unwrap(),
            AtomClass::Eigenvalue { alg_mult: 1, capped: false }
        );
    }

    #[test]
    fn equal_masses_with_unequal_first_moments_give_two() {
        let mut mp = synthetic_measures();
        mp.atoms_plus = vec![Atom { location: 0.0, mass: 1.0 }, Atom { location: 1.0, mass: 1.0 }];
        mp.atoms_minus = vec![Atom { location: 0.0, mass: 1.0 }, Atom { location: -1.5, mass: 1.0 }];
        assert_eq!(
            atom_multiplicity(&mp, 0.0).unwrap(),
            AtomClass::Eigenvalue { alg_mult: 2, capped: false }
        );
    }

    #[test]
    fn one_sided_atom_is_not_an_eigenvalue() {
        let mut mp = synthetic_measures();
        mp.atoms_plus = vec![Atom { location: 0.0, mass: 1.0 }];
        assert_eq!(atom_multiplicity(&mp, 0.0).unwrap(), AtomClass::NotEigenvalue);
    }

    #[test]
    fn regular_point_inside_band_is_not_an_eigenvalue() {
        let mp = synthetic_measures();
        // density ~ (t−2)^(−1/2)·… makes ∫|t−3|^(−2) dΣ+ divergent at t = 3
        assert_eq!(atom_multiplicity(&mp, 3.0).unwrap(), AtomClass::NotEigenvalue);
    }

    #[test]
    fn definitizable_examples() {
        let half_minus = [Interval::new(f64::NEG_INFINITY, 0.0)];
        let half_plus = [Interval::new(0.0, f64::INFINITY)];
        match definitizable((&half_plus, &[]), (&half_minus, &[])) {
            Definitizability::Definitizable { partition } => assert_eq!(partition, vec![0.0]),
            other => panic!("expected Definitizable, got {other:?}"),
        }

        let plus = [Interval::new(1.0, f64::INFINITY)];
        let minus = [Interval::new(f64::NEG_INFINITY, -1.0)];
        assert!(matches!(
            definitizable((&plus, &[]), (&minus, &[])),
            Definitizability::Definitizable { .. }
        ));
    }

    #[test]
    fn overlapping_supports_are_not_definitizable() {
        // elliptic family at k² = 0.5, ξ = −0.75: σ(L) = [−0.75, −0.25] ∪ [0.25, ∞)
        let w = WeylPair::example1(-0.75, 0.5).unwrap();
        match definitizable_for(&w).unwrap() {
            Definitizability::No { witness } => {
                assert_relative_eq!(witness.lo, -0.75, max_relative = 1e-12);
                assert_relative_eq!(witness.hi, -0.25, max_relative = 1e-12);
            }
            other => panic!("expected No, got {other:?}"),
        }
    }

    #[test]
    fn constant_potential_is_definitizable() {
        let w = WeylPair::constant(1.0).unwrap();
        assert!(matches!(
            definitizable_for(&w).unwrap(),
            Definitizability::Definitizable { .. }
        ));
    }
}
