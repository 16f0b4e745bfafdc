//! Similarity verdict engine: strong spectral singularities, local
//! Puiseux-order fits at distinguished real points, the band-edge order
//! condition, and the final selfadjoint / normal / not-similar verdict.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bands::{BandsError, Density, Interval, Side};
use crate::spectrum::{
    definitizable_for, eigenvalues, essential_spectrum, rationalized_difference, Definitizability,
    SpectrumError, SpectrumResult,
};
use crate::weyl::{WeylError, WeylPair};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("local order at {t0} unresolved: fitted {fitted}, residual {residual}")]
    OrderUnresolved { t0: f64, fitted: f64, residual: f64 },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Bands(#[from] BandsError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// A point probed for a strong spectral singularity, real or at infinity.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub enum SingularPoint {
    Finite(f64),
    Infinity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SingularityKind {
    StrongSingularity,
    CleanEdge,
    GeneralizedPole,
    Undecided,
}

#[derive(Copy, Clone, Debug, Serialize)]
pub struct SingularityReport {
    pub point: SingularPoint,
    pub kind: SingularityKind,
    /// Half-integer local order of `D`, when the fit resolved.
    pub estimated_order: Option<f64>,
    pub fitted: f64,
    pub residual: f64,
}

/// Result of a log–log order fit rounded to the half-integer grid.
#[derive(Copy, Clone, Debug)]
pub struct OrderFit {
    pub order: f64,
    pub fitted: f64,
    pub residual: f64,
    /// The fit resolved but landed close to the rounding boundary.
    pub near_boundary: bool,
}

/// Fits `log|f(t0 + δ·direction)|` against `log δ` over 12 log-spaced
/// δ ∈ [1e−8, 1e−3] and rounds the slope to the nearest multiple of 1/2.
pub fn local_order<F: Fn(Complex64) -> Complex64>(
    f: F,
    t0: f64,
    direction: Complex64,
) -> Result<OrderFit, ClassifyError> {
    let dir = direction / direction.norm();
    let n = 12;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for j in 0..n {
        let delta = 10f64.powf(-8.0 + 5.0 * j as f64 / (n - 1) as f64);
        let v = f(Complex64::new(t0, 0.0) + dir * delta);
        let mag = v.norm();
        if !mag.is_finite() || mag == 0.0 {
            return Err(ClassifyError::OrderUnresolved {
                t0,
                fitted: f64::NAN,
                residual: f64::INFINITY,
            });
        }
        xs.push(delta.ln());
        ys.push(mag.ln());
    }
    let (slope, residual) = linear_fit(&xs, &ys);
    let order = (2.0 * slope).round() / 2.0;
    let distance = (slope - order).abs();
    if residual > 0.1 || distance > 0.15 {
        return Err(ClassifyError::OrderUnresolved { t0, fitted: slope, residual });
    }
    Ok(OrderFit { order, fitted: slope, residual, near_boundary: distance > 0.1 })
}

/// Least-squares slope and RMS residual of `y` against `x`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    (slope, (rss / n).sqrt())
}

/// Real points worth probing: real roots of the rationalized difference
/// inside the closed essential spectrum plus all finite band edges.
fn singular_candidates(w: &WeylPair) -> Result<Vec<f64>, ClassifyError> {
    let scale = w.scale();
    let ess = essential_spectrum(w);
    let inside = |t: f64| ess.iter().any(|iv| t >= iv.lo - 1e-9 * scale && t <= iv.hi + 1e-9 * scale);
    let mut pts: Vec<f64> = Vec::new();
    let poly = rationalized_difference(w);
    if poly.degree().map_or(false, |d| d >= 1) {
        for root in poly.roots()? {
            let z = root.value;
            if z.im.abs() < 1e-6 * (1.0 + z.re.abs()) && inside(z.re) {
                pts.push(z.re);
            }
        }
    }
    for &e in &w.data.edges {
        pts.push(e);
        pts.push(-e);
    }
    pts.retain(|&t| inside(t));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-6 * scale);
    Ok(pts)
}

/// `max over sides of π·Σ′_ac(t) / |D(t)|` at a real point, ignoring sides
/// with no absolutely continuous mass there.
fn density_over_d(w: &WeylPair, t: f64) -> Option<f64> {
    let d = w.eval_d(Complex64::new(t, 0.0)).ok()?.norm();
    let mut best: Option<f64> = None;
    for side in [Side::Plus, Side::Minus] {
        match w.data.spectral_density(side, t) {
            Density::Finite(v) if v > 0.0 => {
                let r = if d == 0.0 { f64::INFINITY } else { v / d };
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
            Density::Infinite => {
                best = Some(f64::INFINITY);
            }
            _ => {}
        }
    }
    best
}

/// Growth decision for the ratio samples of one candidate: the largest and
/// near-threshold runs of per-decade growth factors.
struct GrowthDecision {
    singular: bool,
    near_boundary: bool,
}

fn ratio_growth(w: &WeylPair, samples: impl Iterator<Item = f64>) -> GrowthDecision {
    let ratios: Vec<f64> = samples
        .map(|t| density_over_d(w, t).unwrap_or(0.0))
        .collect();
    if ratios.iter().any(|r| r.is_infinite()) {
        return GrowthDecision { singular: true, near_boundary: false };
    }
    let factors: Vec<f64> = ratios
        .windows(2)
        .map(|p| if p[0] > 0.0 { p[1] / p[0] } else { 0.0 })
        .collect();
    let longest_run = |threshold: f64| {
        let mut best = 0usize;
        let mut run = 0usize;
        for &f in &factors {
            if f >= threshold {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        best
    };
    let singular = longest_run(3.0) >= 3;
    let near_boundary = singular != (longest_run(2.0) >= 3) || singular != (longest_run(4.5) >= 3);
    GrowthDecision { singular, near_boundary }
}

/// Strong spectral singularities of the essential part: points of the closed
/// essential spectrum (or ∞) where `Σ′_ac±/|D|` is not essentially bounded,
/// decided by growth ≥ 3 per decade over at least three decades of the
/// approach distance.
pub fn strong_singularities(w: &WeylPair) -> Result<Vec<SingularityReport>, ClassifyError> {
    let mut out = Vec::new();
    for t0 in singular_candidates(w)? {
        let sided = |sign: f64| {
            ratio_growth(w, (2..=7).map(move |m| t0 + sign * 10f64.powi(-m)))
        };
        let left = sided(-1.0);
        let right = sided(1.0);
        if left.singular || right.singular {
            let fit = local_order(
                |z| w.eval_d(z).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                t0,
                Complex64::new(0.0, 1.0),
            );
            match fit {
                Ok(fit) => out.push(SingularityReport {
                    point: SingularPoint::Finite(t0),
                    kind: SingularityKind::StrongSingularity,
                    estimated_order: Some(fit.order),
                    fitted: fit.fitted,
                    residual: fit.residual,
                }),
                Err(ClassifyError::OrderUnresolved { fitted, residual, .. }) => {
                    out.push(SingularityReport {
                        point: SingularPoint::Finite(t0),
                        kind: SingularityKind::StrongSingularity,
                        estimated_order: None,
                        fitted,
                        residual,
                    })
                }
                Err(e) => return Err(e),
            }
        } else if left.near_boundary || right.near_boundary {
            out.push(SingularityReport {
                point: SingularPoint::Finite(t0),
                kind: SingularityKind::Undecided,
                estimated_order: None,
                fitted: f64::NAN,
                residual: f64::NAN,
            });
        }
    }
    // the point at infinity: same ratio probed at |t| = 10^m
    let inf = |sign: f64| ratio_growth(w, (2..=7).map(move |m| sign * 10f64.powi(m)));
    let (li, ri) = (inf(-1.0), inf(1.0));
    if li.singular || ri.singular {
        out.push(SingularityReport {
            point: SingularPoint::Infinity,
            kind: SingularityKind::StrongSingularity,
            estimated_order: None,
            fitted: f64::NAN,
            residual: f64::NAN,
        });
    } else if li.near_boundary || ri.near_boundary {
        out.push(SingularityReport {
            point: SingularPoint::Infinity,
            kind: SingularityKind::Undecided,
            estimated_order: None,
            fitted: f64::NAN,
            residual: f64::NAN,
        });
    }
    Ok(out)
}

/// Report of the band-edge order condition.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub holds: bool,
    pub decided: bool,
    pub entries: Vec<SingularityReport>,
    pub near_boundary: bool,
}

/// Verifies the three clauses of the edge-order condition: no generalized
/// zeros of the continued difference in open band interiors, zero order
/// ≤ 1/2 at band edges away from the pole set, and a generalized pole of
/// order ≥ 1/2 at band edges that carry a pole of `M+` or `M−`.
pub fn check_condition_iii(w: &WeylPair) -> Result<ConditionReport, ClassifyError> {
    let scale = w.scale();
    let mut entries = Vec::new();
    let mut holds = true;
    let mut decided = true;
    let mut near_boundary = false;

    let bands_both: Vec<Interval> = {
        let mut v = w.bands_plus();
        v.extend(w.bands_plus().iter().map(Interval::reflected));
        v
    };
    let interior = |t: f64| {
        bands_both
            .iter()
            .any(|iv| t > iv.lo + 1e-6 * scale && t < iv.hi - 1e-6 * scale)
    };

    // clause 1: no generalized zeros inside open band interiors
    let poly = rationalized_difference(w);
    let mut zero_candidates: Vec<f64> = Vec::new();
    if poly.degree().map_or(false, |d| d >= 1) {
        for root in poly.roots()? {
            let z = root.value;
            if z.im.abs() < 1e-6 * (1.0 + z.re.abs()) && interior(z.re) {
                zero_candidates.push(z.re);
            }
        }
    }
    zero_candidates.sort_by(f64::total_cmp);
    zero_candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-6 * scale);
    for t0 in zero_candidates {
        let t0 = polish_on_axis(w, t0);
        match local_order(
            |z| w.eval_d(z).unwrap_or(Complex64::new(f64::NAN, 0.0)),
            t0,
            Complex64::new(0.0, 1.0),
        ) {
            Ok(fit) => {
                near_boundary |= fit.near_boundary;
                if fit.order >= 0.5 {
                    holds = false;
                    entries.push(SingularityReport {
                        point: SingularPoint::Finite(t0),
                        kind: SingularityKind::StrongSingularity,
                        estimated_order: Some(fit.order),
                        fitted: fit.fitted,
                        residual: fit.residual,
                    });
                }
            }
            Err(ClassifyError::OrderUnresolved { fitted, residual, .. }) => {
                decided = false;
                entries.push(SingularityReport {
                    point: SingularPoint::Finite(t0),
                    kind: SingularityKind::Undecided,
                    estimated_order: None,
                    fitted,
                    residual,
                });
            }
            Err(e) => return Err(e),
        }
    }

    // clauses 2 and 3: orders at the band edges of both ±σ(L)
    let tau_tol = 1e-9 * scale;
    let mut edge_points: Vec<(f64, bool)> = Vec::new();
    for &e in &w.data.edges {
        let plus_pole = w.data.tau.iter().any(|&t| (t - e).abs() <= tau_tol);
        edge_points.push((e, plus_pole));
        // the reflected edge carries a pole of M− exactly when e is a τ-edge
        edge_points.push((-e, plus_pole));
    }
    edge_points.sort_by(|a, b| a.0.total_cmp(&b.0));
    edge_points.dedup_by(|a, b| {
        if (a.0 - b.0).abs() < 1e-9 * scale {
            b.1 |= a.1;
            true
        } else {
            false
        }
    });
    for (e, has_pole) in edge_points {
        let exact = edge_order_exact(w, e);
        match local_order(
            |z| w.eval_d(z).unwrap_or(Complex64::new(f64::NAN, 0.0)),
            e,
            Complex64::new(0.0, 1.0),
        ) {
            Ok(fit) => {
                near_boundary |= fit.near_boundary;
                if let Some(exact) = exact {
                    // the analytic order from the quadruple overrides a fit
                    // that drifted to a neighboring half-integer
                    if (fit.order - exact).abs() > 0.25 && fit.near_boundary {
                        near_boundary = true;
                    }
                }
                let order = exact.unwrap_or(fit.order);
                let ok = if has_pole { order <= -0.5 } else { order <= 0.5 };
                if !ok {
                    holds = false;
                }
                entries.push(SingularityReport {
                    point: SingularPoint::Finite(e),
                    kind: if has_pole {
                        SingularityKind::GeneralizedPole
                    } else {
                        SingularityKind::CleanEdge
                    },
                    estimated_order: Some(order),
                    fitted: fit.fitted,
                    residual: fit.residual,
                });
            }
            Err(ClassifyError::OrderUnresolved { fitted, residual, .. }) => {
                if let Some(order) = exact {
                    // the polynomial data decides even when the fit does not
                    let ok = if has_pole { order <= -0.5 } else { order <= 0.5 };
                    if !ok {
                        holds = false;
                    }
                    entries.push(SingularityReport {
                        point: SingularPoint::Finite(e),
                        kind: if has_pole {
                            SingularityKind::GeneralizedPole
                        } else {
                            SingularityKind::CleanEdge
                        },
                        estimated_order: Some(order),
                        fitted,
                        residual,
                    });
                } else {
                    decided = false;
                    entries.push(SingularityReport {
                        point: SingularPoint::Finite(e),
                        kind: SingularityKind::Undecided,
                        estimated_order: None,
                        fitted,
                        residual,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }

    Ok(ConditionReport { holds, decided, entries, near_boundary })
}

/// Exact local order of `D = M+ − M−` at a point `e` that is a band edge of
/// σ(L) or −σ(L), from the vanishing orders of Q, R, S: each side
/// contributes `min(ord Q, ord R / 2) − ord S` at its own branch point and
/// an analytic term from the other side.
fn edge_order_exact(w: &WeylPair, e: f64) -> Option<f64> {
    let d = &w.data;
    let tol = 1e-9 * w.scale();
    let mut orders: Vec<f64> = Vec::new();
    // contribution of M+ at e (branch point of σ(L))
    if d.edges.iter().any(|&x| (x - e).abs() <= tol) {
        orders.push(side_order(d, e));
    }
    // contribution of M− at e = −(edge)
    if d.edges.iter().any(|&x| (x + e).abs() <= tol) {
        orders.push(side_order(d, -e));
    }
    if orders.is_empty() {
        return None;
    }
    let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        Some(min)
    } else {
        // the other side is analytic and generically nonzero at e, so the
        // difference has order 0 unless a pole dominates
        Some(0.0_f64.min(min))
    }
}

fn side_order(d: &crate::bands::FiniteZoneData, e: f64) -> f64 {
    let ord_q = if d.q.is_zero() { f64::INFINITY } else { root_order(&d.q, e) as f64 };
    let ord_r = root_order(&d.r, e) as f64;
    let ord_s = root_order(&d.s, e) as f64;
    ord_q.min(ord_r / 2.0) - ord_s
}

fn root_order(p: &RealPolyRef, e: f64) -> usize {
    let mut q = p.clone();
    let tol = 1e-8 * q.norm1().max(1.0);
    let mut k = 0;
    while q.degree().is_some() && q.eval_real(e).abs() <= tol * (1.0 + e.abs()).powi(q.coeffs().len() as i32)
    {
        let (quot, _) = q.div_rem(&crate::poly::RealPoly::from_roots(&[e]));
        q = quot;
        k += 1;
        if k > 16 {
            break;
        }
    }
    k
}

type RealPolyRef = crate::poly::RealPoly;

/// Least-squares Newton step toward the nearest zero of `|D|` along the real
/// axis; keeps band-interior candidates accurate enough for the order fit.
fn polish_on_axis(w: &WeylPair, t0: f64) -> f64 {
    let f = |t: f64| w.eval_d(Complex64::new(t, 0.0)).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let mut t = t0;
    for _ in 0..30 {
        let h = 1e-7 * (1.0 + t.abs());
        let v = f(t);
        let dv = (f(t + h) - f(t - h)) / (2.0 * h);
        let denom = dv.norm_sqr();
        if denom == 0.0 || !v.re.is_finite() {
            break;
        }
        let step = -(dv.conj() * v).re / denom;
        if !step.is_finite() {
            break;
        }
        t += step;
        if step.abs() < 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    t
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Overall {
    SimilarSelfadjoint,
    SimilarNormal,
    NotSimilar,
    Undecided,
}

/// Full similarity verdict with its supporting evidence.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub overall: Overall,
    pub ess_similar_selfadjoint: bool,
    pub all_eigenvalues_simple: bool,
    /// Some order or growth test landed near a decision boundary.
    pub boundary: bool,
    pub singularities: Vec<SingularityReport>,
    pub spectrum: SpectrumResult,
    pub definitizability: Definitizability,
}

/// Assembles the verdict: the essential part is similar to selfadjoint iff
/// there are no strong singularities (equivalently the edge-order condition
/// holds); simple spectrum upgrades that to normal, and real simple spectrum
/// to selfadjoint.
pub fn classify_similarity(w: &WeylPair) -> Result<Verdict, ClassifyError> {
    let singularities = strong_singularities(w)?;
    let condition = check_condition_iii(w)?;
    let spectrum = eigenvalues(w)?;
    let definitizability = definitizable_for(w)?;

    let undecided_singularity = singularities.iter().any(|s| s.kind == SingularityKind::Undecided);
    let strong: Vec<&SingularityReport> = singularities
        .iter()
        .filter(|s| s.kind == SingularityKind::StrongSingularity)
        .collect();
    let ess_ok = strong.is_empty();
    let boundary = condition.near_boundary
        || singularities.iter().any(|s| s.kind == SingularityKind::Undecided);

    let agree = condition.decided && condition.holds == ess_ok;
    let all_simple = spectrum.eigenvalues.iter().all(|e| e.alg_mult == 1);
    let all_real = spectrum.eigenvalues.iter().all(|e| e.value.im == 0.0);

    let overall = if undecided_singularity || !condition.decided || !agree {
        Overall::Undecided
    } else if ess_ok && all_simple && all_real {
        Overall::SimilarSelfadjoint
    } else if ess_ok && all_simple {
        Overall::SimilarNormal
    } else {
        Overall::NotSimilar
    };

    Ok(Verdict {
        overall,
        ess_similar_selfadjoint: ess_ok,
        all_eigenvalues_simple: all_simple,
        boundary,
        singularities,
        spectrum,
        definitizability,
    })
}
