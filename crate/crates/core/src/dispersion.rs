//! Dispersion branches Omega_j(k): root evaluation, asymptotic labeling with
//! continuation from a reference anchor, and branch-point location and
//! classification.

use crate::error::{Result, UtmError};
use crate::polynomial::{coefficients_from_samples, roots_of_balanced, BivariatePoly, PolynomialScalar};
use crate::symbol::{char_poly, PolynomialMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPointKind {
    /// Encircling the point permutes branches.
    Branching,
    /// Roots collide but the branches are single-valued through the point.
    Collision,
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub location: Complex64,
    pub kind: BranchPointKind,
}

/// The dispersion branches of det(Lambda(k) - omega I) = 0, with deterministic
/// labels anchored by asymptotic ordering on the positive real axis.
#[derive(Debug, Clone)]
pub struct BranchSet {
    matrix: PolynomialMatrix,
    n: usize,
    branch_points: Vec<BranchPoint>,
    /// reference radius K0 for the labeling anchor
    anchor_radius: f64,
    /// labeled branch values at k = K0 (on the positive real axis)
    anchor_values: Vec<Complex64>,
}

/// Asymptotic leading behavior Omega ~ coefficient * k^exponent along a ray.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticLabel {
    pub exponent: f64,
    pub coefficient: Complex64,
}

impl BranchSet {
    pub fn build(matrix: &PolynomialMatrix) -> Result<Self> {
        let n = matrix.size();
        let branch_points = locate_branch_points(matrix)?;
        let max_bp = branch_points
            .iter()
            .map(|b| b.location.norm())
            .fold(0.0_f64, f64::max);
        let anchor_radius = 10.0 * (1.0 + max_bp);
        let mut set = Self {
            matrix: matrix.clone(),
            n,
            branch_points,
            anchor_radius,
            anchor_values: vec![],
        };
        let labels = set.asymptotic_labels(Complex64::new(1.0, 0.0))?;
        // anchor values in label order: re-evaluate the sorted pairs at K0
        set.anchor_values = labels
            .iter()
            .map(|l| l.anchor_value)
            .collect::<Vec<_>>()
            .iter()
            .map(|v| *v)
            .collect();
        Ok(set)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &PolynomialMatrix {
        &self.matrix
    }

    pub fn anchor_radius(&self) -> f64 {
        self.anchor_radius
    }

    pub fn branch_points(&self) -> &[BranchPoint] {
        &self.branch_points
    }

    /// Unlabeled roots of the characteristic polynomial at k, sorted by
    /// (Re descending, then Im descending).
    pub fn roots_at(&self, k: Complex64) -> Result<Vec<Complex64>> {
        let mut roots = roots_of_balanced(&char_poly(&self.matrix, k))?;
        if roots.len() != self.n {
            return Err(UtmError::RootFinderDiverged { iterations: 0 });
        }
        sort_desc(&mut roots);
        Ok(roots)
    }

    /// Labeled branch values at k, by continuation from the anchor along an
    /// arc at radius K0 followed by a radial segment, detouring around branch
    /// points.
    pub fn branches_at(&self, k: Complex64) -> Result<Vec<Complex64>> {
        let path = self.label_path(k);
        let start = self.anchor_values.clone();
        let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
            let r = roots_of_balanced(&char_poly(&self.matrix, kk))?;
            if r.len() != self.n {
                return Err(UtmError::RootFinderDiverged { iterations: 0 });
            }
            Ok(r)
        };
        track_along(&roots_fn, start, &path, self.near_branch_point(k))
    }

    fn near_branch_point(&self, k: Complex64) -> bool {
        self.branch_points
            .iter()
            .any(|b| (k - b.location).norm() < 1e-6 * (1.0 + b.location.norm()))
    }

    /// Continuation waypoints from the anchor K0 to k. The path runs radially
    /// inward to a radius inside every branching point, swings around an arc
    /// there, and goes radially out to k; the effective branch cuts therefore
    /// run radially outward from the branching points (so e.g. Omega stays
    /// even in k for the Klein-Gordon symbol, matching the usual convention).
    fn label_path(&self, k: Complex64) -> Vec<Complex64> {
        let k0 = self.anchor_radius;
        let anchor = Complex64::new(k0, 0.0);
        let min_branching = self
            .branch_points
            .iter()
            .filter(|b| b.kind == BranchPointKind::Branching)
            .map(|b| b.location.norm())
            .fold(f64::INFINITY, f64::min);
        let mut pts = vec![anchor];
        if !min_branching.is_finite() || min_branching < 1e-6 {
            // no branching points (or one pinned at the origin): any path
            // defines the same labels; go straight, detouring around
            // collisions only so that root matching stays unambiguous
            self.append_segment_with_detours(&mut pts, anchor, k);
            return pts;
        }
        let r_safe = 0.5 * min_branching;
        let theta = if k.norm() > 0.0 { k.arg() } else { 0.0 };
        // inward along the positive real axis
        self.append_segment_with_detours(&mut pts, anchor, Complex64::new(r_safe, 0.0));
        // arc at the safe radius (short way round)
        let steps = ((theta.abs() / 0.2).ceil() as usize).max(1);
        for s in 1..=steps {
            let th = theta * (s as f64) / (steps as f64);
            pts.push(Complex64::new(r_safe * th.cos(), r_safe * th.sin()));
        }
        // outward to the target
        let a = *pts.last().unwrap();
        self.append_segment_with_detours(&mut pts, a, k);
        pts
    }

    /// Appends waypoints from `a` to `b`, replacing stretches that pass close
    /// to a branch point by a circular detour around it.
    fn append_segment_with_detours(&self, pts: &mut Vec<Complex64>, a: Complex64, b: Complex64) {
        let dir = b - a;
        let len = dir.norm();
        if len == 0.0 {
            return;
        }
        let u = dir / len;
        // avoidance radius: small relative to the branch-point spacing
        let mut min_gap = f64::INFINITY;
        for (i, p) in self.branch_points.iter().enumerate() {
            for q in self.branch_points.iter().skip(i + 1) {
                min_gap = min_gap.min((p.location - q.location).norm());
            }
        }
        struct Detour {
            t_in: f64,
            t_out: f64,
            center: Complex64,
            radius: f64,
        }
        let mut detours: Vec<Detour> = vec![];
        for bp in &self.branch_points {
            let r = (0.08 * (1.0 + bp.location.norm())).min(0.4 * min_gap);
            let w = bp.location - a;
            let t_foot = (w.re * u.re + w.im * u.im).clamp(0.0, len);
            let foot = a + u * t_foot;
            let h = (foot - bp.location).norm();
            if h >= r {
                continue;
            }
            let half = (r * r - h * h).sqrt();
            let t_in = t_foot - half;
            let t_out = t_foot + half;
            if t_out <= 0.0 || t_in >= len {
                continue;
            }
            detours.push(Detour {
                t_in: t_in.max(0.0),
                t_out: t_out.min(len),
                center: bp.location,
                radius: r,
            });
        }
        detours.sort_by(|x, y| x.t_in.partial_cmp(&y.t_in).unwrap());
        let mut t = 0.0_f64;
        let push_line = |pts: &mut Vec<Complex64>, from: f64, to: f64| {
            let steps = (((to - from) / (0.05 * (1.0 + len))).ceil() as usize).max(1);
            for s in 1..=steps {
                pts.push(a + u * (from + (to - from) * (s as f64) / (steps as f64)));
            }
        };
        for d in &detours {
            if d.t_in > t {
                push_line(pts, t, d.t_in);
            }
            let entry = a + u * d.t_in.max(t);
            let exit = a + u * d.t_out;
            let th_in = (entry - d.center).arg();
            let th_out = (exit - d.center).arg();
            // go counterclockwise from entry to exit
            let mut dth = th_out - th_in;
            while dth <= 0.0 {
                dth += 2.0 * PI;
            }
            let steps = ((dth / 0.2).ceil() as usize).max(1);
            for s in 0..=steps {
                let th = th_in + dth * (s as f64) / (steps as f64);
                pts.push(d.center + Complex64::new(d.radius * th.cos(), d.radius * th.sin()));
            }
            t = d.t_out;
        }
        if t < len {
            push_line(pts, t, len);
        }
        // ensure exact endpoint
        if (*pts.last().unwrap() - b).norm() > 1e-12 * (1.0 + len) {
            pts.push(b);
        } else {
            *pts.last_mut().unwrap() = b;
        }
    }

    /// Branch points with branching/collision classification.
    pub fn branch_points_classified(&self) -> &[BranchPoint] {
        &self.branch_points
    }

    /// Orders branches by leading behavior along the given ray direction:
    /// descending exponent, then descending (Re, Im) of the leading
    /// coefficient.
    pub fn asymptotic_labels(&self, direction: Complex64) -> Result<Vec<AsymptoticLabelFull>> {
        let u = direction / direction.norm();
        let k1 = u * self.anchor_radius;
        let k2 = u * (2.0 * self.anchor_radius);
        let mut v1 = roots_of_balanced(&char_poly(&self.matrix, k1))?;
        sort_desc(&mut v1);
        let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
            roots_of_balanced(&char_poly(&self.matrix, kk))
        };
        let v2 = track_along(&roots_fn, v1.clone(), &[k1, k2], false)?;
        let mut labels: Vec<AsymptoticLabelFull> = v1
            .iter()
            .zip(v2.iter())
            .map(|(&a, &b)| {
                let m1 = a.norm().max(1e-300);
                let m2 = b.norm().max(1e-300);
                let exponent = (m2 / m1).ln() / 2.0_f64.ln();
                let coefficient = a / Complex64::new(self.anchor_radius, 0.0).powf(exponent)
                    / u.powf(exponent);
                AsymptoticLabelFull {
                    exponent,
                    coefficient,
                    anchor_value: a,
                }
            })
            .collect();
        labels.sort_by(|x, y| cmp_asymptotic(x, y));
        // reject indistinct leading behavior
        for i in 0..labels.len().saturating_sub(1) {
            let (x, y) = (&labels[i], &labels[i + 1]);
            if (x.exponent - y.exponent).abs() < 0.1
                && (x.coefficient - y.coefficient).norm()
                    < 1e-6 * (1.0 + x.coefficient.norm() + y.coefficient.norm())
            {
                return Err(UtmError::IndistinctAsymptotics { a: i, b: i + 1 });
            }
        }
        Ok(labels)
    }

    /// The dispersion relation as a bivariate polynomial P(k, omega).
    pub fn bivariate(&self) -> BivariatePoly {
        bivariate_char_poly(&self.matrix)
    }
}

/// Asymptotic label together with its anchor-radius branch value.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticLabelFull {
    pub exponent: f64,
    pub coefficient: Complex64,
    pub anchor_value: Complex64,
}

fn cmp_asymptotic(x: &AsymptoticLabelFull, y: &AsymptoticLabelFull) -> Ordering {
    // descending exponent with a tolerance band, then descending (Re, Im)
    if (x.exponent - y.exponent).abs() >= 0.1 {
        return y.exponent.partial_cmp(&x.exponent).unwrap();
    }
    let scale = 1.0 + x.coefficient.norm() + y.coefficient.norm();
    if (x.coefficient.re - y.coefficient.re).abs() >= 1e-9 * scale {
        return y
            .coefficient
            .re
            .partial_cmp(&x.coefficient.re)
            .unwrap();
    }
    y.coefficient.im.partial_cmp(&x.coefficient.im).unwrap()
}

/// Sorts complex values by (Re descending, Im descending) with a small
/// tolerance on the real part.
pub fn sort_desc(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        let scale = 1.0 + a.norm() + b.norm();
        if (a.re - b.re).abs() >= 1e-9 * scale {
            b.re.partial_cmp(&a.re).unwrap()
        } else {
            b.im.partial_cmp(&a.im).unwrap()
        }
    });
}

/// The bivariate characteristic polynomial det(omega I - Lambda(k)) recovered
/// by circle interpolation of its omega-coefficients in k.
pub fn bivariate_char_poly(m: &PolynomialMatrix) -> BivariatePoly {
    let n = m.size();
    let kdeg = m.order() * n;
    let coeffs: Vec<PolynomialScalar> = (0..=n)
        .map(|i| {
            PolynomialScalar::new(coefficients_from_samples(
                |k| char_poly(m, k)[i],
                kdeg,
                1.4,
            ))
            .trimmed(1e-11)
        })
        .collect();
    BivariatePoly::new(coeffs)
}

/// Matches each previous value to its strict nearest root; fails (None) if the
/// assignment is ambiguous or non-injective.
pub fn match_strict(prev: &[Complex64], roots: &[Complex64]) -> Option<Vec<Complex64>> {
    if roots.len() < prev.len() {
        return None;
    }
    let mut chosen = vec![usize::MAX; prev.len()];
    for (i, &p) in prev.iter().enumerate() {
        let mut d1 = f64::INFINITY;
        let mut d2 = f64::INFINITY;
        let mut best = usize::MAX;
        for (j, &r) in roots.iter().enumerate() {
            let d = (p - r).norm();
            if d < d1 {
                d2 = d1;
                d1 = d;
                best = j;
            } else if d < d2 {
                d2 = d;
            }
        }
        // require a clear margin between nearest and second nearest
        if !(d1 < 0.5 * d2 || d1 < 1e-13 * (1.0 + p.norm())) {
            return None;
        }
        chosen[i] = best;
    }
    let mut seen = vec![false; roots.len()];
    for &cj in &chosen {
        if seen[cj] {
            return None;
        }
        seen[cj] = true;
    }
    Some(chosen.iter().map(|&j| roots[j]).collect())
}

/// Greedy assignment used as a fallback when the target sits on (or next to) a
/// point where roots coincide: globally smallest distances first.
fn match_greedy(prev: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    let mut pairs: Vec<(f64, usize, usize)> = vec![];
    for (i, &p) in prev.iter().enumerate() {
        for (j, &r) in roots.iter().enumerate() {
            pairs.push(((p - r).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = vec![Complex64::new(f64::NAN, f64::NAN); prev.len()];
    let mut used_i = vec![false; prev.len()];
    let mut used_j = vec![false; roots.len()];
    for (_, i, j) in pairs {
        if !used_i[i] && !used_j[j] {
            used_i[i] = true;
            used_j[j] = true;
            out[i] = roots[j];
        }
    }
    out
}

/// Tracks labeled values along a waypoint path by continuation, with adaptive
/// bisection between waypoints. `roots_at` returns the unlabeled roots.
pub fn track_along<F>(
    roots_at: &F,
    start: Vec<Complex64>,
    path: &[Complex64],
    allow_final_greedy: bool,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Vec<Complex64>>,
{
    let mut vals = start;
    for w in 1..path.len() {
        let last = w == path.len() - 1;
        vals = track_segment(roots_at, vals, path[w - 1], path[w], 28, last && allow_final_greedy)?;
    }
    Ok(vals)
}

fn track_segment<F>(
    roots_at: &F,
    vals: Vec<Complex64>,
    from: Complex64,
    to: Complex64,
    depth: usize,
    greedy_at_end: bool,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Vec<Complex64>>,
{
    let roots = roots_at(to)?;
    if let Some(next) = match_strict(&vals, &roots) {
        return Ok(next);
    }
    if depth == 0 {
        if greedy_at_end {
            return Ok(match_greedy(&vals, &roots));
        }
        return Err(UtmError::ContinuationAmbiguity { k: to });
    }
    let mid = (from + to) * 0.5;
    let at_mid = track_segment(roots_at, vals, from, mid, depth - 1, false)?;
    track_segment(roots_at, at_mid, mid, to, depth - 1, greedy_at_end)
}

/// Locates the roots of the discriminant of the characteristic polynomial in
/// k and classifies each by a monodromy loop.
fn locate_branch_points(m: &PolynomialMatrix) -> Result<Vec<BranchPoint>> {
    let n = m.size();
    if n == 1 {
        return Ok(vec![]);
    }
    // resultant of P and dP/domega as a Sylvester determinant, sampled in k
    let sylvester_det = |k: Complex64| -> Complex64 {
        let p = char_poly(m, k);
        let dp: Vec<Complex64> = p[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (i as f64 + 1.0))
            .collect();
        let size = 2 * n - 1;
        let mut s = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
        // n-1 rows of p (degree n), n rows of dp (degree n-1)
        for r in 0..(n - 1) {
            for (j, &c) in p.iter().enumerate() {
                s[(r, r + (n - j))] = c;
            }
        }
        for r in 0..n {
            for (j, &c) in dp.iter().enumerate() {
                s[(n - 1 + r, r + (n - 1 - j))] = c;
            }
        }
        s.determinant()
    };
    let deg = (2 * n - 1) * m.order() * n;
    let disc = PolynomialScalar::new(coefficients_from_samples(sylvester_det, deg, 1.3))
        .trimmed(1e-10);
    let max_coeff = disc
        .coefficients()
        .iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max);
    if max_coeff < 1e-12 {
        return Err(UtmError::DegenerateDiscriminant);
    }
    let roots = disc.roots()?;
    // cluster near-identical roots (multiplicities of the discriminant)
    let mut centers: Vec<Complex64> = vec![];
    for r in roots {
        let tol = 1e-4 * (1.0 + r.norm());
        if let Some(c) = centers.iter_mut().find(|c| (**c - r).norm() < tol) {
            *c = (*c + r) * 0.5;
        } else {
            centers.push(r);
        }
    }
    centers.sort_by(|a, b| {
        let s = 1.0 + a.norm() + b.norm();
        if (a.re - b.re).abs() >= 1e-9 * s {
            a.re.partial_cmp(&b.re).unwrap()
        } else {
            a.im.partial_cmp(&b.im).unwrap()
        }
    });
    // monodromy classification
    let mut out = vec![];
    for (i, &bp) in centers.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (j, &other) in centers.iter().enumerate() {
            if j != i {
                nearest = nearest.min((bp - other).norm());
            }
        }
        let radius = if nearest.is_finite() {
            (0.05 * (1.0 + bp.norm())).min(0.4 * nearest)
        } else {
            0.05 * (1.0 + bp.norm())
        };
        let kind = monodromy_kind(m, bp, radius)?;
        out.push(BranchPoint {
            location: bp,
            kind,
        });
    }
    Ok(out)
}

fn monodromy_kind(
    m: &PolynomialMatrix,
    bp: Complex64,
    radius: f64,
) -> Result<BranchPointKind> {
    let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
        roots_of_balanced(&char_poly(m, kk))
    };
    let steps = 64usize;
    let point = |s: usize| -> Complex64 {
        let th = 2.0 * PI * (s as f64) / (steps as f64);
        bp + Complex64::new(radius * th.cos(), radius * th.sin())
    };
    let mut start = roots_fn(point(0))?;
    sort_desc(&mut start);
    let path: Vec<Complex64> = (0..=steps).map(point).collect();
    let end = track_along(&roots_fn, start.clone(), &path, false)?;
    let moved = start
        .iter()
        .zip(end.iter())
        .any(|(a, b)| (a - b).norm() > 1e-5 * (1.0 + a.norm()));
    Ok(if moved {
        BranchPointKind::Branching
    } else {
        BranchPointKind::Collision
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;

    #[test]
    fn kg_branch_points_are_pm_i_branching() {
        let b = BranchSet::build(&PolynomialMatrix::klein_gordon(1.0)).unwrap();
        let bps = b.branch_points();
        assert_eq!(bps.len(), 2);
        assert!(bps
            .iter()
            .any(|p| (p.location - c(0.0, 1.0)).norm() < 1e-6));
        assert!(bps
            .iter()
            .any(|p| (p.location - c(0.0, -1.0)).norm() < 1e-6));
        assert!(bps.iter().all(|p| p.kind == BranchPointKind::Branching));
    }

    #[test]
    fn fn_branch_points_solve_quartic() {
        // (1 + k^2)^2 = 2 for beta = 0.5
        let b = BranchSet::build(&PolynomialMatrix::fitzhugh_nagumo(0.5)).unwrap();
        let bps = b.branch_points();
        assert_eq!(bps.len(), 4);
        for p in bps {
            let k2 = p.location * p.location;
            let lhs = (c(1.0, 0.0) + k2) * (c(1.0, 0.0) + k2);
            assert!((lhs - c(2.0, 0.0)).norm() < 1e-5, "at {}", p.location);
            assert_eq!(p.kind, BranchPointKind::Branching);
        }
    }

    #[test]
    fn wave_a0_origin_is_collision() {
        let b = BranchSet::build(&PolynomialMatrix::wave_family(0.0)).unwrap();
        let bps = b.branch_points();
        assert_eq!(bps.len(), 1);
        assert!(bps[0].location.norm() < 1e-6);
        assert_eq!(bps[0].kind, BranchPointKind::Collision);
    }

    #[test]
    fn kg_labels_at_origin() {
        // Omega_1 = +i sqrt(alpha + k^2): at k = 0 gives (i, -i)
        let b = BranchSet::build(&PolynomialMatrix::klein_gordon(1.0)).unwrap();
        let v = b.branches_at(c(0.0, 0.0)).unwrap();
        assert!((v[0] - c(0.0, 1.0)).norm() < 1e-8, "got {:?}", v);
        assert!((v[1] - c(0.0, -1.0)).norm() < 1e-8);
    }

    #[test]
    fn fn_labels_at_origin_beta_zero() {
        let b = BranchSet::build(&PolynomialMatrix::fitzhugh_nagumo(0.0)).unwrap();
        let v = b.branches_at(c(0.0, 0.0)).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-8, "got {:?}", v);
        assert!(v[1].norm() < 1e-8);
    }

    #[test]
    fn wave_labels_a1_k1() {
        // Omega_{1,2} = i k alpha_{1,2}, alpha_{1,2} = (-a +- sqrt(4 + a^2))/2
        let b = BranchSet::build(&PolynomialMatrix::wave_family(1.0)).unwrap();
        let v = b.branches_at(c(1.0, 0.0)).unwrap();
        let s5 = 5.0_f64.sqrt();
        assert!((v[0] - c(0.0, (-1.0 + s5) / 2.0)).norm() < 1e-8, "got {:?}", v);
        assert!((v[1] - c(0.0, (-1.0 - s5) / 2.0)).norm() < 1e-8);
    }

    #[test]
    fn fn_asymptotic_exponents() {
        // Omega_1 ~ k^2, Omega_2 ~ beta/k^2 on the real axis
        let b = BranchSet::build(&PolynomialMatrix::fitzhugh_nagumo(0.5)).unwrap();
        let labels = b.asymptotic_labels(c(1.0, 0.0)).unwrap();
        assert!((labels[0].exponent - 2.0).abs() < 0.05);
        assert!((labels[1].exponent + 2.0).abs() < 0.05);
    }

    #[test]
    fn kg_asymptotic_pm_ik() {
        let b = BranchSet::build(&PolynomialMatrix::klein_gordon(1.0)).unwrap();
        let labels = b.asymptotic_labels(c(1.0, 0.0)).unwrap();
        assert!((labels[0].exponent - 1.0).abs() < 0.05);
        assert!((labels[0].coefficient - c(0.0, 1.0)).norm() < 2e-2);
        assert!((labels[1].coefficient - c(0.0, -1.0)).norm() < 2e-2);
    }

    #[test]
    fn wave_a0_asymptotic_exact() {
        let b = BranchSet::build(&PolynomialMatrix::wave_family(0.0)).unwrap();
        let labels = b.asymptotic_labels(c(1.0, 0.0)).unwrap();
        assert!((labels[0].coefficient - c(0.0, 1.0)).norm() < 1e-6);
        assert!((labels[1].coefficient - c(0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn root_residuals_random_sample() {
        for m in [
            PolynomialMatrix::klein_gordon(1.0),
            PolynomialMatrix::fitzhugh_nagumo(0.5),
            PolynomialMatrix::wave_family(1.0),
        ] {
            let b = BranchSet::build(&m).unwrap();
            let n = b.size() as i32;
            let mut seed = 0xfeedu64;
            let mut next = || {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((seed >> 33) as f64 / (1u64 << 31) as f64) * 20.0 - 10.0
            };
            for _ in 0..1000 {
                let k = c(next(), next());
                if k.norm() > 10.0 {
                    continue;
                }
                let p = PolynomialScalar::new(char_poly(&m, k));
                for r in b.roots_at(k).unwrap() {
                    assert!(p.eval(r).norm() <= 1e-10 * (1.0 + k.norm()).powi(n) * 10.0);
                }
            }
        }
    }

    #[test]
    fn label_continuity_along_straight_paths() {
        let b = BranchSet::build(&PolynomialMatrix::klein_gordon(1.0)).unwrap();
        // straight path staying >= 0.1 away from +-i; labels continued along
        // the path stay matched far below the inter-branch gap
        let a = c(-3.0, 0.5);
        let z = c(3.0, 0.5);
        let mut prev = b.branches_at(a).unwrap();
        let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
            roots_of_balanced(&char_poly(b.matrix(), kk))
        };
        let steps = 60;
        for s in 1..=steps {
            let k = a + (z - a) * (s as f64 / steps as f64);
            let from = a + (z - a) * ((s - 1) as f64 / steps as f64);
            let cur = track_along(&roots_fn, prev.clone(), &[from, k], false).unwrap();
            let gap = (cur[0] - cur[1]).norm();
            for j in 0..2 {
                assert!((cur[j] - prev[j]).norm() < gap / 2.0);
            }
            prev = cur;
        }
    }

    #[test]
    fn monodromy_around_kg_branch_point_swaps_labels() {
        let b = BranchSet::build(&PolynomialMatrix::klein_gordon(1.0)).unwrap();
        let bp = c(0.0, 1.0);
        let radius = 0.05;
        let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
            roots_of_balanced(&char_poly(b.matrix(), kk))
        };
        let steps = 64usize;
        let path: Vec<Complex64> = (0..=steps)
            .map(|s| {
                let th = 2.0 * PI * (s as f64) / (steps as f64);
                bp + c(radius * th.cos(), radius * th.sin())
            })
            .collect();
        let mut start = roots_fn(path[0]).unwrap();
        sort_desc(&mut start);
        let end = track_along(&roots_fn, start.clone(), &path, false).unwrap();
        // the two branches swap
        assert!((end[0] - start[1]).norm() < 1e-6);
        assert!((end[1] - start[0]).norm() < 1e-6);
    }

    #[test]
    fn monodromy_around_wave_collision_is_identity() {
        let b = BranchSet::build(&PolynomialMatrix::wave_family(0.0)).unwrap();
        let bp = c(0.0, 0.0);
        let radius = 0.05;
        let roots_fn = |kk: Complex64| -> Result<Vec<Complex64>> {
            roots_of_balanced(&char_poly(b.matrix(), kk))
        };
        let steps = 64usize;
        let path: Vec<Complex64> = (0..=steps)
            .map(|s| {
                let th = 2.0 * PI * (s as f64) / (steps as f64);
                bp + c(radius * th.cos(), radius * th.sin())
            })
            .collect();
        let mut start = roots_fn(path[0]).unwrap();
        sort_desc(&mut start);
        let end = track_along(&roots_fn, start.clone(), &path, false).unwrap();
        assert!((end[0] - start[0]).norm() < 1e-8);
        assert!((end[1] - start[1]).norm() < 1e-8);
    }
}
