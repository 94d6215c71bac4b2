//! The inaccessible region D+, its boundary path, deformed paths, and decay
//! certificates justifying deformations.

use crate::dispersion::BranchSet;
use crate::error::{Result, UtmError};
use crate::quad::{adaptive_quad, QuadValue};
use crate::transforms::SpectralFunction;
use num_complex::Complex64;
use std::f64::consts::PI;

/// The region D+ = union over j of { Im k > 0, Re Omega_j(k) < 0 } where the
/// solution-transform terms grow and block contour deformation.
#[derive(Debug, Clone)]
pub struct Region {
    branch: BranchSet,
}

impl Region {
    pub fn new(branch: BranchSet) -> Self {
        Self { branch }
    }

    pub fn branch_set(&self) -> &BranchSet {
        &self.branch
    }

    /// min over j of Re Omega_j(k); negative inside D+ (for Im k > 0).
    pub fn min_re_omega(&self, k: Complex64) -> Result<f64> {
        Ok(self
            .branch
            .roots_at(k)?
            .iter()
            .map(|w| w.re)
            .fold(f64::INFINITY, f64::min))
    }
}

/// Membership test for the inaccessible region.
pub fn in_d_plus(r: &Region, k: Complex64) -> Result<bool> {
    if k.im <= 0.0 {
        return Ok(false);
    }
    Ok(r.min_re_omega(k)? < 0.0)
}

/// A smooth piece of an integration path.
#[derive(Debug, Clone)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        from_angle: f64,
        to_angle: f64,
    },
    Polyline {
        points: Vec<Complex64>,
    },
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        match self {
            Segment::Line { from, .. } => *from,
            Segment::Arc {
                center,
                radius,
                from_angle,
                ..
            } => center + Complex64::new(radius * from_angle.cos(), radius * from_angle.sin()),
            Segment::Polyline { points } => points[0],
        }
    }

    pub fn end(&self) -> Complex64 {
        match self {
            Segment::Line { to, .. } => *to,
            Segment::Arc {
                center,
                radius,
                to_angle,
                ..
            } => center + Complex64::new(radius * to_angle.cos(), radius * to_angle.sin()),
            Segment::Polyline { points } => *points.last().unwrap(),
        }
    }

    fn primitives(&self) -> Vec<Prim> {
        match self {
            Segment::Line { from, to } => vec![Prim::Line {
                from: *from,
                to: *to,
            }],
            Segment::Arc {
                center,
                radius,
                from_angle,
                to_angle,
            } => vec![Prim::Arc {
                center: *center,
                radius: *radius,
                a0: *from_angle,
                a1: *to_angle,
            }],
            Segment::Polyline { points } => points
                .windows(2)
                .map(|w| Prim::Line {
                    from: w[0],
                    to: w[1],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Prim {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        a0: f64,
        a1: f64,
    },
}

impl Prim {
    fn length(&self) -> f64 {
        match self {
            Prim::Line { from, to } => (to - from).norm(),
            Prim::Arc { radius, a0, a1, .. } => radius * (a1 - a0).abs(),
        }
    }

    fn point(&self, t: f64) -> Complex64 {
        match self {
            Prim::Line { from, to } => from + (to - from) * t,
            Prim::Arc {
                center,
                radius,
                a0,
                a1,
            } => {
                let th = a0 + (a1 - a0) * t;
                center + Complex64::new(radius * th.cos(), radius * th.sin())
            }
        }
    }

    fn derivative(&self, t: f64) -> Complex64 {
        match self {
            Prim::Line { from, to } => to - from,
            Prim::Arc {
                center: _,
                radius,
                a0,
                a1,
            } => {
                let th = a0 + (a1 - a0) * t;
                Complex64::new(0.0, 1.0)
                    * (a1 - a0)
                    * Complex64::new(radius * th.cos(), radius * th.sin())
            }
        }
    }
}

/// An oriented integration path: ordered segments (continuous within each
/// connected component), a truncation radius, and flagged singular points.
#[derive(Debug, Clone)]
pub struct ContourPath {
    segments: Vec<Segment>,
    /// indices where a new (disjoint) component starts
    component_starts: Vec<usize>,
    truncation_radius: f64,
    removable: Vec<Complex64>,
    poles_avoided: Vec<Complex64>,
}

impl ContourPath {
    /// The real axis from -k to k, left to right.
    pub fn real_line(k: f64) -> Self {
        Self {
            segments: vec![Segment::Line {
                from: Complex64::new(-k, 0.0),
                to: Complex64::new(k, 0.0),
            }],
            component_starts: vec![0],
            truncation_radius: k,
            removable: vec![],
            poles_avoided: vec![],
        }
    }

    /// A single connected path; adjacent segments must join continuously.
    pub fn from_segments(segments: Vec<Segment>, truncation_radius: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(UtmError::InvalidData("empty contour".into()));
        }
        for w in segments.windows(2) {
            let (a, b) = (w[0].end(), w[1].start());
            if (a - b).norm() > 1e-9 * (1.0 + a.norm() + b.norm()) {
                return Err(UtmError::ContourTopology(format!(
                    "segments do not connect: {a} vs {b}"
                )));
            }
        }
        Ok(Self {
            segments,
            component_starts: vec![0],
            truncation_radius,
            removable: vec![],
            poles_avoided: vec![],
        })
    }

    /// Disjoint polyline components (e.g. several boundary curves of D+).
    pub fn from_disjoint(components: Vec<Vec<Complex64>>, truncation_radius: f64) -> Result<Self> {
        if components.is_empty() || components.iter().any(|c| c.len() < 2) {
            return Err(UtmError::ContourTopology(
                "each path component needs at least 2 points".into(),
            ));
        }
        let mut segments = vec![];
        let mut component_starts = vec![];
        for comp in components {
            component_starts.push(segments.len());
            segments.push(Segment::Polyline { points: comp });
        }
        Ok(Self {
            segments,
            component_starts,
            truncation_radius,
            removable: vec![],
            poles_avoided: vec![],
        })
    }

    pub fn with_removable(mut self, points: Vec<Complex64>) -> Self {
        self.removable = points;
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn removable(&self) -> &[Complex64] {
        &self.removable
    }

    pub fn poles_avoided(&self) -> &[Complex64] {
        &self.poles_avoided
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments.last().unwrap().end()
    }

    /// Whether the path reduces to a straight run along the real axis.
    pub fn is_real_line(&self) -> bool {
        self.segments.iter().all(|s| match s {
            Segment::Line { from, to } => from.im.abs() < 1e-12 && to.im.abs() < 1e-12,
            Segment::Polyline { points } => points.iter().all(|p| p.im.abs() < 1e-12),
            Segment::Arc { .. } => false,
        })
    }

    /// Integrates f(z) dz along the path. `osc` is the expected phase rate of
    /// the integrand (radians per unit arc length); one seed panel is laid per
    /// expected oscillation.
    pub fn integrate<F>(&self, f: &F, tol: f64, osc: f64) -> QuadValue
    where
        F: Fn(Complex64) -> Complex64,
    {
        let prims: Vec<Prim> = self.segments.iter().flat_map(|s| s.primitives()).collect();
        let total_len: f64 = prims.iter().map(|p| p.length()).sum();
        if total_len == 0.0 {
            return QuadValue::zero();
        }
        let mut out = QuadValue::zero();
        for prim in &prims {
            let len = prim.length();
            if len == 0.0 {
                continue;
            }
            let tol_i = tol * (len / total_len).max(1e-3);
            let seed = ((len * osc / (2.0 * PI)).ceil() as usize).clamp(1, 20_000);
            let removable = &self.removable;
            let mut integrand = |t: f64| {
                let z = prim.point(t);
                let dz = prim.derivative(t);
                let near = removable
                    .iter()
                    .any(|r| (z - r).norm() < 1e-6 * (1.0 + r.norm()));
                if near {
                    // symmetric two-sided average across the removable point
                    let u = dz / dz.norm();
                    0.5 * (f(z + u * 1e-4) + f(z - u * 1e-4)) * dz
                } else {
                    f(z) * dz
                }
            };
            let q = adaptive_quad(&mut integrand, 0.0, 1.0, tol_i, seed, 60_000);
            out.accumulate(&q);
        }
        out
    }

    /// Straight-line continuations of the outer ends of each component out to
    /// the target radius, for growing the truncation. Returns None if the path
    /// is closed or ends in an arc.
    pub fn tail_extensions(&self, target_radius: f64) -> Option<Vec<ContourPath>> {
        self.tail_extensions_between(0.0, target_radius)
    }

    /// Like `tail_extensions`, but each piece only covers radii in
    /// [from_radius, target_radius], so repeated doubling never re-integrates
    /// an extent already accumulated.
    pub fn tail_extensions_between(
        &self,
        from_radius: f64,
        target_radius: f64,
    ) -> Option<Vec<ContourPath>> {
        let mut out = vec![];
        for (ci, &start_idx) in self.component_starts.iter().enumerate() {
            let end_idx = self
                .component_starts
                .get(ci + 1)
                .copied()
                .unwrap_or(self.segments.len())
                - 1;
            let first = &self.segments[start_idx];
            let last = &self.segments[end_idx];
            let (a, b) = (first.start(), last.end());
            if (a - b).norm() < 1e-9 * (1.0 + a.norm()) {
                continue; // closed component
            }
            // head: extend backwards along the initial direction
            let head_dir = match first {
                Segment::Line { from, to } => (from - to).unit(),
                Segment::Polyline { points } => (points[0] - points[1]).unit(),
                Segment::Arc { .. } => return None,
            };
            let tail_dir = match last {
                Segment::Line { from, to } => (to - from).unit(),
                Segment::Polyline { points } => {
                    let n = points.len();
                    (points[n - 1] - points[n - 2]).unit()
                }
                Segment::Arc { .. } => return None,
            };
            let head_from = (from_radius - a.norm()).max(0.0);
            let head_len = target_radius - a.norm();
            if head_len > head_from {
                out.push(ContourPath {
                    segments: vec![Segment::Line {
                        from: a + head_dir * head_len,
                        to: a + head_dir * head_from,
                    }],
                    component_starts: vec![0],
                    truncation_radius: target_radius,
                    removable: self.removable.clone(),
                    poles_avoided: vec![],
                });
            }
            let tail_from = (from_radius - b.norm()).max(0.0);
            let tail_len = target_radius - b.norm();
            if tail_len > tail_from {
                out.push(ContourPath {
                    segments: vec![Segment::Line {
                        from: b + tail_dir * tail_from,
                        to: b + tail_dir * tail_len,
                    }],
                    component_starts: vec![0],
                    truncation_radius: target_radius,
                    removable: self.removable.clone(),
                    poles_avoided: vec![],
                });
            }
        }
        Some(out)
    }
}

trait Unit {
    fn unit(self) -> Complex64;
}
impl Unit for Complex64 {
    fn unit(self) -> Complex64 {
        self / self.norm()
    }
}

/// Traces the boundary of D+ within |k| <= k_max, oriented with D+ on the
/// left; degenerates to the real line when D+ fills (or misses) the scanned
/// upper half disk.
pub fn boundary_path(region: &Region, k_max: f64) -> Result<ContourPath> {
    let nx = ((2.0 * k_max / 0.1).ceil() as usize).clamp(160, 1200);
    let ny = 160usize;
    let xs: Vec<f64> = (0..=nx)
        .map(|i| -k_max + 2.0 * k_max * (i as f64) / (nx as f64))
        .collect();
    let ys: Vec<f64> = (0..ny)
        .map(|j| k_max * (j as f64 + 0.5) / (ny as f64))
        .collect();

    let s_at = |x: f64, y: f64| -> Result<f64> { region.min_re_omega(Complex64::new(x, y)) };

    let mut col_crossings: Vec<Vec<f64>> = Vec::with_capacity(xs.len());
    let mut neg = 0usize;
    let mut pos = 0usize;
    for &x in &xs {
        let mut crossings = vec![];
        let mut prev: Option<(f64, f64)> = None; // (y, s) of last nonzero sign
        for &y in &ys {
            let s = s_at(x, y)?;
            let tau = 1e-12 * (1.0 + x.abs() + y);
            if s < -tau {
                neg += 1;
            } else if s > tau {
                pos += 1;
            } else {
                continue;
            }
            if let Some((py, ps)) = prev {
                if ps.signum() != s.signum() {
                    // bisection refine the crossing
                    let (mut ya, mut yb, mut sa) = (py, y, ps);
                    for _ in 0..60 {
                        let ym = 0.5 * (ya + yb);
                        let sm = s_at(x, ym)?;
                        if sm.signum() == sa.signum() {
                            ya = ym;
                            sa = sm;
                        } else {
                            yb = ym;
                        }
                    }
                    let yc = 0.5 * (ya + yb);
                    if x * x + yc * yc <= k_max * k_max {
                        crossings.push(yc);
                    }
                }
            }
            prev = Some((y, s));
        }
        col_crossings.push(crossings);
    }

    let total_crossings: usize = col_crossings.iter().map(|c| c.len()).sum();
    if total_crossings == 0 {
        let frac_neg = neg as f64 / ((neg + pos).max(1) as f64);
        if frac_neg > 0.99 || frac_neg < 0.01 {
            // D+ fills the scanned half disk (or is absent): no deformation
            return Ok(ContourPath::real_line(k_max));
        }
        return Err(UtmError::ContourTopology(format!(
            "no boundary crossings found but sign pattern is mixed ({:.0}% negative)",
            100.0 * frac_neg
        )));
    }

    // link column crossings into curves
    let dx = 2.0 * k_max / (nx as f64);
    let link_tol = 4.0 * (dx + k_max / (ny as f64));
    struct Curve {
        points: Vec<Complex64>,
        open: bool,
    }
    let mut curves: Vec<Curve> = vec![];
    for (i, crossings) in col_crossings.iter().enumerate() {
        let x = xs[i];
        let mut claimed: Vec<usize> = vec![];
        for &y in crossings {
            let z = Complex64::new(x, y);
            let mut best: Option<(usize, f64)> = None;
            for (ci, c) in curves.iter().enumerate() {
                if !c.open || claimed.contains(&ci) {
                    continue;
                }
                let last = *c.points.last().unwrap();
                if (last.re - x).abs() > 1.5 * dx {
                    continue;
                }
                let d = (last.im - y).abs();
                if d < link_tol && best.map(|(_, bd)| d < bd).unwrap_or(true) {
                    best = Some((ci, d));
                }
            }
            match best {
                Some((ci, _)) => {
                    curves[ci].points.push(z);
                    claimed.push(ci);
                }
                None => curves.push(Curve {
                    points: vec![z],
                    open: true,
                }),
            }
        }
        for (ci, c) in curves.iter_mut().enumerate() {
            if c.open && !claimed.contains(&ci) {
                let last = *c.points.last().unwrap();
                if (last.re - x).abs() > 1.5 * dx {
                    c.open = false;
                }
            }
        }
    }
    let mut components: Vec<Vec<Complex64>> = curves
        .into_iter()
        .map(|c| c.points)
        .filter(|p| p.len() >= 5)
        .collect();
    if components.is_empty() {
        return Err(UtmError::ContourTopology(
            "boundary crossings did not form a traceable curve".into(),
        ));
    }

    // orient each curve with D+ on its left
    for comp in components.iter_mut() {
        let mid = comp.len() / 2;
        let z = comp[mid];
        let tangent = (comp[mid + 1] - comp[mid - 1]).unit();
        let left = Complex64::new(0.0, 1.0) * tangent;
        let eps = 1e-3 * (1.0 + z.norm());
        let left_in = in_d_plus(region, z + left * eps)?;
        let right_in = in_d_plus(region, z - left * eps)?;
        match (left_in, right_in) {
            (true, false) => {}
            (false, true) => comp.reverse(),
            _ => {
                return Err(UtmError::ContourTopology(format!(
                    "cannot orient boundary curve near {z}"
                )))
            }
        }
    }
    ContourPath::from_disjoint(components, k_max)
}

/// Side of a point a path should pass on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Ensures the path passes on the requested side of `avoid`; when it does not,
/// a 45-degree tent with a semicircular cap of radius
/// min(0.1, |Im avoid| / 2) (or the supplied radius) is inserted over/under
/// the point. Only straight horizontal stretches are deformed.
pub fn shifted_path(
    base: &ContourPath,
    avoid: Complex64,
    side: Side,
    radius: Option<f64>,
) -> Result<ContourPath> {
    let r = radius.unwrap_or_else(|| (0.1_f64).min(avoid.im.abs() / 2.0));
    if r <= 0.0 {
        return Err(UtmError::InvalidDetourRadius(r));
    }
    // find the horizontal level of the path at Re = Re avoid
    let mut hit: Option<(usize, f64)> = None; // (segment index, level y0)
    for (si, seg) in base.segments().iter().enumerate() {
        if let Segment::Line { from, to } = seg {
            if (from.im - to.im).abs() < 1e-12
                && from.re.min(to.re) <= avoid.re
                && avoid.re <= from.re.max(to.re)
            {
                hit = Some((si, from.im));
                break;
            }
        }
    }
    let (si, y0) = match hit {
        Some(h) => h,
        None => return Ok(base.clone()), // path does not span that Re at all
    };
    let on_requested_side = match side {
        Side::Above => y0 > avoid.im + 0.5 * r,
        Side::Below => y0 < avoid.im - 0.5 * r,
    };
    if on_requested_side {
        return Ok(base.clone());
    }
    let (from, to) = match &base.segments()[si] {
        Segment::Line { from, to } => (*from, *to),
        _ => unreachable!(),
    };
    if to.re < from.re {
        return Err(UtmError::Unsupported(
            "detour insertion on right-to-left segments".into(),
        ));
    }
    let h = (avoid.im - y0).abs();
    let x_l = avoid.re - r - h;
    let x_r = avoid.re + r + h;
    if x_l <= from.re || x_r >= to.re {
        return Err(UtmError::Unsupported(format!(
            "segment too short to fit a detour around {avoid}"
        )));
    }
    let apex = avoid.im;
    let mut segs: Vec<Segment> = base.segments()[..si].to_vec();
    segs.push(Segment::Line {
        from,
        to: Complex64::new(x_l, y0),
    });
    segs.push(Segment::Line {
        from: Complex64::new(x_l, y0),
        to: Complex64::new(avoid.re - r, apex),
    });
    match side {
        Side::Above => segs.push(Segment::Arc {
            center: avoid,
            radius: r,
            from_angle: PI,
            to_angle: 0.0,
        }),
        Side::Below => segs.push(Segment::Arc {
            center: avoid,
            radius: r,
            from_angle: PI,
            to_angle: 2.0 * PI,
        }),
    }
    segs.push(Segment::Line {
        from: Complex64::new(avoid.re + r, apex),
        to: Complex64::new(x_r, y0),
    });
    segs.push(Segment::Line {
        from: Complex64::new(x_r, y0),
        to,
    });
    segs.extend_from_slice(&base.segments()[si + 1..]);
    let mut out = ContourPath::from_segments(segs, base.truncation_radius())?;
    out.removable = base.removable.clone();
    out.poles_avoided = base.poles_avoided.clone();
    out.poles_avoided.push(avoid);
    Ok(out)
}

/// Report from sampling |F| on growing arcs in a sector.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub pass: bool,
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

/// Samples |F(R e^{i theta})| at doubling radii across the sector; passes if
/// the maxima decrease monotonically and end below `tol`.
pub fn decay_certificate(
    f: &SpectralFunction,
    sector: (f64, f64),
    samples: usize,
    tol: f64,
) -> CertificateReport {
    let samples = samples.max(2);
    let angles = 9usize;
    let mut radii = vec![];
    let mut magnitudes = vec![];
    for m in 0..samples {
        let radius = 2.0 * 2.0_f64.powi(m as i32);
        let mut mag = 0.0_f64;
        for a in 0..angles {
            let th = sector.0 + (sector.1 - sector.0) * (a as f64 + 0.5) / (angles as f64);
            let k = Complex64::new(radius * th.cos(), radius * th.sin());
            mag = mag.max(f.eval(k).norm());
        }
        radii.push(radius);
        magnitudes.push(mag);
    }
    let monotone = magnitudes.windows(2).all(|w| w[1] <= w[0] * 1.001 + 1e-300);
    let pass = monotone && *magnitudes.last().unwrap() < tol;
    CertificateReport {
        pass,
        radii,
        magnitudes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::c;
    use crate::symbol::PolynomialMatrix;
    use crate::transforms::DomainTag;

    fn region(m: PolynomialMatrix) -> Region {
        Region::new(BranchSet::build(&m).unwrap())
    }

    #[test]
    fn fn_membership_examples() {
        let r = region(PolynomialMatrix::fitzhugh_nagumo(0.5));
        assert!(in_d_plus(&r, c(0.0, 2.0)).unwrap());
        assert!(!in_d_plus(&r, c(0.0, 0.5)).unwrap());
    }

    #[test]
    fn kg_membership_example() {
        let r = region(PolynomialMatrix::klein_gordon(1.0));
        assert!(in_d_plus(&r, c(1.0, 1.0)).unwrap());
        assert!(!in_d_plus(&r, c(1.0, -1.0)).unwrap());
    }

    #[test]
    fn fn_region_matches_hyperbola_inequality() {
        let r = region(PolynomialMatrix::fitzhugh_nagumo(0.5));
        for i in 0..40 {
            for j in 0..40 {
                let k = c(-4.0 + 8.07 * (i as f64) / 39.0, 4.03 * (j as f64 + 0.5) / 40.0);
                let want = k.im * k.im > 1.0 + k.re * k.re;
                assert_eq!(in_d_plus(&r, k).unwrap(), want, "at {k}");
            }
        }
    }

    #[test]
    fn kg_boundary_degenerates_to_real_line() {
        let r = region(PolynomialMatrix::klein_gordon(1.0));
        let p = boundary_path(&r, 10.0).unwrap();
        assert!(p.is_real_line());
    }

    #[test]
    fn wave_boundary_degenerates_to_real_line() {
        let r = region(PolynomialMatrix::wave_family(1.0));
        let p = boundary_path(&r, 10.0).unwrap();
        assert!(p.is_real_line());
    }

    #[test]
    fn fn_boundary_is_hyperbola() {
        let r = region(PolynomialMatrix::fitzhugh_nagumo(0.5));
        let p = boundary_path(&r, 8.0).unwrap();
        assert!(!p.is_real_line());
        // every vertex satisfies k_I = sqrt(1 + k_R^2)
        let mut count = 0;
        for seg in p.segments() {
            if let Segment::Polyline { points } = seg {
                for z in points {
                    let want = (1.0 + z.re * z.re).sqrt();
                    assert!(
                        (z.im - want).abs() < 1e-6 * (1.0 + want),
                        "vertex {z} vs {want}"
                    );
                    count += 1;
                }
            }
        }
        assert!(count > 50);
        // oriented left to right (D+ above on the left)
        assert!(p.start().re < 0.0 && p.end().re > 0.0);
    }

    #[test]
    fn path_region_consistency() {
        let r = region(PolynomialMatrix::fitzhugh_nagumo(0.5));
        let p = boundary_path(&r, 6.0).unwrap();
        for seg in p.segments() {
            if let Segment::Polyline { points } = seg {
                for w in points.windows(3).step_by(11) {
                    let z = w[1];
                    let t = (w[2] - w[0]).unit();
                    let left = c(0.0, 1.0) * t;
                    assert!(in_d_plus(&r, z + left * 1e-3).unwrap());
                    assert!(!in_d_plus(&r, z - left * 1e-3).unwrap());
                }
            }
        }
    }

    #[test]
    fn shifted_path_inserts_tent_over_i() {
        let base = ContourPath::real_line(50.0);
        let p = shifted_path(&base, c(0.0, 1.0), Side::Above, None).unwrap();
        assert!(!p.is_real_line());
        assert!(p.poles_avoided().len() == 1);
        // the path reaches height 1 + 0.1 at Re = 0
        let has_arc = p
            .segments()
            .iter()
            .any(|s| matches!(s, Segment::Arc { center, radius, .. }
                if (center - c(0.0, 1.0)).norm() < 1e-12 && (radius - 0.1).abs() < 1e-12));
        assert!(has_arc);
    }

    #[test]
    fn shifted_path_unchanged_when_already_on_side() {
        let base = ContourPath::real_line(50.0);
        // gamma < 0: the real line already passes above i*gamma
        let p = shifted_path(&base, c(0.0, -1.0), Side::Above, None).unwrap();
        assert!(p.is_real_line());
        // far-away point, requested side already satisfied
        let p = shifted_path(&base, c(0.0, 5.0), Side::Below, None).unwrap();
        assert!(p.is_real_line());
    }

    #[test]
    fn shifted_path_rejects_zero_radius() {
        let base = ContourPath::real_line(10.0);
        assert!(matches!(
            shifted_path(&base, c(0.0, 0.0), Side::Above, None),
            Err(UtmError::InvalidDetourRadius(_))
        ));
    }

    #[test]
    fn decay_certificate_pass_and_fail() {
        let good = SpectralFunction::new(
            |k| c(1.0, 0.0) / (c(1.0, 0.0) + k * k),
            DomainTag::UpperHalf,
        );
        let rep = decay_certificate(&good, (0.0, PI), 8, 1e-3);
        assert!(rep.pass, "magnitudes {:?}", rep.magnitudes);

        let bad = SpectralFunction::new(|k| (-c(0.0, 1.0) * k).exp(), DomainTag::UpperHalf);
        let rep = decay_certificate(&bad, (0.0, PI), 6, 1e-3);
        assert!(!rep.pass);
    }

    #[test]
    fn cauchy_invariance_between_homotopic_paths() {
        // entire, rapidly decaying integrand: e^{-k^2/10}/(k - 5i)
        let f = |k: Complex64| (-k * k / 10.0).exp() / (k - c(0.0, 5.0));
        let base = ContourPath::real_line(40.0);
        let bumped = shifted_path(&base, c(0.0, 1.0), Side::Above, None).unwrap();
        let a = base.integrate(&f, 1e-10, 1.0);
        let b = bumped.integrate(&f, 1e-10, 1.0);
        assert!(
            (a.value - b.value).norm() < 2e-10 + a.error + b.error,
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn removable_singularity_averaging() {
        // sin(k)/k has a removable point at 0
        let path = ContourPath::real_line(10.0).with_removable(vec![c(0.0, 0.0)]);
        let f = |k: Complex64| {
            if k.norm() < 1e-9 {
                c(f64::NAN, 0.0) // direct evaluation would poison the sum
            } else {
                k.sin() / k
            }
        };
        let q = path.integrate(&f, 1e-10, 2.0);
        assert!(q.value.re.is_finite());
        // int_{-10}^{10} sinc = 2 Si(10) ~ 3.3166951884
        assert!((q.value.re - 3.3166951884).abs() < 1e-6);
    }
}
