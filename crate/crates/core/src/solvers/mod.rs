//! Solution-formula evaluation: boundary-value problem types, the shared
//! grid-evaluation engine, the shipped solvers (Klein-Gordon, Fitzhugh-Nagumo,
//! the wave family), the d'Alembert closed forms, and the generic pipeline.

use crate::contour::ContourPath;
use crate::error::{Result, UtmError};
use crate::numeric::expm1c;
use crate::quad::{adaptive_quad, QuadValue};
use crate::symbol::PolynomialMatrix;
use crate::transforms::{HalfLineFunction, TimeHint, TimeSignal};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

pub mod dalembert;
pub mod fn_system;
pub mod generic;
pub mod kg;
pub mod wave;

pub use dalembert::{dalembert_eval, DalembertKind};
pub use fn_system::solve_fn_neumann;
pub use generic::{
    build_global_relations, count_required_bcs, generic_solve, BcReport, ComponentBcInfo,
    GlobalRelationRow, GlobalRelationSystem, RowValidity,
};
pub use kg::solve_kg_dirichlet;
pub use wave::solve_wave_family;

/// Kind of boundary condition at x = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    Robin { a: f64, b: f64 },
}

/// One prescribed boundary condition: the kind, the component it constrains,
/// and the time signal it equals.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub kind: BoundaryKind,
    pub component: usize,
    pub data: TimeSignal,
}

impl BoundarySpec {
    pub fn dirichlet(component: usize, data: TimeSignal) -> Self {
        Self {
            kind: BoundaryKind::Dirichlet,
            component,
            data,
        }
    }

    pub fn neumann(component: usize, data: TimeSignal) -> Self {
        Self {
            kind: BoundaryKind::Neumann,
            component,
            data,
        }
    }

    pub fn robin(a: f64, b: f64, component: usize, data: TimeSignal) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(UtmError::InvalidData(
                "Robin condition requires (a, b) != (0, 0)".into(),
            ));
        }
        Ok(Self {
            kind: BoundaryKind::Robin { a, b },
            component,
            data,
        })
    }
}

/// A half-line boundary-value problem: the system symbol, one initial datum
/// per component, the prescribed boundary conditions, a per-point quadrature
/// tolerance, and the data horizon in t.
#[derive(Debug, Clone)]
pub struct BVProblem {
    pub system: PolynomialMatrix,
    pub initial: Vec<HalfLineFunction>,
    pub boundary: Vec<BoundarySpec>,
    pub tol: f64,
    pub horizon: f64,
}

impl BVProblem {
    pub fn new(
        system: PolynomialMatrix,
        initial: Vec<HalfLineFunction>,
        boundary: Vec<BoundarySpec>,
        tol: f64,
        horizon: f64,
    ) -> Result<Self> {
        if initial.len() != system.size() {
            return Err(UtmError::InvalidData(format!(
                "expected {} initial data components, got {}",
                system.size(),
                initial.len()
            )));
        }
        if !(tol > 0.0) || !(horizon > 0.0) {
            return Err(UtmError::InvalidData(
                "tolerance and horizon must be positive".into(),
            ));
        }
        Ok(Self {
            system,
            initial,
            boundary,
            tol,
            horizon,
        })
    }
}

/// Evaluation lattice in (x, t).
#[derive(Debug, Clone)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Grid {
    pub fn new(xs: Vec<f64>, ts: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || ts.is_empty() {
            return Err(UtmError::InvalidData("empty evaluation grid".into()));
        }
        Ok(Self { xs, ts })
    }

    /// n equally spaced points over the half-open interval (0, hi].
    pub fn open_range(hi: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|i| hi * (i as f64) / (n as f64)).collect()
    }
}

/// Field values on a grid: N components per point, a per-point error estimate,
/// and run diagnostics.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub(crate) xs: Vec<f64>,
    pub(crate) ts: Vec<f64>,
    pub(crate) ncomp: usize,
    pub(crate) values: Vec<Complex64>,
    pub(crate) errors: Vec<f64>,
    pub(crate) k_max_used: f64,
    pub(crate) contour_id: String,
}

impl SolutionField {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn value(&self, ix: usize, it: usize, comp: usize) -> Complex64 {
        self.values[(it * self.xs.len() + ix) * self.ncomp + comp]
    }

    pub fn error(&self, ix: usize, it: usize) -> f64 {
        self.errors[it * self.xs.len() + ix]
    }

    pub fn k_max_used(&self) -> f64 {
        self.k_max_used
    }

    pub fn contour_id(&self) -> &str {
        &self.contour_id
    }

    /// Largest |Im| over all stored values; should be at rounding scale for
    /// real data.
    pub fn max_im(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// One evaluated point: component values, summed quadrature error, and the
/// truncation radius that was reached.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub components: Vec<Complex64>,
    pub error: f64,
    pub k_max: f64,
}

/// Evaluates a pure per-point function over the grid in parallel, assembling
/// results in grid order.
pub(crate) fn evaluate_grid<F>(
    grid: &Grid,
    ncomp: usize,
    contour_id: &str,
    eval: F,
) -> Result<SolutionField>
where
    F: Fn(f64, f64) -> Result<PointResult> + Sync,
{
    let points: Vec<(usize, f64, f64)> = grid
        .ts
        .iter()
        .enumerate()
        .flat_map(|(it, &t)| {
            grid.xs
                .iter()
                .enumerate()
                .map(move |(ix, &x)| (it * grid.xs.len() + ix, x, t))
        })
        .collect();
    let results: Vec<Result<(usize, PointResult)>> = points
        .par_iter()
        .map(|&(p, x, t)| eval(x, t).map(|r| (p, r)))
        .collect();
    let npts = points.len();
    let mut values = vec![Complex64::new(0.0, 0.0); npts * ncomp];
    let mut errors = vec![0.0; npts];
    let mut k_max = 0.0f64;
    for r in results {
        let (p, pr) = r?;
        debug_assert_eq!(pr.components.len(), ncomp);
        values[p * ncomp..(p + 1) * ncomp].copy_from_slice(&pr.components);
        errors[p] = pr.error;
        k_max = k_max.max(pr.k_max);
    }
    Ok(SolutionField {
        xs: grid.xs.clone(),
        ts: grid.ts.clone(),
        ncomp,
        values,
        errors,
        k_max_used: k_max,
        contour_id: contour_id.to_string(),
    })
}

/// How far the integration contour is truncated.
#[derive(Debug, Clone, Copy)]
pub enum TruncationMode {
    /// Double the radius until tail increments fall below the tolerance.
    Adaptive,
    /// Integrate out to the given radius exactly (correlates truncation error
    /// across nearby evaluation points).
    Fixed(f64),
}

/// Contour integral of `f` with tail-growth handling. `osc` is the expected
/// phase rate of the integrand per unit arc length (typically x + t for
/// solution integrands carrying e^{ikx} and e^{+-ikt} factors).
pub(crate) fn line_integral<F>(
    path: &ContourPath,
    f: &F,
    osc: f64,
    tol: f64,
    mode: TruncationMode,
) -> Result<(QuadValue, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut q = path.integrate(f, tol / 2.0, osc);
    let mut radius = path.truncation_radius();
    match mode {
        TruncationMode::Fixed(k_max) => {
            if k_max > radius {
                if let Some(ext) = path.tail_extensions(k_max) {
                    for piece in ext {
                        q.accumulate(&piece.integrate(f, tol / 4.0, osc));
                    }
                }
                radius = k_max;
            }
            Ok((q, radius))
        }
        TruncationMode::Adaptive => {
            let mut history: Vec<f64> = Vec::new();
            let mut stale = 0usize;
            let mut small_in_a_row = 0usize;
            loop {
                let target = radius * 2.0;
                let ext = match path.tail_extensions_between(radius, target) {
                    Some(e) => e,
                    None => break,
                };
                if ext.is_empty() {
                    break;
                }
                let mut inc_val = Complex64::new(0.0, 0.0);
                let mut inc_err = 0.0;
                for piece in ext {
                    let p = piece.integrate(f, tol / 8.0, osc);
                    inc_val += p.value;
                    inc_err += p.error;
                }
                q.value += inc_val;
                q.error += inc_err;
                let inc = inc_val.norm();
                radius = target;
                if inc < tol / 4.0 {
                    small_in_a_row += 1;
                    if small_in_a_row >= 2 {
                        q.error += inc;
                        break;
                    }
                } else {
                    small_in_a_row = 0;
                }
                // Oscillatory tails fluctuate from one doubling to the next,
                // so compare against the increment two doublings back and only
                // a sustained failure to decay counts as a stuck tail.
                let decayed = history
                    .len()
                    .checked_sub(2)
                    .map(|i| inc < 0.7 * history[i].max(1e-300))
                    .unwrap_or(true);
                if decayed {
                    stale = 0;
                } else {
                    stale += 1;
                    if stale >= 6 {
                        return Err(UtmError::NonDecayingTail { radius });
                    }
                }
                history.push(inc);
                if radius > 4e7 {
                    q.error += inc;
                    q.tolerance_met = false;
                    break;
                }
            }
            q.tolerance_met &= q.error <= tol;
            Ok((q, radius))
        }
    }
}

/// e^{-Omega t} * integral of e^{Omega s} g(s) ds over [0, t], evaluated in
/// the damped form integral of e^{-Omega (t - s)} g(s) ds so it stays bounded
/// for Re Omega >= 0 however large |Omega| gets.
pub(crate) fn damped_time_transform(
    g: &TimeSignal,
    omega: Complex64,
    t: f64,
    tol: f64,
) -> QuadValue {
    if t == 0.0 {
        return QuadValue::zero();
    }
    if let Some(TimeHint::ExpDecay { c, gamma }) = g.hint() {
        if c == 0.0 {
            return QuadValue::zero();
        }
        // c (e^{-gamma t} - e^{-Omega t}) / (Omega - gamma), stable at collisions:
        // equals c t e^{-gamma t} expm1c((gamma - Omega) t)
        let z = (Complex64::new(gamma, 0.0) - omega) * t;
        return QuadValue::exact(c * t * (-gamma * t).exp() * expm1c(z));
    }
    let osc = omega.im.abs().max(0.5);
    let seed = ((t * osc / (2.0 * PI)).ceil() as usize).clamp(1, 4096);
    let mut integrand = |s: f64| (-omega * (t - s)).exp() * g.eval(s);
    adaptive_quad(&mut integrand, 0.0, t, tol, seed, 50_000)
}

/// Same damped transform but of the time derivative of the signal.
pub(crate) fn damped_time_transform_deriv(
    g: &TimeSignal,
    omega: Complex64,
    t: f64,
    tol: f64,
) -> Result<QuadValue> {
    if t == 0.0 {
        return Ok(QuadValue::zero());
    }
    if let Some(TimeHint::ExpDecay { c, gamma }) = g.hint() {
        let d = TimeSignal::exp_decay(-gamma * c, gamma, g.horizon());
        return Ok(damped_time_transform(&d, omega, t, tol));
    }
    if g.derivative_at(0.0).is_none() {
        return Err(UtmError::Unsupported(
            "boundary signal derivative required but not provided".into(),
        ));
    }
    let osc = omega.im.abs().max(0.5);
    let seed = ((t * osc / (2.0 * PI)).ceil() as usize).clamp(1, 4096);
    let mut integrand = |s: f64| (-omega * (t - s)).exp() * g.derivative_at(s).unwrap();
    Ok(adaptive_quad(&mut integrand, 0.0, t, tol, seed, 50_000))
}

/// Roots of w^2 + c1 w + c0, larger real part first (ties: larger imaginary
/// part). The unlabeled branch values of a 2x2 symbol at one k.
pub(crate) fn quad_roots(c0: Complex64, c1: Complex64) -> (Complex64, Complex64) {
    let disc = (c1 * c1 - 4.0 * c0).sqrt();
    let r1 = (-c1 + disc) / 2.0;
    let r2 = (-c1 - disc) / 2.0;
    if r1.re > r2.re + 1e-14 * (1.0 + r1.norm() + r2.norm())
        || ((r1.re - r2.re).abs() <= 1e-14 * (1.0 + r1.norm() + r2.norm()) && r1.im >= r2.im)
    {
        (r1, r2)
    } else {
        (r2, r1)
    }
}
