//! Klein-Gordon system (q_t = p, p_t = q_xx - alpha q) on the half line with
//! Dirichlet data for q.

use super::{
    damped_time_transform, evaluate_grid, line_integral, quad_roots, Grid, PointResult,
    SolutionField, TruncationMode,
};
use crate::contour::ContourPath;
use crate::error::Result;
use crate::numeric::{c, exp_dd, wexp_dd, xexp_dd, I};
use crate::transforms::{half_line_ft, HalfLineFunction, TimeHint, TimeSignal};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Unlabeled branch values +-i sqrt(alpha + k^2) at one k.
pub(crate) fn kg_omegas(alpha: f64, k: Complex64) -> (Complex64, Complex64) {
    quad_roots(c(alpha, 0.0) + k * k, Complex64::default())
}

pub(crate) fn signal_is_zero(g: &TimeSignal) -> bool {
    matches!(g.hint(), Some(TimeHint::ExpDecay { c, .. }) if c == 0.0)
}

struct KgCtx<'a> {
    alpha: f64,
    q0: &'a HalfLineFunction,
    p0: &'a HalfLineFunction,
    qb: &'a TimeSignal,
    qb_zero: bool,
    tol_inner: f64,
}

impl KgCtx<'_> {
    fn component(&self, comp: usize, k: Complex64, x: f64, t: f64, swap: bool) -> Complex64 {
        let (mut w1, mut w2) = kg_omegas(self.alpha, k);
        if swap {
            std::mem::swap(&mut w1, &mut w2);
        }
        let ft = |f: &HalfLineFunction, kk: Complex64| {
            half_line_ft(f, kk, self.tol_inner)
                .map(|q| q.value)
                .unwrap_or_default()
        };
        let dq = ft(self.q0, k) - ft(self.q0, -k);
        let dp = ft(self.p0, k) - ft(self.p0, -k);
        let phase = (I * k * x).exp();
        let half = 1.0 / (2.0 * PI);
        let mut v = match comp {
            0 => phase * half * (dq * wexp_dd(w1, w2, t) - dp * exp_dd(w1, w2, t)),
            _ => {
                let w1w2 = c(self.alpha, 0.0) + k * k;
                phase * half * (dq * w1w2 * exp_dd(w1, w2, t) - dp * xexp_dd(w1, w2, t))
            }
        };
        if !self.qb_zero {
            let d1 = damped_time_transform(self.qb, w1, t, self.tol_inner).value;
            let d2 = damped_time_transform(self.qb, w2, t, self.tol_inner).value;
            let g = match comp {
                0 => (d1 - d2) / (w1 - w2),
                _ => (w2 * d1 - w1 * d2) / (w1 - w2),
            };
            v += phase * I * k * g / PI;
        }
        v
    }
}

fn removable_points(alpha: f64) -> Vec<Complex64> {
    if alpha < 0.0 {
        let r = (-alpha).sqrt();
        vec![c(-r, 0.0), c(r, 0.0)]
    } else if alpha == 0.0 {
        vec![Complex64::default()]
    } else {
        vec![]
    }
}

/// The integrand vector (q-component, p-component) of the final solution
/// representation at spectral point k, with optionally swapped branch order.
pub fn kg_final_integrand(
    alpha: f64,
    q0: &HalfLineFunction,
    p0: &HalfLineFunction,
    qb: &TimeSignal,
    x: f64,
    t: f64,
    k: Complex64,
    swap_branches: bool,
) -> [Complex64; 2] {
    let ctx = KgCtx {
        alpha,
        q0,
        p0,
        qb,
        qb_zero: signal_is_zero(qb),
        tol_inner: 1e-12,
    };
    [
        ctx.component(0, k, x, t, swap_branches),
        ctx.component(1, k, x, t, swap_branches),
    ]
}

/// Evaluates (q, p) at a single point.
pub fn kg_point(
    alpha: f64,
    q0: &HalfLineFunction,
    p0: &HalfLineFunction,
    qb: &TimeSignal,
    x: f64,
    t: f64,
    tol: f64,
    mode: TruncationMode,
) -> Result<PointResult> {
    let ctx = KgCtx {
        alpha,
        q0,
        p0,
        qb,
        qb_zero: signal_is_zero(qb),
        tol_inner: tol * 0.05,
    };
    let path = ContourPath::real_line(40.0).with_removable(removable_points(alpha));
    let osc = x.abs() + t + 0.5;
    let mut components = Vec::with_capacity(2);
    let mut error = 0.0;
    let mut k_max = 0.0f64;
    for comp in 0..2 {
        let f = |k: Complex64| ctx.component(comp, k, x, t, false);
        let (q, radius) = line_integral(&path, &f, osc, tol, mode)?;
        components.push(q.value);
        error += q.error;
        k_max = k_max.max(radius);
    }
    Ok(PointResult {
        components,
        error,
        k_max,
    })
}

/// Solves the Klein-Gordon half-line problem with Dirichlet boundary data
/// q(0, t) = qb(t), returning both components (q, p) on the grid.
pub fn solve_kg_dirichlet(
    alpha: f64,
    q0: &HalfLineFunction,
    p0: &HalfLineFunction,
    qb: &TimeSignal,
    grid: &Grid,
    tol: f64,
) -> Result<SolutionField> {
    evaluate_grid(grid, 2, "real-line", |x, t| {
        kg_point(alpha, q0, p0, qb, x, t, tol, TruncationMode::Adaptive)
    })
}
