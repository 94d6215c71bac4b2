//! Linear Fitzhugh-Nagumo system on the half line with Neumann data
//! v_x(0, t) = vxb(t). The solution has two parts: a real-line integral of
//! the initial-data transforms and an integral of the boundary-data transforms
//! along the boundary of the inaccessible region D+.

use super::{
    damped_time_transform, evaluate_grid, kg::signal_is_zero, line_integral, quad_roots, Grid,
    PointResult, SolutionField, TruncationMode,
};
use crate::contour::{boundary_path, ContourPath, Region};
use crate::dispersion::BranchSet;
use crate::error::Result;
use crate::numeric::{c, exp_dd, wexp_dd, xexp_dd, I};
use crate::symbol::PolynomialMatrix;
use crate::transforms::{half_line_ft, HalfLineFunction, TimeSignal};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Unlabeled branch values: roots of w^2 - (1 + k^2) w + beta.
pub(crate) fn fn_omegas(beta: f64, k: Complex64) -> (Complex64, Complex64) {
    quad_roots(c(beta, 0.0), -(c(1.0, 0.0) + k * k))
}

fn removable_points(beta: f64) -> Vec<Complex64> {
    // real branch collisions where (1 + k^2)^2 = 4 beta
    let s = 2.0 * beta.sqrt() - 1.0;
    if s > 0.0 {
        let r = s.sqrt();
        vec![c(-r, 0.0), c(r, 0.0)]
    } else if s == 0.0 {
        vec![Complex64::default()]
    } else {
        vec![]
    }
}

struct FnCtx<'a> {
    beta: f64,
    v0: &'a HalfLineFunction,
    w0: &'a HalfLineFunction,
    vxb: &'a TimeSignal,
    vxb_zero: bool,
    tol_inner: f64,
}

impl FnCtx<'_> {
    fn real_component(&self, comp: usize, k: Complex64, x: f64, t: f64, swap: bool) -> Complex64 {
        let (mut w1, mut w2) = fn_omegas(self.beta, k);
        if swap {
            std::mem::swap(&mut w1, &mut w2);
        }
        let ft = |f: &HalfLineFunction, kk: Complex64| {
            half_line_ft(f, kk, self.tol_inner)
                .map(|q| q.value)
                .unwrap_or_default()
        };
        let sv = ft(self.v0, k) + ft(self.v0, -k);
        let sw = ft(self.w0, k) + ft(self.w0, -k);
        let phase = (I * k * x).exp();
        let half = 1.0 / (2.0 * PI);
        match comp {
            0 => phase * half * (sv * wexp_dd(w1, w2, t) + sw * exp_dd(w1, w2, t)),
            _ => phase * half * (-self.beta * sv * exp_dd(w1, w2, t) - sw * xexp_dd(w1, w2, t)),
        }
    }

    fn boundary_component(
        &self,
        comp: usize,
        k: Complex64,
        x: f64,
        t: f64,
        swap: bool,
    ) -> Complex64 {
        if self.vxb_zero {
            return Complex64::default();
        }
        let (mut w1, mut w2) = fn_omegas(self.beta, k);
        if swap {
            std::mem::swap(&mut w1, &mut w2);
        }
        let d1 = damped_time_transform(self.vxb, w1, t, self.tol_inner).value;
        let d2 = damped_time_transform(self.vxb, w2, t, self.tol_inner).value;
        let phase = (I * k * x).exp();
        match comp {
            0 => -phase * (w1 * d1 - w2 * d2) / (w1 - w2) / PI,
            _ => -phase * self.beta * (d1 - d2) / (w1 - w2) / PI,
        }
    }
}

/// Real-line part of the final integrand vector (v, w) at k.
pub fn fn_real_line_integrand(
    beta: f64,
    v0: &HalfLineFunction,
    w0: &HalfLineFunction,
    x: f64,
    t: f64,
    k: Complex64,
    swap_branches: bool,
) -> [Complex64; 2] {
    let vxb = TimeSignal::zero(t.max(1.0));
    let ctx = FnCtx {
        beta,
        v0,
        w0,
        vxb: &vxb,
        vxb_zero: true,
        tol_inner: 1e-12,
    };
    [
        ctx.real_component(0, k, x, t, swap_branches),
        ctx.real_component(1, k, x, t, swap_branches),
    ]
}

/// Boundary-contour part of the final integrand vector (v, w) at k.
pub fn fn_boundary_integrand(
    beta: f64,
    vxb: &TimeSignal,
    x: f64,
    t: f64,
    k: Complex64,
    swap_branches: bool,
) -> [Complex64; 2] {
    let v0 = HalfLineFunction::zero();
    let w0 = HalfLineFunction::zero();
    let ctx = FnCtx {
        beta,
        v0: &v0,
        w0: &w0,
        vxb,
        vxb_zero: signal_is_zero(vxb),
        tol_inner: 1e-12,
    };
    [
        ctx.boundary_component(0, k, x, t, swap_branches),
        ctx.boundary_component(1, k, x, t, swap_branches),
    ]
}

/// Solves the half-line Fitzhugh-Nagumo problem with Neumann boundary data,
/// returning both components (v, w) on the grid.
pub fn solve_fn_neumann(
    beta: f64,
    v0: &HalfLineFunction,
    w0: &HalfLineFunction,
    vxb: &TimeSignal,
    grid: &Grid,
    tol: f64,
) -> Result<SolutionField> {
    let vxb_zero = signal_is_zero(vxb);
    let bpath = if vxb_zero {
        None
    } else {
        let system = PolynomialMatrix::fitzhugh_nagumo(beta);
        let region = Region::new(BranchSet::build(&system)?);
        Some(boundary_path(&region, 12.0)?)
    };
    let rpath = ContourPath::real_line(40.0).with_removable(removable_points(beta));
    evaluate_grid(grid, 2, "real-line + d-plus boundary", |x, t| {
        let ctx = FnCtx {
            beta,
            v0,
            w0,
            vxb,
            vxb_zero,
            tol_inner: tol * 0.05,
        };
        let osc = x.abs() + t + 0.5;
        let mut components = Vec::with_capacity(2);
        let mut error = 0.0;
        let mut k_max = 0.0f64;
        for comp in 0..2 {
            let f = |k: Complex64| ctx.real_component(comp, k, x, t, false);
            let (q, radius) = line_integral(&rpath, &f, osc, tol, TruncationMode::Adaptive)?;
            let mut v = q.value;
            error += q.error;
            k_max = k_max.max(radius);
            if let Some(bp) = &bpath {
                let g = |k: Complex64| ctx.boundary_component(comp, k, x, t, false);
                let (qb, rb) = line_integral(bp, &g, osc, tol, TruncationMode::Adaptive)?;
                v += qb.value;
                error += qb.error;
                k_max = k_max.max(rb);
            }
            components.push(v);
        }
        Ok(PointResult {
            components,
            error,
            k_max,
        })
    })
}
