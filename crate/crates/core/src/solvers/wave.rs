//! Wave family u_tt + a u_xt = u_xx as a first-order system in (u, v = u_t),
//! solved on the half line with Dirichlet data (any a) or Neumann / Robin data
//! (a = 0), plus the closed-form d'Alembert reference in `dalembert`.

use super::{
    damped_time_transform, evaluate_grid, kg::signal_is_zero, line_integral, BoundaryKind,
    BoundarySpec, Grid, PointResult, SolutionField, TruncationMode,
};
use crate::contour::{shifted_path, ContourPath, Side};
use crate::error::{Result, UtmError};
use crate::numeric::{c, I};
use crate::transforms::{half_line_ft, HalfLineFunction, TimeHint, TimeSignal};
use num_complex::Complex64;
use std::f64::consts::PI;

/// The two wave speeds: roots of alpha^2 + a alpha - 1 = 0, alpha1 > 0 > alpha2,
/// with alpha1 alpha2 = -1 and alpha1 + alpha2 = -a.
pub(crate) fn wave_alphas(a: f64) -> (f64, f64) {
    let s = (4.0 + a * a).sqrt();
    ((-a + s) / 2.0, (-a - s) / 2.0)
}

struct WaveCtx<'a> {
    a: f64,
    u0: &'a HalfLineFunction,
    v0: &'a HalfLineFunction,
    data: &'a TimeSignal,
    data_zero: bool,
    gamma: f64,
    tol_inner: f64,
}

impl WaveCtx<'_> {
    fn ft(&self, f: &HalfLineFunction, k: Complex64) -> Complex64 {
        half_line_ft(f, k, self.tol_inner)
            .map(|q| q.value)
            .unwrap_or_default()
    }

    /// Full integrand (Dirichlet, any a): initial-data part plus the
    /// eliminated boundary part, all on the real line.
    fn dirichlet_comp(&self, comp: usize, k: Complex64, x: f64, t: f64, swap: bool) -> Complex64 {
        let (mut a1, mut a2) = wave_alphas(self.a);
        if swap {
            std::mem::swap(&mut a1, &mut a2);
        }
        let w1 = I * k * a1;
        let w2 = I * k * a2;
        let e1 = (-w1 * t).exp();
        let e2 = (-w2 * t).exp();
        let iak = I * self.a * k;
        let u0k = self.ft(self.u0, k);
        let v0k = self.ft(self.v0, k);
        let b1 = (w1 + iak) * u0k - v0k;
        let b2 = (w2 + iak) * u0k - v0k;
        let (r1, r2) = (a1 / a2, a2 / a1);
        let cc = |r: f64, w: Complex64| {
            let kk = r * k;
            self.ft(self.v0, kk) - (w + I * self.a * kk) * self.ft(self.u0, kk)
        };
        let c1 = cc(r1, w1);
        let c2 = cc(r2, w2);
        let (d1, d2) = if self.data_zero {
            (Complex64::default(), Complex64::default())
        } else {
            (
                damped_time_transform(self.data, w1, t, self.tol_inner).value,
                damped_time_transform(self.data, w2, t, self.tol_inner).value,
            )
        };
        let dw = w2 - w1;
        let phase = (I * k * x).exp();
        match comp {
            0 => {
                phase
                    * ((e2 * b2 - e1 * b1)
                        + (e2 * c2 - e1 * c1)
                        + I * k * ((1.0 - r2) * d2 - (1.0 - r1) * d1))
                    / dw
                    / (2.0 * PI)
            }
            _ => {
                // time derivative; the k-independent -a ub(t) piece (a point
                // mass at x = 0) is dropped, valid for x > 0
                phase
                    * ((w1 * e1 * b1 - w2 * e2 * b2)
                        + (w1 * e1 * c1 - w2 * e2 * c2)
                        + I * k * ((1.0 - r1) * w1 * d1 - (1.0 - r2) * w2 * d2))
                    / dw
                    / (2.0 * PI)
            }
        }
    }

    /// Full integrand (Neumann, a = 0), on the real line.
    fn neumann_comp(&self, comp: usize, k: Complex64, x: f64, t: f64, swap: bool) -> Complex64 {
        let (mut w1, mut w2) = (I * k, -I * k);
        if swap {
            std::mem::swap(&mut w1, &mut w2);
        }
        let e1 = (-w1 * t).exp();
        let e2 = (-w2 * t).exp();
        let dw = w1 - w2;
        let u0k = self.ft(self.u0, k);
        let v0k = self.ft(self.v0, k);
        let u0m = self.ft(self.u0, -k);
        let v0m = self.ft(self.v0, -k);
        let b1 = w1 * u0k - v0k;
        let b2 = w2 * u0k - v0k;
        let (d1, d2) = if self.data_zero {
            (Complex64::default(), Complex64::default())
        } else {
            (
                damped_time_transform(self.data, w1, t, self.tol_inner).value,
                damped_time_transform(self.data, w2, t, self.tol_inner).value,
            )
        };
        let phase = (I * k * x).exp();
        match comp {
            0 => {
                phase
                    * ((e1 * b1 - e2 * b2) / dw / (2.0 * PI)
                        + (d1 - d2) / dw / PI
                        + u0m * (e1 + e2) / (4.0 * PI)
                        - v0m * (e1 - e2) / dw / (2.0 * PI))
            }
            _ => {
                phase
                    * ((w2 * e2 * b2 - w1 * e1 * b1) / dw / (2.0 * PI)
                        + (w2 * d2 - w1 * d1) / dw / PI
                        - u0m * (w1 * e1 + w2 * e2) / (4.0 * PI)
                        + v0m * (w1 * e1 - w2 * e2) / dw / (2.0 * PI))
            }
        }
    }

    /// Initial-data integrand (a = 0), the real-line part of the Robin
    /// representation.
    fn i1_comp(&self, comp: usize, k: Complex64, x: f64, t: f64) -> Complex64 {
        let w1 = I * k;
        let w2 = -I * k;
        let e1 = (-w1 * t).exp();
        let e2 = (-w2 * t).exp();
        let dw = w1 - w2;
        let u0k = self.ft(self.u0, k);
        let v0k = self.ft(self.v0, k);
        let b1 = w1 * u0k - v0k;
        let b2 = w2 * u0k - v0k;
        let phase = (I * k * x).exp();
        match comp {
            0 => phase * (e1 * b1 - e2 * b2) / dw / (2.0 * PI),
            _ => phase * (w2 * e2 * b2 - w1 * e1 * b1) / dw / (2.0 * PI),
        }
    }

    /// Boundary-and-reflection integrand (Robin, a = 0), on the contour C that
    /// passes above the pole at k = i gamma when gamma > 0. Built directly
    /// from k (the branch values ik and -ik are explicit), so it carries no
    /// branch-label dependence.
    fn robin_j_comp(&self, comp: usize, k: Complex64, x: f64, t: f64) -> Complex64 {
        let w1 = I * k;
        let w2 = -I * k;
        let e1 = (-w1 * t).exp();
        let e2 = (-w2 * t).exp();
        let dw = w1 - w2;
        let den = self.gamma + I * k;
        let ratio = (self.gamma - I * k) / den;
        let u0m = self.ft(self.u0, -k);
        let v0m = self.ft(self.v0, -k);
        let (df1, df2) = if self.data_zero {
            (Complex64::default(), Complex64::default())
        } else {
            (
                damped_time_transform(self.data, w1, t, self.tol_inner).value,
                damped_time_transform(self.data, w2, t, self.tol_inner).value,
            )
        };
        let phase = (I * k * x).exp();
        match comp {
            0 => {
                phase
                    * ((df1 - df2) / den / (2.0 * PI) - ratio * u0m * (e1 + e2) / (4.0 * PI)
                        + ratio * v0m * (e1 - e2) / dw / (2.0 * PI))
            }
            _ => {
                phase
                    * ((w2 * df2 - w1 * df1) / den / (2.0 * PI)
                        + ratio * u0m * (w1 * e1 + w2 * e2) / (4.0 * PI)
                        - ratio * v0m * (w1 * e1 - w2 * e2) / dw / (2.0 * PI))
            }
        }
    }
}

/// Dirichlet final integrand vector (u, v) at k, any a.
pub fn wave_dirichlet_integrand(
    a: f64,
    u0: &HalfLineFunction,
    v0: &HalfLineFunction,
    ub: &TimeSignal,
    x: f64,
    t: f64,
    k: Complex64,
    swap_branches: bool,
) -> [Complex64; 2] {
    let ctx = WaveCtx {
        a,
        u0,
        v0,
        data: ub,
        data_zero: signal_is_zero(ub),
        gamma: 0.0,
        tol_inner: 1e-12,
    };
    [
        ctx.dirichlet_comp(0, k, x, t, swap_branches),
        ctx.dirichlet_comp(1, k, x, t, swap_branches),
    ]
}

/// Neumann final integrand vector (u, v) at k, a = 0.
pub fn wave_neumann_integrand(
    u0: &HalfLineFunction,
    v0: &HalfLineFunction,
    uxb: &TimeSignal,
    x: f64,
    t: f64,
    k: Complex64,
    swap_branches: bool,
) -> [Complex64; 2] {
    let ctx = WaveCtx {
        a: 0.0,
        u0,
        v0,
        data: uxb,
        data_zero: signal_is_zero(uxb),
        gamma: 0.0,
        tol_inner: 1e-12,
    };
    [
        ctx.neumann_comp(0, k, x, t, swap_branches),
        ctx.neumann_comp(1, k, x, t, swap_branches),
    ]
}

/// Robin contour integrand vector (u, v) at k, a = 0, gamma = a_bc / b_bc.
/// `f` is the normalized boundary signal gamma u(0,t) + u_x(0,t).
pub fn wave_robin_contour_integrand(
    gamma: f64,
    u0: &HalfLineFunction,
    v0: &HalfLineFunction,
    f: &TimeSignal,
    x: f64,
    t: f64,
    k: Complex64,
) -> [Complex64; 2] {
    let ctx = WaveCtx {
        a: 0.0,
        u0,
        v0,
        data: f,
        data_zero: signal_is_zero(f),
        gamma,
        tol_inner: 1e-12,
    };
    [
        ctx.robin_j_comp(0, k, x, t),
        ctx.robin_j_comp(1, k, x, t),
    ]
}

fn scaled_signal(g: &TimeSignal, factor: f64) -> TimeSignal {
    if let Some(TimeHint::ExpDecay { c, gamma }) = g.hint() {
        return TimeSignal::exp_decay(factor * c, gamma, g.horizon());
    }
    let g = g.clone();
    let horizon = g.horizon();
    TimeSignal::from_fn(move |s| factor * g.eval(s), horizon)
}

fn origin_removable() -> Vec<Complex64> {
    vec![Complex64::default()]
}

/// Solves the half-line wave-family problem, returning (u, u_t) on the grid.
/// Dirichlet data is supported for any a; Neumann and Robin for a = 0.
pub fn solve_wave_family(
    a: f64,
    u0: &HalfLineFunction,
    v0: &HalfLineFunction,
    bc: &BoundarySpec,
    grid: &Grid,
    tol: f64,
) -> Result<SolutionField> {
    if bc.component != 0 {
        return Err(UtmError::InvalidData(
            "wave-family boundary condition must constrain component u".into(),
        ));
    }
    match bc.kind {
        BoundaryKind::Dirichlet => {
            let rpath = ContourPath::real_line(40.0).with_removable(origin_removable());
            evaluate_grid(grid, 2, "real-line", |x, t| {
                let ctx = WaveCtx {
                    a,
                    u0,
                    v0,
                    data: &bc.data,
                    data_zero: signal_is_zero(&bc.data),
                    gamma: 0.0,
                    tol_inner: tol * 0.05,
                };
                wave_point(&rpath, x, t, tol, |comp, k| {
                    ctx.dirichlet_comp(comp, k, x, t, false)
                })
            })
        }
        BoundaryKind::Neumann => {
            if a != 0.0 {
                return Err(UtmError::Unsupported(
                    "Neumann wave-family data requires a = 0".into(),
                ));
            }
            let rpath = ContourPath::real_line(40.0).with_removable(origin_removable());
            evaluate_grid(grid, 2, "real-line", |x, t| {
                let ctx = WaveCtx {
                    a: 0.0,
                    u0,
                    v0,
                    data: &bc.data,
                    data_zero: signal_is_zero(&bc.data),
                    gamma: 0.0,
                    tol_inner: tol * 0.05,
                };
                wave_point(&rpath, x, t, tol, |comp, k| {
                    ctx.neumann_comp(comp, k, x, t, false)
                })
            })
        }
        BoundaryKind::Robin { a: ra, b: rb } => {
            if a != 0.0 {
                return Err(UtmError::Unsupported(
                    "Robin wave-family data requires a = 0".into(),
                ));
            }
            if rb == 0.0 {
                // pure Dirichlet in disguise: u(0, t) = data / ra
                let bc2 = BoundarySpec::dirichlet(0, scaled_signal(&bc.data, 1.0 / ra));
                return solve_wave_family(a, u0, v0, &bc2, grid, tol);
            }
            let gamma = ra / rb;
            if gamma == 0.0 {
                let bc2 = BoundarySpec::neumann(0, scaled_signal(&bc.data, 1.0 / rb));
                return solve_wave_family(a, u0, v0, &bc2, grid, tol);
            }
            let f = scaled_signal(&bc.data, 1.0 / rb);
            let rpath = ContourPath::real_line(40.0).with_removable(origin_removable());
            let jpath = if gamma > 0.0 {
                shifted_path(&rpath, c(0.0, gamma), Side::Above, None)?
            } else {
                rpath.clone()
            }
            .with_removable(origin_removable());
            evaluate_grid(grid, 2, "real-line + detour", |x, t| {
                let ctx = WaveCtx {
                    a: 0.0,
                    u0,
                    v0,
                    data: &f,
                    data_zero: signal_is_zero(&f),
                    gamma,
                    tol_inner: tol * 0.05,
                };
                let mut components = Vec::with_capacity(2);
                let mut error = 0.0;
                let mut k_max = 0.0f64;
                let osc = x.abs() + t + 0.5;
                for comp in 0..2 {
                    let fi = |k: Complex64| ctx.i1_comp(comp, k, x, t);
                    let (qi, ri) = line_integral(&rpath, &fi, osc, tol, TruncationMode::Adaptive)?;
                    let fj = |k: Complex64| ctx.robin_j_comp(comp, k, x, t);
                    let (qj, rj) = line_integral(&jpath, &fj, osc, tol, TruncationMode::Adaptive)?;
                    components.push(qi.value + qj.value);
                    error += qi.error + qj.error;
                    k_max = k_max.max(ri).max(rj);
                }
                Ok(PointResult {
                    components,
                    error,
                    k_max,
                })
            })
        }
    }
}

fn wave_point<F>(
    path: &ContourPath,
    x: f64,
    t: f64,
    tol: f64,
    integrand: F,
) -> Result<PointResult>
where
    F: Fn(usize, Complex64) -> Complex64,
{
    let osc = x.abs() + t + 0.5;
    let mut components = Vec::with_capacity(2);
    let mut error = 0.0;
    let mut k_max = 0.0f64;
    for comp in 0..2 {
        let f = |k: Complex64| integrand(comp, k);
        let (q, radius) = line_integral(path, &f, osc, tol, TruncationMode::Adaptive)?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::PolyExpTerm;

    fn data() -> (HalfLineFunction, HalfLineFunction) {
        (
            HalfLineFunction::poly_exp(vec![PolyExpTerm {
                c: 1.0,
                p: 2,
                gamma: 1.0,
            }]),
            HalfLineFunction::poly_exp(vec![PolyExpTerm {
                c: 1.0,
                p: 1,
                gamma: 1.0,
            }]),
        )
    }

    #[test]
    fn initial_data_recovered_at_t_zero() {
        let (u0, v0) = data();
        let bc = BoundarySpec::dirichlet(0, TimeSignal::zero(2.0));
        let grid = Grid::new(vec![0.6, 1.4], vec![0.0]).unwrap();
        let f = solve_wave_family(1.0, &u0, &v0, &bc, &grid, 1e-8).unwrap();
        for (ix, &x) in [0.6_f64, 1.4].iter().enumerate() {
            assert!(
                (f.value(ix, 0, 0) - u0.eval(x)).norm() < 1e-6,
                "u at {x}: {} vs {}",
                f.value(ix, 0, 0),
                u0.eval(x)
            );
            assert!(
                (f.value(ix, 0, 1) - v0.eval(x)).norm() < 1e-6,
                "v at {x}: {} vs {}",
                f.value(ix, 0, 1),
                v0.eval(x)
            );
        }
    }

    #[test]
    fn dirichlet_matches_dalembert_at_a_point() {
        let (u0, v0) = data();
        let ub = TimeSignal::zero(3.0);
        let bc = BoundarySpec::dirichlet(0, ub.clone());
        let grid = Grid::new(vec![0.5], vec![1.2]).unwrap();
        let f = solve_wave_family(0.0, &u0, &v0, &bc, &grid, 1e-7).unwrap();
        let want = super::super::dalembert::dalembert_eval(
            super::super::dalembert::DalembertKind::Dirichlet,
            &u0,
            &v0,
            &ub,
            0.5,
            1.2,
        );
        assert!(
            (f.value(0, 0, 0).re - want).abs() < 1e-5,
            "{} vs {want}",
            f.value(0, 0, 0).re
        );
    }

    #[test]
    fn neumann_requires_a_zero() {
        let (u0, v0) = data();
        let bc = BoundarySpec::neumann(0, TimeSignal::zero(2.0));
        let grid = Grid::new(vec![0.5], vec![0.5]).unwrap();
        let e = solve_wave_family(1.0, &u0, &v0, &bc, &grid, 1e-6);
        assert!(matches!(e, Err(UtmError::Unsupported(_))));
    }
}
