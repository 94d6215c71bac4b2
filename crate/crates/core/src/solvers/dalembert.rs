//! Closed-form d'Alembert evaluation for the half-line wave equation
//! u_tt = u_xx (the a = 0 member of the wave family), used as an independent
//! reference for the contour solver.

use crate::quad::adaptive_quad;
use crate::transforms::{HalfLineFunction, TimeSignal};

/// Which boundary condition the closed form reflects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DalembertKind {
    /// u(0, t) = data(t)
    Dirichlet,
    /// u_x(0, t) = data(t)
    Neumann,
    /// gamma * u(0, t) + u_x(0, t) = data(t)
    Robin { gamma: f64 },
}

fn integral<F>(f: F, a: f64, b: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let mut g = |x: f64| num_complex::Complex64::new(f(x), 0.0);
    adaptive_quad(&mut g, a, b, 1e-12, 8, 20_000).value.re
}

/// u(x, t) for u_tt = u_xx on x > 0 with u(x,0) = u0, u_t(x,0) = v0 and the
/// given boundary condition, by characteristics and reflection.
pub fn dalembert_eval(
    kind: DalembertKind,
    u0: &HalfLineFunction,
    v0: &HalfLineFunction,
    data: &TimeSignal,
    x: f64,
    t: f64,
) -> f64 {
    let u0r = |y: f64| u0.eval(y).re;
    let v0r = |y: f64| v0.eval(y).re;
    if x >= t {
        return 0.5 * (u0r(x + t) + u0r(x - t)) + 0.5 * integral(v0r, x - t, x + t);
    }
    let s = t - x; // reflected characteristic coordinate
    match kind {
        DalembertKind::Dirichlet => {
            0.5 * (u0r(x + t) - u0r(s)) + 0.5 * integral(v0r, s, x + t) + data.eval(s).re
        }
        DalembertKind::Neumann => {
            0.5 * (u0r(x + t) + u0r(s))
                + 0.5 * (integral(v0r, 0.0, s) + integral(v0r, 0.0, x + t))
                - integral(|y| data.eval(y).re, 0.0, s)
        }
        DalembertKind::Robin { gamma } => {
            0.5 * (u0r(x + t) + u0r(s))
                + gamma * integral(|y| u0r(y) * (gamma * (s - y)).exp(), 0.0, s)
                + 0.5 * integral(v0r, s, x + t)
                + integral(|y| v0r(y) * (gamma * (s - y)).exp(), 0.0, s)
                - integral(|y| data.eval(y).re * (gamma * (s - y)).exp(), 0.0, s)
        }
    }
}
