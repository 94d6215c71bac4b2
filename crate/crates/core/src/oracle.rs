//! Independent reference solutions: a Crank-Nicolson method-of-lines solver
//! on a truncated domain, a method-of-images evaluator for homogeneous
//! boundary data, and a discrete PDE residual for solution fields.

use crate::error::{Result, UtmError};
use crate::numeric::{exp_dd, xexp_dd, I};
use crate::solvers::{
    evaluate_grid, line_integral, quad_roots, BVProblem, BoundaryKind, Grid, PointResult,
    SolutionField, TruncationMode,
};
use crate::symbol::{char_poly, PolynomialMatrix};
use crate::transforms::half_line_ft;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Finite-difference discretization parameters.
#[derive(Debug, Clone, Copy)]
pub struct FDConfig {
    /// spatial step
    pub h: f64,
    /// domain cutoff: the half line is truncated to [0, l] with homogeneous
    /// Dirichlet far boundary
    pub l: f64,
    /// time step of the implicit trapezoidal (Crank-Nicolson) scheme
    pub tau: f64,
}

impl FDConfig {
    pub fn new(h: f64, tau: f64) -> Self {
        Self { h, l: 40.0, tau }
    }
}

impl Default for FDConfig {
    fn default() -> Self {
        Self::new(0.02, 0.01)
    }
}

/// Stencil blocks of the spatial operator Lambda(-i d/dx) at interior nodes:
/// (coupling to i-1, to i, to i+1). Entries come from substituting
/// k -> -i d/dx into each polynomial entry and using centered differences.
fn interior_blocks(
    m: &PolynomialMatrix,
    h: f64,
) -> (
    DMatrix<Complex64>,
    DMatrix<Complex64>,
    DMatrix<Complex64>,
) {
    let n = m.size();
    let mut bm = DMatrix::zeros(n, n);
    let mut b0 = DMatrix::zeros(n, n);
    let mut bp = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let co = m.entry(r, c).coefficients();
            let c0 = co.first().copied().unwrap_or_default();
            let c1 = co.get(1).copied().unwrap_or_default();
            let c2 = co.get(2).copied().unwrap_or_default();
            // k -> -i d/dx: c1 k -> -i c1 d/dx, c2 k^2 -> -c2 d^2/dx^2
            b0[(r, c)] = c0 + 2.0 * c2 / (h * h);
            bp[(r, c)] = -I * c1 / (2.0 * h) - c2 / (h * h);
            bm[(r, c)] = I * c1 / (2.0 * h) - c2 / (h * h);
        }
    }
    (bm, b0, bp)
}

/// How the value of each component at the ghost node x = -h is eliminated.
#[derive(Clone, Copy)]
enum GhostRule {
    /// u_x(0) = g(t)
    Neumann,
    /// a u(0) + b u_x(0) = g(t)
    Robin { a: f64, b: f64 },
}

struct BoundaryClosure {
    /// components with a (possibly scaled) replaced row: component, boundary
    /// index, coefficient on the trace
    dirichlet: Vec<(usize, usize, f64)>,
    /// per component: ghost elimination rule and boundary index
    ghost: Vec<Option<(GhostRule, usize)>>,
    /// evolution rows applied at node 0 (possibly via ghosts)
    evolution_rows: Vec<usize>,
}

fn boundary_closure(p: &BVProblem) -> Result<BoundaryClosure> {
    let m = &p.system;
    let n = m.size();
    let mut dirichlet = Vec::new();
    let mut ghost: Vec<Option<(GhostRule, usize)>> = vec![None; n];
    for (bi, bc) in p.boundary.iter().enumerate() {
        match bc.kind {
            BoundaryKind::Dirichlet => dirichlet.push((bc.component, bi, 1.0)),
            BoundaryKind::Neumann => ghost[bc.component] = Some((GhostRule::Neumann, bi)),
            BoundaryKind::Robin { a, b } => {
                if b == 0.0 {
                    dirichlet.push((bc.component, bi, a));
                } else {
                    ghost[bc.component] = Some((GhostRule::Robin { a, b }, bi));
                }
            }
        }
    }
    // evolution rows usable at node 0: every component the row differentiates
    // must have a ghost rule
    let mut evolution_rows = Vec::new();
    for r in 0..n {
        let usable = (0..n).all(|c| m.entry(r, c).degree() == 0 || ghost[c].is_some());
        if usable {
            evolution_rows.push(r);
        }
    }
    let mut closure = BoundaryClosure {
        dirichlet,
        ghost,
        evolution_rows,
    };
    while closure.dirichlet.len() + closure.evolution_rows.len() > n {
        closure.evolution_rows.pop();
    }
    if closure.dirichlet.len() + closure.evolution_rows.len() != n {
        return Err(UtmError::Unsupported(
            "boundary data does not close the finite-difference system at x = 0".into(),
        ));
    }
    Ok(closure)
}

/// Row of the spatial operator applied at node 0 with ghosts eliminated:
/// coefficients on U_0 and U_1, plus the data factor per boundary signal
/// (value contribution = factor * g(t)).
fn ghost_row(
    p: &BVProblem,
    closure: &BoundaryClosure,
    r: usize,
    h: f64,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<(usize, Complex64)>) {
    let m = &p.system;
    let n = m.size();
    let mut on0 = vec![Complex64::default(); n];
    let mut on1 = vec![Complex64::default(); n];
    let mut data = Vec::new();
    for c in 0..n {
        let co = m.entry(r, c).coefficients();
        let c0 = co.first().copied().unwrap_or_default();
        let c1 = -I * co.get(1).copied().unwrap_or_default();
        let c2 = -co.get(2).copied().unwrap_or_default();
        on0[c] += c0;
        if co.len() <= 1 {
            continue;
        }
        let (rule, bi) = closure.ghost[c].expect("usable row has ghost rules");
        let (a, b) = match rule {
            GhostRule::Neumann => (0.0, 1.0),
            GhostRule::Robin { a, b } => (a, b),
        };
        // u_x(0) = (g - a u_0)/b; u_xx(0) ~ (2u_1 - 2u_0 - 2h u_x(0)) / h^2
        on0[c] += c1 * (-a / b) + c2 * (-2.0 / (h * h) + 2.0 * a / (b * h));
        on1[c] += c2 * 2.0 / (h * h);
        let factor = c1 / b + c2 * (-2.0 / (b * h));
        if factor.norm() > 0.0 {
            data.push((bi, factor));
        }
    }
    (on0, on1, data)
}

struct Stepper {
    n: usize,
    nodes: usize,
    tau: f64,
    /// Thomas precomputation: inverted pivots and upper multipliers
    pivots: Vec<DMatrix<Complex64>>,
    uppers: Vec<DMatrix<Complex64>>,
    lowers: Vec<DMatrix<Complex64>>,
    /// explicit-side blocks (node 0 rows included)
    em: Vec<DMatrix<Complex64>>,
    e0: Vec<DMatrix<Complex64>>,
    ep: Vec<DMatrix<Complex64>>,
    /// node-0 data terms: (row, boundary index, factor) applied at both time
    /// levels with weight -tau/2, plus Dirichlet replaced rows (row, index)
    node0_data: Vec<(usize, usize, Complex64)>,
    node0_dirichlet: Vec<(usize, usize)>,
}

fn build_stepper(p: &BVProblem, h: f64, tau: f64, l: f64) -> Result<Stepper> {
    let m = &p.system;
    let n = m.size();
    let nodes = (l / h).round() as usize + 1;
    let closure = boundary_closure(p)?;
    let (bm, b0, bp) = interior_blocks(m, h);
    let half = Complex64::new(tau / 2.0, 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);

    let mut lm = Vec::with_capacity(nodes);
    let mut l0 = Vec::with_capacity(nodes);
    let mut lp = Vec::with_capacity(nodes);
    let mut em = Vec::with_capacity(nodes);
    let mut e0 = Vec::with_capacity(nodes);
    let mut ep = Vec::with_capacity(nodes);
    let zero = DMatrix::<Complex64>::zeros(n, n);

    // node 0: Dirichlet replaced rows first, then ghost-closed evolution rows
    let mut a00 = DMatrix::<Complex64>::zeros(n, n);
    let mut a01 = DMatrix::<Complex64>::zeros(n, n);
    let mut x00 = DMatrix::<Complex64>::zeros(n, n);
    let mut x01 = DMatrix::<Complex64>::zeros(n, n);
    let mut node0_data = Vec::new();
    let mut node0_dirichlet = Vec::new();
    let mut slot = 0usize;
    for &(c, bi, coeff) in &closure.dirichlet {
        a00[(slot, c)] = Complex64::new(coeff, 0.0);
        node0_dirichlet.push((slot, bi));
        slot += 1;
    }
    for &r in &closure.evolution_rows {
        let (on0, on1, data) = ghost_row(p, &closure, r, h);
        a00[(slot, r)] += Complex64::new(1.0, 0.0);
        x00[(slot, r)] += Complex64::new(1.0, 0.0);
        for c in 0..n {
            a00[(slot, c)] += half * on0[c];
            a01[(slot, c)] += half * on1[c];
            x00[(slot, c)] -= half * on0[c];
            x01[(slot, c)] -= half * on1[c];
        }
        for (bi, factor) in data {
            node0_data.push((slot, bi, factor));
        }
        slot += 1;
    }
    lm.push(zero.clone());
    l0.push(a00);
    lp.push(a01);
    em.push(zero.clone());
    e0.push(x00);
    ep.push(x01);

    for _ in 1..nodes - 1 {
        lm.push(&bm * half);
        l0.push(&id + &b0 * half);
        lp.push(&bp * half);
        em.push(&bm * (-half));
        e0.push(&id - &b0 * half);
        ep.push(&bp * (-half));
    }

    // far boundary: homogeneous Dirichlet
    lm.push(zero.clone());
    l0.push(id.clone());
    lp.push(zero.clone());
    em.push(zero.clone());
    e0.push(zero.clone());
    ep.push(zero.clone());

    // block-Thomas factorization of the (time-independent) implicit matrix
    let mut pivots = Vec::with_capacity(nodes);
    let mut uppers = Vec::with_capacity(nodes);
    let mut prev_w = zero.clone();
    for i in 0..nodes {
        let denom = if i == 0 {
            l0[0].clone()
        } else {
            &l0[i] - &lm[i] * &prev_w
        };
        let inv = denom.clone().try_inverse().ok_or(UtmError::Unsupported(
            "singular finite-difference system".into(),
        ))?;
        let w = &inv * &lp[i];
        pivots.push(inv);
        prev_w = w.clone();
        uppers.push(w);
    }

    Ok(Stepper {
        n,
        nodes,
        tau,
        pivots,
        uppers,
        lowers: lm,
        em,
        e0,
        ep,
        node0_data,
        node0_dirichlet,
    })
}

impl Stepper {
    /// One implicit trapezoidal step from (u, t) to t + tau.
    fn step(&self, p: &BVProblem, u: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.n;
        let nodes = self.nodes;
        let t1 = t + self.tau;
        let block = |i: usize| &u[i * n..(i + 1) * n];
        // explicit side
        let mut rhs = vec![Complex64::default(); nodes * n];
        for i in 0..nodes {
            let mut v = vec![Complex64::default(); n];
            for r in 0..n {
                let mut s = Complex64::default();
                for c in 0..n {
                    s += self.e0[i][(r, c)] * block(i)[c];
                    if i > 0 {
                        s += self.em[i][(r, c)] * block(i - 1)[c];
                    }
                    if i + 1 < nodes {
                        s += self.ep[i][(r, c)] * block(i + 1)[c];
                    }
                }
                v[r] = s;
            }
            rhs[i * n..(i + 1) * n].copy_from_slice(&v);
        }
        let half = self.tau / 2.0;
        for &(slot, bi, factor) in &self.node0_data {
            let g = p.boundary[bi].data.eval(t) + p.boundary[bi].data.eval(t1);
            rhs[slot] -= factor * g * half;
        }
        for &(slot, bi) in &self.node0_dirichlet {
            rhs[slot] = p.boundary[bi].data.eval(t1);
        }
        // block-Thomas solve
        let mut y = vec![Complex64::default(); nodes * n];
        for i in 0..nodes {
            let mut v = vec![Complex64::default(); n];
            for r in 0..n {
                let mut s = rhs[i * n + r];
                if i > 0 {
                    for c in 0..n {
                        s -= self.lowers[i][(r, c)] * y[(i - 1) * n + c];
                    }
                }
                v[r] = s;
            }
            for r in 0..n {
                let mut s = Complex64::default();
                for c in 0..n {
                    s += self.pivots[i][(r, c)] * v[c];
                }
                y[i * n + r] = s;
            }
        }
        let mut out = vec![Complex64::default(); nodes * n];
        for i in (0..nodes).rev() {
            for r in 0..n {
                let mut s = y[i * n + r];
                if i + 1 < nodes {
                    for c in 0..n {
                        s -= self.uppers[i][(r, c)] * out[(i + 1) * n + c];
                    }
                }
                out[i * n + r] = s;
            }
        }
        out
    }
}

/// Runs one discretization to all requested (x, t) points, linear
/// interpolation in both axes.
fn fd_run(p: &BVProblem, h: f64, tau: f64, l: f64, grid: &Grid) -> Result<Vec<Complex64>> {
    let n = p.system.size();
    let stepper = build_stepper(p, h, tau, l)?;
    let nodes = stepper.nodes;
    let mut u = vec![Complex64::default(); nodes * n];
    for i in 0..nodes {
        let x = i as f64 * h;
        for c in 0..n {
            u[i * n + c] = p.initial[c].eval(x);
        }
    }
    // consistent boundary start for Dirichlet rows
    for bc in &p.boundary {
        if bc.kind == BoundaryKind::Dirichlet {
            u[bc.component] = bc.data.eval(0.0);
        }
    }
    let scale = 1.0 + u.iter().map(|v| v.norm()).fold(0.0, f64::max);

    let t_max = grid.ts.iter().copied().fold(0.0, f64::max);
    let sample_x = |u: &[Complex64], x: f64, c: usize| -> Complex64 {
        let pos = (x / h).min((nodes - 1) as f64).max(0.0);
        let i0 = (pos.floor() as usize).min(nodes - 2);
        let w = pos - i0 as f64;
        u[i0 * n + c] * (1.0 - w) + u[(i0 + 1) * n + c] * w
    };

    let mut order: Vec<usize> = (0..grid.ts.len()).collect();
    order.sort_by(|&a, &b| grid.ts[a].total_cmp(&grid.ts[b]));

    let nx = grid.xs.len();
    let mut values = vec![Complex64::default(); grid.ts.len() * nx * n];
    let mut t_prev = 0.0;
    let mut u_prev = u.clone();
    let mut t_cur = 0.0;
    let mut cursor = 0usize;
    let mut step_idx = 0usize;
    loop {
        // record all requested times inside [t_prev, t_cur]
        while cursor < order.len() && grid.ts[order[cursor]] <= t_cur + 1e-12 {
            let it = order[cursor];
            let t = grid.ts[it];
            let w = if t_cur > t_prev {
                ((t - t_prev) / (t_cur - t_prev)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            for (ix, &x) in grid.xs.iter().enumerate() {
                for c in 0..n {
                    let a = sample_x(&u_prev, x, c);
                    let b = sample_x(&u, x, c);
                    values[(it * nx + ix) * n + c] = a * (1.0 - w) + b * w;
                }
            }
            cursor += 1;
        }
        if cursor >= order.len() || t_cur >= t_max + tau {
            break;
        }
        let next = stepper.step(p, &u, t_cur);
        let norm = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        step_idx += 1;
        if !norm.is_finite() || norm > 1e6 * scale {
            return Err(UtmError::FdInstability {
                norm,
                step: step_idx,
            });
        }
        t_prev = t_cur;
        u_prev = u;
        u = next;
        t_cur += tau;
    }
    Ok(values)
}

/// Independent finite-difference reference solution: implicit trapezoidal
/// time stepping with second-order centered stencils on [0, cfg.l], truncated
/// with a homogeneous Dirichlet far boundary. The per-point error estimate
/// comes from Richardson comparison of the (h, tau) and (h/2, tau/2) runs.
pub fn fd_reference(p: &BVProblem, cfg: &FDConfig, grid: &Grid) -> Result<SolutionField> {
    if cfg.h <= 0.0 || cfg.tau <= 0.0 || cfg.l <= 0.0 {
        return Err(UtmError::InvalidData(
            "finite-difference steps and cutoff must be positive".into(),
        ));
    }
    let n = p.system.size();
    for f in &p.initial {
        if f.eval(cfg.l).norm() > 1e-10 {
            return Err(UtmError::InvalidData(format!(
                "initial data does not decay by the cutoff x = {}",
                cfg.l
            )));
        }
    }
    let t_max = grid.ts.iter().copied().fold(0.0, f64::max);
    if t_max > p.horizon {
        return Err(UtmError::InvalidData(
            "grid extends past the data horizon".into(),
        ));
    }
    let coarse = fd_run(p, cfg.h, cfg.tau, cfg.l, grid)?;
    let fine = fd_run(p, cfg.h / 2.0, cfg.tau / 2.0, cfg.l, grid)?;
    let npts = grid.xs.len() * grid.ts.len();
    let mut errors = vec![0.0; npts];
    for pt in 0..npts {
        let mut d = 0.0_f64;
        for c in 0..n {
            d = d.max((fine[pt * n + c] - coarse[pt * n + c]).norm());
        }
        // second-order scheme: remaining error of the fine run ~ diff / 3
        errors[pt] = d / 3.0;
    }
    Ok(SolutionField {
        xs: grid.xs.clone(),
        ts: grid.ts.clone(),
        ncomp: n,
        values: fine,
        errors,
        k_max_used: 0.0,
        contour_id: format!("fd h={} tau={}", cfg.h / 2.0, cfg.tau / 2.0),
    })
}

/// Method-of-images reference for homogeneous boundary data: extend the data
/// to the whole line with the mirror parity the boundary condition dictates
/// (odd for Dirichlet, even for Neumann) and evaluate the whole-line Fourier
/// solution restricted to x > 0.
pub fn images_reference(p: &BVProblem, grid: &Grid) -> Result<SolutionField> {
    let m = &p.system;
    let n = m.size();
    if n != 2 {
        return Err(UtmError::Unsupported(
            "images reference is implemented for 2x2 systems".into(),
        ));
    }
    let mut sign = None;
    for bc in &p.boundary {
        let s = match bc.kind {
            BoundaryKind::Dirichlet => -1.0,
            BoundaryKind::Neumann => 1.0,
            BoundaryKind::Robin { .. } => {
                return Err(UtmError::Unsupported(
                    "images reference needs Dirichlet or Neumann conditions".into(),
                ));
            }
        };
        if bc.data.eval(0.0).norm() > 0.0 || bc.data.eval(p.horizon * 0.37).norm() > 0.0 {
            return Err(UtmError::Unsupported(
                "images reference needs homogeneous boundary data".into(),
            ));
        }
        if *sign.get_or_insert(s) != s {
            return Err(UtmError::Unsupported(
                "images reference needs a single mirror parity".into(),
            ));
        }
    }
    let sign = sign.ok_or(UtmError::Unsupported(
        "images reference needs at least one boundary condition".into(),
    ))?;
    // the extension parity is only consistent when the symbol is even in k
    for r in 0..n {
        for c in 0..n {
            let co = m.entry(r, c).coefficients();
            if co.iter().skip(1).step_by(2).any(|z| z.norm() > 0.0) {
                return Err(UtmError::Unsupported(
                    "images reference needs a symbol even in k".into(),
                ));
            }
        }
    }
    let tol = p.tol;
    let tol_inner = tol * 0.05;
    let path = crate::contour::ContourPath::real_line(40.0);
    evaluate_grid(grid, n, "real-line", |x, t| -> Result<PointResult> {
        let mut components = Vec::with_capacity(n);
        let mut error = 0.0;
        let mut k_max = 0.0_f64;
        for comp in 0..n {
            let f = |k: Complex64| -> Complex64 {
                let hats: Vec<Complex64> = p
                    .initial
                    .iter()
                    .map(|f| {
                        let plus = half_line_ft(f, k, tol_inner).map(|q| q.value).unwrap_or_default();
                        let minus = half_line_ft(f, -k, tol_inner).map(|q| q.value).unwrap_or_default();
                        plus + sign * minus
                    })
                    .collect();
                let cp = char_poly(m, k);
                let (w1, w2) = quad_roots(cp[0], cp[1]);
                let lam = m.eval(k);
                let e = exp_dd(w1, w2, t);
                let xe = xexp_dd(w1, w2, t);
                // e^{-Lambda t} = -xexp_dd I + exp_dd Lambda
                let mut v = Complex64::default();
                for c in 0..n {
                    let diag = if c == comp { -xe } else { Complex64::default() };
                    v += (diag + e * lam[(comp, c)]) * hats[c];
                }
                (I * k * x).exp() * v / (2.0 * PI)
            };
            let (q, radius) =
                line_integral(&path, &f, x.abs() + t + 0.5, tol, TruncationMode::Adaptive)?;
            components.push(q.value);
            error += q.error;
            k_max = k_max.max(radius);
        }
        Ok(PointResult {
            components,
            error,
            k_max,
        })
    })
}

/// Max-norm of the discrete PDE residual F_t + Lambda(-i d/dx) F over
/// interior grid points, with centered stencils in both axes. Requires a
/// uniform grid with at least 3 points per axis.
pub fn pde_residual(f: &SolutionField, m: &PolynomialMatrix) -> Result<f64> {
    let nx = f.xs().len();
    let nt = f.ts().len();
    let n = m.size();
    if nx < 3 || nt < 3 {
        return Err(UtmError::GridTooCoarse {
            needed: 3,
            got: nx.min(nt),
        });
    }
    if f.ncomp() != n {
        return Err(UtmError::InvalidData(
            "field component count does not match the symbol".into(),
        ));
    }
    let uniform = |v: &[f64]| -> Result<f64> {
        let d = v[1] - v[0];
        for w in v.windows(2) {
            if ((w[1] - w[0]) - d).abs() > 1e-9 * (1.0 + d.abs()) {
                return Err(UtmError::InvalidData(
                    "residual evaluation needs a uniform grid".into(),
                ));
            }
        }
        Ok(d)
    };
    let dx = uniform(f.xs())?;
    let dt = uniform(f.ts())?;
    let mut worst = 0.0_f64;
    for it in 1..nt - 1 {
        for ix in 1..nx - 1 {
            for r in 0..n {
                let ft = (f.value(ix, it + 1, r) - f.value(ix, it - 1, r)) / (2.0 * dt);
                let mut lam = Complex64::default();
                for c in 0..n {
                    let co = m.entry(r, c).coefficients();
                    let u = f.value(ix, it, c);
                    let ux = (f.value(ix + 1, it, c) - f.value(ix - 1, it, c)) / (2.0 * dx);
                    let uxx = (f.value(ix + 1, it, c) - 2.0 * u + f.value(ix - 1, it, c))
                        / (dx * dx);
                    lam += co.first().copied().unwrap_or_default() * u;
                    lam += -I * co.get(1).copied().unwrap_or_default() * ux;
                    lam += -co.get(2).copied().unwrap_or_default() * uxx;
                }
                worst = worst.max((ft + lam).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::dalembert::{dalembert_eval, DalembertKind};
    use crate::solvers::BoundarySpec;
    use crate::transforms::{HalfLineFunction, PolyExpTerm, TimeSignal};

    fn wave_dirichlet_problem() -> BVProblem {
        let u0 = HalfLineFunction::poly_exp(vec![PolyExpTerm {
            c: 1.0,
            p: 2,
            gamma: 1.0,
        }]);
        let v0 = HalfLineFunction::poly_exp(vec![PolyExpTerm {
            c: 1.0,
            p: 1,
            gamma: 1.0,
        }]);
        BVProblem::new(
            PolynomialMatrix::wave_family(0.0),
            vec![u0, v0],
            vec![BoundarySpec::dirichlet(0, TimeSignal::zero(3.0))],
            1e-6,
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn fd_zero_data_gives_zero_field() {
        let p = BVProblem::new(
            PolynomialMatrix::klein_gordon(1.0),
            vec![HalfLineFunction::zero(), HalfLineFunction::zero()],
            vec![BoundarySpec::dirichlet(0, TimeSignal::zero(2.0))],
            1e-6,
            2.0,
        )
        .unwrap();
        let grid = Grid::new(vec![0.5, 1.0], vec![0.3, 0.9]).unwrap();
        let f = fd_reference(&p, &FDConfig::new(0.1, 0.05), &grid).unwrap();
        for it in 0..2 {
            for ix in 0..2 {
                for c in 0..2 {
                    assert!(f.value(ix, it, c).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn fd_wave_matches_dalembert_to_second_order() {
        let p = wave_dirichlet_problem();
        let grid = Grid::new(vec![0.5, 1.0, 1.7], vec![0.4, 1.0]).unwrap();
        let f = fd_reference(&p, &FDConfig::new(0.02, 0.01), &grid).unwrap();
        let zero = TimeSignal::zero(3.0);
        for (it, &t) in grid.ts.iter().enumerate() {
            for (ix, &x) in grid.xs.iter().enumerate() {
                let want = dalembert_eval(
                    DalembertKind::Dirichlet,
                    &p.initial[0],
                    &p.initial[1],
                    &zero,
                    x,
                    t,
                );
                let got = f.value(ix, it, 0).re;
                assert!(
                    (got - want).abs() < 2e-3,
                    "u({x},{t}) = {got} vs d'Alembert {want}"
                );
            }
        }
        // the odd extension carries a curvature jump along x = t, so the
        // Richardson estimate is a little above clean O(h^2)
        assert!(f.max_error() < 5e-3, "Richardson estimate {}", f.max_error());
    }

    #[test]
    fn richardson_error_shrinks_by_factor_four() {
        let mut p = wave_dirichlet_problem();
        p.system = PolynomialMatrix::klein_gordon(1.0);
        let grid = Grid::new(vec![1.0], vec![0.5]).unwrap();
        let e1 = fd_reference(&p, &FDConfig::new(0.04, 0.02), &grid)
            .unwrap()
            .error(0, 0);
        let e2 = fd_reference(&p, &FDConfig::new(0.02, 0.01), &grid)
            .unwrap()
            .error(0, 0);
        let ratio = e1 / e2;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "Richardson ratio {ratio} (e1 = {e1:.3e}, e2 = {e2:.3e})"
        );
    }

    #[test]
    fn images_zero_data_gives_zero() {
        let p = BVProblem::new(
            PolynomialMatrix::klein_gordon(1.0),
            vec![HalfLineFunction::zero(), HalfLineFunction::zero()],
            vec![BoundarySpec::dirichlet(0, TimeSignal::zero(2.0))],
            1e-7,
            2.0,
        )
        .unwrap();
        let grid = Grid::new(vec![0.7], vec![0.6]).unwrap();
        let f = images_reference(&p, &grid).unwrap();
        assert!(f.value(0, 0, 0).norm() < 1e-10);
        assert!(f.value(0, 0, 1).norm() < 1e-10);
    }

    #[test]
    fn images_wave_matches_dalembert() {
        let mut p = wave_dirichlet_problem();
        p.tol = 1e-8;
        let grid = Grid::new(vec![0.5, 1.3], vec![0.8]).unwrap();
        let f = images_reference(&p, &grid).unwrap();
        let zero = TimeSignal::zero(3.0);
        for (ix, &x) in grid.xs.iter().enumerate() {
            let want = dalembert_eval(
                DalembertKind::Dirichlet,
                &p.initial[0],
                &p.initial[1],
                &zero,
                x,
                0.8,
            );
            let got = f.value(ix, 0, 0).re;
            assert!(
                (got - want).abs() < 1e-6,
                "u({x}, 0.8) = {got} vs d'Alembert {want}"
            );
        }
    }

    #[test]
    fn images_rejects_nonhomogeneous_data() {
        let mut p = wave_dirichlet_problem();
        p.boundary = vec![BoundarySpec::dirichlet(0, TimeSignal::exp_decay(1.0, 1.0, 3.0))];
        let grid = Grid::new(vec![0.5], vec![0.5]).unwrap();
        assert!(matches!(
            images_reference(&p, &grid),
            Err(UtmError::Unsupported(_))
        ));
    }

    #[test]
    fn residual_vanishes_for_plane_wave_field() {
        let m = PolynomialMatrix::klein_gordon(1.0);
        let k = Complex64::new(0.7, 0.0);
        let omega = (Complex64::new(1.0, 0.0) + k * k).sqrt() * I;
        let eta = [Complex64::new(1.0, 0.0), -omega];
        let h = 0.01;
        let xs: Vec<f64> = (0..5).map(|i| 1.0 + i as f64 * h).collect();
        let ts: Vec<f64> = (0..5).map(|i| 0.5 + i as f64 * h).collect();
        let mut values = Vec::new();
        for &t in &ts {
            for &x in &xs {
                let ph = (I * k * x - omega * t).exp();
                values.push(eta[0] * ph);
                values.push(eta[1] * ph);
            }
        }
        let f = SolutionField {
            xs,
            ts,
            ncomp: 2,
            values,
            errors: vec![0.0; 25],
            k_max_used: 0.0,
            contour_id: "synthetic".into(),
        };
        let r = pde_residual(&f, &m).unwrap();
        assert!(r < 1e-3, "plane-wave residual {r}");
        assert!(r > 0.0);
    }

    #[test]
    fn residual_zero_field_and_coarse_grid() {
        let m = PolynomialMatrix::klein_gordon(1.0);
        let f = SolutionField {
            xs: vec![0.1, 0.2, 0.3],
            ts: vec![0.1, 0.2, 0.3],
            ncomp: 2,
            values: vec![Complex64::default(); 18],
            errors: vec![0.0; 9],
            k_max_used: 0.0,
            contour_id: "synthetic".into(),
        };
        assert_eq!(pde_residual(&f, &m).unwrap(), 0.0);
        let coarse = SolutionField {
            xs: vec![0.1, 0.2],
            ts: vec![0.1, 0.2, 0.3],
            ncomp: 2,
            values: vec![Complex64::default(); 12],
            errors: vec![0.0; 6],
            k_max_used: 0.0,
            contour_id: "synthetic".into(),
        };
        assert!(matches!(
            pde_residual(&coarse, &m),
            Err(UtmError::GridTooCoarse { .. })
        ));
    }
}
