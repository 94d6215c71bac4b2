//! System-agnostic pipeline: counting how many boundary conditions a symbol
//! needs, assembling the global relations at a spectral point, and a generic
//! solver for 2x2 systems that eliminates the unknown boundary transforms
//! through symmetry-mapped global relations.

use super::{
    damped_time_transform, damped_time_transform_deriv, evaluate_grid, line_integral, quad_roots,
    BoundaryKind, BVProblem, Grid, PointResult, SolutionField, TruncationMode,
};
use crate::contour::{decay_certificate, ContourPath};
use crate::dispersion::BranchSet;
use crate::error::{Result, UtmError};
use crate::numeric::I;
use crate::symbol::{char_poly, left_eigen_rows, x_operator, PolynomialMatrix};
use crate::symmetry::{find_symmetries, SymmetrySet};
use crate::transforms::{half_line_ft, DomainTag, SpectralFunction};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Per-component entry of the boundary-condition count report.
#[derive(Debug, Clone)]
pub struct ComponentBcInfo {
    pub name: String,
    pub index: usize,
    /// highest x-derivative order of this component appearing in the
    /// boundary terms (its column degree in the symbol)
    pub max_order: usize,
    /// true if this component's boundary trace follows from another
    /// component's data by time differentiation
    pub derivable: bool,
}

/// Result of `count_required_bcs`.
#[derive(Debug, Clone)]
pub struct BcReport {
    /// number of boundary conditions that must be prescribed
    pub count: usize,
    /// unknown boundary transforms before elimination (branches x orders)
    pub total_unknowns: usize,
    /// transforms eliminated through symmetry-mapped global relations
    pub usable_relations: usize,
    /// name of the component whose data carries the count (largest column
    /// degree)
    pub data_component: String,
    pub components: Vec<ComponentBcInfo>,
}

fn primary_component(m: &PolynomialMatrix) -> usize {
    (0..m.size())
        .max_by_key(|&c| m.column_degree(c))
        .unwrap_or(0)
}

fn is_derivable(m: &PolynomialMatrix, primary: usize, comp: usize) -> bool {
    if comp == primary || m.column_degree(comp) == 0 {
        return false;
    }
    // the primary component's evolution row must be free of x-derivatives and
    // must actually couple to this component
    let all_const = (0..m.size()).all(|c| m.entry(primary, c).degree() == 0);
    all_const && m.entry(primary, comp).eval(Complex64::default()).norm() > 1e-12
}

/// Counts the boundary conditions the half-line problem needs: total unknown
/// boundary transforms, minus those eliminated by symmetries valid on the
/// evaluation contour, minus component traces derivable from other data.
pub fn count_required_bcs(m: &PolynomialMatrix, s: &SymmetrySet) -> Result<BcReport> {
    let n = m.size();
    let orders: Vec<usize> = (0..n).map(|c| m.column_degree(c)).collect();
    let total_per_branch: usize = orders.iter().sum();
    let total = n * total_per_branch;
    let mut usable = 0usize;
    for sym in s.symmetries() {
        if sym.is_identity() {
            continue;
        }
        // only symmetries mapping the evaluation contour (the real line) into
        // the closed validity region can be used: linear with real coefficient
        match sym.linear_coefficient() {
            Some(c) if c.im.abs() <= 1e-9 * (1.0 + c.norm()) => {
                usable += sym.permutation().iter().filter(|p| p.is_some()).count();
            }
            _ => {}
        }
    }
    if usable > total || (total - usable) % n != 0 {
        return Err(UtmError::InvalidData(format!(
            "usable relations ({usable}) incompatible with {total} unknown transforms"
        )));
    }
    let primary = primary_component(m);
    let mut components = Vec::with_capacity(n);
    let mut derivable_count = 0usize;
    for c in 0..n {
        let derivable = is_derivable(m, primary, c);
        if derivable {
            derivable_count += 1;
        }
        components.push(ComponentBcInfo {
            name: m.component_names()[c].clone(),
            index: c,
            max_order: orders[c],
            derivable,
        });
    }
    let functions = (total - usable) / n;
    if functions < derivable_count {
        return Err(UtmError::InvalidData(
            "more derivable traces than remaining data functions".into(),
        ));
    }
    Ok(BcReport {
        count: functions - derivable_count,
        total_unknowns: total,
        usable_relations: usable,
        data_component: m.component_names()[primary].clone(),
        components,
    })
}

/// Where a global-relation row is valid: Im(nu_coefficient * k) <= 0.
#[derive(Debug, Clone, Copy)]
pub struct RowValidity {
    pub nu_coefficient: Complex64,
}

impl RowValidity {
    pub fn contains(&self, k: Complex64) -> bool {
        let nu = self.nu_coefficient * k;
        nu.im <= 1e-12 * (1.0 + nu.norm())
    }
}

/// One global relation, scaled so the unknowns are the damped boundary
/// transforms e^{-Omega_j(k) t} g_{c,l}^{(j)}.
#[derive(Debug, Clone)]
pub struct GlobalRelationRow {
    /// branch index j (into the sorted root list at k) whose transforms this
    /// row constrains
    pub branch: usize,
    /// index of the symmetry used to map the relation, None for the relation
    /// at k itself
    pub symmetry: Option<usize>,
    /// coefficients aligned with `GlobalRelationSystem::unknowns`
    pub coeffs: Vec<Complex64>,
    /// known initial-data side, damped by e^{-Omega_j(k) t}; the decaying
    /// solution-transform term is omitted
    pub rhs: Complex64,
    pub validity: RowValidity,
}

/// All global relations at one spectral point (k, t).
#[derive(Debug, Clone)]
pub struct GlobalRelationSystem {
    /// per-branch unknown layout: (component, x-derivative order)
    pub unknowns: Vec<(usize, usize)>,
    pub rows: Vec<GlobalRelationRow>,
    pub k: Complex64,
    pub t: f64,
}

/// Assembles the global relations of the problem at (k, t): one row per
/// branch for the relation at k itself (valid Im k <= 0), plus one row per
/// matched branch for each non-identity linear symmetry nu(k).
pub fn build_global_relations(
    p: &BVProblem,
    b: &BranchSet,
    s: &SymmetrySet,
    k: Complex64,
    t: f64,
) -> Result<GlobalRelationSystem> {
    let m = &p.system;
    let n = m.size();
    let tol = p.tol * 0.05;
    let mut unknowns = Vec::new();
    for c in 0..n {
        for l in 0..m.column_degree(c) {
            unknowns.push((c, l));
        }
    }
    let xop = x_operator(m);
    let roots = b.roots_at(k)?;
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);

    // rows at one argument kappa, paired to the branch values at k whose
    // Omega they share
    let push_rows = |rows: &mut Vec<GlobalRelationRow>,
                         kappa: Complex64,
                         symmetry: Option<usize>,
                         nu_coefficient: Complex64|
     -> Result<()> {
        let kroots = b.roots_at(kappa)?;
        let a = left_eigen_rows(&m.eval(kappa), &kroots)?;
        let coeff_mats: Vec<DMatrix<Complex64>> = (0..m.order())
            .map(|l| xop.partial_coeff(l, kappa))
            .collect();
        let q0hat: Vec<Complex64> = p
            .initial
            .iter()
            .map(|f| half_line_ft(f, kappa, tol).map(|q| q.value))
            .collect::<Result<_>>()?;
        for (j, &omega_j) in roots.iter().enumerate() {
            // the row at kappa whose branch value equals Omega_j(k)
            let (jm, dist) = kroots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - omega_j).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if symmetry.is_some() && dist > 1e-6 * scale {
                continue; // this symmetry does not map branch j
            }
            let damp = (-omega_j * t).exp();
            let mut coeffs = Vec::with_capacity(unknowns.len());
            for &(c, l) in &unknowns {
                // [A_jm . C_l(kappa)]_c
                let v: Complex64 = (0..n).map(|r| a[(jm, r)] * coeff_mats[l][(r, c)]).sum();
                coeffs.push(v);
            }
            let rhs = damp * (0..n).map(|r| a[(jm, r)] * q0hat[r]).sum::<Complex64>();
            rows.push(GlobalRelationRow {
                branch: j,
                symmetry,
                coeffs,
                rhs,
                validity: RowValidity { nu_coefficient },
            });
        }
        Ok(())
    };

    let mut rows = Vec::new();
    push_rows(&mut rows, k, None, Complex64::new(1.0, 0.0))?;
    for (idx, sym) in s.symmetries().iter().enumerate() {
        if sym.is_identity() {
            continue;
        }
        if let Some(c) = sym.linear_coefficient() {
            push_rows(&mut rows, c * k, Some(idx), c)?;
        }
    }
    Ok(GlobalRelationSystem {
        unknowns,
        rows,
        k,
        t,
    })
}

/// Certifies that the solution-transform terms dropped from the mapped global
/// relations decay in the upper half plane, using the initial-data transforms
/// as proxies for the solution transforms.
fn certify_dropped_terms(p: &BVProblem, s: &SymmetrySet) -> Result<()> {
    for sym in s.symmetries() {
        if sym.is_identity() {
            continue;
        }
        let Some(cnu) = sym.linear_coefficient() else {
            continue;
        };
        let initial = p.initial.clone();
        let proxy = SpectralFunction::new(
            move |k: Complex64| {
                let damp = (I * k * 0.1).exp();
                let s: Complex64 = initial
                    .iter()
                    .map(|f| half_line_ft(f, cnu * k, 1e-8).map(|q| q.value).unwrap_or_default())
                    .sum();
                damp * s
            },
            DomainTag::UpperHalf,
        );
        let report = decay_certificate(&proxy, (0.1 * PI, 0.9 * PI), 6, 1e-2);
        if !report.pass {
            return Err(UtmError::Unsupported(
                "decay certificate failed for a dropped solution-transform term".into(),
            ));
        }
    }
    Ok(())
}

/// Generic solver for 2x2 systems: per spectral point, fills in the
/// data-known boundary transforms, solves the symmetry-mapped global
/// relations for the rest, and evaluates the inverse transform on the real
/// line.
pub fn generic_solve(p: &BVProblem, grid: &Grid) -> Result<SolutionField> {
    let m = &p.system;
    let n = m.size();
    if n != 2 {
        return Err(UtmError::Unsupported(
            "generic elimination is implemented for 2x2 systems".into(),
        ));
    }
    let b = BranchSet::build(m)?;
    let s = find_symmetries(m, &b)?;
    let report = count_required_bcs(m, &s)?;
    if p.boundary.len() != report.count {
        return Err(UtmError::BoundaryCountMismatch {
            required: report.count,
            supplied: p.boundary.len(),
        });
    }
    certify_dropped_terms(p, &s)?;

    let primary = primary_component(m);
    let derivable: Vec<usize> = (0..n).filter(|&c| is_derivable(m, primary, c)).collect();
    if !derivable.is_empty()
        && !p
            .boundary
            .iter()
            .any(|bc| bc.component == primary && bc.kind == BoundaryKind::Dirichlet)
    {
        return Err(UtmError::Unsupported(
            "derivable component traces need Dirichlet data on the primary component".into(),
        ));
    }

    let mut removable: Vec<Complex64> = b
        .branch_points()
        .iter()
        .map(|bp| bp.location)
        .filter(|z| z.im.abs() < 1e-9)
        .collect();
    // the origin is a fixed point of every k -> nu k symmetry, where mapped
    // rows coincide with the direct ones and the elimination degenerates
    if !removable.iter().any(|z| z.norm() < 1e-9) {
        removable.push(Complex64::default());
    }
    let path = ContourPath::real_line(40.0).with_removable(removable);
    let tol = p.tol;
    let ctx = GenericCtx {
        p,
        b: &b,
        s: &s,
        primary,
        derivable,
        xop: x_operator(m),
        tol_inner: tol * 0.05,
    };

    evaluate_grid(grid, n, "real-line", |x: f64, t: f64| -> Result<PointResult> {
        let failure: RefCell<Option<UtmError>> = RefCell::new(None);
        let integrand = |comp: usize, k: Complex64| -> Complex64 {
            match ctx.integrand(comp, x, t, k) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::default()
                }
            }
        };
        let osc = x.abs() + t + 0.5;
        let mut components = Vec::with_capacity(n);
        let mut error = 0.0;
        let mut k_max = 0.0f64;
        for comp in 0..n {
            let f = |k: Complex64| integrand(comp, k);
            let (q, radius) = line_integral(&path, &f, osc, tol, TruncationMode::Adaptive)?;
            if let Some(e) = failure.borrow_mut().take() {
                match e {
                    // isolated eigen-degeneracies are removable points that
                    // the path averaging already steps around
                    UtmError::DegenerateEigenvalue { .. } => {}
                    other => return Err(other),
                }
            }
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

/// Precomputed pieces of the generic elimination, shared across spectral
/// points.
pub(crate) struct GenericCtx<'a> {
    pub p: &'a BVProblem,
    pub b: &'a BranchSet,
    pub s: &'a SymmetrySet,
    pub primary: usize,
    pub derivable: Vec<usize>,
    pub xop: crate::symbol::XOperator,
    pub tol_inner: f64,
}

impl GenericCtx<'_> {
    /// The inverse-transform integrand of component `comp` at spectral point
    /// k, with the unknown boundary transforms eliminated per branch.
    pub(crate) fn integrand(&self, comp: usize, x: f64, t: f64, k: Complex64) -> Result<Complex64> {
        let p = self.p;
        let m = &p.system;
        let n = m.size();
        let tol_inner = self.tol_inner;
        let derivable = &self.derivable;
        let primary = self.primary;
        let xop = &self.xop;
        {
            {
                let cp = char_poly(m, k);
                let (r1, r2) = quad_roots(cp[0], cp[1]);
                let roots = vec![r1, r2];
                let a = left_eigen_rows(&m.eval(k), &roots)?;
                let sys = build_global_relations(p, self.b, self.s, k, t)?;
                let nu = sys.unknowns.len();
                let unknown_pos = |c: usize, l: usize| {
                    sys.unknowns.iter().position(|&(cc, ll)| cc == c && ll == l)
                };
                // per-branch elimination
                let mut d_all: Vec<Vec<Complex64>> = Vec::with_capacity(n);
                for j in 0..n {
                    let mut mat_rows: Vec<Vec<Complex64>> = Vec::new();
                    let mut rhs: Vec<Complex64> = Vec::new();
                    // symmetry-mapped relations valid on the real line
                    for row in sys.rows.iter().filter(|r| {
                        r.branch == j && r.symmetry.is_some() && r.validity.contains(k)
                    }) {
                        mat_rows.push(row.coeffs.clone());
                        rhs.push(row.rhs);
                    }
                    // boundary data
                    for bc in &p.boundary {
                        let mut r = vec![Complex64::default(); nu];
                        let v = match bc.kind {
                            BoundaryKind::Dirichlet => {
                                let Some(pos) = unknown_pos(bc.component, 0) else {
                                    return Err(UtmError::InvalidData(
                                        "boundary datum targets a component without unknowns"
                                            .into(),
                                    ));
                                };
                                r[pos] = Complex64::new(1.0, 0.0);
                                damped_time_transform(&bc.data, roots[j], t, tol_inner).value
                            }
                            BoundaryKind::Neumann => {
                                let Some(pos) = unknown_pos(bc.component, 1) else {
                                    return Err(UtmError::InvalidData(
                                        "Neumann datum targets a component of order < 2".into(),
                                    ));
                                };
                                r[pos] = Complex64::new(1.0, 0.0);
                                damped_time_transform(&bc.data, roots[j], t, tol_inner).value
                            }
                            BoundaryKind::Robin { a: ra, b: rb } => {
                                let (Some(p0), Some(p1)) =
                                    (unknown_pos(bc.component, 0), unknown_pos(bc.component, 1))
                                else {
                                    return Err(UtmError::InvalidData(
                                        "Robin datum targets a component of order < 2".into(),
                                    ));
                                };
                                r[p0] = Complex64::new(ra, 0.0);
                                r[p1] = Complex64::new(rb, 0.0);
                                damped_time_transform(&bc.data, roots[j], t, tol_inner).value
                            }
                        };
                        mat_rows.push(r);
                        rhs.push(v);
                    }
                    // derivable traces from the primary evolution row
                    if !derivable.is_empty() {
                        let ub = p
                            .boundary
                            .iter()
                            .find(|bc| {
                                bc.component == primary && bc.kind == BoundaryKind::Dirichlet
                            })
                            .map(|bc| &bc.data)
                            .unwrap();
                        let mut r = vec![Complex64::default(); nu];
                        for c in 0..n {
                            if let Some(pos) = unknown_pos(c, 0) {
                                r[pos] = m.entry(primary, c).eval(Complex64::default());
                            }
                        }
                        let v = -damped_time_transform_deriv(ub, roots[j], t, tol_inner)?.value;
                        mat_rows.push(r);
                        rhs.push(v);
                    }
                    if mat_rows.len() < nu {
                        return Err(UtmError::BoundaryCountMismatch {
                            required: nu,
                            supplied: mat_rows.len(),
                        });
                    }
                    let mat = DMatrix::from_fn(mat_rows.len(), nu, |r, c| mat_rows[r][c]);
                    let rv = DMatrix::from_fn(mat_rows.len(), 1, |r, _| rhs[r]);
                    // square (or overdetermined) solve via normal equations
                    let ata = mat.adjoint() * &mat;
                    let atb = mat.adjoint() * rv;
                    let sol = ata
                        .lu()
                        .solve(&atb)
                        .ok_or(UtmError::SingularElimination { k })?;
                    d_all.push((0..nu).map(|i| sol[(i, 0)]).collect());
                }
                // assemble the inverse-transform integrand
                let coeff_mats: Vec<DMatrix<Complex64>> = (0..m.order())
                    .map(|l| xop.partial_coeff(l, k))
                    .collect();
                let q0hat: Vec<Complex64> = p
                    .initial
                    .iter()
                    .map(|f| half_line_ft(f, k, tol_inner).map(|q| q.value))
                    .collect::<Result<_>>()?;
                let mut w = vec![Complex64::default(); n];
                for j in 0..n {
                    let damp = (-roots[j] * t).exp();
                    let known: Complex64 = (0..n).map(|r| a[(j, r)] * q0hat[r]).sum();
                    let gtilde: Complex64 = sys
                        .unknowns
                        .iter()
                        .enumerate()
                        .map(|(i, &(c, l))| {
                            let coeff: Complex64 =
                                (0..n).map(|r| a[(j, r)] * coeff_mats[l][(r, c)]).sum();
                            coeff * d_all[j][i]
                        })
                        .sum();
                    w[j] = damp * known - gtilde;
                }
                // Q(k) = A^{-1} w, 2x2 inverse
                let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
                let q = match comp {
                    0 => (a[(1, 1)] * w[0] - a[(0, 1)] * w[1]) / det,
                    _ => (a[(0, 0)] * w[1] - a[(1, 0)] * w[0]) / det,
                };
                Ok((I * k * x).exp() * q / (2.0 * PI))
            }
        }
    }
}
