//! Symmetries nu(k) of the dispersion relation: maps with
//! det(Lambda(nu(k)) - Omega_j(k) I) = 0, found by solving the dispersion
//! polynomial in its first argument per branch and continuation-tracking the
//! roots over a sample path.

use crate::dispersion::{match_strict, sort_desc, BranchSet};
use crate::error::{Result, UtmError};
use crate::polynomial::{roots_of, BivariatePoly};
use crate::symbol::PolynomialMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// One symmetry: either a single-valued map (all source branches agree on the
/// value) or a branch-dependent family tracked per source branch.
#[derive(Debug, Clone)]
pub struct Symmetry {
    /// source branch indices whose equations this symmetry solves
    sources: Vec<usize>,
    /// per sample: k and the nu value for each source (parallel to `sources`)
    samples: Vec<(Complex64, Vec<Complex64>)>,
    form: SymmetryForm,
    /// permutation entry per branch j: Some(m) means
    /// Omega_m(nu(k)) = Omega_j(k); None if j is not a source
    permutation: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryForm {
    /// nu(k) = c k
    Linear(Complex64),
    /// no closed form; values available at the tracked samples
    Sampled,
}

impl Symmetry {
    pub fn multiplicity(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn form(&self) -> SymmetryForm {
        self.form
    }

    pub fn linear_coefficient(&self) -> Option<Complex64> {
        match self.form {
            SymmetryForm::Linear(c) => Some(c),
            SymmetryForm::Sampled => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.form, SymmetryForm::Linear(c) if (c - Complex64::new(1.0, 0.0)).norm() < 1e-8)
    }

    /// Tracked samples: (k, nu value per source branch).
    pub fn samples(&self) -> &[(Complex64, Vec<Complex64>)] {
        &self.samples
    }

    /// Evaluates the symmetry at k (closed linear form only).
    pub fn eval(&self, k: Complex64) -> Result<Complex64> {
        match self.form {
            SymmetryForm::Linear(c) => Ok(c * k),
            SymmetryForm::Sampled => Err(UtmError::Unsupported(
                "symmetry has no closed form; use the tracked samples".into(),
            )),
        }
    }

    /// Whether Im nu(k) <= 0, i.e. the new global relation generated by this
    /// symmetry is valid at k.
    pub fn valid_at(&self, k: Complex64) -> Result<bool> {
        let nu = self.eval(k)?;
        Ok(nu.im <= 1e-12 * (1.0 + nu.norm()))
    }

    /// Branch-permutation entry: Some(m) with Omega_m(nu(k)) = Omega_j(k).
    pub fn permutation(&self) -> &[Option<usize>] {
        &self.permutation
    }
}

#[derive(Debug, Clone)]
pub struct SymmetrySet {
    syms: Vec<Symmetry>,
}

impl SymmetrySet {
    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.syms
    }

    pub fn get(&self, l: usize) -> &Symmetry {
        &self.syms[l]
    }
}

/// Tracking state: branch values and, per branch, its full nu-root list.
#[derive(Clone)]
struct TrackState {
    branches: Vec<Complex64>,
    nus: Vec<Vec<Complex64>>,
}

fn advance(
    p: &BivariatePoly,
    st: &TrackState,
    from: Complex64,
    to: Complex64,
    depth: usize,
) -> Result<TrackState> {
    let attempt = || -> Option<TrackState> {
        let omega_roots = roots_of(&p.omega_polynomial(to)).ok()?;
        let branches = match_strict(&st.branches, &omega_roots)?;
        let mut nus = Vec::with_capacity(branches.len());
        for (j, &w) in branches.iter().enumerate() {
            let nu_roots = roots_of(&p.k_polynomial(w)).ok()?;
            nus.push(match_strict(&st.nus[j], &nu_roots)?);
        }
        Some(TrackState { branches, nus })
    };
    if let Some(next) = attempt() {
        return Ok(next);
    }
    if depth == 0 {
        return Err(UtmError::SymmetryTrackingAmbiguity { k: to });
    }
    let mid = (from + to) * 0.5;
    let at_mid = advance(p, st, from, mid, depth - 1)?;
    advance(p, &at_mid, mid, to, depth - 1)
}

/// Tracks all per-branch nu-roots along a sample path and groups them into
/// symmetries. `combine_leftovers` merges branch-dependent roots across
/// branches by rank (a multivalued symmetry nu = f(omega)); without it only
/// value-identical roots merge.
fn track_and_group(
    p: &BivariatePoly,
    path: &[Complex64],
    base_branches: Vec<Complex64>,
    combine_leftovers: bool,
) -> Result<(Vec<Symmetry>, Vec<Complex64>)> {
    let k0 = path[0];
    let nb = base_branches.len();
    let mut nus0 = Vec::with_capacity(nb);
    for &w in &base_branches {
        let mut r = roots_of(&p.k_polynomial(w))?;
        sort_desc(&mut r);
        nus0.push(r);
    }
    let mut states = vec![TrackState {
        branches: base_branches.clone(),
        nus: nus0.clone(),
    }];
    for w in 1..path.len() {
        let next = advance(p, states.last().unwrap(), path[w - 1], path[w], 28)?;
        states.push(next);
    }

    // group (branch j, position pos) pairs by base value
    let scale = 1.0 + k0.norm();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![];
    let mut group_value: Vec<Complex64> = vec![];
    for (j, roots) in nus0.iter().enumerate() {
        for (pos, &v) in roots.iter().enumerate() {
            if let Some(g) = group_value
                .iter()
                .position(|&gv| (gv - v).norm() < 1e-6 * scale)
            {
                groups[g].push((j, pos));
            } else {
                groups.push(vec![(j, pos)]);
                group_value.push(v);
            }
        }
    }
    if combine_leftovers {
        // leftovers: groups backed by a single branch; pair them across
        // branches by descending base value rank
        let mut shared: Vec<Vec<(usize, usize)>> = vec![];
        let mut shared_vals: Vec<Complex64> = vec![];
        let mut leftovers: Vec<Vec<(usize, usize, Complex64)>> = vec![vec![]; nb];
        for (g, members) in groups.iter().enumerate() {
            if members.len() > 1 {
                shared.push(members.clone());
                shared_vals.push(group_value[g]);
            } else {
                let (j, pos) = members[0];
                leftovers[j].push((j, pos, group_value[g]));
            }
        }
        for l in leftovers.iter_mut() {
            l.sort_by(|a, b| {
                let s = 1.0 + a.2.norm() + b.2.norm();
                if (a.2.re - b.2.re).abs() >= 1e-9 * s {
                    b.2.re.partial_cmp(&a.2.re).unwrap()
                } else {
                    b.2.im.partial_cmp(&a.2.im).unwrap()
                }
            });
        }
        let max_rank = leftovers.iter().map(|l| l.len()).max().unwrap_or(0);
        groups = shared;
        group_value = shared_vals;
        for rank in 0..max_rank {
            let members: Vec<(usize, usize)> = leftovers
                .iter()
                .filter_map(|l| l.get(rank).map(|&(j, pos, _)| (j, pos)))
                .collect();
            let rep = leftovers
                .iter()
                .find_map(|l| l.get(rank).map(|m| m.2))
                .unwrap();
            groups.push(members);
            group_value.push(rep);
        }
    }

    // assemble symmetries with per-sample values
    let mut syms: Vec<Symmetry> = groups
        .iter()
        .map(|members| {
            let sources: Vec<usize> = members.iter().map(|&(j, _)| j).collect();
            let samples: Vec<(Complex64, Vec<Complex64>)> = path
                .iter()
                .zip(states.iter())
                .map(|(&k, st)| {
                    let vals = members
                        .iter()
                        .map(|&(j, pos)| st.nus[j][pos])
                        .collect::<Vec<_>>();
                    (k, vals)
                })
                .collect();
            let form = detect_linear(&samples);
            Symmetry {
                sources,
                samples,
                form,
                permutation: vec![],
            }
        })
        .collect();

    // identity first, then linear by descending coefficient, then sampled by
    // descending base value
    syms.sort_by(|a, b| {
        let key = |s: &Symmetry| -> (u8, f64, f64) {
            match s.form {
                SymmetryForm::Linear(c) if (c - Complex64::new(1.0, 0.0)).norm() < 1e-8 => {
                    (0, 0.0, 0.0)
                }
                SymmetryForm::Linear(c) => (1, -c.re, -c.im),
                SymmetryForm::Sampled => {
                    let v = s.samples[0].1[0];
                    (2, -v.re, -v.im)
                }
            }
        };
        key(a).partial_cmp(&key(b)).unwrap()
    });
    Ok((syms, base_branches))
}

fn detect_linear(samples: &[(Complex64, Vec<Complex64>)]) -> SymmetryForm {
    // least-squares fit nu = c k over all sources and samples, then verify
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (k, vals) in samples {
        for &v in vals {
            num += v * k.conj();
            den += k.norm_sqr();
        }
    }
    if den == 0.0 {
        return SymmetryForm::Sampled;
    }
    let c = num / den;
    for (k, vals) in samples {
        for &v in vals {
            if (v - c * k).norm() > 1e-8 * (1.0 + (c * k).norm()) {
                return SymmetryForm::Sampled;
            }
        }
    }
    SymmetryForm::Linear(c)
}

/// Finds the symmetries of the dispersion relation of a symbol matrix, with
/// the branch-permutation table each symmetry induces.
pub fn find_symmetries(m: &PolynomialMatrix, b: &BranchSet) -> Result<SymmetrySet> {
    let max_bp = b
        .branch_points()
        .iter()
        .map(|p| p.location.norm())
        .fold(0.0_f64, f64::max);
    let r0 = 2.0 * (1.0 + max_bp);
    let steps = 96usize;
    let path: Vec<Complex64> = (0..=steps)
        .map(|s| {
            let th = 2.0 * PI * (s as f64) / (steps as f64);
            Complex64::new(r0 * th.cos(), r0 * th.sin())
        })
        .collect();
    let base_branches = b.branches_at(path[0])?;
    let p = crate::dispersion::bivariate_char_poly(m);
    let (mut syms, base) = track_and_group(&p, &path, base_branches, false)?;
    // permutation table: match Omega_m(nu(k0)) = Omega_j(k0) per source branch
    let nb = base.len();
    for sym in syms.iter_mut() {
        let mut perm = vec![None; nb];
        for (si, &j) in sym.sources().to_vec().iter().enumerate() {
            let nu0 = sym.samples[0].1[si];
            let at_nu = b.branches_at(nu0)?;
            let target = base[j];
            for (mm, &w) in at_nu.iter().enumerate() {
                if (w - target).norm() < 1e-7 * (1.0 + target.norm()) {
                    perm[j] = Some(mm);
                    break;
                }
            }
        }
        sym.permutation = perm;
    }
    Ok(SymmetrySet { syms })
}

/// Finds symmetries directly from a bivariate dispersion polynomial when no
/// symbol matrix is available, tracked along the given k samples. Multivalued
/// symmetries (branch-dependent values) are reported as single families.
pub fn symmetries_from_dispersion(
    p: &BivariatePoly,
    samples: &[Complex64],
) -> Result<SymmetrySet> {
    if samples.is_empty() {
        return Err(UtmError::InvalidData("no k samples supplied".into()));
    }
    let mut base = roots_of(&p.omega_polynomial(samples[0]))?;
    if base.is_empty() {
        return Err(UtmError::InvalidData(
            "dispersion polynomial has no omega roots".into(),
        ));
    }
    sort_desc(&mut base);
    let (mut syms, base) = track_and_group(p, samples, base, true)?;
    // permutation by value matching against descending-sorted roots at nu0
    let nb = base.len();
    let k0 = samples[0];
    for sym in syms.iter_mut() {
        let mut perm = vec![None; nb];
        for (si, &j) in sym.sources().to_vec().iter().enumerate() {
            let nu0 = sym.samples[0].1[si];
            let mut at_nu = match roots_of(&p.omega_polynomial(nu0)) {
                Ok(r) => r,
                Err(_) => continue,
            };
            sort_desc(&mut at_nu);
            let target = roots_of(&p.omega_polynomial(k0))
                .ok()
                .and_then(|mut r| {
                    sort_desc(&mut r);
                    r.get(j).copied()
                });
            if let Some(target) = target {
                for (mm, &w) in at_nu.iter().enumerate() {
                    if (w - target).norm() < 1e-7 * (1.0 + target.norm()) {
                        perm[j] = Some(mm);
                        break;
                    }
                }
            }
        }
        sym.permutation = perm;
    }
    Ok(SymmetrySet { syms })
}
