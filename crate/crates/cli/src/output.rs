//! CSV and report writers. CSV layout: x, t, then (re, im) per component,
//! then the per-point quadrature error estimate. Header row mandatory, LF
//! line endings, 17 significant digits so re-parsing is lossless.

use std::fmt::Write as _;
use utm_core::{Grid, SolutionField};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn solution_csv(grid: &Grid, field: &SolutionField, names: &[String]) -> String {
    let mut out = String::new();
    out.push_str("x,t");
    for name in names {
        let _ = write!(out, ",re({name}),im({name})");
    }
    out.push_str(",error\n");
    for (it, &t) in grid.ts.iter().enumerate() {
        for (ix, &x) in grid.xs.iter().enumerate() {
            let _ = write!(out, "{},{}", num(x), num(t));
            for comp in 0..names.len() {
                let v = field.value(ix, it, comp);
                let _ = write!(out, ",{},{}", num(v.re), num(v.im));
            }
            let _ = writeln!(out, ",{}", num(field.error(ix, it)));
        }
    }
    out
}

pub struct Agreement {
    pub max_disagreement: f64,
    pub failing: usize,
    pub total: usize,
}

pub fn compare_fields(
    grid: &Grid,
    a: &SolutionField,
    b: &SolutionField,
    ncomp: usize,
    point_tol: f64,
) -> Agreement {
    let mut max_disagreement = 0.0_f64;
    let mut failing = 0usize;
    let mut total = 0usize;
    for ix in 0..grid.xs.len() {
        for it in 0..grid.ts.len() {
            let mut d = 0.0_f64;
            for comp in 0..ncomp {
                d = d.max((a.value(ix, it, comp) - b.value(ix, it, comp)).norm());
            }
            max_disagreement = max_disagreement.max(d);
            if d > point_tol {
                failing += 1;
            }
            total += 1;
        }
    }
    Agreement {
        max_disagreement,
        failing,
        total,
    }
}
