//! Complex polynomials in one variable: arithmetic, root finding, and
//! recovery of coefficients from samples on a circle.

use crate::error::{Result, UtmError};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Polynomial with complex coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialScalar {
    coefficients: Vec<Complex64>,
}

impl PolynomialScalar {
    /// Builds a polynomial, trimming trailing coefficients that are exactly zero.
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last() == Some(&Complex64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(Complex64::new(0.0, 0.0));
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Trims coefficients whose magnitude is below `tol` times the largest one.
    pub fn trimmed(&self, tol: f64) -> Self {
        let max = self
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        if max == 0.0 {
            return Self::zero();
        }
        let mut coeffs = self.coefficients.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() < tol * max {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.norm() == 0.0)
    }

    pub fn eval(&self, k: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            acc = acc * k + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coefficients[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i as f64 + 1.0))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coefficients.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coefficients.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coefficients.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out =
            vec![Complex64::new(0.0, 0.0); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Substitutes `k -> s*k`, i.e. returns p(s k) as a polynomial in k.
    pub fn compose_scale(&self, s: Complex64) -> Self {
        let mut pow = Complex64::new(1.0, 0.0);
        Self::new(
            self.coefficients
                .iter()
                .map(|&c| {
                    let out = c * pow;
                    pow *= s;
                    out
                })
                .collect(),
        )
    }

    /// All complex roots, via the Aberth-Ehrlich simultaneous iteration with a
    /// Newton polish pass.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        roots_of(&self.coefficients)
    }
}

/// Roots of a polynomial given by ascending coefficients.
/// Roots via `roots_of` after rescaling the variable to the polynomial's
/// natural root radius. Characteristic polynomials at large spectral points
/// have lower-order coefficients many orders of magnitude above the (exact)
/// leading one, which the junk-stripping in `roots_of` would otherwise
/// misread as a degenerate leading term.
pub fn roots_of_balanced(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coefficients.len().saturating_sub(1);
    let lead = coefficients.last().copied().unwrap_or_default();
    if n == 0 || lead.norm() == 0.0 {
        return roots_of(coefficients);
    }
    let mut s = 0.0_f64;
    for (j, cj) in coefficients[..n].iter().enumerate() {
        if cj.norm() > 0.0 {
            s = s.max((cj.norm() / lead.norm()).powf(1.0 / ((n - j) as f64)));
        }
    }
    if !s.is_finite() || s <= 1.0 {
        return roots_of(coefficients);
    }
    // substitute w = s u and divide by s^n, keeping the polynomial monic-ish
    let scaled: Vec<Complex64> = coefficients
        .iter()
        .enumerate()
        .map(|(j, &cj)| cj * s.powi(j as i32 - n as i32))
        .collect();
    Ok(roots_of(&scaled)?.into_iter().map(|u| u * s).collect())
}

pub fn roots_of(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let max = coefficients.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(vec![]);
    }
    // strip negligible leading coefficients so near-degenerate polynomials do
    // not produce spurious huge roots
    let mut coeffs: Vec<Complex64> = coefficients.to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() < 1e-13 * max {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }

    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    // Cauchy-style root bound
    let bound = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);

    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };

    // initial guesses on a slightly irrational circle
    let r = 0.5 + 0.5 * bound;
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let th = 2.0 * PI * (j as f64) / (n as f64) + 0.41;
            Complex64::new(r * th.cos(), r * th.sin())
        })
        .collect();

    let tol = 1e-14 * (1.0 + bound);
    let max_iter = 200;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() < tol * tol {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        sum += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept if residuals are small anyway (multiple roots converge slowly)
        let worst = z.iter().map(|&zi| eval(zi).0.norm()).fold(0.0, f64::max);
        if worst > 1e-8 * (1.0 + bound.powi(n as i32)) {
            return Err(UtmError::RootFinderDiverged {
                iterations: max_iter,
            });
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 1e-300 {
                let step = p / dp;
                if step.norm() < 0.5 * (1.0 + zi.norm()) {
                    *zi -= step;
                }
            }
        }
    }
    Ok(z)
}

/// Recovers the coefficients of a degree-`<= max_degree` polynomial from its
/// values, by sampling `f` on a circle of radius `radius` and taking a
/// discrete Fourier transform.
pub fn coefficients_from_samples<F>(f: F, max_degree: usize, radius: f64) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let m = max_degree + 1;
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let th = 2.0 * PI * (j as f64) / (m as f64);
            f(Complex64::new(radius * th.cos(), radius * th.sin()))
        })
        .collect();
    (0..m)
        .map(|deg| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &s) in samples.iter().enumerate() {
                let th = -2.0 * PI * (deg as f64) * (j as f64) / (m as f64);
                acc += s * Complex64::new(th.cos(), th.sin());
            }
            acc / (m as f64) / radius.powi(deg as i32)
        })
        .collect()
}

/// Bivariate polynomial P(k, omega), stored as polynomials in k per power of
/// omega.
#[derive(Debug, Clone)]
pub struct BivariatePoly {
    /// index = power of omega; each entry is a polynomial in k
    omega_coeffs: Vec<PolynomialScalar>,
}

impl BivariatePoly {
    pub fn new(omega_coeffs: Vec<PolynomialScalar>) -> Self {
        let mut omega_coeffs = omega_coeffs;
        while omega_coeffs.len() > 1 && omega_coeffs.last().map(|p| p.is_zero()) == Some(true) {
            omega_coeffs.pop();
        }
        Self { omega_coeffs }
    }

    /// Degree in omega.
    pub fn omega_degree(&self) -> usize {
        self.omega_coeffs.len() - 1
    }

    /// Degree in k.
    pub fn k_degree(&self) -> usize {
        self.omega_coeffs
            .iter()
            .map(|p| if p.is_zero() { 0 } else { p.degree() })
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, k: Complex64, omega: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in self.omega_coeffs.iter().rev() {
            acc = acc * omega + p.eval(k);
        }
        acc
    }

    /// Ascending coefficients in omega of P(k, .) for fixed k.
    pub fn omega_polynomial(&self, k: Complex64) -> Vec<Complex64> {
        self.omega_coeffs.iter().map(|p| p.eval(k)).collect()
    }

    /// Ascending coefficients in the first argument of P(., omega) for fixed omega.
    pub fn k_polynomial(&self, omega: Complex64) -> Vec<Complex64> {
        let kd = self.k_degree();
        let mut out = vec![Complex64::new(0.0, 0.0); kd + 1];
        let mut wp = Complex64::new(1.0, 0.0);
        for p in &self.omega_coeffs {
            for (d, &c) in p.coefficients().iter().enumerate() {
                out[d] += c * wp;
            }
            wp *= omega;
        }
        out
    }

    pub fn d_k(&self) -> Self {
        Self::new(self.omega_coeffs.iter().map(|p| p.derivative()).collect())
    }

    pub fn d_omega(&self) -> Self {
        if self.omega_coeffs.len() <= 1 {
            return Self::new(vec![PolynomialScalar::zero()]);
        }
        Self::new(
            self.omega_coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, p)| p.scale(Complex64::new(i as f64 + 1.0, 0.0)))
                .collect(),
        )
    }
}
