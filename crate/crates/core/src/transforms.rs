//! Spectral transforms: half-line Fourier transforms of initial data, time
//! transforms of boundary data, and inverse transforms along contours.

use crate::contour::ContourPath;
use crate::error::{Result, UtmError};
use crate::numeric::{expm1c, I};
use crate::quad::{adaptive_quad, QuadValue};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Decay information for a half-line function.
#[derive(Debug, Clone, Copy)]
pub enum DecayBound {
    /// |f(x)| <= c * exp(-gamma * x)
    Exponential { c: f64, gamma: f64 },
    /// |f(x)| <= c / (1 + x)^power, power > 1
    Algebraic { c: f64, power: f64 },
    /// f vanishes beyond x_max
    Compact { x_max: f64 },
}

/// Closed-form transform hint: f(x) = sum of c * x^p * exp(-gamma x).
#[derive(Debug, Clone)]
pub struct PolyExpTerm {
    pub c: f64,
    pub p: u32,
    pub gamma: f64,
}

type RealToComplex = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function on the half line x >= 0 with a verified decay bound; the data
/// Q_0 of the initial-value side of the problem.
#[derive(Clone)]
pub struct HalfLineFunction {
    eval: RealToComplex,
    decay: DecayBound,
    piecewise: bool,
    hint: Option<Vec<PolyExpTerm>>,
}

impl std::fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfLineFunction")
            .field("decay", &self.decay)
            .field("piecewise", &self.piecewise)
            .field("hint", &self.hint)
            .finish()
    }
}

impl HalfLineFunction {
    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_| Complex64::new(0.0, 0.0)),
            decay: DecayBound::Compact { x_max: 0.0 },
            piecewise: false,
            hint: Some(vec![]),
        }
    }

    /// c * exp(-gamma x), gamma > 0.
    pub fn exp_decay(c: f64, gamma: f64) -> Self {
        Self::poly_exp(vec![PolyExpTerm { c, p: 0, gamma }])
    }

    /// Sum of c x^p exp(-gamma x) terms with closed-form transform.
    pub fn poly_exp(terms: Vec<PolyExpTerm>) -> Self {
        let mut c_bound = 0.0_f64;
        let mut gamma_d = f64::INFINITY;
        for t in &terms {
            assert!(t.gamma > 0.0, "poly-exp terms must decay");
            gamma_d = gamma_d.min(0.9 * t.gamma);
        }
        if !gamma_d.is_finite() {
            return Self::zero();
        }
        for t in &terms {
            // sup_x x^p e^{-(gamma - gamma_d) x} = (p / (e (gamma - gamma_d)))^p
            let margin = t.gamma - gamma_d;
            let peak = if t.p == 0 {
                1.0
            } else {
                (t.p as f64 / (std::f64::consts::E * margin)).powi(t.p as i32)
            };
            c_bound += t.c.abs() * peak;
        }
        let terms_for_eval = terms.clone();
        Self {
            eval: Arc::new(move |x| {
                let mut v = 0.0;
                for t in &terms_for_eval {
                    v += t.c * x.powi(t.p as i32) * (-t.gamma * x).exp();
                }
                Complex64::new(v, 0.0)
            }),
            decay: DecayBound::Exponential {
                c: c_bound,
                gamma: gamma_d,
            },
            piecewise: false,
            hint: Some(terms),
        }
    }

    /// a * exp(-(x - x0)^2 / (2 sigma^2)).
    pub fn gaussian(a: f64, x0: f64, sigma: f64) -> Self {
        assert!(sigma > 0.0);
        let c = a.abs() * ((x0 / sigma) + 0.5).exp();
        Self {
            eval: Arc::new(move |x| {
                Complex64::new(a * (-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0)
            }),
            decay: DecayBound::Exponential {
                c,
                gamma: 1.0 / sigma,
            },
            piecewise: false,
            hint: None,
        }
    }

    /// Piecewise-linear interpolation of samples, zero beyond the last node.
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(UtmError::InvalidData(
                "tabulated data needs matching xs/ys with at least 2 nodes".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(UtmError::InvalidData(
                "tabulated xs must be strictly increasing".into(),
            ));
        }
        let x_max = *xs.last().unwrap();
        Ok(Self {
            eval: Arc::new(move |x| {
                if x < xs[0] || x > x_max {
                    return Complex64::new(0.0, 0.0);
                }
                let i = xs.partition_point(|&v| v <= x).min(xs.len() - 1);
                let (i0, i1) = (i.saturating_sub(1), i);
                if i1 == i0 {
                    return Complex64::new(ys[i0], 0.0);
                }
                let t = (x - xs[i0]) / (xs[i1] - xs[i0]);
                Complex64::new(ys[i0] + t * (ys[i1] - ys[i0]), 0.0)
            }),
            decay: DecayBound::Compact { x_max },
            piecewise: true,
            hint: None,
        })
    }

    pub fn from_fn<F>(f: F, decay: DecayBound, piecewise: bool) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            decay,
            piecewise,
            hint: None,
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval)(x)
    }

    pub fn decay(&self) -> DecayBound {
        self.decay
    }

    pub fn is_piecewise(&self) -> bool {
        self.piecewise
    }

    pub fn transform_hint(&self) -> Option<&[PolyExpTerm]> {
        self.hint.as_deref()
    }

    /// The largest Im k for which the half-line transform converges.
    pub fn decay_rate(&self) -> f64 {
        match self.decay {
            DecayBound::Exponential { gamma, .. } => gamma,
            DecayBound::Algebraic { .. } => 0.0,
            DecayBound::Compact { .. } => f64::INFINITY,
        }
    }

    /// Checks the decay bound on a sample grid: no sampled |f(x)| may exceed
    /// 1.05 times the bound.
    pub fn verify_decay(&self, samples: usize) -> bool {
        let x_hi = match self.decay {
            DecayBound::Exponential { gamma, .. } => 20.0 / gamma,
            DecayBound::Algebraic { .. } => 1e4,
            DecayBound::Compact { x_max } => x_max.max(1.0) * 1.5,
        };
        (0..samples).all(|i| {
            let x = x_hi * (i as f64 + 0.5) / (samples as f64);
            let bound = match self.decay {
                DecayBound::Exponential { c, gamma } => c * (-gamma * x).exp(),
                DecayBound::Algebraic { c, power } => c / (1.0 + x).powf(power),
                DecayBound::Compact { x_max } => {
                    if x > x_max {
                        0.0
                    } else {
                        return true;
                    }
                }
            };
            self.eval(x).norm() <= 1.05 * bound + 1e-300
        })
    }
}

/// Closed-form time-transform hint.
#[derive(Debug, Clone, Copy)]
pub enum TimeHint {
    /// g(s) = c * exp(-gamma s)
    ExpDecay { c: f64, gamma: f64 },
}

/// Boundary data on [0, T].
#[derive(Clone)]
pub struct TimeSignal {
    eval: RealToComplex,
    derivative: Option<RealToComplex>,
    horizon: f64,
    hint: Option<TimeHint>,
}

impl std::fmt::Debug for TimeSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeSignal")
            .field("horizon", &self.horizon)
            .field("hint", &self.hint)
            .finish()
    }
}

impl TimeSignal {
    pub fn zero(horizon: f64) -> Self {
        Self::exp_decay(0.0, 0.0, horizon)
    }

    pub fn constant(c: f64, horizon: f64) -> Self {
        Self::exp_decay(c, 0.0, horizon)
    }

    /// c * exp(-gamma t).
    pub fn exp_decay(c: f64, gamma: f64, horizon: f64) -> Self {
        Self {
            eval: Arc::new(move |s| Complex64::new(c * (-gamma * s).exp(), 0.0)),
            derivative: Some(Arc::new(move |s| {
                Complex64::new(-gamma * c * (-gamma * s).exp(), 0.0)
            })),
            horizon,
            hint: Some(TimeHint::ExpDecay { c, gamma }),
        }
    }

    pub fn from_fn<F>(f: F, horizon: f64) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            derivative: None,
            horizon,
            hint: None,
        }
    }

    pub fn with_derivative<F>(mut self, df: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(df));
        self
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        (self.eval)(s)
    }

    /// d/ds of the signal, if known (used by the finite-difference oracle).
    pub fn derivative_at(&self, s: f64) -> Option<Complex64> {
        self.derivative.as_ref().map(|d| d(s))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn hint(&self) -> Option<TimeHint> {
        self.hint
    }
}

/// Spectral-domain function with a validity tag.
#[derive(Clone)]
pub struct SpectralFunction {
    eval: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    tag: DomainTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    LowerHalf,
    UpperHalf,
    Entire,
    ContourOnly,
}

impl SpectralFunction {
    pub fn new<F>(f: F, tag: DomainTag) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            tag,
        }
    }

    pub fn eval(&self, k: Complex64) -> Complex64 {
        (self.eval)(k)
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }
}

/// Half-line Fourier transform: integral of exp(-i k x) f(x) over x >= 0.
pub fn half_line_ft(f: &HalfLineFunction, k: Complex64, tol: f64) -> Result<QuadValue> {
    // convergence: |e^{-ikx}| = e^{Im k * x} must lose to the decay of f
    let gamma_d = f.decay_rate();
    if k.im > gamma_d {
        return Err(UtmError::TransformDivergent {
            im_k: k.im,
            decay: gamma_d,
        });
    }
    if let Some(terms) = f.transform_hint() {
        // sum of c p! / (gamma + i k)^{p+1}
        let mut v = Complex64::new(0.0, 0.0);
        for t in terms {
            let mut fact = 1.0;
            for m in 2..=t.p {
                fact *= m as f64;
            }
            let denom = (Complex64::new(t.gamma, 0.0) + I * k).powu(t.p + 1);
            v += t.c * fact / denom;
        }
        return Ok(QuadValue::exact(v));
    }
    let x_max = match f.decay() {
        DecayBound::Exponential { c, gamma } => {
            let g_eff = gamma - k.im;
            if g_eff <= 1e-12 {
                return Err(UtmError::TransformDivergent {
                    im_k: k.im,
                    decay: gamma,
                });
            }
            ((4.0 * c.max(1.0) / tol).ln() / g_eff).max(1.0)
        }
        DecayBound::Algebraic { c, power } => {
            if k.im > 0.0 {
                return Err(UtmError::TransformDivergent {
                    im_k: k.im,
                    decay: 0.0,
                });
            }
            if power <= 1.0 {
                return Err(UtmError::NonDecayingTail { radius: 0.0 });
            }
            ((4.0 * c.max(1.0) / tol).powf(1.0 / (power - 1.0))).clamp(1.0, 1e8)
        }
        DecayBound::Compact { x_max } => x_max,
    };
    if x_max == 0.0 {
        return Ok(QuadValue::zero());
    }
    let osc = k.re.abs().max(0.5);
    let seed = ((x_max * osc / (2.0 * PI)).ceil() as usize).clamp(1, 4096);
    let mut integrand = |x: f64| (-I * k * x).exp() * f.eval(x);
    let mut q = adaptive_quad(&mut integrand, 0.0, x_max, tol / 2.0, seed, 50_000);
    // fold the truncation tail into the error estimate
    let tail = match f.decay() {
        DecayBound::Exponential { c, gamma } => {
            let g_eff = gamma - k.im;
            c * (-g_eff * x_max).exp() / g_eff
        }
        DecayBound::Algebraic { c, power } => {
            c / ((power - 1.0) * (1.0 + x_max).powf(power - 1.0))
        }
        DecayBound::Compact { .. } => 0.0,
    };
    q.error += tail;
    q.tolerance_met &= q.error <= tol;
    Ok(q)
}

/// Time transform: integral of exp(Omega s) g(s) over s in [0, t].
pub fn time_transform(g: &TimeSignal, omega: Complex64, t: f64, tol: f64) -> QuadValue {
    debug_assert!(t >= 0.0 && t <= g.horizon() + 1e-12);
    if t == 0.0 {
        return QuadValue::zero();
    }
    if let Some(TimeHint::ExpDecay { c, gamma }) = g.hint() {
        // c (e^{(Omega - gamma) t} - 1) / (Omega - gamma), stable at collisions
        let z = omega - Complex64::new(gamma, 0.0);
        return QuadValue::exact(c * t * expm1c(z * t));
    }
    let osc = omega.norm().max(0.5);
    let seed = ((t * osc / (2.0 * PI)).ceil() as usize).clamp(1, 4096);
    let mut integrand = |s: f64| (omega * s).exp() * g.eval(s);
    adaptive_quad(&mut integrand, 0.0, t, tol, seed, 50_000)
}

/// Inverse transform (1/2 pi) * integral over the path of exp(i k x) F(k) dk,
/// with the truncation radius grown by doubling until the tail increments fall
/// below the tolerance.
pub fn inverse_contour(
    f: &SpectralFunction,
    path: &ContourPath,
    x: f64,
    _t: f64,
    tol: f64,
) -> Result<QuadValue> {
    let integrand = move |k: Complex64| (I * k * x).exp() * f.eval(k) / (2.0 * PI);
    let osc = x.abs().max(0.5);
    let mut q = path.integrate(&integrand, tol / 2.0, osc);

    // grow the tails
    let mut radius = path.truncation_radius();
    let mut prev_inc = f64::INFINITY;
    let mut stale = 0usize;
    let mut small_in_a_row = 0usize;
    loop {
        let target = radius * 2.0;
        let ext = match path.tail_extensions_between(radius, target) {
            Some(e) => e,
            None => break, // closed or arc-terminated path: nothing to extend
        };
        let mut inc_val = Complex64::new(0.0, 0.0);
        let mut inc_err = 0.0;
        for piece in ext {
            let p = piece.integrate(&integrand, tol / 8.0, osc);
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
        if inc >= prev_inc * 0.95 {
            stale += 1;
            if stale >= 3 {
                return Err(UtmError::NonDecayingTail { radius });
            }
        } else {
            stale = 0;
        }
        prev_inc = inc.max(1e-300);
        if radius > 4e7 {
            q.error += inc;
            q.tolerance_met = false;
            break;
        }
    }
    q.tolerance_met &= q.error <= tol;
    Ok(q)
}
