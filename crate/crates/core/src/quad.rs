//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands over real
//! parameter intervals.

use num_complex::Complex64;
use std::collections::BinaryHeap;

/// Kronrod abscissae (positive half) for the 7-15 pair.
const XK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
/// Gauss weights for the embedded 7-point rule (nodes XK[1], XK[3], XK[5], XK[7]).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Integral value with an error estimate and a tolerance flag.
#[derive(Debug, Clone, Copy)]
pub struct QuadValue {
    pub value: Complex64,
    pub error: f64,
    pub tolerance_met: bool,
}

impl QuadValue {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            tolerance_met: true,
        }
    }

    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            error: 0.0,
            tolerance_met: true,
        }
    }

    pub fn accumulate(&mut self, other: &QuadValue) {
        self.value += other.value;
        self.error += other.error;
        self.tolerance_met &= other.tolerance_met;
    }
}

/// One G7-K15 evaluation over [a, b]; returns (K15 value, error estimate).
pub fn gk15<F>(f: &mut F, a: f64, b: f64) -> (Complex64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XK.iter().zip(WK.iter()).enumerate() {
        let (fl, fr);
        if x == 0.0 {
            fl = f(c);
            kron += wk * fl;
            gauss += WG[3] * fl;
            continue;
        }
        fl = f(c - h * x);
        fr = f(c + h * x);
        kron += wk * (fl + fr);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (fl + fr);
        }
    }
    kron *= h;
    gauss *= h;
    let diff = (kron - gauss).norm();
    // standard GK heuristic: sharper than |K - G| once converged
    let err = diff.min((200.0 * diff).powf(1.5));
    (kron, err)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive quadrature of f over [a, b] to absolute tolerance `tol`, seeded
/// with `seed` equal panels (use one panel per expected oscillation), bisecting
/// the worst panel until the summed error estimate meets the tolerance or the
/// panel budget runs out.
pub fn adaptive_quad<F>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    seed: usize,
    max_panels: usize,
) -> QuadValue
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return QuadValue::zero();
    }
    let seed = seed.clamp(1, max_panels.max(1));
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for s in 0..seed {
        let pa = a + (b - a) * (s as f64) / (seed as f64);
        let pb = a + (b - a) * ((s + 1) as f64) / (seed as f64);
        let (v, e) = gk15(f, pa, pb);
        total += v;
        total_err += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            error: e,
        });
    }
    let mut panels = seed;
    while total_err > tol && panels < max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        if worst.error == 0.0 {
            // every remaining panel is unrefinable
            heap.push(worst);
            break;
        }
        if (worst.b - worst.a).abs() < 1e-15 * (1.0 + worst.a.abs() + worst.b.abs()) {
            // cannot refine further; keep its contribution (and error) as is
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, m);
        let (v2, e2) = gk15(f, m, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
        panels += 1;
    }
    QuadValue {
        value: total,
        error: total_err.max(0.0),
        tolerance_met: total_err <= tol,
    }
}
