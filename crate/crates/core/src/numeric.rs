//! Small numeric helpers shared across the crate, mostly stable evaluation of
//! divided differences that are removable at branch collisions.

use num_complex::Complex64;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// sinh(z)/z, series for small |z|.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        ONE + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0
    } else {
        z.sinh() / z
    }
}

/// (exp(z) - 1)/z, series for small |z|.
pub fn expm1c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        ONE + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - ONE) / z
    }
}

/// True when the naive divided-difference quotient is safe: the exponents are
/// far enough apart that there is no cancellation, and the half-difference
/// form below would overflow sinh/cosh for widely spread real parts.
fn dd_direct(d: Complex64, t: f64) -> bool {
    (d * t).norm() > 1.0
}

/// (e^{-w1 t} - e^{-w2 t}) / (w1 - w2), stable as w1 -> w2.
pub fn exp_dd(w1: Complex64, w2: Complex64, t: f64) -> Complex64 {
    let m = (w1 + w2) * 0.5;
    let d = (w1 - w2) * 0.5;
    if dd_direct(d, t) {
        return ((-w1 * t).exp() - (-w2 * t).exp()) / (w1 - w2);
    }
    // e^{-mt} (e^{-dt} - e^{dt}) / (2d) = -t e^{-mt} sinh(dt)/(dt)
    (-m * t).exp() * (-t) * sinhc(d * t)
}

/// (w1 e^{-w1 t} - w2 e^{-w2 t}) / (w1 - w2), stable as w1 -> w2.
pub fn wexp_dd(w1: Complex64, w2: Complex64, t: f64) -> Complex64 {
    let m = (w1 + w2) * 0.5;
    let d = (w1 - w2) * 0.5;
    if dd_direct(d, t) {
        return (w1 * (-w1 * t).exp() - w2 * (-w2 * t).exp()) / (w1 - w2);
    }
    // e^{-mt} [cosh(dt) - m t sinh(dt)/(dt)]
    (-m * t).exp() * ((d * t).cosh() - m * t * sinhc(d * t))
}

/// (w2 e^{-w1 t} - w1 e^{-w2 t}) / (w1 - w2), stable as w1 -> w2.
/// Equals m*exp_dd - cosh part: w2 e^{-w1t} - w1 e^{-w2t}
///   = (m - d') with w1 = m+d', w2 = m-d', d' = (w1-w2)/2:
///   (m-d')e^{-w1t} - (m+d')e^{-w2t}.
pub fn xexp_dd(w1: Complex64, w2: Complex64, t: f64) -> Complex64 {
    let m = (w1 + w2) * 0.5;
    let d = (w1 - w2) * 0.5;
    if dd_direct(d, t) {
        return (w2 * (-w1 * t).exp() - w1 * (-w2 * t).exp()) / (w1 - w2);
    }
    // numerator = m(e^{-w1t}-e^{-w2t}) - d(e^{-w1t}+e^{-w2t})
    //           = e^{-mt} [ -2 m sinh(dt) - 2 d cosh(dt) ]
    // divide by (w1 - w2) = 2d:
    (-m * t).exp() * (-m * t * sinhc(d * t) - (d * t).cosh())
}

/// Relative distance between two complex values on the scale of their sizes.
pub fn rel_dist(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + a.norm() + b.norm())
}
