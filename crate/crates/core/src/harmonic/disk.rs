//! Poincaré disk model of the hyperbolic plane.
//!
//! Tangent vectors are given in Euclidean coordinates; the metric at `z` is
//! `λ(z)²·|dz|²` with `λ(z) = 2/(1 − |z|²)`.

use num_complex::Complex64;

pub fn conformal_factor(z: Complex64) -> f64 {
    2.0 / (1.0 - z.norm_sqr())
}

/// `φ_a(z) = (z − a)/(1 − ā·z)`, the automorphism sending `a` to `0`.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// `e^{iθ}·φ_a(z)`.
pub fn automorphism(theta: f64, a: Complex64, z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, theta) * mobius(a, z)
}

/// `2·asinh(|z − w| / √((1 − |z|²)(1 − |w|²)))`, accurate at short range.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let gap = (z - w).norm();
    if gap == 0.0 {
        return 0.0;
    }
    let (rz, rw) = (z.norm(), w.norm());
    let denom = ((1.0 - rz) * (1.0 + rz) * (1.0 - rw) * (1.0 + rw)).sqrt();
    2.0 * (gap / denom).asinh()
}

/// Logarithm map `log_x(y)`: the tangent vector at `x` whose geodesic
/// reaches `y` at time 1.
pub fn log(x: Complex64, y: Complex64) -> Complex64 {
    let w = mobius(x, y);
    let r = w.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    w * ((1.0 - x.norm_sqr()) * r.atanh() / r)
}

/// Exponential map at `x`.
pub fn exp(x: Complex64, v: Complex64) -> Complex64 {
    let v0 = v / (1.0 - x.norm_sqr());
    let s = v0.norm();
    let w = if s == 0.0 { Complex64::new(0.0, 0.0) } else { v0 * (s.tanh() / s) };
    mobius(-x, w)
}

/// Point at fraction `t` along the geodesic from `x` to `y`.
pub fn geodesic(x: Complex64, y: Complex64, t: f64) -> Complex64 {
    exp(x, log(x, y) * t)
}
