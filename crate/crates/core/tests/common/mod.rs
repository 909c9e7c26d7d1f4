#![allow(dead_code)]

use std::f64::consts::PI;

use etaquot::etaq::{CuspContext, PartitionSpec};
use etaquot::exact::{p1, p2, Rational};
use num_complex::Complex64;

pub fn ecx(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * z).exp()
}

pub fn e_f(x: f64) -> Complex64 {
    ecx(Complex64::new(x, 0.0))
}

/// Terms needed so that `|q^{x·n}|` drops below `1e-18` at `Im w`.
fn cutoff(w: Complex64, x: f64) -> usize {
    (42.0 / (2.0 * PI * w.im * x)).ceil() as usize + 1
}

/// `F_S(w) = e(ord·w)·∏_{ℓ ≡ ±g}(1 + e(ℓw))`, summed in logarithms.
pub fn f_direct(spec: &PartitionSpec, w: Complex64) -> Complex64 {
    let mut log = Complex64::new(0.0, 2.0 * PI) * w * spec.ord().to_f64();
    for l in 1..cutoff(w, 1.0) as u64 {
        if spec.allows(l) {
            log += (Complex64::new(1.0, 0.0) + ecx(w * l as f64)).ln();
        }
    }
    log.exp()
}

/// `α_δ(g, h)` in floating point.
pub fn alpha_f(delta: i64, g: i64, h: i64) -> Complex64 {
    if g.rem_euclid(delta) == 0 && h.rem_euclid(delta) != 0 {
        let p = p1(&Rational::new(h, delta)).to_f64();
        (Complex64::new(1.0, 0.0) - e_f(-(h as f64) / delta as f64)) * e_f(p / 2.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// `η^{(s)}_{g,h}(w)` from its defining product.
pub fn eta_s_direct(delta: i64, g: i64, h: i64, w: Complex64) -> Complex64 {
    let lead = p2(&Rational::new(g, delta)).to_f64() / 2.0;
    let mut log = Complex64::new(0.0, 2.0 * PI) * w * lead;
    let one = Complex64::new(1.0, 0.0);
    for m in 1..cutoff(w, 1.0 / delta as f64) as i64 {
        let x = ecx(w * (m as f64 / delta as f64));
        if (m - g).rem_euclid(delta) == 0 {
            log += (one - e_f(h as f64 / delta as f64) * x).ln();
        }
        if (m + g).rem_euclid(delta) == 0 {
            log += (one - e_f(-(h as f64) / delta as f64) * x).ln();
        }
    }
    alpha_f(delta, g, h) * log.exp()
}

pub fn mobius(ctx: &CuspContext, tau: Complex64) -> Complex64 {
    (tau * ctx.a as f64 + ctx.b as f64) / (tau * ctx.c as f64 + ctx.d as f64)
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}
