//! Hurwitz ζ(s, a) by Euler–Maclaurin with the term count scaled to |Im s|:
//!
//! ζ(s,a) = Σ_{m<N} (m+a)^{-s} + (N+a)^{1-s}/(s-1) + (N+a)^{-s}/2
//!          + Σ_j B_{2j}/(2j)! (s)_{2j-1} (N+a)^{-s-2j+1} + R_J.
//!
//! With N ≈ 0.6|t| + 24 and J ≤ 14 the Bernoulli terms decrease by a factor
//! ((|s|+2j)/(2πN))² < 0.08 each, leaving R_J far below the 1e-9 relative
//! target everywhere in the validated strip.

use num_complex::Complex64;

use super::ZeroError;
use crate::bernoulli::B2J_OVER_FACT;

/// Validated height for the Hurwitz evaluator.
pub const HURWITZ_MAX_IM: f64 = 3.0e4;

pub(crate) fn em_terms_for(t_abs: f64) -> usize {
    24 + (0.6 * t_abs).ceil() as usize
}

/// Core Euler–Maclaurin pass with a caller-chosen main-sum length.
pub(crate) fn hurwitz_core(s: Complex64, a: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for m in 0..n {
        acc += (-s * (m as f64 + a).ln()).exp();
    }
    acc + hurwitz_tail(s, a, n)
}

/// Boundary + Bernoulli corrections at the truncation point N.
pub(crate) fn hurwitz_tail(s: Complex64, a: f64, n: usize) -> Complex64 {
    let w = n as f64 + a;
    let ln_w = w.ln();
    let w_pow_ms = (-s * ln_w).exp(); // w^{-s}
    let mut acc = w_pow_ms * w / (s - 1.0) + 0.5 * w_pow_ms;

    let mut poch = s; // (s)_{2j-1}, j = 1
    let mut wpw = w_pow_ms / w; // w^{-s-2j+1}, j = 1
    let inv_w2 = 1.0 / (w * w);
    let mut prev = f64::INFINITY;
    for (j, &coef) in B2J_OVER_FACT.iter().enumerate() {
        let term = coef * poch * wpw;
        let mag = term.norm();
        if mag > prev {
            break;
        }
        prev = mag;
        acc += term;
        if mag < 1e-18 * (acc.norm() + 1.0) {
            break;
        }
        poch *= (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64);
        wpw *= inv_w2;
    }
    acc
}

/// ζ(s, a) for 0 < a ≤ 1 in the validated strip 0 < Re s ≤ 3,
/// |Im s| ≤ 3·10⁴, s ≠ 1. Relative accuracy target 1e-9.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64, ZeroError> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(ZeroError::BadHurwitzShift(a));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(ZeroError::PoleAtOne);
    }
    if !(s.re > 0.0 && s.re <= 3.0) || s.im.abs() > HURWITZ_MAX_IM {
        return Err(ZeroError::OutOfValidatedStrip { re: s.re, im: s.im });
    }
    Ok(hurwitz_core(s, a, em_terms_for(s.im.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::zeta_em;
    use std::f64::consts::PI;

    #[test]
    fn reduces_to_zeta_at_a_one() {
        for s in [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(1.5, 8.0)] {
            let h = hurwitz_zeta(s, 1.0).unwrap();
            let z = zeta_em(s, 0).unwrap();
            assert!((h - z).norm() < 1e-10 * z.norm(), "s={s}");
        }
    }

    #[test]
    fn half_shift_closed_form() {
        // ζ(2, 1/2) = π²/2 (sum over odd integers scaled by 4)
        let h = hurwitz_zeta(Complex64::new(2.0, 0.0), 0.5).unwrap();
        assert!((h.re - PI * PI / 2.0).abs() < 1e-12 && h.im.abs() < 1e-13);
    }

    #[test]
    fn high_line_matches_direct_summation() {
        // Independent route at s = 1/2 + 100i, a = 1/3: a long direct sum
        // with only the elementary integral + half-term corrections (no
        // Bernoulli machinery), N = 2e6 ⇒ error O(|s| N^{-3/2}) ~ 4e-8.
        let s = Complex64::new(0.5, 100.0);
        let a = 1.0 / 3.0;
        let n = 2_000_000usize;
        let mut direct = Complex64::ZERO;
        for m in 0..n {
            direct += (-s * (m as f64 + a).ln()).exp();
        }
        let w = n as f64 + a;
        let w_ms = (-s * w.ln()).exp();
        direct += w_ms * w / (s - 1.0) + 0.5 * w_ms;
        let em = hurwitz_zeta(s, a).unwrap();
        assert!(
            (em - direct).norm() < 1e-6,
            "EM {em} vs direct {direct}, diff {:e}",
            (em - direct).norm()
        );
    }

    #[test]
    fn input_validation() {
        assert!(hurwitz_zeta(Complex64::new(1.0, 0.0), 0.5).is_err());
        assert!(hurwitz_zeta(Complex64::new(2.0, 0.0), 0.0).is_err());
        assert!(hurwitz_zeta(Complex64::new(2.0, 0.0), 1.5).is_err());
        assert!(hurwitz_zeta(Complex64::new(-1.0, 0.0), 0.5).is_err());
        assert!(hurwitz_zeta(Complex64::new(3.5, 0.0), 0.5).is_err());
        assert!(hurwitz_zeta(Complex64::new(0.5, 4.0e4), 0.5).is_err());
    }
}
