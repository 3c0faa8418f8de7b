//! Closed-form components of the conjectured two-point correlation function
//!
//!   R₂(ε) = d̄²(E) + R₂^{diag}(ε) + R₂^{off}(ε)
//!
//! for the critical-line zeros of an L-function with primitive character of
//! modulus k at height E. The diagonal part is
//!
//!   R₂^{diag}(ε) = −(1/4π²) ∂²/∂ε² ln[ |ζ(1+iε)|² Φ^{diag}(ε) Ψ^{diag}(ε,k) ],
//!
//! with Φ^{diag}(ε) = ∏_p exp(2 Σ_{m≥1} (1−m)/(m²p^m) · cos(m ε ln p)) (the
//! m = 1 term vanishes identically) and
//! Ψ^{diag}(ε,k) = exp(−Σ_{p|k} Σ_{m≥1} e^{imε ln p}/(m²p^m) + c.c.).
//! The off-diagonal part is
//!
//!   R₂^{off}(ε) = (1/4π²) e^{iε ln(Ek/2π)} |ζ(1+iε)|² Φ^{off}(ε) Ψ^{off}(ε,k) + c.c.,
//!
//! with Φ^{off}(ε) = ∏_p (1 − (p^{iε}−1)²/(p−1)²) and
//! Ψ^{off}(ε,k) = ∏_{p|k} (1 + (p^{iε/2}−p^{−iε/2})²/(p−p^{−iε}))^{−1}.
//!
//! Everything depends on the character only through k, so the interface
//! takes the modulus (factored). Second derivatives are assembled
//! analytically: term-wise for the prime sums, and through
//! −2 Re[ζ″/ζ − (ζ′/ζ)²] for the |ζ|² factor; finite differences survive
//! only as a test oracle.

mod zeta;

pub use zeta::{zeta_em, zeta_with_derivatives, ZETA_MAX_IM};

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, FactoredInt, PrimeTable};

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("zeta has a pole at s = 1")]
    PoleAtOne,
    #[error("{what}")]
    OutOfValidatedRange { what: &'static str },
    #[error("derivative order {0} not supported (max 2)")]
    BadDerivativeOrder(u8),
    #[error("kE = {0} must exceed 2π for the mean density")]
    DensityDomain(f64),
    #[error("ε = 0 is singular for this component")]
    EpsZero,
    #[error("prime cutoff {cutoff} out of range (min {min}, table limit {limit})")]
    BadPrimeCutoff { cutoff: u64, min: u64, limit: u64 },
    #[error("ε grid must be finite and ascending")]
    BadGrid,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Minimum admissible Euler-product cutoff.
pub const MIN_PRIME_CUTOFF: u64 = 1_000;

/// Mean density of zeros d̄(E) = (1/2π) ln(kE/2π); requires kE > 2π.
pub fn mean_density(e_height: f64, modulus: u64) -> Result<f64, CorrError> {
    let ke = modulus as f64 * e_height;
    if !(ke > TAU) {
        return Err(CorrError::DensityDomain(ke));
    }
    Ok((ke / TAU).ln() / TAU)
}

/// GUE/CUE two-point correlation 1 − (sin πx / πx)², continued by 0 at x = 0.
pub fn gue_r2(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let px = PI * x;
    let s = px.sin() / px;
    1.0 - s * s
}

fn check_cutoff(prime_cutoff: u64, table: &PrimeTable) -> Result<(), CorrError> {
    if prime_cutoff < MIN_PRIME_CUTOFF || prime_cutoff > table.limit() {
        return Err(CorrError::BadPrimeCutoff {
            cutoff: prime_cutoff,
            min: MIN_PRIME_CUTOFF,
            limit: table.limit(),
        });
    }
    Ok(())
}

/// Simpson rule over [a, a + span] with n steps (n even).
fn simpson(a: f64, span: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = span / n as f64;
    let mut acc = f(a) + f(a + span);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Integration window (in u = ln t) for the prime-density tail integrals;
/// e^{-u} has decayed below 3e-20 relative to the left endpoint. The step
/// resolves the cos(mεu) oscillation for |ε| well past the |ε| ≤ 5 working
/// range (the tail magnitude itself is ≤ 1e-4 even at cutoff 10³).
const TAIL_SPAN: f64 = 45.0;
const TAIL_STEPS: usize = 1440;

/// Prime-density continuation of ln Φ^{off} beyond the cutoff:
/// Σ_{p>X} ln(1 + 4sin²(εlnp/2)e^{iεlnp}/(p-1)²)
///   ≈ ∫_{ln X}^∞ 4 sin²(εu/2) e^{iεu} e^{-u}/u du,
/// the dt/ln t prime density in u = ln t. The neglected pieces (per-prime
/// O(p^{-3}) and the π-vs-li fluctuation) are below 1e-9 at X ≥ 10³.
fn phi_off_log_tail(eps: f64, prime_cutoff: u64) -> Complex64 {
    let l = (prime_cutoff as f64).ln();
    let re = simpson(l, TAIL_SPAN, TAIL_STEPS, |u| {
        let s = (eps * u / 2.0).sin();
        4.0 * s * s * (eps * u).cos() * (-u).exp() / u
    });
    let im = simpson(l, TAIL_SPAN, TAIL_STEPS, |u| {
        let s = (eps * u / 2.0).sin();
        4.0 * s * s * (eps * u).sin() * (-u).exp() / u
    });
    Complex64::new(re, im)
}

/// Prime-density continuation of (ln Φ^{diag}, ∂²ε ln Φ^{diag}) beyond the
/// cutoff, keeping the m = 2 and m = 3 inner terms (m ≥ 4 is < 1e-18 there):
/// ln-part Σ_{m∈{2,3}} 2(1−m)/m² ∫ cos(mεu) e^{-(m-1)u}/u du and the second
/// derivative with the extra −(mu)² factor.
fn phi_diag_log_tail(eps: f64, prime_cutoff: u64, m_cutoff: u32) -> (f64, f64) {
    let l = (prime_cutoff as f64).ln();
    let mut log = 0.0;
    let mut d2 = 0.0;
    for m in 2..=3u32.min(m_cutoff) {
        let mf = m as f64;
        let c = 2.0 * (1.0 - mf) / (mf * mf);
        log += c * simpson(l, TAIL_SPAN, TAIL_STEPS, |u| {
            (mf * eps * u).cos() * (-(mf - 1.0) * u).exp() / u
        });
        d2 -= c * simpson(l, TAIL_SPAN, TAIL_STEPS, |u| {
            (mf * u) * (mf * u) * (mf * eps * u).cos() * (-(mf - 1.0) * u).exp() / u
        });
    }
    (log, d2)
}

/// Inner m-sum for one prime of the diagonal factors. Returns
/// (Σ c_m x^m cos(mθ)/m², Σ c_m x^m ln²p m² cos(mθ)/m²·(-1)... ) packed as
/// the (log, d²log) contribution, with c_m the supplied per-m weight.
fn diag_prime_sums(
    p: u64,
    eps: f64,
    m_cutoff: u32,
    weight: impl Fn(u32) -> f64,
) -> (f64, f64) {
    let lp = (p as f64).ln();
    let theta = eps * lp;
    let x = 1.0 / p as f64;
    let mut xm = 1.0;
    let mut log = 0.0;
    let mut d2 = 0.0;
    for m in 1..=m_cutoff {
        xm *= x;
        let c = weight(m);
        if c == 0.0 {
            continue;
        }
        let mf = m as f64;
        let cos = (mf * theta).cos();
        let base = c * xm / (mf * mf);
        log += base * cos;
        // ∂²/∂ε² cos(mεln p) = −(m ln p)² cos(mεln p)
        d2 -= base * (mf * lp) * (mf * lp) * cos;
        if xm * c.abs() < 1e-16 {
            break;
        }
    }
    (log, d2)
}

/// ln Φ^{diag}(ε) and its second ε-derivative: exact sum over primes up to
/// `prime_cutoff` plus the prime-density tail continuation, so the result is
/// stable in the cutoff to ~1e-9.
pub fn phi_diag_log(
    eps: f64,
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<(f64, f64), CorrError> {
    check_cutoff(prime_cutoff, table)?;
    let mut log = 0.0;
    let mut d2 = 0.0;
    for &p in table.primes_to(prime_cutoff) {
        let (l, d) = diag_prime_sums(p, eps, m_cutoff, |m| 2.0 * (1.0 - m as f64));
        log += l;
        d2 += d;
    }
    let (tl, td) = phi_diag_log_tail(eps, prime_cutoff, m_cutoff);
    Ok((log + tl, d2 + td))
}

/// Φ^{diag}(ε) = ∏_p exp(2 Σ_m (1−m)/(m²p^m) cos(mε ln p)); even in ε, and
/// identically 1 at m_cutoff = 1 since the m = 1 term vanishes.
pub fn phi_diag(
    eps: f64,
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<f64, CorrError> {
    Ok(phi_diag_log(eps, table, prime_cutoff, m_cutoff)?.0.exp())
}

/// ln Ψ^{diag}(ε,k) and its second ε-derivative (finite product over p | k).
pub fn psi_diag_log(eps: f64, modulus: &FactoredInt, m_cutoff: u32) -> (f64, f64) {
    let mut log = 0.0;
    let mut d2 = 0.0;
    for p in modulus.primes() {
        let (l, d) = diag_prime_sums(p, eps, m_cutoff, |_| -2.0);
        log += l;
        d2 += d;
    }
    (log, d2)
}

/// Ψ^{diag}(ε,k) = exp(−Σ_{p|k} Σ_m e^{imε ln p}/(m²p^m) + c.c.), real > 0.
pub fn psi_diag(eps: f64, modulus: &FactoredInt, m_cutoff: u32) -> f64 {
    psi_diag_log(eps, modulus, m_cutoff).0.exp()
}

/// ln of the full diagonal bracket |ζ(1+iε)|² Φ^{diag} Ψ^{diag}; the object
/// whose second derivative gives −4π² R₂^{diag}. Exposed for derivative
/// cross-checks.
pub fn diag_log_bracket(
    eps: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<f64, CorrError> {
    if eps == 0.0 {
        return Err(CorrError::EpsZero);
    }
    let z = zeta_em(Complex64::new(1.0, eps), 0)?;
    let (phi, _) = phi_diag_log(eps, table, prime_cutoff, m_cutoff)?;
    let (psi, _) = psi_diag_log(eps, modulus, m_cutoff);
    Ok(z.norm_sqr().ln() + phi + psi)
}

/// Diagonal correlation term
/// R₂^{diag}(ε) = −(1/4π²) ∂²/∂ε² ln[|ζ(1+iε)|² Φ^{diag}(ε) Ψ^{diag}(ε,k)].
pub fn r2_diag(
    eps: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<f64, CorrError> {
    if eps == 0.0 {
        return Err(CorrError::EpsZero);
    }
    let s = Complex64::new(1.0, eps);
    let [z0, z1, z2] = zeta_with_derivatives(s)?;
    // ∂²/∂ε² ln|ζ(1+iε)|² = −2 Re[ζ″/ζ − (ζ′/ζ)²]
    let lr = z1 / z0;
    let d2_zeta = -2.0 * (z2 / z0 - lr * lr).re;
    let (_, d2_phi) = phi_diag_log(eps, table, prime_cutoff, m_cutoff)?;
    let (_, d2_psi) = psi_diag_log(eps, modulus, m_cutoff);
    Ok(-(d2_zeta + d2_phi + d2_psi) / (4.0 * PI * PI))
}

/// Φ^{off}(ε) = ∏_p (1 − (p^{iε}−1)²/(p−1)²): exact product over primes up
/// to the cutoff times the prime-density tail continuation. Φ^{off}(0) = 1
/// and Φ^{off}(−ε) = conj Φ^{off}(ε).
pub fn phi_off(
    eps: f64,
    table: &PrimeTable,
    prime_cutoff: u64,
) -> Result<Complex64, CorrError> {
    check_cutoff(prime_cutoff, table)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for &p in table.primes_to(prime_cutoff) {
        let (s, c) = (eps * (p as f64).ln()).sin_cos();
        let w = Complex64::new(c - 1.0, s); // p^{iε} − 1
        let pm1 = p as f64 - 1.0;
        acc *= 1.0 - w * w / (pm1 * pm1);
    }
    Ok(acc * phi_off_log_tail(eps, prime_cutoff).exp())
}

/// Ψ^{off}(ε,k) = ∏_{p|k} (1 + (p^{iε/2}−p^{−iε/2})²/(p−p^{−iε}))^{−1}.
/// The numerator is −4 sin²(ε ln p / 2); the factor never vanishes for real
/// ε and p ≥ 2, and Ψ^{off} → 1 as ε → 0.
pub fn psi_off(eps: f64, modulus: &FactoredInt) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for p in modulus.primes() {
        let theta = eps * (p as f64).ln();
        let half = (theta / 2.0).sin();
        let num = -4.0 * half * half;
        let (s, c) = theta.sin_cos();
        let den = p as f64 - Complex64::new(c, -s); // p − p^{−iε}
        let factor = 1.0 + num / den;
        debug_assert!(factor.norm() > 0.0);
        acc /= factor;
    }
    acc
}

/// ∏_{p|k} (p − p^{−iε})/(p − 1): the correction isolating the single
/// oscillatory term that carries the random-matrix limit. Tends to 1 as
/// ε → 0.
pub fn off_r0_factor(eps: f64, modulus: &FactoredInt) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for p in modulus.primes() {
        let (s, c) = (eps * (p as f64).ln()).sin_cos();
        acc *= (p as f64 - Complex64::new(c, -s)) / (p as f64 - 1.0);
    }
    acc
}

/// One-sided complex half of R₂^{off}: the full term is this plus its
/// complex conjugate, i.e. R₂^{off} = 2 Re(·).
pub fn r2_off_half(
    eps: f64,
    e_height: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
) -> Result<Complex64, CorrError> {
    if eps == 0.0 {
        return Err(CorrError::EpsZero);
    }
    let k = modulus.value();
    let log_term = (k as f64 * e_height / TAU).ln(); // = 2π d̄(E)
    let z = zeta_em(Complex64::new(1.0, eps), 0)?;
    let phase = Complex64::new(0.0, eps * log_term).exp();
    let phi = phi_off(eps, table, prime_cutoff)?;
    let psi = psi_off(eps, modulus);
    Ok(phase * z.norm_sqr() * phi * psi / (4.0 * PI * PI))
}

/// Off-diagonal correlation term
/// R₂^{off}(ε) = (1/4π²) e^{iε ln(Ek/2π)} |ζ(1+iε)|² Φ^{off} Ψ^{off} + c.c.
pub fn r2_off(
    eps: f64,
    e_height: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
) -> Result<f64, CorrError> {
    Ok(2.0 * r2_off_half(eps, e_height, modulus, table, prime_cutoff)?.re)
}

/// The single-term variant of R₂^{off}: same expression multiplied by
/// [`off_r0_factor`] inside the complex half before taking the real part.
/// Identical to [`r2_off`] for k = 1.
pub fn r2_off_r0(
    eps: f64,
    e_height: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
) -> Result<f64, CorrError> {
    let half = r2_off_half(eps, e_height, modulus, table, prime_cutoff)?;
    Ok(2.0 * (half * off_r0_factor(eps, modulus)).re)
}

/// R₂(ε) = d̄²(E) + R₂^{diag}(ε) + R₂^{off}(ε) at a single offset.
pub fn r2_total_point(
    eps: f64,
    e_height: f64,
    modulus: &FactoredInt,
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<f64, CorrError> {
    let dbar = mean_density(e_height, modulus.value())?;
    let diag = r2_diag(eps, modulus, table, prime_cutoff, m_cutoff)?;
    let off = r2_off(eps, e_height, modulus, table, prime_cutoff)?;
    Ok(dbar * dbar + diag + off)
}

/// Evaluation request: height, modulus, offsets and truncation cutoffs.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationParams {
    pub e_height: f64,
    pub modulus: u64,
    /// Ascending offsets ε (raw units).
    pub eps_grid: Vec<f64>,
    pub prime_cutoff: u64,
    pub m_cutoff: u32,
}

impl CorrelationParams {
    fn validate(&self) -> Result<(), CorrError> {
        if self.eps_grid.iter().any(|x| !x.is_finite())
            || self.eps_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(CorrError::BadGrid);
        }
        Ok(())
    }

    /// Convert an unfolded grid x = ε·d̄(E) into raw offsets.
    pub fn eps_for_x(e_height: f64, modulus: u64, x_grid: &[f64]) -> Result<Vec<f64>, CorrError> {
        let dbar = mean_density(e_height, modulus)?;
        Ok(x_grid.iter().map(|x| x / dbar).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Diag,
    Off,
    OffR0,
    Total,
    GueReference,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::Diag => "diag",
            Component::Off => "off",
            Component::OffR0 => "off_r0",
            Component::Total => "total",
            Component::GueReference => "gue_reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Unfolded,
}

/// One evaluated component over a grid of offsets.
#[derive(Debug, Clone)]
pub struct CorrelationCurve {
    pub params: CorrelationParams,
    pub component: Component,
    pub normalization: Normalization,
    /// Same length as `params.eps_grid`.
    pub values: Vec<f64>,
}

/// Evaluate one component of the correlation function over the grid.
///
/// Raw curves reject ε = 0 everywhere. Unfolded curves (values divided by
/// d̄², abscissa x = ε d̄) reject ε = 0 except for the total, where the
/// value is defined by continuity (the 1/ε² singularities of the diagonal
/// and off-diagonal parts cancel; the limit is approximated at x = 10⁻³).
pub fn evaluate_curve(
    params: &CorrelationParams,
    component: Component,
    normalization: Normalization,
    table: &PrimeTable,
) -> Result<CorrelationCurve, CorrError> {
    params.validate()?;
    let modulus = FactoredInt::from_trial_division(params.modulus)?;
    let dbar = mean_density(params.e_height, params.modulus)?;
    let mut values = Vec::with_capacity(params.eps_grid.len());
    for &eps in &params.eps_grid {
        let v = match component {
            Component::GueReference => gue_r2(eps * dbar),
            Component::Diag => scaled(
                r2_diag(eps, &modulus, table, params.prime_cutoff, params.m_cutoff)?,
                dbar,
                normalization,
            ),
            Component::Off => scaled(
                r2_off(eps, params.e_height, &modulus, table, params.prime_cutoff)?,
                dbar,
                normalization,
            ),
            Component::OffR0 => scaled(
                r2_off_r0(eps, params.e_height, &modulus, table, params.prime_cutoff)?,
                dbar,
                normalization,
            ),
            Component::Total => {
                let eps_eval = if eps == 0.0 {
                    if normalization == Normalization::Raw {
                        return Err(CorrError::EpsZero);
                    }
                    1e-3 / dbar
                } else {
                    eps
                };
                scaled(
                    r2_total_point(
                        eps_eval,
                        params.e_height,
                        &modulus,
                        table,
                        params.prime_cutoff,
                        params.m_cutoff,
                    )?,
                    dbar,
                    normalization,
                )
            }
        };
        values.push(v);
    }
    Ok(CorrelationCurve {
        params: params.clone(),
        component,
        normalization,
        values,
    })
}

fn scaled(v: f64, dbar: f64, normalization: Normalization) -> f64 {
    match normalization {
        Normalization::Raw => v,
        Normalization::Unfolded => v / (dbar * dbar),
    }
}

/// Crude upper bounds for |ln(truncated/full)| of the Euler products at a
/// given cutoff X, used for the metadata sidecars: the diagonal log tail is
/// Σ_{p>X} Σ_{m≥2} 2(m−1)/(m²p^m) ≈ (1/2)/(X ln X) and the off-diagonal one
/// Σ_{p>X} 4/(p−1)² ≈ 4/(X ln X).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailEstimates {
    pub phi_diag_log: f64,
    pub phi_off_log: f64,
}

pub fn tail_estimates(prime_cutoff: u64) -> TailEstimates {
    let x = prime_cutoff as f64;
    let lx = x.ln().max(1.0);
    TailEstimates {
        phi_diag_log: 0.5 / (x * lx),
        phi_off_log: 4.0 / (x * lx),
    }
}

/// CSV serialization: `eps,x_unfolded,value,component,E,k`, one row per grid
/// point, floats in round-trip scientific notation.
pub fn write_curves_csv<W: Write>(mut w: W, curves: &[CorrelationCurve]) -> io::Result<()> {
    writeln!(w, "eps,x_unfolded,value,component,E,k")?;
    for curve in curves {
        let dbar = mean_density(curve.params.e_height, curve.params.modulus)
            .expect("curve was evaluated with a valid density");
        for (&eps, &v) in curve.params.eps_grid.iter().zip(&curve.values) {
            writeln!(
                w,
                "{:e},{:e},{:e},{},{:e},{}",
                eps,
                eps * dbar,
                v,
                curve.component.as_str(),
                curve.params.e_height,
                curve.params.modulus
            )?;
        }
    }
    Ok(())
}
