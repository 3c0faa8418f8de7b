//! Prime-pair density constants and their sieve-based verification.
//!
//! The pair conjecture in Λ-weighted form says
//! (1/N) Σ_{m≤N} Λ(m)Λ(m+h) → α(h) with α(h) = 0 for odd h and
//! α(h) = Σ_q (μ(q)/φ(q))² c_q(h) = 2C₂ ∏_{p|h, p>2} (p−1)/(p−2) for even h,
//! where C₂ = ∏_{p>2} (1 − (p−1)^{-2}) is the twin prime constant.
//!
//! Restricted to an arithmetic progression km + r with (r,k) = (r+h,k) = 1,
//! the density becomes α(h,k) = S(k) Σ_{(q,k)=1} (μ(q)/φ(q))² c_q(h) with
//! S(k) = (k/φ(k))², equivalently α(h,k) = α(h)·β(h,k) with the finite
//! product over the primes dividing k
//!
//!   β(h,k) = ∏_{p|k, p|h} p/(p−1) · ∏_{p|k, p∤h} p/(p−2):
//!
//! dividing the restricted series by α(h) removes each p | k local factor
//! (p/(p−1) when p | h, p(p−2)/(p−1)² when p ∤ h) and S(k) contributes
//! p²/(p−1)². For p = 2 | k with h odd the progression admits no residue
//! with both entries odd — a parity obstruction, not a product factor — so
//! α(h) = 0 governs and the p = 2 factor is skipped. The sieve counts in
//! [`empirical_pair_density`] are the arbiter for these conventions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, gcd, FactoredInt, MultTable, PrimeTable};
use crate::correlation::{zeta_em, CorrError};

#[derive(Debug, Error)]
pub enum HlError {
    #[error("prime cutoff {0} too small (need >= {1})")]
    CutoffTooSmall(u64, u64),
    #[error("prime cutoff {0} exceeds the table limit {1}")]
    CutoffBeyondTable(u64, u64),
    #[error("offset h = 0 has no pair density")]
    ZeroOffset,
    #[error("residue {what} = {value} is not coprime to k = {modulus}; the progression contains at most one prime")]
    NotCoprime {
        what: &'static str,
        value: u64,
        modulus: u64,
    },
    #[error("progression reaches {needed} but the sieve table stops at {limit}")]
    TableTooSmall { needed: u64, limit: u64 },
    #[error("residue {0} must be < modulus {1}")]
    ResidueRange(u64, u64),
    #[error(transparent)]
    Zeta(#[from] CorrError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

/// Least admissible cutoff for the twin-constant product.
pub const MIN_TWIN_CUTOFF: u64 = 10_000;

/// Partial twin-prime constant ∏_{2<p≤cutoff} (1 − (p−1)^{-2}); monotone
/// decreasing in the cutoff, with the printed digits 0.6601618 stable from
/// cutoff 1e6 on.
pub fn twin_constant(prime_cutoff: u64, table: &PrimeTable) -> Result<f64, HlError> {
    if prime_cutoff < MIN_TWIN_CUTOFF {
        return Err(HlError::CutoffTooSmall(prime_cutoff, MIN_TWIN_CUTOFF));
    }
    if prime_cutoff > table.limit() {
        return Err(HlError::CutoffBeyondTable(prime_cutoff, table.limit()));
    }
    Ok(twin_constant_unchecked(prime_cutoff, table))
}

/// Same partial product without the minimum-cutoff guard, for the small
/// closed-form cases (cutoff 3 gives the single factor 3/4).
pub fn twin_constant_unchecked(prime_cutoff: u64, table: &PrimeTable) -> f64 {
    let mut log = 0.0f64;
    for &p in table.primes_to(prime_cutoff.min(table.limit())) {
        if p == 2 {
            continue;
        }
        let d = p as f64 - 1.0;
        log += (-1.0 / (d * d)).ln_1p();
    }
    log.exp()
}

/// α(h): 0 for odd h, else 2C₂ ∏_{p|h, p>2} (p−1)/(p−2) (the prime 2 of h
/// is absorbed into 2C₂; only odd prime divisors contribute).
pub fn alpha(h: i64, prime_cutoff: u64, table: &PrimeTable) -> Result<f64, HlError> {
    if h == 0 {
        return Err(HlError::ZeroOffset);
    }
    if h % 2 != 0 {
        return Ok(0.0);
    }
    let c2 = twin_constant(prime_cutoff, table)?;
    let fh = FactoredInt::from_trial_division(h.unsigned_abs())?;
    let mut out = 2.0 * c2;
    for p in fh.primes().filter(|&p| p > 2) {
        out *= (p as f64 - 1.0) / (p as f64 - 2.0);
    }
    Ok(out)
}

/// Partial series Σ_{q≤Q} (μ(q)/φ(q))² c_q(h); converges to α(h) for even
/// h and to 0 for odd h.
pub fn alpha_series(h: i64, q_max: u64) -> f64 {
    alpha_series_with(h, &arith::mult_table(q_max as usize))
}

/// Series form over a caller-provided μ/φ table (the table length is the
/// series cutoff).
pub fn alpha_series_with(h: i64, mt: &MultTable) -> f64 {
    let habs = h.unsigned_abs();
    let mut acc = 0.0f64;
    for q in 1..mt.mu.len() as u64 {
        let mu = mt.mu[q as usize];
        if mu == 0 {
            continue;
        }
        let phi_q = mt.phi[q as usize] as f64;
        let c = ramanujan_from_table(q, habs, mt);
        acc += c / (phi_q * phi_q);
    }
    acc
}

/// c_q(n) for squarefree q via Hölder's identity and the μ/φ tables.
fn ramanujan_from_table(q: u64, n: u64, mt: &MultTable) -> f64 {
    let g = if n % q == 0 { q } else { gcd(q, n % q) };
    let qg = (q / g) as usize;
    mt.mu[qg] as f64 * mt.phi[q as usize] as f64 / mt.phi[qg] as f64
}

/// β(h,k) = ∏_{p|k, p|h} p/(p−1) · ∏_{p|k, p∤h} p/(p−2). The degenerate
/// p = 2 ∤ h case contributes no factor (see module docs); α(h) = 0 then
/// makes the pair density vanish as required.
pub fn beta(h: i64, k: u64) -> Result<f64, HlError> {
    if h == 0 {
        return Err(HlError::ZeroOffset);
    }
    let fk = FactoredInt::from_trial_division(k.max(1))?;
    let habs = h.unsigned_abs();
    let mut out = 1.0f64;
    for p in fk.primes() {
        if habs % p == 0 {
            out *= p as f64 / (p as f64 - 1.0);
        } else if p > 2 {
            out *= p as f64 / (p as f64 - 2.0);
        }
    }
    Ok(out)
}

/// The density constants for one (h, k) pair.
#[derive(Debug, Clone, Serialize)]
pub struct HlDensity {
    pub offset: i64,
    pub modulus: u64,
    pub alpha: f64,
    pub beta: f64,
    /// α(h,k) = α(h)·β(h,k)
    pub alpha_ap: f64,
    pub prime_cutoff: u64,
}

pub fn hl_density(
    h: i64,
    k: u64,
    prime_cutoff: u64,
    table: &PrimeTable,
) -> Result<HlDensity, HlError> {
    let a = alpha(h, prime_cutoff, table)?;
    let b = beta(h, k)?;
    Ok(HlDensity {
        offset: h,
        modulus: k,
        alpha: a,
        beta: b,
        alpha_ap: a * b,
        prime_cutoff,
    })
}

/// S(k): (k/φ(k))² when both residues are units mod k, else 0.
pub fn s_factor(k: u64, r1: u64, r2: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k > 1 && (gcd(r1 % k, k) != 1 || gcd(r2 % k, k) != 1) {
        return 0.0;
    }
    let fk = FactoredInt::from_trial_division(k).expect("k >= 1");
    let phi = arith::totient(&fk);
    let ratio = k as f64 / phi as f64;
    ratio * ratio
}

/// Λ-lookup backed by the prime bitset plus the short list of higher prime
/// powers.
pub struct VonMangoldtLookup<'a> {
    table: &'a PrimeTable,
    higher_powers: Vec<(u64, f64)>,
}

impl<'a> VonMangoldtLookup<'a> {
    pub fn new(table: &'a PrimeTable) -> Self {
        VonMangoldtLookup {
            table,
            higher_powers: table.higher_prime_powers(),
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        if self.table.is_prime(n) {
            return (n as f64).ln();
        }
        match self.higher_powers.binary_search_by_key(&n, |&(q, _)| q) {
            Ok(i) => self.higher_powers[i].1,
            Err(_) => 0.0,
        }
    }
}

/// One empirical run of the pair density along km + r, m = 1..=N.
#[derive(Debug, Clone, Serialize)]
pub struct PairCountReport {
    pub offset: u64,
    pub modulus: u64,
    pub residue: u64,
    pub length: u64,
    /// (1/N) Σ_m Λ(km+r) Λ(km+r+h)
    pub lambda_weighted_mean: f64,
    /// number of m with km+r and km+r+h both prime
    pub pi2_count: u64,
    /// α(h)·β(h,k), the Λ-weighted prediction
    pub predicted: f64,
    /// α(h,k)·N/ln²(kN), the raw-count prediction
    pub predicted_count: f64,
    /// |lambda_weighted_mean − predicted| / predicted (NaN when predicted = 0)
    pub relative_error: f64,
    /// Poisson relative error bar on the pair count
    pub count_stderr_rel: f64,
}

impl PairCountReport {
    pub const CSV_HEADER: &'static str = "h,k,r,N,lambda_mean,pi2,predicted,rel_err";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{},{:e},{:e}",
            self.offset,
            self.modulus,
            self.residue,
            self.length,
            self.lambda_weighted_mean,
            self.pi2_count,
            self.predicted,
            self.relative_error
        )
    }
}

/// Sieve-based check of the pair conjecture along one progression.
/// Requires 0 ≤ r < k with (r,k) = (r+h,k) = 1 and k·N + r + h within the
/// table. Chunked in fixed blocks so the result is independent of the
/// rayon thread count.
pub fn empirical_pair_density(
    h: u64,
    k: u64,
    r: u64,
    length: u64,
    table: &PrimeTable,
) -> Result<PairCountReport, HlError> {
    if h == 0 {
        return Err(HlError::ZeroOffset);
    }
    let k = k.max(1);
    if r >= k {
        return Err(HlError::ResidueRange(r, k));
    }
    if k > 1 {
        if gcd(r, k) != 1 {
            return Err(HlError::NotCoprime { what: "r", value: r, modulus: k });
        }
        if gcd((r + h) % k, k) != 1 {
            return Err(HlError::NotCoprime { what: "r + h", value: (r + h) % k, modulus: k });
        }
    }
    let needed = k
        .checked_mul(length)
        .and_then(|x| x.checked_add(r + h))
        .ok_or(HlError::TableTooSmall { needed: u64::MAX, limit: table.limit() })?;
    if needed > table.limit() {
        return Err(HlError::TableTooSmall { needed, limit: table.limit() });
    }

    let lambda = VonMangoldtLookup::new(table);
    const CHUNK: u64 = 1 << 16;
    let n_chunks = length.div_ceil(CHUNK);
    let partials: Vec<(f64, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(length);
            let mut sum = 0.0f64;
            let mut pairs = 0u64;
            for m in lo..=hi {
                let a = k * m + r;
                let la = lambda.eval(a);
                if la != 0.0 {
                    let b = a + h;
                    let lb = lambda.eval(b);
                    if lb != 0.0 {
                        sum += la * lb;
                        if table.is_prime(a) && table.is_prime(b) {
                            pairs += 1;
                        }
                    }
                }
            }
            (sum, pairs)
        })
        .collect();
    let mut sum = 0.0f64;
    let mut pairs = 0u64;
    for (s, c) in partials {
        sum += s;
        pairs += c;
    }

    let cutoff = table.limit().clamp(MIN_TWIN_CUTOFF, 10_000_000);
    let dens = hl_density(h as i64, k, cutoff, table)?;
    let mean = sum / length as f64;
    let ln_kn = ((k * length) as f64).ln();
    let relative_error = if dens.alpha_ap > 0.0 {
        (mean - dens.alpha_ap).abs() / dens.alpha_ap
    } else {
        f64::NAN
    };
    Ok(PairCountReport {
        offset: h,
        modulus: k,
        residue: r,
        length,
        lambda_weighted_mean: mean,
        pi2_count: pairs,
        predicted: dens.alpha_ap,
        predicted_count: dens.alpha_ap * length as f64 / (ln_kn * ln_kn),
        relative_error,
        count_stderr_rel: if pairs > 0 { 1.0 / (pairs as f64).sqrt() } else { f64::NAN },
    })
}

/// Admissible residues r mod k for offset h: both r and r+h units.
pub fn valid_residues(h: u64, k: u64) -> Vec<u64> {
    let k = k.max(1);
    (0..k)
        .filter(|&r| k == 1 || (gcd(r, k) == 1 && gcd((r + h) % k, k) == 1))
        .collect()
}

/// Partial sum Σ_{q≤Q} (μ(q)/φ(q)) c_q(n) of the Ramanujan expansion whose
/// formal limit is φ(n)Λ(n)/n. Convergence is slow and oscillatory; this is
/// an exploratory evaluator, not a limit.
pub fn ramanujan_expansion_partial(n: u64, q_max: u64) -> f64 {
    ramanujan_expansion_partial_with(n, &arith::mult_table(q_max as usize))
}

pub fn ramanujan_expansion_partial_with(n: u64, mt: &MultTable) -> f64 {
    let mut acc = 0.0f64;
    for q in 1..mt.mu.len() as u64 {
        let mu = mt.mu[q as usize];
        if mu == 0 {
            continue;
        }
        acc += mu as f64 * ramanujan_from_table(q, n, mt) / mt.phi[q as usize] as f64;
    }
    acc
}

/// The target φ(n)Λ(n)/n of the Ramanujan expansion.
pub fn ramanujan_expansion_target(n: u64) -> f64 {
    let f = FactoredInt::from_trial_division(n.max(1)).expect("n >= 1");
    arith::totient(&f) as f64 * arith::von_mangoldt(&f) / n as f64
}

/// Closed form of the coprime-restricted Dirichlet series
/// Σ_{(R,M)=1} R^{-s} = ζ(s) ∏_{p|M} (1 − p^{-s}), by inclusion–exclusion
/// over the squarefree divisors of M.
pub fn coprime_zeta(s: Complex64, m: &FactoredInt) -> Result<Complex64, HlError> {
    let mut acc = zeta_em(s, 0)?;
    for p in m.primes() {
        acc *= 1.0 - (-s * (p as f64).ln()).exp();
    }
    Ok(acc)
}

/// Plain partial sum Σ_{R≤cutoff, (R,M)=1} R^{-s}. On the Re s = 1 boundary
/// this oscillates around the closed form with amplitude ~1/|Im s| forever;
/// [`coprime_zeta_smoothed`] is the stabilized evaluator.
pub fn coprime_zeta_partial(s: Complex64, m: &FactoredInt, cutoff: u64) -> Complex64 {
    let rad = m.radical().max(1);
    let mask: Vec<bool> = (0..rad).map(|r| gcd(r, rad) == 1).collect();
    let mut acc = Complex64::ZERO;
    for n in 1..=cutoff {
        if mask[(n % rad) as usize] {
            acc += (-s * (n as f64).ln()).exp();
        }
    }
    acc
}

/// Smoothed partial-sum evaluator for the conditionally convergent boundary
/// case. The sharp partial sum is corrected by the elementary density tail
/// (φ(M)/M)·X^{1-s}/(s−1) — coprime integers have density φ(M)/M, so the
/// missing tail integral is known without any ζ input — and the corrected
/// values are averaged over 16 geometric checkpoints in [cutoff/2, cutoff]
/// to damp the residual sawtooth. Plain Cesàro or Abel smoothing cannot
/// converge here: the boundary oscillation X^{-iε}/(iε) decays too slowly
/// to be summable, so the tail correction has to come first.
pub fn coprime_zeta_smoothed(
    s: Complex64,
    m: &FactoredInt,
    cutoff: u64,
) -> Result<Complex64, HlError> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(HlError::Zeta(CorrError::PoleAtOne));
    }
    let rad = m.radical().max(1);
    let mask: Vec<bool> = (0..rad).map(|r| gcd(r, rad) == 1).collect();
    let density = mask.iter().filter(|&&b| b).count() as f64 / rad as f64;

    let n_checkpoints = 16usize;
    let mut checkpoints: Vec<u64> = (0..n_checkpoints)
        .map(|j| {
            let frac = j as f64 / (n_checkpoints - 1) as f64;
            ((cutoff as f64) * 0.5f64.powf(1.0 - frac)).round() as u64
        })
        .collect();
    checkpoints.dedup();

    let mut acc = Complex64::ZERO;
    let mut mean = Complex64::ZERO;
    let mut next = 0usize;
    for n in 1..=cutoff {
        if mask[(n % rad) as usize] {
            acc += (-s * (n as f64).ln()).exp();
        }
        while next < checkpoints.len() && n == checkpoints[next] {
            let x = n as f64;
            let tail = density * (x.ln() * (1.0 - s)).exp() / (s - 1.0);
            mean += acc + tail;
            next += 1;
        }
    }
    Ok(mean / checkpoints.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_primes;
    use once_cell::sync::Lazy;
    use std::f64::consts::PI;

    static TABLE: Lazy<PrimeTable> = Lazy::new(|| sieve_primes(1_200_000).unwrap());

    #[test]
    fn twin_constant_basics() {
        // single factor at cutoff 3: 1 − 1/(3−1)² = 3/4
        assert_eq!(twin_constant_unchecked(3, &TABLE), 0.75);
        assert!(matches!(
            twin_constant(100, &TABLE),
            Err(HlError::CutoffTooSmall(100, _))
        ));
        let c4 = twin_constant(10_000, &TABLE).unwrap();
        let c5 = twin_constant(100_000, &TABLE).unwrap();
        let c6 = twin_constant(1_000_000, &TABLE).unwrap();
        assert!(c4 > c5 && c5 > c6, "partial product must decrease");
        // tail bound Σ_{p>1e5} (p−1)^{-2} keeps cutoffs 1e5 and beyond within 1e-5
        assert!((c5 - c6).abs() < 1e-5);
        assert!((c6 - 0.6601618).abs() < 1e-6);
    }

    #[test]
    fn alpha_examples() {
        assert!(matches!(alpha(0, 10_000, &TABLE), Err(HlError::ZeroOffset)));
        for h in [1i64, 3, 9, 15, -7] {
            assert_eq!(alpha(h, 10_000, &TABLE).unwrap(), 0.0);
        }
        let a2 = alpha(2, 1_000_000, &TABLE).unwrap();
        assert!((a2 - 1.3203236).abs() < 2e-6, "2C2 = {a2}");
        // h = 6: the odd prime 3 contributes (3−1)/(3−2) = 2
        let a6 = alpha(6, 1_000_000, &TABLE).unwrap();
        assert_eq!(a6, 2.0 * a2);
        assert_eq!(alpha(-6, 1_000_000, &TABLE).unwrap(), a6);
        assert_eq!(alpha(12, 1_000_000, &TABLE).unwrap(), a6);
    }

    #[test]
    fn alpha_series_examples() {
        // only the q = 1 term
        for h in [2i64, 3, 10] {
            assert_eq!(alpha_series(h, 1), 1.0);
        }
        let mt = arith::mult_table(100_000);
        let a2 = alpha(2, 1_000_000, &TABLE).unwrap();
        assert!((alpha_series_with(2, &mt) - a2).abs() < 1e-3);
        assert!(alpha_series_with(3, &mt).abs() < 1e-3);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(2, 1).unwrap(), 1.0);
        // all twin pairs p > 3 sit in the single admissible class mod 3
        assert_eq!(beta(2, 3).unwrap(), 3.0);
        assert_eq!(beta(3, 3).unwrap(), 1.5);
        assert_eq!(beta(2, 4).unwrap(), 2.0);
        assert_eq!(beta(6, 3).unwrap(), 1.5);
        assert!((beta(2, 5).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert!(beta(2, 4).unwrap().is_finite() && beta(3, 4).unwrap().is_finite());
    }

    #[test]
    fn beta_invariant_under_divisibility_pattern() {
        // The modulus correction depends on h only through its divisibility
        // by the primes of 2k: β(h,k) = β(h′,k) whenever the patterns agree
        // (α(h) itself still tracks every prime of h, so the full product
        // α·β shifts exactly with α under h → h + kt). Exhaustive over
        // k ≤ 12, offsets ≤ 100.
        let cutoff = 1_000_000;
        for k in 1..=12u64 {
            let primes_2k: Vec<u64> =
                FactoredInt::from_trial_division(2 * k).unwrap().primes().collect();
            let pattern =
                |h: i64| -> Vec<bool> { primes_2k.iter().map(|&p| h.unsigned_abs() % p == 0).collect() };
            for h in 2..=100i64 {
                for t in 1..=10i64 {
                    let hp = h + k as i64 * t;
                    if hp > 100 {
                        break;
                    }
                    if pattern(h) == pattern(hp) {
                        assert_eq!(
                            beta(h, k).unwrap(),
                            beta(hp, k).unwrap(),
                            "k={k} h={h} h'={hp}"
                        );
                        let ra = alpha(h, cutoff, &TABLE).unwrap();
                        let rb = alpha(hp, cutoff, &TABLE).unwrap();
                        let a = ra * beta(h, k).unwrap();
                        let b = rb * beta(hp, k).unwrap();
                        if ra > 0.0 {
                            assert!(
                                ((a / ra) - (b / rb)).abs() <= 1e-12,
                                "k={k} h={h} h'={hp}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn beta_matches_coprime_restricted_series() {
        // Independent route: α(h,k) = S(k) Σ_{(q,k)=1} (μ(q)/φ(q))² c_q(h)
        // summed directly to Q = 1e5 must match α(h)·β(h,k).
        let mt = arith::mult_table(100_000);
        for &k in &[1u64, 2, 3, 4, 5, 6, 10, 12] {
            for &h in &[2i64, 4, 6, 12, 30] {
                let mut series = 0.0f64;
                for q in 1..mt.mu.len() as u64 {
                    if mt.mu[q as usize] == 0 || gcd(q, k) != 1 {
                        continue;
                    }
                    let phi_q = mt.phi[q as usize] as f64;
                    series += ramanujan_from_table(q, h.unsigned_abs(), &mt) / (phi_q * phi_q);
                }
                let fk = FactoredInt::from_trial_division(k).unwrap();
                let s_k = (k as f64 / arith::totient(&fk) as f64).powi(2);
                let via_series = s_k * series;
                let direct = alpha(h, 1_000_000, &TABLE).unwrap() * beta(h, k).unwrap();
                assert!(
                    (via_series - direct).abs() < 2e-3 * direct.max(1.0),
                    "h={h} k={k}: series {via_series} vs product {direct}"
                );
            }
        }
    }

    #[test]
    fn s_factor_examples() {
        assert_eq!(s_factor(1, 0, 0), 1.0);
        assert_eq!(s_factor(4, 1, 3), 4.0);
        assert_eq!(s_factor(6, 2, 1), 0.0);
        // exact identity (k/φ(k))² = ∏_{p|k} (p/(p−1))²
        for k in 1..=60u64 {
            let fk = FactoredInt::from_trial_division(k).unwrap();
            let phi = arith::totient(&fk);
            let expect = (k as f64 / phi as f64).powi(2);
            for r1 in 0..k {
                for r2 in 0..k {
                    let v = s_factor(k, r1, r2);
                    if k == 1 || (gcd(r1, k) == 1 && gcd(r2, k) == 1) {
                        assert_eq!(v, expect);
                    } else {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn empirical_preconditions() {
        assert!(matches!(
            empirical_pair_density(2, 3, 1, 100, &TABLE),
            Err(HlError::NotCoprime { what: "r + h", .. })
        ));
        assert!(matches!(
            empirical_pair_density(2, 6, 2, 100, &TABLE),
            Err(HlError::NotCoprime { what: "r", .. })
        ));
        assert!(matches!(
            empirical_pair_density(2, 1, 0, u64::MAX / 2, &TABLE),
            Err(HlError::TableTooSmall { .. })
        ));
        assert!(matches!(
            empirical_pair_density(2, 5, 7, 100, &TABLE),
            Err(HlError::ResidueRange(7, 5))
        ));
        assert!(matches!(
            empirical_pair_density(0, 1, 0, 100, &TABLE),
            Err(HlError::ZeroOffset)
        ));
    }

    #[test]
    fn empirical_twin_smoke() {
        // N = 2e5 is far from asymptopia; check the estimator lands in the
        // right neighbourhood and the counts are sane.
        let rep = empirical_pair_density(2, 1, 0, 200_000, &TABLE).unwrap();
        assert!(rep.pi2_count > 1_000, "found {} twin pairs", rep.pi2_count);
        assert!(rep.relative_error < 0.10, "rel err {}", rep.relative_error);
        assert!(rep.predicted > 1.3 && rep.predicted < 1.33);
        let row = rep.csv_row();
        assert!(row.starts_with("2,1,0,200000,"));
    }

    #[test]
    fn empirical_respects_progression_split() {
        // k = 3: all twins (p, p+2) with p > 3 have p ≡ 2 (mod 3); the
        // admissible class carries triple the unrestricted density.
        assert_eq!(valid_residues(2, 3), vec![2]);
        assert_eq!(valid_residues(6, 3), vec![1, 2]);
        assert_eq!(valid_residues(2, 4), vec![1, 3]);
        assert_eq!(valid_residues(2, 1), vec![0]);
        let n = 300_000;
        let rep = empirical_pair_density(2, 3, 2, n, &TABLE).unwrap();
        let unrestricted = empirical_pair_density(2, 1, 0, 3 * n, &TABLE).unwrap();
        let ratio = rep.lambda_weighted_mean / unrestricted.lambda_weighted_mean;
        assert!(
            (ratio - 3.0).abs() < 0.1,
            "progression boost {ratio} should be β(2,3) = 3"
        );
    }

    #[test]
    fn ramanujan_expansion_behaviour() {
        assert_eq!(ramanujan_expansion_partial(1, 1), 1.0);
        assert_eq!(ramanujan_expansion_target(1), 0.0);
        let t4 = ramanujan_expansion_target(4);
        assert!((t4 - 2.0f64.ln() / 2.0).abs() < 1e-15);
        assert_eq!(ramanujan_expansion_target(6), 0.0);
        // partial sums settle on the target at the few-1e-3 scale by Q = 2e4
        let mt = arith::mult_table(20_000);
        let p4 = ramanujan_expansion_partial_with(4, &mt);
        assert!((p4 - t4).abs() < 5e-3, "partial {p4} vs target {t4}");
        let p6 = ramanujan_expansion_partial_with(6, &mt);
        assert!(p6.abs() < 5e-3, "partial {p6} vs target 0");
    }

    #[test]
    fn coprime_zeta_closed_forms() {
        let one = FactoredInt::from_trial_division(1).unwrap();
        let six = FactoredInt::from_trial_division(6).unwrap();
        let s2 = Complex64::new(2.0, 0.0);
        let zeta_two = PI * PI / 6.0;
        let z = coprime_zeta(s2, &one).unwrap();
        assert!((z.re - zeta_two).abs() < 1e-12 && z.im.abs() < 1e-14);
        let z6 = coprime_zeta(s2, &six).unwrap();
        let expect = zeta_two * (1.0 - 0.25) * (1.0 - 1.0 / 9.0);
        assert!((z6.re - expect).abs() < 1e-12);
        // absolutely convergent region: direct partial sums agree to 1e-6
        let direct = coprime_zeta_partial(s2, &six, 1_000_000);
        assert!((z6 - direct).norm() < 1e-6);
        assert!(coprime_zeta_smoothed(Complex64::new(1.0, 0.0), &six, 1000).is_err());
    }

    #[test]
    fn coprime_zeta_smoothed_on_boundary() {
        let two = FactoredInt::from_trial_division(2).unwrap();
        let s = Complex64::new(1.0, 1.0);
        let closed = coprime_zeta(s, &two).unwrap();
        let smoothed = coprime_zeta_smoothed(s, &two, 1_000_000).unwrap();
        assert!(
            (closed - smoothed).norm() < 1e-3,
            "closed {closed} vs smoothed {smoothed}"
        );
        // the raw partial sum genuinely oscillates at the 1/|ε| scale
        let raw = coprime_zeta_partial(s, &two, 1_000_000);
        assert!((closed - raw).norm() > 1e-3);
    }
}
