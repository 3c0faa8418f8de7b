//! Critical-line zeros of Dirichlet L-functions and their statistics.
//!
//! L(s,χ) is evaluated through the decomposition
//! L(s,χ) = k^{-s} Σ_{r mod k} χ(r) ζ(s, r/k) with Euler–Maclaurin Hurwitz
//! values. On the critical line the completed function
//! Λ(s,χ) = (k/π)^{(s+a)/2} Γ((s+a)/2) L(s,χ) satisfies
//! Λ(s,χ) = ε(χ) Λ(1−s, χ̄) with root number ε(χ) = τ(χ)/(i^a √k), so
//!
//!   Z(t) = e^{iθ(t)} L(1/2 + it, χ),
//!   θ(t) = (t/2) ln(k/π) + Im ln Γ((1/2 + a + it)/2) − arg ε(χ)/2,
//!
//! is real up to rounding; its sign changes locate the zeros. Scanning is
//! chunked with a per-chunk audit against the integrated mean density
//! (t/2π) ln(kt/2πe); a failed audit rescans at half the step before being
//! flagged. The empirical pair statistics unfold heights through the same
//! smooth counting function.

mod gamma;
mod hurwitz;

pub use gamma::{digamma, gamma, ln_gamma};
pub use hurwitz::{hurwitz_zeta, HURWITZ_MAX_IM};

use std::f64::consts::{PI, TAU};
use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, PrimeTable};
use crate::characters::{
    self, character_with_label, CharacterError, DirichletCharacter,
};
use crate::correlation::{self, CorrError};
use crate::hardy_littlewood::VonMangoldtLookup;

use hurwitz::{em_terms_for, hurwitz_tail};

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("pole at s = 1")]
    PoleAtOne,
    #[error("Hurwitz shift a = {0} outside (0, 1]")]
    BadHurwitzShift(f64),
    #[error("s = {re} + {im}i outside the validated strip (0 < Re <= 3, |Im| <= 3e4)")]
    OutOfValidatedStrip { re: f64, im: f64 },
    #[error("root number has |ε| = {0}, expected 1 (precision loss or non-primitive input)")]
    RootNumberAnomalous(f64),
    #[error("bad scan window [{t_min}, {t_max}] (need t_min <= t_max, |t| <= 3e4)")]
    BadWindow { t_min: f64, t_max: f64 },
    #[error("scan step {step} too coarse; need <= {max} = 0.5/d̄(t_max)")]
    StepTooCoarse { step: f64, max: f64 },
    #[error("tolerance {0} must be positive and below the scan step")]
    BadTolerance(f64),
    #[error("need at least {needed} zeros, got {got}")]
    TooFewZeros { needed: usize, got: usize },
    #[error("bad histogram parameters: {0}")]
    BadBins(&'static str),
    #[error("zeros cover [{have_lo}, {have_hi}] but the check needs [{need_lo}, {need_hi}]")]
    WindowNotCovered {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },
    #[error("zero-list parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

/// Mean density d̄(t) = ln(kt/2π)/2π of zeros at height t (0 below the
/// logarithm's zero crossing).
pub fn smooth_density(k: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = k as f64 * t / TAU;
    if x <= 1.0 {
        0.0
    } else {
        x.ln() / TAU
    }
}

/// Integrated mean density N̄(t) = (t/2π) ln(kt/2πe), clamped to its
/// increasing branch; the unfolding map for heights.
pub fn smooth_count(k: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = k as f64 * t / TAU;
    if x <= 1.0 {
        return 0.0;
    }
    (t / TAU * (x.ln() - 1.0)).max(0.0)
}

/// Odd extension of the counting function, for windows crossing 0.
pub fn smooth_count_signed(k: u64, t: f64) -> f64 {
    if t >= 0.0 {
        smooth_count(k, t)
    } else {
        -smooth_count(k, -t)
    }
}

/// L(s, χ) for primitive χ in the validated strip, through the Hurwitz
/// decomposition. At s = 1 (non-principal χ) the simple poles of the
/// Hurwitz values cancel against Σ χ(r) = 0 and the limit is evaluated as
/// L(1,χ) = −(1/k) Σ_r χ(r) ψ(r/k).
pub fn l_value(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64, ZeroError> {
    let k = chi.modulus();
    if !chi.is_primitive() {
        return Err(CharacterError::NotPrimitive {
            modulus: k,
            label: chi.label().to_vec(),
            conductor: chi.conductor(),
        }
        .into());
    }
    if s == Complex64::new(1.0, 0.0) {
        if chi.is_principal() {
            // only the modulus-1 character is both primitive and principal
            return Err(ZeroError::PoleAtOne);
        }
        let mut acc = Complex64::ZERO;
        for r in 1..=k {
            let c = chi.value(r % k);
            if c != Complex64::ZERO {
                acc += c * digamma(r as f64 / k as f64);
            }
        }
        return Ok(-acc / k as f64);
    }
    let mut acc = Complex64::ZERO;
    for r in 1..=k {
        let c = chi.value(r % k);
        if c != Complex64::ZERO {
            acc += c * hurwitz_zeta(s, r as f64 / k as f64)?;
        }
    }
    Ok(acc * (-s * (k as f64).ln()).exp())
}

struct Channel {
    chi_r: Complex64,
    a: f64,
    ln_tab: Vec<f64>,
    isq_tab: Vec<f64>,
}

/// Fixed-character evaluator of L(1/2+it, χ) and the rotated real signal
/// Z(t), with per-residue ln/(·)^{-1/2} tables shared across the scan.
pub struct CriticalLineEvaluator {
    chi: DirichletCharacter,
    channels: Vec<Channel>,
    ln_k: f64,
    half_ln_k_over_pi: f64,
    gamma_re: f64,
    eps_half_arg: f64,
    t_absmax: f64,
}

impl CriticalLineEvaluator {
    pub fn new(chi: &DirichletCharacter, t_absmax: f64) -> Result<Self, ZeroError> {
        let k = chi.modulus();
        if !(t_absmax > 0.0) || t_absmax > HURWITZ_MAX_IM {
            return Err(ZeroError::BadWindow { t_min: 0.0, t_max: t_absmax });
        }
        let eps = characters::root_number(chi)?;
        if (eps.norm() - 1.0).abs() > 1e-8 {
            return Err(ZeroError::RootNumberAnomalous(eps.norm()));
        }
        let n_max = em_terms_for(t_absmax) + 1;
        let mut channels = Vec::new();
        for r in 1..=k {
            let chi_r = chi.value(r % k);
            if chi_r == Complex64::ZERO {
                continue;
            }
            let a = r as f64 / k as f64;
            let mut ln_tab = Vec::with_capacity(n_max);
            let mut isq_tab = Vec::with_capacity(n_max);
            for m in 0..n_max {
                let w = m as f64 + a;
                ln_tab.push(w.ln());
                isq_tab.push(1.0 / w.sqrt());
            }
            channels.push(Channel { chi_r, a, ln_tab, isq_tab });
        }
        Ok(CriticalLineEvaluator {
            chi: chi.clone(),
            channels,
            ln_k: (k as f64).ln(),
            half_ln_k_over_pi: 0.5 * (k as f64 / PI).ln(),
            gamma_re: (0.5 + chi.parity() as f64) / 2.0,
            eps_half_arg: 0.5 * eps.arg(),
            t_absmax,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    /// L(1/2 + it, χ) from the cached tables.
    pub fn l_on_line(&self, t: f64) -> Complex64 {
        debug_assert!(t.abs() <= self.t_absmax + 1e-9);
        let s = Complex64::new(0.5, t);
        let n = em_terms_for(t.abs());
        let mut total = Complex64::ZERO;
        for ch in &self.channels {
            let mut acc = Complex64::ZERO;
            for m in 0..n {
                let (si, co) = (-t * ch.ln_tab[m]).sin_cos();
                let w = ch.isq_tab[m];
                acc += Complex64::new(co * w, si * w);
            }
            acc += hurwitz_tail(s, ch.a, n);
            total += ch.chi_r * acc;
        }
        total * (-s * self.ln_k).exp()
    }

    /// Rotated signal and its (rounding-level) imaginary residual.
    pub fn z_with_residual(&self, t: f64) -> (f64, f64) {
        let theta = t * self.half_ln_k_over_pi
            + ln_gamma(Complex64::new(self.gamma_re, t / 2.0)).im
            - self.eps_half_arg;
        let (si, co) = theta.sin_cos();
        let z = Complex64::new(co, si) * self.l_on_line(t);
        (z.re, z.im)
    }

    /// The real rotated signal Z(t); |Z| = |L(1/2+it)| and sign changes
    /// bracket zeros.
    pub fn z(&self, t: f64) -> f64 {
        self.z_with_residual(t).0
    }
}

/// The rotated signal for a single t (builds a throwaway evaluator; use
/// [`CriticalLineEvaluator`] for scans).
pub fn rotated_signal(t: f64, chi: &DirichletCharacter) -> Result<f64, ZeroError> {
    let ev = CriticalLineEvaluator::new(chi, t.abs().max(1.0))?;
    Ok(ev.z(t))
}

/// Subinterval where the zero count disagreed with the integrated density
/// even after step-halving rescans.
#[derive(Debug, Clone, Serialize)]
pub struct AuditFlag {
    pub t_lo: f64,
    pub t_hi: f64,
    pub found: usize,
    pub expected: f64,
}

/// Ordered zeros of one primitive-character L-function in a window.
#[derive(Debug, Clone)]
pub struct ZeroList {
    pub character: DirichletCharacter,
    pub t_min: f64,
    pub t_max: f64,
    pub scan_step: f64,
    pub tolerance: f64,
    pub zeros: Vec<f64>,
    pub audit: Vec<AuditFlag>,
}

/// Allowed count-vs-density slack before a chunk is rescanned: covers the
/// S(t) fluctuation at both ends plus the O(1) constant terms.
const AUDIT_SLACK: f64 = 2.2;
const MAX_RESCANS: u32 = 4;
const CHUNK_INTERVALS: usize = 256;

/// Scan for all sign-change zeros of Z in [t_min, t_max], refining each
/// bracket to the requested width. The grid is fixed up front and chunked
/// deterministically, so results are independent of the thread count; each
/// chunk is audited against the integrated mean density and rescanned at
/// half the step (up to 4 times) on mismatch, with persistent mismatches
/// reported in `audit`.
pub fn find_zeros(
    chi: &DirichletCharacter,
    t_min: f64,
    t_max: f64,
    scan_step: f64,
    tolerance: f64,
) -> Result<ZeroList, ZeroError> {
    if !(t_min.is_finite() && t_max.is_finite()) || t_min > t_max
        || t_min.abs() > HURWITZ_MAX_IM || t_max.abs() > HURWITZ_MAX_IM
    {
        return Err(ZeroError::BadWindow { t_min, t_max });
    }
    let t_absmax = t_min.abs().max(t_max.abs()).max(1.0);
    let dbar_top = smooth_density(chi.modulus(), t_absmax);
    if dbar_top > 0.0 && scan_step > 0.5 / dbar_top {
        return Err(ZeroError::StepTooCoarse { step: scan_step, max: 0.5 / dbar_top });
    }
    if !(scan_step > 0.0) {
        return Err(ZeroError::StepTooCoarse { step: scan_step, max: f64::INFINITY });
    }
    if !(tolerance > 0.0 && tolerance < scan_step) {
        return Err(ZeroError::BadTolerance(tolerance));
    }
    let ev = CriticalLineEvaluator::new(chi, t_absmax)?;
    if t_min == t_max {
        return Ok(ZeroList {
            character: chi.clone(),
            t_min,
            t_max,
            scan_step,
            tolerance,
            zeros: Vec::new(),
            audit: Vec::new(),
        });
    }

    let n_steps = (((t_max - t_min) / scan_step).ceil() as usize).max(1);
    let h = (t_max - t_min) / n_steps as f64;
    let k = chi.modulus();
    let n_chunks = n_steps.div_ceil(CHUNK_INTERVALS);

    let chunks: Vec<(Vec<f64>, Option<AuditFlag>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let j0 = c * CHUNK_INTERVALS;
            let j1 = ((c + 1) * CHUNK_INTERVALS).min(n_steps);
            let a = t_min + j0 as f64 * h;
            let b = t_min + j1 as f64 * h;
            let expected = smooth_count_signed(k, b) - smooth_count_signed(k, a);
            let mut step = h;
            let mut zeros = scan_range(&ev, a, b, step, tolerance, 2);
            let mut rescans = 0;
            while (zeros.len() as f64 - expected).abs() > AUDIT_SLACK && rescans < MAX_RESCANS {
                step *= 0.5;
                zeros = scan_range(&ev, a, b, step, tolerance, 2);
                rescans += 1;
            }
            let flag = if (zeros.len() as f64 - expected).abs() > AUDIT_SLACK {
                Some(AuditFlag { t_lo: a, t_hi: b, found: zeros.len(), expected })
            } else {
                None
            };
            (zeros, flag)
        })
        .collect();

    let mut zeros = Vec::new();
    let mut audit = Vec::new();
    for (mut z, flag) in chunks {
        zeros.append(&mut z);
        if let Some(f) = flag {
            audit.push(f);
        }
    }
    debug_assert!(zeros.windows(2).all(|w| w[0] < w[1]), "zeros must be increasing");
    // whole-window census: chunk-level slack can hide a lost close pair
    let expected_total =
        smooth_count_signed(k, t_max) - smooth_count_signed(k, t_min);
    if (zeros.len() as f64 - expected_total).abs() > 3.0 {
        audit.push(AuditFlag {
            t_lo: t_min,
            t_hi: t_max,
            found: zeros.len(),
            expected: expected_total,
        });
    }
    Ok(ZeroList {
        character: chi.clone(),
        t_min,
        t_max,
        scan_step: h,
        tolerance,
        zeros,
        audit,
    })
}

/// One pass over [a, b] at a fixed step: bracket sign changes and refine
/// each; additionally, a same-sign triple whose parabola dips through zero
/// signals a possible zero pair hiding between grid points and triggers a
/// local rescan at step/8.
fn scan_range(
    ev: &CriticalLineEvaluator,
    a: f64,
    b: f64,
    step: f64,
    tolerance: f64,
    depth: u32,
) -> Vec<f64> {
    let n = (((b - a) / step).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let f: Vec<f64> = (0..=n).map(|j| ev.z(a + j as f64 * h)).collect();
    let mut zeros = Vec::new();
    for j in 0..n {
        let (fa, fb) = (f[j], f[j + 1]);
        if fb == 0.0 {
            zeros.push(a + (j + 1) as f64 * h);
        } else if fa != 0.0 && (fa > 0.0) != (fb > 0.0) {
            let ta = a + j as f64 * h;
            let tb = a + (j + 1) as f64 * h;
            zeros.push(refine_bracket(|t| ev.z(t), ta, tb, fa, fb, tolerance));
        }
    }
    if depth > 0 {
        for j in 1..n {
            let (fm, f0, fp) = (f[j - 1], f[j], f[j + 1]);
            if f0 == 0.0 || fm == 0.0 || fp == 0.0 {
                continue;
            }
            if (fm > 0.0) != (f0 > 0.0) || (f0 > 0.0) != (fp > 0.0) {
                continue; // sign changes already handled
            }
            if f0.abs() >= fm.abs() || f0.abs() >= fp.abs() {
                continue; // not a dip
            }
            // parabola through the triple (x in units of h around j)
            let curv = 0.5 * (fp - 2.0 * f0 + fm);
            let slope = 0.5 * (fp - fm);
            if curv * f0 <= 0.0 {
                continue; // not curving back from the axis
            }
            let vertex_x = -slope / (2.0 * curv);
            let vertex_v = f0 - slope * slope / (4.0 * curv);
            // rescan not only when the parabola crosses, but whenever it
            // comes within a quarter of f_j of the axis: asymmetric dips
            // from genuine zero pairs often stop short of the fitted zero
            if vertex_x.abs() <= 1.5 && vertex_v * f0.signum() < 0.25 * f0.abs() {
                let lo = a + (j - 1) as f64 * h;
                let hi = a + (j + 1) as f64 * h;
                zeros.extend(scan_range(ev, lo, hi, h / 8.0, tolerance, depth - 1));
            }
        }
        zeros.sort_by(|x, y| x.partial_cmp(y).unwrap());
        zeros.dedup_by(|x, y| (*x - *y).abs() < tolerance);
    }
    zeros
}

/// Illinois false-position refinement of a sign-change bracket.
fn refine_bracket(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tolerance: f64,
) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= tolerance {
            break;
        }
        let mut m = (fb * a - fa * b) / (fb - fa);
        if !(m > a && m < b) {
            m = 0.5 * (a + b);
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            fb = fm;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// One histogram bin of the unfolded pair-gap density.
#[derive(Debug, Clone, Serialize)]
pub struct R2Bin {
    pub x_lo: f64,
    pub x_mid: f64,
    pub density: f64,
    pub stderr: f64,
}

/// Unfolded empirical pair correlation of a zero set.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalR2 {
    pub modulus: u64,
    pub n_zeros: usize,
    /// zeros whose forward window fits inside the data (edge correction)
    pub n_inner: usize,
    pub bin_width: f64,
    pub max_x: f64,
    pub window_center: f64,
    pub window_half_width: f64,
    pub bins: Vec<R2Bin>,
}

impl EmpiricalR2 {
    pub const CSV_HEADER: &'static str = "x_bin,density,stderr";

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for b in &self.bins {
            writeln!(w, "{:e},{:e},{:e}", b.x_mid, b.density, b.stderr)?;
        }
        Ok(())
    }
}

/// Pair-gap histogram in unfolded units x = N̄(E_j) − N̄(E_i), normalized so
/// a Poisson process has density 1. All ordered pairs enter; the left
/// element is restricted to the inner window so every counted point has a
/// full forward window (edge correction), and stderr is the Poisson bar.
pub fn empirical_r2(
    list: &ZeroList,
    bin_width: f64,
    max_x: f64,
) -> Result<EmpiricalR2, ZeroError> {
    empirical_r2_from_heights(&list.zeros, list.character.modulus(), bin_width, max_x)
}

/// Histogram core over raw ascending heights (also used for surrogates and
/// zero files).
pub fn empirical_r2_from_heights(
    heights: &[f64],
    k: u64,
    bin_width: f64,
    max_x: f64,
) -> Result<EmpiricalR2, ZeroError> {
    const MIN_ZEROS: usize = 1_000;
    if heights.len() < MIN_ZEROS {
        return Err(ZeroError::TooFewZeros { needed: MIN_ZEROS, got: heights.len() });
    }
    if !(bin_width > 0.0) {
        return Err(ZeroError::BadBins("bin width must be positive"));
    }
    if !(max_x >= bin_width) {
        return Err(ZeroError::BadBins("max_x must be at least one bin"));
    }
    if heights.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(ZeroError::BadBins("heights must be ascending"));
    }
    let u: Vec<f64> = heights.iter().map(|&t| smooth_count_signed(k, t)).collect();
    let n_bins = (max_x / bin_width).round().max(1.0) as usize;
    let max_x = n_bins as f64 * bin_width;
    let u_last = *u.last().unwrap();
    let inner_cut = u_last - max_x;
    let n_inner = u.partition_point(|&x| x <= inner_cut);
    if n_inner == 0 {
        return Err(ZeroError::BadBins("window shorter than max_x after unfolding"));
    }
    let mut counts = vec![0u64; n_bins];
    for i in 0..n_inner {
        for j in (i + 1)..u.len() {
            let gap = u[j] - u[i];
            if gap >= max_x {
                break;
            }
            counts[(gap / bin_width) as usize] += 1;
        }
    }
    let norm = n_inner as f64 * bin_width;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| R2Bin {
            x_lo: b as f64 * bin_width,
            x_mid: (b as f64 + 0.5) * bin_width,
            density: c as f64 / norm,
            stderr: (c as f64).sqrt() / norm,
        })
        .collect();
    Ok(EmpiricalR2 {
        modulus: k,
        n_zeros: heights.len(),
        n_inner,
        bin_width,
        max_x,
        window_center: (heights[0] + heights[heights.len() - 1]) / 2.0,
        window_half_width: (heights[heights.len() - 1] - heights[0]) / 2.0,
        bins,
    })
}

/// Formula prediction for the pooled histogram: the unfolded
/// R₂(x/d̄(E), E)/d̄²(E) averaged over the zero window with weight d̄(E)
/// (the local number of zeros per dE), Simpson-averaged across each bin.
pub fn r2_prediction(
    k: u64,
    e_lo: f64,
    e_hi: f64,
    bins: &[R2Bin],
    table: &PrimeTable,
    prime_cutoff: u64,
    m_cutoff: u32,
) -> Result<Vec<f64>, ZeroError> {
    let modulus = arith::FactoredInt::from_trial_division(k)?;
    // keep d̄ bounded away from 0 at the low end of the window
    let floor = TAU / k as f64 * 1.5f64.exp();
    let e_lo = e_lo.max(floor);
    if !(e_hi > e_lo) {
        return Err(ZeroError::BadWindow { t_min: e_lo, t_max: e_hi });
    }
    const E_NODES: usize = 32;
    let rho = (e_hi / e_lo).powf(1.0 / (E_NODES - 1) as f64);
    let mut nodes = Vec::with_capacity(E_NODES);
    let mut e = e_lo;
    for i in 0..E_NODES {
        let dbar = smooth_density(k, e);
        let w = if i == 0 || i == E_NODES - 1 { 0.5 } else { 1.0 };
        nodes.push((e, dbar, w * dbar * e)); // trapezoid in ln E, weight d̄·E
        e *= rho;
    }
    let wsum: f64 = nodes.iter().map(|&(_, _, w)| w).sum();
    let mut out = Vec::with_capacity(bins.len());
    for bin in bins {
        // Simpson across the bin
        let xs = [bin.x_lo.max(1e-4), bin.x_mid, bin.x_lo + 2.0 * (bin.x_mid - bin.x_lo)];
        let sw = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
        let mut val = 0.0;
        for (x, w_bin) in xs.iter().zip(sw) {
            let mut avg = 0.0;
            for &(e, dbar, w) in &nodes {
                let r2 = correlation::r2_total_point(
                    x / dbar,
                    e,
                    &modulus,
                    table,
                    prime_cutoff,
                    m_cutoff,
                )?;
                avg += w * r2 / (dbar * dbar);
            }
            val += w_bin * avg / wsum;
        }
        out.push(val);
    }
    Ok(out)
}

/// Comparison of the smoothed zero density against the mean-plus-prime-sum
/// form of the density of zeros.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCheckReport {
    pub e_center: f64,
    pub width: f64,
    pub n_cutoff: u64,
    pub smoothing: f64,
    /// rms of (smoothed empirical − model) over the window grid
    pub l2_deviation: f64,
    /// rms of (smoothed empirical − d̄): the fluctuation scale
    pub l2_fluctuation: f64,
    /// l2_deviation / l2_fluctuation
    pub deviation_ratio: f64,
    /// smoothing below this leaves the n > cutoff truncation uncontrolled
    pub recommended_min_smoothing: f64,
    pub warning: Option<String>,
}

/// Gaussian-smoothed empirical density Σ_n G_σ(E−E_n) compared over the
/// window against d̄(E) − (1/π) Σ_{n≤cutoff} Λ(n)/√n · e^{−σ²ln²n/2}
/// Re[χ(n) e^{iE ln n}], the frequency-damped prime sum of the density of
/// zeros. Needs zeros covering the window plus an 8σ margin.
pub fn explicit_density_check(
    list: &ZeroList,
    e_center: f64,
    width: f64,
    n_cutoff: u64,
    smoothing: f64,
) -> Result<DensityCheckReport, ZeroError> {
    if !(smoothing > 0.0 && width > 0.0) {
        return Err(ZeroError::BadBins("smoothing and width must be positive"));
    }
    let sigma = smoothing;
    let margin = 8.0 * sigma;
    let (lo, hi) = (e_center - width / 2.0, e_center + width / 2.0);
    if lo - margin < list.t_min || hi + margin > list.t_max {
        return Err(ZeroError::WindowNotCovered {
            need_lo: lo - margin,
            need_hi: hi + margin,
            have_lo: list.t_min,
            have_hi: list.t_max,
        });
    }
    let k = list.character.modulus();

    // Λ-weighted oscillator amplitudes, frequency-damped by the smoothing
    let lam_table = arith::sieve_primes(n_cutoff.max(4))?;
    let lam = VonMangoldtLookup::new(&lam_table);
    let mut oscillators: Vec<(f64, Complex64)> = Vec::new(); // (ln n, χ(n)·amp)
    for n in 2..=n_cutoff {
        let l = lam.eval(n);
        if l == 0.0 {
            continue;
        }
        let chi_n = list.character.eval(n);
        if chi_n == Complex64::ZERO {
            continue;
        }
        let ln_n = (n as f64).ln();
        let amp = l / (n as f64).sqrt() * (-0.5 * sigma * sigma * ln_n * ln_n).exp();
        if amp < 1e-14 {
            continue;
        }
        oscillators.push((ln_n, chi_n * amp));
    }

    let step = sigma / 4.0;
    let n_grid = ((width / step).ceil() as usize).max(8);
    let gauss_norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let mut sq_dev = 0.0;
    let mut sq_fluct = 0.0;
    for g in 0..=n_grid {
        let e = lo + width * g as f64 / n_grid as f64;
        // smoothed empirical density
        let mut emp = 0.0;
        let lo_z = list.zeros.partition_point(|&z| z < e - margin);
        for &z in &list.zeros[lo_z..] {
            if z > e + margin {
                break;
            }
            let d = (e - z) / sigma;
            emp += (-0.5 * d * d).exp();
        }
        emp *= gauss_norm;
        let dbar = smooth_density(k, e);
        let mut osc = 0.0;
        for &(ln_n, amp) in &oscillators {
            let (si, co) = (e * ln_n).sin_cos();
            osc += amp.re * co - amp.im * si; // Re[χ(n)amp · e^{iE ln n}]
        }
        let model = dbar - osc / PI;
        sq_dev += (emp - model) * (emp - model);
        sq_fluct += (emp - dbar) * (emp - dbar);
    }
    let l2_deviation = (sq_dev / (n_grid + 1) as f64).sqrt();
    let l2_fluctuation = (sq_fluct / (n_grid + 1) as f64).sqrt();
    // truncation control: tail variance fraction e^{−σ²ln²(cutoff)} <= 1%
    let recommended = (100.0f64.ln()).sqrt() / (n_cutoff.max(2) as f64).ln();
    let warning = (sigma < recommended).then(|| {
        format!(
            "smoothing {sigma} leaves the n > {n_cutoff} truncation uncontrolled; \
             use smoothing >= {recommended:.3} (or raise the cutoff)"
        )
    });
    Ok(DensityCheckReport {
        e_center,
        width,
        n_cutoff,
        smoothing,
        l2_deviation,
        l2_fluctuation,
        deviation_ratio: l2_deviation / l2_fluctuation,
        recommended_min_smoothing: recommended,
        warning,
    })
}

/// Plain-text zero list: '#'-prefixed header, then one height per line at
/// 17 significant digits (round-trip exact for f64).
pub fn write_zero_list<W: Write>(mut w: W, list: &ZeroList) -> io::Result<()> {
    let chi = &list.character;
    let label: Vec<String> = chi.label().iter().map(|x| x.to_string()).collect();
    writeln!(w, "# modulus = {}", chi.modulus())?;
    writeln!(w, "# label = {}", label.join(","))?;
    writeln!(w, "# conductor = {}", chi.conductor())?;
    writeln!(w, "# parity = {}", chi.parity())?;
    writeln!(w, "# t_min = {:e}", list.t_min)?;
    writeln!(w, "# t_max = {:e}", list.t_max)?;
    writeln!(w, "# scan_step = {:e}", list.scan_step)?;
    writeln!(w, "# tolerance = {:e}", list.tolerance)?;
    writeln!(w, "# count = {}", list.zeros.len())?;
    for &z in &list.zeros {
        writeln!(w, "{:.16e}", z)?;
    }
    Ok(())
}

/// Parsed zero-list file.
#[derive(Debug, Clone)]
pub struct ZeroListFile {
    pub modulus: u64,
    pub label: Vec<u64>,
    pub conductor: u64,
    pub parity: u8,
    pub t_min: f64,
    pub t_max: f64,
    pub scan_step: f64,
    pub tolerance: f64,
    pub zeros: Vec<f64>,
}

impl ZeroListFile {
    /// Rebuild the full list (reconstructing the character from its label).
    pub fn into_zero_list(self) -> Result<ZeroList, ZeroError> {
        let chi = character_with_label(self.modulus, &self.label)?;
        Ok(ZeroList {
            character: chi,
            t_min: self.t_min,
            t_max: self.t_max,
            scan_step: self.scan_step,
            tolerance: self.tolerance,
            zeros: self.zeros,
            audit: Vec::new(),
        })
    }
}

pub fn read_zero_list<R: BufRead>(r: R) -> Result<ZeroListFile, ZeroError> {
    let mut modulus = None;
    let mut label: Option<Vec<u64>> = None;
    let mut conductor = None;
    let mut parity = None;
    let mut t_min = None;
    let mut t_max = None;
    let mut scan_step = None;
    let mut tolerance = None;
    let mut zeros = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.splitn(2, '=');
            let key = parts.next().unwrap_or("").trim();
            let value = parts.next().unwrap_or("").trim();
            match key {
                "modulus" => modulus = Some(parse_u64(key, value)?),
                "conductor" => conductor = Some(parse_u64(key, value)?),
                "parity" => parity = Some(parse_u64(key, value)? as u8),
                "label" => {
                    label = Some(if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|s| parse_u64("label entry", s.trim()))
                            .collect::<Result<_, _>>()?
                    })
                }
                "t_min" => t_min = Some(parse_f64(key, value)?),
                "t_max" => t_max = Some(parse_f64(key, value)?),
                "scan_step" => scan_step = Some(parse_f64(key, value)?),
                "tolerance" => tolerance = Some(parse_f64(key, value)?),
                "count" => {}
                other => return Err(ZeroError::Parse(format!("unknown header key '{other}'"))),
            }
        } else {
            zeros.push(parse_f64("zero height", line)?);
        }
    }
    Ok(ZeroListFile {
        modulus: modulus.ok_or_else(|| ZeroError::Parse("missing '# modulus'".into()))?,
        label: label.ok_or_else(|| ZeroError::Parse("missing '# label'".into()))?,
        conductor: conductor.unwrap_or(0),
        parity: parity.unwrap_or(0),
        t_min: t_min.unwrap_or(f64::NAN),
        t_max: t_max.unwrap_or(f64::NAN),
        scan_step: scan_step.unwrap_or(f64::NAN),
        tolerance: tolerance.unwrap_or(f64::NAN),
        zeros,
    })
}

fn parse_u64(key: &str, value: &str) -> Result<u64, ZeroError> {
    value
        .parse()
        .map_err(|_| ZeroError::Parse(format!("bad {key}: '{value}'")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ZeroError> {
    value
        .parse()
        .map_err(|_| ZeroError::Parse(format!("bad {key}: '{value}'")))
}

/// splitmix64; tiny deterministic generator for the synthetic surrogates.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Uniform (Poisson-like) surrogate heights with the same mean density as
/// genuine zeros: round(N̄(t_max) − N̄(t_min)) points uniform in unfolded
/// coordinates over the window, mapped back through the inverse counting
/// function. Deterministic in the seed.
pub fn poisson_surrogate(k: u64, t_min: f64, t_max: f64, seed: u64) -> Vec<f64> {
    let u_lo = smooth_count(k, t_min);
    let u_hi = smooth_count(k, t_max);
    let n = (u_hi - u_lo).round().max(0.0) as usize;
    let mut rng = SplitMix64(seed);
    let mut us: Vec<f64> = (0..n)
        .map(|_| u_lo + (u_hi - u_lo) * rng.next_f64())
        .collect();
    us.sort_by(|a, b| a.partial_cmp(b).unwrap());
    us.iter()
        .map(|&u| invert_smooth_count(k, u, t_min, t_max))
        .collect()
}

fn invert_smooth_count(k: u64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if smooth_count(k, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
