//! Dirichlet characters mod k: enumeration, conductors, Gauss sums and the
//! autocorrelation sums entering the off-diagonal correlation term.
//!
//! A character is stored as an exponent vector on a fixed generating set of
//! (Z/kZ)*: the 2-power component contributes the generators −1 and 3 (for
//! 2^e, e >= 3) or the single generator 3 (for 4), and each odd prime-power
//! component contributes its smallest primitive root, lifted from mod p to
//! mod p^e. Values are exact roots of unity t/N (N the group exponent), so
//! the algebraic identities below reduce to integer checks; complex doubles
//! are derived from the exact form on demand.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::arith::gcd;

/// Enumeration cap; conductor search is O(k·σ(k)) per character, which is
/// fine for the small moduli this library targets.
pub const MAX_MODULUS: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("modulus {0} out of range (1..={MAX_MODULUS})")]
    ModulusRange(u64),
    #[error(
        "character mod {modulus} with label {label:?} is induced from conductor {conductor}; \
         a primitive character is required"
    )]
    NotPrimitive {
        modulus: u64,
        label: Vec<u64>,
        conductor: u64,
    },
    #[error("no character mod {modulus} with label {label:?}")]
    BadLabel { modulus: u64, label: Vec<u64> },
}

/// One prime-power component of (Z/kZ)* with its discrete-log table.
struct Component {
    /// p^e
    modulus: u64,
    /// Generator orders; empty for p^e = 2, two entries for 2^e with e >= 3
    /// (orders [2, 2^{e-2}] for the generators −1 and 3), one entry otherwise.
    orders: Vec<u64>,
    /// Exponent pair of each residue r mod p^e on this component's
    /// generators; `u32::MAX` marks non-units.
    dlog: Vec<[u32; 2]>,
}

/// The unit group structure for a fixed modulus, shared by its characters.
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
    /// Flattened generator orders: 2-power component first, then odd primes
    /// ascending. Labels index into this.
    orders: Vec<u64>,
    /// lcm of the generator orders (1 for k = 1, 2).
    exponent: u64,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Smallest primitive root mod an odd prime p.
fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let fac = crate::arith::FactoredInt::from_trial_division(phi).expect("p >= 3");
    'next: for g in 2.. {
        for q in fac.primes() {
            if pow_mod(g, phi / q, p) == 1 {
                continue 'next;
            }
        }
        return g;
    }
    unreachable!()
}

impl Component {
    fn build(p: u64, e: u32) -> Self {
        let m = p.pow(e);
        let non_unit = [u32::MAX, u32::MAX];
        let mut dlog = vec![non_unit; m as usize];
        if p == 2 {
            match e {
                1 => {
                    dlog[1] = [0, 0];
                    return Component { modulus: 2, orders: vec![], dlog };
                }
                2 => {
                    dlog[1] = [0, 0];
                    dlog[3] = [1, 0];
                    return Component { modulus: 4, orders: vec![2], dlog };
                }
                _ => {
                    // (Z/2^e)* = <−1> × <3>, orders 2 and 2^{e-2}.
                    let half = 1u64 << (e - 2);
                    for s in 0..2u64 {
                        let mut x = if s == 0 { 1 } else { m - 1 };
                        for j in 0..half {
                            dlog[x as usize] = [s as u32, j as u32];
                            x = x * 3 % m;
                        }
                    }
                    return Component { modulus: m, orders: vec![2, half], dlog };
                }
            }
        }
        let g0 = primitive_root(p);
        // Lift: g0 stays primitive mod p^e unless g0^{p-1} ≡ 1 (mod p^2).
        let g = if e >= 2 && pow_mod(g0, p - 1, p * p) == 1 { g0 + p } else { g0 };
        let order = (p - 1) * p.pow(e - 1);
        let mut x = 1u64;
        for j in 0..order {
            dlog[x as usize] = [j as u32, 0];
            x = (x as u128 * g as u128 % m as u128) as u64;
        }
        Component { modulus: m, orders: vec![order], dlog }
    }

}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>, CharacterError> {
        if !(1..=MAX_MODULUS).contains(&modulus) {
            return Err(CharacterError::ModulusRange(modulus));
        }
        let fac = crate::arith::FactoredInt::from_trial_division(modulus).unwrap();
        let components: Vec<Component> =
            fac.factors().iter().map(|&(p, e)| Component::build(p, e)).collect();
        let orders: Vec<u64> =
            components.iter().flat_map(|c| c.orders.iter().copied()).collect();
        let exponent = orders.iter().fold(1, |acc, &d| lcm(acc, d));
        Ok(Arc::new(CharacterGroup { modulus, components, orders, exponent }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Group order φ(k).
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Group exponent (denominator of the exact character values).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
}

/// A Dirichlet character mod k with exact root-of-unity values.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    label: Vec<u64>,
    conductor: u64,
    parity: u8,
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.group.modulus)
            .field("label", &self.label)
            .field("conductor", &self.conductor)
            .field("parity", &self.parity)
            .finish()
    }
}


/// All φ(k) characters mod k, in lexicographic order of their exponent
/// vectors (generators fixed as described in the module docs).
pub fn enumerate_characters(k: u64) -> Result<Vec<DirichletCharacter>, CharacterError> {
    let group = CharacterGroup::new(k)?;
    let orders = group.orders.clone();
    let mut out = Vec::with_capacity(group.order() as usize);
    let mut label = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::from_parts(Arc::clone(&group), label.clone()));
        // lexicographic odometer, rightmost digit fastest
        let mut i = label.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            label[i] += 1;
            if label[i] < orders[i] {
                break;
            }
            label[i] = 0;
        }
    }
}

/// The character mod k with the given exponent vector.
pub fn character_with_label(k: u64, label: &[u64]) -> Result<DirichletCharacter, CharacterError> {
    let group = CharacterGroup::new(k)?;
    if label.len() != group.orders.len()
        || label.iter().zip(&group.orders).any(|(&a, &d)| a >= d)
    {
        return Err(CharacterError::BadLabel { modulus: k, label: label.to_vec() });
    }
    Ok(DirichletCharacter::from_parts(group, label.to_vec()))
}

impl DirichletCharacter {
    fn from_parts(group: Arc<CharacterGroup>, label: Vec<u64>) -> Self {
        let mut chi = DirichletCharacter { group, label, conductor: 0, parity: 0 };
        chi.conductor = chi.compute_conductor();
        let n = chi.group.exponent;
        chi.parity = match chi.value_num(chi.group.modulus.wrapping_sub(1) % chi.group.modulus) {
            Some(0) => 0,
            Some(t) if 2 * t == n => 1,
            other => unreachable!("χ(-1) must be ±1, got numerator {other:?}/{n}"),
        };
        chi
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn label(&self) -> &[u64] {
        &self.label
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// 0 if χ(−1) = 1 (even character), 1 if χ(−1) = −1 (odd).
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.label.iter().all(|&a| a == 0)
    }

    /// Denominator of the exact values (group exponent).
    pub fn value_denominator(&self) -> u64 {
        self.group.exponent
    }

    /// χ̄: the complex-conjugate character.
    pub fn conjugate(&self) -> DirichletCharacter {
        let label: Vec<u64> = self
            .label
            .iter()
            .zip(&self.group.orders)
            .map(|(&a, &d)| if a == 0 { 0 } else { d - a })
            .collect();
        DirichletCharacter::from_parts(Arc::clone(&self.group), label)
    }

    /// Exact value at r: `Some(t)` means χ(r) = e^{2πi t/N} with
    /// N = `value_denominator()`; `None` means χ(r) = 0.
    pub fn value_num(&self, r: u64) -> Option<u64> {
        let k = self.group.modulus;
        let r = r % k;
        if k > 1 && gcd(r, k) != 1 {
            return None;
        }
        let n = self.group.exponent;
        let mut t: u64 = 0;
        let mut gi = 0;
        for comp in &self.group.components {
            let d = comp.dlog[(r % comp.modulus) as usize];
            debug_assert_ne!(d[0], u32::MAX, "unit residue must have a dlog");
            for (slot, &ord) in comp.orders.iter().enumerate() {
                let a = self.label[gi];
                let contrib = (a as u128 * d[slot] as u128 % ord as u128) as u64 * (n / ord);
                t = (t + contrib) % n;
                gi += 1;
            }
        }
        Some(t)
    }

    /// χ(r) as a complex double (exactly 0 on non-units, |χ| = 1 on units).
    pub fn value(&self, r: u64) -> Complex64 {
        match self.value_num(r) {
            None => Complex64::new(0.0, 0.0),
            Some(0) => Complex64::new(1.0, 0.0),
            Some(t) => {
                let n = self.group.exponent;
                if 2 * t == n {
                    return Complex64::new(-1.0, 0.0);
                }
                let (s, c) = (std::f64::consts::TAU * t as f64 / n as f64).sin_cos();
                Complex64::new(c, s)
            }
        }
    }

    /// χ(m) for any integer m (reduces mod k).
    pub fn eval(&self, m: u64) -> Complex64 {
        self.value(m % self.group.modulus)
    }

    /// Smallest f | k such that χ is induced by a character mod f.
    fn compute_conductor(&self) -> u64 {
        let k = self.group.modulus;
        // χ is induced mod f iff χ(m) = 1 for every m ≡ 1 (mod f) coprime to k.
        'divisors: for f in 1..=k {
            if k % f != 0 {
                continue;
            }
            let mut m = 1 + f;
            while m <= k {
                if (gcd(m % k, k) == 1 || k == 1) && self.value_num(m % k) != Some(0) {
                    continue 'divisors;
                }
                m += f;
            }
            return f;
        }
        k
    }

    /// Serializable form: exact values as (numerator, denominator) pairs.
    pub fn to_json(&self) -> CharacterJson {
        let k = self.group.modulus;
        let n = self.group.exponent;
        CharacterJson {
            modulus: k,
            conductor: self.conductor,
            parity: self.parity,
            label: self.label.clone(),
            values: (0..k).map(|r| self.value_num(r).map(|t| (t, n))).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CharacterJson {
    pub modulus: u64,
    pub conductor: u64,
    pub parity: u8,
    pub label: Vec<u64>,
    /// Entry r: `null` for χ(r) = 0, else `[t, N]` meaning e^{2πi t/N}.
    pub values: Vec<Option<(u64, u64)>>,
}

/// Gauss sum τ(χ) = Σ_{m=1..k} χ(m) e^{2πi m/k}, by direct summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    twisted_sum(chi, 1)
}

/// Σ_m χ(m) e^{2πi m s / k}. For primitive χ this equals χ̄(s)·τ(χ) for
/// every s (including non-units, where it vanishes); for non-primitive χ the
/// identity can fail, so such inputs are rejected.
pub fn twisted_gauss(chi: &DirichletCharacter, s: u64) -> Result<Complex64, CharacterError> {
    if !chi.is_primitive() {
        return Err(CharacterError::NotPrimitive {
            modulus: chi.modulus(),
            label: chi.label.clone(),
            conductor: chi.conductor,
        });
    }
    Ok(twisted_sum(chi, s))
}

fn twisted_sum(chi: &DirichletCharacter, s: u64) -> Complex64 {
    let k = chi.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=k {
        let c = chi.value(m % k);
        if c != Complex64::new(0.0, 0.0) {
            let (si, co) =
                (std::f64::consts::TAU * ((m as u128 * s as u128 % k as u128) as f64) / k as f64)
                    .sin_cos();
            acc += c * Complex64::new(co, si);
        }
    }
    acc
}

/// Autocorrelation g(r) = Σ_{r₁=0}^{k-1} χ(r₁) χ̄(r₁+r).
pub fn autocorrelation_g(chi: &DirichletCharacter, r: u64) -> Complex64 {
    let k = chi.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for r1 in 0..k {
        let a = chi.value(r1);
        if a != Complex64::new(0.0, 0.0) {
            acc += a * chi.value((r1 + r) % k).conj();
        }
    }
    acc
}

/// Root number ε(χ) = τ(χ) / (i^a √k); unimodular for primitive χ.
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64, CharacterError> {
    if !chi.is_primitive() {
        return Err(CharacterError::NotPrimitive {
            modulus: chi.modulus(),
            label: chi.label.clone(),
            conductor: chi.conductor,
        });
    }
    let tau = gauss_sum(chi);
    let i_a = if chi.parity() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    Ok(tau / (i_a * (chi.modulus() as f64).sqrt()))
}
