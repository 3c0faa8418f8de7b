//! Exact integer arithmetic: prime sieving and classical multiplicative
//! functions (μ, φ, Λ, Ramanujan sums).
//!
//! The sieve is a segmented, odd-only sieve of Eratosthenes. The resulting
//! [`PrimeTable`] keeps both the ordered prime list and the full odd bitset,
//! so primality queries below the limit are O(1) and least-factor queries
//! fall back to trial division over the stored primes.

use thiserror::Error;

/// Hard cap on sieve size: odd bitset of 6.25 MB plus ~46 MB of primes.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("sieve limit {0} out of range (need 2 <= limit <= {MAX_SIEVE_LIMIT})")]
    SieveLimit(u64),
    #[error("0 has no prime factorization")]
    FactorizeZero,
    #[error("{0} out of factorization range for table limit {1} (needs a prime factor table up to sqrt(n))")]
    FactorRange(u64, u64),
}

/// Primes up to an inclusive `limit`, with O(1) primality lookups.
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    /// Bit i set  ⇔  2i+1 is prime (bit 0, the number 1, is cleared).
    odd_bits: Vec<u64>,
}

/// Sieve all primes `<= limit` via a segmented odd-only Eratosthenes pass.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable, ArithError> {
    if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
        return Err(ArithError::SieveLimit(limit));
    }
    let n_odds = limit.div_ceil(2) as usize; // odds 1, 3, .., <= limit
    let mut bits = vec![u64::MAX; n_odds.div_ceil(64)];
    bits[0] &= !1; // 1 is not prime

    let root = limit.isqrt();
    let base = simple_odd_primes(root);

    // Process the bitset in cache-sized blocks; consecutive odd multiples of
    // p are 2p apart, i.e. p positions apart in odd-index space.
    const BLOCK_WORDS: usize = 1 << 15; // 256 KiB per block
    let mut block_lo = 0usize; // odd-index of block start
    while block_lo < n_odds {
        let block_hi = (block_lo + BLOCK_WORDS * 64).min(n_odds); // exclusive
        for &p in &base {
            let p_idx = ((p - 1) / 2) as usize;
            // first index to clear: max(p^2, first odd multiple of p in block)
            let mut idx = 2 * p_idx * (p_idx + 1); // index of p^2 = (p^2 - 1)/2
            if idx < block_lo {
                let steps = (block_lo - idx).div_ceil(p as usize);
                idx += steps * p as usize;
            }
            while idx < block_hi {
                bits[idx / 64] &= !(1u64 << (idx % 64));
                idx += p as usize;
            }
        }
        block_lo = block_hi;
    }
    // Mask stray bits beyond n_odds so popcounts stay honest.
    let tail = n_odds % 64;
    if tail != 0 {
        *bits.last_mut().unwrap() &= (1u64 << tail) - 1;
    }

    let mut primes = Vec::with_capacity(prime_count_estimate(limit));
    primes.push(2);
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros() as usize;
            primes.push((2 * (w * 64 + b) + 1) as u64);
            word &= word - 1;
        }
    }
    Ok(PrimeTable {
        limit,
        primes,
        odd_bits: bits,
    })
}

fn prime_count_estimate(limit: u64) -> usize {
    let x = limit as f64;
    (x / x.ln() * 1.15) as usize + 16
}

/// Plain odd sieve for the base primes up to `root`.
fn simple_odd_primes(root: u64) -> Vec<u64> {
    if root < 3 {
        return Vec::new();
    }
    let n = ((root - 1) / 2) as usize; // indices 1..=n are 3, 5, ..
    let mut comp = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 1..=n {
        if !comp[i] {
            let p = 2 * i + 1;
            primes.push(p as u64);
            let mut j = 2 * i * (i + 1); // index of p^2
            while j <= n {
                comp[j] = true;
                j += p;
            }
        }
    }
    primes
}

impl PrimeTable {
    /// Inclusive sieve bound.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ascending list of all primes `<= limit`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `<= bound` (bound must not exceed the sieve limit).
    pub fn primes_to(&self, bound: u64) -> &[u64] {
        assert!(bound <= self.limit, "bound {bound} beyond table limit");
        let cut = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..cut]
    }

    /// O(1) primality for `n <= limit`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} beyond table limit {}", self.limit);
        if n < 3 {
            return n == 2;
        }
        if n % 2 == 0 {
            return false;
        }
        let idx = ((n - 1) / 2) as usize;
        self.odd_bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// Least prime factor of `n` for 2 <= n <= limit.
    pub fn smallest_factor(&self, n: u64) -> u64 {
        assert!((2..=self.limit).contains(&n));
        if n % 2 == 0 {
            return 2;
        }
        if self.is_prime(n) {
            return n;
        }
        for &p in &self.primes[1..] {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                return p;
            }
        }
        unreachable!("composite {n} <= limit must have a factor <= sqrt(n)")
    }

    /// The prime powers p^e with e >= 2 up to the limit, ascending, paired
    /// with ln p. These are the only non-prime support of Λ.
    pub fn higher_prime_powers(&self) -> Vec<(u64, f64)> {
        let mut out = Vec::new();
        for &p in self.primes_to(self.limit.isqrt()) {
            let lp = (p as f64).ln();
            let mut q = p * p;
            loop {
                out.push((q, lp));
                match q.checked_mul(p) {
                    Some(next) if next <= self.limit => q = next,
                    _ => break,
                }
            }
        }
        out.sort_unstable_by_key(|&(q, _)| q);
        out
    }
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInt {
    n: u64,
    /// (prime, exponent) pairs, primes strictly increasing, exponents >= 1.
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn value(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct prime divisors, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the distinct prime divisors.
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    /// Factorize by trial division alone; intended for small n where no
    /// sieve table is at hand.
    pub fn from_trial_division(n: u64) -> Result<Self, ArithError> {
        if n == 0 {
            return Err(ArithError::FactorizeZero);
        }
        let mut m = n;
        let mut factors = Vec::new();
        let mut push = |p: u64, m: &mut u64| {
            let mut e = 0;
            while *m % p == 0 {
                *m /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        };
        push(2, &mut m);
        let mut p = 3;
        while p * p <= m {
            push(p, &mut m);
            p += 2;
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Ok(FactoredInt { n, factors })
    }
}

/// Factorize `n >= 1` using the table's primes; n = 1 yields an empty list.
///
/// Works for any n whose composite part is covered by the table's primes up
/// to sqrt(n) — in particular for every n <= limit, and for larger n when
/// sqrt(n) <= limit.
pub fn factorize(n: u64, table: &PrimeTable) -> Result<FactoredInt, ArithError> {
    if n == 0 {
        return Err(ArithError::FactorizeZero);
    }
    let mut m = n;
    let mut factors = Vec::new();
    for &p in &table.primes {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        // Leftover has no factor <= sqrt(m) within the table; it is prime
        // provided the table reaches sqrt of the original leftover.
        let covered = table.limit.checked_mul(table.limit).is_none_or(|sq| m <= sq);
        if !covered {
            return Err(ArithError::FactorRange(n, table.limit));
        }
        factors.push((m, 1));
    }
    Ok(FactoredInt { n, factors })
}

/// Möbius function: 0 on non-squarefree n, else (-1)^{#prime factors}.
pub fn mobius(n: &FactoredInt) -> i32 {
    if !n.is_squarefree() {
        return 0;
    }
    if n.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient φ(n).
pub fn totient(n: &FactoredInt) -> u64 {
    n.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Von Mangoldt Λ(n): ln p on prime powers p^e, 0 otherwise (Λ(1) = 0).
pub fn von_mangoldt(n: &FactoredInt) -> f64 {
    match n.factors.as_slice() {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    }
}

/// Ramanujan sum c_q(n) = Σ_{(a,q)=1, 0<a<=q} e^{2πi a n / q}, evaluated
/// exactly through Hölder's identity c_q(n) = μ(q/g) φ(q)/φ(q/g) with
/// g = gcd(q, n). Integer-valued for all q >= 1 and all n (any sign).
pub fn ramanujan_sum(q: u64, n: i64) -> i64 {
    assert!(q >= 1);
    let n_mod = n.rem_euclid(q as i64) as u64;
    let g = if n_mod == 0 { q } else { gcd(q, n_mod) };
    let fq = FactoredInt::from_trial_division(q).expect("q >= 1");
    // q/g inherits q's primes with reduced exponents.
    let mut phi_q: u64 = 1;
    let mut phi_qg: u64 = 1;
    let mut mu_qg: i64 = 1;
    for &(p, e) in fq.factors() {
        phi_q *= (p - 1) * p.pow(e - 1);
        let mut vg = 0;
        let mut gg = g;
        while gg % p == 0 {
            gg /= p;
            vg += 1;
        }
        let er = e - vg; // exponent of p in q/g
        match er {
            0 => {}
            1 => {
                mu_qg = -mu_qg;
                phi_qg *= p - 1;
            }
            _ => {
                mu_qg = 0;
                phi_qg *= (p - 1) * p.pow(er - 1);
            }
        }
    }
    if mu_qg == 0 {
        return 0;
    }
    debug_assert_eq!(phi_q % phi_qg, 0);
    mu_qg * (phi_q / phi_qg) as i64
}

/// u64 gcd.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// μ, φ and least-prime-factor tables up to a bound, built by a linear sieve.
/// Backs the Ramanujan-coefficient series, where per-q trial division would
/// dominate the runtime.
pub struct MultTable {
    pub mu: Vec<i8>,
    pub phi: Vec<u32>,
}

pub fn mult_table(limit: usize) -> MultTable {
    let mut lpf = vec![0u32; limit + 1];
    let mut mu = vec![0i8; limit + 1];
    let mut phi = vec![0u32; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    if limit >= 1 {
        mu[1] = 1;
        phi[1] = 1;
    }
    for i in 2..=limit {
        if lpf[i] == 0 {
            lpf[i] = i as u32;
            mu[i] = -1;
            phi[i] = i as u32 - 1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > lpf[i] || ip > limit {
                break;
            }
            lpf[ip] = p;
            if i % p as usize == 0 {
                mu[ip] = 0;
                phi[ip] = phi[i] * p;
            } else {
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p - 1);
            }
        }
    }
    MultTable { mu, phi }
}
