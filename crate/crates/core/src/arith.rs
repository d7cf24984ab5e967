//! Integer primitives: valuations, S-part splits, prime-factor profiles and
//! iterated logarithms.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Error, Int, Natural, Result};

const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES_U64 {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &MR_BASES_U64 {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin with fixed bases on arbitrary integers (probable prime).
fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in MR_BASES_U64.iter().chain([41u64, 43, 47, 53, 59, 61, 67, 71].iter()) {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A finite set of primes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        for w in primes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidInput(format!("prime {} listed twice", w[0])));
            }
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Self { primes })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The first `n` primes.
    pub fn first(n: usize) -> Self {
        let primes = (2u64..).filter(|&p| is_prime_u64(p)).take(n).collect();
        Self { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// Largest prime of the set, `1` for the empty set.
    pub fn max_prime(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Product of all primes in the set.
    pub fn product(&self) -> Int {
        self.primes.iter().map(|&p| Int::from(p)).product()
    }
}

impl std::fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Decomposition `m = s_part * cofactor` relative to a [`PrimeSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPartSplit {
    /// Exponent of each prime of the set, in the set's order.
    pub exponents: Vec<u32>,
    /// Always positive.
    pub s_part: Int,
    /// Coprime to every prime of the set, carries the sign of `m`.
    pub cofactor: Int,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Divide every factor `p` out of `n` and return how many there were.
///
/// Divides by `p, p^2, p^4, ...` while possible and then walks back down, so
/// the number of big divisions is logarithmic in the exponent.
fn strip_prime(n: &mut BigUint, p: u64) -> u32 {
    let p = BigUint::from(p);
    let mut powers = vec![p];
    let mut e = 0u32;
    loop {
        let q = powers.last().unwrap();
        let (quot, rem) = n.div_rem(q);
        if !rem.is_zero() {
            break;
        }
        *n = quot;
        e += 1 << (powers.len() - 1);
        let next = q * q;
        if &next > n {
            break;
        }
        powers.push(next);
    }
    for i in (0..powers.len()).rev() {
        let (quot, rem) = n.div_rem(&powers[i]);
        if rem.is_zero() {
            *n = quot;
            e += 1 << i;
        }
    }
    e
}

/// Largest `e` with `p^e | n`.
pub fn padic_valuation(n: &Int, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_prime(p)?;
    let mut mag = n.magnitude().clone();
    Ok(strip_prime(&mut mag, p))
}

/// Valuation on machine integers, for hot loops.
pub fn valuation_u128(mut n: u128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as u128;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// S-part of a non-zero machine integer.
pub fn s_part_u128(n: u128, primes: &PrimeSet) -> u128 {
    debug_assert!(n != 0);
    let mut n = n;
    let mut s = 1u128;
    for p in primes.iter() {
        let p = p as u128;
        while n.is_multiple_of(p) {
            n /= p;
            s *= p;
        }
    }
    s
}

/// Split `m` into its S-part and an S-free cofactor.
///
/// Only the primes of `S` are trial-divided; the cofactor is never factored.
pub fn s_split(m: &Int, primes: &PrimeSet) -> Result<SPartSplit> {
    if m.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = m.magnitude().clone();
    let mut exponents = Vec::with_capacity(primes.len());
    let mut s_part = BigUint::one();
    for p in primes.iter() {
        let e = strip_prime(&mut rest, p);
        if e > 0 {
            s_part *= BigUint::from(p).pow(e);
        }
        exponents.push(e);
    }
    Ok(SPartSplit {
        exponents,
        s_part: BigInt::from_biguint(Sign::Plus, s_part),
        cofactor: BigInt::from_biguint(m.sign(), rest),
    })
}

/// `[m]_S` alone.
pub fn s_part(m: &Int, primes: &PrimeSet) -> Result<Int> {
    s_split(m, primes).map(|s| s.s_part)
}

/// Greatest prime factor, number of distinct prime factors and radical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithProfile {
    pub greatest_prime_factor: Int,
    pub distinct_prime_count: u32,
    pub radical: Int,
}

/// Limits on factorization work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division runs over all `d <= trial_bound`.
    pub trial_bound: u64,
    /// Maximum Pollard–Brent iterations per split attempt.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        Self {
            trial_bound: 1 << 16,
            rho_iterations: 1 << 22,
        }
    }
}

fn rho_u64(n: u64, c: u64, budget: u64) -> Option<u64> {
    // Brent's cycle detection with batched gcds.
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let m = 128u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
        spent += r;
        if spent > budget {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut x = BigUint::from(2u32);
    let mut y = x.clone();
    for _ in 0..budget {
        x = f(&x);
        y = f(&f(&y));
        let d = if x > y { &x - &y } else { &y - &x };
        let g = d.gcd(n);
        if g == *n {
            return None;
        }
        if !g.is_one() {
            return Some(g);
        }
    }
    None
}

fn split_composite(n: &BigUint, budget: &FactorBudget) -> Result<BigUint> {
    for c in 1..=8u64 {
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, budget.rho_iterations).map(BigUint::from),
            None => rho_big(n, c, budget.rho_iterations),
        };
        if let Some(d) = found {
            return Ok(d);
        }
    }
    Err(Error::Budget(format!("could not split {n}")))
}

/// Prime factorization of `|a|`, ascending by prime.
pub fn factorize(a: &Int, budget: &FactorBudget) -> Result<Vec<(Int, u32)>> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut n = a.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut d = 2u64;
    while d <= budget.trial_bound {
        let dd = BigUint::from(d);
        if &dd * &dd > n {
            break;
        }
        let e = {
            let mut e = 0;
            loop {
                let (q, r) = n.div_rem(&dd);
                if !r.is_zero() {
                    break;
                }
                n = q;
                e += 1;
            }
            e
        };
        if e > 0 {
            out.push((dd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if !n.is_one() {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        let trial_done = BigUint::from(budget.trial_bound);
        if &trial_done * &trial_done >= m || is_probable_prime(&m) {
            out.push((m, 1));
            continue;
        }
        let d = split_composite(&m, budget)?;
        let other = &m / &d;
        stack.push(d);
        stack.push(other);
    }
    out.sort();
    let mut merged: Vec<(Int, u32)> = Vec::new();
    for (p, e) in out {
        let p = BigInt::from_biguint(Sign::Plus, p);
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

/// `P(a)`, `omega(a)` and `Q(a)` for `a >= 1`, with `P(1) = 1`, `omega(1) = 0`.
pub fn arith_profile(a: &Int, budget: &FactorBudget) -> Result<ArithProfile> {
    if a.sign() != Sign::Plus {
        return Err(Error::InvalidInput(format!("expected a positive integer, got {a}")));
    }
    let factors = factorize(a, budget)?;
    Ok(ArithProfile {
        greatest_prime_factor: factors.last().map(|(p, _)| p.clone()).unwrap_or_else(Int::one),
        distinct_prime_count: factors.len() as u32,
        radical: factors.iter().map(|(p, _)| p).product(),
    })
}

/// The `i`-fold iterated natural logarithm.
pub fn iter_log<T: Float>(x: T, i: u32) -> Result<T> {
    if i == 0 {
        return Err(Error::Domain("iteration count must be positive".into()));
    }
    let mut v = x;
    for step in 0..i {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!("log_{i} undefined (step {step} hits a non-positive value)")));
        }
        v = v.ln();
    }
    if !(v > T::zero()) {
        return Err(Error::Domain(format!("log_{i} is not positive here")));
    }
    Ok(v)
}

/// Natural logarithm of a positive big integer, to double precision.
pub fn ln_big(n: &Int) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact test of `a^u >= b^v` for non-negative `a`, `b`.
pub fn pow_ge(a: &Natural, u: u32, b: &Natural, v: u32) -> bool {
    a.pow(u) >= b.pow(v)
}

/// `a^u >= b^v` on machine integers, falling back to big integers on overflow.
pub fn pow_ge_u128(a: u128, u: u32, b: u128, v: u32) -> bool {
    match (a.checked_pow(u), b.checked_pow(v)) {
        (Some(x), Some(y)) => x >= y,
        _ => pow_ge(&Natural::from(a), u, &Natural::from(b), v),
    }
}
