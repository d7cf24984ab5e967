//! Explicit sequences of points whose values have a large S-part.
//!
//! Three constructions: Hensel lifts of a root of a polynomial modulo `p^k`,
//! shortest vectors of the lattices `x = beta y (mod p^k)` for binary forms
//! with an irrational `p`-adic root, and the two-prime points
//! `x - beta_1 y = u p^k`, `x - beta_2 y = u q^l` for forms with two rational
//! roots. Every entry is certified by exact integer arithmetic.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ln_big, padic_valuation, s_part};
use crate::congruence::{inv_mod, roots_mod_prime_power};
use crate::forms::{binary_discriminant, poly_discriminant, rational_roots, BinaryForm, Form, IntPolynomial};
use crate::lattice::gauss_reduce;
use crate::{Error, Int, PrimeSet, Rational, Result};

/// One point of a tower.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerEntry {
    pub k: u32,
    /// Second exponent of the two-prime construction.
    pub l: Option<u32>,
    pub x: Int,
    /// `None` for polynomial towers.
    pub y: Option<Int>,
    pub value: Int,
    /// S-part of the value for the primes of the construction.
    pub s_part: Int,
    /// `log [value]_S / log |value|`.
    pub ratio_log: f64,
}

impl TowerEntry {
    /// `max(|x|, |y|)`.
    pub fn norm(&self) -> Int {
        match &self.y {
            Some(y) => self.x.abs().max(y.abs()),
            None => self.x.abs(),
        }
    }
}

fn ratio_log(s: &Int, value: &Int) -> f64 {
    let v = value.abs();
    if v <= Int::one() {
        return 0.0;
    }
    ln_big(s) / ln_big(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeMode {
    /// A root modulo `p`.
    HasRoot,
    /// `n` distinct roots modulo `p`.
    SplitsCompletely,
}

/// Primes found by [`find_good_primes`]; `complete` is false when the search
/// bound ran out first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodPrimes {
    pub primes: PrimeSet,
    pub complete: bool,
}

fn affine_and_excluded(form: &Form) -> Result<(IntPolynomial, Int)> {
    match form {
        Form::Poly(f) => {
            let d = poly_discriminant(f)?;
            if d.is_zero() {
                return Err(Error::ZeroDiscriminant);
            }
            Ok((f.clone(), f.leading() * d))
        }
        Form::Binary(b) => {
            let d = binary_discriminant(b)?;
            if d.is_zero() {
                return Err(Error::ZeroDiscriminant);
            }
            let lead = b.coeffs()[0].clone();
            if lead.is_zero() {
                return Err(Error::InvalidInput("F(1, 0) = 0: every prime divides it".into()));
            }
            let f = IntPolynomial::new(b.dehomogenize_x())?;
            Ok((f, lead * d))
        }
    }
}

/// First `count` primes up to `search_bound` not dividing the leading
/// coefficient (resp. `F(1, 0)`) or the discriminant, at which the form has
/// a root or splits into distinct linear factors.
pub fn find_good_primes(form: &Form, mode: PrimeMode, count: usize, search_bound: u64) -> Result<GoodPrimes> {
    let (f, excluded) = affine_and_excluded(form)?;
    let n = f.degree();
    let mut found = Vec::new();
    let mut p = 1u64;
    while found.len() < count {
        p = match (p + 1..=search_bound).find(|&q| crate::arith::is_prime_u64(q)) {
            Some(q) => q,
            None => break,
        };
        if (&excluded % Int::from(p)).is_zero() {
            continue;
        }
        let roots = roots_mod_prime_power(&f, p, 1)?.count();
        let ok = match mode {
            PrimeMode::HasRoot => roots > 0,
            PrimeMode::SplitsCompletely => roots == n,
        };
        if ok {
            found.push(p);
        }
    }
    let complete = found.len() == count;
    Ok(GoodPrimes { primes: PrimeSet::new(found)?, complete })
}

/// Lifts of a simple root modulo `p, p^2, ..., p^k_max`, one level at a time.
fn hensel_lifts(f: &[Int], r: &Int, p: u64, k_max: u32) -> Result<Vec<Int>> {
    let fp = IntPolynomial::new(f.to_vec())?;
    let df = IntPolynomial::new(fp.derivative())?;
    let pp = Int::from(p);
    let mut out = Vec::with_capacity(k_max as usize);
    let mut x = r.mod_floor(&pp);
    let mut modulus = pp.clone();
    let inv = inv_mod(&df.evaluate_mod(&x, &pp), &pp)
        .ok_or_else(|| Error::Domain(format!("root {x} modulo {p} is not simple")))?;
    out.push(x.clone());
    for _ in 1..k_max {
        modulus *= &pp;
        let fx = fp.evaluate(&x);
        x = (&x - fx * &inv).mod_floor(&modulus);
        out.push(x.clone());
    }
    Ok(out)
}

fn simple_roots_mod_p(f: &IntPolynomial, p: u64) -> Result<Vec<Int>> {
    let df = IntPolynomial::new(f.derivative())?;
    let pp = Int::from(p);
    Ok(roots_mod_prime_power(f, p, 1)?
        .residues
        .into_iter()
        .filter(|r| !df.evaluate_mod(r, &pp).is_zero())
        .collect())
}

/// `x_k = root (mod p^k)` with `p^k <= x_k < 2 p^k` for `k = 1..=k_max`,
/// lifting the smallest root modulo `p`.
pub fn hensel_tower_poly(f: &IntPolynomial, p: u64, k_max: u32) -> Result<Vec<TowerEntry>> {
    let d = poly_discriminant(f)?;
    let pp = Int::from(p);
    if d.is_zero() || (&d % &pp).is_zero() || (f.leading() % &pp).is_zero() {
        return Err(Error::Precondition(format!("{p} divides the leading coefficient or the discriminant")));
    }
    if k_max == 0 {
        return Ok(vec![]);
    }
    let Some(root) = simple_roots_mod_p(f, p)?.into_iter().next() else {
        return Err(Error::Precondition(format!("no root modulo {p}")));
    };
    let lifts = hensel_lifts(f.coeffs(), &root, p, k_max)?;
    let primes = PrimeSet::new(vec![p])?;
    let mut out = Vec::with_capacity(lifts.len());
    let mut pk = Int::one();
    for (i, r) in lifts.into_iter().enumerate() {
        pk *= &pp;
        let x = &pk + r;
        let value = f.evaluate(&x);
        if value.is_zero() {
            return Err(Error::Domain(format!("f vanishes at the tower point {x}")));
        }
        if !(&value % &pk).is_zero() {
            return Err(Error::Invariant(format!("p^k does not divide f({x})")));
        }
        let s = s_part(&value, &primes)?;
        if Int::from(2) * &s < x {
            return Err(Error::Invariant(format!("[f({x})]_p = {s} is below x/2")));
        }
        out.push(TowerEntry { k: i as u32 + 1, l: None, ratio_log: ratio_log(&s, &value), x, y: None, value, s_part: s });
    }
    Ok(out)
}

/// Whether `F` is a product of linear forms over `Q`.
pub fn splits_over_q(form: &BinaryForm) -> bool {
    let affine = form.dehomogenize_x();
    let deg = affine.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    rational_roots(&affine).len() + (form.degree() - deg) == form.degree()
}

/// Shortest primitive vectors of `{(x, y) : x = beta y (mod p^k)}` for an
/// irrational `p`-adic root `beta` of `F(X, 1)`.
///
/// Any common factor of the short vector is divided out; a factor `p^v`
/// lowers the certified level to `k - v`, which the entry's `k` records.
pub fn minkowski_tower_binary(form: &BinaryForm, p: u64, k_max: u32) -> Result<Vec<TowerEntry>> {
    if splits_over_q(form) {
        return Err(Error::Precondition("F splits into linear factors over Q; use the two-prime tower".into()));
    }
    let d = binary_discriminant(form)?;
    let pp = Int::from(p);
    if d.is_zero() || (&d % &pp).is_zero() {
        return Err(Error::Precondition(format!("{p} divides the discriminant")));
    }
    let affine = form.dehomogenize_x();
    let deg = affine.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let f = IntPolynomial::new(affine[..=deg].to_vec())?;
    let rational: Vec<Int> = rational_roots(f.coeffs())
        .into_iter()
        .filter_map(|r| inv_mod(r.denom(), &pp).map(|i| (r.numer() * i).mod_floor(&pp)))
        .collect();
    let root = simple_roots_mod_p(&f, p)?
        .into_iter()
        .find(|r| !rational.contains(r))
        .ok_or_else(|| Error::Precondition(format!("no irrational simple root of F(X, 1) modulo {p}")))?;
    if k_max == 0 {
        return Ok(vec![]);
    }
    let lifts = hensel_lifts(f.coeffs(), &root, p, k_max)?;
    let primes = PrimeSet::new(vec![p])?;
    let mut out = Vec::with_capacity(lifts.len());
    let mut pk = Int::one();
    for (i, beta) in lifts.into_iter().enumerate() {
        pk *= &pp;
        let k = i as u32 + 1;
        let ([v, _], _) = gauss_reduce([[pk.clone(), Int::zero()], [beta.clone(), Int::one()]])?;
        let g = v[0].gcd(&v[1]);
        let lost = padic_valuation(&g, p)?;
        let (x, y) = (&v[0] / &g, &v[1] / &g);
        let level = k - lost;
        let value = form.evaluate(&x, &y);
        if value.is_zero() {
            return Err(Error::Invariant(format!("short vector ({x}, {y}) lies on a rational root direction")));
        }
        let modulus = pp.pow(level);
        if !((&x - &beta * &y) % &modulus).is_zero() || !(&value % &modulus).is_zero() {
            return Err(Error::Invariant(format!("({x}, {y}) fails the congruence modulo {p}^{level}")));
        }
        let s = s_part(&value, &primes)?;
        out.push(TowerEntry { k: level, l: None, ratio_log: ratio_log(&s, &value), x, y: Some(y), value, s_part: s });
    }
    Ok(out)
}

/// Two rational roots of `F(X, 1)` with the clearing integer `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitData {
    pub p: u64,
    pub q: u64,
    pub beta1: Rational,
    pub beta2: Rational,
    pub u: Int,
}

/// Finds an ordered pair of rational roots for which `u` is coprime to `pq`
/// and checks that `p`, `q` divide neither the discriminant nor the leading
/// coefficient of `F(X, 1)`.
pub fn split_data(form: &BinaryForm, p: u64, q: u64) -> Result<SplitData> {
    if p == q || !crate::arith::is_prime_u64(p) || !crate::arith::is_prime_u64(q) {
        return Err(Error::InvalidInput("p and q must be distinct primes".into()));
    }
    let affine = form.dehomogenize_x();
    let roots = rational_roots(&affine);
    if roots.len() < 2 {
        return Err(Error::Precondition("F(X, 1) has fewer than two rational roots".into()));
    }
    let d = binary_discriminant(form)?;
    let lead = affine.iter().rev().find(|c| !c.is_zero()).cloned().unwrap_or_else(Int::zero);
    let pq = Int::from(p) * Int::from(q);
    if d.is_zero() || !d.gcd(&pq).is_one() || !lead.gcd(&pq).is_one() {
        return Err(Error::Precondition(format!("{p} or {q} divides the discriminant or the leading coefficient")));
    }
    for b1 in &roots {
        for b2 in &roots {
            if b1 == b2 {
                continue;
            }
            let diff = b2 - b1;
            let u = b1.denom().lcm(b2.denom()).lcm(&diff.numer().abs());
            if u.gcd(&pq).is_one() {
                return Ok(SplitData { p, q, beta1: b1.clone(), beta2: b2.clone(), u });
            }
        }
    }
    Err(Error::Precondition(format!("no pair of rational roots is admissible for ({p}, {q})")))
}

/// The smallest `l` with `p^k < q^l < q p^k`, for `k = 1..=count`.
pub fn default_schedule(p: u64, q: u64, count: u32) -> Vec<(u32, u32)> {
    let (pp, qq) = (Int::from(p), Int::from(q));
    (1..=count)
        .map(|k| {
            let pk = pp.pow(k);
            let mut l = 1;
            while qq.pow(l) <= pk {
                l += 1;
            }
            (k, l)
        })
        .collect()
}

/// Points with `x - beta_1 y = u p^k` and `x - beta_2 y = u q^l`, reduced to
/// primitive pairs, with `[F(x, y)]_{p,q} = p^k q^l` certified exactly.
pub fn split_pair_tower_binary(form: &BinaryForm, data: &SplitData, pairs: &[(u32, u32)]) -> Result<Vec<TowerEntry>> {
    let (p, q) = (Int::from(data.p), Int::from(data.q));
    let primes = PrimeSet::new(vec![data.p, data.q])?;
    let diff = &data.beta2 - &data.beta1;
    let u = Rational::from_integer(data.u.clone());
    let mut out = Vec::with_capacity(pairs.len());
    for &(k, l) in pairs {
        let (pk, ql) = (p.pow(k), q.pow(l));
        let pkr = Rational::from_integer(pk.clone());
        let qlr = Rational::from_integer(ql.clone());
        let xr = &u * (&data.beta2 * &pkr - &data.beta1 * &qlr) / &diff;
        let yr = &u * (&pkr - &qlr) / &diff;
        if !xr.is_integer() || !yr.is_integer() {
            return Err(Error::Invariant(format!("non-integral point for (k, l) = ({k}, {l})")));
        }
        let (x0, y0) = (xr.to_integer(), yr.to_integer());
        let g = x0.gcd(&y0);
        if !g.gcd(&(&p * &q)).is_one() {
            return Err(Error::Invariant(format!("gcd {g} of ({x0}, {y0}) shares a prime with pq")));
        }
        let (x, y) = (&x0 / &g, &y0 / &g);
        let value = form.evaluate(&x, &y);
        if value.is_zero() {
            return Err(Error::Invariant(format!("F vanishes at ({x}, {y})")));
        }
        let s = s_part(&value, &primes)?;
        if s != &pk * &ql {
            return Err(Error::Invariant(format!("[F({x}, {y})]_{{p,q}} = {s}, expected {}", &pk * &ql)));
        }
        out.push(TowerEntry { k, l: Some(l), ratio_log: ratio_log(&s, &value), x, y: Some(y), value, s_part: s });
    }
    Ok(out)
}

/// `max(|x|, |y|) / sqrt(p^k q^l)` for a two-prime entry.
pub fn size_ratio(entry: &TowerEntry) -> f64 {
    let n = entry.norm().to_f64().unwrap_or(f64::INFINITY);
    n / (0.5 * ln_big(&entry.s_part)).exp()
}
