//! Exact counts of points whose values have a large S-part.
//!
//! The predicate `[v]_S >= |v|^(u/w)` is decided as `[v]_S^w >= |v|^u` in
//! integers. Counters run over a grid of box sizes at once: every qualifying
//! point lands in the histogram bucket of the first grid value that contains
//! it, and prefix sums give the counts.
//!
//! Polynomial and binary counters have a sieve fast path. The valuation of
//! `f(x)` at `p` is at least `k` exactly when `x` lies in one of the residue
//! classes returned by the congruence module, so valuations are accumulated
//! along arithmetic progressions up to the level where `p^k` exceeds the box
//! width, and only points surviving every level are trial-divided. The naive
//! loops are kept as oracles.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{pow_ge, pow_ge_u128, s_part_u128, s_split};
use crate::congruence::{prim_classes_mod_prime_power, roots_mod_prime_power, s_prime_subset};
use crate::decomp::DecomposableForm;
use crate::forms::{BinaryForm, Form, IntPolynomial};
use crate::mpoly::IntForm;
use crate::{Error, Int, Natural, PrimeSet, Rational, Result};

/// Default cap on the number of points a counter may visit.
pub const DEFAULT_DENSITY_BUDGET: u128 = 1 << 36;

/// A positive rational exponent `u / w` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon {
    num: u32,
    den: u32,
}

impl Epsilon {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidInput("epsilon must be a positive rational".into()));
        }
        let g = num.gcd(&den);
        Ok(Self { num: num / g, den: den / g })
    }

    /// Parses `"u/w"` or `"u"`.
    pub fn parse(s: &str) -> Result<Self> {
        let r = crate::parse_rational(s)?;
        let num = r.numer().to_u32().ok_or_else(|| Error::InvalidInput(format!("epsilon {s} out of range")))?;
        let den = r.denom().to_u32().ok_or_else(|| Error::InvalidInput(format!("epsilon {s} out of range")))?;
        Self::new(num, den)
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.into(), self.den.into())
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// `s^den >= |v|^num` for an S-part `s` of a non-zero machine value.
    fn holds_u128(&self, s: u128, abs: u128) -> bool {
        pow_ge_u128(s, self.den, abs, self.num)
    }

    fn holds_big(&self, value: &Int, primes: &PrimeSet) -> bool {
        let split = s_split(value, primes).expect("non-zero value");
        let s = split.s_part.magnitude().clone();
        pow_ge(&s, self.den, value.magnitude(), self.num)
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Whether a non-zero value passes the S-part test.
pub fn large_s_part(value: &Int, primes: &PrimeSet, eps: Epsilon) -> bool {
    assert!(!value.is_zero());
    match value.abs().to_u128() {
        Some(a) => eps.holds_u128(s_part_u128(a, primes), a),
        None => eps.holds_big(value, primes),
    }
}

fn check_grid(grid: &[u64]) -> Result<()> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    if grid.last().is_some_and(|&b| b > i64::MAX as u64 / 4) {
        return Err(Error::InvalidInput("box size too large".into()));
    }
    Ok(())
}

fn check_budget(points: u128, budget: u128) -> Result<()> {
    if points > budget {
        return Err(Error::Budget(format!("{points} points exceed the budget of {budget}")));
    }
    Ok(())
}

/// Histogram buckets to cumulative counts.
fn cumulative(hist: Vec<u64>) -> Vec<u64> {
    hist.into_iter()
        .scan(0u64, |acc, h| {
            *acc += h;
            Some(*acc)
        })
        .collect()
}

fn bucket(grid: &[u64], norm: u64) -> usize {
    grid.partition_point(|&b| b < norm)
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `s = prod p^v`, with a big-integer fallback.
fn s_part_from_valuations(primes: &[u64], vals: &[u32]) -> std::result::Result<u128, Natural> {
    let mut s: u128 = 1;
    for (&p, &v) in primes.iter().zip(vals) {
        match (p as u128).checked_pow(v).and_then(|pv| s.checked_mul(pv)) {
            Some(t) => s = t,
            None => {
                return Err(primes.iter().zip(vals).map(|(&p, &v)| BigUint::from(p).pow(v)).product());
            }
        }
    }
    Ok(s)
}

fn passes(eps: Epsilon, s: std::result::Result<u128, Natural>, value: &Int) -> bool {
    match (s, value.abs().to_u128()) {
        (Ok(s), Some(a)) => eps.holds_u128(s, a),
        (Ok(s), None) => pow_ge(&Natural::from(s), eps.den, value.magnitude(), eps.num),
        (Err(s), _) => pow_ge(&s, eps.den, value.magnitude(), eps.num),
    }
}

fn trial_valuation(value: &Int, p: u64) -> u32 {
    crate::arith::padic_valuation(value, p).expect("non-zero value")
}

// ---------------------------------------------------------------------------
// Polynomials

/// Residues of `x` with `v_p(f(x)) >= c + k`, for `k = 1..levels`, where `c`
/// is the content valuation.
struct PolySieve {
    p: u64,
    content: u32,
    /// `levels[k-1] = (p^k, residues)`.
    levels: Vec<(u64, Vec<u64>)>,
}

fn content_split(coeffs: &[Int], p: u64) -> (u32, Vec<Int>) {
    let pp = Int::from(p);
    let mut c = 0;
    let mut cur = coeffs.to_vec();
    while cur.iter().all(|a| (a % &pp).is_zero()) && cur.iter().any(|a| !a.is_zero()) {
        cur = cur.iter().map(|a| a / &pp).collect();
        c += 1;
    }
    (c, cur)
}

fn top_level(p: u64, width: u64) -> u32 {
    let mut k = 1;
    let mut pk = p as u128;
    while pk < width as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

fn poly_sieves(f: &IntPolynomial, primes: &PrimeSet, width: u64) -> Result<Vec<PolySieve>> {
    primes
        .iter()
        .map(|p| {
            let (content, reduced) = content_split(f.coeffs(), p);
            let g = IntPolynomial::new(reduced)?;
            let top = top_level(p, width);
            let mut levels = Vec::with_capacity(top as usize);
            for k in 1..=top {
                let rc = roots_mod_prime_power(&g, p, k)?;
                let modulus = rc.modulus.to_u64().ok_or_else(|| Error::Budget("modulus overflow".into()))?;
                let residues = rc.residues.iter().map(|r| r.to_u64().unwrap()).collect();
                levels.push((modulus, residues));
            }
            Ok(PolySieve { p, content, levels })
        })
        .collect()
}

fn poly_value(f: &IntPolynomial, x: i64) -> Int {
    match f.evaluate_i128(x as i128) {
        Some(v) => Int::from(v),
        None => f.evaluate(&Int::from(x)),
    }
}

fn poly_hist_block(
    f: &IntPolynomial,
    primes: &PrimeSet,
    eps: Epsilon,
    grid: &[u64],
    sieves: &[PolySieve],
    lo: i64,
    hi: i64,
) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    let ps = primes.primes();
    let mut vals = vec![vec![0u32; len]; sieves.len()];
    for (sv, out) in sieves.iter().zip(vals.iter_mut()) {
        for (modulus, residues) in &sv.levels {
            let m = *modulus as i64;
            for &r in residues {
                let start = lo + (r as i64 - lo).rem_euclid(m);
                let mut x = start;
                while x <= hi {
                    out[(x - lo) as usize] += 1;
                    x += m;
                }
            }
        }
    }
    let mut hist = vec![0u64; grid.len()];
    let mut v = vec![0u32; ps.len()];
    for i in 0..len {
        let x = lo + i as i64;
        let value = poly_value(f, x);
        if value.is_zero() {
            continue;
        }
        for (j, sv) in sieves.iter().enumerate() {
            v[j] = if vals[j][i] as usize == sv.levels.len() {
                trial_valuation(&value, sv.p)
            } else {
                sv.content + vals[j][i]
            };
        }
        if passes(eps, s_part_from_valuations(ps, &v), &value) {
            hist[bucket(grid, x.unsigned_abs())] += 1;
        }
    }
    hist
}

/// `N(f, S, eps, B)` for every `B` of an increasing grid.
pub fn count_n_poly_grid(f: &IntPolynomial, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Result<Vec<u64>> {
    check_grid(grid)?;
    let Some(&bmax) = grid.last() else { return Ok(vec![]) };
    check_budget(2 * bmax as u128 + 1, DEFAULT_DENSITY_BUDGET)?;
    let sieves = match poly_sieves(f, primes, 2 * bmax + 1) {
        Ok(s) => s,
        Err(e) if e.is_budget() || matches!(e, Error::InvalidInput(_)) => {
            return count_n_poly_grid_naive(f, primes, eps, grid);
        }
        Err(e) => return Err(e),
    };
    const BLOCK: i64 = 1 << 15;
    let b = bmax as i64;
    let starts: Vec<i64> = (-b..=b).step_by(BLOCK as usize).collect();
    let hist = starts
        .par_iter()
        .map(|&lo| poly_hist_block(f, primes, eps, grid, &sieves, lo, (lo + BLOCK - 1).min(b)))
        .reduce(|| vec![0; grid.len()], merge);
    Ok(cumulative(hist))
}

pub fn count_n_poly(f: &IntPolynomial, primes: &PrimeSet, eps: Epsilon, b: u64) -> Result<u64> {
    Ok(count_n_poly_grid(f, primes, eps, &[b])?[0])
}

/// Direct loop over `|x| <= B` with trial division.
pub fn count_n_poly_grid_naive(f: &IntPolynomial, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Result<Vec<u64>> {
    check_grid(grid)?;
    let Some(&bmax) = grid.last() else { return Ok(vec![]) };
    let b = bmax as i64;
    let hist = (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; grid.len()],
            |mut h, x| {
                let value = poly_value(f, x);
                if !value.is_zero() && large_s_part(&value, primes, eps) {
                    h[bucket(grid, x.unsigned_abs())] += 1;
                }
                h
            },
        )
        .reduce(|| vec![0; grid.len()], merge);
    Ok(cumulative(hist))
}

pub fn count_n_poly_naive(f: &IntPolynomial, primes: &PrimeSet, eps: Epsilon, b: u64) -> Result<u64> {
    Ok(count_n_poly_grid_naive(f, primes, eps, &[b])?[0])
}

// ---------------------------------------------------------------------------
// Binary forms

/// Slopes `z` with `v_p(F(x, y)) >= c + k` whenever `x = z y (mod p^k)` and
/// `p` does not divide `y`.
struct BinarySieve {
    p: u64,
    content: u32,
    levels: Vec<(u64, Vec<u64>)>,
}

fn binary_sieves(form: &BinaryForm, primes: &PrimeSet, width: u64) -> Result<Vec<BinarySieve>> {
    primes
        .iter()
        .map(|p| {
            let (content, reduced) = content_split(form.coeffs(), p);
            let g = BinaryForm::new(reduced)?;
            let top = top_level(p, width);
            let mut levels = Vec::with_capacity(top as usize);
            for k in 1..=top {
                let cls = prim_classes_mod_prime_power(&g, p, k)?;
                let modulus = cls.modulus.to_u64().ok_or_else(|| Error::Budget("modulus overflow".into()))?;
                let slopes = cls
                    .representatives
                    .iter()
                    .filter(|(_, y)| y.is_one())
                    .map(|(z, _)| z.mod_floor(&cls.modulus).to_u64().unwrap())
                    .collect();
                levels.push((modulus, slopes));
            }
            Ok(BinarySieve { p, content, levels })
        })
        .collect()
}

fn binary_value(form: &BinaryForm, x: i64, y: i64) -> Int {
    match form.evaluate_i128(x as i128, y as i128) {
        Some(v) => Int::from(v),
        None => form.evaluate(&Int::from(x), &Int::from(y)),
    }
}

fn gcd_i64(a: i64, b: i64) -> u64 {
    a.unsigned_abs().gcd(&b.unsigned_abs())
}

/// Histogram of one row `y >= 1` over `|x| <= B`, primitive points only.
fn binary_row(
    form: &BinaryForm,
    primes: &PrimeSet,
    eps: Epsilon,
    grid: &[u64],
    sieves: &[BinarySieve],
    y: i64,
    b: i64,
) -> Vec<u64> {
    let len = (2 * b + 1) as usize;
    let ps = primes.primes();
    let mut vals = vec![vec![0u32; len]; sieves.len()];
    for (sv, out) in sieves.iter().zip(vals.iter_mut()) {
        if (y as u64).is_multiple_of(sv.p) {
            continue;
        }
        for (modulus, slopes) in &sv.levels {
            let m = *modulus as i128;
            for &z in slopes {
                let r = (z as i128 * y as i128).rem_euclid(m) as i64;
                let mm = m as i64;
                let mut x = -b + (r + b).rem_euclid(mm);
                while x <= b {
                    out[(x + b) as usize] += 1;
                    x += mm;
                }
            }
        }
    }
    let mut hist = vec![0u64; grid.len()];
    let mut v = vec![0u32; ps.len()];
    for i in 0..len {
        let x = i as i64 - b;
        if gcd_i64(x, y) != 1 {
            continue;
        }
        let value = binary_value(form, x, y);
        if value.is_zero() {
            continue;
        }
        for (j, sv) in sieves.iter().enumerate() {
            v[j] = if (y as u64).is_multiple_of(sv.p) || vals[j][i] as usize == sv.levels.len() {
                trial_valuation(&value, sv.p)
            } else {
                sv.content + vals[j][i]
            };
        }
        if passes(eps, s_part_from_valuations(ps, &v), &value) {
            hist[bucket(grid, x.unsigned_abs().max(y as u64))] += 1;
        }
    }
    hist
}

/// Primitive points with `y = 0`: `(+-1, 0)`.
fn binary_axis(form: &BinaryForm, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Vec<u64> {
    let mut hist = vec![0u64; grid.len()];
    let value = binary_value(form, 1, 0);
    if !grid.is_empty() && grid[grid.len() - 1] >= 1 && !value.is_zero() && large_s_part(&value, primes, eps) {
        hist[bucket(grid, 1)] += 1;
    }
    hist
}

/// `N(F, S, eps, B)` over primitive pairs with `max(|x|, |y|) <= B`, for
/// every `B` of an increasing grid. Uses `|F(-x, -y)| = |F(x, y)|` and
/// counts the half-plane `y > 0` plus `(1, 0)`, then doubles.
pub fn count_n_binary_grid(form: &BinaryForm, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Result<Vec<u64>> {
    check_grid(grid)?;
    let Some(&bmax) = grid.last() else { return Ok(vec![]) };
    let width = 2 * bmax as u128 + 1;
    check_budget(width * width, DEFAULT_DENSITY_BUDGET)?;
    let sieves = match binary_sieves(form, primes, 2 * bmax + 1) {
        Ok(s) => s,
        Err(e) if e.is_budget() || matches!(e, Error::ZeroDiscriminant | Error::InvalidInput(_)) => {
            return count_n_binary_grid_naive(form, primes, eps, grid);
        }
        Err(e) => return Err(e),
    };
    let b = bmax as i64;
    let rows = (1..=b)
        .into_par_iter()
        .map(|y| binary_row(form, primes, eps, grid, &sieves, y, b))
        .reduce(|| vec![0; grid.len()], merge);
    let hist = merge(rows, binary_axis(form, primes, eps, grid));
    Ok(cumulative(hist).into_iter().map(|c| 2 * c).collect())
}

pub fn count_n_binary(form: &BinaryForm, primes: &PrimeSet, eps: Epsilon, b: u64) -> Result<u64> {
    Ok(count_n_binary_grid(form, primes, eps, &[b])?[0])
}

/// Direct double loop over the whole box.
pub fn count_n_binary_grid_naive(
    form: &BinaryForm,
    primes: &PrimeSet,
    eps: Epsilon,
    grid: &[u64],
) -> Result<Vec<u64>> {
    check_grid(grid)?;
    let Some(&bmax) = grid.last() else { return Ok(vec![]) };
    let b = bmax as i64;
    let hist = (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; grid.len()],
            |mut h, y| {
                for x in -b..=b {
                    if gcd_i64(x, y) != 1 {
                        continue;
                    }
                    let value = binary_value(form, x, y);
                    if !value.is_zero() && large_s_part(&value, primes, eps) {
                        h[bucket(grid, x.unsigned_abs().max(y.unsigned_abs()))] += 1;
                    }
                }
                h
            },
        )
        .reduce(|| vec![0; grid.len()], merge);
    Ok(cumulative(hist))
}

pub fn count_n_binary_naive(form: &BinaryForm, primes: &PrimeSet, eps: Epsilon, b: u64) -> Result<u64> {
    Ok(count_n_binary_grid_naive(form, primes, eps, &[b])?[0])
}

// ---------------------------------------------------------------------------
// Forms in m variables

/// Calls `visit` on every primitive `x` with `max |x_i| <= B` and the sup norm.
fn for_each_primitive(m: usize, b: i64, first: i64, mut visit: impl FnMut(&[i64], u64)) {
    let mut x = vec![-b; m];
    x[0] = first;
    loop {
        let g = x.iter().fold(0u64, |g, &xi| g.gcd(&xi.unsigned_abs()));
        if g == 1 {
            let norm = x.iter().map(|v| v.unsigned_abs()).max().unwrap();
            visit(&x, norm);
        }
        let mut i = m - 1;
        loop {
            if i == 0 {
                return;
            }
            if x[i] < b {
                x[i] += 1;
                break;
            }
            x[i] = -b;
            i -= 1;
        }
    }
}

fn int_form_value(form: &IntForm, x: &[i64]) -> Int {
    match form.evaluate_i128(x) {
        Some(v) => Int::from(v),
        None => form.evaluate(&x.iter().map(|&v| Int::from(v)).collect::<Vec<_>>()),
    }
}

fn int_form_hist(
    form: &IntForm,
    grid: &[u64],
    budget: u128,
    test: impl Fn(&Int) -> bool + Sync,
) -> Result<Vec<u64>> {
    check_grid(grid)?;
    let Some(&bmax) = grid.last() else { return Ok(vec![]) };
    let m = form.nvars();
    let width = 2 * bmax as u128 + 1;
    let points = width.checked_pow(m as u32).unwrap_or(u128::MAX);
    check_budget(points, budget)?;
    let b = bmax as i64;
    let hist = (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; grid.len()],
            |mut h, first| {
                for_each_primitive(m, b, first, |x, norm| {
                    let value = int_form_value(form, x);
                    if !value.is_zero() && test(&value) {
                        h[bucket(grid, norm)] += 1;
                    }
                });
                h
            },
        )
        .reduce(|| vec![0; grid.len()], merge);
    Ok(cumulative(hist))
}

/// `N(F, S, eps, B)` over primitive `x` in `Z^m` with `max |x_i| <= B`.
pub fn count_n_int_form_grid(
    form: &IntForm,
    primes: &PrimeSet,
    eps: Epsilon,
    grid: &[u64],
    budget: u128,
) -> Result<Vec<u64>> {
    int_form_hist(form, grid, budget, |v| large_s_part(v, primes, eps))
}

pub fn count_n_decomp(form: &DecomposableForm, primes: &PrimeSet, eps: Epsilon, b: u64) -> Result<u64> {
    Ok(count_n_int_form_grid(form.integer_form(), primes, eps, &[b], DEFAULT_DENSITY_BUDGET)?[0])
}

/// Points counted by [`count_small_svalue_points`], with the number that
/// sit on the boundary of the box (a sign that the box truncates the set).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallValueCount {
    pub count: u64,
    pub on_boundary: u64,
}

/// Primitive `x` with `max |x_i| <= B`, `F(x) != 0` and `|F(x)| / [F(x)]_S <= M`.
pub fn count_small_svalue_points(form: &IntForm, primes: &PrimeSet, bound: &Int, b: u64) -> Result<SmallValueCount> {
    if b == 0 {
        return Ok(SmallValueCount { count: 0, on_boundary: 0 });
    }
    let grid: Vec<u64> = if b > 1 { vec![b - 1, b] } else { vec![b] };
    let test = |v: &Int| s_split(v, primes).map(|s| s.cofactor.abs() <= *bound).unwrap_or(false);
    let counts = int_form_hist(form, &grid, DEFAULT_DENSITY_BUDGET, test)?;
    let count = *counts.last().unwrap();
    let inner = if grid.len() == 2 { counts[0] } else { 0 };
    Ok(SmallValueCount { count, on_boundary: count - inner })
}

// ---------------------------------------------------------------------------
// Weighted tuples

/// Non-negative integer tuples `u` with `A <= sum a_i u_i <= A + 2 sum a_i`.
pub fn count_weighted_tuples(alphas: &[f64], a: f64) -> Result<u64> {
    if alphas.is_empty() || alphas.iter().any(|&x| !(x > 0.0 && x.is_finite())) || !a.is_finite() {
        return Err(Error::InvalidInput("weights must be positive and finite".into()));
    }
    let hi = a + 2.0 * alphas.iter().sum::<f64>();
    fn rec(alphas: &[f64], lo: f64, hi: f64) -> u64 {
        let (&last, rest) = alphas.split_last().unwrap();
        if rest.is_empty() {
            let from = (lo / last).ceil().max(0.0);
            let to = (hi / last).floor();
            return if to >= from { (to - from) as u64 + 1 } else { 0 };
        }
        let a0 = rest[0];
        let mut total = 0;
        let mut u = 0u64;
        while u as f64 * a0 <= hi {
            let used = u as f64 * a0;
            total += rec_tail(&alphas[1..], lo - used, hi - used);
            u += 1;
        }
        total
    }
    fn rec_tail(alphas: &[f64], lo: f64, hi: f64) -> u64 {
        if hi < 0.0 {
            return 0;
        }
        rec(alphas, lo, hi)
    }
    Ok(rec(alphas, a, hi))
}

// ---------------------------------------------------------------------------
// Reports

/// The family a density query ranges over.
#[derive(Debug, Clone)]
pub enum DensityForm {
    Poly(IntPolynomial),
    Binary(BinaryForm),
    Decomposable(IntForm),
}

impl DensityForm {
    pub fn degree(&self) -> usize {
        match self {
            DensityForm::Poly(f) => f.degree(),
            DensityForm::Binary(f) => f.degree(),
            DensityForm::Decomposable(f) => f.degree(),
        }
    }

    pub fn from_form(form: &Form) -> Self {
        match form {
            Form::Poly(f) => DensityForm::Poly(f.clone()),
            Form::Binary(f) => DensityForm::Binary(f.clone()),
        }
    }

    pub fn counts(&self, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Result<Vec<u64>> {
        match self {
            DensityForm::Poly(f) => count_n_poly_grid(f, primes, eps, grid),
            DensityForm::Binary(f) => count_n_binary_grid(f, primes, eps, grid),
            DensityForm::Decomposable(f) => count_n_int_form_grid(f, primes, eps, grid, DEFAULT_DENSITY_BUDGET),
        }
    }
}

/// `b0, b0 * r, ...` rounded, strictly increasing, up to `bmax`.
pub fn geometric_grid(b0: u64, bmax: u64, steps_per_doubling: u32) -> Result<Vec<u64>> {
    if b0 == 0 || bmax < b0 || steps_per_doubling == 0 {
        return Err(Error::InvalidInput("geometric grid needs 1 <= b0 <= bmax and a positive step count".into()));
    }
    let ratio = 2f64.powf(1.0 / f64::from(steps_per_doubling));
    let mut grid = Vec::new();
    let mut x = b0 as f64;
    while x.round() as u64 <= bmax {
        let v = x.round() as u64;
        if grid.last().is_none_or(|&l| l < v) {
            grid.push(v);
        }
        x *= ratio;
    }
    if grid.last() != Some(&bmax) && bmax as f64 <= x {
        grid.push(bmax);
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    /// `None` for families without an `s'` (forms in more than two variables).
    pub s_prime: Option<usize>,
    pub model: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Extremes of the ratios over the upper half of the grid.
    pub tail_min: f64,
    pub tail_max: f64,
    /// When `s' = 0`: the first grid value from which the counts stay constant.
    pub stable_from: Option<u64>,
    pub warnings: Vec<String>,
}

impl CountReport {
    pub fn finite_branch(&self) -> bool {
        self.s_prime == Some(0)
    }

    pub fn band(&self) -> f64 {
        self.tail_max / self.tail_min
    }
}

/// Counts against the model law on a grid.
///
/// Polynomials: `B^(1 - n eps) (log B)^(s' - 1)`. Binary forms:
/// `B^(2 - n eps) (log B)^(s' - 1)`. Forms in `m` variables: the upper bound
/// `B^(m (1 - eps))`. With `s' = 0` the model is `1` and the report records
/// where the counts stop growing instead.
pub fn asymptotic_report(form: &DensityForm, primes: &PrimeSet, eps: Epsilon, grid: &[u64]) -> Result<CountReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let n = form.degree() as f64;
    let e = eps.to_f64();
    let mut warnings = Vec::new();
    let (s_prime, exponent) = match form {
        DensityForm::Poly(f) => (Some(s_prime_subset(&Form::Poly(f.clone()), primes)?.s_prime()), 1.0 - n * e),
        DensityForm::Binary(f) => {
            if f.degree() < 3 {
                warnings.push("binary law is stated for degree at least 3".into());
            }
            (Some(s_prime_subset(&Form::Binary(f.clone()), primes)?.s_prime()), 2.0 - n * e)
        }
        DensityForm::Decomposable(f) => (None, f.nvars() as f64 * (1.0 - e)),
    };
    if !matches!(form, DensityForm::Decomposable(_)) && e * n >= 1.0 {
        warnings.push(format!("epsilon {eps} is not below 1/n"));
    }
    let counts = form.counts(primes, eps, grid)?;
    let model: Vec<f64> = grid
        .iter()
        .map(|&b| match s_prime {
            Some(0) => 1.0,
            Some(s) => (b as f64).powf(exponent) * (b as f64).ln().powi(s as i32 - 1),
            None => (b as f64).powf(exponent),
        })
        .collect();
    let ratios: Vec<f64> = counts.iter().zip(&model).map(|(&c, &m)| c as f64 / m).collect();
    let tail = &ratios[ratios.len() / 2..];
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stable_from = if s_prime == Some(0) {
        let last = *counts.last().unwrap();
        let i = counts.iter().rposition(|&c| c != last).map_or(0, |i| i + 1);
        Some(grid[i])
    } else {
        None
    };
    Ok(CountReport { grid: grid.to_vec(), counts, s_prime, model, ratios, tail_min, tail_max, stable_from, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::IntForm;

    fn ps(v: &[u64]) -> PrimeSet {
        PrimeSet::new(v.to_vec()).unwrap()
    }

    fn eps(u: u32, w: u32) -> Epsilon {
        Epsilon::new(u, w).unwrap()
    }

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn bin(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    #[test]
    fn poly_examples() {
        let f = poly(&[1, 0, 1]);
        assert_eq!(count_n_poly(&f, &ps(&[5]), eps(1, 2), 10).unwrap(), 7);
        assert_eq!(count_n_poly(&f, &PrimeSet::empty(), eps(1, 2), 10).unwrap(), 1);
        let g = poly(&[0, 1, 1]);
        assert_eq!(count_n_poly(&g, &ps(&[2]), eps(1, 1), 2).unwrap(), 2);
    }

    #[test]
    fn binary_examples() {
        assert_eq!(count_n_binary(&bin(&[0, 1, 1, 0]), &ps(&[2]), eps(1, 3), 2).unwrap(), 10);
        assert_eq!(count_n_binary(&bin(&[1, 0, 1]), &PrimeSet::empty(), eps(1, 2), 1).unwrap(), 4);
        assert_eq!(count_n_binary(&bin(&[1, 0, 0, -2]), &ps(&[2]), eps(1, 3), 1).unwrap(), 6);
    }

    #[test]
    fn fast_paths_match_oracles() {
        let grid: Vec<u64> = vec![3, 10, 40, 150, 400];
        let polys = [poly(&[1, 0, 1]), poly(&[0, 1, 1]), poly(&[-2, 0, 1]), poly(&[6, 0, 0, 4]), poly(&[0, 0, 2, 3, 1])];
        for f in &polys {
            for s in [&[2u64, 3][..], &[5, 13], &[2, 3, 5, 7]] {
                for e in [eps(1, 4), eps(1, 2), eps(1, 1)] {
                    assert_eq!(
                        count_n_poly_grid(f, &ps(s), e, &grid).unwrap(),
                        count_n_poly_grid_naive(f, &ps(s), e, &grid).unwrap(),
                        "{f:?} {s:?} {e}"
                    );
                }
            }
        }
        let grid: Vec<u64> = vec![2, 7, 20, 60];
        let forms = [bin(&[0, 1, 1, 0]), bin(&[1, 0, 1]), bin(&[1, 0, 0, -2]), bin(&[4, 0, -8]), bin(&[2, 1, 3, 5])];
        for f in &forms {
            for s in [&[2u64, 3][..], &[5, 13], &[2, 3, 5, 7]] {
                for e in [eps(1, 6), eps(1, 3), eps(1, 2)] {
                    assert_eq!(
                        count_n_binary_grid(f, &ps(s), e, &grid).unwrap(),
                        count_n_binary_grid_naive(f, &ps(s), e, &grid).unwrap(),
                        "{f:?} {s:?} {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_discriminant_falls_back() {
        let f = bin(&[0, 0, 1, 0, 0]);
        let s = ps(&[2, 3]);
        assert_eq!(
            count_n_binary_grid(&f, &s, eps(1, 4), &[5, 9]).unwrap(),
            count_n_binary_grid_naive(&f, &s, eps(1, 4), &[5, 9]).unwrap()
        );
    }

    #[test]
    fn decomposable_examples() {
        let cubic = IntForm::from_binary(&bin(&[1, 0, 0, -2]));
        assert_eq!(count_n_int_form_grid(&cubic, &PrimeSet::empty(), eps(1, 2), &[1], 1 << 20).unwrap(), vec![4]);
        let pell = IntForm::from_binary(&bin(&[1, 0, -2]));
        assert_eq!(count_n_int_form_grid(&pell, &ps(&[2]), eps(1, 2), &[1], 1 << 20).unwrap(), vec![8]);
        assert_eq!(count_n_int_form_grid(&pell, &ps(&[2]), eps(1, 2), &[], 1 << 20).unwrap(), Vec::<u64>::new());
        assert!(count_n_int_form_grid(&pell, &ps(&[2]), eps(1, 2), &[1000], 100).unwrap_err().is_budget());
    }

    #[test]
    fn int_form_matches_binary_counter() {
        let f = bin(&[1, 2, -3, 5]);
        let s = ps(&[2, 5]);
        let a = count_n_int_form_grid(&IntForm::from_binary(&f), &s, eps(1, 5), &[4, 12], 1 << 20).unwrap();
        assert_eq!(a, count_n_binary_grid_naive(&f, &s, eps(1, 5), &[4, 12]).unwrap());
    }

    #[test]
    fn small_value_points() {
        let cubic = IntForm::from_binary(&bin(&[1, 0, 0, -2]));
        let three = Int::from(3);
        assert_eq!(count_small_svalue_points(&cubic, &PrimeSet::empty(), &three, 2).unwrap().count, 8);
        let r = count_small_svalue_points(&cubic, &PrimeSet::empty(), &three, 5).unwrap();
        assert_eq!((r.count, r.on_boundary), (10, 2));
        assert_eq!(count_small_svalue_points(&cubic, &ps(&[2]), &Int::zero(), 4).unwrap().count, 0);
    }

    #[test]
    fn weighted_tuples() {
        assert_eq!(count_weighted_tuples(&[1.0], 5.0).unwrap(), 3);
        assert_eq!(count_weighted_tuples(&[1.0, 1.0], 0.0).unwrap(), 15);
        let n = count_weighted_tuples(&[2f64.ln(), 3f64.ln()], 10.0).unwrap();
        // Brute force over a generous range.
        let (a, b) = (2f64.ln(), 3f64.ln());
        let hi = 10.0 + 2.0 * (a + b);
        let mut brute = 0;
        for u in 0..100 {
            for v in 0..100 {
                let s = u as f64 * a + v as f64 * b;
                if (10.0..=hi).contains(&s) {
                    brute += 1;
                }
            }
        }
        assert!(n >= 1);
        assert_eq!(n, brute);
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!(Epsilon::parse("2/8").unwrap(), eps(1, 4));
        assert!(Epsilon::parse("0").is_err());
        assert!(Epsilon::parse("-1/2").is_err());
    }

    #[test]
    fn monotone_in_b_and_epsilon() {
        let f = poly(&[1, 0, 1]);
        let s = ps(&[5, 13]);
        let grid = geometric_grid(4, 4096, 2).unwrap();
        let c1 = count_n_poly_grid(&f, &s, eps(1, 4), &grid).unwrap();
        let c2 = count_n_poly_grid(&f, &s, eps(1, 3), &grid).unwrap();
        assert!(c1.windows(2).all(|w| w[0] <= w[1]));
        assert!(c1.iter().zip(&c2).all(|(a, b)| a >= b));
    }

    #[test]
    fn even_polynomial_symmetry() {
        let f = poly(&[1, 0, 1]);
        let s = ps(&[5]);
        let total = count_n_poly(&f, &s, eps(1, 2), 50).unwrap();
        let positive = (1..=50).filter(|&x| large_s_part(&Int::from(x * x + 1), &s, eps(1, 2))).count() as u64;
        assert_eq!(total, 2 * positive + 1);
    }

    #[test]
    fn finite_branch_report() {
        let f = DensityForm::Poly(poly(&[1, 0, 1]));
        let r = asymptotic_report(&f, &ps(&[3]), eps(1, 4), &geometric_grid(8, 8192, 1).unwrap()).unwrap();
        assert!(r.finite_branch());
        assert!(r.stable_from.unwrap() <= 10_000);
    }

    #[test]
    fn grid_shape() {
        assert_eq!(geometric_grid(1024, 4096, 1).unwrap(), vec![1024, 2048, 4096]);
        assert!(geometric_grid(0, 10, 1).is_err());
    }
}
