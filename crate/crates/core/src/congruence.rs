//! Roots of polynomial congruences modulo prime powers.
//!
//! Roots modulo `p^(j+1)` are obtained from roots modulo `p^j`: a root with
//! `f'(x)` a unit has exactly one lift (Hensel), any other root lifts either
//! to all `p` candidates or to none, decided by `f(x) mod p^(j+1)`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, padic_valuation, PrimeSet};
use crate::forms::{binary_discriminant, poly_discriminant, unimodular_transform, BinaryForm, Form, IntPolynomial, Matrix2};
use crate::{Error, Int, Result};

/// Largest prime for which roots modulo `p` are found by exhaustive search.
pub const MAX_SEARCH_PRIME: u64 = 1 << 24;

/// Cap on the number of residues carried through a lift.
pub const MAX_RESIDUES: usize = 1 << 22;

/// Roots of `f` modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCount {
    pub p: u64,
    pub k: u32,
    pub modulus: Int,
    /// Ascending residues in `[0, p^k)`.
    pub residues: Vec<Int>,
    /// `r(f, a, p^k)` for each root `a` modulo `p`.
    pub per_branch: BTreeMap<u64, usize>,
}

impl RootCount {
    pub fn count(&self) -> usize {
        self.residues.len()
    }
}

/// Primitive classes `(x : y)` modulo `p^k` with `F(x, y) = 0 (mod p^k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimClassCount {
    pub p: u64,
    pub k: u32,
    pub modulus: Int,
    pub count: usize,
    /// One pair per class, `(z, 1)` or `(1, z)` with `p | z`, sorted.
    pub representatives: Vec<(Int, Int)>,
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(())
}

fn roots_mod_p(coeffs: &[Int], p: u64) -> Result<Vec<u64>> {
    if p > MAX_SEARCH_PRIME {
        return Err(Error::InvalidInput(format!("root search modulo {p} exceeds {MAX_SEARCH_PRIME}")));
    }
    let pb = Int::from(p);
    let red: Vec<u128> = coeffs.iter().map(|c| c.mod_floor(&pb).to_u128().unwrap()).collect();
    let p128 = p as u128;
    Ok((0..p)
        .filter(|&x| {
            let mut acc = 0u128;
            for c in red.iter().rev() {
                acc = (acc * x as u128 + c) % p128;
            }
            acc == 0
        })
        .collect())
}

fn eval_mod(coeffs: &[Int], x: &Int, m: &Int) -> Int {
    let mut acc = Int::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

fn derivative(coeffs: &[Int]) -> Vec<Int> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Int::from(i)).collect()
}

/// Modular inverse of a unit.
pub(crate) fn inv_mod(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Lift-and-branch on raw ascending coefficients that are not all divisible by `p`.
fn lift_roots(coeffs: &[Int], p: u64, k: u32) -> Result<(Vec<Int>, BTreeMap<u64, usize>)> {
    let pb = Int::from(p);
    let deriv = derivative(coeffs);
    let base = roots_mod_p(coeffs, p)?;
    let mut per_branch = BTreeMap::new();
    let mut all = Vec::new();
    for a in base {
        let mut level = vec![Int::from(a)];
        let mut pj = pb.clone();
        for _ in 1..k {
            let pj1 = &pj * &pb;
            let mut next = Vec::new();
            for r in &level {
                let fr = eval_mod(coeffs, r, &pj1);
                let dr = eval_mod(&deriv, r, &pb);
                if !dr.is_zero() {
                    // f(r + t p^j) = f(r) + t p^j f'(r)  (mod p^(j+1))
                    let quot = &fr / &pj;
                    let t = (-quot * inv_mod(&dr, &pb).expect("unit")).mod_floor(&pb);
                    next.push(r + t * &pj);
                } else if fr.is_zero() {
                    for t in 0..p {
                        next.push(r + Int::from(t) * &pj);
                    }
                }
                if next.len() > MAX_RESIDUES {
                    return Err(Error::Budget(format!("more than {MAX_RESIDUES} residues modulo {p}^k")));
                }
            }
            level = next;
            pj = pj1;
            if level.is_empty() {
                break;
            }
        }
        per_branch.insert(a, level.len());
        all.extend(level);
    }
    all.sort();
    Ok((all, per_branch))
}

/// Residues `x mod p^k` with `f(x) = 0 (mod p^k)`.
pub fn roots_mod_prime_power(f: &IntPolynomial, p: u64, k: u32) -> Result<RootCount> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidInput("exponent k must be positive".into()));
    }
    let pb = Int::from(p);
    if f.coeffs().iter().all(|c| c.is_multiple_of(&pb)) {
        return Err(Error::VanishesModP(p));
    }
    let (residues, per_branch) = lift_roots(f.coeffs(), p, k)?;
    Ok(RootCount { p, k, modulus: pb.pow(k), residues, per_branch })
}

/// Smallest valuation of the coefficients at `p`.
fn content_valuation(coeffs: &[Int], p: u64) -> u32 {
    coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| padic_valuation(c, p).expect("non-zero"))
        .min()
        .unwrap_or(0)
}

/// Identity first, then shears `[[1, t], [b, 1 + bt]]` by increasing size.
fn pre_transform(form: &BinaryForm) -> Matrix2 {
    let n = form.degree() as i64;
    let ok = |g: &BinaryForm| !g.coeffs()[0].is_zero() && !g.coeffs()[g.degree()].is_zero();
    let mut cands: Vec<(i64, i64)> = Vec::new();
    for b in -n..=n {
        for t in -n..=n {
            cands.push((b, t));
        }
    }
    cands.sort_by_key(|&(b, t)| (b.abs() + t.abs(), b.abs(), b, t.abs(), t));
    for (b, t) in cands {
        let u = [[1, t], [b, 1 + b * t]];
        if ok(&unimodular_transform(form, u).expect("determinant one")) {
            return u;
        }
    }
    unreachable!("a non-zero form has at most n roots in P^1(Q)")
}

/// Canonical representative of the class of a primitive pair modulo `m = p^k`.
fn canonical_class(x: &Int, y: &Int, p: &Int, m: &Int) -> (Int, Int) {
    if !y.is_multiple_of(p) {
        let yi = inv_mod(y, m).expect("unit");
        ((x * yi).mod_floor(m), Int::one())
    } else {
        let xi = inv_mod(x, m).expect("primitive pair has a unit coordinate");
        (Int::one(), (y * xi).mod_floor(m))
    }
}

/// Primitive classes of a form whose coefficients are not all divisible by `p`.
fn prim_classes_primitive_content(form: &BinaryForm, u: Matrix2, p: u64, k: u32) -> Result<Vec<(Int, Int)>> {
    let pb = Int::from(p);
    let m = pb.pow(k);
    let g = unimodular_transform(form, u)?;
    let mut reps = Vec::new();
    // Classes (z : 1).
    let (xs, _) = lift_roots(&g.dehomogenize_x(), p, k)?;
    for z in xs {
        reps.push((z, Int::one()));
    }
    // Classes (1 : z) with p | z.
    let (zs, _) = lift_roots(&g.dehomogenize_y(), p, k)?;
    for z in zs.into_iter().filter(|z| z.is_multiple_of(&pb)) {
        reps.push((Int::one(), z));
    }
    let [[a, b], [c, d]] = u.map(|r| r.map(Int::from));
    let mut out: Vec<(Int, Int)> = reps
        .into_iter()
        .map(|(x, y)| {
            let (xx, yy) = (&a * &x + &b * &y, &c * &x + &d * &y);
            canonical_class(&xx, &yy, &pb, &m)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All classes of `P^1(Z/p^j)` lifted from classes modulo `p^j` to `p^k`.
fn lift_classes(reps: &[(Int, Int)], p: u64, j: u32, k: u32) -> Vec<(Int, Int)> {
    let pb = Int::from(p);
    let pj = pb.pow(j);
    let steps = pb.pow(k - j).to_u64().expect("lift count fits");
    let mut out = Vec::new();
    for (x, y) in reps {
        for t in 0..steps {
            let shift = Int::from(t) * &pj;
            if y.is_one() {
                out.push((x + &shift, Int::one()));
            } else {
                out.push((Int::one(), y + &shift));
            }
        }
    }
    out.sort();
    out
}

/// All primitive classes modulo `p^k`.
fn all_classes(p: u64, k: u32) -> Vec<(Int, Int)> {
    let pb = Int::from(p);
    let m = pb.pow(k);
    let steps = m.to_u64().expect("projective line fits in memory");
    let mut out: Vec<(Int, Int)> = (0..steps).map(|z| (Int::from(z), Int::one())).collect();
    out.extend((0..steps / p).map(|z| (Int::one(), Int::from(z) * &pb)));
    out.sort();
    out
}

/// `r(F, p^k)` with one representative per class.
pub fn prim_classes_mod_prime_power(form: &BinaryForm, p: u64, k: u32) -> Result<PrimClassCount> {
    prim_classes_with(form, p, k, None)
}

/// As [`prim_classes_mod_prime_power`] with an explicit pre-transform.
pub fn prim_classes_with(form: &BinaryForm, p: u64, k: u32, transform: Option<Matrix2>) -> Result<PrimClassCount> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidInput("exponent k must be positive".into()));
    }
    if binary_discriminant(form)?.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let u = match transform {
        Some(u) => {
            unimodular_transform(form, u)?;
            u
        }
        None => pre_transform(form),
    };
    let c = content_valuation(form.coeffs(), p);
    let modulus = Int::from(p).pow(k);
    let representatives = if c >= k {
        if modulus > Int::from(MAX_RESIDUES) {
            return Err(Error::Budget(format!("form vanishes modulo {p}^{k}; too many classes")));
        }
        all_classes(p, k)
    } else if c > 0 {
        let scale = Int::from(p).pow(c);
        let reduced = BinaryForm::new(form.coeffs().iter().map(|x| x / &scale).collect())?;
        let base = prim_classes_primitive_content(&reduced, u, p, k - c)?;
        if base.len() as u128 * (p as u128).pow(c) > MAX_RESIDUES as u128 {
            return Err(Error::Budget(format!("more than {MAX_RESIDUES} classes modulo {p}^{k}")));
        }
        lift_classes(&base, p, k - c, k)
    } else {
        prim_classes_primitive_content(form, u, p, k)?
    };
    Ok(PrimClassCount { p, k, modulus, count: representatives.len(), representatives })
}

/// `g_p`: the exponent of `p` in a non-zero discriminant.
pub fn g_p_of(disc: &Int, p: u64) -> Result<u32> {
    if disc.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    padic_valuation(disc, p)
}

/// Whether `form = 0 (mod p^u)` has a solution (primitive for binary forms).
pub fn solvable_mod_prime_power(form: &Form, p: u64, u: u32) -> Result<bool> {
    if u == 0 {
        return Ok(true);
    }
    match form {
        Form::Poly(f) => {
            let c = content_valuation(f.coeffs(), p);
            if c >= u {
                return Ok(true);
            }
            let scale = Int::from(p).pow(c);
            let reduced = IntPolynomial::new(f.coeffs().iter().map(|x| x / &scale).collect())?;
            Ok(roots_mod_prime_power(&reduced, p, u - c)?.count() > 0)
        }
        Form::Binary(b) => Ok(prim_classes_mod_prime_power(b, p, u)?.count > 0),
    }
}

/// The subset `S'` of primes with a solution modulo `p^(g_p + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPrimeReport {
    pub s_prime_set: PrimeSet,
    /// `g_p` for every prime of `S`.
    pub g: BTreeMap<u64, u32>,
    /// `a_p` for the primes of `S` outside `S'`.
    pub residual_exponents: BTreeMap<u64, u32>,
}

impl SPrimeReport {
    pub fn s_prime(&self) -> usize {
        self.s_prime_set.len()
    }
}

fn form_discriminant(form: &Form) -> Result<Int> {
    let d = match form {
        Form::Poly(f) => poly_discriminant(f)?,
        Form::Binary(b) => binary_discriminant(b)?,
    };
    if d.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(d)
}

pub fn s_prime_subset(form: &Form, primes: &PrimeSet) -> Result<SPrimeReport> {
    let d = form_discriminant(form)?;
    let mut inside = Vec::new();
    let mut g = BTreeMap::new();
    let mut residual = BTreeMap::new();
    for p in primes.iter() {
        let gp = g_p_of(&d, p)?;
        g.insert(p, gp);
        if solvable_mod_prime_power(form, p, gp + 1)? {
            inside.push(p);
        } else {
            let mut a = 0;
            while a < gp && solvable_mod_prime_power(form, p, a + 1)? {
                a += 1;
            }
            residual.insert(p, a);
        }
    }
    Ok(SPrimeReport { s_prime_set: PrimeSet::new(inside)?, g, residual_exponents: residual })
}

/// One row of a stabilization table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationRow {
    pub k: u32,
    pub count: usize,
    /// Per starting root modulo `p` (polynomials only).
    pub per_branch: BTreeMap<u64, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationReport {
    pub p: u64,
    pub g_p: u32,
    pub rows: Vec<StabilizationRow>,
    /// Exponents `k > g_p + 1` whose row differs from the row at `g_p + 1`.
    pub violations: Vec<u32>,
}

/// `r(., p^k)` for `k = 1..=k_max`, checking constancy from `g_p + 1` on.
pub fn stabilization_report(form: &Form, p: u64, k_max: u32) -> Result<StabilizationReport> {
    check_prime(p)?;
    let d = form_discriminant(form)?;
    let g_p = g_p_of(&d, p)?;
    if k_max < g_p + 1 {
        return Err(Error::Precondition(format!("k_max = {k_max} is below g_p + 1 = {}", g_p + 1)));
    }
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let row = match form {
            Form::Poly(f) => {
                let rc = roots_mod_prime_power(f, p, k)?;
                StabilizationRow { k, count: rc.count(), per_branch: rc.per_branch }
            }
            Form::Binary(b) => {
                let pc = prim_classes_mod_prime_power(b, p, k)?;
                StabilizationRow { k, count: pc.count, per_branch: BTreeMap::new() }
            }
        };
        rows.push(row);
    }
    let stable = &rows[g_p as usize];
    let violations = rows
        .iter()
        .skip(g_p as usize + 1)
        .filter(|r| r.count != stable.count || r.per_branch != stable.per_branch)
        .map(|r| r.k)
        .collect();
    Ok(StabilizationReport { p, g_p, rows, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::gcd;

    fn pl(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn brute_roots(f: &IntPolynomial, m: i64) -> Vec<Int> {
        (0..m).map(Int::from).filter(|x| f.evaluate(x).mod_floor(&Int::from(m)).is_zero()).collect()
    }

    /// Classes of P^1(Z/m) with F = 0, counted by enumerating all primitive
    /// pairs in [0, m)^2 and collapsing scalar multiples.
    fn brute_classes(f: &BinaryForm, m: i64) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for x in 0..m {
            for y in 0..m {
                if gcd(gcd(x, y), m) != 1 {
                    continue;
                }
                if !f.evaluate(&Int::from(x), &Int::from(y)).mod_floor(&Int::from(m)).is_zero() {
                    continue;
                }
                let key = (1..m)
                    .filter(|l| gcd(*l, m) == 1)
                    .map(|l| ((l * x) % m, (l * y) % m))
                    .min()
                    .unwrap();
                seen.insert(key);
            }
        }
        seen.len()
    }

    #[test]
    fn root_examples() {
        let r = roots_mod_prime_power(&pl(&[1, 0, 1]), 5, 2).unwrap();
        assert_eq!(r.residues, ints(&[7, 18]));
        assert_eq!(r.per_branch, BTreeMap::from([(2, 1), (3, 1)]));
        assert_eq!(roots_mod_prime_power(&pl(&[1, 0, 1]), 2, 3).unwrap().count(), 0);
        let r = roots_mod_prime_power(&pl(&[0, 0, 1]), 3, 2).unwrap();
        assert_eq!(r.residues, ints(&[0, 3, 6]));
        assert!(matches!(roots_mod_prime_power(&pl(&[3, 6]), 3, 2), Err(Error::VanishesModP(3))));
        assert!(matches!(roots_mod_prime_power(&pl(&[1, 1]), 4, 2), Err(Error::NotPrime(_))));
    }

    #[test]
    fn roots_match_brute_force() {
        let polys = [
            pl(&[1, 0, 1]),
            pl(&[0, 0, 1]),
            pl(&[1, 1, 1]),
            pl(&[-2, 0, 0, 1]),
            pl(&[6, -5, 0, 1]),
            pl(&[0, 4, 0, 0, 0, 1]),
            pl(&[12, 0, 7, 0, 1]),
        ];
        for f in &polys {
            for p in [2u64, 3, 5, 7] {
                let mut m = p as i64;
                for k in 1..=6 {
                    if m > 20_000 {
                        break;
                    }
                    let r = roots_mod_prime_power(f, p, k).unwrap();
                    assert_eq!(r.residues, brute_roots(f, m), "{f} mod {p}^{k}");
                    assert_eq!(r.per_branch.values().sum::<usize>(), r.count());
                    m *= p as i64;
                }
            }
        }
    }

    #[test]
    fn class_examples() {
        let c = prim_classes_mod_prime_power(&bf(&[1, 0, 1]), 5, 1).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.representatives, vec![(Int::from(2), Int::one()), (Int::from(3), Int::one())]);
        assert_eq!(prim_classes_mod_prime_power(&bf(&[1, 0, 1]), 3, 1).unwrap().count, 0);
        let c = prim_classes_mod_prime_power(&bf(&[0, 1, 1, 0]), 2, 1).unwrap();
        assert_eq!(c.count, 3);
        let expect = vec![(Int::zero(), Int::one()), (Int::one(), Int::zero()), (Int::one(), Int::one())];
        assert_eq!(c.representatives, expect);
        assert!(matches!(prim_classes_mod_prime_power(&bf(&[1, 2, 1]), 3, 1), Err(Error::ZeroDiscriminant)));
    }

    #[test]
    fn classes_match_brute_force() {
        let forms = [
            bf(&[1, 0, 1]),
            bf(&[0, 1, 1, 0]),
            bf(&[1, 0, 0, -2]),
            bf(&[1, 1, 1]),
            bf(&[2, 0, 0, 6]),
            bf(&[0, 1, 0, -4, 0]),
            bf(&[3, 0, 9]),
        ];
        for f in &forms {
            for p in [2u64, 3, 5] {
                let mut m = p as i64;
                for k in 1..=4 {
                    if m > 130 {
                        break;
                    }
                    let c = prim_classes_mod_prime_power(f, p, k).unwrap();
                    assert_eq!(c.count, brute_classes(f, m), "{f} mod {p}^{k}");
                    for (x, y) in &c.representatives {
                        assert!(f.evaluate(x, y).mod_floor(&c.modulus).is_zero());
                    }
                    m *= p as i64;
                }
            }
        }
    }

    #[test]
    fn class_count_independent_of_transform() {
        let f = bf(&[1, 0, 0, -2]);
        let base = prim_classes_mod_prime_power(&f, 3, 4).unwrap();
        for u in [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, -1], [1, 0]]] {
            let c = prim_classes_with(&f, 3, 4, Some(u)).unwrap();
            assert_eq!(c.representatives, base.representatives);
        }
    }

    #[test]
    fn g_p_examples() {
        assert_eq!(g_p_of(&Int::from(-4), 2).unwrap(), 2);
        assert_eq!(g_p_of(&Int::from(1), 2).unwrap(), 0);
        assert_eq!(g_p_of(&Int::from(-108), 3).unwrap(), 3);
        assert!(g_p_of(&Int::zero(), 3).is_err());
    }

    #[test]
    fn s_prime_examples() {
        let r = s_prime_subset(&Form::Poly(pl(&[1, 0, 1])), &PrimeSet::new(vec![2, 3, 5]).unwrap()).unwrap();
        assert_eq!(r.s_prime_set.primes(), &[5]);
        assert_eq!(r.residual_exponents, BTreeMap::from([(2, 1), (3, 0)]));
        let r = s_prime_subset(&Form::Binary(bf(&[0, 1, 1, 0])), &PrimeSet::new(vec![2, 3]).unwrap()).unwrap();
        assert_eq!(r.s_prime(), 2);
        let r = s_prime_subset(&Form::Poly(pl(&[1, 1, 1])), &PrimeSet::new(vec![3]).unwrap()).unwrap();
        assert_eq!(r.g[&3], 1);
        assert_eq!(r.s_prime(), 0);
        assert_eq!(r.residual_exponents[&3], 1);
    }

    #[test]
    fn stabilization_examples() {
        let r = stabilization_report(&Form::Poly(pl(&[1, 0, 1])), 5, 4).unwrap();
        assert!(r.rows.iter().all(|row| row.count == 2));
        let r = stabilization_report(&Form::Poly(pl(&[1, 0, 1])), 2, 5).unwrap();
        let counts: Vec<usize> = r.rows.iter().map(|row| row.count).collect();
        assert_eq!(counts, vec![1, 0, 0, 0, 0]);
        assert!(r.violations.is_empty());
        assert!(matches!(stabilization_report(&Form::Poly(pl(&[0, 0, 1])), 2, 4), Err(Error::ZeroDiscriminant)));
        assert!(matches!(stabilization_report(&Form::Poly(pl(&[1, 0, 1])), 2, 2), Err(Error::Precondition(_))));
    }
}
