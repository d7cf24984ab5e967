//! Class lattices in `Z^2`, Lagrange–Gauss reduction, and exact counts of
//! lattice points in `V_F(B, M) = {max(|x|,|y|) <= B, |F(x,y)| <= M}`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{factorize, FactorBudget};
use crate::congruence::inv_mod;
use crate::forms::BinaryForm;
use crate::realroots::{sublevel_intervals, sublevel_set, RatPoly};
use crate::{Error, Int, Rational, Result};

/// Integer 2x2 matrix whose rows are lattice basis vectors.
pub type Basis = [[Int; 2]; 2];

/// `{(x, y) : y0 x = x0 y (mod h)}` for a primitive anchor `(x0, y0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassLattice {
    pub h: Int,
    pub anchor: (Int, Int),
    /// Hermite normal form rows `(g, b)` and `(0, h/g)`.
    pub basis: Basis,
    pub det: Int,
    /// Lagrange–Gauss reduced basis, shortest vector first.
    pub reduced: Basis,
    /// Euclidean length of a shortest non-zero vector.
    pub shortest: f64,
}

impl ClassLattice {
    pub fn contains(&self, x: &Int, y: &Int) -> bool {
        (&self.anchor.1 * x - &self.anchor.0 * y).mod_floor(&self.h).is_zero()
    }
}

pub fn class_lattice(x0: &Int, y0: &Int, h: &Int) -> Result<ClassLattice> {
    if !h.is_positive() {
        return Err(Error::InvalidInput(format!("modulus must be positive, got {h}")));
    }
    if !x0.gcd(y0).is_one() {
        return Err(Error::NotPrimitive(x0.to_string(), y0.to_string()));
    }
    let g = x0.gcd(h);
    let q = h / &g;
    let b = if q.is_one() {
        Int::zero()
    } else {
        let inv = inv_mod(&(x0 / &g), &q).expect("x0/g is a unit modulo h/g");
        (y0 * inv).mod_floor(&q)
    };
    let basis = [[g, b], [Int::zero(), q]];
    let (reduced, shortest) = gauss_reduce(basis.clone())?;
    Ok(ClassLattice { h: h.clone(), anchor: (x0.clone(), y0.clone()), basis, det: h.clone(), reduced, shortest })
}

fn dot(u: &[Int; 2], v: &[Int; 2]) -> Int {
    &u[0] * &v[0] + &u[1] * &v[1]
}

fn sub_mul(v: &[Int; 2], q: &Int, u: &[Int; 2]) -> [Int; 2] {
    [&v[0] - q * &u[0], &v[1] - q * &u[1]]
}

/// Sign so that the first non-zero coordinate is positive.
fn normalize_sign(v: [Int; 2]) -> [Int; 2] {
    let neg = if v[0].is_zero() { v[1].is_negative() } else { v[0].is_negative() };
    if neg {
        [-&v[0], -&v[1]]
    } else {
        v
    }
}

/// Lagrange–Gauss reduction. Returns the reduced basis and `m(Lambda)`.
///
/// Among several shortest vectors the one that is lexicographically smallest
/// after making its first non-zero coordinate positive comes first.
pub fn gauss_reduce(basis: Basis) -> Result<(Basis, f64)> {
    let [mut u, mut v] = basis;
    if (&u[0] * &v[1] - &u[1] * &v[0]).is_zero() {
        return Err(Error::SingularBasis);
    }
    if dot(&u, &u) > dot(&v, &v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let uu = dot(&u, &u);
        let uv = dot(&u, &v);
        // Nearest integer to uv / uu.
        let q = (Int::from(2) * &uv + &uu).div_floor(&(Int::from(2) * &uu));
        v = sub_mul(&v, &q, &u);
        if dot(&v, &v) < uu {
            std::mem::swap(&mut u, &mut v);
        } else {
            break;
        }
    }
    let n = dot(&u, &u);
    let sum = [&u[0] + &v[0], &u[1] + &v[1]];
    let diff = [&u[0] - &v[0], &u[1] - &v[1]];
    let best = [u.clone(), v.clone(), sum, diff]
        .into_iter()
        .filter(|w| dot(w, w) == n)
        .map(normalize_sign)
        .min()
        .expect("u itself qualifies");
    // Any shortest vector extends to a basis together with u or v.
    let other = if best == normalize_sign(u.clone()) { v } else { u };
    let uu = dot(&best, &best);
    let q = (Int::from(2) * dot(&best, &other) + &uu).div_floor(&(Int::from(2) * &uu));
    let other = sub_mul(&other, &q, &best);
    let m = n.to_f64().expect("finite").sqrt();
    Ok(([best, other], m))
}

/// Planar region `V_F(B, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub form: BinaryForm,
    pub b: f64,
    pub m: f64,
}

fn rational(x: f64) -> Rational {
    Rational::from_float(x).expect("finite")
}

/// `F(x, Y)` as a polynomial in `Y`.
fn section(form: &BinaryForm, x: &Rational) -> RatPoly {
    let n = form.degree();
    let mut xpow = vec![Rational::one(); n + 1];
    for i in 1..=n {
        xpow[i] = &xpow[i - 1] * x;
    }
    RatPoly::new(
        form.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| Rational::from_integer(c.clone()) * &xpow[n - i])
            .collect(),
    )
}

/// Length of `{y in [-B, B] : |F(x, y)| <= M}`.
fn section_length(form: &BinaryForm, x: f64, b: &Rational, m: &Rational) -> f64 {
    let g = section(form, &rational(x));
    sublevel_intervals(&g, m, &-b.clone(), b).iter().map(|(a, c)| c - a).sum()
}

fn simpson(
    f: &dyn Fn(f64) -> f64,
    (a, fa): (f64, f64),
    (c, fc): (f64, f64),
    (b, fb): (f64, f64),
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson(f, (a, fa), (d, fd), (c, fc), left, eps / 2.0, depth - 1)
        + simpson(f, (c, fc), (e, fe), (b, fb), right, eps / 2.0, depth - 1)
}

/// `mu_F(B, M)` to relative tolerance `tol`.
///
/// Each vertical section is a union of intervals cut out by the real roots of
/// `F(x, Y) = +-M`, isolated exactly; the section lengths are integrated by
/// adaptive Simpson quadrature. Since `|F(-x,-y)| = |F(x,y)|` only `x >= 0` is
/// integrated.
pub fn region_area(region: &RegionSpec, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    if region.b <= 0.0 || region.m < 0.0 {
        return 0.0;
    }
    let (b, m) = (rational(region.b), rational(region.m));
    let f = |x: f64| section_length(&region.form, x, &b, &m);
    const PANELS: usize = 64;
    let h = region.b / PANELS as f64;
    let xs: Vec<f64> = (0..=2 * PANELS).map(|i| i as f64 * h / 2.0).collect();
    let fs: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let coarse: Vec<f64> =
        (0..PANELS).map(|i| h / 6.0 * (fs[2 * i] + 4.0 * fs[2 * i + 1] + fs[2 * i + 2])).collect();
    let total: f64 = coarse.iter().sum();
    let eps = tol * total.abs().max(f64::MIN_POSITIVE) / PANELS as f64;
    let parts: Vec<f64> = (0..PANELS)
        .into_par_iter()
        .map(|i| {
            simpson(
                &f,
                (xs[2 * i], fs[2 * i]),
                (xs[2 * i + 1], fs[2 * i + 1]),
                (xs[2 * i + 2], fs[2 * i + 2]),
                coarse[i],
                eps,
                60,
            )
        })
        .collect();
    2.0 * parts.iter().sum::<f64>()
}

/// Exact count together with its area main term.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCount {
    pub count: u64,
    pub area: f64,
    pub main_term: f64,
    pub error_observed: f64,
}

/// Default cap on candidate points for [`count_region_points`].
pub const DEFAULT_POINT_BUDGET: u64 = 1 << 34;

/// `(6/pi^2) prod_{p | h} (1 + 1/p)^(-1)`.
pub fn euler_factor(h: &Int) -> Result<f64> {
    let mut f = 6.0 / (PI * PI);
    for (p, _) in factorize(h, &FactorBudget::default())? {
        let p = p.to_f64().unwrap();
        f /= 1.0 + 1.0 / p;
    }
    Ok(f)
}

/// Number of `y` in `[lo, hi]` with `y = r (mod q)`.
fn progression_count(lo: i64, hi: i64, r: i64, q: i64) -> u64 {
    if lo > hi {
        return 0;
    }
    (Integer::div_floor(&(hi - r), &q) - Integer::div_floor(&(lo - 1 - r), &q)) as u64
}

/// Exact count of points of `lattice` (primitive points only if `prim_only`)
/// in `V_F(B, M)`.
pub fn count_region_points(region: &RegionSpec, lattice: &ClassLattice, prim_only: bool) -> Result<RegionCount> {
    let area = region_area(region, 1e-9);
    count_region_points_with_area(region, lattice, prim_only, area, DEFAULT_POINT_BUDGET)
}

/// As [`count_region_points`] with a precomputed area and explicit budget.
pub fn count_region_points_with_area(
    region: &RegionSpec,
    lattice: &ClassLattice,
    prim_only: bool,
    area: f64,
    budget: u64,
) -> Result<RegionCount> {
    let bi = region.b.floor();
    if !(0.0..=(1u64 << 40) as f64).contains(&bi) {
        return Err(Error::InvalidInput(format!("box bound {} out of range", region.b)));
    }
    let bi = bi as i64;
    let mi = Int::from(region.m.floor().max(-1.0) as i128);
    let [[g, b], [zero, q]] = &lattice.basis;
    debug_assert!(zero.is_zero());
    let (g, b, q) = match (g.to_i64(), b.to_i64(), q.to_i64()) {
        (Some(g), Some(b), Some(q)) => (g, b, q),
        _ => return Err(Error::InvalidInput("lattice modulus too large to enumerate".into())),
    };
    let lines = (2 * bi / g + 1) as u128;
    let per_line = if prim_only { (2 * bi / q + 1) as u128 } else { 16 };
    if lines * per_line > budget as u128 {
        return Err(Error::Budget(format!("about {} candidate points exceed budget {budget}", lines * per_line)));
    }
    let mrat = Rational::from_integer(mi.clone());
    let (lo, hi) = (Rational::from_integer((-bi).into()), Rational::from_integer(bi.into()));
    let first = Integer::div_ceil(&-bi, &g);
    let last = Integer::div_floor(&bi, &g);
    let count: u64 = (first..=last)
        .into_par_iter()
        .map(|i| {
            let x = i * g;
            let r = (i as i128 * b as i128).rem_euclid(q as i128) as i64;
            let xi = Int::from(x);
            let exact = |y: i64| -> bool {
                let v = region.form.evaluate(&xi, &Int::from(y));
                v.abs() <= mi && (!prim_only || num_integer::gcd(x, y) == 1)
            };
            let g_x = section(&region.form, &Rational::from_integer(xi.clone()));
            if mi.is_negative() {
                return 0;
            }
            let (intervals, roots) = sublevel_set(&g_x, &mrat, &lo, &hi);
            let mut interior: Vec<(i64, i64)> = Vec::new();
            let mut edges = BTreeSet::new();
            let mut near = |t: f64| {
                let (f, c) = (t.floor() as i64, t.ceil() as i64);
                for y in [f - 1, f, c, c + 1] {
                    if (-bi..=bi).contains(&y) && (y - r).rem_euclid(q) == 0 {
                        edges.insert(y);
                    }
                }
            };
            for &t in &roots {
                near(t);
            }
            near(-bi as f64);
            near(bi as f64);
            for &(a, c) in &intervals {
                near(a);
                near(c);
                interior.push((a.ceil() as i64 + 1, c.floor() as i64 - 1));
            }
            let mut n = 0u64;
            for &(s, e) in &interior {
                let (s, e) = (s.max(-bi), e.min(bi));
                if prim_only {
                    let mut y = s + (r - s).rem_euclid(q);
                    while y <= e {
                        if num_integer::gcd(x, y) == 1 {
                            n += 1;
                        }
                        y += q;
                    }
                } else {
                    n += progression_count(s, e, r, q);
                }
            }
            for y in edges {
                let inside = interior.iter().any(|&(s, e)| s <= y && y <= e);
                if !inside && exact(y) {
                    n += 1;
                }
            }
            n
        })
        .sum();
    let h = lattice.det.to_f64().unwrap();
    let main_term = if prim_only { euler_factor(&lattice.det)? * area / h } else { area / h };
    Ok(RegionCount { count, area, main_term, error_observed: (count as f64 - main_term).abs() })
}
