//! Evaluators for explicit exponents, prime factor inequalities and radical growth.
//!
//! Everything here is a numerical evaluator. Constants that are only known to be
//! effectively computable are inputs, and no inequality is asserted as a theorem
//! over arbitrary integers.

use num_traits::{Float, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{arith_profile, iter_log, ln_big, FactorBudget};
use crate::{Error, Int, IntPolynomial, PrimeSet, Result};

/// Relative guard used whenever a floating point comparison feeds an assertion.
pub const REL_GUARD: f64 = 1e-9;

/// Both forms of the explicit exponent for a base constant `c`, a prime set and a degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaReport<T> {
    /// `(c^s (P log p1 ... log ps)^d)^-1`.
    pub product_form: T,
    /// `(c^s (2 P (log P)^s)^d)^-1`.
    pub simplified_form: T,
}

fn to_t<T: Float>(x: f64) -> T {
    T::from(x).expect("f64 is representable")
}

/// Computes the exponent in its product and simplified forms.
///
/// Rejects `c <= 1`, an empty prime set and `d = 0`.
pub fn kappa<T: Float>(c: T, primes: &PrimeSet, d: u32) -> Result<KappaReport<T>> {
    if !(c > T::one()) || !c.is_finite() {
        return Err(Error::InvalidInput("base constant must be a finite number > 1".into()));
    }
    if primes.is_empty() {
        return Err(Error::InvalidInput("prime set must be non-empty".into()));
    }
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let s = primes.len() as i32;
    let p: T = to_t(primes.max_prime() as f64);
    let dd = d as i32;
    // Work with logarithms so large s or d underflow gracefully instead of hitting inf/inf.
    let log_prod = primes.iter().map(|q| to_t::<T>(q as f64).ln().ln()).fold(T::zero(), |a, b| a + b);
    let ln_product = T::from(s).unwrap() * c.ln() + T::from(dd).unwrap() * (p.ln() + log_prod);
    let ln_simplified = T::from(s).unwrap() * c.ln()
        + T::from(dd).unwrap() * ((to_t::<T>(2.0) * p).ln() + T::from(s).unwrap() * p.ln().ln());
    let report = KappaReport { product_form: (-ln_product).exp(), simplified_form: (-ln_simplified).exp() };
    let guard = to_t::<T>(REL_GUARD);
    if report.product_form < report.simplified_form * (T::one() - guard) {
        return Err(Error::Invariant(format!(
            "product form {:?} below simplified form {:?}",
            report.product_form.to_f64(),
            report.simplified_form.to_f64()
        )));
    }
    Ok(report)
}

/// Smallest constant `K` with `s <= K |v|^(1 - kappa)` over a sample of `(|v|, s)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub constant: f64,
    /// Index of the sample entry attaining the maximum.
    pub argmax: Option<usize>,
    pub warnings: Vec<String>,
}

pub fn spart_bound_fit(sample: &[(Int, Int)], kappa: f64) -> Result<FitReport> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidInput(format!("exponent {kappa} outside (0, 1)")));
    }
    let mut report = FitReport { constant: 0.0, argmax: None, warnings: vec![] };
    if sample.is_empty() {
        report.warnings.push("empty sample".into());
        return Ok(report);
    }
    for (i, (v, s)) in sample.iter().enumerate() {
        if v.is_zero() || !s.is_positive() {
            return Err(Error::InvalidInput(format!("sample entry {i} has a zero value or non-positive S-part")));
        }
        let log_ratio = ln_big(s) - (1.0 - kappa) * ln_big(&v.abs());
        let k = log_ratio.exp();
        if report.argmax.is_none() || k > report.constant {
            report.constant = k;
            report.argmax = Some(i);
        }
    }
    Ok(report)
}

/// Which case of the greatest prime factor bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cor2Branch {
    /// `omega <= log P / log_2 P`: compare `P` with `(log |F0|)^(1/3d)`.
    FewPrimes,
    /// Otherwise: compare `P` with `C5 log_2 |F0| log_3 |F0| / log_4 |F0|`.
    ManyPrimes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cor2Report {
    pub greatest_prime: Int,
    pub omega: u32,
    pub ineq10_lhs: f64,
    pub ineq10_rhs: f64,
    pub ineq10_margin: f64,
    pub branch: Cor2Branch,
    /// `None` when the iterated logarithms of the branch bound are undefined.
    pub ineq11_bound: Option<f64>,
    pub ineq11_margin: Option<f64>,
}

/// Evaluates both sides of the greatest prime factor inequalities for `F0`.
pub fn cor2_check(f0: &Int, d: u32, c5: f64, budget: &FactorBudget) -> Result<Cor2Report> {
    let a = f0.abs();
    if a < Int::from(3) {
        return Err(Error::Domain(format!("|F0| = {a} is below 3")));
    }
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let profile = arith_profile(&a, budget)?;
    let p = profile.greatest_prime_factor.to_f64().unwrap_or(f64::INFINITY);
    let omega = profile.distinct_prime_count;
    let ln_p = p.ln();
    let ineq10_lhs = d as f64 * (ln_p + 2.0 * omega as f64 * ln_p.ln());
    let ineq10_lhs = ineq10_lhs.exp();
    let ln_a = ln_big(&a);

    // log_2 P is negative for P = 2, which puts every omega in the second case.
    let log2_p = ln_p.ln();
    let branch =
        if log2_p > 0.0 && omega as f64 <= ln_p / log2_p { Cor2Branch::FewPrimes } else { Cor2Branch::ManyPrimes };
    let bound = match branch {
        Cor2Branch::FewPrimes => Some(ln_a.powf(1.0 / (3.0 * d as f64))),
        Cor2Branch::ManyPrimes => {
            let l2 = iter_log(ln_a, 1);
            let l3 = iter_log(ln_a, 2);
            let l4 = iter_log(ln_a, 3);
            match (l2, l3, l4) {
                (Ok(l2), Ok(l3), Ok(l4)) => Some(c5 * l2 * l3 / l4),
                _ => None,
            }
        }
    };
    Ok(Cor2Report {
        greatest_prime: profile.greatest_prime_factor,
        omega,
        ineq10_lhs,
        ineq10_rhs: ln_a,
        ineq10_margin: ineq10_lhs - ln_a,
        branch,
        ineq11_bound: bound,
        ineq11_margin: bound.map(|b| p - b),
    })
}

/// One sampled point of the radical growth table.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalRow {
    pub x: i64,
    pub value: Int,
    pub radical: Option<Int>,
    pub log_radical: Option<f64>,
    pub log2_x: Option<f64>,
    /// `log_2 |x| log_3 |x| / log_4 |x|` where defined.
    pub three_log: Option<f64>,
    pub running_min_log2: Option<f64>,
    pub running_min_three_log: Option<f64>,
    /// Reason the row was left out of the running minima.
    pub skipped: Option<String>,
}

/// Radical of `f(x)` over a range of `x`, with the comparators `log_2 |x|` and
/// `log_2 |x| log_3 |x| / log_4 |x|` and running minima of `log Q(f(x))` over each.
pub fn radical_growth_report(
    f: &IntPolynomial,
    xs: std::ops::RangeInclusive<i64>,
    budget: &FactorBudget,
) -> Vec<RadicalRow> {
    let xs: Vec<i64> = xs.collect();
    let mut rows: Vec<RadicalRow> = xs
        .par_iter()
        .map(|&x| {
            let value = f.evaluate(&Int::from(x));
            let xf = (x as f64).abs();
            let log2_x = iter_log(xf, 2).ok();
            let three_log = match (iter_log(xf, 2), iter_log(xf, 3), iter_log(xf, 4)) {
                (Ok(a), Ok(b), Ok(c)) => Some(a * b / c),
                _ => None,
            };
            let mut row = RadicalRow {
                x,
                value: value.clone(),
                radical: None,
                log_radical: None,
                log2_x,
                three_log,
                running_min_log2: None,
                running_min_three_log: None,
                skipped: None,
            };
            if value.is_zero() {
                row.skipped = Some("f(x) = 0".into());
                return row;
            }
            match arith_profile(&value.abs(), budget) {
                Ok(p) => {
                    row.log_radical = Some(ln_big(&p.radical));
                    row.radical = Some(p.radical);
                }
                Err(e) => {
                    row.skipped = Some(e.to_string());
                    return row;
                }
            }
            if log2_x.is_none() {
                row.skipped = Some("log_2 |x| undefined".into());
            }
            row
        })
        .collect();
    let (mut m2, mut m3): (Option<f64>, Option<f64>) = (None, None);
    for row in &mut rows {
        if row.skipped.is_none() {
            let lq = row.log_radical.expect("present when not skipped");
            if let Some(l2) = row.log2_x {
                let r = lq / l2;
                m2 = Some(m2.map_or(r, |m| m.min(r)));
            }
            if let Some(t) = row.three_log {
                let r = lq / t;
                m3 = Some(m3.map_or(r, |m| m.min(r)));
            }
        }
        row.running_min_log2 = m2;
        row.running_min_three_log = m3;
    }
    rows
}
