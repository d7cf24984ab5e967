//! Integer polynomials and binary forms.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, FactorBudget};
use crate::{parse_int, Error, Int, Rational, Result};

/// Largest binary form degree accepted by [`BinaryForm::new`].
pub const MAX_BINARY_DEGREE: usize = 16;

/// Non-zero integer polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Int>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<Int>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Int {
        self.coeffs.last().unwrap()
    }

    pub fn evaluate(&self, x: &Int) -> Int {
        horner(&self.coeffs, x)
    }

    /// Evaluate on machine integers; `None` on overflow.
    pub fn evaluate_i128(&self, x: i128) -> Option<i128> {
        let mut acc: i128 = 0;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(c.to_i128()?)?;
        }
        Some(acc)
    }

    /// Value reduced into `[0, m)`.
    pub fn evaluate_mod(&self, x: &Int, m: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + c).mod_floor(m);
        }
        acc
    }

    pub fn derivative(&self) -> Vec<Int> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Int::from(i))
            .collect()
    }

    /// Sum of absolute values of the coefficients.
    pub fn height_bound(&self) -> Int {
        self.coeffs.iter().map(Signed::abs).sum()
    }

    /// Distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<Rational> {
        rational_roots(&self.coeffs)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*X"),
                _ => format!("{c}*X^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn horner(coeffs: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Binary form `c0 X^n + c1 X^(n-1) Y + ... + cn Y^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<Int>,
}

/// Integer 2x2 matrix `[[a, b], [c, d]]`, acting by `F(aX + bY, cX + dY)`.
pub type Matrix2 = [[i64; 2]; 2];

impl BinaryForm {
    pub fn new(coeffs: Vec<Int>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("zero binary form".into()));
        }
        let n = coeffs.len() - 1;
        if n > MAX_BINARY_DEGREE {
            return Err(Error::Degree { got: n, min: 0, max: MAX_BINARY_DEGREE });
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    /// Coefficients `c0..cn`, `ci` multiplying `X^(n-i) Y^i`.
    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn evaluate(&self, x: &Int, y: &Int) -> Int {
        let mut acc = Int::zero();
        let mut ypow = Int::one();
        let n = self.degree();
        let mut xpow = vec![Int::one(); n + 1];
        for i in 1..=n {
            xpow[i] = &xpow[i - 1] * x;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &xpow[n - i] * &ypow;
            }
            ypow *= y;
        }
        acc
    }

    /// Evaluate on machine integers; `None` on overflow.
    pub fn evaluate_i128(&self, x: i128, y: i128) -> Option<i128> {
        // Horner in x with coefficients ci * y^i.
        let mut acc: i128 = 0;
        let mut ypow: i128 = 1;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                ypow = ypow.checked_mul(y)?;
            }
            let c = c.to_i128()?;
            let ci = if c == 0 { 0 } else { c.checked_mul(ypow)? };
            acc = acc.checked_mul(x)?.checked_add(ci)?;
        }
        Some(acc)
    }

    /// `F(X, 1)` as a polynomial of formal degree `n` (coefficients ascending,
    /// leading entries may vanish).
    pub fn dehomogenize_x(&self) -> Vec<Int> {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// `F(1, Y)` as a polynomial in `Y`, ascending.
    pub fn dehomogenize_y(&self) -> Vec<Int> {
        self.coeffs.clone()
    }

    /// `F(X, 1)` as an [`IntPolynomial`] of true degree.
    pub fn affine_x(&self) -> Option<IntPolynomial> {
        IntPolynomial::new(self.dehomogenize_x()).ok()
    }

    /// `F(1, Y)` as an [`IntPolynomial`].
    pub fn affine_y(&self) -> Option<IntPolynomial> {
        IntPolynomial::new(self.dehomogenize_y()).ok()
    }

    /// Sum of absolute values of the coefficients; bounds `|F(x,y)|` by
    /// `c_F * max(|x|,|y|)^n`.
    pub fn height_bound(&self) -> Int {
        self.coeffs.iter().map(Signed::abs).sum()
    }

    pub fn discriminant(&self) -> Result<Int> {
        binary_discriminant(self)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mono = |v: &str, e: usize| match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{v}^{e}"),
        };
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let m: Vec<String> =
                    [mono("X", n - i), mono("Y", i)].into_iter().filter(|s| !s.is_empty()).collect();
                if m.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", m.join("*"))
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Determinant of a square integer matrix by Bareiss fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<Int>>) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester resultant of two polynomials with formal degrees
/// `a.len() - 1` and `b.len() - 1` (ascending coefficients).
pub fn resultant(a: &[Int], b: &[Int]) -> Int {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    if size == 0 {
        return Int::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![Int::zero(); size];
        for (j, c) in a.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Int::zero(); size];
        for (j, c) in b.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    det_bareiss(rows)
}

/// Discriminant of a polynomial with non-zero leading coefficient, from the
/// resultant with its derivative.
fn formal_discriminant(coeffs: &[Int]) -> Int {
    let n = coeffs.len() - 1;
    let lead = &coeffs[n];
    debug_assert!(!lead.is_zero());
    if n == 1 {
        return Int::one();
    }
    let deriv: Vec<Int> = coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Int::from(i)).collect();
    let res = resultant(coeffs, &deriv);
    let d = res / lead;
    if (n * (n - 1) / 2) % 2 == 1 {
        -d
    } else {
        d
    }
}

/// `D(f)` for `deg f >= 1`.
pub fn poly_discriminant(f: &IntPolynomial) -> Result<Int> {
    if f.degree() == 0 {
        return Err(Error::Degree { got: 0, min: 1, max: usize::MAX });
    }
    Ok(formal_discriminant(&f.coeffs))
}

/// `D(F)` for a binary form of degree at least two; unchanged by `SL2(Z)`.
pub fn binary_discriminant(form: &BinaryForm) -> Result<Int> {
    let n = form.degree();
    if n < 2 {
        return Err(Error::Degree { got: n, min: 2, max: MAX_BINARY_DEGREE });
    }
    if !form.coeffs[0].is_zero() {
        return Ok(formal_discriminant(&form.dehomogenize_x()));
    }
    // Move a non-root into the X direction; F(1,b) != 0 for some |b| <= n.
    let b = (1..=n as i64)
        .flat_map(|b| [b, -b])
        .find(|&b| !form.evaluate(&Int::one(), &Int::from(b)).is_zero())
        .expect("a non-zero form of degree n has at most n roots");
    let sheared = unimodular_transform(form, [[1, 0], [b, 1]])?;
    Ok(formal_discriminant(&sheared.dehomogenize_x()))
}

/// `Y^(n+1) f(X/Y)` when `extra_power`, else `Y^n f(X/Y)`, with `n = deg f`.
pub fn homogenize(f: &IntPolynomial, extra_power: bool) -> Result<BinaryForm> {
    let mut coeffs: Vec<Int> = f.coeffs.iter().rev().cloned().collect();
    if extra_power {
        coeffs.insert(0, Int::zero());
    }
    BinaryForm::new(coeffs)
}

fn poly_mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `F(aX + bY, cX + dY)` for a matrix of determinant `+-1`.
pub fn unimodular_transform(form: &BinaryForm, u: Matrix2) -> Result<BinaryForm> {
    let det = u[0][0] as i128 * u[1][1] as i128 - u[0][1] as i128 * u[1][0] as i128;
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    Ok(substitute(form, u))
}

/// `F(aX + bY, cX + dY)` for any integer matrix.
pub fn substitute(form: &BinaryForm, u: Matrix2) -> BinaryForm {
    let n = form.degree();
    // Coefficient vectors indexed by the power of Y.
    let lx = [Int::from(u[0][0]), Int::from(u[0][1])];
    let ly = [Int::from(u[1][0]), Int::from(u[1][1])];
    let mut xp = vec![vec![Int::one()]];
    let mut yp = vec![vec![Int::one()]];
    for i in 1..=n {
        xp.push(poly_mul(&xp[i - 1], &lx));
        yp.push(poly_mul(&yp[i - 1], &ly));
    }
    let mut out = vec![Int::zero(); n + 1];
    for (i, c) in form.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = poly_mul(&xp[n - i], &yp[i]);
        for (k, t) in term.iter().enumerate() {
            out[k] += c * t;
        }
    }
    BinaryForm { coeffs: out }
}

pub fn height_bound(form: &BinaryForm) -> Int {
    form.height_bound()
}

/// Distinct rational roots of an ascending integer coefficient vector.
pub fn rational_roots(coeffs: &[Int]) -> Vec<Rational> {
    let mut c: Vec<Int> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return vec![];
    }
    let mut roots = Vec::new();
    let lead_zero_roots = c.iter().take_while(|x| x.is_zero()).count();
    if lead_zero_roots > 0 {
        roots.push(Rational::zero());
        c.drain(..lead_zero_roots);
    }
    if c.len() > 1 {
        let budget = FactorBudget::default();
        let nums = divisors(&c[0], &budget);
        let dens = divisors(c.last().unwrap(), &budget);
        let mut seen = std::collections::BTreeSet::new();
        for p in &nums {
            for q in &dens {
                for s in [Int::one(), -Int::one()] {
                    let r = Rational::new(&s * p, q.clone());
                    if seen.insert(r.clone()) && eval_rational(&c, &r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: &Int, budget: &FactorBudget) -> Vec<Int> {
    let factors = factorize(n, budget).expect("small coefficients factor within budget");
    let mut out = vec![Int::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = Int::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out
}

/// Evaluate integer coefficients at a rational point.
pub fn eval_rational(coeffs: &[Int], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + Rational::from_integer(c.clone());
    }
    acc
}

/// JSON form schema, integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpec {
    #[serde(rename = "type")]
    pub kind: FormKind,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Polynomial,
    Binary,
}

/// A polynomial or a binary form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Poly(IntPolynomial),
    Binary(BinaryForm),
}

impl Form {
    pub fn from_spec(spec: &FormSpec) -> Result<Self> {
        let coeffs = spec.coeffs.iter().map(|s| parse_int(s)).collect::<Result<Vec<_>>>()?;
        Ok(match spec.kind {
            FormKind::Polynomial => Form::Poly(IntPolynomial::new(coeffs)?),
            FormKind::Binary => Form::Binary(BinaryForm::new(coeffs)?),
        })
    }

    pub fn to_spec(&self) -> FormSpec {
        let (kind, coeffs) = match self {
            Form::Poly(p) => (FormKind::Polynomial, p.coeffs()),
            Form::Binary(b) => (FormKind::Binary, b.coeffs()),
        };
        FormSpec { kind, coeffs: coeffs.iter().map(Int::to_string).collect() }
    }

    pub fn degree(&self) -> usize {
        match self {
            Form::Poly(p) => p.degree(),
            Form::Binary(b) => b.degree(),
        }
    }

    pub fn discriminant(&self) -> Result<Int> {
        match self {
            Form::Poly(p) => poly_discriminant(p),
            Form::Binary(b) => binary_discriminant(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn pl(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    /// Sylvester determinant by cofactor expansion, independent of Bareiss.
    fn det_cofactor(m: &[Vec<Int>]) -> Int {
        let n = m.len();
        if n == 0 {
            return Int::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut total = Int::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<Int>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
            let t = &m[0][j] * det_cofactor(&minor);
            if j % 2 == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        total
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(pl(&[1, 0, 1]).evaluate(&int(2)), int(5));
        assert_eq!(bf(&[0, 1, 1, 0]).evaluate(&int(1), &int(2)), int(6));
        assert_eq!(bf(&[1, 0, 0, -2]).evaluate(&int(5), &int(4)), int(-3));
        assert_eq!(bf(&[1, 0, 0, -2]).evaluate_i128(5, 4), Some(-3));
        assert_eq!(bf(&[0, 1, 1, 0]).evaluate_i128(-3, 7), Some(-3 * 7 * 4));
        assert_eq!(pl(&[1, 0, 1]).evaluate_i128(-7), Some(50));
    }

    #[test]
    fn poly_discriminant_examples() {
        assert_eq!(poly_discriminant(&pl(&[7, 0, 1])).unwrap(), int(-28));
        assert_eq!(poly_discriminant(&pl(&[0, 1, 1])).unwrap(), int(1));
        assert_eq!(poly_discriminant(&pl(&[-2, 0, 0, 1])).unwrap(), int(-108));
        assert!(poly_discriminant(&pl(&[5])).is_err());
    }

    #[test]
    fn cubic_discriminant_matches_sylvester_oracle() {
        // -27 c^2 for X^3 + c, via cofactor expansion of the 5x5 Sylvester matrix.
        for c in [-5i64, -2, 1, 3, 11] {
            let f = pl(&[c, 0, 0, 1]);
            let d = f.derivative();
            let mut rows = Vec::new();
            for i in 0..2 {
                let mut r = vec![int(0); 5];
                for (j, v) in f.coeffs().iter().rev().enumerate() {
                    r[i + j] = v.clone();
                }
                rows.push(r);
            }
            for i in 0..3 {
                let mut r = vec![int(0); 5];
                for (j, v) in d.iter().rev().enumerate() {
                    r[i + j] = v.clone();
                }
                rows.push(r);
            }
            let res = det_cofactor(&rows);
            assert_eq!(-res.clone(), poly_discriminant(&f).unwrap());
            assert_eq!(poly_discriminant(&f).unwrap(), int(-27 * c * c));
        }
    }

    #[test]
    fn binary_discriminant_examples() {
        assert_eq!(binary_discriminant(&bf(&[1, 0, 1])).unwrap(), int(-4));
        assert_eq!(binary_discriminant(&bf(&[0, 1, 1, 0])).unwrap(), int(1));
        assert_eq!(binary_discriminant(&bf(&[1, 0, 0, -2])).unwrap(), int(-108));
        assert!(binary_discriminant(&bf(&[1, 1])).is_err());
    }

    fn cubic_closed_form(a: i64, b: i64, c: i64, d: i64) -> i64 {
        18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d
    }

    #[test]
    fn binary_discriminant_closed_forms() {
        for a in -2..=2i64 {
            for b in -2..=2i64 {
                for c in -2..=2i64 {
                    if (a, b, c) != (0, 0, 0) {
                        assert_eq!(binary_discriminant(&bf(&[a, b, c])).unwrap(), int(b * b - 4 * a * c));
                    }
                    for d in [-3i64, 0, 2] {
                        if (a, b, c, d) == (0, 0, 0, 0) {
                            continue;
                        }
                        let got = binary_discriminant(&bf(&[a, b, c, d])).unwrap();
                        assert_eq!(got, int(cubic_closed_form(a, b, c, d)), "{a} {b} {c} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn homogenize_examples() {
        let f = pl(&[1, 0, 1]);
        assert_eq!(homogenize(&f, true).unwrap(), bf(&[0, 1, 0, 1]));
        assert_eq!(homogenize(&f, false).unwrap(), bf(&[1, 0, 1]));
        assert_eq!(homogenize(&pl(&[0, 1, 1]), true).unwrap(), bf(&[0, 1, 1, 0]));
    }

    #[test]
    fn homogenized_discriminants() {
        // Same degree: equal. Extra Y factor: multiplied by the square of the
        // leading coefficient.
        for c in [[7i64, 0, 1], [0, 1, 1], [3, -5, 2]] {
            let f = pl(&c);
            let d = poly_discriminant(&f).unwrap();
            assert_eq!(binary_discriminant(&homogenize(&f, false).unwrap()).unwrap(), d);
            let lead = f.leading().clone();
            assert_eq!(binary_discriminant(&homogenize(&f, true).unwrap()).unwrap(), d * &lead * &lead);
        }
        let f = pl(&[-2, 0, 0, 1]);
        assert_eq!(binary_discriminant(&homogenize(&f, true).unwrap()).unwrap(), int(-108));
    }

    #[test]
    fn transform_examples() {
        let f = bf(&[1, 0, 1]);
        assert_eq!(unimodular_transform(&f, [[1, 0], [0, 1]]).unwrap(), f);
        let xy = bf(&[0, 1, 0]);
        assert_eq!(unimodular_transform(&xy, [[0, 1], [1, 0]]).unwrap(), xy);
        // XY(X+Y) at (X+Y, Y) = (X+Y) Y (X+2Y) = X^2 Y + 3 X Y^2 + 2 Y^3
        let g = unimodular_transform(&bf(&[0, 1, 1, 0]), [[1, 1], [0, 1]]).unwrap();
        assert_eq!(g, bf(&[0, 1, 3, 2]));
        for (x, y) in [(2i64, 5i64), (-3, 1), (7, -4)] {
            let direct = (x + y) * y * (x + 2 * y);
            assert_eq!(g.evaluate(&int(x), &int(y)), int(direct));
        }
        assert!(matches!(unimodular_transform(&f, [[2, 0], [0, 1]]), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn height_examples() {
        assert_eq!(bf(&[1, 0, 1]).height_bound(), int(2));
        assert_eq!(bf(&[0, 1, 1, 0]).height_bound(), int(2));
        assert_eq!(bf(&[1, 0, 0, -2]).height_bound(), int(3));
    }

    #[test]
    fn rational_root_search() {
        let r = rational_roots(&[int(0), int(1), int(1)]);
        assert_eq!(r, vec![Rational::from_integer(int(-1)), Rational::zero()]);
        let r = rational_roots(&[int(-1), int(0), int(4)]); // 4X^2 - 1
        assert_eq!(r, vec![Rational::new(int(-1), int(2)), Rational::new(int(1), int(2))]);
        assert!(rational_roots(&[int(1), int(0), int(1)]).is_empty());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"type":"binary","coeffs":["1","0","0","-2"]}"#;
        let spec: FormSpec = serde_json::from_str(json).unwrap();
        let form = Form::from_spec(&spec).unwrap();
        assert_eq!(form, Form::Binary(bf(&[1, 0, 0, -2])));
        assert_eq!(serde_json::to_string(&form.to_spec()).unwrap(), json);
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(BinaryForm::new(vec![int(1); 18]), Err(Error::Degree { .. })));
    }
}
