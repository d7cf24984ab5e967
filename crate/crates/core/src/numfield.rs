//! Exact arithmetic in `K = Q[t]/(m(t))`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, FactorBudget};
use crate::forms::rational_roots;
use crate::linalg::{rank, Field};
use crate::{format_rational, parse_int, parse_rational, Error, Int, Rational, Rationals, Result};

/// Element of `K` as coordinates in the basis `1, t, ..., t^(d-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(Vec<Rational>);

impl FieldElement {
    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.0[1..].iter().all(Zero::is_zero).then(|| &self.0[0])
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let c = format_rational(c);
                match i {
                    0 => c,
                    1 => format!("({c})*t"),
                    _ => format!("({c})*t^{i}"),
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// How irreducibility of the minimal polynomial was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Certified,
    /// Degree above four: only the absence of rational roots was checked.
    Unchecked,
}

/// `Q[t]/(m(t))` for a monic irreducible integer polynomial `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    min_poly: Vec<Int>,
    irreducibility: Irreducibility,
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Quotient and remainder of rational polynomials (ascending, trimmed).
fn divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    if r.len() <= db {
        return (vec![], trim(r));
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let c = &r[k] / &b[db];
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            r[k - db + i] -= &c * bc;
        }
        q[k - db] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Whether a monic quartic splits into two integer quadratics.
fn has_quadratic_factor(m: &[Int]) -> Result<bool> {
    let (m0, m1, m2, m3) = (&m[0], &m[1], &m[2], &m[3]);
    let mut divisors = vec![Int::one()];
    for (p, e) in factorize(m0, &FactorBudget::default())? {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = Int::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divisors = next;
    }
    let signed: Vec<Int> = divisors.iter().flat_map(|d| [d.clone(), -d]).collect();
    for b in &signed {
        let e = m0 / b;
        // (t^2 + a t + b)(t^2 + c t + e), a + c = m3, ae + bc = m1, b + e + ac = m2
        let candidates: Vec<Int> = if &e != b {
            let num = m1 - m3 * b;
            let den = &e - b;
            if (&num % &den).is_zero() {
                vec![num / den]
            } else {
                vec![]
            }
        } else {
            if m1 != &(m3 * b) {
                continue;
            }
            // a^2 - m3 a + (m2 - 2b) = 0
            let disc = m3 * m3 - Int::from(4) * (m2 - Int::from(2) * b);
            if disc.is_negative() {
                continue;
            }
            let s = disc.sqrt();
            if &s * &s != disc {
                continue;
            }
            [m3 + &s, m3 - &s].into_iter().filter(|v| v.is_even()).map(|v| v / 2).collect()
        };
        for a in candidates {
            let c = m3 - &a;
            if &(&a * &e + b * &c) == m1 && &(b + &e + &a * &c) == m2 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

impl NumberField {
    /// Field defined by a monic polynomial given by ascending coefficients.
    pub fn new(min_poly: Vec<Int>) -> Result<Self> {
        let mut min_poly = min_poly;
        while min_poly.last().is_some_and(Zero::is_zero) {
            min_poly.pop();
        }
        let d = min_poly.len().saturating_sub(1);
        if d == 0 {
            return Err(Error::Degree { got: 0, min: 1, max: usize::MAX });
        }
        if !min_poly[d].is_one() {
            return Err(Error::InvalidInput("minimal polynomial must be monic".into()));
        }
        if d > 1 && !rational_roots(&min_poly).is_empty() {
            return Err(Error::InvalidInput("minimal polynomial has a rational root".into()));
        }
        if d == 4 && has_quadratic_factor(&min_poly)? {
            return Err(Error::InvalidInput("minimal polynomial has a quadratic factor".into()));
        }
        let irreducibility = if d <= 4 { Irreducibility::Certified } else { Irreducibility::Unchecked };
        Ok(Self { min_poly, irreducibility })
    }

    pub fn from_i64(min_poly: &[i64]) -> Result<Self> {
        Self::new(min_poly.iter().map(|&c| Int::from(c)).collect())
    }

    /// `Q` itself, as `Q[t]/(t)`.
    pub fn rationals() -> Self {
        Self { min_poly: vec![Int::zero(), Int::one()], irreducibility: Irreducibility::Certified }
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[Int] {
        &self.min_poly
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    /// Element from coordinates; longer inputs are reduced modulo `m`.
    pub fn element(&self, coords: Vec<Rational>) -> FieldElement {
        self.reduce(trim(coords))
    }

    pub fn element_i64(&self, coords: &[i64]) -> FieldElement {
        self.element(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn from_rational(&self, r: Rational) -> FieldElement {
        self.element(vec![r])
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(Rational::from_integer(n.into()))
    }

    /// The class of `t`.
    pub fn generator(&self) -> FieldElement {
        self.element(vec![Rational::zero(), Rational::one()])
    }

    fn modulus(&self) -> Vec<Rational> {
        self.min_poly.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    fn reduce(&self, poly: Vec<Rational>) -> FieldElement {
        let d = self.degree();
        let mut r = if poly.len() > d { divmod(&poly, &self.modulus()).1 } else { poly };
        r.resize(d, Rational::zero());
        FieldElement(r)
    }

    fn poly(a: &FieldElement) -> Vec<Rational> {
        trim(a.0.clone())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.reduce(poly_mul(&Self::poly(a), &Self::poly(b)))
    }

    pub fn scale(&self, a: &FieldElement, r: &Rational) -> FieldElement {
        FieldElement(a.0.iter().map(|x| x * r).collect())
    }

    /// Inverse by the extended Euclidean algorithm in `Q[t]`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Invariant: r_i = s_i * a  (mod m).
        let (mut r0, mut r1) = (self.modulus(), Self::poly(a));
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (vec![], vec![Rational::one()]);
        while r1.len() > 1 {
            let (q, r) = divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            if r1.is_empty() {
                return Err(Error::Invariant("minimal polynomial is reducible".into()));
            }
        }
        let c = r1[0].clone();
        Ok(self.reduce(s1.iter().map(|x| x / &c).collect()))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> FieldElement {
        let mut out = self.from_int(1);
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    /// `p(x)` for a polynomial with rational coefficients (ascending).
    pub fn eval_poly(&self, coeffs: &[Rational], x: &FieldElement) -> FieldElement {
        let mut acc = self.from_int(0);
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_rational(c.clone()));
        }
        acc
    }

    /// Image of `a` under the endomorphism `t -> image`.
    pub fn substitute(&self, a: &FieldElement, image: &FieldElement) -> FieldElement {
        self.eval_poly(&a.0, image)
    }

    pub fn parse_element(&self, coords: &[String]) -> Result<FieldElement> {
        if coords.len() > self.degree() {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.degree()
            )));
        }
        Ok(self.element(coords.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
    }
}

impl Field for NumberField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        self.from_int(0)
    }
    fn one(&self) -> FieldElement {
        self.from_int(1)
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        NumberField::add(self, a, b)
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        NumberField::sub(self, a, b)
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        NumberField::mul(self, a, b)
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        NumberField::neg(self, a)
    }
    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        NumberField::inv(self, a).ok()
    }
}

/// Automorphism `t -> image_of_t` with its index in a [`GaloisGroup`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldAutomorphism {
    pub image_of_t: FieldElement,
    pub index: usize,
}

/// A validated group of automorphisms of order `[K : Q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisGroup {
    pub elements: Vec<FieldAutomorphism>,
    /// `table[i][j]` is the index of `sigma_i o sigma_j`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl GaloisGroup {
    /// The trivial group of `Q`.
    pub fn trivial(field: &NumberField) -> Self {
        debug_assert_eq!(field.degree(), 1);
        Self {
            elements: vec![FieldAutomorphism { image_of_t: field.generator(), index: 0 }],
            table: vec![vec![0]],
            identity: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FieldAutomorphism> {
        self.elements.iter()
    }
}

pub fn validate_automorphisms(field: &NumberField, images: Vec<FieldElement>) -> Result<GaloisGroup> {
    let d = field.degree();
    if images.len() != d {
        return Err(Error::Automorphism(format!("{} images supplied for a field of degree {d}", images.len())));
    }
    let m: Vec<Rational> = field.min_poly.iter().map(|c| Rational::from_integer(c.clone())).collect();
    for (i, img) in images.iter().enumerate() {
        if !field.eval_poly(&m, img).is_zero() {
            return Err(Error::Automorphism(format!("image {i} ({img}) is not a root of the minimal polynomial")));
        }
    }
    for i in 0..d {
        if images[i + 1..].contains(&images[i]) {
            return Err(Error::Automorphism(format!("image {i} is repeated")));
        }
    }
    let gen = field.generator();
    let identity = images
        .iter()
        .position(|x| *x == gen)
        .ok_or_else(|| Error::Automorphism("identity t -> t is missing".into()))?;
    let mut table = vec![vec![0; d]; d];
    for i in 0..d {
        for j in 0..d {
            // (sigma_i o sigma_j)(t) = sigma_i(sigma_j(t))
            let comp = field.substitute(&images[j], &images[i]);
            table[i][j] = images
                .iter()
                .position(|x| *x == comp)
                .ok_or_else(|| Error::Automorphism(format!("composition of {i} and {j} is not in the set")))?;
        }
    }
    let elements = images.into_iter().enumerate().map(|(index, image_of_t)| FieldAutomorphism { image_of_t, index }).collect();
    Ok(GaloisGroup { elements, table, identity })
}

/// Linear form `alpha_1 X_1 + ... + alpha_m X_m` over `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub coeffs: Vec<FieldElement>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(FieldElement::is_zero) {
            return Err(Error::InvalidInput("linear form is identically zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    /// Proportional form with first non-zero coefficient equal to one.
    pub fn normalized(&self, field: &NumberField) -> LinearForm {
        let lead = self.coeffs.iter().find(|c| !c.is_zero()).expect("non-zero form");
        let inv = field.inv(lead).expect("non-zero");
        LinearForm { coeffs: self.coeffs.iter().map(|c| field.mul(c, &inv)).collect() }
    }

    pub fn is_proportional(&self, other: &LinearForm, field: &NumberField) -> bool {
        self.normalized(field) == other.normalized(field)
    }

    /// Value at a rational point.
    pub fn evaluate(&self, field: &NumberField, x: &[Rational]) -> FieldElement {
        self.coeffs
            .iter()
            .zip(x)
            .fold(field.from_int(0), |acc, (c, xi)| field.add(&acc, &field.scale(c, xi)))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("[{c}]*X{}", i + 1))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `sigma(l)`, coefficient-wise.
pub fn apply_automorphism(field: &NumberField, sigma: &FieldAutomorphism, form: &LinearForm) -> LinearForm {
    LinearForm { coeffs: form.coeffs.iter().map(|c| field.substitute(c, &sigma.image_of_t)).collect() }
}

/// Coefficients of the forms restricted to the span of `basis` (rows in `Q^m`).
pub fn restrict(field: &NumberField, forms: &[LinearForm], basis: &[Vec<Rational>]) -> Vec<Vec<FieldElement>> {
    forms.iter().map(|l| basis.iter().map(|a| l.evaluate(field, a)).collect()).collect()
}

/// `rank L`, or `rank_D L` when a basis of `D` is given.
pub fn rank_over_k(field: &NumberField, forms: &[LinearForm], subspace: Option<&[Vec<Rational>]>) -> Result<usize> {
    let Some(m) = forms.first().map(LinearForm::nvars) else { return Ok(0) };
    if forms.iter().any(|l| l.nvars() != m) {
        return Err(Error::InvalidInput("linear forms have different numbers of variables".into()));
    }
    match subspace {
        None => {
            let rows: Vec<Vec<FieldElement>> = forms.iter().map(|l| l.coeffs.clone()).collect();
            Ok(rank(field, &rows, m))
        }
        Some(basis) => {
            check_subspace(basis, m)?;
            Ok(rank(field, &restrict(field, forms, basis), basis.len()))
        }
    }
}

/// Rejects bases with wrong width or dependent vectors.
pub fn check_subspace(basis: &[Vec<Rational>], m: usize) -> Result<()> {
    if basis.iter().any(|v| v.len() != m) {
        return Err(Error::InvalidInput(format!("subspace vectors must have {m} coordinates")));
    }
    if rank(&Rationals::new(), basis, m) != basis.len() {
        return Err(Error::InvalidInput("subspace basis is linearly dependent".into()));
    }
    Ok(())
}

/// JSON description of a field with its automorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    /// Ascending integer coefficients of the monic minimal polynomial.
    pub min_poly: Vec<String>,
    /// Images of `t`, each as coordinates in `1, t, ..., t^(d-1)`.
    pub automorphisms: Vec<Vec<String>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<(NumberField, GaloisGroup)> {
        let field = NumberField::new(self.min_poly.iter().map(|s| parse_int(s)).collect::<Result<_>>()?)?;
        let images = self.automorphisms.iter().map(|c| field.parse_element(c)).collect::<Result<Vec<_>>>()?;
        let group = validate_automorphisms(&field, images)?;
        Ok((field, group))
    }

    pub fn parse_element(field: &NumberField, coords: &[String]) -> Result<FieldElement> {
        field.parse_element(coords)
    }

    pub fn from_field(field: &NumberField, group: &GaloisGroup) -> Self {
        Self {
            min_poly: field.min_poly.iter().map(Int::to_string).collect(),
            automorphisms: group.elements.iter().map(|s| element_strings(&s.image_of_t)).collect(),
        }
    }
}

pub fn element_strings(a: &FieldElement) -> Vec<String> {
    a.0.iter().map(format_rational).collect()
}
