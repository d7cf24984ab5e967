//! Homogeneous multivariate forms with integer or number field coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::forms::BinaryForm;
use crate::numfield::{FieldElement, LinearForm, NumberField};
use crate::{parse_int, Error, Int, Result};

/// Homogeneous form in `ZZ[X_1, ..., X_m]`, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntForm {
    nvars: usize,
    degree: usize,
    /// Exponent vectors to non-zero coefficients.
    terms: BTreeMap<Vec<u32>, Int>,
}

impl IntForm {
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Int)>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::InvalidInput("a form needs at least one variable".into()));
        }
        let mut map: BTreeMap<Vec<u32>, Int> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::InvalidInput(format!("exponent vector {e:?} has wrong length")));
            }
            *map.entry(e).or_insert_with(Int::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let Some(first) = map.keys().next() else {
            return Err(Error::InvalidInput("zero form".into()));
        };
        let degree = first.iter().sum::<u32>() as usize;
        if map.keys().any(|e| e.iter().sum::<u32>() as usize != degree) {
            return Err(Error::InvalidInput("form is not homogeneous".into()));
        }
        Ok(Self { nvars, degree, terms: map })
    }

    pub fn from_binary(form: &BinaryForm) -> Self {
        let n = form.degree() as u32;
        let terms = form
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (vec![n - i as u32, i as u32], c.clone()))
            .collect();
        Self::new(2, terms).expect("non-zero binary form")
    }

    pub fn to_binary(&self) -> Option<BinaryForm> {
        if self.nvars != 2 {
            return None;
        }
        let mut coeffs = vec![Int::zero(); self.degree + 1];
        for (e, c) in &self.terms {
            coeffs[e[1] as usize] = c.clone();
        }
        BinaryForm::new(coeffs).ok()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Int> {
        &self.terms
    }

    pub fn evaluate(&self, x: &[Int]) -> Int {
        assert_eq!(x.len(), self.nvars);
        let pows: Vec<Vec<Int>> = x
            .iter()
            .map(|xi| {
                let mut v = vec![Int::one()];
                for k in 1..=self.degree {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(c.clone(), |acc, (i, &k)| acc * &pows[i][k as usize]))
            .sum()
    }

    /// Evaluation in machine integers; `None` on overflow.
    pub fn evaluate_i128(&self, x: &[i64]) -> Option<i128> {
        let mut total: i128 = 0;
        for (e, c) in &self.terms {
            let mut t = c.to_i128()?;
            for (xi, &k) in x.iter().zip(e) {
                t = t.checked_mul((*xi as i128).checked_pow(k)?)?;
            }
            total = total.checked_add(t)?;
        }
        Some(total)
    }

    /// Sum of absolute values of coefficients: `|F(x)| <= c_F ||x||^n`.
    pub fn height_bound(&self) -> Int {
        self.terms.values().map(Signed::abs).sum()
    }
}

impl fmt::Display for IntForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("X{}", i + 1) } else { format!("X{}^{k}", i + 1) })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// JSON form: `{"nvars": m, "terms": [[[e1, ..., em], "c"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntFormSpec {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl IntFormSpec {
    pub fn build(&self) -> Result<IntForm> {
        let terms = self.terms.iter().map(|(e, c)| Ok((e.clone(), parse_int(c)?))).collect::<Result<Vec<_>>>()?;
        IntForm::new(self.nvars, terms)
    }

    pub fn from_form(form: &IntForm) -> Self {
        Self { nvars: form.nvars, terms: form.terms.iter().map(|(e, c)| (e.clone(), c.to_string())).collect() }
    }
}

/// Polynomial with coefficients in a number field.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl KPoly {
    pub fn constant(nvars: usize, c: FieldElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Self { nvars, terms }
    }

    pub fn mul_linear(&self, field: &NumberField, l: &LinearForm) -> Self {
        let mut out: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (e, c) in &self.terms {
            for (i, a) in l.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] += 1;
                let prod = field.mul(c, a);
                let slot = out.entry(e2).or_insert_with(|| field.from_int(0));
                *slot = field.add(slot, &prod);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms: out }
    }

    /// The integer form, if every coefficient is a rational integer.
    pub fn to_int_form(&self) -> Result<IntForm> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let r = c
                .as_rational()
                .ok_or_else(|| Error::ExpansionMismatch(format!("coefficient of {e:?} is not rational: {c}")))?;
            if !r.is_integer() {
                return Err(Error::ExpansionMismatch(format!("coefficient of {e:?} is not integral: {c}")));
            }
            terms.push((e.clone(), r.to_integer()));
        }
        IntForm::new(self.nvars, terms).map_err(|_| Error::ExpansionMismatch("product expands to zero".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn binary_round_trip_and_evaluation() {
        let b = BinaryForm::from_i64(&[1, 0, 0, -2]).unwrap();
        let f = IntForm::from_binary(&b);
        assert_eq!(f.to_binary().unwrap(), b);
        assert_eq!(f.evaluate(&[int(5), int(4)]), int(-3));
        assert_eq!(f.evaluate_i128(&[5, 4]), Some(-3));
        assert_eq!(f.height_bound(), int(3));
    }

    #[test]
    fn rejects_inhomogeneous() {
        let e = IntForm::new(2, vec![(vec![2, 0], int(1)), (vec![0, 1], int(1))]);
        assert!(e.is_err());
        assert!(IntForm::new(2, vec![(vec![1, 1], int(0))]).is_err());
    }

    #[test]
    fn expansion_over_sqrt2() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let l1 = LinearForm::new(vec![k.from_int(1), k.generator()]).unwrap();
        let l2 = LinearForm::new(vec![k.from_int(1), k.neg(&k.generator())]).unwrap();
        let p = KPoly::constant(2, k.from_int(1)).mul_linear(&k, &l1).mul_linear(&k, &l2);
        let f = p.to_int_form().unwrap();
        assert_eq!(f, IntForm::new(2, vec![(vec![2, 0], int(1)), (vec![0, 2], int(-2))]).unwrap());
        let half = KPoly::constant(2, k.from_int(1)).mul_linear(&k, &l1);
        assert!(matches!(half.to_int_form(), Err(Error::ExpansionMismatch(_))));
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"nvars":2,"terms":[[[0,2],"-2"],[[2,0],"1"]]}"#;
        let spec: IntFormSpec = serde_json::from_str(json).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(serde_json::to_string(&IntFormSpec::from_form(&f)).unwrap(), json);
    }
}
