//! Exact S-part arithmetic for values of integer polynomials, binary forms and
//! decomposable forms.
//!
//! For a finite set of primes `S` every non-zero integer splits uniquely as
//! `m = p1^a1 ... ps^as * b` with `b` coprime to the primes of `S`; the
//! positive factor `p1^a1 ... ps^as` is the *S-part* `[m]_S`. This crate
//! computes S-parts of form values and the machinery around them:
//!
//! * [`arith`]: valuations, S-part splits, radicals, iterated logarithms.
//! * [`forms`]: integer polynomials and binary forms, discriminants, GL2(Z) action.
//! * [`congruence`]: root counts modulo prime powers by lift-and-branch.
//! * [`lattice`]: class lattices, Lagrange–Gauss reduction, planar region areas and
//!   exact lattice point counts.
//! * [`density`]: exact counters for values with large S-part and asymptotic reports.
//! * [`extremal`]: explicit sequences of points whose values have large S-part.
//! * [`numfield`]: exact arithmetic in `Q[t]/(m(t))` with validated automorphisms.
//! * [`decomp`]: decomposable forms, their factor graphs and critical-subset data.
//! * [`effective`]: evaluators for the explicit exponents and prime-factor inequalities.
//!
//! Linear algebra is written once over the [`linalg::Field`] trait and used both
//! over the rationals and over number fields. Real-valued helpers are generic
//! over [`num_traits::Float`].

pub mod arith;
pub mod congruence;
pub mod decomp;
pub mod density;
pub mod effective;
mod error;
pub mod extremal;
pub mod forms;
pub mod lattice;
pub mod linalg;
pub mod mpoly;
pub mod numfield;
mod realroots;

pub use error::{Error, Result};

/// Arbitrary precision integer used throughout the crate.
pub type Int = num_bigint::BigInt;
/// Arbitrary precision non-negative integer.
pub type Natural = num_bigint::BigUint;
/// Exact rational number.
pub type Rational = num_rational::BigRational;
/// The field of rationals as a [`linalg::Field`].
pub type Rationals = linalg::Scalars<Rational>;

pub use arith::{PrimeSet, SPartSplit};

pub use forms::{BinaryForm, IntPolynomial};
pub use decomp::DecomposableForm;
pub use numfield::{FieldElement, NumberField};


/// Parse a rational written as `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().map_err(|_| bad())?;
            let d: Int = d.trim().parse().map_err(|_| bad())?;
            if num_traits::Zero::is_zero(&d) {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Format a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a decimal integer string.
pub fn parse_int(s: &str) -> Result<Int> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}
