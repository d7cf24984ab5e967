//! Real root isolation for rational polynomials by Sturm sequences.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::Rational;

/// Ascending coefficients with no trailing zeros (empty for the zero polynomial).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatPoly(pub Vec<Rational>);

impl RatPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Remainder of division by a non-zero polynomial.
    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = &r[k] / &lead;
            if !q.is_zero() {
                for (i, c) in d.0.iter().enumerate() {
                    let t = &q * c;
                    r[k - dd + i] -= t;
                }
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly::new(r)
    }

    /// Exact quotient by a divisor.
    pub fn div_exact(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(n) = self.degree() else { return RatPoly(vec![]) };
        if n < dd {
            return RatPoly(vec![]);
        }
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); n - dd + 1];
        for k in (dd..=n).rev() {
            let c = &r[k] / &lead;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    let t = &c * dc;
                    r[k - dd + i] -= t;
                }
            }
            q[k - dd] = c;
        }
        RatPoly::new(q)
    }

    pub fn monic(&self) -> RatPoly {
        match self.0.last() {
            Some(l) => RatPoly(self.0.iter().map(|c| c / l).collect()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Same roots, all simple.
    pub fn squarefree(&self) -> RatPoly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.clone()
        } else {
            self.div_exact(&g)
        }
    }
}

fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm sequence of a squarefree polynomial.
struct Sturm {
    seq: Vec<RatPoly>,
}

impl Sturm {
    fn new(p: &RatPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(RatPoly(r.0.into_iter().map(|c| -c).collect()));
        }
        Sturm { seq }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in &self.seq {
            let s = sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }
}

/// Distinct real roots of `p` in the open interval `(lo, hi)`, ascending,
/// each isolated exactly and then refined in double precision.
pub(crate) fn real_roots_in(p: &RatPoly, lo: &Rational, hi: &Rational) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 || lo >= hi {
        return vec![];
    }
    let sf = p.squarefree();
    let sturm = Sturm::new(&sf);
    let mut out = Vec::new();
    let two = Rational::from_integer(2.into());
    // Intervals (a, b] with their root counts.
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.variations(lo) - sturm.variations(hi))];
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        let fb = sign(&sf.eval(&b));
        if count == 1 {
            if fb == 0 {
                if &b != hi {
                    out.push(b.to_f64().unwrap());
                }
            } else {
                out.push(refine(&sf, &a, &b, fb));
            }
            continue;
        }
        let mid = (&a + &b) / &two;
        let vm = sturm.variations(&mid);
        stack.push((a.clone(), mid.clone(), sturm.variations(&a) - vm));
        stack.push((mid, b.clone(), vm - sturm.variations(&b)));
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// Bisection for the single simple root in `(a, b)` with `sign p(b) = fb`.
fn refine(p: &RatPoly, a: &Rational, b: &Rational, fb: i8) -> f64 {
    let (mut lo, mut hi) = (a.to_f64().unwrap(), b.to_f64().unwrap());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = p.eval_f64(mid);
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            return mid;
        };
        if s == fb {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `{y in [lo, hi] : |g(y)| <= m}` as disjoint closed intervals of positive
/// length.
pub(crate) fn sublevel_intervals(g: &RatPoly, m: &Rational, lo: &Rational, hi: &Rational) -> Vec<(f64, f64)> {
    sublevel_set(g, m, lo, hi).0
}

/// As [`sublevel_intervals`], also returning the roots of `g = +-m` inside
/// `(lo, hi)`; isolated points of the sublevel set are among them.
pub(crate) fn sublevel_set(
    g: &RatPoly,
    m: &Rational,
    lo: &Rational,
    hi: &Rational,
) -> (Vec<(f64, f64)>, Vec<f64>) {
    let (lof, hif) = (lo.to_f64().unwrap(), hi.to_f64().unwrap());
    if g.degree().unwrap_or(0) == 0 {
        let c = g.0.first().cloned().unwrap_or_else(Rational::zero);
        let iv = if c.abs() <= *m { vec![(lof, hif)] } else { vec![] };
        return (iv, vec![]);
    }
    let shift = |d: &Rational| {
        let mut c = g.0.clone();
        c[0] -= d;
        RatPoly::new(c)
    };
    let mut roots = real_roots_in(&shift(m), lo, hi);
    if !m.is_zero() {
        roots.extend(real_roots_in(&shift(&-m.clone()), lo, hi));
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut cuts = roots.clone();
    cuts.push(lof);
    cuts.push(hif);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let mid = Rational::from_float(0.5 * (w[0] + w[1])).unwrap_or_else(|| lo.clone());
        if g.eval(&mid).abs() <= *m {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    (out, roots)
}
