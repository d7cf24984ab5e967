//! Exact linear algebra over an abstract field.
//!
//! The routines here take the field as a value so that number fields, whose
//! elements need the defining polynomial to multiply, fit the same interface
//! as plain scalar types.

use std::fmt::Debug;
use std::marker::PhantomData;
use std::ops::Neg;

use num_traits::Num;

/// A field given by its operations.
pub trait Field {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}

/// A field whose elements are a plain `num_traits` scalar type.
///
/// Intended for exact types such as [`crate::Rational`]; with floating point
/// types zero tests are exact comparisons, so elimination is only as good as
/// the input conditioning.
pub struct Scalars<T>(PhantomData<T>);

impl<T> Scalars<T> {
    pub const fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T> Default for Scalars<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for Scalars<T> {
    fn clone(&self) -> Self {
        Self::new()
    }
}

impl<T> Copy for Scalars<T> {}

impl<T> Debug for Scalars<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Scalars<{}>", std::any::type_name::<T>())
    }
}

impl<T> Field for Scalars<T>
where
    T: Num + Clone + Debug + Neg<Output = T>,
{
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn neg(&self, a: &T) -> T {
        -a.clone()
    }
    fn inv(&self, a: &T) -> Option<T> {
        if a.is_zero() {
            None
        } else {
            Some(T::one() / a.clone())
        }
    }
}

/// Reduced row echelon form of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Echelon<E> {
    /// Non-zero rows, each with a leading one in its pivot column.
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<E> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Gauss–Jordan elimination to reduced row echelon form.
pub fn rref<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Echelon<F::Elem> {
    let mut m: Vec<Vec<F::Elem>> = rows.to_vec();
    debug_assert!(m.iter().all(|r| r.len() == ncols));
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !field.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(&m[r][c]).expect("pivot is non-zero");
        for j in c..ncols {
            m[r][j] = field.mul(&m[r][j], &inv);
        }
        for i in 0..m.len() {
            if i == r || field.is_zero(&m[i][c]) {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..ncols {
                let t = field.mul(&factor, &m[r][j]);
                m[i][j] = field.sub(&m[i][j], &t);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Echelon { rows: m, pivots, ncols }
}

pub fn rank<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    rref(field, rows, ncols).rank()
}

/// Whether `v` lies in the row space of `basis`.
pub fn in_span<F: Field>(field: &F, basis: &Echelon<F::Elem>, v: &[F::Elem]) -> bool {
    let mut w = v.to_vec();
    for (row, &c) in basis.rows.iter().zip(&basis.pivots) {
        if field.is_zero(&w[c]) {
            continue;
        }
        let factor = w[c].clone();
        for j in c..basis.ncols {
            let t = field.mul(&factor, &row[j]);
            w[j] = field.sub(&w[j], &t);
        }
    }
    w.iter().all(|x| field.is_zero(x))
}

/// Basis of the sum of two row spaces.
pub fn sum_spaces<F: Field>(
    field: &F,
    a: &[Vec<F::Elem>],
    b: &[Vec<F::Elem>],
    ncols: usize,
) -> Echelon<F::Elem> {
    let rows: Vec<_> = a.iter().chain(b).cloned().collect();
    rref(field, &rows, ncols)
}

/// Basis of the intersection of two row spaces (Zassenhaus).
pub fn intersect_spaces<F: Field>(
    field: &F,
    a: &[Vec<F::Elem>],
    b: &[Vec<F::Elem>],
    ncols: usize,
) -> Echelon<F::Elem> {
    let mut block = Vec::with_capacity(a.len() + b.len());
    for r in a {
        let mut row = r.clone();
        row.extend(r.iter().cloned());
        block.push(row);
    }
    for r in b {
        let mut row = r.clone();
        row.extend(std::iter::repeat_with(|| field.zero()).take(ncols));
        block.push(row);
    }
    let e = rref(field, &block, 2 * ncols);
    let inter: Vec<Vec<F::Elem>> = e
        .rows
        .iter()
        .zip(&e.pivots)
        .filter(|(_, &p)| p >= ncols)
        .map(|(row, _)| row[ncols..].to_vec())
        .collect();
    rref(field, &inter, ncols)
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel<F: Field>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let e = rref(field, rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); ncols];
            v[f] = field.one();
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                v[p] = field.neg(&row[f]);
            }
            v
        })
        .collect()
}

/// Solve `sum_i c_i rows[i] = target`, returning one solution if any.
pub fn solve_combination<F: Field>(
    field: &F,
    rows: &[Vec<F::Elem>],
    target: &[F::Elem],
    ncols: usize,
) -> Option<Vec<F::Elem>> {
    // Columns of the system are the given rows; augment with the target.
    let n = rows.len();
    let system: Vec<Vec<F::Elem>> = (0..ncols)
        .map(|j| {
            let mut r: Vec<F::Elem> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let e = rref(field, &system, n + 1);
    if e.pivots.contains(&n) {
        return None;
    }
    let mut sol = vec![field.zero(); n];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        sol[p] = row[n].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Rationals};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_and_rref() {
        let f = Rationals::new();
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let e = rref(&f, &m, 3);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(rank(&f, &mat(&[]), 3), 0);
    }

    #[test]
    fn span_and_solve() {
        let f = Rationals::new();
        let m = mat(&[&[1, 0, 1], &[0, 1, 1]]);
        let e = rref(&f, &m, 3);
        assert!(in_span(&f, &e, &[q(2), q(3), q(5)]));
        assert!(!in_span(&f, &e, &[q(0), q(0), q(1)]));
        let sol = solve_combination(&f, &m, &[q(2), q(3), q(5)], 3).unwrap();
        assert_eq!(sol, vec![q(2), q(3)]);
        assert!(solve_combination(&f, &m, &[q(0), q(0), q(1)], 3).is_none());
    }

    #[test]
    fn zassenhaus_intersection() {
        let f = Rationals::new();
        let a = mat(&[&[1, 0, 0], &[0, 1, 0]]);
        let b = mat(&[&[0, 1, 0], &[0, 0, 1]]);
        let i = intersect_spaces(&f, &a, &b, 3);
        assert_eq!(i.rows, mat(&[&[0, 1, 0]]));
        let s = sum_spaces(&f, &a, &b, 3);
        assert_eq!(s.rank(), 3);
        let none = intersect_spaces(&f, &mat(&[&[1, 0]]), &mat(&[&[0, 1]]), 2);
        assert_eq!(none.rank(), 0);
    }

    #[test]
    fn kernel_basis() {
        let f = Rationals::new();
        let m = mat(&[&[1, 1, 0]]);
        let k = kernel(&f, &m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: Rational = m[0].iter().zip(v).map(|(a, b)| a * b).sum();
            assert_eq!(dot, q(0));
        }
    }

    #[test]
    fn works_over_f64() {
        let f = Scalars::<f64>::new();
        let m = vec![vec![2.0, 4.0], vec![1.0, 2.0]];
        assert_eq!(rank(&f, &m, 2), 1);
    }
}
