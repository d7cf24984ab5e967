//! Decomposable forms `c * l_1^e_1 ... l_r^e_r` over a number field `K`.
//!
//! A [`DecomposableForm`] keeps the factorization alongside its expansion in
//! `ZZ[X_1, ..., X_m]`. The structural checks here work directly on the
//! factors: the triangle graph of the forms, the rank and span conditions,
//! the finiteness criterion for Galois-proper subsets, the `q_D` values with
//! their critical subsets, and dependence graphs on subspaces of `Q^m`.
//!
//! Subsets of the factor list are bit masks, so every enumeration is capped
//! at [`MAX_SUBSET_FORMS`] factors.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{in_span, intersect_spaces, rank, rref, sum_spaces};
use crate::mpoly::{IntForm, IntFormSpec, KPoly};
use crate::numfield::{
    apply_automorphism, check_subspace, element_strings, restrict, FieldElement, FieldSpec, GaloisGroup,
    LinearForm, NumberField,
};
use crate::{format_rational, parse_rational, Error, Rational, Rationals, Result};

/// Largest factor list accepted by the subset enumerations.
pub const MAX_SUBSET_FORMS: usize = 16;

/// Basis of a subspace of `Q^m`, one row per basis vector.
pub type Subspace = Vec<Vec<Rational>>;

/// `Q^m` with its standard basis.
pub fn full_space(m: usize) -> Subspace {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

/// A validated factorization `F = c * prod l^e(l)`.
#[derive(Debug, Clone)]
pub struct DecomposableForm {
    field: NumberField,
    group: GaloisGroup,
    constant: Rational,
    factors: Vec<(LinearForm, u32)>,
    integer_form: IntForm,
    /// `perms[s][i] = j` when `sigma_s(l_i)` is proportional to `l_j`.
    perms: Vec<Vec<usize>>,
}

impl DecomposableForm {
    /// Validates the factorization in a fixed order: expansion, pairwise
    /// non-proportionality, closure under the group, constant multiplicity on
    /// orbits.
    pub fn new(
        field: NumberField,
        group: GaloisGroup,
        constant: Rational,
        factors: Vec<(LinearForm, u32)>,
        integer_form: Option<IntForm>,
    ) -> Result<Self> {
        if constant.is_zero() {
            return Err(Error::ZeroInput);
        }
        let Some(m) = factors.first().map(|(l, _)| l.nvars()) else {
            return Err(Error::InvalidInput("a decomposable form needs at least one factor".into()));
        };
        if factors.iter().any(|(l, _)| l.nvars() != m) {
            return Err(Error::InvalidInput("linear forms have different numbers of variables".into()));
        }
        if factors.iter().any(|(_, e)| *e == 0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        if group.order() != field.degree() {
            return Err(Error::Automorphism("group order differs from the field degree".into()));
        }

        let mut poly = KPoly::constant(m, field.from_rational(constant.clone()));
        for (l, e) in &factors {
            for _ in 0..*e {
                poly = poly.mul_linear(&field, l);
            }
        }
        let expanded = poly.to_int_form()?;
        if let Some(given) = integer_form {
            if given != expanded {
                return Err(Error::ExpansionMismatch(format!("product is {expanded}, supplied form is {given}")));
            }
        }

        let normal: Vec<LinearForm> = factors.iter().map(|(l, _)| l.normalized(&field)).collect();
        for i in 0..normal.len() {
            if let Some(j) = (i + 1..normal.len()).find(|&j| normal[j] == normal[i]) {
                return Err(Error::ProportionalPair(i, j));
            }
        }

        let perms = galois_closure(&field, &group, &factors)?;

        Ok(Self { field, group, constant, factors, integer_form: expanded, perms })
    }

    /// A form over `Q` with the trivial group.
    pub fn over_rationals(constant: Rational, factors: Vec<(Vec<Rational>, u32)>) -> Result<Self> {
        let field = NumberField::rationals();
        let group = GaloisGroup::trivial(&field);
        let factors = factors
            .into_iter()
            .map(|(c, e)| Ok((LinearForm::new(c.into_iter().map(|x| field.from_rational(x)).collect())?, e)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, group, constant, factors, None)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn group(&self) -> &GaloisGroup {
        &self.group
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn factors(&self) -> &[(LinearForm, u32)] {
        &self.factors
    }

    pub fn integer_form(&self) -> &IntForm {
        &self.integer_form
    }

    /// Number of variables `m`.
    pub fn nvars(&self) -> usize {
        self.integer_form.nvars()
    }

    /// `n = sum e(l)`.
    pub fn degree(&self) -> usize {
        self.integer_form.degree()
    }

    /// Number of distinct factors `r`.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Permutation of factor indices induced by each group element.
    pub fn galois_permutations(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// `c * prod l(x)^e(l)` computed in `K`.
    pub fn evaluate_in_field(&self, x: &[Rational]) -> FieldElement {
        let k = &self.field;
        self.factors.iter().fold(k.from_rational(self.constant.clone()), |acc, (l, e)| {
            k.mul(&acc, &k.pow(&l.evaluate(k, x), *e))
        })
    }

    fn forms(&self) -> Vec<LinearForm> {
        self.factors.iter().map(|(l, _)| l.clone()).collect()
    }

    fn coeff_rows(&self) -> Vec<Vec<FieldElement>> {
        self.factors.iter().map(|(l, _)| l.coeffs.clone()).collect()
    }

    fn check_cap(&self) -> Result<()> {
        if self.factors.len() > MAX_SUBSET_FORMS {
            return Err(Error::Budget(format!(
                "{} linear forms exceed the subset enumeration cap of {MAX_SUBSET_FORMS}",
                self.factors.len()
            )));
        }
        Ok(())
    }

    fn weight(&self, mask: u32) -> u64 {
        indices(mask).map(|i| u64::from(self.factors[i].1)).sum()
    }

    fn image_mask(&self, s: usize, mask: u32) -> u32 {
        indices(mask).fold(0, |acc, i| acc | (1 << self.perms[s][i]))
    }

    /// Whether every automorphism maps `M` onto itself or off itself.
    pub fn is_gal_proper(&self, subset: &[usize]) -> bool {
        let mask = to_mask(subset);
        (0..self.perms.len()).all(|s| {
            let img = self.image_mask(s, mask);
            img == mask || img & mask == 0
        })
    }

    pub fn to_spec(&self) -> DecompSpec {
        DecompSpec {
            field: FieldSpec::from_field(&self.field, &self.group),
            constant: format_rational(&self.constant),
            linear_forms: self
                .factors
                .iter()
                .map(|(l, e)| LinearFormSpec { coeffs: l.coeffs.iter().map(element_strings).collect(), multiplicity: *e })
                .collect(),
            integer_form: Some(IntFormSpec::from_form(&self.integer_form)),
            subspaces: Vec::new(),
            extra_forms: Vec::new(),
        }
    }
}

/// Permutations of the factor list induced by the group, checking closure
/// up to proportionality and constant multiplicity on orbits.
///
/// For a factorization of a rational form both properties follow from unique
/// factorization in `K[X]`, so this only fails on lists that do not multiply
/// out to the claimed form.
pub fn galois_closure(field: &NumberField, group: &GaloisGroup, factors: &[(LinearForm, u32)]) -> Result<Vec<Vec<usize>>> {
    let normal: Vec<LinearForm> = factors.iter().map(|(l, _)| l.normalized(field)).collect();
    let mut perms = Vec::with_capacity(group.order());
    for sigma in group.iter() {
        let mut perm = Vec::with_capacity(factors.len());
        for (i, (l, _)) in factors.iter().enumerate() {
            let image = apply_automorphism(field, sigma, l).normalized(field);
            let j = normal.iter().position(|n| *n == image).ok_or_else(|| {
                Error::OrbitBreach(format!("automorphism {} maps form {i} outside the factor list", sigma.index))
            })?;
            perm.push(j);
        }
        perms.push(perm);
    }
    for (s, perm) in perms.iter().enumerate() {
        for (i, &j) in perm.iter().enumerate() {
            if factors[i].1 != factors[j].1 {
                return Err(Error::MultiplicityBreach(format!(
                    "automorphism {s} maps form {i} (e = {}) to form {j} (e = {})",
                    factors[i].1, factors[j].1
                )));
            }
        }
    }
    Ok(perms)
}

fn indices(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn to_mask(subset: &[usize]) -> u32 {
    subset.iter().fold(0, |acc, &i| acc | (1 << i))
}

fn rows_of<T: Clone>(rows: &[Vec<T>], mask: u32) -> Vec<Vec<T>> {
    indices(mask).map(|i| rows[i].clone()).collect()
}

/// Canonical order on index sets: by length, then lexicographically.
fn sort_sets(sets: &mut [Vec<usize>]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut root_slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = self.find(i);
            if root_slot[r] == usize::MAX {
                root_slot[r] = out.len();
                out.push(Vec::new());
            }
            out[root_slot[r]].push(i);
        }
        out
    }
}

/// The graph on `L_F` joining two forms that lie in a rank-two triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<Vec<usize>>,
    pub triangularly_connected: bool,
}

/// Pairwise non-proportional forms make every relation in a rank-two triple
/// have non-zero coefficients, so the rank test alone decides an edge.
pub fn factor_graph(form: &DecomposableForm) -> FactorGraph {
    let rows = form.coeff_rows();
    let (r, m) = (rows.len(), form.nvars());
    let k = &form.field;
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(r);
    for i in 0..r {
        for j in i + 1..r {
            let joined = (0..r)
                .filter(|&l| l != i && l != j)
                .any(|l| rank(k, &[rows[i].clone(), rows[j].clone(), rows[l].clone()], m) == 2);
            if joined {
                edges.push((i, j));
                uf.union(i, j);
            }
        }
    }
    let components = uf.components();
    let triangularly_connected = components.len() == 1 && r >= 3;
    FactorGraph { edges, components, triangularly_connected }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectiveConditions {
    /// `rank L_F = m`.
    pub full_rank: bool,
    /// One component, or `X_m` in the span of every component.
    pub last_variable_in_components: bool,
    /// Number of components of the factor graph.
    pub components: usize,
}

pub fn check_effective_conditions(form: &DecomposableForm) -> EffectiveConditions {
    let k = &form.field;
    let m = form.nvars();
    let rows = form.coeff_rows();
    let full_rank = rank(k, &rows, m) == m;
    let graph = factor_graph(form);
    let mut x_m = vec![k.from_int(0); m];
    x_m[m - 1] = k.from_int(1);
    let last_variable_in_components = graph.components.len() == 1
        || graph.components.iter().all(|comp| {
            let span = rref(k, &comp.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>(), m);
            in_span(k, &span, &x_m)
        });
    EffectiveConditions { full_rank, last_variable_in_components, components: graph.components.len() }
}

/// Outcome of the finiteness criterion, with the first failing subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitenessReport {
    pub holds: bool,
    pub full_rank: bool,
    /// Galois-proper subsets `0 < M < L_F` that were examined.
    pub proper_subsets: usize,
    pub failing_subset: Option<Vec<usize>>,
}

/// Tests `rank L_F = m` and, for every Galois-proper `0 < M < L_F`, that
/// `sum_sigma [sigma M] cap [L_F minus sigma M]` contains a form of `extra`
/// or of `L_F`.
pub fn check_finiteness_condition(form: &DecomposableForm, extra: &[LinearForm]) -> Result<FinitenessReport> {
    form.check_cap()?;
    let k = &form.field;
    let m = form.nvars();
    if extra.iter().any(|l| l.nvars() != m) {
        return Err(Error::InvalidInput("extra forms have the wrong number of variables".into()));
    }
    let rows = form.coeff_rows();
    let r = rows.len();
    let full_rank = rank(k, &rows, m) == m;
    if !full_rank {
        return Ok(FinitenessReport { holds: false, full_rank, proper_subsets: 0, failing_subset: None });
    }
    let candidates: Vec<Vec<FieldElement>> =
        rows.iter().cloned().chain(extra.iter().map(|l| l.coeffs.clone())).collect();
    let all: u32 = if r == 32 { u32::MAX } else { (1u32 << r) - 1 };
    let masks: Vec<u32> = (1..all).filter(|&mask| form.is_gal_proper(&indices(mask).collect::<Vec<_>>())).collect();
    let failing: Vec<u32> = masks
        .par_iter()
        .copied()
        .filter(|&mask| {
            let images: BTreeSet<u32> = (0..form.perms.len()).map(|s| form.image_mask(s, mask)).collect();
            let mut total: Vec<Vec<FieldElement>> = Vec::new();
            for img in images {
                let inter = intersect_spaces(k, &rows_of(&rows, img), &rows_of(&rows, all & !img), m);
                total = sum_spaces(k, &total, &inter.rows, m).rows;
            }
            let span = rref(k, &total, m);
            span.rank() == 0 || !candidates.iter().any(|c| in_span(k, &span, c))
        })
        .collect();
    let failing_subset = failing.iter().min_by_key(|&&mask| (mask.count_ones(), indices(mask).collect::<Vec<_>>())).map(|&mask| indices(mask).collect());
    Ok(FinitenessReport { holds: failing.is_empty(), full_rank, proper_subsets: masks.len(), failing_subset })
}

/// Whether no factor vanishes at a non-zero rational point, with the first
/// factor that does.
pub fn check_nonvanishing(form: &DecomposableForm) -> (bool, Option<usize>) {
    let d = form.field.degree();
    let m = form.nvars();
    for (i, (l, _)) in form.factors.iter().enumerate() {
        let system: Vec<Vec<Rational>> =
            (0..d).map(|c| l.coeffs.iter().map(|a| a.coords()[c].clone()).collect()).collect();
        if rank(&Rationals::new(), &system, m) < m {
            return (false, Some(i));
        }
    }
    (true, None)
}

/// One subset `M` of `L_F` with its data on a subspace `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetReport {
    pub subset: Vec<usize>,
    pub is_gal_proper: bool,
    pub rank_d: usize,
    /// `sum e(l) / rank_D M`; `None` when the rank is zero.
    pub q_d: Option<Rational>,
    pub is_critical: bool,
    pub is_minimal_critical: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QReport {
    pub dim_d: usize,
    /// Every non-empty subset, in canonical order.
    pub subsets: Vec<SubsetReport>,
    /// Maximum of `q_D(M)` over `0 < M < L_F` with `rank_D M < dim D`.
    pub q_f: Option<Rational>,
    /// `q_D(L_F)`.
    pub q_full: Option<Rational>,
    /// The critical value: maximum of `q_D(M)` over all non-empty `M`.
    pub q_max: Option<Rational>,
    pub critical: Vec<Vec<usize>>,
    pub minimal_critical: Vec<Vec<usize>>,
    /// Subsets vanishing identically on `D`.
    pub zero_rank: Vec<Vec<usize>>,
    pub diagnostic: Option<String>,
}

fn restricted_rows(form: &DecomposableForm, d: &Subspace) -> Result<Vec<Vec<FieldElement>>> {
    check_subspace(d, form.nvars())?;
    Ok(restrict(&form.field, &form.forms(), d))
}

/// `q_D` data for every non-empty subset of `L_F`.
///
/// The two halves of the submodularity lemma for critical sets are checked
/// whenever no single form vanishes on `D`; a violation is an
/// [`Error::Invariant`].
pub fn q_values(form: &DecomposableForm, d: &Subspace) -> Result<QReport> {
    form.check_cap()?;
    let dim = d.len();
    if dim < 2 {
        return Err(Error::Precondition("the subspace must have dimension at least 2".into()));
    }
    let rows = restricted_rows(form, d)?;
    let r = rows.len();
    let k = &form.field;
    let all: u32 = (1u32 << r) - 1;
    let ranks: Vec<usize> = (1..=all).into_par_iter().map(|mask| rank(k, &rows_of(&rows, mask), dim)).collect();
    let rank_of = |mask: u32| ranks[mask as usize - 1];
    let q_of = |mask: u32| {
        let rk = rank_of(mask);
        (rk > 0).then(|| Rational::new(form.weight(mask).into(), rk.into()))
    };

    let q_f = (1..all).filter(|&mask| rank_of(mask) < dim).filter_map(q_of).max();
    let q_full = q_of(all);
    let q_max = (1..=all).filter_map(q_of).max();
    let critical_masks: Vec<u32> =
        (1..=all).filter(|&mask| q_max.is_some() && q_of(mask) == q_max).collect();
    let minimal_masks: Vec<u32> = critical_masks
        .iter()
        .copied()
        .filter(|&mask| !critical_masks.iter().any(|&c| c != mask && c & mask == c))
        .collect();

    let any_zero_singleton = (0..r).any(|i| rank_of(1 << i) == 0);
    if !any_zero_singleton {
        for (a, &m1) in minimal_masks.iter().enumerate() {
            for &m2 in &minimal_masks[a + 1..] {
                if m1 & m2 != 0 {
                    return Err(Error::Invariant(format!(
                        "minimal critical sets {:?} and {:?} intersect",
                        indices(m1).collect::<Vec<_>>(),
                        indices(m2).collect::<Vec<_>>()
                    )));
                }
            }
        }
        for (a, &m1) in critical_masks.iter().enumerate() {
            for &m2 in &critical_masks[a + 1..] {
                if m1 & m2 == 0 && !critical_masks.contains(&(m1 | m2)) {
                    return Err(Error::Invariant(format!(
                        "union of disjoint critical sets {:?} and {:?} is not critical",
                        indices(m1).collect::<Vec<_>>(),
                        indices(m2).collect::<Vec<_>>()
                    )));
                }
            }
        }
    }

    let mut subsets: Vec<SubsetReport> = (1..=all)
        .map(|mask| SubsetReport {
            subset: indices(mask).collect(),
            is_gal_proper: form.is_gal_proper(&indices(mask).collect::<Vec<_>>()),
            rank_d: rank_of(mask),
            q_d: q_of(mask),
            is_critical: critical_masks.contains(&mask),
            is_minimal_critical: minimal_masks.contains(&mask),
        })
        .collect();
    subsets.sort_by(|a, b| a.subset.len().cmp(&b.subset.len()).then_with(|| a.subset.cmp(&b.subset)));
    let collect = |masks: &[u32]| {
        let mut v: Vec<Vec<usize>> = masks.iter().map(|&m| indices(m).collect()).collect();
        sort_sets(&mut v);
        v
    };
    let zero_masks: Vec<u32> = (1..=all).filter(|&mask| rank_of(mask) == 0).collect();
    let diagnostic = if q_f.is_none() {
        Some("no proper subset has positive rank below dim D".to_string())
    } else if any_zero_singleton {
        Some("some form vanishes identically on D".to_string())
    } else {
        None
    };
    Ok(QReport {
        dim_d: dim,
        subsets,
        q_f,
        q_full,
        q_max,
        critical: collect(&critical_masks),
        minimal_critical: collect(&minimal_masks),
        zero_rank: collect(&zero_masks),
        diagnostic,
    })
}

/// `Q^m` followed by the coordinate subspaces of dimension at least two.
pub fn default_subspace_pool(m: usize) -> Vec<Subspace> {
    let mut pool = vec![full_space(m)];
    if m > 12 {
        return pool;
    }
    let id = full_space(m);
    let mut masks: Vec<u32> = (1u32..(1 << m) - 1).filter(|s| s.count_ones() >= 2).collect();
    masks.sort_by_key(|&s| (std::cmp::Reverse(s.count_ones()), indices(s).collect::<Vec<_>>()));
    pool.extend(masks.into_iter().map(|s| indices(s).map(|i| id[i].clone()).collect()));
    pool
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CReport {
    /// `max_D q_D(F) dim D / deg F` over the pool.
    pub c_lower: Option<Rational>,
    pub witness_subspace: Option<Subspace>,
    pub witness_subset: Option<Vec<usize>>,
    /// True when the pool settles `c(F)` exactly (two variables).
    pub exact: bool,
    pub per_subspace: Vec<(Subspace, Option<Rational>)>,
}

/// Lower bound for `c(F)` from a pool of subspaces; the default pool is used
/// when `pool` is empty.
pub fn c_of_f(form: &DecomposableForm, pool: &[Subspace]) -> Result<CReport> {
    let m = form.nvars();
    let pool: Vec<Subspace> = if pool.is_empty() { default_subspace_pool(m) } else { pool.to_vec() };
    let n = Rational::from_integer(form.degree().into());
    let mut best: Option<(Rational, Subspace, Vec<usize>)> = None;
    let mut per_subspace = Vec::with_capacity(pool.len());
    let mut exact = false;
    for d in &pool {
        let report = q_values(form, d)?;
        if d.len() == m && m == 2 {
            exact = true;
        }
        let value = report.q_f.as_ref().map(|q| q * Rational::from_integer(d.len().into()) / &n);
        if let Some(v) = &value {
            if best.as_ref().is_none_or(|(b, _, _)| v > b) {
                let witness = report
                    .subsets
                    .iter()
                    .find(|s| s.subset.len() < form.num_factors() && s.rank_d < d.len() && s.q_d == report.q_f)
                    .map(|s| s.subset.clone())
                    .unwrap_or_default();
                best = Some((v.clone(), d.clone(), witness));
            }
        }
        per_subspace.push((d.clone(), value));
    }
    let (c_lower, witness_subspace, witness_subset) = match best {
        Some((c, d, s)) => (Some(c), Some(d), Some(s)),
        None => (None, None, None),
    };
    Ok(CReport { c_lower, witness_subspace, witness_subset, exact, per_subspace })
}

/// Minimal dependent sets on `D` and the graph they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceGraph {
    pub minimal_dependent: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
}

fn nonvanishing_on(form: &DecomposableForm, rows: &[Vec<FieldElement>]) -> Result<()> {
    if let Some(i) = rows.iter().position(|row| row.iter().all(FieldElement::is_zero)) {
        return Err(Error::Precondition(format!("form {i} ({}) vanishes identically on D", form.factors[i].0)));
    }
    Ok(())
}

fn minimal_dependent_masks(form: &DecomposableForm, rows: &[Vec<FieldElement>], dim: usize) -> Vec<u32> {
    let k = &form.field;
    let r = rows.len();
    let all: u32 = (1u32 << r) - 1;
    let mut masks: Vec<u32> = (1..=all)
        .into_par_iter()
        .filter(|&mask| {
            let size = mask.count_ones() as usize;
            if size < 2 || size > dim + 1 {
                return false;
            }
            if rank(k, &rows_of(rows, mask), dim) != size - 1 {
                return false;
            }
            indices(mask).all(|i| rank(k, &rows_of(rows, mask & !(1 << i)), dim) == size - 1)
        })
        .collect();
    masks.sort_by_key(|&m| (m.count_ones(), indices(m).collect::<Vec<_>>()));
    masks
}

pub fn dependence_graph(form: &DecomposableForm, d: &Subspace) -> Result<DependenceGraph> {
    form.check_cap()?;
    let rows = restricted_rows(form, d)?;
    nonvanishing_on(form, &rows)?;
    let r = rows.len();
    let masks = minimal_dependent_masks(form, &rows, d.len());
    let mut edge_set = BTreeSet::new();
    let mut uf = UnionFind::new(r);
    for &mask in &masks {
        let members: Vec<usize> = indices(mask).collect();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                edge_set.insert((i, j));
                uf.union(i, j);
            }
        }
    }
    for (s, perm) in form.perms.iter().enumerate() {
        for &(i, j) in &edge_set {
            let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            if !edge_set.contains(&(a, b)) {
                return Err(Error::Invariant(format!("automorphism {s} maps edge ({i}, {j}) to a non-edge")));
            }
        }
    }
    let connected = uf.components().len() == 1;
    let mut minimal_dependent: Vec<Vec<usize>> = masks.iter().map(|&m| indices(m).collect()).collect();
    sort_sets(&mut minimal_dependent);
    Ok(DependenceGraph { minimal_dependent, edges: edge_set.into_iter().collect(), connected })
}

/// A greedy chain of minimal dependent sets on `D`, each meeting the union
/// of the previous ones and raising its rank, until the union spans `D`.
///
/// Requires the finiteness criterion with `L = L_F` and no form vanishing on
/// `D`; under these hypotheses failure to extend the chain is an
/// [`Error::Invariant`] carrying the state.
pub fn rank_chain(form: &DecomposableForm, d: &Subspace, seed: usize) -> Result<Vec<Vec<usize>>> {
    if seed >= form.num_factors() {
        return Err(Error::InvalidInput(format!("seed {seed} is not a factor index")));
    }
    let fin = check_finiteness_condition(form, &[])?;
    if !fin.holds {
        return Err(Error::Precondition(match fin.failing_subset {
            Some(s) => format!("finiteness criterion fails at subset {s:?}"),
            None => "linear forms do not have full rank".into(),
        }));
    }
    let rows = restricted_rows(form, d)?;
    nonvanishing_on(form, &rows)?;
    let dim = d.len();
    let k = &form.field;
    let masks = minimal_dependent_masks(form, &rows, dim);
    let first = masks
        .iter()
        .copied()
        .find(|m| m >> seed & 1 == 1)
        .ok_or_else(|| Error::Invariant(format!("form {seed} lies in no minimal dependent set on D")))?;
    let mut chain = vec![first];
    let mut union = first;
    let mut current = rank(k, &rows_of(&rows, union), dim);
    while current < dim {
        let next = masks
            .iter()
            .copied()
            .find(|&m| m & union != 0 && rank(k, &rows_of(&rows, union | m), dim) > current)
            .ok_or_else(|| {
                Error::Invariant(format!(
                    "chain stuck at rank {current} < {dim}: union {:?}, chain {:?}, minimal dependent sets {:?}",
                    indices(union).collect::<Vec<_>>(),
                    chain.iter().map(|&m| indices(m).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    masks.iter().map(|&m| indices(m).collect::<Vec<_>>()).collect::<Vec<_>>()
                ))
            })?;
        chain.push(next);
        union |= next;
        current = rank(k, &rows_of(&rows, union), dim);
    }
    if chain.len() > dim.saturating_sub(1).max(1) {
        return Err(Error::Invariant(format!("chain of length {} exceeds dim D - 1 = {}", chain.len(), dim - 1)));
    }
    Ok(chain.iter().map(|&m| indices(m).collect()).collect())
}

/// `prod_{i<j} (l_i - l_j)^2` with `l_i = sum_j sigma_i(w_j) X_j`, from the
/// images of a basis `w_2, ..., w_n` under the `n` embeddings.
pub fn discriminant_form(
    field: NumberField,
    group: GaloisGroup,
    images: &[Vec<FieldElement>],
) -> Result<DecomposableForm> {
    let n = images.len();
    if n < 2 {
        return Err(Error::InvalidInput("at least two embeddings are needed".into()));
    }
    let m = images[0].len();
    if m == 0 || images.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidInput("every embedding needs the same number of basis images".into()));
    }
    let mut factors = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let coeffs = images[i].iter().zip(&images[j]).map(|(a, b)| field.sub(a, b)).collect();
            let l = LinearForm::new(coeffs)
                .map_err(|_| Error::InvalidInput(format!("embeddings {i} and {j} agree on the basis")))?;
            factors.push((l, 2));
        }
    }
    DecomposableForm::new(field, group, Rational::one(), factors, None)
}

/// JSON schema for a linear form with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFormSpec {
    /// One coordinate vector per variable.
    pub coeffs: Vec<Vec<String>>,
    #[serde(default = "one_u32")]
    pub multiplicity: u32,
}

fn one_u32() -> u32 {
    1
}

/// JSON schema for a decomposable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompSpec {
    pub field: FieldSpec,
    #[serde(default = "one_string")]
    pub constant: String,
    pub linear_forms: Vec<LinearFormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integer_form: Option<IntFormSpec>,
    /// Extra subspaces for `c(F)`, as bases of rational vectors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subspaces: Vec<Vec<Vec<String>>>,
    /// Forms added to `L_F` in the finiteness criterion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_forms: Vec<LinearFormSpec>,
}

fn one_string() -> String {
    "1".into()
}

impl DecompSpec {
    pub fn build(&self) -> Result<DecomposableForm> {
        let (field, group) = self.field.build()?;
        let constant = parse_rational(&self.constant)?;
        let factors = self
            .linear_forms
            .iter()
            .map(|l| Ok((parse_linear(&field, l)?, l.multiplicity)))
            .collect::<Result<Vec<_>>>()?;
        let integer_form = self.integer_form.as_ref().map(IntFormSpec::build).transpose()?;
        DecomposableForm::new(field, group, constant, factors, integer_form)
    }

    pub fn parsed_subspaces(&self) -> Result<Vec<Subspace>> {
        self.subspaces
            .iter()
            .map(|basis| {
                basis.iter().map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()).collect()
            })
            .collect()
    }

    pub fn parsed_extra_forms(&self, field: &NumberField) -> Result<Vec<LinearForm>> {
        self.extra_forms.iter().map(|l| parse_linear(field, l)).collect()
    }
}

fn parse_linear(field: &NumberField, spec: &LinearFormSpec) -> Result<LinearForm> {
    LinearForm::new(spec.coeffs.iter().map(|c| field.parse_element(c)).collect::<Result<Vec<_>>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::validate_automorphisms;
    use crate::Int;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qq(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn xy_x_plus_y() -> DecomposableForm {
        DecomposableForm::over_rationals(q(1), vec![(vec![q(1), q(0)], 1), (vec![q(0), q(1)], 1), (vec![q(1), q(1)], 1)])
            .unwrap()
    }

    fn pell() -> DecomposableForm {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let g = validate_automorphisms(&k, vec![k.generator(), k.neg(&k.generator())]).unwrap();
        let t = k.generator();
        let f = vec![
            (LinearForm::new(vec![k.from_int(1), t.clone()]).unwrap(), 1),
            (LinearForm::new(vec![k.from_int(1), k.neg(&t)]).unwrap(), 1),
        ];
        DecomposableForm::new(k, g, q(1), f, None).unwrap()
    }

    /// `X^3 - 2Y^3` over `Q(t)`, `t^6 = -108`: the cube root of two is
    /// `t^4/18` and `zeta_6 = 1/2 + t^3/12`.
    fn pure_cubic() -> DecomposableForm {
        let k = NumberField::from_i64(&[108, 0, 0, 0, 0, 0, 1]).unwrap();
        let t = k.generator();
        let zeta = k.element(vec![qq(1, 2), q(0), q(0), qq(1, 12), q(0), q(0)]);
        let images = (0..6).map(|j| k.mul(&k.pow(&zeta, j), &t)).collect();
        let g = validate_automorphisms(&k, images).unwrap();
        let alpha = k.scale(&k.pow(&t, 4), &qq(1, 18));
        assert_eq!(k.pow(&alpha, 3), k.from_int(2));
        let omega = k.pow(&zeta, 2);
        let factors = (0..3)
            .map(|j| {
                let root = k.mul(&k.pow(&omega, j), &alpha);
                (LinearForm::new(vec![k.from_int(1), k.neg(&root)]).unwrap(), 1)
            })
            .collect();
        DecomposableForm::new(k, g, q(1), factors, None).unwrap()
    }

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn validates_examples() {
        let f = xy_x_plus_y();
        assert_eq!((f.num_factors(), f.degree(), f.group().order()), (3, 3, 1));
        let p = pell();
        assert_eq!((p.num_factors(), p.degree()), (2, 2));
        assert_eq!(p.integer_form().evaluate(&[int(3), int(2)]), int(1));
        let c = pure_cubic();
        assert_eq!(c.integer_form().evaluate(&[int(5), int(4)]), int(-3));
    }

    #[test]
    fn reports_each_failure_distinctly() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let g = validate_automorphisms(&k, vec![k.generator(), k.neg(&k.generator())]).unwrap();
        let t = k.generator();
        let plus = LinearForm::new(vec![k.from_int(1), t.clone()]).unwrap();
        let minus = LinearForm::new(vec![k.from_int(1), k.neg(&t)]).unwrap();
        let e = DecomposableForm::new(k.clone(), g.clone(), q(1), vec![(plus.clone(), 1)], None);
        assert!(matches!(e, Err(Error::ExpansionMismatch(_))));

        let target = IntForm::new(2, vec![(vec![2, 0], int(1)), (vec![0, 2], int(2))]).unwrap();
        let e = DecomposableForm::new(k.clone(), g.clone(), q(1), vec![(plus.clone(), 1), (minus.clone(), 1)], Some(target));
        assert!(matches!(e, Err(Error::ExpansionMismatch(_))));

        let e = DecomposableForm::over_rationals(q(1), vec![(vec![q(1), q(1)], 1), (vec![q(2), q(2)], 1)]);
        assert_eq!(e.unwrap_err(), Error::ProportionalPair(0, 1));

        let e = DecomposableForm::new(k, g, q(1), vec![(plus, 2), (minus, 1)], None);
        assert!(matches!(e, Err(Error::ExpansionMismatch(_))));
    }

    #[test]
    fn closure_breaches() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let t = k.generator();
        let g = validate_automorphisms(&k, vec![t.clone(), k.neg(&t)]).unwrap();
        let plus = LinearForm::new(vec![k.from_int(1), t.clone()]).unwrap();
        let minus = LinearForm::new(vec![k.from_int(-3), k.scale(&t, &q(3))]).unwrap();
        let e = galois_closure(&k, &g, &[(plus.clone(), 1)]);
        assert!(matches!(e, Err(Error::OrbitBreach(_))));
        let e = galois_closure(&k, &g, &[(plus.clone(), 2), (minus.clone(), 1)]);
        assert!(matches!(e, Err(Error::MultiplicityBreach(_))));
        assert_eq!(galois_closure(&k, &g, &[(plus, 1), (minus, 1)]).unwrap(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn factor_graph_examples() {
        let g = factor_graph(&xy_x_plus_y());
        assert_eq!(g.edges, vec![(0, 1), (0, 2), (1, 2)]);
        assert!(g.triangularly_connected);
        let g = factor_graph(&pell());
        assert!(g.edges.is_empty());
        assert_eq!(g.components.len(), 2);
        let g = factor_graph(&pure_cubic());
        assert_eq!(g.components.len(), 1);
        assert!(g.triangularly_connected);
    }

    #[test]
    fn effective_conditions_examples() {
        let c = check_effective_conditions(&xy_x_plus_y());
        assert_eq!((c.full_rank, c.last_variable_in_components, c.components), (true, true, 1));
        let c = check_effective_conditions(&pell());
        assert_eq!((c.full_rank, c.last_variable_in_components, c.components), (true, false, 2));
        let x2y2 = DecomposableForm::over_rationals(q(1), vec![(vec![q(1), q(0)], 2), (vec![q(0), q(1)], 2)]).unwrap();
        let c = check_effective_conditions(&x2y2);
        assert_eq!((c.full_rank, c.last_variable_in_components, c.components), (true, false, 2));
    }

    #[test]
    fn finiteness_examples() {
        let r = check_finiteness_condition(&pell(), &[]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.failing_subset, Some(vec![0]));
        assert!(check_finiteness_condition(&pure_cubic(), &[]).unwrap().holds);
        assert!(check_finiteness_condition(&xy_x_plus_y(), &[]).unwrap().holds);
    }

    #[test]
    fn gal_proper_subsets() {
        let c = pure_cubic();
        assert!(c.is_gal_proper(&[0]));
        assert!(!c.is_gal_proper(&[0, 1]));
        assert!(c.is_gal_proper(&[0, 1, 2]));
        assert!(pell().is_gal_proper(&[1]));
    }

    #[test]
    fn nonvanishing_examples() {
        assert_eq!(check_nonvanishing(&pell()), (true, None));
        assert_eq!(check_nonvanishing(&xy_x_plus_y()), (false, Some(0)));
        assert!(check_nonvanishing(&pure_cubic()).0);
    }

    #[test]
    fn q_values_examples() {
        let d = full_space(2);
        let r = q_values(&xy_x_plus_y(), &d).unwrap();
        assert_eq!(r.subsets.len(), 7);
        assert_eq!(r.q_full, Some(qq(3, 2)));
        assert_eq!(r.q_f, Some(q(1)));
        assert_eq!(r.minimal_critical, vec![vec![0, 1, 2]]);

        let r = q_values(&pure_cubic(), &d).unwrap();
        assert_eq!((r.q_f, r.q_full), (Some(q(1)), Some(qq(3, 2))));

        let r = q_values(&pell(), &d).unwrap();
        assert_eq!((r.q_f.clone(), r.q_full.clone()), (Some(q(1)), Some(q(1))));
        assert_eq!(r.critical.len(), 3);
        assert_eq!(r.minimal_critical, vec![vec![0], vec![1]]);
        assert!(q_values(&pell(), &vec![vec![q(1), q(0)]]).is_err());
    }

    #[test]
    fn c_of_f_examples() {
        let c = c_of_f(&xy_x_plus_y(), &[]).unwrap();
        assert_eq!(c.c_lower, Some(qq(2, 3)));
        assert!(c.exact);
        assert_eq!(c.witness_subset.as_ref().map(Vec::len), Some(1));
        assert_eq!(c_of_f(&pure_cubic(), &[]).unwrap().c_lower, Some(qq(2, 3)));
        assert_eq!(c_of_f(&pell(), &[]).unwrap().c_lower, Some(q(1)));
    }

    #[test]
    fn dependence_graph_examples() {
        let d = full_space(2);
        let g = dependence_graph(&xy_x_plus_y(), &d).unwrap();
        assert_eq!(g.minimal_dependent, vec![vec![0, 1, 2]]);
        assert_eq!(g.edges.len(), 3);
        assert!(g.connected);
        let g = dependence_graph(&pure_cubic(), &d).unwrap();
        assert_eq!(g.minimal_dependent, vec![vec![0, 1, 2]]);
        assert!(g.connected);
        let g = dependence_graph(&pell(), &d).unwrap();
        assert!(g.minimal_dependent.is_empty() && !g.connected);
        // X vanishes on the line spanned by (0, 1).
        let line = vec![vec![q(0), q(1)], vec![q(0), q(0)]];
        assert!(dependence_graph(&xy_x_plus_y(), &line).is_err());
    }

    #[test]
    fn rank_chain_examples() {
        let d = full_space(2);
        assert_eq!(rank_chain(&xy_x_plus_y(), &d, 0).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(rank_chain(&pure_cubic(), &d, 0).unwrap(), vec![vec![0, 1, 2]]);
        assert!(matches!(rank_chain(&pell(), &d, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn discriminant_forms() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let t = k.generator();
        let g = validate_automorphisms(&k, vec![t.clone(), k.neg(&t)]).unwrap();
        let f = discriminant_form(k.clone(), g.clone(), &[vec![t.clone()], vec![k.neg(&t)]]).unwrap();
        assert_eq!(f.integer_form(), &IntForm::new(1, vec![(vec![2], int(8))]).unwrap());
        let shifted = [vec![k.add(&k.from_int(1), &t)], vec![k.sub(&k.from_int(1), &t)]];
        let f = discriminant_form(k, g, &shifted).unwrap();
        assert_eq!(f.integer_form(), &IntForm::new(1, vec![(vec![2], int(8))]).unwrap());

        let k = NumberField::from_i64(&[1, 0, 1]).unwrap();
        let t = k.generator();
        let g = validate_automorphisms(&k, vec![t.clone(), k.neg(&t)]).unwrap();
        let f = discriminant_form(k.clone(), g, &[vec![t.clone()], vec![k.neg(&t)]]).unwrap();
        assert_eq!(f.integer_form(), &IntForm::new(1, vec![(vec![2], int(-4))]).unwrap());
    }

    #[test]
    fn evaluation_matches_expansion() {
        let c = pure_cubic();
        for (x, y) in [(1, 1), (-3, 7), (12, -5)] {
            let v = c.evaluate_in_field(&[q(x), q(y)]);
            let want = c.integer_form().evaluate(&[int(x), int(y)]);
            assert_eq!(v, c.field().from_rational(Rational::from_integer(want)));
        }
    }

    #[test]
    fn spec_round_trip() {
        let p = pell();
        let json = serde_json::to_string(&p.to_spec()).unwrap();
        let back: DecompSpec = serde_json::from_str(&json).unwrap();
        let q2 = back.build().unwrap();
        assert_eq!(q2.integer_form(), p.integer_form());
    }
}
