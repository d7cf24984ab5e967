use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use spart_core::arith::{s_split, FactorBudget};
use spart_core::congruence::stabilization_report;
use spart_core::decomp::{
    c_of_f, check_effective_conditions, check_finiteness_condition, check_nonvanishing, dependence_graph,
    discriminant_form, factor_graph, full_space, q_values, rank_chain, DecompSpec, Subspace,
};
use spart_core::density::{asymptotic_report, geometric_grid, DensityForm, Epsilon};
use spart_core::effective::{cor2_check, kappa, radical_growth_report, spart_bound_fit, Cor2Branch};
use spart_core::extremal::{
    default_schedule, find_good_primes, hensel_tower_poly, minkowski_tower_binary, size_ratio, split_data,
    split_pair_tower_binary, PrimeMode, TowerEntry,
};
use spart_core::forms::{Form, FormKind, FormSpec};
use spart_core::lattice::{class_lattice, count_region_points_with_area, region_area, RegionSpec};
use spart_core::mpoly::IntFormSpec;
use spart_core::numfield::FieldSpec;
use spart_core::{format_rational, parse_int, BinaryForm, DecomposableForm, Int, IntPolynomial, PrimeSet, Rational};

use crate::args::*;
use crate::output::{emit, render, Format, Manifest, Report, Table};
use crate::Failure;

type Out = Result<Report, Failure>;

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot set thread count: {e}")))?;
    }
    let (name, default_format) = match &cli.command {
        Command::Spart(_) => ("spart", Format::Json),
        Command::Hensel(_) => ("hensel", Format::Json),
        Command::Lattice(_) => ("lattice", Format::Csv),
        Command::Density(_) => ("density", Format::Csv),
        Command::Extremal(_) => ("extremal", Format::Json),
        Command::Decomp(_) => ("decomp", Format::Json),
        Command::Effective(_) => ("effective", Format::Json),
    };
    let mut manifest = Manifest::new(name, &cli.command);
    let report = match &cli.command {
        Command::Spart(a) => spart(a),
        Command::Hensel(a) => hensel(a, &mut manifest),
        Command::Lattice(a) => lattice(a, &mut manifest),
        Command::Density(a) => density(a, &mut manifest),
        Command::Extremal(a) => extremal(&a.verb, &mut manifest),
        Command::Decomp(a) => decomp(&a.verb, &mut manifest),
        Command::Effective(a) => effective(&a.verb, &mut manifest),
    }?;
    let text = render(&manifest, &report, cli.format.unwrap_or(default_format)).map_err(Failure::Usage)?;
    emit(&text, cli.out.as_deref()).map_err(Failure::Write)
}

// Input helpers

fn read_input(path: &Path, manifest: &mut Manifest) -> Result<Vec<u8>, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    Ok(bytes)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, manifest: &mut Manifest) -> Result<T, Failure> {
    let bytes = read_input(path, manifest)?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_form(args: &FormArgs, binary: bool, manifest: &mut Manifest) -> Result<Form, Failure> {
    let spec = match (&args.coeffs, &args.form) {
        (Some(c), None) => {
            FormSpec { kind: if binary { FormKind::Binary } else { FormKind::Polynomial }, coeffs: c.clone() }
        }
        (None, Some(path)) => read_json(path, manifest)?,
        _ => return Err(Failure::Usage("give exactly one of --coeffs and --form".into())),
    };
    Ok(Form::from_spec(&spec)?)
}

fn load_poly(args: &FormArgs, manifest: &mut Manifest) -> Result<IntPolynomial, Failure> {
    match load_form(args, false, manifest)? {
        Form::Poly(f) => Ok(f),
        Form::Binary(_) => Err(Failure::Usage("expected a polynomial".into())),
    }
}

fn load_binary(args: &FormArgs, manifest: &mut Manifest) -> Result<BinaryForm, Failure> {
    match load_form(args, true, manifest)? {
        Form::Binary(f) => Ok(f),
        Form::Poly(_) => Err(Failure::Usage("expected a binary form".into())),
    }
}

fn load_decomp(path: &Path, manifest: &mut Manifest) -> Result<(DecompSpec, DecomposableForm), Failure> {
    let spec: DecompSpec = read_json(path, manifest)?;
    let form = spec.build()?;
    Ok((spec, form))
}

fn prime_set(primes: &[u64]) -> Result<PrimeSet, Failure> {
    Ok(PrimeSet::new(primes.to_vec())?)
}

fn choose_subspace(spec: &DecompSpec, m: usize, choice: &SubspaceChoice) -> Result<Subspace, Failure> {
    match choice.subspace {
        None => Ok(full_space(m)),
        Some(i) => spec
            .parsed_subspaces()?
            .get(i)
            .cloned()
            .ok_or_else(|| Failure::Usage(format!("input has no subspace {i}"))),
    }
}

// Formatting helpers

fn s<T: ToString>(v: &T) -> String {
    v.to_string()
}

fn rat(r: &Rational) -> String {
    format_rational(r)
}

fn opt_rat(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, |r| Value::String(rat(r)))
}

fn subspace_json(d: &Subspace) -> Value {
    json!(d.iter().map(|v| v.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn opt_float(x: Option<f64>) -> Value {
    x.map_or(Value::Null, float)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

fn json_only(result: Value) -> Out {
    Ok(Report { result, table: None })
}

// Commands

fn spart(a: &SpartArgs) -> Out {
    let m = parse_int(&a.m)?;
    let primes = prime_set(&a.primes)?;
    let split = s_split(&m, &primes)?;
    json_only(json!({
        "m": s(&m),
        "primes": primes.primes(),
        "s_part": s(&split.s_part),
        "cofactor": s(&split.cofactor),
        "exponents": split.exponents,
    }))
}

fn hensel(a: &HenselArgs, manifest: &mut Manifest) -> Out {
    let form = load_form(&a.form, a.binary, manifest)?;
    let r = stabilization_report(&form, a.p, a.kmax)?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            let branches: serde_json::Map<String, Value> =
                row.per_branch.iter().map(|(root, n)| (root.to_string(), json!(n))).collect();
            json!({"k": row.k, "count": row.count, "per_branch": branches})
        })
        .collect();
    let table = Table {
        header: vec!["k", "count"],
        rows: r.rows.iter().map(|row| vec![s(&row.k), s(&row.count)]).collect(),
    };
    Ok(Report {
        result: json!({"p": r.p, "g_p": r.g_p, "rows": rows, "violations": r.violations}),
        table: Some(table),
    })
}

fn lattice(a: &LatticeArgs, manifest: &mut Manifest) -> Out {
    let form = load_binary(&a.form, manifest)?;
    let [x0, y0] = a.anchor[..] else {
        return Err(Failure::Usage("--anchor takes two integers".into()));
    };
    let lat = class_lattice(&Int::from(x0), &Int::from(y0), &Int::from(a.h))?;
    let mut rows = Vec::new();
    let mut table = Table {
        header: vec!["B", "M", "h", "count", "main_term", "error", "normalized_error"],
        rows: vec![],
    };
    for &b in &a.b {
        for &m in &a.m {
            let region = RegionSpec { form: form.clone(), b, m };
            let area = region_area(&region, a.tol);
            let c = count_region_points_with_area(&region, &lat, a.prim, area, a.budget)?;
            let scale = if a.prim { b * (3.0 * b).ln() } else { (b / lat.shortest).max(1.0) };
            let normalized = c.error_observed / scale;
            rows.push(json!({
                "B": b, "M": m, "h": a.h, "count": c.count, "area": float(c.area),
                "main_term": float(c.main_term), "error": float(c.error_observed),
                "normalized_error": float(normalized),
            }));
            table.rows.push(vec![
                s(&b),
                s(&m),
                s(&a.h),
                s(&c.count),
                fmt_f(c.main_term),
                fmt_f(c.error_observed),
                fmt_f(normalized),
            ]);
        }
    }
    let result = json!({
        "basis": lat.basis.iter().map(|r| [s(&r[0]), s(&r[1])]).collect::<Vec<_>>(),
        "shortest": float(lat.shortest),
        "prim_only": a.prim,
        "rows": rows,
    });
    Ok(Report { result, table: Some(table) })
}

fn parse_grid(a: &DensityArgs) -> Result<Vec<u64>, Failure> {
    match a.grid.as_deref() {
        None => Ok(vec![a.bmax]),
        Some(g) => {
            if let Some(k) = g.strip_prefix("geometric:") {
                let k: u32 = k.parse().map_err(|_| Failure::Usage(format!("bad grid {g:?}")))?;
                Ok(geometric_grid(a.b0, a.bmax, k)?)
            } else {
                let mut v = g
                    .split(',')
                    .map(|t| t.trim().parse::<u64>().map_err(|_| Failure::Usage(format!("bad grid value {t:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                v.sort_unstable();
                v.dedup();
                Ok(v)
            }
        }
    }
}

fn density(a: &DensityArgs, manifest: &mut Manifest) -> Out {
    let form = match a.kind {
        DensityKind::Poly => DensityForm::Poly(load_poly(&a.form, manifest)?),
        DensityKind::Binary => DensityForm::Binary(load_binary(&a.form, manifest)?),
        DensityKind::Decomp => {
            let path = a.input.as_ref().ok_or_else(|| Failure::Usage("decomp density needs --input".into()))?;
            DensityForm::Decomposable(load_decomp(path, manifest)?.1.integer_form().clone())
        }
    };
    let primes = prime_set(&a.primes)?;
    let eps = Epsilon::parse(&a.eps)?;
    let grid = parse_grid(a)?;
    let r = asymptotic_report(&form, &primes, eps, &grid)?;
    let rows: Vec<Value> = (0..r.grid.len())
        .map(|i| json!({"B": r.grid[i], "count": r.counts[i], "model": float(r.model[i]), "ratio": float(r.ratios[i])}))
        .collect();
    let table = Table {
        header: vec!["B", "count", "model", "ratio"],
        rows: (0..r.grid.len())
            .map(|i| vec![s(&r.grid[i]), s(&r.counts[i]), fmt_f(r.model[i]), fmt_f(r.ratios[i])])
            .collect(),
    };
    let result = json!({
        "eps": eps.to_string(),
        "s_prime": r.s_prime,
        "rows": rows,
        "tail_min": float(r.tail_min),
        "tail_max": float(r.tail_max),
        "stable_from": r.stable_from,
        "warnings": r.warnings,
    });
    Ok(Report { result, table: Some(table) })
}

fn tower_report(entries: &[TowerEntry], extra: Value) -> Out {
    let rows: Vec<Value> = entries
        .iter()
        .map(|e| {
            json!({
                "k": e.k, "l": e.l, "x": s(&e.x), "y": e.y.as_ref().map(s),
                "value": s(&e.value), "s_part": s(&e.s_part),
                "ratio_log": float(e.ratio_log), "size_ratio": float(size_ratio(e)),
            })
        })
        .collect();
    let table = Table {
        header: vec!["k", "l", "x", "y", "value", "s_part", "ratio_log"],
        rows: entries
            .iter()
            .map(|e| {
                vec![
                    s(&e.k),
                    e.l.map(|l| l.to_string()).unwrap_or_default(),
                    s(&e.x),
                    e.y.as_ref().map(s).unwrap_or_default(),
                    s(&e.value),
                    s(&e.s_part),
                    fmt_f(e.ratio_log),
                ]
            })
            .collect(),
    };
    let mut result = extra;
    result["tower"] = Value::Array(rows);
    Ok(Report { result, table: Some(table) })
}

fn extremal(verb: &ExtremalVerb, manifest: &mut Manifest) -> Out {
    match verb {
        ExtremalVerb::Primes { form, binary, mode, count, search_bound } => {
            let form = load_form(form, *binary, manifest)?;
            let mode = match mode {
                ModeArg::HasRoot => PrimeMode::HasRoot,
                ModeArg::SplitsCompletely => PrimeMode::SplitsCompletely,
            };
            let g = find_good_primes(&form, mode, *count, *search_bound)?;
            json_only(json!({"primes": g.primes.primes(), "complete": g.complete}))
        }
        ExtremalVerb::Hensel { form, p, kmax } => {
            let f = load_poly(form, manifest)?;
            tower_report(&hensel_tower_poly(&f, *p, *kmax)?, json!({"p": p}))
        }
        ExtremalVerb::Minkowski { form, p, kmax } => {
            let f = load_binary(form, manifest)?;
            tower_report(&minkowski_tower_binary(&f, *p, *kmax)?, json!({"p": p}))
        }
        ExtremalVerb::Split { form, p, q, count } => {
            let f = load_binary(form, manifest)?;
            let data = split_data(&f, *p, *q)?;
            let pairs = default_schedule(*p, *q, *count);
            let extra = json!({
                "p": p, "q": q, "beta1": rat(&data.beta1), "beta2": rat(&data.beta2), "u": s(&data.u),
            });
            tower_report(&split_pair_tower_binary(&f, &data, &pairs)?, extra)
        }
    }
}

/// Input for the discriminant form: a field and the images of a basis under
/// each embedding, as coordinate vectors.
#[derive(Debug, Deserialize)]
struct DiscFormSpec {
    field: FieldSpec,
    images: Vec<Vec<Vec<String>>>,
}

fn form_summary(f: &DecomposableForm) -> Value {
    json!({
        "nvars": f.nvars(),
        "degree": f.degree(),
        "num_factors": f.num_factors(),
        "constant": rat(f.constant()),
        "factors": f.factors().iter().map(|(l, e)| json!({
            "coeffs": l.coeffs.iter().map(|c| c.coords().iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "multiplicity": e,
        })).collect::<Vec<_>>(),
        "integer_form": IntFormSpec::from_form(f.integer_form()),
        "integer_form_text": f.integer_form().to_string(),
        "galois_permutations": f.galois_permutations(),
    })
}

fn decomp(verb: &DecompVerb, manifest: &mut Manifest) -> Out {
    match verb {
        DecompVerb::Check(i) => {
            let (_, f) = load_decomp(&i.input, manifest)?;
            json_only(json!({"valid": true, "form": form_summary(&f)}))
        }
        DecompVerb::Graph(i) => {
            let (_, f) = load_decomp(&i.input, manifest)?;
            let g = factor_graph(&f);
            json_only(json!({
                "edges": g.edges, "components": g.components,
                "triangularly_connected": g.triangularly_connected,
            }))
        }
        DecompVerb::Conditions(i) => {
            let (spec, f) = load_decomp(&i.input, manifest)?;
            let c = check_effective_conditions(&f);
            let (nonvanishing, vanishing) = check_nonvanishing(&f);
            let fin = check_finiteness_condition(&f, &spec.parsed_extra_forms(f.field())?)?;
            json_only(json!({
                "effective": {
                    "full_rank": c.full_rank,
                    "last_variable_in_components": c.last_variable_in_components,
                    "components": c.components,
                },
                "nonvanishing": nonvanishing,
                "vanishing_factor": vanishing,
                "finiteness": {
                    "holds": fin.holds, "full_rank": fin.full_rank,
                    "proper_subsets": fin.proper_subsets, "failing_subset": fin.failing_subset,
                },
            }))
        }
        DecompVerb::Qvalues { input, subspace } => {
            let (spec, f) = load_decomp(&input.input, manifest)?;
            let d = choose_subspace(&spec, f.nvars(), subspace)?;
            let r = q_values(&f, &d)?;
            let subsets: Vec<Value> = r
                .subsets
                .iter()
                .map(|x| {
                    json!({
                        "subset": x.subset, "is_gal_proper": x.is_gal_proper, "rank_d": x.rank_d,
                        "q_d": opt_rat(&x.q_d), "is_critical": x.is_critical,
                        "is_minimal_critical": x.is_minimal_critical,
                    })
                })
                .collect();
            let table = Table {
                header: vec!["subset", "gal_proper", "rank_d", "q_d", "critical", "minimal_critical"],
                rows: r
                    .subsets
                    .iter()
                    .map(|x| {
                        vec![
                            x.subset.iter().map(s).collect::<Vec<_>>().join(" "),
                            s(&x.is_gal_proper),
                            s(&x.rank_d),
                            x.q_d.as_ref().map(rat).unwrap_or_default(),
                            s(&x.is_critical),
                            s(&x.is_minimal_critical),
                        ]
                    })
                    .collect(),
            };
            let result = json!({
                "subspace": subspace_json(&d), "dim_d": r.dim_d, "q_f": opt_rat(&r.q_f),
                "q_full": opt_rat(&r.q_full), "q_max": opt_rat(&r.q_max), "critical": r.critical,
                "minimal_critical": r.minimal_critical, "zero_rank": r.zero_rank,
                "diagnostic": r.diagnostic, "subsets": subsets,
            });
            Ok(Report { result, table: Some(table) })
        }
        DecompVerb::Cf(i) => {
            let (spec, f) = load_decomp(&i.input, manifest)?;
            let r = c_of_f(&f, &spec.parsed_subspaces()?)?;
            json_only(json!({
                "c_lower": opt_rat(&r.c_lower),
                "exact": r.exact,
                "witness_subspace": r.witness_subspace.as_ref().map(subspace_json),
                "witness_subset": r.witness_subset,
                "per_subspace": r.per_subspace.iter().map(|(d, v)| json!({
                    "subspace": subspace_json(d), "value": opt_rat(v),
                })).collect::<Vec<_>>(),
            }))
        }
        DecompVerb::Chain { input, subspace, seed } => {
            let (spec, f) = load_decomp(&input.input, manifest)?;
            let d = choose_subspace(&spec, f.nvars(), subspace)?;
            let g = dependence_graph(&f, &d)?;
            let chain = rank_chain(&f, &d, *seed)?;
            json_only(json!({
                "subspace": subspace_json(&d),
                "minimal_dependent": g.minimal_dependent,
                "edges": g.edges,
                "connected": g.connected,
                "chain": chain,
            }))
        }
        DecompVerb::Discform(i) => {
            let spec: DiscFormSpec = read_json(&i.input, manifest)?;
            let (field, group) = spec.field.build()?;
            let images = spec
                .images
                .iter()
                .map(|row| row.iter().map(|c| field.parse_element(c)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let f = discriminant_form(field, group, &images)?;
            json_only(json!({"form": form_summary(&f), "decomp": f.to_spec()}))
        }
    }
}

fn budget(f: &FactorArgs) -> FactorBudget {
    FactorBudget { trial_bound: f.trial_bound, rho_iterations: f.rho_iterations }
}

fn parse_pair(t: &str) -> Result<(Int, Int), Failure> {
    let (v, sp) = t.split_once(':').ok_or_else(|| Failure::Usage(format!("expected |v|:s, got {t:?}")))?;
    Ok((parse_int(v)?, parse_int(sp)?))
}

/// Sample pairs from a JSON document written by `extremal`.
fn tower_sample(path: &Path, manifest: &mut Manifest) -> Result<Vec<(Int, Int)>, Failure> {
    let doc: Value = read_json(path, manifest)?;
    let tower = doc
        .pointer("/result/tower")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Usage(format!("{} has no result.tower array", path.display())))?;
    tower
        .iter()
        .map(|e| {
            let field = |k: &str| {
                e.get(k)
                    .and_then(Value::as_str)
                    .ok_or_else(|| Failure::Usage(format!("tower entry without {k}")))
                    .and_then(|t| Ok(parse_int(t)?))
            };
            Ok((num_traits::Signed::abs(&field("value")?), field("s_part")?))
        })
        .collect()
}

fn effective(verb: &EffectiveVerb, manifest: &mut Manifest) -> Out {
    match verb {
        EffectiveVerb::Kappa { c, primes, d } => {
            let k = kappa(*c, &prime_set(primes)?, *d)?;
            json_only(json!({
                "product_form": float(k.product_form),
                "simplified_form": float(k.simplified_form),
                "product_form_inverse": float(1.0 / k.product_form),
            }))
        }
        EffectiveVerb::Fit { values, input, kappa } => {
            let mut sample = values.iter().map(|t| parse_pair(t)).collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = input {
                sample.extend(tower_sample(path, manifest)?);
            }
            let r = spart_bound_fit(&sample, *kappa)?;
            json_only(json!({
                "sample_size": sample.len(), "constant": float(r.constant),
                "argmax": r.argmax, "warnings": r.warnings,
            }))
        }
        EffectiveVerb::Cor2 { f0, d, c5, factor } => {
            let r = cor2_check(&parse_int(f0)?, *d, *c5, &budget(factor))?;
            json_only(json!({
                "P": s(&r.greatest_prime),
                "omega": r.omega,
                "ineq10": {"lhs": float(r.ineq10_lhs), "rhs": float(r.ineq10_rhs), "margin": float(r.ineq10_margin)},
                "ineq11": {
                    "branch": match r.branch { Cor2Branch::FewPrimes => "few_primes", Cor2Branch::ManyPrimes => "many_primes" },
                    "bound": opt_float(r.ineq11_bound),
                    "margin": opt_float(r.ineq11_margin),
                },
            }))
        }
        EffectiveVerb::Radical { form, from, to, factor } => {
            let f = load_poly(form, manifest)?;
            if from > to {
                return Err(Failure::Usage("--from exceeds --to".into()));
            }
            let rows = radical_growth_report(&f, *from..=*to, &budget(factor));
            let table = Table {
                header: vec!["x", "value", "radical", "log_radical", "log2_x", "three_log", "min_log2", "min_three_log", "skipped"],
                rows: rows
                    .iter()
                    .map(|r| {
                        let of = |x: Option<f64>| x.map(fmt_f).unwrap_or_default();
                        vec![
                            s(&r.x),
                            s(&r.value),
                            r.radical.as_ref().map(s).unwrap_or_default(),
                            of(r.log_radical),
                            of(r.log2_x),
                            of(r.three_log),
                            of(r.running_min_log2),
                            of(r.running_min_three_log),
                            r.skipped.clone().unwrap_or_default(),
                        ]
                    })
                    .collect(),
            };
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "x": r.x, "value": s(&r.value), "radical": r.radical.as_ref().map(s),
                        "log_radical": opt_float(r.log_radical), "log2_x": opt_float(r.log2_x),
                        "three_log": opt_float(r.three_log), "running_min_log2": opt_float(r.running_min_log2),
                        "running_min_three_log": opt_float(r.running_min_three_log), "skipped": r.skipped,
                    })
                })
                .collect();
            Ok(Report { result: json!({"rows": json_rows}), table: Some(table) })
        }
    }
}
