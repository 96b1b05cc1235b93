//! Subcommand implementations: resolve parameters, call the library, wrap
//! the report in an [`Envelope`].

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hypercut_core::combinatorics::binomial;
use hypercut_core::hypergraph::{
    check_d1, check_p_alpha, d1_deviation, edge_weight_within, monomial_coefficients, sample_ckp, sample_gnp,
    type_z_density, CutSpec, TypeZVector, VarianceModel, WeightedHypergraph,
};
use hypercut_core::intersection::verify_rank_theorem;
use hypercut_core::io::{
    parse_graph, parse_hypergraph, parse_vector, read_file, write_file, write_graph, write_hypergraph, write_vector,
};
use hypercut_core::johnson::{count_good_functions, gram_spectrum, leading_coefficient};
use hypercut_core::rational::{format_rational, parse_rational, to_f64};
use hypercut_core::structure::{
    cut_norm, density_vector, is_pstar_solution, quotient_graph, solution_space, verify_structure_theorem,
    BalancedSystem, CutNormMode, SolutionVector, CUT_NORM_EXACT_LIMIT,
};
use hypercut_core::{BigInt, BigRational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::Envelope;
use crate::{Cli, Command, SampleArgs, SampleCommand, VarianceChoice, VerifyCommand};

const BRUTE_FORCE_LIMIT: u64 = 10_000_000;
const MONOMIAL_MAX_R: usize = 7;

pub fn name(command: &Command) -> String {
    match command {
        Command::Rank { .. } => "rank".into(),
        Command::Spectrum { .. } => "spectrum".into(),
        Command::Goodfn { .. } => "goodfn".into(),
        Command::Sample(SampleCommand::Gnp(_)) => "sample gnp".into(),
        Command::Sample(SampleCommand::Ckp { .. }) => "sample ckp".into(),
        Command::Verify(VerifyCommand::Identity { .. }) => "verify identity".into(),
        Command::Verify(VerifyCommand::Structure { .. }) => "verify structure".into(),
        Command::Verify(VerifyCommand::Cuts { .. }) => "verify cuts".into(),
        Command::Verify(VerifyCommand::D1 { .. }) => "verify d1".into(),
        Command::Solve { .. } => "solve".into(),
        Command::Cutnorm { .. } => "cutnorm".into(),
        Command::Quotient { .. } => "quotient".into(),
        Command::Density { .. } => "density".into(),
    }
}

fn rational(s: &str, what: &str) -> Result<BigRational> {
    parse_rational(s).with_context(|| format!("--{what} {s:?}"))
}

fn rationals(values: &[String], what: &str) -> Result<Vec<BigRational>> {
    values.iter().map(|s| rational(s, what)).collect()
}

fn fmt(r: &BigRational) -> String {
    format_rational(r)
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialise")
}

/// Exact value and its floating-point approximation.
fn exact(r: &BigRational) -> Value {
    json!({ "exact": fmt(r), "approx": to_f64(r) })
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn run(cli: &Cli) -> Result<Envelope> {
    let tolerance = rational(&cli.tolerance, "tolerance")?;
    if tolerance.is_negative() {
        bail!("--tolerance must be non-negative");
    }
    let global = json!({
        "format": cli.format,
        "seed": cli.seed,
        "tolerance": fmt(&tolerance),
        "threads": cli.threads.unwrap_or_else(rayon::current_num_threads),
    });
    let (params, passed, report) = dispatch(cli, &tolerance)?;
    let mut config = global;
    if let (Value::Object(c), Value::Object(p)) = (&mut config, params) {
        c.extend(p);
    }
    Ok(Envelope { command: name(&cli.command), config, passed, report })
}

type Outcome = (Value, bool, Value);

fn dispatch(cli: &Cli, tolerance: &BigRational) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Rank { t, k, v } => rank(*t, *k, v),
        Command::Spectrum { t, k } => spectrum(*t, *k),
        Command::Goodfn { j, k, brute } => goodfn(*j, *k, *brute),
        Command::Sample(SampleCommand::Gnp(args)) => sample(args, seed, None),
        Command::Sample(SampleCommand::Ckp { args, shuffle }) => sample(args, seed, Some(*shuffle)),
        Command::Verify(VerifyCommand::Identity { r, k, samples, p }) => identity(*r, *k, *samples, p, seed),
        Command::Verify(VerifyCommand::Structure { t, k, p }) => structure(*t, *k, p),
        Command::Verify(VerifyCommand::Cuts { input, alpha, trials, p, variance }) => {
            cuts(input, alpha, *trials, p.as_deref(), *variance, seed, tolerance)
        }
        Command::Verify(VerifyCommand::D1 { input, set, sizes, trials, p, variance }) => {
            d1(input, set, sizes, *trials, p.as_deref(), *variance, seed, tolerance)
        }
        Command::Solve { t, k, p, out, check } => solve(*t, *k, p, out.as_deref(), check.as_deref()),
        Command::Cutnorm { g1, g2, heuristic, restarts } => cutnorm(g1, g2, *heuristic, *restarts, seed),
        Command::Quotient { graph, parts, out } => quotient(graph, *parts, out.as_deref(), seed),
        Command::Density { input, t, p, out } => density(input, *t, p.as_deref(), out.as_deref()),
    }
}

fn rank(t: usize, k: usize, v: &[usize]) -> Result<Outcome> {
    let report = verify_rank_theorem(t, k, v)?;
    let passed = report.matches != Some(false);
    Ok((json!({ "t": t, "k": k, "v": v }), passed, to_value(&report)))
}

fn spectrum(t: usize, k: usize) -> Result<Outcome> {
    let s = gram_spectrum(t, k)?;
    let table: Vec<Value> = (0..=k)
        .map(|j| {
            json!({
                "j": j,
                "lambda": fmt(&s.lambdas[j]),
                "lambda_star": fmt(&s.lambda_stars[j]),
                "multiplicity": s.multiplicities[j].to_string(),
            })
        })
        .collect();
    let lambda1_zero = s.lambdas.get(1).is_some_and(Zero::is_zero);
    let others_positive = s.lambdas.iter().enumerate().all(|(j, l)| j == 1 || l.is_positive());
    let total: BigInt = s.multiplicities.iter().sum();
    let report = json!({
        "table": table,
        "lambda1_is_zero": lambda1_zero,
        "other_eigenvalues_positive": others_positive,
        "multiplicity_total": total.to_string(),
        "implied_rank": s.implied_rank().to_string(),
        "spectrum": to_value(&s),
    });
    Ok((json!({ "t": t, "k": k }), s.has_expected_signs(), report))
}

fn goodfn(j: usize, k: usize, brute: bool) -> Result<Outcome> {
    let closed = leading_coefficient(j, k)?;
    let brute_value = if brute {
        if j == 0 {
            bail!("brute force needs j >= 1");
        }
        let size = (k as u64).checked_pow(j as u32).filter(|&s| s <= BRUTE_FORCE_LIMIT);
        if size.is_none() {
            bail!("instance too large: k^j = {k}^{j} exceeds {BRUTE_FORCE_LIMIT}");
        }
        Some(count_good_functions(j, k)?)
    } else {
        None
    };
    let equal = brute_value.map(|b| BigInt::from(b) == closed);
    let report = json!({
        "closed_form": closed.to_string(),
        "brute_force": brute_value,
        "equal": equal,
    });
    Ok((json!({ "j": j, "k": k, "brute": brute }), equal != Some(false), report))
}

/// `# key: value` comment lines of a hypergraph file.
fn metadata(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn planted_set(meta: &BTreeMap<String, String>) -> Result<Option<Vec<usize>>> {
    meta.get("planted A")
        .map(|s| {
            s.split_whitespace()
                .map(|x| x.parse().map_err(|_| anyhow!("bad vertex {x:?} in the planted A line")))
                .collect()
        })
        .transpose()
}

fn sample(args: &SampleArgs, seed: u64, ckp: Option<bool>) -> Result<Outcome> {
    let SampleArgs { n, k, ref p, ref out } = *args;
    let p = rational(p, "p")?;
    let mut params = json!({ "n": n, "k": k, "p": fmt(&p), "out": display(out) });
    let mut header = format!("# model: {}\n# p: {}\n# seed: {seed}\n", if ckp.is_some() { "ckp" } else { "gnp" }, fmt(&p));
    let (h, mut report) = match ckp {
        None => (sample_gnp(n, k, &p, seed)?, json!({})),
        Some(shuffle) => {
            params["shuffle"] = json!(shuffle);
            let (h, parts) = sample_ckp(n, k, &p, seed, shuffle)?;
            let half = BigRational::from_integer(binomial((n / 2) as u64, k as i64).into());
            let inside_a = edge_weight_within(&h, &parts.a)?;
            let inside_b = edge_weight_within(&h, &parts.b)?;
            let crossing_sets = BigRational::from_integer(binomial(n as u64, k as i64).into()) - &half - &half;
            let crossing = h.total_weight() - &inside_a - &inside_b;
            let density = |w: &BigRational, d: &BigRational| if d.is_zero() { BigRational::zero() } else { w / d };
            let words: Vec<String> = parts.a.iter().map(ToString::to_string).collect();
            header.push_str(&format!("# planted A: {}\n", words.join(" ")));
            let report = json!({
                "planted_a": parts.a,
                "density_inside_a": exact(&density(&inside_a, &half)),
                "density_inside_b": exact(&density(&inside_b, &half)),
                "crossing_density": exact(&density(&crossing, &crossing_sets)),
            });
            (h, report)
        }
    };
    write_file(out, &(header + &write_hypergraph(&h)))?;
    let all = BigRational::from_integer(binomial(n as u64, k as i64).into());
    report["edges"] = json!(h.edge_count());
    report["edge_density"] = exact(&(BigRational::from_integer(h.edge_count().into()) / all));
    report["file"] = json!(display(out));
    Ok((params, true, report))
}

fn random_type_vector(r: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    let raw: Vec<BigRational> = (0..r).map(|_| BigRational::from_integer(rng.random_range(1..=1000).into())).collect();
    let total: BigRational = raw.iter().sum();
    let scale = BigRational::new(r.into(), 2.into()) / total;
    raw.iter().map(|x| x * &scale).collect()
}

fn identity(r: usize, k: usize, samples: usize, p: &str, seed: u64) -> Result<Outcome> {
    let p = rational(p, "p")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for i in 0..samples {
        let z = random_type_vector(r, &mut rng);
        let density = type_z_density(r, k, &p, &TypeZVector::new(z.clone())?)?;
        if density != p {
            mismatches.push(json!({ "sample": i, "z": z.iter().map(fmt).collect::<Vec<_>>(), "density": fmt(&density) }));
        }
    }
    let higher_terms_vanish = if r <= MONOMIAL_MAX_R { Some(monomial_coefficients(r, k)?.higher_terms_vanish()) } else { None };
    let passed = mismatches.is_empty() && higher_terms_vanish != Some(false);
    let report = json!({
        "evaluations": samples,
        "all_equal_p": mismatches.is_empty(),
        "mismatches": mismatches,
        "higher_monomials_vanish": higher_terms_vanish,
    });
    Ok((json!({ "r": r, "k": k, "samples": samples, "p": fmt(&p) }), passed, report))
}

fn structure(t: usize, k: usize, p: &str) -> Result<Outcome> {
    let p = rational(p, "p")?;
    let report = verify_structure_theorem(t, k, &p)?;
    Ok((json!({ "t": t, "k": k, "p": fmt(&p) }), report.passed, to_value(&report)))
}

struct LoadedHypergraph {
    h: WeightedHypergraph,
    meta: BTreeMap<String, String>,
}

fn load_hypergraph(path: &Path) -> Result<LoadedHypergraph> {
    let text = read_file(path)?;
    let h = parse_hypergraph(&text).with_context(|| display(path))?;
    Ok(LoadedHypergraph { h, meta: metadata(&text) })
}

/// `--p`, else the file's `# p:` line.
fn resolve_p(given: Option<&str>, meta: &BTreeMap<String, String>) -> Result<(BigRational, &'static str)> {
    match (given, meta.get("p")) {
        (Some(s), _) => Ok((rational(s, "p")?, "flag")),
        (None, Some(s)) => Ok((parse_rational(s).context("the p line of the input file")?, "file")),
        (None, None) => bail!("no --p given and the input file has no `# p:` line"),
    }
}

fn resolve_variance(choice: VarianceChoice, planted: &Option<Vec<usize>>) -> Result<(VarianceModel, &'static str)> {
    match (choice, planted) {
        (VarianceChoice::Uniform, _) | (VarianceChoice::Auto, None) => Ok((VarianceModel::Uniform, "uniform")),
        (VarianceChoice::Planted | VarianceChoice::Auto, Some(a)) => Ok((VarianceModel::Planted(a.clone()), "planted")),
        (VarianceChoice::Planted, None) => bail!("--variance planted needs a file with a `# planted A:` line"),
    }
}

/// Class sizes `alpha_i n` rounded by largest remainder.
fn round_sizes(n: usize, alpha: &[BigRational]) -> Result<Vec<usize>> {
    if alpha.iter().any(|a| !a.is_positive()) || alpha.iter().sum::<BigRational>() != BigRational::one() {
        bail!("--alpha entries must be positive and sum to 1");
    }
    let scaled: Vec<BigRational> = alpha.iter().map(|a| a * BigRational::from_integer(n.into())).collect();
    let mut sizes: Vec<usize> = scaled.iter().map(|s| s.floor().to_integer().to_usize().unwrap_or(0)).collect();
    let mut order: Vec<usize> = (0..alpha.len()).collect();
    order.sort_by(|&a, &b| scaled[b].fract().cmp(&scaled[a].fract()).then(a.cmp(&b)));
    let missing = n - sizes.iter().sum::<usize>();
    order.iter().take(missing).for_each(|&i| sizes[i] += 1);
    if sizes.contains(&0) {
        bail!("--alpha gives an empty class for n = {n}");
    }
    Ok(sizes)
}

fn cuts(
    input: &Path,
    alpha: &[String],
    trials: usize,
    p: Option<&str>,
    variance: VarianceChoice,
    seed: u64,
    tolerance: &BigRational,
) -> Result<Outcome> {
    let LoadedHypergraph { h, meta } = load_hypergraph(input)?;
    let (p, p_source) = resolve_p(p, &meta)?;
    let alpha = rationals(alpha, "alpha")?;
    let sizes = round_sizes(h.n(), &alpha)?;
    let effective: Vec<BigRational> = sizes.iter().map(|&s| BigRational::new(s.into(), h.n().into())).collect();
    let (model, model_name) = resolve_variance(variance, &planted_set(&meta)?)?;
    let report = check_p_alpha(&h, &p, &effective, trials, seed, tolerance, &model)?;
    let params = json!({
        "in": display(input),
        "p": fmt(&p),
        "p_source": p_source,
        "alpha": alpha.iter().map(fmt).collect::<Vec<_>>(),
        "class_sizes": sizes,
        "trials": trials,
        "variance": model_name,
    });
    Ok((params, report.passed, to_value(&report)))
}

#[allow(clippy::too_many_arguments)]
fn d1(
    input: &Path,
    set: &[usize],
    sizes: &[usize],
    trials: usize,
    p: Option<&str>,
    variance: VarianceChoice,
    seed: u64,
    tolerance: &BigRational,
) -> Result<Outcome> {
    let LoadedHypergraph { h, meta } = load_hypergraph(input)?;
    let (p, p_source) = resolve_p(p, &meta)?;
    let planted = planted_set(&meta)?;
    let (model, model_name) = resolve_variance(variance, &planted)?;
    // with nothing requested: the planted half if recorded, else random halves
    let (set, sizes): (Vec<usize>, Vec<usize>) = match (set.is_empty(), sizes.is_empty(), &planted) {
        (true, true, Some(a)) => (a.clone(), vec![]),
        (true, true, None) => (vec![], vec![h.n() / 2]),
        _ => (set.to_vec(), sizes.to_vec()),
    };
    let explicit = if set.is_empty() { None } else { Some(d1_deviation(&h, &p, &set, tolerance, &model)?) };
    let random = if sizes.is_empty() { None } else { Some(check_d1(&h, &p, &sizes, trials, seed, tolerance, &model)?) };
    let passed = explicit.as_ref().is_none_or(|s| s.within) && random.as_ref().is_none_or(|r| r.passed);
    let params = json!({
        "in": display(input),
        "p": fmt(&p),
        "p_source": p_source,
        "set": set,
        "sizes": sizes,
        "trials": trials,
        "variance": model_name,
    });
    let report = json!({ "explicit_set": explicit.as_ref().map(to_value), "random_sets": random.as_ref().map(to_value) });
    Ok((params, passed, report))
}

fn solve(t: usize, k: usize, p: &str, out: Option<&Path>, check: Option<&Path>) -> Result<Outcome> {
    let p = rational(p, "p")?;
    let space = solution_space(t, k, &p)?;
    let system = BalancedSystem::new(t, k)?;
    let particular_ok = system.is_solution(&space.particular, &p)?;
    let mut basis_ok = true;
    for b in &space.nullspace_basis {
        basis_ok &= system.apply(b)?.iter().all(Zero::is_zero);
    }
    if let Some(path) = out {
        write_file(path, &write_vector(t, k, &p, &space.particular))?;
    }
    let checked = match check {
        Some(path) => {
            let file = parse_vector(&read_file(path)?).with_context(|| display(path))?;
            if (file.t, file.k) != (t, k) {
                bail!("{} holds a vector for t={}, k={}", display(path), file.t, file.k);
            }
            let x = SolutionVector::general(t, k, p.clone(), file.entries)?;
            Some(json!({
                "file": display(path),
                "solves_system": is_pstar_solution(&x, t, k, &p)?,
                "realizable": x.is_realizable(),
            }))
        }
        None => None,
    };
    let check_ok = checked.as_ref().is_none_or(|c| c["solves_system"] == json!(true));
    let report = json!({
        "equations": system.row_count(),
        "unknowns": space.particular.len(),
        "system_rank": space.system_rank,
        "nullity": space.nullity(),
        "particular_solves_system": particular_ok,
        "nullspace_basis_is_homogeneous": basis_ok,
        "check": checked,
        "solution_space": to_value(&space),
    });
    let params = json!({
        "t": t, "k": k, "p": fmt(&p),
        "out": out.map(display),
        "check": check.map(display),
    });
    Ok((params, particular_ok && basis_ok && check_ok, report))
}

fn norm_mode(n: usize, heuristic: bool, restarts: usize, seed: u64) -> CutNormMode {
    if heuristic || n > CUT_NORM_EXACT_LIMIT {
        CutNormMode::Heuristic { restarts, seed }
    } else {
        CutNormMode::Exact
    }
}

fn cutnorm(g1: &Path, g2: &Path, heuristic: bool, restarts: usize, seed: u64) -> Result<Outcome> {
    let a = parse_graph(&read_file(g1)?).with_context(|| display(g1))?;
    let b = parse_graph(&read_file(g2)?).with_context(|| display(g2))?;
    let mode = norm_mode(a.n(), heuristic, restarts, seed);
    let report = cut_norm(&a, &b, mode)?;
    let params = json!({ "g1": display(g1), "g2": display(g2), "mode": to_value(&mode) });
    Ok((params, true, to_value(&report)))
}

fn quotient(graph: &Path, parts: usize, out: Option<&Path>, seed: u64) -> Result<Outcome> {
    let g = parse_graph(&read_file(graph)?).with_context(|| display(graph))?;
    let spec = CutSpec::equipartition(g.n(), parts)?;
    let q = quotient_graph(&g, &spec)?;
    if let Some(path) = out {
        write_file(path, &write_graph(&q))?;
    }
    let mode = norm_mode(g.n(), false, 32, seed);
    let distance = cut_norm(&g, &q, mode)?;
    let size = g.n() / parts;
    // inter-part densities; the quotient carries no weight inside a part
    let densities: Vec<Vec<Option<String>>> =
        (0..parts).map(|i| (0..parts).map(|j| (i != j).then(|| fmt(q.weight(i * size, j * size)))).collect()).collect();
    let report = json!({
        "n": g.n(),
        "parts": parts,
        "part_densities": densities,
        "cut_distance_to_quotient": to_value(&distance),
    });
    let params = json!({ "graph": display(graph), "parts": parts, "out": out.map(display), "distance_mode": to_value(&mode) });
    Ok((params, true, report))
}

fn density(input: &Path, t: usize, p: Option<&str>, out: Option<&Path>) -> Result<Outcome> {
    let LoadedHypergraph { h, meta } = load_hypergraph(input)?;
    let d = density_vector(&h, &CutSpec::equipartition(h.n(), t)?)?;
    let (p, p_source) = match resolve_p(p, &meta) {
        Ok(found) => found,
        Err(_) => {
            let mean = d.entries.iter().sum::<BigRational>() / BigRational::from_integer(d.entries.len().into());
            (mean, "mean density")
        }
    };
    let solves = if t.is_multiple_of(h.k()) { Some(BalancedSystem::new(t, h.k())?.is_solution(&d.entries, &p)?) } else { None };
    if let Some(path) = out {
        write_file(path, &write_vector(t, h.k(), &p, &d.entries))?;
    }
    let params = json!({ "in": display(input), "t": t, "p": fmt(&p), "p_source": p_source, "out": out.map(display) });
    let mut report = to_value(&d);
    report["solves_balanced_system"] = json!(solves);
    Ok((params, true, report))
}
