use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use cycles_core::bounds::{conjectured_g_gonality, genus_summary, thresholds};
use cycles_core::cycle::{
    congruent_mod_augmentation_power, exp_series, gamma, gamma_factorization, log_cycle, pontryagin, star_power,
    DEFAULT_SUPPORT_CAP,
};
use cycles_core::identities::{binomial_kernel, kernel_from_derivatives};
use cycles_core::rational::{binomial, factorial, fmt_rational};
use cycles_core::relation::{
    alpha_coefficients, check_recursion_identity, default_cap, default_j_max, power_basis_change, verify_relation,
};
use cycles_core::tangent::{
    check_condition_doublestar, check_condition_star, format_subspace_file, mu_generic_rank, pair_lemma_check,
    parse_subspace_file, search_with_workers, Layout, Subspace, SubspaceFile,
};
use cycles_core::{Cycle, Error, GroupPoint, Rational, RingContext};

use crate::report::{Failure, Outcome};
use crate::{CmdResult, Command, Format};

pub const MAX_CAP_ENV: &str = "CYCLES_MAX_CAP";

fn env_cap() -> Result<Option<u64>, String> {
    match std::env::var(MAX_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{MAX_CAP_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(None),
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

pub fn run(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Identities { kmax, dmax } => identities(*kmax, dmax.unwrap_or(*kmax)),
        Command::VerifyRelation { k, g, jmax, cap, out } => verify(*k, *g, *jmax, *cap, out.as_deref()),
        Command::Alpha { k } => alpha(*k),
        Command::RecursionCheck { k, l } => recursion(*k, *l),
        Command::CheckStar { file } => check_star(file),
        Command::CheckDoublestar { file } => check_doublestar(file),
        Command::PairLemma { file } => pair_lemma(file),
        Command::Search { k, n, budget, seed, workers, out } => search(*k, *n, *budget, *seed, *workers, out.as_deref()),
        Command::MuRank { file, seed, samples } => mu_rank(file, *seed, *samples),
        Command::Thresholds { k, g, format } => threshold_table(*k, g.as_deref(), *format),
        Command::GammaCheck { g, x, kmax } => gamma_check(*g, x, *kmax),
    }
}

fn identities(kmax: u32, dmax: u32) -> CmdResult {
    if kmax == 0 {
        return Err("kmax must be positive".into());
    }
    let mut text = String::from("k\td\tkernel\tvia_derivatives\n");
    let mut mismatches = Vec::new();
    for k in 1..=kmax {
        for d in 0..=dmax {
            let direct = binomial_kernel(k, d);
            let other = if d <= k { Some(kernel_from_derivatives(k, d).map_err(err)?) } else { None };
            let expected = if d == k {
                Some(Rational::from_integer(factorial(k as u64)))
            } else if d < k {
                Some(Rational::zero())
            } else {
                None
            };
            let bad_value = expected.as_ref().is_some_and(|e| *e != direct);
            let bad_route = other.as_ref().is_some_and(|o| *o != direct);
            if bad_value || bad_route {
                mismatches.push(json!({"k": k, "d": d, "kernel": fmt_rational(&direct)}));
            }
            let shown = other.as_ref().map(fmt_rational).unwrap_or_else(|| "-".into());
            let _ = writeln!(text, "{k}\t{d}\t{}\t{shown}", fmt_rational(&direct));
        }
    }
    let failed = !mismatches.is_empty();
    Ok(Outcome::new(json!({"kmax": kmax, "dmax": dmax}), text)
        .witness(json!({"mismatches": mismatches}))
        .fail_if(failed, Failure::Contradiction))
}

fn verify(k: u32, g: u32, jmax: Option<u32>, cap: Option<u32>, out: Option<&Path>) -> CmdResult {
    let jmax = jmax.unwrap_or_else(|| default_j_max(k, g));
    let cap = match (cap, env_cap()?) {
        (Some(c), _) => c,
        (None, Some(c)) => u32::try_from(c).map_err(|_| format!("{MAX_CAP_ENV} is too large"))?,
        (None, None) => default_cap(k, g),
    };
    let params = json!({"k": k, "g": g, "jmax": jmax, "cap": cap});
    match verify_relation(k, g, jmax, cap) {
        Ok(cert) => {
            cert.verify().map_err(err)?;
            let path: PathBuf = out.map(Path::to_path_buf).unwrap_or_else(|| format!("relation-k{k}-g{g}.json").into());
            std::fs::write(&path, cert.to_json() + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            let text = format!(
                "certificate verified: k={k} g={g} window_height={} generators={} nilpotent_terms={}\nwritten to {}\n",
                cert.window_height,
                cert.generators.len(),
                cert.nilpotent_part.len(),
                path.display()
            );
            let mut o = Outcome::new(params, text).witness(json!({
                "window_height": cert.window_height,
                "generator_terms": cert.generators.len(),
                "nilpotent_terms": cert.nilpotent_part.len(),
            }));
            o.certificate_path = Some(path.display().to_string());
            Ok(o)
        }
        Err(Error::NotFoundWithinCaps { caps_tried }) => {
            let text = format!("no certificate within caps {caps_tried:?}\n");
            Ok(Outcome::new(params, text).witness(json!({"caps_tried": caps_tried})).inconclusive())
        }
        Err(Error::WindowTooLarge { monomials, columns }) => {
            let text = format!("window too large: {monomials} monomials, {columns} columns\n");
            Ok(Outcome::new(params, text)
                .witness(json!({"monomials": monomials, "columns": columns}))
                .inconclusive())
        }
        Err(e) => Err(err(e)),
    }
}

fn alpha(k: u32) -> CmdResult {
    let m = alpha_coefficients(k).map_err(err)?;
    let mut text = String::new();
    let mut bad_sums = Vec::new();
    for l in 0..=k {
        let cells: Vec<String> = m.row(l).iter().map(fmt_rational).collect();
        let _ = writeln!(text, "alpha[{l}]\t{}", cells.join("\t"));
        if m.row_sum(l) != Rational::from_integer(binomial(k as u64 - 1, l as u64)) {
            bad_sums.push(l);
        }
    }
    let beta = power_basis_change(m.row(k));
    let cells: Vec<String> = beta.iter().map(fmt_rational).collect();
    let _ = writeln!(text, "beta\t{}", cells.join("\t"));
    let beta_ok = beta[..k as usize].iter().all(Zero::is_zero) && !beta[k as usize].is_zero();
    let failed = !m.zero_entries.is_empty() || !bad_sums.is_empty() || !beta_ok;
    Ok(Outcome::new(json!({"k": k}), text)
        .witness(json!({
            "zero_entries": m.zero_entries,
            "bad_row_sums": bad_sums,
            "beta": cells,
        }))
        .fail_if(failed, Failure::Contradiction))
}

fn recursion(k: u32, l: Option<u32>) -> CmdResult {
    if k < 2 {
        return Err("k must be at least 2".into());
    }
    let cap = env_cap()?.unwrap_or(DEFAULT_SUPPORT_CAP);
    let ctx = RingContext::with_support_cap(k as usize, 1, cap).map_err(err)?;
    let ls: Vec<u32> = match l {
        Some(l) => vec![l],
        None => (1..k).collect(),
    };
    let mut text = String::new();
    let mut failures = Vec::new();
    for l in ls.iter().copied() {
        let ok = check_recursion_identity(k, l, &ctx).map_err(err)?;
        let _ = writeln!(text, "k={k} l={l}\t{}", if ok { "holds" } else { "FAILS" });
        if !ok {
            failures.push(l);
        }
    }
    let failed = !failures.is_empty();
    Ok(Outcome::new(json!({"k": k, "l": ls}), text)
        .witness(json!({"failing_l": failures}))
        .fail_if(failed, Failure::Contradiction))
}

fn read_file(path: &Path, layout: Layout) -> Result<SubspaceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_subspace_file(&text, layout).map_err(|e| format!("{}: {e}", path.display()))
}

fn rows_json(s: &Subspace) -> Value {
    s.basis().iter().map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>()).collect()
}

fn check_star(path: &Path) -> CmdResult {
    let f = read_file(path, Layout::Tangent)?;
    let v = &f.blocks[0];
    let params = json!({"file": path.display().to_string(), "k": f.k, "n": f.n, "dim": v.dim()});
    match check_condition_star(v, f.n, f.k).map_err(err)? {
        None => Ok(Outcome::new(params, format!("condition (*) holds (dim V = {})\n", v.dim()))),
        Some(viol) => {
            let text = format!(
                "condition (*) violated: degree {} basis {:?} form {:?} value {}\n",
                viol.degree,
                viol.basis_indices,
                viol.form_indices,
                fmt_rational(&viol.value)
            );
            Ok(Outcome::new(params, text)
                .witness(json!({
                    "degree": viol.degree,
                    "basis_indices": viol.basis_indices,
                    "form_indices": viol.form_indices,
                    "value": fmt_rational(&viol.value),
                }))
                .fail_if(true, Failure::Violation))
        }
    }
}

fn check_doublestar(path: &Path) -> CmdResult {
    let f = read_file(path, Layout::Components)?;
    let total: usize = f.blocks.iter().map(Subspace::dim).sum();
    let params = json!({"file": path.display().to_string(), "k": f.k, "n": f.n, "total_dim": total});
    match check_condition_doublestar(&f.blocks).map_err(err)? {
        None => Ok(Outcome::new(params, format!("condition (**) holds (total dim {total})\n"))),
        Some(viol) => {
            let text = format!(
                "condition (**) violated: components {:?} basis {:?} value {}\n",
                viol.components,
                viol.basis_indices,
                fmt_rational(&viol.value)
            );
            Ok(Outcome::new(params, text)
                .witness(json!({
                    "components": viol.components,
                    "basis_indices": viol.basis_indices,
                    "value": fmt_rational(&viol.value),
                }))
                .fail_if(true, Failure::Violation))
        }
    }
}

fn read_pair(path: &Path) -> Result<(usize, Subspace, Subspace), String> {
    let f = read_file(path, Layout::Components)?;
    if f.n != 2 {
        return Err(format!("{}: expected n = 2 blocks (A and B), got {}", path.display(), f.n));
    }
    let mut blocks = f.blocks.into_iter();
    let a = blocks.next().expect("two blocks");
    let b = blocks.next().expect("two blocks");
    Ok((f.k, a, b))
}

fn pair_lemma(path: &Path) -> CmdResult {
    let (k, a, b) = read_pair(path)?;
    let r = pair_lemma_check(&a, &b).map_err(err)?;
    let params = json!({"file": path.display().to_string(), "k": k, "dim_a": a.dim(), "dim_b": b.dim()});
    let text = format!("dim(A.B + A + B) = {}\tdim A + dim B = {}\t{}\n", r.lhs, r.rhs, if r.ok { "ok" } else { "FAILS" });
    Ok(Outcome::new(params, text)
        .witness(json!({"lhs": r.lhs, "rhs": r.rhs, "ok": r.ok}))
        .fail_if(!r.ok, Failure::Contradiction))
}

fn search(k: usize, n: usize, budget: u64, seed: u64, workers: usize, out: Option<&Path>) -> CmdResult {
    if k < 2 || n == 0 {
        return Err("search needs k >= 2 and n >= 1".into());
    }
    let params = json!({"k": k, "n": n, "budget": budget, "seed": seed, "workers": workers});
    let r = search_with_workers(k, n, budget, seed, workers);
    let mut text = format!("best_sum {}\tbound {}\tevaluated {}\n", r.best_sum, k - 1, r.evaluated);
    text.push_str(&format_subspace_file(k, n, &r.best_config));
    let config: Vec<Value> = r.best_config.iter().map(rows_json).collect();
    let mut o = Outcome::new(params, String::new());
    if let Some(cex) = &r.counterexample {
        let path: PathBuf = out.map(Path::to_path_buf).unwrap_or_else(|| format!("counterexample-k{k}-n{n}.txt").into());
        std::fs::write(&path, format_subspace_file(k, n, cex)).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        let _ = writeln!(text, "total dimension above k-1; configuration written to {}", path.display());
        o.certificate_path = Some(path.display().to_string());
    }
    o.text = text;
    Ok(o.witness(json!({"best_sum": r.best_sum, "evaluated": r.evaluated, "best_config": config}))
        .fail_if(r.counterexample.is_some(), Failure::Contradiction))
}

fn mu_rank(path: &Path, seed: u64, samples: usize) -> CmdResult {
    let (k, a, b) = read_pair(path)?;
    let rank = mu_generic_rank(&a, &b, seed, samples).map_err(err)?;
    let expected = a.dim() + b.dim();
    let params = json!({"file": path.display().to_string(), "k": k, "seed": seed, "samples": samples});
    let text = format!("generic rank {rank}\tdim A + dim B = {expected}\n");
    let o = Outcome::new(params, text).witness(json!({"rank": rank, "expected": expected}));
    Ok(if rank >= expected { o } else { o.inconclusive() })
}

fn threshold_table(k: Option<u64>, g: Option<&str>, format: Format) -> CmdResult {
    if let Some(g) = g {
        let g: BigInt = g.trim().parse().map_err(|_| format!("--g must be an integer, got {g:?}"))?;
        if g < BigInt::from(1) {
            return Err("--g must be positive".into());
        }
        let s = genus_summary(&g);
        let rows = [
            ("g", s.g.to_string()),
            ("gonality_at_least", s.gonality_at_least.to_string()),
            ("orbit_all_max_k", s.orbit_all_max_k.to_string()),
            ("countable_max_k", s.countable_max_k.to_string()),
            ("conjectured_gonality_at_least (conjecture)", s.conjectured_gonality_at_least.to_string()),
        ];
        let value = serde_json::to_value(&s).expect("summary serialises");
        let text = render(&rows, &value, format);
        return Ok(Outcome::new(json!({"g": s.g.to_string(), "format": format_name(format)}), text).witness(value));
    }
    let k = k.expect("clap enforces --k or --g");
    let t = thresholds(k).map_err(err)?;
    let conj = conjectured_g_gonality(k).map_err(err)?;
    let induction: Vec<String> = t.induction.iter().map(ToString::to_string).collect();
    let rows = [
        ("k", t.k.to_string()),
        ("g_gonality", t.g_gonality.to_string()),
        ("g_orbit_all", t.g_orbit_all.to_string()),
        ("g_orbit_weierstrass", t.g_orbit_weierstrass.to_string()),
        ("g_orbit_countable", t.g_orbit_countable.to_string()),
        ("induction", induction.join(" ")),
        ("conjectured_g_gonality (conjecture)", conj.to_string()),
    ];
    let mut value = serde_json::to_value(&t).expect("table serialises");
    value["conjectured_g_gonality"] = json!({"value": conj.to_string().parse::<serde_json::Number>().expect("integer"), "status": "conjecture"});
    let text = render(&rows, &value, format);
    Ok(Outcome::new(json!({"k": k, "format": format_name(format)}), text).witness(value))
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Text => "text",
        Format::Json => "json",
        Format::Tsv => "tsv",
    }
}

fn render(rows: &[(&str, String)], value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serialises") + "\n",
        Format::Tsv => rows.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect(),
        Format::Text => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
        }
    }
}

fn gamma_check(g: u32, x: &str, kmax: u32) -> CmdResult {
    let coords: Vec<i64> = x
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad coordinate {t:?} in --x")))
        .collect::<Result<_, _>>()?;
    let rank = coords.len();
    let cap = env_cap()?.unwrap_or(DEFAULT_SUPPORT_CAP);
    let ctx = RingContext::with_support_cap(rank, g, cap).map_err(err)?;
    let p = GroupPoint::from_i64s(&coords);
    let point = Cycle::point(p.clone());
    let gam = gamma(&p, &ctx).map_err(err)?;
    let neg_log = -&log_cycle(&point, &ctx).map_err(err)?;
    let log_ok = gam == neg_log;
    let exp_ok = congruent_mod_augmentation_power(&exp_series(&-&gam, g, &ctx).map_err(err)?, &point, g + 1);

    let w = gamma_factorization(&p, &ctx).map_err(err)?;
    let u = Cycle::augmentation_generator(&p);
    let mut fact_failures = Vec::new();
    for k in 1..=kmax {
        let lhs = star_power(&gam, k, &ctx).map_err(err)?;
        let mut rhs = pontryagin(&star_power(&u, k, &ctx).map_err(err)?, &star_power(&w, k, &ctx).map_err(err)?, &ctx)
            .map_err(err)?;
        if k % 2 == 1 {
            rhs = -&rhs;
        }
        if lhs != rhs {
            fact_failures.push(k);
        }
    }
    let mark = |ok: bool| if ok { "holds" } else { "FAILS" };
    let text = format!(
        "gamma(x) = -log{{x}}\t{}\nexp(-gamma(x)) = {{x}} mod I^(g+1)\t{}\ngamma^k = (-1)^k u^k w^k for k <= {kmax}\t{}\n",
        mark(log_ok),
        mark(exp_ok),
        mark(fact_failures.is_empty())
    );
    let failed = !(log_ok && exp_ok && fact_failures.is_empty());
    Ok(Outcome::new(json!({"g": g, "x": coords, "kmax": kmax}), text)
        .witness(json!({
            "gamma": gam,
            "log_identity": log_ok,
            "exp_identity": exp_ok,
            "factorization_failures": fact_failures,
        }))
        .fail_if(failed, Failure::Contradiction))
}
