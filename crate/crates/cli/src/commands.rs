//! Command implementations: load inputs, run the library, emit one report.

use std::io::Write;
use std::path::Path;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use threshold_lab::cover::{exact_cost, exact_cost_rational, greedy_cost};
use threshold_lab::families::{generate, GeneratorSpec};
use threshold_lab::fragment::{
    fragments, minimal_fragments, run_process, split_large_small, verify_lemma1, verify_lemma2,
    ProcessTrace,
};
use threshold_lab::measure::{expected_hits, hoeffding_half_width, prob_upset_exact, prob_upset_mc};
use threshold_lab::sets::{parse_family, serialize_family, FamilyFile, SubsetMask};
use threshold_lab::thresholds::{expectation_threshold, kk_gap_report, prob_threshold, McParams};
use threshold_lab::{Caps, Rational};

use crate::args::{Cli, Command, GenModel};
use crate::output::emit;
use crate::spec_parse::{
    parse_elements, parse_schedule, resolve_prob, resolve_rational_probs,
};
use crate::{AppError, AppResult};

pub fn run(cli: &Cli) -> AppResult<()> {
    let caps = resolve_caps(cli)?;
    match &cli.command {
        Command::Info { family } => cmd_info(cli, family),
        Command::Cost { family, q, greedy, rational, assert } => {
            cmd_cost(cli, &caps, family, q.as_deref(), *greedy, *rational, *assert)
        }
        Command::Prob { family, p, mc, trials, seed, confidence } => {
            cmd_prob(cli, &caps, family, p, *mc, *trials, *seed, *confidence)
        }
        Command::Pc { family, tol, mc, trials, seed, confidence } => {
            cmd_pc(cli, &caps, family, *tol, *mc, *trials, *seed, *confidence)
        }
        Command::Qc { family, tol } => cmd_qc(cli, &caps, family, *tol),
        Command::Kk { family, tol, assert } => cmd_kk(cli, &caps, family, *tol, *assert),
        Command::Fragment { family, reveal, m } => cmd_fragment(cli, family, reveal, *m),
        Command::Simulate { family, q, schedule, trials, seed, costs, trace_out, threads, assert } => {
            cmd_simulate(
                cli, &caps, family, q.as_deref(), schedule, *trials, *seed, *costs,
                trace_out.as_deref(), *threads, *assert,
            )
        }
        Command::Verify { family, lemma, q, amp, m, assert } => {
            cmd_verify(cli, &caps, family, *lemma, q.as_deref(), *amp, *m, *assert)
        }
        Command::Certify { schedule, i_max, exact_limit, closed_form, proof_log, assert } => {
            cmd_certify(cli, schedule, *i_max, *exact_limit, *closed_form, *proof_log, *assert)
        }
        Command::Gen { model } => cmd_gen(cli, model),
    }
}

fn resolve_caps(cli: &Cli) -> AppResult<Caps> {
    let mut caps = Caps::from_env().map_err(AppError::Validation)?;
    if let Some(spec) = &cli.caps {
        caps = caps.with_overrides(spec).map_err(AppError::Validation)?;
    }
    Ok(caps)
}

fn load_family(path: &Path) -> AppResult<FamilyFile> {
    let file = std::fs::File::open(path)
        .map_err(|e| AppError::Validation(format!("cannot open {}: {e}", path.display())))?;
    Ok(parse_family(std::io::BufReader::new(file))?)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn family_config(path: &Path, caps: &Caps) -> Value {
    json!({ "family": path.display().to_string(), "caps": caps })
}

fn cmd_info(cli: &Cli, path: &Path) -> AppResult<()> {
    let file = load_family(path)?;
    let family = &file.family;
    let minimal = family.minimal_elements();
    let result = json!({
        "n": family.ground().size(),
        "members": family.len(),
        "minimal_members": minimal.len(),
        "ell": minimal.bound_ell(),
        "empty_family": family.is_empty(),
        "contains_empty_set": family.contains_empty_set(),
        "antichain": family.is_antichain(),
        "has_labels": family.ground().labels().is_some(),
        "has_q": file.q.is_some(),
    });
    emit(cli, "info", json!({ "family": path.display().to_string() }), result)
}

#[allow(clippy::too_many_arguments)]
fn cmd_cost(
    cli: &Cli,
    caps: &Caps,
    path: &Path,
    q_spec: Option<&str>,
    greedy: bool,
    rational: bool,
    assert: bool,
) -> AppResult<()> {
    let file = load_family(path)?;
    let family = &file.family;
    let config = |mode: &str, q: Value| {
        json!({
            "family": path.display().to_string(),
            "q": q,
            "mode": mode,
            "caps": caps,
        })
    };

    let (config, result, small) = if rational {
        let q = resolve_rational_probs(q_spec, family, "q")?;
        let solution = exact_cost_rational(family, &q, caps)?;
        let small = solution.cost <= Rational::new(1.into(), 2.into());
        let result = json!({
            "cost": solution.cost.to_string(),
            "cost_approx": solution.cost.to_f64(),
            "status": "exact-optimal",
            "q_small": small,
            "cover": solution.cover,
            "nodes_explored": solution.nodes_explored,
        });
        let q_strings: Vec<String> = q.iter().map(|v| v.to_string()).collect();
        (config("exact-rational", json!(q_strings)), result, small)
    } else {
        let q = resolve_prob(q_spec, file.q.as_ref(), family, "q")?;
        let solution = if greedy { greedy_cost(family, &q) } else { exact_cost(family, &q, caps)? };
        let small = solution.cost <= 0.5;
        let result = json!({
            "expected_hits_minimal": expected_hits(&family.minimal_elements(), &q),
            "cost": solution.cost,
            "status": solution.status,
            "q_small": small,
            "cover": solution.cover,
            "nodes_explored": solution.nodes_explored,
        });
        let mode = if greedy { "greedy" } else { "exact" };
        (config(mode, json!(q.values())), result, small)
    };
    emit(cli, "cost", config, result)?;
    if assert && !small {
        return Err(AppError::AssertFailed("family is not q-small".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_prob(
    cli: &Cli,
    caps: &Caps,
    path: &Path,
    p_spec: &str,
    mc: bool,
    trials: u64,
    seed: Option<u64>,
    confidence: f64,
) -> AppResult<()> {
    let file = load_family(path)?;
    let family = &file.family;
    let p = resolve_prob(Some(p_spec), None, family, "p")?;
    if mc {
        let seed = resolve_seed(seed);
        let estimate = prob_upset_mc(family, &p, trials, seed, confidence)?;
        let config = json!({
            "family": path.display().to_string(),
            "p": p.values(),
            "mode": "monte-carlo",
            "trials": trials,
            "seed": seed,
            "confidence": confidence,
        });
        emit(cli, "prob", config, estimate)
    } else {
        let prob = prob_upset_exact(family, &p, caps)?;
        let config = json!({
            "family": path.display().to_string(),
            "p": p.values(),
            "mode": "exact",
            "caps": caps,
        });
        emit(cli, "prob", config, json!({ "probability": prob }))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_pc(
    cli: &Cli,
    caps: &Caps,
    path: &Path,
    tol: f64,
    mc: bool,
    trials: u64,
    seed: Option<u64>,
    confidence: f64,
) -> AppResult<()> {
    let file = load_family(path)?;
    let mc_params = mc.then(|| McParams { trials, seed: resolve_seed(seed), confidence });
    let result = prob_threshold(&file.family, tol, mc_params, caps)?;
    let config = json!({
        "family": path.display().to_string(),
        "tol": tol,
        "mode": if mc { "monte-carlo" } else { "exact" },
        "mc": mc_params,
        "caps": caps,
    });
    emit(cli, "pc", config, result)
}

fn cmd_qc(cli: &Cli, caps: &Caps, path: &Path, tol: f64) -> AppResult<()> {
    let file = load_family(path)?;
    let result = expectation_threshold(&file.family, tol, caps)?;
    let config = json!({
        "family": path.display().to_string(),
        "tol": tol,
        "caps": caps,
    });
    emit(cli, "qc", config, result)
}

fn cmd_kk(cli: &Cli, caps: &Caps, path: &Path, tol: f64, assert: bool) -> AppResult<()> {
    let file = load_family(path)?;
    let report = kk_gap_report(&file.family, tol, caps)?;
    let pass = report.pass;
    emit(cli, "kk", family_config(path, caps), report)?;
    if assert && !pass {
        return Err(AppError::AssertFailed("Kahn–Kalai gap bound violated".into()));
    }
    Ok(())
}

fn cmd_fragment(cli: &Cli, path: &Path, reveal: &str, m: Option<usize>) -> AppResult<()> {
    let file = load_family(path)?;
    let family = &file.family;
    let revealed = SubsetMask::from_indices(family.ground(), parse_elements(reveal)?)?;
    let all = fragments(family, revealed);
    let minimal = minimal_fragments(family, revealed);
    let mut result = json!({
        "fragments": all,
        "minimal_fragments": minimal,
        "hits_member": minimal.contains_empty_set(),
    });
    if let Some(m) = m {
        let (large, small) = split_large_small(family, revealed, m);
        result["large"] = serde_json::to_value(large).unwrap();
        result["small"] = serde_json::to_value(small).unwrap();
    }
    let config = json!({
        "family": path.display().to_string(),
        "reveal": reveal,
        "m": m,
    });
    emit(cli, "fragment", config, result)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cli: &Cli,
    caps: &Caps,
    path: &Path,
    q_spec: Option<&str>,
    schedule_text: &str,
    trials: u64,
    seed: Option<u64>,
    costs: bool,
    trace_out: Option<&Path>,
    threads: usize,
    assert: bool,
) -> AppResult<()> {
    if trials == 0 {
        return Err(AppError::Validation("simulate needs --trials >= 1".into()));
    }
    let file = load_family(path)?;
    let family = file.family.clone();
    let q = resolve_prob(q_spec, file.q.as_ref(), &family, "q")?;
    let schedule = parse_schedule(schedule_text)?;
    let seed = resolve_seed(seed);
    let threads = threads.clamp(1, 64);

    // Trials are addressed by substream index, so any partition over
    // threads aggregates to the same counts.
    let runner = |range: std::ops::Range<u64>| -> AppResult<(u64, u64, u64, f64, Vec<ProcessTrace>)> {
        let mut hits = 0u64;
        let mut events = 0u64;
        let mut costed = 0u64;
        let mut z_total = 0.0f64;
        let mut traces = Vec::new();
        for t in range {
            let mut rng = threshold_lab::rng::trial_rng(seed, t);
            let trace = run_process(&family, &q, &schedule, &mut rng, costs, caps)?;
            hits += trace.member_hit as u64;
            events += trace.event_e as u64;
            if let Some(z) = trace.large_cost_sum {
                costed += 1;
                z_total += z;
            }
            if trace_out.is_some() {
                traces.push(trace);
            }
        }
        Ok((hits, events, costed, z_total, traces))
    };

    let chunk = trials.div_ceil(threads as u64);
    let mut partials: Vec<(u64, u64, u64, f64, Vec<ProcessTrace>)> = Vec::new();
    if threads == 1 {
        partials.push(runner(0..trials)?);
    } else {
        let results: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|i| {
                    let lo = i * chunk;
                    let hi = ((i + 1) * chunk).min(trials);
                    let runner = &runner;
                    scope.spawn(move || runner(lo..hi.max(lo)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for r in results {
            partials.push(r?);
        }
    }

    let hits: u64 = partials.iter().map(|p| p.0).sum();
    let events: u64 = partials.iter().map(|p| p.1).sum();
    let costed: u64 = partials.iter().map(|p| p.2).sum();
    let z_total: f64 = partials.iter().map(|p| p.3).sum();

    if let Some(out) = trace_out {
        let mut f = std::fs::File::create(out)?;
        for trace in partials.iter().flat_map(|p| &p.4) {
            serde_json::to_writer(&mut f, trace).expect("traces serialize");
            f.write_all(b"\n")?;
        }
    }

    let hit_fraction = hits as f64 / trials as f64;
    let event_fraction = events as f64 / trials as f64;
    let half_width = hoeffding_half_width(trials, 0.99);
    let result = json!({
        "trials": trials,
        "member_hits": hits,
        "member_hit_fraction": hit_fraction,
        "member_hit_ci99": [ (hit_fraction - half_width).max(0.0), (hit_fraction + half_width).min(1.0) ],
        "events_e": events,
        "event_fraction": event_fraction,
        "costed_trials": costed,
        "mean_z": if costed > 0 { Some(z_total / costed as f64) } else { None },
    });
    let config = json!({
        "family": path.display().to_string(),
        "q": q.values(),
        "schedule": schedule.describe(),
        "trials": trials,
        "seed": seed,
        "costs": costs,
        "threads": threads,
        "trace_out": trace_out.map(|p| p.display().to_string()),
        "caps": caps,
    });
    emit(cli, "simulate", config, result)?;

    if assert {
        // Conservative 3σ allowance around the 1/2 target.
        let sigma = (0.25 / trials as f64).sqrt();
        if hit_fraction <= 0.5 - 3.0 * sigma {
            return Err(AppError::AssertFailed(format!(
                "member-hit fraction {hit_fraction:.4} is more than 3σ below 1/2"
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    cli: &Cli,
    caps: &Caps,
    path: &Path,
    lemma: u8,
    q_spec: Option<&str>,
    amp: f64,
    m: usize,
    assert: bool,
) -> AppResult<()> {
    let file = load_family(path)?;
    let family = &file.family;
    let q = resolve_prob(q_spec, file.q.as_ref(), family, "q")?;
    let report = match lemma {
        1 => verify_lemma1(family, &q, amp, m, caps)?,
        2 => verify_lemma2(family, &q, amp, caps)?,
        other => {
            return Err(AppError::Validation(format!("unknown lemma {other}; expected 1 or 2")))
        }
    };
    let verdict = report.verdict;
    let config = json!({
        "family": path.display().to_string(),
        "lemma": lemma,
        "q": q.values(),
        "amp": amp,
        "m": if lemma == 1 { Some(m) } else { None },
        "caps": caps,
    });
    emit(cli, "verify", config, report)?;
    if assert && !verdict {
        return Err(AppError::AssertFailed(format!("lemma {lemma} inequality violated")));
    }
    Ok(())
}

fn cmd_certify(
    cli: &Cli,
    schedule_text: &str,
    i_max: u32,
    exact_limit: u32,
    closed_form: bool,
    proof_log: bool,
    assert: bool,
) -> AppResult<()> {
    if closed_form {
        let report = threshold_lab::certify::closed_form_l6();
        let ok = report.below_half;
        if proof_log {
            eprintln!("closed form at L = 6:");
            for (j, c) in report.coefficients.iter().enumerate() {
                eprintln!("  coefficient of L^-{}: {c} (exact binomial)", j + 1);
            }
            eprintln!("  j >= 5 geometric majorant: (4/L)^5 / (2(1-4/L))");
            eprintln!("  total: {} (= 23/48: {})", report.value, report.equals_23_48);
        }
        let config = json!({ "schedule": "const:6", "closed_form": true });
        emit(cli, "certify", config, report)?;
        if assert && !ok {
            return Err(AppError::AssertFailed("closed form not below 1/2".into()));
        }
        return Ok(());
    }

    let schedule = parse_schedule(schedule_text)?;
    let report = threshold_lab::certify::series_rhs(&schedule, i_max, exact_limit)?;
    let ok = report.verdict == threshold_lab::certify::Verdict::BelowHalf;
    if proof_log {
        eprintln!("series certificate for {}:", report.schedule);
        for term in &report.terms {
            eprintln!(
                "  i={} L={} [{}] term ≈ {:.3e}, running ≈ {:.6}",
                term.i,
                term.exponent,
                match term.kind {
                    threshold_lab::certify::TermKind::Exact => "exact",
                    threshold_lab::certify::TermKind::UpperBound => "upper-bound",
                },
                term.approx,
                term.running_approx,
            );
        }
        if let Some(tail) = &report.tail_bound {
            eprintln!("  tail from i={}: ≤ {tail}", report.tail_start);
        }
        for dir in &report.bound_directions {
            eprintln!("  bound direction: {dir}");
        }
        eprintln!("  total ≈ {:.6} → {:?}", report.total_upper_approx, report.verdict);
    }
    let config = json!({
        "schedule": schedule.describe(),
        "i_max": i_max,
        "exact_limit": exact_limit,
        "closed_form": false,
    });
    emit(cli, "certify", config, report)?;
    if assert && !ok {
        return Err(AppError::AssertFailed("series bound not below 1/2".into()));
    }
    Ok(())
}

fn cmd_gen(cli: &Cli, model: &GenModel) -> AppResult<()> {
    let spec = match *model {
        GenModel::Clique { vertices, size } => {
            GeneratorSpec::Clique { vertices, clique_size: size }
        }
        GenModel::Matching { vertices } => GeneratorSpec::PerfectMatching { vertices },
        GenModel::Star { vertices, leaves } => GeneratorSpec::Star { vertices, leaves },
        GenModel::Random { n, count, ell, seed } => {
            GeneratorSpec::Random { n, count, ell, seed: resolve_seed(seed) }
        }
    };
    let family = generate(&spec)?;
    let text = serialize_family(&family, None);
    match &cli.output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))?;
            eprintln!(
                "wrote {} members over {} elements ({:?}) to {}",
                family.len(),
                family.ground().size(),
                spec,
                path.display()
            );
        }
        None => println!("{text}"),
    }
    Ok(())
}
