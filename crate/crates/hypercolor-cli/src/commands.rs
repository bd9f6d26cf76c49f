//! Implementations of the harness commands. Each command resolves its
//! configuration (flags plus environment overrides), hashes it, runs the
//! corresponding library routines, and emits records tagged with the hash.

use crate::record::{config_hash, Records};
use crate::{
    ConeArgs, ConeFamily, ExperimentArgs, GenArgs, MincolorArgs, ReduceAlg, ReduceArgs, RoundArgs,
    SolveArgs,
};
use anyhow::{bail, ensure, Context, Result};
use hypercolor::cone::{
    gaussian_measure_mc, measure_upper_bound, symmetric_cone_asymptotic, GramCone,
};
use hypercolor::coloring::verify_promise;
use hypercolor::forge::gen_planted;
use hypercolor::hypergraph::Hypergraph;
use hypercolor::io::{
    read_gram, read_hypergraph, read_vectors, write_coloring, write_hypergraph, write_vectors,
};
use hypercolor::mincolor::{
    ld_degree_reduce, min_color, rc_degree_reduce, sc_degree_reduce, sequential_greedy, LdMode,
    PartialColoringResult,
};
use hypercolor::rounding::{best_of_rounds, RoundingParams};
use hypercolor::sdp::{check_feasible, solve, SolveOptions, SolveOutcome};
use hypercolor::stream::substream_indexed;
use hypercolor::PromiseKind;
use rand::Rng;
use serde_json::json;
use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

/// HYPERCOLOR_SEED overrides the --seed flag when set.
fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var("HYPERCOLOR_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("HYPERCOLOR_SEED must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(flag),
    }
}

/// HYPERCOLOR_WORKERS overrides the --workers flag when set.
fn resolve_workers(flag: usize) -> Result<usize> {
    let w = match std::env::var("HYPERCOLOR_WORKERS") {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("HYPERCOLOR_WORKERS must be a positive integer, got {s:?}"))?,
        Err(_) => flag,
    };
    ensure!(w >= 1, "worker count must be at least 1");
    Ok(w)
}

fn load_instance(path: &str) -> Result<Hypergraph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read instance {path}"))?;
    Ok(read_hypergraph(&text)?)
}

pub(crate) fn cmd_gen(a: GenArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let kind = a.promise.kind(a.param);
    let config = json!({
        "command": "gen", "kind": kind.label(), "k": a.k, "n": a.n, "m": a.m,
        "seed": seed, "instance_out": a.instance_out, "witness_out": a.witness_out,
    });
    let hash = config_hash(&config);
    let inst = gen_planted(kind, a.k, a.n, a.m, seed)?;
    let check = verify_promise(&inst.hypergraph, &inst.witness, kind)?;
    ensure!(check.ok, "generated witness fails its own promise");
    fs::write(&a.instance_out, write_hypergraph(&inst.hypergraph))
        .with_context(|| format!("cannot write {}", a.instance_out))?;
    if let Some(p) = &a.witness_out {
        fs::write(p, write_coloring(&inst.witness)).with_context(|| format!("cannot write {p}"))?;
    }
    Records::open(&a.records)?.emit(
        "gen",
        &hash,
        json!({
            "kind": kind.label(), "k": a.k, "n": inst.hypergraph.n(),
            "m": inst.hypergraph.m(), "seed": seed, "witness_ok": check.ok,
            "max_degree": inst.hypergraph.max_degree(),
        }),
    )?;
    Ok(())
}

pub(crate) fn cmd_solve(a: SolveArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let kind = a.promise.kind(a.param);
    let config = json!({
        "command": "solve", "instance": a.instance, "kind": kind.label(),
        "dim": a.dim, "eps": a.eps, "max_iters": a.max_iters, "seed": seed,
        "vectors_out": a.vectors_out,
    });
    let hash = config_hash(&config);
    let h = load_instance(&a.instance)?;
    let opts = SolveOptions {
        dim: a.dim,
        eps: a.eps,
        max_iters: a.max_iters,
        seed,
    };
    let mut records = Records::open(&a.records)?;
    match solve(&h, kind, opts)? {
        SolveOutcome::Feasible {
            solution,
            iterations,
        } => {
            let report = check_feasible(&h, kind, &solution, a.eps)?;
            if let Some(p) = &a.vectors_out {
                fs::write(p, write_vectors(&solution))
                    .with_context(|| format!("cannot write {p}"))?;
            }
            records.emit(
                "solve",
                &hash,
                json!({
                    "kind": kind.label(), "n": h.n(), "m": h.m(), "dim": solution.dim(),
                    "feasible": true, "iterations": iterations,
                    "max_violation": report.max_violation(), "eps": a.eps, "seed": seed,
                }),
            )?;
            Ok(())
        }
        SolveOutcome::Infeasible {
            best,
            report,
            iterations,
        } => {
            if let Some(p) = &a.vectors_out {
                fs::write(p, write_vectors(&best)).with_context(|| format!("cannot write {p}"))?;
            }
            records.emit(
                "solve",
                &hash,
                json!({
                    "kind": kind.label(), "n": h.n(), "m": h.m(), "dim": best.dim(),
                    "feasible": false, "iterations": iterations,
                    "max_violation": report.max_violation(), "eps": a.eps, "seed": seed,
                }),
            )?;
            bail!(
                "relaxation not solved to eps = {:.1e} within {} iterations (violation {:.3e})",
                a.eps,
                iterations,
                report.max_violation()
            );
        }
    }
}

pub(crate) fn cmd_round(a: RoundArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let config = json!({
        "command": "round", "instance": a.instance, "vectors": a.vectors,
        "trials": a.trials, "tau": a.tau, "seed": seed, "coloring_out": a.coloring_out,
    });
    let hash = config_hash(&config);
    let h = load_instance(&a.instance)?;
    let text =
        fs::read_to_string(&a.vectors).with_context(|| format!("cannot read {}", a.vectors))?;
    let v = read_vectors(&text)?;
    let params = RoundingParams {
        trials: a.trials,
        tau: a.tau,
        seed,
    };
    let (best, stats) = best_of_rounds(&h, &v, &params)?;
    if let Some(p) = &a.coloring_out {
        fs::write(p, write_coloring(&best)).with_context(|| format!("cannot write {p}"))?;
    }
    let baseline = 2f64.powi(1 - h.k() as i32);
    Records::open(&a.records)?.emit(
        "round",
        &hash,
        json!({
            "n": h.n(), "m": h.m(), "k": h.k(), "trials": a.trials, "seed": seed,
            "best_fraction": stats.best_fraction, "best_trial": stats.best_trial,
            "mean_fraction": stats.mean_fraction, "median_fraction": stats.quantile(0.5),
            "baseline": baseline, "beats_baseline": stats.mean_fraction < baseline,
        }),
    )?;
    Ok(())
}

pub(crate) fn cmd_cone(a: ConeArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let family = match a.family {
        ConeFamily::Strong => "strong",
        ConeFamily::Symmetric => "symmetric",
        ConeFamily::Gram => "gram",
    };
    let config = json!({
        "command": "cone", "family": family, "k": a.k, "l": a.l, "gram": a.gram,
        "samples": a.samples, "seed": seed,
    });
    let hash = config_hash(&config);
    let cone = match a.family {
        ConeFamily::Strong => {
            let k = a.k.context("--family strong needs --k")?;
            let l = a.l.context("--family strong needs --l")?;
            ensure!(
                l >= 0.0 && l.fract() == 0.0,
                "strong family takes an integer l, got {l}"
            );
            GramCone::strong(k, l as usize)?
        }
        ConeFamily::Symmetric => {
            let k = a.k.context("--family symmetric needs --k")?;
            let l = a.l.context("--family symmetric needs --l")?;
            GramCone::symmetric(k, l)?
        }
        ConeFamily::Gram => {
            let path = a.gram.as_ref().context("--family gram needs --gram")?;
            let text =
                fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
            GramCone::normalized(read_gram(&text)?)?
        }
    };
    let mc = gaussian_measure_mc(&cone, a.samples, seed)?;
    let bound = measure_upper_bound(&cone)?;
    let asymptotic = symmetric_cone_asymptotic(cone.k());
    Records::open(&a.records)?.emit(
        "cone",
        &hash,
        json!({
            "family": family, "k": cone.k(), "sum_norm": cone.sum_norm(),
            "samples": mc.samples, "hits": mc.hits, "estimate": mc.estimate,
            "std_error": mc.std_error, "bound": bound, "asymptotic": asymptotic,
            "seed": seed, "consistent": mc.estimate <= bound + 4.0 * mc.std_error,
        }),
    )?;
    Ok(())
}

fn reduce_fields(red: &PartialColoringResult) -> serde_json::Value {
    json!({
        "colors_used": red.colors_used, "phases": red.phases.len(),
        "marked_sets": red.marked.len(), "uncolored": red.uncolored().len(),
        "residual_edges": red.residual.m(),
        "residual_max_degree": red.residual.max_degree(),
        "degree_bound": red.degree_bound,
    })
}

pub(crate) fn cmd_reduce(a: ReduceArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let alg = match a.alg {
        ReduceAlg::Sc => "sc",
        ReduceAlg::Ld => "ld",
        ReduceAlg::Rc => "rc",
    };
    let config = json!({
        "command": "reduce", "instance": a.instance, "alg": alg, "warmup": a.warmup,
        "t": a.t, "c": a.c, "seed": seed, "partial_out": a.partial_out,
    });
    let hash = config_hash(&config);
    let h = load_instance(&a.instance)?;
    let red = match a.alg {
        ReduceAlg::Sc => sc_degree_reduce(&h, a.t, a.c, seed)?,
        ReduceAlg::Ld => {
            let mode = if a.warmup { LdMode::Warmup } else { LdMode::Full };
            ld_degree_reduce(&h, a.t, a.c, seed, mode)?
        }
        ReduceAlg::Rc => rc_degree_reduce(&h, a.t, a.c, seed)?,
    };
    if let Some(p) = &a.partial_out {
        fs::write(p, write_coloring(&red.coloring())).with_context(|| format!("cannot write {p}"))?;
    }
    let mut fields = reduce_fields(&red);
    let map = fields.as_object_mut().expect("object");
    map.insert("alg".into(), json!(alg));
    map.insert("t".into(), json!(a.t));
    map.insert("c".into(), json!(a.c));
    map.insert("seed".into(), json!(seed));
    Records::open(&a.records)?.emit("reduce", &hash, fields)?;
    Ok(())
}

pub(crate) fn cmd_mincolor(a: MincolorArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let kind = a.promise.kind(a.param);
    let config = json!({
        "command": "mincolor", "instance": a.instance, "kind": kind.label(),
        "t": a.t, "c": a.c, "seed": seed,
    });
    let hash = config_hash(&config);
    let h = load_instance(&a.instance)?;
    let out = min_color(&h, kind, a.t, a.c, seed)?;
    let (_, greedy) = sequential_greedy(&h);
    Records::open(&a.records)?.emit(
        "mincolor",
        &hash,
        json!({
            "kind": kind.label(), "n": h.n(), "m": h.m(), "t": a.t, "c": a.c, "seed": seed,
            "colors": out.colors_used, "greedy_colors": greedy,
            "improved": out.colors_used < greedy,
            "reduction_colors": out.reduction.colors_used,
            "reduction_phases": out.reduction.phases.len(),
            "residual_colors": out.residual_outcome.as_ref().map(|o| o.colors_used),
            "residual_phases": out.residual_outcome.as_ref().map(|o| o.phases.len()),
            "gamma": out.residual_outcome.as_ref().map(|o| o.gamma),
        }),
    )?;
    Ok(())
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("bad list entry {s:?}")))
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("bad list entry {s:?}")))
        .collect()
}

fn cell_key(k: usize, l: f64) -> String {
    format!("{k}\t{l:.3}")
}

const TABLE_HEADER: &str =
    "k\tl\tbaseline\tmono_mc\tmono_se\tmono_bound\tbeats_baseline\tcolors\tcolor_bound\tgreedy";

/// Sweeps the (k, l) grid. Each cell measures the symmetric cone at that
/// sum-norm (the worst-case edge geometry for hyperplane rounding) against
/// the random baseline 2^{1-k} and the analytic bound; cells at l = 1
/// additionally run the full min-coloring pipeline on a planted instance
/// with chi = k + 1. Completed cells in the output table are kept and
/// skipped, so interrupted sweeps resume.
pub(crate) fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let workers = resolve_workers(a.workers)?;
    let ks = parse_usize_list(&a.ks)?;
    let ls = parse_f64_list(&a.ls)?;
    let config = json!({
        "command": "experiment", "ks": ks, "ls": ls, "n": a.n, "m": a.m,
        "t": a.t, "c": a.c, "samples": a.samples, "seed": seed, "out": a.out,
    });
    let hash = config_hash(&config);
    // Cells are independent; `workers` caps concurrency. Emission order is
    // canonical (k-major) regardless, which this sequential build realizes
    // directly.
    let _ = workers;
    let mut cells = Vec::new();
    for &k in &ks {
        for &l in &ls {
            cells.push((k, l));
        }
    }
    let mut done: BTreeSet<String> = BTreeSet::new();
    let mut table = String::new();
    if Path::new(&a.out).exists() {
        let existing =
            fs::read_to_string(&a.out).with_context(|| format!("cannot read {}", a.out))?;
        for line in existing.lines().skip(1) {
            let mut parts = line.split('\t');
            if let (Some(k), Some(l)) = (parts.next(), parts.next()) {
                done.insert(format!("{k}\t{l}"));
            }
        }
        table = existing;
    } else {
        table.push_str(TABLE_HEADER);
        table.push('\n');
    }
    let mut records = Records::open(&a.records)?;
    for (idx, &(k, l)) in cells.iter().enumerate() {
        let key = cell_key(k, l);
        if done.contains(&key) {
            continue;
        }
        let cell_seed: u64 = substream_indexed(seed, "cell", idx as u64).gen();
        let baseline = 2f64.powi(1 - k as i32);
        let cone = GramCone::symmetric(k, l)?;
        let mc = gaussian_measure_mc(&cone, a.samples, cell_seed)?;
        let mono = 2.0 * mc.estimate;
        let se = 2.0 * mc.std_error;
        let bound = 2.0 * measure_upper_bound(&cone)?;
        let beats = mono < baseline;
        // The min-coloring pipeline exists at chi = k + 1, i.e. the l = 1
        // column of the sweep.
        let mut colors: Option<usize> = None;
        let mut color_bound: Option<f64> = None;
        let mut greedy: Option<usize> = None;
        if (l - 1.0).abs() < 1e-12 {
            let inst = gen_planted(PromiseKind::Strong(k + 1), k, a.n, a.m, cell_seed)?;
            let out = min_color(&inst.hypergraph, inst.kind, a.t, a.c, cell_seed)?;
            let (_, g) = sequential_greedy(&inst.hypergraph);
            let nf = a.n as f64;
            let kf = k as f64;
            let reduce_bound = 3.0 * nf * (kf + 1.0) * kf.ln()
                / ((a.t as f64).powf(1.0 / (kf - 1.0)) * a.c * nf.ln());
            let residual_bound = match &out.residual_outcome {
                Some(o) => {
                    let n1 = out.reduction.uncolored().len().max(2) as f64;
                    4.0 * n1.ln() / o.gamma
                }
                None => 1.0,
            };
            colors = Some(out.colors_used);
            color_bound = Some(reduce_bound + residual_bound + 1.0);
            greedy = Some(g);
        }
        let fmt_opt = |v: &Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let fmt_optf = |v: &Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        let row = format!(
            "{key}\t{baseline:.6e}\t{mono:.6e}\t{se:.6e}\t{bound:.6e}\t{}\t{}\t{}\t{}",
            u8::from(beats),
            fmt_opt(&colors),
            fmt_optf(&color_bound),
            fmt_opt(&greedy),
        );
        table.push_str(&row);
        table.push('\n');
        records.emit(
            "experiment-cell",
            &hash,
            json!({
                "k": k, "l": l, "cell_seed": cell_seed, "baseline": baseline,
                "mono_mc": mono, "mono_se": se, "mono_bound": bound,
                "beats_baseline": beats, "colors": colors,
                "color_bound": color_bound, "greedy": greedy, "samples": a.samples,
            }),
        )?;
    }
    let mut out_file =
        fs::File::create(&a.out).with_context(|| format!("cannot write {}", a.out))?;
    out_file.write_all(table.as_bytes())?;
    Ok(())
}
