//! Experiment commands. Each writes its artifacts under the configured output
//! directory and returns a verdict with a short human-readable summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::chain::{verify_almost_chain, ChainFamily};
use crate::config::{ExperimentConfig, STREAM_NOISE};
use crate::error::{Error, Result};
use crate::eta::{
    eta_lower_estimate, find_alternating_witness, min_norm_taut_string, optimal_measure, taut_string_path,
    AlternatingSearch, EtaScope, Tube,
};
use crate::lifting::{falsify, search_lifting, LiftingVerdict, SearchBudget, UnsatCertificate};
use crate::measure::{verify_witness_family, WitnessFamily};
use crate::noise::{perturb, witness_measure_family, NoiseOptions};
use crate::reduction::{closeness_check, reduce_family, replay_steps, MeasureFamily, ReduceOptions};
use crate::tree::TreeKind;

/// Most levels of witness measures materialized when `reduce` generates its input.
pub const GENERATED_LEVELS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unknown => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn new(verdict: Verdict) -> Self {
        Outcome {
            verdict,
            lines: Vec::new(),
            files: Vec::new(),
        }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn write(&mut self, cfg: &ExperimentConfig, name: &str, contents: &str) -> Result<()> {
        fs::create_dir_all(&cfg.out_dir)?;
        let path = cfg.out_dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn parse_json(text: &str) -> Value {
    serde_json::from_str(text).expect("library json is valid")
}

/// Samples or loads the family, verifies the almost-chain property and
/// writes `chain.json`. A failing family is reported and not written.
pub fn cmd_build(cfg: &ExperimentConfig) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let report = verify_almost_chain(&family);
    let mut out = Outcome::new(Verdict::from_bool(report.passed()));
    out.say(format!(
        "{} generators ({}), depth {}, {} pairs checked",
        family.len(),
        cfg.construction,
        family.depth(),
        report.pairs_checked
    ));
    match report.max_violation_level() {
        Some(l) => out.say(format!("deepest violation level {l}")),
        None => out.say("no violations"),
    }
    for f in report.failures().take(8) {
        out.say(format!(
            "violation beyond divergence+1 between {} and {} (divergence {}): {}",
            family.generators()[f.lower],
            family.generators()[f.upper],
            f.divergence,
            f.out_of_bound.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
        ));
    }
    if report.passed() {
        out.write(cfg, "chain.json", &(family.to_json()? + "\n"))?;
    }
    Ok(out)
}

/// Exact check of the witness claim for every node and generator, plus the
/// total-mass target.
pub fn cmd_verify_witness(cfg: &ExperimentConfig) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let report = verify_witness_family(&family)?;
    let mass = closeness_check(&WitnessFamily::new(&family)?, &family, 0, 0.0)?;
    let bounded = report.max_total_variation <= num_rational::Rational64::from_integer(3);
    let mut out = Outcome::new(Verdict::from_bool(report.passed() && mass.passed() && bounded));
    out.say(format!(
        "{} nodes, {} (node, generator) pairs, {} mismatches, max norm {}",
        report.nodes_checked, report.pairs_checked, report.failure_count, report.max_total_variation
    ));
    out.say(format!("exact closeness including total mass: {} violations", mass.violations));
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|c| {
            json!({
                "node": c.node.to_string(),
                "mismatches": c.mismatches.iter().map(|m| json!({
                    "generator": family.generators()[m.generator].to_string(),
                    "value": m.value.to_string(),
                    "expected": u8::from(m.expected),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "config": cfg.hash(),
        "nodes_checked": report.nodes_checked,
        "pairs_checked": report.pairs_checked,
        "max_total_variation": report.max_total_variation.to_string(),
        "failure_count": report.failure_count,
        "closeness_violations": mass.violations,
        "failures": failures,
    });
    out.write(cfg, "witness.json", &pretty(&doc))?;
    Ok(out)
}

/// Largest `p ≤ p_max` with an alternating witness, for factorial families.
fn largest_alternating(family: &ChainFamily, p_max: usize) -> Result<Option<usize>> {
    if family.kind() != TreeKind::Factorial {
        return Ok(None);
    }
    let mut best = None;
    for p in 1..=p_max {
        if let AlternatingSearch::Found(w) = find_alternating_witness(family, p)? {
            if w.verify() {
                best = Some(p);
            }
        }
    }
    Ok(best)
}

fn csv_rows(cfg: &ExperimentConfig, rows: &[(usize, Option<usize>, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["depth", "horizon", "epsilon", "p_max_found", "eta_lower"])?;
    for (d, p, eta) in rows {
        w.write_record([
            d.to_string(),
            cfg.horizon.to_string(),
            cfg.epsilon.to_string(),
            p.map(|p| p.to_string()).unwrap_or_else(|| "NA".into()),
            eta.to_string(),
        ])?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
        .expect("csv output is utf-8");
    Ok(format!("{}\n{}", cfg.csv_header(), body))
}

fn nondecreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[0] <= w[1])
}

/// Growth curve of the η lower bound over depths `horizon..=depth`, with the
/// optimal measure at the deepest attaining node.
pub fn cmd_eta(cfg: &ExperimentConfig) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let mut rows = Vec::new();
    let mut last = None;
    for d in cfg.horizon.max(1)..=cfg.depth {
        let fam = family.with_depth(d);
        let e = eta_lower_estimate(&fam, cfg.horizon, cfg.epsilon, EtaScope::Auto)?;
        rows.push((d, largest_alternating(&fam, cfg.p_max)?, e.value));
        last = Some(e);
    }
    let mut out = Outcome::new(Verdict::from_bool(nondecreasing(rows.iter().map(|r| r.2))));
    for (d, p, eta) in &rows {
        out.say(format!(
            "depth {d}: eta >= {eta}{}",
            p.map(|p| format!(", alternating order {p}")).unwrap_or_default()
        ));
    }
    out.write(cfg, "eta.csv", &csv_rows(cfg, &rows)?)?;
    if let Some(e) = last {
        let witness = match &e.argmax {
            Some(sigma) => {
                let tube = Tube::from_membership(&family.membership_vector(sigma), cfg.epsilon)?;
                let mu = optimal_measure(&family, &taut_string_path(&tube))?;
                json!({
                    "node": sigma.to_string(),
                    "membership": family.membership_vector(sigma).to_string(),
                    "norm": min_norm_taut_string(&tube),
                    "measure": parse_json(&mu.to_json()?),
                })
            }
            None => Value::Null,
        };
        let doc = json!({
            "config": cfg.hash(),
            "scope": e.scope,
            "nodes_examined": e.nodes_examined,
            "eta_lower": e.value,
            "witness": witness,
        });
        out.write(cfg, "eta.json", &pretty(&doc))?;
    }
    Ok(out)
}

/// For every depth: alternating witnesses for `p = 2..=p_max` with their
/// counting claims, and the η lower bound. Passes when every extraction
/// verifies, the bound is nondecreasing in depth and reaches `(p−1)/2` for
/// the largest order found.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut sound = true;
    let mut out = Outcome::new(Verdict::Pass);
    for d in cfg.horizon.max(1)..=cfg.depth {
        let fam = family.with_depth(d);
        let e = eta_lower_estimate(&fam, cfg.horizon, cfg.epsilon, EtaScope::Auto)?;
        let mut found = None;
        let mut best_density = 0.0f64;
        if fam.kind() == TreeKind::Factorial {
            for p in 2..=cfg.p_max {
                match find_alternating_witness(&fam, p)? {
                    AlternatingSearch::Found(w) => {
                        let counting_ok = w.counting.as_ref().is_some_and(|c| c.passed());
                        let tube_norm = min_norm_taut_string(&w.tube(0.25)?);
                        let ok = w.verify() && counting_ok && tube_norm >= (p as f64 - 1.0) / 2.0;
                        sound &= ok;
                        best_density = best_density.max(w.density);
                        found = Some(p);
                        records.push(json!({
                            "depth": d,
                            "p": p,
                            "sigma": w.sigma.to_string(),
                            "xs": w.xs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                            "children": w.children,
                            "n": w.n,
                            "density": w.density,
                            "counting": w.counting,
                            "tube_norm": tube_norm,
                            "verified": ok,
                        }));
                    }
                    AlternatingSearch::NotFound { best_density: b } => {
                        best_density = best_density.max(b);
                    }
                }
            }
        }
        if let Some(p) = found {
            sound &= e.value >= (p as f64 - 1.0) / 2.0;
        }
        out.say(format!(
            "depth {d}: eta >= {}, largest alternating order {}, best density {best_density:.3}",
            e.value,
            found.map(|p| p.to_string()).unwrap_or_else(|| "none".into())
        ));
        rows.push((d, found, e.value));
    }
    let monotone = nondecreasing(rows.iter().map(|r| r.2));
    out.verdict = Verdict::from_bool(sound && monotone);
    out.write(cfg, "sweep.csv", &csv_rows(cfg, &rows)?)?;
    out.write(cfg, "witnesses.json", &pretty(&json!({ "config": cfg.hash(), "witnesses": records })))?;
    Ok(out)
}

/// Reduces a measure family read from `measures`, or generated from witness
/// measures plus noise when no file is given, and checks closeness of the
/// result at tolerance `2ε` beyond the horizon.
pub fn cmd_reduce(cfg: &ExperimentConfig, measures: Option<&Path>) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let input = match measures {
        Some(path) => MeasureFamily::<f64>::from_json(&fs::read_to_string(path)?)?,
        None => {
            let levels = cfg.depth.min(GENERATED_LEVELS);
            let base = witness_measure_family(&family, levels)?;
            let opts = NoiseOptions {
                visible: cfg.epsilon / 2.0,
                garbage: cfg.max_exceptional.min(4),
                ..Default::default()
            };
            perturb(&base, &family.with_depth(levels), &mut cfg.rng(STREAM_NOISE), &opts)?.0
        }
    };
    let input_close = closeness_check(&input, &family, cfg.horizon, cfg.epsilon)?;
    let outcome = reduce_family(
        &input,
        &family,
        &ReduceOptions {
            delta: cfg.delta,
            max_exceptional: cfg.max_exceptional,
        },
    )?;
    let horizon = cfg.horizon.max(outcome.exceptional_horizon());
    let close = closeness_check(&outcome.reduced, &family, horizon, 2.0 * cfg.epsilon)?;
    let limit = (2 * outcome.k - 1) as f64;
    let norms_ok = outcome
        .profile
        .points
        .keys()
        .all(|n| outcome.reduced.get(n).is_some_and(|m| m.total_variation() <= limit));
    let steps = (outcome.k == 2).then(|| replay_steps(&outcome, &family, horizon));
    let mut out = Outcome::new(Verdict::from_bool(close.passed() && norms_ok));
    out.say(format!(
        "k = {}, input norm {}, output norm {}",
        outcome.k, outcome.input_bound, outcome.output_bound
    ));
    out.say(format!(
        "{} reduced, {} passed through, {} exceptional",
        outcome.profile.points.len(),
        outcome.passthrough.len(),
        outcome.exceptional.len()
    ));
    out.say(format!(
        "closeness at {} beyond level {horizon}: {} violations, {} tolerated below",
        2.0 * cfg.epsilon,
        close.violations,
        close.tolerated
    ));
    if let Some(s) = &steps {
        out.say(format!("forbidden step patterns beyond horizon: {:?}", s.beyond));
    }
    out.write(cfg, "reduced.json", &(outcome.reduced.to_json()? + "\n"))?;
    let mut csv = Vec::new();
    close.write_csv(&mut csv, &family)?;
    out.write(
        cfg,
        "closeness.csv",
        &format!("{}\n{}", cfg.csv_header(), String::from_utf8(csv).expect("utf-8")),
    )?;
    let doc = json!({
        "config": cfg.hash(),
        "k": outcome.k,
        "delta": outcome.delta,
        "input_bound": outcome.input_bound,
        "output_bound": outcome.output_bound,
        "input_closeness_violations": input_close.violations,
        "reduced": outcome.profile.points.len(),
        "passthrough": outcome.passthrough.len(),
        "exceptional": outcome.exceptional.iter().map(|(n, i)| json!({"node": n.to_string(), "index": i})).collect::<Vec<_>>(),
        "horizon": horizon,
        "closeness": {
            "epsilon": 2.0 * cfg.epsilon,
            "violations": close.violations,
            "tolerated": close.tolerated,
            "max_deviation_beyond": close.max_deviation_beyond,
        },
        "steps_beyond": steps.as_ref().map(|s| s.beyond.to_vec()),
    });
    out.write(cfg, "reduce.json", &pretty(&doc))?;
    Ok(out)
}

/// Budgets `k = 1..=k_max`: falsifier first, then the lifting search. The
/// overall verdict is that of the largest budget.
pub fn cmd_lift(cfg: &ExperimentConfig) -> Result<Outcome> {
    let family = cfg.build_family()?;
    let mut out = Outcome::new(Verdict::Unknown);
    let mut per_k = Vec::new();
    for k in 1..=cfg.k_max.min(family.depth()) {
        let cert = if family.kind() == TreeKind::Dyadic {
            falsify(&family, k)?
        } else {
            None
        };
        let verdict = search_lifting(&family, k, SearchBudget::default())?;
        let artifact = match &verdict {
            LiftingVerdict::Sat(c) => json!({ "candidate": parse_json(&c.to_json(&family)?) }),
            LiftingVerdict::Unsat(UnsatCertificate::Falsified(f)) => {
                json!({ "certificate": parse_json(&f.to_json()?), "valid": f.verify(&family) })
            }
            LiftingVerdict::Unsat(UnsatCertificate::Exhausted { node, lower, upper }) => json!({
                "exhausted": {
                    "node": node.to_string(),
                    "lower": family.generators()[*lower].to_string(),
                    "upper": family.generators()[*upper].to_string(),
                }
            }),
            LiftingVerdict::Unknown { violating_nodes, budget } => {
                json!({ "violating_nodes": violating_nodes, "search_budget": budget })
            }
        };
        out.say(format!(
            "k = {k}: {}{}",
            verdict.label(),
            cert.as_ref()
                .map(|c| format!(" (falsifier at level {}: {} in A_x but not A_y)", c.m, c.sigma))
                .unwrap_or_default()
        ));
        out.verdict = match verdict {
            LiftingVerdict::Sat(_) => Verdict::Pass,
            LiftingVerdict::Unsat(_) => Verdict::Fail,
            LiftingVerdict::Unknown { .. } => Verdict::Unknown,
        };
        per_k.push(json!({ "budget": k, "verdict": verdict.label(), "artifact": artifact }));
    }
    out.write(cfg, "lift.json", &pretty(&json!({ "config": cfg.hash(), "budgets": per_k })))?;
    Ok(out)
}
