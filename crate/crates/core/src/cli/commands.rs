use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::config::{CheckName, Format, ModelConfig, RegimeMapConfig, RunConfig};
use super::output::{fmt_f64, write_file, Cell, Csv, Svg, VERSION};
use super::records::{values_match, CheckRecord, Header, OracleRecord, Record, RegimeRecord};
use crate::applications::{
    check_separable_derivative_condition, crra_model, crra_regime, multiplicative_benchmark, CrraParams, CrraRegime,
};
use crate::conditions::{
    check_derivable_condition, check_derivative_conditions, check_linear_case, check_linear_receiver,
    check_suboptimality, check_weak_condition, GridSpec, Status, SuboptimalityOutcome,
};
use crate::error::{Error, Result};
use crate::model::Interval;
use crate::oracle::{
    binary_pair_scan, concavify_2state, concavify_3state, gain_via_integrals, EnvelopeResult, WorstPairReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;

const VERIFY_REL_TOL: f64 = 1e-12;

/// Where and in which formats a command writes.
pub struct Sink {
    pub dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub quiet: bool,
}

impl Sink {
    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn say(&self, line: &str) {
        if !self.quiet {
            println!("{line}");
        }
    }
}

fn header(command: &str, cfg: &RunConfig) -> Record {
    Record::Header(Header {
        command: command.to_string(),
        version: VERSION.to_string(),
        config_hash: cfg.hash(),
        config: cfg.canonical_json(),
    })
}

fn jsonl(records: &[Record]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------- check

pub fn compute_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let model = cfg.build_model()?;
    let grid = cfg.build_grid(&model)?;
    let prior = cfg.prior()?;
    let mut out = Vec::new();
    for &check in &cfg.checks {
        match check {
            CheckName::Weak => out.push(CheckRecord::from_verdict("weak", &check_weak_condition(&model, &grid)?, true)),
            CheckName::Derivable => {
                out.push(CheckRecord::from_verdict("derivable", &check_derivable_condition(&model, &grid)?, true))
            }
            CheckName::Derivative => {
                let v = check_derivative_conditions(&model, &grid)?;
                out.push(CheckRecord::from_verdict("derivative", &v.overall, true));
                out.push(CheckRecord::from_verdict("derivative.first", &v.first, false));
                out.push(CheckRecord::from_verdict("derivative.second", &v.second, false));
            }
            CheckName::Subopt => {
                let rep = check_suboptimality(&model, &grid, prior.support())?;
                let chosen = rep.witness_check().or_else(|| {
                    rep.pairs.iter().max_by(|a, b| a.verdict.min_margin.total_cmp(&b.verdict.min_margin))
                });
                let mut rec = match chosen {
                    Some(p) => CheckRecord::from_verdict("subopt", &p.verdict, true),
                    None => unreachable!("support has at least two states"),
                };
                rec.status = rep.outcome.as_str().to_string();
                rec.pairs_tested = rep.pairs.iter().map(|p| p.verdict.pairs_tested).sum();
                rec.witness_pair = rep.witness;
                out.push(rec);
            }
            CheckName::LinearReceiver => {
                let v = check_linear_receiver(&model, &grid)?;
                out.push(CheckRecord::from_verdict("linear_receiver", &v.ours, true));
                out.push(CheckRecord::from_verdict("linear_receiver.kolotilin", &v.kolotilin, false));
            }
            CheckName::LinearCase => {
                let ModelConfig::LinearCase { sender } = &cfg.model else {
                    return Err(Error::Config("linear_case check needs the linear_case family".into()));
                };
                let dv = sender.derivative();
                let v = check_linear_case(|a| dv.eval(a), &grid)?;
                out.push(CheckRecord::from_verdict("linear_case", &v.verdict, true));
            }
            CheckName::Separable => {
                let ModelConfig::Separable(p) = &cfg.model else {
                    return Err(Error::Config("separable check needs the separable family".into()));
                };
                let v = check_separable_derivative_condition(p, &grid)?;
                let mut rec = CheckRecord::from_verdict("separable", &v.overall, true);
                rec.shortcut = v.power_shortcut;
                out.push(rec);
                out.push(CheckRecord::from_verdict("separable.first", &v.first, false));
                out.push(CheckRecord::from_verdict("separable.second", &v.second, false));
            }
            CheckName::Benchmark => {
                let ModelConfig::Separable(p) = &cfg.model else {
                    return Err(Error::Config("benchmark check needs the separable family".into()));
                };
                let v = multiplicative_benchmark(p.phi, &grid)?;
                out.push(CheckRecord::from_verdict("benchmark.specific_case", &v.specific_case, true));
                out.push(CheckRecord::from_verdict("benchmark.footnote", &v.footnote, false));
            }
        }
    }
    Ok(out)
}

fn check_summary(cfg: &RunConfig, records: &[CheckRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", cfg.model.family());
    for r in records {
        let tag = if r.gating { "" } else { " (diagnostic)" };
        let _ = write!(
            s,
            "{:<28} {:<15} min_margin={:+.6e} tol={:.3e} pairs={} evidence at resolution ({}, {}){tag}",
            r.check, r.status, r.min_margin, r.margin_tol, r.pairs_tested, r.resolution.0, r.resolution.1
        );
        if let Some((lo, hi)) = r.witness_pair {
            let _ = write!(s, " witness states {{{}, {}}}", lo.min(hi), lo.max(hi));
        }
        if let Some(sc) = r.shortcut {
            let _ = write!(s, " kappa>=tau={sc}");
        }
        s.push('\n');
        if let Some(w) = r.witnesses.first() {
            let _ = writeln!(
                s,
                "    worst: ({}, {}) vs ({}, {}) margin={:+.6e}",
                w.first.state, w.first.action, w.second.state, w.second.action, w.margin
            );
        }
    }
    s
}

pub fn cmd_check(cfg: &RunConfig, sink: &Sink) -> Result<i32> {
    cfg.validate_for_check()?;
    let records = compute_checks(cfg)?;
    let hash = cfg.hash();

    if sink.wants(Format::Csv) {
        let mut v = Csv::new(
            &hash,
            &["check", "status", "gating", "min_margin", "margin_tol", "pairs_tested", "n_states", "n_actions"],
        );
        let mut w = Csv::new(
            &hash,
            &["check", "rank", "state_1", "action_1", "state_2", "action_2", "value_1", "value_2", "margin"],
        );
        for r in &records {
            v.row(&[
                r.check.as_str().into(),
                r.status.as_str().into(),
                Cell::S(r.gating.to_string()),
                r.min_margin.into(),
                r.margin_tol.into(),
                Cell::I(r.pairs_tested),
                Cell::I(r.resolution.0 as u64),
                Cell::I(r.resolution.1 as u64),
            ]);
            for (rank, x) in r.witnesses.iter().enumerate() {
                w.row(&[
                    r.check.as_str().into(),
                    Cell::I(rank as u64),
                    x.first.state.into(),
                    x.first.action.into(),
                    x.second.state.into(),
                    x.second.action.into(),
                    x.first_value.into(),
                    x.second_value.into(),
                    x.margin.into(),
                ]);
            }
        }
        write_file(&sink.dir, "verdicts.csv", &v.into_string())?;
        write_file(&sink.dir, "witnesses.csv", &w.into_string())?;
    }
    if sink.wants(Format::JsonLines) {
        let mut all = vec![header("check", cfg)];
        all.extend(records.iter().cloned().map(Record::Check));
        write_file(&sink.dir, "verdicts.jsonl", &jsonl(&all))?;
    }
    let summary = check_summary(cfg, &records);
    write_file(&sink.dir, "summary.txt", &summary)?;
    sink.say(summary.trim_end());

    Ok(if records.iter().any(CheckRecord::fails) { EXIT_FLAGGED } else { EXIT_OK })
}

// ---------------------------------------------------------------- oracle

pub struct OracleRun {
    pub scan: WorstPairReport,
    pub integral_gains: Vec<f64>,
    pub envelope: EnvelopeResult,
    pub record: OracleRecord,
}

pub fn compute_oracle(cfg: &RunConfig) -> Result<OracleRun> {
    let prior = cfg.prior()?;
    if !(2..=3).contains(&prior.len()) {
        return Err(Error::UnsupportedSupportSize(prior.len()));
    }
    let model = cfg.build_model()?;
    let o = &cfg.oracle;
    let support = prior.support();
    let scan = binary_pair_scan(&model, support, o.pi_grid)?;
    let integral_gains = scan
        .rows
        .iter()
        .map(|r| gain_via_integrals(&model, r.low_state, r.high_state, r.p_low, o.quad_points))
        .collect::<Result<Vec<_>>>()?;
    let envelope = if prior.len() == 2 {
        concavify_2state(&model, (support[0], support[1]), prior.probabilities()[1], o.line_resolution)?
    } else {
        concavify_3state(&model, [support[0], support[1], support[2]], &prior, o.simplex_resolution)?
    };
    let record = OracleRecord {
        states: envelope.states.clone(),
        prior: envelope.prior.clone(),
        verdict: envelope.verdict.as_str().to_string(),
        margin: envelope.margin,
        envelope_value: envelope.envelope_value_at_prior,
        full_disclosure_value: envelope.full_disclosure_value,
        pooled_value: envelope.pooled_value,
        samples: envelope.samples.len(),
        min_gain: scan.min_gain,
        worst_pair: (scan.worst.low_state, scan.worst.high_state),
        worst_p_low: scan.worst.p_low,
        pooling_improves: scan.pooling_improves,
    };
    Ok(OracleRun { scan, integral_gains, envelope, record })
}

fn envelope_svg(env: &EnvelopeResult) -> String {
    let vals = env.samples.iter().map(|s| s.value);
    let lo = vals.clone().fold(f64::INFINITY, f64::min);
    let hi = vals.fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-12);
    let mut svg = Svg::new(640.0, 420.0, (0.0, 1.0), (lo - pad, hi + pad));
    svg.axes(&format!("probability of state {}", env.states[1]), "sender value");
    let curve: Vec<(f64, f64)> = env.samples.iter().map(|s| (s.probabilities[1], s.value)).collect();
    let (first, last) = (curve[0], curve[curve.len() - 1]);
    svg.polyline(&curve, "steelblue", 2.0, None);
    svg.polyline(&[first, last], "gray", 1.5, Some("6,4"));
    svg.polyline(&env.hull, "darkorange", 1.5, None);
    let p = env.prior[1];
    svg.polyline(&[(p, lo - pad), (p, hi + pad)], "black", 0.8, Some("2,3"));
    svg.circle(p, env.envelope_value_at_prior, 4.0, "darkorange");
    svg.circle(p, env.full_disclosure_value, 4.0, "gray");
    svg.text(70.0, 30.0, 13, &format!("{}  margin {:.3e}", env.verdict.as_str(), env.margin));
    svg.text(70.0, 48.0, 11, "blue: sender value   gray dashed: full disclosure chord   orange: concave envelope");
    svg.finish("sender value over posteriors")
}

pub fn cmd_oracle(cfg: &RunConfig, sink: &Sink) -> Result<i32> {
    let n = cfg.prior()?.len();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedSupportSize(n));
    }
    cfg.validate_for_oracle()?;
    let run = compute_oracle(cfg)?;
    let hash = cfg.hash();

    if sink.wants(Format::Csv) {
        let mut scan = Csv::new(
            &hash,
            &[
                "low_state",
                "high_state",
                "p_low",
                "a_pool",
                "a_low",
                "a_high",
                "k",
                "gain",
                "gain_integral",
                "effort_delta",
            ],
        );
        for (r, gi) in run.scan.rows.iter().zip(&run.integral_gains) {
            scan.row(&[
                r.low_state.into(),
                r.high_state.into(),
                r.p_low.into(),
                r.a_pool.into(),
                r.a_low.into(),
                r.a_high.into(),
                r.k.into(),
                r.gain.into(),
                (*gi).into(),
                r.effort_delta.into(),
            ]);
        }
        write_file(&sink.dir, "split_scan.csv", &scan.into_string())?;

        let names: Vec<String> = run.envelope.states.iter().map(|s| format!("p[{s}]")).collect();
        let mut cols: Vec<&str> = names.iter().map(String::as_str).collect();
        cols.push("value");
        let mut samples = Csv::new(&hash, &cols);
        for s in &run.envelope.samples {
            let mut row: Vec<Cell> = s.probabilities.iter().map(|&p| Cell::F(p)).collect();
            row.push(Cell::F(s.value));
            samples.row(&row);
        }
        write_file(&sink.dir, "envelope_samples.csv", &samples.into_string())?;

        if !run.envelope.hull.is_empty() {
            let mut hull = Csv::new(&hash, &["p_high", "envelope"]);
            for &(p, v) in &run.envelope.hull {
                hull.row(&[p.into(), v.into()]);
            }
            write_file(&sink.dir, "envelope_hull.csv", &hull.into_string())?;
        }

        let r = &run.record;
        let mut verdict = Csv::new(
            &hash,
            &[
                "verdict",
                "margin",
                "envelope_value",
                "full_disclosure_value",
                "pooled_value",
                "min_gain",
                "worst_low_state",
                "worst_high_state",
                "worst_p_low",
            ],
        );
        verdict.row(&[
            r.verdict.as_str().into(),
            r.margin.into(),
            r.envelope_value.into(),
            r.full_disclosure_value.into(),
            r.pooled_value.into(),
            r.min_gain.into(),
            r.worst_pair.0.into(),
            r.worst_pair.1.into(),
            r.worst_p_low.into(),
        ]);
        write_file(&sink.dir, "oracle_verdict.csv", &verdict.into_string())?;
    }
    if sink.wants(Format::Svg) && run.envelope.states.len() == 2 {
        write_file(&sink.dir, "envelope.svg", &envelope_svg(&run.envelope))?;
    }
    if sink.wants(Format::JsonLines) {
        write_file(&sink.dir, "verdicts.jsonl", &jsonl(&[header("oracle", cfg), Record::Oracle(run.record.clone())]))?;
    }

    let r = &run.record;
    let mut summary = String::new();
    let _ = writeln!(summary, "model: {}", cfg.model.family());
    let _ = writeln!(
        summary,
        "worst binary split: states ({}, {}) p_low={} gain={:+.6e}{}",
        r.worst_pair.0,
        r.worst_pair.1,
        r.worst_p_low,
        r.min_gain,
        if r.pooling_improves { " (pooling improves)" } else { "" }
    );
    let _ = writeln!(
        summary,
        "envelope={} full_disclosure={} pooled={}",
        fmt_f64(r.envelope_value),
        fmt_f64(r.full_disclosure_value),
        fmt_f64(r.pooled_value)
    );
    let _ = writeln!(summary, "{} margin={:.6e}", r.verdict, r.margin);
    write_file(&sink.dir, "summary.txt", &summary)?;
    sink.say(summary.trim_end());

    Ok(if r.verdict == "FULL_DISCLOSURE_OPTIMAL" { EXIT_OK } else { EXIT_FLAGGED })
}

// ---------------------------------------------------------------- regime map

fn regime_name(r: CrraRegime) -> &'static str {
    r.as_str()
}

/// Checks one lattice point against the grid checkers.
pub fn validate_regime_point(rm: &RegimeMapConfig, grid: (usize, usize), gamma: f64, rho: f64) -> Result<RegimeRecord> {
    let regime = crra_regime(gamma, rho)?;
    let model = crra_model(
        CrraParams::new(gamma, rho, rm.delta, rm.kappa)?,
        Interval::new(rm.states.0, rm.states.1)?,
        None,
    )?;
    let g = GridSpec::auto(&model, grid.0, grid.1)?;
    let weak = check_weak_condition(&model, &g)?;
    let sub = check_suboptimality(&model, &g, &[rm.states.0, rm.states.1])?;
    let found = sub.outcome == SuboptimalityOutcome::WitnessFound;
    let agrees = match regime {
        CrraRegime::Optimal => weak.holds(),
        CrraRegime::Suboptimal => found,
        CrraRegime::Inconclusive => weak.status == Status::Violated && !found,
    };
    Ok(RegimeRecord {
        gamma,
        rho,
        delta: rm.delta,
        kappa: rm.kappa,
        regime: regime_name(regime).to_string(),
        validated: true,
        weak_status: Some(weak.status.as_str().to_string()),
        subopt_outcome: Some(sub.outcome.as_str().to_string()),
        agrees: Some(agrees),
    })
}

pub fn compute_regime_map(cfg: &RunConfig) -> Result<Vec<RegimeRecord>> {
    let rm = &cfg.regime_map;
    rm.validate()?;
    let gammas = RegimeMapConfig::axis(rm.gamma, rm.resolution);
    let rhos = RegimeMapConfig::axis(rm.rho, rm.resolution);
    // lattice order: gamma outer, rho inner
    let points: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| rhos.iter().map(move |&r| (g, r))).collect();

    let eligible: Vec<usize> = (0..points.len()).filter(|&i| !rm.excluded(points[i].0, points[i].1)).collect();
    let mut chosen: Vec<usize> = match cfg.seed {
        None => eligible.iter().copied().step_by(rm.validate_every).collect(),
        Some(seed) => {
            let mut shuffled = eligible.clone();
            shuffled.shuffle(&mut StdRng::seed_from_u64(seed));
            shuffled.truncate(eligible.len().div_ceil(rm.validate_every));
            shuffled
        }
    };
    chosen.sort_unstable();

    let mut records: Vec<RegimeRecord> = points
        .iter()
        .map(|&(g, r)| -> Result<RegimeRecord> {
            let regime =
                if rm.excluded(g, r) { "EXCLUDED".to_string() } else { regime_name(crra_regime(g, r)?).to_string() };
            Ok(RegimeRecord {
                gamma: g,
                rho: r,
                delta: rm.delta,
                kappa: rm.kappa,
                regime,
                validated: false,
                weak_status: None,
                subopt_outcome: None,
                agrees: None,
            })
        })
        .collect::<Result<_>>()?;

    let threads = match rm.threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(chosen.len().max(1));
    let grid = (cfg.grid.states, cfg.grid.actions);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<RegimeRecord>)>> = Mutex::new(Vec::with_capacity(chosen.len()));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&i) = chosen.get(k) else { break };
                let (g, r) = points[i];
                let rec = validate_regime_point(rm, grid, g, r);
                results.lock().expect("results lock").push((i, rec));
            });
        }
    });
    let mut results = results.into_inner().expect("results lock");
    results.sort_by_key(|(i, _)| *i);
    for (i, rec) in results {
        records[i] = rec?;
    }
    Ok(records)
}

fn regime_svg(rm: &RegimeMapConfig, records: &[RegimeRecord]) -> String {
    let gammas = RegimeMapConfig::axis(rm.gamma, rm.resolution);
    let rhos = RegimeMapConfig::axis(rm.rho, rm.resolution);
    let half = |axis: &[f64]| if axis.len() > 1 { 0.5 * (axis[1] - axis[0]) } else { 0.5 };
    let (hg, hr) = (half(&gammas), half(&rhos));
    let mut svg = Svg::new(
        560.0,
        560.0,
        (rm.gamma.0 - hg, rm.gamma.1 + hg),
        (rm.rho.0 - hr, rm.rho.1 + hr),
    );
    for r in records {
        let fill = match r.regime.as_str() {
            "OPTIMAL" => "#4caf50",
            "SUBOPTIMAL" => "#e57373",
            "INCONCLUSIVE" => "#ffd54f",
            _ => "#bdbdbd",
        };
        svg.rect((r.gamma - hg, r.gamma + hg), (r.rho - hr, r.rho + hr), fill);
        if r.validated {
            let dot = if r.agrees == Some(true) { "black" } else { "red" };
            svg.circle(r.gamma, r.rho, 2.5, dot);
        }
    }
    svg.axes("gamma (agent risk aversion)", "rho (principal risk aversion)");
    svg.text(70.0, 30.0, 12, "green: optimal   red: suboptimal   yellow: inconclusive   gray: excluded");
    svg.finish("full disclosure regimes for CRRA parties")
}

pub fn cmd_regime_map(cfg: &RunConfig, sink: &Sink) -> Result<i32> {
    cfg.regime_map.validate()?;
    let records = compute_regime_map(cfg)?;
    let hash = cfg.hash();

    if sink.wants(Format::Csv) {
        let mut csv =
            Csv::new(&hash, &["gamma", "rho", "regime", "validated", "weak_status", "subopt_outcome", "agrees"]);
        for r in &records {
            let opt = |s: &Option<String>| s.as_ref().map_or(Cell::Empty, |s| Cell::S(s.clone()));
            csv.row(&[
                r.gamma.into(),
                r.rho.into(),
                r.regime.as_str().into(),
                Cell::S(r.validated.to_string()),
                opt(&r.weak_status),
                opt(&r.subopt_outcome),
                r.agrees.map_or(Cell::Empty, |a| Cell::S(a.to_string())),
            ]);
        }
        write_file(&sink.dir, "regime_map.csv", &csv.into_string())?;
    }
    if sink.wants(Format::Svg) {
        write_file(&sink.dir, "regime_map.svg", &regime_svg(&cfg.regime_map, &records))?;
    }
    if sink.wants(Format::JsonLines) {
        let mut all = vec![header("regime-map", cfg)];
        all.extend(records.iter().cloned().map(Record::Regime));
        write_file(&sink.dir, "verdicts.jsonl", &jsonl(&all))?;
    }

    let validated: Vec<&RegimeRecord> = records.iter().filter(|r| r.validated).collect();
    let disagreements: Vec<&&RegimeRecord> = validated.iter().filter(|r| r.agrees != Some(true)).collect();
    let count = |name: &str| records.iter().filter(|r| r.regime == name).count();
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "lattice {}x{}: optimal={} suboptimal={} inconclusive={} excluded={}",
        cfg.regime_map.resolution,
        cfg.regime_map.resolution,
        count("OPTIMAL"),
        count("SUBOPTIMAL"),
        count("INCONCLUSIVE"),
        count("EXCLUDED")
    );
    let _ = writeln!(summary, "validated {} points, {} disagreements", validated.len(), disagreements.len());
    for d in &disagreements {
        let _ = writeln!(
            summary,
            "DISAGREE gamma={} rho={} regime={} weak={} subopt={}",
            d.gamma,
            d.rho,
            d.regime,
            d.weak_status.as_deref().unwrap_or("-"),
            d.subopt_outcome.as_deref().unwrap_or("-")
        );
    }
    write_file(&sink.dir, "summary.txt", &summary)?;
    sink.say(summary.trim_end());

    Ok(if disagreements.is_empty() { EXIT_OK } else { EXIT_FLAGGED })
}

// ---------------------------------------------------------------- verify

/// Outcome of re-validating a verdict file.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub command: String,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

pub fn verify_records(text: &str, expected_hash: Option<&str>) -> Result<VerifyReport> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Config("verdict file is empty".into()))?;
    let Record::Header(head) =
        serde_json::from_str::<Record>(first).map_err(|e| Error::Config(format!("bad header record: {e}")))?
    else {
        return Err(Error::Config("verdict file must start with a header record".into()));
    };
    let stored: Vec<Record> = lines
        .map(|l| serde_json::from_str::<Record>(l).map_err(|e| Error::Config(format!("bad record: {e}"))))
        .collect::<Result<_>>()?;
    let cfg: RunConfig = serde_json::from_value(head.config.clone())
        .map_err(|e| Error::Config(format!("header configuration does not parse: {e}")))?;

    let mut mismatches = Vec::new();
    if cfg.hash() != head.config_hash {
        mismatches.push(format!("header hash {} does not match its configuration ({})", head.config_hash, cfg.hash()));
    }
    if let Some(h) = expected_hash {
        if h != head.config_hash {
            mismatches.push(format!("config hash {h} differs from the recorded {}", head.config_hash));
        }
    }

    let fresh: Vec<Record> = match head.command.as_str() {
        "check" => compute_checks(&cfg)?.into_iter().map(Record::Check).collect(),
        "oracle" => vec![Record::Oracle(compute_oracle(&cfg)?.record)],
        "regime-map" => {
            let rm = &cfg.regime_map;
            let grid = (cfg.grid.states, cfg.grid.actions);
            stored
                .iter()
                .map(|r| match r {
                    Record::Regime(r) if r.validated => {
                        let mut local = rm.clone();
                        local.delta = r.delta;
                        local.kappa = r.kappa;
                        validate_regime_point(&local, grid, r.gamma, r.rho).map(Record::Regime)
                    }
                    Record::Regime(r) => {
                        let regime = if rm.excluded(r.gamma, r.rho) {
                            "EXCLUDED".to_string()
                        } else {
                            crra_regime(r.gamma, r.rho)?.as_str().to_string()
                        };
                        Ok(Record::Regime(RegimeRecord { regime, ..r.clone() }))
                    }
                    other => Ok(other.clone()),
                })
                .collect::<Result<_>>()?
        }
        other => return Err(Error::Config(format!("unknown command '{other}' in header"))),
    };

    if fresh.len() != stored.len() {
        mismatches.push(format!("{} records stored, {} recomputed", stored.len(), fresh.len()));
    }
    for (i, (s, f)) in stored.iter().zip(&fresh).enumerate() {
        let (sv, fv) = (serde_json::to_value(s).expect("serialize"), serde_json::to_value(f).expect("serialize"));
        if !values_match(&sv, &fv, VERIFY_REL_TOL) {
            mismatches.push(format!("record {}: stored {sv} but recomputed {fv}", i + 1));
        }
    }
    Ok(VerifyReport { command: head.command, checked: stored.len(), mismatches })
}

pub fn cmd_verify(path: &std::path::Path, expected_hash: Option<&str>, quiet: bool) -> Result<i32> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let report = verify_records(&text, expected_hash)?;
    if !quiet {
        println!("{}: {} records re-checked, {} mismatches", report.command, report.checked, report.mismatches.len());
        for m in &report.mismatches {
            println!("MISMATCH {m}");
        }
    }
    Ok(if report.mismatches.is_empty() { EXIT_OK } else { EXIT_FLAGGED })
}
