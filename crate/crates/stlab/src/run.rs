//! Executes a parsed configuration and renders its artifact.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use stlab_core::equidist::{
    component_conditional_test, identify, ConditionalReport, EquidistError, RankedCandidate, Verdict,
    MIN_IDENTIFY_RECORDS,
};
use stlab_core::frobenius::{
    normalized_trace, satisfies_weil, scan_primes_with_limit, FrobeniusError, TraceRecord, CSV_COLUMNS,
};
use stlab_core::haar::{trace_moments_mc, trace_moments_quadrature, HaarError};
use stlab_core::lefschetz::{
    component_surjection_report, lefschetz_lie_algebra, power_product_check, twist_linear_space, CompositeSpec,
    LefschetzError, PowerProductReport,
};
use thiserror::Error;

use crate::config::{Command, ConfigError, MomentMethodChoice, RunConfig};
use crate::selftest;

pub const TOOL: &str = "stlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Csv(String),
    #[error("{0}")]
    Frobenius(#[from] FrobeniusError),
    #[error("{0}")]
    Haar(#[from] HaarError),
    #[error("{0}")]
    Equidist(#[from] EquidistError),
    #[error("{0}")]
    Lefschetz(#[from] LefschetzError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Module-qualified error code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Config(_) => "cli.config",
            Self::Io { .. } => "cli.io",
            Self::Csv(_) => "cli.traces",
            Self::Frobenius(_) => "frobenius_counts",
            Self::Haar(_) => "compact_haar",
            Self::Equidist(_) => "equidist_analysis",
            Self::Lefschetz(LefschetzError::Galois(_)) => "endo_galois",
            Self::Lefschetz(_) => "twisted_lefschetz",
            Self::Usage(_) => "cli.usage",
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// What a run produced: the artifact text and the process exit status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifact: String,
    pub exit_code: i32,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub settings: Value,
}

fn settings(cfg: &RunConfig) -> Value {
    json!({
        "p_max": cfg.p_max,
        "genus2_p_limit": cfg.genus2_p_limit,
        "curve": cfg.curve.as_ref().map(|c| json!({"genus": c.genus(), "f": c.coeffs()})),
        "descriptor": cfg.descriptor,
        "k_max": cfg.policy.k_max,
        "z_threshold": cfg.policy.z_threshold,
        "max_discrepancy": cfg.policy.max_discrepancy,
        "search_budget": cfg.search.budget,
        "search_max_iterations": cfg.search.max_iterations,
        "search_tolerance": cfg.search.tolerance,
        "haar": cfg.haar.as_ref().map(|h| json!({
            "id": h.id.to_string(),
            "method": format!("{:?}", h.method).to_lowercase(),
            "k_max": h.k_max,
            "samples": h.samples,
        })),
    })
}

pub fn header(cfg: &RunConfig, config_text: &str) -> Header {
    Header {
        tool: TOOL,
        version: VERSION,
        command: cfg.command.name().to_string(),
        seed: cfg.seed,
        config_sha256: sha256_hex(config_text),
        settings: settings(cfg),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs `cfg` on a worker pool of `threads` threads (0 = all cores).
pub fn run(cfg: &RunConfig, config_text: &str, threads: usize) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cfg, config_text, threads))
}

fn dispatch(cfg: &RunConfig, config_text: &str, threads: usize) -> Result<Outcome, CliError> {
    let artifact = match cfg.command {
        Command::Count => count(cfg, config_text, threads)?,
        Command::Analyze => analyze(cfg, config_text, threads)?,
        Command::Lefschetz => lefschetz(cfg, config_text)?,
        Command::HaarMoments => haar_moments(cfg, config_text)?,
        Command::Selftest => {
            let results = selftest::run_all();
            let failed = results.iter().any(|r| !r.passed);
            return Ok(Outcome {
                artifact: selftest::render(&results),
                exit_code: i32::from(failed),
            });
        }
    };
    Ok(Outcome { artifact, exit_code: 0 })
}

fn scan(cfg: &RunConfig, threads: usize) -> Result<Vec<TraceRecord>, CliError> {
    let curve = cfg.curve.as_ref().ok_or_else(|| CliError::Usage("no curve configured".into()))?;
    let p_max = cfg.p_max.ok_or_else(|| CliError::Usage("no p_max configured".into()))?;
    let group = cfg.label_group();
    Ok(scan_primes_with_limit(curve, p_max, group.as_ref(), threads, cfg.genus2_p_limit)?)
}

pub fn records_to_csv(records: &[TraceRecord], header: &Header) -> String {
    let mut out = format!(
        "# tool={} version={} command={} seed={} config_sha256={} settings={}\n",
        header.tool, header.version, header.command, header.seed, header.config_sha256, header.settings
    );
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record(r.csv_fields()).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 fields"));
    out
}

fn count(cfg: &RunConfig, config_text: &str, threads: usize) -> Result<String, CliError> {
    let records = scan(cfg, threads)?;
    Ok(records_to_csv(&records, &header(cfg, config_text)))
}

fn parse_field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: u64) -> Result<Option<T>, CliError> {
    let raw = row.get(i).unwrap_or("").trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::Csv(format!("line {line}: cannot parse column `{}` = `{raw}`", CSV_COLUMNS[i])))
}

/// Reads a trace CSV written by `count`. `t` and `u` are recomputed from the
/// integer columns rather than trusted from their printed form.
pub fn read_traces(path: &Path) -> Result<Vec<TraceRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let columns = reader.headers().map_err(|e| CliError::Csv(e.to_string()))?.clone();
    if columns.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(CliError::Csv(format!("expected columns {}", CSV_COLUMNS.join(","))));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let missing = |name: &str| CliError::Csv(format!("line {line}: missing `{name}`"));
        let p: u64 = parse_field(&row, 0, line)?.ok_or_else(|| missing("p"))?;
        let class_label = row.get(1).filter(|s| !s.is_empty()).map(String::from);
        let n1: u64 = parse_field(&row, 2, line)?.ok_or_else(|| missing("N1"))?;
        let n2: Option<u64> = parse_field(&row, 3, line)?;
        let s1: i64 = parse_field(&row, 4, line)?.ok_or_else(|| missing("s1"))?;
        let e2: Option<i64> = parse_field(&row, 5, line)?;
        if p < 3 {
            return Err(CliError::Csv(format!("line {line}: p = {p} is not an odd prime")));
        }
        let mut record = TraceRecord {
            p,
            class_label,
            n1,
            n2,
            s1,
            s2: e2.map(|e2| s1 * s1 - 2 * e2),
            e2,
            t: normalized_trace(s1, p),
            u: e2.map(|e2| e2 as f64 / p as f64),
            weil_ok: true,
        };
        record.weil_ok = satisfies_weil(&record, if n2.is_some() { 2 } else { 1 });
        records.push(record);
    }
    Ok(records)
}

#[derive(Serialize)]
struct AnalyzeArtifact {
    header: Header,
    source: String,
    n_records: usize,
    weil_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    identified: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<Vec<RankedCandidate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditional: Option<ConditionalReport>,
    verdict: Verdict,
}

fn analyze(cfg: &RunConfig, config_text: &str, threads: usize) -> Result<String, CliError> {
    let (records, source) = match &cfg.traces {
        Some(path) => (read_traces(path)?, format!("traces:{}", path.display())),
        None => (scan(cfg, threads)?, "count".to_string()),
    };
    let candidates = if records.len() >= MIN_IDENTIFY_RECORDS {
        Some(identify(&records, &cfg.catalog, &cfg.policy)?)
    } else {
        None
    };
    let conditional = match &cfg.hypothesis {
        Some(h) => {
            let group = cfg
                .label_group()
                .unwrap_or_else(|| stlab_core::endo_galois::GaloisTwistGroup::trivial(1));
            Some(component_conditional_test(&records, &group, h, &cfg.policy)?)
        }
        None => None,
    };
    let top = candidates.as_ref().and_then(|c| c.first());
    let mut verdicts: Vec<Verdict> = top.map(|t| t.report.verdict).into_iter().collect();
    verdicts.extend(conditional.as_ref().map(|c| c.verdict));
    let verdict = if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if verdicts.contains(&Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::InsufficientData
    };
    let artifact = AnalyzeArtifact {
        header: header(cfg, config_text),
        source,
        n_records: records.len(),
        weil_violations: records.iter().filter(|r| !r.weil_ok).count(),
        identified: top.map(|t| t.report.id().to_string()),
        candidates,
        conditional,
        verdict,
    };
    Ok(to_json(&artifact))
}

#[derive(Serialize)]
struct CompositeResult {
    spec: String,
    checks: Vec<PowerProductReport>,
}

fn describe(spec: &CompositeSpec) -> String {
    match spec {
        CompositeSpec::Power(s) => format!("power {s}"),
        CompositeSpec::DirectSum(parts) => format!("direct sum with {} summand(s)", parts.len()),
        CompositeSpec::Mixed { base_power, others } => {
            format!("mixed: base^{base_power} plus {} other factor(s)", others.len())
        }
    }
}

fn lefschetz(cfg: &RunConfig, config_text: &str) -> Result<String, CliError> {
    let req = cfg
        .lefschetz
        .as_ref()
        .ok_or_else(|| CliError::Usage("no Lefschetz data configured".into()))?;
    let data = &req.data;
    let lie = lefschetz_lie_algebra(&data.space, &data.algebra)?;
    let twists = (0..data.group.order())
        .map(|tau| twist_linear_space(data, tau).map(|t| json!({"tau": t.label(), "dim": t.dim()})))
        .collect::<Result<Vec<_>, _>>()?;
    let surjection = component_surjection_report(data, &cfg.search)?;
    let composites = req
        .composites
        .iter()
        .map(|spec| {
            let checks = (0..data.group.order())
                .map(|tau| power_product_check(data, tau, spec))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CompositeResult {
                spec: describe(spec),
                checks,
            })
        })
        .collect::<Result<Vec<_>, LefschetzError>>()?;
    let all_pass = composites.iter().all(|c| c.checks.iter().all(|r| r.pass));
    Ok(to_json(&json!({
        "header": header(cfg, config_text),
        "dim": data.space.dim(),
        "weight": data.space.weight(),
        "algebra_dim": data.algebra.dim(),
        "group": data.group.labels(),
        "lie_dim": lie.dim(),
        "twists": twists,
        "surjection": surjection,
        "composites": composites,
        "composites_pass": all_pass,
    })))
}

fn haar_moments(cfg: &RunConfig, config_text: &str) -> Result<String, CliError> {
    let req = cfg
        .haar
        .as_ref()
        .ok_or_else(|| CliError::Usage("no group configured".into()))?;
    let moments = match req.method {
        MomentMethodChoice::Quad => trace_moments_quadrature(req.id, req.k_max)?,
        MomentMethodChoice::Mc => trace_moments_mc(req.id, req.k_max, req.samples, cfg.seed)?,
    };
    Ok(to_json(&json!({
        "header": header(cfg, config_text),
        "group": req.id.group(),
        "component": req.id.component(),
        "moments": moments,
    })))
}
