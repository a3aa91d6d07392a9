//! Moment and distribution-function diagnostics comparing normalized
//! Frobenius traces with catalog groups, overall or one Frobenius class at
//! a time.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::endo_galois::{frobenius_class, GaloisError, GaloisTwistGroup};
use crate::frobenius::TraceRecord;
use crate::haar::{
    coset_trace_cdf, moments_of_traces, trace_moments_quadrature, CompactGroup, CompactGroupId, Component,
    HaarError, MomentVector,
};

/// Fewest records for which a distribution-function comparison is made.
pub const MIN_DISCREPANCY_RECORDS: usize = 10;
/// Fewest records accepted by [`identify`].
pub const MIN_IDENTIFY_RECORDS: usize = 100;
/// Grid intervals for the distribution-function comparison.
pub const GRID_INTERVALS: usize = 10_000;
const Z_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquidistError {
    #[error("no records left after filtering")]
    EmptySelection,
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("candidate catalog is empty")]
    EmptyCatalog,
    #[error("moment vector has no moments beyond M_0")]
    EmptyMoments,
    #[error("no hypothesis given for class `{0}`")]
    MissingHypothesis(String),
    #[error("hypothesis names class `{0}` which is not in the group")]
    UnknownClass(String),
    #[error("records lack class labels and the group has no field descriptor")]
    Unlabeled,
    #[error(transparent)]
    Haar(#[from] HaarError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Policy {
    pub z_threshold: f64,
    pub k_max: usize,
    /// Optional ceiling on the sup-distance; `None` reports it without gating.
    pub max_discrepancy: Option<f64>,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            z_threshold: 4.0,
            k_max: 8,
            max_discrepancy: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    InsufficientData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentComparison {
    pub k: Vec<usize>,
    pub emp: Vec<f64>,
    #[serde(rename = "emp_stderr")]
    pub emp_stderr: Vec<f64>,
    #[serde(rename = "ref")]
    pub reference: Vec<f64>,
    pub z: Vec<f64>,
}

/// Outcome of comparing one sample with one candidate. Every field needed
/// to re-derive the verdict is stored alongside it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub candidate: CompactGroup,
    pub component: Component,
    pub n_records: usize,
    pub k_max: usize,
    pub z_threshold: f64,
    pub moments: MomentComparison,
    pub passing_moments: usize,
    pub tested_moments: usize,
    pub discrepancy: Option<f64>,
    pub verdict: Verdict,
}

impl AnalysisReport {
    pub fn id(&self) -> CompactGroupId {
        CompactGroupId::new(self.candidate, self.component).expect("report built from a valid id")
    }
}

fn traces(records: &[TraceRecord]) -> Vec<f64> {
    records.iter().map(|r| r.t).collect()
}

fn sorted(mut ts: Vec<f64>) -> Vec<f64> {
    ts.sort_by(f64::total_cmp);
    ts
}

/// Moments of a list of traces; the list is sorted first so the result does
/// not depend on record order.
pub fn moments_of_sample(ts: &[f64], k_max: usize) -> Result<MomentVector, EquidistError> {
    if ts.is_empty() {
        return Err(EquidistError::EmptySelection);
    }
    Ok(moments_of_traces(&sorted(ts.to_vec()), k_max))
}

/// Empirical trace moments, optionally restricted to one class label.
pub fn empirical_moments(
    records: &[TraceRecord],
    k_max: usize,
    class_filter: Option<&str>,
) -> Result<MomentVector, EquidistError> {
    let ts: Vec<f64> = records
        .iter()
        .filter(|r| class_filter.is_none_or(|c| r.class_label.as_deref() == Some(c)))
        .map(|r| r.t)
        .collect();
    moments_of_sample(&ts, k_max)
}

/// z-scores of empirical moments against the quadrature moments of `id`.
/// Only even moments enter the verdict; odd ones vanish on every candidate.
pub fn compare_to_group(
    emp: &MomentVector,
    id: CompactGroupId,
    policy: &Policy,
) -> Result<AnalysisReport, EquidistError> {
    if emp.k_max == 0 || emp.values.len() < 2 {
        return Err(EquidistError::EmptyMoments);
    }
    let reference = trace_moments_quadrature(id, emp.k_max)?;
    let ks: Vec<usize> = (1..=emp.k_max).collect();
    let z: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let se = emp.stderr[k].hypot(reference.stderr[k]).max(Z_FLOOR);
            (emp.values[k] - reference.values[k]) / se
        })
        .collect();
    let even: Vec<f64> = ks.iter().zip(&z).filter(|(k, _)| *k % 2 == 0).map(|(_, z)| *z).collect();
    let passing = even.iter().filter(|z| z.abs() <= policy.z_threshold).count();
    let verdict = if passing == even.len() { Verdict::Pass } else { Verdict::Fail };
    Ok(AnalysisReport {
        candidate: id.group(),
        component: id.component(),
        n_records: emp.samples.unwrap_or(0),
        k_max: emp.k_max,
        z_threshold: policy.z_threshold,
        moments: MomentComparison {
            emp: ks.iter().map(|&k| emp.values[k]).collect(),
            emp_stderr: ks.iter().map(|&k| emp.stderr[k]).collect(),
            reference: ks.iter().map(|&k| reference.values[k]).collect(),
            k: ks,
            z,
        },
        passing_moments: passing,
        tested_moments: even.len(),
        discrepancy: None,
        verdict,
    })
}

/// Evaluation grid: `GRID_INTERVALS + 1` equally spaced points on the trace
/// range, symmetric so that 0 is included.
pub fn discrepancy_grid(group: CompactGroup) -> Vec<f64> {
    let b = group.trace_bound();
    let half = GRID_INTERVALS as i64 / 2;
    (-half..=half).map(|i| b * i as f64 / half as f64).collect()
}

/// Sup over the grid of `|F_emp - F_ref|` for a list of traces.
pub fn discrepancy_of_sample(ts: &[f64], id: CompactGroupId) -> Result<f64, EquidistError> {
    if ts.len() < MIN_DISCREPANCY_RECORDS {
        return Err(EquidistError::TooFewRecords {
            needed: MIN_DISCREPANCY_RECORDS,
            got: ts.len(),
        });
    }
    let ts = sorted(ts.to_vec());
    let n = ts.len() as f64;
    let cdf = coset_trace_cdf(id);
    Ok(discrepancy_grid(id.group())
        .into_iter()
        .map(|x| {
            let emp = ts.partition_point(|&t| t <= x) as f64 / n;
            (emp - cdf.eval(x)).abs()
        })
        .fold(0.0, f64::max))
}

pub fn discrepancy(records: &[TraceRecord], id: CompactGroupId) -> Result<f64, EquidistError> {
    discrepancy_of_sample(&traces(records), id)
}

fn apply_discrepancy(mut report: AnalysisReport, d: Option<f64>, policy: &Policy) -> AnalysisReport {
    report.discrepancy = d;
    if let (Some(d), Some(max)) = (d, policy.max_discrepancy) {
        if d > max {
            report.verdict = Verdict::Fail;
        }
    }
    report
}

/// Moment comparison plus sup-distance for a list of traces.
pub fn analyze_sample(ts: &[f64], id: CompactGroupId, policy: &Policy) -> Result<AnalysisReport, EquidistError> {
    let emp = moments_of_sample(ts, policy.k_max)?;
    let report = compare_to_group(&emp, id, policy)?;
    let d = if ts.len() >= MIN_DISCREPANCY_RECORDS {
        Some(discrepancy_of_sample(ts, id)?)
    } else {
        None
    };
    Ok(apply_discrepancy(report, d, policy))
}

pub fn analyze_records(
    records: &[TraceRecord],
    id: CompactGroupId,
    policy: &Policy,
) -> Result<AnalysisReport, EquidistError> {
    analyze_sample(&traces(records), id, policy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub hypothesis: String,
    pub n_records: usize,
    pub verdict: Verdict,
    /// Absent when the class has too few records to analyze.
    pub report: Option<AnalysisReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGate {
    pub total: usize,
    pub expected_per_class: f64,
    pub tolerance: f64,
    pub counts: BTreeMap<String, usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub classes: Vec<ClassReport>,
    pub frequency_gate: FrequencyGate,
    pub verdict: Verdict,
}

fn class_of(record: &TraceRecord, group: &GaloisTwistGroup) -> Result<Option<String>, EquidistError> {
    if let Some(label) = &record.class_label {
        group.element(label)?;
        return Ok(Some(label.clone()));
    }
    if group.order() == 1 {
        return Ok(Some(group.label(group.identity()).to_string()));
    }
    if group.descriptor().is_none() {
        return Err(EquidistError::Unlabeled);
    }
    match frobenius_class(record.p, group) {
        Ok(c) => Ok(Some(group.label(c).to_string())),
        Err(GaloisError::RamifiedPrime(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Splits records by Frobenius class and tests each class against its
/// hypothesized coset distribution. Classes must also occur with equal
/// frequency to within three binomial standard deviations.
pub fn component_conditional_test(
    records: &[TraceRecord],
    group: &GaloisTwistGroup,
    hypothesis: &BTreeMap<String, CompactGroupId>,
    policy: &Policy,
) -> Result<ConditionalReport, EquidistError> {
    for label in hypothesis.keys() {
        if group.element(label).is_err() {
            return Err(EquidistError::UnknownClass(label.clone()));
        }
    }
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); group.order()];
    for r in records {
        if let Some(label) = class_of(r, group)? {
            buckets[group.element(&label)?].push(r.t);
        }
    }
    let mut classes = Vec::with_capacity(group.order());
    for (element, ts) in buckets.iter().enumerate() {
        let label = group.label(element).to_string();
        let id = match hypothesis.get(&label) {
            Some(id) => *id,
            None if ts.is_empty() => continue,
            None => return Err(EquidistError::MissingHypothesis(label)),
        };
        let (verdict, report) = if ts.len() < MIN_DISCREPANCY_RECORDS {
            (Verdict::InsufficientData, None)
        } else {
            let report = analyze_sample(ts, id, policy)?;
            (report.verdict, Some(report))
        };
        classes.push(ClassReport {
            class: label,
            hypothesis: id.to_string(),
            n_records: ts.len(),
            verdict,
            report,
        });
    }
    let total: usize = buckets.iter().map(Vec::len).sum();
    let share = 1.0 / group.order() as f64;
    let expected = total as f64 * share;
    let tolerance = 3.0 * (total as f64 * share * (1.0 - share)).sqrt();
    let counts: BTreeMap<String, usize> = buckets
        .iter()
        .enumerate()
        .map(|(e, b)| (group.label(e).to_string(), b.len()))
        .collect();
    let gate_pass = buckets.iter().all(|b| (b.len() as f64 - expected).abs() <= tolerance);
    let any_fail = classes.iter().any(|c| c.verdict == Verdict::Fail);
    let any_tested = classes.iter().any(|c| c.verdict != Verdict::InsufficientData);
    let verdict = if any_fail || !gate_pass {
        Verdict::Fail
    } else if any_tested {
        Verdict::Pass
    } else {
        Verdict::InsufficientData
    };
    Ok(ConditionalReport {
        classes,
        frequency_gate: FrequencyGate {
            total,
            expected_per_class: expected,
            tolerance,
            counts,
            pass: gate_pass,
        },
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub rank: usize,
    pub report: AnalysisReport,
}

/// Ranks candidates by passing moments (more first), then sup-distance
/// (smaller first), then catalog order.
pub fn identify(
    records: &[TraceRecord],
    catalog: &[CompactGroupId],
    policy: &Policy,
) -> Result<Vec<RankedCandidate>, EquidistError> {
    if catalog.is_empty() {
        return Err(EquidistError::EmptyCatalog);
    }
    if records.len() < MIN_IDENTIFY_RECORDS {
        return Err(EquidistError::TooFewRecords {
            needed: MIN_IDENTIFY_RECORDS,
            got: records.len(),
        });
    }
    let ts = traces(records);
    let mut reports = catalog
        .iter()
        .map(|id| analyze_sample(&ts, *id, policy))
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| {
        b.passing_moments
            .cmp(&a.passing_moments)
            .then(a.discrepancy.unwrap_or(1.0).total_cmp(&b.discrepancy.unwrap_or(1.0)))
            .then(a.candidate.cmp(&b.candidate))
    });
    Ok(reports
        .into_iter()
        .enumerate()
        .map(|(i, report)| RankedCandidate { rank: i + 1, report })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: u64, t: f64) -> TraceRecord {
        TraceRecord {
            p,
            class_label: None,
            n1: 0,
            n2: None,
            s1: 0,
            s2: None,
            e2: None,
            t,
            u: None,
            weil_ok: true,
        }
    }

    fn vector(values: Vec<f64>, se: f64) -> MomentVector {
        let k_max = values.len() - 1;
        MomentVector {
            k_max,
            stderr: (0..=k_max).map(|k| if k == 0 { 0.0 } else { se }).collect(),
            values,
            method: crate::haar::MomentMethod::Empirical,
            samples: Some(1000),
        }
    }

    #[test]
    fn trivial_moments() {
        let m = empirical_moments(&[rec(3, 0.0), rec(5, 0.0)], 2, None).unwrap();
        assert_eq!(m.values[2], 0.0);
        let m = empirical_moments(&[rec(3, 2.0), rec(5, -2.0)], 2, None).unwrap();
        assert_eq!((m.values[1], m.values[2]), (0.0, 4.0));
        assert_eq!(empirical_moments(&[rec(3, 1.0)], 2, Some("s1")), Err(EquidistError::EmptySelection));
    }

    #[test]
    fn moment_verdicts() {
        let nu1 = CompactGroupId::whole(CompactGroup::NU1);
        let su2 = CompactGroupId::whole(CompactGroup::SU2);
        let policy = Policy::default();
        let close = compare_to_group(&vector(vec![1.0, 0.0, 1.0, 0.0, 3.0], 0.01), nu1, &policy).unwrap();
        assert_eq!(close.verdict, Verdict::Pass);
        let far = compare_to_group(&vector(vec![1.0, 0.0, 2.0, 0.0, 6.0], 0.01), su2, &policy).unwrap();
        assert_eq!(far.verdict, Verdict::Fail);
        let exact = trace_moments_quadrature(su2, 8).unwrap();
        let same = compare_to_group(&exact, su2, &policy).unwrap();
        assert!(same.moments.z.iter().all(|z| *z == 0.0) && same.verdict == Verdict::Pass);
        assert_eq!(compare_to_group(&vector(vec![1.0], 0.0), su2, &policy), Err(EquidistError::EmptyMoments));
    }

    #[test]
    fn zero_traces_against_su2() {
        let records: Vec<_> = (0..20).map(|i| rec(i, 0.0)).collect();
        let d = discrepancy(&records, CompactGroupId::whole(CompactGroup::SU2)).unwrap();
        assert!((d - 0.5).abs() < 1e-3, "{d}");
        assert!(discrepancy(&records[..5], CompactGroupId::whole(CompactGroup::SU2)).is_err());
        let nt = CompactGroupId::new(CompactGroup::NU1, Component::Nontrivial).unwrap();
        assert_eq!(discrepancy(&records, nt).unwrap(), 0.0);
    }

    #[test]
    fn grid_contains_zero() {
        let g = discrepancy_grid(CompactGroup::USp4);
        assert_eq!(g.len(), GRID_INTERVALS + 1);
        assert!(g.contains(&0.0));
        assert_eq!((g[0], g[GRID_INTERVALS]), (-4.0, 4.0));
    }

    #[test]
    fn identify_gates() {
        let records: Vec<_> = (0..50).map(|i| rec(i, 0.0)).collect();
        let su2 = [CompactGroupId::whole(CompactGroup::SU2)];
        assert!(matches!(identify(&records, &su2, &Policy::default()), Err(EquidistError::TooFewRecords { .. })));
        assert_eq!(identify(&records, &[], &Policy::default()), Err(EquidistError::EmptyCatalog));
    }

    #[test]
    fn missing_classes_are_insufficient_not_failed() {
        let (_, g) = crate::endo_galois::gaussian_example();
        let records: Vec<_> = [5u64, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97]
            .iter()
            .map(|&p| rec(p, 1.0))
            .collect();
        let mut hyp = BTreeMap::new();
        hyp.insert("id".to_string(), CompactGroupId::whole(CompactGroup::U1));
        hyp.insert("s1".to_string(), CompactGroupId::new(CompactGroup::NU1, Component::Nontrivial).unwrap());
        let report = component_conditional_test(&records, &g, &hyp, &Policy::default()).unwrap();
        let nontrivial = report.classes.iter().find(|c| c.class == "s1").unwrap();
        assert_eq!(nontrivial.verdict, Verdict::InsufficientData);
        assert_eq!(nontrivial.n_records, 0);
        // every prime is 1 mod 4, so the class frequencies are lopsided
        assert!(!report.frequency_gate.pass);
    }
}
