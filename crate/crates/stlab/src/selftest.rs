//! Fast invariant checks over every module, run by `stlab selftest`.

use std::collections::BTreeMap;

use stlab_core::arith::primes_up_to;
use stlab_core::endo_galois::{frobenius_class, gaussian_example, validate_action, EndAlgebra};
use stlab_core::equidist::{analyze_sample, component_conditional_test, Policy, Verdict};
use stlab_core::frobenius::{count_points_genus1, count_points_genus2, l_poly_genus2, scan_primes, CurveSpec};
use stlab_core::haar::{
    sample_element, standard_complex_symplectic, trace_moments_mc, trace_moments_quadrature, CompactGroup,
    CompactGroupId, Component,
};
use stlab_core::lefschetz::{
    component_surjection_report, lefschetz_lie_algebra, power_product_check, twist_linear_space, CompositeSpec,
    LefschetzData, SearchConfig, SurjectionVerdict,
};
use stlab_core::linalg::{kernel, rat, ratio, RationalMatrix};
use stlab_core::pairing::{similitude_factor, PolarizedSpace};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn kernels() -> Result<(), String> {
    let m = RationalMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
    ensure(kernel(&m).dim() == 2, || "rank-one 2x3 kernel should be 2-dimensional".into())?;
    let inv = RationalMatrix::from_i64(&[&[2, 1], &[1, 1]]);
    ensure(kernel(&inv).dim() == 0, || "invertible matrix has a kernel".into())
}

fn similitudes() -> Result<(), String> {
    let space = PolarizedSpace::standard_symplectic(2);
    let alpha = ratio(-5, 3);
    let scalar = RationalMatrix::identity(4).scale(&alpha);
    ensure(similitude_factor(&scalar, &space) == Some(&alpha * &alpha), || "χ(αI) ≠ α²".into())?;
    let d = RationalMatrix::diagonal(&[rat(1), rat(1), rat(7), rat(7)]);
    ensure(similitude_factor(&d, &space) == Some(rat(7)), || "χ(diag(1,1,7,7)) ≠ 7".into())
}

fn lie_dimensions() -> Result<(), String> {
    let plane = PolarizedSpace::standard_symplectic(1);
    let (gauss, _) = gaussian_example();
    let full = EndAlgebra::from_generators(
        2,
        &[RationalMatrix::unit(2, 2, 0, 1), RationalMatrix::unit(2, 2, 1, 0)],
    )
    .map_err(|e| e.to_string())?;
    let cases = [
        (plane.clone(), EndAlgebra::scalars(2), 3),
        (plane.clone(), gauss, 1),
        (plane, full, 0),
        (PolarizedSpace::standard_symplectic(2), EndAlgebra::scalars(4), 10),
    ];
    for (space, algebra, expected) in cases {
        let dim = lefschetz_lie_algebra(&space, &algebra).map_err(|e| e.to_string())?.dim();
        ensure(dim == expected, || format!("n={} dim D={}: got {dim}, want {expected}", space.dim(), algebra.dim()))?;
    }
    Ok(())
}

fn gaussian_data() -> LefschetzData {
    let (algebra, group) = gaussian_example();
    LefschetzData::new(PolarizedSpace::standard_symplectic(1), algebra, group).expect("valid example")
}

fn twists() -> Result<(), String> {
    let data = gaussian_data();
    ensure(validate_action(&data.algebra, &data.group).map_err(|e| e.to_string())?.is_valid(), || {
        "conjugation action invalid".into()
    })?;
    for tau in 0..2 {
        let dim = twist_linear_space(&data, tau).map_err(|e| e.to_string())?.dim();
        ensure(dim == 2, || format!("twist {tau} has dim {dim}"))?;
        for spec in [CompositeSpec::Power(2), CompositeSpec::DirectSum(vec![data.clone()])] {
            let report = power_product_check(&data, tau, &spec).map_err(|e| e.to_string())?;
            ensure(report.pass, || format!("composite check failed for tau={tau}"))?;
        }
    }
    let report = component_surjection_report(&data, &SearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(report.verdict == SurjectionVerdict::SurjectiveComplexPoints, || {
        "conjugation twist has no complex point".into()
    })
}

fn frobenius_classes() -> Result<(), String> {
    let (_, g) = gaussian_example();
    for p in primes_up_to(200).into_iter().skip(1) {
        let class = frobenius_class(p, &g).map_err(|e| e.to_string())?;
        ensure((class == 0) == (p % 4 == 1), || format!("wrong class at p={p}"))?;
    }
    Ok(())
}

fn haar_samples() -> Result<(), String> {
    let j = standard_complex_symplectic(2);
    for i in 0..200 {
        let g = sample_element(CompactGroupId::whole(CompactGroup::USp4), 1, i);
        let defect = (g.transpose() * &j * &g - &j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure(defect < 1e-10, || format!("USp4 draw {i} misses the form by {defect}"))?;
    }
    Ok(())
}

fn haar_moments() -> Result<(), String> {
    let catalan = [1.0, 1.0, 2.0, 5.0, 14.0];
    let central = [1.0, 2.0, 6.0, 20.0, 70.0];
    let su2 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::SU2), 8).map_err(|e| e.to_string())?;
    let u1 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::U1), 8).map_err(|e| e.to_string())?;
    for j in 0..=4 {
        ensure((su2.values[2 * j] - catalan[j]).abs() < 1e-8, || format!("SU2 M{}", 2 * j))?;
        ensure((u1.values[2 * j] - central[j]).abs() < 1e-8, || format!("U1 M{}", 2 * j))?;
    }
    let id = CompactGroupId::whole(CompactGroup::USp4);
    let mc = trace_moments_mc(id, 4, 20_000, 3).map_err(|e| e.to_string())?;
    let quad = trace_moments_quadrature(id, 4).map_err(|e| e.to_string())?;
    for k in [2, 4] {
        let gap = (mc.values[k] - quad.values[k]).abs();
        ensure(gap <= 4.0 * mc.stderr[k], || format!("USp4 MC M{k} off by {gap}"))?;
    }
    Ok(())
}

fn point_counts() -> Result<(), String> {
    let e = CurveSpec::new(1, &[0, 1, 0, 1]).map_err(|e| e.to_string())?;
    for (p, n) in [(3, 4), (5, 4), (7, 8)] {
        ensure(count_points_genus1(&e, p).map_err(|e| e.to_string())? == n, || format!("#E(F_{p}) ≠ {n}"))?;
    }
    let c = CurveSpec::new(2, &[1, 0, 0, 0, 0, 1]).map_err(|e| e.to_string())?;
    ensure(count_points_genus2(&c, 3).map_err(|e| e.to_string())?.0 == 4, || "x⁵+1 over F_3".into())?;
    let l = l_poly_genus2(1, 7, 3).map_err(|e| e.to_string())?;
    ensure((l.s1, l.s2, l.e2) == (3, 3, 3), || "L-polynomial arithmetic".into())?;
    ensure(CurveSpec::new(1, &[0, 0, 0, 1]).is_err(), || "x³ accepted".into())?;
    let records = scan_primes(&e, 100, None, 1).map_err(|e| e.to_string())?;
    ensure(records.len() == 24, || format!("{} records below 100", records.len()))
}

fn equidistribution() -> Result<(), String> {
    let policy = Policy::default();
    let curve = CurveSpec::new(1, &[0, 1, 0, 1]).map_err(|e| e.to_string())?;
    let (_, g) = gaussian_example();
    let records = scan_primes(&curve, 20_000, Some(&g), 0).map_err(|e| e.to_string())?;
    let mut h = BTreeMap::new();
    h.insert("id".to_string(), CompactGroupId::new(CompactGroup::NU1, Component::Identity).unwrap());
    h.insert("s1".to_string(), CompactGroupId::new(CompactGroup::NU1, Component::Nontrivial).unwrap());
    let report = component_conditional_test(&records, &g, &h, &policy).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::Pass, || "CM curve fails its component test".into())?;
    let zeros = vec![0.0; 50];
    let d = analyze_sample(&zeros, CompactGroupId::whole(CompactGroup::SU2), &policy)
        .map_err(|e| e.to_string())?
        .discrepancy
        .unwrap_or(0.0);
    ensure((d - 0.5).abs() < 1e-3, || format!("point mass vs SU2 discrepancy {d}"))
}

const CHECKS: [(&str, Check); 9] = [
    ("exact_linalg.kernels", kernels),
    ("pairing_core.similitudes", similitudes),
    ("twisted_lefschetz.lie_dimensions", lie_dimensions),
    ("twisted_lefschetz.twists", twists),
    ("endo_galois.frobenius_classes", frobenius_classes),
    ("compact_haar.samples", haar_samples),
    ("compact_haar.moments", haar_moments),
    ("frobenius_counts.examples", point_counts),
    ("equidist_analysis.cm_curve", equidistribution),
];

pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
            CheckResult {
                name,
                passed: outcome.is_ok(),
                detail: outcome.err().unwrap_or_default(),
            }
        })
        .collect()
}

pub fn render(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        if r.passed {
            out.push_str(&format!("PASS {}\n", r.name));
        } else {
            out.push_str(&format!("FAIL {}: {}\n", r.name, r.detail));
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    out
}
