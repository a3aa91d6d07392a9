//! Lefschetz Lie algebras, Galois twist spaces and their isometry points.
//!
//! For each `τ` the twisted component `DL^τ` is the intersection of the
//! linear space `L_τ = {g : gβ = ρ_e(τ)(β)g for all β in D}` with the
//! isometry quadric `gᵀΨg = Ψ`. The linear part is computed exactly; points
//! on the quadric are searched for numerically.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::endo_galois::{validate_action, ActionIssue, EndAlgebra, GaloisError, GaloisTwistGroup};
use crate::linalg::{common_kernel, Echelon, MatrixMap, Rational, RationalMatrix, SubspaceBasis};
use crate::pairing::PolarizedSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LefschetzError {
    #[error("algebra acts on dimension {algebra}, polarized space has dimension {space}")]
    DimensionMismatch { algebra: usize, space: usize },
    #[error("Galois action is invalid: {0:?}")]
    InvalidAction(Vec<ActionIssue>),
    #[error("direct summands carry different Galois groups")]
    GroupMismatch,
    #[error("power must be at least 1")]
    ZeroPower,
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// A polarized space, an endomorphism algebra acting on it, and the Galois
/// action on that algebra.
#[derive(Clone, Debug)]
pub struct LefschetzData {
    pub space: PolarizedSpace,
    pub algebra: EndAlgebra,
    pub group: GaloisTwistGroup,
}

impl LefschetzData {
    pub fn new(space: PolarizedSpace, algebra: EndAlgebra, group: GaloisTwistGroup) -> Result<Self, LefschetzError> {
        if algebra.n() != space.dim() {
            return Err(LefschetzError::DimensionMismatch {
                algebra: algebra.n(),
                space: space.dim(),
            });
        }
        let report = validate_action(&algebra, &group)?;
        if !report.is_valid() {
            return Err(LefschetzError::InvalidAction(report.issues));
        }
        Ok(Self { space, algebra, group })
    }
}

/// Lie algebra of `L(V, ψ, D)`: `{X : XᵀΨ + ΨX = 0, Xβ = βX for β in D}`.
pub fn lefschetz_lie_algebra(space: &PolarizedSpace, algebra: &EndAlgebra) -> Result<SubspaceBasis, LefschetzError> {
    let n = space.dim();
    if algebra.n() != n {
        return Err(LefschetzError::DimensionMismatch {
            algebra: algebra.n(),
            space: n,
        });
    }
    let psi = space.pairing();
    let mut maps: Vec<MatrixMap> = vec![Box::new(move |x: &RationalMatrix| &(&x.transpose() * psi) + &(psi * x))];
    for beta in algebra.basis().iter().skip(1) {
        maps.push(Box::new(move |x: &RationalMatrix| &(x * beta) - &(beta * x)));
    }
    Ok(common_kernel(n, &maps))
}

/// The exact linear space `L_τ`.
#[derive(Clone, Debug)]
pub struct TwistSpace {
    tau: usize,
    label: String,
    n: usize,
    basis: SubspaceBasis,
}

impl TwistSpace {
    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn matrices(&self) -> Vec<RationalMatrix> {
        self.basis.as_matrices(self.n)
    }

    pub fn contains(&self, g: &RationalMatrix) -> bool {
        g.rows() == self.n && g.cols() == self.n && self.basis.contains(g.as_flat())
    }
}

pub fn twist_linear_space(data: &LefschetzData, tau: usize) -> Result<TwistSpace, LefschetzError> {
    if tau >= data.group.order() {
        return Err(GaloisError::UnknownElement(tau.to_string()).into());
    }
    let n = data.space.dim();
    let pairs: Vec<(RationalMatrix, RationalMatrix)> = data
        .algebra
        .basis()
        .iter()
        .map(|beta| Ok((beta.clone(), data.group.apply(&data.algebra, tau, beta)?)))
        .collect::<Result<_, GaloisError>>()?;
    let maps: Vec<MatrixMap> = pairs
        .iter()
        .map(|(beta, image)| Box::new(move |g: &RationalMatrix| &(g * beta) - &(image * g)) as MatrixMap)
        .collect();
    Ok(TwistSpace {
        tau,
        label: data.group.label(tau).to_string(),
        n,
        basis: common_kernel(n, &maps),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub budget: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 100,
            seed: 0,
            max_iterations: 200,
            tolerance: 1e-8,
        }
    }
}

/// A numeric point `g = Σ x_i B_i` of a twist space, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericRepresentative {
    pub coefficients_re: Vec<f64>,
    pub coefficients_im: Vec<f64>,
    pub matrix_re: Vec<f64>,
    pub matrix_im: Vec<f64>,
    pub residual: f64,
    pub restart: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    IdentityInSpace,
    EmptyLinearSpace,
    NoRepresentativeWithinBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub mode: SearchMode,
    pub status: SearchStatus,
    pub restarts_tried: usize,
    pub representative: Option<NumericRepresentative>,
}

struct IsometryProblem {
    n: usize,
    basis: Vec<DMatrix<Complex64>>,
    psi: DMatrix<Complex64>,
}

impl IsometryProblem {
    fn new(space: &TwistSpace, pairing: &PolarizedSpace) -> Self {
        let n = space.n();
        let to_complex = |m: &RationalMatrix| {
            DMatrix::from_row_iterator(n, n, m.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)))
        };
        Self {
            n,
            basis: space.matrices().iter().map(to_complex).collect(),
            psi: to_complex(pairing.pairing()),
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn assemble(&self, coeffs: &[Complex64]) -> DMatrix<Complex64> {
        let mut g = DMatrix::zeros(self.n, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            g += b * *c;
        }
        g
    }

    fn defect(&self, g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        g.transpose() * &self.psi * g - &self.psi
    }

    fn coefficients(&self, x: &[f64], mode: SearchMode) -> Vec<Complex64> {
        let m = self.dim();
        (0..m)
            .map(|i| match mode {
                SearchMode::Real => Complex64::new(x[i], 0.0),
                SearchMode::Complex => Complex64::new(x[i], x[m + i]),
            })
            .collect()
    }

    /// Damped Gauss-Newton (Levenberg-Marquardt) from the start `x`.
    fn solve(&self, mut x: Vec<f64>, mode: SearchMode, cfg: &SearchConfig) -> Option<(Vec<f64>, f64)> {
        let m = self.dim();
        let q = x.len();
        let rows = 2 * self.n * self.n;
        let mut lambda = 1e-3;
        let residual = |x: &[f64]| {
            let g = self.assemble(&self.coefficients(x, mode));
            let f = self.defect(&g);
            (g, f)
        };
        let (mut g, mut f) = residual(&x);
        // a converged start gets a few extra Newton steps to polish the residual
        let mut polish = 0;
        for iteration in 0.. {
            let sup = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if sup < cfg.tolerance {
                if polish == 3 || sup < 1e-14 {
                    return Some((x, sup));
                }
                polish += 1;
            } else if iteration >= cfg.max_iterations || !sup.is_finite() {
                return None;
            }
            let r = DMatrix::from_iterator(rows, 1, f.iter().map(|z| z.re).chain(f.iter().map(|z| z.im)));
            let gt_psi = g.transpose() * &self.psi;
            let mut jac = DMatrix::<f64>::zeros(rows, q);
            for i in 0..m {
                let d = self.basis[i].transpose() * &self.psi * &g + &gt_psi * &self.basis[i];
                let half = self.n * self.n;
                for (k, z) in d.iter().enumerate() {
                    jac[(k, i)] = z.re;
                    jac[(half + k, i)] = z.im;
                    if mode == SearchMode::Complex {
                        jac[(k, m + i)] = -z.im;
                        jac[(half + k, m + i)] = z.re;
                    }
                }
            }
            let jtj = jac.transpose() * &jac;
            let jtr = jac.transpose() * &r;
            let cost = r.norm_squared();
            let mut accepted = false;
            for _ in 0..12 {
                let mut a = jtj.clone();
                for d in 0..q {
                    a[(d, d)] += lambda;
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = chol.solve(&jtr);
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
                let (g_new, f_new) = residual(&trial);
                let cost_new: f64 = f_new.iter().map(|z| z.norm_sqr()).sum();
                if cost_new < cost {
                    x = trial;
                    g = g_new;
                    f = f_new;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                return (sup < cfg.tolerance).then_some((x, sup));
            }
        }
        unreachable!()
    }
}

fn restart_rng(seed: u64, tau: usize, mode: SearchMode, restart: usize) -> ChaCha8Rng {
    let salt = (tau as u64) << 1 | u64::from(mode == SearchMode::Complex);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(restart as u64);
    rng
}

fn representative_from(problem: &IsometryProblem, coeffs: &[Complex64], residual: f64, restart: Option<usize>) -> NumericRepresentative {
    let g = problem.assemble(coeffs);
    let n = problem.n;
    let row_major = |part: fn(&Complex64) -> f64| (0..n * n).map(|k| part(&g[(k / n, k % n)])).collect();
    NumericRepresentative {
        coefficients_re: coeffs.iter().map(|c| c.re).collect(),
        coefficients_im: coeffs.iter().map(|c| c.im).collect(),
        matrix_re: row_major(|z| z.re),
        matrix_im: row_major(|z| z.im),
        residual,
        restart,
    }
}

/// Looks for `g ∈ L_τ` with `gᵀΨg = Ψ`, with real or complex coefficients.
///
/// Restarts run in parallel; the lowest-numbered successful restart wins, so
/// the result does not depend on the thread count.
pub fn find_isometry_in_twist(
    space: &TwistSpace,
    pairing: &PolarizedSpace,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> SearchOutcome {
    if space.dim() == 0 {
        return SearchOutcome {
            mode,
            status: SearchStatus::EmptyLinearSpace,
            restarts_tried: 0,
            representative: None,
        };
    }
    let problem = IsometryProblem::new(space, pairing);
    let mut ech = Echelon::new(space.n() * space.n());
    for v in space.basis().vectors() {
        ech.insert(v);
    }
    if let Some(coords) = ech.coordinates(RationalMatrix::identity(space.n()).as_flat()) {
        let coeffs: Vec<Complex64> = coords
            .iter()
            .map(|c| Complex64::new(rational_to_f64(c), 0.0))
            .collect();
        return SearchOutcome {
            mode,
            status: SearchStatus::IdentityInSpace,
            restarts_tried: 0,
            representative: Some(representative_from(&problem, &coeffs, 0.0, None)),
        };
    }
    let q = match mode {
        SearchMode::Real => problem.dim(),
        SearchMode::Complex => 2 * problem.dim(),
    };
    let found = (0..cfg.budget).into_par_iter().find_map_first(|restart| {
        let mut rng = restart_rng(cfg.seed, space.tau(), mode, restart);
        let start: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..=1.0)).collect();
        problem
            .solve(start, mode, cfg)
            .map(|(x, residual)| (restart, problem.coefficients(&x, mode), residual))
    });
    match found {
        Some((restart, coeffs, residual)) => SearchOutcome {
            mode,
            status: SearchStatus::Found,
            restarts_tried: restart + 1,
            representative: Some(representative_from(&problem, &coeffs, residual, Some(restart))),
        },
        None => SearchOutcome {
            mode,
            status: SearchStatus::NoRepresentativeWithinBudget,
            restarts_tried: cfg.budget,
            representative: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealObstruction {
    /// Some entry of `gᵀΨg = Ψ` is a semidefinite quadratic form of the wrong sign.
    CertifiedEmpty,
    Inconclusive,
    /// The closed-form test only runs on twist spaces of dimension at most 3.
    NotApplicable,
}

fn principal_minors_nonneg(s: &RationalMatrix) -> bool {
    let d = s.rows();
    (1usize..1 << d).all(|subset| {
        let idx: Vec<usize> = (0..d).filter(|i| subset >> i & 1 == 1).collect();
        let mut sub = RationalMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                sub.set(a, b, s.get(i, j).clone());
            }
        }
        !sub.determinant().is_negative()
    })
}

fn leading_minors_pos(s: &RationalMatrix) -> bool {
    (1..=s.rows()).all(|k| s.submatrix(0, 0, k, k).determinant().is_positive())
}

/// Exact test for the absence of real points on `L_τ ∩ {gᵀΨg = Ψ}`.
///
/// Writing `g = Σ x_i B_i`, each entry of `gᵀΨg` is a rational quadratic form
/// in `x`. If for some entry `e` that form is negative semidefinite while
/// `Ψ_e > 0` (or the reverse), or is definite while `Ψ_e = 0`, no real `x`
/// can solve the system.
pub fn real_obstruction(space: &TwistSpace, pairing: &PolarizedSpace) -> RealObstruction {
    let d = space.dim();
    if d > 3 {
        return RealObstruction::NotApplicable;
    }
    if d == 0 {
        return RealObstruction::CertifiedEmpty;
    }
    let n = space.n();
    let psi = pairing.pairing();
    let basis = space.matrices();
    let cross: Vec<Vec<RationalMatrix>> = basis
        .iter()
        .map(|bi| basis.iter().map(|bj| &(&bi.transpose() * psi) * bj).collect())
        .collect();
    let two = Rational::from_integer(2.into());
    for a in 0..n {
        for b in 0..n {
            let mut s = RationalMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    s.set(i, j, (cross[i][j].get(a, b) + cross[j][i].get(a, b)) / &two);
                }
            }
            let target = psi.get(a, b);
            let certified = if target.is_positive() {
                principal_minors_nonneg(&-&s)
            } else if target.is_negative() {
                principal_minors_nonneg(&s)
            } else {
                leading_minors_pos(&s) || leading_minors_pos(&-&s)
            };
            if certified {
                return RealObstruction::CertifiedEmpty;
            }
        }
    }
    RealObstruction::Inconclusive
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonemptiness {
    Yes,
    NoEvidence,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistComponentReport {
    pub tau: String,
    pub twist_dim: usize,
    pub lie_dim_at_identity: usize,
    pub real_representative: Option<NumericRepresentative>,
    pub complex_representative: Option<NumericRepresentative>,
    pub real_search: SearchStatus,
    pub complex_search: SearchStatus,
    pub real_obstruction: RealObstruction,
    pub nonempty_over_c: Nonemptiness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurjectionVerdict {
    /// Every Galois class has a complex isometry point.
    SurjectiveComplexPoints,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurjectionReport {
    pub group_order: usize,
    pub lie_dim: usize,
    pub components: Vec<TwistComponentReport>,
    pub verdict: SurjectionVerdict,
}

/// One twist-component report per `τ ∈ Gal(K_e/K)` and the verdict on
/// whether `DL_K → Gal(K_e/K)` is onto on complex points.
pub fn component_surjection_report(data: &LefschetzData, cfg: &SearchConfig) -> Result<SurjectionReport, LefschetzError> {
    let lie_dim = lefschetz_lie_algebra(&data.space, &data.algebra)?.dim();
    let components = (0..data.group.order())
        .map(|tau| {
            let space = twist_linear_space(data, tau)?;
            let real = find_isometry_in_twist(&space, &data.space, SearchMode::Real, cfg);
            let complex = find_isometry_in_twist(&space, &data.space, SearchMode::Complex, cfg);
            let obstruction = real_obstruction(&space, &data.space);
            let nonempty = if complex.representative.is_some() || real.representative.is_some() {
                Nonemptiness::Yes
            } else if obstruction == RealObstruction::CertifiedEmpty {
                Nonemptiness::NoEvidence
            } else {
                Nonemptiness::Undetermined
            };
            Ok(TwistComponentReport {
                tau: space.label().to_string(),
                twist_dim: space.dim(),
                lie_dim_at_identity: lie_dim,
                real_representative: real.representative,
                complex_representative: complex.representative,
                real_search: real.status,
                complex_search: complex.status,
                real_obstruction: obstruction,
                nonempty_over_c: nonempty,
            })
        })
        .collect::<Result<Vec<_>, LefschetzError>>()?;
    let verdict = if components.iter().all(|c| c.nonempty_over_c == Nonemptiness::Yes) {
        SurjectionVerdict::SurjectiveComplexPoints
    } else {
        SurjectionVerdict::Undetermined
    };
    Ok(SurjectionReport {
        group_order: data.group.order(),
        lie_dim,
        components,
        verdict,
    })
}

/// Applies `τ` blockwise to an `n_total x n_total` matrix whose `(i, j)`
/// block (of the given sizes) lies in `algebra_of(i, j)`.
fn blockwise_image<'a>(
    m: &RationalMatrix,
    sizes: &[usize],
    tau: usize,
    algebra_of: impl Fn(usize, usize) -> Option<(&'a EndAlgebra, &'a GaloisTwistGroup)>,
) -> Result<RationalMatrix, GaloisError> {
    let mut out = RationalMatrix::zeros(m.rows(), m.cols());
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    for (bi, (&ri, &si)) in offsets.iter().zip(sizes).enumerate() {
        for (bj, (&rj, &sj)) in offsets.iter().zip(sizes).enumerate() {
            let block = m.submatrix(ri, rj, si, sj);
            if block.is_zero() {
                continue;
            }
            let (algebra, group) = algebra_of(bi, bj).ok_or(GaloisError::NotInAlgebra)?;
            out.paste(ri, rj, &group.apply(algebra, tau, &block)?);
        }
    }
    Ok(out)
}

fn induced_actions(
    algebra: &EndAlgebra,
    group: &GaloisTwistGroup,
    image: impl Fn(usize, &RationalMatrix) -> Result<RationalMatrix, GaloisError>,
) -> Result<Vec<RationalMatrix>, GaloisError> {
    (0..group.order())
        .map(|tau| {
            let m = algebra.dim();
            let mut a = RationalMatrix::zeros(m, m);
            for (k, b) in algebra.basis().iter().enumerate() {
                let coords = algebra.coordinates(&image(tau, b)?).ok_or(GaloisError::NotInAlgebra)?;
                for (row, c) in coords.into_iter().enumerate() {
                    a.set(row, k, c);
                }
            }
            Ok(a)
        })
        .collect()
}

/// `(V^s, ψ^s, M_s(D))` with the entrywise Galois action.
pub fn power_data(data: &LefschetzData, s: usize) -> Result<LefschetzData, LefschetzError> {
    if s == 0 {
        return Err(LefschetzError::ZeroPower);
    }
    let n = data.space.dim();
    let mut generators: Vec<RationalMatrix> = data
        .algebra
        .basis()
        .iter()
        .map(|b| RationalMatrix::block_diagonal(&vec![b.clone(); s]))
        .collect();
    for i in 0..s {
        for j in 0..s {
            generators.push(RationalMatrix::unit(s, s, i, j).kron(&RationalMatrix::identity(n)));
        }
    }
    let algebra = EndAlgebra::from_generators(s * n, &generators)?;
    let sizes = vec![n; s];
    let actions = induced_actions(&algebra, &data.group, |tau, b| {
        blockwise_image(b, &sizes, tau, |_, _| Some((&data.algebra, &data.group)))
    })?;
    LefschetzData::new(data.space.power(s), algebra, data.group.with_actions(actions))
}

/// `(⊕ V_i, ⊕ ψ_i, ∏ D_i)`, each factor keeping its own Galois action.
pub fn direct_sum_data(parts: &[LefschetzData]) -> Result<LefschetzData, LefschetzError> {
    let first = parts.first().ok_or(LefschetzError::ZeroPower)?;
    if parts.iter().any(|p| !p.group.is_same_group(&first.group)) {
        return Err(LefschetzError::GroupMismatch);
    }
    let sizes: Vec<usize> = parts.iter().map(|p| p.space.dim()).collect();
    let total: usize = sizes.iter().sum();
    let mut generators = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        for b in part.algebra.basis() {
            let blocks: Vec<RationalMatrix> = parts
                .iter()
                .enumerate()
                .map(|(k, p)| if k == i { b.clone() } else { RationalMatrix::zeros(p.space.dim(), p.space.dim()) })
                .collect();
            generators.push(RationalMatrix::block_diagonal(&blocks));
        }
    }
    let algebra = EndAlgebra::from_generators(total, &generators)?;
    let actions = induced_actions(&algebra, &first.group, |tau, b| {
        blockwise_image(b, &sizes, tau, |i, j| {
            (i == j).then(|| (&parts[i].algebra, &parts[i].group))
        })
    })?;
    let spaces: Vec<PolarizedSpace> = parts.iter().map(|p| p.space.clone()).collect();
    LefschetzData::new(PolarizedSpace::direct_sum(&spaces), algebra, first.group.with_actions(actions))
}

#[derive(Debug, Clone)]
pub enum CompositeSpec {
    /// `(V^s, ψ^s, M_s(D))` of the base triple.
    Power(usize),
    /// Base triple followed by these summands.
    DirectSum(Vec<LefschetzData>),
    /// `⊕ (V_i^{s_i}, M_{s_i}(D_i))` over the base (with `base_power`) and the listed triples.
    Mixed {
        base_power: usize,
        others: Vec<(LefschetzData, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimRow {
    pub label: String,
    pub n: usize,
    pub algebra_dim: usize,
    pub twist_dim: usize,
    pub lie_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerProductReport {
    pub tau: String,
    pub factors: Vec<DimRow>,
    pub composite: DimRow,
    pub expected_twist_dim: usize,
    pub expected_lie_dim: usize,
    pub pass: bool,
}

fn dim_row(label: String, data: &LefschetzData, tau: usize) -> Result<DimRow, LefschetzError> {
    Ok(DimRow {
        label,
        n: data.space.dim(),
        algebra_dim: data.algebra.dim(),
        twist_dim: twist_linear_space(data, tau)?.dim(),
        lie_dim: lefschetz_lie_algebra(&data.space, &data.algebra)?.dim(),
    })
}

/// Checks that twist-space and Lefschetz Lie algebra dimensions are
/// unchanged under `V ↦ V^s, D ↦ M_s(D)` and additive under direct sums.
pub fn power_product_check(base: &LefschetzData, tau: usize, spec: &CompositeSpec) -> Result<PowerProductReport, LefschetzError> {
    let (factors, composite, label): (Vec<(&LefschetzData, usize)>, LefschetzData, String) = match spec {
        CompositeSpec::Power(s) => (vec![(base, *s)], power_data(base, *s)?, format!("power s={s}")),
        CompositeSpec::DirectSum(others) => {
            let mut parts = vec![base.clone()];
            parts.extend(others.iter().cloned());
            let composite = direct_sum_data(&parts)?;
            let factors = std::iter::once(base).chain(others.iter()).map(|d| (d, 1)).collect();
            (factors, composite, format!("direct sum of {}", parts.len()))
        }
        CompositeSpec::Mixed { base_power, others } => {
            let factors: Vec<(&LefschetzData, usize)> = std::iter::once((base, *base_power))
                .chain(others.iter().map(|(d, s)| (d, *s)))
                .collect();
            let powers = factors
                .iter()
                .map(|(d, s)| power_data(d, *s))
                .collect::<Result<Vec<_>, _>>()?;
            (factors, direct_sum_data(&powers)?, "mixed powers and sums".to_string())
        }
    };
    let rows = factors
        .iter()
        .enumerate()
        .map(|(i, (d, s))| dim_row(format!("factor {i} (s={s})"), d, tau))
        .collect::<Result<Vec<_>, _>>()?;
    let composite = dim_row(label, &composite, tau)?;
    let expected_twist_dim = rows.iter().map(|r| r.twist_dim).sum();
    let expected_lie_dim = rows.iter().map(|r| r.lie_dim).sum();
    Ok(PowerProductReport {
        tau: base.group.label(tau).to_string(),
        pass: composite.twist_dim == expected_twist_dim && composite.lie_dim == expected_lie_dim,
        factors: rows,
        composite,
        expected_twist_dim,
        expected_lie_dim,
    })
}

/// Sanity helper: every basis element of `L_τ` satisfies its defining equations.
pub fn verify_twist_space(data: &LefschetzData, space: &TwistSpace) -> Result<bool, LefschetzError> {
    for g in space.matrices() {
        for beta in data.algebra.basis() {
            let image = data.group.apply(&data.algebra, space.tau(), beta)?;
            if !(&(&g * beta) - &(&image * &g)).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(space.basis().is_independent())
}

fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
