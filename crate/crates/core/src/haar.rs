//! Haar sampling and trace statistics for the compact candidate groups.
//!
//! Each group is realized in one fixed model:
//!
//! * `U1`: `diag(e^{iθ}, e^{-iθ})` in `SU(2)`;
//! * `NU1`: `U1 ∪ J·U1` with `J = [[0, 1], [-1, 0]]`;
//! * `SU2`: unit quaternions `[[α, β], [-β̄, ᾱ]]`;
//! * `SU2xSU2`: block-diagonal pairs in `SU(4)`;
//! * `USp4`: unitary matrices preserving `J = [[0, I], [-I, 0]]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate, integrate_split};
use crate::rng::{mean_and_stderr, stream_rng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HaarError {
    #[error("component `{component}` is not valid for {group}")]
    InvalidComponent { group: CompactGroup, component: Component },
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("k_max {0} exceeds the supported maximum of 32")]
    KTooLarge(usize),
    #[error("Monte Carlo needs at least 1000 samples, got {0}")]
    TooFewSamples(usize),
}

/// Catalog of compact groups, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompactGroup {
    U1,
    NU1,
    SU2,
    SU2xSU2,
    USp4,
}

impl CompactGroup {
    pub const ALL: [CompactGroup; 5] = [Self::U1, Self::NU1, Self::SU2, Self::SU2xSU2, Self::USp4];

    pub fn name(self) -> &'static str {
        match self {
            Self::U1 => "U1",
            Self::NU1 => "NU1",
            Self::SU2 => "SU2",
            Self::SU2xSU2 => "SU2xSU2",
            Self::USp4 => "USp4",
        }
    }

    /// Size of the matrices in the standard model.
    pub fn matrix_size(self) -> usize {
        match self {
            Self::U1 | Self::NU1 | Self::SU2 => 2,
            Self::SU2xSU2 | Self::USp4 => 4,
        }
    }

    /// Traces lie in `[-trace_bound, trace_bound]`.
    pub fn trace_bound(self) -> f64 {
        self.matrix_size() as f64
    }

    pub fn component_count(self) -> usize {
        if self == Self::NU1 {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for CompactGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompactGroup {
    type Err = HaarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HaarError::UnknownGroup(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Identity,
    Nontrivial,
    Mixture,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Identity => "identity",
            Self::Nontrivial => "nontrivial",
            Self::Mixture => "mixture",
        })
    }
}

impl FromStr for Component {
    type Err = HaarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "id" => Ok(Self::Identity),
            "nontrivial" => Ok(Self::Nontrivial),
            "mixture" | "all" => Ok(Self::Mixture),
            _ => Err(HaarError::UnknownComponent(s.to_string())),
        }
    }
}

/// A catalog group together with the part of it being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CompactGroupId {
    group: CompactGroup,
    component: Component,
}

impl CompactGroupId {
    pub fn new(group: CompactGroup, component: Component) -> Result<Self, HaarError> {
        if component == Component::Nontrivial && group.component_count() == 1 {
            return Err(HaarError::InvalidComponent { group, component });
        }
        Ok(Self { group, component })
    }

    /// The whole group (Haar measure over all components).
    pub fn whole(group: CompactGroup) -> Self {
        Self {
            group,
            component: Component::Mixture,
        }
    }

    pub fn group(&self) -> CompactGroup {
        self.group
    }

    pub fn component(&self) -> Component {
        self.component
    }
}

impl fmt::Display for CompactGroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.group, self.component)
    }
}

pub type ComplexMatrix = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Quaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Quaternion {
    const ZERO: Self = Self { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    fn gaussian<R: Rng>(rng: &mut R) -> Self {
        Self {
            w: rng.sample(StandardNormal),
            x: rng.sample(StandardNormal),
            y: rng.sample(StandardNormal),
            z: rng.sample(StandardNormal),
        }
    }

    fn conj(self) -> Self {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    fn mul(self, o: Self) -> Self {
        Self {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    fn add(self, o: Self) -> Self {
        Self { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }

    fn scale(self, s: f64) -> Self {
        Self { w: self.w * s, x: self.x * s, y: self.y * s, z: self.z * s }
    }

    /// `q = a + b j` with `a, b ∈ C` maps to `[[a, b], [-b̄, ā]]`.
    fn to_complex(self) -> [[Complex64; 2]; 2] {
        let a = Complex64::new(self.w, self.x);
        let b = Complex64::new(self.y, self.z);
        [[a, b], [-b.conj(), a.conj()]]
    }
}

fn su2_from_quaternion(q: Quaternion) -> ComplexMatrix {
    let m = q.to_complex();
    DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

fn random_unit_quaternion<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::gaussian(rng);
        let n = q.norm_sqr();
        if n > 1e-300 {
            return q.scale(1.0 / n.sqrt());
        }
    }
}

fn torus_element(theta: f64) -> ComplexMatrix {
    let e = Complex64::from_polar(1.0, theta);
    DMatrix::from_row_slice(2, 2, &[e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), e.conj()])
}

fn nontrivial_coset_element(theta: f64) -> ComplexMatrix {
    let j = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    j * torus_element(theta)
}

/// Haar-random element of `Sp(2)` (2x2 quaternionic unitary) by Gram-Schmidt on
/// Gaussian columns, returned in the `[[0, I], [-I, 0]]` symplectic basis.
fn usp4_element<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let mut cols = [[Quaternion::ZERO; 2]; 2];
    for col in cols.iter_mut() {
        for entry in col.iter_mut() {
            *entry = Quaternion::gaussian(rng);
        }
    }
    // right-module Gram-Schmidt: v <- v - u <u, v>, <u, v> = Σ conj(u_i) v_i
    for j in 0..2 {
        for i in 0..j {
            let u = cols[i];
            let ip = u[0].conj().mul(cols[j][0]).add(u[1].conj().mul(cols[j][1]));
            for r in 0..2 {
                cols[j][r] = cols[j][r].add(u[r].mul(ip).scale(-1.0));
            }
        }
        let norm = (cols[j][0].norm_sqr() + cols[j][1].norm_sqr()).sqrt();
        for r in 0..2 {
            cols[j][r] = cols[j][r].scale(1.0 / norm);
        }
    }
    // block (r, c) of the complex 4x4 matrix is the 2x2 image of entry (r, c)
    let mut blocky = DMatrix::<Complex64>::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            let m = cols[c][r].to_complex();
            for a in 0..2 {
                for b in 0..2 {
                    blocky[(2 * r + a, 2 * c + b)] = m[a][b];
                }
            }
        }
    }
    // blocky preserves diag(J2, J2); reorder basis to (e0, e2, e1, e3)
    const ORDER: [usize; 4] = [0, 2, 1, 3];
    DMatrix::from_fn(4, 4, |i, j| blocky[(ORDER[i], ORDER[j])])
}

/// The symplectic form preserved by the `USp4` model.
pub fn standard_complex_symplectic(g: usize) -> ComplexMatrix {
    let mut j = DMatrix::<Complex64>::zeros(2 * g, 2 * g);
    for i in 0..g {
        j[(i, g + i)] = Complex64::new(1.0, 0.0);
        j[(g + i, i)] = Complex64::new(-1.0, 0.0);
    }
    j
}

/// Haar draw number `index` from the group (or coset) `id`.
pub fn sample_element(id: CompactGroupId, seed: u64, index: u64) -> ComplexMatrix {
    let mut rng = stream_rng(seed, index);
    match id.group {
        CompactGroup::U1 => torus_element(rng.random_range(0.0..2.0 * PI)),
        CompactGroup::NU1 => {
            let nontrivial = match id.component {
                Component::Identity => false,
                Component::Nontrivial => true,
                Component::Mixture => rng.random_bool(0.5),
            };
            let theta = rng.random_range(0.0..2.0 * PI);
            if nontrivial {
                nontrivial_coset_element(theta)
            } else {
                torus_element(theta)
            }
        }
        CompactGroup::SU2 => su2_from_quaternion(random_unit_quaternion(&mut rng)),
        CompactGroup::SU2xSU2 => {
            let a = su2_from_quaternion(random_unit_quaternion(&mut rng));
            let b = su2_from_quaternion(random_unit_quaternion(&mut rng));
            let mut m = DMatrix::<Complex64>::zeros(4, 4);
            m.view_mut((0, 0), (2, 2)).copy_from(&a);
            m.view_mut((2, 2), (2, 2)).copy_from(&b);
            m
        }
        CompactGroup::USp4 => usp4_element(&mut rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    Mc,
    Quadrature,
    Empirical,
}

/// Trace moments `M_0..M_{k_max}` with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    pub k_max: usize,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub method: MomentMethod,
    pub samples: Option<usize>,
}

impl MomentVector {
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

fn quad_tol(bound: f64, k: usize) -> f64 {
    1e-13 * bound.powi(k as i32).max(1.0)
}

fn u1_moment(k: usize) -> f64 {
    let f = |t: f64| (2.0 * t.cos()).powi(k as i32);
    integrate_split(f, 0.0, 2.0 * PI, &[PI], quad_tol(2.0, k)) / (2.0 * PI)
}

fn su2_moment(k: usize) -> f64 {
    let f = |t: f64| (2.0 * t.cos()).powi(k as i32) * t.sin().powi(2);
    2.0 / PI * integrate(f, 0.0, PI, quad_tol(2.0, k))
}

fn usp4_weight(t1: f64, t2: f64) -> f64 {
    let d = 2.0 * t1.cos() - 2.0 * t2.cos();
    d * d * (2.0 * t1.sin()).powi(2) * (2.0 * t2.sin()).powi(2)
}

fn usp4_raw(k: usize) -> f64 {
    let tol = quad_tol(4.0, k) * 16.0;
    let inner = |t1: f64| {
        let c1 = 2.0 * t1.cos();
        integrate(
            |t2: f64| (c1 + 2.0 * t2.cos()).powi(k as i32) * usp4_weight(t1, t2),
            0.0,
            PI,
            tol / PI,
        )
    };
    integrate(inner, 0.0, PI, tol)
}

/// Normalizing constant of the `USp4` Weyl density, fixed so that `M_0 = 1`.
fn usp4_normalizer() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| usp4_raw(0))
}

fn usp4_moment(k: usize) -> f64 {
    usp4_raw(k) / usp4_normalizer()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Trace moments of `id` by Weyl-integration quadrature.
pub fn trace_moments_quadrature(id: CompactGroupId, k_max: usize) -> Result<MomentVector, HaarError> {
    if k_max > 32 {
        return Err(HaarError::KTooLarge(k_max));
    }
    let values: Vec<f64> = match id.group {
        CompactGroup::U1 => (0..=k_max).map(u1_moment).collect(),
        CompactGroup::SU2 => (0..=k_max).map(su2_moment).collect(),
        CompactGroup::USp4 => (0..=k_max).into_par_iter().map(usp4_moment).collect(),
        CompactGroup::NU1 => {
            let point_mass = |k: usize| if k == 0 { 1.0 } else { 0.0 };
            (0..=k_max)
                .map(|k| match id.component {
                    Component::Identity => u1_moment(k),
                    Component::Nontrivial => point_mass(k),
                    Component::Mixture => 0.5 * (u1_moment(k) + point_mass(k)),
                })
                .collect()
        }
        CompactGroup::SU2xSU2 => {
            let m: Vec<f64> = (0..=k_max).map(su2_moment).collect();
            (0..=k_max)
                .map(|k| (0..=k).map(|j| binomial(k, j) * m[j] * m[k - j]).sum())
                .collect()
        }
    };
    Ok(MomentVector {
        k_max,
        stderr: vec![0.0; k_max + 1],
        values,
        method: MomentMethod::Quadrature,
        samples: None,
    })
}

pub fn trace_of(m: &ComplexMatrix) -> f64 {
    m.trace().re
}

/// Traces of `n` consecutive Haar draws, in draw order.
pub fn sample_traces(id: CompactGroupId, n: usize, seed: u64) -> Vec<f64> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| trace_of(&sample_element(id, seed, i)))
        .collect()
}

/// Moments `(1/N) Σ t_i^k` with standard errors, from a list of traces.
pub fn moments_of_traces(traces: &[f64], k_max: usize) -> MomentVector {
    let mut values = Vec::with_capacity(k_max + 1);
    let mut stderr = Vec::with_capacity(k_max + 1);
    values.push(1.0);
    stderr.push(0.0);
    let mut powers = vec![1.0; traces.len()];
    for _ in 1..=k_max {
        powers.iter_mut().zip(traces).for_each(|(p, t)| *p *= t);
        let (m, se) = mean_and_stderr(&powers);
        values.push(m);
        stderr.push(se);
    }
    MomentVector {
        k_max,
        values,
        stderr,
        method: MomentMethod::Empirical,
        samples: Some(traces.len()),
    }
}

/// Monte Carlo trace moments from `n` Haar draws.
pub fn trace_moments_mc(id: CompactGroupId, k_max: usize, n: usize, seed: u64) -> Result<MomentVector, HaarError> {
    if n < 1000 {
        return Err(HaarError::TooFewSamples(n));
    }
    let traces = sample_traces(id, n, seed);
    Ok(MomentVector {
        method: MomentMethod::Mc,
        ..moments_of_traces(&traces, k_max)
    })
}

fn u1_cdf(t: f64) -> f64 {
    if t < -2.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        1.0 - (t / 2.0).acos() / PI
    }
}

fn su2_cdf(t: f64) -> f64 {
    if t < -2.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let phi = (t / 2.0).acos();
        1.0 - (phi - 0.5 * (2.0 * phi).sin()) / PI
    }
}

fn su2xsu2_cdf(t: f64) -> f64 {
    if t < -4.0 {
        return 0.0;
    }
    if t >= 4.0 {
        return 1.0;
    }
    let breaks = [((t - 2.0) / 2.0), ((t + 2.0) / 2.0)]
        .into_iter()
        .filter(|c| c.abs() <= 1.0)
        .map(f64::acos)
        .collect::<Vec<_>>();
    let f = |th: f64| th.sin().powi(2) * su2_cdf(t - 2.0 * th.cos());
    (2.0 / PI * integrate_split(f, 0.0, PI, &breaks, 1e-11)).clamp(0.0, 1.0)
}

/// `∫_φ^π (a - 2cosθ)² · 4sin²θ dθ` in closed form.
fn usp4_inner(a: f64, phi: f64) -> f64 {
    let anti = |th: f64| {
        let s = th.sin();
        4.0 * (a * a * (th / 2.0 - (2.0 * th).sin() / 4.0) - 4.0 * a * s * s * s / 3.0
            + 4.0 * (th / 8.0 - (4.0 * th).sin() / 32.0))
    };
    anti(PI) - anti(phi)
}

fn usp4_cdf(t: f64) -> f64 {
    if t < -4.0 {
        return 0.0;
    }
    if t >= 4.0 {
        return 1.0;
    }
    let mass = |t: f64| {
        let f = |th: f64| {
            let a = 2.0 * th.cos();
            let c = t - a;
            let inner = if c >= 2.0 {
                usp4_inner(a, 0.0)
            } else if c < -2.0 {
                0.0
            } else {
                usp4_inner(a, (c / 2.0).acos())
            };
            4.0 * th.sin().powi(2) * inner
        };
        let breaks = [((t - 2.0) / 2.0), ((t + 2.0) / 2.0)]
            .into_iter()
            .filter(|c| c.abs() <= 1.0)
            .map(f64::acos)
            .collect::<Vec<_>>();
        integrate_split(f, 0.0, PI, &breaks, 1e-10)
    };
    static TOTAL: OnceLock<f64> = OnceLock::new();
    let total = *TOTAL.get_or_init(|| mass(4.0 + 1e-9));
    (mass(t) / total).clamp(0.0, 1.0)
}

/// Distribution function of the trace on a group or coset.
#[derive(Debug, Clone, Copy)]
pub struct TraceCdf {
    id: CompactGroupId,
}

impl TraceCdf {
    pub fn id(&self) -> CompactGroupId {
        self.id
    }

    pub fn support(&self) -> (f64, f64) {
        let b = self.id.group.trace_bound();
        (-b, b)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let step = if t >= 0.0 { 1.0 } else { 0.0 };
        match (self.id.group, self.id.component) {
            (CompactGroup::U1, _) | (CompactGroup::NU1, Component::Identity) => u1_cdf(t),
            (CompactGroup::NU1, Component::Nontrivial) => step,
            (CompactGroup::NU1, Component::Mixture) => 0.5 * (u1_cdf(t) + step),
            (CompactGroup::SU2, _) => su2_cdf(t),
            (CompactGroup::SU2xSU2, _) => su2xsu2_cdf(t),
            (CompactGroup::USp4, _) => usp4_cdf(t),
        }
    }
}

pub fn coset_trace_cdf(id: CompactGroupId) -> TraceCdf {
    TraceCdf { id }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(g: CompactGroup, c: Component) -> CompactGroupId {
        CompactGroupId::new(g, c).unwrap()
    }

    fn catalan(n: usize) -> f64 {
        binomial(2 * n, n) / (n + 1) as f64
    }

    fn usp4_closed(n: usize) -> f64 {
        catalan(n) * catalan(n + 2) - catalan(n + 1).powi(2)
    }

    #[test]
    fn nontrivial_only_for_nu1() {
        assert!(CompactGroupId::new(CompactGroup::SU2, Component::Nontrivial).is_err());
        assert!(CompactGroupId::new(CompactGroup::NU1, Component::Nontrivial).is_ok());
    }

    #[test]
    fn parse_names() {
        assert_eq!("usp4".parse::<CompactGroup>().unwrap(), CompactGroup::USp4);
        assert_eq!("SU2xSU2".parse::<CompactGroup>().unwrap(), CompactGroup::SU2xSU2);
        assert!("SO3".parse::<CompactGroup>().is_err());
    }

    #[test]
    fn quadrature_closed_forms() {
        let u1 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::U1), 8).unwrap();
        let su2 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::SU2), 8).unwrap();
        let usp4 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::USp4), 8).unwrap();
        for k in (0..=8).step_by(2) {
            assert!((u1.get(k) - binomial(k, k / 2)).abs() < 1e-9);
            assert!((su2.get(k) - catalan(k / 2)).abs() < 1e-9);
            assert!((usp4.get(k) - usp4_closed(k / 2)).abs() < 1e-9, "k={k} {}", usp4.get(k));
        }
        let nu1 = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::NU1), 4).unwrap();
        assert!((nu1.get(2) - 1.0).abs() < 1e-9 && (nu1.get(4) - 3.0).abs() < 1e-9);
        let pair = trace_moments_quadrature(CompactGroupId::whole(CompactGroup::SU2xSU2), 4).unwrap();
        assert!((pair.get(2) - 2.0).abs() < 1e-9 && (pair.get(4) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn odd_moments_vanish() {
        for g in CompactGroup::ALL {
            let m = trace_moments_quadrature(CompactGroupId::whole(g), 9).unwrap();
            for k in (1..=9).step_by(2) {
                assert!(m.get(k).abs() < 1e-9, "{g} k={k}: {}", m.get(k));
            }
        }
    }

    #[test]
    fn k_max_limit() {
        assert!(trace_moments_quadrature(CompactGroupId::whole(CompactGroup::SU2), 33).is_err());
    }

    #[test]
    fn samples_satisfy_group_equations() {
        let one = Complex64::new(1.0, 0.0);
        let j4 = standard_complex_symplectic(2);
        for i in 0..2000 {
            for g in CompactGroup::ALL {
                let m = sample_element(CompactGroupId::whole(g), 5, i);
                let n = m.nrows();
                let unitary = &m.adjoint() * &m - DMatrix::<Complex64>::identity(n, n);
                assert!(unitary.iter().all(|z| z.norm() < 1e-12), "{g}");
                assert!((m.determinant() - one).norm() < 1e-12, "{g}");
            }
            let s = sample_element(CompactGroupId::whole(CompactGroup::USp4), 5, i);
            let defect = s.transpose() * &j4 * &s - &j4;
            assert!(defect.iter().all(|z| z.norm() < 1e-10));
            let t = trace_of(&s);
            let e2 = 0.5 * (t * t - (&s * &s).trace().re);
            assert!(t.abs() <= 4.0 + 1e-12 && (-2.0 - 1e-12..=6.0 + 1e-12).contains(&e2));
        }
    }

    #[test]
    fn nontrivial_coset_has_zero_trace() {
        let nt = id(CompactGroup::NU1, Component::Nontrivial);
        assert!((0..1000).all(|i| trace_of(&sample_element(nt, 1, i)) == 0.0));
        let u1 = CompactGroupId::whole(CompactGroup::U1);
        assert!((0..1000).all(|i| trace_of(&sample_element(u1, 1, i)).abs() <= 2.0));
    }

    #[test]
    fn mc_moments_match_quadrature() {
        for g in CompactGroup::ALL {
            let gid = CompactGroupId::whole(g);
            let mc = trace_moments_mc(gid, 8, 100_000, 11).unwrap();
            let quad = trace_moments_quadrature(gid, 8).unwrap();
            assert_eq!(mc.get(0), 1.0);
            for k in (2..=8).step_by(2) {
                let z = (mc.get(k) - quad.get(k)).abs() / mc.stderr[k];
                assert!(z <= 4.0, "{g} k={k} z={z}");
            }
        }
    }

    #[test]
    fn mc_is_deterministic() {
        let gid = CompactGroupId::whole(CompactGroup::USp4);
        assert_eq!(
            trace_moments_mc(gid, 4, 2000, 3).unwrap(),
            trace_moments_mc(gid, 4, 2000, 3).unwrap()
        );
        assert!(trace_moments_mc(gid, 4, 10, 3).is_err());
    }

    #[test]
    fn cdf_values() {
        let su2 = coset_trace_cdf(CompactGroupId::whole(CompactGroup::SU2));
        assert!((su2.eval(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(coset_trace_cdf(CompactGroupId::whole(CompactGroup::U1)).eval(2.0), 1.0);
        let nt = coset_trace_cdf(id(CompactGroup::NU1, Component::Nontrivial));
        assert_eq!((nt.eval(-1e-9), nt.eval(0.0)), (0.0, 1.0));
        for g in [CompactGroup::SU2xSU2, CompactGroup::USp4] {
            let cdf = coset_trace_cdf(CompactGroupId::whole(g));
            assert!((cdf.eval(0.0) - 0.5).abs() < 1e-6, "{g}");
            let mut prev = 0.0;
            for i in 0..=80 {
                let v = cdf.eval(-4.0 + 0.1 * i as f64);
                assert!(v + 1e-9 >= prev);
                prev = v;
            }
            assert!((prev - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        // F(1) for USp4 via the 2-d density directly.
        let direct = {
            let inner = |t1: f64| {
                let edge = ((1.0 - 2.0 * t1.cos()) / 2.0).clamp(-1.0, 1.0).acos();
                integrate(|t2: f64| usp4_weight(t1, t2), edge, PI, 1e-11)
            };
            integrate_split(inner, 0.0, PI, &[(-0.5f64).acos()], 1e-10) / usp4_normalizer()
        };
        let cdf = coset_trace_cdf(CompactGroupId::whole(CompactGroup::USp4)).eval(1.0);
        assert!((direct - cdf).abs() < 1e-6, "{direct} vs {cdf}");
    }
}
