//! Point counts of `y² = f(x)` over `F_p` and `F_{p²}`, and the normalized
//! Frobenius data derived from them.
//!
//! Conventions: `s1 = p + 1 - N1` is the sum of the Frobenius eigenvalues,
//! `s2 = p² + 1 - N2` the sum of their squares, and `t = s1/√p`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, primes_up_to};
use crate::endo_galois::{frobenius_class, GaloisError, GaloisTwistGroup};
use crate::linalg::{rat, RationalMatrix};

/// Largest `p_max` accepted for genus 2 unless the caller raises it; the
/// `F_{p²}` count is quadratic in `p`.
pub const GENUS2_DEFAULT_P_LIMIT: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("genus must be 1 or 2, got {0}")]
    UnsupportedGenus(u8),
    #[error("genus {genus} needs deg f in {expected}, got degree {degree}")]
    WrongDegree { genus: u8, degree: usize, expected: &'static str },
    #[error("singular model: disc(f) = 0")]
    SingularModel,
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("p = {0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("data corruption at p = {p}: s1² - s2 = {diff} is odd")]
    OddSecondCoefficient { p: u64, diff: i64 },
    #[error("p_max must be at least 3, got {0}")]
    PMaxTooSmall(u64),
    #[error("genus-2 p_max {p_max} exceeds the limit {limit}")]
    PMaxTooLarge { p_max: u64, limit: u64 },
    #[error("invalid parallelism: {0}")]
    ThreadPool(String),
}

/// Discriminant of an integer polynomial (coefficients ascending), via the
/// Sylvester resultant `disc = (-1)^{d(d-1)/2} Res(f, f') / lc`.
pub fn discriminant(coeffs: &[i64]) -> BigInt {
    let f: Vec<i64> = trim(coeffs);
    let d = f.len().saturating_sub(1);
    if d == 0 {
        return BigInt::zero();
    }
    if d == 1 {
        return BigInt::from(1);
    }
    let df: Vec<i64> = (1..=d).map(|i| f[i] * i as i64).collect();
    let size = 2 * d - 1;
    let mut sylvester = RationalMatrix::zeros(size, size);
    // rows hold descending coefficients shifted right
    for r in 0..d - 1 {
        for (j, c) in f.iter().rev().enumerate() {
            sylvester.set(r, r + j, rat(*c));
        }
    }
    for r in 0..d {
        for (j, c) in df.iter().rev().enumerate() {
            sylvester.set(d - 1 + r, r + j, rat(*c));
        }
    }
    let res = sylvester.determinant();
    let sign = if (d * (d - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let disc = res * rat(sign) / rat(f[d]);
    assert!(disc.is_integer(), "discriminant of an integer polynomial is integral");
    disc.to_integer()
}

fn trim(coeffs: &[i64]) -> Vec<i64> {
    let len = coeffs.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
    coeffs[..len].to_vec()
}

/// A hyperelliptic model `y² = f(x)` of genus 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSpec {
    genus: u8,
    coeffs: Vec<i64>,
    #[serde(skip)]
    disc: BigInt,
}

impl CurveSpec {
    pub fn new(genus: u8, coeffs: &[i64]) -> Result<Self, FrobeniusError> {
        let coeffs = trim(coeffs);
        let degree = coeffs.len().saturating_sub(1);
        let expected = match genus {
            1 => "{3}",
            2 => "{5, 6}",
            g => return Err(FrobeniusError::UnsupportedGenus(g)),
        };
        let degree_ok = match genus {
            1 => degree == 3,
            _ => degree == 5 || degree == 6,
        };
        if !degree_ok {
            return Err(FrobeniusError::WrongDegree { genus, degree, expected });
        }
        let disc = discriminant(&coeffs);
        if disc.is_zero() {
            return Err(FrobeniusError::SingularModel);
        }
        Ok(Self { genus, coeffs, disc })
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading_coefficient(&self) -> i64 {
        self.coeffs[self.degree()]
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    /// Odd prime not dividing the discriminant or the leading coefficient.
    pub fn is_good_prime(&self, p: u64) -> bool {
        p % 2 == 1
            && is_prime(p)
            && self.leading_coefficient().rem_euclid(p as i64) != 0
            && !(&self.disc % BigInt::from(p)).is_zero()
    }

    fn check_prime(&self, p: u64) -> Result<(), FrobeniusError> {
        if p % 2 == 0 || !is_prime(p) {
            return Err(FrobeniusError::NotAnOddPrime(p));
        }
        if !self.is_good_prime(p) {
            return Err(FrobeniusError::BadReduction(p));
        }
        Ok(())
    }

    fn reduced(&self, p: u64) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.rem_euclid(p as i64) as u64).collect()
    }
}

/// `chi[x]` is the quadratic character of `x` modulo `p`, `chi[0] = 0`.
pub fn quadratic_character_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    let mut sq = 0u64;
    for x in 1..=(p - 1) / 2 {
        // (x)² = (x-1)² + 2x - 1
        sq = (sq + 2 * x - 1) % p;
        chi[sq as usize] = 1;
    }
    chi
}

fn horner_mod(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

/// `f(0), f(1), ..., f(p-1)` mod `p` by forward differences.
fn values_mod_p(f: &[u64], p: u64) -> Vec<u64> {
    let d = f.len() - 1;
    let mut diff: Vec<u64> = (0..=d as u64).map(|x| horner_mod(f, x % p, p)).collect();
    for level in 1..=d {
        for i in (level..=d).rev() {
            diff[i] = (diff[i] + p - diff[i - 1]) % p;
        }
    }
    let mut out = Vec::with_capacity(p as usize);
    for _ in 0..p {
        out.push(diff[0]);
        for j in 0..d {
            let s = diff[j] + diff[j + 1];
            diff[j] = if s >= p { s - p } else { s };
        }
    }
    out
}

fn affine_character_sum(f: &[u64], p: u64, chi: &[i8]) -> i64 {
    values_mod_p(f, p).into_iter().map(|v| chi[v as usize] as i64).sum()
}

fn points_at_infinity_fp(f: &[u64], p: u64, chi: &[i8]) -> u64 {
    let degree = f.len() - 1;
    if degree % 2 == 1 {
        1
    } else {
        (1 + chi[(f[degree] % p) as usize] as i64) as u64
    }
}

/// `#E(F_p)` for a genus-1 model, including the point at infinity.
pub fn count_points_genus1(curve: &CurveSpec, p: u64) -> Result<u64, FrobeniusError> {
    if curve.genus != 1 {
        return Err(FrobeniusError::UnsupportedGenus(curve.genus));
    }
    curve.check_prime(p)?;
    Ok(count_fp(curve, p))
}

fn count_fp(curve: &CurveSpec, p: u64) -> u64 {
    let chi = quadratic_character_table(p);
    let f = curve.reduced(p);
    let affine = p as i64 + affine_character_sum(&f, p, &chi);
    affine as u64 + points_at_infinity_fp(&f, p, &chi)
}

/// `F_{p²} = F_p[u]/(u² - ν)` with `ν` the least quadratic non-residue.
#[derive(Debug, Clone, Copy)]
pub struct Fp2 {
    p: u64,
    nu: u64,
}

impl Fp2 {
    pub fn new(p: u64, chi: &[i8]) -> Self {
        let nu = (2..p).find(|&a| chi[a as usize] == -1).expect("odd prime has a non-residue");
        Self { p, nu }
    }

    pub fn non_residue(&self) -> u64 {
        self.nu
    }

    pub fn mul(&self, (a, b): (u64, u64), (c, d): (u64, u64)) -> (u64, u64) {
        let p = self.p;
        ((a * c + self.nu * (b * d % p)) % p, (a * d + b * c) % p)
    }

    pub fn add(&self, (a, b): (u64, u64), (c, d): (u64, u64)) -> (u64, u64) {
        ((a + c) % self.p, (b + d) % self.p)
    }

    /// `N(a + bu) = a² - ν b²`.
    pub fn norm(&self, (a, b): (u64, u64)) -> u64 {
        let p = self.p;
        (a * a % p + p - self.nu * (b * b % p) % p) % p
    }

    pub fn pow(&self, mut z: (u64, u64), mut e: u128) -> (u64, u64) {
        let mut acc = (1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, z);
            }
            z = self.mul(z, z);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, f: &[u64], z: (u64, u64)) -> (u64, u64) {
        f.iter().rev().fold((0, 0), |acc, &c| self.add(self.mul(acc, z), (c, 0)))
    }
}

/// Point count over `F_{p²}`; the character of `F_{p²}` is the character of
/// `F_p` composed with the norm, which is surjective onto `F_p^*`.
fn count_fp2(curve: &CurveSpec, p: u64, chi: &[i8]) -> u64 {
    let field = Fp2::new(p, chi);
    let f = curve.reduced(p);
    let q = p * p;
    let mut sum = 0i64;
    for a in 0..p {
        for b in 0..p {
            let v = field.eval(&f, (a, b));
            sum += chi[field.norm(v) as usize] as i64;
        }
    }
    // every element of F_p is a square in F_{p²}, so an even-degree model
    // has two points at infinity
    let infinity = if curve.degree() % 2 == 1 { 1 } else { 2 };
    (q as i64 + sum) as u64 + infinity
}

/// `(N1, N2)` for a genus-2 model at a good prime.
pub fn count_points_genus2(curve: &CurveSpec, p: u64) -> Result<(u64, u64), FrobeniusError> {
    if curve.genus != 2 {
        return Err(FrobeniusError::UnsupportedGenus(curve.genus));
    }
    curve.check_prime(p)?;
    let chi = quadratic_character_table(p);
    Ok((count_fp(curve, p), count_fp2(curve, p, &chi)))
}

/// Count over `F_{p²}` for any supported model (used as a consistency check
/// in genus 1).
pub fn count_points_fp2(curve: &CurveSpec, p: u64) -> Result<u64, FrobeniusError> {
    curve.check_prime(p)?;
    Ok(count_fp2(curve, p, &quadratic_character_table(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LPolyData {
    pub s1: i64,
    pub s2: i64,
    pub e2: i64,
    pub t: f64,
    pub u: f64,
    pub weil_ok: bool,
}

/// Newton identities on the Frobenius eigenvalues: `e2 = (s1² - s2)/2`.
pub fn l_poly_genus2(n1: u64, n2: u64, p: u64) -> Result<LPolyData, FrobeniusError> {
    let (pi, n1, n2) = (p as i64, n1 as i64, n2 as i64);
    let s1 = pi + 1 - n1;
    let s2 = pi * pi + 1 - n2;
    let diff = s1 * s1 - s2;
    if diff % 2 != 0 {
        return Err(FrobeniusError::OddSecondCoefficient { p, diff });
    }
    let e2 = diff / 2;
    let weil_ok = s1 * s1 <= 16 * pi && (-2 * pi..=6 * pi).contains(&e2);
    Ok(LPolyData {
        s1,
        s2,
        e2,
        t: normalized_trace(s1, p),
        u: e2 as f64 / p as f64,
        weil_ok,
    })
}

/// `t = s1 / √p`.
pub fn normalized_trace(s1: i64, p: u64) -> f64 {
    s1 as f64 / (p as f64).sqrt()
}

/// Frobenius data at one good prime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub p: u64,
    pub class_label: Option<String>,
    pub n1: u64,
    pub n2: Option<u64>,
    pub s1: i64,
    pub s2: Option<i64>,
    pub e2: Option<i64>,
    pub t: f64,
    pub u: Option<f64>,
    /// False when the record breaks the Weil bounds; such records are kept
    /// and flagged, never clamped.
    pub weil_ok: bool,
}

impl TraceRecord {
    /// Fields in CSV column order `p,class,N1,N2,s1,e2,t,u`.
    pub fn csv_fields(&self) -> [String; 8] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.p.to_string(),
            self.class_label.clone().unwrap_or_default(),
            self.n1.to_string(),
            opt(self.n2.map(|v| v.to_string())),
            self.s1.to_string(),
            opt(self.e2.map(|v| v.to_string())),
            format_significant(self.t),
            opt(self.u.map(format_significant)),
        ]
    }
}

pub const CSV_COLUMNS: [&str; 8] = ["p", "class", "N1", "N2", "s1", "e2", "t", "u"];

/// `%.12g`-style rendering: 12 significant digits, ties to even, trailing
/// zeros removed.
pub fn format_significant(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };
    if exp < -4 || exp >= DIGITS {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{frac}e{esign}{:02}", exp.abs());
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{}{}", digits, "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

fn record_at(curve: &CurveSpec, p: u64, class_label: Option<String>) -> Result<TraceRecord, FrobeniusError> {
    let chi = quadratic_character_table(p);
    let n1 = count_fp(curve, p);
    if curve.genus == 1 {
        let s1 = p as i64 + 1 - n1 as i64;
        return Ok(TraceRecord {
            p,
            class_label,
            n1,
            n2: None,
            s1,
            s2: None,
            e2: None,
            t: normalized_trace(s1, p),
            u: None,
            weil_ok: (s1 * s1) as u64 <= 4 * p,
        });
    }
    let n2 = count_fp2(curve, p, &chi);
    let l = l_poly_genus2(n1, n2, p)?;
    Ok(TraceRecord {
        p,
        class_label,
        n1,
        n2: Some(n2),
        s1: l.s1,
        s2: Some(l.s2),
        e2: Some(l.e2),
        t: l.t,
        u: Some(l.u),
        weil_ok: l.weil_ok,
    })
}

/// Records for every good odd prime `≤ p_max`, ascending, with the default
/// genus-2 size limit.
pub fn scan_primes(
    curve: &CurveSpec,
    p_max: u64,
    group: Option<&GaloisTwistGroup>,
    parallelism: usize,
) -> Result<Vec<TraceRecord>, FrobeniusError> {
    scan_primes_with_limit(curve, p_max, group, parallelism, GENUS2_DEFAULT_P_LIMIT)
}

/// As [`scan_primes`] with an explicit genus-2 `p_max` ceiling.
/// `parallelism = 0` uses every available core.
pub fn scan_primes_with_limit(
    curve: &CurveSpec,
    p_max: u64,
    group: Option<&GaloisTwistGroup>,
    parallelism: usize,
    genus2_limit: u64,
) -> Result<Vec<TraceRecord>, FrobeniusError> {
    if p_max < 3 {
        return Err(FrobeniusError::PMaxTooSmall(p_max));
    }
    if curve.genus == 2 && p_max > genus2_limit {
        return Err(FrobeniusError::PMaxTooLarge { p_max, limit: genus2_limit });
    }
    let labeled = group.filter(|g| g.descriptor().is_some());
    let mut work = Vec::new();
    for p in primes_up_to(p_max) {
        if !curve.is_good_prime(p) {
            continue;
        }
        let label = match labeled {
            None => None,
            Some(g) => match frobenius_class(p, g) {
                Ok(class) => Some(g.label(class).to_string()),
                Err(GaloisError::RamifiedPrime(_)) => continue,
                Err(e) => unreachable!("labelable group failed: {e}"),
            },
        };
        work.push((p, label));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| FrobeniusError::ThreadPool(e.to_string()))?;
    // the costliest primes come last; reverse so they start first
    let mut records: Vec<TraceRecord> = pool.install(|| {
        work.into_par_iter()
            .rev()
            .map(|(p, label)| record_at(curve, p, label))
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.reverse();
    Ok(records)
}

/// `|t| ≤ 2·genus` and, in genus 2, `u ∈ [-2, 6]`, checked in exact integers.
pub fn satisfies_weil(record: &TraceRecord, genus: u8) -> bool {
    let p = record.p as i64;
    let g = genus as i64;
    let trace_ok = record.s1.abs().to_u64().is_some_and(|a| a * a <= (4 * g * g * p) as u64);
    let e2_ok = record.e2.is_none_or(|e2| (-2 * p..=6 * p).contains(&e2));
    trace_ok && e2_ok
}
