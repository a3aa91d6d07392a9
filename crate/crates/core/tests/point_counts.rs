//! Character-sum point counts against brute-force enumeration of solutions.

use proptest::prelude::*;
use stlab_core::arith::primes_up_to;
use stlab_core::frobenius::{
    count_points_fp2, count_points_genus1, count_points_genus2, scan_primes, satisfies_weil, CurveSpec,
};

/// `F_{p²}` built from scratch as pairs over `F_p` modulo `x² - r`, with `r`
/// found by checking which residues have no square root.
struct Field2 {
    p: u64,
    r: u64,
}

impl Field2 {
    fn new(p: u64) -> Self {
        let squares: Vec<u64> = (0..p).map(|y| y * y % p).collect();
        let r = (1..p).find(|a| !squares.contains(a)).unwrap();
        Self { p, r }
    }

    fn index(&self, (a, b): (u64, u64)) -> usize {
        (a * self.p + b) as usize
    }

    fn mul(&self, (a, b): (u64, u64), (c, d): (u64, u64)) -> (u64, u64) {
        let p = self.p;
        ((a * c + b * d % p * self.r) % p, (a * d + b * c) % p)
    }

    fn eval(&self, f: &[i64], z: (u64, u64)) -> (u64, u64) {
        let p = self.p as i64;
        let mut acc = (0, 0);
        for c in f.iter().rev() {
            acc = self.mul(acc, z);
            acc.0 = (acc.0 + c.rem_euclid(p) as u64) % self.p;
        }
        acc
    }
}

/// Affine solutions of `y² = f(x)` plus the points at infinity of the smooth
/// model, which are the square roots of the leading coefficient when
/// `deg f` is even.
fn naive_fp(f: &[i64], p: u64) -> u64 {
    let pi = p as i64;
    let eval = |x: i64| f.iter().rev().fold(0i64, |acc, c| (acc * x + c).rem_euclid(pi));
    let mut affine = 0;
    for x in 0..pi {
        let v = eval(x);
        affine += (0..pi).filter(|y| y * y % pi == v).count() as u64;
    }
    let degree = f.len() - 1;
    let infinity = if degree % 2 == 1 {
        1
    } else {
        let lc = f[degree].rem_euclid(pi);
        (0..pi).filter(|y| y * y % pi == lc).count() as u64
    };
    affine + infinity
}

fn naive_fp2(f: &[i64], p: u64) -> u64 {
    let k = Field2::new(p);
    let mut roots = vec![0u64; (p * p) as usize];
    for a in 0..p {
        for b in 0..p {
            roots[k.index(k.mul((a, b), (a, b)))] += 1;
        }
    }
    let mut affine = 0;
    for a in 0..p {
        for b in 0..p {
            affine += roots[k.index(k.eval(f, (a, b)))];
        }
    }
    let degree = f.len() - 1;
    let infinity = if degree % 2 == 1 {
        1
    } else {
        roots[k.index((f[degree].rem_euclid(p as i64) as u64, 0))]
    };
    affine + infinity
}

const GENUS1: [&[i64]; 4] = [&[0, 1, 0, 1], &[1, 1, 0, 1], &[-2, 0, 0, 1], &[3, -7, 5, 2]];
const GENUS2: [&[i64]; 4] = [&[1, 1, 0, 0, 0, 1], &[1, 0, 0, 0, 0, 0, 1], &[2, -1, 3, 0, 1, 0, 5], &[0, 1, 0, 0, 0, 1]];

#[test]
fn genus1_character_sums_equal_enumeration_below_100() {
    for f in GENUS1 {
        let curve = CurveSpec::new(1, f).unwrap();
        for p in primes_up_to(100).into_iter().filter(|&p| curve.is_good_prime(p)) {
            assert_eq!(count_points_genus1(&curve, p).unwrap(), naive_fp(f, p), "f={f:?} p={p}");
        }
    }
}

#[test]
fn genus2_character_sums_equal_enumeration_below_100() {
    for f in GENUS2 {
        let curve = CurveSpec::new(2, f).unwrap();
        for p in primes_up_to(100).into_iter().filter(|&p| curve.is_good_prime(p)) {
            let (n1, n2) = count_points_genus2(&curve, p).unwrap();
            assert_eq!(n1, naive_fp(f, p), "N1 f={f:?} p={p}");
            assert_eq!(n2, naive_fp2(f, p), "N2 f={f:?} p={p}");
        }
    }
}

#[test]
fn genus1_quadratic_extension_matches_eigenvalue_pair() {
    let curve = CurveSpec::new(1, &[1, 1, 0, 1]).unwrap();
    let primes: Vec<u64> = primes_up_to(400).into_iter().filter(|&p| curve.is_good_prime(p)).collect();
    // 20 primes spread through the range
    for p in primes.iter().step_by(primes.len() / 20).take(20) {
        let p = *p;
        let s1 = (p + 1) as i64 - count_points_genus1(&curve, p).unwrap() as i64;
        let s2 = (p * p + 1) as i64 - count_points_fp2(&curve, p).unwrap() as i64;
        assert_eq!(s2, s1 * s1 - 2 * p as i64, "p={p}");
    }
}

#[test]
fn weil_bounds_hold_on_every_record() {
    for f in GENUS1 {
        let curve = CurveSpec::new(1, f).unwrap();
        for r in scan_primes(&curve, 5000, None, 0).unwrap() {
            assert!(r.weil_ok && satisfies_weil(&r, 1) && r.t.abs() <= 2.0, "{r:?}");
        }
    }
    for f in GENUS2 {
        let curve = CurveSpec::new(2, f).unwrap();
        for r in scan_primes(&curve, 300, None, 0).unwrap() {
            let u = r.u.unwrap();
            assert!(r.weil_ok && satisfies_weil(&r, 2), "{r:?}");
            assert!(r.t.abs() <= 4.0 && (-2.0..=6.0).contains(&u), "{r:?}");
        }
    }
}

#[test]
fn records_skip_bad_primes_only() {
    let curve = CurveSpec::new(1, &[1, 1, 0, 1]).unwrap();
    let ps: Vec<u64> = scan_primes(&curve, 100, None, 1).unwrap().iter().map(|r| r.p).collect();
    let expected: Vec<u64> = primes_up_to(100).into_iter().filter(|&p| p != 2 && p != 31).collect();
    assert_eq!(ps, expected);
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(primes_up_to(60).into_iter().skip(1).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_cubics_count_like_enumeration(
        coeffs in prop::collection::vec(-20i64..20, 3),
        lc in prop::sample::select(vec![-3i64, -1, 1, 2, 5]),
        p in small_prime(),
    ) {
        let mut f = coeffs.clone();
        f.push(lc);
        if let Ok(curve) = CurveSpec::new(1, &f) {
            if curve.is_good_prime(p) {
                prop_assert_eq!(count_points_genus1(&curve, p).unwrap(), naive_fp(&f, p));
            }
        }
    }

    #[test]
    fn random_sextics_count_like_enumeration(
        coeffs in prop::collection::vec(-9i64..9, 5..=6),
        lc in prop::sample::select(vec![-2i64, 1, 3]),
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17]),
    ) {
        let mut f = coeffs.clone();
        f.push(lc);
        if let Ok(curve) = CurveSpec::new(2, &f) {
            if curve.is_good_prime(p) {
                let (n1, n2) = count_points_genus2(&curve, p).unwrap();
                prop_assert_eq!(n1, naive_fp(&f, p));
                prop_assert_eq!(n2, naive_fp2(&f, p));
            }
        }
    }
}
