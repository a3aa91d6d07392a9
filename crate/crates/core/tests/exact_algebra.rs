//! Invariants of the exact rational layer: kernels, closures, similitudes.

use num_traits::One;
use proptest::prelude::*;
use stlab_core::linalg::{
    algebra_closure, common_kernel, is_multiplicatively_closed, kernel, map_matrix, ratio, Rational, RationalMatrix,
};
use stlab_core::pairing::{is_isometry, similitude_factor, PolarizedSpace};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop::sample::select(vec![-7i64, -3, -2, -1, 1, 2, 3, 5]), 1i64..=5).prop_map(|(n, d)| ratio(n, d))
}

/// Sparse-ish random matrices so that rank deficiency actually occurs.
fn matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => Just(ratio(0, 1)), 2 => rational()], r * c)
            .prop_map(move |data| RationalMatrix::from_flat(r, c, data))
    })
}

/// `x ↦ x + a·ψ(v, x)·v`, a symplectic transvection of `(Q^{2g}, Ψ)`.
fn transvection(space: &PolarizedSpace, v: &[Rational], a: &Rational) -> RationalMatrix {
    let n = space.dim();
    let col = RationalMatrix::from_flat(n, 1, v.to_vec());
    let row = &col.transpose() * space.pairing();
    &RationalMatrix::identity(n) + &(&col * &row).scale(a)
}

/// `diag(I_g, λ I_g)` scales the standard form by `λ`.
fn dilation(g: usize, lambda: &Rational) -> RationalMatrix {
    let entries: Vec<Rational> = (0..2 * g).map(|i| if i < g { Rational::one() } else { lambda.clone() }).collect();
    RationalMatrix::diagonal(&entries)
}

fn similitude(g: usize) -> impl Strategy<Value = (RationalMatrix, Rational)> {
    let step = (prop::collection::vec(rational(), 2 * g), rational(), nonzero_rational());
    prop::collection::vec(step, 1..=3).prop_map(move |steps| {
        let space = PolarizedSpace::standard_symplectic(g);
        let mut m = RationalMatrix::identity(2 * g);
        let mut chi = Rational::one();
        for (v, a, lambda) in steps {
            m = &(&m * &transvection(&space, &v, &a)) * &dilation(g, &lambda);
            chi *= lambda;
        }
        (m, chi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_dimension_plus_rank_is_width(m in matrix()) {
        let k = kernel(&m);
        prop_assert_eq!(k.dim() + m.rank(), m.cols());
        prop_assert!(k.is_independent());
        for v in k.vectors() {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == ratio(0, 1)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scalar_factor_is_square(alpha in nonzero_rational(), g in 1usize..=3) {
        let space = PolarizedSpace::standard_symplectic(g);
        let m = RationalMatrix::identity(2 * g).scale(&alpha);
        prop_assert_eq!(similitude_factor(&m, &space), Some(&alpha * &alpha));
    }

    #[test]
    fn factor_is_multiplicative((a, chi_a) in similitude(2), (b, chi_b) in similitude(2)) {
        let space = PolarizedSpace::standard_symplectic(2);
        prop_assert_eq!(similitude_factor(&a, &space), Some(chi_a.clone()));
        prop_assert_eq!(similitude_factor(&(&a * &b), &space), Some(chi_a * chi_b));
    }

    #[test]
    fn isometries_are_the_kernel((m, chi) in similitude(2)) {
        let space = PolarizedSpace::standard_symplectic(2);
        prop_assert_eq!(is_isometry(&m, &space), chi == Rational::one());
    }

    #[test]
    fn closure_is_an_algebra(gens in prop::collection::vec(
        prop::collection::vec(prop_oneof![2 => Just(ratio(0, 1)), 1 => rational()], 9), 1..=2)
    ) {
        let gens: Vec<RationalMatrix> = gens.into_iter().map(|d| RationalMatrix::from_flat(3, 3, d)).collect();
        let basis = algebra_closure(&gens, 3);
        prop_assert!(basis[0].is_identity());
        prop_assert!(is_multiplicatively_closed(&basis));
        prop_assert!(basis.len() <= 9);
    }

    #[test]
    fn commutant_of_random_matrix_contains_its_powers(data in prop::collection::vec(rational(), 9)) {
        let a = RationalMatrix::from_flat(3, 3, data);
        let commutator = |x: &RationalMatrix| &(&a * x) - &(x * &a);
        let basis = common_kernel(3, &[Box::new(commutator)]);
        let a2 = &a * &a;
        for m in [RationalMatrix::identity(3), a.clone(), a2] {
            prop_assert!(basis.contains(m.as_flat()));
        }
        let as_matrix = map_matrix(3, &commutator);
        prop_assert_eq!(basis.dim() + as_matrix.rank(), 9);
    }
}
