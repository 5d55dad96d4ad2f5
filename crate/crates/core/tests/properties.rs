use proptest::prelude::*;

use qkdv::diffpoly::{DiffMonomial, DiffPoly};
use qkdv::hierarchy::{commutator_bracket, densities, reduced_densities, Mode};
use qkdv::json;
use qkdv::numbers::rat;
use qkdv::partition::partitions_of;
use qkdv::quantization::quantize;
use qkdv::quasimodular::recognize::required_order;
use qkdv::quasimodular::series::euler_product;
use qkdv::quasimodular::{recognize, GMono, QMPoly};
use qkdv::scalar::{Gauss, ParamKey, Scalar};

fn small_rat() -> impl Strategy<Value = num_rational::BigRational> {
    (-30i64..30, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

/// Differential polynomials with up to four terms, u-degree <= 3, indices <= 4, eps-degree <= 2.
fn diffpoly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((proptest::collection::vec(0u32..5, 0..4), 0u32..3, small_rat()), 1..5).prop_map(|terms| {
        let mut g = DiffPoly::zero();
        for (idx, e, r) in terms {
            g.add_term(DiffMonomial::new(idx), &Scalar::monomial(ParamKey::new(0, e, 0), Gauss::from_rat(r)));
        }
        g
    })
}

/// Quasimodular polynomials of total weight <= 6 (generators plus powers of c), rational coefficients.
fn qmpoly() -> impl Strategy<Value = QMPoly> {
    proptest::collection::vec((0u32..4, 0u32..2, 0u32..2, 0u32..4, small_rat()), 1..5).prop_map(|terms| {
        let mut f = QMPoly::zero();
        for (a, b, c, cp, r) in terms {
            let m = GMono::new(a, b, c);
            if m.weight() + cp as i64 <= 6 {
                f.add_term(m, &Scalar::monomial(ParamKey::new(cp, 0, 0), Gauss::from_rat(r)));
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recognize_inverts_expansion(f in qmpoly()) {
        let order = required_order(6);
        prop_assert_eq!(recognize(&f.to_series(order), 6).unwrap(), f);
    }

    #[test]
    fn quantization_is_linear(f in diffpoly(), g in diffpoly(), n in 0u32..5) {
        let sum = quantize(&f.add(&g)).matrix_on(n);
        let parts = quantize(&f).matrix_on(n).add(&quantize(&g).matrix_on(n));
        prop_assert_eq!(&*sum, &parts);
    }

    #[test]
    fn total_derivatives_quantize_to_zero(f in diffpoly(), n in 0u32..5) {
        prop_assert!(quantize(&f.dx()).matrix_on(n).is_zero());
    }

    #[test]
    fn operators_are_self_adjoint(f in diffpoly(), n in 0u32..5) {
        prop_assert!(quantize(&f).matrix_on(n).is_z_symmetric());
    }

    #[test]
    fn parity_controls_reality(f in diffpoly(), n in 0u32..5) {
        let (even, odd) = f.parity_split();
        for ((_, _), s) in quantize(&even).matrix_on(n).entries() {
            prop_assert!(s.is_real());
        }
        for ((_, _), s) in quantize(&odd).matrix_on(n).entries() {
            prop_assert!(s.is_imaginary());
        }
    }

    #[test]
    fn b_operator_is_invertible(f in diffpoly()) {
        prop_assert_eq!(f.b_operator(false).b_operator(true), f);
    }

    #[test]
    fn dx_invert_recovers_nonconstant_part(f in diffpoly()) {
        let expected = f.sub(&DiffPoly::constant(f.constant_term()));
        prop_assert_eq!(f.dx().dx_invert().unwrap(), expected);
    }

    #[test]
    fn commutator_bracket_quantizes_to_i_times_commutator(f in diffpoly(), g in diffpoly(), n in 0u32..5) {
        let bracket = quantize(&commutator_bracket(&f, &g)).matrix_on(n);
        let i = Scalar::i();
        let direct = quantize(&f).matrix_on(n).commutator(&quantize(&g).matrix_on(n)).map_scalars(|s| s * &i);
        prop_assert_eq!(&*bracket, &direct);
    }

    #[test]
    fn diffpoly_json_round_trip(f in diffpoly()) {
        let v = json::diffpoly_to_json(&f);
        prop_assert_eq!(json::diffpoly_from_json(&v).unwrap(), f);
    }
}

#[test]
fn partition_counts_invert_euler_product() {
    let euler = euler_product(20);
    let counts: Vec<num_bigint::BigInt> = (0..=20u32).map(|n| partitions_of(n).len().into()).collect();
    for n in 0..=20usize {
        let conv: num_bigint::BigInt = (0..=n).map(|j| &counts[j] * &euler[n - j]).sum();
        assert_eq!(conv, num_bigint::BigInt::from(u8::from(n == 0)), "n = {n}");
    }
}

#[test]
fn reduced_densities_are_homogeneous_and_constant_free() {
    for mode in [Mode::Kdv, Mode::Ilw { genus: 2 }] {
        let t = reduced_densities(mode, 5).unwrap();
        for (k, g) in t.iter() {
            assert!(g.is_homogeneous(*k as i64 + 2), "{mode} g~_{k}");
            if *k >= -1 {
                assert!(g.constant_term().is_zero(), "{mode} g~_{k}");
            }
        }
    }
}

#[test]
fn densities_are_even() {
    for mode in [Mode::Kdv, Mode::Ilw { genus: 3 }] {
        for (k, g) in densities(mode, 5).unwrap().iter() {
            assert!(g.is_even(), "{mode} g_{k}");
            assert!(g.is_real(), "{mode} g_{k}");
        }
    }
}
