use num_complex::Complex64;
use proptest::prelude::*;

use bqdim::qoperators::*;

const Q: f64 = 0.5;
const U: SpaceKind = SpaceKind::Unilateral;
const B: SpaceKind = SpaceKind::Bilateral;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn coefficient_values() {
    assert!((Coeff::qpow(2, 2).evaluate(0, Q).unwrap().re - 0.25).abs() < 1e-15);
    assert!((Coeff::sqrt_minus(4, 4).evaluate(0, Q).unwrap().re - 0.968_245_836_551_854).abs() < 1e-12);
    assert_eq!(Coeff::one().evaluate(17, Q).unwrap(), c(1.0));
    assert!((q_number(2, Q) - 2.5).abs() < 1e-15);
    assert!(matches!(Coeff::sqrt_minus(1, -2).evaluate(0, Q), Err(bqdim::Error::Domain { .. })));
}

#[test]
fn shifts_on_vacuum() {
    let sig = vec![U];
    let vac = SparseVector::vacuum(sig.clone());
    let id = TensorOperator::identity(sig.clone());
    assert_eq!(id.apply(&vac, Q).unwrap(), vac);
    let alpha = TensorOperator::single(WeightedShiftSum::term(U, 1, Coeff::sqrt_minus(4, 0)));
    assert!(alpha.apply(&vac, Q).unwrap().is_zero());
    let out = alpha.adjoint().apply(&vac, Q).unwrap();
    let (mass, amp) = out.mass_on(&[1]);
    assert!((mass - 1.0).abs() < 1e-15);
    assert!((amp.re - (1.0 - Q.powi(4)).sqrt()).abs() < 1e-15);
}

#[test]
fn window_equalities() {
    let qn = WeightedShiftSum::term(U, 0, Coeff::qpow(1, 0));
    let s = WeightedShiftSum::shift(U);
    let lhs = TensorOperator::single(qn.compose(&s).unwrap());
    let rhs = TensorOperator::single(s.compose(&WeightedShiftSum::term(U, 0, Coeff::qpow(1, -1))).unwrap());
    assert!(equal_on_window(&lhs, &lhs, 5, Q, 1e-12).unwrap());
    assert!(equal_on_window(&lhs, &rhs, 5, Q, 1e-12).unwrap());
    let wrong = TensorOperator::single(s.compose(&WeightedShiftSum::term(U, 0, Coeff::qpow(1, 1))).unwrap());
    assert!(!equal_on_window(&lhs, &wrong, 5, Q, 1e-12).unwrap());
    let sa = TensorOperator::single(WeightedShiftSum::shift_adjoint(U));
    assert!(!equal_on_window(&TensorOperator::single(s), &sa, 3, Q, 1e-12).unwrap());
}

#[test]
fn unilateral_shift_is_an_isometry_only_one_way() {
    let s = WeightedShiftSum::shift(U);
    let ss = WeightedShiftSum::shift_adjoint(U);
    let a = TensorOperator::single(s.compose(&ss).unwrap());
    let b = TensorOperator::single(ss.compose(&s).unwrap());
    let id = TensorOperator::identity(vec![U]);
    assert!(equal_on_window(&a, &id, 6, Q, 1e-14).unwrap());
    assert!(!equal_on_window(&b, &id, 6, Q, 1e-14).unwrap());
    let bs = TensorOperator::single(WeightedShiftSum::shift(B).compose(&WeightedShiftSum::shift_adjoint(B)).unwrap());
    let bid = TensorOperator::identity(vec![B]);
    assert!(equal_on_window(&bs, &bid, 6, Q, 1e-14).unwrap());
}

#[test]
fn q_combinatorics() {
    assert!((q_factorial(3, Q) - q_number(1, Q) * q_number(2, Q) * q_number(3, Q)).abs() < 1e-12);
    let b = q_binomial(4, 2, Q).unwrap();
    let direct = q_factorial(4, Q) / (q_factorial(2, Q) * q_factorial(2, Q));
    assert!((b - direct).abs() < 1e-12);
}

fn coeff_strategy() -> impl Strategy<Value = Coeff> {
    prop_oneof![
        Just(Coeff::one()),
        (0i32..3, 0i32..3).prop_map(|(a, b)| Coeff::qpow(a, b)),
        (1i32..5, 0i32..5).prop_map(|(a, b)| Coeff::sqrt_minus(a, b + a)),
        (1i32..3, 0i32..3).prop_map(|(a, b)| Coeff::sqrt_plus(a, b)),
        (-3.0f64..3.0).prop_map(Coeff::real),
    ]
}

// Radicals are only defined on nonnegative indices, so bilateral factors
// carry plain powers.
fn bilateral_coeff() -> impl Strategy<Value = Coeff> {
    prop_oneof![
        Just(Coeff::one()),
        (-1i32..2, 0i32..3).prop_map(|(a, b)| Coeff::qpow(a, b)),
        (-3.0f64..3.0).prop_map(Coeff::real),
    ]
}

fn sum_strategy(kind: SpaceKind) -> BoxedStrategy<WeightedShiftSum> {
    let coeff = match kind {
        SpaceKind::Unilateral => coeff_strategy().boxed(),
        SpaceKind::Bilateral => bilateral_coeff().boxed(),
    };
    prop::collection::vec((-2i32..=2, coeff), 1..4)
        .prop_map(move |ts| WeightedShiftSum::from_terms(kind, ts))
        .boxed()
}

fn op_strategy() -> impl Strategy<Value = TensorOperator> {
    prop::collection::vec((sum_strategy(U), sum_strategy(B), -2.0f64..2.0), 1..3).prop_map(|v| {
        v.into_iter()
            .map(|(a, b, s)| TensorOperator::elementary(c(s), vec![a, b]))
            .reduce(|x, y| x.add(&y).unwrap())
            .unwrap()
    })
}

fn basis(b: &[i32]) -> SparseVector {
    SparseVector::basis(vec![U, B], b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_associative(a in op_strategy(), b in op_strategy(), d in op_strategy()) {
        let left = a.compose(&b).unwrap().compose(&d).unwrap();
        let right = a.compose(&b.compose(&d).unwrap()).unwrap();
        let (dev, mag) = window_deviation(&left.compile(), &right.compile(), 4, Q).unwrap();
        prop_assert!(dev <= 1e-12 * (1.0 + mag));
    }

    #[test]
    fn composition_matches_sequential_application(a in op_strategy(), b in op_strategy(), k in 0i32..5, j in -4i32..5) {
        let e = basis(&[k, j]);
        let seq = a.apply(&b.apply(&e, Q).unwrap(), Q).unwrap();
        let comp = a.compose(&b).unwrap().apply(&e, Q).unwrap();
        let mut diff = seq.clone();
        diff.axpy(c(-1.0), &comp);
        prop_assert!(diff.max_abs() <= 1e-12 * (1.0 + seq.max_abs()));
    }

    #[test]
    fn adjoint_pairing(a in op_strategy(), k in 0i32..5, j in -4i32..5, k2 in 0i32..5, j2 in -4i32..5) {
        let x = basis(&[k, j]);
        let y = basis(&[k2, j2]);
        let lhs = y.inner(&a.apply(&x, Q).unwrap());
        let rhs = a.adjoint().apply(&y, Q).unwrap().inner(&x);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn adjoint_is_an_involution(a in op_strategy()) {
        prop_assert!(equal_on_window(&a.adjoint().adjoint(), &a, 4, Q, 1e-12).unwrap());
    }

    #[test]
    fn canonical_form_preserves_action(a in op_strategy(), b in op_strategy()) {
        let s = a.add(&b).unwrap();
        let (dev, mag) = window_deviation(&s.compile(), &s.canonical().compile(), 4, Q).unwrap();
        prop_assert!(dev <= 1e-12 * (1.0 + mag));
        prop_assert!(s.structurally_equal(&s.canonical(), 1e-12));
    }
}
