//! Property tests for the algebraic invariants.

use lie2core::adjoint::{change_of_splitting, TmConnections};
use lie2core::algebroid::FormValued;
use lie2core::cli::{run_checks, CheckKind};
use lie2core::dgmod::graded_monomials;
use lie2core::gca::{AlgebraElement, Derivation, Gens, Slot};
use lie2core::io::{fixture, mutate_file, parse_structure, FIXTURE_NAMES};
use lie2core::lie2::fixtures::{self, LIE2_FIXTURES};
use lie2core::lie2::{compile_homological_vf, lie2_axioms_check, q_square_check, split_gens};
use lie2core::poisson::fixtures::so3_pair;
use lie2core::scalars::{rat, Poly};
use lie2core::weil::{brute_force_weil_dims, split_weil_dims};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NVARS: usize = 2;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(Poly::zero(NVARS), |acc, (c, e0, e1)| &acc + &Poly::monomial(rat(c), vec![e0, e1]))
    })
}

fn gens() -> Gens {
    split_gens(NVARS, 2, 1)
}

/// A homogeneous element of the given degree with up to three terms.
fn homogeneous(gs: Gens, degree: i32) -> impl Strategy<Value = AlgebraElement> {
    let monos = graded_monomials(&gs, degree);
    let n = monos.len();
    prop::collection::vec((0..n.max(1), poly()), 0..4).prop_map(move |picks| {
        let mut a = AlgebraElement::zero(&gs);
        if n > 0 {
            for (i, p) in picks {
                a = a.add(&AlgebraElement::term(&gs, monos[i].clone(), p));
            }
        }
        a
    })
}

fn graded_pair() -> impl Strategy<Value = (i32, AlgebraElement, i32, AlgebraElement)> {
    (0i32..=3, 0i32..=3).prop_flat_map(|(d1, d2)| (Just(d1), homogeneous(gens(), d1), Just(d2), homogeneous(gens(), d2)))
}

fn derivation(degree: i32) -> impl Strategy<Value = Derivation> {
    let gs = gens();
    let slots = gs.slots();
    let parts: Vec<_> = slots.iter().map(|&s| homogeneous(gs.clone(), gs.slot_degree(s) + degree)).collect();
    parts.prop_map(move |vals| {
        let mut d = Derivation::zero(&gs, degree);
        for (s, v) in slots.iter().zip(vals) {
            d.set(*s, v);
        }
        d
    })
}

fn sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn poly_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        for i in 0..NVARS {
            let lhs = (&a * &b).partial(i).unwrap();
            let rhs = &(&a.partial(i).unwrap() * &b) + &(&a * &b.partial(i).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn poly_display_parses_back(a in poly()) {
        prop_assert_eq!(Poly::parse(&a.to_string(), NVARS).unwrap(), a);
    }

    #[test]
    fn koszul_commutativity((d1, x, d2, y) in graded_pair(), z in homogeneous(gens(), 2)) {
        let s = rat(sign(d1 * d2 % 2 != 0));
        prop_assert_eq!(x.mul(&y), y.mul(&x).scale(&s));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn algebra_display_parses_back((_, x, _, _) in graded_pair()) {
        prop_assert_eq!(AlgebraElement::parse(x.gens(), &x.to_string()).unwrap(), x);
    }

    #[test]
    fn derivations_obey_graded_leibniz(d in derivation(1), (dx, x, _, y) in graded_pair()) {
        let lhs = d.apply(&x.mul(&y));
        let s = rat(sign(dx % 2 != 0));
        let rhs = d.apply(&x).mul(&y).add(&x.mul(&d.apply(&y)).scale(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_is_a_derivation(d1 in derivation(1), d2 in derivation(0), (_, x, _, y) in graded_pair()) {
        let c = d1.commutator(&d2);
        let direct = d1.apply(&d2.apply(&x.mul(&y))).sub(&d2.apply(&d1.apply(&x.mul(&y))));
        prop_assert_eq!(c.apply(&x.mul(&y)), direct);
    }

    #[test]
    fn odd_derivation_square_is_half_commutator(d in derivation(1), (_, x, _, _) in graded_pair()) {
        let half = d.commutator(&d).scale(&lie2core::scalars::ratio(1, 2));
        prop_assert_eq!(half.apply(&x), d.apply(&d.apply(&x)));
    }

    #[test]
    fn weil_dims_match_brute_force(m in 0usize..=2, rq in 0usize..=3, rb in 0usize..=2, p in 0usize..=5, q in 0usize..=4) {
        prop_assert_eq!(split_weil_dims(m, rq, rb, p, q), brute_force_weil_dims(m, rq, rb, p, q));
    }

    #[test]
    fn hamiltonian_leibniz(x in 0usize..3, y in 0usize..3, c in -3i64..=3) {
        let (_, p) = so3_pair();
        let gs = p.gens.clone();
        let tx = AlgebraElement::generator(&gs, x);
        let ty = AlgebraElement::generator(&gs, y).scale(&rat(c));
        let prod = tx.mul(&ty);
        let lhs = p.ham_of(&prod, 2);
        // Both factors are odd, so the Koszul sign is −1.
        let rhs = p.ham_of(&ty, 1).left_mul(&tx).sub(&p.ham_of(&tx, 1).left_mul(&ty));
        for s in gs.slots() {
            prop_assert_eq!(lhs.value(s), rhs.value(s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn axioms_agree_with_q_square_on_mutants(seed in any::<u64>(), which in 0usize..4) {
        let d = fixtures::by_name(LIE2_FIXTURES[which]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, _, m) = d.random_mutation(&mut rng).unwrap();
        prop_assert_eq!(lie2_axioms_check(&m).passed(), q_square_check(&m).passed());
    }

    #[test]
    fn file_mutations_are_detected(seed in any::<u64>(), which in 0usize..5) {
        let f = fixture(FIXTURE_NAMES[which]).unwrap();
        let (mu, g) = mutate_file(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        let back = parse_structure(&g.to_json()).unwrap();
        prop_assert_eq!(&back, &g);
        let checks = run_checks(CheckKind::All, &back.load().unwrap(), 1);
        prop_assert!(checks.values().any(|c| !c.passed()), "undetected: {:?}", mu);
    }

    #[test]
    fn splitting_change_keeps_q_square_zero(a in -5i64..=5, b in -5i64..=5, c in -5i64..=5) {
        let d = fixtures::string_so3();
        let vals = [a, b, c];
        let sigma = FormValued::from_fn(0, 2, 3, 1, |idx| vec![Poly::int(0, vals[idx[0] + idx[1] - 1])]);
        let ch = change_of_splitting(&d, &sigma, &TmConnections::trivial(&d)).unwrap();
        prop_assert!(ch.report.passed(), "{:?}", ch.report.failing());
        let q2 = compile_homological_vf(&ch.data);
        prop_assert!(q2.square_check().unwrap().is_empty());
    }
}

#[test]
fn generator_slots_round_trip() {
    let gs = gens();
    for s in gs.slots() {
        assert_eq!(gs.parse_slot(&gs.slot_name(s)), Some(s));
    }
    assert!(matches!(gs.slots()[0], Slot::Base(0)));
}
