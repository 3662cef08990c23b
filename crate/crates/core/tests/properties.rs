//! Property tests for the algebraic invariants: jet arithmetic, the
//! exponential, cocycles, lifting, gauge, words, cosets and configuration.

use std::sync::Arc;

use jetforms::config::RunConfig;
use jetforms::io::{algebra_from_json, algebra_json};
use jetforms::lattice::{
    check_cocycle, coboundary, cocycle_space, conjugate_lattice, coset_reps_sl2z, find_conjugator, lift_deformation,
    presentation_sl2z, preset, Cocycle, Word,
};
use jetforms::mobius::{cocycle_jet, intertwining_defect, mobius_jet, omega_from_chi};
use jetforms::scalar::{gcd, rat, ExactComplex, Rational};
use jetforms::sl2::{log_unipotent, mat_exp, JetMat2, LieVec};
use jetforms::{AlgebraKind, AlgebraSpec, ComplexScalar, Jet};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn algebra() -> impl Strategy<Value = Arc<AlgebraSpec>> {
    prop_oneof![
        (2usize..=4).prop_map(AlgebraSpec::dual),
        Just(AlgebraSpec::create(AlgebraKind::EvenExterior, 4, 5).unwrap()),
        Just(AlgebraSpec::create(AlgebraKind::TruncatedPolynomial, 2, 3).unwrap()),
    ]
}

fn jet_on(alg: Arc<AlgebraSpec>) -> impl Strategy<Value = Jet<Rational>> {
    proptest::collection::vec(rational(), alg.dim()).prop_map(move |c| Jet::new(&alg, c))
}

fn jet_triple() -> impl Strategy<Value = (Jet<Rational>, Jet<Rational>, Jet<Rational>)> {
    algebra().prop_flat_map(|a| (jet_on(a.clone()), jet_on(a.clone()), jet_on(a)))
}

fn nilpotent_lie(alg: Arc<AlgebraSpec>) -> impl Strategy<Value = LieVec<Rational>> {
    let n = alg.ideal_indices().len();
    proptest::collection::vec([rational(), rational(), rational()], n).prop_map(move |cs| {
        let mut x = LieVec::zero(&alg);
        for (c, b) in cs.iter().zip(alg.ideal_indices()) {
            x = x.add(&LieVec::from_coords(c, &Jet::basis(&alg, b)));
        }
        x
    })
}

fn word() -> impl Strategy<Value = Word> {
    proptest::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 0..12).prop_map(Word)
}

fn lifted(n: usize) -> jetforms::lattice::PLattice {
    jetforms::verify::lifted_sl2z(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_axioms((a, b, c) in jet_triple()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if *a.body() != rat(0, 1) {
            let inv = a.invert().unwrap();
            prop_assert_eq!(&a * &inv, Jet::one(&a.alg));
        } else {
            prop_assert!(a.invert().is_err());
        }
    }

    #[test]
    fn integer_powers_agree_with_products((a, _, _) in jet_triple(), n in 0i64..6) {
        let mut p = Jet::one(&a.alg);
        for _ in 0..n {
            p = &p * &a;
        }
        prop_assert_eq!(a.powi(n).unwrap(), p);
    }

    #[test]
    fn exp_of_nilpotent_is_unimodular_and_logs_back(x in algebra().prop_flat_map(nilpotent_lie)) {
        let g = mat_exp(&x).unwrap();
        prop_assert_eq!(g.det(), Jet::one(&x.h.alg));
        prop_assert_eq!(log_unipotent(&g).unwrap(), x);
    }

    #[test]
    fn coboundaries_are_cocycles(v in [rational(), rational(), rational()], name in prop_oneof![Just("sl2z"), Just("genus2"), Just("gamma1-4")]) {
        let pres = preset(name).unwrap();
        prop_assert!(check_cocycle(&pres, &coboundary(&pres, &v)).is_ok());
    }

    #[test]
    fn z1_basis_elements_are_cocycles(name in prop_oneof![Just("sl2z"), Just("genus2"), Just("punctured-torus")], coeffs in proptest::collection::vec(rational(), 9)) {
        let pres = preset(name).unwrap();
        let r = cocycle_space(&pres).unwrap();
        let mut u = Cocycle::zero(pres.gen_count());
        for (z, c) in r.z1_basis.iter().zip(&coeffs) {
            let scaled: Vec<Rational> = z.iter().map(|x| x * c).collect();
            u = u.add(&Cocycle::from_flat(&scaled));
        }
        prop_assert!(check_cocycle(&pres, &u).is_ok());
        prop_assert_eq!(r.dim_z1, r.dim_b1 + r.dim_h1);
    }

    #[test]
    fn words_decompose_back_to_plus_minus(w in word()) {
        let pres = presentation_sl2z();
        let m = pres.eval_classical(&w);
        let ints = jetforms::lattice::mat2_to_i64(&m).unwrap();
        let (back, sign) = jetforms::lattice::word_decompose_sl2z(ints).unwrap();
        let ev = pres.eval_classical(&back);
        let expect = if sign > 0 { m } else { jetforms::lattice::mat2_neg(&m) };
        prop_assert_eq!(ev, expect);
    }

    #[test]
    fn lifted_words_have_classical_body(w in word(), n in 2usize..=4) {
        let l = lifted(n);
        let jet = l.eval_word(&w);
        let body = l.pres.eval_classical(&w);
        prop_assert_eq!(jet.body().to_vec(), body.to_vec());
        prop_assert_eq!(jet.det(), Jet::one(&l.alg));
    }

    #[test]
    fn conjugate_lattice_round_trip(x in nilpotent_lie(AlgebraSpec::dual(3))) {
        let l = lifted(3);
        let g = mat_exp(&x).unwrap();
        let there = conjugate_lattice(&l, &g).unwrap();
        prop_assert!(there.check().is_ok());
        let back = conjugate_lattice(&there, &g.inverse().unwrap()).unwrap();
        prop_assert_eq!(back.gens, l.gens);
    }

    #[test]
    fn gauge_changes_are_found(x in nilpotent_lie(AlgebraSpec::dual(2)), v in [rational(), rational(), rational()]) {
        let l = lifted(2);
        let g = mat_exp(&x).unwrap();
        let target = conjugate_lattice(&l, &g).unwrap();
        let h = find_conjugator(&l, &target).unwrap();
        prop_assert!(h.is_some());
        prop_assert_eq!(conjugate_lattice(&l, &h.unwrap()).unwrap().gens, target.gens.clone());

        // cohomologous first-order directions give conjugate lattices
        let p = Arc::new(presentation_sl2z());
        let u = cocycle_space(&p).unwrap().h1_basis[0].clone();
        let alg = AlgebraSpec::dual(2);
        let shifted = lift_deformation(&p, &u.add(&coboundary(&p, &v)), &alg, &Jet::basis(&alg, 1)).unwrap().lattice;
        prop_assert!(find_conjugator(&l, &shifted).unwrap().is_some());
    }

    #[test]
    fn automorphy_factor_is_a_cocycle(w1 in word(), w2 in word(), x in nilpotent_lie(AlgebraSpec::dual(2)),
                                      re in rational(), im in (1i64..10, 1i64..5), nil in (rational(), rational())) {
        let alg = AlgebraSpec::dual(2);
        let l = lifted(2);
        let bump = mat_exp(&x).unwrap();
        let to_c = |m: &JetMat2<Rational>| m.map(|r| ExactComplex::from(r.clone()));
        let g = to_c(&l.eval_word(&w1).mul(&bump));
        let h = to_c(&l.eval_word(&w2));
        let mut z = Jet::constant(&alg, ExactComplex::from_parts(re.into(), rat(im.0, im.1).into()));
        z.c[1] = ExactComplex::from_parts(nil.0.into(), nil.1.into());
        let lhs = cocycle_jet(&g.mul(&h), &z).unwrap();
        let rhs = &cocycle_jet(&g, &mobius_jet(&h, &z).unwrap()).unwrap() * &cocycle_jet(&h, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn omega_intertwines_exactly(x in nilpotent_lie(AlgebraSpec::dual(3))) {
        let alg = AlgebraSpec::dual(3);
        let chi = LieVec::<Rational>::chi0(&alg).add(&x).complexify();
        let om = omega_from_chi(&chi).unwrap();
        prop_assert!(intertwining_defect(&om, &chi).exact_zero);
    }

    #[test]
    fn algebra_files_round_trip(m in 1usize..=3, n in 2usize..=4, ext in any::<bool>()) {
        let a = if ext {
            AlgebraSpec::create(AlgebraKind::EvenExterior, 2 * m, 2 * m + 1).unwrap()
        } else {
            AlgebraSpec::create(AlgebraKind::TruncatedPolynomial, m, n).unwrap()
        };
        let back = algebra_from_json(&algebra_json(&a)).unwrap();
        prop_assert_eq!(back.id(), a.id());
        prop_assert_eq!(back.dim(), a.dim());
    }

    #[test]
    fn run_config_round_trips(tol in 1e-14f64..1.0, bound in 1i64..100_000, m in 1usize..80, height in 0.05f64..0.85,
                              points in 1usize..400, seed in any::<u64>(), threads in 1usize..64, verbose in any::<bool>(), n in 2usize..6) {
        let mut c = RunConfig { tol, bound, m, height, points, seed, threads, verbose, ..RunConfig::default() };
        c.algebra.n = n;
        c.out = Some(format!("report-{seed}.json"));
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn trivial_direction_gives_undeformed_lattice() {
    let p = Arc::new(presentation_sl2z());
    for n in 2..=4 {
        let alg = AlgebraSpec::dual(n);
        let l = lift_deformation(&p, &Cocycle::zero(2), &alg, &Jet::basis(&alg, 1)).unwrap().lattice;
        assert!(l.gens.iter().all(|g| g.is_body()), "N={n}");
    }
}

#[test]
fn coset_count_matches_brute_force() {
    let b = 10i64;
    let mut brute = 0;
    for c in 0..=b {
        for d in -b..=b {
            if gcd(c, d.abs()) == 1 && (c > 0 || d == 1) {
                brute += 1;
            }
        }
    }
    let reps = coset_reps_sl2z(b).unwrap();
    assert_eq!(reps.len(), brute);
    let pres = presentation_sl2z();
    for r in &reps {
        let m = jetforms::lattice::mat2_from_i64(r.matrix);
        let ev = pres.eval_classical(&r.word);
        assert_eq!(ev, if r.sign > 0 { m } else { jetforms::lattice::mat2_neg(&m) });
    }
}

#[test]
fn undeformed_lattice_has_identity_conjugator() {
    let l = lifted(2);
    let h = find_conjugator(&l, &l).unwrap().expect("self-conjugate");
    assert_eq!(conjugate_lattice(&l, &h).unwrap().gens, l.gens);
}
