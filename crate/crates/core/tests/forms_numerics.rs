//! Numerical checks of the deformed forms: the closed-form class sums
//! against a direct summation, convergence of the coset sum, agreement of
//! the coset sum with adaption, the free-basis certificate and frozen
//! first-order coefficients.

use std::sync::Arc;

use jetforms::eisenstein::{class_coefficients, deformed_eisenstein, frame_term_direct, EisensteinConfig};
use jetforms::forms::{adapt_form, rank_verify, AdaptConfig, Frame};
use jetforms::lattice::Word;
use jetforms::oracle::echelon_basis;
use num_complex::Complex64 as C64;
use jetforms::verify::lifted_sl2z;
use jetforms::Jet;
use proptest::prelude::*;

/// First-order parts of the adapted E6 over R[ε]/(ε²), n = 1..4, computed
/// by collocation (independent of the coset sum) and frozen.
const E6_EPS: [f64; 4] = [-47.9432209495898, 23672.689328673063, 1050853.8500014383, 10806138.269118415];
/// Same for E4.
const E4_EPS: [f64; 4] = [-18.856324627328718, -8710.570035821858, -121080.78430735349, -605497.8424109787];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The closed-form coefficients of one class equal the Fourier
    /// coefficients of the directly summed translates.
    #[test]
    fn class_sum_matches_direct_summation(w in proptest::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 1..8)) {
        let l = lifted_sl2z(2);
        let l = l.unwrap();
        let frame = Frame::for_lattice(&l).unwrap();
        let mut g = l.eval_word(&Word(w));
        let c = jetforms::scalar::rat_to_f64(&g.body()[2]);
        prop_assume!(c != 0.0);
        if c < 0.0 {
            g = g.neg();
        }
        let (k, m) = (6i64, 5usize);
        let closed = class_coefficients(&l, &frame, &g, k, m).unwrap();
        let gc = g.map(|x| C64::new(jetforms::scalar::rat_to_f64(x), 0.0));
        let (pts, y, reach) = (16usize, 0.5, 3000i64);
        let mut direct = vec![Jet::<C64>::zero(&l.alg); m + 1];
        for j in 0..pts {
            let x = j as f64 / pts as f64;
            let mut f = Jet::zero(&l.alg);
            for n in -reach..=reach {
                let z = Jet::constant(&l.alg, C64::new(x + n as f64, y));
                f = &f + &frame_term_direct(&frame, &gc, k, &z).unwrap();
            }
            for (r, d) in direct.iter_mut().enumerate() {
                let e = (C64::new(0.0, -2.0 * std::f64::consts::PI * r as f64) * C64::new(x, y)).exp() / pts as f64;
                *d = &*d + &f.scale(&e);
            }
        }
        for r in 1..=m {
            let scale = direct[r].norm().max(closed[r].norm()).max(1e-300);
            prop_assert!((&closed[r] - &direct[r]).norm() / scale < 1e-9, "r={} closed {:?} direct {:?}", r, closed[r].c, direct[r].c);
        }
    }
}

#[test]
fn doubling_the_bound_stays_within_the_tail() {
    let l = lifted_sl2z(2).unwrap();
    let frame = Arc::new(Frame::for_lattice(&l).unwrap());
    let run = |bound| deformed_eisenstein(&l, &frame, &EisensteinConfig { k: 6, bound, m: 6, threads: 4 }).unwrap();
    let (a, b) = (run(200), run(400));
    for n in 1..=6 {
        let step = (&b.form.coeffs[n] - &a.form.coeffs[n]).norm();
        assert!(step <= a.tail[n] + 1e-9 * a.form.coeffs[n].norm(), "n={n}: step {step:e} tail {:e}", a.tail[n]);
    }
}

#[test]
fn coset_sum_agrees_with_adaption() {
    let l = lifted_sl2z(2).unwrap();
    let frame = Arc::new(Frame::for_lattice(&l).unwrap());
    let k = 8;
    let e = deformed_eisenstein(&l, &frame, &EisensteinConfig { k, bound: 1000, m: 10, threads: 4 }).unwrap();
    let cfg = AdaptConfig::default();
    let a = adapt_form(&l, &frame, k, &echelon_basis(k as usize, cfg.m).unwrap(), &cfg).unwrap();
    for n in 0..=10 {
        let d = (&e.form.coeffs[n] - &a.forms[0].coeffs[n]).norm() / e.form.coeffs[n].norm();
        assert!(d < 1e-8, "n={n}: relative difference {d:e}");
    }
}

#[test]
fn frozen_first_order_coefficients() {
    let l = lifted_sl2z(2).unwrap();
    let frame = Arc::new(Frame::for_lattice(&l).unwrap());
    let cfg = AdaptConfig::default();
    for (k, want) in [(4i64, E4_EPS), (6, E6_EPS)] {
        let a = adapt_form(&l, &frame, k, &echelon_basis(k as usize, cfg.m).unwrap(), &cfg).unwrap();
        for (n, w) in want.iter().enumerate() {
            let got = a.forms[0].coeffs[n + 1].c[1];
            assert!(rel(got.re, *w) < 1e-9 && got.im.abs() < 1e-6, "k={k} n={}: {got} vs {w}", n + 1);
        }
    }
    let e = deformed_eisenstein(&l, &frame, &EisensteinConfig { k: 6, bound: 2000, m: 4, threads: 4 }).unwrap();
    for (n, w) in E6_EPS.iter().enumerate() {
        let got = e.form.coeffs[n + 1].c[1].re;
        assert!(rel(got, *w) < 1e-7, "coset sum n={}: {got} vs {w}", n + 1);
    }
}

#[test]
fn duplicated_form_is_not_a_free_basis() {
    let l = lifted_sl2z(2).unwrap();
    let frame = Arc::new(Frame::for_lattice(&l).unwrap());
    let cfg = AdaptConfig::default();
    let rep = adapt_form(&l, &frame, 12, &echelon_basis(12, cfg.m).unwrap(), &cfg).unwrap();
    assert!(rank_verify(&rep.forms, 2, 1e-8).unwrap().free_basis);
    let dup = vec![rep.forms[0].clone(), rep.forms[0].clone()];
    let r = rank_verify(&dup, 2, 1e-8).unwrap();
    assert!(!r.free_basis);
    assert_eq!(r.body_rank, 1);
}

#[test]
fn cusp_form_has_vanishing_constant_term() {
    let l = lifted_sl2z(3).unwrap();
    let frame = Arc::new(Frame::for_lattice(&l).unwrap());
    let cfg = AdaptConfig::default();
    let rep = adapt_form(&l, &frame, 12, &echelon_basis(12, cfg.m).unwrap(), &cfg).unwrap();
    let delta = rep.details.iter().position(|d| d.cuspidal).expect("a cusp form at weight 12");
    assert!(rep.forms[delta].coeffs[0].norm() <= 1e-10);
    assert!((rep.forms[delta].coeffs[1].c[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
}
