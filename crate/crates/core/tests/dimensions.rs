//! Invariants of the dimension predictor.

use jetforms::dims::{dimension_predict, QuotientData};
use proptest::prelude::*;

fn quotient() -> impl Strategy<Value = QuotientData> {
    (0i64..4, proptest::collection::vec(2i64..7, 0..4), 0i64..5)
        .prop_filter("hyperbolic signature", |(g, periods, s)| {
            // positive orbifold Euler characteristic deficit: 2g − 2 + Σ(1 − 1/n) + s > 0
            let lcm: i64 = periods.iter().product::<i64>().max(1);
            (2 * g - 2 + s) * lcm + periods.iter().map(|n| lcm - lcm / n).sum::<i64>() > 0
        })
        .prop_map(|(genus, periods, cusps)| QuotientData { genus, periods, cusps, even_cusps: 0, minus_one: true })
}

proptest! {
    #[test]
    fn cusp_forms_fit_inside_forms(q in quotient(), half in 0i64..15) {
        let k = 2 * half;
        let r = dimension_predict(k, &q).unwrap();
        let (m, s) = (r.dim_m.value().unwrap(), r.dim_s.value().unwrap());
        prop_assert!(0 <= s && s <= m);
        prop_assert_eq!(r.deg - r.deg_cusp, q.cusps);
    }

    #[test]
    fn eisenstein_space_has_one_form_per_cusp(q in quotient(), half in 2i64..15) {
        prop_assume!(q.genus >= 1);
        let r = dimension_predict(2 * half, &q).unwrap();
        prop_assert_eq!(r.dim_m.value().unwrap() - r.dim_s.value().unwrap(), q.cusps);
    }

    #[test]
    fn odd_weights_vanish_with_minus_one(q in quotient(), half in 0i64..10) {
        let r = dimension_predict(2 * half + 1, &q).unwrap();
        prop_assert_eq!(r.dim_m.value(), Some(0));
    }

    /// Independent closed form for even k ≥ 4:
    /// dim M_k = (k − 1)(g − 1) + (k/2)s + Σ ⌊k(n − 1)/(2n)⌋, dim S_k = dim M_k − s.
    #[test]
    fn even_weights_match_closed_form(q in quotient(), half in 2i64..15) {
        let k = 2 * half;
        let elliptic: i64 = q.periods.iter().map(|&n| (k * (n - 1)).div_euclid(2 * n)).sum();
        let m = (k - 1) * (q.genus - 1) + (k / 2) * q.cusps + elliptic;
        let r = dimension_predict(k, &q).unwrap();
        prop_assert_eq!(r.dim_m.value(), Some(m));
        prop_assert_eq!(r.dim_s.value(), Some(m - q.cusps));
    }
}

#[test]
fn genus_two_weight_two_is_the_genus() {
    let q = QuotientData::preset("genus2").unwrap();
    let r = dimension_predict(2, &q).unwrap();
    assert_eq!((r.dim_m.value(), r.dim_s.value()), (Some(2), Some(2)));
}
