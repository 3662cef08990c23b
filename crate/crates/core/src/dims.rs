//! Dimensions of spaces of deformed automorphic and cusp forms from the
//! degree of the underlying line bundle, and the even/odd classification
//! of cusps.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_elements, find_minus_one, mat2_inv, mat2_mul, GroupPresentation, Mat2};
use crate::scalar::Rational;

/// Quotient data of a lattice: genus, elliptic periods, cusp counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientData {
    pub genus: i64,
    pub periods: Vec<i64>,
    /// Number of cusps S.
    pub cusps: i64,
    /// Number of even cusps S′ (only used for odd weights).
    pub even_cusps: i64,
    pub minus_one: bool,
}

impl QuotientData {
    pub fn sl2z() -> Self {
        QuotientData { genus: 0, periods: vec![2, 3], cusps: 1, even_cusps: 0, minus_one: true }
    }
    /// Quotient data of a named preset presentation.
    pub fn preset(name: &str) -> Result<Self> {
        Ok(match name {
            "sl2z" => Self::sl2z(),
            "gamma1-4" => QuotientData { genus: 0, periods: vec![], cusps: 3, even_cusps: 2, minus_one: false },
            "punctured-torus" => QuotientData { genus: 1, periods: vec![], cusps: 1, even_cusps: 0, minus_one: false },
            "genus2" => QuotientData { genus: 2, periods: vec![], cusps: 0, even_cusps: 0, minus_one: false },
            _ => return Err(Error::Precondition(format!("no quotient data for preset {name}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Either a dimension or the reason it is not determined by the degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim {
    Value(i64),
    Undetermined(String),
}

impl Dim {
    pub fn value(&self) -> Option<i64> {
        match self {
            Dim::Value(v) => Some(*v),
            Dim::Undetermined(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub k: i64,
    pub data: QuotientData,
    pub parity: Parity,
    /// Degree of the bundle whose sections are the forms.
    pub deg: i64,
    /// Degree of the twisted bundle whose sections are the cusp forms.
    pub deg_cusp: i64,
    pub dim_m: Dim,
    pub dim_s: Dim,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// dim H⁰ of a line bundle of degree `deg` on a curve of genus g in the
/// range where it depends only on the degree.
fn h0_generic(g: i64, deg: i64) -> i64 {
    match g {
        0 => (deg + 1).max(0),
        1 => deg.max(0),
        _ => deg - g + 1,
    }
}

/// Predicts dim M_k and dim S_k of a deformed lattice (equal to the
/// classical ones) from the degree formula and the genus case analysis.
pub fn dimension_predict(k: i64, data: &QuotientData) -> Result<DimensionReport> {
    let QuotientData { genus: g, ref periods, cusps: s, even_cusps: s_even, minus_one } = *data;
    if k < 0 || g < 0 || s < 0 {
        return Err(Error::Precondition("k, genus and cusp count must be non-negative".into()));
    }
    if periods.iter().any(|&n| n < 2) {
        return Err(Error::Precondition("elliptic periods must be ≥ 2".into()));
    }
    let r = periods.len() as i64;
    let parity = if k % 2 == 0 { Parity::Even } else { Parity::Odd };
    let report = |deg, deg_cusp, dim_m, dim_s| DimensionReport { k, data: data.clone(), parity, deg, deg_cusp, dim_m, dim_s };
    match parity {
        Parity::Even => {
            let deg = k * (g - 1) + (k / 2) * (r + s) - periods.iter().map(|&n| ceil_div(k, 2 * n)).sum::<i64>();
            let deg_cusp = deg - s;
            let (m, c) = match (g, k) {
                (0, _) => (h0_generic(0, deg), h0_generic(0, deg_cusp)),
                (_, 0) => (1, i64::from(s == 0)),
                (1, 2) => (if s == 0 { 1 } else { s }, 1),
                (_, 2) => (if s == 0 { g } else { g - 1 + s }, g),
                _ => (h0_generic(g, deg), h0_generic(g, deg_cusp)),
            };
            Ok(report(deg, deg_cusp, Dim::Value(m), Dim::Value(c)))
        }
        Parity::Odd => {
            if s_even < 0 || s_even > s {
                return Err(Error::Precondition("even cusp count must lie in 0..=S".into()));
            }
            if s_even % 2 != 0 {
                return Err(Error::Precondition("the number of even cusps must be even".into()));
            }
            if minus_one {
                return Ok(report(0, 0, Dim::Value(0), Dim::Value(0)));
            }
            let deg = k * (g - 1) + ((k + 1) / 2) * r - periods.iter().map(|&n| ceil_div(k + n, 2 * n)).sum::<i64>()
                + ((k - 1) / 2) * s
                + s_even / 2;
            let deg_cusp = deg - s_even;
            let torsion = "the bundle has trivial square, so its sections are not fixed by the degree";
            let (m, c) = match (g, k) {
                (0, _) => (Dim::Value(h0_generic(0, deg)), Dim::Value(h0_generic(0, deg_cusp))),
                (1, 1) if s_even == 0 => (Dim::Undetermined(torsion.into()), Dim::Undetermined(torsion.into())),
                (1, 1) => (Dim::Value(s_even / 2), Dim::Value(0)),
                (1, 3) if s == 0 && periods.iter().all(|&n| n == 2) => {
                    (Dim::Undetermined(torsion.into()), Dim::Undetermined(torsion.into()))
                }
                (1, _) => (Dim::Value(h0_generic(1, deg)), Dim::Value(h0_generic(1, deg_cusp))),
                (_, 1) => {
                    return Err(Error::Undetermined("weight 1 on genus ≥ 2 is outside the degree analysis".into()));
                }
                _ => (Dim::Value(h0_generic(g, deg)), Dim::Value(h0_generic(g, deg_cusp))),
            };
            Ok(report(deg, deg_cusp, m, c))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspParity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspReport {
    pub parity: CuspParity,
    /// The primitive parabolic of g⁻¹Γg fixing ∞, as ±[[1,h],[0,1]].
    pub primitive: [String; 4],
    pub width: String,
}

/// Classifies the cusp g(∞) of a lattice without −1: even when the
/// primitive parabolic of g⁻¹Γg at ∞ is [[1,h],[0,1]], odd when it is
/// −[[1,h],[0,1]]. Searches words up to `max_len`.
pub fn cusp_classify(pres: &GroupPresentation, transporter: &Mat2, max_len: usize) -> Result<CuspReport> {
    if let Some(w) = find_minus_one(pres, max_len) {
        return Err(Error::Precondition(format!("−1 lies in the group (word {:?}); cusp parity is undefined", w.0)));
    }
    let gi = mat2_inv(transporter);
    let mut best: Option<(Rational, Mat2)> = None;
    for (m, _) in enumerate_elements(pres, max_len) {
        let c = mat2_mul(&mat2_mul(&gi, &m), transporter);
        let one = Rational::from_integer(1.into());
        if !c[2].is_zero() || c[1].is_zero() || (c[0] != one && c[0] != -one.clone()) {
            continue;
        }
        let h = if c[1] < Rational::from_integer(0.into()) { -c[1].clone() } else { c[1].clone() };
        if best.as_ref().map_or(true, |(bh, _)| h < *bh) {
            best = Some((h, c));
        }
    }
    let (h, p) = best.ok_or_else(|| Error::Undetermined(format!("no parabolic fixing the cusp within word length {max_len}")))?;
    let trace = &p[0] + &p[3];
    let parity = if trace > Rational::from_integer(0.into()) { CuspParity::Even } else { CuspParity::Odd };
    Ok(CuspReport { parity, primitive: p.map(|x| x.to_string()), width: h.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mat2, presentation_gamma1_4, presentation_punctured_torus, presentation_sl2z};
    use crate::oracle::dim_mk_monomials;

    #[test]
    fn sl2z_dimensions() {
        let r = dimension_predict(12, &QuotientData::sl2z()).unwrap();
        assert_eq!((r.deg, r.dim_m.value(), r.dim_s.value()), (1, Some(2), Some(1)));
        let r = dimension_predict(4, &QuotientData::sl2z()).unwrap();
        assert_eq!((r.deg, r.dim_m.value(), r.dim_s.value()), (0, Some(1), Some(0)));
        for k in (0..=24).step_by(2) {
            let d = dim_mk_monomials(k as usize) as i64;
            let r = dimension_predict(k, &QuotientData::sl2z()).unwrap();
            assert_eq!(r.dim_m.value(), Some(d), "k={k}");
        }
    }

    #[test]
    fn gamma1_4_odd_weights() {
        let q = QuotientData::preset("gamma1-4").unwrap();
        let one = dimension_predict(1, &q).unwrap();
        assert_eq!((one.dim_m.value(), one.dim_s.value()), (Some(1), Some(0)));
        assert_eq!(dimension_predict(3, &q).unwrap().dim_m.value(), Some(2));
        assert_eq!(dimension_predict(2, &q).unwrap().dim_m.value(), Some(2));
    }

    #[test]
    fn cusp_parities() {
        let p = presentation_gamma1_4();
        assert_eq!(cusp_classify(&p, &mat2([1, 0, 0, 1]), 6).unwrap().parity, CuspParity::Even);
        assert_eq!(cusp_classify(&p, &mat2([1, 0, 2, 1]), 6).unwrap().parity, CuspParity::Odd);
        let t = presentation_punctured_torus();
        // the cusp of the punctured torus is the fixed point of the commutator
        let c = &t.generators[2].matrix;
        let x = (&c[0] - &c[3]) / (Rational::from_integer(2.into()) * &c[2]);
        let g = [x, Rational::from_integer((-1).into()), Rational::from_integer(1.into()), Rational::from_integer(0.into())];
        assert_eq!(cusp_classify(&t, &g, 6).unwrap().parity, CuspParity::Odd);
        assert!(cusp_classify(&presentation_sl2z(), &mat2([1, 0, 0, 1]), 4).is_err());
    }
}
