//! Independent classical q-expansions in exact rationals: Eisenstein series
//! from divisor sums, the discriminant Δ, and echelon bases of M_k(SL(2,Z)).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::scalar::{rat, Rational};

/// Bernoulli numbers B_0..B_n (B_1 = −1/2) by the standard recurrence.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Rational::one());
            continue;
        }
        // Σ_{j=0}^{m} binom(m+1, j) B_j = 0
        let mut s = Rational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            s += Rational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// σ_r(n) = Σ_{d | n} d^r.
pub fn sigma(r: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    s
}

/// E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ, coefficients a_0..a_M.
pub fn eisenstein(k: usize, m: usize) -> Result<Vec<Rational>> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Precondition(format!("no level-one Eisenstein series of weight {k}")));
    }
    let bk = bernoulli(k)[k].clone();
    let c = -rat(2 * k as i64, 1) / bk;
    let mut out = vec![Rational::one()];
    for n in 1..=m {
        out.push(&c * Rational::from_integer(sigma(k as u32 - 1, n as u64)));
    }
    Ok(out)
}

/// Truncated product of two q-series.
pub fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let m = a.len().min(b.len());
    (0..m)
        .map(|n| (0..=n).fold(Rational::zero(), |acc, i| acc + &a[i] * &b[n - i]))
        .collect()
}

/// Δ = (E₄³ − E₆²)/1728.
pub fn delta(m: usize) -> Vec<Rational> {
    let e4 = eisenstein(4, m).expect("weight 4");
    let e6 = eisenstein(6, m).expect("weight 6");
    let e43 = series_mul(&series_mul(&e4, &e4), &e4);
    let e62 = series_mul(&e6, &e6);
    e43.iter().zip(&e62).map(|(x, y)| (x - y) / rat(1728, 1)).collect()
}

/// Named classical forms: E4, E6, …, E14 and Delta.
pub fn classical_form(name: &str, m: usize) -> Result<Vec<Rational>> {
    match name {
        "Delta" | "delta" => Ok(delta(m)),
        _ => {
            let k: usize = name
                .strip_prefix('E')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Precondition(format!("unsupported form {name}")))?;
            if !(4..=14).contains(&k) {
                return Err(Error::Precondition(format!("unsupported form {name}")));
            }
            eisenstein(k, m)
        }
    }
}

/// Exponent pairs (a, b) with 4a + 6b = k.
pub fn monomial_exponents(k: usize) -> Vec<(usize, usize)> {
    (0..=k / 4).filter_map(|a| (k >= 4 * a && (k - 4 * a) % 6 == 0).then(|| (a, (k - 4 * a) / 6))).collect()
}

/// dim M_k(SL(2,Z)) by counting monomials E₄^a E₆^b.
pub fn dim_mk_monomials(k: usize) -> usize {
    if k % 2 == 1 {
        return 0;
    }
    monomial_exponents(k).len()
}

/// Basis of M_k(SL(2,Z)) in reduced echelon form on the first coefficients:
/// the i-th form is qⁱ + O(q^d), so the pivots are 0..d−1 and the last
/// basis element is a cusp form when d ≥ 2.
pub fn echelon_basis(k: usize, m: usize) -> Result<Vec<Vec<Rational>>> {
    if k == 0 {
        let mut one = vec![Rational::zero(); m + 1];
        one[0] = Rational::one();
        return Ok(vec![one]);
    }
    let exps = monomial_exponents(k);
    if exps.is_empty() {
        return Ok(Vec::new());
    }
    let e4 = eisenstein(4, m)?;
    let e6 = eisenstein(6, m)?;
    let mut unit = vec![Rational::zero(); m + 1];
    unit[0] = Rational::one();
    let rows: Vec<Vec<Rational>> = exps
        .iter()
        .map(|&(a, b)| {
            let mut s = unit.clone();
            for _ in 0..a {
                s = series_mul(&s, &e4);
            }
            for _ in 0..b {
                s = series_mul(&s, &e6);
            }
            s
        })
        .collect();
    let mut q = QMat::from_rows(&rows, m + 1);
    let pivots = q.rref();
    if pivots != (0..exps.len()).collect::<Vec<_>>() {
        return Err(Error::Invariant("monomial basis is not in echelon position".into()));
    }
    Ok((0..pivots.len()).map(|i| q.row(i).to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let b = bernoulli(12);
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[12], rat(-691, 2730));
        assert_eq!(eisenstein(4, 2).unwrap(), vec![rat(1, 1), rat(240, 1), rat(2160, 1)]);
        assert_eq!(eisenstein(6, 1).unwrap()[1], rat(-504, 1));
        let d = delta(4);
        assert_eq!(d, vec![rat(0, 1), rat(1, 1), rat(-24, 1), rat(252, 1), rat(-1472, 1)]);
        assert_eq!(dim_mk_monomials(12), 2);
        let basis = echelon_basis(12, 3).unwrap();
        assert_eq!(basis[1][..2], [rat(0, 1), rat(1, 1)]);
    }
}
