//! Möbius action on P-points of H, the automorphy factor j, the weight-k
//! slash operator and the Ω-normalizer that straightens a deformed
//! parabolic flow into a translation.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{Analytic, ComplexScalar, Exponent, Mode, Rational, Scalar};
use crate::sl2::{JetMat2, LieVec};

/// A P-point of the upper half plane: a complex jet with Im(body) > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PPointH<C: ComplexScalar> {
    pub z: Jet<C>,
}

impl<C: ComplexScalar> PPointH<C> {
    pub fn new(z: Jet<C>) -> Result<Self> {
        if z.body().to_c64().im <= 0.0 {
            return Err(Error::Precondition("Im of the body must be positive".into()));
        }
        Ok(PPointH { z })
    }
    /// Body-only point x + iy.
    pub fn constant(alg: &Arc<AlgebraSpec>, w: C) -> Result<Self> {
        Self::new(Jet::constant(alg, w))
    }
}

/// (a z + b)/(c z + d) on raw jets.
pub fn mobius_jet<S: Scalar>(g: &JetMat2<S>, z: &Jet<S>) -> Result<Jet<S>> {
    let num = &(g.a() * z) + g.b();
    let den = &(g.c() * z) + g.d();
    num.try_div(&den)
}

pub fn mobius_apply<C: ComplexScalar>(g: &JetMat2<C>, z: &PPointH<C>) -> Result<PPointH<C>> {
    PPointH::new(mobius_jet(g, &z.z)?)
}

/// j(g, z) = 1/(c z + d) on raw jets.
pub fn cocycle_jet<S: Scalar>(g: &JetMat2<S>, z: &Jet<S>) -> Result<Jet<S>> {
    (&(g.c() * z) + g.d()).invert()
}

pub fn cocycle_j<C: ComplexScalar>(g: &JetMat2<C>, z: &PPointH<C>) -> Result<Jet<C>> {
    cocycle_jet(g, &z.z)
}

/// Jet derivative of z ↦ g z, i.e. det(g)/(cz + d)².
pub fn mobius_derivative<S: Scalar>(g: &JetMat2<S>, z: &Jet<S>) -> Result<Jet<S>> {
    let j = cocycle_jet(g, z)?;
    Ok(&(&j * &j) * &g.det())
}

/// A jet-valued function on P-points of H.
pub trait Evaluator<S: Scalar>: Sync {
    fn eval(&self, z: &Jet<S>) -> Result<Jet<S>>;
}

impl<S: Scalar, F: Fn(&Jet<S>) -> Result<Jet<S>> + Sync> Evaluator<S> for F {
    fn eval(&self, z: &Jet<S>) -> Result<Jet<S>> {
        self(z)
    }
}

/// f|_g(z) = f(g z) j(g, z)^k.
pub fn slash<S: Scalar>(f: &dyn Evaluator<S>, g: &JetMat2<S>, k: i64, z: &Jet<S>) -> Result<Jet<S>> {
    let gz = mobius_jet(g, z)?;
    let j = cocycle_jet(g, z)?;
    Ok(&f.eval(&gz)? * &j.powi(k)?)
}

// ---------------------------------------------------------------- polynomials

/// Polynomial in one variable with jet coefficients, ascending powers.
pub type JetPoly<S> = Vec<Jet<S>>;

fn poly_trim<S: Scalar>(mut p: JetPoly<S>) -> JetPoly<S> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add<S: Scalar>(a: &[Jet<S>], b: &[Jet<S>]) -> JetPoly<S> {
    let alg = a.first().or(b.first()).expect("nonempty").alg.clone();
    (0..a.len().max(b.len()))
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => Jet::zero(&alg),
        })
        .collect()
}

fn poly_mul<S: Scalar>(a: &[Jet<S>], b: &[Jet<S>]) -> JetPoly<S> {
    let alg = a[0].alg.clone();
    let mut out = vec![Jet::zero(&alg); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    poly_trim(out)
}

fn poly_scale<S: Scalar>(a: &[Jet<S>], s: &Jet<S>) -> JetPoly<S> {
    a.iter().map(|x| x * s).collect()
}

fn poly_eval<S: Scalar>(p: &[Jet<S>], z: &Jet<S>) -> Jet<S> {
    let mut acc = Jet::zero(&z.alg);
    for c in p.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// p(z + s) as a polynomial in z.
fn poly_shift<S: Scalar>(p: &[Jet<S>], s: &Jet<S>) -> JetPoly<S> {
    let alg = s.alg.clone();
    let lin = vec![s.clone(), Jet::one(&alg)];
    let mut acc: JetPoly<S> = vec![Jet::zero(&alg)];
    for c in p.iter().rev() {
        acc = poly_add(&poly_mul(&acc, &lin), &[c.clone()]);
    }
    poly_trim(acc)
}

// ---------------------------------------------------------------- Ω

/// Polynomial P-automorphism Ω of H with identity body.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMap<S: Scalar> {
    /// Ascending coefficients of Ω(z).
    pub coeffs: JetPoly<S>,
}

impl<S: Scalar> OmegaMap<S> {
    pub fn identity(alg: &Arc<AlgebraSpec>) -> Self {
        OmegaMap { coeffs: vec![Jet::zero(alg), Jet::one(alg)] }
    }
    pub fn alg(&self) -> &Arc<AlgebraSpec> {
        &self.coeffs[0].alg
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn eval(&self, z: &Jet<S>) -> Jet<S> {
        poly_eval(&self.coeffs, z)
    }
    pub fn derivative(&self) -> JetPoly<S> {
        let alg = self.alg().clone();
        if self.coeffs.len() == 1 {
            return vec![Jet::zero(&alg)];
        }
        (1..self.coeffs.len()).map(|i| self.coeffs[i].scale(&S::from_i64(i as i64))).collect()
    }
    pub fn eval_derivative(&self, z: &Jet<S>) -> Jet<S> {
        poly_eval(&self.derivative(), z)
    }
    /// The variant z ↦ Ω(z + a).
    pub fn translate(&self, a: &Jet<S>) -> Self {
        OmegaMap { coeffs: poly_shift(&self.coeffs, a) }
    }
    /// Checks Ω^# = id and that all other coefficients lie in I.
    pub fn check_body(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            let want = if i == 1 { S::one() } else { S::zero() };
            let ok = match S::MODE {
                Mode::Exact => *c.body() == want,
                Mode::Floating => c.body().minus(&want).magnitude() <= 1e-12,
            };
            if !ok {
                return Err(Error::Invariant(format!("Ω coefficient {i} has wrong body")));
            }
        }
        Ok(())
    }
    /// Solves Ω(z) = w by Newton lifting from z^# = w^#.
    pub fn inverse_apply(&self, w: &Jet<S>) -> Result<Jet<S>> {
        let der = self.derivative();
        let mut z = w.clone();
        for _ in 0..=self.alg().n + 1 {
            let r = &self.eval(&z) - w;
            let done = match S::MODE {
                Mode::Exact => r.is_zero(),
                Mode::Floating => r.norm() <= 1e-15 * w.norm().max(1.0),
            };
            if done {
                return Ok(z);
            }
            z = &z - &r.try_div(&poly_eval(&der, &z))?;
        }
        Ok(z)
    }
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> OmegaMap<T> {
        OmegaMap { coeffs: self.coeffs.iter().map(|c| c.map(f)).collect() }
    }
}

/// exp(tχ) as a matrix of polynomials in t: C(t)·1 + S(t)·χ with
/// C = Σ δⁿ t²ⁿ/(2n)!, S = Σ δⁿ t²ⁿ⁺¹/(2n+1)!, δ = h² + e f nilpotent.
fn exp_t_chi<S: Scalar>(chi: &LieVec<S>) -> [JetPoly<S>; 4] {
    let alg = chi.h.alg.clone();
    let delta = chi.square_scalar();
    let mut cpoly: JetPoly<S> = Vec::new();
    let mut spoly: JetPoly<S> = Vec::new();
    let mut dpow = Jet::one(&alg);
    let mut fact = Rational::from_integer(1.into());
    let mut deg = 0usize;
    loop {
        // t^{2n}/(2n)! and t^{2n+1}/(2n+1)!
        if deg > 0 {
            fact *= Rational::from_integer(deg.into());
        }
        let c_even = S::from_rational(&(Rational::from_integer(1.into()) / &fact));
        fact *= Rational::from_integer((deg + 1).into());
        let c_odd = S::from_rational(&(Rational::from_integer(1.into()) / &fact));
        cpoly.resize(deg + 1, Jet::zero(&alg));
        cpoly[deg] = dpow.scale(&c_even);
        spoly.resize(deg + 2, Jet::zero(&alg));
        spoly[deg + 1] = dpow.scale(&c_odd);
        dpow = &dpow * &delta;
        deg += 2;
        if dpow.is_zero() || deg > 4 * alg.n + 4 {
            break;
        }
    }
    let m = chi.to_mat();
    let a = poly_add(&cpoly, &poly_scale(&spoly, m.a()));
    let b = poly_scale(&spoly, m.b());
    let c = poly_scale(&spoly, m.c());
    let d = poly_add(&cpoly, &poly_scale(&spoly, m.d()));
    [a, b, c, d].map(poly_trim)
}

fn check_chi_body<S: Scalar>(chi: &LieVec<S>) -> Result<()> {
    let [h, e, f] = chi.body_coords();
    let ok = match S::MODE {
        Mode::Exact => h.is_zero() && e.is_one() && f.is_zero(),
        Mode::Floating => h.magnitude() < 1e-12 && e.minus(&S::one()).magnitude() < 1e-12 && f.magnitude() < 1e-12,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition("χ must have body χ₀ = [[0,1],[0,0]]".into()))
    }
}

/// Ω(z) = ω(z - i) with ω(t) = exp(tχ)·i.
pub fn omega_from_chi<C: ComplexScalar>(chi: &LieVec<C>) -> Result<OmegaMap<C>> {
    check_chi_body(chi)?;
    let alg = chi.h.alg.clone();
    // χ² = δ·1 for traceless χ, so χ^{2N} = δ^N·1 must vanish
    if !chi.square_scalar().powi(alg.n as i64)?.is_zero() {
        return Err(Error::Invariant("χ is not nilpotent: χ^{2N} ≠ 0".into()));
    }
    let i = Jet::constant(&alg, C::i());
    let [a, b, c, d] = exp_t_chi(chi);
    let num = poly_add(&poly_scale(&a, &i), &b);
    let den = poly_add(&poly_scale(&c, &i), &d);
    // den = 1 + n(t) with nilpotent coefficients
    let mut nden = den.clone();
    nden[0] = nden[0].add_scalar(&C::one().negate());
    if nden.iter().any(|x| !x.body().is_zero()) {
        return Err(Error::Invariant("denominator of exp(tχ)·i does not have body 1".into()));
    }
    let mneg: JetPoly<C> = nden.iter().map(|x| x.neg()).collect();
    let mut inv: JetPoly<C> = vec![Jet::one(&alg)];
    let mut term: JetPoly<C> = vec![Jet::one(&alg)];
    for _ in 0..alg.n.max(1) {
        term = poly_mul(&term, &mneg);
        if term.iter().all(|x| x.is_zero()) {
            break;
        }
        inv = poly_add(&inv, &term);
    }
    let omega_t = poly_trim(poly_mul(&num, &inv));
    let om = OmegaMap { coeffs: poly_shift(&omega_t, &i.neg()) };
    om.check_body()?;
    Ok(om)
}

/// Result of the polynomial identity Ω(z + t)·(c(t)Ω(z) + d(t)) =
/// a(t)Ω(z) + b(t) in (z, t).
#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    pub max_defect: f64,
    pub exact_zero: bool,
    pub terms: usize,
}

/// Bivariate polynomial: `p[i][j]` is the coefficient of z^i t^j.
type BiPoly<S> = Vec<Vec<Jet<S>>>;

fn bi_zero<S: Scalar>(alg: &Arc<AlgebraSpec>, dz: usize, dt: usize) -> BiPoly<S> {
    vec![vec![Jet::zero(alg); dt]; dz]
}

fn bi_mul<S: Scalar>(a: &BiPoly<S>, b: &BiPoly<S>) -> BiPoly<S> {
    let alg = a[0][0].alg.clone();
    let mut out = bi_zero(&alg, a.len() + b.len() - 1, a[0].len() + b[0].len() - 1);
    for (i1, r1) in a.iter().enumerate() {
        for (j1, x) in r1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i2, r2) in b.iter().enumerate() {
                for (j2, y) in r2.iter().enumerate() {
                    out[i1 + i2][j1 + j2] = &out[i1 + i2][j1 + j2] + &(x * y);
                }
            }
        }
    }
    out
}

fn bi_add<S: Scalar>(a: &BiPoly<S>, b: &BiPoly<S>) -> BiPoly<S> {
    let alg = a[0][0].alg.clone();
    let dz = a.len().max(b.len());
    let dt = a[0].len().max(b[0].len());
    let mut out = bi_zero(&alg, dz, dt);
    for p in [a, b] {
        for (i, r) in p.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                out[i][j] = &out[i][j] + x;
            }
        }
    }
    out
}

fn bi_from_z<S: Scalar>(p: &[Jet<S>]) -> BiPoly<S> {
    p.iter().map(|c| vec![c.clone()]).collect()
}

fn bi_from_t<S: Scalar>(p: &[Jet<S>]) -> BiPoly<S> {
    vec![p.to_vec()]
}

/// Checks that `omega` intertwines the translation flow with exp(tχ).
pub fn intertwining_defect<S: Scalar>(omega: &OmegaMap<S>, chi: &LieVec<S>) -> IntertwiningReport {
    let alg = omega.alg().clone();
    let [a, b, c, d] = exp_t_chi(chi);
    // Ω(z + t) = Σ_n c_n Σ_j binom(n, j) z^{n-j} t^j
    let deg = omega.degree();
    let mut lhs = bi_zero(&alg, deg + 1, deg + 1);
    for (n, cn) in omega.coeffs.iter().enumerate() {
        let mut binom = Rational::from_integer(1.into());
        for j in 0..=n {
            lhs[n - j][j] = &lhs[n - j][j] + &cn.scale(&S::from_rational(&binom));
            binom = binom * Rational::from_integer(((n - j) as i64).into()) / Rational::from_integer(((j + 1) as i64).into());
        }
    }
    let om = bi_from_z(&omega.coeffs);
    let den = bi_add(&bi_mul(&bi_from_t(&c), &om), &bi_from_t(&d));
    let num = bi_add(&bi_mul(&bi_from_t(&a), &om), &bi_from_t(&b));
    let neg_num: BiPoly<S> = num.iter().map(|r| r.iter().map(|x| x.neg()).collect()).collect();
    let defect = bi_add(&bi_mul(&lhs, &den), &neg_num);
    let mut max_defect: f64 = 0.0;
    let mut exact_zero = true;
    let mut terms = 0;
    for r in &defect {
        for x in r {
            terms += 1;
            max_defect = max_defect.max(x.norm());
            exact_zero &= x.is_zero();
        }
    }
    IntertwiningReport { max_defect, exact_zero, terms }
}

/// f|_Ω(z) = f(Ω z) Ω′(z)^{k/2}; Ω′ has body 1 so the power is branch-free.
pub fn omega_slash<S: Scalar + Analytic>(f: &dyn Evaluator<S>, omega: &OmegaMap<S>, k: i64, z: &Jet<S>) -> Result<Jet<S>> {
    let w = omega.eval(z);
    let dp = omega.eval_derivative(z);
    let p = dp.pow(&Exponent::Rational(Rational::new(k.into(), 2.into())))?;
    Ok(&f.eval(&w)? * &p)
}

/// Default sample count and height for [`cusp_value`]; for level-one
/// weights ≤ 24 the neglected Fourier tail at this height is below 1e−10.
pub const CUSP_SAMPLES: usize = 64;
pub const CUSP_HEIGHT: f64 = 2.0;

/// Constant Fourier coefficient of f|_g|_Ω on the line Im z = Y, by an
/// M-point average; also checks 1-periodicity at a few points.
pub fn cusp_value(
    f: &dyn Evaluator<Complex64>,
    g: &JetMat2<Complex64>,
    omega: &OmegaMap<Complex64>,
    k: i64,
    height: f64,
    m: usize,
    tol: f64,
) -> Result<Jet<Complex64>> {
    let alg = omega.alg().clone();
    let fg = |w: &Jet<Complex64>| slash(f, g, k, w);
    let big_f = |x: f64| omega_slash(&fg, omega, k, &Jet::constant(&alg, Complex64::new(x, height)));
    let mut acc = Jet::zero(&alg);
    let mut scale: f64 = 0.0;
    for j in 0..m {
        let v = big_f(j as f64 / m as f64)?;
        scale = scale.max(v.norm());
        acc = &acc + &v;
    }
    for x in [0.1, 0.37, 0.71] {
        let d = &big_f(x + 1.0)? - &big_f(x)?;
        if d.norm() > tol * scale.max(1.0) {
            return Err(Error::Invariant(format!("f|Ω is not 1-periodic: defect {:e}", d.norm())));
        }
    }
    Ok(acc.scale(&Complex64::new(1.0 / m as f64, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ExactComplex};
    use crate::sl2::mat_exp;

    type Q = ExactComplex;

    #[test]
    fn translation_by_jet() {
        let a = AlgebraSpec::dual(2);
        let g = JetMat2::<Q>::new(Jet::one(&a), Jet::basis(&a, 1), Jet::zero(&a), Jet::one(&a));
        let i = PPointH::constant(&a, Q::i()).unwrap();
        let w = mobius_apply(&g, &i).unwrap();
        assert_eq!(w.z, &i.z + &Jet::basis(&a, 1));
        let s = JetMat2::<Q>::from_ints(&a, [0, 1, -1, 0]);
        assert_eq!(cocycle_j(&s, &i).unwrap(), Jet::constant(&a, Q::i()));
    }

    #[test]
    fn omega_identity_for_chi0() {
        let a = AlgebraSpec::dual(3);
        let om = omega_from_chi(&LieVec::<Q>::chi0(&a)).unwrap();
        assert_eq!(om, OmegaMap::identity(&a));
    }

    #[test]
    fn omega_intertwines() {
        let a = AlgebraSpec::dual(2);
        let e = Jet::<Rational>::basis(&a, 1);
        let chi = LieVec::chi0(&a).add(&LieVec::new(Jet::zero(&a), Jet::zero(&a), e));
        let chi = chi.complexify();
        let om = omega_from_chi(&chi).unwrap();
        assert!(om.degree() <= 3);
        let rep = intertwining_defect(&om, &chi);
        assert!(rep.exact_zero, "{rep:?}");
        let shift = Jet::basis(&a, 1).scale(&Q::from_rational(&rat(2, 3)));
        assert!(intertwining_defect(&om.translate(&shift), &chi).exact_zero);
        // Ω(z + 1) = exp(χ)·Ω(z) at a point
        let g = mat_exp(&chi).unwrap();
        let z = Jet::constant(&a, Q::from_parts(rat(1, 3).into(), rat(2, 1).into()));
        let lhs = om.eval(&z.add_scalar(&Q::one()));
        let rhs = mobius_jet(&g, &om.eval(&z)).unwrap();
        assert_eq!(lhs, rhs);
    }
}
