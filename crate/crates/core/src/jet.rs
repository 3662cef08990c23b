//! Jets: elements of P and P^C.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::scalar::{Analytic, ComplexScalar, Exponent, Field, Mode, Rational, RealScalar, Scalar};

#[derive(Debug, Clone)]
pub struct Jet<S> {
    pub alg: Arc<AlgebraSpec>,
    pub c: Vec<S>,
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, o: &Self) -> bool {
        same_alg(&self.alg, &o.alg) && self.c == o.c
    }
}

fn same_alg(a: &Arc<AlgebraSpec>, b: &Arc<AlgebraSpec>) -> bool {
    Arc::ptr_eq(a, b) || a.id() == b.id()
}

impl<S: Scalar> Jet<S> {
    pub fn new(alg: &Arc<AlgebraSpec>, c: Vec<S>) -> Self {
        assert_eq!(c.len(), alg.dim(), "coefficient count must match the basis");
        Jet { alg: alg.clone(), c }
    }
    pub fn zero(alg: &Arc<AlgebraSpec>) -> Self {
        Jet { alg: alg.clone(), c: vec![S::zero(); alg.dim()] }
    }
    pub fn constant(alg: &Arc<AlgebraSpec>, v: S) -> Self {
        let mut j = Self::zero(alg);
        j.c[0] = v;
        j
    }
    pub fn one(alg: &Arc<AlgebraSpec>) -> Self {
        Self::constant(alg, S::one())
    }
    /// The basis element `e_i`.
    pub fn basis(alg: &Arc<AlgebraSpec>, i: usize) -> Self {
        let mut j = Self::zero(alg);
        j.c[i] = S::one();
        j
    }
    pub fn from_i64(alg: &Arc<AlgebraSpec>, n: i64) -> Self {
        Self::constant(alg, S::from_i64(n))
    }
    pub fn field(&self) -> Field {
        S::FIELD
    }
    pub fn mode(&self) -> Mode {
        S::MODE
    }
    pub fn body(&self) -> &S {
        &self.c[0]
    }
    /// The nilpotent part `a - a^#`.
    pub fn nil(&self) -> Self {
        let mut j = self.clone();
        j.c[0] = S::zero();
        j
    }
    pub fn body_jet(&self) -> Self {
        Self::constant(&self.alg, self.c[0].clone())
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    pub fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|x| x.is_zero())
    }
    /// Max-coefficient norm.
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }
    /// Max-coefficient norm of the nilpotent part.
    pub fn nil_norm(&self) -> f64 {
        self.c[1..].iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn check_same(&self, o: &Self) -> Result<()> {
        if same_alg(&self.alg, &o.alg) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(self.alg.id().into(), o.alg.id().into()))
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.zip(o, S::plus))
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.zip(o, S::minus))
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn zip(&self, o: &Self, f: fn(&S, &S) -> S) -> Self {
        Jet { alg: self.alg.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| f(a, b)).collect() }
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let mut out = vec![S::zero(); self.c.len()];
        for t in self.alg.terms() {
            let (a, b) = (&self.c[t.i], &o.c[t.j]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let p = a.times(b);
            let p = if t.unit { p } else { p.scale_const(&t.c, t.cf) };
            out[t.k] = out[t.k].plus(&p);
        }
        Jet { alg: self.alg.clone(), c: out }
    }

    pub fn scale(&self, s: &S) -> Self {
        Jet { alg: self.alg.clone(), c: self.c.iter().map(|x| x.times(s)).collect() }
    }
    pub fn neg(&self) -> Self {
        Jet { alg: self.alg.clone(), c: self.c.iter().map(S::negate).collect() }
    }
    pub fn add_scalar(&self, s: &S) -> Self {
        let mut j = self.clone();
        j.c[0] = j.c[0].plus(s);
        j
    }

    /// Multiplicative inverse via the geometric series in the nilpotent part.
    pub fn invert(&self) -> Result<Self> {
        let b = self.body().recip().ok_or(Error::NotInvertible)?;
        // a = β(1 + x), x = a/β - 1 nilpotent; a⁻¹ = β⁻¹ Σ (-x)^j
        let x = self.scale(&b).nil();
        let mx = x.neg();
        let mut term = Self::one(&self.alg);
        let mut acc = Self::one(&self.alg);
        for _ in 1..self.alg.n.max(1) {
            term = term.mul_unchecked(&mx);
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&b))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.mul_unchecked(&o.invert()?))
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(&self.alg);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Powers x^1 .. x^{n-1} of the nilpotent part (index 0 is 1).
    fn nil_powers(&self) -> Vec<Self> {
        let x = self.nil();
        let mut out = vec![Self::one(&self.alg)];
        for j in 1..self.alg.n.max(1) {
            let next = &out[j - 1] * &x;
            if next.is_zero() {
                break;
            }
            out.push(next);
        }
        out
    }

    /// Σ_j coeffs[j] x^j where x is the nilpotent part.
    fn series(&self, coeffs: &[S]) -> Self {
        let mut acc = Self::zero(&self.alg);
        for (j, p) in self.nil_powers().iter().enumerate() {
            if j >= coeffs.len() {
                break;
            }
            acc = &acc + &p.scale(&coeffs[j]);
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet { alg: self.alg.clone(), c: self.c.iter().map(f).collect() }
    }
}

impl<S: Scalar + Analytic> Jet<S> {
    fn taylor_univariate(&self, deriv: impl Fn(usize) -> Result<S>) -> Result<Self> {
        let n = self.alg.n.max(1);
        let mut coeffs = Vec::with_capacity(n);
        let mut fact = Rational::from_integer(1.into());
        for j in 0..n {
            if j > 0 {
                fact *= Rational::from_integer(j.into());
            }
            let d = deriv(j)?;
            coeffs.push(d.times(&S::from_rational(&(Rational::from_integer(1.into()) / &fact))));
        }
        Ok(self.series(&coeffs))
    }

    pub fn exp(&self) -> Result<Self> {
        let e = self
            .body()
            .exp_val()
            .ok_or_else(|| Error::NotRepresentable(format!("exp of body {:?}", self.body())))?;
        self.taylor_univariate(|_| Ok(e.clone()))
    }

    /// Logarithm; the body must be 1 or a positive real.
    pub fn log(&self) -> Result<Self> {
        let b = self.body().clone();
        if !b.positive_real() {
            return Err(Error::Branch(format!("log of body {b:?}")));
        }
        let l = b
            .ln_val()
            .ok_or_else(|| Error::NotRepresentable(format!("log of body {b:?}")))?;
        let binv = b.recip().ok_or(Error::NotInvertible)?;
        self.taylor_univariate(|j| {
            if j == 0 {
                return Ok(l.clone());
            }
            // (-1)^{j-1} (j-1)! / b^j
            let mut v = S::one();
            for t in 1..j {
                v = v.times(&S::from_i64(t as i64));
            }
            for _ in 0..j {
                v = v.times(&binv);
            }
            Ok(if j % 2 == 0 { v.negate() } else { v })
        })
    }

    /// Real power a^r. Integer r uses repeated multiplication; other r need
    /// a positive real body (or body 1 in exact mode).
    pub fn pow(&self, r: &Exponent) -> Result<Self> {
        if r.is_integer() {
            return self.powi(r.as_f64() as i64);
        }
        let b = self.body().clone();
        if !b.positive_real() {
            return Err(Error::Branch(format!("fractional power of body {b:?}")));
        }
        let br = b
            .pow_val(r)
            .ok_or_else(|| Error::NotRepresentable(format!("power of body {b:?}")))?;
        let binv = b.recip().ok_or(Error::NotInvertible)?;
        // a^r = b^r (1 + x/b)^r
        let x = self.scale(&binv).nil();
        let n = self.alg.n.max(1);
        let coeffs: Vec<S> = (0..n)
            .map(|k| S::binom_coeff(r, k).ok_or_else(|| Error::NotRepresentable("binomial coefficient".into())))
            .collect::<Result<_>>()?;
        Ok(x.series(&coeffs).scale(&br))
    }

    /// n-th root with the body root `branch` designated by the caller.
    pub fn nth_root(&self, n: u32, branch: Option<&S>) -> Result<Self> {
        let beta = branch.ok_or_else(|| Error::Branch("nth_root needs a designated body root".into()))?;
        if n == 0 {
            return Err(Error::Precondition("root of order 0".into()));
        }
        let mut bn = S::one();
        for _ in 0..n {
            bn = bn.times(beta);
        }
        let body = self.body();
        let ok = match S::MODE {
            Mode::Exact => bn == *body,
            Mode::Floating => bn.minus(body).magnitude() <= 1e-12 * body.magnitude().max(1.0),
        };
        if !ok || body.is_zero() {
            return Err(Error::Branch(format!("{beta:?} is not an n-th root of the body {body:?}")));
        }
        let binv = body.recip().ok_or(Error::NotInvertible)?;
        let x = self.scale(&binv).nil();
        let r = Exponent::Rational(Rational::new(1.into(), (n as i64).into()));
        let m = self.alg.n.max(1);
        let coeffs: Vec<S> = (0..m)
            .map(|k| S::binom_coeff(&r, k).ok_or_else(|| Error::NotRepresentable("binomial coefficient".into())))
            .collect::<Result<_>>()?;
        Ok(x.series(&coeffs).scale(beta))
    }
}

impl<C: ComplexScalar> Jet<C> {
    pub fn re(&self) -> Jet<C::Real> {
        self.map(|x| x.re())
    }
    pub fn im(&self) -> Jet<C::Real> {
        self.map(|x| x.im())
    }
    pub fn from_parts(re: &Jet<C::Real>, im: &Jet<C::Real>) -> Self {
        Jet { alg: re.alg.clone(), c: re.c.iter().zip(&im.c).map(|(a, b)| C::from_parts(a.clone(), b.clone())).collect() }
    }
}

impl<R: RealScalar> Jet<R> {
    pub fn complexify(&self) -> Jet<R::Complex> {
        self.map(|x| x.to_complex())
    }
}

// operator sugar; panics on algebra mismatch (use the try_ forms to recover)

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: &Jet<S>) -> Jet<S> {
        self.try_add(o).expect("jet algebra mismatch")
    }
}
impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: &Jet<S>) -> Jet<S> {
        self.try_sub(o).expect("jet algebra mismatch")
    }
}
impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: &Jet<S>) -> Jet<S> {
        self.try_mul(o).expect("jet algebra mismatch")
    }
}
impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet::neg(self)
    }
}

/// Supplies mixed partial derivatives of a function at a point.
pub trait DerivativeSupplier<S> {
    fn arity(&self) -> usize;
    /// ∂^k h at `point`, with `k` a multi-index of length `arity`.
    fn partial(&self, point: &[S], k: &[usize]) -> Result<S>;
}

/// Closure-backed supplier.
pub struct FnSupplier<F> {
    pub arity: usize,
    pub f: F,
}

impl<S, F: Fn(&[S], &[usize]) -> Result<S>> DerivativeSupplier<S> for FnSupplier<F> {
    fn arity(&self) -> usize {
        self.arity
    }
    fn partial(&self, point: &[S], k: &[usize]) -> Result<S> {
        (self.f)(point, k)
    }
}

/// Formal Taylor expansion Σ_k (1/k!) ∂^k h(a^#) Π (a_i - a_i^#)^{k_i},
/// truncated by nilpotency.
pub fn taylor_compose<S: Scalar>(h: &dyn DerivativeSupplier<S>, args: &[Jet<S>]) -> Result<Jet<S>> {
    if args.is_empty() || args.len() != h.arity() {
        return Err(Error::Precondition("argument count does not match supplier arity".into()));
    }
    let alg = args[0].alg.clone();
    for a in &args[1..] {
        args[0].check_same(a)?;
    }
    let order = alg.n.saturating_sub(1);
    let point: Vec<S> = args.iter().map(|a| a.body().clone()).collect();
    let powers: Vec<Vec<Jet<S>>> = args.iter().map(|a| a.nil_powers()).collect();
    let mut acc = Jet::zero(&alg);
    let mut k = vec![0usize; args.len()];
    loop {
        let total: usize = k.iter().sum();
        if total <= order && k.iter().zip(&powers).all(|(&ki, p)| ki < p.len()) {
            let mut term = Jet::one(&alg);
            let mut fact = Rational::from_integer(1.into());
            for (i, &ki) in k.iter().enumerate() {
                if ki > 0 {
                    term = &term * &powers[i][ki];
                }
                for t in 2..=ki {
                    fact *= Rational::from_integer(t.into());
                }
            }
            if !term.is_zero() {
                let d = h
                    .partial(&point, &k)
                    .map_err(|e| Error::Derivative(e.to_string()))?;
                let coef = d.times(&S::from_rational(&(Rational::from_integer(1.into()) / fact)));
                acc = &acc + &term.scale(&coef);
            }
        }
        // odometer over multi-indices with entries ≤ order
        let mut i = 0;
        loop {
            if i == k.len() {
                return Ok(acc);
            }
            k[i] += 1;
            if k[i] <= order {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(v: &[(i64, i64)], alg: &Arc<AlgebraSpec>) -> Jet<Rational> {
        Jet::new(alg, v.iter().map(|&(p, d)| rat(p, d)).collect())
    }

    #[test]
    fn invert_geometric() {
        let a = AlgebraSpec::dual(3);
        let x = q(&[(1, 1), (1, 1), (0, 1)], &a);
        assert_eq!(x.invert().unwrap(), q(&[(1, 1), (-1, 1), (1, 1)], &a));
        let y = q(&[(1, 1), (1, 1), (1, 1)], &a);
        assert_eq!(&y * &y.invert().unwrap(), Jet::one(&a));
        assert_eq!(y.invert().unwrap(), q(&[(1, 1), (-1, 1), (0, 1)], &a));
        assert_eq!(Jet::<Rational>::from_i64(&a, 0).invert(), Err(Error::NotInvertible));
    }

    #[test]
    fn transcendental_examples() {
        let a = AlgebraSpec::dual(3);
        let x = q(&[(0, 1), (1, 1), (0, 1)], &a);
        assert_eq!(x.exp().unwrap(), q(&[(1, 1), (1, 1), (1, 2)], &a));
        let y = q(&[(1, 1), (1, 1), (0, 1)], &a);
        let r = y.pow(&Exponent::Rational(rat(1, 2))).unwrap();
        assert_eq!(r, q(&[(1, 1), (1, 2), (-1, 8)], &a));
        assert_eq!(&r * &r, y);
        let one = Jet::<Rational>::one(&a);
        assert_eq!(one.nth_root(2, Some(&rat(-1, 1))).unwrap(), one.neg());
        assert!(one.nth_root(2, None).is_err());
        assert!(one.neg().log().is_err());
    }

    #[test]
    fn reciprocal_by_taylor() {
        let a = AlgebraSpec::dual(3);
        let x = q(&[(2, 1), (1, 1), (0, 1)], &a);
        let h = FnSupplier {
            arity: 1,
            f: |p: &[Rational], k: &[usize]| {
                // d^k/dz^k 1/z = (-1)^k k! / z^{k+1}
                let mut v = rat(1, 1);
                for t in 1..=k[0] {
                    v *= rat(-(t as i64), 1);
                }
                Ok(v / num_traits::pow::Pow::pow(&p[0], (k[0] + 1) as i32))
            },
        };
        let t = taylor_compose(&h, &[x.clone()]).unwrap();
        assert_eq!(t, q(&[(1, 2), (-1, 4), (1, 8)], &a));
        assert_eq!(t, x.invert().unwrap());
    }
}
