//! Scalar fields underlying jets.
//!
//! Exact mode uses rationals, optionally extended by one square root
//! (needed for elliptic fixed points such as e^{2πi/3}); floating mode uses
//! `f64` and `Complex64`.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "exact-rational")]
    Exact,
    #[serde(rename = "floating")]
    Floating,
}

/// Coefficient scalar of a jet.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    const FIELD: Field;
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Floats convert directly; exact types take the exact binary value.
    fn from_f64(x: f64) -> Self {
        Self::from_rational(&Rational::from_float(x).unwrap_or_default())
    }
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `None` when zero.
    fn recip(&self) -> Option<Self>;
    /// Exactly zero (floats compare against 0.0).
    fn is_zero(&self) -> bool;
    /// Absolute value as a float, used for norms and tolerances.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Multiply by a structure constant; exact types use `r`, floats use `f`.
    fn scale_const(&self, r: &Rational, f: f64) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&Rational::new(p.into(), q.into()))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    /// Text form used in JSON output for exact scalars.
    fn repr(&self) -> String {
        format!("{self:?}")
    }
}

/// Real scalars: ordered, with a complexification.
pub trait RealScalar: Scalar + PartialOrd {
    type Complex: ComplexScalar;
    fn to_complex(&self) -> Self::Complex;
    fn to_f64(&self) -> f64;
    fn sign(&self) -> Ordering;
    /// Square root of a non-negative value when representable in this field.
    fn sqrt_checked(&self) -> Option<Self>;
}

/// Complex scalars with real/imaginary parts in a real field.
pub trait ComplexScalar: Scalar {
    type Real: RealScalar;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn i() -> Self {
        Self::from_parts(Self::Real::zero(), Self::Real::one())
    }
}

/// Exponent of a power function: exact types need a rational exponent.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Rational(Rational),
    Float(f64),
}

impl Exponent {
    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Rational(r) => rat_to_f64(r),
            Exponent::Float(f) => *f,
        }
    }
    pub fn is_integer(&self) -> bool {
        match self {
            Exponent::Rational(r) => r.is_integer(),
            Exponent::Float(f) => f.fract() == 0.0,
        }
    }
}

/// Values of the classical functions at a body point; `None` when the value
/// leaves the scalar field or the argument is outside the branch domain.
pub trait Analytic: Scalar {
    fn exp_val(&self) -> Option<Self>;
    fn ln_val(&self) -> Option<Self>;
    fn pow_val(&self, r: &Exponent) -> Option<Self>;
    /// `r (r-1) ... (r-k+1) / k!` as a scalar.
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self>;
    /// True when the body is on the branch domain for log and fractional powers.
    fn positive_real(&self) -> bool;
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge operands
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn rational_binom(r: &Rational, k: usize) -> Rational {
    let mut acc = <Rational as One>::one();
    for j in 0..k {
        acc = acc * (r - Rational::from_integer(j.into())) / Rational::from_integer((j + 1).into());
    }
    acc
}

fn float_binom(r: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (r - j as f64) / (j + 1) as f64;
    }
    acc
}

// ---------------------------------------------------------------- f64

impl Scalar for f64 {
    const FIELD: Field = Field::Real;
    const MODE: Mode = Mode::Floating;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        rat_to_f64(r)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn scale_const(&self, _r: &Rational, f: f64) -> Self {
        self * f
    }
}

impl RealScalar for f64 {
    type Complex = Complex64;
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Analytic for f64 {
    fn exp_val(&self) -> Option<Self> {
        Some(self.exp())
    }
    fn ln_val(&self) -> Option<Self> {
        (*self > 0.0).then(|| self.ln())
    }
    fn pow_val(&self, r: &Exponent) -> Option<Self> {
        if r.is_integer() {
            return Some(self.powi(r.as_f64() as i32));
        }
        (*self > 0.0).then(|| self.powf(r.as_f64()))
    }
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self> {
        Some(float_binom(r.as_f64(), k))
    }
    fn positive_real(&self) -> bool {
        *self > 0.0
    }
}

// ---------------------------------------------------------------- Complex64

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;
    const MODE: Mode = Mode::Floating;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        (self.re != 0.0 || self.im != 0.0).then(|| self.inv())
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn scale_const(&self, _r: &Rational, f: f64) -> Self {
        self * f
    }
}

impl ComplexScalar for Complex64 {
    type Real = f64;
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
}

impl Analytic for Complex64 {
    fn exp_val(&self) -> Option<Self> {
        Some(self.exp())
    }
    fn ln_val(&self) -> Option<Self> {
        self.positive_real().then(|| Complex64::new(self.re.ln(), 0.0))
    }
    fn pow_val(&self, r: &Exponent) -> Option<Self> {
        if r.is_integer() {
            return Some(self.powi(r.as_f64() as i32));
        }
        self.positive_real().then(|| Complex64::new(self.re.powf(r.as_f64()), 0.0))
    }
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self> {
        Some(Complex64::new(float_binom(r.as_f64(), k), 0.0))
    }
    fn positive_real(&self) -> bool {
        self.im == 0.0 && self.re > 0.0
    }
}

// ---------------------------------------------------------------- Rational

impl Scalar for Rational {
    const FIELD: Field = Field::Real;
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn recip(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| <Rational as One>::one() / self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(self).abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn scale_const(&self, r: &Rational, _f: f64) -> Self {
        self * r
    }
    fn repr(&self) -> String {
        self.to_string()
    }
}

impl RealScalar for Rational {
    type Complex = ExactComplex;
    fn to_complex(&self) -> ExactComplex {
        ExactComplex::from_parts(Surd::from(self.clone()), Surd::zero())
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn sign(&self) -> Ordering {
        self.cmp(&Zero::zero())
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rational::new(n, d))
    }
}

impl Analytic for Rational {
    fn exp_val(&self) -> Option<Self> {
        Scalar::is_zero(self).then(One::one)
    }
    fn ln_val(&self) -> Option<Self> {
        One::is_one(self).then(Zero::zero)
    }
    fn pow_val(&self, r: &Exponent) -> Option<Self> {
        match r {
            Exponent::Rational(e) if e.is_integer() => {
                let n = e.to_integer().to_i32()?;
                if n < 0 && Scalar::is_zero(self) {
                    return None;
                }
                Some(num_traits::pow::Pow::pow(self, n))
            }
            Exponent::Rational(_) if One::is_one(self) => Some(One::one()),
            _ => None,
        }
    }
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self> {
        match r {
            Exponent::Rational(e) => Some(rational_binom(e, k)),
            Exponent::Float(_) => None,
        }
    }
    fn positive_real(&self) -> bool {
        self.is_positive()
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

// ---------------------------------------------------------------- Surd

/// Exact element `a + b√d` of a real quadratic field; plain rationals have
/// `b = 0` and `d = 0`. Mixing two different radicands is a caller bug and
/// panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub d: i64,
}

impl From<Rational> for Surd {
    fn from(a: Rational) -> Self {
        Surd { a, b: Zero::zero(), d: 0 }
    }
}

impl Surd {
    fn norm(self) -> Self {
        if Zero::is_zero(&self.b) {
            Surd { d: 0, ..self }
        } else {
            self
        }
    }
    fn radicand(&self, o: &Self) -> i64 {
        match (self.d, o.d) {
            (0, d) | (d, 0) => d,
            (x, y) if x == y => x,
            (x, y) => panic!("incompatible quadratic fields Q(sqrt {x}) and Q(sqrt {y})"),
        }
    }
    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }
    /// Square root of a non-negative rational as `t·√s`, `s` squarefree.
    pub fn sqrt_rational(r: &Rational) -> Option<Surd> {
        if r.is_negative() {
            return None;
        }
        if let Some(q) = r.sqrt_checked() {
            return Some(Surd::from(q));
        }
        // √(p/q) = √(pq)/q
        let pq = r.numer() * r.denom();
        let pq = pq.to_i64()?;
        if pq > 1_000_000_000_000 {
            return None;
        }
        let (mut t, mut s) = (1i64, pq);
        let mut f = 2i64;
        while f * f <= s {
            while s % (f * f) == 0 {
                s /= f * f;
                t *= f;
            }
            f += 1;
        }
        Some(Surd {
            a: Zero::zero(),
            b: Rational::new(t.into(), r.denom().clone()),
            d: s,
        })
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.minus(o).sign())
    }
}

impl Scalar for Surd {
    const FIELD: Field = Field::Real;
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        Surd::from(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Surd::from(<Rational as One>::one())
    }
    fn from_rational(r: &Rational) -> Self {
        Surd::from(r.clone())
    }
    fn plus(&self, o: &Self) -> Self {
        let d = self.radicand(o);
        Surd { a: &self.a + &o.a, b: &self.b + &o.b, d }.norm()
    }
    fn minus(&self, o: &Self) -> Self {
        let d = self.radicand(o);
        Surd { a: &self.a - &o.a, b: &self.b - &o.b, d }.norm()
    }
    fn times(&self, o: &Self) -> Self {
        if self.is_rational() && o.is_rational() {
            return Surd::from(&self.a * &o.a);
        }
        let d = self.radicand(o);
        let dd = Rational::from_integer(d.into());
        Surd {
            a: &self.a * &o.a + &self.b * &o.b * dd,
            b: &self.a * &o.b + &self.b * &o.a,
            d,
        }
        .norm()
    }
    fn negate(&self) -> Self {
        Surd { a: -&self.a, b: -&self.b, d: self.d }
    }
    fn recip(&self) -> Option<Self> {
        if self.is_rational() {
            return Scalar::recip(&self.a).map(Surd::from);
        }
        // (a - b√d) / (a² - d b²)
        let n = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.into());
        let inv = Scalar::recip(&n)?;
        Some(Surd { a: &self.a * &inv, b: -&self.b * &inv, d: self.d })
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn scale_const(&self, r: &Rational, _f: f64) -> Self {
        Surd { a: &self.a * r, b: &self.b * r, d: self.d }.norm()
    }
    fn repr(&self) -> String {
        if Scalar::is_zero(&self.b) {
            self.a.to_string()
        } else {
            format!("{}+{}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl RealScalar for Surd {
    type Complex = ExactComplex;
    fn to_complex(&self) -> ExactComplex {
        ExactComplex::from_parts(self.clone(), Surd::zero())
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * (self.d as f64).sqrt()
    }
    fn sign(&self) -> Ordering {
        // sign of a + b√d decided exactly by comparing squares
        let sa = self.a.sign_cmp();
        let sb = self.b.sign_cmp();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.into());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_rational() {
            Surd::sqrt_rational(&self.a)
        } else {
            None
        }
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}
impl SignCmp for Rational {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&<Rational as Zero>::zero())
    }
}

impl Analytic for Surd {
    fn exp_val(&self) -> Option<Self> {
        Scalar::is_zero(self).then(Surd::one)
    }
    fn ln_val(&self) -> Option<Self> {
        self.is_one().then(Surd::zero)
    }
    fn pow_val(&self, r: &Exponent) -> Option<Self> {
        match r {
            Exponent::Rational(e) if e.is_integer() => {
                let n = e.to_integer().to_i64()?;
                let base = if n < 0 { self.recip()? } else { self.clone() };
                let mut acc = Surd::one();
                for _ in 0..n.unsigned_abs() {
                    acc = acc.times(&base);
                }
                Some(acc)
            }
            Exponent::Rational(_) if self.is_one() => Some(Surd::one()),
            _ => None,
        }
    }
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self> {
        Rational::binom_coeff(r, k).map(Surd::from)
    }
    fn positive_real(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

// ---------------------------------------------------------------- ExactComplex

/// Exact complex number with real and imaginary parts in one quadratic
/// field (Gaussian rationals when both are rational).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactComplex {
    pub re: Surd,
    pub im: Surd,
}

impl From<Rational> for ExactComplex {
    fn from(r: Rational) -> Self {
        ExactComplex { re: Surd::from(r), im: Surd::zero() }
    }
}

impl Scalar for ExactComplex {
    const FIELD: Field = Field::Complex;
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        ExactComplex { re: Surd::zero(), im: Surd::zero() }
    }
    fn one() -> Self {
        ExactComplex { re: Surd::one(), im: Surd::zero() }
    }
    fn from_rational(r: &Rational) -> Self {
        ExactComplex::from(r.clone())
    }
    fn plus(&self, o: &Self) -> Self {
        ExactComplex { re: self.re.plus(&o.re), im: self.im.plus(&o.im) }
    }
    fn minus(&self, o: &Self) -> Self {
        ExactComplex { re: self.re.minus(&o.re), im: self.im.minus(&o.im) }
    }
    fn times(&self, o: &Self) -> Self {
        ExactComplex {
            re: self.re.times(&o.re).minus(&self.im.times(&o.im)),
            im: self.re.times(&o.im).plus(&self.im.times(&o.re)),
        }
    }
    fn negate(&self) -> Self {
        ExactComplex { re: self.re.negate(), im: self.im.negate() }
    }
    fn recip(&self) -> Option<Self> {
        let n = self.re.times(&self.re).plus(&self.im.times(&self.im));
        let inv = n.recip()?;
        Some(ExactComplex { re: self.re.times(&inv), im: self.im.negate().times(&inv) })
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn scale_const(&self, r: &Rational, f: f64) -> Self {
        ExactComplex { re: self.re.scale_const(r, f), im: self.im.scale_const(r, f) }
    }
    fn repr(&self) -> String {
        format!("({})+({})*i", self.re.repr(), self.im.repr())
    }
}

impl ComplexScalar for ExactComplex {
    type Real = Surd;
    fn from_parts(re: Surd, im: Surd) -> Self {
        ExactComplex { re, im }
    }
    fn re(&self) -> Surd {
        self.re.clone()
    }
    fn im(&self) -> Surd {
        self.im.clone()
    }
}

impl Analytic for ExactComplex {
    fn exp_val(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }
    fn ln_val(&self) -> Option<Self> {
        self.is_one().then(Self::zero)
    }
    fn pow_val(&self, r: &Exponent) -> Option<Self> {
        match r {
            Exponent::Rational(e) if e.is_integer() => {
                let n = e.to_integer().to_i64()?;
                let base = if n < 0 { self.recip()? } else { self.clone() };
                let mut acc = Self::one();
                for _ in 0..n.unsigned_abs() {
                    acc = acc.times(&base);
                }
                Some(acc)
            }
            Exponent::Rational(_) if self.is_one() => Some(Self::one()),
            _ => None,
        }
    }
    fn binom_coeff(r: &Exponent, k: usize) -> Option<Self> {
        Rational::binom_coeff(r, k).map(ExactComplex::from)
    }
    fn positive_real(&self) -> bool {
        self.im.is_zero() && self.re.positive_real()
    }
}

/// Integer gcd on `i64`.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}
