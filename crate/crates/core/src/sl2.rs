//! 2×2 matrices over P: the P-points of SL(2,R) and its Lie algebra.

use std::sync::Arc;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::QMat;
use crate::scalar::{Analytic, ComplexScalar, Mode, Rational, RealScalar, Scalar, Surd};

/// Matrix [[a, b], [c, d]] of jets.
#[derive(Debug, Clone)]
pub struct JetMat2<S> {
    pub e: [Jet<S>; 4],
}

impl<S: Scalar> PartialEq for JetMat2<S> {
    fn eq(&self, o: &Self) -> bool {
        self.e == o.e
    }
}

impl<S: Scalar> JetMat2<S> {
    pub fn new(a: Jet<S>, b: Jet<S>, c: Jet<S>, d: Jet<S>) -> Self {
        JetMat2 { e: [a, b, c, d] }
    }
    pub fn alg(&self) -> &Arc<AlgebraSpec> {
        &self.e[0].alg
    }
    pub fn a(&self) -> &Jet<S> {
        &self.e[0]
    }
    pub fn b(&self) -> &Jet<S> {
        &self.e[1]
    }
    pub fn c(&self) -> &Jet<S> {
        &self.e[2]
    }
    pub fn d(&self) -> &Jet<S> {
        &self.e[3]
    }
    pub fn from_scalars(alg: &Arc<AlgebraSpec>, m: [S; 4]) -> Self {
        let [a, b, c, d] = m;
        JetMat2::new(Jet::constant(alg, a), Jet::constant(alg, b), Jet::constant(alg, c), Jet::constant(alg, d))
    }
    pub fn from_ints(alg: &Arc<AlgebraSpec>, m: [i64; 4]) -> Self {
        Self::from_scalars(alg, m.map(S::from_i64))
    }
    pub fn identity(alg: &Arc<AlgebraSpec>) -> Self {
        Self::from_ints(alg, [1, 0, 0, 1])
    }
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> JetMat2<T> {
        JetMat2 { e: [self.e[0].map(f), self.e[1].map(f), self.e[2].map(f), self.e[3].map(f)] }
    }
    pub fn body(&self) -> [S; 4] {
        [0, 1, 2, 3].map(|i| self.e[i].body().clone())
    }
    pub fn body_mat(&self) -> Self {
        Self::from_scalars(self.alg(), self.body())
    }
    /// True when every ideal coefficient is exactly zero.
    pub fn is_body(&self) -> bool {
        self.e.iter().all(|j| j.is_constant())
    }
    pub fn nil_norm(&self) -> f64 {
        self.e.iter().map(|j| j.nil_norm()).fold(0.0, f64::max)
    }
    pub fn norm(&self) -> f64 {
        self.e.iter().map(|j| j.norm()).fold(0.0, f64::max)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.e[0].check_same(&o.e[0])?;
        Ok(self.mul(o))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        JetMat2::new(
            &(a * p) + &(b * r),
            &(a * q) + &(b * s),
            &(c * p) + &(d * r),
            &(c * q) + &(d * s),
        )
    }
    pub fn add(&self, o: &Self) -> Self {
        JetMat2 { e: [0, 1, 2, 3].map(|i| &self.e[i] + &o.e[i]) }
    }
    pub fn sub(&self, o: &Self) -> Self {
        JetMat2 { e: [0, 1, 2, 3].map(|i| &self.e[i] - &o.e[i]) }
    }
    pub fn scale(&self, s: &Jet<S>) -> Self {
        JetMat2 { e: [0, 1, 2, 3].map(|i| &self.e[i] * s) }
    }
    pub fn neg(&self) -> Self {
        JetMat2 { e: [0, 1, 2, 3].map(|i| self.e[i].neg()) }
    }
    pub fn det(&self) -> Jet<S> {
        &(self.a() * self.d()) - &(self.b() * self.c())
    }
    pub fn trace(&self) -> Jet<S> {
        self.a() + self.d()
    }
    /// Adjugate divided by the determinant.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let adj = JetMat2::new(self.d().clone(), self.b().neg(), self.c().neg(), self.a().clone());
        if det == Jet::one(self.alg()) {
            return Ok(adj);
        }
        Ok(adj.scale(&det.invert()?))
    }
    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::identity(self.alg());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
    /// Conjugation g X g⁻¹.
    pub fn conj_by(&self, g: &Self) -> Result<Self> {
        Ok(g.mul(self).mul(&g.inverse()?))
    }
    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.alg())
    }
    /// Distance to another matrix in the max-coefficient norm.
    pub fn dist(&self, o: &Self) -> f64 {
        self.sub(o).norm()
    }
}

impl<R: RealScalar> JetMat2<R> {
    pub fn complexify(&self) -> JetMat2<R::Complex> {
        self.map(|x| x.to_complex())
    }
}

impl<R: RealScalar> LieVec<R> {
    pub fn complexify(&self) -> LieVec<R::Complex> {
        LieVec::new(self.h.complexify(), self.e.complexify(), self.f.complexify())
    }
}

/// Traceless matrix h·H + e·E + f·F with H = diag(1,-1), E = [[0,1],[0,0]],
/// F = [[0,0],[1,0]].
#[derive(Debug, Clone)]
pub struct LieVec<S> {
    pub h: Jet<S>,
    pub e: Jet<S>,
    pub f: Jet<S>,
}

impl<S: Scalar> PartialEq for LieVec<S> {
    fn eq(&self, o: &Self) -> bool {
        self.h == o.h && self.e == o.e && self.f == o.f
    }
}

impl<S: Scalar> LieVec<S> {
    pub fn new(h: Jet<S>, e: Jet<S>, f: Jet<S>) -> Self {
        LieVec { h, e, f }
    }
    pub fn zero(alg: &Arc<AlgebraSpec>) -> Self {
        LieVec::new(Jet::zero(alg), Jet::zero(alg), Jet::zero(alg))
    }
    /// χ₀ = [[0,1],[0,0]].
    pub fn chi0(alg: &Arc<AlgebraSpec>) -> Self {
        LieVec::new(Jet::zero(alg), Jet::one(alg), Jet::zero(alg))
    }
    /// Scalar coordinates times a jet: ε·(h, e, f).
    pub fn from_coords(coords: &[S; 3], eps: &Jet<S>) -> Self {
        LieVec::new(eps.scale(&coords[0]), eps.scale(&coords[1]), eps.scale(&coords[2]))
    }
    pub fn to_mat(&self) -> JetMat2<S> {
        JetMat2::new(self.h.clone(), self.e.clone(), self.f.clone(), self.h.neg())
    }
    /// Reads the coordinates of a traceless matrix.
    pub fn from_mat(m: &JetMat2<S>) -> Result<Self> {
        let tr = m.trace();
        let ok = match S::MODE {
            Mode::Exact => tr.is_zero(),
            Mode::Floating => tr.norm() <= 1e-12 * m.norm().max(1.0),
        };
        if !ok {
            return Err(Error::Invariant("matrix is not traceless".into()));
        }
        Ok(LieVec::new(m.a().clone(), m.b().clone(), m.c().clone()))
    }
    pub fn add(&self, o: &Self) -> Self {
        LieVec::new(&self.h + &o.h, &self.e + &o.e, &self.f + &o.f)
    }
    pub fn body_coords(&self) -> [S; 3] {
        [self.h.body().clone(), self.e.body().clone(), self.f.body().clone()]
    }
    /// -det = h² + e f, so that X² = (h² + e f)·1.
    pub fn square_scalar(&self) -> Jet<S> {
        &(&self.h * &self.h) + &(&self.e * &self.f)
    }
}

const SERIES_CAP: usize = 400;

/// Taylor coefficients at x0 of C(x) = Σ xⁿ/(2n)! (offset 0) or
/// S(x) = Σ xⁿ/(2n+1)! (offset 1), up to order `m`.
fn even_odd_series_coeffs<S: Scalar>(x0: &S, m: usize, offset: usize) -> Result<Vec<S>> {
    if x0.is_zero() {
        // j-th coefficient is 1/(2j+offset)!
        let mut out = Vec::new();
        let mut fact = Rational::from_integer(1.into());
        let mut t = 1;
        for j in 0..m {
            while t <= 2 * j + offset {
                fact *= Rational::from_integer(t.into());
                t += 1;
            }
            out.push(S::from_rational(&(Rational::from_integer(1.into()) / &fact)));
        }
        return Ok(out);
    }
    if S::MODE == Mode::Exact {
        return Err(Error::NotRepresentable("exponential of a non-nilpotent body".into()));
    }
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        // Σ_{n≥j} binom(n,j) x0^{n-j} / (2n+offset)!
        let mut sum = S::zero();
        let mut term_pow = S::one(); // x0^{n-j}
        let mut converged = false;
        for n in j..j + SERIES_CAP {
            let mut coef = 1.0f64;
            for t in 0..j {
                coef *= (n - t) as f64 / (t + 1) as f64;
            }
            let mut inv_fact = 1.0f64;
            for t in 1..=(2 * n + offset) {
                inv_fact /= t as f64;
            }
            let term = term_pow.times(&S::from_f64(coef * inv_fact));
            sum = sum.plus(&term);
            if n > j + 2 && term.magnitude() <= 1e-18 * sum.magnitude().max(1e-300) {
                converged = true;
                break;
            }
            term_pow = term_pow.times(x0);
        }
        if !converged {
            return Err(Error::NoConvergence { tol: 1e-18, iters: SERIES_CAP });
        }
        out.push(sum);
    }
    Ok(out)
}

/// exp(X) = C(δ)·1 + S(δ)·X with δ = h² + e f (closed form for traceless
/// 2×2 matrices), composed with the jet Taylor series in δ - δ^#.
pub fn mat_exp<S: Scalar>(x: &LieVec<S>) -> Result<JetMat2<S>> {
    let alg = x.h.alg.clone();
    let delta = x.square_scalar();
    let m = alg.n.max(1);
    let cc = even_odd_series_coeffs(delta.body(), m, 0)?;
    let sc = even_odd_series_coeffs(delta.body(), m, 1)?;
    let c = delta_series(&delta, &cc);
    let s = delta_series(&delta, &sc);
    let xm = x.to_mat();
    let id = JetMat2::identity(&alg);
    Ok(id.scale(&c).add(&xm.scale(&s)))
}

fn delta_series<S: Scalar>(delta: &Jet<S>, coeffs: &[S]) -> Jet<S> {
    let alg = &delta.alg;
    let x = delta.nil();
    let mut acc = Jet::zero(alg);
    let mut p = Jet::one(alg);
    for (j, cj) in coeffs.iter().enumerate() {
        if j > 0 {
            p = &p * &x;
            if p.is_zero() {
                break;
            }
        }
        acc = &acc + &p.scale(cj);
    }
    acc
}

/// Φ⁻¹ for Φ = Σ_j (-ad χ₀)^j/(j+1)! on sl₂ coordinates (h, e, f).
fn phi_inverse() -> [[Rational; 3]; 3] {
    let r = |p: i64, q: i64| Rational::new(p.into(), q.into());
    // ad χ₀: (h, e, f) ↦ (f, -2h, 0)
    let ad = [[r(0, 1), r(0, 1), r(1, 1)], [r(-2, 1), r(0, 1), r(0, 1)], [r(0, 1), r(0, 1), r(0, 1)]];
    let mul = |a: &[[Rational; 3]; 3], b: &[[Rational; 3]; 3]| {
        let mut o: [[Rational; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    o[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
        o
    };
    let ad2 = mul(&ad, &ad);
    let mut phi: [[Rational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { r(1, 1) } else { r(0, 1) };
            phi[i][j] = id - &ad[i][j] / r(2, 1) + &ad2[i][j] / r(6, 1);
        }
    }
    let rows: Vec<Vec<Rational>> = phi.iter().map(|row| row.to_vec()).collect();
    let m = QMat::from_rows(&rows, 3);
    let mut inv: [[Rational; 3]; 3] = Default::default();
    for j in 0..3 {
        let mut e = vec![r(0, 1); 3];
        e[j] = r(1, 1);
        let col = m.solve(&e).expect("Φ is unipotent");
        for i in 0..3 {
            inv[i][j] = col[i].clone();
        }
    }
    inv
}

fn is_parabolic_normal<S: Scalar>(g: &JetMat2<S>) -> bool {
    let want = [1, 1, 0, 1].map(S::from_i64);
    let body = g.body();
    match S::MODE {
        Mode::Exact => body == want,
        Mode::Floating => body.iter().zip(&want).all(|(x, y)| x.minus(y).magnitude() < 1e-12),
    }
}

/// Logarithm with body χ₀ of a matrix with body [[1,1],[0,1]], by Newton
/// lifting through the powers of I.
pub fn mat_log_near_parabolic<S: Scalar>(g: &JetMat2<S>, tol: f64) -> Result<LieVec<S>> {
    if !is_parabolic_normal(g) {
        return Err(Error::Precondition("body is not [[1,1],[0,1]]".into()));
    }
    let alg = g.alg().clone();
    let phi_inv = phi_inverse();
    let mut chi = LieVec::chi0(&alg);
    for _ in 0..=alg.n + 1 {
        check_nilpotent(&chi)?;
        let e = mat_exp(&chi)?.inverse()?.mul(g);
        let d = e.sub(&JetMat2::identity(&alg));
        let done = match S::MODE {
            Mode::Exact => d.norm() == 0.0 && d.e.iter().all(|j| j.is_zero()),
            Mode::Floating => d.norm() <= tol,
        };
        if done {
            return Ok(chi);
        }
        let l = LieVec::from_mat(&mat_log_unipotent(&d))?;
        let coords = [&l.h, &l.e, &l.f];
        let upd: Vec<Jet<S>> = (0..3)
            .map(|i| {
                (0..3).fold(Jet::zero(&alg), |acc, j| &acc + &coords[j].scale(&S::from_rational(&phi_inv[i][j])))
            })
            .collect();
        chi = chi.add(&LieVec::new(upd[0].clone(), upd[1].clone(), upd[2].clone()));
    }
    Err(Error::NoConvergence { tol, iters: alg.n + 2 })
}

/// Logarithm of a matrix with identity body, as an sl₂ ⊗ I element.
pub fn log_unipotent<S: Scalar>(g: &JetMat2<S>) -> Result<LieVec<S>> {
    let alg = g.alg().clone();
    let d = g.sub(&JetMat2::identity(&alg));
    let body_ok = match S::MODE {
        Mode::Exact => d.body().iter().all(|x| x.is_zero()),
        Mode::Floating => d.body().iter().all(|x| x.magnitude() < 1e-12),
    };
    if !body_ok {
        return Err(Error::Precondition("body is not the identity".into()));
    }
    LieVec::from_mat(&mat_log_unipotent(&d))
}

/// log(1 + D) for a matrix D with nilpotent entries.
fn mat_log_unipotent<S: Scalar>(d: &JetMat2<S>) -> JetMat2<S> {
    let alg = d.alg().clone();
    let mut acc = JetMat2::from_ints(&alg, [0, 0, 0, 0]);
    let mut p = JetMat2::identity(&alg);
    for j in 1..=alg.n.max(1) {
        p = p.mul(d);
        if p.e.iter().all(|x| x.is_zero()) {
            break;
        }
        let c = S::from_ratio(if j % 2 == 1 { 1 } else { -1 }, j as i64);
        acc = acc.add(&p.scale(&Jet::constant(&alg, c)));
    }
    acc
}

/// χ² = (h² + ef)·1, so χ^{2N} = 0 iff (h² + ef)^N = 0.
fn check_nilpotent<S: Scalar>(chi: &LieVec<S>) -> Result<()> {
    let n = chi.h.alg.n.max(1) as i64;
    let delta = chi.square_scalar();
    if S::MODE == Mode::Exact && !delta.powi(n)?.is_zero() {
        return Err(Error::Invariant("χ is not nilpotent as a jet matrix".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Central,
}

pub fn classify_body<R: RealScalar>(g: &JetMat2<R>) -> BodyClass {
    let [a, b, c, d] = g.body();
    let t = a.plus(&d).to_f64().abs();
    let eps = if R::MODE == Mode::Exact { 0.0 } else { 1e-12 };
    if t < 2.0 - eps {
        BodyClass::Elliptic
    } else if t > 2.0 + eps {
        BodyClass::Hyperbolic
    } else if b.magnitude() <= eps && c.magnitude() <= eps && a.minus(&d).magnitude() <= eps {
        BodyClass::Central
    } else {
        BodyClass::Parabolic
    }
}

/// The unique fixed point in H of a matrix with elliptic body, by Newton
/// lifting from the classical root of c z² + (d - a) z - b.
pub fn elliptic_fixed_point<R>(g: &JetMat2<R>) -> Result<Jet<R::Complex>>
where
    R: RealScalar,
    R::Complex: ComplexScalar<Real = R>,
{
    if classify_body(g) != BodyClass::Elliptic {
        return Err(Error::Precondition("body is not elliptic".into()));
    }
    let alg = g.alg().clone();
    let [a, _b, c, d] = g.body();
    let tr = a.plus(&d);
    let disc = R::from_i64(4).minus(&tr.times(&tr));
    let root = disc
        .sqrt_checked()
        .ok_or_else(|| Error::NotRepresentable("square root of the discriminant".into()))?;
    let two_c_inv = c.plus(&c).recip().ok_or_else(|| Error::Precondition("c has zero body".into()))?;
    let re = a.minus(&d).times(&two_c_inv);
    let mut im = root.times(&two_c_inv);
    if im.sign() == std::cmp::Ordering::Less {
        im = im.negate();
    }
    let gc = g.complexify();
    let [ca, cb, cc, cd] = &gc.e;
    let dma = cd - ca;
    let mut z = Jet::constant(&alg, R::Complex::from_parts(re, im));
    for _ in 0..=alg.n + 2 {
        let qz = &(&(&(cc * &z) * &z) + &(&dma * &z)) - cb;
        let small = match R::MODE {
            Mode::Exact => qz.is_zero(),
            Mode::Floating => qz.norm() <= 1e-15 * gc.norm(),
        };
        if small {
            return Ok(z);
        }
        let dq = &(cc * &z).scale(&R::Complex::from_i64(2)) + &dma;
        z = &z - &qz.try_div(&dq)?;
    }
    Err(Error::NoConvergence { tol: 0.0, iters: alg.n + 3 })
}

/// φ(z) = [[√y, x/√y], [0, 1/√y]] with φ(z)·i = z.
pub fn transport_to_i<C>(z: &Jet<C>) -> Result<JetMat2<C::Real>>
where
    C: ComplexScalar,
    C::Real: Analytic,
{
    let x = z.re();
    let y = z.im();
    if y.body().sign() != std::cmp::Ordering::Greater {
        return Err(Error::Precondition("Im z must be positive".into()));
    }
    let root = y
        .body()
        .sqrt_checked()
        .ok_or_else(|| Error::NotRepresentable("square root of Im z".into()))?;
    let s = y.nth_root(2, Some(&root))?;
    let sinv = s.invert()?;
    Ok(JetMat2::new(s.clone(), &x * &sinv, Jet::zero(&x.alg), sinv))
}

/// g̃⁻¹ γ g̃ for g̃ = φ(z̃₀) written through x and y only:
/// [[a - xc, (ax + b - cx² - dx)/y], [cy, cx + d]].
fn conj_by_transport(g: &JetMat2<Surd>, x: &Jet<Surd>, y: &Jet<Surd>) -> Result<JetMat2<Surd>> {
    let [a, b, c, d] = &g.e;
    let yinv = y.invert()?;
    let m12 = &(&(&(a * x) + b) - &(&(c * x) * x)) - &(d * x);
    Ok(JetMat2::new(a - &(x * c), &m12 * &yinv, c * y, &(c * x) + d))
}

/// Conjugates a finite-order element with elliptic body into K = SO(2) and
/// checks that the result has no nilpotent part.
pub fn conjugation_collapse(g: &JetMat2<Rational>, n: i64) -> Result<JetMat2<Surd>> {
    let pn = g.powi(n)?;
    if !pn.is_identity() && !pn.powi(2)?.is_identity() {
        return Err(Error::Precondition(format!("element does not have order {n} or {}", 2 * n)));
    }
    let gs = g.map(|x| Surd::from(x.clone()));
    let z0 = elliptic_fixed_point(&gs)?;
    let x = z0.re();
    let y = z0.im();
    let out = match transport_to_i(&z0) {
        Ok(t) => {
            let direct = t.inverse()?.mul(&gs).mul(&t);
            let factored = conj_by_transport(&gs, &x, &y)?;
            if direct != factored {
                return Err(Error::Invariant("transport conjugation mismatch".into()));
            }
            direct
        }
        // √y outside Q(√d): φ enters only through x and y = (√y)²
        Err(Error::NotRepresentable(_)) => conj_by_transport(&gs, &x, &y)?,
        Err(e) => return Err(e),
    };
    if !out.is_body() {
        return Err(Error::Invariant("conjugation collapse failed: nilpotent part survives".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn eps(alg: &Arc<AlgebraSpec>) -> Jet<Rational> {
        Jet::basis(alg, 1)
    }

    #[test]
    fn exp_diagonal() {
        let a = AlgebraSpec::dual(3);
        let x = LieVec::new(eps(&a), Jet::zero(&a), Jet::zero(&a));
        let g = mat_exp(&x).unwrap();
        let q = |v: [(i64, i64); 3]| Jet::new(&a, v.iter().map(|&(p, d)| rat(p, d)).collect());
        assert_eq!(g.a(), &q([(1, 1), (1, 1), (1, 2)]));
        assert_eq!(g.d(), &q([(1, 1), (-1, 1), (1, 2)]));
        assert!(g.b().is_zero() && g.c().is_zero());
    }

    #[test]
    fn log_round_trip() {
        let a = AlgebraSpec::dual(4);
        let chi = LieVec::chi0(&a).add(&LieVec::new(eps(&a), Jet::zero(&a), eps(&a).scale(&rat(3, 1))));
        let g = mat_exp(&chi).unwrap();
        assert_eq!(mat_log_near_parabolic(&g, 0.0).unwrap(), chi);
        let g2 = JetMat2::new(Jet::one(&a), Jet::one(&a).add_scalar(&rat(0, 1)).try_add(&eps(&a)).unwrap(), Jet::zero(&a), Jet::one(&a));
        let l = mat_log_near_parabolic(&g2, 0.0).unwrap();
        assert_eq!(mat_exp(&l).unwrap(), g2);
    }

    #[test]
    fn fixed_points() {
        let a = AlgebraSpec::dual(2);
        let s = JetMat2::<Surd>::from_ints(&a, [0, 1, -1, 0]);
        let z = elliptic_fixed_point(&s).unwrap();
        assert_eq!(z, Jet::constant(&a, crate::scalar::ExactComplex::i()));
        let r = JetMat2::<Surd>::from_ints(&a, [0, 1, -1, -1]);
        let z = elliptic_fixed_point(&r).unwrap().body().to_c64();
        let w = num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((z - w).norm() < 1e-15);
    }
}
