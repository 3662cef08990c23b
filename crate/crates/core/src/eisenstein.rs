//! First-order deformed Eisenstein series E_k = Σ φ|γ̃ over Υ_∞\Υ,
//! computed coset class by coset class in the cusp coordinate of Ω.
//!
//! For a class with bottom row (c, d), c ≥ 1, the frame transform of the
//! contribution is h′(z)^{k/2} with h = Ω⁻¹∘γ̃∘Ω, and the Υ_∞-translates
//! contribute h′(z + n)^{k/2}. At first order (I² = 0), writing
//! w = z + d/c, h = γz + ε·A(w) with A a Laurent polynomial, so
//! h′^{k/2} = (cw)^{−k} + ε·(k/2)·(cw)^{2−k}·A′(w) is a finite sum of powers
//! w^{−m}, and the n-sum of each is given in closed form by the Lipschitz
//! formula Σₙ (w+n)^{−m} = (−2πi)^m/(m−1)! Σ_{r≥1} r^{m−1} e^{2πirw}.
//! Classes are enumerated as the products of T̃ and L̃ (lifts of
//! [[1,1],[0,1]] and [[1,0],[1,1]]) forming a binary tree over coprime
//! pairs (c, d) ≥ 1, so every deformed representative is an exact group
//! element; the classes with d ≤ c are summed.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{Frame, QSeriesJet};
use crate::jet::Jet;
use crate::lattice::{word_l, word_t, PLattice};
use crate::scalar::rat_to_f64;
use crate::sl2::JetMat2;

type C64 = Complex64;

/// Maximal number of ideal components supported by the first-order sum.
const MAX_IDEAL: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct EisensteinConfig {
    pub k: i64,
    /// Classes with c ≤ bound are summed.
    pub bound: i64,
    /// Truncation order M.
    pub m: usize,
    pub threads: usize,
}

impl Default for EisensteinConfig {
    fn default() -> Self {
        EisensteinConfig { k: 6, bound: 5000, m: 10, threads: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct EisensteinReport {
    pub form: QSeriesJet,
    /// Per-coefficient change between the partial sums at bound and bound/2.
    pub tail: Vec<f64>,
    pub tail_max: f64,
    /// Number of coset classes summed (including the identity class).
    pub classes: u64,
    pub seconds: f64,
}

/// A node matrix γ̃ = body + Σ_b ε_b·eps[b] (first order).
#[derive(Clone, Copy)]
struct Node {
    body: [i64; 4],
    eps: [[f64; 4]; MAX_IDEAL],
}

fn mul2i(x: &[i64; 4], y: &[i64; 4]) -> [i64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

fn mul2f(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

fn to_f(x: &[i64; 4]) -> [f64; 4] {
    x.map(|v| v as f64)
}

impl Node {
    fn mul(&self, o: &Node, nb: usize) -> Node {
        let mut eps = [[0.0; 4]; MAX_IDEAL];
        let (sb, ob) = (to_f(&self.body), to_f(&o.body));
        for b in 0..nb {
            let p = mul2f(&sb, &o.eps[b]);
            let q = mul2f(&self.eps[b], &ob);
            eps[b] = [p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]];
        }
        Node { body: mul2i(&self.body, &o.body), eps }
    }
}

/// Fixed data of the sum: Ω's ε-polynomials and the Lipschitz constants.
struct Setup {
    k: i64,
    m: usize,
    nb: usize,
    /// p_b(z) ascending coefficients (degree ≤ 3).
    p: Vec<[C64; 4]>,
    /// (−2πi)^μ/(μ−1)! for μ = 0..=k+2.
    lip: Vec<C64>,
}

impl Setup {
    fn new(frame: &Frame, ideal: &[usize], k: i64, m: usize) -> Result<Self> {
        let coeffs = &frame.omega.coeffs;
        if coeffs.len() > 4 {
            return Err(Error::Precondition("Ω of degree > 3 is not first order".into()));
        }
        let p = ideal
            .iter()
            .map(|&b| {
                let mut out = [C64::new(0.0, 0.0); 4];
                for (j, c) in coeffs.iter().enumerate() {
                    out[j] = c.c[b];
                }
                out
            })
            .collect();
        let mut lip = vec![C64::new(0.0, 0.0); (k + 3) as usize];
        let base = C64::new(0.0, -2.0 * PI);
        let mut pow = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        for (mu, slot) in lip.iter_mut().enumerate() {
            if mu >= 1 {
                pow *= base;
                if mu >= 2 {
                    fact *= (mu - 1) as f64;
                }
                *slot = pow / fact;
            }
        }
        Ok(Setup { k, m, nb: ideal.len(), p, lip })
    }
}

/// Coefficients of p(z + s) in z.
fn shift_poly(p: &[C64; 4], s: f64) -> [C64; 4] {
    // Horner-style Taylor shift for degree ≤ 3
    [
        p[0] + s * (p[1] + s * (p[2] + s * p[3])),
        p[1] + s * (2.0 * p[2] + 3.0 * s * p[3]),
        p[2] + 3.0 * s * p[3],
        p[3],
    ]
}

/// Accumulated q-coefficients a_1..a_M: body and one row per ideal index.
#[derive(Clone)]
struct Acc {
    body: Vec<C64>,
    eps: Vec<Vec<C64>>,
}

impl Acc {
    fn new(m: usize, nb: usize) -> Self {
        Acc { body: vec![C64::new(0.0, 0.0); m + 1], eps: vec![vec![C64::new(0.0, 0.0); m + 1]; nb] }
    }
    fn add(&mut self, o: &Acc) {
        for (x, y) in self.body.iter_mut().zip(&o.body) {
            *x += y;
        }
        for (row, orow) in self.eps.iter_mut().zip(&o.eps) {
            for (x, y) in row.iter_mut().zip(orow) {
                *x += y;
            }
        }
    }
}

/// Adds the contribution of the class of `n` (c ≥ 1) to `acc`.
fn add_class(s: &Setup, n: &Node, acc: &mut Acc) {
    let [a, _, c, d] = n.body;
    let (af, cf, df) = (a as f64, c as f64, d as f64);
    let s0 = df / cf;
    let k = s.k;
    let zeta = C64::from_polar(1.0, 2.0 * PI * s0);
    // body: c^{-k}·Lip_k·r^{k−1}·ζ^r
    let ck = cf.powi(-(k as i32));
    // Laurent coefficients A_j of A(w), j = −3..=1 stored at j + 3
    let mut coef = [[C64::new(0.0, 0.0); 5]; MAX_IDEAL];
    let c2 = cf * cf;
    for b in 0..s.nb {
        let [al, be, ka, de] = n.eps[b];
        let pi_ = shift_poly(&s.p[b], -s0);
        let rho = shift_poly(&s.p[b], af / cf);
        let mut aj = [C64::new(0.0, 0.0); 5];
        // γ′·p = Σ π_j w^{j−2} / c²
        for j in 0..4 {
            aj[j + 1] += pi_[j] / c2;
        }
        // −p(γz) = −Σ ρ_j (−1)^j c^{−2j} w^{−j}
        let mut f = 1.0;
        for j in 0..4 {
            aj[3 - j] -= rho[j] * f;
            f *= -1.0 / c2;
        }
        // G = Δ-variation of γ at z
        let dk = de - ka * s0;
        aj[3] += C64::from(al / cf - af * ka / c2);
        aj[2] += C64::from((be - al * s0) / cf - (af * dk - ka / cf) / c2);
        aj[1] += C64::from(dk / (c2 * cf));
        coef[b] = aj;
    }
    let half_k = k as f64 / 2.0;
    let c2k = cf.powi(2 - k as i32);
    let mut zr = C64::new(1.0, 0.0);
    for r in 1..=s.m {
        zr *= zeta;
        let rf = r as f64;
        acc.body[r] += s.lip[k as usize] * rf.powi(k as i32 - 1) * ck * zr;
        for b in 0..s.nb {
            let mut t = C64::new(0.0, 0.0);
            for (idx, aj) in coef[b].iter().enumerate() {
                let j = idx as i64 - 3;
                if j == 0 {
                    continue;
                }
                let mu = (k - 1 - j) as usize;
                t += (j as f64) * aj * s.lip[mu] * rf.powi(mu as i32 - 1);
            }
            acc.eps[b][r] += half_k * c2k * t * zr;
        }
    }
}

fn to_node(g: &JetMat2<crate::scalar::Rational>, ideal: &[usize]) -> Result<Node> {
    let body = g.body();
    let mut bi = [0i64; 4];
    for i in 0..4 {
        if !body[i].is_integer() {
            return Err(Error::Precondition("coset generator body is not integral".into()));
        }
        bi[i] = body[i].to_integer().try_into().map_err(|_| Error::Precondition("entry overflow".into()))?;
    }
    let mut eps = [[0.0; 4]; MAX_IDEAL];
    for (slot, &b) in ideal.iter().enumerate() {
        for i in 0..4 {
            eps[slot][i] = rat_to_f64(&g.e[i].c[b]);
        }
    }
    Ok(Node { body: bi, eps })
}

/// Depth-first sum over the subtree rooted at `root`; returns the sums
/// over classes with c ≤ bound and with c ≤ bound/2, and the class count.
fn sum_subtree(s: &Setup, root: Node, t: &Node, l: &Node, bound: i64) -> (Acc, Acc, u64) {
    let mut full = Acc::new(s.m, s.nb);
    let mut half = Acc::new(s.m, s.nb);
    let mut count = 0u64;
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let (c, d) = (n.body[2], n.body[3]);
        if c > bound || d > bound {
            continue;
        }
        if d <= c {
            count += 1;
            let mut one = Acc::new(s.m, s.nb);
            add_class(s, &n, &mut one);
            full.add(&one);
            if 2 * c <= bound {
                half.add(&one);
            }
        }
        stack.push(n.mul(l, s.nb));
        stack.push(n.mul(t, s.nb));
    }
    (full, half, count)
}

fn ideal_of(l: &PLattice) -> Result<Vec<usize>> {
    if l.alg.least_nilpotency() > 2 {
        return Err(Error::Precondition("the Eisenstein sum is implemented for first-order algebras (I² = 0)".into()));
    }
    let ideal = l.alg.ideal_indices();
    if ideal.len() > MAX_IDEAL {
        return Err(Error::Precondition(format!("at most {MAX_IDEAL} deformation parameters supported")));
    }
    Ok(ideal)
}

fn assemble(frame: &Arc<Frame>, k: i64, ideal: &[usize], acc: &Acc) -> QSeriesJet {
    let alg = frame.alg().clone();
    let coeffs = (0..acc.body.len())
        .map(|r| {
            let mut j = Jet::zero(&alg);
            if r == 0 {
                j.c[0] = C64::new(1.0, 0.0);
            } else {
                j.c[0] = acc.body[r];
                for (slot, &b) in ideal.iter().enumerate() {
                    j.c[b] = acc.eps[slot][r];
                }
            }
            j
        })
        .collect();
    QSeriesJet { weight: k, coeffs, frame: frame.clone() }
}

/// Deformed Eisenstein series of weight k for a first-order lift of
/// SL(2,Z), summed over classes with c ≤ bound, with a tail estimate from
/// the partial sum at bound/2. Results do not depend on `threads`.
pub fn deformed_eisenstein(l: &PLattice, frame: &Arc<Frame>, cfg: &EisensteinConfig) -> Result<EisensteinReport> {
    let start = Instant::now();
    let k = cfg.k;
    if k < 6 || k % 2 != 0 {
        return Err(Error::Precondition("the Eisenstein sum needs even k ≥ 6".into()));
    }
    if cfg.bound < 2 || cfg.m < 1 {
        return Err(Error::Precondition("bound must be ≥ 2 and M ≥ 1".into()));
    }
    let ideal = ideal_of(l)?;
    let s = Setup::new(frame, &ideal, k, cfg.m)?;
    let t = to_node(&l.eval_word(&word_t()), &ideal)?;
    let lnode = to_node(&l.eval_word(&word_l()), &ideal)?;
    // breadth-first frontier, processed in a fixed order
    let mut head = Acc::new(s.m, s.nb);
    let mut head_half = Acc::new(s.m, s.nb);
    let mut classes = 1u64;
    let mut frontier = vec![lnode];
    let target = 64 * cfg.threads.max(1);
    while frontier.len() < target && !frontier.is_empty() {
        let mut next = Vec::new();
        for n in &frontier {
            let (c, d) = (n.body[2], n.body[3]);
            if c > cfg.bound || d > cfg.bound {
                continue;
            }
            if d <= c {
                classes += 1;
                let mut one = Acc::new(s.m, s.nb);
                add_class(&s, n, &mut one);
                head.add(&one);
                if 2 * c <= cfg.bound {
                    head_half.add(&one);
                }
            }
            next.push(n.mul(&t, s.nb));
            next.push(n.mul(&lnode, s.nb));
        }
        frontier = next;
    }
    let threads = cfg.threads.max(1);
    let chunk = frontier.len().div_ceil(threads).max(1);
    let results: Vec<Vec<(Acc, Acc, u64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = frontier
            .chunks(chunk)
            .map(|part| {
                let s = &s;
                let (t, lnode) = (&t, &lnode);
                scope.spawn(move || part.iter().map(|n| sum_subtree(s, *n, t, lnode, cfg.bound)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread")).collect()
    });
    let mut full = head;
    let mut half = head_half;
    for (f, h, n) in results.iter().flatten() {
        full.add(f);
        half.add(h);
        classes += n;
    }
    let form = assemble(frame, k, &ideal, &full);
    let half_form = assemble(frame, k, &ideal, &half);
    let tail: Vec<f64> = form.coeffs.iter().zip(&half_form.coeffs).map(|(a, b)| (a - b).norm()).collect();
    let tail_max = tail.iter().copied().fold(0.0, f64::max);
    Ok(EisensteinReport { form, tail, tail_max, classes, seconds: start.elapsed().as_secs_f64() })
}

/// q-coefficients a_1..a_M (index 0 unused) of the contribution of the
/// single class of the deformed element `g` (bottom row c ≥ 1), summed in
/// closed form over its Υ_∞-translates.
pub fn class_coefficients(l: &PLattice, frame: &Frame, g: &JetMat2<crate::scalar::Rational>, k: i64, m: usize) -> Result<Vec<Jet<C64>>> {
    let ideal = ideal_of(l)?;
    let s = Setup::new(frame, &ideal, k, m)?;
    let n = to_node(g, &ideal)?;
    if n.body[2] < 1 {
        return Err(Error::Precondition("class needs c ≥ 1".into()));
    }
    let mut acc = Acc::new(m, ideal.len());
    add_class(&s, &n, &mut acc);
    let alg = l.alg.clone();
    Ok((0..=m)
        .map(|r| {
            let mut j = Jet::zero(&alg);
            j.c[0] = acc.body[r];
            for (slot, &b) in ideal.iter().enumerate() {
                j.c[b] = acc.eps[slot][r];
            }
            j
        })
        .collect())
}

/// The frame transform h′(z)^{k/2} of φ|γ̃ at z, evaluated directly through
/// Ω, Ω⁻¹ and the Möbius action (no Laurent expansion).
pub fn frame_term_direct(frame: &Frame, g: &JetMat2<C64>, k: i64, z: &Jet<C64>) -> Result<Jet<C64>> {
    use crate::mobius::{cocycle_jet, mobius_jet};
    use crate::scalar::{Exponent, Rational};
    let om = &frame.omega;
    let w = om.eval(z);
    let u = mobius_jet(g, &w)?;
    let jk = cocycle_jet(g, &w)?.powi(k)?;
    let zu = frame.to_frame(&u)?;
    let half = |e: i64| Exponent::Rational(Rational::new(e.into(), 2.into()));
    let phi = om.eval_derivative(&zu).pow(&half(-k))?;
    Ok(&(&phi * &jk) * &om.eval_derivative(z).pow(&half(k))?)
}
