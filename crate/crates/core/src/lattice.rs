//! Finitely presented lattices, deformation cohomology H¹(Γ, sl₂) with Ad
//! coefficients, order-by-order lifting of cocycles to exact P-lattices,
//! and generator-word decomposition in SL(2,Z).
//!
//! Conventions: sl₂ coordinates are (h, e, f) for [[h, e], [f, -h]]; a
//! first-order deformation is γ̃ = γ·exp(εu) (right multiplication), so the
//! coboundary of v is u_γ = Ad_{γ⁻¹}v − v.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{span_basis, span_rank, QMat};
use crate::scalar::{rat, Rational};
use crate::sl2::{log_unipotent, mat_exp, JetMat2, LieVec};

/// Exact classical 2×2 matrix [a, b, c, d].
pub type Mat2 = [Rational; 4];

pub fn mat2(m: [i64; 4]) -> Mat2 {
    m.map(|x| rat(x, 1))
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

/// Inverse of a determinant-one matrix (adjugate).
pub fn mat2_inv(x: &Mat2) -> Mat2 {
    [x[3].clone(), -x[1].clone(), -x[2].clone(), x[0].clone()]
}

pub fn mat2_det(x: &Mat2) -> Rational {
    &x[0] * &x[3] - &x[1] * &x[2]
}

pub fn mat2_identity() -> Mat2 {
    mat2([1, 0, 0, 1])
}

pub fn mat2_neg(x: &Mat2) -> Mat2 {
    x.clone().map(|v| -v)
}

/// A word in the generators: signed 1-based indices (−i is the inverse of
/// generator i).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn letters(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().map(|&l| ((l.unsigned_abs() - 1) as usize, l > 0))
    }
    /// Runs of equal letters as (generator, exponent).
    pub fn syllables(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, fwd) in self.letters() {
            let e = if fwd { 1 } else { -1 };
            match out.last_mut() {
                Some((h, p)) if *h == g => *p += e,
                _ => out.push((g, e)),
            }
        }
        out.retain(|&(_, p)| p != 0);
        out
    }
    pub fn concat(&self, o: &Word) -> Word {
        Word(self.0.iter().chain(&o.0).copied().collect())
    }
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        Word(base.0.iter().copied().cycle().take(base.0.len() * n.unsigned_abs() as usize).collect())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub name: String,
    pub matrix: Mat2,
}

/// Generators with exact matrices and relation words; `signs[i]` records
/// whether relation i evaluates to +1 or −1.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub name: String,
    pub generators: Vec<Generator>,
    pub relations: Vec<Word>,
    pub signs: Vec<i8>,
}

impl GroupPresentation {
    pub fn new(name: &str, generators: Vec<Generator>, relations: Vec<Word>) -> Result<Self> {
        for g in &generators {
            if !mat2_det(&g.matrix).is_one() {
                return Err(Error::Precondition(format!("generator {} does not have determinant 1", g.name)));
            }
        }
        let mut p = GroupPresentation { name: name.into(), generators, relations, signs: Vec::new() };
        for (i, r) in p.relations.iter().enumerate() {
            if r.letters().any(|(g, _)| g >= p.generators.len()) {
                return Err(Error::Precondition(format!("relation {i} uses an unknown generator")));
            }
            let m = p.eval_classical(r);
            let sign = if m == mat2_identity() {
                1
            } else if m == mat2_neg(&mat2_identity()) {
                -1
            } else {
                return Err(Error::BadRelation { index: i });
            };
            p.signs.push(sign);
        }
        Ok(p)
    }
    pub fn gen_count(&self) -> usize {
        self.generators.len()
    }
    pub fn eval_classical(&self, w: &Word) -> Mat2 {
        let mut acc = mat2_identity();
        for (g, fwd) in w.letters() {
            let m = &self.generators[g].matrix;
            acc = mat2_mul(&acc, &if fwd { m.clone() } else { mat2_inv(m) });
        }
        acc
    }
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }
}

fn gen(name: &str, m: [i64; 4]) -> Generator {
    Generator { name: name.into(), matrix: mat2(m) }
}

/// SL(2,Z) = ⟨R, S | R³ = S⁴ = 1⟩ with R = [[0,1],[-1,-1]], S = [[0,1],[-1,0]].
pub fn presentation_sl2z() -> GroupPresentation {
    GroupPresentation::new(
        "sl2z",
        vec![gen("R", [0, 1, -1, -1]), gen("S", [0, 1, -1, 0])],
        vec![Word(vec![1, 1, 1]), Word(vec![2, 2, 2, 2])],
    )
    .expect("valid presentation")
}

/// Word for T = S³R = [[1,1],[0,1]] in the SL(2,Z) presentation.
pub fn word_t() -> Word {
    Word(vec![2, 2, 2, 1])
}

/// Word for L = S R² = [[1,0],[1,1]] in the SL(2,Z) presentation.
pub fn word_l() -> Word {
    Word(vec![2, 1, 1])
}

/// Hyperbolic rational matrices used as surface-group generator data.
fn hyperbolic_pool(i: usize) -> [i64; 4] {
    const POOL: [[i64; 4]; 8] = [
        [2, 1, 1, 1],
        [1, 1, 1, 2],
        [3, 2, 1, 1],
        [1, -1, -1, 2],
        [2, 3, 1, 2],
        [5, 2, 2, 1],
        [1, 2, 1, 3],
        [4, 3, 1, 1],
    ];
    POOL[i % POOL.len()]
}

/// Presentation of a surface group of genus g with m punctures:
/// generators A₁,B₁,…,A_g,B_g,C₁,…,C_m with the single relation
/// Π[Aᵢ,Bᵢ]·C₁⋯C_m = 1. The matrices are explicit rational data that
/// satisfy the relation and generate an irreducible (Zariski-dense)
/// subgroup; they need not be discrete.
pub fn presentation_surface(g: usize, m: usize) -> Result<GroupPresentation> {
    if g == 0 && m < 3 {
        return Err(Error::Precondition("a genus-0 surface needs at least 3 punctures".into()));
    }
    if g + m == 0 {
        return Err(Error::Precondition("empty surface".into()));
    }
    let mut gens: Vec<Generator> = Vec::new();
    let mut pool = 0;
    let mut next = || {
        pool += 1;
        hyperbolic_pool(pool - 1)
    };
    let mut i = 0;
    while i < g {
        if m == 0 && i + 1 < g && (g - i) % 2 == 0 {
            // [A,B][B,A] = 1
            let a = next();
            let b = next();
            gens.push(gen(&format!("A{}", i + 1), a));
            gens.push(gen(&format!("B{}", i + 1), b));
            gens.push(gen(&format!("A{}", i + 2), b));
            gens.push(gen(&format!("B{}", i + 2), a));
            i += 2;
        } else if m == 0 && i + 1 == g {
            // odd genus without punctures: a commuting pair closes the relation
            let a = next();
            gens.push(gen(&format!("A{}", i + 1), a));
            gens.push(gen(&format!("B{}", i + 1), a));
            i += 1;
        } else {
            gens.push(gen(&format!("A{}", i + 1), next()));
            gens.push(gen(&format!("B{}", i + 1), next()));
            i += 1;
        }
    }
    let ng = gens.len();
    let mut rel: Vec<i32> = Vec::new();
    for j in 0..g {
        let a = (2 * j + 1) as i32;
        let b = (2 * j + 2) as i32;
        rel.extend([a, b, -a, -b]);
    }
    for j in 0..m {
        rel.push((ng + j + 1) as i32);
    }
    if m > 0 {
        for j in 0..m - 1 {
            gens.push(gen(&format!("C{}", j + 1), next()));
        }
        // C_m closes the relation
        let mut partial = GroupPresentation { name: String::new(), generators: gens.clone(), relations: vec![], signs: vec![] };
        partial.generators.push(gen("tmp", [1, 0, 0, 1]));
        let prefix = Word(rel[..rel.len() - 1].to_vec());
        let p = partial.eval_classical(&prefix);
        gens.push(Generator { name: format!("C{m}"), matrix: mat2_inv(&p) });
    }
    GroupPresentation::new(&format!("surface-g{g}-m{m}"), gens, vec![Word(rel)])
}

/// Γ₁(4): free on T = [[1,1],[0,1]] and U = [[1,0],[-4,1]], presented with
/// the parabolic C = (TU)⁻¹ and the relation T·U·C = 1. Cusps ∞ and 0 are
/// even, 1/2 is odd.
pub fn presentation_gamma1_4() -> GroupPresentation {
    GroupPresentation::new(
        "gamma1-4",
        vec![gen("T", [1, 1, 0, 1]), gen("U", [1, 0, -4, 1]), gen("C", [1, -1, 4, -3])],
        vec![Word(vec![1, 2, 3])],
    )
    .expect("valid presentation")
}

/// The commutator subgroup of SL(2,Z): a once-punctured torus group,
/// free on A = [[1,1],[1,2]] and B = [[1,-1],[-1,2]], with C = [A,B]⁻¹.
pub fn presentation_punctured_torus() -> GroupPresentation {
    let a = mat2([1, 1, 1, 2]);
    let b = mat2([1, -1, -1, 2]);
    let comm = mat2_mul(&mat2_mul(&a, &b), &mat2_mul(&mat2_inv(&a), &mat2_inv(&b)));
    GroupPresentation::new(
        "punctured-torus",
        vec![
            Generator { name: "A".into(), matrix: a },
            Generator { name: "B".into(), matrix: b },
            Generator { name: "C".into(), matrix: mat2_inv(&comm) },
        ],
        vec![Word(vec![1, 2, -1, -2, 3])],
    )
    .expect("valid presentation")
}

/// One generator with the trivially satisfied relation g·g⁻¹.
pub fn presentation_trivial() -> GroupPresentation {
    GroupPresentation::new("trivial", vec![gen("g", [2, 1, 1, 1])], vec![Word(vec![1, -1])]).expect("valid")
}

/// Looks up a named preset.
pub fn preset(name: &str) -> Result<GroupPresentation> {
    match name {
        "sl2z" => Ok(presentation_sl2z()),
        "genus2" => presentation_surface(2, 0),
        "gamma1-4" => Ok(presentation_gamma1_4()),
        "punctured-torus" => Ok(presentation_punctured_torus()),
        "trivial" => Ok(presentation_trivial()),
        other => {
            // surface-g<g>-m<m>
            let rest = other
                .strip_prefix("surface-g")
                .ok_or_else(|| Error::Precondition(format!("unknown preset {other}")))?;
            let (g, m) = rest
                .split_once("-m")
                .ok_or_else(|| Error::Precondition(format!("unknown preset {other}")))?;
            let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Precondition(format!("unknown preset {other}")));
            presentation_surface(parse(g)?, parse(m)?)
        }
    }
}

// ---------------------------------------------------------------- Ad and Fox calculus

/// Ad_g on sl₂ coordinates (h, e, f) as a 3×3 rational matrix.
pub fn ad_matrix(g: &Mat2) -> QMat {
    let gi = mat2_inv(g);
    let basis = [mat2([1, 0, 0, -1]), mat2([0, 1, 0, 0]), mat2([0, 0, 1, 0])];
    let mut m = QMat::zeros(3, 3);
    for (j, b) in basis.iter().enumerate() {
        let x = mat2_mul(&mat2_mul(g, b), &gi);
        m.set(0, j, x[0].clone());
        m.set(1, j, x[1].clone());
        m.set(2, j, x[2].clone());
    }
    m
}

fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let mut o = QMat::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut s = Rational::zero();
            for k in 0..a.cols {
                s += a.get(i, k) * b.get(k, j);
            }
            o.set(i, j, s);
        }
    }
    o
}

/// Linearized relation map u ↦ D_w(u) = Σ_j Ad_{suffix_j⁻¹} v_j, with
/// v_j = u_g for a letter g and −Ad_g u_g for g⁻¹; a 3 × 3G matrix.
pub fn fox_matrix(pres: &GroupPresentation, w: &Word) -> QMat {
    let ng = pres.gen_count();
    let mut out = QMat::zeros(3, 3 * ng);
    let letters: Vec<(usize, bool)> = w.letters().collect();
    let mut suffix = mat2_identity(); // product of letters after position j
    for &(g, fwd) in letters.iter().rev() {
        let gm = &pres.generators[g].matrix;
        let mut block = ad_matrix(&mat2_inv(&suffix));
        if !fwd {
            block = qmat_mul(&block, &ad_matrix(gm));
            block.data.iter_mut().for_each(|x| *x = -x.clone());
        }
        for r in 0..3 {
            for c in 0..3 {
                let v = out.get(r, 3 * g + c) + block.get(r, c);
                out.set(r, 3 * g + c, v);
            }
        }
        let letter = if fwd { gm.clone() } else { mat2_inv(gm) };
        suffix = mat2_mul(&letter, &suffix);
    }
    out
}

/// Stacked relation differentials, 3R × 3G.
pub fn relation_matrix(pres: &GroupPresentation) -> QMat {
    let ng = pres.gen_count();
    let mut out = QMat::zeros(3 * pres.relations.len(), 3 * ng);
    for (i, w) in pres.relations.iter().enumerate() {
        let f = fox_matrix(pres, w);
        for r in 0..3 {
            for c in 0..3 * ng {
                out.set(3 * i + r, c, f.get(r, c).clone());
            }
        }
    }
    out
}

/// Coboundary map v ↦ (Ad_{γᵢ⁻¹}v − v)ᵢ, 3G × 3.
pub fn coboundary_matrix(pres: &GroupPresentation) -> QMat {
    let ng = pres.gen_count();
    let mut out = QMat::zeros(3 * ng, 3);
    for (i, g) in pres.generators.iter().enumerate() {
        let a = ad_matrix(&mat2_inv(&g.matrix));
        for r in 0..3 {
            for c in 0..3 {
                let id = if r == c { Rational::one() } else { Rational::zero() };
                out.set(3 * i + r, c, a.get(r, c) - id);
            }
        }
    }
    out
}

/// A cocycle: one sl₂ vector per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    pub u: Vec<[Rational; 3]>,
}

impl Cocycle {
    pub fn zero(n: usize) -> Self {
        Cocycle { u: vec![[Rational::zero(), Rational::zero(), Rational::zero()]; n] }
    }
    pub fn from_flat(v: &[Rational]) -> Self {
        Cocycle { u: v.chunks(3).map(|c| [c[0].clone(), c[1].clone(), c[2].clone()]).collect() }
    }
    pub fn flat(&self) -> Vec<Rational> {
        self.u.iter().flat_map(|x| x.iter().cloned()).collect()
    }
    pub fn add(&self, o: &Cocycle) -> Cocycle {
        Cocycle::from_flat(&self.flat().iter().zip(o.flat()).map(|(a, b)| a + b).collect::<Vec<_>>())
    }
}

pub fn coboundary(pres: &GroupPresentation, v: &[Rational; 3]) -> Cocycle {
    Cocycle::from_flat(&coboundary_matrix(pres).mul_vec(v))
}

/// Errors with the first relation whose differential does not vanish.
pub fn check_cocycle(pres: &GroupPresentation, u: &Cocycle) -> Result<()> {
    if u.u.len() != pres.gen_count() {
        return Err(Error::Precondition("cocycle length does not match generator count".into()));
    }
    let flat = u.flat();
    for (i, w) in pres.relations.iter().enumerate() {
        if fox_matrix(pres, w).mul_vec(&flat).iter().any(|x| !x.is_zero()) {
            return Err(Error::NotCocycle(i));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub dim_z1: usize,
    pub dim_b1: usize,
    pub dim_h1: usize,
    pub z1_basis: Vec<Vec<Rational>>,
    pub b1_basis: Vec<Vec<Rational>>,
    /// Cocycles completing B¹ to Z¹: a basis of H¹.
    pub h1_basis: Vec<Cocycle>,
    /// For two-generator presentations with elliptic generators:
    /// dim sl₂/(𝔷(R) + 𝔷(S)).
    pub quotient_model: Option<usize>,
}

/// Z¹, B¹ and H¹ of Γ with coefficients in sl₂ via Ad.
pub fn cocycle_space(pres: &GroupPresentation) -> Result<CohomologyReport> {
    let dim = 3 * pres.gen_count();
    let z1_basis = relation_matrix(pres).nullspace();
    let cob = coboundary_matrix(pres);
    let cols: Vec<Vec<Rational>> = (0..3)
        .map(|j| (0..dim).map(|i| cob.get(i, j).clone()).collect())
        .collect();
    let b1_basis = span_basis(&cols, dim);
    let dim_z1 = z1_basis.len();
    let dim_b1 = b1_basis.len();
    // B¹ ⊂ Z¹ must hold
    let mut both = z1_basis.clone();
    both.extend(b1_basis.iter().cloned());
    if span_rank(&both, dim) != dim_z1 {
        return Err(Error::Invariant("coboundaries are not cocycles".into()));
    }
    let mut acc = b1_basis.clone();
    let mut h1_basis = Vec::new();
    for z in &z1_basis {
        let mut trial = acc.clone();
        trial.push(z.clone());
        if span_rank(&trial, dim) > span_rank(&acc, dim) {
            acc = trial;
            h1_basis.push(Cocycle::from_flat(z));
        }
    }
    let quotient_model = if pres.gen_count() == 2
        && pres.generators.iter().all(|g| {
            let t = &g.matrix[0] + &g.matrix[3];
            t.abs() < rat(2, 1)
        }) {
        let mut cent = Vec::new();
        for g in &pres.generators {
            let mut a = ad_matrix(&g.matrix);
            for i in 0..3 {
                let v = a.get(i, i) - Rational::one();
                a.set(i, i, v);
            }
            cent.extend(a.nullspace());
        }
        Some(3 - span_rank(&cent, 3))
    } else {
        None
    };
    Ok(CohomologyReport { dim_z1, dim_b1, dim_h1: dim_z1 - dim_b1, z1_basis, b1_basis, h1_basis, quotient_model })
}

// ---------------------------------------------------------------- P-lattices

/// A presented lattice with jet-matrix generators satisfying the relations
/// exactly.
#[derive(Debug, Clone)]
pub struct PLattice {
    pub pres: Arc<GroupPresentation>,
    pub alg: Arc<AlgebraSpec>,
    pub gens: Vec<JetMat2<Rational>>,
}

impl PLattice {
    /// The undeformed embedding Γ ⊂ SL(2,R) viewed over P.
    pub fn classical(pres: &Arc<GroupPresentation>, alg: &Arc<AlgebraSpec>) -> Self {
        let gens = pres.generators.iter().map(|g| JetMat2::from_scalars(alg, g.matrix.clone())).collect();
        PLattice { pres: pres.clone(), alg: alg.clone(), gens }
    }
    pub fn eval_word(&self, w: &Word) -> JetMat2<Rational> {
        let mut acc = JetMat2::identity(&self.alg);
        for (g, p) in w.syllables() {
            let m = self.gens[g].powi(p).expect("determinant-one generators are invertible");
            acc = acc.mul(&m);
        }
        acc
    }
    /// Body, determinant and exact-relation invariants.
    pub fn check(&self) -> Result<()> {
        let one = Jet::one(&self.alg);
        for (g, m) in self.pres.generators.iter().zip(&self.gens) {
            if m.body() != g.matrix {
                return Err(Error::Invariant(format!("generator {} has the wrong body", g.name)));
            }
            if m.det() != one {
                return Err(Error::Invariant(format!("generator {} does not have determinant 1", g.name)));
            }
        }
        for (i, (w, &s)) in self.pres.relations.iter().zip(&self.pres.signs).enumerate() {
            let v = self.eval_word(w);
            let want = JetMat2::from_ints(&self.alg, [s as i64, 0, 0, s as i64]);
            if v != want {
                return Err(Error::BadRelation { index: i });
            }
        }
        Ok(())
    }
    pub fn map_gens<T: crate::scalar::Scalar>(&self, f: impl Fn(&Rational) -> T + Copy) -> Vec<JetMat2<T>> {
        self.gens.iter().map(|m| m.map(f)).collect()
    }
}

/// Outcome of a lift: the lattice and the number of correction rounds.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub lattice: PLattice,
    pub rounds: usize,
}

/// Relation defects log(s·w̃) as sl₂ ⊗ I elements, one per relation.
fn relation_defects(l: &PLattice) -> Result<Vec<LieVec<Rational>>> {
    l.pres
        .relations
        .iter()
        .zip(&l.pres.signs)
        .map(|(w, &s)| {
            let v = l.eval_word(w);
            let v = if s < 0 { v.neg() } else { v };
            log_unipotent(&v)
        })
        .collect()
}

fn lie_component(x: &LieVec<Rational>, b: usize) -> [Rational; 3] {
    [x.h.c[b].clone(), x.e.c[b].clone(), x.f.c[b].clone()]
}

fn lie_from_components(alg: &Arc<AlgebraSpec>, comps: &[(usize, [Rational; 3])]) -> LieVec<Rational> {
    let mut v = LieVec::zero(alg);
    for (b, x) in comps {
        v.h.c[*b] += &x[0];
        v.e.c[*b] += &x[1];
        v.f.c[*b] += &x[2];
    }
    v
}

/// Lifts a sum of first-order directions Σ εᵢ uᵢ to an exact P-lattice:
/// γ̃ = γ·exp(Σ εᵢ uᵢ), then Newton rounds that solve D c = −δ for each
/// ideal component of the relation defects δ (least-norm by RREF with
/// free variables zero) and update γ̃ ← γ̃·exp(c).
pub fn lift_deformation_multi(
    pres: &Arc<GroupPresentation>,
    directions: &[(Cocycle, Jet<Rational>)],
    alg: &Arc<AlgebraSpec>,
) -> Result<LiftReport> {
    for (u, eps) in directions {
        check_cocycle(pres, u)?;
        if !eps.body().is_zero() {
            return Err(Error::Precondition("direction jet must lie in the ideal I".into()));
        }
    }
    let mut l = PLattice::classical(pres, alg);
    for (i, g) in l.gens.iter_mut().enumerate() {
        let mut x = LieVec::zero(alg);
        for (u, eps) in directions {
            x = x.add(&LieVec::from_coords(&u.u[i], eps));
        }
        *g = g.mul(&mat_exp(&x)?);
    }
    let dmat = relation_matrix(pres);
    let degrees = alg.filtration_degrees();
    let ideal = alg.ideal_indices();
    for round in 0..=2 * alg.dim() {
        let defects = relation_defects(&l)?;
        let rhs_of = |b: usize| -> Vec<Rational> { defects.iter().flat_map(|d| lie_component(d, b)).map(|x| -x).collect() };
        // work on the lowest filtration degree that still carries a defect
        let Some(order) = ideal.iter().filter(|&&b| rhs_of(b).iter().any(|x| !x.is_zero())).map(|&b| degrees[b]).min()
        else {
            l.check()?;
            return Ok(LiftReport { lattice: l, rounds: round });
        };
        let mut corrections: Vec<Vec<(usize, [Rational; 3])>> = vec![Vec::new(); pres.gen_count()];
        for &b in ideal.iter().filter(|&&b| degrees[b] == order) {
            let rhs = rhs_of(b);
            if rhs.iter().all(|x| x.is_zero()) {
                continue;
            }
            let sol = dmat.solve(&rhs).ok_or(Error::Obstruction { order })?;
            for (i, corr) in corrections.iter_mut().enumerate() {
                corr.push((b, [sol[3 * i].clone(), sol[3 * i + 1].clone(), sol[3 * i + 2].clone()]));
            }
        }
        for (g, corr) in l.gens.iter_mut().zip(&corrections) {
            *g = g.mul(&mat_exp(&lie_from_components(alg, corr))?);
        }
    }
    Err(Error::NoConvergence { tol: 0.0, iters: alg.n + 2 })
}

pub fn lift_deformation(
    pres: &Arc<GroupPresentation>,
    u: &Cocycle,
    alg: &Arc<AlgebraSpec>,
    eps: &Jet<Rational>,
) -> Result<LiftReport> {
    lift_deformation_multi(pres, &[(u.clone(), eps.clone())], alg)
}

/// g Υ g⁻¹ for g with identity body.
pub fn conjugate_lattice(l: &PLattice, g: &JetMat2<Rational>) -> Result<PLattice> {
    if g.body() != mat2_identity() {
        return Err(Error::Precondition("conjugator body must be the identity".into()));
    }
    let gi = g.inverse()?;
    let gens = l.gens.iter().map(|m| g.mul(m).mul(&gi)).collect();
    Ok(PLattice { pres: l.pres.clone(), alg: l.alg.clone(), gens })
}

/// Searches for g with identity body and g·Υ₁·g⁻¹ = Υ₂ by Newton rounds on
/// the coboundary map; `None` when the lattices are not conjugate.
pub fn find_conjugator(l1: &PLattice, l2: &PLattice) -> Result<Option<JetMat2<Rational>>> {
    let alg = l1.alg.clone();
    let cob = coboundary_matrix(&l1.pres);
    let degrees = alg.filtration_degrees();
    let ideal = alg.ideal_indices();
    let mut g = JetMat2::identity(&alg);
    for _ in 0..=2 * alg.dim() {
        let cur = conjugate_lattice(l1, &g)?;
        let mut defects = Vec::new();
        for (a, b) in cur.gens.iter().zip(&l2.gens) {
            defects.push(log_unipotent(&b.inverse()?.mul(a))?);
        }
        let rhs_of = |b: usize| -> Vec<Rational> { defects.iter().flat_map(|d| lie_component(d, b)).map(|x| -x).collect() };
        let Some(order) = ideal.iter().filter(|&&b| rhs_of(b).iter().any(|x| !x.is_zero())).map(|&b| degrees[b]).min()
        else {
            return Ok(Some(g));
        };
        let mut comps = Vec::new();
        for &b in ideal.iter().filter(|&&b| degrees[b] == order) {
            let rhs = rhs_of(b);
            if rhs.iter().all(|x| x.is_zero()) {
                continue;
            }
            match cob.solve(&rhs) {
                Some(x) => comps.push((b, [x[0].clone(), x[1].clone(), x[2].clone()])),
                None => return Ok(None),
            }
        }
        // conjugating by exp(x) multiplies each generator by exp(Ad_{γ⁻¹}x − x) to first order
        g = mat_exp(&lie_from_components(&alg, &comps))?.mul(&g);
    }
    Ok(None)
}

// ---------------------------------------------------------------- SL(2,Z) words

/// Decomposes an integer determinant-one matrix as ±(word in R, S), by the
/// Euclidean algorithm on the bottom row with nearest-integer quotients.
/// Returns the word and the sign s with eval(word) = s·M.
pub fn word_decompose_sl2z(m: [i64; 4]) -> Result<(Word, i8)> {
    let [a0, b0, c0, d0] = m;
    if (a0 as i128) * (d0 as i128) - (b0 as i128) * (c0 as i128) != 1 {
        return Err(Error::Precondition("matrix does not have determinant 1".into()));
    }
    let t = word_t();
    let s_inv = Word(vec![2, 2, 2]);
    let (mut a, mut b, mut c, mut d) = (a0 as i128, b0 as i128, c0 as i128, d0 as i128);
    // M = M_r · Π (S⁻¹ T^{q_j}) in reverse order of discovery
    let mut tail: Vec<Word> = Vec::new();
    while c != 0 {
        let q = nearest_quotient(d, c);
        // M ← M T^{-q} S
        let (nb, nd) = (b - q * a, d - q * c);
        let (na, nb2, nc, nd2) = (-nb, a, -nd, c);
        tail.push(s_inv.concat(&t.pow(q as i64)));
        a = na;
        b = nb2;
        c = nc;
        d = nd2;
    }
    // now M_r = [[a, b], [0, a]] with a = ±1, equal to a·T^{a b}
    let sign = a as i8;
    let mut w = t.pow((a * b) as i64);
    for piece in tail.iter().rev() {
        w = w.concat(piece);
    }
    let _ = d;
    Ok((w, sign))
}

fn nearest_quotient(d: i128, c: i128) -> i128 {
    // q minimizing |d - q c|
    let (q, r) = d.div_mod_floor(&c);
    if 2 * r.abs() > c.abs() {
        if (r > 0) == (c > 0) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// A coset representative of Γ_∞\SL(2,Z) with its generator word.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetRep {
    pub matrix: [i64; 4],
    pub word: Word,
    pub sign: i8,
}

/// Representatives for coprime bottom rows (c, d) with 0 ≤ c ≤ B, |d| ≤ B,
/// one per row up to sign, in lexicographic order of (c, d).
pub fn coset_reps_sl2z(bound: i64) -> Result<Vec<CosetRep>> {
    if bound < 1 {
        return Err(Error::Precondition("bound must be at least 1".into()));
    }
    let mut out = Vec::new();
    for c in 0..=bound {
        for d in -bound..=bound {
            if c == 0 && d != 1 {
                continue;
            }
            if c.gcd(&d) != 1 {
                continue;
            }
            let m = complete_row(c, d);
            let (word, sign) = word_decompose_sl2z(m)?;
            out.push(CosetRep { matrix: m, word, sign });
        }
    }
    Ok(out)
}

/// A determinant-one integer matrix with bottom row (c, d).
pub fn complete_row(c: i64, d: i64) -> [i64; 4] {
    let e = c.extended_gcd(&d);
    // e.x c + e.y d = 1 → a = e.y, b = -e.x
    let g = e.gcd;
    let (x, y) = if g < 0 { (-e.x, -e.y) } else { (e.x, e.y) };
    [y, -x, c, d]
}

/// Classical integer matrix to exact form.
pub fn mat2_from_i64(m: [i64; 4]) -> Mat2 {
    mat2(m)
}

pub fn mat2_to_i64(m: &Mat2) -> Option<[i64; 4]> {
    let mut out = [0i64; 4];
    for (o, x) in out.iter_mut().zip(m) {
        if !x.is_integer() {
            return None;
        }
        *o = x.to_integer().to_i64()?;
    }
    Some(out)
}

/// Breadth-first enumeration of group elements by word length, with the
/// shortest word reaching each.
pub fn enumerate_elements(pres: &GroupPresentation, max_len: usize) -> Vec<(Mat2, Word)> {
    let mut seen: HashMap<Mat2, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(mat2_identity(), ());
    queue.push_back((mat2_identity(), Word::default()));
    while let Some((m, w)) = queue.pop_front() {
        out.push((m.clone(), w.clone()));
        if w.len() >= max_len {
            continue;
        }
        for g in 0..pres.gen_count() {
            for fwd in [true, false] {
                let gm = &pres.generators[g].matrix;
                let nm = mat2_mul(&m, &if fwd { gm.clone() } else { mat2_inv(gm) });
                if seen.contains_key(&nm) {
                    continue;
                }
                seen.insert(nm.clone(), ());
                let l = (g + 1) as i32;
                let mut nw = w.clone();
                nw.0.push(if fwd { l } else { -l });
                queue.push_back((nm, nw));
            }
        }
    }
    out
}

/// Word search for −1 ∈ Γ up to the given length.
pub fn find_minus_one(pres: &GroupPresentation, max_len: usize) -> Option<Word> {
    let m1 = mat2_neg(&mat2_identity());
    enumerate_elements(pres, max_len).into_iter().find(|(m, _)| *m == m1).map(|(_, w)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2z_relations_and_t() {
        let p = presentation_sl2z();
        assert_eq!(p.signs, vec![1, 1]);
        assert_eq!(p.eval_classical(&word_t()), mat2([1, 1, 0, 1]));
        assert_eq!(p.eval_classical(&word_l()), mat2([1, 0, 1, 1]));
        assert_eq!(p.eval_classical(&Word(vec![2, 2])), mat2([-1, 0, 0, -1]));
    }

    #[test]
    fn h1_dimensions() {
        let r = cocycle_space(&presentation_sl2z()).unwrap();
        assert_eq!(r.dim_h1, 1);
        assert_eq!(r.quotient_model, Some(1));
        assert_eq!(cocycle_space(&presentation_surface(2, 0).unwrap()).unwrap().dim_h1, 6);
        assert_eq!(cocycle_space(&presentation_punctured_torus()).unwrap().dim_h1, 3);
        assert_eq!(cocycle_space(&presentation_gamma1_4()).unwrap().dim_h1, 3);
        let t = cocycle_space(&presentation_trivial()).unwrap();
        assert_eq!((t.dim_z1, t.dim_b1, t.dim_h1), (3, 2, 1));
    }

    #[test]
    fn words_reevaluate() {
        let p = presentation_sl2z();
        for m in [[1, 1, 0, 1], [1, 0, 0, 1], [2, 1, 1, 1], [7, 3, 2, 1], [-5, 2, 12, -5], [0, -1, 1, 0]] {
            let (w, s) = word_decompose_sl2z(m).unwrap();
            let want = mat2(m.map(|x| x * s as i64));
            assert_eq!(p.eval_classical(&w), want, "{m:?}");
        }
        assert!(word_decompose_sl2z([1, 0, 0, 1]).unwrap().0.is_empty());
        let reps = coset_reps_sl2z(1).unwrap();
        let rows: Vec<(i64, i64)> = reps.iter().map(|r| (r.matrix[2], r.matrix[3])).collect();
        assert_eq!(rows, vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
    }

    #[test]
    fn lift_sl2z_exact() {
        let p = Arc::new(presentation_sl2z());
        let h1 = cocycle_space(&p).unwrap().h1_basis[0].clone();
        for n in 2..=4 {
            let alg = AlgebraSpec::dual(n);
            let l = lift_deformation(&p, &h1, &alg, &Jet::basis(&alg, 1)).unwrap().lattice;
            l.check().unwrap();
            assert!(!l.gens[0].is_body() || !l.gens[1].is_body());
        }
    }
}
