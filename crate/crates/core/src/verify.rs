//! The acceptance suite: ten criteria with pinned tolerances and time
//! limits, shared by the `verify` subcommand and the acceptance test.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::dims::{dimension_predict, QuotientData};
use crate::eisenstein::{deformed_eisenstein, EisensteinConfig};
use crate::error::Result;
use crate::forms::{adapt_form, check_points, graded_check, invariance_residual, rank_verify, solution_space_dim, AdaptConfig, Frame};
use crate::io::Check;
use crate::jet::Jet;
use crate::lattice::{cocycle_space, lift_deformation, mat2_identity, mat2_mul, presentation_sl2z, presentation_surface, Mat2, PLattice, Word};
use crate::mobius::{cocycle_jet, intertwining_defect, mobius_derivative, mobius_jet, omega_from_chi};
use crate::oracle::{dim_mk_monomials, echelon_basis, eisenstein};
use crate::scalar::{rat, rat_to_f64, ComplexScalar, ExactComplex, Rational};
use crate::sl2::{conjugation_collapse, mat_exp, JetMat2, LieVec};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub threads: usize,
    /// Coset bound of the Eisenstein criterion.
    pub eisenstein_bound: i64,
    pub adapt: AdaptConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            eisenstein_bound: 5000,
            adapt: AdaptConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub time_limit: f64,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    /// One summary line: id, status, timing and the tightest check (the
    /// first failing one, else the largest residual/tolerance ratio).
    pub fn line(&self) -> String {
        let ratio = |c: &Check| if c.tolerance > 0.0 { c.residual / c.tolerance } else { c.residual };
        let worst = self
            .checks
            .iter()
            .find(|c| !c.passed())
            .or_else(|| self.checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))))
            .map(|c| format!("{} residual={:.3e} tol={:.1e}", c.check, c.residual, c.tolerance))
            .unwrap_or_default();
        format!(
            "criterion {:>2} {:<26} {} [{:>5.2}s / {:>3.0}s] {:>3} checks; tightest: {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.time_limit,
            self.checks.len(),
            worst
        )
    }
}

pub const CRITERIA: [(usize, &str, f64); 10] = [
    (1, "cohomology dimensions", 1.0),
    (2, "exact lifting", 5.0),
    (3, "finite-order transport", 10.0),
    (4, "conjugation collapse", 5.0),
    (5, "omega contract", 5.0),
    (6, "cocycle and derivative", 5.0),
    (7, "deformed eisenstein", 60.0),
    (8, "adaption and free basis", 120.0),
    (9, "graded-ring consistency", 10.0),
    (10, "dimension predictor", 1.0),
];

/// The SL(2,Z) lattice lifted along its H¹ direction over R[ε]/(ε^N).
pub fn lifted_sl2z(n: usize) -> Result<PLattice> {
    let p = Arc::new(presentation_sl2z());
    let h1 = cocycle_space(&p)?.h1_basis[0].clone();
    let alg = AlgebraSpec::dual(n);
    Ok(lift_deformation(&p, &h1, &alg, &Jet::basis(&alg, 1))?.lattice)
}

pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> CriterionResult {
    let (_, name, limit) = CRITERIA[id - 1];
    let start = Instant::now();
    let checks = match id {
        1 => c1_cohomology(),
        2 => c2_lifting(),
        3 => c3_powers(cfg),
        4 => c4_collapse(cfg),
        5 => c5_omega(cfg),
        6 => c6_cocycle(cfg),
        7 => c7_eisenstein(cfg),
        8 => c8_adaption(cfg),
        9 => c9_graded(cfg),
        10 => c10_dims(),
        _ => Err(crate::error::Error::Precondition(format!("no criterion {id}"))),
    };
    let checks = checks.unwrap_or_else(|e| vec![Check::exact("run", false, e.to_string())]);
    let seconds = start.elapsed().as_secs_f64();
    let passed = checks.iter().all(Check::passed) && seconds <= limit;
    CriterionResult { id, name: name.into(), passed, seconds, time_limit: limit, checks }
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionResult> {
    (1..=10).map(|i| run_criterion(i, cfg)).collect()
}

fn c1_cohomology() -> Result<Vec<Check>> {
    let s = cocycle_space(&presentation_sl2z())?;
    let g2 = cocycle_space(&presentation_surface(2, 0)?)?;
    Ok(vec![
        Check::bound("sl2z dim H1 = 1", (s.dim_h1 as f64 - 1.0).abs(), 0.0, format!("dim Z1 {} dim B1 {}", s.dim_z1, s.dim_b1)),
        Check::exact("sl2z quotient model = 1", s.quotient_model == Some(1), format!("{:?}", s.quotient_model)),
        Check::bound("genus-2 dim H1 = 6", (g2.dim_h1 as f64 - 6.0).abs(), 0.0, format!("dim H1 {}", g2.dim_h1)),
    ])
}

fn c2_lifting() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let l = lifted_sl2z(n)?;
        let r3 = l.eval_word(&Word(vec![1, 1, 1])).is_identity();
        let s4 = l.eval_word(&Word(vec![2, 2, 2, 2])).is_identity();
        let deformed = !l.gens[0].is_body() || !l.gens[1].is_body();
        out.push(Check::exact(&format!("N={n} R^3 = S^4 = 1"), r3 && s4 && deformed, if deformed { "" } else { "lift is undeformed" }));
    }
    Ok(out)
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word((0..len).map(|_| if rng.gen_bool(0.5) { 1 } else { 2 } * if rng.gen_bool(0.5) { 1 } else { -1 }).collect())
}

fn body_order(m: &Mat2) -> Option<i64> {
    let mut p = m.clone();
    for n in 1..=12 {
        if p == mat2_identity() {
            return Some(n);
        }
        p = mat2_mul(&p, m);
    }
    None
}

fn c3_powers(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pres = presentation_sl2z();
    let mut out = Vec::new();
    for n in 2..=4 {
        let l = lifted_sl2z(n)?;
        let mut bad = 0;
        for _ in 0..100 {
            let v = random_word(&mut rng, 8);
            let core = if rng.gen_bool(0.5) { Word(vec![1; rng.gen_range(1..=2)]) } else { Word(vec![2; rng.gen_range(1..=3)]) };
            let w = v.concat(&core).concat(&v.inverse());
            let order = body_order(&pres.eval_classical(&w)).expect("finite-order body");
            let jet = l.eval_word(&w);
            let jet_order = (1..=order).find(|&k| jet.powi(k).map(|p| p.is_identity()).unwrap_or(false));
            if jet_order != Some(order) {
                bad += 1;
            }
        }
        out.push(Check::bound(&format!("N={n} jet order = body order (100 words)"), bad as f64, 0.0, ""));
        let m1 = l.eval_word(&Word(vec![2, 2]));
        let minus = JetMat2::from_ints(&l.alg, [-1, 0, 0, -1]);
        out.push(Check::exact(&format!("N={n} lift of -1 is -identity"), m1 == minus, ""));
    }
    Ok(out)
}

fn random_nilpotent_lie(rng: &mut ChaCha8Rng, alg: &Arc<AlgebraSpec>) -> LieVec<Rational> {
    let mut x = LieVec::zero(alg);
    for b in alg.ideal_indices() {
        let c = [0, 1, 2].map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
        x = x.add(&LieVec::from_coords(&c, &Jet::basis(alg, b)));
    }
    x
}

fn c4_collapse(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
    let alg = AlgebraSpec::dual(3);
    let r = JetMat2::<Rational>::from_ints(&alg, [0, 1, -1, -1]);
    let s = JetMat2::<Rational>::from_ints(&alg, [0, 1, -1, 0]);
    let mut bad = 0;
    let mut detail = String::new();
    for i in 0..20 {
        let (g, n) = if i % 2 == 0 { (&r, 3) } else { (&s, 4) };
        let h = mat_exp(&random_nilpotent_lie(&mut rng, &alg))?;
        let conj = h.mul(g).mul(&h.inverse()?);
        match conjugation_collapse(&conj, n) {
            Ok(k) if k.is_body() && k == k.body_mat() => {}
            Ok(_) => bad += 1,
            Err(e) => {
                bad += 1;
                detail = e.to_string();
            }
        }
    }
    Ok(vec![Check::bound("20 conjugates collapse to their body", bad as f64, 0.0, detail)])
}

fn random_exact_complex(rng: &mut ChaCha8Rng) -> ExactComplex {
    ExactComplex::from_parts(rat(rng.gen_range(-6..=6), rng.gen_range(1..=5)).into(), rat(rng.gen_range(-6..=6), rng.gen_range(1..=5)).into())
}

fn c5_omega(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let mut bad = 0;
    let mut bad_shift = 0;
    let mut max_defect: f64 = 0.0;
    for i in 0..20 {
        let alg = AlgebraSpec::dual(2 + i % 2);
        let x = random_nilpotent_lie(&mut rng, &alg);
        let chi = LieVec::<Rational>::chi0(&alg).add(&x).complexify();
        let om = omega_from_chi(&chi)?;
        let rep = intertwining_defect(&om, &chi);
        max_defect = max_defect.max(rep.max_defect);
        if !rep.exact_zero {
            bad += 1;
        }
        let mut a = Jet::zero(&alg);
        for b in alg.ideal_indices() {
            a.c[b] = random_exact_complex(&mut rng);
        }
        if !intertwining_defect(&om.translate(&a), &chi).exact_zero {
            bad_shift += 1;
        }
    }
    Ok(vec![
        Check::bound("20 random chi: defect identically zero", bad as f64, 0.0, format!("max defect {max_defect:e}")),
        Check::bound("translated variants", bad_shift as f64, 0.0, ""),
    ])
}

fn random_group_element(rng: &mut ChaCha8Rng, alg: &Arc<AlgebraSpec>) -> Result<JetMat2<Rational>> {
    let body = presentation_sl2z().eval_classical(&random_word(rng, 6));
    Ok(JetMat2::from_scalars(alg, body).mul(&mat_exp(&random_nilpotent_lie(rng, alg))?))
}

fn c6_cocycle(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 6);
    let alg = AlgebraSpec::dual(3);
    let to_exact = |m: &JetMat2<Rational>| m.map(|x| ExactComplex::from(x.clone()));
    let mut bad = 0;
    for _ in 0..100 {
        let g = to_exact(&random_group_element(&mut rng, &alg)?);
        let h = to_exact(&random_group_element(&mut rng, &alg)?);
        let mut z = Jet::constant(
            &alg,
            ExactComplex::from_parts(rat(rng.gen_range(-8..=8), rng.gen_range(1..=4)).into(), rat(rng.gen_range(1..=8), rng.gen_range(1..=4)).into()),
        );
        for b in alg.ideal_indices() {
            z.c[b] = random_exact_complex(&mut rng);
        }
        let lhs = cocycle_jet(&g.mul(&h), &z)?;
        let rhs = &cocycle_jet(&g, &mobius_jet(&h, &z)?)? * &cocycle_jet(&h, &z)?;
        if lhs != rhs {
            bad += 1;
        }
    }
    let mut worst: f64 = 0.0;
    let step = 1e-4;
    for _ in 0..100 {
        let g = random_group_element(&mut rng, &alg)?.map(|x| Complex64::new(rat_to_f64(x), 0.0));
        let mut z = Jet::constant(&alg, Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0)));
        for b in alg.ideal_indices() {
            z.c[b] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let d = mobius_derivative(&g, &z)?;
        let j2 = cocycle_jet(&g, &z)?.powi(2)?;
        let fd = (&mobius_jet(&g, &z.add_scalar(&Complex64::new(step, 0.0)))? - &mobius_jet(&g, &z.add_scalar(&Complex64::new(-step, 0.0)))?)
            .scale(&Complex64::new(0.5 / step, 0.0));
        worst = worst.max((&fd - &j2).norm() / j2.norm().max(1.0)).max((&d - &j2).norm() / j2.norm().max(1.0));
    }
    Ok(vec![
        Check::bound("j(gh,z) = j(g,hz) j(h,z) exact (100 triples)", bad as f64, 0.0, ""),
        Check::bound("j^2 vs finite-difference derivative (float)", worst, 1e-6, ""),
    ])
}

fn c7_eisenstein(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let l = lifted_sl2z(2)?;
    let frame = Arc::new(Frame::for_lattice(&l)?);
    let ecfg = EisensteinConfig { k: 6, bound: cfg.eisenstein_bound, m: 10, threads: cfg.threads };
    let rep = deformed_eisenstein(&l, &frame, &ecfg)?;
    let oracle = eisenstein(6, 10)?;
    let body_err = rep
        .form
        .coeffs
        .iter()
        .zip(&oracle)
        .map(|(a, e)| {
            let e = rat_to_f64(e);
            (a.body() - Complex64::new(e, 0.0)).norm() / e.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let inv = invariance_residual(&rep.form, &l, &check_points(&l))?;
    let scale = rep.form.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(vec![
        Check::bound("body vs divisor sums (relative, n<=10)", body_err, 1e-6, format!("{} classes", rep.classes)),
        Check::bound("invariance under R~, S~ at 20 points", inv, 1e-6, ""),
        Check::bound("relative tail estimate", rep.tail_max / scale, 1e-6, format!("absolute tail {:.3e}", rep.tail_max)),
    ])
}

fn c8_adaption(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let l = lifted_sl2z(n)?;
        let frame = Arc::new(Frame::for_lattice(&l)?);
        let dim_p = l.alg.dim();
        for k in [4i64, 6, 8, 10, 12, 14] {
            let d = dimension_predict(k, &QuotientData::sl2z())?.dim_m.value().unwrap_or(-1) as usize;
            let basis = echelon_basis(k as usize, cfg.adapt.m)?;
            let rep = adapt_form(&l, &frame, k, &basis, &cfg.adapt)?;
            let tag = format!("N={n} k={k}");
            out.push(Check::bound(&format!("{tag} forms = dim M_k"), (rep.forms.len() as f64 - d as f64).abs(), 0.0, format!("d={d}")));
            out.push(Check::bound(&format!("{tag} residual"), rep.max_residual, 1e-8, ""));
            let rv = rank_verify(&rep.forms, d, 1e-8)?;
            out.push(Check::exact(&format!("{tag} free basis"), rv.free_basis, format!("body rank {} margin {:.2e}", rv.body_rank, rv.independence_margin)));
            for (f, det) in rep.forms.iter().zip(&rep.details) {
                if det.cuspidal {
                    out.push(Check::bound(&format!("{tag} cusp form a0 = 0"), f.coeffs[0].norm(), 1e-10, ""));
                }
            }
            let ss = solution_space_dim(&l, &frame, k, &cfg.adapt, 1e-12)?;
            out.push(Check::bound(
                &format!("{tag} solution space = d dim P"),
                (ss.dim as f64 - (d * dim_p) as f64).abs(),
                0.0,
                format!("dim {} gap {:.1e}/{:.1e}", ss.dim, ss.last_zero, ss.first_nonzero),
            ));
        }
    }
    Ok(out)
}

fn c9_graded(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let l = lifted_sl2z(n)?;
        let frame = Arc::new(Frame::for_lattice(&l)?);
        let m = cfg.adapt.m;
        let adapt = |k: i64| adapt_form(&l, &frame, k, &echelon_basis(k as usize, m)?, &cfg.adapt);
        let (e4, e6, e10) = (adapt(4)?, adapt(6)?, adapt(10)?);
        let rep = graded_check(&e4.forms[0], &e6.forms[0], &e10.forms[0], 8)?;
        out.push(Check::bound(&format!("N={n} E4 E6 / E10 unit across 8 coefficients"), rep.max_deviation, 1e-6, ""));
    }
    Ok(out)
}

fn c10_dims() -> Result<Vec<Check>> {
    let mut bad_m = 0;
    let mut bad_s = 0;
    for k in (0..=24).step_by(2) {
        let r = dimension_predict(k, &QuotientData::sl2z())?;
        let dm = dim_mk_monomials(k as usize) as i64;
        let ds = if k >= 4 { dm - 1 } else { 0 };
        bad_m += usize::from(r.dim_m.value() != Some(dm));
        bad_s += usize::from(r.dim_s.value() != Some(ds));
    }
    let r12 = dimension_predict(12, &QuotientData::sl2z())?;
    Ok(vec![
        Check::bound("dim M_k, even k <= 24, vs monomial count", bad_m as f64, 0.0, ""),
        Check::bound("dim S_k, even k <= 24", bad_s as f64, 0.0, ""),
        Check::exact("k=12: deg 1, dim M 2, dim S 1", (r12.deg, r12.dim_m.value(), r12.dim_s.value()) == (1, Some(2), Some(1)), ""),
    ])
}

