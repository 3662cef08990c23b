//! Deformed automorphic forms as q-series with jet coefficients in the
//! Ω-normalized cusp coordinate, the collocation adaption solver, and
//! free-module rank verification.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::lattice::{word_decompose_sl2z, word_t, PLattice, Word};
use crate::linalg::{singular_values, LeastSquares};
use crate::mobius::{cocycle_jet, mobius_jet, omega_from_chi, Evaluator, OmegaMap};
use crate::scalar::{rat_to_f64, ExactComplex, Exponent, Rational, Scalar};
use crate::sl2::{mat_log_near_parabolic, JetMat2, LieVec};

pub type C64 = Complex64;

/// The cusp coordinate at ∞: χ = log(T̃) and Ω = ω(z − i) with
/// Ω(z + 1) = T̃·Ω(z).
#[derive(Debug, Clone)]
pub struct Frame {
    pub chi: LieVec<Rational>,
    pub omega_exact: OmegaMap<ExactComplex>,
    pub omega: OmegaMap<C64>,
    /// Classical transporter of the cusp (the identity for ∞).
    pub transporter: [i64; 4],
}

impl Frame {
    /// Frame from an exact lift of T = [[1,1],[0,1]].
    pub fn from_parabolic(t: &JetMat2<Rational>) -> Result<Self> {
        let chi = mat_log_near_parabolic(t, 0.0)?;
        let omega_exact = omega_from_chi(&chi.complexify())?;
        let omega = omega_exact.map(|x| x.to_c64());
        Ok(Frame { chi, omega_exact, omega, transporter: [1, 0, 0, 1] })
    }
    /// Frame of a lattice over SL(2,Z), using T̃ = lift of S³R.
    pub fn for_lattice(l: &PLattice) -> Result<Self> {
        Self::from_parabolic(&l.eval_word(&word_t()))
    }
    pub fn alg(&self) -> &Arc<AlgebraSpec> {
        self.omega.alg()
    }
    /// Cusp coordinate z = Ω⁻¹(w).
    pub fn to_frame(&self, w: &Jet<C64>) -> Result<Jet<C64>> {
        self.omega.inverse_apply(w)
    }
}

/// e^{2πi z} for a jet z.
pub fn qjet(z: &Jet<C64>) -> Result<Jet<C64>> {
    z.scale(&C64::new(0.0, 2.0 * PI)).exp()
}

/// Values qⁿ(z(w))·Ω′(z(w))^{−k/2}, n = 0..=m: f(w) = Σ aₙ·(these).
pub fn basis_values(frame: &Frame, k: i64, w: &Jet<C64>, m: usize) -> Result<Vec<Jet<C64>>> {
    let z = frame.to_frame(w)?;
    let q = qjet(&z)?;
    let factor = frame
        .omega
        .eval_derivative(&z)
        .pow(&Exponent::Rational(Rational::new((-k).into(), 2.into())))?;
    let mut out = Vec::with_capacity(m + 1);
    let mut p = factor;
    for _ in 0..=m {
        out.push(p.clone());
        p = &p * &q;
    }
    Ok(out)
}

/// A weight-k form Σ aₙ qⁿ with jet coefficients, q = e^{2πi Ω⁻¹(w)}.
#[derive(Debug, Clone)]
pub struct QSeriesJet {
    pub weight: i64,
    pub coeffs: Vec<Jet<C64>>,
    pub frame: Arc<Frame>,
}

impl QSeriesJet {
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn alg(&self) -> &Arc<AlgebraSpec> {
        self.frame.alg()
    }
    /// Body-only series from exact rational coefficients.
    pub fn from_body(frame: &Arc<Frame>, k: i64, body: &[Rational]) -> Self {
        let alg = frame.alg().clone();
        let coeffs = body.iter().map(|x| Jet::constant(&alg, C64::new(rat_to_f64(x), 0.0))).collect();
        QSeriesJet { weight: k, coeffs, frame: frame.clone() }
    }
    pub fn body_coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|c| *c.body()).collect()
    }
    /// F(z) = Σ aₙ e^{2πinz} in the cusp coordinate.
    pub fn eval_frame(&self, z: &Jet<C64>) -> Result<Jet<C64>> {
        let q = qjet(z)?;
        let mut acc = Jet::zero(&z.alg);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &q) + c;
        }
        Ok(acc)
    }
    /// f(w) = F(Ω⁻¹w)·Ω′(Ω⁻¹w)^{−k/2}.
    pub fn eval_at(&self, w: &Jet<C64>) -> Result<Jet<C64>> {
        let z = self.frame.to_frame(w)?;
        let f = self.eval_frame(&z)?;
        let d = self
            .frame
            .omega
            .eval_derivative(&z)
            .pow(&Exponent::Rational(Rational::new((-self.weight).into(), 2.into())))?;
        Ok(&f * &d)
    }
    /// Max over jet orders of |a₀|.
    pub fn constant_term_norm(&self) -> f64 {
        self.coeffs[0].norm()
    }
    /// Product of forms in the same frame (weights add).
    pub fn mul(&self, o: &QSeriesJet) -> QSeriesJet {
        let m = self.trunc().min(o.trunc());
        let alg = self.alg().clone();
        let coeffs = (0..=m)
            .map(|n| (0..=n).fold(Jet::zero(&alg), |acc, i| &acc + &(&self.coeffs[i] * &o.coeffs[n - i])))
            .collect();
        QSeriesJet { weight: self.weight + o.weight, coeffs, frame: self.frame.clone() }
    }
}

impl Evaluator<C64> for QSeriesJet {
    fn eval(&self, z: &Jet<C64>) -> Result<Jet<C64>> {
        self.eval_at(z)
    }
}

/// f|γ(w) − f(w) for a generator γ.
pub fn invariance_defect(f: &QSeriesJet, g: &JetMat2<C64>, w: &Jet<C64>) -> Result<Jet<C64>> {
    let gw = mobius_jet(g, w)?;
    let j = cocycle_jet(g, w)?;
    Ok(&(&f.eval_at(&gw)? * &j.powi(f.weight)?) - &f.eval_at(w)?)
}

// ---------------------------------------------------------------- samples

/// A collocation point w together with the classical element γ that moves
/// it into the standard fundamental domain, and γ's generator word.
#[derive(Debug, Clone, Serialize)]
pub struct Sample {
    pub re: f64,
    pub im: f64,
    pub gamma: [i64; 4],
    pub word: Word,
}

/// γ ∈ SL(2,Z) with γw in the standard fundamental domain
/// (|Re| ≤ 1/2, |w| ≥ 1), by alternating translations and inversions.
pub fn reduce_point(w: C64) -> Result<[i64; 4]> {
    if w.im <= 0.0 {
        return Err(Error::Region("point not in the upper half-plane".into()));
    }
    let mut g = [1i64, 0, 0, 1];
    let mut z = w;
    for _ in 0..200 {
        let n = (z.re + 0.5).floor() as i64;
        if n != 0 {
            z -= n as f64;
            // T^{-n}·g
            g = [g[0] - n * g[2], g[1] - n * g[3], g[2], g[3]];
        }
        if z.norm_sqr() < 1.0 - 1e-14 {
            z = -z.inv();
            // S·g with S = [[0,1],[-1,0]]
            g = [g[2], g[3], -g[0], -g[1]];
        } else {
            return Ok(g);
        }
    }
    Err(Error::NoConvergence { tol: 0.0, iters: 200 })
}

/// `count` equispaced points on the horizontal line Im w = `height` below
/// the fundamental domain (height < √3/2, so every point is moved), each
/// paired with its reducing element. `offset` ∈ [0, 1) shifts the grid.
pub fn line_samples(count: usize, height: f64, offset: f64) -> Result<Vec<Sample>> {
    (0..count)
        .map(|j| {
            let re = -0.5 + (j as f64 + 0.5 + offset) / count as f64;
            let gamma = reduce_point(C64::new(re, height))?;
            let (word, _) = word_decompose_sl2z(gamma)?;
            Ok(Sample { re, im: height, gamma, word })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AdaptConfig {
    /// Truncation order M of the q-series.
    pub m: usize,
    /// Collocation points on the sample line.
    pub points: usize,
    /// Height of the sample line; columns are scaled by e^{2πn·height}.
    pub height: f64,
    /// Height of the independent validation line.
    pub validation_height: f64,
    pub rcond: f64,
    /// Maximum number of refinement sweeps over the ideal filtration.
    pub sweeps: usize,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig { m: 40, points: 96, height: 0.5, validation_height: 0.45, rcond: 1e-13, sweeps: 8 }
    }
}

/// Precomputed invariance system: G[row][n] = e_n(γw)·j(γ,w)^k − e_n(w).
pub struct InvarianceSystem {
    pub k: i64,
    pub m: usize,
    pub rows: Vec<Vec<Jet<C64>>>,
    /// Basis values e_n(w) at each row's point (for relative residuals).
    pub at_point: Vec<Vec<Jet<C64>>>,
    pub scale: Vec<f64>,
}

impl InvarianceSystem {
    pub fn build(l: &PLattice, frame: &Frame, k: i64, samples: &[Sample], m: usize, scale_height: f64) -> Result<Self> {
        let alg = l.alg.clone();
        let mut rows = Vec::new();
        let mut at_point = Vec::new();
        for s in samples {
            let w = Jet::constant(&alg, C64::new(s.re, s.im));
            let g = &l.eval_word(&s.word).map(|x| C64::new(rat_to_f64(x), 0.0));
            let gw = mobius_jet(g, &w)?;
            let jk = cocycle_jet(g, &w)?.powi(k)?;
            let ew = basis_values(frame, k, &w, m)?;
            let egw = basis_values(frame, k, &gw, m)?;
            rows.push(egw.iter().zip(&ew).map(|(a, b)| &(a * &jk) - b).collect());
            at_point.push(ew);
        }
        let scale = (0..=m).map(|n| (2.0 * PI * n as f64 * scale_height).exp()).collect();
        Ok(InvarianceSystem { k, m, rows, at_point, scale })
    }

    fn combine(vals: &[Jet<C64>], a: &[Jet<C64>]) -> Jet<C64> {
        let alg = a[0].alg.clone();
        vals.iter().zip(a).fold(Jet::zero(&alg), |acc, (g, x)| &acc + &(g * x))
    }

    /// max_rows ‖Σ aₙ Gₙ‖ / max_rows ‖f(w)‖.
    pub fn relative_residual(&self, a: &[Jet<C64>]) -> f64 {
        let num = self.rows.iter().map(|r| Self::combine(r, a).norm()).fold(0.0, f64::max);
        let den = self.at_point.iter().map(|r| Self::combine(r, a).norm()).fold(0.0, f64::max);
        num / den.max(1e-300)
    }

    /// Body operator restricted to the given columns, with column scaling.
    fn body_matrix(&self, cols: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows.len(), cols.len(), |i, j| *self.rows[i][cols[j]].body() * self.scale[cols[j]])
    }

    /// The full C-linear invariance map on P^C-valued coefficient vectors:
    /// rows (sample, component), columns (n, basis element).
    pub fn full_matrix(&self, alg: &Arc<AlgebraSpec>) -> DMatrix<C64> {
        let dim = alg.dim();
        let basis: Vec<Jet<C64>> = (0..dim).map(|b| Jet::basis(alg, b)).collect();
        let mut out = DMatrix::zeros(self.rows.len() * dim, (self.m + 1) * dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (n, g) in row.iter().enumerate() {
                for (b, eb) in basis.iter().enumerate() {
                    let p = eb * g;
                    for c in 0..dim {
                        out[(i * dim + c, n * dim + b)] = p.c[c] * self.scale[n];
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdaptedForm {
    /// Index into the classical basis.
    pub index: usize,
    pub residual: f64,
    pub validation_residual: f64,
    pub cuspidal: bool,
    pub constant_term: f64,
}

#[derive(Debug, Clone)]
pub struct AdaptReport {
    pub forms: Vec<QSeriesJet>,
    pub details: Vec<AdaptedForm>,
    pub pivots: Vec<usize>,
    pub max_residual: f64,
}

/// Adapts each classical basis form (echelon bodies, pivots 0..d−1) to a
/// form for the deformed lattice: solves for the nilpotent parts of
/// a₀..a_M (a_pivot pinned to the classical value) so that f|γ̃ = f at the
/// collocation points, γ̃ being the deformed lift of the element reducing
/// each point into the fundamental domain. The ideal filtration is solved
/// one degree at a time, each a least-squares problem with the classical
/// operator.
pub fn adapt_form(l: &PLattice, frame: &Arc<Frame>, k: i64, basis: &[Vec<Rational>], cfg: &AdaptConfig) -> Result<AdaptReport> {
    if k % 2 != 0 {
        return Err(Error::Precondition("adaption is implemented for even weights".into()));
    }
    let alg = l.alg.clone();
    let m = cfg.m;
    let sys = InvarianceSystem::build(l, frame, k, &line_samples(cfg.points, cfg.height, 0.0)?, m, cfg.height)?;
    let validation =
        InvarianceSystem::build(l, frame, k, &line_samples(cfg.points, cfg.validation_height, 0.5)?, m, cfg.height)?;
    let d = basis.len();
    let pivots: Vec<usize> = (0..d).collect();
    let free: Vec<usize> = (0..=m).filter(|n| !pivots.contains(n)).collect();
    let ls = LeastSquares::new(sys.body_matrix(&free), cfg.rcond);
    let degrees = alg.filtration_degrees();
    let max_deg = degrees.iter().copied().max().unwrap_or(0);
    let mut forms = Vec::new();
    let mut details = Vec::new();
    for (idx, body) in basis.iter().enumerate() {
        if body.len() < m + 1 {
            return Err(Error::Precondition("classical basis truncated below M".into()));
        }
        let mut a: Vec<Jet<C64>> =
            body[..=m].iter().map(|x| Jet::constant(&alg, C64::new(rat_to_f64(x), 0.0))).collect();
        // Each sweep is one Newton pass per filtration degree; repeated
        // sweeps act as iterative refinement of the least-squares solves.
        let mut best = sys.relative_residual(&a);
        for _ in 0..cfg.sweeps {
            let prev = a.clone();
            for deg in 1..=max_deg {
                let resid: Vec<Jet<C64>> = sys.rows.iter().map(|r| InvarianceSystem::combine(r, &a)).collect();
                for b in (0..alg.dim()).filter(|&b| degrees[b] == deg) {
                    let rhs = DVector::from_iterator(resid.len(), resid.iter().map(|e| -e.c[b]));
                    let y = ls.solve(&rhs);
                    for (j, &n) in free.iter().enumerate() {
                        a[n].c[b] += y[j] * sys.scale[n];
                    }
                }
            }
            let r = sys.relative_residual(&a);
            if r >= best {
                a = prev;
                break;
            }
            best = r;
            if r < 1e-14 {
                break;
            }
        }
        let residual = sys.relative_residual(&a);
        let validation_residual = validation.relative_residual(&a);
        let f = QSeriesJet { weight: k, coeffs: a, frame: frame.clone() };
        let cuspidal = body[0] == Rational::from_integer(0.into());
        details.push(AdaptedForm { index: idx, residual, validation_residual, cuspidal, constant_term: f.constant_term_norm() });
        forms.push(f);
    }
    let max_residual = details.iter().map(|x| x.residual.max(x.validation_residual)).fold(0.0, f64::max);
    Ok(AdaptReport { forms, details, pivots, max_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionSpace {
    /// Scalar (complex) dimension of the kernel of the full system.
    pub dim: usize,
    pub threshold: f64,
    /// Largest singular value counted as zero and smallest counted as
    /// nonzero, relative to the largest.
    pub last_zero: f64,
    pub first_nonzero: f64,
}

/// Kernel dimension of the full invariance system over C, by thresholded
/// SVD relative to the largest singular value.
pub fn solution_space_dim(l: &PLattice, frame: &Frame, k: i64, cfg: &AdaptConfig, threshold: f64) -> Result<SolutionSpace> {
    let sys = InvarianceSystem::build(l, frame, k, &line_samples(cfg.points, cfg.height, 0.0)?, cfg.m, cfg.height)?;
    let a = sys.full_matrix(&l.alg);
    let sv = singular_values(&a);
    let smax = sv[0];
    let rank = sv.iter().filter(|&&s| s > threshold * smax).count();
    let ncols = a.ncols();
    let last_zero = sv.iter().copied().filter(|&s| s <= threshold * smax).fold(0.0, f64::max) / smax;
    let first_nonzero = sv.iter().copied().filter(|&s| s > threshold * smax).fold(f64::INFINITY, f64::min) / smax;
    Ok(SolutionSpace { dim: ncols - rank, threshold, last_zero, first_nonzero })
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub d_expected: usize,
    pub body_rank: usize,
    /// Smallest relative singular value of the P^C-linear relation system.
    pub independence_margin: f64,
    pub free_basis: bool,
}

/// Certifies a family as a free P^C-basis: body coefficient vectors of rank
/// d, and Σ cᵢ fᵢ = 0 over jets only for c = 0.
pub fn rank_verify(forms: &[QSeriesJet], d_expected: usize, threshold: f64) -> Result<RankReport> {
    if forms.is_empty() {
        return Ok(RankReport { d_expected, body_rank: 0, independence_margin: 0.0, free_basis: d_expected == 0 });
    }
    let alg = forms[0].alg().clone();
    let m = forms.iter().map(|f| f.trunc()).min().unwrap_or(0);
    let ncoef = m.min(2 * d_expected + 6) + 1;
    // column-normalized body matrix
    let mut body = DMatrix::<C64>::zeros(forms.len(), ncoef);
    for n in 0..ncoef {
        let colmax = forms.iter().map(|f| f.coeffs[n].body().norm()).fold(0.0, f64::max).max(1e-300);
        for (i, f) in forms.iter().enumerate() {
            body[(i, n)] = f.coeffs[n].body() / colmax;
        }
    }
    let sv = singular_values(&body);
    let body_rank = sv.iter().filter(|&&s| s > threshold * sv[0]).count();
    let dim = alg.dim();
    let basis: Vec<Jet<C64>> = (0..dim).map(|b| Jet::basis(&alg, b)).collect();
    let mut rel = DMatrix::<C64>::zeros(ncoef * dim, forms.len() * dim);
    for n in 0..ncoef {
        let colmax = forms.iter().map(|f| f.coeffs[n].norm()).fold(0.0, f64::max).max(1e-300);
        for (i, f) in forms.iter().enumerate() {
            for (b, eb) in basis.iter().enumerate() {
                let p = eb * &f.coeffs[n];
                for c in 0..dim {
                    rel[(n * dim + c, i * dim + b)] = p.c[c] / colmax;
                }
            }
        }
    }
    let rsv = singular_values(&rel);
    let independence_margin = if rsv.len() < forms.len() * dim { 0.0 } else { rsv[rsv.len() - 1] / rsv[0] };
    let free_basis = body_rank == d_expected && forms.len() == d_expected && independence_margin > threshold;
    Ok(RankReport { d_expected, body_rank, independence_margin, free_basis })
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedReport {
    /// uₙ = (f·g)ₙ / hₙ as (re, im) per algebra basis element.
    pub units: Vec<Vec<(f64, f64)>>,
    pub max_deviation: f64,
}

/// Checks that f·g is a P^C-unit multiple of h by comparing the ratios of
/// the first `count` coefficients.
pub fn graded_check(f: &QSeriesJet, g: &QSeriesJet, h: &QSeriesJet, count: usize) -> Result<GradedReport> {
    let prod = f.mul(g);
    let mut units = Vec::new();
    let mut ratios = Vec::new();
    for n in 0..count.min(prod.trunc() + 1).min(h.trunc() + 1) {
        let u = prod.coeffs[n].try_div(&h.coeffs[n])?;
        units.push(u.c.iter().map(|x| (x.re, x.im)).collect());
        ratios.push(u);
    }
    let max_deviation = ratios.iter().map(|u| (u - &ratios[0]).norm() / ratios[0].norm()).fold(0.0, f64::max);
    Ok(GradedReport { units, max_deviation })
}

/// Lattice generators as complex jets.
pub fn complex_gens(l: &PLattice) -> Vec<JetMat2<C64>> {
    l.map_gens(|x| C64::new(rat_to_f64(x), 0.0))
}

/// Twenty check points with the generator they test: ten on a circle of
/// radius 0.1 around i for S and ten on a circle of radius 0.05 around
/// ρ = e^{2πi/3} for R, so that every point and its image stay at height
/// ≥ 0.8 where the truncated expansion is accurate.
pub fn check_points(l: &PLattice) -> Vec<(usize, C64)> {
    let rho = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let r_idx = l.pres.generator_index("R").unwrap_or(0);
    let s_idx = l.pres.generator_index("S").unwrap_or(1);
    let mut out = Vec::new();
    for (g, centre, r) in [(s_idx, C64::new(0.0, 1.0), 0.1), (r_idx, rho, 0.05)] {
        for j in 0..10 {
            out.push((g, centre + C64::from_polar(r, 2.0 * PI * (j as f64 + 0.25) / 10.0)));
        }
    }
    out
}

/// Max over points of ‖f|γ(w) − f(w)‖ relative to max ‖f(w)‖, each point
/// paired with a generator index.
pub fn invariance_residual(f: &QSeriesJet, l: &PLattice, points: &[(usize, C64)]) -> Result<f64> {
    let gens = complex_gens(l);
    let alg = l.alg.clone();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (g, p) in points {
        let w = Jet::constant(&alg, *p);
        den = den.max(f.eval_at(&w)?.norm());
        num = num.max(invariance_defect(f, &gens[*g], &w)?.norm());
    }
    Ok(num / den.max(1e-300))
}
