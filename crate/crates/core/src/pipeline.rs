//! One function per subcommand: each turns a [`RunConfig`] into a JSON
//! report with a config echo and a list of pass/fail checks.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::AlgebraSpec;
use crate::config::RunConfig;
use crate::dims::{dimension_predict, QuotientData};
use crate::eisenstein::{deformed_eisenstein, EisensteinConfig};
use crate::error::{Error, Result};
use crate::forms::{adapt_form, check_points, invariance_residual, rank_verify, Frame};
use crate::io::{algebra_from_json, algebra_json, plattice_json, presentation_json, qseries_json, versioned, Check};
use crate::jet::Jet;
use crate::lattice::{cocycle_space, lift_deformation_multi, preset, Cocycle, PLattice};
use crate::oracle::{echelon_basis, eisenstein};
use crate::scalar::{rat_to_f64, Rational};
use crate::verify::{run_all, VerifyConfig};

/// A finished report: the JSON document and whether every check passed.
#[derive(Debug, Clone)]
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

impl Report {
    fn new(cfg: &RunConfig, command: &str, mut body: Value, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(Check::passed);
        if let Value::Object(ref mut m) = body {
            m.insert("command".into(), json!(command));
            m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
            m.insert("checks".into(), serde_json::to_value(&checks).expect("checks serialize"));
            m.insert("status".into(), json!(if passed { "pass" } else { "fail" }));
        }
        Report { value: versioned(body), passed }
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.value).expect("report serializes") + "\n"
    }
}

pub fn load_algebra(cfg: &RunConfig) -> Result<Arc<AlgebraSpec>> {
    match &cfg.algebra.file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Other(format!("{path}: {e}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidAlgebra(format!("{path}: {e}")))?;
            algebra_from_json(&v)
        }
        None => AlgebraSpec::create(cfg.algebra.kind, cfg.algebra.m, cfg.algebra.n),
    }
}

/// Parses `h1:<i>` or `h1:<i>@<b>` into an H¹ basis index and an ideal
/// basis index (default: the first basis element of the ideal).
pub fn parse_direction(s: &str, alg: &AlgebraSpec) -> Result<(usize, usize)> {
    let bad = || Error::Precondition(format!("direction {s:?} must look like h1:<i> or h1:<i>@<b>"));
    let rest = s.strip_prefix("h1:").ok_or_else(bad)?;
    let (i, b) = match rest.split_once('@') {
        Some((i, b)) => (i.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
        None => (rest.parse().map_err(|_| bad())?, *alg.ideal_indices().first().ok_or_else(bad)?),
    };
    if !alg.ideal_indices().contains(&b) {
        return Err(Error::Precondition(format!("basis element {b} does not lie in the nilpotent ideal")));
    }
    Ok((i, b))
}

pub fn cmd_algebra(cfg: &RunConfig) -> Result<Report> {
    let alg = load_algebra(cfg)?;
    let checks = vec![Check::exact("algebra axioms", alg.validate().is_ok(), "")];
    Ok(Report::new(cfg, "algebra", json!({ "algebra": algebra_json(&alg) }), checks))
}

pub fn cmd_cohomology(cfg: &RunConfig) -> Result<Report> {
    let pres = preset(&cfg.preset)?;
    let r = cocycle_space(&pres)?;
    let flat = |c: &Cocycle| c.flat().iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let checks = vec![Check::exact("dim Z1 = dim B1 + dim H1", r.dim_z1 == r.dim_b1 + r.dim_h1, "")];
    let body = json!({
        "presentation": presentation_json(&pres),
        "dimZ1": r.dim_z1,
        "dimB1": r.dim_b1,
        "dimH1": r.dim_h1,
        "quotient_model": r.quotient_model,
        "h1_basis": r.h1_basis.iter().map(flat).collect::<Vec<_>>(),
    });
    Ok(Report::new(cfg, "cohomology", body, checks))
}

/// Lifts the configured preset along the configured directions.
pub fn build_lattice(cfg: &RunConfig) -> Result<(PLattice, usize)> {
    let alg = load_algebra(cfg)?;
    let pres = Arc::new(preset(&cfg.preset)?);
    let h1 = cocycle_space(&pres)?.h1_basis;
    let dirs = cfg
        .directions
        .iter()
        .map(|s| {
            let (i, b) = parse_direction(s, &alg)?;
            let u = h1.get(i).ok_or_else(|| Error::Precondition(format!("H1 has dimension {}; no direction {i}", h1.len())))?;
            Ok((u.clone(), Jet::<Rational>::basis(&alg, b)))
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = lift_deformation_multi(&pres, &dirs, &alg)?;
    Ok((rep.lattice, rep.rounds))
}

pub fn cmd_lift(cfg: &RunConfig) -> Result<Report> {
    let (l, rounds) = build_lattice(cfg)?;
    let relations = l.check();
    let checks = vec![Check::exact(
        "relations hold exactly",
        relations.is_ok(),
        relations.err().map(|e| e.to_string()).unwrap_or_default(),
    )];
    let body = json!({ "lattice": plattice_json(&l), "algebra": algebra_json(&l.alg), "rounds": rounds });
    Ok(Report::new(cfg, "lift", body, checks))
}

fn require_sl2z(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.preset != "sl2z" {
        return Err(Error::Precondition(format!("{what} is implemented for the sl2z preset only")));
    }
    Ok(())
}

pub fn cmd_eisenstein(cfg: &RunConfig, k: i64) -> Result<Report> {
    require_sl2z(cfg, "the Eisenstein series")?;
    let (l, _) = build_lattice(cfg)?;
    let frame = Arc::new(Frame::for_lattice(&l)?);
    let ecfg = EisensteinConfig { k, bound: cfg.bound, m: cfg.m, threads: cfg.threads };
    let rep = deformed_eisenstein(&l, &frame, &ecfg)?;
    let oracle = eisenstein(k as usize, cfg.m)?;
    let body_err = rep
        .form
        .coeffs
        .iter()
        .zip(&oracle)
        .map(|(a, e)| (a.body().re - rat_to_f64(e)).abs().max(a.body().im.abs()) / rat_to_f64(e).abs().max(1.0))
        .fold(0.0, f64::max);
    let inv = invariance_residual(&rep.form, &l, &check_points(&l))?;
    let checks = vec![
        Check::bound("body vs divisor sums (relative)", body_err, cfg.tol, ""),
        Check::bound("invariance under the lifted generators", inv, cfg.tol.max(1e-6), ""),
    ];
    let body = json!({
        "k": k,
        "classes": rep.classes,
        "tail": rep.tail,
        "tail_max": rep.tail_max,
        "form": qseries_json(&rep.form),
        "oracle": oracle.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    });
    Ok(Report::new(cfg, "eisenstein", body, checks))
}

pub fn cmd_adapt(cfg: &RunConfig, k: i64) -> Result<Report> {
    require_sl2z(cfg, "adaption")?;
    let (l, _) = build_lattice(cfg)?;
    let frame = Arc::new(Frame::for_lattice(&l)?);
    let d = dimension_predict(k, &QuotientData::sl2z())?.dim_m.value().unwrap_or(0) as usize;
    let basis = echelon_basis(k as usize, cfg.m)?;
    let rep = adapt_form(&l, &frame, k, &basis, &cfg.adapt_config())?;
    let rank = rank_verify(&rep.forms, d, 1e-8)?;
    let mut checks = vec![
        Check::bound("forms = dim M_k", (rep.forms.len() as f64 - d as f64).abs(), 0.0, format!("dim M_k = {d}")),
        Check::bound("residual", rep.max_residual, cfg.tol, ""),
        Check::exact("free basis", rank.free_basis, format!("margin {:.2e}", rank.independence_margin)),
    ];
    for (f, det) in rep.forms.iter().zip(&rep.details).filter(|(_, det)| det.cuspidal) {
        checks.push(Check::bound(&format!("form {} constant term vanishes", det.index), f.coeffs[0].norm(), cfg.tol, ""));
    }
    let body = json!({
        "k": k,
        "forms": rep.forms.iter().zip(&rep.details).map(|(f, det)| json!({
            "index": det.index,
            "body": basis[det.index].iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "residual": det.residual,
            "validation_residual": det.validation_residual,
            "cuspidal": det.cuspidal,
            "form": qseries_json(f),
        })).collect::<Vec<_>>(),
        "rank": rank,
    });
    Ok(Report::new(cfg, "adapt", body, checks))
}

pub fn cmd_dims(cfg: &RunConfig, k: i64, data: Option<QuotientData>) -> Result<Report> {
    let data = match data {
        Some(d) => d,
        None => QuotientData::preset(&cfg.preset)?,
    };
    let r = dimension_predict(k, &data)?;
    let body = json!({
        "k": k,
        "quotient": data,
        "parity": r.parity,
        "deg": r.deg,
        "deg_cusp": r.deg_cusp,
        "dimM": r.dim_m,
        "dimS": r.dim_s,
    });
    Ok(Report::new(cfg, "dims", body, Vec::new()))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    let vcfg = VerifyConfig { seed: cfg.seed, threads: cfg.threads, eisenstein_bound: cfg.bound, adapt: cfg.adapt_config() };
    let results = run_all(&vcfg);
    let mut checks = Vec::new();
    let criteria: Vec<Value> = results
        .iter()
        .map(|r| {
            checks.push(Check::exact(&format!("criterion {} {}", r.id, r.name), r.passed, ""));
            let mut v = json!({ "id": r.id, "name": r.name, "passed": r.passed, "time_limit": r.time_limit, "checks": r.checks });
            if cfg.verbose {
                v["seconds"] = json!(r.seconds);
            }
            v
        })
        .collect();
    Ok(Report::new(cfg, "verify", json!({ "seed": cfg.seed, "criteria": criteria }), checks))
}
