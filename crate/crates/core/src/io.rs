//! JSON forms of the main objects. Every top-level document carries
//! `schema_version`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraKind, AlgebraSpec};
use crate::error::{Error, Result};
use crate::forms::QSeriesJet;
use crate::jet::Jet;
use crate::lattice::{GroupPresentation, PLattice};
use crate::mobius::OmegaMap;
use crate::scalar::{Rational, Scalar};
use crate::sl2::JetMat2;

pub const SCHEMA_VERSION: u32 = 1;

/// Adds `schema_version` to a JSON object.
pub fn versioned(mut v: Value) -> Value {
    if let Value::Object(ref mut m) = v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

pub fn rat_str(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Other(format!("bad rational {s:?}: {e}")))
}

pub fn jet_rat_json(j: &Jet<Rational>) -> Value {
    json!(j.c.iter().map(rat_str).collect::<Vec<_>>())
}

pub fn jet_c64_json(j: &Jet<Complex64>) -> Value {
    json!(j.c.iter().map(|x| [x.re, x.im]).collect::<Vec<_>>())
}

/// Exact scalars as strings, floating ones as [re, im] pairs.
pub fn jet_json<S: Scalar>(j: &Jet<S>) -> Value {
    match S::MODE {
        crate::scalar::Mode::Exact => json!(j.c.iter().map(|x| x.repr()).collect::<Vec<_>>()),
        crate::scalar::Mode::Floating => json!(j.c.iter().map(|x| {
            let c = x.to_c64();
            [c.re, c.im]
        })
        .collect::<Vec<_>>()),
    }
}

pub fn jetmat_rat_json(m: &JetMat2<Rational>) -> Value {
    json!(m.e.iter().map(jet_rat_json).collect::<Vec<_>>())
}

/// Algebra file: kind, m, N, basis and the nonzero structure constants
/// as [i, j, k, "c"] with e_i·e_j = Σ c e_k.
pub fn algebra_json(a: &AlgebraSpec) -> Value {
    let table: Vec<Value> = a.terms().iter().map(|t| json!([t.i, t.j, t.k, rat_str(&t.c)])).collect();
    versioned(json!({
        "id": a.id(),
        "kind": a.kind,
        "m": a.m,
        "N": a.n,
        "dim": a.dim(),
        "basis": a.basis,
        "table": table,
    }))
}

#[derive(Debug, Deserialize)]
struct AlgebraFile {
    kind: AlgebraKind,
    #[serde(default)]
    m: usize,
    #[serde(rename = "N", alias = "n")]
    n: usize,
    #[serde(default)]
    basis: Vec<String>,
    #[serde(default)]
    table: Vec<(usize, usize, usize, String)>,
}

/// Reads an algebra file; built-in kinds are regenerated from (m, N),
/// structure-constant tables are validated.
pub fn algebra_from_json(v: &Value) -> Result<Arc<AlgebraSpec>> {
    let f: AlgebraFile = serde_json::from_value(v.clone()).map_err(|e| Error::InvalidAlgebra(e.to_string()))?;
    match f.kind {
        AlgebraKind::StructureConstants => {
            let dim = f.basis.len();
            let zero = Rational::from_integer(0.into());
            let mut table = vec![vec![vec![zero; dim]; dim]; dim];
            for (i, j, k, c) in &f.table {
                if *i >= dim || *j >= dim || *k >= dim {
                    return Err(Error::InvalidAlgebra(format!("table index ({i},{j},{k}) out of range")));
                }
                table[*i][*j][*k] = parse_rat(c)?;
            }
            AlgebraSpec::from_table(f.basis, table, f.n)
        }
        kind => AlgebraSpec::create(kind, f.m, f.n),
    }
}

pub fn presentation_json(p: &GroupPresentation) -> Value {
    json!({
        "name": p.name,
        "generators": p.generators.iter().map(|g| json!({
            "name": g.name,
            "matrix": g.matrix.iter().map(rat_str).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "relations": p.relations.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
        "signs": p.signs,
    })
}

pub fn plattice_json(l: &PLattice) -> Value {
    json!({
        "presentation_id": l.pres.name,
        "algebra_id": l.alg.id(),
        "generators": l.gens.iter().map(jetmat_rat_json).collect::<Vec<_>>(),
    })
}

pub fn omega_json<S: Scalar>(o: &OmegaMap<S>) -> Value {
    json!({
        "algebra_id": o.alg().id(),
        "degree": o.degree(),
        "coeffs": o.coeffs.iter().map(jet_json).collect::<Vec<_>>(),
    })
}

pub fn qseries_json(f: &QSeriesJet) -> Value {
    json!({
        "weight": f.weight,
        "M": f.trunc(),
        "frame": {
            "omega": omega_json(&f.frame.omega_exact),
            "transporter": f.frame.transporter,
        },
        "coeffs": f.coeffs.iter().map(jet_c64_json).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One verification line: {check, status, residual, tolerance}.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when residual ≤ tolerance.
    pub fn bound(check: &str, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Check { check: check.into(), status, residual, tolerance, detail: detail.into() }
    }
    /// Exact check: residual 0 or 1.
    pub fn exact(check: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self::bound(check, if ok { 0.0 } else { 1.0 }, 0.0, detail)
    }
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        for a in [AlgebraSpec::dual(3), AlgebraSpec::create(AlgebraKind::EvenExterior, 2, 3).unwrap()] {
            let back = algebra_from_json(&algebra_json(&a)).unwrap();
            assert_eq!(back.id(), a.id());
        }
        let v = json!({"kind": "structure-constants", "N": 2, "basis": ["1", "e"],
            "table": [[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"]]});
        assert_eq!(algebra_from_json(&v).unwrap().dim(), 2);
        let bad = json!({"kind": "structure-constants", "N": 2, "basis": ["1", "e"],
            "table": [[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[1,1,0,"1"]]});
        assert!(algebra_from_json(&bad).is_err());
    }
}
