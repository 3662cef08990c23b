//! Finite-dimensional local commutative parameter algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{span_basis, span_rank};
use crate::scalar::{rat_to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    #[serde(alias = "trunc-poly")]
    TruncatedPolynomial,
    EvenExterior,
    StructureConstants,
}

impl std::str::FromStr for AlgebraKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncated-polynomial" | "trunc-poly" => Ok(AlgebraKind::TruncatedPolynomial),
            "even-exterior" => Ok(AlgebraKind::EvenExterior),
            "structure-constants" => Ok(AlgebraKind::StructureConstants),
            _ => Err(Error::InvalidAlgebra(format!("unknown kind {s}"))),
        }
    }
}

/// One nonzero structure constant: `e_i · e_j` has coefficient `c` on `e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Rational,
    pub cf: f64,
    pub unit: bool,
}

/// A validated local algebra P = R·1 ⊕ I. Basis index 0 is the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub m: usize,
    /// Declared nilpotency: I^n = 0.
    pub n: usize,
    pub basis: Vec<String>,
    pub ideal_mask: Vec<bool>,
    /// Products e_i e_j as coefficient vectors, dense in (i, j).
    table: Vec<Vec<Vec<Rational>>>,
    terms: Vec<Term>,
    id: String,
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

impl AlgebraSpec {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
    pub fn product(&self, i: usize, j: usize) -> &[Rational] {
        &self.table[i][j]
    }
    /// Indices of basis elements spanning I.
    pub fn ideal_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.ideal_mask[i]).collect()
    }

    /// Built-in constructors and validation.
    pub fn create(kind: AlgebraKind, m: usize, n: usize) -> Result<Arc<Self>> {
        if n < 1 {
            return Err(Error::InvalidAlgebra("nilpotency N must be >= 1".into()));
        }
        match kind {
            AlgebraKind::TruncatedPolynomial => Ok(Arc::new(Self::truncated_polynomial(m, n))),
            AlgebraKind::EvenExterior => {
                if m + 1 != n {
                    return Err(Error::InvalidAlgebra(format!(
                        "even-exterior algebra on R^{m} requires N = m + 1 = {}, got {n}",
                        m + 1
                    )));
                }
                Ok(Arc::new(Self::even_exterior(m)))
            }
            AlgebraKind::StructureConstants => Err(Error::InvalidAlgebra(
                "structure-constants algebras are built with from_table".into(),
            )),
        }
    }

    /// Dual numbers R[ε]/(ε^n) — the common case.
    pub fn dual(n: usize) -> Arc<Self> {
        Self::create(AlgebraKind::TruncatedPolynomial, 1, n).expect("valid")
    }

    fn truncated_polynomial(m: usize, n: usize) -> Self {
        let mut monos: Vec<Vec<usize>> = Vec::new();
        for deg in 0..n {
            let mut level = Vec::new();
            exponents_of_degree(m, deg, &mut vec![], &mut level);
            // lexicographic with X1 highest: X1^2 < X1X2 < X2^2
            level.sort_by(|a, b| b.cmp(a));
            if m == 0 && deg > 0 {
                continue;
            }
            monos.extend(level);
        }
        let index: BTreeMap<Vec<usize>, usize> =
            monos.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let dim = monos.len();
        let mut table = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let e: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = index.get(&e) {
                    table[i][j][k] = Rational::one();
                }
            }
        }
        let basis = monos.iter().map(|e| monomial_label(e)).collect();
        Self::assemble(AlgebraKind::TruncatedPolynomial, m, n, basis, table, format!("trunc-poly:m{m}:N{n}"))
    }

    fn even_exterior(m: usize) -> Self {
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut size = 0;
        while size <= m {
            let mut level = Vec::new();
            subsets(m, size, 0, &mut vec![], &mut level);
            sets.extend(level);
            size += 2;
        }
        let index: BTreeMap<Vec<usize>, usize> =
            sets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let dim = sets.len();
        let mut table = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if let Some((sign, merged)) = wedge(a, b) {
                    table[i][j][index[&merged]] = Rational::from_integer(sign.into());
                }
            }
        }
        let basis = sets
            .iter()
            .map(|s| {
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s.iter().map(|i| format!("e{}", i + 1)).collect::<String>()
                }
            })
            .collect();
        Self::assemble(AlgebraKind::EvenExterior, m, m + 1, basis, table, format!("even-exterior:m{m}"))
    }

    /// General algebra from a dense structure-constant table
    /// `table[i][j] = e_i e_j`; index 0 must be the unit and all other basis
    /// elements span the ideal.
    pub fn from_table(basis: Vec<String>, table: Vec<Vec<Vec<Rational>>>, n: usize) -> Result<Arc<Self>> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        if table.len() != dim || table.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(Error::InvalidAlgebra("table shape does not match basis".into()));
        }
        let alg = Self::assemble(AlgebraKind::StructureConstants, dim - 1, n, basis, table, String::new());
        alg.validate()?;
        let id = format!("structure-constants:dim{dim}:N{n}:{:016x}", alg.fingerprint());
        Ok(Arc::new(AlgebraSpec { id, ..alg }))
    }

    fn assemble(
        kind: AlgebraKind,
        m: usize,
        n: usize,
        basis: Vec<String>,
        table: Vec<Vec<Vec<Rational>>>,
        id: String,
    ) -> Self {
        let dim = basis.len();
        let mut terms = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = &table[i][j][k];
                    if !c.is_zero() {
                        terms.push(Term { i, j, k, c: c.clone(), cf: rat_to_f64(c), unit: c.is_one() });
                    }
                }
            }
        }
        let ideal_mask = (0..dim).map(|i| i != 0).collect();
        AlgebraSpec { kind, m, n, basis, ideal_mask, table, terms, id }
    }

    fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.basis.hash(&mut h);
        for t in &self.terms {
            (t.i, t.j, t.k, t.c.to_string()).hash(&mut h);
        }
        h.finish()
    }

    fn mul_vec(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for t in &self.terms {
            if a[t.i].is_zero() || b[t.j].is_zero() {
                continue;
            }
            out[t.k] += &a[t.i] * &b[t.j] * &t.c;
        }
        out
    }

    fn unit_vec(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// Checks the algebra axioms, naming the first failing one.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            if self.table[0][i] != self.unit_vec(i) || self.table[i][0] != self.unit_vec(i) {
                return Err(Error::InvalidAlgebra(format!("unit axiom fails for basis element {i}")));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if self.table[i][j] != self.table[j][i] {
                    return Err(Error::InvalidAlgebra(format!("commutativity fails for ({i}, {j})")));
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let l = self.mul_vec(&self.table[i][j], &self.unit_vec(k));
                    let r = self.mul_vec(&self.unit_vec(i), &self.table[j][k]);
                    if l != r {
                        return Err(Error::InvalidAlgebra(format!("associativity fails for ({i}, {j}, {k})")));
                    }
                }
            }
        }
        for i in 1..dim {
            for j in 1..dim {
                if !self.table[i][j][0].is_zero() {
                    return Err(Error::InvalidAlgebra(format!(
                        "ideal not closed: e{i} e{j} has a unit component (body is not a homomorphism)"
                    )));
                }
            }
        }
        if self.least_nilpotency() > self.n {
            return Err(Error::InvalidAlgebra(format!("ideal is not nilpotent of order <= {}", self.n)));
        }
        Ok(())
    }

    /// For each basis element, the largest k with e_b ∈ I^k (0 for the unit).
    pub fn filtration_degrees(&self) -> Vec<usize> {
        let ideal: Vec<Vec<Rational>> = self.ideal_indices().iter().map(|&i| self.unit_vec(i)).collect();
        let mut powers = Vec::new();
        let mut power = span_basis(&ideal, self.dim());
        while !power.is_empty() && powers.len() <= self.dim() {
            powers.push(power.clone());
            let mut next = Vec::new();
            for v in &power {
                for w in &ideal {
                    next.push(self.mul_vec(v, w));
                }
            }
            power = span_basis(&next, self.dim());
        }
        (0..self.dim())
            .map(|b| {
                if !self.ideal_mask[b] {
                    return 0;
                }
                let e = self.unit_vec(b);
                powers
                    .iter()
                    .rposition(|p| {
                        let mut q = p.clone();
                        q.push(e.clone());
                        span_rank(&q, self.dim()) == p.len()
                    })
                    .map_or(1, |k| k + 1)
            })
            .collect()
    }

    /// Least N with I^N = 0.
    pub fn least_nilpotency(&self) -> usize {
        let ideal: Vec<Vec<Rational>> = self.ideal_indices().iter().map(|&i| self.unit_vec(i)).collect();
        let mut power = span_basis(&ideal, self.dim());
        let mut n = 1;
        while !power.is_empty() {
            if n > self.dim() + 1 {
                return usize::MAX;
            }
            let mut next = Vec::new();
            for v in &power {
                for w in &ideal {
                    next.push(self.mul_vec(v, w));
                }
            }
            power = span_basis(&next, self.dim());
            n += 1;
        }
        n
    }
}

fn exponents_of_degree(m: usize, deg: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == m {
        if deg == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    for e in 0..=deg {
        prefix.push(e);
        exponents_of_degree(m, deg - e, prefix, out);
        prefix.pop();
    }
}

fn monomial_label(e: &[usize]) -> String {
    if e.iter().all(|&x| x == 0) {
        return "1".into();
    }
    let single = e.len() == 1;
    e.iter()
        .enumerate()
        .filter(|(_, &p)| p > 0)
        .map(|(i, &p)| {
            let var = if single { "X".to_string() } else { format!("X{}", i + 1) };
            if p == 1 {
                var
            } else {
                format!("{var}^{p}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn subsets(m: usize, size: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == size {
        out.push(prefix.clone());
        return;
    }
    for i in start..m {
        prefix.push(i);
        subsets(m, size, i + 1, prefix, out);
        prefix.pop();
    }
}

/// Exterior product of two sorted index sets: sign and merged set.
fn wedge(a: &[usize], b: &[usize]) -> Option<(i64, Vec<usize>)> {
    if a.iter().any(|x| b.contains(x)) {
        return None;
    }
    let mut inversions = 0;
    for x in a {
        inversions += b.iter().filter(|y| *y < x).count();
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort();
    Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_basis_order() {
        let a = AlgebraSpec::create(AlgebraKind::TruncatedPolynomial, 2, 3).unwrap();
        assert_eq!(a.basis, ["1", "X1", "X2", "X1^2", "X1*X2", "X2^2"]);
        assert!(a.validate().is_ok());
        assert_eq!(a.least_nilpotency(), 3);
    }

    #[test]
    fn body_only() {
        let a = AlgebraSpec::create(AlgebraKind::TruncatedPolynomial, 1, 1).unwrap();
        assert_eq!(a.dim(), 1);
        assert!(a.ideal_indices().is_empty());
    }

    #[test]
    fn exterior_four() {
        let a = AlgebraSpec::create(AlgebraKind::EvenExterior, 4, 5).unwrap();
        assert_eq!(a.dim(), 8);
        assert!(a.validate().is_ok());
        assert_eq!(a.least_nilpotency(), 3);
    }

    #[test]
    fn rejects_noncommutative_table() {
        let z = Rational::zero;
        let o = Rational::one;
        // e1 e2 = e3 but e2 e1 = 0
        let mut t = vec![vec![vec![z(); 4]; 4]; 4];
        for i in 0..4 {
            t[0][i][i] = o();
            t[i][0][i] = o();
        }
        t[1][2][3] = o();
        let err = AlgebraSpec::from_table(vec!["1".into(), "a".into(), "b".into(), "c".into()], t, 3).unwrap_err();
        assert!(err.to_string().contains("commutativity"));
    }
}
