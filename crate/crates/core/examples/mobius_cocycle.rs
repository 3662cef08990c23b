//! Möbius action of jet matrices on jet points: the automorphy factor is
//! a cocycle in exact arithmetic, and its square is the derivative
//! (j(g, z) = 1/(cz + d)).
//!
//! ```bash
//! cargo run --example mobius_cocycle
//! ```

use jetforms::mobius::{cocycle_jet, mobius_derivative, mobius_jet};
use jetforms::scalar::{rat, ExactComplex, Rational};
use jetforms::sl2::{mat_exp, JetMat2, LieVec};
use jetforms::{AlgebraSpec, ComplexScalar, Jet};

fn main() -> jetforms::Result<()> {
    let alg = AlgebraSpec::dual(3);
    let eps = Jet::<Rational>::basis(&alg, 1);
    let bump = mat_exp(&LieVec::from_coords(&[rat(1, 1), rat(2, 1), rat(-1, 3)], &eps))?;
    let to_c = |m: &JetMat2<Rational>| m.map(|x| ExactComplex::from(x.clone()));
    let g = to_c(&JetMat2::from_ints(&alg, [2, 1, 1, 1]).mul(&bump));
    let h = to_c(&JetMat2::from_ints(&alg, [1, -3, 0, 1]).mul(&bump.inverse()?));

    let mut z = Jet::constant(&alg, ExactComplex::from_parts(rat(1, 3).into(), rat(2, 1).into()));
    z.c[1] = ExactComplex::from(rat(1, 1));
    let lhs = cocycle_jet(&g.mul(&h), &z)?;
    let rhs = &cocycle_jet(&g, &mobius_jet(&h, &z)?)? * &cocycle_jet(&h, &z)?;
    println!("j(gh, z) = j(g, hz)·j(h, z) exactly: {}", lhs == rhs);

    let d = mobius_derivative(&g, &z)?;
    let j2 = cocycle_jet(&g, &z)?.powi(2)?;
    println!("(gz)' = j(g, z)² with j(g, z) = 1/(cz + d), exactly: {}", d == j2);
    Ok(())
}
