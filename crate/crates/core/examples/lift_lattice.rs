//! Lifting the first-order deformation of SL(2,Z) to an exact lattice over
//! R[ε]/(ε^N), then checking that finite-order elements keep their order
//! and that conjugates of R and S collapse to their bodies.
//!
//! ```bash
//! cargo run --example lift_lattice
//! ```

use std::sync::Arc;

use jetforms::io::jetmat_rat_json;
use jetforms::lattice::{cocycle_space, lift_deformation, presentation_sl2z, Word};
use jetforms::sl2::{conjugation_collapse, mat_exp, JetMat2, LieVec};
use jetforms::{AlgebraSpec, Jet, Rational};

fn main() -> jetforms::Result<()> {
    let pres = Arc::new(presentation_sl2z());
    let u = cocycle_space(&pres)?.h1_basis[0].clone();
    for n in 2..=4 {
        let alg = AlgebraSpec::dual(n);
        let rep = lift_deformation(&pres, &u, &alg, &Jet::basis(&alg, 1))?;
        let l = rep.lattice;
        l.check()?;
        println!("N={n}: lifted in {} correction rounds", rep.rounds);
        println!("  R~ = {}", jetmat_rat_json(&l.gens[0]));
        println!("  S~ = {}", jetmat_rat_json(&l.gens[1]));
        // a conjugate of R has order 3 in the deformed group as well
        let w = Word(vec![2, -1, 2, 1, -2, 1, -2]);
        let g = l.eval_word(&w);
        println!("  (S R^-1 S R S^-1 R S^-1)^3 = 1: {}", g.powi(3)?.is_identity());
        println!("  S~² = -1: {}", l.eval_word(&Word(vec![2, 2])) == JetMat2::from_ints(&l.alg, [-1, 0, 0, -1]));
    }

    // exp(X)·R·exp(−X) is conjugate to R by a matrix with real entries
    let alg = AlgebraSpec::dual(3);
    let eps = Jet::<Rational>::basis(&alg, 1);
    let x = LieVec::from_coords(&[jetforms::scalar::rat(1, 2), jetforms::scalar::rat(-1, 1), jetforms::scalar::rat(3, 1)], &eps);
    let h = mat_exp(&x)?;
    let r = JetMat2::<Rational>::from_ints(&alg, [0, 1, -1, -1]);
    let conj = h.mul(&r).mul(&h.inverse()?);
    let collapsed = conjugation_collapse(&conj, 3)?;
    println!("conjugate of R collapses to its body: {}", collapsed.is_body());
    Ok(())
}
