//! The chart Ω intertwining translation with the one-parameter group
//! exp(tχ): constructed from χ = χ₀ + nilpotent and verified by an exact
//! polynomial identity, including its translation ambiguity.
//!
//! ```bash
//! cargo run --example omega_frame
//! ```

use jetforms::io::omega_json;
use jetforms::mobius::{intertwining_defect, omega_from_chi};
use jetforms::scalar::{rat, ExactComplex, Rational};
use jetforms::sl2::LieVec;
use jetforms::{AlgebraSpec, Jet};

fn main() -> jetforms::Result<()> {
    let alg = AlgebraSpec::dual(3);
    let eps = Jet::<Rational>::basis(&alg, 1);
    let eps2 = Jet::<Rational>::basis(&alg, 2);
    let chi = LieVec::<Rational>::chi0(&alg)
        .add(&LieVec::from_coords(&[rat(1, 3), rat(2, 1), rat(-1, 2)], &eps))
        .add(&LieVec::from_coords(&[rat(0, 1), rat(1, 1), rat(5, 1)], &eps2))
        .complexify();
    let om = omega_from_chi(&chi)?;
    println!("Ω = {}", omega_json(&om));
    let rep = intertwining_defect(&om, &chi);
    println!("intertwining defect: {} terms, max {:.1e}, exactly zero: {}", rep.terms, rep.max_defect, rep.exact_zero);

    // Ω(z + a) works equally well for nilpotent a
    let a = Jet::<ExactComplex>::basis(&alg, 2).scale(&ExactComplex::from(rat(7, 2)));
    let shifted = om.translate(&a);
    println!("translated chart exactly zero: {}", intertwining_defect(&shifted, &chi).exact_zero);
    Ok(())
}
