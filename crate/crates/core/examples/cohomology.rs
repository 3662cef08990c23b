//! H¹ of finitely presented groups with coefficients in sl₂ via Fox
//! calculus: SL(2,Z), a genus-2 surface group and Γ1(4).
//!
//! ```bash
//! cargo run --example cohomology
//! ```

use jetforms::lattice::{check_cocycle, cocycle_space, coboundary, preset};
use jetforms::scalar::rat;

fn main() -> jetforms::Result<()> {
    for name in ["sl2z", "genus2", "gamma1-4", "punctured-torus", "surface-g1-m2"] {
        let pres = preset(name)?;
        let r = cocycle_space(&pres)?;
        println!(
            "{name:>16}: generators {}  dim Z1 {:>2}  dim B1 {}  dim H1 {:>2}  quotient model {:?}",
            pres.gen_count(),
            r.dim_z1,
            r.dim_b1,
            r.dim_h1,
            r.quotient_model
        );
    }

    // coboundaries are cocycles
    let pres = preset("sl2z")?;
    let b = coboundary(&pres, &[rat(1, 2), rat(-3, 1), rat(2, 5)]);
    check_cocycle(&pres, &b)?;
    let h1 = &cocycle_space(&pres)?.h1_basis[0];
    println!("SL(2,Z) H1 representative (u_R | u_S): {:?}", h1.flat().iter().map(|x| x.to_string()).collect::<Vec<_>>());
    Ok(())
}
