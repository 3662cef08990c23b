//! Dimensions of spaces of forms from the degree formula, for SL(2,Z),
//! Γ1(4) (odd weights), a punctured torus and a genus-2 surface, plus the
//! even/odd classification of cusps.
//!
//! ```bash
//! cargo run --example dimensions
//! ```

use jetforms::dims::{cusp_classify, dimension_predict, QuotientData};
use jetforms::lattice::{mat2, presentation_gamma1_4};

fn main() -> jetforms::Result<()> {
    for name in ["sl2z", "gamma1-4", "punctured-torus", "genus2"] {
        let q = QuotientData::preset(name)?;
        print!("{name:>16}:");
        for k in 1..=12 {
            match dimension_predict(k, &q) {
                Ok(r) => match (r.dim_m.value(), r.dim_s.value()) {
                    (Some(m), Some(s)) => print!(" {k}:{m}/{s}"),
                    _ => print!(" {k}:?"),
                },
                Err(_) => print!(" {k}:-"),
            }
        }
        println!();
    }
    println!("(k:dim M/dim S; ? = not fixed by the degree, - = outside the analysis)");

    let p = presentation_gamma1_4();
    for (label, g) in [("∞", mat2([1, 0, 0, 1])), ("0", mat2([0, -1, 1, 0])), ("1/2", mat2([1, 0, 2, 1]))] {
        let c = cusp_classify(&p, &g, 6)?;
        println!("Γ1(4) cusp {label}: {:?}, width {}", c.parity, c.width);
    }
    Ok(())
}
