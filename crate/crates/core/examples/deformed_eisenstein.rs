//! The first-order deformed Eisenstein series of weight 6 by summation over
//! cosets of the deformed stabilizer of ∞, compared with the classical
//! divisor sums and checked for invariance under the deformed generators.
//!
//! ```bash
//! cargo run --release --example deformed_eisenstein
//! ```

use std::sync::Arc;

use jetforms::eisenstein::{deformed_eisenstein, EisensteinConfig};
use jetforms::forms::{check_points, invariance_residual, Frame};
use jetforms::oracle::eisenstein;
use jetforms::scalar::rat_to_f64;
use jetforms::verify::lifted_sl2z;

fn main() -> jetforms::Result<()> {
    let l = lifted_sl2z(2)?;
    let frame = Arc::new(Frame::for_lattice(&l)?);
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cfg = EisensteinConfig { k: 6, bound: 1000, m: 10, threads };
    let rep = deformed_eisenstein(&l, &frame, &cfg)?;
    let oracle = eisenstein(6, 10)?;
    println!("{} coset classes in {:.2}s", rep.classes, rep.seconds);
    println!("{:>3} {:>22} {:>22} {:>14}", "n", "body", "ε part", "tail");
    for (n, c) in rep.form.coeffs.iter().enumerate() {
        println!("{n:>3} {:>22.6} {:>22.6} {:>14.2e}   (classical {})", c.c[0].re, c.c[1].re, rep.tail[n], rat_to_f64(&oracle[n]));
    }
    println!("invariance residual: {:.2e}", invariance_residual(&rep.form, &l, &check_points(&l))?);
    Ok(())
}
