//! Jets over parameter algebras: dual numbers, truncated polynomials and
//! the even exterior algebra, with exact exp/log and powers.
//!
//! ```bash
//! cargo run --example jet_arithmetic
//! ```

use jetforms::io::{algebra_json, jet_json};
use jetforms::scalar::rat;
use jetforms::{AlgebraKind, AlgebraSpec, Jet, Rational};

fn main() -> jetforms::Result<()> {
    // R[ε]/(ε³): x = 2 + ε
    let alg = AlgebraSpec::dual(3);
    let x = Jet::<Rational>::new(&alg, vec![rat(2, 1), rat(1, 1), rat(0, 1)]);
    println!("x       = {}", jet_json(&x));
    println!("x^5     = {}", jet_json(&x.powi(5)?));
    println!("1/x     = {}", jet_json(&x.invert()?));
    println!("x·(1/x) = {}", jet_json(&(&x * &x.invert()?)));

    // floating exp/log round trip on the nilpotent part
    let y = x.map(|r| jetforms::scalar::rat_to_f64(r));
    let back = y.log()?.exp()?;
    println!("exp(log x) - x, norm = {:.2e}", (&back - &y).norm());

    // the even part of the exterior algebra on R^4: basis 1, e_ie_j, e1e2e3e4
    let ext = AlgebraSpec::create(AlgebraKind::EvenExterior, 4, 5)?;
    println!("even exterior algebra: {}", algebra_json(&ext)["basis"]);
    let a = Jet::<Rational>::basis(&ext, 1);
    let b = Jet::<Rational>::basis(&ext, 6);
    println!("e1e2 · e3e4 = {}", jet_json(&(&a * &b)));
    println!("(e1e2)²    = {}", jet_json(&(&a * &a)));
    Ok(())
}
