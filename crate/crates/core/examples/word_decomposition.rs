//! Words in R and S for integer matrices by the nearest-integer Euclidean
//! algorithm, and the coset representatives used by the Eisenstein sum.
//!
//! ```bash
//! cargo run --example word_decomposition
//! ```

use jetforms::lattice::{coset_reps_sl2z, mat2_from_i64, presentation_sl2z, word_decompose_sl2z};

fn main() -> jetforms::Result<()> {
    let pres = presentation_sl2z();
    for m in [[1, 1, 0, 1], [2, 1, 1, 1], [13, 8, 21, 13], [144, -89, 377, -233]] {
        let (w, sign) = word_decompose_sl2z(m)?;
        let back = pres.eval_classical(&w);
        let target = mat2_from_i64(if sign > 0 { m } else { m.map(|x| -x) });
        println!("{m:?}: word {:?} (length {}), sign {sign:+}, re-evaluates: {}", w.0, w.len(), back == target);
    }
    let reps = coset_reps_sl2z(10)?;
    println!("coset representatives with c, |d| ≤ 10: {}", reps.len());
    for r in reps.iter().take(5) {
        println!("  {:?} = {:+}·{:?}", r.matrix, r.sign, r.word.0);
    }
    Ok(())
}
