//! Adapting the classical basis of M_k(SL(2,Z)) to the deformed lattice
//! over R[ε]/(ε^N): residuals, cusp-form detection, the free-basis
//! certificate, the size of the full solution space, and E4·E6 vs E10.
//!
//! ```bash
//! cargo run --release --example adapt_forms
//! ```

use std::sync::Arc;

use jetforms::forms::{adapt_form, graded_check, rank_verify, solution_space_dim, AdaptConfig, Frame};
use jetforms::oracle::echelon_basis;
use jetforms::verify::lifted_sl2z;

fn main() -> jetforms::Result<()> {
    let cfg = AdaptConfig::default();
    for n in [2, 3] {
        let l = lifted_sl2z(n)?;
        let frame = Arc::new(Frame::for_lattice(&l)?);
        for k in [4, 6, 8, 10, 12, 14] {
            let basis = echelon_basis(k as usize, cfg.m)?;
            let rep = adapt_form(&l, &frame, k, &basis, &cfg)?;
            let rank = rank_verify(&rep.forms, basis.len(), 1e-8)?;
            let space = solution_space_dim(&l, &frame, k, &cfg, 1e-12)?;
            let cusp: Vec<_> = rep.details.iter().filter(|d| d.cuspidal).map(|d| d.index).collect();
            println!(
                "N={n} k={k:>2}: {} forms, residual {:.1e}, cusp forms {cusp:?}, free basis {}, solution space {} = {}·{}",
                rep.forms.len(),
                rep.max_residual,
                rank.free_basis,
                space.dim,
                rep.forms.len(),
                l.alg.dim()
            );
        }
        let adapt = |k: i64| adapt_form(&l, &frame, k, &echelon_basis(k as usize, cfg.m).unwrap(), &cfg);
        let g = graded_check(&adapt(4)?.forms[0], &adapt(6)?.forms[0], &adapt(10)?.forms[0], 8)?;
        println!("N={n}: E4·E6 = u·E10 with u constant to {:.1e}", g.max_deviation);
    }
    Ok(())
}
