//! Run with: cargo run --example arithmetic_reduction
//!
//! Reduction types, flat limits, Hilbert symbols and counts over the rationals.

use fano_check::arith::{int, parse_rational};
use fano_check::reduction::{check_twisted_flat_limit, classify_split_gm_reduction, hilbert_symbol, shaf_ga_prime_count, shaf_gm_candidates, shaf_pgl2_count, Place};

fn main() -> fano_check::Result<()> {
    let u = parse_rational("5/4+81")?;
    let o = classify_split_gm_reduction(&u, 3)?;
    println!("u = {u} at 3: standard {:?}, twisted {:?}", o.standard, o.twisted.map(|t| t.fiber));
    let limit = check_twisted_flat_limit(&u, &parse_rational("1/3")?, 3)?;
    println!("flat limit is {} as predicted: {}", limit.expected, limit.matches);

    println!("(-1, -1) at 2 = {}", hilbert_symbol(&int(-1), &int(-1), Place::Prime(2))?);
    println!("S = {{2,5}}: {} Mukai-Umemura forms, {} additive forms", shaf_pgl2_count(&[2, 5])?.formula, shaf_ga_prime_count(&[2, 5])?.formula);
    let gm = shaf_gm_candidates(&[2], 6, 20)?;
    println!("S = {{2}} multiplicative candidates: {:?}", gm.candidates.iter().map(|c| &c.u).collect::<Vec<_>>());
    Ok(())
}
