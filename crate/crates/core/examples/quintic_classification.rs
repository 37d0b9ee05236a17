//! Run with: cargo run --example quintic_classification
//!
//! Quintic curves on the threefold: smoothness, stabilizers and counts.

use fano_check::field::PrimeField;
use fano_check::quintic::{check_quintic_smooth, count_v22, stabilizer_exhaustive, CountType, QuinticSpec};

fn main() -> fano_check::Result<()> {
    let f = PrimeField::new(7)?;
    for spec in [QuinticSpec::MU, QuinticSpec::Ga(1), QuinticSpec::Gm(2)] {
        let label = spec.label(&f);
        let s = stabilizer_exhaustive(&f, &spec, 10_000)?;
        println!("{label}: smooth {}, stabilizer order {} ({:?})", check_quintic_smooth(&f, &spec)?, s.order, s.tag);
    }
    for q in [7, 8, 9] {
        let r = count_v22(CountType::Gm, q)?;
        println!("Gm-type classes over F{q}: enumerated {}, formula {}", r.enumerated, r.formula);
    }
    Ok(())
}
