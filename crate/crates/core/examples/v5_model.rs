//! Run with: cargo run --example v5_model
//!
//! Smoothness of the threefold, the group action and its orbits over small fields.

use fano_check::field::PrimeField;
use fano_check::v5::{pair_mode, verify_action_homomorphism, verify_orbit_table, verify_preservation, verify_y_smooth, ActionFamily};

fn main() -> fano_check::Result<()> {
    for p in [2, 3, 5] {
        let r = verify_y_smooth(p)?;
        println!("F{p}: {} points, {} singular", r.points_on_y, r.singular_points.len());
    }
    let f = PrimeField::new(5)?;
    let fam = ActionFamily::sigma(&f)?;
    let g = fam.group_elements();
    let hom = verify_action_homomorphism(&fam, false, &g, pair_mode(g.len(), 1 << 20, 0));
    println!("PGL2(F5) of order {}: homomorphism {}, preserves Y {}", g.len(), hom.status.as_str(), verify_preservation(&fam, &g).status.as_str());
    for e in verify_orbit_table(&PrimeField::new(7)?)?.entries {
        println!("{} at {}: dimension {}", e.label, e.point, e.tangent_dimension);
    }
    Ok(())
}
