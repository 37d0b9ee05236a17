//! Run with: cargo run --example projective_geometry
//!
//! Rational normal curves, image comparison and plane intersection multiplicities.

use fano_check::field::PrimeField;
use fano_check::multipoly::parse_poly;
use fano_check::projective::plane::intersection_multiplicity;
use fano_check::projective::{curves_same_image, is_smooth_rnc, CurveMap};

fn main() -> fano_check::Result<()> {
    let f = PrimeField::new(11)?;
    let cubic = CurveMap::from_int_coeffs(&f, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])?;
    let moved = cubic.reparametrize(&f, &[[2, 3], [1, 5]]);
    println!("twisted cubic smooth: {}, same image after reparametrizing: {}", is_smooth_rnc(&f, &cubic), curves_same_image(&f, &cubic, &moved)?);

    let v = ["x", "y", "z"];
    let conic = parse_poly(&f, &v, "y*z - x^2")?;
    let other = parse_poly(&f, &v, "y*z - x^2 - y^2")?;
    println!("osculating conics meet at (0:0:1) with multiplicity {}", intersection_multiplicity(&f, &conic, &other, &[0, 0, 1])?);
    Ok(())
}
