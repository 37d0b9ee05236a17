//! Run with: cargo run --example exact_algebra
//!
//! Finite fields, polynomial gcds and resultants, and exact rationals.

use fano_check::arith::{parse_rational, vp};
use fano_check::field::{construct_extension, field_label, Field, PrimeField};
use fano_check::poly;

fn main() -> fano_check::Result<()> {
    let f16 = construct_extension(2, 4)?;
    let g = fano_check::field::primitive_element(&f16);
    println!("{}: primitive element has order {}", field_label(&f16), (1..16).find(|&k| f16.pow(&g, k) == f16.one()).unwrap());

    let f7 = PrimeField::new(7)?;
    // (x - 1)(x - 2) and (x - 2)(x + 3)
    let a = poly::mul(&f7, &[6, 1], &[5, 1]);
    let b = poly::mul(&f7, &[5, 1], &[3, 1]);
    println!("gcd over F7: {:?}, resultant {}", poly::gcd(&f7, &a, &b), poly::resultant(&f7, &a, &b)?);

    let u = parse_rational("5/4+81")?;
    println!("u = {u}, v_3(u - 5/4) = {}", vp(&(&u - parse_rational("5/4")?), 3));
    Ok(())
}
