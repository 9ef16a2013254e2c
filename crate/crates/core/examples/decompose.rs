//! Invariant flags and block decomposition of a space.
//!
//! cargo run --example decompose

use trimat::field::Field;
use trimat::matspace::{seeded_rng, write_space};
use trimat::spaces::{joint, random_triangularizable_space, sl_space};
use trimat::structure::{decompose, is_irreducible};

fn main() {
    let f = Field::parse("F2").expect("field spec");
    let mut rng = seeded_rng(8);
    let tri = random_triangularizable_space(&f, 3, 6, &mut rng);
    let d = decompose(&tri).expect("decompose");
    println!("conjugate of T_3: blocks {:?}", d.block_dims);
    println!("{}", d.to_json());
    let mixed = joint(&sl_space(&f, 2), &random_triangularizable_space(&f, 1, 1, &mut rng)).expect("joint");
    let d = decompose(&mixed).expect("decompose");
    println!("sl_2 joined with F: blocks {:?}", d.block_dims);
    for b in &d.blocks {
        print!("irreducible {}:\n{}", is_irreducible(b).unwrap(), write_space(b));
    }
}
