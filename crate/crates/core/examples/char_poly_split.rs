//! Characteristic polynomials and the triangularizability certificate.
//!
//! cargo run --example char_poly_split -- F3

use trimat::field::Field;
use trimat::matspace::{random_matrix, seeded_rng};
use trimat::poly::{char_poly, split_completely};
use trimat::spaces::{triangularizable, Certificate};

fn main() {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "F3".into());
    let f = Field::parse(&spec).expect("field spec");
    let mut rng = seeded_rng(1);
    for _ in 0..4 {
        let m = random_matrix(&f, 3, 3, &mut rng);
        let chi = char_poly(&m);
        println!("{m}char poly {chi}");
        match split_completely(&chi).expect("split") {
            r if r.splits() => println!(
                "  roots {:?}",
                r.roots().iter().map(|a| f.format_elem(a)).collect::<Vec<_>>()
            ),
            r => println!("  no split, factor {}", r.witness().unwrap()),
        }
        match triangularizable(&m).expect("certificate") {
            Certificate::Triangularizable { conjugator } => {
                println!("  P M P^-1 =\n{}", m.conjugate(&conjugator).unwrap());
            }
            Certificate::NotTriangularizable { obstruction } => println!("  obstruction {obstruction}\n"),
        }
    }
}
