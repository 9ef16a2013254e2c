//! A selfadjoint matrix whose characteristic polynomial does not split, and
//! the search for a symmetric conjugate.
//!
//! cargo run --example appendix_b -- "F2(x)" x

use trimat::construct::{appendix_b_construction, symmetrize_attempt};
use trimat::field::Field;

fn main() {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "F2(x)".into());
    let lambda = args.next().unwrap_or_else(|| "x".into());
    let f = Field::parse(&spec).expect("field spec");
    let lam = f.parse_elem(&lambda).expect("lambda");
    let (a, s, report) = appendix_b_construction(&f, &lam).expect("construction");
    println!("A:\n{a}S:\n{s}S A:\n{}", s.mul(&a));
    println!("char poly {}, splits {}", report.char_poly, report.splits);
    if let Some(q) = &report.obstruction {
        println!("obstruction {q}");
    }
    println!("holds {}", report.holds());
    match symmetrize_attempt(&a, &s).expect("symmetrize") {
        Some((p, b)) => println!("P:\n{p}P A P^-1:\n{b}"),
        None => println!("no symmetric conjugate found"),
    }
}
