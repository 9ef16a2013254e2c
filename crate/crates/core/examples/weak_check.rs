//! Exhaustive and sampled weak triangularizability checks.
//!
//! cargo run --example weak_check

use trimat::field::Field;
use trimat::spaces::{sym_space, upper_triangular_space, weakly_triangularizable, CheckMode};

fn main() {
    for spec in ["F2", "F3", "F5"] {
        let f = Field::parse(spec).expect("field spec");
        for (name, s) in [("T_2", upper_triangular_space(&f, 2)), ("Sym_2", sym_space(&f, 2))] {
            let r = weakly_triangularizable(&s, CheckMode::Exhaustive).expect("check");
            print!(
                "{spec} {name}: passed {} after {} members",
                r.passed(),
                r.samples_checked
            );
            match &r.counterexample {
                Some(c) => println!(", counterexample\n{c}"),
                None => println!(),
            }
        }
    }
    let q = Field::parse("Q").expect("field spec");
    let r = weakly_triangularizable(&sym_space(&q, 2), CheckMode::Sampled { samples: 1000, seed: 5 }).expect("check");
    println!(
        "Q Sym_2 sampled: passed {} after {} samples",
        r.passed(),
        r.samples_checked
    );
}
