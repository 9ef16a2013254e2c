//! Hessenberg completion and bordered matrices that cannot be triangularized.
//!
//! cargo run --example erasure_hessenberg

use trimat::construct::{erasure_witness, hessenberg_complete, nilpotent_companion};
use trimat::field::Field;
use trimat::poly::{char_poly, Poly};
use trimat::spaces::splits;

fn main() {
    let f = Field::parse("F5").expect("field spec");
    let m = nilpotent_companion(&f, 4);
    let target = Poly::parse(&f, "t^4 + 3t^2 + t + 2").expect("poly");
    let r = hessenberg_complete(&m, &target).expect("completion");
    let mut completed = m.clone();
    for (j, x) in r.iter().enumerate() {
        completed.set(0, j + 1, f.add(m.get(0, j + 1), x));
    }
    println!("completed:\n{completed}char poly {}", char_poly(&completed));

    let n_block = nilpotent_companion(&f, 3);
    let c = vec![f.one(), f.zero(), f.from_int(2)];
    let w = erasure_witness(&n_block, &c).expect("witness");
    println!("bordered:\n{}char poly {}", w.bordered, char_poly(&w.bordered));
    println!("obstruction {}, splits {}", w.obstruction, splits(&w.bordered).unwrap());
}
