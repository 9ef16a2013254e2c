//! Canonical subspaces, the trace pairing and the space file format.
//!
//! cargo run --example subspaces_orthocomplement

use trimat::field::Field;
use trimat::matspace::{parse_space, write_space};
use trimat::spaces::{sl_space, sym_space, upper_triangular_space};

fn main() {
    let f = Field::parse("F3").expect("field spec");
    for (name, s) in [
        ("T_3", upper_triangular_space(&f, 3)),
        ("sl_3", sl_space(&f, 3)),
        ("Sym_3", sym_space(&f, 3)),
    ] {
        let perp = s.trace_orthocomplement();
        println!("{name}: dim {}, orthocomplement dim {}", s.dim(), perp.dim());
        assert_eq!(perp.trace_orthocomplement(), s);
    }
    let perp = upper_triangular_space(&f, 2).trace_orthocomplement();
    let text = write_space(&perp);
    print!("orthocomplement of T_2:\n{text}");
    assert_eq!(parse_space(&text).unwrap(), perp);
}
