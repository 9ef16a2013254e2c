//! Field arithmetic and the predicates that drive the weak check.
//!
//! cargo run --example field_info -- F9

use trimat::field::Field;

fn main() {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "F9".into());
    let f = Field::parse(&spec).expect("field spec");
    println!(
        "field {f}: order {:?}, characteristic {}",
        f.order(),
        f.characteristic()
    );
    println!("predicates: {:?}", f.predicates());
    match f.elements() {
        Ok(elems) => {
            for a in &elems {
                let square = f.is_square(a).map_or("-".to_string(), |r| f.format_elem(&r));
                let inverse = f.invert(a).map_or("-".to_string(), |r| f.format_elem(&r));
                println!(
                    "  {:>6}  inverse {:>6}  square root {:>6}",
                    f.format_elem(a),
                    inverse,
                    square
                );
            }
        }
        Err(_) => {
            let two = f.from_int(2);
            println!("  2 is a square: {}", f.is_square(&two).is_some());
        }
    }
}
