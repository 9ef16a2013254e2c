//! Conjugacy classes of optimal weakly triangularizable spaces.
//!
//! cargo run --release --example classify -- F2 2

use trimat::field::Field;
use trimat::matspace::write_space;
use trimat::search::{classify_optimal, SearchOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "F2".into());
    let n: usize = args.next().map_or(2, |s| s.parse().expect("n"));
    let f = Field::parse(&spec).expect("field spec");
    let c = classify_optimal(&f, n, &SearchOptions::default()).expect("classify");
    println!(
        "{f} n={n}: t_n = {}, {} optimal spaces in {} orbits",
        c.value,
        c.optimal_count,
        c.classes.len()
    );
    for k in &c.classes {
        print!(
            "orbit size {}, irreducible {}:\n{}",
            k.orbit_size,
            k.irreducible,
            write_space(&k.representative)
        );
    }
}
