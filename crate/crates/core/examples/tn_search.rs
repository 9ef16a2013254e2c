//! Exhaustive computation of t_n(F_q).
//!
//! cargo run --release --example tn_search -- F3 2

use trimat::field::Field;
use trimat::matspace::write_space;
use trimat::search::{compute_tn, SearchOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "F3".into());
    let n: usize = args.next().map_or(2, |s| s.parse().expect("n"));
    let field = Field::parse(&spec).expect("field spec");
    let report = compute_tn(&field, n, &SearchOptions::default()).expect("search");
    println!("t_{n}({field}) = {} (exhaustive: {})", report.value, report.exhaustive);
    for d in &report.dimensions {
        println!(
            "  dim {}: {} of {} subspaces scanned, {} matrices checked, passing found: {}",
            d.dim, d.subspaces_scanned, d.subspaces_total, d.matrices_checked, d.passing_found
        );
    }
    println!("  wall time: {:.2?}", report.wall);
    print!("witness:\n{}", write_space(&report.witness));
}
