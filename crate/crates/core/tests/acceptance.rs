//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines always reach the console.

use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;
use trimat::cli::cli_dispatch;
use trimat::cli::verify::{random_regular_hessenberg, random_target};
use trimat::construct::{appendix_b_construction, erasure_witness, hessenberg_complete};
use trimat::field::{Elem, Field};
use trimat::matspace::{
    b2, c2, random_invertible_with, random_matrix, random_subspace, seeded_rng, trace_form, Matrix, Subspace, VecSpace,
};
use trimat::poly::{char_poly, Poly};
use trimat::search::{compute_tn, SearchOptions, MAX_GROUP_ORDER};
use trimat::spaces::{
    alt_space, joint, joint_chain, odometer, random_triangularizable_space, sl_space, sym_space, triangularizable,
    weakly_triangularizable, CheckMode,
};
use trimat::structure::{
    check_two_complex_lemma, decompose, find_adapted, general_linear_group, hom_into, orbit_canonical_form,
    spaces_similar,
};

const SEED: u64 = 20_240_601;

struct Line {
    id: u32,
    passed: bool,
    text: String,
}

fn field(s: &str) -> Field {
    Field::parse(s).unwrap()
}

fn cli_json(args: &[&str]) -> (i32, Value) {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("trimat").chain(args.iter().copied());
    let code = cli_dispatch(argv, &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    (code, serde_json::from_str(text.trim()).unwrap_or(Value::Null))
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn criterion1() -> Line {
    let mut notes = vec![];
    let mut ok = true;
    for (spec, n, expected, limit, dim_total) in [
        ("F3", "2", 3, 1.0, 1u64),
        ("F5", "2", 3, 10.0, 1),
        ("F3", "3", 6, 600.0, 8_069_620),
    ] {
        let t = Instant::now();
        let (code, doc) = cli_json(&["tn", "--field", spec, "--n", n]);
        let wall = t.elapsed();
        let value = doc["value"].as_u64().unwrap_or(0);
        let exhaustive = doc["exhaustive"].as_bool().unwrap_or(false);
        let first = &doc["counters"]["dimensions"][0];
        let scanned = first["subspaces_scanned"].as_u64().unwrap_or(0);
        let total = first["subspaces_total"].as_u64().unwrap_or(0);
        let pass = code == 0
            && value == expected
            && exhaustive
            && scanned == dim_total
            && total == dim_total
            && wall.as_secs_f64() < limit;
        ok &= pass;
        notes.push(format!(
            "t_{n}({spec})={value} exhaustive={exhaustive} scanned {scanned}/{total} in {} (limit {limit}s)",
            secs(wall)
        ));
    }
    Line {
        id: 1,
        passed: ok,
        text: notes.join("; "),
    }
}

fn criterion2() -> Line {
    let f2 = field("F2");
    let t = Instant::now();
    let r2 = compute_tn(&f2, 2, &SearchOptions::default()).unwrap();
    let group = general_linear_group(&f2, 2, MAX_GROUP_ORDER).unwrap();
    let sl2_orbit = orbit_canonical_form(&r2.witness, &group) == orbit_canonical_form(&sl_space(&f2, 2), &group);
    let r3 = compute_tn(&f2, 3, &SearchOptions::default()).unwrap();
    let wall = t.elapsed();
    let dim7 = r3.dimensions.iter().find(|d| d.dim == 7).unwrap();
    let lower = joint(&sl_space(&f2, 2), &Subspace::full(&f2, 1)).unwrap();
    let lower_ok = lower.dim() == 6 && weakly_triangularizable(&lower, CheckMode::Exhaustive).unwrap().passed();
    let passed = r2.value == 3
        && sl2_orbit
        && r3.value == 6
        && r3.exhaustive
        && dim7.subspaces_scanned == 43_435
        && dim7.complete
        && lower_ok
        && wall < Duration::from_secs(60);
    Line {
        id: 2,
        passed,
        text: format!(
            "t_2(F2)={} witness in sl2 orbit={sl2_orbit}; t_3(F2)={} dim-7 scanned {}/43435; joint(sl2,Mat1) dim 6 passes={lower_ok}; {} (limit 60s)",
            r2.value,
            r3.value,
            dim7.subspaces_scanned,
            secs(wall)
        ),
    }
}

fn criterion3() -> Line {
    let mut rng = seeded_rng(SEED);
    let fields = [field("F3"), field("F5")];
    let t = Instant::now();
    let mut hits = 0;
    let total = 500;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=5);
        let m = random_regular_hessenberg(f, n, &mut rng);
        let r = random_target(f, n, &m.trace(), &mut rng);
        let Ok(row) = hessenberg_complete(&m, &r) else { continue };
        let mut done = m.clone();
        for (j, x) in row.iter().enumerate() {
            done.set(0, j + 1, f.add(m.get(0, j + 1), x));
        }
        hits += usize::from(char_poly(&done) == r);
    }
    let wall = t.elapsed();
    Line {
        id: 3,
        passed: hits == total && wall < Duration::from_secs(5),
        text: format!("{hits}/{total} completions exact in {} (limit 5s)", secs(wall)),
    }
}

fn criterion4() -> Line {
    let mut rng = seeded_rng(SEED + 1);
    let fields = [field("F3"), field("F5")];
    let t = Instant::now();
    let total = 200;
    let mut fails_oracle = 0;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=4);
        let nb = random_matrix(f, n, n, &mut rng);
        let c: Vec<Elem> = loop {
            let c: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            if c.iter().any(|x| !f.is_zero(x)) {
                break c;
            }
        };
        let w = erasure_witness(&nb, &c).unwrap();
        let shape_ok =
            w.bordered.submatrix(1..n + 1, 1..n + 1) == nb && w.bordered.submatrix(1..n + 1, 0..1).col(0) == c;
        if shape_ok && !triangularizable(&w.bordered).unwrap().is_triangularizable() {
            fails_oracle += 1;
        }
    }
    let wall = t.elapsed();
    Line {
        id: 4,
        passed: fails_oracle == total && wall < Duration::from_secs(10),
        text: format!(
            "{fails_oracle}/{total} bordered matrices not triangularizable in {} (limit 10s)",
            secs(wall)
        ),
    }
}

fn nonzero_vec<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Vec<Elem> {
    loop {
        let x: Vec<Elem> = (0..n).map(|_| f.random_elem(rng)).collect();
        if x.iter().any(|a| !f.is_zero(a)) {
            return x;
        }
    }
}

fn criterion5() -> Line {
    let mut rng = seeded_rng(SEED + 2);
    let fields = [field("F3"), field("F5")];
    let (mut sum_ok, mut rank_ok, mut polar_ok) = (0, 0, 0);
    for i in 0..200 {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=n * n);
        let t = random_subspace(f, n, d, &mut rng);
        let k = rng.gen_range(1..=n);
        let w = VecSpace::span(f, n, (0..k).map(|_| nonzero_vec(f, n, &mut rng)).collect());
        // Both sides computed from scratch: the restriction map is applied
        // to a basis of T^⊥ and W.
        let inside = t.intersect(&hom_into(&w)).unwrap().dim();
        let perp = t.trace_orthocomplement();
        let images: Vec<Vec<Elem>> = perp
            .basis()
            .iter()
            .map(|u| w.basis().iter().flat_map(|b| u.mul_vec(b)).collect())
            .collect();
        let restricted = VecSpace::span(f, w.dim() * n, images).dim();
        sum_ok += usize::from(inside + restricted == w.dim() * n);
    }
    for i in 0..200 {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=n * n);
        let s = random_subspace(f, n, d, &mut rng);
        let x = nonzero_vec(f, n, &mut rng);
        let rank = VecSpace::span(
            f,
            n,
            s.trace_orthocomplement()
                .basis()
                .iter()
                .map(|u| u.mul_vec(&x))
                .collect(),
        )
        .dim();
        let line = VecSpace::span(f, n, vec![x.clone()]);
        let range_dim = s.intersect(&hom_into(&line)).unwrap().dim();
        rank_ok += usize::from(rank == n - range_dim);
    }
    let specs = ["F2", "F3", "F4", "F5", "F7", "F8", "F9", "Q", "F2(x)", "F3(x)"];
    for spec in specs {
        let f = field(spec);
        for _ in 0..500 {
            let n = rng.gen_range(2..=4);
            let a = random_matrix(&f, n, n, &mut rng);
            let b = random_matrix(&f, n, n, &mut rng);
            let lhs = b2(&a, &b);
            let direct = f.sub(&f.mul(&a.trace(), &b.trace()), &trace_form(&a, &b));
            let polar = f.sub(&f.sub(&c2(&a.add(&b)), &c2(&a)), &c2(&b));
            polar_ok += usize::from(lhs == direct && lhs == polar);
        }
    }
    let polar_total = 500 * specs.len();
    Line {
        id: 5,
        passed: sum_ok == 200 && rank_ok == 200 && polar_ok == polar_total,
        text: format!(
            "sum identity {sum_ok}/200, rank identity {rank_ok}/200, b2 polarization {polar_ok}/{polar_total} over {}",
            specs.join(",")
        ),
    }
}

fn criterion6() -> Line {
    let mut rng = seeded_rng(SEED + 3);
    let f3 = field("F3");
    let (mut adapted, mut complex_ok, mut complex_total) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=n * (n + 1) / 2);
        let s = random_triangularizable_space(&f3, n, d, &mut rng);
        adapted += usize::from(find_adapted(&s).unwrap().is_some());
        if n >= 2 {
            complex_total += 1;
            complex_ok += usize::from(check_two_complex_lemma(&s).unwrap());
        }
    }
    Line {
        id: 6,
        passed: adapted == 100 && complex_ok == complex_total,
        text: format!("adapted vector found {adapted}/100; 2-complex lemma {complex_ok}/{complex_total} (n >= 2)"),
    }
}

fn criterion7() -> Line {
    let mut rng = seeded_rng(SEED + 4);
    let fields = [field("F2"), field("F3")];
    let (mut dims_ok, mut similar_ok, mut stable_ok) = (0, 0, 0);
    let total = 100;
    for i in 0..total {
        let f = &fields[i % 2];
        let mut choices = vec![Subspace::full(f, 1)];
        if f.characteristic() == 2 {
            choices.push(sl_space(f, 2));
        }
        let n = rng.gen_range(1..=3);
        let mut blocks: Vec<Subspace> = vec![];
        while blocks.iter().map(Subspace::n).sum::<usize>() < n {
            let b = choices[rng.gen_range(0..choices.len())].clone();
            if blocks.iter().map(Subspace::n).sum::<usize>() + b.n() <= n {
                blocks.push(b);
            }
        }
        let dims: Vec<usize> = blocks.iter().map(Subspace::n).collect();
        let j = joint_chain(&blocks).unwrap();
        let s = j.conjugate(&random_invertible_with(f, n, &mut rng)).unwrap();
        let dec = decompose(&s).unwrap();
        dims_ok += usize::from(dec.block_dims == dims);
        similar_ok += usize::from(
            dec.blocks.len() == blocks.len()
                && dec
                    .blocks
                    .iter()
                    .zip(&blocks)
                    .all(|(x, y)| spaces_similar(x, y, MAX_GROUP_ORDER).unwrap().holds()),
        );
        let stable = (0..5).all(|_| {
            let again = s.conjugate(&random_invertible_with(f, n, &mut rng)).unwrap();
            decompose(&again).unwrap().block_dims == dec.block_dims
        });
        stable_ok += usize::from(stable);
    }
    Line {
        id: 7,
        passed: dims_ok == total && similar_ok == total && stable_ok == total,
        text: format!(
            "block_dims recovered {dims_ok}/{total}, blocks similar {similar_ok}/{total}, stable under 5 re-conjugations {stable_ok}/{total}"
        ),
    }
}

fn criterion8() -> Line {
    let fx = field("F2(x)");
    let x = fx.variable().unwrap();
    let t = Instant::now();
    let (a, s, report) = appendix_b_construction(&fx, &x).unwrap();
    let mut diag = Matrix::zeros(&fx, 3, 3);
    diag.set(1, 1, fx.one());
    diag.set(2, 2, x.clone());
    let sa_exact = s.mul(&a) == diag;
    let expected = Poly::new(&fx, vec![fx.zero(), x.clone(), fx.zero(), fx.one()]);
    let chi_exact = char_poly(&a) == expected;
    let x_not_square = fx.is_square(&x).is_none();
    let wall = t.elapsed();
    Line {
        id: 8,
        passed: sa_exact && chi_exact && x_not_square && report.holds() && wall < Duration::from_secs(1),
        text: format!(
            "S·A = Diag(0,1,x) {sa_exact}; χ_A = t^3 + xt {chi_exact}; is_square(x) = none {x_not_square}; {} (limit 1s)",
            secs(wall)
        ),
    }
}

fn criterion9() -> Line {
    let mut ok = 0;
    let mut total = 0;
    for spec in ["F2", "F3", "F4", "F5"] {
        let f = field(spec);
        for n in 1..=4 {
            total += 1;
            ok += usize::from(sym_space(&f, n).trace_orthocomplement() == alt_space(&f, n));
        }
    }
    Line {
        id: 9,
        passed: ok == total,
        text: format!("Sym_n^⊥ = Alt_n in {ok}/{total} cases (n <= 4, q in 2,3,4,5)"),
    }
}

fn criterion10() -> Line {
    let mut rng = seeded_rng(SEED + 5);
    let fields = [field("F3"), field("F5")];
    let (mut pairs, mut violations) = (0u64, 0u64);
    let spaces = 100;
    for i in 0..spaces {
        let f = &fields[i % 2];
        let q = f.order().unwrap();
        let n = rng.gen_range(2..=3);
        let d = rng.gen_range(1..=n * (n + 1) / 2);
        let s = random_triangularizable_space(f, n, d, &mut rng);
        let members: Vec<Matrix> = (0..q.pow(d as u32))
            .map(|k| {
                let coords: Vec<Elem> = odometer(k, q, d).into_iter().map(|x| f.element(x)).collect();
                s.member(&coords)
            })
            .filter(|m| m.rank() <= 1 && f.is_zero(&m.trace()))
            .collect();
        for a in &members {
            for b in &members {
                pairs += 1;
                violations += u64::from(!f.is_zero(&a.mul(b).trace()));
            }
        }
    }
    Line {
        id: 10,
        passed: violations == 0 && pairs > 0,
        text: format!("{violations} violations of tr(AB) = 0 over {pairs} pairs in {spaces} spaces"),
    }
}

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and
    // ignored; `--list` prints nothing so test discovery works.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let started = Instant::now();
    let criteria: [fn() -> Line; 10] = [
        criterion1,
        criterion2,
        criterion3,
        criterion4,
        criterion5,
        criterion6,
        criterion7,
        criterion8,
        criterion9,
        criterion10,
    ];
    let mut failed = 0;
    for c in criteria {
        let t = Instant::now();
        let line = c();
        failed += usize::from(!line.passed);
        println!(
            "criterion {:>2}: {} {} [{}]",
            line.id,
            if line.passed { "PASS" } else { "FAIL" },
            line.text,
            secs(t.elapsed())
        );
    }
    println!("acceptance: {}/10 passed in {}", 10 - failed, secs(started.elapsed()));
    if failed > 0 {
        std::process::exit(1);
    }
}
