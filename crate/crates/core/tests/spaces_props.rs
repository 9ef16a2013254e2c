use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use trimat::field::{Elem, Field};
use trimat::matspace::{
    parse_space, random_invertible_with, random_matrix, random_subspace, seeded_rng, write_space, Matrix, Subspace,
};
use trimat::poly::char_poly;
use trimat::spaces::{
    joint, odometer, pythagorean_matrix, pythagorean_witness, random_triangularizable_space, sym_space,
    triangularizable, weakly_triangularizable, Certificate, CheckMode,
};

const SMALL: &[&str] = &["F2", "F3", "F4", "F5"];

fn field(s: &str) -> Field {
    Field::parse(s).unwrap()
}

fn all_members(s: &Subspace) -> Vec<Matrix> {
    let f = s.field();
    let q = f.order().unwrap();
    let d = s.dim();
    (0..q.pow(d as u32))
        .map(|i| {
            let coords: Vec<Elem> = odometer(i, q, d).into_iter().map(|x| f.element(x)).collect();
            s.member(&coords)
        })
        .collect()
}

/// Weak check by brute force over every member, with no projective
/// pruning.
fn naive_weak(s: &Subspace) -> bool {
    all_members(s)
        .iter()
        .all(|m| triangularizable(m).unwrap().is_triangularizable())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rref_is_canonical(spec in prop::sample::select(SMALL), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(0..=n * n);
        let s = random_subspace(&f, n, d, &mut rng);
        let mut mats: Vec<Matrix> = s
            .basis()
            .into_iter()
            .map(|m| {
                let c = loop {
                    let c = f.random_elem(&mut rng);
                    if !f.is_zero(&c) {
                        break c;
                    }
                };
                m.scale(&c)
            })
            .collect();
        mats.shuffle(&mut rng);
        // A redundant combination must not change the span.
        if mats.len() >= 2 {
            let extra = mats[0].add(&mats[1]);
            mats.push(extra);
        }
        prop_assert_eq!(Subspace::span(&f, n, &mats).unwrap(), s);
    }

    #[test]
    fn orthocomplement_is_an_involution(spec in prop::sample::select(&["F3", "F5"][..]), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(0..=n * n);
        let s = random_subspace(&f, n, d, &mut rng);
        let perp = s.trace_orthocomplement();
        prop_assert_eq!(perp.dim(), n * n - s.dim());
        prop_assert_eq!(perp.trace_orthocomplement(), s);
        prop_assert_eq!(Subspace::full(&f, n).trace_orthocomplement(), Subspace::zero(&f, n));
    }

    #[test]
    fn space_files_round_trip(spec in prop::sample::select(&["F2", "F4", "F9", "Q", "F2(x)"][..]), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(0..=n * n);
        let s = random_subspace(&f, n, d, &mut rng);
        let text = write_space(&s);
        let back = parse_space(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(write_space(&back), text);
    }

    #[test]
    fn certificates_are_sound(spec in prop::sample::select(&["F2", "F3", "F4", "F5", "F7", "Q"][..]), n in 1usize..=4, seed in any::<u64>()) {
        let f = field(spec);
        let m = random_matrix(&f, n, n, &mut seeded_rng(seed));
        match triangularizable(&m).unwrap() {
            Certificate::Triangularizable { conjugator } => {
                prop_assert!(m.conjugate(&conjugator).unwrap().is_upper_triangular());
            }
            Certificate::NotTriangularizable { obstruction } => {
                prop_assert!(char_poly(&m).divrem(&obstruction).1.is_zero());
                if let Ok(elems) = f.elements() {
                    prop_assert!(elems.iter().all(|a| !f.is_zero(&obstruction.eval(a))));
                }
            }
        }
    }

    #[test]
    fn oracle_is_scalar_invariant(spec in prop::sample::select(SMALL), n in 1usize..=4, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let m = random_matrix(&f, n, n, &mut rng);
        let lambda = loop {
            let c = f.random_elem(&mut rng);
            if !f.is_zero(&c) {
                break c;
            }
        };
        prop_assert_eq!(
            triangularizable(&m).unwrap().is_triangularizable(),
            triangularizable(&m.scale(&lambda)).unwrap().is_triangularizable()
        );
    }

    #[test]
    fn weak_check_is_conjugation_invariant(spec in prop::sample::select(&["F2", "F3"][..]), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(0..=4.min(n * n));
        let s = random_subspace(&f, n, d, &mut rng);
        let p = random_invertible_with(&f, n, &mut rng);
        let before = weakly_triangularizable(&s, CheckMode::Exhaustive).unwrap().passed();
        let after = weakly_triangularizable(&s.conjugate(&p).unwrap(), CheckMode::Exhaustive).unwrap().passed();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn projective_pruning_is_sound(spec in prop::sample::select(&["F3", "F4", "F5"][..]), seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(1..=3);
        let s = random_subspace(&f, 2, d, &mut rng);
        prop_assert_eq!(weakly_triangularizable(&s, CheckMode::Exhaustive).unwrap().passed(), naive_weak(&s));
    }

    #[test]
    fn joints_pass_iff_both_blocks_pass(seed in any::<u64>()) {
        let f = field("F3");
        let mut rng = seeded_rng(seed);
        let (n, p) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let a = random_subspace(&f, n, rng.gen_range(0..=n * n), &mut rng);
        let b = random_subspace(&f, p, rng.gen_range(0..=p * p), &mut rng);
        let weak = |s: &Subspace| weakly_triangularizable(s, CheckMode::Exhaustive).unwrap().passed();
        let j = joint(&a, &b).unwrap();
        prop_assert_eq!(j.dim(), a.dim() + b.dim() + n * p);
        prop_assert_eq!(weak(&j), weak(&a) && weak(&b));
    }
}

#[test]
fn sampled_mode_reports_counts() {
    let q = field("Q");
    let s = trimat::spaces::upper_triangular_space(&q, 3);
    let r = weakly_triangularizable(&s, CheckMode::Sampled { samples: 300, seed: 7 }).unwrap();
    assert!(r.passed());
    assert_eq!(r.samples_checked, 300);
    let r = weakly_triangularizable(&sym_space(&q, 2), CheckMode::Sampled { samples: 300, seed: 7 }).unwrap();
    assert!(!r.passed());
}

#[test]
fn sym2_fails_over_odd_fields_with_pythagorean_counterexample() {
    for spec in ["F3", "F5", "F7", "F9"] {
        let f = field(spec);
        let report = weakly_triangularizable(&sym_space(&f, 2), CheckMode::Exhaustive).unwrap();
        assert!(!report.passed(), "{spec}");
        let c = report.counterexample.unwrap();
        assert!(!triangularizable(&c).unwrap().is_triangularizable());
        let (a, b) = pythagorean_witness(&f).expect("odd finite fields are not Pythagorean-closed here");
        let m = pythagorean_matrix(&f, &a, &b);
        assert!(sym_space(&f, 2).contains(&m));
        assert!(!triangularizable(&m).unwrap().is_triangularizable(), "{spec}");
    }
}

/// Spaces spanned by rank-1 trace-0 matrices that pass the weak check have
/// dimension at most `n^2 / 2`.
#[test]
fn rank_one_trace_zero_spans_are_small() {
    let mut rng = seeded_rng(11);
    for spec in ["F3", "F5"] {
        let f = field(spec);
        for _ in 0..60 {
            let n = rng.gen_range(2..=3);
            let k = rng.gen_range(1..=n * n);
            let mats: Vec<Matrix> = (0..k)
                .map(|_| {
                    let x: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
                    let mut y: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
                    // Make y . x = 0 by adjusting the coordinate opposite a
                    // nonzero entry of x.
                    if let Some(i) = x.iter().position(|a| !f.is_zero(a)) {
                        let others = (0..n)
                            .filter(|&j| j != i)
                            .fold(f.zero(), |acc, j| f.add(&acc, &f.mul(&x[j], &y[j])));
                        y[i] = f.neg(&f.div(&others, &x[i]).unwrap());
                    }
                    Matrix::from_rows(
                        &f,
                        (0..n).map(|r| (0..n).map(|c| f.mul(&x[r], &y[c])).collect()).collect(),
                    )
                })
                .collect();
            let s = Subspace::span(&f, n, &mats).unwrap();
            if weakly_triangularizable(&s, CheckMode::Exhaustive).unwrap().passed() {
                assert!(2 * s.dim() <= n * n, "{spec}: {}", write_space(&s));
            }
        }
    }
}

#[test]
fn corpus_spaces_are_weakly_triangularizable() {
    let mut rng = seeded_rng(5);
    for spec in ["F2", "F3", "F5"] {
        let f = field(spec);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let d = rng.gen_range(0..=n * (n + 1) / 2);
            let s = random_triangularizable_space(&f, n, d, &mut rng);
            assert_eq!(s.dim(), d);
            assert!(naive_weak(&s));
        }
    }
}
