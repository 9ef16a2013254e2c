use proptest::prelude::*;
use rand::Rng;
use trimat::construct::{bordered, erasure_witness, hessenberg_complete, symmetrize_attempt, ConstructError};
use trimat::field::{Elem, Field};
use trimat::matspace::{random_invertible_with, random_matrix, seeded_rng, Matrix, Subspace};
use trimat::poly::char_poly;
use trimat::spaces::{joint_chain, odometer, random_triangularizable_space, sl_space, splits, upper_triangular_space};
use trimat::structure::max_dual_rank;

fn field(s: &str) -> Field {
    Field::parse(s).unwrap()
}

fn random_symmetric<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Matrix {
    let mut m = random_matrix(f, n, n, rng);
    for i in 0..n {
        for j in 0..i {
            m.set(i, j, m.get(j, i).clone());
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn joint_chain_dimension(seed in any::<u64>()) {
        let f = field("F2");
        let mut rng = seeded_rng(seed);
        let k = rng.gen_range(1..=3);
        let blocks: Vec<Subspace> = (0..k)
            .map(|_| match rng.gen_range(0..3) {
                0 => Subspace::full(&f, 1),
                1 => sl_space(&f, 2),
                _ => upper_triangular_space(&f, 2),
            })
            .collect();
        let sizes: Vec<usize> = blocks.iter().map(Subspace::n).collect();
        let mut expected: usize = blocks.iter().map(Subspace::dim).sum();
        for i in 0..k {
            for j in i + 1..k {
                expected += sizes[i] * sizes[j];
            }
        }
        prop_assert_eq!(joint_chain(&blocks).unwrap().dim(), expected);
    }

    #[test]
    fn symmetrization_round_trip(spec in prop::sample::select(&["F3", "F5", "F2(x)", "Q"][..]), n in 1usize..=3, seed in any::<u64>()) {
        let f = field(spec);
        let mut rng = seeded_rng(seed);
        // S symmetric invertible and Y symmetric; A = S^-1 Y is S-selfadjoint.
        let s = loop {
            let sym = random_symmetric(&f, n, &mut rng);
            if sym.is_invertible() {
                break sym;
            }
        };
        let y = random_symmetric(&f, n, &mut rng);
        let a = s.inverse().unwrap().mul(&y);
        match symmetrize_attempt(&a, &s) {
            Ok(Some((p, b))) => {
                prop_assert!(b.is_symmetric());
                prop_assert_eq!(a.conjugate(&p).unwrap(), b.clone());
                prop_assert_eq!(char_poly(&b), char_poly(&a));
            }
            Ok(None) | Err(ConstructError::AlternatingGram) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

/// With `C = 0` the bordered matrix is block triangular, so it splits
/// exactly when `N` does, for every choice of `(a, R)`.
#[test]
fn zero_column_bordered_matrices_follow_n() {
    let f = field("F3");
    let mut rng = seeded_rng(3);
    for _ in 0..20 {
        let n = rng.gen_range(1..=2);
        let nb = random_matrix(&f, n, n, &mut rng);
        let zero = vec![f.zero(); n];
        let expected = splits(&nb).unwrap();
        for i in 0..3u64.pow(n as u32 + 1) {
            let digits: Vec<Elem> = odometer(i, 3, n + 1).into_iter().map(|d| f.element(d)).collect();
            let m = bordered(&digits[0], &digits[1..], &zero, &nb);
            assert_eq!(splits(&m).unwrap(), expected);
        }
        assert_eq!(erasure_witness(&nb, &zero), Err(ConstructError::ZeroColumn));
    }
}

#[test]
fn erasure_over_other_fields() {
    let mut rng = seeded_rng(9);
    for spec in ["F2", "F4", "F7", "F9", "Q"] {
        let f = field(spec);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let nb = random_matrix(&f, n, n, &mut rng);
            let mut c: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            c[rng.gen_range(0..n)] = f.one();
            let w = erasure_witness(&nb, &c).unwrap();
            assert!(!splits(&w.bordered).unwrap(), "{spec}\n{}", w.bordered);
        }
    }
}

#[test]
fn hessenberg_systems_are_nonsingular() {
    let mut rng = seeded_rng(21);
    for spec in ["F3", "F5", "Q", "F3(x)"] {
        let f = field(spec);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let m = trimat::cli::verify::random_regular_hessenberg(&f, n, &mut rng);
            let r = trimat::cli::verify::random_target(&f, n, &m.trace(), &mut rng);
            assert!(hessenberg_complete(&m, &r).is_ok(), "{spec}\n{m}");
        }
    }
}

/// Optimal corpus spaces over F3 (full conjugates of `T_n`) have
/// `max_dual_rank < n`.
#[test]
fn optimal_spaces_have_deficient_dual_rank() {
    let f = field("F3");
    let mut rng = seeded_rng(13);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let s = random_triangularizable_space(&f, n, n * (n + 1) / 2, &mut rng);
        assert!(max_dual_rank(&s).unwrap() < n);
    }
}

#[test]
fn conjugated_triangular_spaces_decompose_into_ones() {
    let f = field("F3");
    let mut rng = seeded_rng(17);
    for n in 1..=3 {
        let p = random_invertible_with(&f, n, &mut rng);
        let s = upper_triangular_space(&f, n).conjugate(&p).unwrap();
        let d = trimat::structure::decompose(&s).unwrap();
        assert_eq!(d.block_dims, vec![1; n]);
        let back: Matrix = d.conjugator.clone();
        assert_eq!(s.conjugate(&back).unwrap(), upper_triangular_space(&f, n));
    }
}
