use std::collections::BTreeSet;

use trimat::field::Field;
use trimat::matspace::Subspace;
use trimat::search::{
    classify_optimal, compute_tn, enumerate_subspaces, gaussian_binomial, Budget, SearchError, SearchOptions,
    WitnessSource,
};
use trimat::spaces::{odometer, upper_triangular_space, weakly_triangularizable, CheckMode};

fn field(s: &str) -> Field {
    Field::parse(s).unwrap()
}

/// Every vector in the span of `basis` over the prime field `F_q`, sorted.
fn closure(basis: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let m = basis.first().map_or(0, Vec::len);
    let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
    for i in 0..q.pow(basis.len() as u32) {
        let coeffs = odometer(i, q, basis.len());
        let mut v = vec![0u64; m];
        for (c, b) in coeffs.iter().zip(basis) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = (*x + c * y) % q;
            }
        }
        out.insert(v);
    }
    out.into_iter().collect()
}

/// Number of `d`-dimensional subspaces of `F_q^m`, by collecting the
/// closures of all `d`-tuples of vectors.
fn brute_force_count(q: u64, m: usize, d: usize) -> usize {
    let vectors: Vec<Vec<u64>> = (0..q.pow(m as u32)).map(|i| odometer(i, q, m)).collect();
    let mut spaces: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut pick = vec![0usize; d];
    loop {
        let basis: Vec<Vec<u64>> = pick.iter().map(|&i| vectors[i].clone()).collect();
        let c = closure(&basis, q);
        if c.len() as u64 == q.pow(d as u32) {
            spaces.insert(c);
        }
        let mut k = 0;
        while k < d {
            pick[k] += 1;
            if pick[k] < vectors.len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    spaces.len()
}

#[test]
fn enumeration_matches_brute_force() {
    for (spec, q, m) in [("F2", 2u64, 4usize), ("F3", 3, 3), ("F2", 2, 3)] {
        let f = field(spec);
        for d in 0..=m.min(3) {
            let mut seen = BTreeSet::new();
            for space in enumerate_subspaces(&f, m, d).unwrap() {
                assert_eq!(space.dim(), d);
                let basis: Vec<Vec<u64>> = space
                    .basis()
                    .iter()
                    .map(|row| row.iter().map(|a| f.index_of(a).unwrap()).collect())
                    .collect();
                assert!(seen.insert(closure(&basis, q)), "{spec} m={m} d={d}: duplicate");
            }
            let expected = if d == 0 { 1 } else { brute_force_count(q, m, d) };
            assert_eq!(seen.len(), expected, "{spec} m={m} d={d}");
            assert_eq!(gaussian_binomial(m, d, q), expected as u128);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let f = field("F2");
    let run = |threads| {
        let opts = SearchOptions {
            threads: Some(threads),
            ..SearchOptions::default()
        };
        compute_tn(&f, 3, &opts).unwrap()
    };
    let (a, b) = (run(1), run(2));
    assert_eq!(a.value, b.value);
    assert_eq!(a.witness, b.witness);
    assert_eq!(a.subspaces_scanned, b.subspaces_scanned);
    assert_eq!(a.matrices_checked, b.matrices_checked);
    assert_eq!(a.dimensions, b.dimensions);
}

#[test]
fn tn_is_at_least_the_triangular_dimension() {
    for spec in ["F2", "F3", "F4", "F5"] {
        let f = field(spec);
        for n in 1..=2 {
            let r = compute_tn(&f, n, &SearchOptions::default()).unwrap();
            assert!(r.exhaustive);
            assert!(r.value >= n * (n + 1) / 2, "{spec} n={n}");
            assert_eq!(r.witness.dim(), r.value);
            assert_eq!(r.witness_source, WitnessSource::FirstCanonical);
            assert!(weakly_triangularizable(&r.witness, CheckMode::Exhaustive)
                .unwrap()
                .passed());
            if f.order().unwrap() % 2 == 1 {
                assert_eq!(r.value, n * (n + 1) / 2, "{spec} n={n}");
            }
        }
    }
}

#[test]
fn classification_is_consistent() {
    for spec in ["F2", "F3"] {
        let f = field(spec);
        let c = classify_optimal(&f, 2, &SearchOptions::default()).unwrap();
        assert_eq!(
            c.classes.iter().map(|k| k.orbit_size).sum::<usize>(),
            c.optimal_count,
            "{spec}"
        );
        for k in &c.classes {
            assert_eq!(k.representative.dim(), c.value);
            assert!(weakly_triangularizable(&k.representative, CheckMode::Exhaustive)
                .unwrap()
                .passed());
        }
    }
}

type M3 = [[u8; 3]; 3];

fn mul3(a: &M3, b: &M3) -> M3 {
    let mut c = [[0u8; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).fold(0, |acc, k| acc ^ (a[i][k] & b[k][j]));
        }
    }
    c
}

/// Over `F_2` a 3x3 matrix is triangularizable exactly when
/// `M^a (M + I)^b = 0` for some `a + b = 3`.
fn f2_triangularizable(m: &M3) -> bool {
    let mut shifted = *m;
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] ^= 1;
    }
    (0..=3).any(|a| {
        let mut p = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        for _ in 0..a {
            p = mul3(&p, m);
        }
        for _ in a..3 {
            p = mul3(&p, &shifted);
        }
        p == [[0; 3]; 3]
    })
}

fn decode(bits: u64) -> M3 {
    let mut m = [[0u8; 3]; 3];
    for e in 0..9 {
        m[e / 3][e % 3] = (bits >> e & 1) as u8;
    }
    m
}

/// `t_3(F_2) = 6`, checked against every 7-dimensional subspace with a
/// table built from the Cayley-Hamilton criterion.
#[test]
fn t3_over_f2_by_brute_force() {
    let f = field("F2");
    let good: Vec<bool> = (0..512u64).map(|b| f2_triangularizable(&decode(b))).collect();
    let passes = |basis: &[u64]| {
        (0..1u64 << basis.len()).all(|c| {
            let v = basis
                .iter()
                .enumerate()
                .filter(|&(i, _)| c >> i & 1 == 1)
                .fold(0, |acc, (_, b)| acc ^ b);
            good[v as usize]
        })
    };
    let to_bits = |row: &Vec<trimat::field::Elem>| {
        row.iter()
            .enumerate()
            .fold(0u64, |acc, (e, a)| acc | f.index_of(a).unwrap() << e)
    };
    let tri = upper_triangular_space(&f, 3);
    let tri_bits: Vec<u64> = tri.space().basis().iter().map(to_bits).collect();
    assert!(passes(&tri_bits));
    let mut count = 0;
    for space in enumerate_subspaces(&f, 9, 7).unwrap() {
        let bits: Vec<u64> = space.basis().iter().map(to_bits).collect();
        assert!(!passes(&bits), "{:?}", Subspace::from_space(3, space));
        count += 1;
    }
    assert_eq!(count, 43_435);
    assert_eq!(compute_tn(&f, 3, &SearchOptions::default()).unwrap().value, 6);
}

#[test]
fn resumed_search_matches_fresh_search() {
    let f = field("F2");
    let dir = std::env::temp_dir().join(format!("trimat-resume-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t3.ckpt");
    let _ = std::fs::remove_file(&path);
    let interrupted = SearchOptions {
        budget: Budget {
            max_wall: None,
            max_subspaces: Some(10_000),
        },
        checkpoint: Some(path.clone()),
        ..SearchOptions::default()
    };
    match compute_tn(&f, 3, &interrupted) {
        Err(SearchError::BudgetExceeded(r)) => assert!(!r.exhaustive),
        other => panic!("expected an interrupted search, got {other:?}"),
    }
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"TMCK");
    let resumed = compute_tn(
        &f,
        3,
        &SearchOptions {
            checkpoint: Some(path.clone()),
            ..SearchOptions::default()
        },
    )
    .unwrap();
    let fresh = compute_tn(&f, 3, &SearchOptions::default()).unwrap();
    assert_eq!(resumed.value, fresh.value);
    assert_eq!(resumed.witness, fresh.witness);
    assert_eq!(resumed.subspaces_scanned, fresh.subspaces_scanned);
    assert_eq!(resumed.matrices_checked, fresh.matrices_checked);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zero_subspace_budget_is_exceeded() {
    let opts = SearchOptions {
        budget: Budget {
            max_wall: None,
            max_subspaces: Some(0),
        },
        ..SearchOptions::default()
    };
    match compute_tn(&field("F3"), 2, &opts) {
        Err(SearchError::BudgetExceeded(r)) => {
            assert!(!r.exhaustive);
            assert_eq!(r.witness_source, WitnessSource::LowerBound);
            assert_eq!(r.value, 3);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        compute_tn(&field("Q"), 2, &SearchOptions::default()),
        Err(SearchError::InfiniteField(_))
    ));
}
