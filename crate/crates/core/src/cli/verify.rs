//! Verification suites: each runs one claim about weakly triangularizable
//! spaces on exhaustive or seeded random instances and reports evidence.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::matrix_json;
use crate::construct::{
    appendix_b_construction, divides, erasure_witness, hessenberg_complete, special_erasure_witness, symmetrize_attempt,
};
use crate::field::{Elem, Field};
use crate::matspace::{b2, c2, random_matrix, seeded_rng, trace_form, write_space, Matrix, Subspace, VecSpace};
use crate::poly::{char_poly, split_completely, Poly};
use crate::search::{classify_optimal, compute_dn, compute_tn, SearchOptions};
use crate::spaces::{
    alt_space, joint_chain, odometer, random_triangularizable_space, sl_space, splits, sym_space, triangularizable,
    weakly_triangularizable, CheckMode,
};
use crate::structure::{check_two_complex_lemma, decompose, find_adapted, range_dim, restriction_dims, spaces_similar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Exploratory,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Exploratory => "exploratory",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub suite: &'static str,
    pub claim: &'static str,
    pub status: Status,
    pub evidence: Value,
    /// Serialized counterexample; present exactly when `status` is `fail`.
    pub counterexample: Option<String>,
    pub wall_ms: u64,
}

/// What a suite body returns: a verdict, evidence and an optional
/// counterexample.
pub struct SuiteResult {
    pub passed: bool,
    pub evidence: Value,
    pub counterexample: Option<String>,
}

impl SuiteResult {
    fn pass(evidence: Value) -> SuiteResult {
        SuiteResult {
            passed: true,
            evidence,
            counterexample: None,
        }
    }

    fn check(evidence: Value, counterexample: Option<String>) -> SuiteResult {
        SuiteResult {
            passed: counterexample.is_none(),
            evidence,
            counterexample,
        }
    }
}

pub struct Suite {
    pub id: &'static str,
    pub claim: &'static str,
    /// Exploratory suites report data and never fail the run.
    pub exploratory: bool,
    /// Included when no selection is given.
    pub default: bool,
    pub run: fn(u64) -> SuiteResult,
}

pub const SUITES: &[Suite] = &[
    Suite {
        id: "tn-small",
        claim: "t_2(F) = 3 over F3 and F5 (NRC, characteristic not 2), exhaustive",
        exploratory: false,
        default: true,
        run: tn_small,
    },
    Suite {
        id: "tn-f3-n3",
        claim: "t_3(F3) = 6, exhaustive over all 7-dimensional subspaces",
        exploratory: false,
        default: true,
        run: tn_f3_n3,
    },
    Suite {
        id: "dn-bound",
        claim: "d_n(F) <= n(n+1)/2 <= t_n(F)",
        exploratory: false,
        default: true,
        run: dn_bound,
    },
    Suite {
        id: "char2-search",
        claim: "t_n over finite fields of characteristic 2 (no claim made)",
        exploratory: true,
        default: true,
        run: char2_search,
    },
    Suite {
        id: "hessenberg",
        claim: "editing the first row of a regular Hessenberg matrix reaches every monic target of equal trace",
        exploratory: false,
        default: true,
        run: hessenberg,
    },
    Suite {
        id: "erasure",
        claim: "Erasure lemma: for C != 0 some (a, R) makes [[a, R], [C, N]] non-triangularizable",
        exploratory: false,
        default: true,
        run: erasure,
    },
    Suite {
        id: "special-erasure",
        claim: "Special erasure lemma: characteristic 2, A in sl_2, [[A, B], [C, D]] non-triangularizable for C != 0",
        exploratory: false,
        default: true,
        run: special_erasure,
    },
    Suite {
        id: "orthocomplement",
        claim: "dim(T ∩ Hom(V,W)) + dim{u|W : u in T^⊥} = (dim W)(dim V)",
        exploratory: false,
        default: true,
        run: orthocomplement,
    },
    Suite {
        id: "dual-rank",
        claim: "rk x̂ = n − dim(S ∩ Hom(V,Fx))",
        exploratory: false,
        default: true,
        run: dual_rank,
    },
    Suite {
        id: "polarization",
        claim: "b_2(A,B) = tr(A)tr(B) − tr(AB) = c_2(A+B) − c_2(A) − c_2(B)",
        exploratory: false,
        default: true,
        run: polarization,
    },
    Suite {
        id: "adapted-vectors",
        claim: "weakly triangularizable spaces over NRC fields have adapted vectors not covered by any 2-complex",
        exploratory: false,
        default: true,
        run: adapted_vectors,
    },
    Suite {
        id: "trace-lemma",
        claim: "rank <= 1, trace 0 members A, B of a weakly triangularizable space over an NRC field have tr(AB) = 0",
        exploratory: false,
        default: true,
        run: trace_lemma,
    },
    Suite {
        id: "decomposition",
        claim: "block sizes of a joint of irreducible blocks are determined by the similarity class",
        exploratory: false,
        default: true,
        run: decomposition,
    },
    Suite {
        id: "symmetric-char2",
        claim: "A = [[0,0,0],[0,0,λ],[0,1,0]] is S-selfadjoint with χ_A = t(t^2 − λ) non-split",
        exploratory: false,
        default: true,
        run: symmetric_char2,
    },
    Suite {
        id: "sym-alt",
        claim: "Sym_n(F)^⊥ = Alt_n(F) for the trace form",
        exploratory: false,
        default: true,
        run: sym_alt,
    },
    Suite {
        id: "classify",
        claim: "optimal spaces over F2 and F3 up to conjugacy (infinite-field classification explored)",
        exploratory: true,
        default: true,
        run: classify,
    },
    Suite {
        id: "symmetrize",
        claim: "orthonormal-basis symmetrization of the selfadjoint example (outcome recorded)",
        exploratory: true,
        default: true,
        run: symmetrize,
    },
    Suite {
        id: "planted-failure",
        claim: "fixture: Sym_2(F3) is weakly triangularizable (false by design)",
        exploratory: false,
        default: false,
        run: planted_failure,
    },
];

/// Suites for a comma-separated selection; `None` picks the defaults and an
/// empty string picks none.
pub fn select(selection: Option<&str>) -> Result<Vec<&'static Suite>, String> {
    let Some(sel) = selection else {
        return Ok(SUITES.iter().filter(|s| s.default).collect());
    };
    sel.split(',')
        .map(str::trim)
        .filter(|id| !id.is_empty())
        .map(|id| {
            SUITES
                .iter()
                .find(|s| s.id == id)
                .ok_or_else(|| format!("unknown suite `{id}`"))
        })
        .collect()
}

pub fn run_suite(suite: &Suite, seed: u64, deterministic: bool) -> VerifyOutcome {
    let started = Instant::now();
    let result = (suite.run)(seed);
    let status = match (suite.exploratory, result.passed) {
        (true, _) => Status::Exploratory,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    let counterexample = match status {
        Status::Fail => Some(result.counterexample.unwrap_or_else(|| "unspecified".into())),
        _ => None,
    };
    VerifyOutcome {
        suite: suite.id,
        claim: suite.claim,
        status,
        evidence: result.evidence,
        counterexample,
        wall_ms: if deterministic {
            0
        } else {
            started.elapsed().as_millis() as u64
        },
    }
}

fn field(spec: &str) -> Field {
    Field::parse(spec).expect("built-in field spec")
}

fn tn_small(_: u64) -> SuiteResult {
    let mut evidence = vec![];
    let mut bad = None;
    for spec in ["F3", "F5"] {
        let r = compute_tn(&field(spec), 2, &SearchOptions::default()).expect("small search");
        evidence.push(
            json!({"field": spec, "n": 2, "value": r.value, "exhaustive": r.exhaustive,
            "subspaces_scanned": r.subspaces_scanned, "matrices_checked": r.matrices_checked}),
        );
        if r.value != 3 || !r.exhaustive {
            bad = Some(format!("t_2({spec}) = {} (exhaustive {})", r.value, r.exhaustive));
        }
    }
    SuiteResult::check(json!(evidence), bad)
}

fn tn_f3_n3(_: u64) -> SuiteResult {
    let r = compute_tn(&field("F3"), 3, &SearchOptions::default()).expect("search");
    let evidence = json!({"value": r.value, "exhaustive": r.exhaustive,
        "subspaces_scanned": r.subspaces_scanned, "matrices_checked": r.matrices_checked,
        "dimensions": r.dimensions});
    let bad = (r.value != 6 || !r.exhaustive).then(|| write_space(&r.witness));
    SuiteResult::check(evidence, bad)
}

fn dn_bound(_: u64) -> SuiteResult {
    let mut evidence = vec![];
    let mut bad = None;
    for spec in ["F2", "F3", "F5"] {
        let f = field(spec);
        let d = compute_dn(&f, 2, &SearchOptions::default()).expect("search");
        let t = compute_tn(&f, 2, &SearchOptions::default()).expect("search");
        evidence.push(json!({"field": spec, "n": 2, "d_n": d.value, "t_n": t.value}));
        if !(d.value <= 3 && 3 <= t.value) {
            bad = Some(write_space(&d.witness));
        }
    }
    SuiteResult::check(json!(evidence), bad)
}

fn char2_search(_: u64) -> SuiteResult {
    let runs = [("F2", 2), ("F2", 3), ("F4", 2)];
    let evidence: Vec<Value> = runs
        .iter()
        .map(|&(spec, n)| {
            let f = field(spec);
            let r = compute_tn(&f, n, &SearchOptions::default()).expect("search");
            json!({"field": spec, "n": n, "value": r.value, "exhaustive": r.exhaustive,
                "witness_is_sl2": n == 2 && r.witness == sl_space(&f, 2),
                "subspaces_scanned": r.subspaces_scanned})
        })
        .collect();
    SuiteResult::pass(json!(evidence))
}

/// A random regular Hessenberg matrix: zero below the subdiagonal, nonzero
/// subdiagonal.
pub fn random_regular_hessenberg<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Matrix {
    let mut m = random_matrix(f, n, n, rng);
    for i in 0..n {
        for j in 0..n {
            if i > j + 1 {
                m.set(i, j, f.zero());
            }
        }
        if i > 0 {
            while f.is_zero(m.get(i, i - 1)) {
                m.set(i, i - 1, f.random_elem(rng));
            }
        }
    }
    m
}

/// A random monic polynomial of degree `n` with `t^(n-1)` coefficient
/// `-trace`.
pub fn random_target<R: Rng + ?Sized>(f: &Field, n: usize, trace: &Elem, rng: &mut R) -> Poly {
    let mut coeffs: Vec<Elem> = (0..n).map(|_| f.random_elem(rng)).collect();
    coeffs[n - 1] = f.neg(trace);
    coeffs.push(f.one());
    Poly::new(f, coeffs)
}

fn hessenberg(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F3"), field("F5")];
    let mut bad = None;
    let total = 500;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=5);
        let m = random_regular_hessenberg(f, n, &mut rng);
        let r = random_target(f, n, &m.trace(), &mut rng);
        let row = hessenberg_complete(&m, &r).expect("preconditions hold");
        let mut done = m.clone();
        for (j, x) in row.iter().enumerate() {
            done.set(0, j + 1, f.add(m.get(0, j + 1), x));
        }
        if char_poly(&done) != r {
            bad = Some(format!("{f} target {r}\n{m}"));
        }
    }
    SuiteResult::check(json!({"instances": total, "fields": ["F3", "F5"], "max_n": 5}), bad)
}

fn erasure(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F3"), field("F5")];
    let total = 200;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=4);
        let n_block = random_matrix(f, n, n, &mut rng);
        let c = loop {
            let c: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            if c.iter().any(|x| !f.is_zero(x)) {
                break c;
            }
        };
        let w = erasure_witness(&n_block, &c).expect("C is nonzero");
        if splits(&w.bordered).unwrap() {
            bad = Some(w.bordered.to_string());
        }
    }
    SuiteResult::check(json!({"instances": total, "fields": ["F3", "F5"], "max_n": 4}), bad)
}

fn special_erasure(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F2"), field("F4"), field("F2(x)")];
    let total = 60;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 3];
        let k = rng.gen_range(3..=5);
        let d = random_matrix(f, k - 2, k - 2, &mut rng);
        let c = loop {
            let c = random_matrix(f, k - 2, 2, &mut rng);
            if !c.is_zero() {
                break c;
            }
        };
        let w = special_erasure_witness(&c, &d).expect("C is nonzero");
        // Factoring over F2(x) is limited, so the quadratic factor is the
        // certificate there; finite fields use the splitting oracle.
        let nonsplit = if f.is_finite() {
            !splits(&w.full).unwrap()
        } else {
            divides(&w.reduced.obstruction, &char_poly(&w.full))
                && !split_completely(&w.reduced.obstruction).unwrap().splits()
        };
        if !f.is_zero(&w.a.trace()) || !nonsplit {
            bad = Some(w.full.to_string());
        }
    }
    SuiteResult::check(json!({"instances": total, "fields": ["F2", "F4", "F2(x)"]}), bad)
}

fn random_nonzero_space<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> VecSpace {
    loop {
        let k = rng.gen_range(1..=n);
        let vecs: Vec<Vec<Elem>> = (0..k).map(|_| (0..n).map(|_| f.random_elem(rng)).collect()).collect();
        let w = VecSpace::span(f, n, vecs);
        if w.dim() > 0 {
            return w;
        }
    }
}

fn random_any_space<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Subspace {
    let d = rng.gen_range(0..=n * n);
    crate::matspace::random_subspace(f, n, d, rng)
}

fn orthocomplement(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F3"), field("F5")];
    let total = 200;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=3);
        let t = random_any_space(f, n, &mut rng);
        let w = random_nonzero_space(f, n, &mut rng);
        let (inside, restricted) = restriction_dims(&t, &w).unwrap();
        if inside + restricted != w.dim() * n {
            bad = Some(write_space(&t));
        }
    }
    SuiteResult::check(json!({"instances": total, "fields": ["F3", "F5"], "max_n": 3}), bad)
}

fn dual_rank(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F3"), field("F5")];
    let total = 200;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(1..=3);
        let s = random_any_space(f, n, &mut rng);
        let x = loop {
            let x: Vec<Elem> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            if x.iter().any(|a| !f.is_zero(a)) {
                break x;
            }
        };
        let images: Vec<Vec<Elem>> = s
            .trace_orthocomplement()
            .basis()
            .iter()
            .map(|u| u.mul_vec(&x))
            .collect();
        let rank = VecSpace::span(f, n, images).dim();
        if rank != n - range_dim(&s, &x).unwrap() {
            bad = Some(write_space(&s));
        }
    }
    SuiteResult::check(json!({"instances": total, "fields": ["F3", "F5"], "max_n": 3}), bad)
}

fn polarization(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let specs = ["F2", "F3", "F4", "F5", "F7", "F9", "Q", "F2(x)", "F3(x)"];
    let per_field = 500;
    let mut bad = None;
    for spec in specs {
        let f = field(spec);
        for _ in 0..per_field {
            let n = rng.gen_range(1..=4);
            let a = random_matrix(&f, n, n, &mut rng);
            let b = random_matrix(&f, n, n, &mut rng);
            let direct = f.sub(&f.mul(&a.trace(), &b.trace()), &trace_form(&a, &b));
            let polar = f.sub(&f.sub(&c2(&a.add(&b)), &c2(&a)), &c2(&b));
            let coeff = if n >= 2 { char_poly(&a).coeff(n - 2) } else { f.zero() };
            if b2(&a, &b) != direct || direct != polar || coeff != c2(&a) {
                bad = Some(format!("{spec}\n{a}{b}"));
            }
        }
    }
    SuiteResult::check(json!({"fields": specs, "pairs_per_field": per_field}), bad)
}

fn adapted_vectors(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let f = field("F3");
    let total = 100;
    let mut bad = None;
    let mut two_complex_checked = 0;
    for _ in 0..total {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=n * (n + 1) / 2);
        let s = random_triangularizable_space(&f, n, d, &mut rng);
        if find_adapted(&s).unwrap().is_none() {
            bad = Some(write_space(&s));
        }
        if n >= 2 {
            two_complex_checked += 1;
            if !check_two_complex_lemma(&s).unwrap() {
                bad = Some(write_space(&s));
            }
        }
    }
    SuiteResult::check(
        json!({"spaces": total, "field": "F3", "max_n": 3, "two_complex_checked": two_complex_checked}),
        bad,
    )
}

/// Rank at most 1, trace 0 members of `s`.
pub fn rank_one_trace_zero(s: &Subspace) -> Vec<Matrix> {
    let f = s.field();
    let q = f.order().expect("finite field");
    let d = s.dim();
    (0..q.pow(d as u32))
        .into_par_iter()
        .filter_map(|i| {
            let coords: Vec<Elem> = odometer(i, q, d).into_iter().map(|x| f.element(x)).collect();
            let m = s.member(&coords);
            (m.rank() <= 1 && f.is_zero(&m.trace())).then_some(m)
        })
        .collect()
}

fn trace_lemma(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F3"), field("F5")];
    let total = 60;
    let mut pairs = 0u64;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 2];
        let n = rng.gen_range(2..=3);
        let d = rng.gen_range(1..=n * (n + 1) / 2);
        let s = random_triangularizable_space(f, n, d, &mut rng);
        let members = rank_one_trace_zero(&s);
        for a in &members {
            for b in &members {
                pairs += 1;
                if !f.is_zero(&trace_form(a, b)) {
                    bad = Some(format!("{a}{b}"));
                }
            }
        }
    }
    SuiteResult::check(json!({"spaces": total, "fields": ["F3", "F5"], "pairs": pairs}), bad)
}

/// Irreducible optimal blocks available over `f`: `Mat_1` and, in
/// characteristic 2, `sl_2`.
fn irreducible_blocks(f: &Field) -> Vec<Subspace> {
    let mut blocks = vec![Subspace::full(f, 1)];
    if f.characteristic() == 2 {
        blocks.push(sl_space(f, 2));
    }
    blocks
}

fn decomposition(seed: u64) -> SuiteResult {
    let mut rng = seeded_rng(seed);
    let fields = [field("F2"), field("F3")];
    let total = 100;
    let mut bad = None;
    for i in 0..total {
        let f = &fields[i % 2];
        let choices = irreducible_blocks(f);
        let mut blocks = vec![];
        let mut size = 0;
        let target = rng.gen_range(1..=3);
        while size < target {
            let b = choices[rng.gen_range(0..choices.len())].clone();
            if size + b.n() <= target {
                size += b.n();
                blocks.push(b);
            }
        }
        let dims: Vec<usize> = blocks.iter().map(Subspace::n).collect();
        let j = joint_chain(&blocks).unwrap();
        for _ in 0..5 {
            let p = crate::matspace::random_invertible_with(f, size, &mut rng);
            let s = j.conjugate(&p).unwrap();
            let dec = decompose(&s).unwrap();
            let similar = dec
                .blocks
                .iter()
                .zip(&blocks)
                .all(|(x, y)| spaces_similar(x, y, crate::search::MAX_GROUP_ORDER).unwrap().holds());
            if dec.block_dims != dims || !similar {
                bad = Some(write_space(&s));
            }
        }
    }
    SuiteResult::check(
        json!({"instances": total, "reconjugations": 5, "fields": ["F2", "F3"]}),
        bad,
    )
}

fn symmetric_char2(_: u64) -> SuiteResult {
    let mut evidence = vec![];
    let mut bad = None;
    let fx = field("F2(x)");
    let f3 = field("F3");
    for (f, lam) in [(fx.clone(), fx.variable().unwrap()), (f3.clone(), f3.from_int(2))] {
        let (a, _, report) = appendix_b_construction(&f, &lam).unwrap();
        evidence.push(json!({"field": f.to_string(), "lambda": f.format_elem(&lam),
            "char_poly": report.char_poly.to_string(), "holds": report.holds()}));
        if !report.holds() || triangularizable(&a).unwrap().is_triangularizable() {
            bad = Some(a.to_string());
        }
    }
    SuiteResult::check(json!(evidence), bad)
}

fn sym_alt(_: u64) -> SuiteResult {
    let mut bad = None;
    let mut checked = 0;
    for spec in ["F2", "F3", "F4", "F5"] {
        let f = field(spec);
        for n in 1..=4 {
            checked += 1;
            if sym_space(&f, n).trace_orthocomplement() != alt_space(&f, n) {
                bad = Some(format!("{spec} n={n}"));
            }
        }
    }
    SuiteResult::check(
        json!({"fields": ["F2", "F3", "F4", "F5"], "max_n": 4, "cases": checked}),
        bad,
    )
}

fn classify(_: u64) -> SuiteResult {
    let evidence: Vec<Value> = ["F2", "F3"]
        .iter()
        .map(|spec| {
            let f = field(spec);
            let c = classify_optimal(&f, 2, &SearchOptions::default()).unwrap();
            let sizes: Vec<usize> = c.classes.iter().map(|k| k.orbit_size).collect();
            let reps_pass = c.classes.iter().all(|k| {
                weakly_triangularizable(&k.representative, CheckMode::Exhaustive)
                    .unwrap()
                    .passed()
            });
            json!({"field": spec, "n": 2, "value": c.value, "optimal_count": c.optimal_count,
                "orbit_sizes": sizes, "orbit_sizes_sum_ok": sizes.iter().sum::<usize>() == c.optimal_count,
                "representatives_pass": reps_pass,
                "irreducible": c.classes.iter().map(|k| k.irreducible).collect::<Vec<_>>()})
        })
        .collect();
    SuiteResult::pass(json!(evidence))
}

fn symmetrize(_: u64) -> SuiteResult {
    let fx = field("F2(x)");
    let f3 = field("F3");
    let evidence: Vec<Value> = [(fx.clone(), fx.variable().unwrap()), (f3.clone(), f3.from_int(2))]
        .iter()
        .map(|(f, lam)| {
            let (a, s, _) = appendix_b_construction(f, lam).unwrap();
            let outcome = symmetrize_attempt(&a, &s).unwrap();
            json!({"field": f.to_string(), "lambda": f.format_elem(lam),
                "symmetric_conjugate": outcome.map(|(_, b)| matrix_json(&b))})
        })
        .collect();
    SuiteResult::pass(json!(evidence))
}

fn planted_failure(_: u64) -> SuiteResult {
    let s = sym_space(&field("F3"), 2);
    let report = weakly_triangularizable(&s, CheckMode::Exhaustive).unwrap();
    SuiteResult::check(
        json!({"space": write_space(&s)}),
        report.counterexample.map(|m| m.to_string()),
    )
}
