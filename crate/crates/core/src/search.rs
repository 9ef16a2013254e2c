//! Exhaustive search over RREF-canonical subspaces of `Mat_n(F_q)`:
//! `t_n` (weakly triangularizable) and `d_n` (weakly diagonalisable), and
//! the classification of optimal spaces into conjugacy orbits.
//!
//! Subspaces of dimension `d` in `F_q^m` are enumerated by pivot pattern in
//! colex order and, within a pattern, by the free entries in odometer order
//! (first free entry fastest; free entries ordered row-major). The scan of a
//! dimension is split into units (a pattern and a range of free-entry
//! indices) that run in parallel and are merged in unit order, so every
//! report is independent of the thread count.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::Field;
use crate::matspace::{Matrix, Subspace, VecSpace};
use crate::spaces::{diagonal_space, diagonalisable, odometer, splits, upper_triangular_space};
use crate::structure::{general_linear_group, is_irreducible, StructError};

/// Largest accept table, in matrices.
pub const MAX_TABLE: u64 = 1 << 26;
/// Largest `|GL_n(F_q)|` for orbit classification.
pub const MAX_GROUP_ORDER: u64 = 100_000;
const UNIT_SIZE: u64 = 1 << 14;
const CHECKPOINT_INTERVAL: Duration = Duration::from_secs(10);
const CHECKPOINT_MAGIC: &[u8; 4] = b"TMCK";
const CHECKPOINT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("exhaustive search needs a finite field, got {0}")]
    InfiniteField(String),
    #[error("search too large: {0}")]
    TooLarge(String),
    #[error("budget exceeded before the search completed")]
    BudgetExceeded(Box<SearchReport>),
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },
    #[error(transparent)]
    Structure(#[from] StructError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Tn,
    Dn,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_wall: Option<Duration>,
    pub max_subspaces: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn seconds(s: f64) -> Budget {
        Budget {
            max_wall: Some(Duration::from_secs_f64(s.max(0.0))),
            max_subspaces: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub budget: Budget,
    pub checkpoint: Option<PathBuf>,
}

/// Where the reported witness came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// The least passing subspace of dimension `value` in scan order.
    FirstCanonical,
    /// `T_n` or `D_n`, used when the budget ran out before the least
    /// passing subspace was found.
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionScan {
    pub dim: usize,
    pub subspaces_total: u128,
    pub subspaces_scanned: u64,
    pub matrices_checked: u64,
    pub passing_found: bool,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub field: Field,
    pub n: usize,
    pub quantity: Quantity,
    pub lower_bound: usize,
    pub value: usize,
    pub witness: Subspace,
    pub witness_source: WitnessSource,
    pub exhaustive: bool,
    pub subspaces_scanned: u64,
    pub matrices_checked: u64,
    pub dimensions: Vec<DimensionScan>,
    pub wall: Duration,
}

/// Number of `d`-dimensional subspaces of `F_q^m`.
pub fn gaussian_binomial(m: usize, d: usize, q: u64) -> u128 {
    if d > m {
        return 0;
    }
    let q = q as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..d {
        num *= q.pow((m - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `d`-subsets of `0..m` in colex order.
pub fn pivot_patterns(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    if d <= m {
        rec(0, m, d, &mut vec![], &mut out);
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Free positions `(row, col)` of the RREF shape with the given pivots,
/// row-major.
pub fn free_slots(pattern: &[usize], m: usize) -> Vec<(usize, usize)> {
    let mut slots = vec![];
    for (r, &p) in pattern.iter().enumerate() {
        for c in p + 1..m {
            if !pattern.contains(&c) {
                slots.push((r, c));
            }
        }
    }
    slots
}

fn finite_order(field: &Field) -> Result<u64, SearchError> {
    field
        .order()
        .ok_or_else(|| SearchError::InfiniteField(field.to_string()))
}

/// Every `d`-dimensional subspace of `F_q^ambient` exactly once, in scan
/// order.
pub fn enumerate_subspaces(
    field: &Field,
    ambient: usize,
    d: usize,
) -> Result<impl Iterator<Item = VecSpace>, SearchError> {
    let q = finite_order(field)?;
    let field = field.clone();
    Ok(pivot_patterns(ambient, d).into_iter().flat_map(move |pattern| {
        let slots = free_slots(&pattern, ambient);
        let field = field.clone();
        (0..q.pow(slots.len() as u32)).map(move |i| {
            let mut rows = vec![vec![field.zero(); ambient]; d];
            for (r, &p) in pattern.iter().enumerate() {
                rows[r][p] = field.one();
            }
            for (&(r, c), digit) in slots.iter().zip(odometer(i, q, slots.len())) {
                rows[r][c] = field.element(digit);
            }
            VecSpace::from_rref(&field, ambient, rows)
        })
    }))
}

/// Small-field arithmetic tables and a per-matrix accept table indexed by
/// `sum_e entry_e q^e` (row-major entries).
struct Engine {
    field: Field,
    n: usize,
    m: usize,
    q: usize,
    add: Vec<u8>,
    sub: Vec<u8>,
    mul: Vec<u8>,
    powers: Vec<u32>,
    accept: Vec<bool>,
}

const MAX_ENTRIES: usize = 32;

impl Engine {
    fn new(field: &Field, n: usize, quantity: Quantity) -> Result<Engine, SearchError> {
        let q = finite_order(field)?;
        let m = n * n;
        let too_large = q.checked_pow(m as u32).is_none_or(|t| t > MAX_TABLE);
        if too_large || m > MAX_ENTRIES || q > 256 {
            return Err(SearchError::TooLarge(format!(
                "{field}: {q}^{m} matrices exceed the table limit of {MAX_TABLE}"
            )));
        }
        let qs = q as usize;
        let idx = |a: &crate::field::Elem| field.index_of(a).unwrap() as u8;
        let mut add = vec![0u8; qs * qs];
        let mut sub = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let (x, y) = (field.element(a as u64), field.element(b as u64));
                add[a * qs + b] = idx(&field.add(&x, &y));
                sub[a * qs + b] = idx(&field.sub(&x, &y));
                mul[a * qs + b] = idx(&field.mul(&x, &y));
            }
        }
        let powers: Vec<u32> = (0..m).map(|e| (q as u32).pow(e as u32)).collect();
        let total = q.pow(m as u32);
        let accept = (0..total)
            .into_par_iter()
            .map(|code| {
                let entries: Vec<_> = odometer(code, q, m).into_iter().map(|d| field.element(d)).collect();
                let mat = Matrix::from_vec(field, n, &entries);
                match quantity {
                    Quantity::Tn => splits(&mat).expect("finite fields always decide"),
                    Quantity::Dn => diagonalisable(&mat).expect("finite fields always decide"),
                }
            })
            .collect();
        Ok(Engine {
            field: field.clone(),
            n,
            m,
            q: qs,
            add,
            sub,
            mul,
            powers,
            accept,
        })
    }

    /// Checks one member per scalar class in odometer order and stops at
    /// the first rejected one. Returns the verdict and the members checked.
    fn passes(&self, basis: &[u8], d: usize) -> (bool, u64) {
        let (q, m) = (self.q, self.m);
        let mut coords = [0u8; MAX_ENTRIES];
        let mut member = [0u8; MAX_ENTRIES];
        let mut checked = 0u64;
        let total = (q as u64).pow(d as u32);
        for _ in 1..total {
            let mut k = 0;
            loop {
                let old = coords[k] as usize;
                let new = if old + 1 == q { 0 } else { old + 1 };
                coords[k] = new as u8;
                let delta = self.sub[new * q + old] as usize;
                let row = &basis[k * m..(k + 1) * m];
                for e in 0..m {
                    let t = self.mul[delta * q + row[e] as usize];
                    member[e] = self.add[member[e] as usize * q + t as usize];
                }
                if new != 0 {
                    break;
                }
                k += 1;
            }
            if coords[..d].iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            checked += 1;
            let code: u32 = (0..m).map(|e| member[e] as u32 * self.powers[e]).sum();
            if !self.accept[code as usize] {
                return (false, checked);
            }
        }
        (true, checked)
    }

    fn encode(&self, s: &Subspace) -> Vec<u8> {
        s.space()
            .basis()
            .iter()
            .flat_map(|v| v.iter().map(|a| self.field.index_of(a).unwrap() as u8))
            .collect()
    }

    fn decode(&self, basis: &[u8], d: usize) -> Subspace {
        let rows = (0..d)
            .map(|r| {
                basis[r * self.m..(r + 1) * self.m]
                    .iter()
                    .map(|&x| self.field.element(x as u64))
                    .collect()
            })
            .collect();
        Subspace::from_space(self.n, VecSpace::from_rref(&self.field, self.m, rows))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanMode {
    FirstOnly,
    All,
}

struct Unit {
    pattern: usize,
    start: u64,
    end: u64,
}

#[derive(Default)]
struct UnitOutcome {
    scanned: u64,
    checked: u64,
    passes: Vec<Vec<u8>>,
    complete: bool,
}

struct Control {
    started: Instant,
    budget: Budget,
    stop: AtomicBool,
    best: AtomicUsize,
    scanned: AtomicU64,
}

impl Control {
    fn new(started: Instant, budget: Budget) -> Control {
        Control {
            started,
            budget,
            stop: AtomicBool::new(false),
            best: AtomicUsize::new(usize::MAX),
            scanned: AtomicU64::new(0),
        }
    }

    fn over_budget(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        let wall = self.budget.max_wall.is_some_and(|w| self.started.elapsed() >= w);
        let count = self
            .budget
            .max_subspaces
            .is_some_and(|c| self.scanned.load(Ordering::Relaxed) >= c);
        if wall || count {
            self.stop.store(true, Ordering::Relaxed);
        }
        wall || count
    }
}

struct DimOutcome {
    passes: Vec<Subspace>,
    scanned: u64,
    checked: u64,
    complete: bool,
}

/// Sidecar file: a 16-byte header (magic `TMCK`, version `u16`, `n` as
/// `u8`, `d` as `u8`, FNV-1a 64 hash of the field spec), the unit count as
/// `u32`, the completion bitmap (one bit per unit, LSB first), then two
/// `u64` counters per unit (subspaces scanned, matrices checked). All
/// integers little-endian. A unit is marked only when it finished without
/// finding a passing subspace.
struct Checkpoint {
    path: PathBuf,
    n: u8,
    d: u8,
    hash: u64,
    done: Vec<Option<(u64, u64)>>,
    last_write: Instant,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Checkpoint {
    fn open(path: &Path, field: &Field, n: usize, d: usize, units: usize) -> Result<Checkpoint, SearchError> {
        let mut cp = Checkpoint {
            path: path.to_path_buf(),
            n: n as u8,
            d: d as u8,
            hash: fnv1a(&field.to_string()),
            done: vec![None; units],
            last_write: Instant::now(),
        };
        if let Ok(bytes) = fs::read(path) {
            if let Some(done) = cp.parse(&bytes, units) {
                cp.done = done;
            }
        }
        Ok(cp)
    }

    fn header(&self) -> Vec<u8> {
        let mut h = Vec::with_capacity(16);
        h.extend_from_slice(CHECKPOINT_MAGIC);
        h.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        h.push(self.n);
        h.push(self.d);
        h.extend_from_slice(&self.hash.to_le_bytes());
        h
    }

    /// `None` when the file belongs to another search or is malformed.
    fn parse(&self, bytes: &[u8], units: usize) -> Option<Vec<Option<(u64, u64)>>> {
        let header = self.header();
        let bitmap_len = units.div_ceil(8);
        if bytes.len() != 20 + bitmap_len + 16 * units || bytes[..16] != header[..] {
            return None;
        }
        if u32::from_le_bytes(bytes[16..20].try_into().ok()?) as usize != units {
            return None;
        }
        let bitmap = &bytes[20..20 + bitmap_len];
        let counters = &bytes[20 + bitmap_len..];
        Some(
            (0..units)
                .map(|u| {
                    (bitmap[u / 8] >> (u % 8) & 1 == 1).then(|| {
                        let at = 16 * u;
                        (
                            u64::from_le_bytes(counters[at..at + 8].try_into().unwrap()),
                            u64::from_le_bytes(counters[at + 8..at + 16].try_into().unwrap()),
                        )
                    })
                })
                .collect(),
        )
    }

    fn write(&mut self) -> Result<(), SearchError> {
        let units = self.done.len();
        let mut bytes = self.header();
        bytes.extend_from_slice(&(units as u32).to_le_bytes());
        let mut bitmap = vec![0u8; units.div_ceil(8)];
        let mut counters = Vec::with_capacity(16 * units);
        for (u, slot) in self.done.iter().enumerate() {
            let (s, c) = slot.unwrap_or((0, 0));
            if slot.is_some() {
                bitmap[u / 8] |= 1 << (u % 8);
            }
            counters.extend_from_slice(&s.to_le_bytes());
            counters.extend_from_slice(&c.to_le_bytes());
        }
        bytes.extend_from_slice(&bitmap);
        bytes.extend_from_slice(&counters);
        let err = |e: std::io::Error| SearchError::Checkpoint {
            path: self.path.clone(),
            message: e.to_string(),
        };
        let tmp = self.path.with_extension("tmp");
        let mut file = fs::File::create(&tmp).map_err(err)?;
        file.write_all(&bytes).map_err(err)?;
        file.sync_all().map_err(err)?;
        fs::rename(&tmp, &self.path).map_err(err)?;
        self.last_write = Instant::now();
        Ok(())
    }
}

/// Pivot patterns, their free slots and the work units over them.
type UnitPlan = (Vec<Vec<usize>>, Vec<Vec<(usize, usize)>>, Vec<Unit>);

impl Engine {
    fn units(&self, d: usize) -> UnitPlan {
        let patterns = pivot_patterns(self.m, d);
        let slots: Vec<_> = patterns.iter().map(|p| free_slots(p, self.m)).collect();
        let mut units = vec![];
        for (pi, s) in slots.iter().enumerate() {
            let count = (self.q as u64).pow(s.len() as u32);
            let mut start = 0;
            while start < count {
                let end = (start + UNIT_SIZE).min(count);
                units.push(Unit {
                    pattern: pi,
                    start,
                    end,
                });
                start = end;
            }
        }
        (patterns, slots, units)
    }

    fn scan_unit(
        &self,
        pattern: &[usize],
        slots: &[(usize, usize)],
        unit: &Unit,
        index: usize,
        mode: ScanMode,
        ctl: &Control,
    ) -> UnitOutcome {
        let (q, m, d) = (self.q as u64, self.m, pattern.len());
        let mut basis = vec![0u8; d * m];
        for (r, &p) in pattern.iter().enumerate() {
            basis[r * m + p] = 1;
        }
        let mut digits: Vec<u8> = odometer(unit.start, q, slots.len())
            .into_iter()
            .map(|x| x as u8)
            .collect();
        for (&(r, c), &x) in slots.iter().zip(&digits) {
            basis[r * m + c] = x;
        }
        let mut out = UnitOutcome::default();
        for i in unit.start..unit.end {
            if (i - unit.start).is_multiple_of(256) {
                let superseded = mode == ScanMode::FirstOnly && ctl.best.load(Ordering::Relaxed) < index;
                if superseded || ctl.over_budget() {
                    return out;
                }
            }
            let (ok, checked) = self.passes(&basis, d);
            out.scanned += 1;
            out.checked += checked;
            if ok {
                out.passes.push(basis.clone());
                if mode == ScanMode::FirstOnly {
                    ctl.best.fetch_min(index, Ordering::Relaxed);
                    out.complete = true;
                    break;
                }
            }
            for (s, &(r, c)) in slots.iter().enumerate() {
                digits[s] += 1;
                if digits[s] as u64 == q {
                    digits[s] = 0;
                    basis[r * m + c] = 0;
                } else {
                    basis[r * m + c] = digits[s];
                    break;
                }
            }
        }
        ctl.scanned.fetch_add(out.scanned, Ordering::Relaxed);
        out.complete = true;
        out
    }

    fn scan_dimension(
        &self,
        d: usize,
        mode: ScanMode,
        ctl: &Control,
        checkpoint: Option<&Path>,
    ) -> Result<DimOutcome, SearchError> {
        let (patterns, slots, units) = self.units(d);
        ctl.best.store(usize::MAX, Ordering::Relaxed);
        let cp = match checkpoint {
            Some(path) => Some(Mutex::new(Checkpoint::open(path, &self.field, self.n, d, units.len())?)),
            None => None,
        };
        let preset: Vec<Option<(u64, u64)>> = match &cp {
            Some(c) => c.lock().unwrap().done.clone(),
            None => vec![None; units.len()],
        };
        let write_error = Mutex::new(None);
        let outcomes: Vec<UnitOutcome> = units
            .par_iter()
            .enumerate()
            .map(|(u, unit)| {
                if let Some((scanned, checked)) = preset[u] {
                    return UnitOutcome {
                        scanned,
                        checked,
                        passes: vec![],
                        complete: true,
                    };
                }
                let out = self.scan_unit(&patterns[unit.pattern], &slots[unit.pattern], unit, u, mode, ctl);
                if let Some(cp) = &cp {
                    let mut cp = cp.lock().unwrap();
                    if out.complete && out.passes.is_empty() {
                        cp.done[u] = Some((out.scanned, out.checked));
                    }
                    if cp.last_write.elapsed() >= CHECKPOINT_INTERVAL {
                        if let Err(e) = cp.write() {
                            *write_error.lock().unwrap() = Some(e);
                        }
                    }
                }
                out
            })
            .collect();
        if let Some(cp) = cp {
            cp.into_inner().unwrap().write()?;
        }
        if let Some(e) = write_error.into_inner().unwrap() {
            return Err(e);
        }
        let mut merged = DimOutcome {
            passes: vec![],
            scanned: 0,
            checked: 0,
            complete: true,
        };
        for out in outcomes {
            merged.scanned += out.scanned;
            merged.checked += out.checked;
            if !out.complete {
                merged.complete = false;
                break;
            }
            merged.passes.extend(out.passes.iter().map(|b| self.decode(b, d)));
            if mode == ScanMode::FirstOnly && !merged.passes.is_empty() {
                break;
            }
        }
        Ok(merged)
    }
}

fn run_in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// `t_n(F_q)`: the largest dimension of a weakly triangularizable subspace.
pub fn compute_tn(field: &Field, n: usize, options: &SearchOptions) -> Result<SearchReport, SearchError> {
    compute(field, n, Quantity::Tn, options)
}

/// `d_n(F_q)`: the largest dimension of a weakly diagonalisable subspace.
pub fn compute_dn(field: &Field, n: usize, options: &SearchOptions) -> Result<SearchReport, SearchError> {
    compute(field, n, Quantity::Dn, options)
}

/// Starts from the lower bound (`T_n` for `t_n`, `D_n` for `d_n`), scans
/// each larger dimension in turn until one has no passing subspace, then
/// reports the least passing subspace of the final dimension as witness.
pub fn compute(
    field: &Field,
    n: usize,
    quantity: Quantity,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let engine = Engine::new(field, n, quantity)?;
    run_in_pool(options.threads, || {
        let lower = match quantity {
            Quantity::Tn => upper_triangular_space(field, n),
            Quantity::Dn => diagonal_space(field, n),
        };
        assert!(
            engine.passes(&engine.encode(&lower), lower.dim()).0,
            "lower-bound space must pass"
        );
        let ctl = Control::new(started, options.budget);
        let mut report = SearchReport {
            field: field.clone(),
            n,
            quantity,
            lower_bound: lower.dim(),
            value: lower.dim(),
            witness: lower.clone(),
            witness_source: WitnessSource::LowerBound,
            exhaustive: false,
            subspaces_scanned: 0,
            matrices_checked: 0,
            dimensions: vec![],
            wall: Duration::ZERO,
        };
        let q = field.order().unwrap();
        let mut found_above = false;
        for d in lower.dim() + 1..=engine.m {
            let out = engine.scan_dimension(d, ScanMode::FirstOnly, &ctl, options.checkpoint.as_deref())?;
            record(&mut report, d, q, &out);
            if !out.complete {
                report.wall = started.elapsed();
                return Err(SearchError::BudgetExceeded(Box::new(report)));
            }
            match out.passes.into_iter().next() {
                Some(s) => {
                    report.value = d;
                    report.witness = s;
                    report.witness_source = WitnessSource::FirstCanonical;
                    found_above = true;
                }
                None => break,
            }
        }
        report.exhaustive = true;
        if !found_above {
            let out = engine.scan_dimension(lower.dim(), ScanMode::FirstOnly, &ctl, None)?;
            if out.complete {
                if let Some(s) = out.passes.into_iter().next() {
                    report.witness = s;
                    report.witness_source = WitnessSource::FirstCanonical;
                }
            }
        }
        report.wall = started.elapsed();
        Ok(report)
    })
}

fn record(report: &mut SearchReport, d: usize, q: u64, out: &DimOutcome) {
    report.subspaces_scanned += out.scanned;
    report.matrices_checked += out.checked;
    report.dimensions.push(DimensionScan {
        dim: d,
        subspaces_total: gaussian_binomial(report.n * report.n, d, q),
        subspaces_scanned: out.scanned,
        matrices_checked: out.checked,
        passing_found: !out.passes.is_empty(),
        complete: out.complete,
    });
}

/// Every passing subspace of dimension `d`, in scan order.
pub fn passing_subspaces(
    field: &Field,
    n: usize,
    d: usize,
    quantity: Quantity,
    options: &SearchOptions,
) -> Result<Vec<Subspace>, SearchError> {
    let started = Instant::now();
    let engine = Engine::new(field, n, quantity)?;
    run_in_pool(options.threads, || {
        let ctl = Control::new(started, options.budget);
        let out = engine.scan_dimension(d, ScanMode::All, &ctl, None)?;
        if !out.complete {
            return Err(SearchError::TooLarge(format!(
                "scan of dimension {d} did not finish within budget"
            )));
        }
        Ok(out.passes)
    })
}

/// One conjugacy orbit of optimal spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    /// Least canonical form in the orbit.
    pub representative: Subspace,
    pub orbit_size: usize,
    pub irreducible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub field: Field,
    pub n: usize,
    pub value: usize,
    pub optimal_count: usize,
    pub classes: Vec<OrbitClass>,
}

/// All conjugates `P S P^-1`, `P` in `GL_n`, as canonical forms.
pub fn orbit(s: &Subspace, group: &[Matrix]) -> BTreeSet<Subspace> {
    group
        .par_iter()
        .map(|p| s.conjugate(p).unwrap())
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Groups the optimal weakly triangularizable subspaces of `Mat_n(F_q)`
/// into `GL_n` conjugacy orbits, sorted by representative.
pub fn classify_optimal(field: &Field, n: usize, options: &SearchOptions) -> Result<Classification, SearchError> {
    let q = finite_order(field)?;
    let group = general_linear_group(field, n, MAX_GROUP_ORDER)?;
    let report = compute_tn(field, n, options)?;
    let mut remaining: BTreeSet<Subspace> = passing_subspaces(field, n, report.value, Quantity::Tn, options)?
        .into_iter()
        .collect();
    let optimal_count = remaining.len();
    let mut classes = vec![];
    while let Some(first) = remaining.pop_first() {
        let orb = orbit(&first, &group);
        for s in &orb {
            remaining.remove(s);
        }
        let representative = orb.first().unwrap().clone();
        classes.push(OrbitClass {
            irreducible: is_irreducible(&representative)?,
            representative,
            orbit_size: orb.len(),
        });
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    debug_assert!(q > 1);
    Ok(Classification {
        field: field.clone(),
        n,
        value: report.value,
        optimal_count,
        classes,
    })
}
