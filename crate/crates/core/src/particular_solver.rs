//! Exact particular solutions of the mode equations.
//!
//! The ansatz q^{ij}(y) = sum_{d=m}^{M} c_d y^d turns P g = h into a banded
//! linear system. An entry linking output degree e to unknown degree d is
//! rational * pi^{e-d}, so after splitting the right-hand side into graded
//! pieces every system is solved over Q. A second route eliminates over
//! Q(pi) directly; tests check that the two agree.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bessel_expr::{apply_mode_operator, BesselExpr, DoubleBessel, ExprError, SingleBessel, YLaurent};
use crate::scalar_ring::{ratpi_extract, Constant, RatPi, Rational, ScalarError, SymbolMonomial};
use crate::source_terms::{case_tag, source_term, CaseTag, Params, Prefactor, SourceError};

pub const DEFAULT_WIDEN_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("no solution in window {window} after {retries} retries; inconsistent rows {inconsistent_rows:?}")]
    NoSolutionInWindow { window: Windows, retries: u32, inconsistent_rows: Vec<RowLabel> },
    #[error("operator entry violates the band profile: {0}")]
    BandViolation(String),
    #[error("residual is not identically zero")]
    ResidualNonzero,
    #[error("wrong mode kind for this solver: {0:?}")]
    WrongCase(CaseTag),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// K_i K_j (double) or K_j (single) basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    KK(u8, u8),
    K(u8),
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::KK(i, j) => write!(f, "K{i}K{j}"),
            BasisElement::K(j) => write!(f, "K{j}"),
        }
    }
}

impl std::str::FromStr for BasisElement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let digit = |c: u8| match c {
            b'0' => Ok(0u8),
            b'1' => Ok(1u8),
            _ => Err(format!("bad basis element {s}")),
        };
        match s.as_bytes() {
            [b'K', i, b'K', j] => Ok(BasisElement::KK(digit(*i)?, digit(*j)?)),
            [b'K', j] => Ok(BasisElement::K(digit(*j)?)),
            _ => Err(format!("bad basis element {s}")),
        }
    }
}

impl Serialize for BasisElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Lowest and highest power of y in one ansatz polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub m: i32,
    #[serde(rename = "M")]
    pub big_m: i32,
}

impl DegreeWindow {
    pub fn new(m: i32, big_m: i32) -> Self {
        assert!(m <= big_m, "empty degree window");
        DegreeWindow { m, big_m }
    }

    pub fn widened(&self, by: i32) -> Self {
        DegreeWindow { m: self.m - by, big_m: self.big_m + by }
    }

    pub fn contains(&self, d: i32) -> bool {
        self.m <= d && d <= self.big_m
    }
}

/// One degree window per basis element of the ansatz.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Windows(pub BTreeMap<BasisElement, DegreeWindow>);

impl Windows {
    pub fn get(&self, b: BasisElement) -> Option<DegreeWindow> {
        self.0.get(&b).copied()
    }

    pub fn widened(&self, by: i32) -> Windows {
        Windows(self.0.iter().map(|(b, w)| (*b, w.widened(by))).collect())
    }

    pub fn uniform(bases: &[BasisElement], w: DegreeWindow) -> Windows {
        Windows(bases.iter().map(|b| (*b, w)).collect())
    }
}

impl fmt::Display for Windows {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(b, w)| format!("{b}:[{},{}]", w.m, w.big_m)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// An equation of the system: the coefficient of `basis` * y^`degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowLabel {
    pub basis: BasisElement,
    pub degree: i32,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} y^{}", self.basis, self.degree)
    }
}

/// Smallest r with r(r+1) >= lambda; equals the triangular root when there is one.
pub fn effective_r(lambda: i64) -> i32 {
    let mut r = 1i64;
    while r * (r + 1) < lambda {
        r += 1;
    }
    r as i32
}

const K00: BasisElement = BasisElement::KK(0, 0);
const K01: BasisElement = BasisElement::KK(0, 1);
const K10: BasisElement = BasisElement::KK(1, 0);
const K11: BasisElement = BasisElement::KK(1, 1);

/// Degree windows for q^{ij} in the generic double case. The four tabulated
/// pairs use the published table, others use m = -r+1, M = ceil(a+b)-1.
pub fn default_window(alpha2: u32, beta2: u32, r: i32) -> Windows {
    let (lo, hi) = (alpha2.min(beta2), alpha2.max(beta2));
    // outside the tabulated range of r the table can produce m > M
    let w = |m: i32, big_m: i32| DegreeWindow::new(m.min(big_m), big_m);
    let (w00, w01, w11) = match (lo, hi) {
        (3, 3) | (3, 7) => (w(-r + 2, 1), w(-r + 1, 0), w(-r + 2, 1)),
        (3, 5) => (w(-r + 2, 0), w(-r + 1, 1), w(-r + 2, 0)),
        (5, 5) => (w(-r + 2, 1), w(-r + 1, 0), w((-r + 1).min(-1), 1)),
        _ => {
            // ceil(a + b) - 1 = (alpha2 + beta2) / 2 - 1 since a + b is an integer
            let big_m = (alpha2 + beta2) as i32 / 2 - 1;
            let d = w(-r + 1, big_m);
            (d, d, d)
        }
    };
    Windows([(K00, w00), (K01, w01), (K10, w01), (K11, w11)].into_iter().collect())
}

/// Windows for n1 + n2 = 0, where the operator loses its mass term and the
/// solutions reach up to y^{r+2}.
pub fn anti_diagonal_window(r: i32) -> Windows {
    Windows::uniform(&[K00, K01, K11], DegreeWindow::new(-r + 1, r + 2))
}

/// Windows for p^j in a single-Bessel mode whose source spans y^`bottom`..y^`top`.
pub fn single_window(r: i32, bottom: i32, top: i32) -> Windows {
    let m = (-r + 1).min(bottom - 1);
    Windows::uniform(&[BasisElement::K(0), BasisElement::K(1)], DegreeWindow::new(m.min(top), top.max(m)))
}

/// Which of the double, single or pure shapes a mode has.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Double { n1: i64, n2: i64 },
    Single { n: i64 },
}

impl Shape {
    fn bases(&self) -> Vec<BasisElement> {
        match self {
            Shape::Double { n1, n2 } if n1.abs() == n2.abs() => vec![K00, K01, K11],
            Shape::Double { .. } => vec![K00, K01, K10, K11],
            Shape::Single { .. } => vec![BasisElement::K(0), BasisElement::K(1)],
        }
    }

    fn unit(&self, b: BasisElement, d: i32, c: Constant) -> BesselExpr {
        let mono = YLaurent::power(c, d);
        match (self, b) {
            (Shape::Double { n1, n2 }, BasisElement::KK(i, j)) => {
                let mut e = DoubleBessel::zero(*n1, *n2);
                e.q[i as usize][j as usize] = mono;
                BesselExpr::Double(e)
            }
            (Shape::Single { n }, BasisElement::K(j)) => {
                let mut e = SingleBessel::zero(*n);
                e.p[j as usize] = mono;
                BesselExpr::Single(e)
            }
            _ => unreachable!("basis does not match shape"),
        }
    }

    fn zero(&self) -> BesselExpr {
        match self {
            Shape::Double { n1, n2 } => BesselExpr::Double(DoubleBessel::zero(*n1, *n2)),
            Shape::Single { n } => BesselExpr::Single(SingleBessel::zero(*n)),
        }
    }
}

/// The entries of an expression, keyed by basis element.
fn entries(e: &BesselExpr) -> Vec<(BasisElement, &YLaurent)> {
    match e {
        BesselExpr::Double(d) => {
            let mut v = Vec::new();
            for i in 0..2u8 {
                for j in 0..2u8 {
                    v.push((BasisElement::KK(i, j), &d.q[i as usize][j as usize]));
                }
            }
            v
        }
        BesselExpr::Single(s) => vec![(BasisElement::K(0), &s.p[0]), (BasisElement::K(1), &s.p[1])],
        BesselExpr::Pure { .. } => Vec::new(),
    }
}

/// Arithmetic needed by the elimination.
pub trait Field: Clone {
    fn field_zero() -> Self;
    fn vanishes(&self) -> bool;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
}

impl Field for Rational {
    fn field_zero() -> Self {
        Rational::zero()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for RatPi {
    fn field_zero() -> Self {
        RatPi::zero()
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn over(&self, o: &Self) -> Self {
        self.div(o)
    }
}

/// Result of eliminating a system with several right-hand sides.
#[derive(Clone, Debug)]
pub struct Elimination<F> {
    /// solutions[k][c]: unknown c for right-hand side k; free unknowns are zero.
    pub solutions: Vec<Vec<F>>,
    pub rank: usize,
    pub free_columns: Vec<usize>,
    /// Rows reduced to 0 = nonzero.
    pub inconsistent_rows: Vec<usize>,
}

/// Gaussian elimination with pivots taken column by column in index order,
/// each from the lowest-index remaining row, then back substitution.
pub fn eliminate<F: Field>(mut rows: Vec<BTreeMap<usize, F>>, mut rhs: Vec<Vec<F>>, ncols: usize) -> Elimination<F> {
    let nrhs = rhs.first().map_or(0, |r| r.len());
    let mut used = vec![false; rows.len()];
    let mut pivot_row: Vec<Option<usize>> = vec![None; ncols];
    let mut free_columns = Vec::new();
    for c in 0..ncols {
        let Some(p) = (0..rows.len()).find(|&r| !used[r] && rows[r].get(&c).is_some_and(|v| !v.vanishes())) else {
            free_columns.push(c);
            continue;
        };
        used[p] = true;
        pivot_row[c] = Some(p);
        let a = rows[p][&c].clone();
        let prow: Vec<(usize, F)> = rows[p].iter().map(|(k, v)| (*k, v.over(&a))).collect();
        let prhs: Vec<F> = rhs[p].iter().map(|v| v.over(&a)).collect();
        rows[p] = prow.iter().cloned().collect();
        rhs[p] = prhs.clone();
        for r in 0..rows.len() {
            if used[r] {
                continue;
            }
            let Some(f) = rows[r].get(&c).cloned() else { continue };
            for (k, v) in &prow {
                let cur = rows[r].get(k).cloned().unwrap_or_else(F::field_zero);
                let nv = cur.minus(&f.times(v));
                if nv.vanishes() {
                    rows[r].remove(k);
                } else {
                    rows[r].insert(*k, nv);
                }
            }
            for (t, v) in prhs.iter().enumerate() {
                rhs[r][t] = rhs[r][t].minus(&f.times(v));
            }
        }
    }
    let inconsistent_rows: Vec<usize> =
        (0..rows.len()).filter(|&r| !used[r] && rhs[r].iter().any(|v| !v.vanishes())).collect();
    let mut solutions = vec![vec![F::field_zero(); ncols]; nrhs];
    for c in (0..ncols).rev() {
        let Some(p) = pivot_row[c] else { continue };
        for (t, sol) in solutions.iter_mut().enumerate() {
            let mut v = rhs[p][t].clone();
            for (k, a) in &rows[p] {
                if *k != c {
                    v = v.minus(&a.times(&sol[*k]));
                }
            }
            sol[c] = v;
        }
    }
    Elimination { solutions, rank: ncols - free_columns.len(), free_columns, inconsistent_rows }
}

/// Elimination route.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Graded right-hand sides, elimination over Q.
    #[default]
    Graded,
    /// Elimination over Q(pi).
    RatPi,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Start windows; the default table when absent.
    pub window: Option<Windows>,
    pub cap: u32,
    pub route: Route,
    /// Solve with this eigenvalue instead of the one in the parameters.
    pub lambda: Option<i64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { window: None, cap: DEFAULT_WIDEN_CAP, route: Route::Graded, lambda: None }
    }
}

/// The linear system for one window, before elimination.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub unknowns: Vec<RowLabel>,
    pub rows: Vec<RowLabel>,
    /// entries[row][col] = rational a with matrix entry a * pi^{e-d}
    pub entries: Vec<BTreeMap<usize, Rational>>,
    /// Largest e - d over nonzero entries.
    pub bandwidth: i32,
}

impl LinearSystem {
    /// Assemble the system of `lambda`-operator images of y^d b for every
    /// unknown in the windows, adding rows for the given right-hand side degrees.
    fn assemble(
        lambda: i64,
        shape: Shape,
        windows: &Windows,
        rhs_rows: &[RowLabel],
    ) -> Result<LinearSystem, SolveError> {
        let mut unknowns = Vec::new();
        for (b, w) in &windows.0 {
            if !shape.bases().contains(b) {
                continue;
            }
            for d in w.m..=w.big_m {
                unknowns.push(RowLabel { basis: *b, degree: d });
            }
        }
        // ascending degree, then basis
        unknowns.sort_by_key(|u| (u.degree, u.basis));
        let mut columns: Vec<BTreeMap<RowLabel, Rational>> = Vec::with_capacity(unknowns.len());
        let mut bandwidth = 0;
        for u in &unknowns {
            let image = apply_mode_operator(lambda, &shape.unit(u.basis, u.degree, Constant::one()));
            let mut col = BTreeMap::new();
            for (b, poly) in entries(&image) {
                for (e, l, c) in poly.terms() {
                    let shift = e - u.degree;
                    let Some((a, k)) = c.as_pi_monomial() else {
                        return Err(SolveError::BandViolation(format!("non-monomial entry {c}")));
                    };
                    if l != 0 || k != shift || !(0..=2).contains(&shift) {
                        return Err(SolveError::BandViolation(format!("{} -> {b} y^{e} log^{l}: {c}", u)));
                    }
                    bandwidth = bandwidth.max(shift);
                    col.insert(RowLabel { basis: b, degree: e }, a);
                }
            }
            columns.push(col);
        }
        let mut row_set: Vec<RowLabel> = columns.iter().flat_map(|c| c.keys().copied()).collect();
        row_set.extend_from_slice(rhs_rows);
        row_set.sort_by_key(|r| (r.degree, r.basis));
        row_set.dedup();
        let index: BTreeMap<RowLabel, usize> = row_set.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut entries_rows = vec![BTreeMap::new(); row_set.len()];
        for (ci, col) in columns.into_iter().enumerate() {
            for (rl, a) in col {
                entries_rows[index[&rl]].insert(ci, a);
            }
        }
        Ok(LinearSystem { unknowns, rows: row_set, entries: entries_rows, bandwidth })
    }

    /// The system of a nonzero mode over the given windows, without right-hand side rows.
    pub fn for_mode(lambda: i64, n1: i64, n2: i64, windows: &Windows) -> Result<LinearSystem, SolveError> {
        let shape = match (n1 == 0, n2 == 0) {
            (false, false) => Shape::Double { n1, n2 },
            (true, true) => return Err(SolveError::WrongCase(CaseTag::BothZero)),
            _ => Shape::Single { n: n1 + n2 },
        };
        LinearSystem::assemble(lambda, shape, windows, &[])
    }

    pub fn row_index(&self, r: &RowLabel) -> Option<usize> {
        self.rows.iter().position(|x| x == r)
    }
}

/// Right-hand side coefficients keyed by row, split into graded pieces:
/// each piece is class * pi^{e - offset} * rational at row degree e.
type Graded = BTreeMap<(SymbolMonomial, i32), BTreeMap<RowLabel, Rational>>;

fn graded_pieces(h: &BesselExpr) -> Graded {
    let mut out: Graded = BTreeMap::new();
    for (b, poly) in entries(h) {
        for (e, l, c) in poly.terms() {
            assert_eq!(l, 0, "sources carry no logarithms");
            for (mono, r) in c.terms() {
                let key = (mono.without_pi(), e - mono.pi_exponent());
                *out.entry(key).or_default().entry(RowLabel { basis: b, degree: e }).or_insert_with(Rational::zero) +=
                    r;
            }
        }
    }
    out
}

/// Solve `lambda`-operator(g) = h on one window set. `Err` carries the inconsistent rows.
fn solve_in_window(
    lambda: i64,
    shape: Shape,
    windows: &Windows,
    h: &BesselExpr,
    route: Route,
) -> Result<Result<(BesselExpr, usize), Vec<RowLabel>>, SolveError> {
    let pieces = graded_pieces(h);
    let rhs_rows: Vec<RowLabel> = pieces.values().flat_map(|m| m.keys().copied()).collect();
    let sys = LinearSystem::assemble(lambda, shape, windows, &rhs_rows)?;
    let ncols = sys.unknowns.len();
    let mut g = shape.zero();
    let kernel_dim;
    match route {
        Route::Graded => {
            let keys: Vec<&(SymbolMonomial, i32)> = pieces.keys().collect();
            let mut rhs = vec![vec![Rational::zero(); keys.len()]; sys.rows.len()];
            for (t, key) in keys.iter().enumerate() {
                for (rl, v) in &pieces[*key] {
                    rhs[sys.row_index(rl).expect("row present")][t] = v.clone();
                }
            }
            let el = eliminate(sys.entries.clone(), rhs, ncols);
            if !el.inconsistent_rows.is_empty() {
                return Ok(Err(el.inconsistent_rows.iter().map(|&i| sys.rows[i]).collect()));
            }
            kernel_dim = ncols - el.rank;
            for (t, (class, offset)) in keys.iter().enumerate() {
                for (c, u) in sys.unknowns.iter().enumerate() {
                    let xi = &el.solutions[t][c];
                    if Zero::is_zero(xi) {
                        continue;
                    }
                    let coeff = Constant::term(xi.clone(), class.clone()).mul_pi_pow(u.degree - offset);
                    add_to(&mut g, u, coeff);
                }
            }
        }
        Route::RatPi => {
            let mut by_class: BTreeMap<SymbolMonomial, BTreeMap<RowLabel, Constant>> = BTreeMap::new();
            for ((class, offset), m) in &pieces {
                for (rl, v) in m {
                    let c = Constant::pi_term(v.clone(), rl.degree - offset);
                    *by_class.entry(class.clone()).or_default().entry(*rl).or_insert_with(Constant::zero) += &c;
                }
            }
            let classes: Vec<&SymbolMonomial> = by_class.keys().collect();
            let mut rhs = vec![vec![RatPi::zero(); classes.len()]; sys.rows.len()];
            for (t, class) in classes.iter().enumerate() {
                for (rl, v) in &by_class[*class] {
                    rhs[sys.row_index(rl).expect("row present")][t] = crate::scalar_ring::ratpi_solve_embed(v)?;
                }
            }
            let rows: Vec<BTreeMap<usize, RatPi>> = sys
                .entries
                .iter()
                .enumerate()
                .map(|(ri, row)| {
                    row.iter()
                        .map(|(c, a)| (*c, RatPi::pi_monomial(a.clone(), sys.rows[ri].degree - sys.unknowns[*c].degree)))
                        .collect()
                })
                .collect();
            let el = eliminate(rows, rhs, ncols);
            if !el.inconsistent_rows.is_empty() {
                return Ok(Err(el.inconsistent_rows.iter().map(|&i| sys.rows[i]).collect()));
            }
            kernel_dim = ncols - el.rank;
            for (t, class) in classes.iter().enumerate() {
                for (c, u) in sys.unknowns.iter().enumerate() {
                    let x = &el.solutions[t][c];
                    if x.is_zero() {
                        continue;
                    }
                    let coeff = &ratpi_extract(x)? * &Constant::term(Rational::one(), (*class).clone());
                    add_to(&mut g, u, coeff);
                }
            }
        }
    }
    Ok(Ok((g, kernel_dim)))
}

fn add_to(g: &mut BesselExpr, u: &RowLabel, c: Constant) {
    match (g, u.basis) {
        (BesselExpr::Double(d), BasisElement::KK(i, j)) => d.q[i as usize][j as usize].add_term(u.degree, 0, c),
        (BesselExpr::Single(s), BasisElement::K(j)) => s.p[j as usize].add_term(u.degree, 0, c),
        _ => unreachable!("basis does not match shape"),
    }
}

/// Try `attempt` on `start`, widening every window by one on each side after
/// each failure, at most `cap` times. Returns the result, the window used and
/// the number of retries.
pub fn widen_and_retry<T>(
    start: &Windows,
    cap: u32,
    mut attempt: impl FnMut(&Windows) -> Result<Result<T, Vec<RowLabel>>, SolveError>,
) -> Result<(T, Windows, u32), SolveError> {
    let mut w = start.clone();
    let mut retries = 0;
    loop {
        match attempt(&w)? {
            Ok(t) => return Ok((t, w, retries)),
            Err(rows) => {
                if retries >= cap {
                    return Err(SolveError::NoSolutionInWindow { window: w, retries, inconsistent_rows: rows });
                }
                retries += 1;
                w = w.widened(1);
            }
        }
    }
}

/// The nonzero index of a single-Bessel mode. Left: (n, 0). Right: (0, n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A particular solution of one Fourier mode: prefactor * core, where the
/// mode operator maps the core onto the core of the source term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticularSolution {
    pub params: Params,
    pub lambda: i64,
    pub mode: (i64, i64),
    pub case_tag: CaseTag,
    pub prefactor: Prefactor,
    /// g with operator(g) = source core.
    pub solution: BesselExpr,
    /// Source core h.
    pub source: BesselExpr,
    pub window_used: Option<Windows>,
    pub retries: u32,
    pub kernel_dim: usize,
    pub residual_check: String,
}

impl ParticularSolution {
    /// The mode's particular solution prefactor * g.
    pub fn particular(&self) -> BesselExpr {
        self.solution.scale(&self.prefactor.value())
    }

    /// Bit-stable JSON report.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn check_residual(lambda: i64, g: &BesselExpr, h: &BesselExpr) -> Result<(), SolveError> {
    if apply_mode_operator(lambda, g).sub(h)?.is_zero() {
        Ok(())
    } else {
        Err(SolveError::ResidualNonzero)
    }
}

fn max_degree(h: &BesselExpr) -> i32 {
    h.components().iter().filter_map(|p| p.max_exp()).max().unwrap_or(0)
}

fn min_degree(h: &BesselExpr) -> i32 {
    h.components().iter().filter_map(|p| p.min_exp()).min().unwrap_or(0)
}

fn solve_shaped(
    p: &Params,
    n1: i64,
    n2: i64,
    shape: Shape,
    default: Windows,
    opts: &SolveOptions,
) -> Result<ParticularSolution, SolveError> {
    let lambda = opts.lambda.unwrap_or_else(|| p.lambda());
    let src = source_term(p, n1, n2)?;
    let start = opts.window.clone().unwrap_or(default);
    let ((g, kernel_dim), w, retries) =
        widen_and_retry(&start, opts.cap, |w| solve_in_window(lambda, shape, w, &src.core, opts.route))?;
    check_residual(lambda, &g, &src.core)?;
    Ok(ParticularSolution {
        params: *p,
        lambda,
        mode: (n1, n2),
        case_tag: src.case_tag,
        prefactor: src.prefactor,
        solution: g,
        source: src.core,
        window_used: Some(w),
        retries,
        kernel_dim,
        residual_check: "exact-zero".into(),
    })
}

/// Particular solution for n1 n2 != 0, including the anti-diagonal n1 + n2 = 0.
pub fn solve_particular_double(p: &Params, n1: i64, n2: i64, opts: &SolveOptions) -> Result<ParticularSolution, SolveError> {
    let tag = case_tag(n1, n2);
    if !matches!(tag, CaseTag::Generic | CaseTag::AntiDiagonal) {
        return Err(SolveError::WrongCase(tag));
    }
    let r = effective_r(opts.lambda.unwrap_or_else(|| p.lambda()));
    let default = if tag == CaseTag::AntiDiagonal { anti_diagonal_window(r) } else { default_window(p.alpha2, p.beta2, r) };
    solve_shaped(p, n1, n2, Shape::Double { n1, n2 }, default, opts)
}

/// Particular solution when exactly one of n1, n2 vanishes.
pub fn solve_particular_single(p: &Params, n: i64, side: Side, opts: &SolveOptions) -> Result<ParticularSolution, SolveError> {
    if n == 0 {
        return Err(SolveError::WrongCase(CaseTag::BothZero));
    }
    let (n1, n2) = match side {
        Side::Left => (n, 0),
        Side::Right => (0, n),
    };
    let r = effective_r(opts.lambda.unwrap_or_else(|| p.lambda()));
    let core = source_term(p, n1, n2)?.core;
    let window = single_window(r, min_degree(&core), max_degree(&core));
    solve_shaped(p, n1, n2, Shape::Single { n }, window, opts)
}

/// Particular solution of (y^2 d^2 - lambda) g = y^k for integer k. At the
/// resonant powers k(k-1) = lambda the solution is y^k (log y/(2k-1) - 1/(2k-1)^2).
pub fn euler_power_solution(lambda: i64, k: i32) -> YLaurent {
    let kk = k as i64;
    let det = kk * (kk - 1) - lambda;
    let mut out = YLaurent::zero();
    if det != 0 {
        out.add_term(k, 0, Constant::frac(1, det));
    } else {
        let s = 2 * kk - 1;
        out.add_term(k, 1, Constant::frac(1, s));
        out.add_term(k, 0, Constant::frac(-1, s * s));
    }
    out
}

/// The n1 = n2 = 0 mode. The free homogeneous solutions y^{-r} and y^{r+1}
/// are not included.
pub fn solve_zero_mode(p: &Params, opts: &SolveOptions) -> Result<ParticularSolution, SolveError> {
    let lambda = opts.lambda.unwrap_or_else(|| p.lambda());
    let src = source_term(p, 0, 0)?;
    let BesselExpr::Pure { f } = &src.core else { unreachable!("zero mode is pure") };
    let mut g = YLaurent::zero();
    for (k, l, c) in f.terms() {
        assert_eq!(l, 0, "sources carry no logarithms");
        g.add_assign(&euler_power_solution(lambda, k).scale(c));
    }
    let g = BesselExpr::pure(g);
    check_residual(lambda, &g, &src.core)?;
    Ok(ParticularSolution {
        params: *p,
        lambda,
        mode: (0, 0),
        case_tag: CaseTag::BothZero,
        prefactor: src.prefactor,
        solution: g,
        source: src.core,
        window_used: None,
        retries: 0,
        kernel_dim: 0,
        residual_check: "exact-zero".into(),
    })
}

/// Dispatch on the mode's case.
pub fn solve_mode(p: &Params, n1: i64, n2: i64, opts: &SolveOptions) -> Result<ParticularSolution, SolveError> {
    match case_tag(n1, n2) {
        CaseTag::BothZero => solve_zero_mode(p, opts),
        CaseTag::LeftZero => solve_particular_single(p, n2, Side::Right, opts),
        CaseTag::RightZero => solve_particular_single(p, n1, Side::Left, opts),
        CaseTag::Generic | CaseTag::AntiDiagonal => solve_particular_double(p, n1, n2, opts),
    }
}
