//! Printed mode tables kept verbatim as data, evaluated at concrete modes
//! and compared entry by entry with the solver output.

mod latex_eval;

pub use latex_eval::{eval_latex, Bindings, LatexError};

use serde::{Deserialize, Serialize};

use crate::bessel_expr::{BesselExpr, YLaurent};
use crate::particular_solver::{solve_mode, SolveError, SolveOptions};
use crate::source_terms::{Normalization, Params, SourceError};

const FILES: &[(&str, &str)] = &[
    ("three_halves_30", include_str!("../../fixtures/three_halves_30.toml")),
    ("three_halves_56", include_str!("../../fixtures/three_halves_56.toml")),
    ("three_five_20", include_str!("../../fixtures/three_five_20.toml")),
    ("five_halves_30", include_str!("../../fixtures/five_halves_30.toml")),
    ("three_seven_30", include_str!("../../fixtures/three_seven_30.toml")),
    ("three_halves_2", include_str!("../../fixtures/three_halves_2.toml")),
    ("three_five_6", include_str!("../../fixtures/three_five_6.toml")),
    ("five_halves_2", include_str!("../../fixtures/five_halves_2.toml")),
    ("five_halves_12", include_str!("../../fixtures/five_halves_12.toml")),
    ("three_seven_12", include_str!("../../fixtures/three_seven_12.toml")),
];

/// Generic test modes; anti-diagonal and single-Bessel modes are listed per case.
pub const GENERIC_MODES: &[(i64, i64)] = &[(1, 1), (1, 2), (2, 1), (2, 3), (1, -3)];
pub const ANTI_MODES: &[(i64, i64)] = &[(1, -1), (-2, 2), (3, -3)];
pub const SINGLE_NS: &[i64] = &[1, 2, -3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FixtureError {
    #[error("no fixture for {0}")]
    NoFixture(String),
    #[error("fixture data: {0}")]
    Data(String),
    #[error("mode ({0}, {1}) is not covered by a {2:?} table")]
    WrongMode(i64, i64, TableCase),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableCase {
    /// n1 = n2 = 0
    Zero,
    /// one table for both (n, 0) and (0, n)
    Single,
    /// (n, 0)
    Left,
    /// (0, n)
    Right,
    Generic,
    /// n1 = -n2
    Anti,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub key: String,
    #[serde(default)]
    pub symbol: Option<String>,
    #[serde(default)]
    pub note: Option<String>,
    pub printed: String,
    /// Replacement used when the printed text is an erratum.
    #[serde(default)]
    pub corrected: Option<String>,
    #[serde(default)]
    pub erratum: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureTable {
    pub case: TableCase,
    pub prefactor: String,
    #[serde(rename = "entry")]
    pub entries: Vec<FixtureEntry>,
}

#[derive(Clone, Debug, Deserialize)]
struct FixtureFile {
    alpha: String,
    beta: String,
    lambda: i64,
    #[serde(rename = "table")]
    tables: Vec<FixtureTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Family {
    pub id: String,
    pub params: Params,
    pub tables: Vec<FixtureTable>,
}

impl Family {
    pub fn table(&self, case: TableCase) -> Option<&FixtureTable> {
        self.tables.iter().find(|t| t.case == case)
    }

    /// The table covering a mode, with its binding of the printed variables.
    pub fn table_for(&self, n1: i64, n2: i64) -> Option<(&FixtureTable, Bindings)> {
        let pick = |cases: &[TableCase]| cases.iter().find_map(|c| self.table(*c));
        match (n1 == 0, n2 == 0) {
            (true, true) => pick(&[TableCase::Zero]).map(|t| (t, Bindings::default())),
            (false, true) => pick(&[TableCase::Left, TableCase::Single]).map(|t| (t, Bindings::single(n1))),
            (true, false) => pick(&[TableCase::Right, TableCase::Single]).map(|t| (t, Bindings::single(n2))),
            _ if n1 + n2 == 0 => pick(&[TableCase::Anti]).map(|t| (t, Bindings::double(n1, n2))),
            _ => pick(&[TableCase::Generic]).map(|t| (t, Bindings::double(n1, n2))),
        }
    }

    /// Test modes for one table.
    pub fn modes(case: TableCase) -> Vec<(i64, i64)> {
        match case {
            TableCase::Zero => vec![(0, 0)],
            TableCase::Single => SINGLE_NS.iter().flat_map(|&n| [(n, 0), (0, n)]).collect(),
            TableCase::Left => SINGLE_NS.iter().map(|&n| (n, 0)).collect(),
            TableCase::Right => SINGLE_NS.iter().map(|&n| (0, n)).collect(),
            TableCase::Generic => GENERIC_MODES.to_vec(),
            TableCase::Anti => ANTI_MODES.to_vec(),
        }
    }
}

/// All embedded fixture families.
pub fn families() -> Result<Vec<Family>, FixtureError> {
    FILES
        .iter()
        .map(|(id, text)| {
            let f: FixtureFile = toml::from_str(text).map_err(|e| FixtureError::Data(format!("{id}: {e}")))?;
            let params = Params::parse(&f.alpha, &f.beta, f.lambda, Normalization::PaperC)?;
            Ok(Family { id: id.to_string(), params, tables: f.tables })
        })
        .collect()
}

pub fn family(id: &str) -> Result<Family, FixtureError> {
    families()?.into_iter().find(|f| f.id == id).ok_or_else(|| FixtureError::NoFixture(id.to_string()))
}

/// The family printed for given parameters, compared up to normalization.
pub fn family_for(p: &Params) -> Result<Family, FixtureError> {
    let key = p.with_normalization(Normalization::PaperC);
    families()?.into_iter().find(|f| f.params == key).ok_or_else(|| FixtureError::NoFixture(p.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EntryVerdict {
    Equal,
    /// The printed text is a recorded erratum and the correction matches.
    EqualCorrected { erratum: String },
    Mismatch { diff: String },
    /// The printed text could not be read.
    Unreadable { error: String },
    /// The solver has a nonzero entry the table does not print.
    NotPrinted { computed: String },
}

impl EntryVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, EntryVerdict::Equal | EntryVerdict::EqualCorrected { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryComparison {
    pub key: String,
    pub verdict: EntryVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableComparison {
    pub family: String,
    pub case: TableCase,
    pub mode: (i64, i64),
    pub kernel_dim: usize,
    pub entries: Vec<EntryComparison>,
}

impl TableComparison {
    pub fn all_equal(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_equal())
    }
}

/// Entries of the computed particular solution keyed as in the tables.
fn computed_entries(e: &BesselExpr) -> Vec<(String, YLaurent)> {
    match e {
        BesselExpr::Pure { f } => vec![("f".into(), f.clone())],
        BesselExpr::Single(s) => vec![("0".into(), s.p[0].clone()), ("1".into(), s.p[1].clone())],
        BesselExpr::Double(d) => {
            let d = d.clone().fold();
            let mut out = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    out.push((format!("{i}{j}"), d.q[i][j].clone()));
                }
            }
            out
        }
    }
}

/// Compare one table at one mode.
pub fn compare_mode(fam: &Family, n1: i64, n2: i64, opts: &SolveOptions) -> Result<TableComparison, FixtureError> {
    let (table, vars) = fam.table_for(n1, n2).ok_or_else(|| FixtureError::NoFixture(format!("{} ({n1}, {n2})", fam.id)))?;
    let sol = solve_mode(&fam.params, n1, n2, opts)?;
    let computed = computed_entries(&sol.particular());
    let pre = eval_latex(&table.prefactor, &vars);
    // at |n1| = |n2| the (1,0) entry is folded into (0,1) on both sides
    let folded = n1 != 0 && n2 != 0 && n1.abs() == n2.abs();
    let mut entries = Vec::new();
    for (key, ours) in &computed {
        let printed: Vec<&FixtureEntry> = table
            .entries
            .iter()
            .filter(|e| if folded { (key == "01" && e.key == "10") || (&e.key == key && key != "10") } else { &e.key == key })
            .collect();
        let verdict = match printed.as_slice() {
            [] if ours.is_zero() => continue,
            [] => EntryVerdict::NotPrinted { computed: ours.to_string() },
            parts => judge(parts, &pre, &vars, ours),
        };
        entries.push(EntryComparison { key: key.clone(), verdict });
    }
    for e in &table.entries {
        if !computed.iter().any(|(k, _)| k == &e.key) {
            return Err(FixtureError::Data(format!("{}: unknown key {}", fam.id, e.key)));
        }
    }
    Ok(TableComparison { family: fam.id.clone(), case: table.case, mode: (n1, n2), kernel_dim: sol.kernel_dim, entries })
}

fn printed_value(text: &str, pre: &Result<YLaurent, LatexError>, vars: &Bindings) -> Result<YLaurent, LatexError> {
    let pre = pre.clone()?;
    let v = eval_latex(text, vars)?;
    pre.mul(&v).map_err(|e| LatexError::Value(e.to_string()))
}

/// Sum of the printed parts, using corrections when `corrected` is set.
fn printed_sum(parts: &[&FixtureEntry], pre: &Result<YLaurent, LatexError>, vars: &Bindings, corrected: bool) -> Result<YLaurent, LatexError> {
    let mut acc = YLaurent::zero();
    for e in parts {
        let text = if corrected { e.corrected.as_deref().unwrap_or(&e.printed) } else { &e.printed };
        acc.add_assign(&printed_value(text, pre, vars)?);
    }
    Ok(acc)
}

fn judge(parts: &[&FixtureEntry], pre: &Result<YLaurent, LatexError>, vars: &Bindings, ours: &YLaurent) -> EntryVerdict {
    let first = match printed_sum(parts, pre, vars, false) {
        Ok(v) if &v == ours => return EntryVerdict::Equal,
        Ok(v) => EntryVerdict::Mismatch { diff: ours.sub(&v).to_string() },
        Err(e) => EntryVerdict::Unreadable { error: e.to_string() },
    };
    if parts.iter().any(|e| e.corrected.is_some()) {
        if let Ok(v) = printed_sum(parts, pre, vars, true) {
            if &v == ours {
                let erratum = parts
                    .iter()
                    .filter_map(|e| e.erratum.clone())
                    .collect::<Vec<_>>()
                    .join("; ");
                return EntryVerdict::EqualCorrected { erratum };
            }
        }
    }
    first
}

/// Every table of a family at its test modes.
pub fn compare_family(fam: &Family, opts: &SolveOptions) -> Result<Vec<TableComparison>, FixtureError> {
    let mut out = Vec::new();
    for t in &fam.tables {
        for (n1, n2) in Family::modes(t.case) {
            out.push(compare_mode(fam, n1, n2, opts)?);
        }
    }
    Ok(out)
}
