//! Printed reference data: the component tables and the classification claims,
//! loaded from the bundled TOML files, and the comparison of every printed
//! table entry against recomputation.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::classify::Structure;
use crate::connection::{ConnectionKind, DerivedConstants};
use crate::liealg::{Eta, Family, FrameVector, LieAlgebra};
use crate::poly::{Polynomial, Style};
use crate::tensorcalc::{entry_label, Entry, Geometry, ObjectKind};

const TABLES: &str = include_str!("../data/tables.toml");
const CLAIMS: &str = include_str!("../data/claims.toml");

/// One printed table.
#[derive(Clone, Debug, Deserialize)]
pub struct TableBlock {
    pub family: Family,
    pub connection: ConnectionKind,
    pub object: ObjectKind,
    pub entries: Vec<TableEntry>,
}

/// One printed entry; `at` uses 1-based digits or letters ranging over 1..3.
#[derive(Clone, Debug, Deserialize)]
pub struct TableEntry {
    pub at: String,
    #[serde(default)]
    pub value: Option<PrintedValue>,
    pub printed: String,
}

/// Printed right-hand side translated to the parser syntax.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PrintedValue {
    Scalar(String),
    Vector([String; 3]),
}

#[derive(Deserialize)]
struct TableFile {
    table: Vec<TableBlock>,
}

/// Kind of printed classification claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Always,
    Never,
    Families,
}

/// One printed classification theorem.
#[derive(Clone, Debug, Deserialize)]
pub struct CaseClaim {
    pub family: Family,
    pub connection: ConnectionKind,
    pub structure: Structure,
    pub statement: String,
    pub claim: ClaimKind,
    #[serde(default)]
    pub families: Vec<String>,
    #[serde(default)]
    pub printed_system: Vec<String>,
    #[serde(default)]
    pub garbled: bool,
}

#[derive(Deserialize)]
struct ClaimFile {
    case: Vec<CaseClaim>,
}

/// All printed tables in file order.
pub fn tables() -> &'static [TableBlock] {
    static CELL: OnceLock<Vec<TableBlock>> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str::<TableFile>(TABLES).expect("bundled tables parse").table)
}

/// All printed claims in file order.
pub fn claims() -> &'static [CaseClaim] {
    static CELL: OnceLock<Vec<CaseClaim>> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str::<ClaimFile>(CLAIMS).expect("bundled claims parse").case)
}

/// The claim for one case.
pub fn claim_for(family: Family, connection: ConnectionKind, structure: Structure) -> Option<&'static CaseClaim> {
    claims().iter().find(|c| c.family == family && c.connection == connection && c.structure == structure)
}

/// Expands an `at` pattern into zero-based index tuples. Each distinct
/// letter ranges independently over 0..3.
pub fn expand_indices(at: &str) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut letters: BTreeMap<char, usize> = BTreeMap::new();
    let tokens: Vec<&str> = at.split_whitespace().collect();
    for t in &tokens {
        if let Some(c) = t.chars().next().filter(|c| c.is_alphabetic()) {
            let n = letters.len();
            letters.entry(c).or_insert(n);
        }
    }
    for t in tokens {
        let next: Vec<Vec<usize>> = match t.parse::<usize>() {
            Ok(d) => out
                .into_iter()
                .map(|mut v| {
                    v.push(d - 1);
                    v
                })
                .collect(),
            Err(_) => out
                .into_iter()
                .flat_map(|v| {
                    (0..3).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect(),
        };
        out = next;
    }
    out
}

/// Parses a printed value against the bindings of a sign branch.
pub fn parse_printed(value: &PrintedValue, eta: Option<Eta>) -> Option<Entry> {
    let b = DerivedConstants::bindings(eta);
    let p = |s: &str| Polynomial::parse_with(s, &b).ok();
    match value {
        PrintedValue::Scalar(s) => p(s).map(Entry::Scalar),
        PrintedValue::Vector([x, y, z]) => Some(Entry::Vector(FrameVector::new(p(x)?, p(y)?, p(z)?))),
    }
}

/// A printed table entry that disagrees with recomputation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableMismatch {
    pub family: Family,
    pub eta: Option<Eta>,
    pub connection: ConnectionKind,
    pub object: ObjectKind,
    /// 1-based indices.
    pub at: Vec<usize>,
    pub printed: String,
    /// Printed value in parser syntax, absent when it could not be read.
    pub printed_value: Option<String>,
    pub recomputed: String,
}

impl TableMismatch {
    /// Descriptive location such as `G3 bott connection, nabla^B_e1 e3`.
    pub fn location(&self) -> String {
        let eta = self.eta.map(|e| format!(" (eta={e})")).unwrap_or_default();
        let zero: Vec<usize> = self.at.iter().map(|i| i - 1).collect();
        format!(
            "{}{eta} {} {}, {}",
            self.family,
            self.connection,
            self.object,
            entry_label(self.object, self.connection, &zero, Style::Ascii)
        )
    }
}

/// Result of comparing every printed table entry.
#[derive(Clone, Debug, Default)]
pub struct TableComparison {
    /// Number of (entry, index, sign) comparisons performed.
    pub compared: usize,
    /// Number that agreed exactly.
    pub matched: usize,
    /// Mismatches and unreadable entries in file order.
    pub mismatches: Vec<TableMismatch>,
}

/// Compares every printed entry of every table, for each sign branch of G4.
pub fn compare_tables() -> TableComparison {
    let mut cache: BTreeMap<(Family, Option<Eta>, ConnectionKind), Geometry> = BTreeMap::new();
    let mut out = TableComparison::default();
    for block in tables() {
        for eta in block.family.eta_branches() {
            let geo = cache.entry((block.family, eta, block.connection)).or_insert_with(|| {
                let l = LieAlgebra::make_group(block.family, eta, None).expect("valid family");
                Geometry::compute(block.connection, &l)
            });
            for entry in &block.entries {
                let printed = entry.value.as_ref().and_then(|v| parse_printed(v, eta));
                for at in expand_indices(&entry.at) {
                    out.compared += 1;
                    let recomputed = geo.entry(block.object, &at);
                    if printed.as_ref() == Some(&recomputed) {
                        out.matched += 1;
                        continue;
                    }
                    out.mismatches.push(TableMismatch {
                        family: block.family,
                        eta,
                        connection: block.connection,
                        object: block.object,
                        at: at.iter().map(|i| i + 1).collect(),
                        printed: entry.printed.clone(),
                        printed_value: printed.as_ref().map(|p| p.render(Style::Ascii)),
                        recomputed: recomputed.render(Style::Ascii),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_files_load() {
        assert_eq!(tables().len(), 97);
        assert_eq!(claims().len(), 42);
        for f in Family::ALL {
            for k in ConnectionKind::AUDITED {
                for s in [Structure::Codazzi, Structure::Quasistat] {
                    assert!(claim_for(f, k, s).is_some(), "{f} {k} {s:?}");
                }
            }
        }
    }

    #[test]
    fn index_expansion() {
        assert_eq!(expand_indices("1 2"), vec![vec![0, 1]]);
        assert_eq!(expand_indices("1 2 j").len(), 3);
        assert_eq!(expand_indices("i j k").len(), 27);
        assert_eq!(expand_indices("i j")[4], vec![1, 1]);
    }

    #[test]
    fn printed_values_use_bindings() {
        let v = PrintedValue::Scalar("n3*(b-n3)/2".into());
        let Some(Entry::Scalar(p)) = parse_printed(&v, Some(Eta::Plus)) else { panic!() };
        assert_eq!(p, Polynomial::parse("(a/2+1)*(b-a/2-1)/2").unwrap());
        assert!(parse_printed(&v, None).is_none());
    }

    #[test]
    fn g1_bott_connection_table_matches() {
        let cmp = compare_tables();
        assert!(cmp.matched > 0);
        assert!(!cmp.mismatches.iter().any(|m| m.family == Family::G1
            && m.connection == ConnectionKind::Bott
            && m.object == ObjectKind::Connection));
    }
}
