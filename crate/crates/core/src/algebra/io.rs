//! JSON algebra files.
//!
//! ```json
//! {
//!   "name": "chain2",
//!   "size": 2,
//!   "elements": ["0", "1"],
//!   "operations": { "meet": { "arity": 2, "table": [0, 0, 0, 1] } },
//!   "relations": { "le": { "arity": 2, "tuples": [[0, 0], [0, 1], [1, 1]] } }
//! }
//! ```
//!
//! Symbols keep the order in which they appear in the file.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{FiniteStructure, Signature, Symbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpEntry {
    pub arity: usize,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelEntry {
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default)]
    pub operations: IndexMap<String, OpEntry>,
    #[serde(default)]
    pub relations: IndexMap<String, RelEntry>,
}

impl AlgebraFile {
    pub fn into_structure(self) -> Result<FiniteStructure> {
        if self.size == 0 {
            return Err(Error::InvalidStructure(format!("{}: size must be positive", self.name)));
        }
        let ops: Vec<Symbol> = self
            .operations
            .iter()
            .map(|(n, e)| Symbol::new(n.clone(), e.arity))
            .collect();
        let rels: Vec<Symbol> = self
            .relations
            .iter()
            .map(|(n, e)| Symbol::new(n.clone(), e.arity))
            .collect();
        let sig = Signature::new(ops, rels)?;
        let tables = self.operations.iter().map(|(_, e)| e.table.clone()).collect();
        let tuples = self.relations.iter().map(|(_, e)| e.tuples.clone()).collect();
        let s = FiniteStructure::new(self.name, sig, self.size, tables, tuples)?;
        match self.elements {
            Some(names) => s.with_names(names),
            None => Ok(s),
        }
    }

    pub fn from_structure(s: &FiniteStructure) -> Self {
        let sig = s.signature();
        AlgebraFile {
            name: s.name().to_string(),
            size: s.size(),
            elements: s.element_names().map(|n| n.to_vec()),
            operations: sig
                .ops()
                .iter()
                .enumerate()
                .map(|(i, sym)| {
                    (
                        sym.name.clone(),
                        OpEntry {
                            arity: sym.arity,
                            table: s.op_table(i).to_vec(),
                        },
                    )
                })
                .collect(),
            relations: sig
                .rels()
                .iter()
                .enumerate()
                .map(|(i, sym)| {
                    (
                        sym.name.clone(),
                        RelEntry {
                            arity: sym.arity,
                            tuples: s.relation(i).tuples().to_vec(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Parses an algebra file. Syntax errors carry line and column.
pub fn from_json(text: &str) -> Result<FiniteStructure> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })?;
    file.into_structure()
}

pub fn to_json(s: &FiniteStructure) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_structure(s)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{demorgan_m, stone3};

    #[test]
    fn round_trip_builtins() {
        for s in [stone3(), demorgan_m()] {
            let back = from_json(&to_json(&s)).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn order_preserved() {
        let text = r#"{"name":"t","size":2,"operations":{"z":{"arity":0,"table":[0]},"a":{"arity":1,"table":[1,0]}}}"#;
        let s = from_json(text).unwrap();
        let names: Vec<&str> = s.signature().ops().iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["z", "a"]);
    }

    #[test]
    fn malformed_reports_position() {
        let err = from_json("{\n  \"name\": \"x\",\n  \"size\": }").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(from_json(r#"{"name":"x","size":0}"#).is_err());
    }

    #[test]
    fn relations_load() {
        let text = r#"{"name":"c","size":2,"relations":{"le":{"arity":2,"tuples":[[0,0],[0,1],[1,1]]}}}"#;
        let s = from_json(text).unwrap();
        assert!(s.holds(0, &[0, 1]));
        assert!(!s.holds(0, &[1, 0]));
    }
}
