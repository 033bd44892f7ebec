//! Designated relations or function tuples whose definability is asked about.

use serde::{Deserialize, Serialize};

use crate::algebra::{tuples, FiniteStructure, Signature};
use crate::error::{Error, Result};
use crate::term::var_name;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Relation(String),
    /// Operation symbols of a common arity `n`, read as the relation
    /// `f_1(x̄) = z_1 ∧ ... ∧ f_m(x̄) = z_m`.
    Functions(Vec<String>),
}

impl Target {
    pub fn relation(name: &str) -> Target {
        Target::Relation(name.to_string())
    }

    pub fn function(name: &str) -> Target {
        Target::Functions(vec![name.to_string()])
    }

    pub fn symbols(&self) -> Vec<&str> {
        match self {
            Target::Relation(r) => vec![r.as_str()],
            Target::Functions(fs) => fs.iter().map(String::as_str).collect(),
        }
    }

    /// `(n, m)`: argument count and number of function values (0 for relations).
    pub fn shape(&self, sig: &Signature) -> Result<(usize, usize)> {
        match self {
            Target::Relation(r) => {
                let i = sig.rel_index(r).ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
                Ok((sig.rels()[i].arity, 0))
            }
            Target::Functions(fs) => {
                if fs.is_empty() {
                    return Err(Error::Query("empty function target".into()));
                }
                let mut n = None;
                for f in fs {
                    let i = sig.op_index(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                    let a = sig.ops()[i].arity;
                    if *n.get_or_insert(a) != a {
                        return Err(Error::Query("target functions must share one arity".into()));
                    }
                }
                Ok((n.unwrap(), fs.len()))
            }
        }
    }

    /// Arity of the target relation (graph arity `n + m` for functions).
    pub fn arity(&self, sig: &Signature) -> Result<usize> {
        self.shape(sig).map(|(n, m)| n + m)
    }

    /// Free-variable names used by formulas defining this target.
    pub fn var_names(&self, sig: &Signature) -> Result<Vec<String>> {
        let (n, m) = self.shape(sig)?;
        Ok(match self {
            Target::Relation(_) => (0..n).map(|i| var_name("x", i)).collect(),
            Target::Functions(_) => (0..n)
                .map(|i| var_name("x", i))
                .chain((0..m).map(|i| var_name("z", i)))
                .collect(),
        })
    }

    /// Membership of every tuple of `a^arity`, indexed row-major.
    pub fn extension(&self, a: &FiniteStructure) -> Result<Vec<bool>> {
        let sig = a.signature();
        let (n, m) = self.shape(sig)?;
        match self {
            Target::Relation(r) => {
                let rel = a.relation(sig.rel_index(r).unwrap());
                Ok(tuples(a.size(), n).map(|t| rel.contains(&t)).collect())
            }
            Target::Functions(fs) => {
                let ops: Vec<usize> = fs.iter().map(|f| sig.op_index(f).unwrap()).collect();
                Ok(tuples(a.size(), n + m)
                    .map(|t| ops.iter().enumerate().all(|(j, &op)| a.apply(op, &t[..n]) == t[n + j]))
                    .collect())
            }
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Relation(r) => write!(f, "relation {r}"),
            Target::Functions(fs) => write!(f, "function {}", fs.join(",")),
        }
    }
}
