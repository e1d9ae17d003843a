//! Parameter bindings: named rationals and mode-indexed tables.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{KernelError, Result};
use crate::rational::{format_q, Q};

/// A table `index -> value` with symmetric lookup `t[-m] = t[m]`.
///
/// Index 0 resolves to an explicit entry when one is given and to 0
/// otherwise; the default never applies to index 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexedTable {
    pub entries: BTreeMap<u64, Q>,
    pub default: Option<Q>,
}

impl IndexedTable {
    pub fn constant(value: Q) -> Self {
        IndexedTable { entries: BTreeMap::new(), default: Some(value) }
    }

    pub fn from_entries<I: IntoIterator<Item = (i64, Q)>>(entries: I) -> Self {
        IndexedTable {
            entries: entries.into_iter().map(|(k, v)| (k.unsigned_abs(), v)).collect(),
            default: None,
        }
    }

    pub fn get(&self, index: i64) -> Option<Q> {
        let key = index.unsigned_abs();
        if let Some(v) = self.entries.get(&key) {
            return Some(v.clone());
        }
        if key == 0 {
            return Some(Q::zero());
        }
        self.default.clone()
    }

    pub fn contains(&self, index: i64) -> bool {
        self.get(index).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Scalar(Q),
    Indexed(IndexedTable),
}

impl ParamValue {
    pub fn describe(&self) -> String {
        match self {
            ParamValue::Scalar(v) => format_q(v),
            ParamValue::Indexed(t) => {
                let mut parts: Vec<String> =
                    t.entries.iter().map(|(k, v)| format!("{k}: {}", format_q(v))).collect();
                if let Some(d) = &t.default {
                    parts.push(format!("default: {}", format_q(d)));
                }
                format!("indexed {{ {} }}", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    pub fn set_scalar(&mut self, name: &str, value: Q) {
        self.values.insert(name.to_string(), ParamValue::Scalar(value));
    }

    pub fn set_indexed(&mut self, name: &str, table: IndexedTable) {
        self.values.insert(name.to_string(), ParamValue::Indexed(table));
    }

    pub fn set(&mut self, name: &str, value: ParamValue) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.values.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamValue)> {
        self.values.iter()
    }

    pub fn scalar(&self, name: &str) -> Result<Q> {
        match self.values.get(name) {
            Some(ParamValue::Scalar(v)) => Ok(v.clone()),
            Some(ParamValue::Indexed(_)) => Err(KernelError::IndexedWithoutIndex(name.to_string())),
            None => Err(KernelError::UnboundParameter(name.to_string())),
        }
    }

    pub fn indexed(&self, name: &str, index: i64) -> Result<Q> {
        match self.values.get(name) {
            Some(ParamValue::Indexed(t)) => t
                .get(index)
                .ok_or_else(|| KernelError::MissingIndexedEntry { name: name.to_string(), index }),
            Some(ParamValue::Scalar(_)) => Err(KernelError::ScalarIndexed(name.to_string())),
            None => Err(KernelError::UnboundParameter(name.to_string())),
        }
    }
}
