//! Absolute constants hidden in the rate bounds, with their provenance.
//!
//! File format: one `name=value` per line. A `#` comment line directly above an entry, or
//! trailing it on the same line, is kept as that entry's provenance.

use crate::error::{Error, Result};
use crate::numeric::fmt17;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

const DEFAULTS: &[(&str, f64, &str)] = &[
    ("c_kr", 1.0, "Kolmogorov-Rogozin concentration bound"),
    ("c_int", 1.0, "integral concentration bound"),
    ("c_11", 1.0, "atomic-case rate"),
    ("c_113", 1.0, "unconditional continuous-case rate"),
    ("c_116", 1.0, "level-set rate"),
    ("c_tk", 1.0, "Turan-Kubilius small-tau bound"),
    ("c_24", 1.0, "second mean-value condition"),
    ("c_25", 1.0, "third mean-value condition"),
    ("c_26", 1.0, "mean-value error term"),
    ("c_thm12_second", 1.0, "second parameter constraint of the continuous-case rate"),
    ("c_115", 1.0, "last level-set parameter constraint"),
    ("c_pik", 1.0, "level-set count tolerance"),
    ("c0", 0.05, "upper limit for v"),
    ("c1", 130.0, "exponent in w = v^c1"),
    ("kappa", 0.25, "admissible range kappa <= r <= 1/kappa"),
    ("remark_c", 1.0, "c in R = exp(c (log x)^(1/16))"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Constant {
    pub value: f64,
    pub provenance: String,
}

/// Named constants, all present with defaults unless overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsLedger {
    entries: BTreeMap<String, Constant>,
}

impl Default for ConstantsLedger {
    fn default() -> Self {
        let entries = DEFAULTS
            .iter()
            .map(|&(n, v, p)| (n.to_string(), Constant { value: v, provenance: format!("default; {p}") }))
            .collect();
        Self { entries }
    }
}

impl ConstantsLedger {
    pub fn get(&self, name: &str) -> f64 {
        self.entries.get(name).map(|c| c.value).unwrap_or_else(|| panic!("unknown constant {name}"))
    }

    pub fn entry(&self, name: &str) -> Option<&Constant> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Sets a known constant; unknown names are rejected.
    pub fn set(&mut self, name: &str, value: f64, provenance: &str) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Parse(format!("constant {name} must be positive and finite, got {value}")));
        }
        match self.entries.get_mut(name) {
            Some(c) => {
                c.value = value;
                c.provenance = provenance.to_string();
                Ok(())
            }
            None => Err(Error::Parse(format!("unknown constant '{name}'"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut ledger = Self::default();
        let mut pending: Option<String> = None;
        let mut seen = std::collections::BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                pending = None;
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                pending = Some(c.trim().to_string());
                continue;
            }
            let (body, trailing) = match line.split_once('#') {
                Some((b, c)) => (b.trim(), Some(c.trim().to_string())),
                None => (line, None),
            };
            let (name, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected name=value, got '{body}'", lineno + 1)))?;
            let name = name.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number '{}'", lineno + 1, value.trim())))?;
            if !seen.insert(name.to_string()) {
                return Err(Error::Parse(format!("line {}: duplicate constant '{name}'", lineno + 1)));
            }
            let provenance = trailing.or(pending.take()).unwrap_or_else(|| "set in ledger file".to_string());
            ledger.set(name, value, &provenance)?;
        }
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for ConstantsLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, c) in &self.entries {
            writeln!(f, "# {}", c.provenance)?;
            writeln!(f, "{name}={}", fmt17(c.value))?;
        }
        Ok(())
    }
}
