//! Structured pass/fail reports with witness terms.

use serde::{Deserialize, Serialize};

/// Witnesses kept per clause; the count of all failures is recorded separately.
pub const MAX_WITNESSES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub id: String,
    pub passed: bool,
    pub failures: usize,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub clauses: Vec<Clause>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            clauses: Vec::new(),
        }
    }

    /// Adds a clause from its list of failure witnesses (empty = pass).
    pub fn clause(&mut self, id: impl Into<String>, failures: Vec<String>) -> &mut Self {
        let n = failures.len();
        self.clauses.push(Clause {
            id: id.into(),
            passed: n == 0,
            failures: n,
            witnesses: failures.into_iter().take(MAX_WITNESSES).collect(),
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.clauses
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Appends the clauses of another report, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut c in other.clauses {
            c.id = format!("{prefix}.{}", c.id);
            self.clauses.push(c);
        }
    }
}
