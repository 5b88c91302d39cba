use serde::{Deserialize, Serialize};

/// How much a passing report proves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rigor {
    /// Decided as a polynomial identity in a finite basis.
    ExactBasis,
    /// Checked on q-expansions up to a finite precision only.
    Truncated,
    /// Integer / floating-point comparison of closed formulas.
    Arithmetic,
}

/// Pass/fail evidence for one family of checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub family: String,
    pub params: Vec<(String, String)>,
    pub n_range: (u64, u64),
    pub checked: u64,
    pub failures: Vec<u64>,
    pub precision: Option<usize>,
    pub rigor: Rigor,
    pub notes: Vec<String>,
}

impl CongruenceReport {
    pub fn new(family: impl Into<String>, rigor: Rigor) -> Self {
        CongruenceReport {
            family: family.into(),
            params: Vec::new(),
            n_range: (0, 0),
            checked: 0,
            failures: Vec::new(),
            precision: None,
            rigor,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Record one checked instance.
    pub fn record(&mut self, n: u64, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(n);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn summary(&self) -> String {
        format!(
            "{} [{:?}] {}: checked {}, failures {}{}",
            self.family,
            self.rigor,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checked,
            self.failures.len(),
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(" (first {:?})", &self.failures[..self.failures.len().min(5)])
            }
        )
    }
}
