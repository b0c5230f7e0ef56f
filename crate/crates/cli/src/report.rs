//! Structured command reports. The JSON form is the machine output; the text
//! renderer is a plain view of the same data and contains no check logic.
//! All maps are ordered so serialization is deterministic.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
    pub checks: Vec<Check>,
    pub dimensions: BTreeMap<String, usize>,
    pub witnesses: BTreeMap<String, Vec<String>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Report {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            seed,
            degree_bound: None,
            checks: Vec::new(),
            dimensions: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            residual: None,
        });
    }

    pub fn check_residual(&mut self, name: &str, pass: bool, residual: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            residual: if pass { None } else { residual },
        });
    }

    pub fn dim(&mut self, key: &str, value: usize) {
        self.dimensions.insert(key.to_string(), value);
    }

    pub fn witness(&mut self, key: &str, values: Vec<String>) {
        self.witnesses.insert(key.to_string(), values);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (k, v) in &self.inputs {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        out.push_str(&format!("  seed: {}\n", self.seed));
        if let Some(b) = self.degree_bound {
            out.push_str(&format!("  degree bound: {b}\n"));
        }
        if !self.dimensions.is_empty() {
            out.push_str("dimensions:\n");
            for (k, v) in &self.dimensions {
                out.push_str(&format!("  {k} = {v}\n"));
            }
        }
        if !self.witnesses.is_empty() {
            out.push_str("witnesses:\n");
            for (k, vs) in &self.witnesses {
                out.push_str(&format!("  {k}:\n"));
                for v in vs {
                    out.push_str(&format!("    {v}\n"));
                }
            }
        }
        out.push_str("checks:\n");
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{mark}] {}\n", c.name));
            if let Some(r) = &c.residual {
                out.push_str(&format!("         residual: {r}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!(
            "result: {}\n",
            if self.all_pass() { "pass" } else { "fail" }
        ));
        out
    }
}
