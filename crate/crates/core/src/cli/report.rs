//! Report documents and their three renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::filt::SpectralSequence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSection {
    /// Which filtered complex the table was read from.
    pub source: String,
    /// `k → [(p, dim)]`.
    pub rows: BTreeMap<i32, Vec<(i32, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageRow {
    pub p: i32,
    pub q: i32,
    pub dim: usize,
    pub d_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PagesSection {
    pub source: String,
    /// `r → nonzero entries of E^r`.
    pub pages: BTreeMap<usize, Vec<PageRow>>,
}

impl PagesSection {
    pub fn from_sequence(source: String, ss: &SpectralSequence, first: usize) -> Self {
        let pages = ss
            .pages
            .iter()
            .filter(|pg| pg.r >= first && pg.r <= ss.stable_page.max(first))
            .map(|pg| {
                let rows = pg
                    .entries
                    .iter()
                    .filter(|(_, e)| e.dim > 0 || e.d_rank > 0)
                    .map(|(&(p, q), e)| PageRow { p, q, dim: e.dim, d_rank: e.d_rank })
                    .collect();
                (pg.r, rows)
            })
            .collect();
        PagesSection { source, pages }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), pass, detail: detail.into() }
    }

    /// Passes when `failures` is empty; lists them otherwise.
    pub fn empty<T: std::fmt::Debug>(name: &str, failures: &[T]) -> Self {
        let detail = if failures.is_empty() { String::new() } else { format!("{failures:?}") };
        Check::new(name, failures.is_empty(), detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubjectReport {
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight_table: Option<TableSection>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub other_tables: BTreeMap<String, TableSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pages: Option<PagesSection>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub lines: Vec<String>,
}

impl SubjectReport {
    pub fn new(subject: &str) -> Self {
        SubjectReport { subject: subject.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub subjects: Vec<SubjectReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.subjects.iter().all(SubjectReport::passed)
    }

    pub fn render(&self, format: super::Format) -> String {
        match format {
            super::Format::Structured => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            super::Format::Table => self.table(),
            super::Format::Csv => self.csv(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for s in &self.subjects {
            let _ = writeln!(out, "== {} ({}) ==", s.subject, self.command);
            let tables = s.weight_table.iter().map(|t| ("weight_table", t)).chain(s.other_tables.iter().map(|(n, t)| (n.as_str(), t)));
            for (name, t) in tables {
                let _ = writeln!(out, "{name}: {}", t.source);
                let ps: Vec<i32> = t.rows.values().next().map(|r| r.iter().map(|&(p, _)| p).collect()).unwrap_or_default();
                let mut header = format!("{:>4}", "k");
                for p in &ps {
                    let _ = write!(header, " {:>5}", format!("p={p}"));
                }
                let _ = writeln!(out, "{header}");
                for (k, row) in &t.rows {
                    let mut line = format!("{k:>4}");
                    for (_, d) in row {
                        let _ = write!(line, " {d:>5}");
                    }
                    let _ = writeln!(out, "{line}");
                }
            }
            if let Some(pg) = &s.pages {
                let _ = writeln!(out, "pages: {}", pg.source);
                for (r, rows) in &pg.pages {
                    let cells: Vec<String> = rows.iter().map(|e| format!("({},{}) {}/{}", e.p, e.q, e.dim, e.d_rank)).collect();
                    let _ = writeln!(out, "  r={r}: {}", cells.join("  "));
                }
            }
            for l in &s.lines {
                let _ = writeln!(out, "{l}");
            }
            for c in &s.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    let _ = writeln!(out, "{mark} {}", c.name);
                } else {
                    let _ = writeln!(out, "{mark} {}: {}", c.name, c.detail);
                }
            }
        }
        out
    }

    fn csv(&self) -> String {
        fn quote(s: &str) -> String {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        }
        let mut out = String::from("subject,section,k_or_r,p,q,dim,d_rank,check,pass,detail\n");
        for s in &self.subjects {
            let subj = quote(&s.subject);
            let tables = s.weight_table.iter().map(|t| ("weight_table", t)).chain(s.other_tables.iter().map(|(n, t)| (n.as_str(), t)));
            for (name, t) in tables {
                for (k, row) in &t.rows {
                    for (p, d) in row {
                        let _ = writeln!(out, "{subj},{},{k},{p},,{d},,,,", quote(name));
                    }
                }
            }
            if let Some(pg) = &s.pages {
                for (r, rows) in &pg.pages {
                    for e in rows {
                        let _ = writeln!(out, "{subj},pages,{r},{},{},{},{},,,", e.p, e.q, e.dim, e.d_rank);
                    }
                }
            }
            for l in &s.lines {
                let _ = writeln!(out, "{subj},lines,,,,,,,,{}", quote(l));
            }
            for c in &s.checks {
                let _ = writeln!(out, "{subj},checks,,,,,,{},{},{}", quote(&c.name), c.pass, quote(&c.detail));
            }
        }
        out
    }
}
