//! Report schema shared by the text and JSON writers.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub field: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub front: Option<FrontSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dga: Option<DgaSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub augmentations: Option<AugSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chds: Option<Vec<ChdEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sheaf: Option<SheafSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verify: Option<Vec<VerifyEntry>>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticEntry {
    pub cell: String,
    pub rule: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontSection {
    pub name: String,
    pub cells: usize,
    pub sheets: Vec<String>,
    pub cusps: Vec<String>,
    pub diagnostics: Vec<DiagnosticEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub id: String,
    pub upper: String,
    pub lower: String,
    pub degree: i64,
    pub differential: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaSection {
    pub generators: Vec<GeneratorEntry>,
    pub d_squared_zero: bool,
    pub d_squared_failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugSection {
    pub degree_zero: Vec<String>,
    pub count: usize,
    /// Values on the degree-0 generators, in `degree_zero` order.
    pub table: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChdEntry {
    pub augmentation: usize,
    pub maps: BTreeMap<String, Vec<Vec<u32>>>,
    pub diagnostics: Vec<DiagnosticEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumEntry {
    pub id: usize,
    pub handle: String,
    pub slot: String,
    #[serde(rename = "type")]
    pub tag: String,
    pub lambda_f: i8,
    pub dim: usize,
    pub covers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafSummary {
    pub augmentation: usize,
    /// Dimension of `F(C)(s)` by stratum id.
    pub complex_dims: Vec<usize>,
    pub total_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafSection {
    pub handle_cells: usize,
    pub strata: Vec<StratumEntry>,
    pub edges: usize,
    pub crossing_squares: usize,
    pub top_squares: usize,
    pub summaries: Vec<SheafSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub augmentation: usize,
    pub checks: Vec<CheckEntry>,
    /// Microlocal rank by Legendrian 2-stratum id.
    pub microlocal_ranks: BTreeMap<usize, usize>,
    pub passed: bool,
}

fn diagnostics(out: &mut String, ds: &[DiagnosticEntry]) {
    for d in ds {
        let _ = writeln!(out, "  [{}] {}: {}", d.rule, d.cell, d.message);
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.input);
        let _ = writeln!(out, "field: GF({})", self.field);
        if let Some(f) = &self.front {
            let _ = writeln!(out, "\n== front {} ==", f.name);
            let _ = writeln!(out, "cells: {}", f.cells);
            let _ = writeln!(out, "sheets: {}", f.sheets.join(" "));
            let _ = writeln!(out, "cusps: {}", f.cusps.join(" "));
            let _ = writeln!(out, "diagnostics: {}", f.diagnostics.len());
            diagnostics(&mut out, &f.diagnostics);
        }
        if let Some(d) = &self.dga {
            let _ = writeln!(out, "\n== dga ==");
            let _ = writeln!(out, "generators: {}", d.generators.len());
            for g in &d.generators {
                let _ = writeln!(
                    out,
                    "  {} |{}| ({} > {})  d = {}",
                    g.id, g.degree, g.upper, g.lower, g.differential
                );
            }
            let _ = writeln!(out, "d^2 = 0: {}", d.d_squared_zero);
            for g in &d.d_squared_failures {
                let _ = writeln!(out, "  fails on {g}");
            }
        }
        if let Some(a) = &self.augmentations {
            let _ = writeln!(out, "\n== augmentations ==");
            let _ = writeln!(out, "degree 0: {}", a.degree_zero.join(" "));
            let _ = writeln!(out, "count: {}", a.count);
            for (i, row) in a.table.iter().enumerate() {
                let vals: Vec<String> = row.iter().map(u32::to_string).collect();
                let _ = writeln!(out, "  #{i}: {}", vals.join(" "));
            }
        }
        if let Some(cs) = &self.chds {
            let _ = writeln!(out, "\n== chain homotopy diagrams ==");
            for c in cs {
                let verdict = if c.diagnostics.is_empty() {
                    "valid"
                } else {
                    "INVALID"
                };
                let _ = writeln!(out, "#{}: {verdict}", c.augmentation);
                for (cell, m) in &c.maps {
                    let rows: Vec<String> = m
                        .iter()
                        .map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
                        .collect();
                    let _ = writeln!(out, "  c({cell}) = [{}]", rows.join("; "));
                }
                diagnostics(&mut out, &c.diagnostics);
            }
        }
        if let Some(s) = &self.sheaf {
            let _ = writeln!(out, "\n== stratification ==");
            let _ = writeln!(out, "handle cells: {}", s.handle_cells);
            let _ = writeln!(
                out,
                "strata: {}  relations: {}  crossing squares: {}  top squares: {}",
                s.strata.len(),
                s.edges,
                s.crossing_squares,
                s.top_squares
            );
            for st in &s.strata {
                let covers: Vec<String> = st.covers.iter().map(usize::to_string).collect();
                let _ = writeln!(
                    out,
                    "  {} {} slot=\"{}\" k={} type={} dim={} covers<[{}]",
                    st.id,
                    st.handle,
                    st.slot,
                    st.lambda_f,
                    st.tag,
                    st.dim,
                    covers.join(",")
                );
            }
            for sm in &s.summaries {
                let nonzero = sm.complex_dims.iter().filter(|&&d| d > 0).count();
                let _ = writeln!(
                    out,
                    "sheaf #{}: {} nonzero stalks, total dimension {}",
                    sm.augmentation, nonzero, sm.total_dim
                );
            }
        }
        if let Some(vs) = &self.verify {
            let _ = writeln!(out, "\n== verification ==");
            for v in vs {
                let _ = writeln!(
                    out,
                    "#{}: {}",
                    v.augmentation,
                    if v.passed { "PASS" } else { "FAIL" }
                );
                for c in &v.checks {
                    let verdict = if c.failures.is_empty() {
                        "ok"
                    } else {
                        "FAILED"
                    };
                    let _ = writeln!(
                        out,
                        "  {}: {} checked, {} failed [{verdict}]",
                        c.name,
                        c.checked,
                        c.failures.len()
                    );
                    for f in &c.failures {
                        let _ = writeln!(out, "    {f}");
                    }
                }
                let ones = v.microlocal_ranks.values().filter(|&&r| r == 1).count();
                let _ = writeln!(
                    out,
                    "  microlocal rank 1: {ones} of {}",
                    v.microlocal_ranks.len()
                );
                for (s, r) in v.microlocal_ranks.iter().filter(|(_, &r)| r != 1) {
                    let _ = writeln!(out, "    stratum {s}: rank {r}");
                }
            }
        }
        let _ = writeln!(
            out,
            "\nresult: {}",
            if self.passed { "PASS" } else { "FAIL" }
        );
        out
    }
}
