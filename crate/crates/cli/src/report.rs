//! The analysis report: one serializable structure rendered either as the
//! plain-text report or as JSON.
//!
//! The rendered stdout payload is deterministic: fixed orderings, canonical
//! scalar strings, no timestamps. Timing is measured by the CLI but kept out
//! of the comparable payload (it goes to stderr), so `timing_ms` is absent
//! from emitted reports.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub mechanism: String,
    pub links: usize,
    pub turning_pairs: usize,
    pub gear_meshes: usize,
    pub dof: usize,
    pub rank: usize,
    pub inputs: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_matrices: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matroid: Option<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tt: Option<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verify: Option<VerifySection>,
    /// Present iff both methods ran.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    /// Per-mesh legend: ratio symbol, its value, carrier and sign where the
    /// method defines them.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ratios: Vec<RatioLine>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symbolic: Option<LabeledMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numeric: Option<LabeledMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLine {
    pub mesh: u32,
    pub symbol: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub carrier: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sign: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    /// Symbol values used for the numeric cross-check.
    pub bindings: Vec<BindingLine>,
    pub checks: Vec<CheckLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingLine {
    pub symbol: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictReport {
    Matched,
    Mismatched {
        left_method: String,
        right_method: String,
        output: String,
        input: String,
        left_value: String,
        right_value: String,
    },
}

impl AnalysisReport {
    pub fn matched(&self) -> Option<bool> {
        self.verdict.as_ref().map(|v| matches!(v, VerdictReport::Matched))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };
        push(&mut out, &format!("mechanism: {}", self.mechanism));
        push(
            &mut out,
            &format!(
                "links: {}  turning pairs: {}  gear meshes: {}",
                self.links, self.turning_pairs, self.gear_meshes
            ),
        );
        push(
            &mut out,
            &format!(
                "degrees of freedom: {}  (t = {}, rank r = {})",
                self.dof, self.turning_pairs, self.rank
            ),
        );
        let inputs: Vec<String> = self.inputs.iter().map(|j| format!("j{j}")).collect();
        push(&mut out, &format!("inputs: {}", inputs.join(" ")));

        if let Some(section) = &self.matroid {
            render_method(&mut out, "matroid", section);
        }
        if let Some(section) = &self.tt {
            render_method(&mut out, "tt", section);
        }
        if let Some(verify) = &self.verify {
            out.push('\n');
            let bindings: Vec<String> = verify
                .bindings
                .iter()
                .map(|b| format!("{}={}", b.symbol, b.value))
                .collect();
            if !bindings.is_empty() {
                push(
                    &mut out,
                    &format!("verify bindings: {}", bindings.join(" ")),
                );
            }
            for check in &verify.checks {
                let status = if check.ok { "ok" } else { "MISMATCH" };
                match &check.detail {
                    Some(d) => push(&mut out, &format!("verify: {}: {status} ({d})", check.name)),
                    None => push(&mut out, &format!("verify: {}: {status}", check.name)),
                }
            }
        }
        if let Some(verdict) = &self.verdict {
            out.push('\n');
            match verdict {
                VerdictReport::Matched => push(&mut out, "verdict: matched"),
                VerdictReport::Mismatched {
                    left_method,
                    right_method,
                    output,
                    input,
                    left_value,
                    right_value,
                } => push(
                    &mut out,
                    &format!(
                        "verdict: mismatched at ({output}, {input}): {left_method} = {left_value}, {right_method} = {right_value}"
                    ),
                ),
            }
        }
        out
    }
}

fn render_method(out: &mut String, name: &str, section: &MethodReport) {
    if !section.ratios.is_empty() {
        out.push('\n');
        out.push_str(&format!("[{name}] gear ratios\n"));
        for line in &section.ratios {
            let mut text = format!("  mesh {}: {} = {}", line.mesh, line.symbol, line.value);
            if let Some(carrier) = line.carrier {
                text.push_str(&format!(", carrier {carrier}"));
            }
            if let Some(sign) = line.sign {
                text.push_str(&format!(", sign {}", if sign >= 0 { "+" } else { "-" }));
            }
            out.push_str(&text);
            out.push('\n');
        }
    }
    if let Some(matrix) = &section.symbolic {
        out.push('\n');
        out.push_str(&format!(
            "[{name}] transfer matrix (rows = outputs, cols = inputs)\n"
        ));
        render_table(out, matrix);
    }
    if let Some(matrix) = &section.numeric {
        out.push('\n');
        out.push_str(&format!(
            "[{name}] numeric transfer matrix (rows = outputs, cols = inputs)\n"
        ));
        render_table(out, matrix);
    }
}

fn render_table(out: &mut String, m: &LabeledMatrix) {
    let mut widths: Vec<usize> = m.cols.iter().map(String::len).collect();
    for row in &m.entries {
        for (c, entry) in row.iter().enumerate() {
            widths[c] = widths[c].max(entry.len());
        }
    }
    let label_width = m.rows.iter().map(String::len).max().unwrap_or(0);

    let mut header = format!("  {:label_width$}", "");
    for (c, col) in m.cols.iter().enumerate() {
        header.push_str(&format!("  {:width$}", col, width = widths[c]));
    }
    out.push_str(header.trim_end());
    out.push('\n');
    for (r, row_label) in m.rows.iter().enumerate() {
        let mut line = format!("  {row_label:label_width$}");
        for (c, entry) in m.entries[r].iter().enumerate() {
            line.push_str(&format!("  {:width$}", entry, width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
}
