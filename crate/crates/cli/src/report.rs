//! Rendering of a manifest as paper-vs-computed tables.

use crate::config::OutputFormat;
use crate::error::CliResult;
use crate::manifest::{Manifest, Number, Verdict};

fn cell(n: &Option<Number>) -> String {
    n.as_ref()
        .map(|n| n.value.clone())
        .unwrap_or_else(|| "-".into())
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            s.push_str(c);
            if i + 1 < cells.len() {
                s.extend(std::iter::repeat_n(' ', w - c.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn entry_rows(m: &Manifest) -> Vec<Vec<String>> {
    m.entries
        .iter()
        .map(|e| {
            vec![
                e.key.clone(),
                e.label.clone(),
                cell(&e.paper),
                cell(&e.computed),
                e.tolerance.clone(),
                e.status.label().to_string(),
            ]
        })
        .collect()
}

const ENTRY_HEADER: [&str; 6] = [
    "key",
    "quantity",
    "paper",
    "computed",
    "tolerance",
    "status",
];

pub fn render(m: &Manifest, format: OutputFormat) -> CliResult<String> {
    match format {
        OutputFormat::Table => Ok(render_table(m)),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(ENTRY_HEADER)
                .map_err(|e| std::io::Error::other(e.to_string()))?;
            for r in entry_rows(m) {
                w.write_record(&r)
                    .map_err(|e| std::io::Error::other(e.to_string()))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| std::io::Error::other(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        OutputFormat::Jsonl => {
            let mut out = String::new();
            for e in &m.entries {
                out.push_str(&serde_json::to_string(e)?);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn render_table(m: &Manifest) -> String {
    let mut out = String::new();
    let mode = if m.config.smoke { "smoke" } else { "full" };
    out.push_str(&format!(
        "run: {mode}, k range {}, {} working bits\n\n",
        m.config.k_range.as_deref().unwrap_or("default"),
        m.config.working_bits
    ));
    let stages: Vec<Vec<String>> = m
        .stages
        .iter()
        .map(|s| {
            vec![
                s.name.clone(),
                s.status.label().to_string(),
                s.summary.clone(),
            ]
        })
        .collect();
    out.push_str(&table(&["stage", "status", "summary"], &stages));
    out.push('\n');
    out.push_str(&table(&ENTRY_HEADER, &entry_rows(m)));
    let failures: Vec<_> = m.failures().collect();
    if !failures.is_empty() {
        out.push_str("\nfailures:\n");
        for f in failures {
            out.push_str(&format!(
                "  [{}] {} ({}): {}\n",
                f.stage, f.instance, f.kind, f.message
            ));
        }
    }
    out.push_str(&format!(
        "\nverdict: {}\n",
        match m.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    ));
    out
}
