//! Emits a standalone matplotlib script for a sweep CSV.

use std::path::Path;

use crate::csv_out::{read_rows, CsvError};
use crate::sweep::{Status, SweepRow};

struct Curve {
    column: &'static str,
    label: &'static str,
}

fn curves(rows: &[SweepRow]) -> Vec<Curve> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.status == Status::Ok).collect();
    let has = |f: fn(&SweepRow) -> Option<f64>| ok.iter().any(|r| f(r).is_some());
    let (tau, tau_i, tau_s) = (has(|r| r.tau), has(|r| r.tau_i), has(|r| r.tau_s));
    let mut out = Vec::new();
    if tau {
        let label = if tau_i { "tau (upper)" } else { "tau" };
        out.push(Curve { column: "tau", label });
    }
    if tau_i {
        let label = if tau { "tau_i (lower)" } else { "tau_i" };
        out.push(Curve { column: "tau_i", label });
    }
    if tau_s {
        out.push(Curve { column: "tau_s", label: "tau_s" });
    }
    out
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// Script text for the CSV at `csv_path`; the script writes `image_path`.
pub fn script_for(csv_text: &str, csv_path: &Path, image_path: &Path) -> Result<String, CsvError> {
    let rows = read_rows(csv_text.as_bytes())?;
    let curves = curves(&rows);
    if curves.is_empty() {
        return Err(CsvError::Empty);
    }
    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    s.push_str("import csv\n\nimport matplotlib\n\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str(&format!("CSV_PATH = {}\n", py_str(&csv_path.display().to_string())));
    s.push_str(&format!("IMAGE_PATH = {}\n", py_str(&image_path.display().to_string())));
    s.push_str("CURVES = [\n");
    for c in &curves {
        s.push_str(&format!("    ({}, {}),\n", py_str(c.column), py_str(c.label)));
    }
    s.push_str("]\n\n");
    s.push_str(
        r#"with open(CSV_PATH, newline="") as fh:
    rows = [r for r in csv.DictReader(fh) if r["status"] == "OK"]

fig, ax = plt.subplots(figsize=(6, 4))
for column, label in CURVES:
    pts = [(float(r["u"]), float(r[column])) for r in rows if r[column]]
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", markersize=3, label=label)
ax.set_xlabel("u")
ax.set_ylabel("mean arrival time")
ax.legend()
fig.tight_layout()
fig.savefig(IMAGE_PATH, dpi=150)
"#,
    );
    Ok(s)
}
