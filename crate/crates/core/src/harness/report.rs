use std::fmt::Write as _;
use std::path::Path;

use super::correlation::SCORE_NAMES;
use super::evaluate::{MeanRow, ScoreReport};
use crate::error::{Error, Result};

pub const REPORT_FILES: [&str; 4] = ["report.json", "scores.csv", "summary.md", "boxplot_data.csv"];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

fn scores_csv(report: &ScoreReport) -> Result<Vec<u8>> {
    csv_bytes(
        &[
            "dataset",
            "algorithm",
            "fold",
            "int_index",
            "predictivity",
            "stability",
            "simplicity",
            "interpretability",
            "status",
        ],
        report.per_fold.iter().map(|r| {
            vec![
                r.dataset.clone(),
                r.algorithm.clone(),
                r.fold.to_string(),
                r.int_index.map_or_else(|| "NA".into(), |i| i.to_string()),
                opt(r.predictivity),
                opt(r.stability),
                opt(r.simplicity),
                opt(r.interpretability),
                r.status.clone(),
            ]
        }),
    )
}

fn boxplot_csv(report: &ScoreReport) -> Result<Vec<u8>> {
    let rows = report.per_fold.iter().flat_map(|r| {
        [
            ("predictivity", r.predictivity),
            ("stability", r.stability),
            ("simplicity", r.simplicity),
            ("interpretability", r.interpretability),
        ]
        .into_iter()
        .filter_map(move |(name, v)| {
            v.map(|v| {
                vec![
                    r.dataset.clone(),
                    r.algorithm.clone(),
                    r.fold.to_string(),
                    name.to_string(),
                    v.to_string(),
                ]
            })
        })
    });
    csv_bytes(&["dataset", "algorithm", "fold", "score", "value"], rows)
}

fn fmt2(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

fn summary_md(report: &ScoreReport) -> String {
    let mut s = String::new();
    let w = &report.weights;
    let _ = writeln!(s, "# Interpretability scores\n");
    let _ = writeln!(
        s,
        "{}-fold cross-validation, q = {}, weights = ({:.4}, {:.4}, {:.4}), seed = {}.\n",
        report.k, report.q, w.alpha1, w.alpha2, w.alpha3, report.seed
    );
    type Getter = fn(&MeanRow) -> Option<f64>;
    let sections: [(&str, Getter); 4] = [
        ("Predictivity", |m| m.predictivity),
        ("q-stability", |m| m.stability),
        ("Simplicity", |m| m.simplicity),
        ("Interpretability", |m| m.interpretability),
    ];
    for (title, get) in sections {
        let _ = writeln!(s, "## {title} (mean over folds)\n");
        let _ = writeln!(s, "| Dataset | {} |", report.algorithms.join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(report.algorithms.len()));
        for ds in &report.datasets {
            let cells: Vec<String> = report
                .algorithms
                .iter()
                .map(|a| {
                    let m = report.means.iter().find(|m| &m.dataset == ds && &m.algorithm == a);
                    fmt2(m.and_then(get))
                })
                .collect();
            let _ = writeln!(s, "| {ds} | {} |", cells.join(" | "));
        }
        s.push('\n');
    }

    let _ = writeln!(s, "## Correlation between scores\n");
    match &report.correlations {
        Some(m) => {
            let _ = writeln!(s, "Pearson correlation over {} per-fold rows.\n", report.correlation_rows);
            let _ = writeln!(s, "| | {} |", SCORE_NAMES.join(" | "));
            let _ = writeln!(s, "|---|---|---|---|");
            for (i, name) in SCORE_NAMES.iter().enumerate() {
                let cells: Vec<String> = (0..3)
                    .map(|j| if j < i { "-".to_string() } else { fmt2(m[i][j]) })
                    .collect();
                let _ = writeln!(s, "| {name} | {} |", cells.join(" | "));
            }
        }
        None => {
            let _ = writeln!(s, "Not available.");
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(s, "\n## Warnings\n");
        for w in &report.warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s
}

/// Write `report.json`, `scores.csv`, `summary.md` and `boxplot_data.csv` into `dir`.
pub fn write_report(report: &ScoreReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    let files: [(&str, Vec<u8>); 4] = [
        (REPORT_FILES[0], json.into_bytes()),
        (REPORT_FILES[1], scores_csv(report)?),
        (REPORT_FILES[2], summary_md(report).into_bytes()),
        (REPORT_FILES[3], boxplot_csv(report)?),
    ];
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
