use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::crossval::EvalReport;
use crate::error::{Error, Result};
use crate::trace::GestureLabel;

const N: usize = GestureLabel::COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// `"96.13% (SD = 2.59%)"` for a mean of 0.9613 and SD of 0.0259.
pub fn format_accuracy(mean: f64, sd: f64) -> String {
    format!("{:.2}% (SD = {:.2}%)", mean * 100.0, sd * 100.0)
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serialises");
            s.push('\n');
            s
        }
    }
}

fn render_text(r: &EvalReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{}-fold cross-validation confusion matrix (rows: performed, columns: estimated)",
        r.folds
    )
    .unwrap();
    out.push_str("   ");
    for l in GestureLabel::ALL {
        write!(out, "{l:>6}").unwrap();
    }
    out.push('\n');
    for l in GestureLabel::ALL {
        let row = l.ordinal();
        write!(out, "{l:<3}").unwrap();
        for c in 0..N {
            if r.mean_confusion.support[row] == 0 {
                write!(out, "{:>6}", "-").unwrap();
            } else {
                write!(out, "{:>6.2}", r.mean_confusion.rows[row][c]).unwrap();
            }
        }
        out.push('\n');
    }
    writeln!(
        out,
        "Overall accuracy: {}",
        format_accuracy(r.mean_accuracy, r.accuracy_sd)
    )
    .unwrap();
    let folds: Vec<String> = r
        .per_fold_accuracy
        .iter()
        .map(|a| format!("{a:.4}"))
        .collect();
    writeln!(out, "Per-fold accuracy: {}", folds.join(" ")).unwrap();
    writeln!(
        out,
        "Folds: {} {} (seed {}), k = {} {}, traces: {}, excluded: {}",
        r.folds,
        if r.stratified { "stratified" } else { "random" },
        r.seed,
        r.k,
        r.metric,
        r.n_traces,
        r.excluded
    )
    .unwrap();
    if let (Some(d), Some(on)) = (r.distance_cm, r.ambient_on) {
        writeln!(
            out,
            "Condition: {d} cm, ambient {}",
            if on { "on" } else { "off" }
        )
        .unwrap();
    }
    out
}

fn render_csv(r: &EvalReport) -> String {
    let mut out = String::from("section,row,col,value\n");
    let mut summary = |key: &str, value: String| {
        writeln!(out, "summary,{key},,{value}").unwrap();
    };
    summary("folds", r.folds.to_string());
    summary("seed", r.seed.to_string());
    summary("stratified", r.stratified.to_string());
    summary("k", r.k.to_string());
    summary("metric", r.metric.to_string());
    summary(
        "distance_cm",
        r.distance_cm.map(|d| d.to_string()).unwrap_or_default(),
    );
    summary(
        "ambient_on",
        r.ambient_on.map(|a| a.to_string()).unwrap_or_default(),
    );
    summary("n_traces", r.n_traces.to_string());
    summary("excluded", r.excluded.to_string());
    summary("mean_accuracy", r.mean_accuracy.to_string());
    summary("accuracy_sd", r.accuracy_sd.to_string());
    for i in &r.excluded_indices {
        writeln!(out, "excluded,{i},,").unwrap();
    }
    for (f, a) in r.per_fold_accuracy.iter().enumerate() {
        writeln!(out, "fold,{f},,{a}").unwrap();
    }
    write_matrix(&mut out, "confusion", "", &r.mean_confusion);
    for (f, m) in r.fold_confusion.iter().enumerate() {
        write_matrix(&mut out, "fold_confusion", &format!("{f}:"), m);
    }
    out
}

fn write_matrix(out: &mut String, section: &str, prefix: &str, m: &ConfusionMatrix) {
    for performed in GestureLabel::ALL {
        let r = performed.ordinal();
        writeln!(
            out,
            "{section}_support,{prefix}{performed},,{}",
            m.support[r]
        )
        .unwrap();
        for estimated in GestureLabel::ALL {
            writeln!(
                out,
                "{section},{prefix}{performed},{estimated},{}",
                m.rows[r][estimated.ordinal()]
            )
            .unwrap();
        }
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        index: line,
        message: message.into(),
    }
}

fn parse<T: FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| bad(line, format!("cannot parse {what} from {s:?}")))
}

fn label(line: usize, s: &str) -> Result<usize> {
    Ok(s.parse::<GestureLabel>()
        .map_err(|_| bad(line, format!("unknown label {s:?}")))?
        .ordinal())
}

fn empty_matrix() -> ConfusionMatrix {
    ConfusionMatrix {
        rows: [[0.0; N]; N],
        support: [0; N],
    }
}

/// Reads back a report rendered with [`ReportFormat::Csv`].
pub fn parse_report_csv(text: &str) -> Result<EvalReport> {
    let mut report = EvalReport {
        folds: 0,
        seed: 0,
        stratified: false,
        k: 0,
        metric: Default::default(),
        distance_cm: None,
        ambient_on: None,
        n_traces: 0,
        excluded: 0,
        excluded_indices: Vec::new(),
        per_fold_accuracy: Vec::new(),
        mean_accuracy: 0.0,
        accuracy_sd: 0.0,
        mean_confusion: empty_matrix(),
        fold_confusion: Vec::new(),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "section,row,col,value")) => {}
        _ => return Err(bad(0, "missing report header")),
    }
    for (line, content) in lines {
        if content.is_empty() {
            continue;
        }
        let cols: Vec<&str> = content.split(',').collect();
        let [section, row, col, value] = cols[..] else {
            return Err(bad(line, "expected 4 columns"));
        };
        match section {
            "summary" => match row {
                "folds" => report.folds = parse(line, row, value)?,
                "seed" => report.seed = parse(line, row, value)?,
                "stratified" => report.stratified = parse(line, row, value)?,
                "k" => report.k = parse(line, row, value)?,
                "metric" => {
                    report.metric = value.parse().map_err(|_| bad(line, "unknown metric"))?
                }
                "distance_cm" if value.is_empty() => report.distance_cm = None,
                "distance_cm" => report.distance_cm = Some(parse(line, row, value)?),
                "ambient_on" if value.is_empty() => report.ambient_on = None,
                "ambient_on" => report.ambient_on = Some(parse(line, row, value)?),
                "n_traces" => report.n_traces = parse(line, row, value)?,
                "excluded" => report.excluded = parse(line, row, value)?,
                "mean_accuracy" => report.mean_accuracy = parse(line, row, value)?,
                "accuracy_sd" => report.accuracy_sd = parse(line, row, value)?,
                other => return Err(bad(line, format!("unknown summary field {other:?}"))),
            },
            "excluded" => report.excluded_indices.push(parse(line, "index", row)?),
            "fold" => {
                let f: usize = parse(line, "fold", row)?;
                if f != report.per_fold_accuracy.len() {
                    return Err(bad(line, "fold rows out of order"));
                }
                report
                    .per_fold_accuracy
                    .push(parse(line, "accuracy", value)?);
            }
            "confusion" | "confusion_support" => {
                set_cell(&mut report.mean_confusion, section, line, row, col, value)?
            }
            "fold_confusion" | "fold_confusion_support" => {
                let (f, rest) = row
                    .split_once(':')
                    .ok_or_else(|| bad(line, "fold matrix row needs fold:label"))?;
                let f: usize = parse(line, "fold", f)?;
                while report.fold_confusion.len() <= f {
                    report.fold_confusion.push(empty_matrix());
                }
                let kind = section.trim_start_matches("fold_");
                set_cell(&mut report.fold_confusion[f], kind, line, rest, col, value)?
            }
            other => return Err(bad(line, format!("unknown section {other:?}"))),
        }
    }
    Ok(report)
}

fn set_cell(
    m: &mut ConfusionMatrix,
    section: &str,
    line: usize,
    row: &str,
    col: &str,
    value: &str,
) -> Result<()> {
    let r = label(line, row)?;
    if section.ends_with("_support") {
        m.support[r] = parse(line, "support", value)?;
    } else {
        m.rows[r][label(line, col)?] = parse(line, "cell", value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::Metric;

    fn sample_report() -> EvalReport {
        let mut fold = ConfusionMatrix::identity();
        fold.rows[0] = [0.93, 0.0, 0.04, 0.0, 0.0, 0.01, 0.0, 0.02];
        EvalReport {
            folds: 2,
            seed: 42,
            stratified: true,
            k: 5,
            metric: Metric::Euclidean,
            distance_cm: Some(20.0),
            ambient_on: Some(true),
            n_traces: 16,
            excluded: 1,
            excluded_indices: vec![3],
            per_fold_accuracy: vec![0.9613 + 0.0259 / 2f64.sqrt(), 0.9613 - 0.0259 / 2f64.sqrt()],
            mean_accuracy: 0.9613,
            accuracy_sd: 0.0259,
            mean_confusion: fold.clone(),
            fold_confusion: vec![fold, ConfusionMatrix::identity()],
        }
    }

    #[test]
    fn headline_format() {
        assert_eq!(format_accuracy(0.9613, 0.0259), "96.13% (SD = 2.59%)");
    }

    #[test]
    fn identity_text_has_unit_diagonal() {
        let mut r = sample_report();
        r.mean_confusion = ConfusionMatrix::identity();
        let text = render_report(&r, ReportFormat::Text);
        let rows: Vec<&str> = text.lines().skip(2).take(8).collect();
        for (i, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split_whitespace().skip(1).collect();
            assert_eq!(cells.len(), 8);
            for (j, c) in cells.iter().enumerate() {
                assert_eq!(*c, if i == j { "1.00" } else { "0.00" });
            }
        }
        assert!(text.contains("96.13% (SD = 2.59%)"));
        assert!(text.contains("Condition: 20 cm, ambient on"));
    }

    #[test]
    fn csv_roundtrip() {
        let r = sample_report();
        let back = parse_report_csv(&render_report(&r, ReportFormat::Csv)).unwrap();
        assert_eq!(back, r);
        let json = render_report(&r, ReportFormat::Json);
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(parse_report_csv("nope").is_err());
        assert!(parse_report_csv("section,row,col,value\nsummary,k,,x\n").is_err());
    }
}
