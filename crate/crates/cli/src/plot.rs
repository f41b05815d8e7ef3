use std::fmt::Write as _;

use anyhow::{bail, Result};
use lightwave_gesture::eval::EvalReport;
use lightwave_gesture::pipeline::TraceStages;

/// `t,raw,denoised,segmented_padded,standardized`, one row per sample.
/// Columns shorter than the longest one are left empty.
pub fn trace_stages_csv(stages: &TraceStages, sample_rate_hz: f64) -> String {
    let cols = [
        &stages.raw,
        &stages.denoised,
        &stages.segmented_padded,
        &stages.standardized,
    ];
    let rows = cols.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut out = String::from("t,raw,denoised,segmented_padded,standardized\n");
    for i in 0..rows {
        write!(out, "{}", i as f64 / sample_rate_hz).unwrap();
        for c in cols {
            match c.get(i) {
                Some(v) => write!(out, ",{v}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// `distance_cm,ambient_on,mean_accuracy,sd`, one row per report.
pub fn distance_accuracy_csv(reports: &[(String, EvalReport)]) -> Result<String> {
    if reports.is_empty() {
        bail!("distance-accuracy needs at least one report");
    }
    let mut out = String::from("distance_cm,ambient_on,mean_accuracy,sd\n");
    for (name, r) in reports {
        let (Some(d), Some(on)) = (r.distance_cm, r.ambient_on) else {
            bail!("{name}: report does not record a single distance and ambient condition");
        };
        writeln!(
            out,
            "{d},{},{},{}",
            on as u8, r.mean_accuracy, r.accuracy_sd
        )
        .unwrap();
    }
    Ok(out)
}
