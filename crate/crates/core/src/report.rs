//! Byte-stable report output. Keys appear in a fixed order and every real
//! is printed with six decimals.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::metric::{PolarizationReport, Summary};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

pub fn render(report: &PolarizationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => render_json(report),
        ReportFormat::Csv => render_csv(report),
    }
}

pub fn save_report(report: &PolarizationReport, path: &Path, format: ReportFormat) -> io::Result<()> {
    std::fs::write(path, render(report, format))
}

pub fn write_report<W: Write>(report: &PolarizationReport, format: ReportFormat, mut out: W) -> io::Result<()> {
    out.write_all(render(report, format).as_bytes())
}

fn summary_json(s: &Summary, full: bool) -> String {
    if full {
        format!(
            "{{\"mean\": {:.6}, \"std\": {:.6}, \"min\": {:.6}, \"max\": {:.6}}}",
            s.mean, s.std, s.min, s.max
        )
    } else {
        format!("{{\"mean\": {:.6}, \"std\": {:.6}}}", s.mean, s.std)
    }
}

fn render_json(r: &PolarizationReport) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"graph\": {{\"nodes\": {}, \"edges\": {}}},", r.nodes, r.edges);
    let _ = writeln!(s, "  \"num_opinions\": {},", r.num_opinions);
    let _ = writeln!(s, "  \"runs\": {},", r.runs.len());
    let _ = writeln!(s, "  \"seed\": {},", r.seed);
    let _ = writeln!(s, "  \"p_within\": {},", summary_json(&r.p_within, false));
    let _ = writeln!(s, "  \"p_between\": {},", summary_json(&r.p_between, false));
    let _ = writeln!(s, "  \"polarization\": {},", summary_json(&r.polarization, true));
    let _ = writeln!(s, "  \"communities\": {{\"mean\": {:.6}}},", r.communities.mean);
    s.push_str("  \"per_run\": [");
    for (i, run) in r.runs.iter().enumerate() {
        s.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            s,
            "    {{\"seed\": {}, \"p_within\": {:.6}, \"p_between\": {:.6}, \"polarization\": {:.6}, \"communities\": {}}}",
            run.seed, run.scores.p_within, run.scores.p_between, run.scores.polarization, run.communities
        );
    }
    s.push_str("\n  ]\n}\n");
    s
}

const CSV_HEADER: &str = "nodes,edges,num_opinions,runs,seed,p_within_mean,p_within_std,p_between_mean,p_between_std,polarization_mean,polarization_std,polarization_min,polarization_max,communities_mean";

fn render_csv(r: &PolarizationReport) -> String {
    format!(
        "{CSV_HEADER}\n{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
        r.nodes,
        r.edges,
        r.num_opinions,
        r.runs.len(),
        r.seed,
        r.p_within.mean,
        r.p_within.std,
        r.p_between.mean,
        r.p_between.std,
        r.polarization.mean,
        r.polarization.std,
        r.polarization.min,
        r.polarization.max,
        r.communities.mean,
    )
}
