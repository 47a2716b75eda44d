//! Positions files, report records and CSV tables.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Writes one coordinate per line with 17 significant digits.
pub fn write_positions<W: Write + ?Sized>(out: &mut W, positions: &[f64]) -> io::Result<()> {
    for x in positions {
        writeln!(out, "{x:.16e}")?;
    }
    Ok(())
}

/// Parses a positions file body. Blank lines and `#` comments are skipped.
pub fn parse_positions(text: &str) -> std::result::Result<Vec<f64>, (usize, String)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| (idx + 1, format!("invalid coordinate `{line}`")))?;
        if !x.is_finite() {
            return Err((idx + 1, format!("non-finite coordinate `{line}`")));
        }
        out.push(x);
    }
    Ok(out)
}

pub fn read_positions(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_positions(&text).map_err(|(line, message)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

/// SPEB at a user-chosen source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub u: f64,
    pub r_m: f64,
    pub speb_m2: f64,
    pub rmse_m: f64,
}

/// Summary record printed by `design` and `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub design: String,
    pub n: usize,
    pub a_m: f64,
    pub lambda_m: f64,
    pub snr_db: f64,
    pub worst_case_speb_m2: f64,
    pub worst_case_rmse_m: f64,
    pub worst_u: f64,
    pub worst_r_m: f64,
    pub q_star: f64,
    pub gamma: f64,
    pub clusters: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<Probe>,
}

const REPORT_COLUMNS: &str = "design,n,a_m,lambda_m,snr_db,worst_case_speb_m2,worst_case_rmse_m,worst_u,worst_r_m,q_star,gamma,clusters";

impl Report {
    pub fn write_json<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    /// Header plus a single row. Clusters are written as `l/c/r`.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let clusters = self
            .clusters
            .map(|[l, c, r]| format!("{l}/{c}/{r}"))
            .unwrap_or_default();
        write!(out, "{REPORT_COLUMNS}")?;
        if self.probe.is_some() {
            write!(out, ",probe_u,probe_r_m,probe_speb_m2,probe_rmse_m")?;
        }
        writeln!(out)?;
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.design,
            self.n,
            self.a_m,
            self.lambda_m,
            self.snr_db,
            self.worst_case_speb_m2,
            self.worst_case_rmse_m,
            self.worst_u,
            self.worst_r_m,
            self.q_star,
            self.gamma,
            clusters
        )?;
        if let Some(p) = &self.probe {
            write!(out, ",{},{},{},{}", p.u, p.r_m, p.speb_m2, p.rmse_m)?;
        }
        writeln!(out)
    }
}

/// One in-region heatmap sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapRow {
    pub u: f64,
    pub r_m: f64,
    pub p1_m: f64,
    pub p2_m: f64,
    pub log10_speb: f64,
}

pub const HEATMAP_HEADER: &str = "u,r_m,p1_m,p2_m,log10_speb";

pub fn write_heatmap<W: Write + ?Sized>(out: &mut W, rows: &[HeatmapRow]) -> io::Result<()> {
    writeln!(out, "{HEATMAP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.u, r.r_m, r.p1_m, r.p2_m, r.log10_speb
        )?;
    }
    Ok(())
}

/// One benchmark cell. A failed cell keeps its error code and leaves the
/// numeric columns empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub design: String,
    pub variable: String,
    pub value: f64,
    pub worst_case_speb_m2: Option<f64>,
    pub error: Option<String>,
}

pub const BENCHMARK_HEADER: &str =
    "design,variable,value,worst_case_speb_m2,worst_case_rmse_m,error";

pub fn write_benchmark<W: Write + ?Sized>(out: &mut W, rows: &[BenchmarkRow]) -> io::Result<()> {
    writeln!(out, "{BENCHMARK_HEADER}")?;
    for r in rows {
        let (speb, rmse) = match r.worst_case_speb_m2 {
            Some(v) => (v.to_string(), v.sqrt().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.design,
            r.variable,
            r.value,
            speb,
            rmse,
            r.error.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_round_trip_bit_exact() {
        let xs = [
            -0.25,
            -1.0 / 3.0,
            0.0,
            1e-17,
            std::f64::consts::PI * 1e-3,
            0.267_650_981_234_567_8,
        ];
        let mut buf = Vec::new();
        write_positions(&mut buf, &xs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), xs.len());
        let back = parse_positions(&text).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn positions_parse_errors_carry_line() {
        let err = parse_positions("# header\n0.1\n\nabc\n").unwrap_err();
        assert_eq!(err.0, 4);
        assert!(parse_positions("inf\n").is_err());
        assert_eq!(parse_positions("").unwrap(), Vec::<f64>::new());
    }

    fn sample_report() -> Report {
        Report {
            design: "proposed".into(),
            n: 25,
            a_m: 0.25,
            lambda_m: 0.01,
            snr_db: 5.0,
            worst_case_speb_m2: 1.5e-3,
            worst_case_rmse_m: 1.5e-3f64.sqrt(),
            worst_u: 0.0,
            worst_r_m: 50.0,
            q_star: 0.5000004,
            gamma: 160000.0,
            clusters: Some([6, 13, 6]),
            probe: None,
        }
    }

    #[test]
    fn report_json_round_trip() {
        let rep = sample_report();
        let mut buf = Vec::new();
        rep.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with('\n'));
        assert!(!text.contains("probe"));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["clusters"], serde_json::json!([6, 13, 6]));
    }

    #[test]
    fn report_csv_layout() {
        let mut rep = sample_report();
        rep.clusters = None;
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert!(lines[1].starts_with("proposed,25,0.25,0.01,5,0.0015,"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn benchmark_null_cells() {
        let rows = [
            BenchmarkRow {
                design: "ula".into(),
                variable: "n".into(),
                value: 8.0,
                worst_case_speb_m2: Some(4.0),
                error: None,
            },
            BenchmarkRow {
                design: "exhaustive".into(),
                variable: "n".into(),
                value: 8.0,
                worst_case_speb_m2: None,
                error: Some("search_space_too_large".into()),
            },
        ];
        let mut buf = Vec::new();
        write_benchmark(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!("{BENCHMARK_HEADER}\nula,n,8,4,2,\nexhaustive,n,8,,,search_space_too_large\n")
        );
    }
}
