//! CSV and JSON emission of sweep reports and trajectories.
//!
//! Numbers are written in shortest round-trip form, so re-reading a file
//! reproduces every value bit for bit and identical inputs give identical
//! bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::config::Family;
use super::sweep::{Consistency, DichotomyReport, DichotomyRow};
use crate::diagnostics::virial::residual_from_series;
use crate::diagnostics::{ConservedLedger, ProbeSeries, ResidualStats, ScatteringProbe, Verdict, VirialSeries};
use crate::error::{Error, Result};
use crate::solver::TrajectoryRecord;

pub const REPORT_HEADER: [&str; 15] = [
    "family",
    "params",
    "energy",
    "gradSq",
    "energyOverEW",
    "gradSqOverYC",
    "predictedRegion",
    "observedTermination",
    "tStop",
    "verdict",
    "sNorm",
    "maxGradSqOverYC",
    "massDrift",
    "energyDrift",
    "consistency",
];

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn parse_f64(field: &str, column: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Schema(format!("column {column}: not a number: {field:?}")))
}

fn parse_family(s: &str) -> Result<Family> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::Schema(format!("unknown family {s:?}")))
}

fn parse_verdict(s: &str) -> Result<Option<Verdict>> {
    if s.is_empty() {
        return Ok(None);
    }
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map(Some)
        .map_err(|_| Error::Schema(format!("unknown verdict {s:?}")))
}

fn fmt_params(params: &BTreeMap<String, f64>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in s.split(';').filter(|i| !i.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Schema(format!("malformed parameter {item:?}")))?;
        out.insert(k.to_string(), parse_f64(v, "params")?);
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Schema(e.to_string())
}

fn row_record(row: &DichotomyRow) -> Vec<String> {
    vec![
        row.family.as_str().to_string(),
        fmt_params(&row.params),
        fmt_f64(row.energy),
        fmt_f64(row.grad_sq),
        fmt_f64(row.energy_over_e_w),
        fmt_f64(row.grad_sq_over_y_c),
        row.predicted_region.clone(),
        row.observed_termination.clone(),
        fmt_f64(row.t_stop),
        row.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
        fmt_f64(row.s_norm),
        fmt_f64(row.max_grad_sq_over_y_c),
        fmt_f64(row.mass_drift),
        fmt_f64(row.energy_drift),
        row.consistency.as_str().to_string(),
    ]
}

pub fn report_csv_string(report: &DichotomyReport) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(REPORT_HEADER).expect("in-memory write");
    for row in &report.rows {
        w.write_record(row_record(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Parses the CSV written by [`report_csv_string`].
pub fn parse_report(text: &str) -> Result<DichotomyReport> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(REPORT_HEADER.iter().copied()) {
        return Err(Error::Schema(format!("unexpected report header: {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let f = |k: usize| parse_f64(&rec[k], REPORT_HEADER[k]);
        rows.push(DichotomyRow {
            family: parse_family(&rec[0])?,
            params: parse_params(&rec[1])?,
            energy: f(2)?,
            grad_sq: f(3)?,
            energy_over_e_w: f(4)?,
            grad_sq_over_y_c: f(5)?,
            predicted_region: rec[6].to_string(),
            observed_termination: rec[7].to_string(),
            t_stop: f(8)?,
            verdict: parse_verdict(&rec[9])?,
            s_norm: f(10)?,
            max_grad_sq_over_y_c: f(11)?,
            mass_drift: f(12)?,
            energy_drift: f(13)?,
            consistency: Consistency::parse(&rec[14])?,
        });
    }
    Ok(DichotomyReport { rows })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ReportSummary<'a> {
    rows: usize,
    consistent: usize,
    inconsistent: usize,
    no_claim: usize,
    all_consistent: bool,
    results: &'a [DichotomyRow],
}

pub fn report_json_string(report: &DichotomyReport) -> String {
    let summary = ReportSummary {
        rows: report.rows.len(),
        consistent: report.count(Consistency::Consistent),
        inconsistent: report.count(Consistency::Inconsistent),
        no_claim: report.count(Consistency::NoClaim),
        all_consistent: report.all_consistent(),
        results: &report.rows,
    };
    let mut s = serde_json::to_string_pretty(&summary).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the CSV to `path` and the JSON summary next to it (`.json`).
pub fn emit_report(report: &DichotomyReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_csv_string(report)).map_err(|e| Error::io(path, e))?;
    let json = path.with_extension("json");
    std::fs::write(&json, report_json_string(report)).map_err(|e| Error::io(&json, e))
}

/// Trajectory series as read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub ledger: ConservedLedger,
    pub virial: VirialSeries,
    pub probe: ScatteringProbe,
}

const LEDGER_COLUMNS: [&str; 7] = ["t", "mass", "energy", "gradSq", "potSq", "sNormAccum", "wNormAccum"];

fn trajectory_header(virial_radius: f64, probes: &[ProbeSeries]) -> Vec<String> {
    let r = fmt_f64(virial_radius);
    let mut h: Vec<String> = LEDGER_COLUMNS.iter().map(|s| s.to_string()).collect();
    h.push(format!("yR@{r}"));
    h.push(format!("yRdot@{r}"));
    h.push(format!("zRsecond@{r}"));
    h.push("globalRHS".into());
    h.extend(probes.iter().map(|p| format!("localGrad@{}", fmt_f64(p.radius))));
    h
}

fn write_table(ledger: &ConservedLedger, virial: &VirialSeries, probe: &ScatteringProbe) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(trajectory_header(virial.radius, &probe.local_grad))
        .expect("in-memory write");
    for k in 0..ledger.len() {
        let mut rec = vec![
            fmt_f64(ledger.times[k]),
            fmt_f64(ledger.mass[k]),
            fmt_f64(ledger.energy[k]),
            fmt_f64(ledger.grad_sq[k]),
            fmt_f64(ledger.pot_sq[k]),
            fmt_f64(probe.s_norm_accum[k]),
            fmt_f64(probe.w_norm_accum[k]),
            fmt_f64(virial.y_r[k]),
            fmt_f64(virial.y_r_dot[k]),
            fmt_f64(virial.z_r_second[k]),
            fmt_f64(virial.global_rhs[k]),
        ];
        rec.extend(probe.local_grad.iter().map(|p| fmt_f64(p.values[k])));
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn trajectory_csv_string(record: &TrajectoryRecord) -> String {
    write_table(&record.ledger, &record.virial, &record.probe)
}

impl TrajectoryTable {
    pub fn to_csv_string(&self) -> String {
        write_table(&self.ledger, &self.virial, &self.probe)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
        if header.len() < 11 || header[..7].iter().ne(LEDGER_COLUMNS.iter().copied()) {
            return Err(Error::Schema(format!("unexpected trajectory header: {header:?}")));
        }
        let radius_of = |col: &str, prefix: &str| -> Result<f64> {
            let tail = col
                .strip_prefix(prefix)
                .ok_or_else(|| Error::Schema(format!("expected a {prefix}R column, got {col:?}")))?;
            parse_f64(tail, col)
        };
        let radius = radius_of(&header[7], "yR@")?;
        for (k, prefix) in [(8, "yRdot@"), (9, "zRsecond@")] {
            if radius_of(&header[k], prefix)? != radius {
                return Err(Error::Schema(format!(
                    "column {} does not match radius {radius}",
                    header[k]
                )));
            }
        }
        if header[10] != "globalRHS" {
            return Err(Error::Schema(format!("expected globalRHS, got {:?}", header[10])));
        }
        let probe_radii = header[11..]
            .iter()
            .map(|c| radius_of(c, "localGrad@"))
            .collect::<Result<Vec<f64>>>()?;

        let mut ledger = ConservedLedger::default();
        let mut virial = VirialSeries::new(radius);
        let mut probe = ScatteringProbe {
            local_grad: probe_radii
                .iter()
                .map(|&radius| ProbeSeries {
                    radius,
                    values: Vec::new(),
                })
                .collect(),
            ..Default::default()
        };
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != header.len() {
                return Err(Error::Schema(format!(
                    "row has {} fields, header has {}",
                    rec.len(),
                    header.len()
                )));
            }
            let v = rec
                .iter()
                .zip(&header)
                .map(|(f, c)| parse_f64(f, c))
                .collect::<Result<Vec<f64>>>()?;
            ledger.times.push(v[0]);
            ledger.mass.push(v[1]);
            ledger.energy.push(v[2]);
            ledger.grad_sq.push(v[3]);
            ledger.pot_sq.push(v[4]);
            probe.s_norm_accum.push(v[5]);
            probe.w_norm_accum.push(v[6]);
            virial.y_r.push(v[7]);
            virial.y_r_dot.push(v[8]);
            virial.z_r_second.push(v[9]);
            virial.global_rhs.push(v[10]);
            for (series, value) in probe.local_grad.iter_mut().zip(&v[11..]) {
                series.values.push(*value);
            }
        }
        Ok(TrajectoryTable { ledger, virial, probe })
    }
}

pub fn write_trajectory_csv(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    std::fs::write(path, trajectory_csv_string(record)).map_err(|e| Error::io(path, e))
}

pub fn read_trajectory_csv(path: &Path) -> Result<TrajectoryTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TrajectoryTable::from_csv_str(&text).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VirialCheckReport {
    pub radius: f64,
    pub records: usize,
    /// `d/dt y_R − 2 Im ∫ ū ∇u·∇φ_R` at interior records.
    pub first_identity: ResidualStats,
    /// Largest `|2 Im ∫ ū ∇u·∇φ_R|`, for scale.
    pub first_rhs_scale: f64,
    /// `z_R'' RHS − 8(∫|∇u|² − ∫|u|^{2*})`; small only while the solution
    /// stays inside `r ≤ R`.
    pub second_vs_global: ResidualStats,
}

/// Residual statistics of the recorded virial series at radius `radius`.
pub fn virial_check(table: &TrajectoryTable, radius: f64) -> Result<VirialCheckReport> {
    if radius != table.virial.radius {
        return Err(Error::InvalidArgument(format!(
            "trajectory records virial series at R = {}, not {radius}",
            table.virial.radius
        )));
    }
    let residual = residual_from_series(&table.ledger.times, &table.virial.y_r, &table.virial.y_r_dot)?;
    let gap: Vec<f64> = table
        .virial
        .z_r_second
        .iter()
        .zip(&table.virial.global_rhs)
        .map(|(z, g)| z - g)
        .collect();
    Ok(VirialCheckReport {
        radius,
        records: table.ledger.len(),
        first_identity: ResidualStats::of(&residual),
        first_rhs_scale: table.virial.y_r_dot.iter().map(|v| v.abs()).fold(0.0, f64::max),
        second_vs_global: ResidualStats::of(&gap),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(a: f64) -> DichotomyRow {
        DichotomyRow {
            family: Family::Gaussian,
            params: [("a".to_string(), a), ("sigma".to_string(), 1.0)].into_iter().collect(),
            energy: -1.25e-7,
            grad_sq: 12.345678901234567,
            energy_over_e_w: 0.1 + 0.2,
            grad_sq_over_y_c: 1.0 / 3.0,
            predicted_region: "BlowupRegionExpected".into(),
            observed_termination: "BlowupDetected".into(),
            t_stop: 0.123456789,
            verdict: None,
            s_norm: 3.5e20,
            max_grad_sq_over_y_c: 10.000000000000002,
            mass_drift: 2.220446049250313e-16,
            energy_drift: 0.0,
            consistency: Consistency::Consistent,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = report_csv_string(&DichotomyReport::default());
        assert_eq!(csv.lines().count(), 1);
        assert_eq!(csv.lines().next().unwrap(), REPORT_HEADER.join(","));
        assert_eq!(parse_report(&csv).unwrap(), DichotomyReport::default());
    }

    #[test]
    fn one_row_report_has_two_lines() {
        let report = DichotomyReport { rows: vec![row(3.0)] };
        assert_eq!(report_csv_string(&report).lines().count(), 2);
    }

    #[test]
    fn report_round_trips_exactly() {
        let mut second = row(0.7);
        second.verdict = Some(Verdict::Dispersing);
        second.family = Family::GaussianChirped;
        second.params.insert("b".into(), -0.3);
        let report = DichotomyReport {
            rows: vec![row(3.0), second],
        };
        let csv = report_csv_string(&report);
        assert_eq!(parse_report(&csv).unwrap(), report);
        assert_eq!(report_csv_string(&parse_report(&csv).unwrap()), csv);
    }

    #[test]
    fn emit_writes_csv_and_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let report = DichotomyReport { rows: vec![row(1.0)] };
        emit_report(&report, &path).unwrap();
        let csv = std::fs::read_to_string(&path).unwrap();
        assert_eq!(parse_report(&csv).unwrap(), report);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
        assert_eq!(json["rows"], 1);
        assert_eq!(json["allConsistent"], true);
    }

    #[test]
    fn emit_reports_path_on_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("sweep.csv");
        let err = emit_report(&DichotomyReport::default(), &path).unwrap_err();
        assert!(err.to_string().contains("missing"), "{err}");
    }

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.0,
            -0.0,
            1.0,
            0.1 + 0.2,
            1e-300,
            6.02e23,
            -3.5e-5,
            f64::MAX,
            f64::MIN_POSITIVE,
            12345.678,
        ] {
            let back: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
    }

    #[test]
    fn malformed_csv_is_schema_error() {
        assert!(matches!(parse_report("a,b\n1,2\n"), Err(Error::Schema(_))));
        assert!(matches!(
            TrajectoryTable::from_csv_str("t,mass\n0,1\n"),
            Err(Error::Schema(_))
        ));
    }
}
