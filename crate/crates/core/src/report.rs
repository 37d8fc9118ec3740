//! κ-sweeps of the infimum and their table, CSV and JSON renderings.
//!
//! CSV layout, one header and two row kinds:
//!
//! ```text
//! kind,family,kappa,coord,g,attained,constant,limit
//! infimum,log-normal,2,1.1774100225154747,0.7976716190363569,true,false,
//! infimum,log-normal,0.5,,0,false,false,0+
//! curve,log-normal,2,0.001,0.9999...,,,
//! ```
//!
//! `infimum` rows carry the infimum in `g` and the minimizer (if attained) in
//! `coord`; `curve` rows are samples `(coord, g_κ(coord))` for plotting.
//! JSON mirrors this as `{"family": .., "rows": [{"kappa", "value",
//! "attained", "constant", "argmin", "limit", "curve": [{"coord", "g"}]}]}`.
//! Floats are written in shortest round-trip form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curves::{g_raw, Kappa};
use crate::distributions::FamilyId;
use crate::error::{Error, Result};
use crate::oracles::GridSpec;
use crate::solver::{infimum, InfimumResult, LimitDirection};

/// Largest number of curve samples per κ.
pub const MAX_CURVE_POINTS: usize = 1_000_000;
/// Curve grid size used when only a range is implied.
pub const DEFAULT_CURVE_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::domain(format!("unknown output format '{s}'"))),
        }
    }
}

/// A request to tabulate the infimum for several κ.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: FamilyId,
    pub kappas: Vec<Kappa>,
    pub format: OutputFormat,
    /// Samples of `g_κ` per κ; `None` emits no curve.
    pub curve: Option<GridSpec>,
}

impl SweepSpec {
    pub fn new(
        family: FamilyId,
        kappas: Vec<Kappa>,
        format: OutputFormat,
        curve: Option<GridSpec>,
    ) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::domain("at least one kappa is required"));
        }
        if let Some(grid) = &curve {
            grid.validate_for(family)?;
            if grid.len() > MAX_CURVE_POINTS {
                return Err(Error::domain(format!(
                    "curve_points must be <= {MAX_CURVE_POINTS}, got {}",
                    grid.len()
                )));
            }
        }
        Ok(SweepSpec {
            family,
            kappas,
            format,
            curve,
        })
    }
}

/// Parses `"0.5,1,2"` into κ values, preserving order.
pub fn parse_kappa_list(s: &str) -> Result<Vec<Kappa>> {
    let kappas = s
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::domain(format!("kappa '{tok}' is not a number")))?;
            Kappa::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    if kappas.is_empty() {
        return Err(Error::domain("at least one kappa is required"));
    }
    Ok(kappas)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub coord: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub value: f64,
    pub attained: bool,
    pub constant: bool,
    pub argmin: Option<f64>,
    pub limit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Vec<CurvePoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: FamilyId,
    pub rows: Vec<SweepRow>,
}

impl SweepRow {
    fn from_result(r: &InfimumResult, curve: Option<Vec<CurvePoint>>) -> Self {
        SweepRow {
            kappa: r.kappa.value(),
            value: r.value.value(),
            attained: r.attained,
            constant: r.constant,
            argmin: r.argmin.map(|p| p.coord()),
            limit: r.limit_direction.map(|d| d.as_str().to_string()),
            curve,
        }
    }
}

/// Computes every row of the sweep, in input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    let rows = spec
        .kappas
        .iter()
        .map(|&kappa| {
            let r = infimum(spec.family, kappa)?;
            let curve = spec.curve.as_ref().map(|grid| {
                grid.iter()
                    .map(|coord| CurvePoint {
                        coord,
                        g: g_raw(spec.family, kappa.value(), coord),
                    })
                    .collect()
            });
            Ok(SweepRow::from_result(&r, curve))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        family: spec.family,
        rows,
    })
}

/// One CSV line; see the module docs for the layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub kind: RecordKind,
    pub family: FamilyId,
    pub kappa: f64,
    pub coord: Option<f64>,
    pub g: f64,
    pub attained: Option<bool>,
    pub constant: Option<bool>,
    pub limit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Infimum,
    Curve,
}

impl SweepReport {
    pub fn to_records(&self) -> Vec<CsvRecord> {
        let mut out = Vec::new();
        for row in &self.rows {
            out.push(CsvRecord {
                kind: RecordKind::Infimum,
                family: self.family,
                kappa: row.kappa,
                coord: row.argmin,
                g: row.value,
                attained: Some(row.attained),
                constant: Some(row.constant),
                limit: row.limit.clone(),
            });
        }
        for row in &self.rows {
            for p in row.curve.iter().flatten() {
                out.push(CsvRecord {
                    kind: RecordKind::Curve,
                    family: self.family,
                    kappa: row.kappa,
                    coord: Some(p.coord),
                    g: p.g,
                    attained: None,
                    constant: None,
                    limit: None,
                });
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for rec in self.to_records() {
            w.serialize(rec)
                .map_err(|e| Error::domain(format!("csv write: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::domain(format!("csv write: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::domain(format!("csv write: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::domain(format!("json write: {e}")))
    }

    pub fn to_table(&self) -> String {
        let coord = self.family.coordinate_name();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<17} {:>10} {:>22} {:>9}  where",
            "family", "kappa", "infimum", "attained"
        );
        for row in &self.rows {
            let place = match (row.argmin, &row.limit) {
                (Some(c), _) => format!("{coord} = {}", format_sig(c)),
                (None, Some(l)) => format!("{coord} -> {l}"),
                (None, None) => "constant in ".to_string() + coord,
            };
            let _ = writeln!(
                out,
                "{:<17} {:>10} {:>22} {:>9}  {}",
                self.family.as_str(),
                row.kappa,
                format_sig(row.value),
                if row.attained { "yes" } else { "no" },
                place
            );
        }
        for row in &self.rows {
            if let Some(curve) = &row.curve {
                let _ = writeln!(
                    out,
                    "\ncurve kappa = {}\n{:>24} {:>24}",
                    row.kappa, coord, "g"
                );
                for p in curve {
                    let _ = writeln!(out, "{:>24} {:>24}", p.coord, p.g);
                }
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Table => Ok(self.to_table()),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Parses CSV written by [`SweepReport::to_csv`].
pub fn read_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let records = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRecord>, _>>()
        .map_err(|e| Error::domain(format!("csv parse: {e}")))?;
    for r in &records {
        check_record(r)?;
    }
    Ok(records)
}

fn check_record(r: &CsvRecord) -> Result<()> {
    Kappa::new(r.kappa)?;
    if !(0.0..=1.0).contains(&r.g) {
        return Err(Error::domain(format!("g = {} is not a probability", r.g)));
    }
    if let Some(l) = &r.limit {
        if LimitDirection::parse(l).is_none() {
            return Err(Error::domain(format!("unknown limit direction '{l}'")));
        }
    }
    if let Some(c) = r.coord {
        crate::curves::ReducedPoint::new(r.family, c)?;
    }
    if r.kind == RecordKind::Curve && r.coord.is_none() {
        return Err(Error::domain("curve record without a coordinate"));
    }
    Ok(())
}

/// Parses JSON written by [`SweepReport::to_json`].
pub fn read_json(text: &str) -> Result<SweepReport> {
    let report: SweepReport =
        serde_json::from_str(text).map_err(|e| Error::domain(format!("json parse: {e}")))?;
    for rec in report.to_records() {
        check_record(&rec)?;
    }
    Ok(report)
}

/// Re-evaluates `g_κ` at every record that carries a coordinate and returns
/// the largest deviation from the stored value.
pub fn recheck_records(records: &[CsvRecord]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in records {
        if let Some(c) = r.coord {
            let kappa = Kappa::new(r.kappa)?;
            let p = crate::curves::g_at(r.family, kappa, c)?;
            worst = worst.max((p.value() - r.g).abs());
        }
    }
    Ok(worst)
}

/// Up to 15 significant digits, trailing zeros dropped.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (14 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.14e}")
    }
}
