//! CSV input and output for user data.
//!
//! ROC files have the header `class,marker_x,marker_y` with `class` in
//! {0, 1}; survival files have `time,event,group` with `event` in {0, 1}
//! and `group` in {A, B}. Errors name the offending line (the header is
//! line 1).

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use tailcheck::roc::{Class, PairedDiagnosticDataset, Subject};
use tailcheck::survival::{Group, SurvivalRecord};

pub const ROC_HEADER: [&str; 3] = ["class", "marker_x", "marker_y"];
pub const SURVIVAL_HEADER: [&str; 3] = ["time", "event", "group"];

struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl Table {
    fn read(source: impl Read, required: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(source);
        let header = reader
            .headers()
            .map_err(|e| anyhow!("line 1: {e}"))?
            .clone();
        let columns: HashMap<String, usize> = header
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        for name in required {
            if !columns.contains_key(*name) {
                return Err(anyhow!(
                    "line 1: missing column `{name}` (expected header {})",
                    required.join(",")
                ));
            }
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                anyhow!("line {line}: {e}")
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            if record.iter().all(str::is_empty) {
                continue;
            }
            rows.push((line, record));
        }
        Ok(Table { columns, rows })
    }

    fn cell<'a>(&self, line: usize, record: &'a csv::StringRecord, name: &str) -> Result<&'a str> {
        record
            .get(self.columns[name])
            .filter(|s| !s.is_empty())
            .ok_or_else(|| anyhow!("line {line}: missing value for `{name}`"))
    }

    fn number(&self, line: usize, record: &csv::StringRecord, name: &str) -> Result<f64> {
        let raw = self.cell(line, record, name)?;
        let v: f64 = raw
            .parse()
            .map_err(|_| anyhow!("line {line}: `{name}` is not a number: {raw:?}"))?;
        if !v.is_finite() {
            return Err(anyhow!("line {line}: `{name}` must be finite, got {raw}"));
        }
        Ok(v)
    }

    fn flag(&self, line: usize, record: &csv::StringRecord, name: &str) -> Result<bool> {
        match self.cell(line, record, name)? {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(anyhow!(
                "line {line}: `{name}` must be 0 or 1, got {other:?}"
            )),
        }
    }
}

pub fn parse_roc(source: impl Read) -> Result<PairedDiagnosticDataset> {
    let table = Table::read(source, &ROC_HEADER)?;
    let mut subjects = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let class = if table.flag(*line, rec, "class")? {
            Class::Positive
        } else {
            Class::Negative
        };
        subjects.push(Subject {
            class,
            marker_x: table.number(*line, rec, "marker_x")?,
            marker_y: table.number(*line, rec, "marker_y")?,
        });
    }
    Ok(PairedDiagnosticDataset::new(subjects)?)
}

pub fn parse_survival(source: impl Read) -> Result<Vec<SurvivalRecord>> {
    let table = Table::read(source, &SURVIVAL_HEADER)?;
    let mut records = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let time = table.number(*line, rec, "time")?;
        let event = table.flag(*line, rec, "event")?;
        let raw_group = table.cell(*line, rec, "group")?;
        let group: Group = raw_group
            .parse()
            .map_err(|_| anyhow!("line {line}: `group` must be A or B, got {raw_group:?}"))?;
        records.push(
            SurvivalRecord::new(time, event, group).map_err(|e| anyhow!("line {line}: {e}"))?,
        );
    }
    if records.is_empty() {
        return Err(anyhow!("no data rows"));
    }
    Ok(records)
}

pub fn read_roc(path: &Path) -> Result<PairedDiagnosticDataset> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_roc(f).with_context(|| format!("{}", path.display()))
}

pub fn read_survival(path: &Path) -> Result<Vec<SurvivalRecord>> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_survival(f).with_context(|| format!("{}", path.display()))
}

/// Survival records in the input format; times are written with full
/// round-trip precision.
pub fn survival_csv(records: &[SurvivalRecord]) -> String {
    let mut out = SURVIVAL_HEADER.join(",");
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{},{}\n", r.time, u8::from(r.event), r.group));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_rows_parse_in_any_column_order() {
        let d = parse_roc("marker_y,class,marker_x\n1.5,1,2\n0.5,0,1\n".as_bytes()).unwrap();
        assert_eq!(d.n_positive(), 1);
        assert_eq!(d.subjects()[0].marker_x, 2.0);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_roc("class,marker_x,marker_y\n1,2,3\n0,abc,1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = parse_survival("time,event,group\n1,1,A\n2,2,B\n".as_bytes()).unwrap_err();
        assert!(
            e.to_string().contains("line 3") && e.to_string().contains("event"),
            "{e}"
        );
        let e = parse_survival("time,group\n1,A\n".as_bytes()).unwrap_err();
        assert!(
            e.to_string().contains("line 1") && e.to_string().contains("event"),
            "{e}"
        );
        let e = parse_survival("time,event,group\n-1,1,A\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn single_class_is_degenerate() {
        let e = parse_roc("class,marker_x,marker_y\n1,2,3\n1,1,1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("degenerate class"), "{e}");
    }

    #[test]
    fn survival_round_trip() {
        let recs = vec![
            SurvivalRecord::new(0.1 + 0.2, true, Group::A).unwrap(),
            SurvivalRecord::new(15.0, false, Group::B).unwrap(),
        ];
        assert_eq!(
            parse_survival(survival_csv(&recs).as_bytes()).unwrap(),
            recs
        );
    }
}
