//! CSV output: header line, LF endings, floats with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::billiards::{CountSeries, SeriesKind};
use crate::drift::DriftReport;
use crate::error::Result;
use crate::flat::Cylinder;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(x) => format_float(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn series_table(series: &CountSeries) -> Table {
    let mut t = match series.kind {
        SeriesKind::Cesaro => Table::new(&["t", "cesaro_value"]),
        SeriesKind::RawCount => Table::new(&["t", "count"]),
    };
    for &(x, v) in &series.points {
        let value = match series.kind {
            SeriesKind::Cesaro => Cell::Float(v),
            SeriesKind::RawCount => Cell::Int(v as i64),
        };
        t.push(vec![x.into(), value]);
    }
    t
}

pub fn cylinder_table(cyls: &[Cylinder]) -> Table {
    let mut t = Table::new(&["dx", "dy", "waist", "height"]);
    for c in cyls {
        t.push(vec![c.holonomy.x.into(), c.holonomy.y.into(), c.waist.into(), c.height.into()]);
    }
    t
}

pub fn report_table(reports: &[DriftReport]) -> Table {
    let mut t = Table::new(&[
        "t",
        "samples",
        "empirical_average",
        "input_value",
        "fitted_c",
        "fitted_b",
        "sigma_bound",
        "target_c",
        "target_b",
        "pass",
    ]);
    for r in reports {
        t.push(vec![
            r.t.into(),
            r.samples.into(),
            r.empirical_average.into(),
            r.input_value.into(),
            r.fitted_c.into(),
            r.fitted_b.into(),
            r.sigma_bound.into(),
            r.target_c.into(),
            r.target_b.into(),
            r.pass.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_header_only() {
        let s = CountSeries { kind: SeriesKind::Cesaro, points: vec![] };
        assert_eq!(series_table(&s).to_csv(), "t,cesaro_value\n");
    }

    #[test]
    fn three_points_four_lines() {
        let s = CountSeries { kind: SeriesKind::Cesaro, points: vec![(0.1, 1.0), (0.2, 0.5), (0.3, 1.0 / 3.0)] };
        let csv = series_table(&s).to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(!csv.contains('\r'));
        assert!(csv.contains("3.3333333333333331e-1"));
    }
}
