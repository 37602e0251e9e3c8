//! Input formats.
//!
//! * points CSV: header `w,x1,...,xd`, one weighted point per line;
//! * distance matrix: first line `n`, then `n` whitespace-separated rows;
//! * instance JSON: a serialized [`PlantedInstance`].

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use robust_center::{MatrixOracle, PlantedInstance, WeightedPointSet};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Csv,
    Matrix,
    Instance,
}

impl InputFormat {
    /// `.csv` and `.json` by extension, anything else is a matrix file.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            Some(e) if e.eq_ignore_ascii_case("json") => InputFormat::Instance,
            _ => InputFormat::Matrix,
        }
    }
}

#[derive(Debug)]
pub enum Dataset {
    Points(WeightedPointSet<Vec<f64>>),
    Matrix(MatrixOracle),
    Instance(Box<PlantedInstance>),
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load(path: &Path, format: Option<InputFormat>) -> CliResult<Dataset> {
    let text = read_text(path)?;
    let origin = path.display().to_string();
    Ok(match format.unwrap_or_else(|| InputFormat::detect(path)) {
        InputFormat::Csv => Dataset::Points(parse_points_csv(&text, &origin)?),
        InputFormat::Matrix => Dataset::Matrix(parse_matrix(&text, &origin)?),
        InputFormat::Instance => Dataset::Instance(Box::new(parse_instance(&text, &origin)?)),
    })
}

fn parse_error(origin: &str, line: u64, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: origin.to_string(), line, msg: msg.into() }
}

fn parse_real(field: &str, origin: &str, line: u64, what: &str) -> CliResult<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_error(origin, line, format!("{what}: cannot parse {field:?} as a number")))
}

pub fn parse_points_csv(text: &str, origin: &str) -> CliResult<WeightedPointSet<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h.map_err(|e| parse_error(origin, 1, e.to_string()))?,
        None => return Err(parse_error(origin, 1, "empty file, expected header w,x1,...,xd")),
    };
    let d = header.len().saturating_sub(1);
    let expected = (1..=d).map(|i| format!("x{i}"));
    if d == 0 || header.get(0).map(str::trim) != Some("w") || !header.iter().skip(1).map(str::trim).eq(expected) {
        return Err(parse_error(origin, 1, "header must be w,x1,...,xd"));
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != d + 1 {
            return Err(parse_error(origin, line, format!("expected {} fields, found {}", d + 1, rec.len())));
        }
        let w = parse_real(&rec[0], origin, line, "weight")?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(parse_error(origin, line, format!("weight {w} is not finite and nonnegative")));
        }
        let x = (1..=d).map(|i| parse_real(&rec[i], origin, line, &format!("x{i}"))).collect::<CliResult<Vec<_>>>()?;
        weights.push(w);
        points.push(x);
    }
    if points.is_empty() {
        return Err(parse_error(origin, 2, "no points"));
    }
    Ok(WeightedPointSet::new(points, weights)?)
}

pub fn write_points_csv(ps: &WeightedPointSet<Vec<f64>>) -> String {
    let d = ps.points().first().map_or(0, Vec::len);
    let mut out = String::from("w");
    for i in 1..=d {
        write!(out, ",x{i}").expect("string write");
    }
    out.push('\n');
    for (x, w) in ps.points().iter().zip(ps.weights()) {
        write!(out, "{w}").expect("string write");
        for c in x {
            write!(out, ",{c}").expect("string write");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, origin: &str) -> CliResult<MatrixOracle> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (first, head) = lines.next().ok_or_else(|| parse_error(origin, 1, "empty file, expected n"))?;
    let n: usize =
        head.trim().parse().map_err(|_| parse_error(origin, first, format!("cannot parse {:?} as n", head.trim())))?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        if rows.len() == n {
            return Err(parse_error(origin, line, format!("more than {n} rows")));
        }
        let row =
            l.split_whitespace().map(|f| parse_real(f, origin, line, "distance")).collect::<CliResult<Vec<_>>>()?;
        if row.len() != n {
            return Err(parse_error(origin, line, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_error(origin, first, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(MatrixOracle::from_rows(rows)?)
}

pub fn write_matrix(o: &MatrixOracle) -> String {
    let rows = o.rows();
    let mut out = format!("{}\n", rows.len());
    for row in rows {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str, origin: &str) -> CliResult<PlantedInstance> {
    serde_json::from_str(text).map_err(|e| parse_error(origin, e.line() as u64, e.to_string()))
}

pub fn write_instance(inst: &PlantedInstance) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(inst)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let text = "w,x1,x2\n1,0.5,-2\n2.5,1e-3,7\n";
        let ps = parse_points_csv(text, "t").unwrap();
        assert_eq!(ps.weights(), &[1.0, 2.5]);
        assert_eq!(ps.points()[1], vec![0.001, 7.0]);
        assert_eq!(parse_points_csv(&write_points_csv(&ps), "t").unwrap(), ps);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = parse_points_csv("w,x1\n1,2\n1,oops\n", "f.csv").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err}");
        let err = parse_points_csv("w,x1\n1,2,3\n", "f.csv").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
        let err = parse_points_csv("w,y\n1,2\n", "f.csv").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 1, .. }), "{err}");
        let err = parse_points_csv("w,x1\n-1,2\n", "f.csv").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn matrix_round_trip_and_errors() {
        let text = "3\n0 1 2\n1 0 1\n2 1 0\n";
        let o = parse_matrix(text, "m").unwrap();
        assert_eq!(write_matrix(&o), text);
        let err = parse_matrix("2\n0 1\n1 x\n", "m").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err}");
        let err = parse_matrix("2\n0 1\n", "m").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }), "{err}");
        assert!(matches!(parse_matrix("2\n0 1\n2 0\n", "m"), Err(CliError::Solver(_))));
    }

    #[test]
    fn instance_parse_error_line() {
        let err = parse_instance("{\n  \"space\": \"lp\",\n  oops\n}", "i.json").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn detection_by_extension() {
        assert_eq!(InputFormat::detect(Path::new("a.CSV")), InputFormat::Csv);
        assert_eq!(InputFormat::detect(Path::new("a.json")), InputFormat::Instance);
        assert_eq!(InputFormat::detect(Path::new("a.txt")), InputFormat::Matrix);
    }
}
