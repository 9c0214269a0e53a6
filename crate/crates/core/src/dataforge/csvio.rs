//! `f0,...,f{D-1},label` CSV files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::numcore::Tensor;
use crate::{Error, Result, Scalar};

use super::Dataset;

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a dataset; `class_count = max(label) + 1`. Errors carry the 1-based
/// line number of the offending row.
pub fn load_csv<S: Scalar>(path: impl AsRef<Path>) -> Result<Dataset<S>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, "empty file, expected header")),
    };
    let d = header.len().saturating_sub(1);
    let header_ok = d >= 1
        && header
            .iter()
            .take(d)
            .enumerate()
            .all(|(j, h)| h == format!("f{j}"))
        && header.get(d) == Some("label");
    if !header_ok {
        return Err(parse_err(1, "header must be f0,...,f{D-1},label"));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != d + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", d + 1, rec.len()),
            ));
        }
        for (j, field) in rec.iter().take(d).enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("f{j}: {field:?} is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("f{j}: non-finite value {field:?}")));
            }
            values.push(S::lit(v));
        }
        let raw = rec[d].trim();
        let label: i64 = raw
            .parse()
            .map_err(|_| parse_err(line, format!("label {raw:?} is not an integer")))?;
        if label < 0 {
            return Err(parse_err(line, format!("negative label {label}")));
        }
        labels.push(label as usize);
    }
    if labels.is_empty() {
        return Err(parse_err(1, "no data rows"));
    }
    let class_count = labels.iter().max().unwrap() + 1;
    let n = labels.len();
    Dataset::new(Tensor::new(vec![n, d], values)?, labels, class_count)
}

/// Writes a dataset with 17 significant digits per feature, LF line endings.
pub fn write_csv<S: Scalar>(dataset: &Dataset<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let d = dataset.dim();
    let header: Vec<String> = (0..d)
        .map(|j| format!("f{j}"))
        .chain(["label".to_string()])
        .collect();
    let x = dataset.features();
    let y = dataset.labels();
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for (i, &label) in y.iter().enumerate() {
        for v in x.row(i) {
            write!(w, "{:.16e},", v.as_f64()).map_err(io)?;
        }
        writeln!(w, "{label}").map_err(io)?;
    }
    w.flush().map_err(io)
}
