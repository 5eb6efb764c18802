//! CSV encodings of reduced coordinates and spectra.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! output is byte-stable for identical inputs.

use crate::diffusion::DecayCurve;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `frame,c1,...,cq` followed by one row per frame, in input order.
pub fn coords_csv(coords: &Matrix) -> String {
    let q = coords.cols();
    let mut out = String::from("frame");
    for c in 1..=q {
        out.push_str(&format!(",c{c}"));
    }
    out.push('\n');
    for j in 0..coords.rows() {
        out.push_str(&j.to_string());
        for c in 0..q {
            out.push_str(&format!(",{}", coords[(j, c)]));
        }
        out.push('\n');
    }
    out
}

/// Parses the output of [`coords_csv`] (the `frame` column is ignored).
pub fn parse_coords_csv(text: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("coordinates CSV: {e}")))?
        .clone();
    if headers.get(0) != Some("frame") || headers.len() < 2 {
        return Err(Error::Format(
            "coordinates CSV must start with a `frame,c1,...` header".into(),
        ));
    }
    let q = headers.len() - 1;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("coordinates CSV: {e}")))?;
        let row = record
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("coordinates CSV row {}: {e}", line + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("coordinates CSV has no rows".into()));
    }
    let flat: Vec<f64> = rows.concat();
    let by_rows = Matrix::new(q, rows.len(), flat)?;
    Ok(by_rows.transpose())
}

/// `index,relative_value,method`, 1-based index per curve.
pub fn decay_csv(curves: &[(&str, &DecayCurve)]) -> String {
    let mut out = String::from("index,relative_value,method\n");
    for (method, curve) in curves {
        for (i, v) in curve.values.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, v, method));
        }
    }
    out
}

/// `index,eigenvalue`, 0-based so that row 0 is the trivial eigenvalue.
pub fn eigenvalues_csv(values: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coords_layout() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, -0.5, 2.0, 0.25, 0.0, 1e-20]).unwrap();
        let text = coords_csv(&m);
        assert_eq!(text, "frame,c1,c2,c3\n0,1,-0.5,2\n1,0.25,0,0.00000000000000000001\n");
        assert_eq!(parse_coords_csv(&text).unwrap(), m);
    }

    #[test]
    fn bad_coords() {
        assert!(parse_coords_csv("a,b\n1,2\n").is_err());
        assert!(parse_coords_csv("frame,c1\n").is_err());
        assert!(parse_coords_csv("frame,c1\n0,x\n").is_err());
        assert!(parse_coords_csv("frame,c1,c2\n0,1\n").is_err());
    }

    #[test]
    fn decay_layout() {
        let a = DecayCurve {
            values: vec![1.0, 0.5],
            truncated: false,
        };
        let b = DecayCurve {
            values: vec![1.0],
            truncated: true,
        };
        assert_eq!(
            decay_csv(&[("pca", &a), ("diffusion", &b)]),
            "index,relative_value,method\n1,1,pca\n2,0.5,pca\n1,1,diffusion\n"
        );
    }
}
