//! Plain-text interchange of complex vectors and unitaries.
//!
//! Vector files hold one complex entry per line as `re im` decimals, in
//! index order. Unitary files hold the N^2 entries of an N x N matrix in
//! row-major order, one entry per line in the same format. Blank lines and
//! `#` comments are ignored.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::config::{ConfigErrors, ConfigIssue};

fn parse_entries(text: &str, path: &Path) -> Result<Vec<Complex64>, ConfigErrors> {
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let re = parts.next().and_then(|t| t.parse::<f64>().ok());
        let im = parts.next().and_then(|t| t.parse::<f64>().ok());
        match (re, im, parts.next()) {
            (Some(re), Some(im), None) if re.is_finite() && im.is_finite() => {
                entries.push(Complex64::new(re, im));
            }
            _ => issues.push(ConfigIssue {
                line: idx + 1,
                message: format!(
                    "{}: malformed complex literal `{line}` (expected `re im`)",
                    path.display()
                ),
            }),
        }
    }
    if issues.is_empty() {
        Ok(entries)
    } else {
        Err(ConfigErrors(issues))
    }
}

fn read(path: &Path) -> Result<String, ConfigErrors> {
    std::fs::read_to_string(path).map_err(|e| {
        ConfigErrors(vec![ConfigIssue {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        }])
    })
}

/// Loads a complex vector and checks it has exactly `expected_len` entries.
pub fn load_vector(path: &Path, expected_len: usize) -> Result<Vec<Complex64>, ConfigErrors> {
    let entries = parse_entries(&read(path)?, path)?;
    if entries.len() != expected_len {
        return Err(ConfigErrors(vec![ConfigIssue {
            line: 0,
            message: format!(
                "{}: expected {expected_len} entries, found {}",
                path.display(),
                entries.len()
            ),
        }]));
    }
    Ok(entries)
}

/// Loads a row-major square matrix and checks it is `expected_dim` squared.
pub fn load_unitary(path: &Path, expected_dim: usize) -> Result<Array2<Complex64>, ConfigErrors> {
    let entries = parse_entries(&read(path)?, path)?;
    if entries.len() != expected_dim * expected_dim {
        return Err(ConfigErrors(vec![ConfigIssue {
            line: 0,
            message: format!(
                "{}: expected {} entries for a {expected_dim}x{expected_dim} matrix, found {}",
                path.display(),
                expected_dim * expected_dim,
                entries.len()
            ),
        }]));
    }
    Ok(Array2::from_shape_vec((expected_dim, expected_dim), entries)
        .expect("length checked above"))
}

/// Writes a complex vector in the interchange format at 17 significant
/// digits.
pub fn format_vector(entries: &[Complex64]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!("{:.16e} {:.16e}\n", e.re, e.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_round_trips_through_text() {
        let entries = vec![
            Complex64::new(0.5, -0.25),
            Complex64::new(1.0 / 3.0, 2.0f64.sqrt()),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.dat");
        std::fs::write(&path, format_vector(&entries)).unwrap();
        let loaded = load_vector(&path, 2).unwrap();
        assert_eq!(loaded, entries);
    }

    #[test]
    fn malformed_literal_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.dat");
        std::fs::write(&path, "0.1 0.2\noops\n0.3 0.4\n").unwrap();
        let errors = load_vector(&path, 3).unwrap_err();
        assert_eq!(errors.0[0].line, 2);
        assert!(errors.0[0].message.contains("malformed complex literal"));
    }

    #[test]
    fn wrong_length_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.dat");
        std::fs::write(&path, "0.1 0.2\n").unwrap();
        let errors = load_vector(&path, 3).unwrap_err();
        assert!(errors.0[0].message.contains("expected 3 entries"));
    }

    #[test]
    fn unitary_shape_is_row_major() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.dat");
        std::fs::write(&path, "1 0\n2 0\n3 0\n4 0\n").unwrap();
        let m = load_unitary(&path, 2).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(2.0, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(3.0, 0.0));
    }
}
