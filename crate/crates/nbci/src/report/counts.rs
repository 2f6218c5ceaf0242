//! Line-oriented count input: one non-negative integer per line, blank
//! lines ignored.

use crate::nb::Sample;
use crate::{Error, Result};
use std::path::Path;

/// Parse count data from text. Errors name the offending line.
pub fn parse_counts(text: &str) -> Result<Vec<u64>> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let v: u64 = tok.parse().map_err(|_| {
            Error::Parse(format!(
                "line {}: '{tok}' is not a non-negative integer count",
                idx + 1
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse("input contains no counts".into()));
    }
    Ok(values)
}

/// Read a count file into a sample.
pub fn read_counts_file(path: &Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Sample::new(parse_counts(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_counts_with_blank_lines() {
        let v = parse_counts("3\n\n0\n  \n0\n").unwrap();
        assert_eq!(v, vec![3, 0, 0]);
        let v = parse_counts(" 42 \n").unwrap();
        assert_eq!(v, vec![42]);
    }

    #[test]
    fn rejects_bad_tokens_with_line_numbers() {
        let err = parse_counts("3\nx\n1\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("'x'"), "{err}");
        let err = parse_counts("1\n\n-4\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = parse_counts("2.5\n").unwrap_err().to_string();
        assert!(err.contains("'2.5'"), "{err}");
        assert!(parse_counts("").is_err());
        assert!(parse_counts("\n \n").is_err());
    }

    #[test]
    fn missing_file_is_reported() {
        let err = read_counts_file(Path::new("/nonexistent/counts.txt"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("/nonexistent/counts.txt"), "{err}");
    }
}
