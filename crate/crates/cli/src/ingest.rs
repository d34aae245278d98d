//! Single-column numeric CSV input.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses one value per line. Blank lines and `#` comments are skipped, and
/// a non-numeric first data line is taken as a header.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut bad = Vec::new();
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = !seen_data;
        seen_data = true;
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if first && !looks_numeric(line) => {}
            _ => bad.push(idx + 1),
        }
    }
    if !bad.is_empty() {
        let shown: Vec<String> = bad.iter().take(5).map(|l| l.to_string()).collect();
        bail!(
            "{} unparseable line(s); first: {}",
            bad.len(),
            shown.join(", ")
        );
    }
    if values.len() < 2 {
        bail!("need at least 2 numeric values, found {}", values.len());
    }
    Ok(values)
}

/// A header is text that does not start like a number.
fn looks_numeric(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'))
}

pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_values(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_comments_and_blanks() {
        let v = parse_values("# data\nloss\n\n5\n4 \n# mid\n2\n1e0\n").unwrap();
        assert_eq!(v, vec![5.0, 4.0, 2.0, 1.0]);
    }

    #[test]
    fn bad_lines_reported_by_number() {
        let text = "1\nx\n2\ny\nnan\n3\n--\n4,5\nz\nw\n";
        let msg = parse_values(text).unwrap_err().to_string();
        assert!(msg.starts_with("7 unparseable line(s); first: 2, 4, 5, 7, 8"), "{msg}");
    }

    #[test]
    fn too_few_values() {
        assert!(parse_values("value\n3.5\n").is_err());
        assert!(parse_values("").is_err());
    }

    #[test]
    fn numeric_looking_first_line_is_not_a_header() {
        assert!(parse_values("1.2.3\n4\n5\n").is_err());
    }
}
