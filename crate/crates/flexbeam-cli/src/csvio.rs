//! CSV and JSON emission with reproducible formatting.
//!
//! Every numeric cell is rendered in scientific notation with a fixed
//! number of significant digits (17 by default, enough to round-trip f64),
//! and files are written atomically: identical inputs give bit-identical
//! outputs.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Significant digits for numeric output; override with FLEXBEAM_CSV_DIGITS.
pub fn output_digits() -> usize {
    std::env::var("FLEXBEAM_CSV_DIGITS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|d| (1..=17).contains(d))
        .unwrap_or(17)
}

pub fn format_value(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, v)
}

/// Write `path` atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Numeric table with a header row.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: &[Vec<f64>],
    digits: usize,
) -> io::Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(|&v| format_value(v, digits)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// Table with one leading text cell per row (status columns and the like).
pub fn write_csv_tagged(
    path: &Path,
    header: &[&str],
    rows: &[(String, Vec<f64>)],
    digits: usize,
) -> io::Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for (tag, row) in rows {
        let mut cells = vec![sanitize(tag)];
        cells.extend(row.iter().map(|&v| format_value(v, digits)));
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

fn sanitize(cell: &str) -> String {
    cell.replace([',', '\n'], ";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_fixed_width_scientific() {
        assert_eq!(format_value(1.0 / 3.0, 17), "3.3333333333333331e-1");
        assert_eq!(format_value(0.0, 5), "0.0000e0");
        assert_eq!(format_value(-2.5e-13, 3), "-2.50e-13");
    }

    #[test]
    fn round_trips_f64_at_17_digits() {
        for &v in &[std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1.2345678901234567e-300] {
            let s = format_value(v, 17);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }
}
