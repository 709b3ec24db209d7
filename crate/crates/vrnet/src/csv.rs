//! CSV serialization of sweep series.
//!
//! One header row, one data row per sweep point, LF line endings, plain
//! decimal notation rounded to six significant digits. Identical inputs
//! always produce byte-identical output.

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::sweep::SweepSeries;

pub const CSV_HEADER: &str =
    "param_name,param_value,total_latency_us,throughput_gbps,utilization,frames_per_vr_frame";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Renders a series to CSV text.
pub fn render_csv(series: &SweepSeries) -> String {
    let mut out = String::with_capacity(64 * (series.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for point in &series.points {
        let m = &point.metrics;
        out.push_str(series.parameter.key());
        out.push(',');
        out.push_str(&sig6(point.value));
        out.push(',');
        out.push_str(&sig6(m.total_latency_s * 1.0e6));
        out.push(',');
        out.push_str(&sig6(m.throughput_bps / 1.0e9));
        out.push(',');
        out.push_str(&sig6(m.utilization));
        out.push(',');
        out.push_str(&m.frames_per_vr_frame.to_string());
        out.push('\n');
    }
    out
}

/// Writes a series as CSV, surfacing I/O failures with the destination path.
pub fn write_csv(series: &SweepSeries, path: &Path) -> Result<(), CsvError> {
    std::fs::write(path, render_csv(series)).map_err(|source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Formats with six significant digits in plain decimal notation. Whole
/// numbers that fit an integer print without a fractional part.
pub(crate) fn sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if value.fract() == 0.0 && value.abs() < 9.0e15 {
        return format!("{value:.0}");
    }
    let decimals = 5 - exponent10(value);
    if decimals > 0 {
        format!("{value:.*}", decimals as usize)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (value / scale).round() * scale)
    }
}

/// Decimal exponent taken from the scientific rendering, which is exact
/// where `log10().floor()` suffers from rounding at powers of ten.
fn exponent10(value: f64) -> i32 {
    let rendered = format!("{:e}", value.abs());
    rendered
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{baseline_config, sweep, SweepParameter, SweepPoint, SweepSpec};

    fn cable_series(steps: usize) -> SweepSeries {
        sweep(&SweepSpec {
            parameter: SweepParameter::CableLength,
            start: 0.0,
            stop: 1000.0,
            steps,
            baseline: baseline_config(),
        })
        .unwrap()
    }

    #[test]
    fn header_plus_one_row_per_point() {
        let text = render_csv(&cable_series(11));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("cable_m,0,"));
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn baseline_row_carries_the_reference_values() {
        let base = baseline_config();
        let series = SweepSeries {
            parameter: SweepParameter::CableLength,
            points: vec![SweepPoint {
                value: base.link.cable_m,
                metrics: base.evaluate().unwrap(),
            }],
        };
        let text = render_csv(&series);
        assert!(text.contains("24.368"), "{text}");
        assert!(text.contains("0.4924"), "{text}");
        assert!(text.contains(",733"), "{text}");
    }

    #[test]
    fn rows_parse_back_to_six_significant_digits() {
        let series = cable_series(5);
        let text = render_csv(&series);
        for (line, point) in text.lines().skip(1).zip(&series.points) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 6);
            let latency_us: f64 = fields[2].parse().unwrap();
            let expected = point.metrics.total_latency_s * 1.0e6;
            assert!(
                ((latency_us - expected) / expected).abs() < 1e-5,
                "{latency_us} vs {expected}"
            );
            let frames: u64 = fields[5].parse().unwrap();
            assert_eq!(frames, point.metrics.frames_per_vr_frame);
        }
    }

    #[test]
    fn output_is_deterministic() {
        let series = cable_series(7);
        assert_eq!(render_csv(&series), render_csv(&series));
    }

    #[test]
    fn unwritable_destination_reports_the_path() {
        let dir = tempfile::tempdir().unwrap();
        // The directory itself is not a writable file.
        let err = write_csv(&cable_series(3), dir.path()).unwrap_err();
        assert!(err.to_string().contains(&dir.path().display().to_string()));
    }

    #[test]
    fn sig6_covers_the_magnitudes_in_play() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(24.36809756097561), "24.3681");
        assert_eq!(sig6(0.55027776), "0.550278");
        assert_eq!(sig6(1.0e9), "1000000000");
        assert_eq!(sig6(2.5e9), "2500000000");
        assert_eq!(sig6(0.4924471420049405), "0.492447");
        assert_eq!(sig6(1000.0), "1000");
        assert_eq!(sig6(0.05), "0.0500000");
        assert_eq!(sig6(1234.56789), "1234.57");
    }
}
