//! BER sweep CSV format.
//!
//! One comment line of metadata, a column header, then one row per SNR point:
//!
//! ```text
//! # scheme=sm se=6 seed=1
//! snr_db,bits,errors,ber,frames
//! 0.0,2000000,31842,0.015921,500000
//! ```
//!
//! Floats are written with `{:?}` so reading them back reproduces the exact
//! value; two runs with the same spec produce byte-identical files.

use std::fmt;
use std::io::{self, Write};

use srmimo_core::sim::BerPoint;

pub const COLUMNS: &str = "snr_db,bits,errors,ber,frames";

#[derive(Debug)]
pub struct CsvError {
    pub file: String,
    pub row: usize,
    pub msg: String,
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.row, self.msg)
    }
}

impl std::error::Error for CsvError {}

/// A sweep read back from disk. `redraws` is not stored in the file, so the
/// reconstructed points carry zero there; `ber()` still works from counts.
#[derive(Debug)]
pub struct SweepData {
    pub tag: String,
    pub se: usize,
    pub seed: u64,
    pub points: Vec<BerPoint>,
}

pub fn write_csv(
    w: &mut impl Write,
    tag: &str,
    se: usize,
    seed: u64,
    points: &[BerPoint],
) -> io::Result<()> {
    writeln!(w, "# scheme={tag} se={se} seed={seed}")?;
    writeln!(w, "{COLUMNS}")?;
    for p in points {
        writeln!(w, "{:?},{},{},{:?},{}", p.snr_db, p.bits, p.errors, p.ber(), p.frames)?;
    }
    Ok(())
}

pub fn read_csv(text: &str, file: &str) -> Result<SweepData, CsvError> {
    let fail = |row: usize, msg: String| CsvError { file: file.to_string(), row, msg };

    let mut tag = None;
    let mut se = None;
    let mut seed = None;
    let mut points = Vec::new();
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let row = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for field in meta.split_whitespace() {
                let Some((k, v)) = field.split_once('=') else { continue };
                match k {
                    "scheme" => tag = Some(v.to_string()),
                    "se" => {
                        se = Some(v.parse().map_err(|_| fail(row, format!("bad se `{v}`")))?)
                    }
                    "seed" => {
                        seed = Some(v.parse().map_err(|_| fail(row, format!("bad seed `{v}`")))?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !saw_header {
            if line != COLUMNS {
                return Err(fail(row, format!("expected header `{COLUMNS}`, got `{line}`")));
            }
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(fail(row, format!("expected 5 columns, got {}", cols.len())));
        }
        let snr_db: f64 =
            cols[0].parse().map_err(|_| fail(row, format!("bad snr_db `{}`", cols[0])))?;
        let bits: u64 = cols[1].parse().map_err(|_| fail(row, format!("bad bits `{}`", cols[1])))?;
        let errors: u64 =
            cols[2].parse().map_err(|_| fail(row, format!("bad errors `{}`", cols[2])))?;
        let _ber: f64 = cols[3].parse().map_err(|_| fail(row, format!("bad ber `{}`", cols[3])))?;
        let frames: u64 =
            cols[4].parse().map_err(|_| fail(row, format!("bad frames `{}`", cols[4])))?;
        if errors > bits {
            return Err(fail(row, format!("errors {errors} exceed bits {bits}")));
        }
        points.push(BerPoint {
            snr_db,
            bits,
            errors,
            frames,
            redraws: 0,
            seed: seed.unwrap_or(0),
        });
    }

    let Some(tag) = tag else {
        return Err(fail(1, "missing `# scheme=... se=... seed=...` metadata line".into()));
    };
    if !saw_header {
        return Err(fail(1, format!("missing column header `{COLUMNS}`")));
    }
    Ok(SweepData { tag, se: se.unwrap_or(0), seed: seed.unwrap_or(0), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<BerPoint> {
        vec![
            BerPoint { snr_db: 0.0, bits: 2_000_000, errors: 31_842, frames: 500_000, redraws: 0, seed: 1 },
            BerPoint { snr_db: 2.5, bits: 2_000_000, errors: 0, frames: 500_000, redraws: 0, seed: 1 },
        ]
    }

    #[test]
    fn roundtrip_preserves_counts_and_snr() {
        let mut buf = Vec::new();
        write_csv(&mut buf, "sm", 6, 1, &sample_points()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = read_csv(&text, "mem").unwrap();
        assert_eq!(back.tag, "sm");
        assert_eq!(back.se, 6);
        assert_eq!(back.seed, 1);
        assert_eq!(back.points.len(), 2);
        assert_eq!(back.points[0].snr_db, 0.0);
        assert_eq!(back.points[0].errors, 31_842);
        assert_eq!(back.points[1].ber(), 0.0);
    }

    #[test]
    fn rejects_malformed_rows_with_row_number() {
        let text = "# scheme=sm se=6 seed=1\nsnr_db,bits,errors,ber,frames\n0.0,10,zzz,0.1,5\n";
        let e = read_csv(text, "bad.csv").unwrap_err();
        assert_eq!(e.row, 3);
        assert!(e.msg.contains("zzz"));

        let text = "# scheme=sm se=6 seed=1\nsnr_db,bits,errors\n";
        let e = read_csv(text, "bad.csv").unwrap_err();
        assert!(e.msg.contains("expected header"));

        let text = "snr_db,bits,errors,ber,frames\n";
        assert!(read_csv(text, "bad.csv").unwrap_err().msg.contains("metadata"));
    }

    #[test]
    fn rejects_inconsistent_counts() {
        let text = "# scheme=sm se=6 seed=1\nsnr_db,bits,errors,ber,frames\n0.0,10,11,1.1,5\n";
        assert!(read_csv(text, "bad.csv").unwrap_err().msg.contains("exceed"));
    }
}
