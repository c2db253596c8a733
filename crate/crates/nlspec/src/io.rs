//! Signal files: CSV (one value per line for 1D, one row per line for 2D)
//! and 8/16-bit PGM images with an optional JSON sidecar that maps pixel
//! levels back to signal values.
//!
//! CSV values are written in the shortest form that parses back to the
//! same `f64`, so CSV round trips are lossless. PGM output is a quantized
//! preview.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nlspec_core::{Shape, Signal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Affine map `value = offset + scale * level` stored next to a PGM file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PgmSidecar {
    pub offset: f64,
    pub scale: f64,
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write_string(path: &Path, s: &str) -> CliResult<()> {
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Shortest round-trip decimal form, switching to exponent notation for
/// very small or large magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn parse_f64(field: &str, line: usize) -> CliResult<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::input(format!("line {line}: cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(CliError::input(format!("line {line}: non-finite value")));
    }
    Ok(v)
}

/// Parses CSV text. Blank lines and `#` comments are skipped, and a first
/// line that is not numeric is taken as a header. A single column gives a
/// 1D signal, several columns a 2D array with one row per line.
pub fn parse_csv(text: &str, spacing: f64) -> CliResult<Signal> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if first && fields.iter().any(|f| f.trim().parse::<f64>().is_err()) {
            first = false;
            continue;
        }
        first = false;
        rows.push(
            fields
                .iter()
                .map(|f| parse_f64(f, idx + 1))
                .collect::<CliResult<_>>()?,
        );
    }
    if rows.is_empty() {
        return Err(CliError::input("CSV input holds no values"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::input(
            "CSV rows have differing numbers of columns",
        ));
    }
    let shape = if cols == 1 {
        Shape::D1(rows.len())
    } else {
        Shape::D2 {
            rows: rows.len(),
            cols,
        }
    };
    Ok(Signal::from_parts(rows.concat(), shape, spacing)?)
}

pub fn to_csv(s: &Signal) -> String {
    let mut out = String::new();
    match s.shape() {
        Shape::D1(_) => {
            for v in s.values() {
                let _ = writeln!(out, "{}", format_f64(*v));
            }
        }
        Shape::D2 { cols, .. } => {
            for row in s.values().chunks(cols) {
                let line: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
                let _ = writeln!(out, "{}", line.join(","));
            }
        }
    }
    out
}

pub fn sidecar_path(pgm: &Path) -> PathBuf {
    let mut name = pgm.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// 16-bit binary PGM of a 2D signal, linearly scaled to the full level
/// range, plus the sidecar needed to undo the scaling.
pub fn to_pgm(s: &Signal) -> CliResult<(Vec<u8>, PgmSidecar)> {
    let Shape::D2 { rows, cols } = s.shape() else {
        return Err(CliError::input("PGM output needs a 2D signal"));
    };
    let (lo, hi) = s
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let scale = if hi > lo { (hi - lo) / 65535.0 } else { 1.0 };
    let mut bytes = format!("P5\n{cols} {rows}\n65535\n").into_bytes();
    for v in s.values() {
        let level = ((v - lo) / scale).round().clamp(0.0, 65535.0) as u16;
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    Ok((bytes, PgmSidecar { offset: lo, scale }))
}

/// Reads a P2 or P5 image. Without a sidecar, levels map to `[0, 1]`.
pub fn parse_pgm(bytes: &[u8], sidecar: Option<PgmSidecar>, spacing: f64) -> CliResult<Signal> {
    let bad = |msg: &str| CliError::input(format!("PGM: {msg}"));
    let mut pos = 0;
    let mut token = || -> CliResult<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let num = |s: String| s.parse::<usize>().map_err(|_| bad("invalid header number"));
    let cols = num(token()?)?;
    let rows = num(token()?)?;
    let maxval = num(token()?)?;
    if cols == 0 || rows == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("invalid dimensions or maxval"));
    }
    let count = rows * cols;
    let levels: Vec<f64> = match magic.as_str() {
        "P2" => (0..count)
            .map(|_| {
                let l = num(token()?)?;
                if l > maxval {
                    return Err(bad("level exceeds maxval"));
                }
                Ok(l as f64)
            })
            .collect::<CliResult<_>>()?,
        "P5" => {
            // exactly one whitespace byte separates header and raster
            let data = &bytes[(pos + 1).min(bytes.len())..];
            let width = if maxval < 256 { 1 } else { 2 };
            if data.len() < count * width {
                return Err(bad("raster is shorter than the header promises"));
            }
            (0..count)
                .map(|i| {
                    if width == 1 {
                        data[i] as f64
                    } else {
                        u16::from_be_bytes([data[2 * i], data[2 * i + 1]]) as f64
                    }
                })
                .collect()
        }
        _ => return Err(bad("expected magic P2 or P5")),
    };
    let map = sidecar.unwrap_or(PgmSidecar {
        offset: 0.0,
        scale: 1.0 / maxval as f64,
    });
    let values = levels.iter().map(|l| map.offset + map.scale * l).collect();
    Ok(Signal::from_parts(
        values,
        Shape::D2 { rows, cols },
        spacing,
    )?)
}

/// Loads a signal by extension: `.pgm` images (with `<file>.json` sidecar
/// if present), anything else as CSV.
pub fn read_signal(path: &Path, spacing: f64) -> CliResult<Signal> {
    let bytes = read_bytes(path)?;
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        let side = sidecar_path(path);
        let sidecar = if side.exists() {
            let text = fs::read_to_string(&side).map_err(|e| CliError::io(&side, e))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("{}: {e}", side.display())))?,
            )
        } else {
            None
        };
        parse_pgm(&bytes, sidecar, spacing)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::input(format!("{}: not UTF-8 text", path.display())))?;
        parse_csv(&text, spacing)
    }
}

pub fn write_csv(path: &Path, s: &Signal) -> CliResult<()> {
    write_string(path, &to_csv(s))
}

/// Writes the PGM preview and its sidecar.
pub fn write_pgm(path: &Path, s: &Signal) -> CliResult<()> {
    let (bytes, sidecar) = to_pgm(s)?;
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&sidecar).expect("plain struct serializes");
    write_string(&side, &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_lossless() {
        let v = vec![0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0, -2.5e-7];
        let s = Signal::new_1d(v).unwrap();
        assert_eq!(parse_csv(&to_csv(&s), 1.0).unwrap(), s);
        let a = Signal::new_2d(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, std::f64::consts::PI]).unwrap();
        assert_eq!(parse_csv(&to_csv(&a), 1.0).unwrap(), a);
    }

    #[test]
    fn csv_header_comments_and_errors() {
        let s = parse_csv("value\n# note\n1\n\n2\n", 0.5).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
        assert_eq!(s.spacing(), 0.5);
        assert!(parse_csv("1,2\n3\n", 1.0).is_err());
        assert!(parse_csv("1\nx\n", 1.0).is_err());
        assert!(parse_csv("1\nNaN\n", 1.0).is_err());
        assert!(parse_csv("", 1.0).is_err());
    }

    #[test]
    fn pgm_round_trip_within_quantization() {
        let v: Vec<f64> = (0..12).map(|k| (k as f64 * 0.7).sin()).collect();
        let s = Signal::new_2d(3, 4, v).unwrap();
        let (bytes, side) = to_pgm(&s).unwrap();
        let back = parse_pgm(&bytes, Some(side), 1.0).unwrap();
        assert_eq!(back.shape(), s.shape());
        assert!(back.max_abs_diff(&s).unwrap() <= side.scale);
    }

    #[test]
    fn ascii_pgm_with_comment() {
        let s = parse_pgm(b"P2\n# c\n2 1\n255\n0 255\n", None, 1.0).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0]);
        assert!(parse_pgm(b"P2\n2 1\n255\n0 256\n", None, 1.0).is_err());
        assert!(parse_pgm(b"P6\n1 1\n255\n0\n", None, 1.0).is_err());
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
