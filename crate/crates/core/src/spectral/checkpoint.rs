//! Binary checkpoints and plain-text spectra.
//!
//! Checkpoint layout, all little-endian:
//!
//! | bytes | content                          |
//! |-------|----------------------------------|
//! | 8     | magic `SQGCKPT1`                 |
//! | 8     | n (u64)                          |
//! | 8     | box length L (f64)               |
//! | 8     | alpha (f64)                      |
//! | 8     | time (f64)                       |
//! | 8     | dealias fraction (f64)           |
//! | 16·n² | coefficients, (re, im) f64 pairs in flat lattice order |

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::GridSpec;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SQGCKPT1";
const HEADER_LEN: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub field: SpectralField,
    pub alpha: f64,
    pub time: f64,
}

impl Checkpoint {
    pub fn new(field: SpectralField, alpha: f64, time: f64) -> Self {
        Self { field, alpha, time }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.field.grid();
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(g.n() as u64).to_le_bytes());
        out.extend_from_slice(&g.box_length().to_le_bytes());
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&g.dealias_fraction().to_le_bytes());
        for c in self.field.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(Error::Checkpoint("missing SQGCKPT1 header".into()));
        }
        let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
        let n = u64::from_le_bytes(word(1)) as usize;
        let box_length = f64::from_le_bytes(word(2));
        let alpha = f64::from_le_bytes(word(3));
        let time = f64::from_le_bytes(word(4));
        let dealias = f64::from_le_bytes(word(5));
        let grid = GridSpec::with_dealias(n, box_length, dealias)?;
        let expected = HEADER_LEN + 16 * grid.len();
        if bytes.len() != expected {
            return Err(Error::Checkpoint(format!(
                "payload holds {} bytes, header implies {}",
                bytes.len(),
                expected
            )));
        }
        let coeffs = bytes[HEADER_LEN..]
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let field = SpectralField::from_coeffs(grid, coeffs)?;
        Ok(Self { field, alpha, time })
    }

    /// Writes through a sibling temporary file and renames into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

/// Write-then-rename so readers never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// One line per nonzero mode: `k1 k2 re im`.
pub fn write_spectrum_text<W: Write>(field: &SpectralField, mut out: W) -> io::Result<()> {
    let g = field.grid();
    writeln!(out, "# n={} L={} dealias={}", g.n(), g.box_length(), g.dealias_fraction())?;
    writeln!(out, "# k1 k2 re im")?;
    for (idx, a, b) in g.lattice() {
        let c = field.coeffs()[idx];
        if c.norm() > 0.0 {
            writeln!(out, "{} {} {:e} {:e}", g.wavenumber(a), g.wavenumber(b), c.re, c.im)?;
        }
    }
    Ok(())
}

/// Parses the output of [`write_spectrum_text`].
pub fn read_spectrum_text<R: BufRead>(input: R) -> Result<SpectralField> {
    let mut grid = None;
    let mut entries = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# n=") {
            let mut parts = rest.split_whitespace();
            let parse = |s: Option<&str>, key: &str| -> Result<f64> {
                s.and_then(|s| s.strip_prefix(key))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Checkpoint(format!("bad spectrum header field {key}")))
            };
            let n: usize = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Checkpoint("bad n in spectrum header".into()))?;
            let l = parse(parts.next(), "L=")?;
            let d = parse(parts.next(), "dealias=")?;
            grid = Some(GridSpec::with_dealias(n, l, d)?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 4 {
            return Err(Error::Checkpoint(format!("malformed spectrum line: {line}")));
        }
        let bad = |_| Error::Checkpoint(format!("malformed spectrum line: {line}"));
        let k1: i64 = cols[0].parse().map_err(|_| Error::Checkpoint(line.into()))?;
        let k2: i64 = cols[1].parse().map_err(|_| Error::Checkpoint(line.into()))?;
        let re: f64 = cols[2].parse().map_err(bad)?;
        let im: f64 = cols[3].parse().map_err(bad)?;
        entries.push((k1, k2, Complex64::new(re, im)));
    }
    let grid = grid.ok_or_else(|| Error::Checkpoint("spectrum header missing".into()))?;
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (k1, k2, c) in entries {
        coeffs[grid.flat_k(k1, k2)] = c;
    }
    SpectralField::from_coeffs(grid, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> SpectralField {
        let g = GridSpec::with_dealias(16, 3.5, 0.5).unwrap();
        let samples: Vec<f64> = (0..g.len()).map(|i| ((i * 31) % 17) as f64 * 0.1 - 0.8).collect();
        SpectralField::from_physical(g, &samples).unwrap()
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let ck = Checkpoint::new(sample_field(), 0.25, 1.5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.bin");
        ck.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back, ck);
        assert_eq!(
            fs::metadata(&path).unwrap().len() as usize,
            HEADER_LEN + 16 * 16 * 16
        );
    }

    #[test]
    fn rejects_truncated_payload() {
        let bytes = Checkpoint::new(sample_field(), 0.25, 0.0).to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 8]).is_err());
        assert!(Checkpoint::from_bytes(b"nonsense").is_err());
    }

    #[test]
    fn text_spectrum_round_trip() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_spectrum_text(&f, &mut buf).unwrap();
        let back = read_spectrum_text(io::Cursor::new(buf)).unwrap();
        assert_eq!(back, f);
    }
}
