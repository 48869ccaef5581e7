//! `key=value` metadata stored next to a Touchstone file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub lg_m: Option<f64>,
    pub lambda_m: Option<f64>,
    pub n_cells: Option<usize>,
    pub z_match_1: Option<Complex64>,
    pub z_match_2: Option<Complex64>,
    /// Any further keys, kept in order.
    pub extra: BTreeMap<String, String>,
}

/// `device.s2p` → `device.meta`.
pub fn meta_path_for(s2p: &Path) -> PathBuf {
    s2p.with_extension("meta")
}

/// Formats as `188.1-158.2j`.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let body = s.strip_suffix('j').or_else(|| s.strip_suffix('i'))?;
    let bytes = body.as_bytes();
    // split at the last sign that is not a leading sign or an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}

impl Metadata {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(v) = self.lg_m {
            let _ = writeln!(out, "lg_m={v}");
        }
        if let Some(v) = self.lambda_m {
            let _ = writeln!(out, "lambda_m={v}");
        }
        if let Some(v) = self.n_cells {
            let _ = writeln!(out, "n_cells={v}");
        }
        if let Some(z) = self.z_match_1 {
            let _ = writeln!(out, "z_match_1={}", format_complex(z));
        }
        if let Some(z) = self.z_match_2 {
            let _ = writeln!(out, "z_match_2={}", format_complex(z));
        }
        for (k, v) in &self.extra {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Metadata::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || v.parse::<f64>().map_err(|_| err(format!("{k}: not a number '{v}'")));
            let cplx = || parse_complex(v).ok_or_else(|| err(format!("{k}: not a complex number '{v}'")));
            match k {
                "lg_m" => m.lg_m = Some(num()?),
                "lambda_m" => m.lambda_m = Some(num()?),
                "n_cells" => {
                    m.n_cells = Some(v.parse().map_err(|_| err(format!("n_cells: not an integer '{v}'")))?)
                }
                "z_match_1" => m.z_match_1 = Some(cplx()?),
                "z_match_2" => m.z_match_2 = Some(cplx()?),
                _ => {
                    m.extra.insert(k.to_string(), v.to_string());
                }
            }
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }
}
