//! Touchstone version 1 two-port files.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::{renormalize, TwoPortNetwork};
use crate::error::{Error, Result};

const Z50: Complex64 = Complex64::new(50.0, 0.0);

/// Writes `net` as `# Hz S RI R 50`, renormalizing to 50 Ω first when its
/// references differ. Values carry 17 significant digits, so reading the
/// file back reproduces the 50 Ω network bit for bit.
pub fn write_touchstone<W: Write>(net: &TwoPortNetwork, mut out: W) -> Result<()> {
    let net50;
    let net = if net.z_ref_1 == Z50 && net.z_ref_2 == Z50 {
        net
    } else {
        net50 = renormalize(net, Z50, Z50)?;
        &net50
    };
    let io = |e: std::io::Error| Error::Io {
        path: "<touchstone>".into(),
        source: e,
    };
    writeln!(out, "! two-port S-parameters, 50 ohm reference").map_err(io)?;
    writeln!(out, "# Hz S RI R 50").map_err(io)?;
    for i in 0..net.len() {
        let mut line = format!("{:.16e}", net.f_grid[i]);
        for s in [net.s11[i], net.s21[i], net.s12[i], net.s22[i]] {
            line.push_str(&format!(" {:.16e} {:.16e}", s.re, s.im));
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

pub fn touchstone_write(net: &TwoPortNetwork, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_touchstone(net, &mut buf)?;
    fs::write(path, buf).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn touchstone_read(path: &Path) -> Result<TwoPortNetwork> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_touchstone(&text)
}

#[derive(Clone, Copy)]
enum Format {
    Ri,
    Ma,
    Db,
}

/// Parses a version 1 two-port file. Missing option fields take the
/// format defaults `GHz S MA R 50`.
pub fn parse_touchstone(text: &str) -> Result<TwoPortNetwork> {
    let mut scale = 1e9;
    let mut format = Format::Ma;
    let mut z0 = 50.0;
    let mut seen_options = false;
    let mut net = TwoPortNetwork {
        f_grid: Vec::new(),
        s11: Vec::new(),
        s12: Vec::new(),
        s21: Vec::new(),
        s22: Vec::new(),
        z_ref_1: Z50,
        z_ref_2: Z50,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_options {
                continue;
            }
            seen_options = true;
            let mut tokens = opts.split_whitespace();
            while let Some(tok) = tokens.next() {
                match tok.to_ascii_uppercase().as_str() {
                    "HZ" => scale = 1.0,
                    "KHZ" => scale = 1e3,
                    "MHZ" => scale = 1e6,
                    "GHZ" => scale = 1e9,
                    "S" => {}
                    "Y" | "Z" | "H" | "G" => return Err(err(format!("only S parameters are supported, got {tok}"))),
                    "RI" => format = Format::Ri,
                    "MA" => format = Format::Ma,
                    "DB" => format = Format::Db,
                    "R" => {
                        let v = tokens.next().ok_or_else(|| err("missing reference after R".into()))?;
                        z0 = v
                            .parse::<f64>()
                            .ok()
                            .filter(|z| *z > 0.0)
                            .ok_or_else(|| err(format!("bad reference impedance '{v}'")))?;
                    }
                    other => return Err(err(format!("malformed option line: unknown token '{other}'"))),
                }
            }
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("not a number: '{t}'"))))
            .collect::<Result<_>>()?;
        if values.len() != 9 {
            return Err(err(format!("expected 9 columns, found {}", values.len())));
        }
        let f = values[0] * scale;
        if let Some(&prev) = net.f_grid.last() {
            if !(f > prev) {
                return Err(err(format!("frequency {f} Hz does not increase (previous {prev} Hz)")));
            }
        }
        let pair = |a: f64, b: f64| match format {
            Format::Ri => Complex64::new(a, b),
            Format::Ma => Complex64::from_polar(a, b.to_radians()),
            Format::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        };
        net.f_grid.push(f);
        net.s11.push(pair(values[1], values[2]));
        net.s21.push(pair(values[3], values[4]));
        net.s12.push(pair(values[5], values[6]));
        net.s22.push(pair(values[7], values[8]));
    }
    net.z_ref_1 = Complex64::new(z0, 0.0);
    net.z_ref_2 = net.z_ref_1;
    Ok(net)
}
