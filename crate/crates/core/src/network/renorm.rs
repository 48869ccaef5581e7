//! Power-wave renormalization and simultaneous conjugate matching.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SMatrix, TwoPortNetwork};
use crate::error::{invalid, Error, Result};

type C = Complex64;

fn mul(a: &SMatrix, b: &SMatrix) -> SMatrix {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn inv(a: &SMatrix) -> Option<SMatrix> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    if !(det.norm() > 1e-14 * scale * scale) {
        return None;
    }
    Some([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

fn diag(a: C, b: C) -> SMatrix {
    [[a, C::new(0.0, 0.0)], [C::new(0.0, 0.0), b]]
}

fn f_factor(z: C) -> C {
    C::new(0.5 / z.re.sqrt(), 0.0)
}

/// Re-expresses one S matrix from power-wave references `z_old` to `z_new`
/// through the impedance matrix.
pub fn s_at_reference(s: &SMatrix, z_old: [C; 2], z_new: [C; 2]) -> Result<SMatrix> {
    if z_old.iter().chain(z_new.iter()).any(|z| !(z.re > 0.0)) {
        return Err(invalid("reference impedances need a positive real part"));
    }
    let f_old = [f_factor(z_old[0]), f_factor(z_old[1])];
    let f_new = [f_factor(z_new[0]), f_factor(z_new[1])];
    // S' = F⁻¹·S·F, Z = (I − S')⁻¹·(S'·R + R*)
    let mut sp = *s;
    for (i, row) in sp.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = *v * f_old[j] / f_old[i];
        }
    }
    let one = C::new(1.0, 0.0);
    let i_minus = [[one - sp[0][0], -sp[0][1]], [-sp[1][0], one - sp[1][1]]];
    let r = diag(z_old[0], z_old[1]);
    let rc = diag(z_old[0].conj(), z_old[1].conj());
    let mut rhs = mul(&sp, &r);
    for i in 0..2 {
        rhs[i][i] += rc[i][i];
    }
    let z = mul(
        &inv(&i_minus).ok_or_else(|| Error::SolverFailure("network has no impedance matrix".into()))?,
        &rhs,
    );
    // S_new = F_n·(Z − R_n*)·(Z + R_n)⁻¹·F_n⁻¹
    let mut num = z;
    let mut den = z;
    for i in 0..2 {
        num[i][i] -= z_new[i].conj();
        den[i][i] += z_new[i];
    }
    let den_inv = inv(&den).ok_or_else(|| Error::SolverFailure("singular renormalization".into()))?;
    let mut out = mul(&num, &den_inv);
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = *v * f_new[i] / f_new[j];
        }
    }
    Ok(out)
}

/// Renormalizes every point of `net` to the references `(z_new_1, z_new_2)`.
pub fn renormalize(net: &TwoPortNetwork, z_new_1: C, z_new_2: C) -> Result<TwoPortNetwork> {
    net.validate()?;
    let z_old = [net.z_ref_1, net.z_ref_2];
    let z_new = [z_new_1, z_new_2];
    if z_new.iter().any(|z| !(z.re > 0.0)) {
        return Err(invalid("new reference impedances need a positive real part"));
    }
    let mut out = net.clone();
    out.z_ref_1 = z_new_1;
    out.z_ref_2 = z_new_2;
    if z_old == z_new {
        return Ok(out);
    }
    for i in 0..net.len() {
        let s = s_at_reference(&net.s(i), z_old, z_new)?;
        out.s11[i] = s[0][0];
        out.s12[i] = s[0][1];
        out.s21[i] = s[1][0];
        out.s22[i] = s[1][1];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Source impedance presented to port 1, Ω.
    pub z1: C,
    /// Load impedance presented to port 2, Ω.
    pub z2: C,
    pub f_match: f64,
    pub index: usize,
    /// Rollett stability factor at the match frequency.
    pub k_factor: f64,
    /// Set when the simultaneous match did not exist and each port was
    /// matched separately with the other terminated in 50 Ω.
    pub fallback: bool,
}

const Z50: C = C::new(50.0, 0.0);

fn gamma_to_z(g: C) -> C {
    Z50 * (1.0 + g) / (1.0 - g)
}

fn match_reflection(b: f64, c: C) -> Option<C> {
    if c.norm() < 1e-15 {
        return Some(C::new(0.0, 0.0));
    }
    let disc = b * b - 4.0 * c.norm_sqr();
    if disc < -1e-12 {
        return None;
    }
    let g = (b - disc.max(0.0).sqrt()) / (2.0 * c);
    (g.norm() < 1.0).then_some(g)
}

/// Simultaneous conjugate match at the frequency of largest `|s21|`.
pub fn conjugate_match(net: &TwoPortNetwork) -> Result<MatchResult> {
    net.validate()?;
    if net.is_empty() {
        return Err(invalid("empty network"));
    }
    let index = (0..net.len())
        .max_by(|&a, &b| net.s21[a].norm().total_cmp(&net.s21[b].norm()))
        .unwrap();
    if net.s21[index].norm() == 0.0 {
        return Err(invalid("network has no transmission to match"));
    }
    let s = s_at_reference(&net.s(index), [net.z_ref_1, net.z_ref_2], [Z50, Z50])?;
    let (s11, s12, s21, s22) = (s[0][0], s[0][1], s[1][0], s[1][1]);
    let delta = s11 * s22 - s12 * s21;
    let k = (1.0 - s11.norm_sqr() - s22.norm_sqr() + delta.norm_sqr()) / (2.0 * (s12 * s21).norm());
    let simultaneous = if k >= 1.0 - 1e-9 && delta.norm() < 1.0 {
        let b1 = 1.0 + s11.norm_sqr() - s22.norm_sqr() - delta.norm_sqr();
        let b2 = 1.0 + s22.norm_sqr() - s11.norm_sqr() - delta.norm_sqr();
        let c1 = s11 - delta * s22.conj();
        let c2 = s22 - delta * s11.conj();
        match (match_reflection(b1, c1), match_reflection(b2, c2)) {
            (Some(gs), Some(gl)) => Some((gamma_to_z(gs), gamma_to_z(gl))),
            _ => None,
        }
    } else {
        None
    };
    let f_match = net.f_grid[index];
    Ok(match simultaneous {
        Some((z1, z2)) => MatchResult {
            z1,
            z2,
            f_match,
            index,
            k_factor: k,
            fallback: false,
        },
        None => MatchResult {
            z1: gamma_to_z(s11).conj(),
            z2: gamma_to_z(s22).conj(),
            f_match,
            index,
            k_factor: k,
            fallback: true,
        },
    })
}
