//! Lamb-wave dispersion in a free plate.
//!
//! Two models live here: the exact isotropic Rayleigh–Lamb equations, solved
//! by sign-change scanning and bisection, and the decoupled A1 model in which
//! the thickness-shear cutoff and the longitudinal velocity fully describe
//! the branch (`f² = f_c² + v_l²/λ²`).

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::materials::{builtin_linbo3, MaterialSet};
use crate::roots::{bisect, log_grid, sign_change_brackets};

/// Electrical boundary condition on both plate surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Short,
    Open,
}

impl Bc {
    pub const BOTH: [Bc; 2] = [Bc::Short, Bc::Open];
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bc::Short => "short",
            Bc::Open => "open",
        })
    }
}

impl FromStr for Bc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "short" => Ok(Bc::Short),
            "open" => Ok(Bc::Open),
            other => Err(invalid(format!("unknown boundary condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    fn prefix(self) -> char {
        match self {
            Symmetry::Symmetric => 'S',
            Symmetry::Antisymmetric => 'A',
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Symmetric => "sym",
            Symmetry::Antisymmetric => "antisym",
        })
    }
}

/// A piezoelectric plate of thickness `thickness_b` with one material set
/// per boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateSpec {
    /// Plate thickness, m.
    pub thickness_b: f64,
    pub short: MaterialSet,
    pub open: MaterialSet,
}

impl PlateSpec {
    pub fn new(thickness_b: f64, short: MaterialSet, open: MaterialSet) -> Result<Self> {
        let plate = Self {
            thickness_b,
            short,
            open,
        };
        plate.validate()?;
        Ok(plate)
    }

    /// Z-cut LiNbO₃ with the built-in constants.
    pub fn linbo3(thickness_b: f64) -> Result<Self> {
        let (short, open) = builtin_linbo3();
        Self::new(thickness_b, short, open)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness_b > 0.0) {
            return Err(invalid(format!("plate thickness must be positive, got {}", self.thickness_b)));
        }
        self.short.validate()?;
        self.open.validate()
    }

    pub fn material(&self, bc: Bc) -> &MaterialSet {
        match bc {
            Bc::Short => &self.short,
            Bc::Open => &self.open,
        }
    }

    /// Decoupled A1 parameters for one boundary condition.
    pub fn a1_region(&self, bc: Bc) -> A1Region {
        let m = self.material(bc);
        A1Region {
            f_c: m.v_s() / (2.0 * self.thickness_b),
            v_l: m.v_l(),
        }
    }
}

/// The two numbers that define a decoupled A1 branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A1Region {
    /// Cutoff frequency, Hz.
    pub f_c: f64,
    /// Asymptotic (longitudinal) velocity, m/s.
    pub v_l: f64,
}

impl A1Region {
    pub fn freq(&self, lambda: f64) -> f64 {
        self.f_c.hypot(self.v_l / lambda)
    }

    /// Complex wavenumber: real above cutoff, `-j·α` below so that
    /// `exp(-j·β·x)` decays along +x.
    pub fn beta(&self, f: f64) -> Complex64 {
        let d = f * f - self.f_c * self.f_c;
        let k = 2.0 * PI / self.v_l;
        if d >= 0.0 {
            Complex64::new(k * d.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, -k * (-d).sqrt())
        }
    }

    /// `dβ/df` above cutoff, s/m·rad; infinite at and below cutoff.
    pub fn dbeta_df(&self, f: f64) -> f64 {
        let d = f * f - self.f_c * self.f_c;
        if d <= 0.0 {
            return f64::INFINITY;
        }
        2.0 * PI / self.v_l * f / d.sqrt()
    }

    pub fn vp(&self, f: f64) -> Result<f64> {
        let s = self.cutoff_factor(f)?;
        Ok(self.v_l / s)
    }

    pub fn vg(&self, f: f64) -> Result<f64> {
        let s = self.cutoff_factor(f)?;
        Ok(self.v_l * s)
    }

    pub fn evanescent_decay(&self, f: f64) -> Result<f64> {
        if f >= self.f_c {
            return Err(Error::AboveCutoff { f_hz: f, f_c_hz: self.f_c });
        }
        Ok(2.0 * PI / self.v_l * (self.f_c * self.f_c - f * f).sqrt())
    }

    fn cutoff_factor(&self, f: f64) -> Result<f64> {
        if !(f > self.f_c) {
            return Err(Error::BelowCutoff { f_hz: f, f_c_hz: self.f_c });
        }
        let r = self.f_c / f;
        Ok((1.0 - r * r).sqrt())
    }
}

/// A1 cutoff `v_s / (2b)`.
pub fn a1_cutoff(plate: &PlateSpec, bc: Bc) -> f64 {
    plate.a1_region(bc).f_c
}

/// Decoupled A1 frequency at wavelength `lambda`.
pub fn a1_freq(lambda: f64, plate: &PlateSpec, bc: Bc) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("wavelength must be positive, got {lambda}")));
    }
    Ok(plate.a1_region(bc).freq(lambda))
}

pub fn a1_vp(f: f64, plate: &PlateSpec, bc: Bc) -> Result<f64> {
    plate.a1_region(bc).vp(f)
}

pub fn a1_vg(f: f64, plate: &PlateSpec, bc: Bc) -> Result<f64> {
    plate.a1_region(bc).vg(f)
}

/// Imaginary wavenumber below cutoff; amplitude decays as `exp(-α·d)`.
pub fn evanescent_decay(f: f64, plate: &PlateSpec, bc: Bc) -> Result<f64> {
    plate.a1_region(bc).evanescent_decay(f)
}

/// Coupling from open (`v_f`) and short (`v_m`) phase velocities.
pub fn k2_from_velocities(v_f: f64, v_m: f64) -> Result<f64> {
    if !(v_m > 0.0) || v_f < v_m {
        return Err(invalid(format!("need v_f >= v_m > 0, got v_f = {v_f}, v_m = {v_m}")));
    }
    Ok((v_f * v_f - v_m * v_m) / (v_m * v_m))
}

// Entire functions of x = k² used to continue the trig terms through k² < 0.

fn cos_c(x: f64) -> f64 {
    if x >= 0.0 {
        x.sqrt().cos()
    } else {
        (-x).sqrt().cosh()
    }
}

fn sinc_c(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0 - x / 6.0;
    }
    if x > 0.0 {
        let r = x.sqrt();
        r.sin() / r
    } else {
        let r = (-x).sqrt();
        r.sinh() / r
    }
}

fn ksin_c(x: f64) -> f64 {
    if x >= 0.0 {
        let r = x.sqrt();
        r * r.sin()
    } else {
        let r = (-x).sqrt();
        -r * r.sinh()
    }
}

fn growth(x: f64) -> f64 {
    if x < 0.0 {
        (-x).sqrt().cosh()
    } else {
        1.0
    }
}

/// Normalized Rayleigh–Lamb residual at `(f, beta)`.
///
/// The frequency equation is cleared of its tangent denominators and divided
/// by the transverse wavenumber that would otherwise introduce a spurious
/// root, leaving a pole-free real function that vanishes exactly on the
/// dispersion branches. It is made dimensionless with the half thickness and
/// scaled so the terms stay O(1) in the evanescent region.
pub fn rayleigh_lamb_residual(f: f64, beta: f64, plate: &PlateSpec, bc: Bc, symmetry: Symmetry) -> f64 {
    let m = plate.material(bc);
    let h = 0.5 * plate.thickness_b;
    let w = 2.0 * PI * f;
    let b2 = (beta * h).powi(2);
    let p2 = (w * h / m.v_l()).powi(2) - b2;
    let q2 = (w * h / m.v_s()).powi(2) - b2;
    let shear = (q2 - b2).powi(2);
    let raw = match symmetry {
        Symmetry::Antisymmetric => 4.0 * b2 * ksin_c(q2) * cos_c(p2) + shear * sinc_c(p2) * cos_c(q2),
        Symmetry::Symmetric => shear * sinc_c(q2) * cos_c(p2) + 4.0 * b2 * ksin_c(p2) * cos_c(q2),
    };
    let scale = (b2 + q2.abs()).powi(2).max(f64::MIN_POSITIVE) * growth(p2) * growth(q2);
    raw / scale
}

/// One sample of a dispersion branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    /// Frequency, Hz.
    pub f: f64,
    /// Real wavenumber, rad/m.
    pub beta: f64,
    /// Evanescent decay constant, 1/m.
    pub beta_imag: f64,
    pub vp: Option<f64>,
    pub vg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub mode_label: String,
    pub bc: Bc,
    pub points: Vec<DispersionPoint>,
    /// Set when neighbouring roots came close enough that branch order at
    /// some β may be unreliable.
    pub crossing_ambiguous: bool,
    pub warnings: Vec<String>,
}

/// Scan density for the sign-change search, points per decade of f.
pub const SCAN_POINTS_PER_DECADE: usize = 2000;

/// Solves the lowest `n_branches` Rayleigh–Lamb branches of one symmetry on
/// the uniform grid `β_k = beta_max·k/grid`, `k = 1..=grid`.
///
/// At each β the residual is scanned in f (log-spaced, starting four decades
/// below `β·v_s/2π` so the fundamental branch is always caught) up to
/// `f_max`, and each bracket is bisected to floating-point resolution.
/// Branches are labelled by frequency order.
pub fn solve_branches(
    plate: &PlateSpec,
    bc: Bc,
    symmetry: Symmetry,
    f_max: f64,
    n_branches: usize,
    beta_max: f64,
    grid: usize,
) -> Result<Vec<DispersionCurve>> {
    plate.validate()?;
    if !(f_max > 0.0 && beta_max > 0.0) || grid == 0 {
        return Err(invalid("f_max, beta_max and grid must be positive"));
    }
    let v_s = plate.material(bc).v_s();
    let mut curves: Vec<DispersionCurve> = (0..n_branches)
        .map(|k| DispersionCurve {
            mode_label: format!("{}{}", symmetry.prefix(), k),
            bc,
            points: Vec::new(),
            crossing_ambiguous: false,
            warnings: Vec::new(),
        })
        .collect();

    for k in 1..=grid {
        let beta = beta_max * k as f64 / grid as f64;
        let f_lo = (1e-4 * beta * v_s / (2.0 * PI)).min(f_max * 0.5);
        let xs = log_grid(f_lo, f_max, SCAN_POINTS_PER_DECADE);
        let resid = |f: f64| rayleigh_lamb_residual(f, beta, plate, bc, symmetry);
        let brackets = sign_change_brackets(resid, &xs);
        let roots: Vec<f64> = brackets
            .iter()
            .take(n_branches)
            .map(|&(lo, hi)| bisect(resid, lo, hi, 0.0))
            .collect();

        // neighbouring brackets only one scan cell apart may hide a crossing
        for w in brackets.windows(2).take(n_branches.saturating_sub(1)) {
            if w[1].0 <= w[0].1 {
                for c in curves.iter_mut() {
                    c.crossing_ambiguous = true;
                }
            }
        }

        for (idx, curve) in curves.iter_mut().enumerate() {
            match roots.get(idx) {
                Some(&f) => {
                    let vg = implicit_group_velocity(f, beta, plate, bc, symmetry);
                    curve.points.push(DispersionPoint {
                        f,
                        beta,
                        beta_imag: 0.0,
                        vp: Some(2.0 * PI * f / beta),
                        vg,
                    });
                }
                None => curve.warnings.push(format!(
                    "no root below f_max = {f_max:.4e} Hz at beta = {beta:.6e} rad/m"
                )),
            }
        }
    }
    for c in curves.iter_mut() {
        c.points.sort_by(|a, b| a.f.total_cmp(&b.f));
    }
    Ok(curves)
}

/// `dω/dβ = -2π·(∂R/∂β)/(∂R/∂f)` from central differences of the residual.
fn implicit_group_velocity(f: f64, beta: f64, plate: &PlateSpec, bc: Bc, sym: Symmetry) -> Option<f64> {
    let r = |f: f64, b: f64| rayleigh_lamb_residual(f, b, plate, bc, sym);
    let df = f * 1e-6;
    let db = beta * 1e-6;
    let r_f = (r(f + df, beta) - r(f - df, beta)) / (2.0 * df);
    let r_b = (r(f, beta + db) - r(f, beta - db)) / (2.0 * db);
    let vg = -2.0 * PI * r_b / r_f;
    (r_f != 0.0 && vg.is_finite()).then_some(vg)
}

/// Samples the decoupled A1 branch on `f_grid`, including the evanescent
/// part below cutoff (where `beta = 0` and `vp`/`vg` are absent).
pub fn a1_decoupled_curve(plate: &PlateSpec, bc: Bc, f_grid: &[f64]) -> DispersionCurve {
    let region = plate.a1_region(bc);
    let points = f_grid
        .iter()
        .filter(|&&f| f > 0.0)
        .map(|&f| {
            if f > region.f_c {
                DispersionPoint {
                    f,
                    beta: region.beta(f).re,
                    beta_imag: 0.0,
                    vp: region.vp(f).ok(),
                    vg: region.vg(f).ok(),
                }
            } else {
                DispersionPoint {
                    f,
                    beta: 0.0,
                    beta_imag: region.evanescent_decay(f).unwrap_or(0.0),
                    vp: None,
                    vg: None,
                }
            }
        })
        .collect();
    DispersionCurve {
        mode_label: "A1 (decoupled)".into(),
        bc,
        points,
        crossing_ambiguous: false,
        warnings: Vec::new(),
    }
}

/// Writes curves as CSV with columns
/// `f_hz, beta_rad_per_m, beta_imag_rad_per_m, vp_m_per_s, vg_m_per_s, mode, bc`.
pub fn write_curves_csv<W: Write>(curves: &[DispersionCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "f_hz",
        "beta_rad_per_m",
        "beta_imag_rad_per_m",
        "vp_m_per_s",
        "vg_m_per_s",
        "mode",
        "bc",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for c in curves {
        for p in &c.points {
            w.write_record([
                p.f.to_string(),
                p.beta.to_string(),
                p.beta_imag.to_string(),
                opt(p.vp),
                opt(p.vg),
                c.mode_label.clone(),
                c.bc.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn plate() -> PlateSpec {
        PlateSpec::linbo3(490e-9).unwrap()
    }

    #[test]
    fn cutoffs() {
        let p = plate();
        let fs = a1_cutoff(&p, Bc::Short);
        let fo = a1_cutoff(&p, Bc::Open);
        assert!((fs / 3.646e9 - 1.0).abs() < 1e-3, "{fs}");
        assert!((fo / 4.588e9 - 1.0).abs() < 1e-3, "{fo}");
        assert!((fs / 3.64e9 - 1.0).abs() < 5e-3);
        assert!((fo / 4.59e9 - 1.0).abs() < 5e-3);
        let thick = PlateSpec::linbo3(980e-9).unwrap();
        assert_relative_eq!(a1_cutoff(&thick, Bc::Open), 0.5 * fo, max_relative = 1e-15);
    }

    #[test]
    fn decoupled_frequency() {
        let p = plate();
        let fo = a1_freq(2.4e-6, &p, Bc::Open).unwrap();
        let fs = a1_freq(2.4e-6, &p, Bc::Short).unwrap();
        assert!((fo / 5.39e9 - 1.0).abs() < 2e-3, "{fo}");
        assert!((fs / 4.56e9 - 1.0).abs() < 2e-3, "{fs}");
        let far = a1_freq(1.0, &p, Bc::Open).unwrap();
        assert_relative_eq!(far, a1_cutoff(&p, Bc::Open), max_relative = 1e-9);
        assert!(a1_freq(0.0, &p, Bc::Open).is_err());
    }

    #[test]
    fn velocities_and_limits() {
        let p = plate();
        let vp = a1_vp(5.0e9, &p, Bc::Short).unwrap();
        assert!((vp - 9603.0).abs() < 5.0, "{vp}");
        let vg = a1_vg(5.0e9, &p, Bc::Open).unwrap();
        assert!((vg - 2702.0).abs() < 5.0, "{vg}");
        assert!((a1_vp(1e15, &p, Bc::Open).unwrap() - 6795.0).abs() < 1e-3);
        let fc = a1_cutoff(&p, Bc::Open);
        assert!(a1_vp(fc * (1.0 + 1e-12), &p, Bc::Open).unwrap() > 1e9);
        assert!(a1_vg(fc * (1.0 + 1e-12), &p, Bc::Open).unwrap() < 1e-2);
        assert!(matches!(a1_vp(fc, &p, Bc::Open), Err(Error::BelowCutoff { .. })));
        assert!(matches!(a1_vg(0.5 * fc, &p, Bc::Open), Err(Error::BelowCutoff { .. })));
    }

    #[test]
    fn evanescent() {
        let p = plate();
        let fc = a1_cutoff(&p, Bc::Open);
        let a = evanescent_decay(4.0e9, &p, Bc::Open).unwrap();
        assert!((a / 2.08e6 - 1.0).abs() < 5e-3, "{a}");
        assert!(matches!(evanescent_decay(fc, &p, Bc::Open), Err(Error::AboveCutoff { .. })));
        assert!(evanescent_decay(fc * (1.0 - 1e-12), &p, Bc::Open).unwrap() < 1e3);
        assert!(evanescent_decay(3.0e9, &p, Bc::Open).unwrap() > a);
    }

    #[test]
    fn coupling() {
        assert!((k2_from_velocities(12520.0, 11700.0).unwrap() - 0.145).abs() < 1e-3);
        assert_eq!(k2_from_velocities(5000.0, 5000.0).unwrap(), 0.0);
        assert!(k2_from_velocities(4000.0, 5000.0).is_err());
        assert!(k2_from_velocities(4000.0, 0.0).is_err());
        // decoupled model at λ = 2.4 µm overestimates coupling
        let p = plate();
        let lam = 2.4e-6;
        let v_f = a1_freq(lam, &p, Bc::Open).unwrap() * lam;
        let v_m = a1_freq(lam, &p, Bc::Short).unwrap() * lam;
        let k2 = k2_from_velocities(v_f, v_m).unwrap();
        assert!((k2 - 0.40).abs() < 0.01, "{k2}");
    }

    #[test]
    fn residual_changes_sign_at_shear_cutoff() {
        let p = plate();
        let fc = a1_cutoff(&p, Bc::Short);
        let lo = rayleigh_lamb_residual(fc * 0.999, 0.0, &p, Bc::Short, Symmetry::Antisymmetric);
        let hi = rayleigh_lamb_residual(fc * 1.001, 0.0, &p, Bc::Short, Symmetry::Antisymmetric);
        assert!(lo * hi < 0.0);
        let root = bisect(
            |f| rayleigh_lamb_residual(f, 0.0, &p, Bc::Short, Symmetry::Antisymmetric),
            fc * 0.999,
            fc * 1.001,
            0.0,
        );
        assert_relative_eq!(root, fc, max_relative = 1e-12);
    }

    #[test]
    fn solved_branches_lie_on_roots() {
        let p = plate();
        let beta_max = 2.0 * PI * 0.25 / p.thickness_b;
        for bc in Bc::BOTH {
            for sym in [Symmetry::Antisymmetric, Symmetry::Symmetric] {
                let curves = solve_branches(&p, bc, sym, 15e9, 3, beta_max, 20).unwrap();
                for c in &curves {
                    for pt in &c.points {
                        let r = rayleigh_lamb_residual(pt.f, pt.beta, &p, bc, sym);
                        assert!(r.abs() < 1e-9, "{} {bc} residual {r} at {}", c.mode_label, pt.f);
                    }
                }
            }
        }
    }

    #[test]
    fn a1_branch_approaches_cutoff() {
        let p = plate();
        for (bc, target) in [(Bc::Short, 3.646e9), (Bc::Open, 4.588e9)] {
            let beta_max = 2.0 * PI * 0.25 / p.thickness_b;
            let curves = solve_branches(&p, bc, Symmetry::Antisymmetric, 15e9, 2, beta_max, 400).unwrap();
            let a1 = &curves[1];
            assert_eq!(a1.mode_label, "A1");
            let f_low = a1.points[0].f;
            assert!((f_low / target - 1.0).abs() < 5e-3, "{bc}: {f_low}");
        }
    }

    #[test]
    fn a1_branch_tracks_decoupled_model_at_small_thickness() {
        // the decoupled model stays within 2 % of the exact branch for
        // h/λ up to ~0.14 in both boundary conditions
        let p = plate();
        let beta_max = 2.0 * PI * 0.14 / p.thickness_b;
        for bc in Bc::BOTH {
            let curves = solve_branches(&p, bc, Symmetry::Antisymmetric, 15e9, 2, beta_max, 50).unwrap();
            for pt in &curves[1].points {
                let lam = 2.0 * PI / pt.beta;
                let model = a1_freq(lam, &p, bc).unwrap();
                assert!((pt.f / model - 1.0).abs() < 0.02, "{bc} h/λ={}", p.thickness_b / lam);
            }
        }
    }

    #[test]
    fn full_solver_group_velocity_is_consistent() {
        let p = plate();
        let beta_max = 2.0 * PI * 0.2 / p.thickness_b;
        let c = solve_branches(&p, Bc::Open, Symmetry::Antisymmetric, 15e9, 2, beta_max, 40).unwrap();
        let pts = &c[1].points;
        for w in pts.windows(3) {
            let fd = 2.0 * PI * (w[2].f - w[0].f) / (w[2].beta - w[0].beta);
            let vg = w[1].vg.unwrap();
            assert!((vg / fd - 1.0).abs() < 1e-2, "{vg} vs {fd}");
        }
    }

    #[test]
    fn brute_force_lattice_sign_changes_are_near_branches() {
        let p = plate();
        let bc = Bc::Short;
        let sym = Symmetry::Antisymmetric;
        let f_max = 12e9;
        let nb = 60;
        let beta_max = 2.0 * PI * 0.3 / p.thickness_b;
        let curves = solve_branches(&p, bc, sym, f_max, 6, beta_max, nb).unwrap();
        let nf = 240;
        let df = f_max / nf as f64;
        for k in 1..=nb {
            let beta = beta_max * k as f64 / nb as f64;
            let solved: Vec<f64> = curves
                .iter()
                .filter_map(|c| c.points.iter().find(|pt| pt.beta == beta).map(|pt| pt.f))
                .collect();
            for i in 1..nf {
                let f0 = df * i as f64;
                let f1 = f0 + df;
                let a = rayleigh_lamb_residual(f0, beta, &p, bc, sym);
                let b = rayleigh_lamb_residual(f1, beta, &p, bc, sym);
                if a * b < 0.0 {
                    assert!(
                        solved.iter().any(|&f| f >= f0 - df && f <= f1 + df),
                        "unsolved sign change in [{f0}, {f1}] at beta {beta}"
                    );
                }
            }
        }
    }

    #[test]
    fn decoupled_curve_below_and_above_cutoff() {
        let p = plate();
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 * 0.1e9).collect();
        let c = a1_decoupled_curve(&p, Bc::Open, &grid);
        assert_eq!(c.points.len(), 100);
        for pt in &c.points {
            assert!(pt.beta >= 0.0 && pt.beta_imag >= 0.0);
            assert!(pt.beta == 0.0 || pt.beta_imag == 0.0);
        }
        let mut buf = Vec::new();
        write_curves_csv(&[c], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("f_hz,beta_rad_per_m,beta_imag_rad_per_m,vp_m_per_s,vg_m_per_s,mode,bc\n"));
        assert_eq!(text.lines().count(), 101);
    }

    proptest! {
        #[test]
        fn residual_is_even_in_beta(f in 1e8f64..2e10, beta in 0.0f64..2e7) {
            let p = plate();
            for sym in [Symmetry::Antisymmetric, Symmetry::Symmetric] {
                let a = rayleigh_lamb_residual(f, beta, &p, Bc::Open, sym);
                let b = rayleigh_lamb_residual(f, -beta, &p, Bc::Open, sym);
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn group_times_phase_velocity_is_vl_squared(x in 1.0001f64..10.0) {
            let p = plate();
            for bc in Bc::BOTH {
                let r = p.a1_region(bc);
                let f = r.f_c * x;
                let prod = r.vg(f).unwrap() * r.vp(f).unwrap();
                prop_assert!((prod / (r.v_l * r.v_l) - 1.0).abs() < 1e-14);
            }
        }

        #[test]
        fn analytic_group_velocity_matches_finite_difference(x in 1.05f64..4.0) {
            // ω(β) obtained by inverting the decoupled dispersion numerically
            let p = plate();
            let r = p.a1_region(Bc::Open);
            let f = r.f_c * x;
            let beta = r.beta(f).re;
            let omega_of_beta = |b: f64| {
                let lam = 2.0 * PI / b;
                2.0 * PI * a1_freq(lam, &p, Bc::Open).unwrap()
            };
            let h = beta * 1e-5;
            let fd = (omega_of_beta(beta + h) - omega_of_beta(beta - h)) / (2.0 * h);
            let vg = a1_vg(f, &p, Bc::Open).unwrap();
            prop_assert!((fd / vg - 1.0).abs() < 1e-6);
        }
    }
}
