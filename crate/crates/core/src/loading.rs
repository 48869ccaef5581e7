//! Electrode effects: mass-loaded cutoff, composite velocity, transducer
//! center frequency and electrode resistance.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dispersion::{A1Region, Bc, PlateSpec};
use crate::error::{invalid, Error, Result};
use crate::materials::ElectrodeMaterial;
use crate::roots::{bisect, sign_change_brackets};

/// Upper end of the center-frequency search, Hz.
pub const CENTER_SEARCH_MAX_HZ: f64 = 20e9;

/// A metal film of thickness `metal_thickness_b_m` on the plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    pub plate: PlateSpec,
    pub metal: ElectrodeMaterial,
    pub metal_thickness_b_m: f64,
    /// Externally supplied metallized-region longitudinal velocity, which
    /// replaces the rule-of-mixtures estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_l_short_override: Option<f64>,
}

impl LayerStack {
    pub fn new(plate: PlateSpec, metal: ElectrodeMaterial, metal_thickness_b_m: f64) -> Result<Self> {
        let s = Self {
            plate,
            metal,
            metal_thickness_b_m,
            v_l_short_override: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.plate.validate()?;
        self.metal.validate()?;
        if !(self.metal_thickness_b_m >= 0.0) {
            return Err(invalid(format!(
                "metal thickness must be non-negative, got {}",
                self.metal_thickness_b_m
            )));
        }
        if let Some(v) = self.v_l_short_override {
            if !(v > 0.0) {
                return Err(invalid("v_l_short override must be positive"));
            }
        }
        Ok(())
    }

    fn t(&self) -> f64 {
        self.plate.thickness_b
    }

    fn k_ln(&self, f: f64) -> f64 {
        2.0 * PI * f / self.plate.short.v_s()
    }

    fn k_met(&self, f: f64) -> f64 {
        2.0 * PI * f / self.metal.v_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransducerGeometry {
    /// Cell length Λ, m.
    pub cell_length_lambda: f64,
    pub n_cells: usize,
    /// Metallized fraction of each cell.
    pub duty: f64,
    /// Aperture W_a, m.
    pub aperture_w_a: f64,
    /// Electrode thickness, m.
    pub electrode_thickness: f64,
    pub electrode: ElectrodeMaterial,
}

impl TransducerGeometry {
    pub fn new(cell_length_lambda: f64, n_cells: usize, aperture_w_a: f64, electrode_thickness: f64) -> Result<Self> {
        let g = Self {
            cell_length_lambda,
            n_cells,
            duty: 0.5,
            aperture_w_a,
            electrode_thickness,
            electrode: ElectrodeMaterial::aluminum(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_length_lambda > 0.0) {
            return Err(invalid(format!("cell length must be positive, got {}", self.cell_length_lambda)));
        }
        if self.n_cells == 0 {
            return Err(invalid("need at least one cell"));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(invalid(format!("duty must lie in (0, 1), got {}", self.duty)));
        }
        if !(self.aperture_w_a > 0.0) {
            return Err(invalid(format!("aperture must be positive, got {}", self.aperture_w_a)));
        }
        if !(self.electrode_thickness >= 0.0) {
            return Err(invalid("electrode thickness must be non-negative"));
        }
        self.electrode.validate()
    }

    /// Transducer length N·Λ.
    pub fn length(&self) -> f64 {
        self.n_cells as f64 * self.cell_length_lambda
    }

    pub fn l_open(&self) -> f64 {
        (1.0 - self.duty) * self.cell_length_lambda
    }

    pub fn l_short(&self) -> f64 {
        self.duty * self.cell_length_lambda
    }

    /// Width of one electrode; two electrodes share each metallized length.
    pub fn electrode_width(&self) -> f64 {
        0.5 * self.l_short()
    }

    /// Gap between neighbouring electrodes.
    pub fn gap_width(&self) -> f64 {
        0.5 * self.l_open()
    }
}

/// Thickness-shear cutoff of the plate under a metal film.
///
/// Solves `Z_met·tan(k_met·b) + Z_LN·tan(k_LN·t) = 0` (stress-free outer
/// surfaces, continuous stress and velocity at the interface), written in
/// cleared form so the tangent poles never produce false brackets, and
/// returns its first root above zero.
pub fn bilayer_cutoff_short(stack: &LayerStack) -> Result<f64> {
    stack.validate()?;
    let t = stack.t();
    let b = stack.metal_thickness_b_m;
    let z_ln = stack.plate.short.rho * stack.plate.short.v_s();
    let z_m = stack.metal.rho * stack.metal.v_s;
    let resid = |f: f64| {
        let a = stack.k_met(f) * b;
        let c = stack.k_ln(f) * t;
        z_m * a.sin() * c.cos() + z_ln * c.sin() * a.cos()
    };
    let f_hi = stack.plate.short.v_s() / t;
    let n = 4000;
    let xs: Vec<f64> = (1..=n).map(|i| f_hi * i as f64 / n as f64).collect();
    let brackets = sign_change_brackets(resid, &xs);
    let (lo, hi) = brackets
        .first()
        .copied()
        .ok_or_else(|| Error::SolverFailure(format!("no bilayer cutoff below {f_hi:.4e} Hz")))?;
    Ok(bisect(resid, lo, hi, 0.0))
}

/// Through-thickness shear-stress profile at the bilayer cutoff `f_c`,
/// sampled at `samples` evenly spaced depths over `[0, t + b]` and
/// normalized to unit peak magnitude.
pub fn stress_profile(stack: &LayerStack, f_c: f64, samples: usize) -> Vec<(f64, f64)> {
    let t = stack.t();
    let b = stack.metal_thickness_b_m;
    let k_ln = stack.k_ln(f_c);
    let k_m = stack.k_met(f_c);
    let s_ln = (k_ln * t).sin();
    let s_m = (k_m * b).sin();
    // T = sin(k_LN z) in the plate, B·sin(k_met (t + b - z)) in the film
    let amp_m = if s_m.abs() > 1e-300 { s_ln / s_m } else { 0.0 };
    let peak_ln = if k_ln * t >= 0.5 * PI { 1.0 } else { s_ln.abs() };
    let peak_m = if k_m * b >= 0.5 * PI { amp_m.abs() } else { s_ln.abs() };
    let peak = peak_ln.max(peak_m).max(f64::MIN_POSITIVE);
    let total = t + b;
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let z = total * i as f64 / (n - 1) as f64;
            let v = if z <= t {
                (k_ln * z).sin()
            } else {
                amp_m * (k_m * (total - z)).sin()
            };
            (z, v / peak)
        })
        .collect()
}

/// Rule-of-mixtures longitudinal velocity of the metallized plate,
/// `sqrt((t·c_LN + b·c_met) / (t·ρ_LN + b·ρ_met))` with `c = ρ·v_l²`.
pub fn composite_vl_short(stack: &LayerStack) -> f64 {
    if let Some(v) = stack.v_l_short_override {
        return v;
    }
    let t = stack.t();
    let b = stack.metal_thickness_b_m;
    let ln = &stack.plate.short;
    let m = &stack.metal;
    let c_ln = ln.rho * ln.v_l() * ln.v_l();
    let c_m = m.rho * m.v_l * m.v_l;
    ((t * c_ln + b * c_m) / (t * ln.rho + b * m.rho)).sqrt()
}

/// Decoupled A1 parameters of the metallized region, using the loaded
/// stack when one is given.
pub fn short_region(plate: &PlateSpec, loaded: Option<&LayerStack>) -> Result<A1Region> {
    match loaded {
        None => Ok(plate.a1_region(Bc::Short)),
        Some(stack) => Ok(A1Region {
            f_c: bilayer_cutoff_short(stack)?,
            v_l: composite_vl_short(stack),
        }),
    }
}

/// Frequency at which one cell holds exactly one acoustic wavelength,
/// `L_open·√(f² − f_co²)/v_lo + L_short·√(f² − f_cs²)/v_ls = 1`.
pub fn center_frequency(geom: &TransducerGeometry, plate: &PlateSpec, loaded: Option<&LayerStack>) -> Result<f64> {
    geom.validate()?;
    let open = plate.a1_region(Bc::Open);
    let short = short_region(plate, loaded)?;
    center_frequency_regions(geom, &open, &short)
}

pub(crate) fn center_frequency_regions(geom: &TransducerGeometry, open: &A1Region, short: &A1Region) -> Result<f64> {
    let phase = |f: f64| {
        let k = |r: &A1Region| (f * f - r.f_c * r.f_c).max(0.0).sqrt() / r.v_l;
        geom.l_open() * k(open) + geom.l_short() * k(short) - 1.0
    };
    let lo = open.f_c.max(short.f_c);
    let hi = CENTER_SEARCH_MAX_HZ;
    if !(phase(lo) < 0.0 && phase(hi) > 0.0) {
        return Err(Error::DesignInfeasible(format!(
            "no center frequency for cell length {:.4e} m between {lo:.4e} and {hi:.4e} Hz",
            geom.cell_length_lambda
        )));
    }
    Ok(bisect(phase, lo, hi, 0.0))
}

/// Electrode resistance `R_ele = 2ρ_s·W_a / (3·t·w_e)` and the series port
/// resistance `R_s = 2·R_ele/N`, returned as `(r_ele, r_s)`.
pub fn electrode_resistance(geom: &TransducerGeometry) -> Result<(f64, f64)> {
    geom.validate()?;
    if !(geom.electrode_thickness > 0.0) {
        return Err(invalid("electrode resistance needs a positive electrode thickness"));
    }
    let rho_s = geom.electrode.film_resistivity();
    let r_ele = 2.0 * rho_s * geom.aperture_w_a / (3.0 * geom.electrode_thickness * geom.electrode_width());
    Ok((r_ele, 2.0 * r_ele / geom.n_cells as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSweepRow {
    pub lambda_m: f64,
    pub n_cells: usize,
    pub f_center_hz: f64,
    pub r_s_ohm: f64,
    pub f_c_short_loaded_hz: f64,
}

/// Evaluates every `(Λ, N)` pair on top of `template`. Infeasible designs
/// are skipped and reported in the returned warnings.
pub fn design_sweep(
    plate: &PlateSpec,
    template: &TransducerGeometry,
    lambdas: &[f64],
    n_cells: &[usize],
    loaded: Option<&LayerStack>,
) -> Result<(Vec<DesignSweepRow>, Vec<String>)> {
    let f_c_short = short_region(plate, loaded)?.f_c;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &lambda in lambdas {
        for &n in n_cells {
            let geom = TransducerGeometry {
                cell_length_lambda: lambda,
                n_cells: n,
                ..template.clone()
            };
            let f_center = match center_frequency(&geom, plate, loaded) {
                Ok(f) => f,
                Err(e) => {
                    warnings.push(format!("lambda = {lambda:.4e} m, N = {n}: {e}"));
                    continue;
                }
            };
            let r_s = if geom.electrode_thickness > 0.0 {
                electrode_resistance(&geom)?.1
            } else {
                0.0
            };
            rows.push(DesignSweepRow {
                lambda_m: lambda,
                n_cells: n,
                f_center_hz: f_center,
                r_s_ohm: r_s,
                f_c_short_loaded_hz: f_c_short,
            });
        }
    }
    Ok((rows, warnings))
}

/// CSV columns `lambda_um, n_cells, f_center_hz, r_s_ohm, f_c_short_loaded_hz`.
pub fn write_design_sweep_csv<W: Write>(rows: &[DesignSweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda_um", "n_cells", "f_center_hz", "r_s_ohm", "f_c_short_loaded_hz"])?;
    for r in rows {
        w.write_record([
            (r.lambda_m * 1e6).to_string(),
            r.n_cells.to_string(),
            r.f_center_hz.to_string(),
            r.r_s_ohm.to_string(),
            r.f_c_short_loaded_hz.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
