//! Delta-function interdigital transducer model: array factor, radiation
//! conductance and susceptance, static capacitance and port impedance.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{A1Region, Bc, PlateSpec};
use crate::error::{invalid, Error, Result};
use crate::loading::{center_frequency_regions, electrode_resistance, short_region, LayerStack, TransducerGeometry};
use crate::materials::EPS11_LINBO3;

/// Minimum number of grid points across the main lobe for the discrete
/// Hilbert transform.
pub const MIN_LOBE_POINTS: usize = 64;

/// Default electromechanical coupling used to scale the radiation
/// conductance (from the measured open/short A1 velocities at 2.4 µm).
pub const DEFAULT_COUPLING_K2: f64 = 0.145;

/// Which short-region dispersion the transducer sees.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionSource {
    #[default]
    Massless,
    Loaded(LayerStack),
}

/// `(x_center, polarity)` of each of the `2N` electrodes.
pub fn electrode_positions(geom: &TransducerGeometry) -> Vec<(f64, f64)> {
    let half = 0.5 * geom.cell_length_lambda;
    (0..2 * geom.n_cells)
        .map(|k| {
            let p = if k % 2 == 0 { 1.0 } else { -1.0 };
            ((k as f64 + 0.25) * half, p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmittanceOptions {
    pub source: DispersionSource,
    /// k² scaling the peak radiation conductance.
    pub coupling_k2: f64,
    /// Capacitance per cell per unit aperture, F/m. Defaults to a
    /// parallel-plate estimate across the two gaps of each cell.
    pub c_cell: Option<f64>,
    /// Include the electrode series resistance in the port impedance.
    pub electrical_loading: bool,
}

impl Default for AdmittanceOptions {
    fn default() -> Self {
        Self {
            source: DispersionSource::Massless,
            coupling_k2: DEFAULT_COUPLING_K2,
            c_cell: None,
            electrical_loading: true,
        }
    }
}

/// A transducer with its dispersion regions and circuit constants resolved.
#[derive(Debug, Clone)]
pub struct TransducerModel {
    pub geom: TransducerGeometry,
    pub open: A1Region,
    pub short: A1Region,
    pub f_center: f64,
    positions: Vec<(f64, f64)>,
    centroid: f64,
    /// Static capacitance, F.
    pub c0: f64,
    /// Peak radiation conductance, S.
    pub g0: f64,
    /// Series electrode resistance, Ω.
    pub r_s: f64,
}

impl TransducerModel {
    pub fn new(geom: &TransducerGeometry, plate: &PlateSpec, opts: &AdmittanceOptions) -> Result<Self> {
        geom.validate()?;
        plate.validate()?;
        if !(opts.coupling_k2 >= 0.0) {
            return Err(invalid("coupling k2 must be non-negative"));
        }
        let open = plate.a1_region(Bc::Open);
        let short = match &opts.source {
            DispersionSource::Massless => short_region(plate, None)?,
            DispersionSource::Loaded(stack) => short_region(plate, Some(stack))?,
        };
        let f_center = center_frequency_regions(geom, &open, &short)?;
        let positions = electrode_positions(geom);
        let centroid = positions.iter().map(|p| p.0).sum::<f64>() / positions.len() as f64;
        let c_cell = match opts.c_cell {
            Some(c) if c > 0.0 => c,
            Some(c) => return Err(invalid(format!("c_cell must be positive, got {c}"))),
            None => 2.0 * EPS11_LINBO3 * plate.thickness_b / geom.gap_width(),
        };
        let c_s = c_cell * geom.aperture_w_a;
        let n = geom.n_cells as f64;
        let r_s = if opts.electrical_loading && geom.electrode_thickness > 0.0 {
            electrode_resistance(geom)?.1
        } else {
            0.0
        };
        Ok(Self {
            geom: geom.clone(),
            open,
            short,
            f_center,
            positions,
            centroid,
            c0: n * c_s,
            g0: 8.0 * opts.coupling_k2 * f_center * c_s * n * n,
            r_s,
        })
    }

    /// Duty-weighted complex wavenumber, extended to negative f so that the
    /// impulse response is real.
    pub fn beta_avg(&self, f: f64) -> Complex64 {
        let d = self.geom.duty;
        let b = |f: f64| self.short.beta(f) * d + self.open.beta(f) * (1.0 - d);
        if f >= 0.0 {
            b(f)
        } else {
            -b(-f).conj()
        }
    }

    /// Array factor `(1/2N)·Σ p_n·exp(-j·β·x_n)`.
    pub fn h(&self, f: f64) -> Complex64 {
        let beta = self.beta_avg(f);
        let sum: Complex64 = self
            .positions
            .iter()
            .map(|&(x, p)| (Complex64::new(0.0, -1.0) * beta * x).exp() * p)
            .sum();
        sum / self.positions.len() as f64
    }

    /// Array factor with its phase referenced to the electrode centroid.
    pub fn h_centered(&self, f: f64) -> Complex64 {
        self.h(f) * (Complex64::new(0.0, 1.0) * self.beta_avg(f) * self.centroid).exp()
    }

    pub fn ga(&self, f: f64) -> f64 {
        self.g0 * self.h(f).norm_sqr()
    }

    /// Average group velocity at the center frequency.
    pub fn vg_avg(&self) -> f64 {
        let d = self.geom.duty;
        let vg = |r: &A1Region| r.vg(self.f_center).unwrap_or(0.0);
        d * vg(&self.short) + (1.0 - d) * vg(&self.open)
    }

    /// Null-to-null width of the main lobe, Hz.
    pub fn main_lobe_width(&self) -> f64 {
        2.0 * self.vg_avg() / self.geom.length()
    }

    pub fn response(&self, f_grid: &[f64]) -> Result<TransducerResponse> {
        self.response_checked(f_grid, true)
    }

    /// [`Self::response`] with the main-lobe resolution check optional, for
    /// grids that deliberately miss the passband.
    pub fn response_checked(&self, f_grid: &[f64], check_lobe: bool) -> Result<TransducerResponse> {
        check_grid(f_grid)?;
        let lobe = self.main_lobe_width();
        let (lo, hi) = (self.f_center - 0.5 * lobe, self.f_center + 0.5 * lobe);
        let inside = f_grid.iter().filter(|&&f| f >= lo && f <= hi).count();
        if check_lobe && inside < MIN_LOBE_POINTS {
            return Err(Error::Resolution(format!(
                "{inside} grid points across the main lobe [{lo:.4e}, {hi:.4e}] Hz, need {MIN_LOBE_POINTS}"
            )));
        }
        let h: Vec<Complex64> = f_grid.iter().map(|&f| self.h(f)).collect();
        let ga: Vec<f64> = h.iter().map(|x| self.g0 * x.norm_sqr()).collect();
        let ba = hilbert(f_grid, &ga);
        Ok(TransducerResponse {
            f_grid: f_grid.to_vec(),
            h,
            ga,
            ba,
            c0: self.c0,
            r_s: self.r_s,
            g0: self.g0,
            f_center: self.f_center,
        })
    }
}

/// Sampled transducer response on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransducerResponse {
    pub f_grid: Vec<f64>,
    pub h: Vec<Complex64>,
    /// Radiation conductance, S.
    pub ga: Vec<f64>,
    /// Radiation susceptance, S.
    pub ba: Vec<f64>,
    /// Static capacitance, F.
    pub c0: f64,
    /// Series resistance, Ω.
    pub r_s: f64,
    /// Peak radiation conductance, S.
    pub g0: f64,
    pub f_center: f64,
}

impl TransducerResponse {
    pub fn admittance(&self, i: usize) -> Complex64 {
        let w = 2.0 * PI * self.f_grid[i];
        Complex64::new(self.ga[i], self.ba[i] + w * self.c0)
    }

    pub fn port_impedance(&self, i: usize) -> Complex64 {
        self.r_s + self.admittance(i).inv()
    }

    /// Port impedance at an arbitrary frequency. The conductance there comes
    /// from `model`; the susceptance from the same Hilbert transform with
    /// the point inserted into the grid.
    pub fn port_impedance_at(&self, model: &TransducerModel, f: f64) -> Complex64 {
        let pos = self.f_grid.partition_point(|&x| x < f);
        let (grid, ga, idx) = if self.f_grid.get(pos) == Some(&f) {
            (self.f_grid.clone(), self.ga.clone(), pos)
        } else {
            let mut grid = self.f_grid.clone();
            let mut ga = self.ga.clone();
            grid.insert(pos, f);
            ga.insert(pos, model.ga(f));
            (grid, ga, pos)
        };
        let ba = hilbert_point(&grid, &ga, idx);
        let y = Complex64::new(ga[idx], ba + 2.0 * PI * f * self.c0);
        self.r_s + y.inv()
    }

    /// CSV columns `f_hz, re_h, im_h, ga_s, ba_s`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["f_hz", "re_h", "im_h", "ga_s", "ba_s"])?;
        for i in 0..self.f_grid.len() {
            w.write_record([
                self.f_grid[i].to_string(),
                self.h[i].re.to_string(),
                self.h[i].im.to_string(),
                self.ga[i].to_string(),
                self.ba[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Array factor of one transducer at `f`.
pub fn array_response(geom: &TransducerGeometry, plate: &PlateSpec, f: f64, source: &DispersionSource) -> Result<Complex64> {
    let opts = AdmittanceOptions {
        source: source.clone(),
        ..Default::default()
    };
    Ok(TransducerModel::new(geom, plate, &opts)?.h(f))
}

/// Radiation immittance and static capacitance on `f_grid`.
pub fn admittance(
    geom: &TransducerGeometry,
    plate: &PlateSpec,
    f_grid: &[f64],
    opts: &AdmittanceOptions,
) -> Result<TransducerResponse> {
    TransducerModel::new(geom, plate, opts)?.response(f_grid)
}

pub(crate) fn check_grid(f_grid: &[f64]) -> Result<()> {
    if f_grid.len() < 2 {
        return Err(invalid("frequency grid needs at least two points"));
    }
    if f_grid.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(invalid("frequency grid must be finite and non-negative"));
    }
    if f_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("frequency grid must be strictly increasing"));
    }
    Ok(())
}

/// Discrete Hilbert transform `(1/π)·PV∫ g(f')/(f' − f) df'` over the grid.
pub fn hilbert(f: &[f64], g: &[f64]) -> Vec<f64> {
    (0..f.len()).map(|i| hilbert_point(f, g, i)).collect()
}

/// Singularity-subtracted quadrature: the smooth part `(g − g_i)/(f' − f_i)`
/// is integrated by trapezoids and the remainder `g_i·ln((f_N − f_i)/(f_i − f_0))`
/// in closed form.
fn hilbert_point(f: &[f64], g: &[f64], i: usize) -> f64 {
    let n = f.len();
    let gi = g[i];
    let slope = if i == 0 {
        (g[1] - g[0]) / (f[1] - f[0])
    } else if i == n - 1 {
        (g[n - 1] - g[n - 2]) / (f[n - 1] - f[n - 2])
    } else {
        (g[i + 1] - g[i - 1]) / (f[i + 1] - f[i - 1])
    };
    let integrand = |j: usize| if j == i { slope } else { (g[j] - gi) / (f[j] - f[i]) };
    let mut acc = 0.0;
    let mut prev = integrand(0);
    for j in 1..n {
        let cur = integrand(j);
        acc += 0.5 * (prev + cur) * (f[j] - f[j - 1]);
        prev = cur;
    }
    // clamp the log at the grid edges to half a step
    let above = (f[n - 1] - f[i]).max(0.5 * (f[n - 1] - f[n - 2]));
    let below = (f[i] - f[0]).max(0.5 * (f[1] - f[0]));
    (acc + gi * (above / below).ln()) / PI
}
