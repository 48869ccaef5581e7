//! Browser bindings: A1 dispersion, a delay line passband, and the
//! center frequency against cell length.

use adl_core::dispersion::Bc;
use adl_core::extraction::group_delay;
use adl_core::loading::{center_frequency, TransducerGeometry};
use adl_core::network::{synthesize, AdlDesign};
use adl_core::PlateSpec;
use wasm_bindgen::prelude::*;

fn err(e: adl_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Decoupled A1 curves for both boundary conditions over a wavelength range.
#[wasm_bindgen]
pub struct Dispersion {
    lambda_um: Vec<f64>,
    f_short_ghz: Vec<f64>,
    f_open_ghz: Vec<f64>,
    vg_open: Vec<f64>,
    cutoff_short_ghz: f64,
    cutoff_open_ghz: f64,
}

#[wasm_bindgen]
impl Dispersion {
    #[wasm_bindgen(getter)]
    pub fn lambda_um(&self) -> Vec<f64> {
        self.lambda_um.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn f_short_ghz(&self) -> Vec<f64> {
        self.f_short_ghz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn f_open_ghz(&self) -> Vec<f64> {
        self.f_open_ghz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn vg_open(&self) -> Vec<f64> {
        self.vg_open.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn cutoff_short_ghz(&self) -> f64 {
        self.cutoff_short_ghz
    }
    #[wasm_bindgen(getter)]
    pub fn cutoff_open_ghz(&self) -> f64 {
        self.cutoff_open_ghz
    }
}

#[wasm_bindgen]
pub fn a1_dispersion(thickness_um: f64, lambda_min_um: f64, lambda_max_um: f64, points: usize) -> Result<Dispersion, JsError> {
    let plate = PlateSpec::linbo3(thickness_um * 1e-6).map_err(err)?;
    if !(lambda_min_um > 0.0 && lambda_max_um > lambda_min_um) {
        return Err(JsError::new("need 0 < lambda_min < lambda_max"));
    }
    let short = plate.a1_region(Bc::Short);
    let open = plate.a1_region(Bc::Open);
    let lambda_um = linspace(lambda_min_um, lambda_max_um, points);
    let f_short_ghz = lambda_um.iter().map(|l| short.freq(l * 1e-6) / 1e9).collect();
    let f_open: Vec<f64> = lambda_um.iter().map(|l| open.freq(l * 1e-6)).collect();
    let vg_open = f_open.iter().map(|&f| open.vg(f).unwrap_or(0.0)).collect();
    Ok(Dispersion {
        lambda_um,
        f_short_ghz,
        f_open_ghz: f_open.iter().map(|f| f / 1e9).collect(),
        vg_open,
        cutoff_short_ghz: short.f_c / 1e9,
        cutoff_open_ghz: open.f_c / 1e9,
    })
}

/// Insertion loss and group delay of a synthesized delay line.
#[wasm_bindgen]
pub struct Passband {
    f_ghz: Vec<f64>,
    il_db: Vec<f64>,
    delay_ns: Vec<f64>,
    f_center_ghz: f64,
}

#[wasm_bindgen]
impl Passband {
    #[wasm_bindgen(getter)]
    pub fn f_ghz(&self) -> Vec<f64> {
        self.f_ghz.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn il_db(&self) -> Vec<f64> {
        self.il_db.clone()
    }
    /// Group delay in ns; NaN where undefined.
    #[wasm_bindgen(getter)]
    pub fn delay_ns(&self) -> Vec<f64> {
        self.delay_ns.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn f_center_ghz(&self) -> f64 {
        self.f_center_ghz
    }
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn passband(
    lambda_um: f64,
    n_cells: usize,
    gap_um: f64,
    gamma_tt: f64,
    pl_db_per_us: f64,
    f_start_ghz: f64,
    f_stop_ghz: f64,
    points: usize,
) -> Result<Passband, JsError> {
    let plate = PlateSpec::linbo3(0.49e-6).map_err(err)?;
    let geom = TransducerGeometry::new(lambda_um * 1e-6, n_cells, 50e-6, 30e-9).map_err(err)?;
    let f_center = center_frequency(&geom, &plate, None).map_err(err)?;
    let mut d = AdlDesign::symmetric(geom, gap_um * 1e-6);
    d.gamma_tt = gamma_tt;
    d.pl_db_per_us = pl_db_per_us;
    let grid = linspace(f_start_ghz * 1e9, f_stop_ghz * 1e9, points);
    let net = synthesize(&d, &plate, &grid).map_err(err)?;
    let gd = group_delay(&net).map_err(err)?;
    Ok(Passband {
        f_ghz: grid.iter().map(|f| f / 1e9).collect(),
        il_db: net.il_db(),
        delay_ns: gd.tau.iter().map(|t| t.map_or(f64::NAN, |t| t * 1e9)).collect(),
        f_center_ghz: f_center / 1e9,
    })
}

/// Center frequency in GHz for each cell length; NaN where no design exists.
#[wasm_bindgen]
pub fn center_sweep(lambda_min_um: f64, lambda_max_um: f64, n_cells: usize, points: usize) -> Vec<f64> {
    let Ok(plate) = PlateSpec::linbo3(0.49e-6) else {
        return Vec::new();
    };
    linspace(lambda_min_um, lambda_max_um, points)
        .into_iter()
        .map(|l| {
            TransducerGeometry::new(l * 1e-6, n_cells.max(1), 50e-6, 30e-9)
                .and_then(|g| center_frequency(&g, &plate, None))
                .map_or(f64::NAN, |f| f / 1e9)
        })
        .collect()
}
