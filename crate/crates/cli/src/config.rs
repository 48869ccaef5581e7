//! Run configuration. Lengths are in µm and frequencies in GHz; material
//! constants are SI.

use std::collections::BTreeMap;
use std::path::Path;

use adl_core::dispersion::PlateSpec;
use adl_core::loading::{LayerStack, TransducerGeometry};
use adl_core::materials::{builtin_linbo3, ElectrodeMaterial, MaterialSet};
use adl_core::network::AdlDesign;
use adl_core::transducer::{AdmittanceOptions, DispersionSource};
use anyhow::{bail, Context, Result};
use serde::Deserialize;

const GHZ: f64 = 1e9;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub plate: PlateCfg,
    pub materials: MaterialsCfg,
    pub grid: GridCfg,
    pub sweep: SweepCfg,
    pub device: DeviceCfg,
    pub dispersion: DispersionCfg,
    pub extraction: ExtractionCfg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateCfg {
    pub thickness_um: f64,
}

impl Default for PlateCfg {
    fn default() -> Self {
        Self { thickness_um: 0.49 }
    }
}

/// Partial override of a plate material set.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetOverride {
    pub name: Option<String>,
    pub c11: Option<f64>,
    pub c44: Option<f64>,
    pub rho: Option<f64>,
    pub v_l_override: Option<f64>,
}

/// Partial override of an electrode metal; unknown names need every field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetalOverride {
    pub name: Option<String>,
    pub rho: Option<f64>,
    pub v_s: Option<f64>,
    pub v_l: Option<f64>,
    pub resistivity: Option<f64>,
    pub resistivity_scale: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialsCfg {
    pub short: Option<SetOverride>,
    pub open: Option<SetOverride>,
    /// Keyed by metal symbol, e.g. `[materials.electrode.Au]`.
    pub electrode: BTreeMap<String, MetalOverride>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridCfg {
    pub f_start_ghz: f64,
    pub f_stop_ghz: f64,
    pub n_points: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        Self {
            f_start_ghz: 4.5,
            f_stop_ghz: 5.6,
            n_points: 2201,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepCfg {
    pub lambda_um: Vec<f64>,
    pub n_cells: Vec<usize>,
    pub lg_um: Vec<f64>,
    /// Electrode metals for the design table.
    pub metals: Vec<String>,
}

impl Default for SweepCfg {
    fn default() -> Self {
        Self {
            lambda_um: vec![2.4],
            n_cells: vec![4],
            lg_um: vec![20.0, 40.0, 80.0, 160.0, 240.0, 320.0],
            metals: vec!["Al".into()],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceCfg {
    pub aperture_um: f64,
    pub electrode_thickness_um: f64,
    pub duty: f64,
    pub metal: String,
    pub gamma_tt: f64,
    pub pl_db_per_us: f64,
    /// `[[GHz, dB/µs], ...]`; replaces `pl_db_per_us` when given.
    pub pl_table: Option<Vec<[f64; 2]>>,
    pub feedthrough_ff: f64,
    pub electrical_loading: bool,
    /// Use the metal-loaded short-region dispersion.
    pub mass_loading: bool,
    /// Metallized-region longitudinal velocity, m/s, replacing the
    /// rule-of-mixtures estimate.
    pub v_l_short_loaded: Option<f64>,
    pub coupling_k2: f64,
    /// Capacitance per cell per unit aperture, pF/m.
    pub c_cell_pf_per_m: Option<f64>,
}

impl Default for DeviceCfg {
    fn default() -> Self {
        Self {
            aperture_um: 50.0,
            electrode_thickness_um: 0.03,
            duty: 0.5,
            metal: "Al".into(),
            gamma_tt: adl_core::network::DEFAULT_GAMMA_TT,
            pl_db_per_us: 0.0,
            pl_table: None,
            feedthrough_ff: 0.0,
            electrical_loading: true,
            mass_loading: false,
            v_l_short_loaded: None,
            coupling_k2: adl_core::transducer::DEFAULT_COUPLING_K2,
            c_cell_pf_per_m: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionCfg {
    /// Boundary conditions to solve; empty means nothing is written.
    pub boundary: Vec<String>,
    pub f_max_ghz: f64,
    /// Branches per symmetry.
    pub n_branches: usize,
    pub beta_points: usize,
    /// Largest plate thickness over wavelength on the β grid.
    pub h_over_lambda_max: f64,
    pub lambda_um_start: f64,
    pub lambda_um_stop: f64,
    pub lambda_points: usize,
}

impl Default for DispersionCfg {
    fn default() -> Self {
        Self {
            boundary: vec!["short".into(), "open".into()],
            f_max_ghz: 12.0,
            n_branches: 2,
            beta_points: 200,
            h_over_lambda_max: 0.5,
            lambda_um_start: 1.0,
            lambda_um_stop: 10.0,
            lambda_points: 181,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionCfg {
    pub window: usize,
    pub order: usize,
    pub f_eval_ghz: Option<f64>,
    /// `uniform` or `transmission`.
    pub weighting: String,
    /// Wideband fit skips points where any device loses more than this, dB.
    pub noise_floor_db: f64,
}

impl Default for ExtractionCfg {
    fn default() -> Self {
        Self {
            window: adl_core::extraction::fit::DEFAULT_WINDOW,
            order: adl_core::extraction::fit::DEFAULT_ORDER,
            f_eval_ghz: None,
            weighting: "uniform".into(),
            noise_floor_db: 60.0,
        }
    }
}

fn apply_set(base: MaterialSet, o: &Option<SetOverride>) -> Result<MaterialSet> {
    let Some(o) = o else { return Ok(base) };
    let m = MaterialSet {
        name: o.name.clone().unwrap_or(base.name),
        c11: o.c11.unwrap_or(base.c11),
        c44: o.c44.unwrap_or(base.c44),
        rho: o.rho.unwrap_or(base.rho),
        v_l_override: o.v_l_override.or(base.v_l_override),
    };
    m.validate()?;
    Ok(m)
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg: RunConfig = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.f_start_ghz > 0.0 && g.f_stop_ghz > g.f_start_ghz) {
            bail!("grid: need 0 < f_start_ghz < f_stop_ghz");
        }
        if g.n_points < 2 {
            bail!("grid: need at least two points");
        }
        if self.sweep.lambda_um.iter().any(|&l| !(l > 0.0)) || self.sweep.lg_um.iter().any(|&l| !(l >= 0.0)) {
            bail!("sweep: lengths must be positive");
        }
        self.plate()?;
        self.metal(&self.device.metal)?;
        self.weighting()?;
        Ok(())
    }

    pub fn plate(&self) -> Result<PlateSpec> {
        let (short, open) = builtin_linbo3();
        let short = apply_set(short, &self.materials.short).context("materials.short")?;
        let open = apply_set(open, &self.materials.open).context("materials.open")?;
        Ok(PlateSpec::new(self.plate.thickness_um / 1e6, short, open)?)
    }

    /// A built-in metal with any configured overrides, or a fully
    /// specified custom one.
    pub fn metal(&self, name: &str) -> Result<ElectrodeMaterial> {
        let o = self
            .materials
            .electrode
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v);
        let base = ElectrodeMaterial::builtin(name);
        let m = match (base, o) {
            (Some(b), None) => b,
            (Some(b), Some(o)) => ElectrodeMaterial {
                name: o.name.clone().unwrap_or(b.name),
                rho: o.rho.unwrap_or(b.rho),
                v_s: o.v_s.unwrap_or(b.v_s),
                v_l: o.v_l.unwrap_or(b.v_l),
                resistivity: o.resistivity.unwrap_or(b.resistivity),
                resistivity_scale: o.resistivity_scale.unwrap_or(b.resistivity_scale),
            },
            (None, Some(o)) => {
                let need = |v: Option<f64>, k: &str| v.with_context(|| format!("custom metal {name}: missing {k}"));
                ElectrodeMaterial {
                    name: o.name.clone().unwrap_or_else(|| name.to_string()),
                    rho: need(o.rho, "rho")?,
                    v_s: need(o.v_s, "v_s")?,
                    v_l: need(o.v_l, "v_l")?,
                    resistivity: need(o.resistivity, "resistivity")?,
                    resistivity_scale: o.resistivity_scale.unwrap_or(1.0),
                }
            }
            (None, None) => bail!("unknown electrode metal '{name}'"),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn weighting(&self) -> Result<adl_core::extraction::Weighting> {
        use adl_core::extraction::Weighting;
        match self.extraction.weighting.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Weighting::Uniform),
            "transmission" => Ok(Weighting::Transmission),
            other => bail!("extraction.weighting: expected uniform or transmission, got '{other}'"),
        }
    }

    pub fn f_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        let (a, b) = (g.f_start_ghz * GHZ, g.f_stop_ghz * GHZ);
        (0..g.n_points)
            .map(|i| a + (b - a) * i as f64 / (g.n_points - 1) as f64)
            .collect()
    }

    pub fn geometry(&self, lambda_um: f64, n_cells: usize, metal: &str) -> Result<TransducerGeometry> {
        let d = &self.device;
        let g = TransducerGeometry {
            cell_length_lambda: lambda_um / 1e6,
            n_cells,
            duty: d.duty,
            aperture_w_a: d.aperture_um / 1e6,
            electrode_thickness: d.electrode_thickness_um / 1e6,
            electrode: self.metal(metal)?,
        };
        g.validate()?;
        Ok(g)
    }

    /// The metal film under the electrodes, if mass loading is on.
    pub fn layer_stack(&self, metal: &str) -> Result<Option<LayerStack>> {
        if !self.device.mass_loading || self.device.electrode_thickness_um == 0.0 {
            return Ok(None);
        }
        let mut s = LayerStack::new(self.plate()?, self.metal(metal)?, self.device.electrode_thickness_um / 1e6)?;
        s.v_l_short_override = self.device.v_l_short_loaded;
        s.validate()?;
        Ok(Some(s))
    }

    pub fn admittance_options(&self, metal: &str) -> Result<AdmittanceOptions> {
        let d = &self.device;
        Ok(AdmittanceOptions {
            source: match self.layer_stack(metal)? {
                Some(s) => DispersionSource::Loaded(s),
                None => DispersionSource::Massless,
            },
            coupling_k2: d.coupling_k2,
            c_cell: d.c_cell_pf_per_m.map(|c| c * 1e-12),
            electrical_loading: d.electrical_loading,
        })
    }

    pub fn design(&self, lambda_um: f64, n_cells: usize, lg_um: f64) -> Result<AdlDesign> {
        let metal = self.device.metal.as_str();
        let geom = self.geometry(lambda_um, n_cells, metal)?;
        let d = &self.device;
        let design = AdlDesign {
            tx: geom.clone(),
            rx: geom,
            gap_lg: lg_um / 1e6,
            pl_db_per_us: d.pl_db_per_us,
            pl_table: d
                .pl_table
                .as_ref()
                .map(|t| t.iter().map(|[f, pl]| (f * GHZ, *pl)).collect()),
            gamma_tt: d.gamma_tt,
            feedthrough_c: d.feedthrough_ff * 1e-15,
            transducer: self.admittance_options(metal)?,
        };
        design.validate()?;
        Ok(design)
    }
}
