use std::fs;
use std::path::{Path, PathBuf};

use adl_core::dispersion::{k2_from_velocities, solve_branches, write_curves_csv};
use adl_core::extraction::{
    band_metrics_with, fit_propagation, wideband_fit, write_band_metrics_csv, write_fit_csv, BandMetrics, FitOptions,
};
use adl_core::extraction::fit::delay_us_per_mm;
use adl_core::loading::{center_frequency, electrode_resistance};
use adl_core::network::sidecar::{format_complex, meta_path_for, Metadata};
use adl_core::network::touchstone::{touchstone_read, touchstone_write};
use adl_core::network::{conjugate_match, db_loss, renormalize, synthesize, synthesize_report, AdlDesign, TwoPortNetwork};
use adl_core::transducer::TransducerModel;
use adl_core::{Bc, Symmetry};
use anyhow::{anyhow, Context, Result};
use log::{info, warn};

use crate::config::RunConfig;

/// Number of per-item failures; the caller turns a nonzero count into a
/// nonzero exit status.
pub type Failures = usize;

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// `2.4` → "2.4", `20.0` → "20".
fn um_token(v: f64) -> String {
    format!("{v}")
}

pub fn dispersion(cfg: &RunConfig, out: &Path) -> Result<Failures> {
    let d = &cfg.dispersion;
    if d.boundary.is_empty() {
        info!("no boundary conditions requested; nothing to do");
        return Ok(0);
    }
    let bcs: Vec<Bc> = d
        .boundary
        .iter()
        .map(|s| s.parse::<Bc>().map_err(|e| anyhow!("dispersion.boundary: {e}")))
        .collect::<Result<_>>()?;
    let plate = cfg.plate()?;
    let mut failures = 0;

    let mut cut = csv::Writer::from_writer(Vec::new());
    cut.write_record(["bc", "f_c_hz", "v_l_m_per_s"])?;
    for &bc in &bcs {
        let r = plate.a1_region(bc);
        cut.write_record([bc.to_string(), r.f_c.to_string(), r.v_l.to_string()])?;
    }
    write_bytes(&out.join("cutoffs.csv"), &cut.into_inner()?)?;

    let beta_max = 2.0 * std::f64::consts::PI * d.h_over_lambda_max / plate.thickness_b;
    for &bc in &bcs {
        let mut curves = Vec::new();
        for sym in [Symmetry::Antisymmetric, Symmetry::Symmetric] {
            match solve_branches(&plate, bc, sym, d.f_max_ghz * 1e9, d.n_branches, beta_max, d.beta_points) {
                Ok(cs) => {
                    for c in &cs {
                        if !c.warnings.is_empty() {
                            warn!("{} {bc}: {} beta points without a root", c.mode_label, c.warnings.len());
                        }
                        if c.points.is_empty() {
                            log::error!("{} {bc}: branch not found below f_max", c.mode_label);
                            failures += 1;
                        }
                    }
                    curves.extend(cs);
                }
                Err(e) => {
                    log::error!("{bc} {sym:?}: {e}");
                    failures += 1;
                }
            }
        }
        let path = out.join(format!("lamb_{bc}.csv"));
        let mut buf = Vec::new();
        write_curves_csv(&curves, &mut buf)?;
        write_bytes(&path, &buf)?;
        info!("wrote {}", path.display());
    }

    let short = plate.a1_region(Bc::Short);
    let open = plate.a1_region(Bc::Open);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bc", "lambda_um", "f_hz", "vp_m_per_s", "vg_m_per_s", "k2"])?;
    let n = d.lambda_points.max(2);
    for &bc in &bcs {
        let r = plate.a1_region(bc);
        for i in 0..n {
            let lam_um = d.lambda_um_start + (d.lambda_um_stop - d.lambda_um_start) * i as f64 / (n - 1) as f64;
            let lam = lam_um * 1e-6;
            let f = r.freq(lam);
            let vp = f * lam;
            let vg = r.v_l * r.v_l / vp;
            let k2 = k2_from_velocities(open.freq(lam) * lam, short.freq(lam) * lam)?;
            w.write_record([
                bc.to_string(),
                lam_um.to_string(),
                f.to_string(),
                vp.to_string(),
                vg.to_string(),
                k2.to_string(),
            ])?;
        }
    }
    write_bytes(&out.join("a1_decoupled.csv"), &w.into_inner()?)?;
    Ok(failures)
}

/// Grid wide enough to hold the main lobe of a lossless synthesis.
fn design_grid(model: &TransducerModel) -> Vec<f64> {
    let lobe = model.main_lobe_width();
    let lo = (model.f_center - 3.0 * lobe).max(0.9 * model.open.f_c.min(model.short.f_c));
    let hi = model.f_center + 3.0 * lobe;
    let n = 4001;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn predicted_fbw(cfg: &RunConfig, design: &AdlDesign) -> Result<f64> {
    let plate = cfg.plate()?;
    let mut d = design.clone();
    d.gamma_tt = 0.0;
    d.pl_db_per_us = 0.0;
    d.pl_table = None;
    d.feedthrough_c = 0.0;
    let model = TransducerModel::new(&d.tx, &plate, &d.transducer)?;
    let net = synthesize(&d, &plate, &design_grid(&model))?;
    Ok(band_metrics_with(&net, 11, 3)?.fbw_3db)
}

pub fn design(cfg: &RunConfig, out: &Path) -> Result<Failures> {
    let plate = cfg.plate()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "lambda_um",
        "n_cells",
        "metal",
        "f_center_massless_hz",
        "f_center_loaded_hz",
        "r_s_ohm",
        "fbw_3db_predicted",
        "delay_us_per_mm",
        "status",
    ])?;
    let open = plate.a1_region(Bc::Open);
    let mut infeasible = 0;
    for metal in &cfg.sweep.metals {
        for &lam in &cfg.sweep.lambda_um {
            for &n in &cfg.sweep.n_cells {
                let row = (|| -> Result<[String; 6]> {
                    let geom = cfg.geometry(lam, n, metal)?;
                    let massless = center_frequency(&geom, &plate, None)?;
                    let stack = adl_core::loading::LayerStack::new(plate.clone(), geom.electrode.clone(), geom.electrode_thickness)
                        .map(|mut s| {
                            s.v_l_short_override = cfg.device.v_l_short_loaded;
                            s
                        })?;
                    let loaded = center_frequency(&geom, &plate, Some(&stack))?;
                    let r_s = if geom.electrode_thickness > 0.0 {
                        electrode_resistance(&geom)?.1
                    } else {
                        0.0
                    };
                    let mut d = AdlDesign::symmetric(geom, 0.0);
                    d.transducer = cfg.admittance_options(metal)?;
                    let fbw = predicted_fbw(cfg, &d)?;
                    let f_use = if cfg.device.mass_loading { loaded } else { massless };
                    let delay = delay_us_per_mm(open.vg(f_use)?);
                    Ok([
                        massless.to_string(),
                        loaded.to_string(),
                        r_s.to_string(),
                        fbw.to_string(),
                        delay.to_string(),
                        "ok".into(),
                    ])
                })();
                let cells = match row {
                    Ok(c) => c,
                    Err(e) => {
                        warn!("lambda {lam} um, N {n}, {metal}: {e:#}");
                        infeasible += 1;
                        let reason = format!("infeasible: {e:#}");
                        [String::new(), String::new(), String::new(), String::new(), String::new(), reason]
                    }
                };
                let mut rec = vec![lam.to_string(), n.to_string(), metal.clone()];
                rec.extend(cells);
                w.write_record(&rec)?;
            }
        }
    }
    write_bytes(&out.join("design.csv"), &w.into_inner()?)?;
    if infeasible > 0 {
        info!("{infeasible} infeasible design(s) listed in design.csv");
    }
    Ok(0)
}

pub fn synth(cfg: &RunConfig, out: &Path) -> Result<Failures> {
    let plate = cfg.plate()?;
    let grid = cfg.f_grid();
    let mut failures = 0;
    for &lam in &cfg.sweep.lambda_um {
        for &n in &cfg.sweep.n_cells {
            for &lg in &cfg.sweep.lg_um {
                let stem = format!("adl_l{}um_n{n}_g{}um", um_token(lam), um_token(lg));
                let res = (|| -> Result<()> {
                    let design = cfg.design(lam, n, lg)?;
                    let s = synthesize_report(&design, &plate, &grid)?;
                    for w in &s.warnings {
                        warn!("{stem}: {w}");
                    }
                    let s2p = out.join(format!("{stem}.s2p"));
                    touchstone_write(&s.network, &s2p)?;
                    let mut meta = Metadata {
                        lg_m: Some(design.gap_lg),
                        lambda_m: Some(design.tx.cell_length_lambda),
                        n_cells: Some(n),
                        z_match_1: Some(s.network.z_ref_1),
                        z_match_2: Some(s.network.z_ref_2),
                        ..Default::default()
                    };
                    meta.extra.insert("f_center_hz".into(), s.f_center_tx.to_string());
                    meta.extra.insert("g0_s".into(), s.g0_tx.to_string());
                    meta.extra.insert("gamma_tt".into(), design.gamma_tt.to_string());
                    meta.extra.insert("pl_db_per_us".into(), design.pl_db_per_us.to_string());
                    meta.write(&meta_path_for(&s2p))?;
                    info!("wrote {}", s2p.display());
                    Ok(())
                })();
                if let Err(e) = res {
                    log::error!("{stem}: {e:#}");
                    failures += 1;
                }
            }
        }
    }
    Ok(failures)
}

pub struct ExtractArgs {
    pub files: Vec<PathBuf>,
    pub gaps_um: Option<Vec<f64>>,
    pub window: Option<usize>,
    pub f_eval_ghz: Option<f64>,
    pub do_match: bool,
}

struct Loaded {
    name: String,
    net: TwoPortNetwork,
    lg: Option<f64>,
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string())
}

/// Renormalizes to the sidecar's matching impedances when present, else to
/// a fresh conjugate match.
fn matched(net: &TwoPortNetwork, meta: Option<&Metadata>) -> Result<TwoPortNetwork> {
    let (z1, z2) = match meta.and_then(|m| m.z_match_1.zip(m.z_match_2)) {
        Some(z) => z,
        None => {
            let m = conjugate_match(net)?;
            (m.z1, m.z2)
        }
    };
    Ok(renormalize(net, z1, z2)?)
}

pub fn extract(cfg: &RunConfig, args: &ExtractArgs, out: &Path) -> Result<Failures> {
    let window = args.window.unwrap_or(cfg.extraction.window);
    let order = cfg.extraction.order;
    let mut failed: Vec<(String, String)> = Vec::new();
    let mut loaded = Vec::new();
    for (i, path) in args.files.iter().enumerate() {
        let name = file_name(path);
        let res = (|| -> Result<Loaded> {
            let net = touchstone_read(path)?;
            let meta_path = meta_path_for(path);
            let meta = if meta_path.exists() { Some(Metadata::read(&meta_path)?) } else { None };
            let flag_gap = args.gaps_um.as_ref().and_then(|g| g.get(i)).map(|g| g * 1e-6);
            let lg = match (meta.as_ref().and_then(|m| m.lg_m), flag_gap) {
                (Some(a), Some(b)) => {
                    if (a - b).abs() > 1e-12 {
                        warn!("{name}: sidecar gap {} um overrides --gaps value {} um", a * 1e6, b * 1e6);
                    }
                    Some(a)
                }
                (a, b) => a.or(b),
            };
            let net = if args.do_match { matched(&net, meta.as_ref())? } else { net };
            Ok(Loaded { name: name.clone(), net, lg })
        })();
        match res {
            Ok(l) => loaded.push(l),
            Err(e) => {
                log::error!("{name}: {e:#}");
                failed.push((name, format!("{e:#}")));
            }
        }
    }

    let mut rows: Vec<(String, BandMetrics)> = Vec::new();
    for l in &loaded {
        match band_metrics_with(&l.net, window, order) {
            Ok(m) => rows.push((l.name.clone(), m)),
            Err(e) => {
                log::error!("{}: {e}", l.name);
                failed.push((l.name.clone(), e.to_string()));
            }
        }
    }
    let mut buf = Vec::new();
    write_band_metrics_csv(&rows, &mut buf)?;
    write_bytes(&out.join("band_metrics.csv"), &buf)?;

    let mut summary = String::new();
    let family: Vec<(TwoPortNetwork, f64)> = loaded
        .iter()
        .filter_map(|l| l.lg.map(|g| (l.net.clone(), g)))
        .collect();
    let distinct = {
        let mut g: Vec<f64> = family.iter().map(|f| f.1).collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g.len()
    };
    if distinct < 2 {
        summary.push_str("propagation: not computed (needs at least two files with distinct gap lengths)\n");
    } else {
        let f_eval = match args.f_eval_ghz.or(cfg.extraction.f_eval_ghz) {
            Some(g) => g * 1e9,
            None if !rows.is_empty() => rows.iter().map(|r| r.1.f_center).sum::<f64>() / rows.len() as f64,
            None => family[0].0.f_grid[family[0].0.len() / 2],
        };
        let opts = FitOptions {
            window,
            order,
            weighting: cfg.weighting()?,
        };
        match fit_propagation(&family, f_eval, &opts) {
            Ok(fit) => {
                let mut buf = Vec::new();
                write_fit_csv(&[fit], &mut buf)?;
                write_bytes(&out.join("propagation_fit.csv"), &buf)?;
                if fit.negative_pl_warning {
                    warn!("propagation loss came out negative at {f_eval:.6e} Hz");
                }
                summary.push_str(&format!(
                    "propagation: f {:.6e} Hz, vg {:.2} m/s, PL {:.4} dB/us ({:.6} dB/um), r2 delay {:.6}, r2 IL {:.6}\n",
                    fit.f, fit.vg, fit.pl_db_per_us, fit.pl_db_per_um, fit.r_squared_delay, fit.r_squared_il
                ));
            }
            Err(e) => {
                log::error!("propagation fit: {e}");
                summary.push_str(&format!("propagation: failed ({e})\n"));
                failed.push(("<family>".into(), e.to_string()));
            }
        }
        match wideband_fit(&family, &opts, cfg.extraction.noise_floor_db) {
            Ok(wb) => {
                let mut buf = Vec::new();
                write_fit_csv(&wb.rows, &mut buf)?;
                write_bytes(&out.join("wideband_fit.csv"), &buf)?;
                summary.push_str(&format!(
                    "wideband: {} frequencies fitted, {} skipped\n",
                    wb.rows.len(),
                    wb.skipped.len()
                ));
            }
            Err(e) => {
                summary.push_str(&format!("wideband: failed ({e})\n"));
                failed.push(("<family>".into(), e.to_string()));
            }
        }
    }
    summary.push_str(&format!("files: {} read, {} failed\n", loaded.len(), failed.len()));
    for (name, why) in &failed {
        summary.push_str(&format!("failed: {name}: {why}\n"));
    }
    write_bytes(&out.join("extract_summary.txt"), summary.as_bytes())?;
    Ok(failed.len())
}

pub fn match_files(files: &[PathBuf], out: &Path) -> Result<Failures> {
    let mut failures = 0;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "file",
        "f_match_hz",
        "z1_re_ohm",
        "z1_im_ohm",
        "z2_re_ohm",
        "z2_im_ohm",
        "rollett_k",
        "fallback",
        "il_50ohm_db",
        "il_matched_db",
    ])?;
    for path in files {
        let name = file_name(path);
        let res = (|| -> Result<()> {
            let net = touchstone_read(path)?;
            let m = conjugate_match(&net)?;
            let matched = renormalize(&net, m.z1, m.z2)?;
            w.write_record([
                name.clone(),
                m.f_match.to_string(),
                m.z1.re.to_string(),
                m.z1.im.to_string(),
                m.z2.re.to_string(),
                m.z2.im.to_string(),
                m.k_factor.to_string(),
                m.fallback.to_string(),
                db_loss(net.s21[m.index].norm()).to_string(),
                db_loss(matched.s21[m.index].norm()).to_string(),
            ])?;
            let src_meta = meta_path_for(path);
            let mut meta = if src_meta.exists() { Metadata::read(&src_meta)? } else { Metadata::default() };
            meta.z_match_1 = Some(m.z1);
            meta.z_match_2 = Some(m.z2);
            let dest = out.join(meta_path_for(Path::new(&name)));
            meta.write(&dest)?;
            if m.fallback {
                warn!("{name}: no simultaneous match (K = {:.4}); ports matched separately", m.k_factor);
            }
            info!("{name}: z1 {} z2 {}", format_complex(m.z1), format_complex(m.z2));
            Ok(())
        })();
        if let Err(e) = res {
            log::error!("{name}: {e:#}");
            failures += 1;
        }
    }
    write_bytes(&out.join("match.csv"), &w.into_inner()?)?;
    Ok(failures)
}
