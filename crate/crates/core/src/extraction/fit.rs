//! Group velocity and propagation loss from a family of delay lines that
//! differ only in their gap length.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{group_delay, interp_index, POWER_FLOOR};
use super::savgol::savgol;
use crate::error::{invalid, Error, Result};
use crate::network::TwoPortNetwork;

/// Default smoothing window, samples.
pub const DEFAULT_WINDOW: usize = 51;

/// Default smoothing order.
pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Weighting {
    #[default]
    Uniform,
    /// Weight each device by its `|s21|²` at the evaluation frequency.
    Transmission,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub window: usize,
    /// Smoothing polynomial order, capped below the window.
    pub order: usize,
    pub weighting: Weighting,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            order: DEFAULT_ORDER,
            weighting: Weighting::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationFit {
    pub f: f64,
    pub vg: f64,
    pub pl_db_per_um: f64,
    pub pl_db_per_us: f64,
    /// IL extrapolated to zero gap, dB.
    pub intercept_il_db: f64,
    /// Delay extrapolated to zero gap, s.
    pub intercept_delay_s: f64,
    pub r_squared_delay: f64,
    pub r_squared_il: f64,
    /// The IL fell with gap length.
    pub negative_pl_warning: bool,
}

/// Delay per unit length, µs/mm.
pub fn delay_us_per_mm(vg: f64) -> f64 {
    1e3 / vg
}

/// dB/µm → dB/µs at the given group velocity (m/s is µm/µs).
pub fn pl_per_us_from_per_um(pl_db_per_um: f64, vg: f64) -> f64 {
    pl_db_per_um * vg
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Weighted least squares `y = a + b·x`.
pub(crate) fn fit_line(x: &[f64], y: &[f64], w: &[f64]) -> Line {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..x.len())
        .map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Line {
        slope,
        intercept,
        r_squared,
    }
}

/// Savitzky–Golay over each run of present samples long enough for the
/// window; shorter runs are left as they are.
fn smooth_runs(values: &[Option<f64>], window: usize, order: usize) -> Result<Vec<Option<f64>>> {
    let mut out = values.to_vec();
    let mut i = 0;
    while i < values.len() {
        if values[i].is_none() {
            i += 1;
            continue;
        }
        let start = i;
        while i < values.len() && values[i].is_some() {
            i += 1;
        }
        if i - start >= window && window > 1 {
            let run: Vec<f64> = values[start..i].iter().map(|v| v.unwrap()).collect();
            let s = savgol(&run, window, order.min(window - 1))?;
            for (k, v) in s.values.into_iter().enumerate() {
                out[start + k] = Some(v);
            }
        }
    }
    Ok(out)
}

struct Member {
    lg: f64,
    tau: Vec<Option<f64>>,
    suspect: Vec<bool>,
    il: Vec<Option<f64>>,
    mag2: Vec<f64>,
}

struct Prepared {
    f: Vec<f64>,
    members: Vec<Member>,
    weighting: Weighting,
}

fn prepare(family: &[(TwoPortNetwork, f64)], opts: &FitOptions) -> Result<Prepared> {
    if family.len() < 2 {
        return Err(invalid(format!("need at least two gap lengths, got {}", family.len())));
    }
    let f = family[0].0.f_grid.clone();
    for (net, lg) in family {
        if net.f_grid != f {
            return Err(invalid("all devices must share one frequency grid"));
        }
        if !(lg.is_finite() && *lg >= 0.0) {
            return Err(invalid(format!("bad gap length {lg}")));
        }
    }
    let lg0 = family[0].1;
    if family.iter().all(|(_, lg)| *lg == lg0) {
        return Err(invalid("gap lengths must not all be equal"));
    }
    if opts.window == 0 {
        return Err(invalid("smoothing window must be positive"));
    }
    let window = opts.window | 1;
    let mut members = Vec::with_capacity(family.len());
    for (net, lg) in family {
        let gd = group_delay(net)?;
        // smoothed as power, like the band metrics
        let power: Vec<Option<f64>> = net.s21.iter().map(|s| Some(s.norm_sqr())).collect();
        let il: Vec<Option<f64>> = smooth_runs(&power, window, opts.order)?
            .into_iter()
            .map(|p| p.map(|p| -10.0 * p.max(POWER_FLOOR).log10()))
            .collect();
        members.push(Member {
            lg: *lg,
            tau: smooth_runs(&gd.tau, window, opts.order)?,
            suspect: gd.suspect,
            il,
            mag2: net.s21.iter().map(|s| s.norm_sqr()).collect(),
        });
    }
    Ok(Prepared {
        f,
        members,
        weighting: opts.weighting,
    })
}

enum Sample {
    Ok { tau: f64, il: f64, mag2: f64 },
    Missing,
    Suspect,
}

fn sample(m: &Member, k: usize, w: f64) -> Sample {
    let j = if w > 0.0 { k + 1 } else { k };
    if m.suspect[k] || m.suspect[j] {
        return Sample::Suspect;
    }
    match (m.tau[k], m.tau[j], m.il[k], m.il[j]) {
        (Some(t0), Some(t1), Some(i0), Some(i1)) => Sample::Ok {
            tau: t0 + w * (t1 - t0),
            il: i0 + w * (i1 - i0),
            mag2: m.mag2[k] + w * (m.mag2[j] - m.mag2[k]),
        },
        _ => Sample::Missing,
    }
}

fn fit_at(p: &Prepared, f_eval: f64, k: usize, w: f64) -> Result<PropagationFit> {
    let n = p.members.len();
    let (mut x, mut tau, mut il, mut wt) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for m in &p.members {
        match sample(m, k, w) {
            Sample::Ok { tau: t, il: l, mag2 } => {
                x.push(m.lg);
                tau.push(t);
                il.push(l);
                wt.push(match p.weighting {
                    Weighting::Uniform => 1.0,
                    Weighting::Transmission => mag2,
                });
            }
            Sample::Suspect => {
                return Err(Error::Resolution(format!(
                    "phase step near {f_eval:.6e} Hz is close to π for the {:.3e} m gap; refine the grid",
                    m.lg
                )))
            }
            Sample::Missing => {
                return Err(invalid(format!(
                    "no transmission at {f_eval:.6e} Hz for the {:.3e} m gap",
                    m.lg
                )))
            }
        }
    }
    if !(wt.iter().sum::<f64>() > 0.0) {
        return Err(invalid(format!("all weights vanish at {f_eval:.6e} Hz")));
    }
    let d = fit_line(&x, &tau, &wt);
    let l = fit_line(&x, &il, &wt);
    if !(d.slope > 0.0) {
        return Err(Error::SolverFailure(format!(
            "group delay does not grow with gap length at {f_eval:.6e} Hz"
        )));
    }
    let vg = 1.0 / d.slope;
    let pl_db_per_um = l.slope * 1e-6;
    Ok(PropagationFit {
        f: f_eval,
        vg,
        pl_db_per_um,
        pl_db_per_us: pl_per_us_from_per_um(pl_db_per_um, vg),
        intercept_il_db: l.intercept,
        intercept_delay_s: d.intercept,
        r_squared_delay: d.r_squared,
        r_squared_il: l.r_squared,
        negative_pl_warning: l.slope < 0.0,
    })
}

/// Fits `τ(ℓ) = τ₀ + ℓ/v_g` and `IL(ℓ) = IL₀ + α·ℓ` across the family at
/// `f_eval`, after smoothing each device's delay and IL.
pub fn fit_propagation(family: &[(TwoPortNetwork, f64)], f_eval: f64, opts: &FitOptions) -> Result<PropagationFit> {
    let p = prepare(family, opts)?;
    let (k, w) = interp_index(&p.f, f_eval)
        .ok_or_else(|| invalid(format!("{f_eval:.6e} Hz lies outside the measured grid")))?;
    fit_at(&p, f_eval, k, w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidebandFit {
    pub rows: Vec<PropagationFit>,
    /// Grid frequencies left out: below the noise floor, suspect or unfit.
    pub skipped: Vec<f64>,
}

/// Runs the fit at every grid point where each device's `|s21|` stays
/// above `noise_floor_db` (an IL threshold, dB).
pub fn wideband_fit(family: &[(TwoPortNetwork, f64)], opts: &FitOptions, noise_floor_db: f64) -> Result<WidebandFit> {
    let p = prepare(family, opts)?;
    let floor = 10f64.powf(-noise_floor_db / 10.0);
    let mut out = WidebandFit {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for (k, &f) in p.f.iter().enumerate() {
        let loud = p.members.iter().all(|m| m.mag2[k] >= floor);
        match loud.then(|| fit_at(&p, f, k, 0.0)) {
            Some(Ok(r)) => out.rows.push(r),
            _ => out.skipped.push(f),
        }
    }
    Ok(out)
}

/// `f_hz, vg_m_per_s, pl_db_per_us, pl_db_per_um, intercept_db, r2_delay, r2_il`.
pub fn write_fit_csv<W: Write>(rows: &[PropagationFit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "f_hz",
        "vg_m_per_s",
        "pl_db_per_us",
        "pl_db_per_um",
        "intercept_db",
        "r2_delay",
        "r2_il",
    ])?;
    for r in rows {
        w.write_record([
            r.f.to_string(),
            r.vg.to_string(),
            r.pl_db_per_us.to_string(),
            r.pl_db_per_um.to_string(),
            r.intercept_il_db.to_string(),
            r.r_squared_delay.to_string(),
            r.r_squared_il.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
