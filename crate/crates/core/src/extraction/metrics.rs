//! Group delay and passband metrics of a measured or synthesized two-port.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::savgol::savgol;
use crate::error::{BandEdge, Error, Result};
use crate::network::{db_loss, TwoPortNetwork};

/// Phase steps at least this large are flagged as possibly aliased.
pub const SUSPECT_STEP_RAD: f64 = 0.9 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDelay {
    pub f: Vec<f64>,
    /// `-dφ/dω`, s; absent where `s21` vanishes.
    pub tau: Vec<Option<f64>>,
    /// Set where an adjacent phase step is close enough to π that the
    /// unwrapping may have chosen the wrong branch.
    pub suspect: Vec<bool>,
}

impl GroupDelay {
    /// Linear interpolation at `f`; `None` if either neighbour is absent.
    pub fn at(&self, f: f64) -> Option<(f64, bool)> {
        interp_index(&self.f, f).and_then(|(k, w)| {
            let a = self.tau[k]?;
            let b = if w > 0.0 { self.tau[k + 1]? } else { a };
            let sus = self.suspect[k] || (w > 0.0 && self.suspect[k + 1]);
            Some((a + w * (b - a), sus))
        })
    }
}

/// `(k, w)` with `f = f_k + w·(f_{k+1} − f_k)`, `0 ≤ w < 1`.
pub(crate) fn interp_index(grid: &[f64], f: f64) -> Option<(usize, f64)> {
    let n = grid.len();
    if n == 0 || !(f >= grid[0] && f <= grid[n - 1]) {
        return None;
    }
    let k = grid.partition_point(|&x| x <= f).saturating_sub(1).min(n - 1);
    if k == n - 1 || grid[k] == f {
        return Some((k, 0.0));
    }
    Some((k, (f - grid[k]) / (grid[k + 1] - grid[k])))
}

/// Group delay of `s21` by unwrapped central differences.
///
/// Consecutive nonzero samples are unwrapped by taking the principal value
/// of their phase ratio; zero samples split the record into segments and
/// get no delay.
pub fn group_delay(net: &TwoPortNetwork) -> Result<GroupDelay> {
    net.validate()?;
    let n = net.len();
    if net.f_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("frequency grid must increase".into()));
    }
    let alive: Vec<bool> = net.s21.iter().map(|s| s.norm() > 0.0 && s.is_finite()).collect();
    let mut phase = vec![0.0; n];
    let mut step_big = vec![false; n];
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        if i > 0 && alive[i - 1] {
            let d = (net.s21[i] / net.s21[i - 1]).arg();
            phase[i] = phase[i - 1] + d;
            if d.abs() >= SUSPECT_STEP_RAD {
                step_big[i] = true;
                step_big[i - 1] = true;
            }
        } else {
            phase[i] = net.s21[i].arg();
        }
    }
    let mut tau = vec![None; n];
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        let l = (i > 0 && alive[i - 1]).then(|| i - 1).unwrap_or(i);
        let r = (i + 1 < n && alive[i + 1]).then(|| i + 1).unwrap_or(i);
        if l == r {
            continue;
        }
        tau[i] = Some(-(phase[r] - phase[l]) / (2.0 * PI * (net.f_grid[r] - net.f_grid[l])));
    }
    Ok(GroupDelay {
        f: net.f_grid.clone(),
        tau,
        suspect: step_big,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMetrics {
    pub f_center: f64,
    pub il_min: f64,
    /// Mean of the smoothed IL over the 3-dB band.
    pub il_avg: f64,
    pub fbw_3db: f64,
    pub rl_min_inband: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    /// Smoothing window actually applied.
    pub window: usize,
}

/// Smallest transmitted power kept after smoothing (300 dB of loss).
pub(crate) const POWER_FLOOR: f64 = 1e-30;

/// Insertion loss smoothed with a Savitzky–Golay filter of the given order
/// (capped below the window); returns `(raw, smoothed, window)`.
///
/// The filter runs on `|s21|²` rather than on decibels: transmission nulls
/// are unbounded in dB and would ring through the whole window.
pub fn smoothed_il(net: &TwoPortNetwork, window: usize, order: usize) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let raw = net.il_db();
    let power: Vec<f64> = net.s21.iter().map(|s| s.norm_sqr()).collect();
    let odd = if window % 2 == 0 { window + 1 } else { window };
    let s = savgol(&power, odd, order.min(odd - 1))?;
    let il = s.values.iter().map(|p| -10.0 * p.max(POWER_FLOOR).log10()).collect();
    Ok((raw, il, s.window))
}

/// [`band_metrics_with`] using a cubic smoother.
pub fn band_metrics(net: &TwoPortNetwork, smoothing_window: usize) -> Result<BandMetrics> {
    band_metrics_with(net, smoothing_window, 3)
}

/// Center, minimum and average IL, 3-dB bandwidth and worst in-band RL.
///
/// The center is the minimum of the smoothed IL; band edges are linear
/// interpolations of its 3-dB crossings.
pub fn band_metrics_with(net: &TwoPortNetwork, smoothing_window: usize, order: usize) -> Result<BandMetrics> {
    net.validate()?;
    let (raw, il, window) = smoothed_il(net, smoothing_window, order)?;
    let f = &net.f_grid;
    let n = f.len();
    let k = (0..n).min_by(|&a, &b| il[a].total_cmp(&il[b])).unwrap();
    let thr = il[k] + 10.0 * 2f64.log10();
    let cross = |a: usize, b: usize| f[a] + (thr - il[a]) * (f[b] - f[a]) / (il[b] - il[a]);
    let mut lo = k;
    while il[lo] <= thr {
        if lo == 0 {
            return Err(Error::BandTruncated(BandEdge::Lower));
        }
        lo -= 1;
    }
    let mut hi = k;
    while il[hi] <= thr {
        if hi == n - 1 {
            return Err(Error::BandTruncated(BandEdge::Upper));
        }
        hi += 1;
    }
    let f_lo = cross(lo + 1, lo);
    let f_hi = cross(hi - 1, hi);
    let band = lo + 1..hi;
    let il_min = raw[band.clone()].iter().copied().fold(f64::INFINITY, f64::min);
    let il_avg = il[band.clone()].iter().sum::<f64>() / band.len() as f64;
    let rl_min_inband = band
        .clone()
        .map(|i| db_loss(net.s11[i].norm()))
        .fold(f64::INFINITY, f64::min);
    Ok(BandMetrics {
        f_center: f[k],
        il_min,
        il_avg,
        fbw_3db: (f_hi - f_lo) / f[k],
        rl_min_inband,
        f_lo,
        f_hi,
        window,
    })
}

/// One row per named input: `file, f_center_hz, il_min_db, il_avg_db,
/// fbw_3db, rl_min_inband_db, smoothing_window`.
pub fn write_band_metrics_csv<W: Write>(rows: &[(String, BandMetrics)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "file",
        "f_center_hz",
        "il_min_db",
        "il_avg_db",
        "fbw_3db",
        "rl_min_inband_db",
        "smoothing_window",
    ])?;
    for (name, m) in rows {
        w.write_record([
            name.clone(),
            m.f_center.to_string(),
            m.il_min.to_string(),
            m.il_avg.to_string(),
            m.fbw_3db.to_string(),
            m.rl_min_inband.to_string(),
            m.window.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
