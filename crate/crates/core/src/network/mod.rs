//! Two-port delay-line network: synthesis from the transducer model,
//! reference-impedance renormalization, and file I/O.

mod renorm;
pub mod sidecar;
pub mod touchstone;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{A1Region, Bc, PlateSpec};
use crate::error::{invalid, Result};
use crate::loading::TransducerGeometry;
use crate::transducer::{check_grid, AdmittanceOptions, TransducerModel};

pub use renorm::{conjugate_match, renormalize, s_at_reference, MatchResult};

pub type SMatrix = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPortNetwork {
    pub f_grid: Vec<f64>,
    pub s11: Vec<Complex64>,
    pub s12: Vec<Complex64>,
    pub s21: Vec<Complex64>,
    pub s22: Vec<Complex64>,
    pub z_ref_1: Complex64,
    pub z_ref_2: Complex64,
}

impl TwoPortNetwork {
    pub fn validate(&self) -> Result<()> {
        let n = self.f_grid.len();
        if [self.s11.len(), self.s12.len(), self.s21.len(), self.s22.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(invalid("S-parameter arrays and frequency grid differ in length"));
        }
        if !(self.z_ref_1.re > 0.0 && self.z_ref_2.re > 0.0) {
            return Err(invalid("reference impedances need a positive real part"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.f_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_grid.is_empty()
    }

    pub fn s(&self, i: usize) -> SMatrix {
        [[self.s11[i], self.s12[i]], [self.s21[i], self.s22[i]]]
    }

    /// Insertion loss `-20·log10|s21|`, dB.
    pub fn il_db(&self) -> Vec<f64> {
        self.s21.iter().map(|s| db_loss(s.norm())).collect()
    }

    /// Return loss `-20·log10|s11|`, dB.
    pub fn rl_db(&self) -> Vec<f64> {
        self.s11.iter().map(|s| db_loss(s.norm())).collect()
    }

    /// Largest singular value of S at every grid point.
    pub fn max_singular_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| max_singular_value(&self.s(i))).collect()
    }
}

/// Loss in dB of a magnitude, clamped so that an exact zero stays finite.
pub fn db_loss(mag: f64) -> f64 {
    -20.0 * mag.max(1e-300).log10()
}

pub fn max_singular_value(s: &SMatrix) -> f64 {
    // eigenvalues of the Hermitian S^H S
    let a = s[0][0].norm_sqr() + s[1][0].norm_sqr();
    let d = s[0][1].norm_sqr() + s[1][1].norm_sqr();
    let b = s[0][0].conj() * s[0][1] + s[1][0].conj() * s[1][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
    (0.5 * (tr + disc)).sqrt()
}

/// A pair of transducers separated by a free gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdlDesign {
    pub tx: TransducerGeometry,
    pub rx: TransducerGeometry,
    /// Gap between the transducers, m.
    pub gap_lg: f64,
    /// Propagation loss, dB/µs.
    pub pl_db_per_us: f64,
    /// Optional `(f_hz, dB/µs)` table, linearly interpolated; overrides
    /// `pl_db_per_us` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pl_table: Option<Vec<(f64, f64)>>,
    /// Amplitude reflection per transducer for the triple-transit echo.
    pub gamma_tt: f64,
    /// Capacitive feedthrough between the ports, F.
    pub feedthrough_c: f64,
    #[serde(default)]
    pub transducer: AdmittanceOptions,
}

/// Triple-transit reflection used when none is given.
pub const DEFAULT_GAMMA_TT: f64 = 0.2;

impl AdlDesign {
    /// Symmetric design with default loss-free acoustics and the default
    /// triple-transit reflection.
    pub fn symmetric(geom: TransducerGeometry, gap_lg: f64) -> Self {
        Self {
            tx: geom.clone(),
            rx: geom,
            gap_lg,
            pl_db_per_us: 0.0,
            pl_table: None,
            gamma_tt: DEFAULT_GAMMA_TT,
            feedthrough_c: 0.0,
            transducer: AdmittanceOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tx.validate()?;
        self.rx.validate()?;
        if !(self.gap_lg >= 0.0) {
            return Err(invalid(format!("gap length must be non-negative, got {}", self.gap_lg)));
        }
        if !(self.gamma_tt >= 0.0 && self.gamma_tt < 1.0) {
            return Err(invalid(format!("gamma_tt must lie in [0, 1), got {}", self.gamma_tt)));
        }
        if !(self.feedthrough_c >= 0.0) {
            return Err(invalid("feedthrough capacitance must be non-negative"));
        }
        if !self.pl_db_per_us.is_finite() {
            return Err(invalid("propagation loss must be finite"));
        }
        if let Some(t) = &self.pl_table {
            if t.is_empty() || t.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(invalid("PL table must be non-empty with increasing frequencies"));
            }
        }
        Ok(())
    }

    /// Effective path between the transducer midpoints.
    pub fn path_length(&self) -> f64 {
        self.gap_lg + 0.5 * (self.tx.length() + self.rx.length())
    }

    pub fn delay_spec(&self, plate: &PlateSpec) -> DelaySpec {
        DelaySpec {
            path_length: self.path_length(),
            open: plate.a1_region(Bc::Open),
        }
    }

    fn pl_at(&self, f: f64) -> f64 {
        match &self.pl_table {
            None => self.pl_db_per_us,
            Some(t) => interp_clamped(t, f),
        }
    }
}

fn interp_clamped(t: &[(f64, f64)], f: f64) -> f64 {
    if f <= t[0].0 {
        return t[0].1;
    }
    if f >= t[t.len() - 1].0 {
        return t[t.len() - 1].1;
    }
    let k = t.partition_point(|p| p.0 <= f);
    let (a, b) = (t[k - 1], t[k]);
    a.1 + (b.1 - a.1) * (f - a.0) / (b.0 - a.0)
}

/// Acoustic path between the transducer phase centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaySpec {
    pub path_length: f64,
    pub open: A1Region,
}

impl DelaySpec {
    /// Model group delay `ℓ / v_g(f)` on the free surface, s.
    pub fn group_delay_at(&self, f: f64) -> Result<f64> {
        Ok(self.path_length / self.open.vg(f)?)
    }
}

/// Echo factor of the triple-transit path normalized so that the sum of
/// the direct and echo paths never exceeds the direct path alone:
/// `(1 + γ²A²·e^{-2jφ}) / (1 + γ²)`.
pub fn tts_factor(gamma: f64, a: f64, phase: Complex64) -> Complex64 {
    let g2 = gamma * gamma;
    (1.0 + g2 * a * a * (Complex64::new(0.0, -2.0) * phase).exp()) / (1.0 + g2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub network: TwoPortNetwork,
    pub warnings: Vec<String>,
    pub f_center_tx: f64,
    pub f_center_rx: f64,
    pub g0_tx: f64,
    pub g0_rx: f64,
    pub delay: DelaySpec,
}

/// Synthesizes the delay line's S-parameters on `f_grid`.
pub fn synthesize(design: &AdlDesign, plate: &PlateSpec, f_grid: &[f64]) -> Result<TwoPortNetwork> {
    Ok(synthesize_report(design, plate, f_grid)?.network)
}

/// [`synthesize`] plus the model constants and warnings.
///
/// Each port is a lossless step with reflection `Γ_i` (the transducer's
/// port impedance against the reference) feeding a reflectionless acoustic
/// core with transmission
/// `τ = √(η₁η₂)·[½·h_tx·h_rx·A·e^{-jφ}·TTS + jωC_ft·√(R₁R₂)]`,
/// where `η` is the share of accepted power not lost in the electrode
/// resistance. The three sections are cascaded exactly, so the result is
/// reciprocal and passive. References are the conjugates of each port's
/// impedance at its own center frequency.
pub fn synthesize_report(design: &AdlDesign, plate: &PlateSpec, f_grid: &[f64]) -> Result<Synthesis> {
    design.validate()?;
    plate.validate()?;
    check_grid(f_grid)?;
    let tx = TransducerModel::new(&design.tx, plate, &design.transducer)?;
    let rx = TransducerModel::new(&design.rx, plate, &design.transducer)?;
    let open = plate.a1_region(Bc::Open);
    let min_cut = open.f_c.min(tx.short.f_c);
    let mut warnings = Vec::new();
    let check = !f_grid.iter().all(|&f| f < min_cut);
    if !check {
        warnings.push(format!(
            "frequency grid lies entirely below the cutoffs ({min_cut:.4e} Hz); no passband"
        ));
    }
    let resp_tx = tx.response_checked(f_grid, check)?;
    let resp_rx = rx.response_checked(f_grid, check)?;
    let z1 = resp_tx.port_impedance_at(&tx, tx.f_center).conj();
    let z2 = resp_rx.port_impedance_at(&rx, rx.f_center).conj();
    if !(z1.re > 0.0 && z2.re > 0.0) {
        return Err(invalid("port impedance at center has no resistive part; cannot form a reference"));
    }
    let ell = design.path_length();
    let mut clamped = false;
    let n = f_grid.len();
    let mut net = TwoPortNetwork {
        f_grid: f_grid.to_vec(),
        s11: Vec::with_capacity(n),
        s12: Vec::with_capacity(n),
        s21: Vec::with_capacity(n),
        s22: Vec::with_capacity(n),
        z_ref_1: z1,
        z_ref_2: z2,
    };
    for (i, &f) in f_grid.iter().enumerate() {
        let zp1 = resp_tx.port_impedance(i);
        let zp2 = resp_rx.port_impedance(i);
        let g1 = (zp1 - z1.conj()) / (zp1 + z1);
        let g2 = (zp2 - z2.conj()) / (zp2 + z2);
        let eta = |zp: Complex64, r_s: f64| if zp.re > 0.0 { (zp.re - r_s).max(0.0) / zp.re } else { 0.0 };
        let eta1 = eta(zp1, resp_tx.r_s);
        let eta2 = eta(zp2, resp_rx.r_s);

        let phase = open.beta(f) * ell;
        let pl = design.pl_at(f);
        let amp = match open.vg(f) {
            Ok(vg) => 10f64.powf(-pl * (ell / vg * 1e6) / 20.0),
            Err(_) if pl > 0.0 => 0.0,
            Err(_) => 1.0,
        };
        let acoustic = 0.5
            * tx.h_centered(f)
            * rx.h_centered(f)
            * amp
            * (Complex64::new(0.0, -1.0) * phase).exp()
            * tts_factor(design.gamma_tt, amp, phase);
        let feed = Complex64::new(0.0, 2.0 * PI * f * design.feedthrough_c * (z1.re * z2.re).sqrt());
        let mut tau = (eta1 * eta2).sqrt() * (acoustic + feed);
        if tau.norm() > 1.0 {
            tau /= tau.norm();
            clamped = true;
        }

        let (a1, a2) = ((1.0 - g1.norm_sqr()).max(0.0).sqrt(), (1.0 - g2.norm_sqr()).max(0.0).sqrt());
        let (r1, r2) = (-g1.conj(), -g2.conj());
        let den = 1.0 - r1 * r2 * tau * tau;
        let s21 = a1 * a2 * tau / den;
        net.s11.push(g1 + a1 * a1 * r2 * tau * tau / den);
        net.s22.push(g2 + a2 * a2 * r1 * tau * tau / den);
        net.s21.push(s21);
        net.s12.push(s21);
    }
    if clamped {
        warnings.push("feedthrough pushed the core transmission above unity; clamped".into());
    }
    Ok(Synthesis {
        network: net,
        warnings,
        f_center_tx: tx.f_center,
        f_center_rx: rx.f_center,
        g0_tx: tx.g0,
        g0_rx: rx.g0,
        delay: design.delay_spec(plate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn plate() -> PlateSpec {
        PlateSpec::linbo3(490e-9).unwrap()
    }

    fn design(n: usize, lg: f64, gamma: f64) -> AdlDesign {
        let g = TransducerGeometry::new(2.4e-6, n, 50e-6, 30e-9).unwrap();
        let mut d = AdlDesign::symmetric(g, lg);
        d.gamma_tt = gamma;
        d
    }

    fn lossless(mut d: AdlDesign) -> AdlDesign {
        d.pl_db_per_us = 0.0;
        d.feedthrough_c = 0.0;
        d.transducer.electrical_loading = false;
        d
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn min_il(net: &TwoPortNetwork) -> f64 {
        net.il_db().into_iter().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn bidirectional_bound_is_reached_when_matched() {
        let d = lossless(design(4, 40e-6, 0.0));
        let p = plate();
        let f0 = TransducerModel::new(&d.tx, &p, &d.transducer).unwrap().f_center;
        let mut grid = linspace(4.3e9, 5.8e9, 3001);
        let k = grid.partition_point(|&x| x < f0);
        grid.insert(k, f0);
        let net = synthesize(&d, &p, &grid).unwrap();
        let il = min_il(&net);
        assert!((il - 20.0 * 2f64.log10()).abs() < 1e-6, "{il}");
        assert!(net.s11[k].norm() < 1e-12 && net.s22[k].norm() < 1e-12);
    }

    #[test]
    fn reciprocity_and_passivity() {
        let mut d = design(4, 60e-6, 0.3);
        d.pl_db_per_us = 40.0;
        d.feedthrough_c = 1e-15;
        let net = synthesize(&d, &plate(), &linspace(3.0e9, 7.0e9, 2001)).unwrap();
        for i in 0..net.len() {
            assert_eq!(net.s12[i], net.s21[i]);
        }
        assert!(net.max_singular_values().iter().all(|&s| s <= 1.0 + 1e-9));
        net.validate().unwrap();
    }

    #[test]
    fn group_delay_matches_path_over_group_velocity() {
        let d = lossless(design(4, 100e-6, 0.0));
        let p = plate();
        let f = linspace(4.5e9, 5.6e9, 4401);
        let s = synthesize_report(&d, &p, &f).unwrap();
        let net = &s.network;
        let k = f.partition_point(|&x| x < s.f_center_tx);
        let ph = |i: usize| net.s21[i].arg();
        let mut dphi = ph(k + 1) - ph(k - 1);
        while dphi > PI {
            dphi -= 2.0 * PI;
        }
        while dphi < -PI {
            dphi += 2.0 * PI;
        }
        let tau = -dphi / (2.0 * PI * (f[k + 1] - f[k - 1]));
        let model = s.delay.group_delay_at(f[k]).unwrap();
        assert!((tau / model - 1.0).abs() < 0.02, "{tau} vs {model}");
    }

    #[test]
    fn propagation_loss_lowers_transmission() {
        let p = plate();
        let base = lossless(design(4, 100e-6, 0.0));
        let f0 = TransducerModel::new(&base.tx, &p, &base.transducer).unwrap().f_center;
        let mut f = linspace(4.5e9, 5.6e9, 1101);
        let k = f.partition_point(|&x| x < f0);
        f.insert(k, f0);
        let mut lossy = base.clone();
        lossy.pl_db_per_us = 30.0;
        let a = synthesize(&base, &p, &f).unwrap();
        let b = synthesize(&lossy, &p, &f).unwrap();
        let extra = b.il_db()[k] - a.il_db()[k];
        let tau_us = base.delay_spec(&p).group_delay_at(f[k]).unwrap() * 1e6;
        assert_relative_eq!(extra, 30.0 * tau_us, max_relative = 1e-9);
    }

    #[test]
    fn pl_table_overrides_constant() {
        let p = plate();
        let f = linspace(4.5e9, 5.6e9, 1101);
        let mut a = lossless(design(4, 100e-6, 0.0));
        a.pl_db_per_us = 20.0;
        let mut b = a.clone();
        b.pl_db_per_us = 0.0;
        b.pl_table = Some(vec![(4e9, 20.0), (6e9, 20.0)]);
        assert_eq!(synthesize(&a, &p, &f).unwrap(), synthesize(&b, &p, &f).unwrap());
        assert_eq!(interp_clamped(&[(1.0, 2.0), (3.0, 4.0)], 2.0), 3.0);
    }

    fn ripple_period(net: &TwoPortNetwork, lo: f64, hi: f64) -> f64 {
        let y: Vec<f64> = net.s21.iter().map(|s| s.norm()).collect();
        let f = &net.f_grid;
        let peaks: Vec<f64> = (1..y.len() - 1)
            .filter(|&i| f[i] > lo && f[i] < hi && y[i] > y[i - 1] && y[i] >= y[i + 1])
            .map(|i| f[i])
            .collect();
        (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64
    }

    #[test]
    fn ripple_period_follows_path_length() {
        let p = plate();
        let f = linspace(4.7e9, 5.4e9, 28001);
        let mut periods = Vec::new();
        for lg in [200e-6, 400e-6] {
            let d = lossless(design(4, lg, 0.3));
            let s = synthesize_report(&d, &p, &f).unwrap();
            let period = ripple_period(&s.network, 4.95e9, 5.15e9);
            // echo phase 2·β·ℓ advances by 2π per period
            let vg = p.a1_region(Bc::Open).vg(5.05e9).unwrap();
            let expected = vg / (2.0 * d.path_length());
            assert!((period / expected - 1.0).abs() < 0.05, "{period} vs {expected}");
            periods.push(period);
        }
        assert!((periods[0] / periods[1] - 2.0).abs() < 0.1, "{periods:?}");
    }

    #[test]
    fn triple_transit_echo_in_impulse_response() {
        // non-dispersive path: the echo lands at three times the main delay
        let tau0 = 20e-9;
        let (gamma, a) = (0.4, 0.8);
        let n = 4096;
        let df = 1e9 / 64.0;
        let h: Vec<Complex64> = (0..n)
            .map(|k| {
                let w = 2.0 * PI * df * k as f64;
                let ph = Complex64::new(w * tau0, 0.0);
                a * (Complex64::new(0.0, -1.0) * ph).exp() * tts_factor(gamma, a, ph)
            })
            .collect();
        let dt = 1.0 / (n as f64 * df);
        let imp = |t: f64| -> f64 {
            h.iter()
                .enumerate()
                .map(|(k, v)| v * (Complex64::new(0.0, 2.0 * PI * df * k as f64 * t)).exp())
                .sum::<Complex64>()
                .norm()
        };
        let main = imp(tau0);
        let echo = imp(3.0 * tau0);
        assert!(imp(2.0 * tau0) < 1e-6 * main);
        assert!(imp(tau0 + 7.0 * dt) < 1e-6 * main);
        assert_relative_eq!(echo / main, gamma * gamma * a * a, max_relative = 1e-9);
    }

    #[test]
    fn below_cutoff_grid_warns_without_error() {
        let d = design(4, 40e-6, 0.2);
        let s = synthesize_report(&d, &plate(), &linspace(1.0e9, 3.0e9, 201)).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.network.il_db().iter().all(|&il| il > 40.0));
    }

    #[test]
    fn rejects_invalid_designs() {
        let mut d = design(4, 40e-6, 1.0);
        let f = linspace(4.5e9, 5.6e9, 1101);
        assert!(synthesize(&d, &plate(), &f).is_err());
        d.gamma_tt = 0.2;
        d.gap_lg = -1.0;
        assert!(synthesize(&d, &plate(), &f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn passive_and_above_bidirectional_bound(
            n in 2usize..9,
            lg_um in 0.0f64..300.0,
            gamma in 0.0f64..0.95,
            pl in 0.0f64..100.0,
            lam_um in 2.0f64..3.2,
            wa_um in 20.0f64..150.0,
            loading in proptest::bool::ANY,
        ) {
            let mut g = TransducerGeometry::new(lam_um * 1e-6, n, wa_um * 1e-6, 30e-9).unwrap();
            g.duty = 0.5;
            let mut d = AdlDesign::symmetric(g, lg_um * 1e-6);
            d.gamma_tt = gamma;
            d.pl_db_per_us = pl;
            d.transducer.electrical_loading = loading;
            let net = synthesize(&d, &plate(), &linspace(3.0e9, 7.5e9, 3001)).unwrap();
            for i in 0..net.len() {
                prop_assert_eq!(net.s12[i], net.s21[i]);
            }
            prop_assert!(net.max_singular_values().iter().all(|&s| s <= 1.0 + 1e-9));
            prop_assert!(min_il(&net) >= 20.0 * 2f64.log10() - 1e-6);
        }
    }
}
