//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use adl_core::dispersion::{a1_cutoff, a1_freq, k2_from_velocities, solve_branches};
use adl_core::extraction::fit::{delay_us_per_mm, pl_per_us_from_per_um};
use adl_core::extraction::{band_metrics, fit_propagation, savgol, FitOptions, Weighting};
use adl_core::loading::{center_frequency, electrode_resistance, TransducerGeometry};
use adl_core::network::touchstone::{parse_touchstone, write_touchstone};
use adl_core::network::{renormalize, synthesize, AdlDesign, TwoPortNetwork};
use adl_core::{Bc, PlateSpec, Symmetry};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLATE_B: f64 = 490e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn plate() -> PlateSpec {
    PlateSpec::linbo3(PLATE_B).unwrap()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn group_a(n: usize) -> TransducerGeometry {
    TransducerGeometry::new(2.4e-6, n, 50e-6, 30e-9).unwrap()
}

fn lossless(geom: TransducerGeometry, lg: f64) -> AdlDesign {
    let mut d = AdlDesign::symmetric(geom, lg);
    d.gamma_tt = 0.0;
    d.transducer.electrical_loading = false;
    d
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x / target - 1.0).abs() <= rel
}

fn c1_cutoffs() -> Outcome {
    let p = plate();
    let t = Instant::now();
    let short = a1_cutoff(&p, Bc::Short);
    let open = a1_cutoff(&p, Bc::Open);
    let dt = t.elapsed();
    let pass = within(short, 3.646e9, 0.005)
        && within(open, 4.588e9, 0.005)
        && within(short, 3.64e9, 0.005)
        && within(open, 4.59e9, 0.005)
        && dt < Duration::from_millis(1);
    Outcome {
        pass,
        detail: format!("short {:.4} GHz, open {:.4} GHz, {dt:?}", short / 1e9, open / 1e9),
    }
}

fn c2_full_vs_decoupled() -> Outcome {
    let p = plate();
    let t = Instant::now();
    let beta_max = 2.0 * PI * 0.25 / PLATE_B;
    let mut worst = (0.0f64, 0.0, Bc::Short);
    let mut missing = 0;
    for bc in Bc::BOTH {
        let curves = match solve_branches(&p, bc, Symmetry::Antisymmetric, 40e9, 2, beta_max, 200) {
            Ok(c) => c,
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("solver error {e}"),
                }
            }
        };
        let a1 = &curves[1];
        missing += 200 - a1.points.len();
        for pt in &a1.points {
            let lambda = 2.0 * PI / pt.beta;
            let model = a1_freq(lambda, &p, bc).unwrap();
            let dev = (model / pt.f - 1.0).abs();
            if dev > worst.0 {
                worst = (dev, PLATE_B / lambda, bc);
            }
        }
    }
    let dt = t.elapsed();
    Outcome {
        pass: worst.0 <= 0.02 && missing == 0 && dt < Duration::from_secs(10),
        detail: format!(
            "max deviation {:.2}% at h/lambda {:.3} ({}), {missing} missing roots, {dt:.2?}",
            worst.0 * 100.0,
            worst.1,
            worst.2
        ),
    }
}

fn c3_k2() -> Outcome {
    let k2 = k2_from_velocities(12520.0, 11700.0).unwrap();
    Outcome {
        pass: (k2 * 100.0 - 14.5).abs() <= 0.1,
        detail: format!("k2 = {:.3}%", k2 * 100.0),
    }
}

fn c4_center_frequency() -> Outcome {
    let p = plate();
    let f = |lambda: f64| center_frequency(&TransducerGeometry::new(lambda, 4, 50e-6, 30e-9).unwrap(), &p, None);
    let fa = match f(2.4e-6) {
        Ok(v) => v,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let sweep: Vec<f64> = (0..=60).map(|k| f(2.0e-6 + k as f64 * 0.02e-6).unwrap()).collect();
    let decreasing = sweep.windows(2).all(|w| w[1] < w[0]);
    let groups: Vec<f64> = [2.0e-6, 2.4e-6, 2.8e-6, 3.2e-6].iter().map(|&l| f(l).unwrap()).collect();
    let ordered = groups.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: within(fa, 5.03e9, 0.02) && decreasing && ordered,
        detail: format!(
            "f_center(2.4 um) {:.3} GHz; D/A/C/B {:.2}/{:.2}/{:.2}/{:.2} GHz; monotone {decreasing}",
            fa / 1e9,
            groups[0] / 1e9,
            groups[1] / 1e9,
            groups[2] / 1e9,
            groups[3] / 1e9
        ),
    }
}

fn c5_series_resistance() -> Outcome {
    let g = group_a(4);
    let (r_ele, r_s) = electrode_resistance(&g).unwrap();
    // independent evaluation from the raw geometry
    let rho_s = 3.0 * 2.65e-8;
    let w_e = 0.6e-6;
    let oracle = 2.0 * (2.0 * rho_s * 50e-6 / (3.0 * 30e-9 * w_e)) / 4.0;
    Outcome {
        pass: (r_s - 74.0).abs() <= 1.0 && (r_s - oracle).abs() < 1e-9,
        detail: format!("R_ele {r_ele:.1} ohm, R_s {r_s:.2} ohm"),
    }
}

fn c6_table_identities() -> Outcome {
    // (vg m/s, dB/us, dB/um, us/mm)
    let rows = [
        ("A", 3289.0, 71.0, 0.0216, 0.304),
        ("B", 2304.0, 75.1, 0.0326, 0.434),
        ("C", 2696.0, 69.8, 0.0259, 0.371),
        ("D", 3472.0, 45.5, 0.0131, 0.288),
        ("E", 3528.0, 79.7, 0.0226, 0.283),
    ];
    let mut worst = 0.0f64;
    for (_, vg, per_us, per_um, delay) in rows {
        worst = worst.max((pl_per_us_from_per_um(per_um, vg) / per_us - 1.0).abs());
        worst = worst.max((delay_us_per_mm(vg) / delay - 1.0).abs());
    }
    Outcome {
        pass: worst <= 0.01,
        detail: format!("worst relative mismatch {:.3}%", worst * 100.0),
    }
}

fn c7_bidirectional_floor() -> Outcome {
    let p = plate();
    let floor = 20.0 * 2f64.log10();
    let mut worst = 0.0f64;
    for (lambda, n, lg) in [(2.0e-6, 4, 20e-6), (2.4e-6, 2, 80e-6), (2.4e-6, 4, 320e-6), (2.8e-6, 8, 40e-6), (3.2e-6, 4, 160e-6)] {
        let g = TransducerGeometry::new(lambda, n, 50e-6, 30e-9).unwrap();
        let fc = center_frequency(&g, &p, None).unwrap();
        let mut grid = linspace(fc - 0.4e9, fc + 0.4e9, 1601);
        grid.push(fc);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let net = synthesize(&lossless(g, lg), &p, &grid).unwrap();
        let min_il = net.il_db().into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.max((min_il - floor).abs());
    }
    let floor_ok = worst <= 1e-4;

    let grid = linspace(4.5e9, 5.6e9, 2201);
    let base = lossless(group_a(4), 20e-6);
    let mut lossy = base.clone();
    lossy.pl_db_per_us = 71.0;
    let a = band_metrics(&synthesize(&base, &p, &grid).unwrap(), 51).unwrap();
    let b = band_metrics(&synthesize(&lossy, &p, &grid).unwrap(), 51).unwrap();
    let injected = 71.0 * base.delay_spec(&p).group_delay_at(a.f_center).unwrap() * 1e6;
    let delta = b.il_avg - a.il_avg;
    Outcome {
        pass: floor_ok && (delta - injected).abs() <= 0.3,
        detail: format!(
            "min IL off 6.0206 dB by {worst:.2e} dB; PL raises IL by {delta:.3} dB vs injected {injected:.3} dB"
        ),
    }
}

fn c8_fbw_scaling() -> Outcome {
    let p = plate();
    let grid = linspace(4.0e9, 7.0e9, 6001);
    let mut fbw = Vec::new();
    for n in [2, 4, 8] {
        match synthesize(&lossless(group_a(n), 100e-6), &p, &grid).and_then(|net| band_metrics(&net, 11)) {
            Ok(m) => fbw.push(m.fbw_3db),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("N={n}: {e}"),
                }
            }
        }
    }
    let r1 = fbw[0] / fbw[1];
    let r2 = fbw[1] / fbw[2];
    Outcome {
        pass: within(r1, 2.0, 0.15) && within(r2, 2.0, 0.15),
        detail: format!(
            "FBW N=2/4/8 {:.2}%/{:.2}%/{:.2}%, ratios {r1:.2} and {r2:.2}",
            fbw[0] * 100.0,
            fbw[1] * 100.0,
            fbw[2] * 100.0
        ),
    }
}

fn c9_extraction_round_trip() -> Outcome {
    let p = plate();
    let t = Instant::now();
    let fc = center_frequency(&group_a(4), &p, None).unwrap();
    let vg = p.a1_region(Bc::Open).vg(fc).unwrap();
    let family = |gaps: &[f64], gamma: f64, grid: &[f64]| -> Vec<(TwoPortNetwork, f64)> {
        gaps.iter()
            .map(|&g| {
                let mut d = AdlDesign::symmetric(group_a(4), g * 1e-6);
                d.gamma_tt = gamma;
                d.pl_db_per_us = 71.0;
                (synthesize(&d, &p, grid).unwrap(), g * 1e-6)
            })
            .collect()
    };
    let grid = linspace(4.5e9, 5.6e9, 2201);
    let six = family(&[20.0, 40.0, 80.0, 160.0, 240.0, 320.0], 0.2, &grid);
    let r6 = fit_propagation(&six, fc, &FitOptions::default());
    let fine = linspace(fc - 5e6, fc + 5e6, 1001);
    let two = family(&[20.0, 120.0], 0.0, &fine);
    let r2 = fit_propagation(&two, fc, &FitOptions { window: 5, weighting: Weighting::Uniform, ..Default::default() });
    let dt = t.elapsed();
    match (r6, r2) {
        (Ok(a), Ok(b)) => {
            let e6 = ((a.vg / vg - 1.0).abs(), (a.pl_db_per_us / 71.0 - 1.0).abs());
            let e2 = ((b.vg / vg - 1.0).abs(), (b.pl_db_per_us / 71.0 - 1.0).abs());
            Outcome {
                pass: e6.0 <= 0.02 && e6.1 <= 0.05 && e2.0 <= 1e-6 && e2.1 <= 1e-6 && dt < Duration::from_secs(5),
                detail: format!(
                    "six-gap vg {:.2e} PL {:.2e}; two-gap vg {:.2e} PL {:.2e} (relative); {dt:.2?}",
                    e6.0, e6.1, e2.0, e2.1
                ),
            }
        }
        (a, b) => Outcome {
            pass: false,
            detail: format!("{:?} / {:?}", a.err(), b.err()),
        },
    }
}

fn savgol_oracle(values: &[f64], window: usize, order: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let m = hi - lo + 1;
            let p = order.min(m - 1) + 1;
            let a = DMatrix::from_fn(m, p, |r, c| (((lo + r) as f64 - i as f64) / m as f64).powi(c as i32));
            let b = DVector::from_iterator(m, values[lo..=hi].iter().copied());
            a.svd(true, true).solve(&b, 1e-14).unwrap()[0]
        })
        .collect()
}

fn random_net(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> TwoPortNetwork {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
    let mut s = [vec![], vec![], vec![], vec![]];
    for _ in 0..n {
        for v in s.iter_mut() {
            v.push(c());
        }
    }
    let [s11, s12, s21, s22] = s;
    TwoPortNetwork {
        f_grid: (0..n).map(|i| 1e9 + i as f64 * 1e6).collect(),
        s11,
        s12,
        s21,
        s22,
        z_ref_1: Complex64::new(50.0, 0.0),
        z_ref_2: Complex64::new(50.0, 0.0),
    }
}

fn c10_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut notes = Vec::new();

    let mut sg = 0.0f64;
    for _ in 0..40 {
        let half = rng.gen_range(1..40);
        let order = rng.gen_range(0..6).min(2 * half);
        let v: Vec<f64> = (0..2 * half + 1 + rng.gen_range(0..60)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = savgol(&v, 2 * half + 1, order).unwrap();
        let o = savgol_oracle(&v, 2 * half + 1, order);
        sg = s.values.iter().zip(&o).map(|(a, b)| (a - b).abs()).fold(sg, f64::max);
    }
    notes.push(format!("savgol {sg:.1e}"));

    let mut rn = 0.0f64;
    for _ in 0..40 {
        let net = random_net(&mut rng, 8, 0.4);
        let same = renormalize(&net, net.z_ref_1, net.z_ref_2).unwrap();
        let z1 = Complex64::new(rng.gen_range(5.0..300.0), rng.gen_range(-200.0..200.0));
        let z2 = Complex64::new(rng.gen_range(5.0..300.0), rng.gen_range(-200.0..200.0));
        let back = renormalize(&renormalize(&net, z1, z2).unwrap(), net.z_ref_1, net.z_ref_2).unwrap();
        for i in 0..net.len() {
            for (a, b, c) in [
                (net.s11[i], same.s11[i], back.s11[i]),
                (net.s12[i], same.s12[i], back.s12[i]),
                (net.s21[i], same.s21[i], back.s21[i]),
                (net.s22[i], same.s22[i], back.s22[i]),
            ] {
                rn = rn.max((a - b).norm()).max((a - c).norm());
            }
        }
    }
    notes.push(format!("renormalize {rn:.1e}"));

    let p = plate();
    let mut sv = 0.0f64;
    for _ in 0..12 {
        let lambda = rng.gen_range(2.0e-6..3.2e-6);
        let n = [2, 4, 8][rng.gen_range(0..3)];
        let mut d = AdlDesign::symmetric(TransducerGeometry::new(lambda, n, 50e-6, 30e-9).unwrap(), rng.gen_range(10e-6..400e-6));
        d.gamma_tt = rng.gen_range(0.0..0.6);
        d.pl_db_per_us = rng.gen_range(0.0..100.0);
        d.transducer.electrical_loading = rng.gen_bool(0.5);
        let net = synthesize(&d, &p, &linspace(4.0e9, 6.5e9, 1201)).unwrap();
        sv = net.max_singular_values().into_iter().fold(sv, f64::max);
    }
    notes.push(format!("max singular value {sv:.6}"));

    let mut vv = 0.0f64;
    for bc in Bc::BOTH {
        let r = p.a1_region(bc);
        for k in 1..200 {
            let f = r.f_c * (1.0 + 0.01 * k as f64);
            vv = vv.max((r.vg(f).unwrap() * r.vp(f).unwrap() / (r.v_l * r.v_l) - 1.0).abs());
        }
    }
    notes.push(format!("vg*vp/vl^2 {vv:.1e}"));

    let mut ts_ok = true;
    for _ in 0..10 {
        let net = random_net(&mut rng, 50, 0.7);
        let mut first = Vec::new();
        write_touchstone(&net, &mut first).unwrap();
        let back = parse_touchstone(std::str::from_utf8(&first).unwrap()).unwrap();
        let mut second = Vec::new();
        write_touchstone(&back, &mut second).unwrap();
        ts_ok &= back == net && first == second;
    }
    notes.push(format!("touchstone exact {ts_ok}"));

    Outcome {
        pass: sg <= 1e-12 && rn <= 1e-12 && sv <= 1.0 + 1e-12 && vv <= 1e-12 && ts_ok,
        detail: notes.join(", "),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cutoff frequencies", c1_cutoffs),
        ("full vs decoupled A1 dispersion", c2_full_vs_decoupled),
        ("k2 from velocities", c3_k2),
        ("center frequency and ordering", c4_center_frequency),
        ("electrode series resistance", c5_series_resistance),
        ("propagation table identities", c6_table_identities),
        ("bidirectional loss floor and injected PL", c7_bidirectional_floor),
        ("FBW scaling with cell count", c8_fbw_scaling),
        ("extraction round trip", c9_extraction_round_trip),
        ("property suites", c10_property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
