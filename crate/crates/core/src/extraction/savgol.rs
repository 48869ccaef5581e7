//! Savitzky–Golay smoothing.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Smoothed {
    pub values: Vec<f64>,
    /// Window actually used; even requests are rounded up to odd.
    pub window: usize,
    pub order: usize,
}

/// Local least-squares polynomial smoothing.
///
/// Interior points use the centered window. Within half a window of either
/// end the window is truncated to the available samples and the fit is done
/// over that asymmetric stencil; if it holds too few points for `order`,
/// the order drops to what the stencil supports.
pub fn savgol(values: &[f64], window: usize, order: usize) -> Result<Smoothed> {
    let window = if window % 2 == 0 { window + 1 } else { window };
    if order >= window {
        return Err(invalid(format!("order {order} must be below the window {window}")));
    }
    if values.len() < window {
        return Err(invalid(format!(
            "series of {} points is shorter than the window {window}",
            values.len()
        )));
    }
    let n = values.len();
    let half = window / 2;
    let centered = stencil_weights(half, half, order);
    let out = (0..n)
        .map(|i| {
            let left = i.min(half);
            let right = (n - 1 - i).min(half);
            let w = if left == half && right == half {
                centered.clone()
            } else {
                stencil_weights(left, right, order)
            };
            w.iter().zip(&values[i - left..=i + right]).map(|(a, b)| a * b).sum()
        })
        .collect();
    Ok(Smoothed {
        values: out,
        window,
        order,
    })
}

/// Weights that evaluate the least-squares polynomial at offset 0 from
/// samples at offsets `-left..=right`: the matching row of the hat matrix
/// `Q·Qᵀ` of the (scaled) Vandermonde matrix.
fn stencil_weights(left: usize, right: usize, order: usize) -> Vec<f64> {
    let m = left + right + 1;
    let order = order.min(m - 1);
    let scale = left.max(right).max(1) as f64;
    let v = DMatrix::from_fn(m, order + 1, |r, c| ((r as f64 - left as f64) / scale).powi(c as i32));
    let q = v.qr().q();
    let row = q.row(left).clone_owned();
    (0..m).map(|j| row.dot(&q.row(j))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: at each point solve the local least-squares problem directly
    /// with an SVD, offsets scaled by the stencil length.
    fn brute_force(values: &[f64], window: usize, order: usize) -> Vec<f64> {
        let window = window | 1;
        let half = window / 2;
        let n = values.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(n - 1);
                let m = hi - lo + 1;
                let p = order.min(m - 1) + 1;
                let a = DMatrix::from_fn(m, p, |r, c| (((lo + r) as f64 - i as f64) / m as f64).powi(c as i32));
                let b = nalgebra::DVector::from_iterator(m, values[lo..=hi].iter().copied());
                let coef = a.svd(true, true).solve(&b, 1e-14).unwrap();
                coef[0]
            })
            .collect()
    }

    #[test]
    fn reproduces_polynomials() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let poly: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x - 0.3 * x * x * x).collect();
        let s = savgol(&poly, 21, 3).unwrap();
        for (a, b) in s.values.iter().zip(&poly) {
            assert!((a - b).abs() < 1e-9);
        }
        let c = vec![4.2; 60];
        let s = savgol(&c, 51, 3).unwrap();
        assert!(s.values.iter().all(|v| (v - 4.2).abs() < 1e-12));
    }

    #[test]
    fn even_window_rounds_up() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let s = savgol(&v, 50, 3).unwrap();
        assert_eq!(s.window, 51);
        assert_eq!(s.values, savgol(&v, 51, 3).unwrap().values);
    }

    #[test]
    fn argument_errors() {
        assert!(savgol(&[1.0; 10], 11, 3).is_err());
        assert!(savgol(&[1.0; 10], 3, 3).is_err());
        assert!(savgol(&[1.0; 11], 11, 3).is_ok());
    }

    #[test]
    fn noise_variance_drops_and_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..2000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = savgol(&v, 51, 3).unwrap();
        let var = |x: &[f64]| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / x.len() as f64
        };
        assert!(var(&s.values) < var(&v));
        let o = brute_force(&v, 51, 3);
        for (a, b) in s.values.iter().zip(&o) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_brute_force(
            half in 1usize..51, order in 0usize..6, extra in 0usize..80, seed in 0u64..1000,
        ) {
            let window = 2 * half + 1;
            prop_assume!(order < window);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..window + extra).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = savgol(&v, window, order).unwrap();
            let o = brute_force(&v, window, order);
            for (a, b) in s.values.iter().zip(&o) {
                prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
            }
        }
    }
}
