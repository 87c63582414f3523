//! 2D complex FFTs on square grids, with a process-wide plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn run(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    debug_assert_eq!(data.len(), n * n);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // rows, then columns via transpose
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, n);
}

/// Unnormalised forward transform: X[a,b] = Σ x[i,j] e^{-2πi(ai+bj)/n}.
pub fn forward(data: &mut [Complex64], n: usize) {
    let p = plans(n);
    run(data, n, &p.forward);
}

/// Unnormalised inverse transform: x[i,j] = Σ X[a,b] e^{+2πi(ai+bj)/n}.
pub fn inverse(data: &mut [Complex64], n: usize) {
    let p = plans(n);
    run(data, n, &p.inverse);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_scales_by_n_squared() {
        let n = 16;
        let orig: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&mut data, n);
        inverse(&mut data, n);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / (n * n) as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_one_bin() {
        let n = 16;
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let phase = 2.0 * std::f64::consts::PI * (3 * i + 5 * j) as f64 / n as f64;
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        forward(&mut data, n);
        for (idx, v) in data.iter().enumerate() {
            let expect = if idx == 3 * n + 5 { (n * n) as f64 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
    }
}
