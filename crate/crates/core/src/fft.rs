//! Shared FFT plans. rustfft planning is deterministic per size, and a
//! process-wide cache keeps repeated solver steps from re-planning.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct PlanCache {
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
    planner: FftPlanner<f64>,
}

fn cache() -> &'static Mutex<PlanCache> {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    CACHE.get_or_init(|| {
        Mutex::new(PlanCache {
            forward: HashMap::new(),
            inverse: HashMap::new(),
            planner: FftPlanner::new(),
        })
    })
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    let mut c = cache().lock().unwrap();
    if let Some(p) = c.forward.get(&n) {
        return p.clone();
    }
    let p = c.planner.plan_fft_forward(n);
    c.forward.insert(n, p.clone());
    p
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    let mut c = cache().lock().unwrap();
    if let Some(p) = c.inverse.get(&n) {
        return p.clone();
    }
    let p = c.planner.plan_fft_inverse(n);
    c.inverse.insert(n, p.clone());
    p
}

/// Unnormalized forward DFT of real samples: V_m = sum_j v_j e^{-2 pi i m j / n}.
pub fn dft_real(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_plan(values.len()).process(&mut buf);
    buf
}

/// Inverse of [`dft_real`]: recovers v_j (divides by n, takes real parts).
pub fn idft_real(modes: &[Complex64]) -> Vec<f64> {
    let n = modes.len();
    let mut buf = modes.to_vec();
    inverse_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}
