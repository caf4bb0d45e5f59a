//! Shared FFT plumbing: cached rustfft plans plus real-signal helpers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

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

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    let mut c = cache().lock().unwrap();
    if let Some(p) = c.forward.get(&len) {
        return Arc::clone(p);
    }
    let p = c.planner.plan_fft_forward(len);
    c.forward.insert(len, Arc::clone(&p));
    p
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    let mut c = cache().lock().unwrap();
    if let Some(p) = c.inverse.get(&len) {
        return Arc::clone(p);
    }
    let p = c.planner.plan_fft_inverse(len);
    c.inverse.insert(len, Arc::clone(&p));
    p
}

/// One-sided FFT of a real signal zero-padded to `n`: returns `n/2 + 1` bins.
pub(crate) fn rfft(x: &[f64], n: usize) -> Vec<Complex64> {
    debug_assert!(x.len() <= n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (b, &v) in buf.iter_mut().zip(x.iter()) {
        *b = Complex64::new(v, 0.0);
    }
    forward_plan(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

/// Inverse of [`rfft`]: reconstructs the conjugate-symmetric spectrum and
/// returns the real time-domain signal of length `n`.
pub(crate) fn irfft(spec: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(spec.len(), n / 2 + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..spec.len()].copy_from_slice(spec);
    for k in 1..n.div_ceil(2) {
        buf[n - k] = spec[k].conj();
    }
    inverse_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|c| c.re * scale).collect()
}

/// Full complex FFT of a real vector (used where the two-sided spectrum is
/// needed, e.g. the cepstral path).
pub(crate) fn fft_real_full(x: &[f64], n: usize) -> Vec<Complex64> {
    debug_assert!(x.len() <= n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (b, &v) in buf.iter_mut().zip(x.iter()) {
        *b = Complex64::new(v, 0.0);
    }
    forward_plan(n).process(&mut buf);
    buf
}

/// In-place unnormalized inverse FFT followed by 1/n scaling.
pub(crate) fn ifft_full(buf: &mut [Complex64]) {
    let n = buf.len();
    inverse_plan(n).process(buf);
    let scale = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rfft_irfft_round_trip() {
        let x: Vec<f64> = (0..64).map(|i| ((i * 7 % 13) as f64 - 6.0) / 6.0).collect();
        let spec = rfft(&x, 64);
        let back = irfft(&spec, 64);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rfft_of_odd_length_padding() {
        let x = vec![1.0, -1.0, 0.5];
        let spec = rfft(&x, 8);
        assert_eq!(spec.len(), 5);
        // DC bin equals the plain sum.
        assert!((spec[0].re - 0.5).abs() < 1e-12);
        assert!(spec[0].im.abs() < 1e-12);
    }
}
