//! Frequency-response evaluation and minimum-phase FIR construction.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::MonoSignal;

/// Non-negative magnitude samples on the uniform one-sided grid of a
/// `grid_size`-point FFT: bin `k` sits at `k * sample_rate / grid_size` Hz,
/// `k = 0 ..= grid_size/2`.
#[derive(Debug, Clone)]
pub struct MagnitudeResponse {
    pub magnitudes: Vec<f64>,
    pub grid_size: usize,
    pub sample_rate: u32,
}

impl MagnitudeResponse {
    pub fn new(magnitudes: Vec<f64>, grid_size: usize, sample_rate: u32) -> Self {
        debug_assert_eq!(magnitudes.len(), grid_size / 2 + 1);
        Self { magnitudes, grid_size, sample_rate }
    }

    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.grid_size as f64
    }
}

/// Evaluates the all-pole response `H = 1 / A` on the one-sided grid of a
/// `grid_size`-point FFT, where `A(e^{jw}) = sum_k a_k e^{-jwk}`. Errors if
/// `A` vanishes on the grid, which signals an unstable or marginal filter
/// upstream.
pub fn evaluate_all_pole_response(
    denominator: &[f64],
    grid_size: usize,
) -> Result<Vec<Complex64>> {
    if denominator.is_empty() || denominator[0] != 1.0 {
        return Err(Error::InvalidArg("denominator must start with a 1.0 coefficient".into()));
    }
    if grid_size < 2 * denominator.len() {
        return Err(Error::InvalidArg(format!(
            "grid of {grid_size} too coarse for {} coefficients",
            denominator.len()
        )));
    }
    let a = fft::rfft(denominator, grid_size);
    a.into_iter()
        .enumerate()
        .map(|(bin, v)| {
            if v.norm() < 1e-12 {
                Err(Error::ZeroOnGrid { bin })
            } else {
                Ok(v.finv())
            }
        })
        .collect()
}

/// Taper length applied to the tail of a truncated FIR.
const TAIL_TAPER: usize = 256;

/// Builds a minimum-phase FIR whose magnitude matches `target`.
///
/// The phase comes from the Hilbert-transform relation on the log magnitude,
/// computed as the folded real cepstrum: fold the even cepstral sequence onto
/// causal quefrencies, exponentiate back, and truncate to `n_taps` with a
/// short half-Hann tail taper. Magnitudes are floored at 1e-8 of the peak
/// before the log so spectral nulls stay finite.
pub fn min_phase_fir(target: &MagnitudeResponse, n_taps: usize) -> Result<MonoSignal> {
    let grid = target.grid_size;
    if n_taps == 0 || n_taps > grid {
        return Err(Error::InvalidArg(format!("n_taps {n_taps} outside 1..={grid}")));
    }
    let peak = target.magnitudes.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::AllZeroTarget);
    }
    let floor = 1e-8 * peak;

    // Symmetric log-magnitude over the full grid.
    let half = grid / 2;
    let mut log_mag = vec![0.0; grid];
    for (k, lm) in log_mag.iter_mut().enumerate() {
        let idx = if k <= half { k } else { grid - k };
        *lm = target.magnitudes[idx].max(floor).ln();
    }

    // Real cepstrum of the magnitude.
    let mut cep: Vec<Complex64> =
        log_mag.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::ifft_full(&mut cep);

    // Fold onto causal quefrencies: c[0] and c[half] stay, 0 < n < half
    // doubles, the anticausal half zeroes out.
    let mut folded = vec![0.0; grid];
    folded[0] = cep[0].re;
    folded[half] = cep[half].re;
    for n in 1..half {
        folded[n] = 2.0 * cep[n].re;
    }

    // Back to the spectrum and exponentiate: exp(F{folded}) is the
    // minimum-phase transfer function with the requested magnitude.
    let mut spectrum = fft::fft_real_full(&folded, grid);
    for v in spectrum.iter_mut() {
        *v = v.exp();
    }
    fft::ifft_full(&mut spectrum);

    let mut taps: Vec<f64> = spectrum[..n_taps].iter().map(|c| c.re).collect();
    let taper = TAIL_TAPER.min(n_taps / 4);
    for j in 0..taper {
        let w = 0.5 * (1.0 + (std::f64::consts::PI * (j + 1) as f64 / taper as f64).cos());
        taps[n_taps - taper + j] *= w;
    }
    Ok(MonoSignal::new(taps, target.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_filter_response_is_flat() {
        let resp = evaluate_all_pole_response(&[1.0], 64).unwrap();
        for v in resp {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn one_pole_closed_form() {
        let resp = evaluate_all_pole_response(&[1.0, -0.5], 4096).unwrap();
        assert!((resp[0].norm() - 2.0).abs() < 1e-9, "dc gain");
        assert!((resp.last().unwrap().norm() - 2.0 / 3.0).abs() < 1e-9, "nyquist gain");
    }

    #[test]
    fn matches_direct_polynomial_evaluation() {
        // Stable order-18 filter built from poles well inside the circle.
        let poles: Vec<Complex64> = (0..9)
            .map(|i| {
                let r = 0.55 + 0.04 * i as f64;
                let th = 0.3 + 0.31 * i as f64;
                Complex64::from_polar(r, th)
            })
            .collect();
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for p in &poles {
            for factor in [*p, p.conj()] {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (i, &c) in coeffs.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] -= c * factor;
                }
                coeffs = next;
            }
        }
        let a: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
        assert!((a[0] - 1.0).abs() < 1e-12);

        let grid = 256;
        let resp = evaluate_all_pole_response(&a, grid).unwrap();
        // Oracle: Horner evaluation of A at each grid frequency.
        for (k, v) in resp.iter().enumerate() {
            let w = std::f64::consts::TAU * k as f64 / grid as f64;
            let z = Complex64::from_polar(1.0, -w);
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in a.iter().rev() {
                acc = acc * z + c;
            }
            let expected = acc.finv();
            assert!((v - expected).norm() < 1e-9, "bin {k}");
        }
    }

    #[test]
    fn zero_on_grid_detected() {
        // A = 1 - z^-1 vanishes at dc.
        let err = evaluate_all_pole_response(&[1.0, -1.0], 64).unwrap_err();
        assert!(matches!(err, Error::ZeroOnGrid { bin: 0 }));
    }

    #[test]
    fn flat_target_gives_unit_impulse() {
        let target = MagnitudeResponse::new(vec![1.0; 2049], 4096, 16_000);
        let h = min_phase_fir(&target, 2048).unwrap();
        assert!((h.samples[0] - 1.0).abs() < 1e-3);
        for &v in &h.samples[1..] {
            assert!(v.abs() < 1e-3);
        }
    }

    fn magnitude_of_taps(taps: &[f64], grid: usize) -> MagnitudeResponse {
        let spec = crate::fft::rfft(taps, grid);
        MagnitudeResponse::new(spec.iter().map(|c| c.norm()).collect(), grid, 16_000)
    }

    #[test]
    fn recovers_known_minimum_phase_fir() {
        let target = magnitude_of_taps(&[1.0, 0.5], 4096);
        let h = min_phase_fir(&target, 64).unwrap();
        assert!((h.samples[0] - 1.0).abs() < 1e-3);
        assert!((h.samples[1] - 0.5).abs() < 1e-3);
        for &v in &h.samples[2..] {
            assert!(v.abs() < 1e-3);
        }
    }

    #[test]
    fn maximum_phase_input_comes_back_minimum_phase() {
        // [0.5, 1] has its zero outside the circle; the same magnitude
        // belongs to the minimum-phase pair [1, 0.5].
        let target = magnitude_of_taps(&[0.5, 1.0], 4096);
        let h = min_phase_fir(&target, 64).unwrap();
        assert!((h.samples[0] - 1.0).abs() < 1e-3);
        assert!((h.samples[1] - 0.5).abs() < 1e-3);
        let roots = crate::poly::roots(&h.samples[..8]);
        for r in roots {
            assert!(r.norm() <= 1.0 + 1e-6, "root at {}", r.norm());
        }
    }

    #[test]
    fn magnitude_fidelity_above_floor() {
        // Smooth resonant target from a stable two-pole pair.
        let a = [1.0, -1.2, 0.72];
        let grid = 4096;
        let resp = evaluate_all_pole_response(&a, grid).unwrap();
        let target =
            MagnitudeResponse::new(resp.iter().map(|c| c.norm()).collect(), grid, 16_000);
        let h = min_phase_fir(&target, 2048).unwrap();
        let got = crate::fft::rfft(&h.samples, grid);
        let peak = target.magnitudes.iter().cloned().fold(0.0, f64::max);
        for (k, (g, t)) in got.iter().zip(&target.magnitudes).enumerate() {
            if *t < peak * 1e-3 {
                continue; // below the -60 dB floor
            }
            let db = 20.0 * (g.norm() / t).log10();
            assert!(db.abs() < 0.5, "bin {k}: {db} dB deviation");
        }
    }

    #[test]
    fn all_zero_target_rejected() {
        let target = MagnitudeResponse::new(vec![0.0; 33], 64, 16_000);
        assert!(matches!(min_phase_fir(&target, 32), Err(Error::AllZeroTarget)));
    }
}
