//! Forward and inverse short-time Fourier transform.
//!
//! Convention: analysis window only; synthesis overlap-adds the raw inverse
//! FFT frames and divides by the constant window sum. Valid because the
//! framing enforces constant overlap-add exactly.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::framing::{frame_signal, FrameSpec};
use crate::signal::MonoSignal;

/// One-sided complex time-frequency matrix: `fft_size/2 + 1` bins by
/// `frames.len()` frames, with the geometry needed to invert it.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    /// Frame-major storage: `frames[n][f]`.
    pub frames: Vec<Vec<Complex64>>,
    pub spec: FrameSpec,
    pub fft_size: usize,
    /// Length of the signal the spectrogram was computed from; the inverse
    /// transform trims its output back to this.
    pub original_len: usize,
}

impl Spectrogram {
    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }
}

/// Smallest power of two that holds one analysis window.
pub fn default_fft_size(spec: &FrameSpec) -> usize {
    spec.window_len().next_power_of_two()
}

/// Forward STFT on the padded constant-overlap-add grid.
pub fn stft(signal: &MonoSignal, spec: &FrameSpec, fft_size: usize) -> Result<Spectrogram> {
    if fft_size < spec.window_len() || !fft_size.is_power_of_two() {
        return Err(Error::InvalidFftSize { fft_size, window: spec.window_len() });
    }
    let frames = frame_signal(signal, spec)?;
    let columns = frames.iter().map(|frame| fft::rfft(frame, fft_size)).collect();
    Ok(Spectrogram { frames: columns, spec: *spec, fft_size, original_len: signal.len() })
}

/// Inverse STFT by overlap-add; output length equals the forward input.
pub fn istft(spectrogram: &Spectrogram) -> Result<MonoSignal> {
    if spectrogram.frames.is_empty() {
        return Err(Error::EmptySpectrogram);
    }
    let spec = &spectrogram.spec;
    let layout = spec.cola_layout(spectrogram.original_len)?;
    let ola_constant = spec.overlap_add_constant()?;

    let mut acc = vec![0.0; layout.padded_len.max(layout.hop * (layout.n_frames - 1) + spectrogram.fft_size)];
    for (n, column) in spectrogram.frames.iter().enumerate() {
        let time = fft::irfft(column, spectrogram.fft_size);
        let start = n * layout.hop;
        for (j, v) in time.iter().enumerate() {
            acc[start + j] += v;
        }
    }

    let inv = 1.0 / ola_constant;
    let out: Vec<f64> = acc[layout.lead_pad..layout.lead_pad + layout.original_len]
        .iter()
        .map(|v| v * inv)
        .collect();
    Ok(MonoSignal::new(out, spec.sample_rate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::WindowKind;

    fn rel_rms_err(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        let den: f64 = a.iter().map(|x| x * x).sum();
        (num / den.max(1e-300)).sqrt()
    }

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn perfect_reconstruction() {
        let spec = FrameSpec::pipeline_default(16_000);
        for (len, seed) in [(4800usize, 1u64), (16_000, 2), (48_001, 3), (5000, 4)] {
            let x = MonoSignal::new(noise(len, seed), 16_000);
            let sg = stft(&x, &spec, default_fft_size(&spec)).unwrap();
            let back = istft(&sg).unwrap();
            assert_eq!(back.len(), x.len());
            let err = rel_rms_err(&x.samples, &back.samples);
            assert!(err < 1e-6, "len={len}: relative rms error {err}");
        }
    }

    #[test]
    fn zero_signal_round_trip() {
        let spec = FrameSpec::pipeline_default(16_000);
        let x = MonoSignal::zeros(3200, 16_000);
        let sg = stft(&x, &spec, 512).unwrap();
        for col in &sg.frames {
            for b in col {
                assert_eq!(b.norm(), 0.0);
            }
        }
        let back = istft(&sg).unwrap();
        assert!(back.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linearity_through_the_pair() {
        let spec = FrameSpec::pipeline_default(16_000);
        let x = MonoSignal::new(noise(8000, 9), 16_000);
        let mut sg = stft(&x, &spec, 512).unwrap();
        for col in sg.frames.iter_mut() {
            for b in col.iter_mut() {
                *b *= 2.0;
            }
        }
        let back = istft(&sg).unwrap();
        let doubled: Vec<f64> = x.samples.iter().map(|v| v * 2.0).collect();
        assert!(rel_rms_err(&doubled, &back.samples) < 1e-6);
    }

    #[test]
    fn sine_energy_lands_in_its_bin() {
        let spec = FrameSpec::pipeline_default(16_000);
        let fft_size = 512;
        let f = 1000.0;
        let x = MonoSignal::new(
            (0..16_000).map(|i| (std::f64::consts::TAU * f * i as f64 / 16_000.0).sin()).collect(),
            16_000,
        );
        let sg = stft(&x, &spec, fft_size).unwrap();
        let bin = (f * fft_size as f64 / 16_000.0).round() as usize;
        // Interior frames: at least 95% of energy within +/-2 bins.
        for col in &sg.frames[3..sg.n_frames() - 3] {
            let total: f64 = col.iter().map(|c| c.norm_sqr()).sum();
            let near: f64 = (bin - 2..=bin + 2).map(|k| col[k].norm_sqr()).sum();
            assert!(near / total > 0.95, "ratio {}", near / total);
        }
    }

    #[test]
    fn centered_impulse_has_flat_window_magnitude() {
        let spec = FrameSpec::pipeline_default(16_000);
        let layout = spec.cola_layout(3200).unwrap();
        // Place the impulse at the center of frame 4.
        let center = layout.frame_start(4) + (layout.window / 2) as isize;
        let mut samples = vec![0.0; 3200];
        samples[center as usize] = 1.0;
        let sg = stft(&MonoSignal::new(samples, 16_000), &spec, 512).unwrap();
        let w = spec.window();
        let expected = w[layout.window / 2];
        for b in &sg.frames[4] {
            assert!((b.norm() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn rectangular_window_also_reconstructs() {
        let spec = FrameSpec::new(20.0, 0.5, WindowKind::Rectangular, 16_000).unwrap();
        let x = MonoSignal::new(noise(6400, 5), 16_000);
        let sg = stft(&x, &spec, 512).unwrap();
        let back = istft(&sg).unwrap();
        assert!(rel_rms_err(&x.samples, &back.samples) < 1e-6);
    }

    #[test]
    fn bad_fft_size_rejected() {
        let spec = FrameSpec::pipeline_default(16_000);
        let x = MonoSignal::zeros(3200, 16_000);
        assert!(matches!(stft(&x, &spec, 300), Err(Error::InvalidFftSize { .. })));
        assert!(matches!(stft(&x, &spec, 256), Err(Error::InvalidFftSize { .. })));
    }

    #[test]
    fn empty_spectrogram_rejected() {
        let spec = FrameSpec::pipeline_default(16_000);
        let sg = Spectrogram { frames: vec![], spec, fft_size: 512, original_len: 0 };
        assert!(matches!(istft(&sg), Err(Error::EmptySpectrogram)));
    }
}
