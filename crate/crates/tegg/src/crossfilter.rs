//! Stage two and pipeline orchestration: convolve the EGG with the average
//! vocal-tract impulse response, transfer the speech signal's short-time
//! energy envelope, and assemble the end-to-end transform.

use std::time::Instant;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft;
use crate::framing::{FrameSpec, WindowKind};
use crate::iir::{settle_pad, Sos};
use crate::lpc::GfmConfig;
use crate::resample::resample_down;
use crate::response::MagnitudeResponse;
use crate::signal::{MonoSignal, StereoRecording};
use crate::spectral::{default_fft_size, istft, stft, Spectrogram};
use crate::tract::{average_vocal_tract, build_impulse_response};
use crate::vad::{detect_voice, extract_voiced, VadConfig, VoiceMask};

/// Short-time energy envelope: sum of one-sided bin magnitudes per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub values: Vec<f64>,
}

/// Per-frame gain vector matching one envelope to another, with guard
/// bookkeeping for frames whose denominator was effectively zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationVector {
    pub values: Vec<f64>,
    pub guard_mask: Vec<bool>,
}

impl ModulationVector {
    pub fn guard_count(&self) -> usize {
        self.guard_mask.iter().filter(|&&g| g).count()
    }
}

/// Adaptive high-pass policy for the EGG channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EggHighpass {
    /// Leave the channel untouched (recordings without low-frequency drift).
    #[default]
    Off,
    /// Estimate f0 from the voiced speech and cut 20 Hz below it.
    Auto,
    /// Cut 20 Hz below a caller-supplied fundamental.
    Fixed(f64),
}

/// Knobs of the end-to-end transform; defaults follow the reference
/// configuration (16 kHz analysis path, 20 ms Hamming frames at 50% overlap,
/// 4096-point response grid, 2048 taps).
#[derive(Debug, Clone)]
pub struct TransformConfig {
    pub window_ms: f64,
    pub overlap: f64,
    pub lpc_rate: u32,
    pub grid_size: usize,
    pub n_taps: usize,
    pub vad: VadConfig,
    pub gfm: GfmConfig,
    /// Envelope guard threshold, relative to the peak frame energy of the
    /// filtered source.
    pub guard_epsilon_rel: f64,
    /// Ceiling on the per-frame gain.
    pub r_max: f64,
    pub egg_highpass: EggHighpass,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            window_ms: 20.0,
            overlap: 0.5,
            lpc_rate: 16_000,
            grid_size: 4096,
            n_taps: 2048,
            vad: VadConfig::default(),
            gfm: GfmConfig::default(),
            guard_epsilon_rel: 1e-10,
            r_max: 1e4,
            egg_highpass: EggHighpass::Off,
        }
    }
}

impl TransformConfig {
    pub fn frame_spec(&self, sample_rate: u32) -> Result<FrameSpec> {
        FrameSpec::new(self.window_ms, self.overlap, WindowKind::PeriodicHamming, sample_rate)
    }
}

/// Summary counters serialized as the diagnostics JSON sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSummary {
    pub schema_version: u32,
    pub frames_used: usize,
    pub frames_skipped: usize,
    pub guard_frames: usize,
    pub f0_estimate: Option<f64>,
    pub runtime_ms: f64,
    pub realtime_factor: f64,
}

/// Everything the pipeline learned along the way: VAD mask, averaged
/// magnitude, modulation vector, counters, timing.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub vad_frame_flags: Vec<bool>,
    pub voiced_samples: usize,
    pub mean_magnitude: MagnitudeResponse,
    pub modulation: ModulationVector,
    pub frames_used: usize,
    pub frames_skipped: usize,
    pub f0_estimate: Option<f64>,
    pub runtime_ms: f64,
    pub realtime_factor: f64,
}

impl Diagnostics {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn summary(&self) -> DiagnosticsSummary {
        DiagnosticsSummary {
            schema_version: Self::SCHEMA_VERSION,
            frames_used: self.frames_used,
            frames_skipped: self.frames_skipped,
            guard_frames: self.modulation.guard_count(),
            f0_estimate: self.f0_estimate,
            runtime_ms: self.runtime_ms,
            realtime_factor: self.realtime_factor,
        }
    }

    /// Two-column CSV of the averaged vocal-tract magnitude.
    pub fn mean_magnitude_csv(&self) -> String {
        let mut out = String::from("frequency_hz,magnitude\n");
        for (k, m) in self.mean_magnitude.magnitudes.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.mean_magnitude.bin_frequency(k), m));
        }
        out
    }

    /// Per-frame modulation gains with their guard flags.
    pub fn modulation_csv(&self) -> String {
        let mut out = String::from("frame,gain,guarded\n");
        for (n, (v, g)) in
            self.modulation.values.iter().zip(&self.modulation.guard_mask).enumerate()
        {
            out.push_str(&format!("{n},{v},{}\n", u8::from(*g)));
        }
        out
    }
}

/// Full linear convolution truncated to the length of `signal`, via FFT for
/// anything beyond toy sizes. Truncation keeps downstream frame grids
/// aligned with the untouched speech channel.
pub fn convolve(signal: &MonoSignal, kernel: &MonoSignal) -> Result<MonoSignal> {
    if signal.sample_rate != kernel.sample_rate {
        return Err(Error::RateMismatch { a: signal.sample_rate, b: kernel.sample_rate });
    }
    if signal.is_empty() || kernel.is_empty() {
        return Err(Error::EmptySignal);
    }

    let out_len = signal.len();
    let samples = if signal.len().min(kernel.len()) <= 64 {
        let mut out = vec![0.0; out_len];
        for (i, &k) in kernel.samples.iter().enumerate() {
            if k == 0.0 {
                continue;
            }
            for (o, &s) in out[i..].iter_mut().zip(&signal.samples) {
                *o += k * s;
            }
        }
        out
    } else {
        let n = (signal.len() + kernel.len() - 1).next_power_of_two();
        let mut a = fft::fft_real_full(&signal.samples, n);
        let b = fft::fft_real_full(&kernel.samples, n);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        fft::ifft_full(&mut a);
        a[..out_len].iter().map(|c| c.re).collect()
    };
    Ok(MonoSignal::new(samples, signal.sample_rate))
}

/// Sum of one-sided bin magnitudes per frame.
pub fn energy_envelope(spectrogram: &Spectrogram) -> Envelope {
    Envelope {
        values: spectrogram
            .frames
            .iter()
            .map(|col| col.iter().map(|c| c.norm()).sum())
            .collect(),
    }
}

/// Per-frame envelope ratio `reference / actual`, zeroed where the
/// denominator is at or below `epsilon` and clamped to `r_max`. The guard
/// mask flags both cases: every flagged frame is one whose output envelope
/// will not track the reference.
pub fn modulation_ratio(
    reference: &Envelope,
    actual: &Envelope,
    epsilon: f64,
    r_max: f64,
) -> Result<ModulationVector> {
    if reference.values.len() != actual.values.len() {
        return Err(Error::LengthMismatch {
            a: reference.values.len(),
            b: actual.values.len(),
        });
    }
    let mut values = Vec::with_capacity(actual.values.len());
    let mut guard_mask = Vec::with_capacity(actual.values.len());
    for (&e_ref, &e_act) in reference.values.iter().zip(&actual.values) {
        if e_act > epsilon {
            let r = e_ref / e_act;
            values.push(r.min(r_max));
            guard_mask.push(r > r_max);
        } else {
            values.push(0.0);
            guard_mask.push(true);
        }
    }
    Ok(ModulationVector { values, guard_mask })
}

/// Scales every column of the spectrogram by its per-frame gain; the phase
/// of the input columns is untouched.
pub fn apply_ratio(spectrogram: &Spectrogram, modulation: &ModulationVector) -> Result<Spectrogram> {
    if spectrogram.n_frames() != modulation.values.len() {
        return Err(Error::LengthMismatch {
            a: spectrogram.n_frames(),
            b: modulation.values.len(),
        });
    }
    let mut out = spectrogram.clone();
    for (col, &r) in out.frames.iter_mut().zip(&modulation.values) {
        for bin in col.iter_mut() {
            *bin *= r;
        }
    }
    Ok(out)
}

/// F0 search band for the autocorrelation estimator.
const F0_MIN_HZ: f64 = 50.0;
const F0_MAX_HZ: f64 = 500.0;
/// Normalized correlation a frame must reach to vote.
const F0_MIN_CORRELATION: f64 = 0.3;

/// Median fundamental over voiced stretches, from the normalized
/// autocorrelation peak per 40 ms frame in the 50-500 Hz band. Candidate
/// peaks within 1% of the frame maximum resolve to the smallest lag, which
/// rejects octave-down errors on strongly periodic signals.
pub fn estimate_f0(signal: &MonoSignal, mask: &VoiceMask) -> Result<f64> {
    let fs = signal.sample_rate as f64;
    let frame_len = ((0.040 * fs).round() as usize).max(64);
    let hop = frame_len / 2;
    let lag_min = (fs / F0_MAX_HZ).floor() as usize;
    let lag_max = ((fs / F0_MIN_HZ).ceil() as usize).min(frame_len - 1);
    if signal.len() < frame_len || lag_min + 2 >= lag_max {
        return Err(Error::CannotEstimateF0);
    }

    let mut estimates = Vec::new();
    let mut start = 0usize;
    while start + frame_len <= signal.len() {
        let voiced =
            mask.sample_flags[start..start + frame_len].iter().filter(|&&f| f).count();
        if (voiced as f64) < 0.9 * frame_len as f64 {
            start += hop;
            continue;
        }
        let frame = &signal.samples[start..start + frame_len];
        if let Some(f0) = frame_f0(frame, fs, lag_min, lag_max) {
            estimates.push(f0);
        }
        start += hop;
    }
    if estimates.is_empty() {
        return Err(Error::CannotEstimateF0);
    }
    estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(estimates[estimates.len() / 2])
}

fn frame_f0(frame: &[f64], fs: f64, lag_min: usize, lag_max: usize) -> Option<f64> {
    let n = frame.len();
    let energy: Vec<f64> = {
        // Prefix sums of x^2 for the lag-dependent normalization.
        let mut acc = vec![0.0; n + 1];
        for (i, &v) in frame.iter().enumerate() {
            acc[i + 1] = acc[i] + v * v;
        }
        acc
    };
    let rho = |lag: usize| -> f64 {
        let m = n - lag;
        let dot: f64 = frame[..m].iter().zip(&frame[lag..]).map(|(a, b)| a * b).sum();
        let e0 = energy[m];
        let e1 = energy[n] - energy[lag];
        if e0 <= 0.0 || e1 <= 0.0 {
            return 0.0;
        }
        dot / (e0 * e1).sqrt()
    };

    let rhos: Vec<f64> = (lag_min..=lag_max).map(rho).collect();
    let peak = rhos.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak < F0_MIN_CORRELATION {
        return None;
    }
    // Smallest-lag local maximum within 1% of the global peak.
    let accept = peak * 0.99;
    for (i, &r) in rhos.iter().enumerate() {
        if r < accept {
            continue;
        }
        let left = if i == 0 { f64::NEG_INFINITY } else { rhos[i - 1] };
        let right = if i + 1 == rhos.len() { f64::NEG_INFINITY } else { rhos[i + 1] };
        if r >= left && r >= right {
            let mut lag = (lag_min + i) as f64;
            // Parabolic refinement when the neighbours exist.
            if i > 0 && i + 1 < rhos.len() {
                let denom = left - 2.0 * r + right;
                if denom.abs() > 1e-12 {
                    lag += 0.5 * (left - right) / denom;
                }
            }
            return Some(fs / lag);
        }
    }
    None
}

/// Zero-phase 4th-order high-pass with the combined -3 dB point 20 Hz below
/// the fundamental. The per-pass design cutoff sits at
/// `(f0 - 20) * 0.8953` so the forward-backward cascade lands its half-power
/// point on the adaptive cutoff exactly.
pub fn adaptive_highpass_egg(egg: &MonoSignal, f0: f64) -> Result<MonoSignal> {
    if f0 <= 25.0 {
        return Err(Error::InvalidArg(format!("f0 {f0} Hz too low for the adaptive high-pass")));
    }
    let cutoff = f0 - 20.0;
    let fs = egg.sample_rate as f64;
    // 2^(-1/16): scales a Butterworth's -3 dB point so that two passes
    // give -3 dB at the nominal cutoff.
    let per_pass = cutoff * 0.8953;
    let sos = Sos::butterworth_highpass(4, per_pass, fs);
    let filtered = sos.filtfilt(&egg.samples, settle_pad(cutoff, fs, egg.len()));
    Ok(MonoSignal::new(filtered, egg.sample_rate))
}

/// Stage two alone: given speech and the filtered source at a common rate,
/// matches the source's short-time envelope to the speech envelope and
/// returns the time-domain result with the modulation vector.
pub fn cross_filter(
    speech: &MonoSignal,
    filtered_source: &MonoSignal,
    config: &TransformConfig,
) -> Result<(MonoSignal, ModulationVector)> {
    let spec = config.frame_spec(speech.sample_rate)?;
    let fft_size = default_fft_size(&spec);
    let speech_spec = stft(speech, &spec, fft_size)?;
    let source_spec = stft(filtered_source, &spec, fft_size)?;

    let e_s = energy_envelope(&speech_spec);
    let e_y = energy_envelope(&source_spec);
    let peak_energy = e_y.values.iter().cloned().fold(0.0, f64::max);
    if peak_energy <= 0.0 {
        return Err(Error::SilentEgg);
    }
    let epsilon = config.guard_epsilon_rel * peak_energy;
    let modulation = modulation_ratio(&e_s, &e_y, epsilon, config.r_max)?;
    if modulation.guard_mask.iter().all(|&g| g) {
        return Err(Error::SilentEgg);
    }

    let z_spec = apply_ratio(&source_spec, &modulation)?;
    let z = istft(&z_spec)?;
    Ok((z, modulation))
}

/// The end-to-end transform. Stage one: downsample speech to the analysis
/// rate, gate to voiced samples, average the per-frame vocal-tract
/// responses, and build the minimum-phase impulse response at the recording
/// rate. Stage two: convolve the EGG with it and impose the speech
/// signal's short-time energy envelope. Output matches the speech channel
/// in length and rate.
pub fn transform(
    recording: &StereoRecording,
    config: &TransformConfig,
) -> Result<(MonoSignal, Diagnostics)> {
    let started = Instant::now();
    let rate = recording.sample_rate();
    if !rate.is_multiple_of(config.lpc_rate) {
        return Err(Error::NonIntegerFactor { from: rate, to: config.lpc_rate });
    }

    // Stage one: analysis path at the LPC rate.
    let speech_lpc = if rate == config.lpc_rate {
        recording.speech.clone()
    } else {
        resample_down(&recording.speech, config.lpc_rate)?
    };
    let lpc_spec = config.frame_spec(config.lpc_rate)?;
    let mask = detect_voice(&speech_lpc, &lpc_spec, &config.vad)?;
    let voiced = extract_voiced(&speech_lpc, &mask).map_err(|_| Error::NoVoicedSamples)?;
    let average = average_vocal_tract(&voiced, &lpc_spec, config.grid_size, &config.gfm)?;
    let impulse = build_impulse_response(&average.mean, config.n_taps, rate)?;

    // Optional adaptive high-pass on the EGG channel.
    let f0_estimate = match config.egg_highpass {
        EggHighpass::Off => None,
        EggHighpass::Auto => Some(estimate_f0(&speech_lpc, &mask)?),
        EggHighpass::Fixed(f0) => Some(f0),
    };
    let egg = match f0_estimate {
        Some(f0) => adaptive_highpass_egg(&recording.egg, f0)?,
        None => recording.egg.clone(),
    };

    // Stage two at the recording rate.
    let filtered_source = convolve(&egg, &impulse)?;
    let (z, modulation) = cross_filter(&recording.speech, &filtered_source, config)?;

    let runtime = started.elapsed();
    let runtime_ms = runtime.as_secs_f64() * 1000.0;
    let diagnostics = Diagnostics {
        vad_frame_flags: mask.frame_flags.clone(),
        voiced_samples: mask.voiced_samples(),
        mean_magnitude: average.mean,
        modulation,
        frames_used: average.frames_used,
        frames_skipped: average.frames_skipped,
        f0_estimate,
        runtime_ms,
        realtime_factor: recording.speech.duration_secs() / runtime.as_secs_f64(),
    };
    Ok((z, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::FrameSpec;

    fn sig(samples: Vec<f64>, rate: u32) -> MonoSignal {
        MonoSignal::new(samples, rate)
    }

    #[test]
    fn convolve_identity_kernel() {
        let g = sig(vec![0.5, -0.25, 1.0, 0.0, 0.75], 48_000);
        let h = sig(vec![1.0], 48_000);
        let y = convolve(&g, &h).unwrap();
        assert_eq!(y.samples, g.samples);
    }

    #[test]
    fn convolve_shifted_impulse_input() {
        let mut g = vec![0.0; 64];
        g[10] = 1.0;
        let h = sig((0..32).map(|i| (i as f64 * 0.37).sin()).collect(), 48_000);
        let y = convolve(&sig(g, 48_000), &h).unwrap();
        for (i, &v) in y.samples.iter().enumerate() {
            let expected = if i >= 10 && i - 10 < 32 { h.samples[i - 10] } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "sample {i}");
        }
    }

    #[test]
    fn convolve_matches_quadratic_oracle() {
        let mut state = 1u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let g: Vec<f64> = (0..1000).map(|_| rnd()).collect();
        let h: Vec<f64> = (0..300).map(|_| rnd()).collect();
        let fast = convolve(&sig(g.clone(), 48_000), &sig(h.clone(), 48_000)).unwrap();

        // Brute-force O(n^2) truncated convolution.
        let mut slow = vec![0.0; g.len()];
        for (t, s) in slow.iter_mut().enumerate() {
            for (k, &hv) in h.iter().enumerate().take(t + 1) {
                *s += hv * g[t - k];
            }
        }
        for (a, b) in fast.samples.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn convolve_rejects_bad_operands() {
        let a = sig(vec![1.0], 48_000);
        let b = sig(vec![1.0], 16_000);
        assert!(matches!(convolve(&a, &b), Err(Error::RateMismatch { .. })));
        let empty = sig(vec![], 48_000);
        assert!(matches!(convolve(&a, &empty), Err(Error::EmptySignal)));
    }

    fn toy_spectrogram(columns: Vec<Vec<Complex64>>) -> Spectrogram {
        let spec = FrameSpec::pipeline_default(16_000);
        Spectrogram { frames: columns, spec, fft_size: 512, original_len: 0 }
    }

    #[test]
    fn envelope_sums_bin_magnitudes() {
        let col = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(-3.0, 0.0),
        ];
        let sg = toy_spectrogram(vec![col]);
        let env = energy_envelope(&sg);
        assert_eq!(env.values, vec![6.0]);

        let zero = toy_spectrogram(vec![vec![Complex64::new(0.0, 0.0); 3]; 4]);
        assert!(energy_envelope(&zero).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn envelope_matches_summation_oracle() {
        let mut state = 5u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let cols: Vec<Vec<Complex64>> =
            (0..7).map(|_| (0..33).map(|_| Complex64::new(rnd(), rnd())).collect()).collect();
        let env = energy_envelope(&toy_spectrogram(cols.clone()));
        for (n, col) in cols.iter().enumerate() {
            let expected: f64 = col.iter().map(|c| (c.re * c.re + c.im * c.im).sqrt()).sum();
            assert!((env.values[n] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn modulation_ratio_basics() {
        let e_s = Envelope { values: vec![8.0, 1.0, 0.3] };
        let e_y = Envelope { values: vec![4.0, 1.0, 0.0] };
        let m = modulation_ratio(&e_s, &e_y, 1e-12, 1e4).unwrap();
        assert_eq!(m.values, vec![2.0, 1.0, 0.0]);
        assert_eq!(m.guard_mask, vec![false, false, true]);
        assert_eq!(m.guard_count(), 1);

        let bad = Envelope { values: vec![1.0] };
        assert!(matches!(modulation_ratio(&e_s, &bad, 1e-12, 1e4), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn modulation_ratio_clamps_at_r_max() {
        let e_s = Envelope { values: vec![1e9] };
        let e_y = Envelope { values: vec![1.0] };
        let m = modulation_ratio(&e_s, &e_y, 1e-12, 1e4).unwrap();
        assert_eq!(m.values, vec![1e4]);
    }

    #[test]
    fn apply_ratio_identity_and_scaling() {
        let col = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)];
        let sg = toy_spectrogram(vec![col.clone(), col.clone()]);
        let ones = ModulationVector { values: vec![1.0, 1.0], guard_mask: vec![false, false] };
        let same = apply_ratio(&sg, &ones).unwrap();
        assert_eq!(same.frames, sg.frames);

        let double = ModulationVector { values: vec![2.0, 0.5], guard_mask: vec![false, false] };
        let scaled = apply_ratio(&sg, &double).unwrap();
        assert_eq!(scaled.frames[0][0], Complex64::new(2.0, 4.0));
        assert_eq!(scaled.frames[1][1], Complex64::new(-0.25, 0.125));
        // Phase untouched.
        assert!((scaled.frames[0][0].arg() - sg.frames[0][0].arg()).abs() < 1e-15);
    }

    #[test]
    fn envelope_identity_after_apply_ratio() {
        let mut state = 9u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let cols: Vec<Vec<Complex64>> =
            (0..16).map(|_| (0..257).map(|_| Complex64::new(rnd(), rnd())).collect()).collect();
        let y = toy_spectrogram(cols);
        let e_y = energy_envelope(&y);
        let e_s = Envelope { values: (0..16).map(|n| 0.3 + 0.1 * n as f64).collect() };
        let m = modulation_ratio(&e_s, &e_y, 1e-30, 1e6).unwrap();
        let z = apply_ratio(&y, &m).unwrap();
        let e_z = energy_envelope(&z);
        for n in 0..16 {
            if m.guard_mask[n] {
                continue;
            }
            let rel = (e_z.values[n] - e_s.values[n]).abs() / e_s.values[n];
            assert!(rel < 1e-9, "frame {n}: relative error {rel}");
        }
    }

    #[test]
    fn f0_of_pulse_train() {
        let g = crate::fixtures::synth_glottal_source(
            100.0,
            1.0,
            16_000,
            crate::fixtures::PulseShape::ImpulseTrain,
        )
        .unwrap();
        let spec = FrameSpec::pipeline_default(16_000);
        let mask = detect_voice(&g, &spec, &VadConfig::default()).unwrap();
        let f0 = estimate_f0(&g, &mask).unwrap();
        assert!((f0 - 100.0).abs() / 100.0 < 0.02, "estimated {f0} Hz");
    }

    #[test]
    fn f0_of_sine() {
        let s = sig(
            (0..16_000)
                .map(|i| 0.8 * (std::f64::consts::TAU * 220.0 * i as f64 / 16_000.0).sin())
                .collect(),
            16_000,
        );
        let spec = FrameSpec::pipeline_default(16_000);
        let mask = detect_voice(&s, &spec, &VadConfig::default()).unwrap();
        let f0 = estimate_f0(&s, &mask).unwrap();
        assert!((f0 - 220.0).abs() / 220.0 < 0.02, "estimated {f0} Hz");
    }

    #[test]
    fn f0_of_noise_fails() {
        let mut state = 77u64;
        let samples: Vec<f64> = (0..16_000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                0.5 * ((state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
            })
            .collect();
        let s = sig(samples, 16_000);
        let spec = FrameSpec::pipeline_default(16_000);
        let mask = detect_voice(&s, &spec, &VadConfig::default()).unwrap();
        assert!(matches!(estimate_f0(&s, &mask), Err(Error::CannotEstimateF0)));
    }

    fn fitted_amplitude(x: &[f64], f: f64, fs: f64) -> f64 {
        let (mut c, mut s) = (0.0, 0.0);
        for (i, &v) in x.iter().enumerate() {
            let ph = std::f64::consts::TAU * f * i as f64 / fs;
            c += v * ph.cos();
            s += v * ph.sin();
        }
        2.0 * (c * c + s * s).sqrt() / x.len() as f64
    }

    #[test]
    fn adaptive_highpass_cutoff_placement() {
        let fs = 48_000u32;
        let n = 96_000;
        let tone = |f: f64| -> MonoSignal {
            sig(
                (0..n).map(|i| (std::f64::consts::TAU * f * i as f64 / fs as f64).sin()).collect(),
                fs,
            )
        };
        // f0 = 120 Hz places the combined -3 dB point at 100 Hz.
        let at_cutoff = adaptive_highpass_egg(&tone(100.0), 120.0).unwrap();
        let db = 20.0 * fitted_amplitude(&at_cutoff.samples[8000..88_000], 100.0, fs as f64).log10();
        assert!((db + 3.01).abs() < 0.25, "cutoff response {db} dB");

        // Passband at the fundamental within ~1 dB.
        let at_f0 = adaptive_highpass_egg(&tone(120.0), 120.0).unwrap();
        let db = 20.0 * fitted_amplitude(&at_f0.samples[8000..88_000], 120.0, fs as f64).log10();
        assert!(db.abs() < 1.0, "passband at f0: {db} dB");

        // Stopband at half the fundamental.
        let at_half = adaptive_highpass_egg(&tone(60.0), 120.0).unwrap();
        let db = 20.0 * fitted_amplitude(&at_half.samples[8000..88_000], 60.0, fs as f64).log10();
        assert!(db <= -24.0, "stopband at f0/2: {db} dB");

        // Sub-audio drift is crushed.
        let drift = adaptive_highpass_egg(&tone(10.0), 120.0).unwrap();
        let db = 20.0 * fitted_amplitude(&drift.samples[8000..88_000], 10.0, fs as f64).log10();
        assert!(db <= -40.0, "drift attenuation {db} dB");
    }

    #[test]
    fn adaptive_highpass_passes_content_above_cutoff() {
        let fs = 48_000u32;
        let tone = sig(
            (0..48_000)
                .map(|i| (std::f64::consts::TAU * 400.0 * i as f64 / fs as f64).sin())
                .collect(),
            fs,
        );
        let out = adaptive_highpass_egg(&tone, 120.0).unwrap();
        let db = 20.0 * fitted_amplitude(&out.samples[4000..44_000], 400.0, fs as f64).log10();
        assert!(db.abs() < 0.1, "400 Hz should pass untouched, got {db} dB");
    }

    #[test]
    fn adaptive_highpass_rejects_low_f0() {
        let egg = sig(vec![0.0; 100], 48_000);
        assert!(adaptive_highpass_egg(&egg, 25.0).is_err());
    }
}
