//! Synthetic source-filter signal generation.
//!
//! Ground-truth pairs for every pipeline stage: a periodic glottal source
//! with known f0 stands in for the EGG channel, and speech is that source
//! pushed through resonator cascades with known centers and bandwidths. No
//! recording hardware needed to exercise the transform.

use crate::error::{Error, Result};
use crate::lpc::all_pole_filter;
use crate::signal::MonoSignal;

/// Glottal pulse shape for [`synth_glottal_source`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    /// One unit sample per period; spectrally flat, the cleanest oracle.
    #[default]
    ImpulseTrain,
    /// Rosenberg pulse with 0.6/0.3 open/close fractions of the period;
    /// rounder, closer to a vocal-fold contact waveform.
    Rosenberg,
}

/// One resonance of a synthetic vocal tract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

impl Resonance {
    pub fn new(center_hz: f64, bandwidth_hz: f64) -> Self {
        Self { center_hz, bandwidth_hz }
    }

    /// Two-pole denominator: poles at radius `exp(-pi bw / fs)`, angle
    /// `2 pi fc / fs`.
    pub fn denominator(&self, sample_rate: u32) -> [f64; 3] {
        let fs = sample_rate as f64;
        let r = (-std::f64::consts::PI * self.bandwidth_hz / fs).exp();
        let theta = std::f64::consts::TAU * self.center_hz / fs;
        [1.0, -2.0 * r * theta.cos(), r * r]
    }
}

/// A piecewise-stationary formant trajectory: segments of given duration,
/// each a list of resonances.
#[derive(Debug, Clone, Default)]
pub struct FormantTrack {
    pub segments: Vec<(f64, Vec<Resonance>)>,
}

impl FormantTrack {
    /// Single stationary tract for the whole signal.
    pub fn stationary(resonances: Vec<Resonance>) -> Self {
        Self { segments: vec![(f64::INFINITY, resonances)] }
    }

    /// Cycles through the given tracts in equal `segment_ms` steps until
    /// `total_ms` is covered.
    pub fn alternating(tracts: Vec<Vec<Resonance>>, segment_ms: f64, total_ms: f64) -> Self {
        let n = (total_ms / segment_ms).ceil() as usize;
        let segments = (0..n.max(1)).map(|i| (segment_ms, tracts[i % tracts.len()].clone())).collect();
        Self { segments }
    }

    fn total_ms(&self) -> f64 {
        self.segments.iter().map(|(d, _)| d).sum()
    }

    /// True magnitude response of segment `i` on the one-sided grid of a
    /// `grid_size`-point FFT, unit numerator.
    pub fn segment_magnitude(&self, i: usize, grid_size: usize, sample_rate: u32) -> Vec<f64> {
        let mut mags = vec![1.0; grid_size / 2 + 1];
        for res in &self.segments[i].1 {
            let a = res.denominator(sample_rate);
            let spec = crate::fft::rfft(&a, grid_size);
            for (m, s) in mags.iter_mut().zip(&spec) {
                *m /= s.norm();
            }
        }
        mags
    }
}

/// Periodic glottal pulse train at `f0`.
pub fn synth_glottal_source(
    f0: f64,
    duration_secs: f64,
    sample_rate: u32,
    shape: PulseShape,
) -> Result<MonoSignal> {
    let fs = sample_rate as f64;
    if !(f0 > 0.0 && f0 < fs / 4.0) {
        return Err(Error::InvalidArg(format!("f0 {f0} Hz outside (0, rate/4)")));
    }
    let len = (duration_secs * fs).round() as usize;
    let period = fs / f0;
    let mut samples = vec![0.0; len];
    match shape {
        PulseShape::ImpulseTrain => {
            let mut k = 0usize;
            loop {
                let t = (k as f64 * period).round() as usize;
                if t >= len {
                    break;
                }
                samples[t] = 1.0;
                k += 1;
            }
        }
        PulseShape::Rosenberg => {
            // Open phase rises over 0.6 T, closing phase falls over 0.3 T.
            let open = 0.6 * period;
            let close = 0.3 * period;
            for (t, s) in samples.iter_mut().enumerate() {
                let phase = t as f64 % period;
                *s = if phase < open {
                    0.5 * (1.0 - (std::f64::consts::PI * phase / open).cos())
                } else if phase < open + close {
                    ((phase - open) * std::f64::consts::PI / (2.0 * close)).cos()
                } else {
                    0.0
                };
            }
        }
    }
    Ok(MonoSignal::new(samples, sample_rate))
}

/// Filters the source segment-by-segment through cascaded two-pole
/// resonators, crossfading 5 ms around each boundary to avoid filter-state
/// clicks.
pub fn synth_speech(source: &MonoSignal, track: &FormantTrack) -> Result<MonoSignal> {
    let fs = source.sample_rate as f64;
    if track.segments.is_empty() {
        return Err(Error::InvalidArg("formant track has no segments".into()));
    }
    for (_, resonances) in &track.segments {
        for r in resonances {
            if r.center_hz >= fs / 2.0 {
                return Err(Error::InvalidArg(format!(
                    "resonance {} Hz at or above Nyquist",
                    r.center_hz
                )));
            }
            if r.bandwidth_hz <= 0.0 {
                return Err(Error::InvalidArg("bandwidth must be positive".into()));
            }
        }
    }
    if track.total_ms() < source.duration_secs() * 1000.0 - 1e-9 {
        return Err(Error::InvalidArg("formant track shorter than the source".into()));
    }

    // Filter the full source through each segment's cascade (steady state
    // everywhere), then assemble with raised-cosine crossfades.
    let filtered: Vec<Vec<f64>> = track
        .segments
        .iter()
        .map(|(_, resonances)| {
            let mut y = source.samples.clone();
            for r in resonances {
                y = all_pole_filter(&y, &r.denominator(source.sample_rate));
            }
            y
        })
        .collect();

    let fade = (0.005 * fs).round() as usize;
    let mut out = vec![0.0; source.len()];
    let mut boundaries = Vec::with_capacity(track.segments.len() + 1);
    let mut acc = 0.0;
    boundaries.push(0usize);
    for (dur_ms, _) in &track.segments {
        acc += dur_ms / 1000.0 * fs;
        boundaries.push((acc.round() as usize).min(source.len()));
    }

    for (i, filt) in filtered.iter().enumerate() {
        let seg_start = boundaries[i];
        let seg_end = boundaries[i + 1];
        if seg_start >= seg_end {
            continue;
        }
        // Fade in at the leading boundary (except the first segment); the
        // previous segment fades out over the same span.
        for t in seg_start..seg_end {
            let mut w = 1.0;
            if i > 0 && t < seg_start + fade {
                let x = (t - seg_start) as f64 / fade as f64;
                w *= 0.5 * (1.0 - (std::f64::consts::PI * x).cos());
            }
            out[t] += w * filt[t];
        }
        if i > 0 {
            // Complementary fade-out of the previous segment.
            let prev = &filtered[i - 1];
            for t in seg_start..(seg_start + fade).min(source.len()) {
                let x = (t - seg_start) as f64 / fade as f64;
                let w = 0.5 * (1.0 + (std::f64::consts::PI * x).cos());
                out[t] += w * prev[t];
            }
        }
    }
    Ok(MonoSignal::new(out, source.sample_rate))
}

/// Parameters for a complete synthetic speech/EGG pair.
#[derive(Debug, Clone)]
pub struct FixtureParams {
    pub f0: f64,
    pub duration_secs: f64,
    pub sample_rate: u32,
    pub shape: PulseShape,
    pub track: FormantTrack,
    /// Depth of the raised-cosine amplitude modulation applied to the speech
    /// channel (0 = flat, 0.5 = swings between 0.5x and 1x).
    pub am_depth: f64,
    /// Modulation rate in Hz.
    pub am_rate: f64,
    /// Quiet noise bed placed before and after the utterance on the speech
    /// channel, so level-based voice detection sees a realistic floor.
    pub margin_ms: f64,
    pub margin_noise_dbfs: f64,
    /// Raised-cosine fade applied to both ends of the utterance; a step
    /// onset/offset is not a realistic vocalization.
    pub fade_ms: f64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self {
            f0: 120.0,
            duration_secs: 1.0,
            sample_rate: 48_000,
            shape: PulseShape::ImpulseTrain,
            track: FormantTrack::stationary(vec![
                Resonance::new(700.0, 90.0),
                Resonance::new(1200.0, 100.0),
                Resonance::new(2600.0, 120.0),
            ]),
            am_depth: 0.4,
            am_rate: 2.5,
            margin_ms: 150.0,
            margin_noise_dbfs: -70.0,
            fade_ms: 250.0,
        }
    }
}

/// Builds a synchronized two-track fixture: amplitude-modulated synthetic
/// speech plus its raw glottal source, both peak-normalized with quiet
/// margins, ready to feed the transform.
pub fn fixture_pair(params: &FixtureParams) -> Result<crate::signal::StereoRecording> {
    let source =
        synth_glottal_source(params.f0, params.duration_secs, params.sample_rate, params.shape)?;
    let speech = synth_speech(&source, &params.track)?;

    let fs = params.sample_rate as f64;
    let fade = ((params.fade_ms / 1000.0 * fs).round() as usize).min(speech.len() / 2);
    // Constant-slope (linear in dB) fades down to -54 dB; a raised-cosine
    // fade has an unbounded dB slope at its foot, which no short-time
    // envelope transfer can track.
    const FADE_FLOOR_DB: f64 = -54.0;
    let fade_gain = |k: usize| -> f64 {
        if fade == 0 {
            return 1.0;
        }
        10f64.powf(FADE_FLOOR_DB * (1.0 - k as f64 / fade as f64) / 20.0)
    };
    let am: Vec<f64> = (0..speech.len())
        .map(|t| {
            let ph = std::f64::consts::TAU * params.am_rate * t as f64 / fs;
            let mut w = 1.0 - params.am_depth * 0.5 * (1.0 - ph.cos());
            if t < fade {
                w *= fade_gain(t);
            }
            let from_end = speech.len() - 1 - t;
            if from_end < fade {
                w *= fade_gain(from_end);
            }
            w
        })
        .collect();

    let margin = (params.margin_ms / 1000.0 * fs).round() as usize;
    let noise_amp = 10f64.powf(params.margin_noise_dbfs / 20.0);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut noise = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };

    let speech_norm = crate::signal::peak_normalize(&speech, -3.0)?;
    // The margins carry quiet noise beds: the speech bed anchors the
    // level-detector percentile, and the EGG bed sits 10 dB lower because
    // exact digital silence there would push the envelope ratio against its
    // guard on convolution-tail frames.
    let egg_noise_amp = noise_amp * 10f64.powf(-0.5);
    let mut s = Vec::with_capacity(speech.len() + 2 * margin);
    let mut g = Vec::with_capacity(speech.len() + 2 * margin);
    for _ in 0..margin {
        s.push(noise_amp * noise());
        g.push(egg_noise_amp * noise());
    }
    for (t, &v) in speech_norm.samples.iter().enumerate() {
        s.push(v * am[t]);
        g.push(source.samples[t] * 0.8);
    }
    for _ in 0..margin {
        s.push(noise_amp * noise());
        g.push(egg_noise_amp * noise());
    }

    crate::signal::StereoRecording::new(
        MonoSignal::new(s, params.sample_rate),
        MonoSignal::new(g, params.sample_rate),
    )
}
