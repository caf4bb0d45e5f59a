//! Time-domain signal containers and amplitude utilities.

use crate::error::{Error, Result};

/// A monophonic sampled waveform. Samples are dimensionless amplitudes with
/// full scale at +/-1.0; all processing happens in f64 and files are the only
/// quantization boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl MonoSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        Self { samples, sample_rate }
    }

    pub fn zeros(len: usize, sample_rate: u32) -> Self {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64).sqrt()
    }
}

/// A sample-synchronized speech/EGG pair captured at a common rate.
#[derive(Debug, Clone)]
pub struct StereoRecording {
    pub speech: MonoSignal,
    pub egg: MonoSignal,
}

impl StereoRecording {
    pub fn new(speech: MonoSignal, egg: MonoSignal) -> Result<Self> {
        if speech.sample_rate != egg.sample_rate {
            return Err(Error::RateMismatch { a: speech.sample_rate, b: egg.sample_rate });
        }
        if speech.len() != egg.len() {
            return Err(Error::LengthMismatch { a: speech.len(), b: egg.len() });
        }
        Ok(Self { speech, egg })
    }

    pub fn sample_rate(&self) -> u32 {
        self.speech.sample_rate
    }

    pub fn len(&self) -> usize {
        self.speech.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speech.is_empty()
    }
}

/// Prepends `lead_ms` and appends `trail_ms` of digital silence.
pub fn pad_silence(signal: &MonoSignal, lead_ms: f64, trail_ms: f64) -> MonoSignal {
    assert!(lead_ms >= 0.0 && trail_ms >= 0.0, "pad durations must be non-negative");
    let to_samples = |ms: f64| (ms * signal.sample_rate as f64 / 1000.0).round() as usize;
    let lead = to_samples(lead_ms);
    let trail = to_samples(trail_ms);
    let mut out = Vec::with_capacity(lead + signal.len() + trail);
    out.resize(lead, 0.0);
    out.extend_from_slice(&signal.samples);
    out.resize(lead + signal.len() + trail, 0.0);
    MonoSignal::new(out, signal.sample_rate)
}

/// Rescales so the absolute peak sits at `target_dbfs` (default -1 dBFS in the
/// pipeline). Errors on an all-zero signal.
pub fn peak_normalize(signal: &MonoSignal, target_dbfs: f64) -> Result<MonoSignal> {
    let peak = signal.peak();
    if peak == 0.0 {
        return Err(Error::AllZeroSignal);
    }
    let target = 10f64.powf(target_dbfs / 20.0);
    let gain = target / peak;
    let samples = signal.samples.iter().map(|s| s * gain).collect();
    Ok(MonoSignal::new(samples, signal.sample_rate))
}
