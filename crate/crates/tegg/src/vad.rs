//! Energy-based voice activity detection on the shared frame grid.
//!
//! Frame RMS levels in dB are compared against a percentile noise-floor
//! estimate plus a margin, with a hangover that bridges brief dips. Digital
//! silence (exactly zero RMS) never counts as voiced and is excluded from
//! the floor estimate, so appending silence to a recording cannot shift the
//! threshold, and pure gain changes cannot flip decisions.

use crate::error::{Error, Result};
use crate::framing::FrameSpec;
use crate::signal::MonoSignal;

#[derive(Debug, Clone)]
pub struct VadConfig {
    /// Quantile of finite frame levels used as the noise-floor estimate.
    pub floor_percentile: f64,
    /// Voiced threshold sits this many dB above the floor estimate.
    pub margin_db: f64,
    /// Frames kept voiced after energy drops below threshold.
    pub hangover_frames: usize,
    /// Stationary-input guard: when all finite frame levels agree within
    /// this spread, the percentile is meaningless and the absolute floor
    /// decides instead.
    pub stationary_spread_db: f64,
    /// Absolute level a stationary signal must exceed to count as voiced.
    pub absolute_floor_dbfs: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self {
            floor_percentile: 0.20,
            margin_db: 9.0,
            hangover_frames: 5,
            stationary_spread_db: 0.5,
            absolute_floor_dbfs: -60.0,
        }
    }
}

/// Frame-level and sample-level voicing decisions for one signal.
#[derive(Debug, Clone)]
pub struct VoiceMask {
    pub frame_flags: Vec<bool>,
    pub spec: FrameSpec,
    /// One flag per input sample; set iff at least one voiced frame covers
    /// the sample.
    pub sample_flags: Vec<bool>,
}

impl VoiceMask {
    pub fn voiced_samples(&self) -> usize {
        self.sample_flags.iter().filter(|&&f| f).count()
    }

    pub fn voiced_frames(&self) -> usize {
        self.frame_flags.iter().filter(|&&f| f).count()
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Flags frames whose RMS level exceeds the adaptive threshold; silence
/// yields an all-false mask rather than an error.
pub fn detect_voice(signal: &MonoSignal, spec: &FrameSpec, config: &VadConfig) -> Result<VoiceMask> {
    let layout = spec.cola_layout(signal.len())?;

    // Frame RMS in dB over the padded grid, normalized by the samples a
    // frame actually covers so edge frames sit at the same level as interior
    // frames for stationary input.
    let mut levels = Vec::with_capacity(layout.n_frames);
    for n in 0..layout.n_frames {
        let start = layout.frame_start(n);
        let mut acc = 0.0;
        let mut covered = 0usize;
        for j in 0..layout.window {
            let idx = start + j as isize;
            if idx >= 0 && (idx as usize) < signal.len() {
                let v = signal.samples[idx as usize];
                acc += v * v;
                covered += 1;
            }
        }
        let rms = if covered > 0 { (acc / covered as f64).sqrt() } else { 0.0 };
        levels.push(if rms > 0.0 { 20.0 * rms.log10() } else { f64::NEG_INFINITY });
    }

    let mut finite: Vec<f64> = levels.iter().copied().filter(|l| l.is_finite()).collect();
    let mut raw_flags = vec![false; levels.len()];
    if !finite.is_empty() {
        finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let spread = finite[finite.len() - 1] - finite[0];
        if spread <= config.stationary_spread_db {
            // Stationary input: the percentile would flag nothing or
            // everything on numerical noise, so decide on absolute level.
            let voiced = finite[finite.len() - 1] >= config.absolute_floor_dbfs;
            for (flag, level) in raw_flags.iter_mut().zip(&levels) {
                *flag = voiced && level.is_finite();
            }
        } else {
            let floor = percentile(&finite, config.floor_percentile);
            let threshold = floor + config.margin_db;
            for (flag, level) in raw_flags.iter_mut().zip(&levels) {
                *flag = *level > threshold;
            }
        }
    }

    // Hangover: hold the voiced flag for a few frames after energy drops.
    let mut frame_flags = vec![false; raw_flags.len()];
    let mut hold = 0usize;
    for (i, &raw) in raw_flags.iter().enumerate() {
        if raw {
            hold = config.hangover_frames;
            frame_flags[i] = true;
        } else if hold > 0 {
            hold -= 1;
            frame_flags[i] = true;
        }
    }

    // Project voiced frames onto samples.
    let mut sample_flags = vec![false; signal.len()];
    for (n, &flag) in frame_flags.iter().enumerate() {
        if !flag {
            continue;
        }
        let start = layout.frame_start(n);
        let lo = start.max(0) as usize;
        let hi = ((start + layout.window as isize).max(0) as usize).min(signal.len());
        for f in &mut sample_flags[lo..hi] {
            *f = true;
        }
    }

    Ok(VoiceMask { frame_flags, spec: *spec, sample_flags })
}

/// Concatenates the flagged samples in original order.
pub fn extract_voiced(signal: &MonoSignal, mask: &VoiceMask) -> Result<MonoSignal> {
    assert_eq!(
        signal.len(),
        mask.sample_flags.len(),
        "mask was built from a signal of different length"
    );
    let samples: Vec<f64> = signal
        .samples
        .iter()
        .zip(&mask.sample_flags)
        .filter_map(|(&s, &f)| f.then_some(s))
        .collect();
    if samples.is_empty() {
        return Err(Error::NoVoicedSamples);
    }
    Ok(MonoSignal::new(samples, signal.sample_rate))
}
