//! Windowing and frame geometry.
//!
//! Two framings coexist. The constant-overlap-add framing pads the signal at
//! both ends so every input sample sits under a constant window sum, which is
//! what the STFT/ISTFT pair needs for perfect reconstruction. Analysis-only
//! consumers (LPC averaging) use interior framing instead: frames fully
//! inside the signal, no padding, no edge dilution.

use crate::error::{Error, Result};
use crate::signal::MonoSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    /// Periodic Hamming, `0.54 - 0.46 cos(2 pi n / N)`. Sums to a constant
    /// 1.08 at 50% overlap; the symmetric variant does not.
    #[default]
    PeriodicHamming,
    /// All ones; test use only.
    Rectangular,
}

/// Windowing contract shared by VAD, LPC framing, and the STFT stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec {
    window_ms: f64,
    overlap: f64,
    kind: WindowKind,
    sample_rate: u32,
    window_len: usize,
    hop: usize,
}

impl FrameSpec {
    pub fn new(window_ms: f64, overlap: f64, kind: WindowKind, sample_rate: u32) -> Result<Self> {
        if !(window_ms > 0.0) {
            return Err(Error::InvalidFrameSpec("window duration must be positive".into()));
        }
        if !(overlap > 0.0 && overlap < 1.0) {
            return Err(Error::InvalidFrameSpec(format!(
                "overlap fraction must be in (0, 1), got {overlap}"
            )));
        }
        let window_len = (window_ms * sample_rate as f64 / 1000.0).round() as usize;
        if window_len < 2 {
            return Err(Error::InvalidFrameSpec(format!(
                "window of {window_ms} ms at {sample_rate} Hz is under 2 samples"
            )));
        }
        let hop_f = window_len as f64 * (1.0 - overlap);
        let hop = hop_f.round() as usize;
        if (hop_f - hop as f64).abs() > 1e-9 || hop == 0 {
            return Err(Error::InvalidFrameSpec(format!(
                "hop {hop_f} is not a whole number of samples"
            )));
        }
        Ok(Self { window_ms, overlap, kind, sample_rate, window_len, hop })
    }

    /// The pipeline default: 20 ms periodic Hamming at 50% overlap.
    pub fn pipeline_default(sample_rate: u32) -> Self {
        Self::new(20.0, 0.5, WindowKind::PeriodicHamming, sample_rate)
            .expect("default spec is valid at any usable rate")
    }

    pub fn window_ms(&self) -> f64 {
        self.window_ms
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Lead padding that gives the first input sample a full window sum.
    pub fn lead_pad(&self) -> usize {
        self.window_len - self.hop
    }

    /// Window sample values.
    pub fn window(&self) -> Vec<f64> {
        let n = self.window_len;
        match self.kind {
            WindowKind::PeriodicHamming => (0..n)
                .map(|i| 0.54 - 0.46 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
                .collect(),
            WindowKind::Rectangular => vec![1.0; n],
        }
    }

    /// Sliding window sum per hop phase. Constant overlap-add holds when all
    /// entries agree; returns that constant.
    pub fn overlap_add_constant(&self) -> Result<f64> {
        let w = self.window();
        let mut profile = vec![0.0; self.hop];
        for (i, &v) in w.iter().enumerate() {
            profile[i % self.hop] += v;
        }
        let c = profile[0];
        for &p in &profile {
            if (p - c).abs() > 1e-9 * c.abs() {
                return Err(Error::NotConstantOverlapAdd);
            }
        }
        Ok(c)
    }

    /// Geometry of the padded constant-overlap-add grid over `len` samples.
    pub fn cola_layout(&self, len: usize) -> Result<FrameLayout> {
        if len < self.window_len {
            return Err(Error::SignalShorterThanWindow { len, window: self.window_len });
        }
        let lead = self.lead_pad();
        let last_needed = len - 1 + lead;
        let last_start = last_needed.div_ceil(self.hop) * self.hop;
        Ok(FrameLayout {
            window: self.window_len,
            hop: self.hop,
            lead_pad: lead,
            n_frames: last_start / self.hop + 1,
            padded_len: last_start + self.window_len,
            original_len: len,
        })
    }

    /// Number of interior frames (no padding) over `len` samples.
    pub fn interior_frames(&self, len: usize) -> usize {
        if len < self.window_len {
            0
        } else {
            (len - self.window_len) / self.hop + 1
        }
    }
}

/// Resolved frame geometry for one signal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub window: usize,
    pub hop: usize,
    pub lead_pad: usize,
    pub n_frames: usize,
    pub padded_len: usize,
    pub original_len: usize,
}

impl FrameLayout {
    /// Start of frame `n` in original-sample coordinates (may be negative
    /// inside the lead padding).
    pub fn frame_start(&self, n: usize) -> isize {
        n as isize * self.hop as isize - self.lead_pad as isize
    }
}

/// Splits a signal into windowed frames on the padded constant-overlap-add
/// grid. Every input sample is covered by a full complement of overlapping
/// windows.
pub fn frame_signal(signal: &MonoSignal, spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    if signal.sample_rate != spec.sample_rate() {
        return Err(Error::RateMismatch { a: signal.sample_rate, b: spec.sample_rate() });
    }
    let layout = spec.cola_layout(signal.len())?;
    let w = spec.window();
    let mut frames = Vec::with_capacity(layout.n_frames);
    for n in 0..layout.n_frames {
        let start = layout.frame_start(n);
        let mut frame = vec![0.0; layout.window];
        for (j, f) in frame.iter_mut().enumerate() {
            let idx = start + j as isize;
            if idx >= 0 && (idx as usize) < signal.len() {
                *f = signal.samples[idx as usize] * w[j];
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Interior frames without windowing: starts at 0, hop, 2*hop, ... while the
/// whole window fits. Used for analysis where padding would dilute edge
/// frames and the consumer does its own windowing.
pub fn interior_raw_frames(samples: &[f64], spec: &FrameSpec) -> Vec<Vec<f64>> {
    let n = spec.interior_frames(samples.len());
    (0..n)
        .map(|i| {
            let start = i * spec.hop();
            samples[start..start + spec.window_len()].to_vec()
        })
        .collect()
}
