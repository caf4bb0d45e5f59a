//! Butterworth biquad cascades used by the resamplers and the adaptive EGG
//! high-pass. Zero-phase application pads with odd reflection before the
//! forward/backward passes, scipy-filtfilt style.

/// One second-order section, direct form II transposed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn lowpass(fc: f64, fs: f64, q: f64) -> Self {
        let w0 = std::f64::consts::TAU * fc / fs;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 - cos) / 2.0 / a0,
            b1: (1.0 - cos) / a0,
            b2: (1.0 - cos) / 2.0 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }

    fn highpass(fc: f64, fs: f64, q: f64) -> Self {
        let w0 = std::f64::consts::TAU * fc / fs;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: (1.0 + cos) / 2.0 / a0,
            b1: -(1.0 + cos) / a0,
            b2: (1.0 + cos) / 2.0 / a0,
            a1: -2.0 * cos / a0,
            a2: (1.0 - alpha) / a0,
        }
    }
}

/// Cascade of second-order sections.
#[derive(Debug, Clone)]
pub(crate) struct Sos {
    sections: Vec<Biquad>,
}

/// Q values of the conjugate pole pairs of an analog Butterworth prototype.
fn butterworth_qs(order: usize) -> Vec<f64> {
    assert!(order >= 2 && order % 2 == 0, "even order required");
    let n = order as f64;
    (0..order / 2)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2.0 * n);
            1.0 / (2.0 * theta.cos())
        })
        .collect()
}

impl Sos {
    /// Even-order Butterworth low-pass with -3 dB point at `fc`.
    pub fn butterworth_lowpass(order: usize, fc: f64, fs: f64) -> Self {
        assert!(fc > 0.0 && fc < fs / 2.0, "cutoff must be inside (0, Nyquist)");
        let sections = butterworth_qs(order).iter().map(|&q| Biquad::lowpass(fc, fs, q)).collect();
        Self { sections }
    }

    /// Even-order Butterworth high-pass with -3 dB point at `fc`.
    pub fn butterworth_highpass(order: usize, fc: f64, fs: f64) -> Self {
        assert!(fc > 0.0 && fc < fs / 2.0, "cutoff must be inside (0, Nyquist)");
        let sections = butterworth_qs(order).iter().map(|&q| Biquad::highpass(fc, fs, q)).collect();
        Self { sections }
    }

    /// Single causal pass.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let mut z1 = 0.0;
            let mut z2 = 0.0;
            for v in y.iter_mut() {
                let x0 = *v;
                let y0 = s.b0 * x0 + z1;
                z1 = s.b1 * x0 - s.a1 * y0 + z2;
                z2 = s.b2 * x0 - s.a2 * y0;
                *v = y0;
            }
        }
        y
    }

    /// Zero-phase forward-backward pass. `pad` samples of odd reflection are
    /// prepended/appended to settle the filter before it reaches real data.
    pub fn filtfilt(&self, x: &[f64], pad: usize) -> Vec<f64> {
        if x.is_empty() {
            return Vec::new();
        }
        let pad = pad.min(x.len() - 1);
        let n = x.len();
        let mut ext = Vec::with_capacity(n + 2 * pad);
        for i in 0..pad {
            ext.push(2.0 * x[0] - x[pad - i]);
        }
        ext.extend_from_slice(x);
        for i in 0..pad {
            ext.push(2.0 * x[n - 1] - x[n - 2 - i]);
        }

        let mut y = self.filter(&ext);
        y.reverse();
        let mut y = self.filter(&y);
        y.reverse();
        y[pad..pad + n].to_vec()
    }
}

/// Reflection padding long enough for the transient of a filter with cutoff
/// `fc` to die out.
pub(crate) fn settle_pad(fc: f64, fs: f64, len: usize) -> usize {
    let by_cutoff = (4.0 * fs / fc).round() as usize;
    by_cutoff.clamp(24, len.saturating_sub(1).max(1))
}
