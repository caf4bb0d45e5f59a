//! Linear prediction and the glottal-flow-model inverse-filtering
//! decomposition of a speech frame into vocal-tract, glottal, and
//! lip-radiation filters.

use crate::error::{Error, Result};
use crate::poly;

/// Default pole-radius ceiling for stabilized filters.
pub const STABILITY_RADIUS: f64 = 0.998;

/// Per-frame filter coefficient sets from the glottal decomposition. All
/// denominators start with a 1.0 coefficient and are stabilized to pole
/// radius <= [`STABILITY_RADIUS`].
#[derive(Debug, Clone)]
pub struct LpcEstimate {
    /// Vocal-tract denominator, order `2 + sample_rate/1000`.
    pub a_v: Vec<f64>,
    /// Glottal-source denominator, 3rd order.
    pub a_g: Vec<f64>,
    /// Lip-radiation filter: a first-order differentiator.
    pub a_l: Vec<f64>,
}

/// Tunables of the glottal decomposition. The defaults follow common
/// practice: lip radiation as a 0.99 differentiator, cancelled by leaky
/// integration with the same constant, and a 3rd-order glottal model.
#[derive(Debug, Clone)]
pub struct GfmConfig {
    pub lip_coeff: f64,
    pub glottal_order: usize,
    /// Overrides the `2 + sample_rate/1000` vocal-tract order rule.
    pub vocal_tract_order: Option<usize>,
}

impl Default for GfmConfig {
    fn default() -> Self {
        Self { lip_coeff: 0.99, glottal_order: 3, vocal_tract_order: None }
    }
}

impl GfmConfig {
    pub fn vocal_tract_order_at(&self, sample_rate: u32) -> usize {
        self.vocal_tract_order.unwrap_or(2 + (sample_rate / 1000) as usize)
    }
}

/// Autocorrelation-method LPC via Levinson-Durbin. Returns the prediction
/// coefficients `[1, a_1, ..., a_p]` and the final prediction error power
/// (mean square). Stable by construction up to numerical precision.
pub fn lpc_autocorr(frame: &[f64], order: usize) -> Result<(Vec<f64>, f64)> {
    if order >= frame.len() {
        return Err(Error::OrderTooLarge { order, len: frame.len() });
    }
    let n = frame.len() as f64;
    let mut r = vec![0.0; order + 1];
    for (k, rk) in r.iter_mut().enumerate() {
        *rk = frame[..frame.len() - k]
            .iter()
            .zip(&frame[k..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n;
    }
    if r[0] <= 0.0 {
        return Err(Error::AllZeroFrame);
    }
    // Tiny diagonal load keeps noiseless synthetic frames solvable.
    r[0] *= 1.0 + 1e-12;

    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r[0];
    for m in 1..=order {
        let mut acc = r[m];
        for i in 1..m {
            acc += a[i] * r[m - i];
        }
        let k = -acc / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::DegenerateAutocorrelation);
        }
        a[m] = k;
        for i in 1..=(m / 2) {
            let tmp = a[i] + k * a[m - i];
            if i != m - i {
                a[m - i] += k * a[i];
            }
            a[i] = tmp;
        }
        err *= 1.0 - k * k;
        if err <= 0.0 {
            return Err(Error::DegenerateAutocorrelation);
        }
    }
    Ok((a, err))
}

/// Applies the prediction-error (FIR) filter: `e[t] = sum_k a_k x[t-k]`.
pub fn inverse_filter(frame: &[f64], coeffs: &[f64]) -> Vec<f64> {
    debug_assert!(coeffs.first().is_some_and(|&c| c == 1.0));
    let mut out = Vec::with_capacity(frame.len());
    for t in 0..frame.len() {
        let mut acc = 0.0;
        for (k, &c) in coeffs.iter().enumerate().take(t + 1) {
            acc += c * frame[t - k];
        }
        out.push(acc);
    }
    out
}

/// Applies the all-pole synthesis filter `1/A`: `y[t] = x[t] - sum_{k>=1} a_k y[t-k]`.
pub fn all_pole_filter(input: &[f64], coeffs: &[f64]) -> Vec<f64> {
    debug_assert!(coeffs.first().is_some_and(|&c| c == 1.0));
    let mut out: Vec<f64> = Vec::with_capacity(input.len());
    for t in 0..input.len() {
        let mut acc = input[t];
        for k in 1..coeffs.len().min(t + 1) {
            acc -= coeffs[k] * out[t - k];
        }
        out.push(acc);
    }
    out
}

/// Forces all roots of `A` to magnitude <= `gamma` (default 0.998 in the
/// pipeline). Roots outside the unit circle reflect to their conjugate
/// reciprocal, which preserves the magnitude response up to a constant gain;
/// roots left in the `(gamma, 1]` shell are pulled radially to `gamma`.
/// Already-conforming inputs come back unchanged.
pub fn ensure_stable(coeffs: &[f64], gamma: f64) -> Vec<f64> {
    debug_assert!(gamma > 0.0 && gamma <= 1.0);
    if coeffs.len() <= 1 || poly::max_root_within(coeffs, gamma) {
        return coeffs.to_vec();
    }
    let mut rts = poly::roots(coeffs);
    for r in rts.iter_mut() {
        let m = r.norm();
        if m > 1.0 {
            *r = r.conj().finv();
        }
        let m = r.norm();
        if m > gamma {
            *r *= gamma / m;
        }
    }
    poly::monic_from_roots(&rts)
}

/// Decomposes one analysis frame into vocal-tract, glottal, and
/// lip-radiation filters.
///
/// The frame is taken raw; a short ramp pre-frame settles each filter before
/// it reaches real data, and a Hamming window is applied to every filtered
/// signal just before its predictor solve. Windowing first and filtering
/// second would bias the near-unit-circle glottal and lip pole estimates,
/// which the whole decomposition hinges on.
///
/// Steps: leaky integration cancels lip radiation; removing a 1st-order
/// glottal pre-estimate acts as adaptive pre-emphasis for the coarse
/// vocal-tract fit; inverse filtering by that fit exposes the glottal
/// waveform for the 3rd-order glottal model; and cancelling the glottal
/// model yields the refined vocal tract.
pub fn gfm_iaif(frame: &[f64], sample_rate: u32, config: &GfmConfig) -> Result<LpcEstimate> {
    let nv = config.vocal_tract_order_at(sample_rate);
    let ng = config.glottal_order.max(1);
    let a_l = vec![1.0, -config.lip_coeff];

    if frame.iter().all(|&v| v == 0.0) {
        return Err(Error::AllZeroFrame);
    }

    // Ramp pre-frame: linear from -x[0] to x[0], long enough to absorb the
    // startup transient of every filter below.
    let pre = nv + 1;
    let mut x = Vec::with_capacity(pre + frame.len());
    for i in 0..pre {
        let t = i as f64 / pre as f64;
        x.push(-frame[0] + 2.0 * frame[0] * t);
    }
    x.extend_from_slice(frame);

    let n = frame.len();
    let window: Vec<f64> = (0..n)
        .map(|i| 0.54 - 0.46 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect();
    let analysis_body =
        |v: &[f64]| -> Vec<f64> { v[pre..].iter().zip(&window).map(|(s, w)| s * w).collect() };

    // Cancel lip radiation for the whole decomposition.
    let integrated = all_pole_filter(&x, &a_l);

    // Coarse 1st-order glottal pre-estimate; its removal is adaptive
    // pre-emphasis for the coarse vocal-tract fit.
    let (glottis_gross, _) = lpc_autocorr(&analysis_body(&integrated), 1)?;
    let pre_emphasized = inverse_filter(&integrated, &glottis_gross);
    let (vt_coarse, _) = lpc_autocorr(&analysis_body(&pre_emphasized), nv)?;

    // Fine glottal model from the tract-cancelled waveform.
    let glottal_waveform = inverse_filter(&integrated, &vt_coarse);
    let (glottis, _) = lpc_autocorr(&analysis_body(&glottal_waveform), ng)?;

    // Refined vocal tract with the glottal contribution cancelled.
    let deglottalized = inverse_filter(&integrated, &glottis);
    let (vt, _) = lpc_autocorr(&analysis_body(&deglottalized), nv)?;

    Ok(LpcEstimate {
        a_v: ensure_stable(&vt, STABILITY_RADIUS),
        a_g: ensure_stable(&glottis, STABILITY_RADIUS),
        a_l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn white_noise(len: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn order_zero_returns_frame_power() {
        let frame = [0.5, -0.5, 0.5, -0.5];
        let (a, err) = lpc_autocorr(&frame, 0).unwrap();
        assert_eq!(a, vec![1.0]);
        assert!((err - 0.25).abs() < 1e-9);
    }

    #[test]
    fn white_noise_has_no_predictor() {
        let frame = white_noise(10_000, 7);
        let (a, _) = lpc_autocorr(&frame, 1).unwrap();
        assert!(a[1].abs() < 0.1, "white noise predicted: a1 = {}", a[1]);
    }

    #[test]
    fn recovers_ar1_coefficient() {
        let noise = white_noise(20_000, 11);
        let x = all_pole_filter(&noise, &[1.0, -0.9]);
        let (a, _) = lpc_autocorr(&x[500..], 1).unwrap();
        assert!((a[1] + 0.9).abs() < 0.02, "a1 = {}", a[1]);
    }

    #[test]
    fn coefficients_are_scale_invariant() {
        let noise = white_noise(4000, 3);
        let x = all_pole_filter(&noise, &[1.0, -1.2, 0.72]);
        let (a, _) = lpc_autocorr(&x, 8).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * 37.5).collect();
        let (b, _) = lpc_autocorr(&scaled, 8).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(lpc_autocorr(&[0.0; 64], 4), Err(Error::AllZeroFrame)));
        assert!(matches!(lpc_autocorr(&[1.0, 2.0], 2), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn inverse_filter_identity() {
        let x = [1.0, -2.0, 3.0];
        assert_eq!(inverse_filter(&x, &[1.0]), x.to_vec());
    }

    #[test]
    fn inverse_filter_whitens_ar1() {
        let noise = white_noise(20_000, 23);
        let x = all_pole_filter(&noise, &[1.0, -0.9]);
        let e = inverse_filter(&x, &[1.0, -0.9]);
        let n = e.len() as f64;
        let r0: f64 = e.iter().map(|v| v * v).sum::<f64>() / n;
        let r1: f64 = e[..e.len() - 1].iter().zip(&e[1..]).map(|(a, b)| a * b).sum::<f64>() / n;
        assert!((r1 / r0).abs() < 0.05, "residual lag-1 correlation {}", r1 / r0);
    }

    #[test]
    fn synthesis_and_inverse_are_exact_inverses() {
        let a = [1.0, -1.6, 0.8, -0.1];
        let mut impulse = vec![0.0; 256];
        impulse[0] = 1.0;
        let synth = all_pole_filter(&impulse, &a);
        let back = inverse_filter(&synth, &a);
        for (i, (x, y)) in impulse.iter().zip(&back).enumerate() {
            assert!((x - y).abs() < 1e-9, "sample {i}");
        }
    }

    #[test]
    fn whitening_flatness_on_ar4() {
        let noise = white_noise(32_768, 41);
        let a_true = [1.0, -1.8, 1.37, -0.57, 0.1];
        let x = all_pole_filter(&noise, &a_true);
        let (a, _) = lpc_autocorr(&x[1000..], 4).unwrap();
        let e = inverse_filter(&x[1000..], &a);
        // Welch-averaged residual power spectrum; averaging tames the
        // chi-squared scatter of single periodogram bins.
        let seg = 256;
        let mut powers = vec![0.0; seg / 2 + 1];
        let mut count = 0;
        for chunk in e.chunks_exact(seg) {
            for (p, c) in powers.iter_mut().zip(crate::fft::rfft(chunk, seg)) {
                *p += c.norm_sqr();
            }
            count += 1;
        }
        for p in powers.iter_mut() {
            *p /= count as f64;
        }
        let powers = &powers[1..powers.len() - 1];
        let log_mean = powers.iter().map(|p| p.ln()).sum::<f64>() / powers.len() as f64;
        let mean = powers.iter().sum::<f64>() / powers.len() as f64;
        let flatness = log_mean.exp() / mean;
        assert!(flatness >= 0.8, "flatness {flatness}");
    }

    #[test]
    fn ensure_stable_leaves_stable_filters_alone() {
        let a = vec![1.0, -1.2, 0.72];
        assert_eq!(ensure_stable(&a, STABILITY_RADIUS), a);
    }

    #[test]
    fn ensure_stable_reflects_outside_roots() {
        // A = 1 - 1.25 z^-1: root at 1.25 reflects to 0.8.
        let fixed = ensure_stable(&[1.0, -1.25], STABILITY_RADIUS);
        assert!((fixed[0] - 1.0).abs() < 1e-12);
        assert!((fixed[1] + 0.8).abs() < 1e-9);

        // Magnitude response is preserved up to a constant gain.
        let before = crate::fft::rfft(&[1.0, -1.25], 256);
        let after = crate::fft::rfft(&fixed, 256);
        let gain = before[0].norm() / after[0].norm();
        for (b, a) in before.iter().zip(&after) {
            assert!((b.norm() - gain * a.norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn ensure_stable_pulls_unit_circle_roots_in() {
        // Root exactly on the unit circle moves to the 0.998 ceiling.
        let fixed = ensure_stable(&[1.0, -1.0], STABILITY_RADIUS);
        assert!((fixed[1] + STABILITY_RADIUS).abs() < 1e-9);
    }

    #[test]
    fn vocal_tract_order_rule() {
        let cfg = GfmConfig::default();
        assert_eq!(cfg.vocal_tract_order_at(16_000), 18);
        assert_eq!(cfg.vocal_tract_order_at(8_000), 10);
    }

    #[test]
    fn gfm_iaif_returns_configured_orders() {
        let frame = white_noise(640, 5);
        let est = gfm_iaif(&frame, 16_000, &GfmConfig::default()).unwrap();
        assert_eq!(est.a_v.len(), 19);
        assert_eq!(est.a_g.len(), 4);
        assert_eq!(est.a_l, vec![1.0, -0.99]);
    }

    #[test]
    fn gfm_iaif_estimates_are_stable() {
        let noise = white_noise(2048, 17);
        let x = all_pole_filter(&noise, &[1.0, -1.6, 0.9]);
        let est = gfm_iaif(&x[512..1152], 16_000, &GfmConfig::default()).unwrap();
        assert!(poly::max_root_within(&est.a_v, STABILITY_RADIUS + 1e-9));
        assert!(poly::max_root_within(&est.a_g, STABILITY_RADIUS + 1e-9));
    }

    #[test]
    fn gfm_iaif_rejects_silence() {
        assert!(matches!(
            gfm_iaif(&[0.0; 320], 16_000, &GfmConfig::default()),
            Err(Error::AllZeroFrame)
        ));
    }
}
