//! Stage one of the transform: average the per-frame vocal-tract magnitude
//! responses over voiced speech and materialize the average as a
//! minimum-phase impulse response at the output rate.

use crate::error::{Error, Result};
use crate::framing::{interior_raw_frames, FrameSpec};
use crate::lpc::{gfm_iaif, GfmConfig};
use crate::resample::interpolate_impulse_response;
use crate::response::{evaluate_all_pole_response, min_phase_fir, MagnitudeResponse};
use crate::signal::MonoSignal;

/// Mean vocal-tract magnitude plus bookkeeping on the frames behind it.
#[derive(Debug, Clone)]
pub struct TractAverage {
    pub mean: MagnitudeResponse,
    pub frames_used: usize,
    pub frames_skipped: usize,
}

/// Complete stage-one product: the averaged magnitude and its minimum-phase
/// impulse response at the output rate.
#[derive(Debug, Clone)]
pub struct AvgVocalTract {
    pub mean_magnitude: MagnitudeResponse,
    pub impulse_response: MonoSignal,
    pub frames_used: usize,
    pub frames_skipped: usize,
}

/// Elementwise arithmetic mean of linear magnitude rows. Compensated
/// summation keeps the result independent of row order to well below 1e-12.
pub fn mean_of_magnitudes(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = rows.first() else {
        return Err(Error::ZeroValidFrames);
    };
    let mut sum = vec![0.0; first.len()];
    let mut comp = vec![0.0; first.len()];
    for row in rows {
        debug_assert_eq!(row.len(), sum.len());
        for ((s, c), &v) in sum.iter_mut().zip(comp.iter_mut()).zip(row) {
            let y = v - *c;
            let t = *s + y;
            *c = (t - *s) - y;
            *s = t;
        }
    }
    let n = rows.len() as f64;
    for s in sum.iter_mut() {
        *s /= n;
    }
    Ok(sum)
}

/// Per-frame vocal-tract magnitude of one analysis frame: the glottal
/// decomposition's `A_v` evaluated as an all-pole response, unit numerator.
/// Absolute gain is irrelevant downstream because stage two rewrites frame
/// levels.
pub fn frame_tract_magnitude(
    frame: &[f64],
    sample_rate: u32,
    grid_size: usize,
    gfm: &GfmConfig,
) -> Result<Vec<f64>> {
    let estimate = gfm_iaif(frame, sample_rate, gfm)?;
    let response = evaluate_all_pole_response(&estimate.a_v, grid_size)?;
    Ok(response.into_iter().map(|c| c.norm()).collect())
}

/// Averages per-frame vocal-tract magnitudes over interior frames of the
/// voiced signal. Frames whose predictor solve degenerates are skipped and
/// counted; at least one frame must survive.
pub fn average_vocal_tract(
    voiced_speech: &MonoSignal,
    spec: &FrameSpec,
    grid_size: usize,
    gfm: &GfmConfig,
) -> Result<TractAverage> {
    if voiced_speech.sample_rate != spec.sample_rate() {
        return Err(Error::RateMismatch { a: voiced_speech.sample_rate, b: spec.sample_rate() });
    }
    if voiced_speech.len() < spec.window_len() {
        return Err(Error::SignalShorterThanWindow {
            len: voiced_speech.len(),
            window: spec.window_len(),
        });
    }

    let frames = interior_raw_frames(&voiced_speech.samples, spec);
    let mut rows = Vec::with_capacity(frames.len());
    let mut skipped = 0usize;
    for frame in &frames {
        match frame_tract_magnitude(frame, voiced_speech.sample_rate, grid_size, gfm) {
            Ok(row) => rows.push(row),
            Err(
                Error::AllZeroFrame | Error::DegenerateAutocorrelation | Error::ZeroOnGrid { .. },
            ) => skipped += 1,
            Err(other) => return Err(other),
        }
    }
    let mean = mean_of_magnitudes(&rows)?;
    Ok(TractAverage {
        mean: MagnitudeResponse::new(mean, grid_size, voiced_speech.sample_rate),
        frames_used: rows.len(),
        frames_skipped: skipped,
    })
}

/// Turns the averaged magnitude into a minimum-phase FIR at the output rate:
/// FIR design at the analysis rate, then interpolation by the integer rate
/// ratio when the output runs faster.
pub fn build_impulse_response(
    mean: &MagnitudeResponse,
    n_taps: usize,
    output_rate: u32,
) -> Result<MonoSignal> {
    if !output_rate.is_multiple_of(mean.sample_rate) {
        return Err(Error::NonIntegerFactor { from: output_rate, to: mean.sample_rate });
    }
    let h = min_phase_fir(mean, n_taps)?;
    let factor = (output_rate / mean.sample_rate) as usize;
    if factor == 1 {
        Ok(h)
    } else {
        interpolate_impulse_response(&h, factor)
    }
}
