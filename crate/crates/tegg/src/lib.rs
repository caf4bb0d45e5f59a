//! Removes linguistic content from speech by projecting an
//! electroglottograph (EGG) source signal through the speaker's *average*
//! vocal-tract response and the speech signal's dynamic energy envelope.
//!
//! The transform runs in two stages. Stage one estimates a per-frame
//! vocal-tract filter over voiced speech, averages the magnitude responses,
//! and materializes the average as a minimum-phase impulse response `h(t)`.
//! Stage two convolves the EGG signal with `h(t)` and rescales each STFT
//! frame so the result carries the speech signal's short-time energy
//! envelope. The output keeps pitch, energy contour, and average tone of
//! voice while the articulated formant movement is gone.

pub mod crossfilter;
pub mod error;
mod fft;
pub mod fixtures;
pub mod framing;
mod iir;
pub mod io;
pub mod lpc;
pub mod poly;
pub mod resample;
pub mod response;
pub mod signal;
pub mod spectral;
pub mod tract;
pub mod vad;

pub use crossfilter::{
    adaptive_highpass_egg, apply_ratio, convolve, cross_filter, energy_envelope, estimate_f0,
    modulation_ratio, transform, Diagnostics, DiagnosticsSummary, EggHighpass, Envelope,
    ModulationVector, TransformConfig,
};
pub use error::{Error, Result};
pub use fixtures::{fixture_pair, synth_glottal_source, synth_speech, FixtureParams, FormantTrack, PulseShape, Resonance};
pub use framing::{frame_signal, FrameSpec, WindowKind};
pub use io::{read_mono, read_recording, write_stereo_wav, write_wav, BitDepth, ChannelMap};
pub use lpc::{ensure_stable, gfm_iaif, inverse_filter, lpc_autocorr, GfmConfig, LpcEstimate};
pub use resample::{interpolate_impulse_response, resample_down};
pub use response::{evaluate_all_pole_response, min_phase_fir, MagnitudeResponse};
pub use signal::{pad_silence, peak_normalize, MonoSignal, StereoRecording};
pub use spectral::{istft, stft, Spectrogram};
pub use tract::{average_vocal_tract, build_impulse_response, AvgVocalTract, TractAverage};
pub use vad::{detect_voice, extract_voiced, VadConfig, VoiceMask};
