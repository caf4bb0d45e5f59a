//! WAV reading and writing. PCM 16/24/32-bit integer and IEEE float32 are
//! supported; everything internal stays f64 so files are the only
//! quantization boundary.

use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{MonoSignal, StereoRecording};

/// Which channel of a two-track file carries the speech microphone.
/// The recording convention puts speech left and EGG right; some corpora
/// swap them, hence the override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMap {
    #[default]
    SpeechLeft,
    SpeechRight,
}

/// Output sample encoding for [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Int16,
    Int24,
    Float32,
}

impl Default for BitDepth {
    fn default() -> Self {
        BitDepth::Int24
    }
}

fn open_reader(path: &Path) -> Result<hound::WavReader<std::io::BufReader<std::fs::File>>> {
    if !path.exists() {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        });
    }
    hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io { path: path.to_path_buf(), source },
        other => Error::InvalidWav(other.to_string()),
    })
}

fn decode_channels(path: &Path, expected_channels: u16) -> Result<(Vec<Vec<f64>>, u32)> {
    let mut reader = open_reader(path)?;
    let spec = reader.spec();
    if spec.channels != expected_channels {
        return Err(Error::ChannelCount { expected: expected_channels, found: spec.channels });
    }

    let nch = spec.channels as usize;
    let mut channels: Vec<Vec<f64>> = vec![Vec::new(); nch];
    match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => {
            for (i, s) in reader.samples::<f32>().enumerate() {
                let s = s.map_err(|e| Error::InvalidWav(e.to_string()))?;
                channels[i % nch].push(s as f64);
            }
        }
        (hound::SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = 1.0 / (1i64 << (bits - 1)) as f64;
            for (i, s) in reader.samples::<i32>().enumerate() {
                let s = s.map_err(|e| Error::InvalidWav(e.to_string()))?;
                channels[i % nch].push(s as f64 * scale);
            }
        }
        (fmt, bits) => {
            return Err(Error::UnsupportedEncoding(format!("{fmt:?} at {bits} bits")));
        }
    }
    Ok((channels, spec.sample_rate))
}

/// Reads a synchronized two-track recording, mapping channels to speech/EGG
/// per `channel_map`. Both channels come back full-scale normalized at the
/// file's native rate.
pub fn read_recording(path: impl AsRef<Path>, channel_map: ChannelMap) -> Result<StereoRecording> {
    let (mut channels, rate) = decode_channels(path.as_ref(), 2)?;
    let right = channels.pop().expect("two channels");
    let left = channels.pop().expect("two channels");
    let (speech, egg) = match channel_map {
        ChannelMap::SpeechLeft => (left, right),
        ChannelMap::SpeechRight => (right, left),
    };
    StereoRecording::new(MonoSignal::new(speech, rate), MonoSignal::new(egg, rate))
}

/// Reads a single-channel WAV file.
pub fn read_mono(path: impl AsRef<Path>) -> Result<MonoSignal> {
    let (mut channels, rate) = decode_channels(path.as_ref(), 1)?;
    Ok(MonoSignal::new(channels.pop().expect("one channel"), rate))
}

fn wav_spec(channels: u16, sample_rate: u32, depth: BitDepth) -> hound::WavSpec {
    let (bits, format) = match depth {
        BitDepth::Int16 => (16, hound::SampleFormat::Int),
        BitDepth::Int24 => (24, hound::SampleFormat::Int),
        BitDepth::Float32 => (32, hound::SampleFormat::Float),
    };
    hound::WavSpec { channels, sample_rate, bits_per_sample: bits, sample_format: format }
}

fn write_samples<W: std::io::Write + std::io::Seek>(
    writer: &mut hound::WavWriter<W>,
    interleaved: impl Iterator<Item = f64>,
    depth: BitDepth,
) -> Result<usize> {
    let mut clipped = 0usize;
    let mut clip = |s: f64| -> f64 {
        if s > 1.0 {
            clipped += 1;
            1.0
        } else if s < -1.0 {
            clipped += 1;
            -1.0
        } else {
            s
        }
    };
    let io_err = |e: hound::Error| Error::InvalidWav(e.to_string());
    match depth {
        BitDepth::Float32 => {
            for s in interleaved {
                writer.write_sample(clip(s) as f32).map_err(io_err)?;
            }
        }
        BitDepth::Int16 | BitDepth::Int24 => {
            let bits = if depth == BitDepth::Int16 { 16 } else { 24 };
            let full = (1i64 << (bits - 1)) as f64;
            let max = (1i64 << (bits - 1)) - 1;
            for s in interleaved {
                let q = (clip(s) * full).round() as i64;
                writer.write_sample(q.clamp(-(max + 1), max) as i32).map_err(io_err)?;
            }
        }
    }
    Ok(clipped)
}

fn finish<W: std::io::Write + std::io::Seek>(
    writer: hound::WavWriter<W>,
    clipped: usize,
    path: &Path,
) -> Result<()> {
    if clipped > 0 {
        log::warn!("{}: clipped {clipped} samples outside [-1, 1]", path.display());
    }
    writer.finalize().map_err(|e| Error::InvalidWav(e.to_string()))
}

/// Writes a mono signal. Samples outside [-1, 1] are clipped with a warning.
pub fn write_wav(signal: &MonoSignal, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let spec = wav_spec(1, signal.sample_rate, depth);
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io { path: path.to_path_buf(), source },
        other => Error::InvalidWav(other.to_string()),
    })?;
    let clipped = write_samples(&mut writer, signal.samples.iter().copied(), depth)?;
    finish(writer, clipped, path)
}

/// Writes a two-track file with speech on the left channel and EGG on the
/// right, the layout [`read_recording`] expects by default.
pub fn write_stereo_wav(
    recording: &StereoRecording,
    path: impl AsRef<Path>,
    depth: BitDepth,
) -> Result<()> {
    let path = path.as_ref();
    if recording.is_empty() {
        return Err(Error::EmptySignal);
    }
    let spec = wav_spec(2, recording.sample_rate(), depth);
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io { path: path.to_path_buf(), source },
        other => Error::InvalidWav(other.to_string()),
    })?;
    let interleaved = recording
        .speech
        .samples
        .iter()
        .zip(&recording.egg.samples)
        .flat_map(|(&l, &r)| [l, r]);
    let clipped = write_samples(&mut writer, interleaved, depth)?;
    finish(writer, clipped, path)
}
