//! Runner layer behind the `tegg` binary: option merging, per-file
//! processing with atomic writes, batch orchestration, diagnostics export,
//! and fixture synthesis.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use tegg::{
    fixture_pair, pad_silence, peak_normalize, read_recording, transform, write_stereo_wav,
    write_wav, BitDepth, ChannelMap, Diagnostics, EggHighpass, FixtureParams, FormantTrack,
    PulseShape, Resonance, StereoRecording, TransformConfig,
};

/// Environment variable naming a default config file.
pub const CONFIG_ENV_VAR: &str = "TEGG_CONFIG";

/// Fully resolved run options: built-in defaults, overlaid by a config file,
/// overlaid by command-line flags, in that order of precedence.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub channel_map: ChannelMap,
    pub transform: TransformConfig,
    /// Silence padding applied to the output, milliseconds each side.
    pub pad_ms: Option<(f64, f64)>,
    /// Peak-normalization target for the output.
    pub normalize_dbfs: Option<f64>,
    pub bit_depth: BitDepth,
    /// Directory for diagnostics sidecars; `None` disables them.
    pub diagnostics_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            channel_map: ChannelMap::SpeechLeft,
            transform: TransformConfig::default(),
            pad_ms: None,
            normalize_dbfs: None,
            bit_depth: BitDepth::Int24,
            diagnostics_dir: None,
        }
    }
}

/// Config-file schema: every field optional, keys mirror the CLI flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub speech_channel: Option<String>,
    pub frame_ms: Option<f64>,
    pub overlap: Option<f64>,
    pub lpc_rate: Option<u32>,
    pub grid_size: Option<usize>,
    pub taps: Option<usize>,
    pub egg_highpass: Option<HighpassSetting>,
    pub pad_ms: Option<f64>,
    pub normalize_dbfs: Option<f64>,
    pub bit_depth: Option<String>,
    pub r_max: Option<f64>,
    pub vad: Option<VadFileConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VadFileConfig {
    pub floor_percentile: Option<f64>,
    pub margin_db: Option<f64>,
    pub hangover_frames: Option<usize>,
}

/// `egg_highpass` accepts `"off"`, `"auto"`, or a fixed f0 in Hz.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum HighpassSetting {
    Mode(String),
    FixedHz(f64),
}

pub fn parse_highpass(setting: &HighpassSetting) -> Result<EggHighpass> {
    match setting {
        HighpassSetting::FixedHz(f0) => Ok(EggHighpass::Fixed(*f0)),
        HighpassSetting::Mode(m) => match m.as_str() {
            "off" => Ok(EggHighpass::Off),
            "auto" => Ok(EggHighpass::Auto),
            other => other
                .parse::<f64>()
                .map(EggHighpass::Fixed)
                .map_err(|_| anyhow!("egg_highpass must be \"off\", \"auto\", or an f0 in Hz, got {other:?}")),
        },
    }
}

pub fn parse_channel(name: &str) -> Result<ChannelMap> {
    match name {
        "left" => Ok(ChannelMap::SpeechLeft),
        "right" => Ok(ChannelMap::SpeechRight),
        other => bail!("channel must be \"left\" or \"right\", got {other:?}"),
    }
}

pub fn parse_bit_depth(name: &str) -> Result<BitDepth> {
    match name {
        "16" | "int16" => Ok(BitDepth::Int16),
        "24" | "int24" => Ok(BitDepth::Int24),
        "float32" | "f32" => Ok(BitDepth::Float32),
        other => bail!("bit depth must be 16, 24, or float32, got {other:?}"),
    }
}

impl RunOptions {
    /// Overlays a parsed config file onto these options.
    pub fn apply_file(&mut self, file: &FileConfig) -> Result<()> {
        if let Some(ch) = &file.speech_channel {
            self.channel_map = parse_channel(ch)?;
        }
        if let Some(v) = file.frame_ms {
            self.transform.window_ms = v;
        }
        if let Some(v) = file.overlap {
            self.transform.overlap = v;
        }
        if let Some(v) = file.lpc_rate {
            self.transform.lpc_rate = v;
        }
        if let Some(v) = file.grid_size {
            self.transform.grid_size = v;
        }
        if let Some(v) = file.taps {
            self.transform.n_taps = v;
        }
        if let Some(hp) = &file.egg_highpass {
            self.transform.egg_highpass = parse_highpass(hp)?;
        }
        if let Some(v) = file.pad_ms {
            self.pad_ms = Some((v, v));
        }
        if let Some(v) = file.normalize_dbfs {
            self.normalize_dbfs = Some(v);
        }
        if let Some(bd) = &file.bit_depth {
            self.bit_depth = parse_bit_depth(bd)?;
        }
        if let Some(v) = file.r_max {
            self.transform.r_max = v;
        }
        if let Some(vad) = &file.vad {
            if let Some(v) = vad.floor_percentile {
                self.transform.vad.floor_percentile = v;
            }
            if let Some(v) = vad.margin_db {
                self.transform.vad.margin_db = v;
            }
            if let Some(v) = vad.hangover_frames {
                self.transform.vad.hangover_frames = v;
            }
        }
        Ok(())
    }
}

/// Loads a config file (TOML key-value format).
pub fn load_config_file(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}

/// Outcome of one transformed file.
#[derive(Debug, Clone)]
pub struct FileReport {
    pub input: PathBuf,
    pub output: PathBuf,
    pub audio_secs: f64,
    pub wall_secs: f64,
    pub realtime_factor: f64,
    pub guard_frames: usize,
}

fn atomic_write_wav(signal: &tegg::MonoSignal, path: &Path, depth: BitDepth) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    write_wav(signal, &tmp, depth).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

fn write_diagnostics(dir: &Path, stem: &str, diagnostics: &Diagnostics) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let summary = serde_json::to_string_pretty(&diagnostics.summary())?;
    fs::write(dir.join(format!("{stem}.diagnostics.json")), summary)?;
    fs::write(dir.join(format!("{stem}.tract.csv")), diagnostics.mean_magnitude_csv())?;
    fs::write(dir.join(format!("{stem}.modulation.csv")), diagnostics.modulation_csv())?;
    let mask = serde_json::to_string(&diagnostics.vad_frame_flags)?;
    fs::write(dir.join(format!("{stem}.vadmask.json")), mask)?;
    Ok(())
}

/// Transforms one two-track recording into its output file, with optional
/// silence padding, peak normalization, and diagnostics sidecars.
pub fn run_transform_file(input: &Path, output: &Path, options: &RunOptions) -> Result<FileReport> {
    let started = Instant::now();
    let recording = read_recording(input, options.channel_map)
        .with_context(|| format!("reading {}", input.display()))?;
    let (mut z, diagnostics) = transform(&recording, &options.transform)
        .with_context(|| format!("transforming {}", input.display()))?;

    if let Some((lead, trail)) = options.pad_ms {
        z = pad_silence(&z, lead, trail);
    }
    if let Some(target) = options.normalize_dbfs {
        z = peak_normalize(&z, target)
            .with_context(|| format!("normalizing output of {}", input.display()))?;
    }
    atomic_write_wav(&z, output, options.bit_depth)?;

    if let Some(dir) = &options.diagnostics_dir {
        let stem = output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "output".into());
        write_diagnostics(dir, &stem, &diagnostics)?;
    }

    let wall = started.elapsed().as_secs_f64();
    let audio = recording.speech.duration_secs();
    Ok(FileReport {
        input: input.to_path_buf(),
        output: output.to_path_buf(),
        audio_secs: audio,
        wall_secs: wall,
        realtime_factor: audio / wall,
        guard_frames: diagnostics.modulation.guard_count(),
    })
}

/// Summary of a batch run.
#[derive(Debug)]
pub struct BatchSummary {
    pub reports: Vec<FileReport>,
    pub failures: Vec<(PathBuf, String)>,
}

impl BatchSummary {
    pub fn mean_realtime_factor(&self) -> f64 {
        if self.reports.is_empty() {
            return 0.0;
        }
        self.reports.iter().map(|r| r.realtime_factor).sum::<f64>() / self.reports.len() as f64
    }
}

/// Lists the two-track inputs of a batch directory, sorted for determinism.
pub fn collect_batch_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut inputs = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry?;
        if entry.file_type().is_file()
            && entry.path().extension().is_some_and(|e| e.eq_ignore_ascii_case("wav"))
        {
            inputs.push(entry.path().to_path_buf());
        }
    }
    Ok(inputs)
}

/// Transforms every `.wav` under `in_dir`, mirroring the directory structure
/// into `out_dir`. Files are processed in parallel across `jobs` workers;
/// each file's pipeline is sequential, so outputs do not depend on the
/// parallelism degree.
pub fn run_batch(
    in_dir: &Path,
    out_dir: &Path,
    options: &RunOptions,
    jobs: usize,
    fail_fast: bool,
) -> Result<BatchSummary> {
    let inputs = collect_batch_inputs(in_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building worker pool")?;

    use rayon::prelude::*;
    let results: Vec<(PathBuf, Result<FileReport>)> = pool.install(|| {
        inputs
            .par_iter()
            .map(|input| {
                let rel = input.strip_prefix(in_dir).unwrap_or(input);
                let output = out_dir.join(rel);
                (input.clone(), run_transform_file(input, &output, options))
            })
            .collect()
    });

    let mut summary = BatchSummary { reports: Vec::new(), failures: Vec::new() };
    for (input, result) in results {
        match result {
            Ok(report) => summary.reports.push(report),
            Err(err) => {
                summary.failures.push((input, format!("{err:#}")));
                if fail_fast {
                    break;
                }
            }
        }
    }
    Ok(summary)
}

/// Parameters of the `synth` command.
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub f0: f64,
    pub duration_secs: f64,
    pub sample_rate: u32,
    pub shape: PulseShape,
    /// Formant plan: segments separated by `;`, resonances by `,`, each
    /// `center:bandwidth` in Hz. A single segment is held for the whole
    /// duration; several alternate every `segment_ms`.
    pub formants: String,
    pub segment_ms: f64,
    pub am_depth: f64,
    pub am_rate: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            f0: 120.0,
            duration_secs: 1.0,
            sample_rate: 48_000,
            shape: PulseShape::ImpulseTrain,
            formants: "700:100,1200:110,2600:130".into(),
            segment_ms: 250.0,
            am_depth: 0.3,
            am_rate: 2.0,
        }
    }
}

pub fn parse_formant_plan(plan: &str, segment_ms: f64, total_ms: f64) -> Result<FormantTrack> {
    let mut tracts = Vec::new();
    for segment in plan.split(';') {
        let segment = segment.trim();
        if segment.is_empty() {
            tracts.push(Vec::new());
            continue;
        }
        let mut resonances = Vec::new();
        for item in segment.split(',') {
            let (center, bw) = item
                .split_once(':')
                .ok_or_else(|| anyhow!("formant {item:?} is not center:bandwidth"))?;
            resonances.push(Resonance::new(
                center.trim().parse().context("formant center")?,
                bw.trim().parse().context("formant bandwidth")?,
            ));
        }
        tracts.push(resonances);
    }
    Ok(if tracts.len() == 1 {
        FormantTrack::stationary(tracts.pop().expect("one tract"))
    } else {
        FormantTrack::alternating(tracts, segment_ms, total_ms)
    })
}

/// Builds a synthetic speech/EGG pair and writes it as a two-track file
/// ready to feed the transform.
pub fn run_synth(output: &Path, options: &SynthOptions, bit_depth: BitDepth) -> Result<StereoRecording> {
    if !(options.f0 > 0.0) {
        bail!("f0 must be positive, got {}", options.f0);
    }
    let track = parse_formant_plan(
        &options.formants,
        options.segment_ms,
        options.duration_secs * 1000.0,
    )?;
    let params = FixtureParams {
        f0: options.f0,
        duration_secs: options.duration_secs,
        sample_rate: options.sample_rate,
        shape: options.shape,
        track,
        am_depth: options.am_depth,
        am_rate: options.am_rate,
        ..FixtureParams::default()
    };
    let recording = fixture_pair(&params)?;
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    write_stereo_wav(&recording, output, bit_depth)
        .with_context(|| format!("writing {}", output.display()))?;
    Ok(recording)
}

/// Runs the transform for diagnostics only; nothing is written unless a
/// diagnostics directory is set.
pub fn run_inspect(input: &Path, options: &RunOptions) -> Result<(Diagnostics, f64)> {
    let recording = read_recording(input, options.channel_map)
        .with_context(|| format!("reading {}", input.display()))?;
    let (_, diagnostics) = transform(&recording, &options.transform)
        .with_context(|| format!("transforming {}", input.display()))?;
    if let Some(dir) = &options.diagnostics_dir {
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".into());
        write_diagnostics(dir, &stem, &diagnostics)?;
    }
    Ok((diagnostics, recording.speech.duration_secs()))
}
