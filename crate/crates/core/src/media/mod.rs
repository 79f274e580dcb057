//! Media admission and extraction.
//!
//! A source (local path, `file://` URL or, through a resolver command, a
//! remote URL) is turned into a [`MediaBundle`]: the [`VideoItem`], a 16 kHz
//! mono WAV when the media has audio, and a deterministic PNG frame sample.
//!
//! Decoding goes through [`MediaDecoder`]. YUV4MPEG2 files are decoded
//! in-process (with an optional sidecar `<stem>.wav` audio track); everything
//! else is handed to ffprobe/ffmpeg as subprocesses.

mod ffmpeg;
mod resolve;
mod sampling;
pub mod wav;
pub mod y4m;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

pub use ffmpeg::FfmpegDecoder;
pub use resolve::{CommandResolver, DefaultResolver, LocalFileResolver, SourceResolver};
pub use sampling::sample_frames;
pub use y4m::Y4mDecoder;

use crate::config::PipelineConfig;
use crate::model::{VideoItem, MAX_DURATION_S};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("video is {duration_s:.1} s long, the limit is {MAX_DURATION_S} s")]
    TooLong { duration_s: f64 },
    #[error("cannot read media: {0}")]
    Unreadable(String),
    #[error("unsupported media: {0}")]
    Unsupported(String),
}

impl IngestError {
    /// Machine-readable reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            IngestError::TooLong { .. } => "TooLong",
            IngestError::Unreadable(_) => "Unreadable",
            IngestError::Unsupported(_) => "Unsupported",
        }
    }
}

/// One decoded frame, PNG encoded.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSample {
    pub index: usize,
    pub timestamp_s: f64,
    pub image_bytes: Vec<u8>,
    pub width: u32,
    pub height: u32,
}

/// What a decoder learned from container metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaInfo {
    pub duration_s: f64,
    pub has_video: bool,
    pub has_audio: bool,
    pub width: u32,
    pub height: u32,
}

pub trait MediaDecoder: Send + Sync {
    fn name(&self) -> &'static str;
    fn probe(&self, path: &Path) -> Result<MediaInfo, IngestError>;
    /// Decode one PNG frame per timestamp, in order.
    fn frames(&self, path: &Path, timestamps: &[f64]) -> Result<Vec<FrameSample>, IngestError>;
    /// Write the audio track as 16 kHz mono PCM16 WAV to `out`. Returns
    /// `false` when the media has no audio.
    fn audio(&self, path: &Path, out: &Path) -> Result<bool, IngestError>;
}

/// Coarse container family, from magic bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediaKind {
    Y4m,
    StillImage,
    AudioOnly,
    Empty,
    Other,
}

pub fn sniff(head: &[u8]) -> MediaKind {
    const STILL: [&[u8]; 5] = [b"\x89PNG\r\n\x1a\n", b"\xff\xd8\xff", b"GIF87a", b"GIF89a", b"BM"];
    if head.is_empty() {
        return MediaKind::Empty;
    }
    if head.starts_with(b"YUV4MPEG2 ") {
        return MediaKind::Y4m;
    }
    if STILL.iter().any(|magic| head.starts_with(magic)) {
        return MediaKind::StillImage;
    }
    if head.len() >= 12 && &head[0..4] == b"RIFF" {
        match &head[8..12] {
            b"WEBP" => return MediaKind::StillImage,
            b"WAVE" => return MediaKind::AudioOnly,
            _ => {}
        }
    }
    if head.starts_with(b"ID3") || head.starts_with(b"fLaC") {
        return MediaKind::AudioOnly;
    }
    MediaKind::Other
}

/// Short-video rule plus degenerate-input checks.
pub fn admit(info: &MediaInfo) -> Result<(), IngestError> {
    if !info.has_video {
        return Err(IngestError::Unsupported("no video stream".into()));
    }
    if !(info.duration_s.is_finite() && info.duration_s > 0.0) {
        return Err(IngestError::Unsupported("zero-length video".into()));
    }
    if info.duration_s > MAX_DURATION_S {
        return Err(IngestError::TooLong { duration_s: info.duration_s });
    }
    Ok(())
}

/// A source resolved to a local file, with its content id.
#[derive(Debug, Clone)]
pub struct ResolvedMedia {
    pub source: String,
    pub path: PathBuf,
    pub id: String,
    pub kind: MediaKind,
    // Keeps downloaded files alive for as long as the media is in use.
    _scratch: Option<Arc<tempfile::TempDir>>,
}

/// Everything downstream backends need from one video.
#[derive(Debug, Clone)]
pub struct MediaBundle {
    pub video: VideoItem,
    pub audio_path: Option<PathBuf>,
    pub frames: Vec<FrameSample>,
    _workspace: Arc<tempfile::TempDir>,
    _media: ResolvedMedia,
}

pub struct Ingestor {
    y4m: Y4mDecoder,
    external: Arc<dyn MediaDecoder>,
    resolver: Arc<dyn SourceResolver>,
}

impl Ingestor {
    pub fn new(external: Arc<dyn MediaDecoder>, resolver: Arc<dyn SourceResolver>) -> Self {
        Self { y4m: Y4mDecoder, external, resolver }
    }

    pub fn from_config(config: &PipelineConfig) -> Self {
        let ffmpeg = FfmpegDecoder::new(&config.decoder.ffmpeg, &config.decoder.ffprobe);
        let resolver = DefaultResolver::new(config.resolver_command.clone().map(CommandResolver::new));
        Self::new(Arc::new(ffmpeg), Arc::new(resolver))
    }

    /// Resolve `source` to a readable local file and hash its bytes.
    pub fn resolve(&self, source: &str) -> Result<ResolvedMedia, IngestError> {
        let scratch = if self.resolver.needs_scratch(source) {
            Some(Arc::new(tempfile::tempdir().map_err(|e| {
                IngestError::Unreadable(format!("cannot create scratch dir: {e}"))
            })?))
        } else {
            None
        };
        let path = self.resolver.resolve(source, scratch.as_ref().map(|d| d.path()))?;
        let (id, kind) = identify(&path)?;
        Ok(ResolvedMedia { source: source.to_string(), path, id, kind, _scratch: scratch })
    }

    fn decoder_for(&self, kind: MediaKind) -> Result<&dyn MediaDecoder, IngestError> {
        match kind {
            MediaKind::Y4m => Ok(&self.y4m),
            MediaKind::StillImage => Err(IngestError::Unsupported("still image".into())),
            MediaKind::AudioOnly => Err(IngestError::Unsupported("audio-only media".into())),
            MediaKind::Empty => Err(IngestError::Unreadable("empty file".into())),
            MediaKind::Other => Ok(self.external.as_ref()),
        }
    }

    /// Probe container metadata and apply the admission rules.
    pub fn probe(&self, media: &ResolvedMedia) -> Result<MediaInfo, IngestError> {
        let info = self.decoder_for(media.kind)?.probe(&media.path)?;
        admit(&info)?;
        Ok(info)
    }

    pub fn ingest(&self, source: &str, config: &PipelineConfig) -> Result<MediaBundle, IngestError> {
        let media = self.resolve(source)?;
        self.ingest_resolved(media, config)
    }

    pub fn ingest_resolved(
        &self,
        media: ResolvedMedia,
        config: &PipelineConfig,
    ) -> Result<MediaBundle, IngestError> {
        let decoder = self.decoder_for(media.kind)?;
        let info = decoder.probe(&media.path)?;
        admit(&info)?;

        let timestamps =
            sample_frames(info.duration_s, config.frame_sample_rate_hz, config.max_frames as usize);
        let frames = decoder.frames(&media.path, &timestamps)?;
        if frames.len() != timestamps.len() {
            return Err(IngestError::Unreadable(format!(
                "decoder returned {} frames for {} timestamps",
                frames.len(),
                timestamps.len()
            )));
        }

        let workspace = tempfile::tempdir()
            .map_err(|e| IngestError::Unreadable(format!("cannot create workspace: {e}")))?;
        let audio_out = workspace.path().join("audio.wav");
        let audio_path = if info.has_audio && decoder.audio(&media.path, &audio_out)? {
            Some(audio_out)
        } else {
            None
        };

        let video = VideoItem {
            id: media.id.clone(),
            source: media.source.clone(),
            language_hint: None,
            duration_s: info.duration_s,
            title: None,
            description: None,
        };
        Ok(MediaBundle {
            video,
            audio_path,
            frames,
            _workspace: Arc::new(workspace),
            _media: media,
        })
    }
}

/// Content id and kind of a local media file. Y4M sidecar audio is part of
/// the media, so its bytes are folded into the id.
pub fn identify(path: &Path) -> Result<(String, MediaKind), IngestError> {
    let mut file = fs::File::open(path)
        .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut head = Vec::new();
    let mut buf = vec![0u8; 64 * 1024];
    loop {
        let n = file
            .read(&mut buf)
            .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?;
        if n == 0 {
            break;
        }
        if head.len() < 16 {
            head.extend_from_slice(&buf[..n.min(16 - head.len())]);
        }
        hasher.update(&buf[..n]);
    }
    let kind = sniff(&head);
    if kind == MediaKind::Y4m {
        if let Some(sidecar) = y4m::sidecar_audio(path) {
            let bytes = fs::read(&sidecar)
                .map_err(|e| IngestError::Unreadable(format!("{}: {e}", sidecar.display())))?;
            hasher.update(b"\0sidecar-audio\0");
            hasher.update(&bytes);
        }
    }
    Ok((hex::encode(hasher.finalize()), kind))
}

/// Width and height from a PNG header.
pub fn png_dimensions(bytes: &[u8]) -> Option<(u32, u32)> {
    if bytes.len() < 24 || !bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        return None;
    }
    let w = u32::from_be_bytes(bytes[16..20].try_into().ok()?);
    let h = u32::from_be_bytes(bytes[20..24].try_into().ok()?);
    Some((w, h))
}

/// Encode packed RGB8 pixels as PNG.
pub fn encode_png(width: u32, height: u32, rgb: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width, height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().expect("in-memory PNG header");
        writer.write_image_data(rgb).expect("in-memory PNG body");
    }
    out
}
