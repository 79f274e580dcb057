//! ffprobe/ffmpeg subprocess decoder.
//!
//! Invocations (all with `-v error`, stdin closed):
//!
//! ```text
//! ffprobe -v error -print_format json -show_format -show_streams <input>
//! ffmpeg  -v error -ss <t> -i <input> -frames:v 1 -f image2pipe -c:v png -
//! ffmpeg  -v error -y -i <input> -vn -ac 1 -ar 16000 -c:a pcm_s16le <out.wav>
//! ```
//!
//! Any non-zero exit maps to `Unreadable` with the tool's stderr attached.

use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde::Deserialize;

use super::{png_dimensions, FrameSample, IngestError, MediaDecoder, MediaInfo};

#[derive(Debug, Clone)]
pub struct FfmpegDecoder {
    ffmpeg: String,
    ffprobe: String,
}

#[derive(Debug, Deserialize)]
struct ProbeOutput {
    #[serde(default)]
    streams: Vec<ProbeStream>,
    format: Option<ProbeFormat>,
}

#[derive(Debug, Deserialize)]
struct ProbeStream {
    codec_type: Option<String>,
    width: Option<u32>,
    height: Option<u32>,
    duration: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ProbeFormat {
    format_name: Option<String>,
    duration: Option<String>,
}

impl FfmpegDecoder {
    pub fn new(ffmpeg: &str, ffprobe: &str) -> Self {
        Self { ffmpeg: ffmpeg.to_string(), ffprobe: ffprobe.to_string() }
    }

    fn run(&self, program: &str, args: &[&std::ffi::OsStr]) -> Result<Output, IngestError> {
        let output = Command::new(program)
            .args(args)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| IngestError::Unreadable(format!("cannot run {program}: {e}")))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(IngestError::Unreadable(format!(
                "{program} exited with {}: {}",
                output.status,
                stderr.trim()
            )));
        }
        Ok(output)
    }
}

fn parse_seconds(text: Option<&String>) -> Option<f64> {
    text.and_then(|t| t.parse::<f64>().ok()).filter(|d| d.is_finite())
}

fn info_from_probe(probe: &ProbeOutput) -> Result<MediaInfo, IngestError> {
    let format_name = probe
        .format
        .as_ref()
        .and_then(|f| f.format_name.clone())
        .unwrap_or_default();
    let video = probe.streams.iter().find(|s| s.codec_type.as_deref() == Some("video"));
    let has_audio = probe.streams.iter().any(|s| s.codec_type.as_deref() == Some("audio"));
    // Single images come through demuxers like png_pipe or image2.
    if format_name.ends_with("_pipe") || format_name == "image2" {
        return Err(IngestError::Unsupported(format!("still image ({format_name})")));
    }
    let duration_s = probe
        .format
        .as_ref()
        .and_then(|f| parse_seconds(f.duration.as_ref()))
        .or_else(|| video.and_then(|v| parse_seconds(v.duration.as_ref())))
        .unwrap_or(0.0);
    Ok(MediaInfo {
        duration_s,
        has_video: video.is_some(),
        has_audio,
        width: video.and_then(|v| v.width).unwrap_or(0),
        height: video.and_then(|v| v.height).unwrap_or(0),
    })
}

impl MediaDecoder for FfmpegDecoder {
    fn name(&self) -> &'static str {
        "ffmpeg"
    }

    fn probe(&self, path: &Path) -> Result<MediaInfo, IngestError> {
        let output = self.run(
            &self.ffprobe,
            &[
                "-v".as_ref(),
                "error".as_ref(),
                "-print_format".as_ref(),
                "json".as_ref(),
                "-show_format".as_ref(),
                "-show_streams".as_ref(),
                path.as_os_str(),
            ],
        )?;
        let probe: ProbeOutput = serde_json::from_slice(&output.stdout)
            .map_err(|e| IngestError::Unreadable(format!("unexpected ffprobe output: {e}")))?;
        info_from_probe(&probe)
    }

    fn frames(&self, path: &Path, timestamps: &[f64]) -> Result<Vec<FrameSample>, IngestError> {
        let mut frames = Vec::with_capacity(timestamps.len());
        for (index, t) in timestamps.iter().enumerate() {
            let seek = format!("{t:.6}");
            let output = self.run(
                &self.ffmpeg,
                &[
                    "-v".as_ref(),
                    "error".as_ref(),
                    "-ss".as_ref(),
                    seek.as_ref(),
                    "-i".as_ref(),
                    path.as_os_str(),
                    "-frames:v".as_ref(),
                    "1".as_ref(),
                    "-f".as_ref(),
                    "image2pipe".as_ref(),
                    "-c:v".as_ref(),
                    "png".as_ref(),
                    "-".as_ref(),
                ],
            )?;
            let (width, height) = png_dimensions(&output.stdout).ok_or_else(|| {
                IngestError::Unreadable(format!("ffmpeg produced no frame at {t} s"))
            })?;
            frames.push(FrameSample {
                index,
                timestamp_s: *t,
                image_bytes: output.stdout,
                width,
                height,
            });
        }
        Ok(frames)
    }

    fn audio(&self, path: &Path, out: &Path) -> Result<bool, IngestError> {
        self.run(
            &self.ffmpeg,
            &[
                "-v".as_ref(),
                "error".as_ref(),
                "-y".as_ref(),
                "-i".as_ref(),
                path.as_os_str(),
                "-vn".as_ref(),
                "-ac".as_ref(),
                "1".as_ref(),
                "-ar".as_ref(),
                "16000".as_ref(),
                "-c:a".as_ref(),
                "pcm_s16le".as_ref(),
                out.as_os_str(),
            ],
        )?;
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<MediaInfo, IngestError> {
        info_from_probe(&serde_json::from_str(json).unwrap())
    }

    #[test]
    fn probe_of_a_regular_clip() {
        let info = parse(
            r#"{"streams":[{"codec_type":"video","width":720,"height":1280},
                           {"codec_type":"audio"}],
                "format":{"format_name":"mov,mp4,m4a,3gp,3g2,mj2","duration":"31.250000"}}"#,
        )
        .unwrap();
        assert_eq!(info.duration_s, 31.25);
        assert!(info.has_video && info.has_audio);
        assert_eq!((info.width, info.height), (720, 1280));
    }

    #[test]
    fn probe_of_a_still_image() {
        let err = parse(
            r#"{"streams":[{"codec_type":"video","width":10,"height":10}],
                "format":{"format_name":"png_pipe"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::Unsupported(_)));
    }

    #[test]
    fn missing_tool_is_unreadable() {
        let decoder = FfmpegDecoder::new("/nonexistent/ffmpeg", "/nonexistent/ffprobe");
        let err = decoder.probe(Path::new("clip.mp4")).unwrap_err();
        assert!(matches!(err, IngestError::Unreadable(_)));
    }
}
