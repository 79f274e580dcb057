//! In-process YUV4MPEG2 decoding and encoding.
//!
//! Y4M carries no audio. A WAV file next to the clip with the same stem
//! (`clip.y4m` + `clip.wav`) is treated as its audio track.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use super::{encode_png, wav, FrameSample, IngestError, MediaDecoder, MediaInfo};

const FRAME_LIMIT_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug, Default, Clone, Copy)]
pub struct Y4mDecoder;

pub fn sidecar_audio(path: &Path) -> Option<PathBuf> {
    let candidate = path.with_extension("wav");
    candidate.is_file().then_some(candidate)
}

fn open(path: &Path) -> Result<y4m::Decoder<BufReader<File>>, IngestError> {
    let file = File::open(path)
        .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?;
    let decoder =
        y4m::Decoder::new_with_limits(BufReader::new(file), y4m::Limits { bytes: FRAME_LIMIT_BYTES })
            .map_err(|e| IngestError::Unreadable(format!("bad Y4M header: {e:?}")))?;
    if decoder.get_bit_depth() != 8 {
        return Err(IngestError::Unsupported(format!(
            "{}-bit Y4M is not supported",
            decoder.get_bit_depth()
        )));
    }
    Ok(decoder)
}

/// Chroma subsampling shifts (x, y) for a colorspace, `None` for mono.
fn chroma_shift(colorspace: y4m::Colorspace) -> Result<Option<(u32, u32)>, IngestError> {
    use y4m::Colorspace::*;
    match colorspace {
        Cmono => Ok(None),
        C420 | C420jpeg | C420paldv | C420mpeg2 => Ok(Some((1, 1))),
        C422 => Ok(Some((1, 0))),
        C444 => Ok(Some((0, 0))),
        other => Err(IngestError::Unsupported(format!("Y4M colorspace {other:?}"))),
    }
}

fn frame_rate(decoder: &y4m::Decoder<BufReader<File>>) -> Result<f64, IngestError> {
    let rate = decoder.get_framerate();
    if rate.num == 0 || rate.den == 0 {
        return Err(IngestError::Unreadable("Y4M header has a zero frame rate".into()));
    }
    Ok(rate.num as f64 / rate.den as f64)
}

fn header_len(path: &Path) -> Result<u64, IngestError> {
    use std::io::BufRead;
    let file = File::open(path)
        .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?;
    let mut line = Vec::new();
    BufReader::new(file)
        .read_until(b'\n', &mut line)
        .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?;
    Ok(line.len() as u64)
}

fn frame_payload_len(decoder: &y4m::Decoder<BufReader<File>>) -> u64 {
    let (w, h) = (decoder.get_width() as u64, decoder.get_height() as u64);
    let luma = w * h;
    let chroma = match chroma_shift(decoder.get_colorspace()) {
        Ok(Some((sx, sy))) => ((w + (1 << sx) - 1) >> sx) * ((h + (1 << sy) - 1) >> sy),
        _ => 0,
    };
    luma + 2 * chroma
}

fn read_error(e: y4m::Error) -> IngestError {
    IngestError::Unreadable(format!("truncated or corrupt Y4M frame: {e:?}"))
}

/// BT.601 studio-swing YCbCr to packed RGB8.
fn to_rgb(frame: &y4m::Frame<'_>, width: u32, height: u32, shift: Option<(u32, u32)>) -> Vec<u8> {
    let (y_plane, u_plane, v_plane) = (frame.get_y_plane(), frame.get_u_plane(), frame.get_v_plane());
    let chroma_width = shift.map(|(sx, _)| (width + (1 << sx) - 1) >> sx).unwrap_or(0);
    let mut rgb = Vec::with_capacity((width * height * 3) as usize);
    for y in 0..height {
        for x in 0..width {
            let luma = y_plane[(y * width + x) as usize] as i32;
            let (cb, cr) = match shift {
                Some((sx, sy)) => {
                    let i = ((y >> sy) * chroma_width + (x >> sx)) as usize;
                    (u_plane[i] as i32, v_plane[i] as i32)
                }
                None => (128, 128),
            };
            let c = luma - 16;
            let d = cb - 128;
            let e = cr - 128;
            let clamp = |v: i32| ((v + 128) >> 8).clamp(0, 255) as u8;
            rgb.push(clamp(298 * c + 409 * e));
            rgb.push(clamp(298 * c - 100 * d - 208 * e));
            rgb.push(clamp(298 * c + 516 * d));
        }
    }
    rgb
}

impl MediaDecoder for Y4mDecoder {
    fn name(&self) -> &'static str {
        "y4m"
    }

    fn probe(&self, path: &Path) -> Result<MediaInfo, IngestError> {
        let mut decoder = open(path)?;
        chroma_shift(decoder.get_colorspace())?;
        let fps = frame_rate(&decoder)?;
        let (width, height) = (decoder.get_width() as u32, decoder.get_height() as u32);
        let frame_bytes = frame_payload_len(&decoder);
        let mut consumed = header_len(path)?;
        let mut count = 0usize;
        loop {
            match decoder.read_frame() {
                Ok(frame) => {
                    count += 1;
                    // "FRAME" [" " params] "\n" payload
                    let params = frame.get_raw_params().map_or(0, |p| p.len() + 1);
                    consumed += 6 + params as u64 + frame_bytes;
                }
                Err(y4m::Error::EOF) => break,
                Err(e) => return Err(read_error(e)),
            }
        }
        // The decoder reports a cut-off final frame as a clean EOF.
        let file_len = std::fs::metadata(path)
            .map_err(|e| IngestError::Unreadable(format!("{}: {e}", path.display())))?
            .len();
        if consumed != file_len {
            return Err(IngestError::Unreadable(format!(
                "Y4M stream has {} trailing bytes (truncated frame?)",
                file_len.abs_diff(consumed)
            )));
        }
        Ok(MediaInfo {
            duration_s: count as f64 / fps,
            has_video: count > 0,
            has_audio: sidecar_audio(path).is_some(),
            width,
            height,
        })
    }

    fn frames(&self, path: &Path, timestamps: &[f64]) -> Result<Vec<FrameSample>, IngestError> {
        let mut decoder = open(path)?;
        let shift = chroma_shift(decoder.get_colorspace())?;
        let fps = frame_rate(&decoder)?;
        let (width, height) = (decoder.get_width() as u32, decoder.get_height() as u32);

        // Frame shown at time t is floor(t * fps); tiny epsilon absorbs
        // values like 2.9999999 from re-spaced schedules.
        let targets: Vec<usize> =
            timestamps.iter().map(|t| (t * fps + 1e-9).floor().max(0.0) as usize).collect();
        let mut out = Vec::with_capacity(timestamps.len());
        let mut push = |png: &[u8], next: &mut usize| {
            out.push(FrameSample {
                index: *next,
                timestamp_s: timestamps[*next],
                image_bytes: png.to_vec(),
                width,
                height,
            });
            *next += 1;
        };
        let mut next = 0usize;
        let mut current = 0usize;
        let mut last_planes: Option<[Vec<u8>; 3]> = None;
        while next < targets.len() {
            let frame = match decoder.read_frame() {
                Ok(frame) => frame,
                Err(y4m::Error::EOF) => break,
                Err(e) => return Err(read_error(e)),
            };
            if targets[next] < current {
                return Err(IngestError::Unreadable("frame schedule is not monotone".into()));
            }
            if targets[next] == current {
                let png = encode_png(width, height, &to_rgb(&frame, width, height, shift));
                while next < targets.len() && targets[next] == current {
                    push(&png, &mut next);
                }
            }
            last_planes = Some([
                frame.get_y_plane().to_vec(),
                frame.get_u_plane().to_vec(),
                frame.get_v_plane().to_vec(),
            ]);
            current += 1;
        }
        if next < targets.len() {
            // Rounding can push the final timestamp one frame past the end;
            // hold the last frame.
            let [y, u, v] = last_planes
                .ok_or_else(|| IngestError::Unreadable("clip has no frames".into()))?;
            let frame = y4m::Frame::new([&y, &u, &v], None);
            let png = encode_png(width, height, &to_rgb(&frame, width, height, shift));
            while next < targets.len() {
                push(&png, &mut next);
            }
        }
        Ok(out)
    }

    fn audio(&self, path: &Path, out: &Path) -> Result<bool, IngestError> {
        match sidecar_audio(path) {
            Some(sidecar) => {
                wav::convert_to_pcm16_mono_16k(&sidecar, out)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Writes RGB frames as a 4:2:0 Y4M clip. Used for fixtures and tests.
pub struct Y4mWriter<W: Write> {
    encoder: y4m::Encoder<W>,
    width: usize,
    height: usize,
}

impl<W: Write> Y4mWriter<W> {
    pub fn new(writer: W, width: usize, height: usize, fps: usize) -> std::io::Result<Self> {
        assert!(width.is_multiple_of(2) && height.is_multiple_of(2), "4:2:0 needs even dimensions");
        let encoder = y4m::encode(width, height, y4m::Ratio::new(fps, 1))
            .with_colorspace(y4m::Colorspace::C420jpeg)
            .write_header(writer)
            .map_err(|e| std::io::Error::other(format!("{e:?}")))?;
        Ok(Self { encoder, width, height })
    }

    /// Append one frame of packed RGB8 pixels.
    pub fn write_rgb(&mut self, rgb: &[u8]) -> std::io::Result<()> {
        let (w, h) = (self.width, self.height);
        assert_eq!(rgb.len(), w * h * 3);
        let mut luma = Vec::with_capacity(w * h);
        for px in rgb.chunks_exact(3) {
            let (r, g, b) = (px[0] as i32, px[1] as i32, px[2] as i32);
            luma.push((((66 * r + 129 * g + 25 * b + 128) >> 8) + 16).clamp(0, 255) as u8);
        }
        let mut cb = Vec::with_capacity(w * h / 4);
        let mut cr = Vec::with_capacity(w * h / 4);
        for cy in 0..h / 2 {
            for cx in 0..w / 2 {
                let (mut r, mut g, mut b) = (0i32, 0i32, 0i32);
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let i = ((cy * 2 + dy) * w + cx * 2 + dx) * 3;
                    r += rgb[i] as i32;
                    g += rgb[i + 1] as i32;
                    b += rgb[i + 2] as i32;
                }
                let (r, g, b) = (r / 4, g / 4, b / 4);
                cb.push((((-38 * r - 74 * g + 112 * b + 128) >> 8) + 128).clamp(0, 255) as u8);
                cr.push((((112 * r - 94 * g - 18 * b + 128) >> 8) + 128).clamp(0, 255) as u8);
            }
        }
        let frame = y4m::Frame::new([&luma, &cb, &cr], None);
        self.encoder.write_frame(&frame).map_err(|e| std::io::Error::other(format!("{e:?}")))
    }
}

/// Write a clip of `frames` solid-colour frames. Handy for duration tests.
pub fn write_solid_clip(
    path: &Path,
    width: usize,
    height: usize,
    fps: usize,
    frames: usize,
    colour: [u8; 3],
) -> std::io::Result<()> {
    let file = std::io::BufWriter::new(File::create(path)?);
    let mut writer = Y4mWriter::new(file, width, height, fps)?;
    let rgb: Vec<u8> = colour.iter().copied().cycle().take(width * height * 3).collect();
    for _ in 0..frames {
        writer.write_rgb(&rgb)?;
    }
    Ok(())
}
