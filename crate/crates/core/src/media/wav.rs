//! WAV helpers: the audio contract towards transcription is RIFF/WAV,
//! PCM16, mono, 16 kHz.

use std::path::Path;

use super::IngestError;

pub const TARGET_RATE: u32 = 16_000;

fn unreadable(path: &Path, e: impl std::fmt::Display) -> IngestError {
    IngestError::Unreadable(format!("{}: {e}", path.display()))
}

/// Read any PCM/float WAV as mono f32 samples in [-1, 1].
pub fn read_mono(path: &Path) -> Result<(Vec<f32>, u32), IngestError> {
    let mut reader = hound::WavReader::open(path).map_err(|e| unreadable(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .collect::<Result<_, _>>()
            .map_err(|e| unreadable(path, e))?,
        hound::SampleFormat::Int => {
            let scale = (1i64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 / scale))
                .collect::<Result<_, _>>()
                .map_err(|e| unreadable(path, e))?
        }
    };
    let mono = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f32>() / frame.len() as f32)
        .collect();
    Ok((mono, spec.sample_rate))
}

/// Linear-interpolation resampling.
pub fn resample(samples: &[f32], from: u32, to: u32) -> Vec<f32> {
    if from == to || samples.is_empty() {
        return samples.to_vec();
    }
    let out_len = (samples.len() as u64 * to as u64 / from as u64).max(1) as usize;
    let step = from as f64 / to as f64;
    (0..out_len)
        .map(|i| {
            let pos = i as f64 * step;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(samples.len() - 1);
            let frac = (pos - lo as f64) as f32;
            let lo = lo.min(samples.len() - 1);
            samples[lo] * (1.0 - frac) + samples[hi] * frac
        })
        .collect()
}

pub fn write_pcm16(path: &Path, sample_rate: u32, samples: &[f32]) -> Result<(), IngestError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| unreadable(path, e))?;
    for s in samples {
        let v = (s.clamp(-1.0, 1.0) * i16::MAX as f32).round() as i16;
        writer.write_sample(v).map_err(|e| unreadable(path, e))?;
    }
    writer.finalize().map_err(|e| unreadable(path, e))
}

pub fn convert_to_pcm16_mono_16k(input: &Path, out: &Path) -> Result<(), IngestError> {
    let (mono, rate) = read_mono(input)?;
    write_pcm16(out, TARGET_RATE, &resample(&mono, rate, TARGET_RATE))
}

/// Check a file honours the transcription audio contract.
pub fn check_contract(path: &Path) -> Result<f64, String> {
    let reader = hound::WavReader::open(path).map_err(|e| e.to_string())?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.sample_rate != TARGET_RATE
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(format!(
            "expected PCM16 mono {TARGET_RATE} Hz, got {} ch {} Hz {} bit",
            spec.channels, spec.sample_rate, spec.bits_per_sample
        ));
    }
    Ok(reader.duration() as f64 / TARGET_RATE as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stereo_44k_becomes_mono_16k() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 44_100,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&input, spec).unwrap();
        for i in 0..44_100 {
            let v = ((i as f32 * 0.01).sin() * 8000.0) as i16;
            w.write_sample(v).unwrap();
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        let out = dir.path().join("out.wav");
        convert_to_pcm16_mono_16k(&input, &out).unwrap();
        let seconds = check_contract(&out).unwrap();
        assert!((seconds - 1.0).abs() < 1e-3, "{seconds}");
    }

    #[test]
    fn contract_rejects_other_formats() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("8k.wav");
        write_pcm16(&path, 8_000, &[0.0; 800]).unwrap();
        assert!(check_contract(&path).is_err());
        std::fs::write(dir.path().join("junk.wav"), b"not a wav").unwrap();
        assert!(check_contract(&dir.path().join("junk.wav")).is_err());
    }

    #[test]
    fn resample_keeps_endpoints() {
        let out = resample(&[0.0, 1.0], 2, 4);
        assert_eq!(out.len(), 4);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 1.0);
    }
}
