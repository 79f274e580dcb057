/// Frame timestamps for a clip of `duration_s` seconds.
///
/// Takes `k / rate_hz` for every `k` that lands in `[0, duration_s)`. When that
/// would exceed `max_frames`, the budget is re-spread uniformly over
/// `[0, duration_s - 1/rate_hz]` instead, always starting at `t = 0`.
/// Any positive duration yields at least one timestamp.
pub fn sample_frames(duration_s: f64, rate_hz: f64, max_frames: usize) -> Vec<f64> {
    if !(duration_s > 0.0 && rate_hz > 0.0) || !duration_s.is_finite() {
        return Vec::new();
    }
    let max_frames = max_frames.max(1);

    let at = |k: usize| k as f64 / rate_hz;
    let mut natural = (duration_s * rate_hz).ceil().max(1.0) as usize;
    while natural > 1 && at(natural - 1) >= duration_s {
        natural -= 1;
    }
    while natural <= max_frames && at(natural) < duration_s {
        natural += 1;
    }

    if natural <= max_frames {
        return (0..natural).map(at).collect();
    }
    if max_frames == 1 {
        return vec![0.0];
    }
    let span = duration_s - 1.0 / rate_hz;
    let last = (max_frames - 1) as f64;
    (0..max_frames).map(|k| span * k as f64 / last).collect()
}
