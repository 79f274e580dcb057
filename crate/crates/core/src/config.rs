//! Pipeline configuration: module toggles, signal weights, sampling and
//! backend endpoints.
//!
//! The file format is TOML. Every section is optional; missing keys take the
//! shipped defaults, so a config file only needs to list what it changes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::canonical;

/// Pipeline modules that can be switched on and off.
pub mod modules {
    pub const TRANSCRIPT: &str = "transcript";
    pub const OCR: &str = "ocr";
    pub const VIDEO_SUMMARY: &str = "video_summary";
    pub const DEEPFAKE: &str = "deepfake";
    pub const BUZZWORD: &str = "buzzword";
    pub const FACT_CHECK: &str = "fact_check";
    pub const AD_FILTER: &str = "ad_filter";
    pub const WEAPON: &str = "weapon";

    pub const ALL: [&str; 8] =
        [TRANSCRIPT, OCR, VIDEO_SUMMARY, DEEPFAKE, BUZZWORD, FACT_CHECK, AD_FILTER, WEAPON];

    pub fn is_known(name: &str) -> bool {
        ALL.contains(&name)
    }
}

/// Named scoring signals.
pub mod signals {
    pub const VERDICT_TRANSCRIPT: &str = "verdict.transcript";
    pub const VERDICT_SUMMARY: &str = "verdict.summary";
    pub const VERDICT_OVERLAY: &str = "verdict.overlay";
    pub const BUZZWORD: &str = "buzzword";
    pub const CLAIM_REFUTED: &str = "claim.refuted";
    pub const CLAIM_PRESENT: &str = "claim.present";
    pub const DEEPFAKE: &str = "deepfake";
    pub const WEAPON: &str = "weapon";

    /// (signal, owning module, default weight)
    pub const TABLE: [(&str, &str, f64); 8] = [
        (VERDICT_TRANSCRIPT, super::modules::TRANSCRIPT, 1.0),
        (VERDICT_SUMMARY, super::modules::VIDEO_SUMMARY, 1.0),
        (VERDICT_OVERLAY, super::modules::OCR, 1.0),
        (BUZZWORD, super::modules::BUZZWORD, 1.0),
        (CLAIM_REFUTED, super::modules::FACT_CHECK, 2.0),
        (CLAIM_PRESENT, super::modules::FACT_CHECK, 1.0),
        (DEEPFAKE, super::modules::DEEPFAKE, 1.0),
        (WEAPON, super::modules::WEAPON, 0.0),
    ];

    pub fn module_of(signal: &str) -> Option<&'static str> {
        TABLE.iter().find(|(s, _, _)| *s == signal).map(|(_, m, _)| *m)
    }

    pub fn default_weight(signal: &str) -> Option<f64> {
        TABLE.iter().find(|(s, _, _)| *s == signal).map(|(_, _, w)| *w)
    }
}

/// Remote model backends.
pub mod backends {
    pub const TRANSCRIPTION: &str = "transcription";
    pub const OCR: &str = "ocr";
    pub const CAPTIONING: &str = "captioning";
    pub const LLM: &str = "llm";
    pub const DEEPFAKE: &str = "deepfake";
    pub const CLAIM_DETECTION: &str = "claim_detection";
    pub const FACT_CHECK: &str = "fact_check";

    pub const ALL: [&str; 7] =
        [TRANSCRIPTION, OCR, CAPTIONING, LLM, DEEPFAKE, CLAIM_DETECTION, FACT_CHECK];
}

pub const DEFAULT_THRESHOLD: f64 = 2.0;
pub const DEFAULT_FRAME_RATE_HZ: f64 = 0.5;
pub const DEFAULT_MAX_FRAMES: u32 = 32;
pub const DEFAULT_DEEPFAKE_TRIGGER: f64 = 0.5;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub url: String,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Bearer token; prefer `auth_token_env` so secrets stay out of files.
    pub auth_token: Option<String>,
    /// Environment variable holding the bearer token.
    pub auth_token_env: Option<String>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            url: "http://127.0.0.1:11434".into(),
            timeout_ms: 30_000,
            max_retries: 2,
            auth_token: None,
            auth_token_env: None,
        }
    }
}

impl EndpointConfig {
    pub fn resolved_token(&self) -> Option<String> {
        self.auth_token
            .clone()
            .or_else(|| self.auth_token_env.as_ref().and_then(|var| std::env::var(var).ok()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub ffmpeg: String,
    pub ffprobe: String,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self { ffmpeg: "ffmpeg".into(), ffprobe: "ffprobe".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    pub store_dir: PathBuf,
    pub workers: usize,
    pub max_upload_bytes: u64,
    /// Static reviewer UI bundle to serve at `/`, if built.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            store_dir: PathBuf::from("store"),
            workers: 2,
            max_upload_bytes: 512 * 1024 * 1024,
            ui_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub module_enabled: BTreeMap<String, bool>,
    pub weights: BTreeMap<String, f64>,
    pub threshold: f64,
    pub frame_sample_rate_hz: f64,
    pub max_frames: u32,
    pub deepfake_trigger: f64,
    pub endpoints: BTreeMap<String, EndpointConfig>,
    pub lexicon_paths: Vec<PathBuf>,
    pub decoder: DecoderConfig,
    /// Command that downloads a URL: invoked as `<cmd> <url> <out_dir>`,
    /// prints the downloaded file path on stdout.
    pub resolver_command: Option<String>,
    /// Endpoint names compared by the deepfake benchmark.
    pub deepfake_backends: Vec<String>,
    pub service: ServiceConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let mut config = Self {
            module_enabled: BTreeMap::new(),
            weights: BTreeMap::new(),
            threshold: DEFAULT_THRESHOLD,
            frame_sample_rate_hz: DEFAULT_FRAME_RATE_HZ,
            max_frames: DEFAULT_MAX_FRAMES,
            deepfake_trigger: DEFAULT_DEEPFAKE_TRIGGER,
            endpoints: BTreeMap::new(),
            lexicon_paths: Vec::new(),
            decoder: DecoderConfig::default(),
            resolver_command: None,
            deepfake_backends: vec![backends::DEEPFAKE.to_string()],
            service: ServiceConfig::default(),
        };
        config.fill_defaults();
        config
    }
}

/// The subset of the config that can change an analysis outcome. Hashing it
/// gives the cache key; endpoint addresses, timeouts and secrets are excluded.
#[derive(Debug, Serialize)]
struct AnalysisView<'a> {
    module_enabled: &'a BTreeMap<String, bool>,
    weights: &'a BTreeMap<String, f64>,
    threshold: f64,
    frame_sample_rate_hz: f64,
    max_frames: u32,
    deepfake_trigger: f64,
    extra: &'a BTreeMap<String, String>,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut config: PipelineConfig = toml::from_str(text)?;
        config.fill_defaults();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::from_toml_str(&text)?;
        // Relative lexicon paths are relative to the config file.
        if let Some(dir) = path.parent() {
            for lexicon in &mut config.lexicon_paths {
                if lexicon.is_relative() {
                    *lexicon = dir.join(&*lexicon);
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable as TOML")
    }

    /// Insert defaults for every module, signal and backend the file omitted.
    pub fn fill_defaults(&mut self) {
        for module in modules::ALL {
            self.module_enabled
                .entry(module.to_string())
                .or_insert(module != modules::WEAPON);
        }
        for (signal, _, weight) in signals::TABLE {
            self.weights.entry(signal.to_string()).or_insert(weight);
        }
        for backend in backends::ALL {
            self.endpoints.entry(backend.to_string()).or_default();
        }
        for name in &self.deepfake_backends {
            self.endpoints.entry(name.clone()).or_default();
        }
    }

    /// Override endpoint URLs and tokens from `VIDTRIAGE_<NAME>_URL` and
    /// `VIDTRIAGE_<NAME>_TOKEN`.
    pub fn apply_env(&mut self) {
        for (name, endpoint) in self.endpoints.iter_mut() {
            let key = name.to_ascii_uppercase().replace(['-', '.'], "_");
            if let Ok(url) = std::env::var(format!("VIDTRIAGE_{key}_URL")) {
                endpoint.url = url;
            }
            if let Ok(token) = std::env::var(format!("VIDTRIAGE_{key}_TOKEN")) {
                endpoint.auth_token = Some(token);
            }
        }
    }

    pub fn is_enabled(&self, module: &str) -> bool {
        self.module_enabled.get(module).copied().unwrap_or(false)
    }

    pub fn weight(&self, signal: &str) -> f64 {
        self.weights
            .get(signal)
            .copied()
            .or_else(|| signals::default_weight(signal))
            .unwrap_or(0.0)
    }

    pub fn set_enabled(&mut self, module: &str, enabled: bool) {
        self.module_enabled.insert(module.to_string(), enabled);
    }

    /// Copy of this config with `module` switched off.
    pub fn without(&self, module: &str) -> Self {
        let mut copy = self.clone();
        copy.set_enabled(module, false);
        copy
    }

    pub fn disabled_modules(&self) -> Vec<String> {
        modules::ALL
            .iter()
            .filter(|m| !self.is_enabled(m))
            .map(|m| m.to_string())
            .collect()
    }

    pub fn endpoint(&self, name: &str) -> EndpointConfig {
        self.endpoints.get(name).cloned().unwrap_or_default()
    }

    /// Cache key component: digest of every outcome-relevant setting plus
    /// `extra` fingerprints (lexicon contents, prompt text).
    pub fn analysis_digest(&self, extra: &BTreeMap<String, String>) -> String {
        let view = AnalysisView {
            module_enabled: &self.module_enabled,
            weights: &self.weights,
            threshold: self.threshold,
            frame_sample_rate_hz: self.frame_sample_rate_hz,
            max_frames: self.max_frames,
            deepfake_trigger: self.deepfake_trigger,
            extra,
        };
        canonical::digest(&view).expect("analysis view is serializable")
    }

    /// Copy safe to show to clients: tokens replaced by a marker.
    pub fn redacted(&self) -> Self {
        let mut copy = self.clone();
        for endpoint in copy.endpoints.values_mut() {
            if endpoint.auth_token.is_some() {
                endpoint.auth_token = Some("<redacted>".into());
            }
        }
        copy
    }
}

/// Check every field invariant; the returned list is empty iff the config is
/// valid. Each message starts with the offending field.
pub fn validate(config: &PipelineConfig) -> Vec<String> {
    let mut violations = Vec::new();

    if !(config.threshold.is_finite() && config.threshold > 0.0) {
        violations.push("threshold must be > 0".to_string());
    }
    for (signal, weight) in &config.weights {
        if signals::module_of(signal).is_none() {
            violations.push(format!("weights.{signal} is not a known signal"));
        } else if !(weight.is_finite() && *weight >= 0.0) {
            violations.push(format!("weights.{signal} must be >= 0 (got {weight})"));
        }
    }
    // A refuted claim replaces the claim.present contribution, so a larger
    // present weight would let an extra refuted claim lower the score.
    if config.weight(signals::CLAIM_REFUTED) < config.weight(signals::CLAIM_PRESENT) {
        violations.push("weights.claim.refuted must be >= weights.claim.present".to_string());
    }
    for module in config.module_enabled.keys() {
        if !modules::is_known(module) {
            violations.push(format!("module_enabled.{module} is not a known module"));
        }
    }
    if !(config.frame_sample_rate_hz.is_finite() && config.frame_sample_rate_hz > 0.0) {
        violations.push("frame_sample_rate_hz must be > 0".to_string());
    }
    if config.max_frames == 0 {
        violations.push("max_frames must be >= 1".to_string());
    }
    if !(0.0..=1.0).contains(&config.deepfake_trigger) {
        violations.push("deepfake_trigger must lie in [0, 1]".to_string());
    }
    for (name, endpoint) in &config.endpoints {
        if endpoint.timeout_ms == 0 {
            violations.push(format!("endpoints.{name}.timeout_ms must be > 0"));
        }
        match reqwest::Url::parse(&endpoint.url) {
            Ok(url) if matches!(url.scheme(), "http" | "https") => {}
            _ => violations.push(format!("endpoints.{name}.url is not an http(s) URL")),
        }
    }
    if config.service.workers == 0 {
        violations.push("service.workers must be >= 1".to_string());
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        assert_eq!(validate(&PipelineConfig::default()), Vec::<String>::new());
    }

    #[test]
    fn zero_threshold_is_rejected() {
        let config = PipelineConfig { threshold: 0.0, ..Default::default() };
        assert_eq!(validate(&config), vec!["threshold must be > 0".to_string()]);
    }

    #[test]
    fn negative_weight_names_the_field() {
        let mut config = PipelineConfig::default();
        config.weights.insert("buzzword".into(), -1.0);
        let violations = validate(&config);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].starts_with("weights.buzzword"), "{violations:?}");
    }

    #[test]
    fn unknown_names_are_flagged() {
        let mut config = PipelineConfig::default();
        config.weights.insert("sentiment".into(), 1.0);
        config.module_enabled.insert("sentiment".into(), true);
        let violations = validate(&config);
        assert_eq!(violations.len(), 2, "{violations:?}");
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let config = PipelineConfig::from_toml_str(
            "threshold = 3.0\n[weights]\nbuzzword = 2.5\n[module_enabled]\nocr = false\n",
        )
        .unwrap();
        assert_eq!(config.threshold, 3.0);
        assert_eq!(config.weight("buzzword"), 2.5);
        assert_eq!(config.weight("claim.refuted"), 2.0);
        assert!(!config.is_enabled("ocr"));
        assert!(config.is_enabled("transcript"));
        assert!(!config.is_enabled("weapon"));
        assert!(validate(&config).is_empty());
    }

    #[test]
    fn toml_round_trip() {
        let config = PipelineConfig::default();
        let again = PipelineConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(config, again);
    }

    #[test]
    fn digest_ignores_endpoints_and_secrets() {
        let base = PipelineConfig::default();
        let mut moved = base.clone();
        moved.endpoints.get_mut("llm").unwrap().url = "http://10.0.0.1:9".into();
        moved.endpoints.get_mut("llm").unwrap().auth_token = Some("s3cret".into());
        let extra = BTreeMap::new();
        assert_eq!(base.analysis_digest(&extra), moved.analysis_digest(&extra));
        assert_ne!(base.analysis_digest(&extra), base.without("ocr").analysis_digest(&extra));
    }

    #[test]
    fn redaction_hides_tokens() {
        let mut config = PipelineConfig::default();
        config.endpoints.get_mut("fact_check").unwrap().auth_token = Some("s3cret".into());
        let shown = config.redacted().to_toml_string();
        assert!(!shown.contains("s3cret"));
    }
}
