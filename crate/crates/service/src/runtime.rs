//! Shared setup for CLI commands and the server: config loading, module
//! toggles, fixture mode and the pipeline itself.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context as _;
use vidtriage_core::inference::mock::MockServer;
use vidtriage_core::pipeline::Pipeline;
use vidtriage_core::store::Store;
use vidtriage_core::PipelineConfig;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub fixture_mode: bool,
    pub fixtures: Option<PathBuf>,
    pub disable: Vec<String>,
    pub store: Option<PathBuf>,
}

impl Options {
    pub fn fixtures_dir(&self) -> PathBuf {
        self.fixtures
            .clone()
            .or_else(|| std::env::var_os("VIDTRIAGE_FIXTURES").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("fixtures"))
    }
}

/// Loaded config plus, in fixture mode, the replay server it points at.
/// Keep this alive as long as the pipeline is used.
pub struct Runtime {
    pub config: PipelineConfig,
    pub fixture_server: Option<MockServer>,
}

impl Runtime {
    /// `extra_backends` are endpoint names to register before fixture mode
    /// rewires every endpoint (deepfake bench backends, for example).
    pub async fn start(opts: &Options, extra_backends: &[String]) -> anyhow::Result<Self> {
        let mut config = match &opts.config {
            Some(path) => PipelineConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => PipelineConfig::default(),
        };
        config.apply_env();
        for module in &opts.disable {
            config.set_enabled(module, false);
        }
        for name in extra_backends {
            if !config.deepfake_backends.contains(name) {
                config.deepfake_backends.push(name.clone());
            }
        }
        config.fill_defaults();
        if let Some(store) = &opts.store {
            config.service.store_dir = store.clone();
        }
        let fixture_server = if opts.fixture_mode {
            let dir = opts.fixtures_dir().join("recordings");
            if !dir.is_dir() {
                anyhow::bail!("fixture recordings not found at {}", dir.display());
            }
            let server = MockServer::replay(dir).await?;
            server.point_config(&mut config);
            Some(server)
        } else {
            None
        };
        Ok(Self { config, fixture_server })
    }

    pub fn store(&self) -> anyhow::Result<Store> {
        let dir: &Path = &self.config.service.store_dir;
        Store::open(dir).with_context(|| format!("opening store {}", dir.display()))
    }

    pub fn pipeline(&self, store: Option<Store>) -> anyhow::Result<Arc<Pipeline>> {
        Ok(Arc::new(Pipeline::new(self.config.clone(), store)?))
    }
}
