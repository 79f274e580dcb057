//! Regenerate the committed fixtures under `<workspace>/fixtures`.
//!
//! cargo run -p vidtriage-core --example make_fixtures [-- <out_dir>]

use std::path::{Path, PathBuf};

use vidtriage_core::config::modules;
use vidtriage_core::fixtures::{self, BENCH_BACKENDS};
use vidtriage_core::inference::mock::MockServer;
use vidtriage_core::inference::{BackendClient, BackendEndpoint};
use vidtriage_core::pipeline::Pipeline;
use vidtriage_core::PipelineConfig;

fn workspace_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(workspace_fixtures);
    let recordings = out.join("recordings");
    if recordings.exists() {
        std::fs::remove_dir_all(&recordings)?;
    }

    let clip = fixtures::write_beirut_clip(&out)?;
    println!("wrote {}", clip.display());

    // Record every backend exchange of a default-config analysis, plus the
    // variants with one module switched off, so fixture mode can replay them.
    let server = MockServer::recording(fixtures::beirut_script(), &recordings).await?;
    let mut variants = vec![PipelineConfig::default()];
    for module in modules::ALL {
        variants.push(PipelineConfig::default().without(module));
    }
    for mut config in variants {
        server.point_config(&mut config);
        let pipeline = Pipeline::new(config, None)?;
        let analysis = pipeline.analyze(&clip.display().to_string()).await?;
        println!(
            "analysis {} -> {} (disabled: {:?})",
            analysis.record.video_id,
            analysis.record.result.label,
            analysis.record.result.disabled
        );
    }
    println!("recorded {} backend calls", server.total_calls());
    drop(server);

    let datasets = out.join("datasets");
    std::fs::create_dir_all(&datasets)?;
    fixtures::synth20().write(&out.join("synth20.recs"))?;
    fixtures::synthetic_nb().write(&datasets.join("synthetic-nb.jsonl"))?;
    fixtures::synthetic_en().write(&datasets.join("synthetic-en.jsonl"))?;
    fixtures::buzzword_separator().write(&datasets.join("buzzword-separator.jsonl"))?;
    std::fs::write(
        datasets.join("live.jsonl"),
        concat!(
            "{\"gold_label\":\"Checkworthy\",\"language\":\"ar\",\"media\":\"../beirut.y4m\",\"video_id\":\"beirut\"}\n",
            "{\"gold_label\":\"Not_Checkworthy\",\"language\":\"en\",\"media\":\"missing.y4m\",\"video_id\":\"missing\"}\n",
        ),
    )?;

    let bench = fixtures::synthetic_bench("bench", 20, 20);
    let bench_path = fixtures::write_bench(&out.join("deepfake"), &bench)?;
    let server = MockServer::recording(fixtures::deepfake_script(fixtures::bench_scores), &recordings).await?;
    for name in BENCH_BACKENDS {
        let client = BackendClient::new(BackendEndpoint::new(name, &server.url(name))?);
        for item in &bench.items {
            vidtriage_core::inference::deepfake_score(&client, &item.frames).await?;
        }
    }
    println!("wrote {} ({} backend calls recorded)", bench_path.display(), server.total_calls());
    Ok(())
}
