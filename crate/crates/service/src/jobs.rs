//! Bounded analysis queue drained by a fixed number of workers.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use tokio::sync::mpsc;
use vidtriage_core::media::ResolvedMedia;
use vidtriage_core::pipeline::Pipeline;

const QUEUE_DEPTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct JobInfo {
    pub job_id: String,
    pub video_id: String,
    pub status: JobStatus,
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cached: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Job {
    id: String,
    media: ResolvedMedia,
    /// Upload directory to remove once the job finishes.
    cleanup: Option<PathBuf>,
}

#[derive(Default)]
struct Table {
    jobs: HashMap<String, JobInfo>,
    /// video_id → job_id for queued or running jobs.
    in_flight: HashMap<String, String>,
}

#[derive(Debug)]
pub enum SubmitError {
    Duplicate { job_id: String },
    QueueFull,
}

#[derive(Clone)]
pub struct Jobs {
    table: Arc<Mutex<Table>>,
    tx: mpsc::Sender<Job>,
    digest: String,
}

impl Jobs {
    /// Start `workers` workers running jobs through `pipeline`.
    pub fn start(pipeline: Arc<Pipeline>, workers: usize) -> Self {
        let (tx, rx) = mpsc::channel::<Job>(QUEUE_DEPTH);
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        let table = Arc::new(Mutex::new(Table::default()));
        for _ in 0..workers.max(1) {
            let (rx, table, pipeline) = (rx.clone(), table.clone(), pipeline.clone());
            tokio::spawn(async move {
                loop {
                    let Some(job) = rx.lock().await.recv().await else { break };
                    run(&pipeline, &table, job).await;
                }
            });
        }
        Self { table, tx, digest: pipeline.config_digest().to_string() }
    }

    pub fn submit(&self, media: ResolvedMedia, cleanup: Option<PathBuf>) -> Result<JobInfo, SubmitError> {
        let mut table = self.table.lock().unwrap();
        if let Some(job_id) = table.in_flight.get(&media.id) {
            return Err(SubmitError::Duplicate { job_id: job_id.clone() });
        }
        let info = JobInfo {
            job_id: uuid::Uuid::new_v4().simple().to_string(),
            video_id: media.id.clone(),
            status: JobStatus::Queued,
            config_digest: self.digest.clone(),
            cached: None,
            error: None,
        };
        let job = Job { id: info.job_id.clone(), media, cleanup };
        self.tx.try_send(job).map_err(|_| SubmitError::QueueFull)?;
        table.in_flight.insert(info.video_id.clone(), info.job_id.clone());
        table.jobs.insert(info.job_id.clone(), info.clone());
        Ok(info)
    }

    pub fn get(&self, job_id: &str) -> Option<JobInfo> {
        self.table.lock().unwrap().jobs.get(job_id).cloned()
    }
}

async fn run(pipeline: &Pipeline, table: &Mutex<Table>, job: Job) {
    let update = |f: &dyn Fn(&mut JobInfo)| {
        if let Some(info) = table.lock().unwrap().jobs.get_mut(&job.id) {
            f(info);
        }
    };
    update(&|info| info.status = JobStatus::Running);
    let video_id = job.media.id.clone();
    let outcome = pipeline.analyze_resolved(job.media).await;
    {
        let mut t = table.lock().unwrap();
        if let Some(info) = t.jobs.get_mut(&job.id) {
            match &outcome {
                Ok(analysis) => {
                    info.status = JobStatus::Done;
                    info.cached = Some(analysis.cached);
                }
                Err(e) => {
                    info.status = JobStatus::Failed;
                    info.error = Some(e.to_string());
                }
            }
        }
        t.in_flight.remove(&video_id);
    }
    if let Err(e) = &outcome {
        tracing::warn!(job = %job.id, error = %e, "analysis failed");
    }
    if let Some(dir) = job.cleanup {
        let _ = tokio::fs::remove_dir_all(dir).await;
    }
}
