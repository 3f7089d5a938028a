//! Manifest-driven sweeps: one child `run` process per (experiment, seed),
//! executed by a bounded worker pool.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Deserialize;

use mohollm::sampler::GeneratorKind;
use mohollm::surrogate::PredictorKind;
use mohollm::{Benchmark, Mode, RunConfig};

use crate::config::{config_from_table, finalize, run_name};
use crate::output::read_trials;
use crate::HarnessError;

/// Settings a manifest fixes per experiment; overrides may not repeat them.
const RESERVED: [&str; 5] = ["benchmark", "mode", "generator", "predictor", "seed"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub benchmark: Benchmark,
    pub mode: Mode,
    pub generator: GeneratorKind,
    #[serde(default)]
    pub predictor: Option<PredictorKind>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub overrides: toml::Table,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Output root, relative to the manifest file unless absolute.
    pub out: PathBuf,
    /// Concurrent child processes; defaults to the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub templates: Option<PathBuf>,
    #[serde(default)]
    pub prices: Option<PathBuf>,
    #[serde(rename = "experiment")]
    pub experiments: Vec<Experiment>,
}

/// One child run.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: RunConfig,
    pub dir: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut manifest: Manifest = toml::from_str(&text)
            .map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            Some(&mut manifest.out),
            manifest.templates.as_mut(),
            manifest.prices.as_mut(),
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(manifest)
    }

    /// Expands experiments into jobs with distinct output directories.
    pub fn jobs(&self) -> Result<Vec<Job>, HarnessError> {
        let mut jobs = Vec::new();
        let mut dirs = BTreeSet::new();
        for (i, e) in self.experiments.iter().enumerate() {
            let origin = format!("experiment {}", i + 1);
            if e.seeds.is_empty() {
                return Err(HarnessError::Usage(format!("{origin}: no seeds")));
            }
            if e.seeds.iter().collect::<BTreeSet<_>>().len() != e.seeds.len() {
                return Err(HarnessError::Usage(format!(
                    "{origin}: seeds are not distinct"
                )));
            }
            if let Some(key) = e.overrides.keys().find(|k| RESERVED.contains(&k.as_str())) {
                return Err(HarnessError::Usage(format!(
                    "{origin}: `{key}` belongs outside overrides"
                )));
            }
            for &seed in &e.seeds {
                let mut table = e.overrides.clone();
                let fixed = toml::Table::try_from(FixedFields {
                    benchmark: e.benchmark,
                    mode: e.mode,
                    generator: e.generator,
                    predictor: e.predictor,
                    seed,
                })
                .expect("fixed fields serialize");
                table.extend(fixed);
                let config = finalize(config_from_table(table, &origin)?)?;
                let dir = self.out.join(run_name(&config));
                if !dirs.insert(dir.clone()) {
                    return Err(HarnessError::Usage(format!(
                        "{origin}: output directory {} is used twice",
                        dir.display()
                    )));
                }
                jobs.push(Job { config, dir });
            }
        }
        Ok(jobs)
    }
}

#[derive(serde::Serialize)]
struct FixedFields {
    benchmark: Benchmark,
    mode: Mode,
    generator: GeneratorKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    predictor: Option<PredictorKind>,
    seed: u64,
}

/// A directory whose log already reaches the configured budget.
fn is_complete(job: &Job) -> bool {
    read_trials(&job.dir)
        .map(|trials| trials.iter().map(|t| t.hv_trace.len()).sum::<usize>() >= job.config.budget)
        .unwrap_or(false)
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub completed: Vec<PathBuf>,
    pub skipped: Vec<PathBuf>,
    pub failed: Vec<(PathBuf, String)>,
}

/// Runs every job as a child process of `exe`. Complete runs are skipped so
/// an interrupted sweep can be resumed; incomplete ones are rerun from scratch.
pub fn sweep(
    manifest: &Manifest,
    exe: &Path,
    workers: Option<usize>,
) -> Result<SweepReport, HarnessError> {
    let jobs = manifest.jobs()?;
    let workers = workers
        .or(manifest.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let report = Mutex::new(SweepReport::default());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                while let Some(job) = jobs.get(next.fetch_add(1, Ordering::Relaxed)) {
                    let outcome = if is_complete(job) {
                        Ok(false)
                    } else {
                        run_job(manifest, job, exe).map(|_| true)
                    };
                    let mut r = report.lock().expect("report lock");
                    match outcome {
                        Ok(true) => r.completed.push(job.dir.clone()),
                        Ok(false) => r.skipped.push(job.dir.clone()),
                        Err(e) => r.failed.push((job.dir.clone(), e)),
                    }
                }
            });
        }
    });
    let mut report = report.into_inner().expect("report lock");
    report.completed.sort();
    report.skipped.sort();
    report.failed.sort();
    Ok(report)
}

fn run_job(manifest: &Manifest, job: &Job, exe: &Path) -> Result<(), String> {
    std::fs::create_dir_all(&job.dir).map_err(|e| e.to_string())?;
    let config_path = job.dir.join("config.toml");
    let text = toml::to_string(&job.config).map_err(|e| e.to_string())?;
    std::fs::write(&config_path, text).map_err(|e| e.to_string())?;
    let mut cmd = Command::new(exe);
    cmd.arg("run")
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(&job.dir)
        .arg("--exact-out")
        .arg("--overwrite");
    if let Some(t) = &manifest.templates {
        cmd.arg("--templates").arg(t);
    }
    if let Some(p) = &manifest.prices {
        cmd.arg("--prices").arg(p);
    }
    let output = cmd
        .output()
        .map_err(|e| format!("cannot start {}: {e}", exe.display()))?;
    let mut log = output.stdout;
    log.extend_from_slice(&output.stderr);
    std::fs::write(job.dir.join("run.log"), &log).map_err(|e| e.to_string())?;
    if output.status.success() {
        Ok(())
    } else {
        let tail = String::from_utf8_lossy(&output.stderr)
            .lines()
            .last()
            .unwrap_or_default()
            .to_string();
        Err(format!("{} ({tail})", output.status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(text: &str) -> Result<Vec<Job>, HarnessError> {
        let m: Manifest = toml::from_str(text).map_err(|e| HarnessError::Usage(e.to_string()))?;
        m.jobs()
    }

    #[test]
    fn expands_one_job_per_seed() {
        let jobs = manifest(
            r#"
            out = "results"
            [[experiment]]
            benchmark = "dtlz2"
            mode = "mohollm"
            generator = "random"
            predictor = "oracle-mock"
            seeds = [0, 1]
            overrides = { budget = 30 }

            [[experiment]]
            benchmark = "dtlz2"
            mode = "global"
            generator = "random"
            seeds = [0]
            "#,
        )
        .unwrap();
        assert_eq!(jobs.len(), 3);
        assert_eq!(jobs[1].config.seed, 1);
        assert_eq!(jobs[1].config.budget, 30);
        assert_eq!(jobs[2].config.mode, Mode::Global);
        assert!(jobs[0]
            .dir
            .ends_with("dtlz2_mohollm_random_oracle_mock_seed0"));
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = "out = \"r\"\n[[experiment]]\nbenchmark = \"dtlz2\"\nmode = \"mohollm\"\ngenerator = \"random\"\n";
        assert!(manifest(&format!("{base}seeds = [1, 1]\n")).is_err());
        assert!(manifest(&format!("{base}seeds = [1]\noverrides = {{ seed = 3 }}\n")).is_err());
        assert!(manifest(&format!(
            "{base}seeds = [1]\noverrides = {{ nonsense = 3 }}\n"
        ))
        .is_err());
        assert!(manifest(&format!(
            "{base}seeds = [1]\noverrides = {{ budget = 2 }}\n"
        ))
        .is_err());
        let twice = format!("{base}seeds = [1]\n[[experiment]]\nbenchmark = \"dtlz2\"\nmode = \"mohollm\"\ngenerator = \"random\"\nseeds = [1]\n");
        assert!(manifest(&twice).is_err());
    }
}
