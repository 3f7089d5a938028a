//! Per-run output directory: `trials.jsonl`, `hv_trajectory.csv`,
//! `usage.json` and `rejections.json`.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mohollm::engine::{run, Components, RecordSink, TrialRecord};
use mohollm::sampler::RejectionStats;
use mohollm::{Exec, RunConfig, RunRecord, Usage};

use crate::config::Wiring;
use crate::HarnessError;

pub const TRIALS: &str = "trials.jsonl";
pub const TRAJECTORY: &str = "hv_trajectory.csv";
pub const USAGE: &str = "usage.json";
pub const REJECTIONS: &str = "rejections.json";

/// Rejection totals with rates as percentages of proposals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionReport {
    #[serde(flatten)]
    pub counts: RejectionStats,
    pub accepted: usize,
    pub duplicate_rate: f64,
    pub reobserved_rate: f64,
    pub out_of_region_rate: f64,
    pub total_rejection_rate: f64,
}

impl From<RejectionStats> for RejectionReport {
    fn from(s: RejectionStats) -> Self {
        let pct = |n: usize| {
            if s.proposed == 0 {
                0.0
            } else {
                100.0 * n as f64 / s.proposed as f64
            }
        };
        Self {
            counts: s,
            accepted: s.accepted(),
            duplicate_rate: pct(s.duplicate),
            reobserved_rate: pct(s.reobserved),
            out_of_region_rate: pct(s.out_of_region),
            total_rejection_rate: pct(s.duplicate + s.reobserved + s.out_of_region),
        }
    }
}

/// Appends each trial to the log files and flushes, so a crash loses at
/// most the trial in flight.
pub struct RunWriter {
    dir: PathBuf,
    trials: BufWriter<File>,
    trajectory: BufWriter<File>,
    evaluations: usize,
    usage: Usage,
    rejections: RejectionStats,
}

impl RunWriter {
    pub fn create(dir: &Path, overwrite: bool) -> Result<Self, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let trials_path = dir.join(TRIALS);
        if trials_path.exists() && !overwrite {
            return Err(HarnessError::Usage(format!(
                "{} already holds a run; pass --overwrite to replace it",
                dir.display()
            )));
        }
        let open = |name: &str| -> Result<BufWriter<File>, HarnessError> {
            Ok(BufWriter::new(
                OpenOptions::new()
                    .create(true)
                    .write(true)
                    .truncate(true)
                    .open(dir.join(name))?,
            ))
        };
        let trials = open(TRIALS)?;
        let mut trajectory = open(TRAJECTORY)?;
        writeln!(trajectory, "evaluations,hv")?;
        trajectory.flush()?;
        Ok(Self {
            dir: dir.to_path_buf(),
            trials,
            trajectory,
            evaluations: 0,
            usage: Usage::default(),
            rejections: RejectionStats::default(),
        })
    }

    fn append(&mut self, trial: &TrialRecord) -> std::io::Result<()> {
        serde_json::to_writer(&mut self.trials, trial)?;
        self.trials.write_all(b"\n")?;
        self.trials.flush()?;
        for hv in &trial.hv_trace {
            self.evaluations += 1;
            writeln!(self.trajectory, "{},{}", self.evaluations, hv)?;
        }
        self.trajectory.flush()?;
        self.usage += trial.usage;
        self.rejections += trial.rejections;
        Ok(())
    }

    /// Writes the run totals; called after success and after failure.
    pub fn finish(&mut self) -> Result<(), HarnessError> {
        write_json(&self.dir.join(USAGE), &self.usage)?;
        write_json(
            &self.dir.join(REJECTIONS),
            &RejectionReport::from(self.rejections),
        )?;
        Ok(())
    }
}

impl RecordSink for RunWriter {
    fn record(&mut self, trial: &TrialRecord) -> mohollm::Result<()> {
        self.append(trial)
            .map_err(|e| mohollm::Error::Sink(e.to_string()))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs `config` and writes its outputs into `dir`. Outputs of completed
/// trials survive a failed run.
pub fn execute(
    config: &RunConfig,
    wiring: &Wiring,
    exec: Exec,
    dir: &Path,
    overwrite: bool,
) -> Result<RunRecord, HarnessError> {
    let mut writer = RunWriter::create(dir, overwrite)?;
    let components = Components {
        generator: wiring.generator.as_ref(),
        predictor: wiring.predictor.as_deref(),
        exec,
    };
    let outcome = run(config, components, &mut writer);
    writer.finish()?;
    outcome.map_err(|e| HarnessError::Run(e.to_string()))
}

/// Trial records of a run directory, in file order.
pub fn read_trials(dir: &Path) -> Result<Vec<TrialRecord>, HarnessError> {
    let path = dir.join(TRIALS);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| HarnessError::Aggregate(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                HarnessError::Aggregate(format!("{} line {}: {e}", path.display(), i + 1))
            })
        })
        .collect()
}
