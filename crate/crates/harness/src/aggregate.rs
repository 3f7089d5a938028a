//! Cross-seed summaries computed from `trials.jsonl` files alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use mohollm::engine::TrialRecord;
use mohollm::sampler::{GeneratorKind, RejectionStats};
use mohollm::surrogate::PredictorKind;
use mohollm::{RunConfig, Usage};

use crate::output::{read_trials, write_json, RejectionReport, TRIALS};
use crate::HarnessError;

/// One run as reconstructed from its log.
#[derive(Debug, Clone)]
pub struct RunLog {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub trials: Vec<TrialRecord>,
}

impl RunLog {
    pub fn load(dir: &Path) -> Result<Self, HarnessError> {
        let trials = read_trials(dir)?;
        let config = trials
            .first()
            .and_then(|t| t.config.clone())
            .ok_or_else(|| {
                HarnessError::Aggregate(format!("{}: first trial carries no config", dir.display()))
            })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config,
            trials,
        })
    }

    /// Reporting hypervolume after each evaluation.
    pub fn hv_curve(&self) -> Vec<f64> {
        self.trials
            .iter()
            .flat_map(|t| t.hv_trace.iter().copied())
            .collect()
    }

    pub fn optimization_trials(&self) -> &[TrialRecord] {
        &self.trials[1..]
    }

    pub fn rejections(&self) -> RejectionStats {
        let mut total = RejectionStats::default();
        for t in &self.trials {
            total += t.rejections;
        }
        total
    }

    pub fn usage(&self) -> Usage {
        self.trials
            .iter()
            .fold(Usage::default(), |acc, t| acc + t.usage)
    }
}

/// Every directory under `roots` (inclusive) that holds a trial log, sorted.
pub fn discover(roots: &[PathBuf]) -> Result<Vec<PathBuf>, HarnessError> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        if dir.join(TRIALS).is_file() {
            out.push(dir.to_path_buf());
            return Ok(());
        }
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        entries.sort();
        for e in entries {
            walk(&e, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    for root in roots {
        walk(root, &mut out)
            .map_err(|e| HarnessError::Aggregate(format!("{}: {e}", root.display())))?;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Mean and two-sided 95% Student-t half-width over `values`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n: usize,
    pub mean: f64,
    pub half_width: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self {
                n,
                mean,
                half_width: 0.0,
                std_error: 0.0,
            };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std_error = (var / n as f64).sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        Self {
            n,
            mean,
            half_width: t * std_error,
            std_error,
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Evaluation count for hypervolume curves, trial index for divergence.
    pub x: usize,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionRow {
    pub avg_total_proposed: f64,
    pub duplicate_rate: f64,
    pub reobserved_rate: f64,
    pub out_of_region_rate: f64,
    pub total_rejection_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageRow {
    pub per_trial_prompt_tokens: Estimate,
    pub per_trial_completion_tokens: Estimate,
    pub per_trial_total_tokens: Estimate,
    pub per_trial_requests: Estimate,
    pub per_trial_cost: Estimate,
    pub total_tokens: Estimate,
    pub total_cost: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub benchmark: String,
    /// Method label: mode, generator, predictor, prompt variant and model.
    pub method: String,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub runs: Vec<PathBuf>,
    /// A single run, so every confidence interval has zero width.
    pub degenerate: bool,
    pub hv: Vec<CurvePoint>,
    pub icl_divergence: Vec<CurvePoint>,
    pub rejections: RejectionRow,
    pub usage: UsageRow,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub groups: Vec<GroupSummary>,
    pub warnings: Vec<String>,
}

/// Serialized enum name, e.g. `oracle-mock`.
fn serde_name<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn method_label(c: &RunConfig) -> String {
    let mut label = format!(
        "{}/{}/{}",
        serde_name(&c.mode),
        serde_name(&c.generator),
        serde_name(&c.predictor)
    );
    if c.generator == GeneratorKind::Llm || c.predictor == PredictorKind::Llm {
        let _ = write!(
            label,
            "/{}/{}",
            c.prompt_variant,
            c.model.as_deref().unwrap_or("default")
        );
    }
    label
}

fn summarize_group(
    benchmark: &str,
    method: &str,
    runs: &[RunLog],
) -> Result<GroupSummary, HarnessError> {
    let budget = runs[0].config.budget;
    if let Some(other) = runs.iter().find(|r| r.config.budget != budget) {
        return Err(HarnessError::Aggregate(format!(
            "{benchmark} {method}: budget {} in {} differs from {budget} in {}",
            other.config.budget,
            other.dir.display(),
            runs[0].dir.display()
        )));
    }
    let curves: Vec<Vec<f64>> = runs.iter().map(RunLog::hv_curve).collect();
    let hv = (1..=budget)
        .map(|e| CurvePoint {
            x: e,
            estimate: Estimate::of(&curves.iter().map(|c| c[e - 1]).collect::<Vec<_>>()),
        })
        .collect();

    let max_trials = runs
        .iter()
        .map(|r| r.optimization_trials().len())
        .max()
        .unwrap_or(0);
    let icl_divergence = (1..=max_trials)
        .filter_map(|t| {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.trials.get(t).and_then(|tr| tr.icl_divergence))
                .collect();
            (!values.is_empty()).then(|| CurvePoint {
                x: t,
                estimate: Estimate::of(&values),
            })
        })
        .collect();

    let reports: Vec<RejectionReport> = runs
        .iter()
        .map(|r| RejectionReport::from(r.rejections()))
        .collect();
    let mean = |f: &dyn Fn(&RejectionReport) -> f64| {
        reports.iter().map(f).sum::<f64>() / reports.len() as f64
    };
    let rejections = RejectionRow {
        avg_total_proposed: mean(&|r| r.counts.proposed as f64),
        duplicate_rate: mean(&|r| r.duplicate_rate),
        reobserved_rate: mean(&|r| r.reobserved_rate),
        out_of_region_rate: mean(&|r| r.out_of_region_rate),
        total_rejection_rate: mean(&|r| r.total_rejection_rate),
    };

    let usages: Vec<(Usage, f64)> = runs
        .iter()
        .map(|r| (r.usage(), r.optimization_trials().len().max(1) as f64))
        .collect();
    let per_trial = |f: &dyn Fn(&Usage) -> f64| {
        Estimate::of(&usages.iter().map(|(u, n)| f(u) / n).collect::<Vec<_>>())
    };
    let total = |f: &dyn Fn(&Usage) -> f64| {
        Estimate::of(&usages.iter().map(|(u, _)| f(u)).collect::<Vec<_>>())
    };
    let usage = UsageRow {
        per_trial_prompt_tokens: per_trial(&|u| u.prompt_tokens as f64),
        per_trial_completion_tokens: per_trial(&|u| u.completion_tokens as f64),
        per_trial_total_tokens: per_trial(&|u| u.total_tokens as f64),
        per_trial_requests: per_trial(&|u| u.requests as f64),
        per_trial_cost: per_trial(&|u| u.cost),
        total_tokens: total(&|u| u.total_tokens as f64),
        total_cost: total(&|u| u.cost),
    };

    Ok(GroupSummary {
        benchmark: benchmark.to_string(),
        method: method.to_string(),
        budget,
        seeds: runs.iter().map(|r| r.config.seed).collect(),
        runs: runs.iter().map(|r| r.dir.clone()).collect(),
        degenerate: runs.len() < 2,
        hv,
        icl_divergence,
        rejections,
        usage,
    })
}

/// Groups runs by benchmark and method. Runs whose log stops short of the
/// budget are skipped with a warning.
pub fn aggregate(dirs: &[PathBuf]) -> Result<Summary, HarnessError> {
    let mut summary = Summary::default();
    let mut groups: BTreeMap<(String, String), Vec<RunLog>> = BTreeMap::new();
    for dir in dirs {
        let log = RunLog::load(dir)?;
        let evaluations = log.hv_curve().len();
        if evaluations < log.config.budget {
            summary.warnings.push(format!(
                "{}: incomplete run ({evaluations} of {} evaluations), skipped",
                dir.display(),
                log.config.budget
            ));
            continue;
        }
        let key = (
            log.config.benchmark.name().to_string(),
            method_label(&log.config),
        );
        groups.entry(key).or_default().push(log);
    }
    for ((benchmark, method), mut runs) in groups {
        runs.sort_by(|a, b| {
            a.config
                .seed
                .cmp(&b.config.seed)
                .then_with(|| a.dir.cmp(&b.dir))
        });
        summary
            .groups
            .push(summarize_group(&benchmark, &method, &runs)?);
    }
    Ok(summary)
}

fn pm(e: &Estimate, digits: usize) -> String {
    format!("{:.digits$} ± {:.digits$}", e.mean, e.std_error)
}

/// Markdown rejection table, one column per method.
pub fn rejection_table(summary: &Summary) -> String {
    let mut out = String::new();
    for (benchmark, groups) in by_benchmark(summary) {
        let _ = writeln!(out, "### {benchmark}\n");
        let _ = writeln!(
            out,
            "| | {} |",
            groups
                .iter()
                .map(|g| g.method.as_str())
                .collect::<Vec<_>>()
                .join(" | ")
        );
        let _ = writeln!(out, "|---|{}", "---|".repeat(groups.len()));
        let row = |name: &str, f: &dyn Fn(&RejectionRow) -> f64, out: &mut String| {
            let cells: Vec<String> = groups
                .iter()
                .map(|g| format!("{:.2}", f(&g.rejections)))
                .collect();
            let _ = writeln!(out, "| {name} | {} |", cells.join(" | "));
        };
        row("Avg. total proposed", &|r| r.avg_total_proposed, &mut out);
        row("Duplicate (%)", &|r| r.duplicate_rate, &mut out);
        row("Re-observed (%)", &|r| r.reobserved_rate, &mut out);
        row("Out of region (%)", &|r| r.out_of_region_rate, &mut out);
        row(
            "Total rejection rate (%)",
            &|r| r.total_rejection_rate,
            &mut out,
        );
        out.push('\n');
    }
    out
}

/// Markdown usage table, mean ± standard error across seeds.
pub fn usage_table(summary: &Summary) -> String {
    let mut out = String::new();
    for (benchmark, groups) in by_benchmark(summary) {
        let _ = writeln!(out, "### {benchmark}\n");
        let _ = writeln!(
            out,
            "| | {} |",
            groups
                .iter()
                .map(|g| g.method.as_str())
                .collect::<Vec<_>>()
                .join(" | ")
        );
        let _ = writeln!(out, "|---|{}", "---|".repeat(groups.len()));
        let row = |name: &str, f: &dyn Fn(&UsageRow) -> String, out: &mut String| {
            let cells: Vec<String> = groups.iter().map(|g| f(&g.usage)).collect();
            let _ = writeln!(out, "| {name} | {} |", cells.join(" | "));
        };
        row(
            "Prompt tokens per trial",
            &|u| pm(&u.per_trial_prompt_tokens, 0),
            &mut out,
        );
        row(
            "Completion tokens per trial",
            &|u| pm(&u.per_trial_completion_tokens, 0),
            &mut out,
        );
        row(
            "Total tokens per trial",
            &|u| pm(&u.per_trial_total_tokens, 0),
            &mut out,
        );
        row(
            "API requests per trial",
            &|u| pm(&u.per_trial_requests, 1),
            &mut out,
        );
        row(
            "Cost per trial (10^-3 $)",
            &|u| {
                let scaled = Estimate {
                    mean: u.per_trial_cost.mean * 1e3,
                    std_error: u.per_trial_cost.std_error * 1e3,
                    ..u.per_trial_cost
                };
                pm(&scaled, 3)
            },
            &mut out,
        );
        row("Total tokens", &|u| pm(&u.total_tokens, 0), &mut out);
        row("Total cost ($)", &|u| pm(&u.total_cost, 5), &mut out);
        out.push('\n');
    }
    out
}

fn by_benchmark(summary: &Summary) -> BTreeMap<&str, Vec<&GroupSummary>> {
    let mut out: BTreeMap<&str, Vec<&GroupSummary>> = BTreeMap::new();
    for g in &summary.groups {
        out.entry(g.benchmark.as_str()).or_default().push(g);
    }
    out
}

/// Writes `summary.json`, `hv_summary.csv`, `icl_summary.csv`,
/// `rejections.md` and `usage.md` into `out`.
pub fn write_summary(summary: &Summary, out: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let path = out.join("summary.json");
    write_json(&path, summary)?;
    written.push(path);
    for (name, pick) in [
        (
            "hv_summary.csv",
            (|g: &GroupSummary| &g.hv) as fn(&GroupSummary) -> &Vec<CurvePoint>,
        ),
        ("icl_summary.csv", |g: &GroupSummary| &g.icl_divergence),
    ] {
        let axis = if name.starts_with("hv") {
            "evaluations"
        } else {
            "trial"
        };
        let mut csv = format!("benchmark,method,{axis},n,mean,ci_low,ci_high\n");
        for g in &summary.groups {
            for p in pick(g) {
                let e = &p.estimate;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    g.benchmark,
                    g.method,
                    p.x,
                    e.n,
                    e.mean,
                    e.lower(),
                    e.upper()
                );
            }
        }
        let path = out.join(name);
        std::fs::write(&path, csv)?;
        written.push(path);
    }
    for (name, text) in [
        ("rejections.md", rejection_table(summary)),
        ("usage.md", usage_table(summary)),
    ] {
        let path = out.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
