//! Post-processing of a run record into the evaluation metrics: throughput,
//! total average delay, application loop delay, camera transmission time,
//! network usage and per-device energy.
//!
//! Everything here is a pure function over an immutable [`RunRecord`];
//! reports for independent runs can be computed in parallel. Wall-clock
//! execution time is host-side information and is attached by the caller.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::app::loop_delay;
use crate::controller::ControllerKind;
use crate::energy::DeviceEnergy;
use crate::record::RunRecord;
use crate::time::SimDuration;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputBucket {
    pub start_s: f64,
    pub cars_per_s: f64,
    pub crossed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBucket {
    pub start_s: f64,
    pub crossed: u64,
    /// Mean delay of vehicles that crossed within this bucket; `None` when
    /// none did.
    pub mean_delay_s: Option<f64>,
}

/// The full metric suite for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub controller: ControllerKind,
    pub roads: usize,
    pub seed: u64,
    pub duration_s: f64,
    /// Host wall-clock seconds around the run; machine-dependent and absent
    /// until attached by the runner.
    pub execution_wall_s: Option<f64>,
    /// Mean application loop delay in seconds.
    pub ald_s: Option<f64>,
    pub loop_sample_count: usize,
    /// Camera transmission time: the configured sensing period, seconds.
    pub ctt_s: f64,
    /// Total network usage in payload units.
    pub ttfu: u64,
    pub total_average_delay_s: Option<f64>,
    pub arrivals: u64,
    pub crossed: u64,
    pub blocked: u64,
    /// Vehicles still queued when the run ended (disclosed, never dropped).
    pub uncrossed: u64,
    pub throughput_cps: f64,
    pub throughput: Vec<ThroughputBucket>,
    pub delay_series: Vec<DelayBucket>,
    pub frames_emitted: u64,
    pub archives_stored: u64,
    pub energy: Vec<DeviceEnergy>,
    pub total_energy: f64,
}

impl MetricsReport {
    pub fn with_wall_time(mut self, wall_s: f64) -> MetricsReport {
        self.execution_wall_s = Some(wall_s);
        self
    }
}

/// Crossings per second, bucketed over the run. Every crossing lands in a
/// bucket, so the bucket counts sum to the total crossed.
pub fn throughput(record: &RunRecord, bucket: SimDuration) -> Vec<ThroughputBucket> {
    debug_assert!(!bucket.is_zero());
    let duration_ms = record.elapsed.as_millis();
    let bucket_ms = bucket.as_millis();
    let n = (duration_ms.div_ceil(bucket_ms)).max(1) as usize;
    let mut counts = alloc::vec![0u64; n];
    for crossing in &record.crossings {
        let idx = ((crossing.crossed_at.as_millis() / bucket_ms) as usize).min(n - 1);
        counts[idx] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &crossed)| {
            let start_ms = i as u64 * bucket_ms;
            let len_ms = bucket_ms.min(duration_ms - start_ms).max(1);
            ThroughputBucket {
                start_s: start_ms as f64 / 1000.0,
                cars_per_s: crossed as f64 / (len_ms as f64 / 1000.0),
                crossed,
            }
        })
        .collect()
}

/// Mean delay of vehicles crossing in each bucket.
pub fn delay_series(record: &RunRecord, bucket: SimDuration) -> Vec<DelayBucket> {
    let duration_ms = record.elapsed.as_millis();
    let bucket_ms = bucket.as_millis();
    let n = (duration_ms.div_ceil(bucket_ms)).max(1) as usize;
    let mut counts = alloc::vec![0u64; n];
    let mut sums = alloc::vec![0u64; n];
    for crossing in &record.crossings {
        let idx = ((crossing.crossed_at.as_millis() / bucket_ms) as usize).min(n - 1);
        counts[idx] += 1;
        sums[idx] += crossing.crossed_at.since(crossing.arrived_at).as_millis();
    }
    (0..n)
        .map(|i| DelayBucket {
            start_s: (i as u64 * bucket_ms) as f64 / 1000.0,
            crossed: counts[i],
            mean_delay_s: if counts[i] > 0 {
                Some(sums[i] as f64 / counts[i] as f64 / 1000.0)
            } else {
                None
            },
        })
        .collect()
}

/// Mean of (crossing time - arrival time) over crossed vehicles, seconds.
/// `None` when no vehicle crossed. The second value is the number of
/// vehicles that never crossed (still queued at run end).
pub fn total_average_delay(record: &RunRecord) -> (Option<f64>, u64) {
    let uncrossed: u64 = record.final_queue_lens.iter().map(|&q| q as u64).sum();
    if record.crossings.is_empty() {
        return (None, uncrossed);
    }
    let total_ms: u64 = record
        .crossings
        .iter()
        .map(|c| c.crossed_at.since(c.arrived_at).as_millis())
        .sum();
    (
        Some(total_ms as f64 / record.crossings.len() as f64 / 1000.0),
        uncrossed,
    )
}

/// Assemble the full report for a completed run.
pub fn report(record: &RunRecord) -> MetricsReport {
    let bucket = record.config.throughput_bucket;
    let samples: Vec<SimDuration> = record.loop_samples.iter().map(|s| s.latency()).collect();
    let ald_ms = loop_delay(&samples);
    let (delay, uncrossed) = total_average_delay(record);
    let energy = record.energy.clone();
    let duration_s = record.elapsed.as_secs_f64();
    MetricsReport {
        controller: record.config.controller.kind(),
        roads: record.config.roads,
        seed: record.config.seed,
        duration_s,
        execution_wall_s: None,
        ald_s: ald_ms.map(|ms| ms / 1000.0),
        loop_sample_count: record.loop_samples.len(),
        ctt_s: record.config.sensor_period.as_secs_f64(),
        ttfu: record.ttfu,
        total_average_delay_s: delay,
        arrivals: record.total_arrivals(),
        crossed: record.total_crossed(),
        blocked: record.total_blocked(),
        uncrossed,
        throughput_cps: record.total_crossed() as f64 / duration_s,
        throughput: throughput(record, bucket),
        delay_series: delay_series(record, bucket),
        frames_emitted: record.frames_emitted,
        archives_stored: record.archives_stored,
        total_energy: energy.iter().map(|e| e.energy).sum(),
        energy,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompareError {
    TooFewRuns,
    MismatchedScenario(String),
}

impl fmt::Display for CompareError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareError::TooFewRuns => write!(f, "a comparison needs at least two runs"),
            CompareError::MismatchedScenario(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub controller: ControllerKind,
    pub total_average_delay_s: Option<f64>,
    pub throughput_cps: f64,
    pub crossed: u64,
    /// How much less delay the baseline controller needs than this row:
    /// `(row - baseline) / row`, in percent. Zero for the baseline itself.
    pub delay_reduction_pct: Option<f64>,
    /// Baseline throughput gain over this row, in percent.
    pub throughput_gain_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub baseline: ControllerKind,
    pub rows: Vec<CompareRow>,
}

/// Side-by-side controller comparison over matched runs. All runs must
/// share the scenario and seed and differ only in the controller; the
/// percentages are relative to the proportional controller's row (or the
/// first run when none is present).
pub fn compare(records: &[&RunRecord]) -> Result<CompareTable, CompareError> {
    if records.len() < 2 {
        return Err(CompareError::TooFewRuns);
    }
    let first = &records[0].config;
    for (i, record) in records.iter().enumerate().skip(1) {
        if record.config.seed != first.seed {
            return Err(CompareError::MismatchedScenario(format!(
                "run {i} uses seed {} but run 0 uses seed {}",
                record.config.seed, first.seed
            )));
        }
        if !record.config.matches_except_controller(first) {
            return Err(CompareError::MismatchedScenario(format!(
                "run {i} does not share run 0's scenario"
            )));
        }
    }
    let reports: Vec<MetricsReport> = records.iter().map(|r| report(r)).collect();
    let baseline_idx = reports
        .iter()
        .position(|r| r.controller == ControllerKind::Itcms)
        .unwrap_or(0);
    let base_delay = reports[baseline_idx].total_average_delay_s;
    let base_tp = reports[baseline_idx].throughput_cps;

    let rows = reports
        .iter()
        .map(|r| CompareRow {
            controller: r.controller,
            total_average_delay_s: r.total_average_delay_s,
            throughput_cps: r.throughput_cps,
            crossed: r.crossed,
            delay_reduction_pct: match (r.total_average_delay_s, base_delay) {
                (Some(own), Some(base)) if own > 0.0 => Some((own - base) / own * 100.0),
                _ => None,
            },
            throughput_gain_pct: if r.throughput_cps > 0.0 {
                Some((base_tp - r.throughput_cps) / r.throughput_cps * 100.0)
            } else {
                None
            },
        })
        .collect();
    Ok(CompareTable {
        baseline: reports[baseline_idx].controller,
        rows,
    })
}
