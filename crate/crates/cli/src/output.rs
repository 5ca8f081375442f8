//! CSV and console output.
//!
//! One file per metric family, UTF-8 with a header row. All CSV content is
//! derived from the simulation record only, so re-running a scenario with
//! the same seed reproduces every file byte for byte. Host wall-clock time
//! is machine-dependent and goes to `run_info.json` (and, mirroring the
//! usual results-table shape, into `sweep.csv`), never into the
//! reproducible per-run CSVs.

use std::fs;
use std::io::Write;
use std::path::Path;

use fogsim_core::metrics::{CompareTable, MetricsReport};

use crate::CliError;

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => String::new(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write '{}': {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create '{}': {e}", dir.display())))
}

/// summary.csv: the headline scalars of one run.
pub fn write_summary(dir: &Path, report: &MetricsReport) -> Result<(), CliError> {
    let mut out = String::from(
        "controller,roads,seed,duration_s,ald_s,loop_samples,ctt_s,ttfu,total_average_delay_s,arrivals,crossed,blocked,uncrossed,throughput_cps,frames_emitted,archives_stored,total_energy\n",
    );
    out.push_str(&format!(
        "{},{},{},{:.3},{},{},{:.3},{},{},{},{},{},{},{:.6},{},{},{:.3}\n",
        report.controller,
        report.roads,
        report.seed,
        report.duration_s,
        fmt_opt(report.ald_s, 6),
        report.loop_sample_count,
        report.ctt_s,
        report.ttfu,
        fmt_opt(report.total_average_delay_s, 3),
        report.arrivals,
        report.crossed,
        report.blocked,
        report.uncrossed,
        report.throughput_cps,
        report.frames_emitted,
        report.archives_stored,
        report.total_energy,
    ));
    write_file(&dir.join("summary.csv"), &out)
}

/// throughput.csv: crossings per second per bucket.
pub fn write_throughput(dir: &Path, report: &MetricsReport) -> Result<(), CliError> {
    let mut out = String::from("bucket_start,cars_per_sec\n");
    for bucket in &report.throughput {
        out.push_str(&format!("{:.3},{:.6}\n", bucket.start_s, bucket.cars_per_s));
    }
    write_file(&dir.join("throughput.csv"), &out)
}

/// delay.csv: mean delay of vehicles crossing in each bucket.
pub fn write_delay(dir: &Path, report: &MetricsReport) -> Result<(), CliError> {
    let mut out = String::from("bucket_start,mean_delay_s,crossed\n");
    for bucket in &report.delay_series {
        out.push_str(&format!(
            "{:.3},{},{}\n",
            bucket.start_s,
            fmt_opt(bucket.mean_delay_s, 3),
            bucket.crossed
        ));
    }
    write_file(&dir.join("delay.csv"), &out)
}

/// energy.csv: per-device busy/idle/utilization/energy/cost.
pub fn write_energy(dir: &Path, report: &MetricsReport) -> Result<(), CliError> {
    let mut out = String::from("device,level,busy_s,idle_s,utilization,energy,cost\n");
    for row in &report.energy {
        out.push_str(&format!(
            "{},{},{:.3},{:.3},{:.6},{:.3},{:.3}\n",
            row.device, row.level, row.busy_s, row.idle_s, row.utilization, row.energy, row.cost
        ));
    }
    write_file(&dir.join("energy.csv"), &out)
}

/// compare.csv: side-by-side controllers with percentages relative to the
/// baseline row.
pub fn write_compare(dir: &Path, table: &CompareTable) -> Result<(), CliError> {
    let mut out = String::from(
        "controller,total_average_delay_s,throughput_cps,crossed,delay_reduction_pct,throughput_gain_pct\n",
    );
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{:.6},{},{},{}\n",
            row.controller,
            fmt_opt(row.total_average_delay_s, 3),
            row.throughput_cps,
            row.crossed,
            fmt_opt(row.delay_reduction_pct, 2),
            fmt_opt(row.throughput_gain_pct, 2),
        ));
    }
    write_file(&dir.join("compare.csv"), &out)
}

pub struct SweepRow {
    pub nofn: usize,
    pub et_s: f64,
    pub ald_s: Option<f64>,
    pub ctt_s: f64,
    pub ttfu: u64,
    pub crossed: u64,
    pub total_average_delay_s: Option<f64>,
}

/// sweep.csv: one row per fog-node count. ET is host wall-clock and is the
/// one machine-dependent column in any CSV.
pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut out = String::from("NoFN,ET,ALD,CTT,TTFU,crossed,total_average_delay_s\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.3},{},{:.3},{},{},{}\n",
            row.nofn,
            row.et_s,
            fmt_opt(row.ald_s, 6),
            row.ctt_s,
            row.ttfu,
            row.crossed,
            fmt_opt(row.total_average_delay_s, 3),
        ));
    }
    write_file(&dir.join("sweep.csv"), &out)
}

/// run_info.json: machine-dependent facts about the host execution.
pub fn write_run_info(dir: &Path, wall_s: f64, events: u64) -> Result<(), CliError> {
    let info = serde_json::json!({
        "execution_wall_s": wall_s,
        "events_dispatched": events,
    });
    write_file(
        &dir.join("run_info.json"),
        &format!("{}\n", serde_json::to_string_pretty(&info).expect("json")),
    )
}

pub fn print_report(report: &MetricsReport) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "controller            {}", report.controller);
    let _ = writeln!(out, "roads / fog nodes     {}", report.roads);
    let _ = writeln!(out, "seed                  {}", report.seed);
    let _ = writeln!(out, "simulated duration    {:.1} s", report.duration_s);
    if let Some(wall) = report.execution_wall_s {
        let _ = writeln!(out, "execution time (ET)   {wall:.3} s wall-clock");
    }
    let _ = writeln!(
        out,
        "loop delay (ALD)      {}",
        match report.ald_s {
            Some(v) => format!("{v:.6} s over {} samples", report.loop_sample_count),
            None => String::from("no data"),
        }
    );
    let _ = writeln!(out, "camera period (CTT)   {:.1} s", report.ctt_s);
    let _ = writeln!(out, "network usage (TTFU)  {}", report.ttfu);
    let _ = writeln!(
        out,
        "total average delay   {}",
        match report.total_average_delay_s {
            Some(v) => format!("{v:.3} s over {} crossed", report.crossed),
            None => String::from("no data"),
        }
    );
    let _ = writeln!(
        out,
        "vehicles              {} arrived, {} crossed, {} queued at end, {} blocked",
        report.arrivals, report.crossed, report.uncrossed, report.blocked
    );
    let _ = writeln!(
        out,
        "throughput            {:.6} cars/s",
        report.throughput_cps
    );
    let _ = writeln!(out, "total energy          {:.3}", report.total_energy);
}
