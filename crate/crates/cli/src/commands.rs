//! The run, compare and sweep commands.

use std::path::Path;
use std::time::Instant;

use fogsim_core::config::{ControllerConfig, ScenarioConfig};
use fogsim_core::controller::ControllerKind;
use fogsim_core::metrics;
use fogsim_core::record::RunRecord;
use fogsim_core::sim::{BuildError, Simulation};

use crate::config_file::ScenarioFile;
use crate::output;
use crate::CliError;

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        // everything a build can reject is a configuration problem
        CliError::Config(e.to_string())
    }
}

struct FinishedRun {
    record: RunRecord,
    wall_s: f64,
}

fn execute(config: ScenarioConfig) -> Result<FinishedRun, CliError> {
    let sim = Simulation::new(config)?;
    let start = Instant::now();
    let record = sim.run();
    Ok(FinishedRun {
        record,
        wall_s: start.elapsed().as_secs_f64(),
    })
}

/// Run each config on its own thread and collect results in input order.
fn execute_all(configs: Vec<ScenarioConfig>) -> Result<Vec<FinishedRun>, CliError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .into_iter()
            .map(|config| scope.spawn(move || execute(config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

fn write_run_outputs(dir: &Path, run: &FinishedRun) -> Result<(), CliError> {
    output::ensure_dir(dir)?;
    let report = metrics::report(&run.record);
    output::write_summary(dir, &report)?;
    output::write_throughput(dir, &report)?;
    output::write_delay(dir, &report)?;
    output::write_energy(dir, &report)?;
    output::write_run_info(dir, run.wall_s, run.record.events_dispatched)?;
    let echo = ScenarioFile::full(&run.record.config).to_json_pretty();
    std::fs::write(dir.join("config.json"), format!("{echo}\n"))
        .map_err(|e| CliError::Runtime(format!("cannot write config echo: {e}")))?;
    Ok(())
}

pub fn run(config: ScenarioConfig, out: &Path) -> Result<(), CliError> {
    let run = execute(config)?;
    write_run_outputs(out, &run)?;
    let report = metrics::report(&run.record).with_wall_time(run.wall_s);
    output::print_report(&report);
    println!("outputs written to {}", out.display());
    Ok(())
}

/// Resolve the controller config for a kind: keep the base parameters when
/// the kind matches, otherwise use that kind's defaults.
pub fn controller_for(base: &ScenarioConfig, kind: ControllerKind) -> ControllerConfig {
    if base.controller.kind() == kind {
        base.controller.clone()
    } else {
        ControllerConfig::default_for(kind)
    }
}

pub fn compare(
    base: ScenarioConfig,
    controllers: &[ControllerKind],
    out: &Path,
) -> Result<(), CliError> {
    if controllers.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two controllers".into(),
        ));
    }
    let configs: Vec<ScenarioConfig> = controllers
        .iter()
        .map(|&kind| ScenarioConfig {
            controller: controller_for(&base, kind),
            ..base.clone()
        })
        .collect();
    let runs = execute_all(configs)?;

    output::ensure_dir(out)?;
    for (kind, run) in controllers.iter().zip(&runs) {
        write_run_outputs(&out.join(kind.as_str()), run)?;
    }
    let records: Vec<&RunRecord> = runs.iter().map(|r| &r.record).collect();
    let table = metrics::compare(&records).map_err(|e| CliError::Config(e.to_string()))?;
    output::write_compare(out, &table)?;

    println!("baseline: {}", table.baseline);
    for row in &table.rows {
        println!(
            "{:<6} delay {:>10} s  throughput {:.6} cars/s  ({} crossed)",
            row.controller.to_string(),
            row.total_average_delay_s
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "n/a".into()),
            row.throughput_cps,
            row.crossed,
        );
    }
    println!("outputs written to {}", out.display());
    Ok(())
}

pub fn sweep(base: ScenarioConfig, nodes: &[usize], out: &Path) -> Result<(), CliError> {
    if nodes.is_empty() {
        return Err(CliError::Config(
            "sweep needs at least one node count".into(),
        ));
    }
    if let Some(bad) = nodes.iter().find(|&&n| n == 0) {
        return Err(CliError::Config(format!(
            "sweep node counts must be at least 1, got {bad}"
        )));
    }
    let configs: Vec<ScenarioConfig> = nodes
        .iter()
        .map(|&n| ScenarioConfig {
            roads: n,
            ..base.clone()
        })
        .collect();
    let runs = execute_all(configs)?;

    output::ensure_dir(out)?;
    let mut rows = Vec::new();
    for (&n, run) in nodes.iter().zip(&runs) {
        write_run_outputs(&out.join(format!("nodes-{n}")), run)?;
        let report = metrics::report(&run.record);
        rows.push(output::SweepRow {
            nofn: n,
            et_s: run.wall_s,
            ald_s: report.ald_s,
            ctt_s: report.ctt_s,
            ttfu: report.ttfu,
            crossed: report.crossed,
            total_average_delay_s: report.total_average_delay_s,
        });
    }
    output::write_sweep(out, &rows)?;

    println!(
        "{:>5} {:>10} {:>10} {:>6} {:>10}",
        "NoFN", "ET", "ALD", "CTT", "TTFU"
    );
    for row in &rows {
        println!(
            "{:>5} {:>10.3} {:>10} {:>6.1} {:>10}",
            row.nofn,
            row.et_s,
            row.ald_s.map(|v| format!("{v:.4}")).unwrap_or_default(),
            row.ctt_s,
            row.ttfu
        );
    }
    println!("outputs written to {}", out.display());
    Ok(())
}
