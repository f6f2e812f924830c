//! The four subcommands. Each checks its paths, computes, then writes all
//! files from this thread.

use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};
use quatl1::{
    is_perfect, l1_minimize, sweep, CellSummary, NormOrder, RecoveryInstance, SolveStatus, SweepRequest,
    TrialResult, TrialSpec,
};

use crate::config::{Command, RunConfig};
use crate::io;
use crate::svg;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QUATL1_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot size the thread pool")?;
    Ok(())
}

pub fn run(cfg: &RunConfig, report: &mut dyn Write) -> Result<()> {
    match cfg.command {
        Command::Recover => cmd_recover(cfg, report),
        Command::Demo => cmd_demo(cfg, report),
        Command::Sweep => cmd_sweep(cfg, report),
        Command::Plot => cmd_plot(cfg, report),
    }
}

fn input(cfg: &RunConfig) -> Result<&std::path::Path> {
    let path = cfg.input_path.as_deref().context("missing --in")?;
    io::check_readable(path)?;
    Ok(path)
}

pub fn cmd_recover(cfg: &RunConfig, report: &mut dyn Write) -> Result<()> {
    let input = input(cfg)?;
    io::check_writable(&cfg.output_path)?;
    let (a, y) = io::read_instance(input)?;
    let res = l1_minimize(&a, &y, &cfg.solver)?;
    writeln!(report, "instance: n={} m={} from {}", a.rows(), a.cols(), input.display())?;
    writeln!(report, "status: {} ({} iterations)", res.solver_status.as_str(), res.solution.iterations)?;
    writeln!(report, "objective: {}", io::real(res.objective))?;
    writeln!(report, "nonzero entries: {}", res.x_recovered.count_nonzero())?;
    writeln!(report, "solve time: {:.3} ms", res.solve_time.as_secs_f64() * 1e3)?;
    io::write_vector(&cfg.output_path, &res.x_recovered)?;
    writeln!(report, "wrote {}", cfg.output_path.display())?;
    Ok(())
}

pub fn cmd_demo(cfg: &RunConfig, report: &mut dyn Write) -> Result<()> {
    io::check_writable(&cfg.output_path)?;
    if let Some(path) = &cfg.instance_out {
        io::check_writable(path)?;
    }
    let spec = TrialSpec::new(cfg.m, cfg.n, cfg.s, cfg.base_seed)?;
    let inst = RecoveryInstance::generate(spec)?;
    let mut res = l1_minimize(&inst.a, &inst.y, &cfg.solver)?;
    let error = res.attach_truth(&inst.x)?;
    let perfect = res.solver_status == SolveStatus::Optimal && is_perfect(error);

    writeln!(report, "m={} n={} s={} seed={}", cfg.m, cfg.n, cfg.s, cfg.base_seed)?;
    writeln!(report, "status: {} ({} iterations)", res.solver_status.as_str(), res.solution.iterations)?;
    writeln!(report, "objective: {}  (planted l1 norm {})", io::real(res.objective), io::real(inst.x.norm(NormOrder::L1)))?;
    writeln!(report, "error_l2: {}", io::real(error))?;
    writeln!(report, "perfect: {perfect}")?;
    writeln!(report, "solve time: {:.3} ms", res.solve_time.as_secs_f64() * 1e3)?;

    io::write_signals(&cfg.output_path, &inst.x, &res.x_recovered)?;
    writeln!(report, "wrote {}", cfg.output_path.display())?;
    if let Some(path) = &cfg.instance_out {
        io::write_instance(path, &inst.a, &inst.y)?;
        writeln!(report, "wrote {}", path.display())?;
    }
    Ok(())
}

/// Requests run by a sweep. An explicit s-list gives one rectangular grid;
/// otherwise each n gets its own row with `s = 1..=n`.
pub fn sweep_requests(cfg: &RunConfig) -> Result<Vec<SweepRequest>> {
    match &cfg.s_list {
        Some(s_list) => Ok(vec![SweepRequest::new(cfg.m, cfg.n_list.clone(), s_list.clone(), cfg.trials, cfg.base_seed)?]),
        None => {
            let mut n_list = cfg.n_list.clone();
            n_list.sort_unstable();
            n_list.dedup();
            n_list
                .into_iter()
                .map(|n| Ok(SweepRequest::new(cfg.m, vec![n], (1..=n).collect(), cfg.trials, cfg.base_seed)?))
                .collect()
        }
    }
}

pub fn cmd_sweep(cfg: &RunConfig, report: &mut dyn Write) -> Result<()> {
    let requests = sweep_requests(cfg)?;
    cfg.solver.validate()?;
    io::check_writable(&cfg.output_path)?;
    if let Some(path) = &cfg.trials_out {
        io::check_writable(path)?;
    }

    let start = Instant::now();
    let mut cells: Vec<CellSummary> = Vec::new();
    let mut trials: Vec<TrialResult> = Vec::new();
    for req in &requests {
        let grid = sweep(req, &cfg.solver)?;
        for &n in &grid.n_values {
            let row: Vec<&CellSummary> = grid.cells.iter().filter(|c| c.n == n).collect();
            let perfect: usize = row.iter().map(|c| c.successes).sum();
            writeln!(
                report,
                "n={n}: {} cells, {perfect}/{} trials perfect",
                row.len(),
                row.len() * grid.trials_per_cell
            )?;
        }
        cells.extend(grid.cells);
        trials.extend(grid.trials);
    }
    writeln!(report, "{} cells in {:.1} s", cells.len(), start.elapsed().as_secs_f64())?;

    io::write_sweep(&cfg.output_path, cfg.m, &cells)?;
    writeln!(report, "wrote {}", cfg.output_path.display())?;
    if let Some(path) = &cfg.trials_out {
        io::write_trials(path, &trials, cfg.trials)?;
        writeln!(report, "wrote {}", path.display())?;
    }
    Ok(())
}

pub fn cmd_plot(cfg: &RunConfig, report: &mut dyn Write) -> Result<()> {
    let input = input(cfg)?;
    io::check_writable(&cfg.output_path)?;
    let (m, cells) = io::read_sweep(input)?;
    let doc = svg::render_heatmap(&cells, m);
    std::fs::write(&cfg.output_path, doc).with_context(|| format!("cannot write {}", cfg.output_path.display()))?;
    writeln!(report, "{} cells from {}", cells.len(), input.display())?;
    writeln!(report, "wrote {}", cfg.output_path.display())?;
    Ok(())
}
