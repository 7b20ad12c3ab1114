// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Executes configured runs and turns them into result rows.

use std::time::Instant;

use onlinecolor::adversaries::{
    gen_bias_tree, gen_gadget_farm, gen_list_lb_deterministic, gen_list_lb_randomized,
    gen_random_graph, gen_two_star_bridge, parse_instance, wrap_random_order, BiasTreeConfig,
    BiasTreeReport, Instance, ListLbConfig,
};
use onlinecolor::algorithms::{
    run_list_greedy, run_randomized_greedy, ListChoice, ListGreedyOptions, RandGreedyOptions,
};
use onlinecolor::diagnostics::{compute_scaling_factors, compute_trajectory, Trajectory};
use onlinecolor::{
    derive_params, run_alg1, run_alg2, run_greedy, ArrivalStream, DiagnosticsHooks, Edge, Mode,
    Params, RngHandle, RunResult,
};
use rayon::prelude::*;

use crate::config::{AlgorithmName, ExperimentConfig, InstanceSpec, ListChoiceName};
use crate::exit::{CliError, CliResult};

/// One line of `results.csv`. Optional fields are written as empty cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultRow {
    pub run_id: usize,
    pub seed: u64,
    pub repetition: u32,
    pub axis_value: Option<String>,
    pub instance: String,
    pub algorithm: String,
    pub n: Option<u32>,
    pub delta: u32,
    pub edges: Option<usize>,
    pub eps: Option<f64>,
    pub cap: Option<f64>,
    pub total_colors: u32,
    pub greedy_palette_size: Option<u32>,
    pub max_marked_degree: Option<u32>,
    pub marked: Option<usize>,
    pub failed: bool,
    pub failure_index: Option<usize>,
    pub bad_vertices: Option<usize>,
    pub dangerous_vertices: Option<usize>,
    pub valid: bool,
    pub final_bias: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub run_id: usize,
    pub edge: Edge,
    pub arrival: u32,
    pub identity_error: f64,
    pub bound_excess: f64,
    pub r_excess: f64,
    pub min_s: f64,
}

pub struct RunOutput {
    pub row: ResultRow,
    pub trajectories: Vec<Trajectory>,
    pub scaling: Vec<ScalingRow>,
    pub wall_time: f64,
}

/// A run to execute: one (axis point, seed, repetition) triple.
pub struct Job<'a> {
    pub run_id: usize,
    pub cfg: &'a ExperimentConfig,
    pub axis_value: Option<String>,
    pub seed: u64,
    pub repetition: u32,
}

pub enum Built {
    Stream(ArrivalStream),
    BiasTree(BiasTreeConfig),
}

/// Instance and algorithm randomness are separate streams of the run seed.
pub fn instance_rng(seed: u64, repetition: u32) -> RngHandle {
    RngHandle::with_stream(seed, 2 * u64::from(repetition))
}

fn algorithm_rng(seed: u64, repetition: u32) -> RngHandle {
    RngHandle::with_stream(seed, 2 * u64::from(repetition) + 1)
}

pub fn read_instance_file(path: &std::path::Path) -> CliResult<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn build(cfg: &ExperimentConfig, seed: u64, repetition: u32) -> CliResult<Built> {
    let mut rng = instance_rng(seed, repetition);
    let inst = match &cfg.instance {
        InstanceSpec::File { path } => read_instance_file(path)?,
        InstanceSpec::RandomGraph { n, delta, m } => gen_random_graph(*n, *delta, *m, &mut rng)?,
        InstanceSpec::TwoStar { delta } => {
            check_gadget_delta(*delta)?;
            gen_two_star_bridge(*delta)
        }
        InstanceSpec::GadgetFarm { delta, copies, interleaved } => {
            check_gadget_delta(*delta)?;
            if *copies == 0 {
                return Err(CliError::config("copies must be at least 1"));
            }
            gen_gadget_farm(*delta, *copies, *interleaved)
        }
        InstanceSpec::ListLbDeterministic { delta } => {
            check_gadget_delta(*delta)?;
            return Ok(Built::Stream(gen_list_lb_deterministic(*delta).into()));
        }
        InstanceSpec::ListLbRandomized { delta, copies, star_palette_size } => {
            check_gadget_delta(*delta)?;
            let mut lb = ListLbConfig::new(*delta, *copies);
            if let Some(s) = star_palette_size {
                lb.star_palette_size = *s;
            }
            if lb.copies == 0 || lb.star_palette_size == 0 {
                return Err(CliError::config("copies and star_palette_size must be positive"));
            }
            gen_list_lb_randomized(lb, &mut rng)
        }
        InstanceSpec::BiasTree { delta, palette_ratio, layers, pool_size, max_attempts_per_slot } => {
            let mut bt = BiasTreeConfig::new(
                *delta,
                *palette_ratio,
                *layers,
                *pool_size,
                seed.wrapping_add(u64::from(repetition).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            if let Some(a) = max_attempts_per_slot {
                bt.max_attempts_per_slot = *a;
            }
            return Ok(Built::BiasTree(bt));
        }
    };
    inst.audit()?;
    let inst = if cfg.random_order { wrap_random_order(&inst, &mut rng) } else { inst };
    Ok(Built::Stream(inst.into()))
}

fn check_gadget_delta(delta: u32) -> CliResult<()> {
    if delta < 2 {
        return Err(CliError::config("gadget generators need delta >= 2"));
    }
    Ok(())
}

pub fn algorithm_of(cfg: &ExperimentConfig) -> CliResult<AlgorithmName> {
    cfg.algorithm.ok_or_else(|| CliError::config("`algorithm` is required"))
}

pub fn params_for(cfg: &ExperimentConfig, alg: AlgorithmName, n: u32, delta: u32) -> CliResult<Params> {
    let mode = if alg == AlgorithmName::Alg2 { Mode::Oblivious } else { Mode::Adaptive };
    Ok(derive_params(n, delta, mode, &cfg.params)?)
}

fn tracked(edges: &[Edge], k: usize) -> Vec<Edge> {
    if edges.is_empty() || k == 0 {
        return Vec::new();
    }
    let k = k.min(edges.len());
    (0..k).map(|i| edges[(i + 1) * edges.len() / k - 1]).collect()
}

pub fn execute(job: &Job<'_>) -> CliResult<RunOutput> {
    let cfg = job.cfg;
    let start = Instant::now();
    let mut row = ResultRow {
        run_id: job.run_id,
        seed: job.seed,
        repetition: job.repetition,
        axis_value: job.axis_value.clone(),
        instance: cfg.instance.describe(),
        ..Default::default()
    };
    let stream = match build(cfg, job.seed, job.repetition)? {
        Built::BiasTree(bt) => {
            let report = gen_bias_tree(&bt)?;
            fill_bias_row(&mut row, &report);
            return Ok(RunOutput {
                row,
                trajectories: Vec::new(),
                scaling: Vec::new(),
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        Built::Stream(s) => s,
    };
    let alg = algorithm_of(cfg)?;
    let (n, delta) = (stream.n(), stream.delta());
    let mut rng = algorithm_rng(job.seed, job.repetition);
    let diag = &cfg.diagnostics;
    let wants_table = diag.trajectories || diag.scaling;
    if wants_table && !matches!(alg, AlgorithmName::Alg1 | AlgorithmName::Alg2) {
        return Err(CliError::config("trajectories and scaling need alg1 or alg2"));
    }
    let hooks = wants_table.then(DiagnosticsHooks::retain);
    let mut params = None;
    let r: RunResult = match alg {
        AlgorithmName::Greedy => run_greedy(stream)?,
        AlgorithmName::Randgreedy => {
            let palette = cfg.palette_size.unwrap_or((2 * delta).saturating_sub(1).max(1));
            let opts = RandGreedyOptions { continue_after_failure: cfg.continue_after_failure };
            run_randomized_greedy(stream, palette, &mut rng, opts)?
        }
        AlgorithmName::Alg1 | AlgorithmName::Alg2 => {
            let p = params_for(cfg, alg, n, delta)?;
            params = Some(p);
            if alg == AlgorithmName::Alg1 {
                run_alg1(stream, &p, &mut rng, hooks.as_ref())?
            } else {
                run_alg2(stream, &p, &mut rng, hooks.as_ref())?
            }
        }
        AlgorithmName::Listgreedy => {
            let choice = match cfg.list_choice {
                ListChoiceName::Uniform => ListChoice::Uniform,
                ListChoiceName::FirstFit => ListChoice::FirstFit,
            };
            let opts = ListGreedyOptions { choice, continue_after_failure: cfg.continue_after_failure };
            run_list_greedy(stream, &mut rng, opts)?
        }
    };
    let m = &r.metrics;
    row.algorithm = alg.as_str().to_string();
    row.n = Some(n);
    row.delta = delta;
    row.edges = Some(m.edges);
    row.eps = params.map(|p| p.eps);
    row.cap = params.map(|p| p.cap);
    row.total_colors = m.total_colors;
    row.greedy_palette_size = Some(m.greedy_palette_size);
    row.max_marked_degree = Some(m.max_marked_degree);
    row.marked = Some(m.marked_count);
    row.failed = r.failed();
    row.failure_index = r.failure().map(|f| f.index);
    if alg == AlgorithmName::Alg2 {
        row.bad_vertices = Some(m.bad_vertex_count);
        row.dangerous_vertices = Some(m.dangerous_vertex_count);
    }
    row.valid = r.validate().is_empty() && r.palette_violations().is_empty();

    let edges = tracked(&r.edges(), diag.tracked_edges);
    let mut trajectories = Vec::new();
    if diag.trajectories {
        for &e in &edges {
            trajectories.push(compute_trajectory(&r, e, diag.colors.as_deref())?);
        }
    }
    let mut scaling = Vec::new();
    if diag.scaling {
        for &e in &edges {
            let sf = compute_scaling_factors(&r, e)?;
            scaling.push(ScalingRow {
                run_id: job.run_id,
                edge: e,
                arrival: sf.arrival,
                identity_error: sf.identity_error,
                bound_excess: sf.bound_excess,
                r_excess: sf.r_excess,
                min_s: sf.s.iter().copied().fold(1.0, f64::min),
            });
        }
    }
    Ok(RunOutput { row, trajectories, scaling, wall_time: start.elapsed().as_secs_f64() })
}

fn fill_bias_row(row: &mut ResultRow, report: &BiasTreeReport) {
    row.algorithm = "randgreedy".into();
    row.delta = report.config.delta;
    row.total_colors = report.palette_size;
    row.failed = report.any_failure();
    row.valid = true;
    row.final_bias = report.layers.last().map(|l| l.mean_bias);
}

/// Runs every job on a pool of `jobs` threads; outputs keep job order.
pub fn execute_all(jobs: &[Job<'_>], threads: usize) -> CliResult<Vec<RunOutput>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| jobs.par_iter().map(execute).collect())
}
