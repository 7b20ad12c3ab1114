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

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use onlinecolor::adversaries::Instance;
use onlinecolor::diagnostics::{enumerate_exact, EnumAlgorithm, EnumOptions};
use onlinecolor::{validate_coloring, ArrivalStream, ColorRef, ColoringState, Edge, Palette};
use serde_json::{json, Value};

use crate::config::{parse_config, resolve_seeds, set_path, AlgorithmName, ExperimentConfig, SweepAxis};
use crate::exit::{CliError, CliResult};
use crate::experiment::{algorithm_of, build, execute_all, params_for, read_instance_file, Built, Job};
use crate::output;

pub struct Options {
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub timings: bool,
}

impl Options {
    fn out_dir(&self) -> CliResult<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }
}

fn jobs_for<'a>(cfg: &'a ExperimentConfig, axis: Option<&str>, first_id: usize) -> CliResult<Vec<Job<'a>>> {
    let seeds = resolve_seeds(cfg)?;
    let mut jobs = Vec::new();
    for &seed in &seeds {
        for repetition in 0..cfg.repetitions {
            jobs.push(Job {
                run_id: first_id + jobs.len(),
                cfg,
                axis_value: axis.map(str::to_string),
                seed,
                repetition,
            });
        }
    }
    Ok(jobs)
}

fn finish(dir: &Path, outputs: &[crate::experiment::RunOutput], opts: &Options) -> CliResult<()> {
    output::write_results(dir, outputs)?;
    output::write_diagnostics(dir, outputs)?;
    if opts.timings {
        output::write_timings(dir, outputs)?;
    }
    let invalid: Vec<usize> = outputs.iter().filter(|o| !o.row.valid).map(|o| o.row.run_id).collect();
    let failed = outputs.iter().filter(|o| o.row.failed).count();
    eprintln!("{} runs, {failed} with a coloring failure, {} invalid", outputs.len(), invalid.len());
    if invalid.is_empty() {
        Ok(())
    } else {
        Err(CliError::validity(format!("invalid colorings in runs {invalid:?}")))
    }
}

pub fn cmd_run(raw: Value, opts: &Options) -> CliResult<()> {
    let cfg = parse_config(raw)?;
    if cfg.sweep.is_some() {
        return Err(CliError::config("config has a `sweep` axis; use the sweep command"));
    }
    let jobs = jobs_for(&cfg, None, 0)?;
    let outputs = execute_all(&jobs, opts.jobs)?;
    finish(&opts.out_dir()?, &outputs, opts)
}

pub fn cmd_sweep(mut raw: Value, opts: &Options) -> CliResult<()> {
    let axis: SweepAxis = match raw.as_object_mut().and_then(|o| o.remove("sweep")) {
        Some(v) => serde_json::from_value(v).map_err(|e| CliError::config(format!("sweep: {e}")))?,
        None => return Err(CliError::config("sweep needs a `sweep` axis in the config")),
    };
    let points = axis.points()?;
    if points.is_empty() {
        return Err(CliError::config(format!("sweep axis `{}` is empty", axis.key)));
    }
    let mut configs = Vec::new();
    for p in &points {
        let mut point = raw.clone();
        set_path(&mut point, &axis.key, p.clone())?;
        configs.push((p.to_string(), parse_config(point)?));
    }
    let mut jobs = Vec::new();
    for (label, cfg) in &configs {
        let next = jobs_for(cfg, Some(label), jobs.len())?;
        jobs.extend(next);
    }
    let outputs = execute_all(&jobs, opts.jobs)?;
    let dir = opts.out_dir()?;
    let groups: Vec<(String, Vec<&crate::experiment::ResultRow>)> = configs
        .iter()
        .map(|(label, _)| {
            let rows = outputs
                .iter()
                .map(|o| &o.row)
                .filter(|r| r.axis_value.as_deref() == Some(label))
                .collect();
            (label.clone(), rows)
        })
        .collect();
    output::write_summary(&dir, &axis.key, &groups)?;
    finish(&dir, &outputs, opts)
}

fn oblivious_instance(cfg: &ExperimentConfig) -> CliResult<Instance> {
    let seed = cfg.seeds.as_ref().and_then(|s| s.expand().first().copied()).unwrap_or(0);
    match build(cfg, seed, 0)? {
        Built::Stream(ArrivalStream::Oblivious(inst)) => Ok(inst),
        _ => Err(CliError::config("this command needs a fixed (oblivious) instance")),
    }
}

pub fn cmd_enumerate(raw: Value, opts: &Options) -> CliResult<()> {
    let cfg = parse_config(raw)?;
    let inst = oblivious_instance(&cfg)?;
    let alg = algorithm_of(&cfg)?;
    let (algorithm, params) = match alg {
        AlgorithmName::Alg1 => (EnumAlgorithm::Alg1, Some(params_for(&cfg, alg, inst.n, inst.delta)?)),
        AlgorithmName::Alg2 => (EnumAlgorithm::Alg2, Some(params_for(&cfg, alg, inst.n, inst.delta)?)),
        AlgorithmName::Randgreedy => (
            EnumAlgorithm::RandGreedy {
                palette_size: cfg.palette_size.unwrap_or((2 * inst.delta).saturating_sub(1).max(1)),
            },
            None,
        ),
        AlgorithmName::Listgreedy => (EnumAlgorithm::ListGreedy, None),
        AlgorithmName::Greedy => return Err(CliError::config("greedy is deterministic; nothing to enumerate")),
    };
    let budget = cfg.budget.unwrap_or(EnumOptions::default().budget);
    let report = enumerate_exact(&inst, params.as_ref(), algorithm, EnumOptions { budget })?;
    let doc = json!({
        "schema_version": crate::config::SCHEMA_VERSION,
        "instance": cfg.instance.describe(),
        "algorithm": algorithm,
        "params": params,
        "report": report,
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("enumerate.json"), format!("{text}\n"))?;
    }
    // a closed pipe downstream is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn parse_color(tok: &str) -> Option<ColorRef> {
    let (palette, idx) = match tok.split_once(':') {
        Some(("alg", i)) => (false, i),
        Some(("greedy", i)) => (true, i),
        Some(_) => return None,
        None => (false, tok),
    };
    let idx: u32 = idx.parse().ok().filter(|&i| i >= 1)?;
    Some(if palette { ColorRef::greedy(idx) } else { ColorRef::alg(idx) })
}

/// Reads `u v color` lines; `color` is `alg:i`, `greedy:i` or a bare index
/// in the main palette.
fn read_assignment(path: &Path) -> CliResult<Vec<(Edge, ColorRef)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parsed = match toks.as_slice() {
            [u, v, c] => match (u.parse::<u32>(), v.parse::<u32>(), parse_color(c)) {
                (Ok(u), Ok(v), Some(c)) => Edge::try_new(u, v).map(|e| (e, c)),
                _ => None,
            },
            _ => None,
        };
        match parsed {
            Some(p) => out.push(p),
            None => {
                return Err(CliError::io(format!("{}:{}: expected `u v color`", path.display(), i + 1)))
            }
        }
    }
    Ok(out)
}

pub fn cmd_validate(raw: Value) -> CliResult<()> {
    let cfg = parse_config(raw)?;
    let inst = match &cfg.instance {
        crate::config::InstanceSpec::File { path } => read_instance_file(path)?,
        _ => oblivious_instance(&cfg)?,
    };
    let path = cfg.assignment.as_ref().ok_or_else(|| CliError::config("`assignment` is required"))?;
    let assignment = read_assignment(path)?;
    let edges = inst.edges();
    let known: HashSet<Edge> = edges.iter().copied().collect();
    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    let largest_alg = assignment
        .iter()
        .filter(|(_, c)| c.palette == Palette::Alg)
        .map(|(_, c)| c.index)
        .max()
        .unwrap_or(0);
    let mut state = ColoringState::new(inst.n as usize, cfg.palette_size.unwrap_or(largest_alg));
    for (e, c) in assignment {
        if e.v().0 >= inst.n || !known.contains(&e) {
            problems.push(format!("{e} is not an edge of the instance"));
        } else if !seen.insert(e) {
            problems.push(format!("{e} is assigned twice"));
        } else {
            state.record(e, c);
        }
    }
    let report = validate_coloring(&edges, &state);
    for c in &report.conflicts {
        problems.push(format!("conflict at vertex {}: {} and {} both use {}", c.vertex, c.first, c.second, c.color));
    }
    for e in &report.unassigned {
        problems.push(format!("{e} has no color"));
    }
    for (e, c) in &report.out_of_palette {
        problems.push(format!("{e} uses {c}, outside the palette"));
    }
    if problems.is_empty() {
        println!("valid: {} edges, {} colors", edges.len(), state.total_colors());
        Ok(())
    } else {
        for p in &problems {
            println!("{p}");
        }
        Err(CliError::validity(format!("{} problems", problems.len())))
    }
}
