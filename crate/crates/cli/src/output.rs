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

//! CSV output. Column order is fixed; floats use Rust's shortest round-trip
//! decimal form.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use onlinecolor::diagnostics::write_trajectory_csv;

use crate::config::SCHEMA_VERSION;
use crate::exit::CliResult;
use crate::experiment::{ResultRow, RunOutput};

pub const RESULT_COLUMNS: [&str; 22] = [
    "schema_version",
    "run_id",
    "seed",
    "repetition",
    "axis_value",
    "instance",
    "algorithm",
    "n",
    "delta",
    "edges",
    "eps",
    "cap",
    "total_colors",
    "greedy_palette_size",
    "max_marked_degree",
    "marked",
    "failed",
    "failure_index",
    "bad_vertices",
    "dangerous_vertices",
    "valid",
    "final_bias",
];

pub const SUMMARY_COLUMNS: [&str; 15] = [
    "schema_version",
    "axis_key",
    "axis_value",
    "runs",
    "failure_rate",
    "failure_ci_low",
    "failure_ci_high",
    "mean_total_colors",
    "total_colors_ci_low",
    "total_colors_ci_high",
    "mean_max_marked_degree",
    "mean_final_bias",
    "final_bias_ci_low",
    "final_bias_ci_high",
    "invalid_runs",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn result_record(r: &ResultRow) -> Vec<String> {
    vec![
        SCHEMA_VERSION.to_string(),
        r.run_id.to_string(),
        r.seed.to_string(),
        r.repetition.to_string(),
        opt(r.axis_value.as_ref()),
        r.instance.clone(),
        r.algorithm.clone(),
        opt(r.n),
        r.delta.to_string(),
        opt(r.edges),
        opt(r.eps),
        opt(r.cap),
        r.total_colors.to_string(),
        opt(r.greedy_palette_size),
        opt(r.max_marked_degree),
        opt(r.marked),
        r.failed.to_string(),
        opt(r.failure_index),
        opt(r.bad_vertices),
        opt(r.dangerous_vertices),
        r.valid.to_string(),
        opt(r.final_bias),
    ]
}

pub fn write_results(dir: &Path, outputs: &[RunOutput]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
    w.write_record(RESULT_COLUMNS)?;
    for o in outputs {
        w.write_record(result_record(&o.row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timings(dir: &Path, outputs: &[RunOutput]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(dir.join("timings.csv"))?;
    w.write_record(["run_id", "seed", "repetition", "wall_time_s"])?;
    for o in outputs {
        w.write_record([
            o.row.run_id.to_string(),
            o.row.seed.to_string(),
            o.row.repetition.to_string(),
            o.wall_time.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(dir: &Path, outputs: &[RunOutput]) -> CliResult<()> {
    if outputs.iter().any(|o| !o.trajectories.is_empty()) {
        let tdir = dir.join("trajectories");
        fs::create_dir_all(&tdir)?;
        for o in outputs.iter().filter(|o| !o.trajectories.is_empty()) {
            let f = File::create(tdir.join(format!("run_{}.csv", o.row.run_id)))?;
            write_trajectory_csv(BufWriter::new(f), &o.trajectories)?;
        }
    }
    if outputs.iter().any(|o| !o.scaling.is_empty()) {
        let mut w = csv::Writer::from_path(dir.join("scaling.csv"))?;
        w.write_record([
            "run_id",
            "edge_u",
            "edge_v",
            "arrival",
            "identity_error",
            "bound_excess",
            "r_excess",
            "min_s",
        ])?;
        for s in outputs.iter().flat_map(|o| &o.scaling) {
            w.write_record([
                s.run_id.to_string(),
                s.edge.u().to_string(),
                s.edge.v().to_string(),
                s.arrival.to_string(),
                s.identity_error.to_string(),
                s.bound_excess.to_string(),
                s.r_excess.to_string(),
                s.min_s.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Mean with a 95% normal-approximation interval; the interval is absent
/// for fewer than two samples.
pub fn mean_ci(xs: &[f64]) -> (f64, Option<(f64, f64)>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = 1.96 * (var / n).sqrt();
    (mean, Some((mean - half, mean + half)))
}

/// Rate with a 95% normal-approximation (Wald) interval clamped to `[0, 1]`.
pub fn rate_ci(hits: usize, n: usize) -> (f64, (f64, f64)) {
    let p = hits as f64 / n as f64;
    let half = 1.96 * (p * (1.0 - p) / n as f64).sqrt();
    (p, ((p - half).max(0.0), (p + half).min(1.0)))
}

pub fn write_summary(dir: &Path, key: &str, groups: &[(String, Vec<&ResultRow>)]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(SUMMARY_COLUMNS)?;
    for (value, rows) in groups {
        let n = rows.len();
        let (rate, (lo, hi)) = rate_ci(rows.iter().filter(|r| r.failed).count(), n);
        let colors: Vec<f64> = rows.iter().map(|r| f64::from(r.total_colors)).collect();
        let (mc, cci) = mean_ci(&colors);
        let marked: Vec<f64> = rows.iter().filter_map(|r| r.max_marked_degree).map(f64::from).collect();
        let biases: Vec<f64> = rows.iter().filter_map(|r| r.final_bias).collect();
        let bias = (!biases.is_empty()).then(|| mean_ci(&biases));
        w.write_record([
            SCHEMA_VERSION.to_string(),
            key.to_string(),
            value.clone(),
            n.to_string(),
            rate.to_string(),
            lo.to_string(),
            hi.to_string(),
            mc.to_string(),
            opt(cci.map(|c| c.0)),
            opt(cci.map(|c| c.1)),
            opt((!marked.is_empty()).then(|| mean_ci(&marked).0)),
            opt(bias.map(|b| b.0)),
            opt(bias.and_then(|b| b.1).map(|c| c.0)),
            opt(bias.and_then(|b| b.1).map(|c| c.1)),
            rows.iter().filter(|r| !r.valid).count().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
