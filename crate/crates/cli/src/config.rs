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

//! Experiment configuration: a JSON document, optionally edited by
//! `--set key=value` before it is parsed.

use std::path::PathBuf;

use onlinecolor::Overrides;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::exit::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub algorithm: Option<AlgorithmName>,
    /// Shared palette size for randomized greedy (default `2Δ - 1`).
    #[serde(default)]
    pub palette_size: Option<u32>,
    #[serde(default)]
    pub list_choice: ListChoiceName,
    #[serde(default)]
    pub params: Overrides,
    #[serde(default)]
    pub seeds: Option<Seeds>,
    #[serde(default = "one")]
    pub repetitions: u32,
    /// Shuffle the arrival order of an oblivious instance.
    #[serde(default)]
    pub random_order: bool,
    #[serde(default)]
    pub continue_after_failure: bool,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub sweep: Option<SweepAxis>,
    /// Node budget of `enumerate`.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Assignment file checked by `validate`.
    #[serde(default)]
    pub assignment: Option<PathBuf>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    File {
        path: PathBuf,
    },
    RandomGraph {
        n: u32,
        delta: u32,
        m: usize,
    },
    TwoStar {
        delta: u32,
    },
    GadgetFarm {
        delta: u32,
        copies: u32,
        #[serde(default)]
        interleaved: bool,
    },
    ListLbDeterministic {
        delta: u32,
    },
    ListLbRandomized {
        delta: u32,
        copies: u32,
        #[serde(default)]
        star_palette_size: Option<u32>,
    },
    BiasTree {
        delta: u32,
        palette_ratio: f64,
        layers: u32,
        pool_size: usize,
        #[serde(default)]
        max_attempts_per_slot: Option<u32>,
    },
}

impl InstanceSpec {
    /// Short description used in result rows.
    pub fn describe(&self) -> String {
        match self {
            InstanceSpec::File { path } => format!("file:{}", path.display()),
            InstanceSpec::RandomGraph { n, delta, m } => format!("random_graph(n={n};delta={delta};m={m})"),
            InstanceSpec::TwoStar { delta } => format!("two_star(delta={delta})"),
            InstanceSpec::GadgetFarm { delta, copies, interleaved } => {
                format!("gadget_farm(delta={delta};copies={copies};interleaved={interleaved})")
            }
            InstanceSpec::ListLbDeterministic { delta } => format!("list_lb_deterministic(delta={delta})"),
            InstanceSpec::ListLbRandomized { delta, copies, star_palette_size } => format!(
                "list_lb_randomized(delta={delta};copies={copies};size={})",
                star_palette_size.unwrap_or(2 * delta - 1)
            ),
            InstanceSpec::BiasTree { delta, palette_ratio, layers, pool_size, .. } => format!(
                "bias_tree(delta={delta};ratio={palette_ratio};layers={layers};pool={pool_size})"
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Greedy,
    Randgreedy,
    Alg1,
    Alg2,
    Listgreedy,
}

impl AlgorithmName {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmName::Greedy => "greedy",
            AlgorithmName::Randgreedy => "randgreedy",
            AlgorithmName::Alg1 => "alg1",
            AlgorithmName::Alg2 => "alg2",
            AlgorithmName::Listgreedy => "listgreedy",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListChoiceName {
    #[default]
    Uniform,
    FirstFit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default)]
    pub trajectories: bool,
    #[serde(default)]
    pub scaling: bool,
    /// Number of edges tracked per run, spread over the arrival order.
    #[serde(default = "five")]
    pub tracked_edges: usize,
    /// Color subset for the restricted trajectory sums.
    #[serde(default)]
    pub colors: Option<Vec<u32>>,
}

fn five() -> usize {
    5
}

/// One swept key: explicit `values`, or `start..=stop` by `step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub key: String,
    #[serde(default)]
    pub values: Option<Vec<Value>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
}

impl SweepAxis {
    pub fn points(&self) -> CliResult<Vec<Value>> {
        if let Some(v) = &self.values {
            return Ok(v.clone());
        }
        let (Some(start), Some(stop), Some(step)) = (self.start, self.stop, self.step) else {
            return Err(CliError::config("sweep needs `values` or `start`, `stop` and `step`"));
        };
        if step.is_nan() || step <= 0.0 || stop < start {
            return Ok(Vec::new());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| {
                let x = ((start + i as f64 * step) * 1e9).round() / 1e9;
                Value::from(x)
            })
            .collect())
    }
}

/// Sets `path` (dot separated) in `root` to `value`, creating objects on the
/// way.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> CliResult<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::config(format!("bad key `{path}`")));
    }
    let mut cur = root;
    for k in &keys[..keys.len() - 1] {
        if !cur.is_object() {
            return Err(CliError::config(format!("`{path}` goes through a non-object")));
        }
        cur = cur
            .as_object_mut()
            .unwrap()
            .entry(k.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    let Some(obj) = cur.as_object_mut() else {
        return Err(CliError::config(format!("`{path}` goes through a non-object")));
    };
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Parses the right-hand side of `--set`: JSON when it parses, a string
/// otherwise.
pub fn parse_set(arg: &str) -> CliResult<(String, Value)> {
    let Some((k, v)) = arg.split_once('=') else {
        return Err(CliError::config(format!("`--set {arg}` is not key=value")));
    };
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

/// Loads the raw document: the file (or `{}`), then every `--set`.
pub fn load_raw(path: Option<&std::path::Path>, sets: &[String]) -> CliResult<Value> {
    let mut root = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    for s in sets {
        let (k, v) = parse_set(s)?;
        set_path(&mut root, &k, v)?;
    }
    Ok(root)
}

pub fn parse_config(raw: Value) -> CliResult<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_value(raw).map_err(|e| CliError::config(format!("config: {e}")))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::config(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    if cfg.repetitions == 0 {
        return Err(CliError::config("repetitions must be at least 1"));
    }
    Ok(cfg)
}

/// Seeds from the config, or from `ONLINECOLOR_SEED`.
pub fn resolve_seeds(cfg: &ExperimentConfig) -> CliResult<Vec<u64>> {
    let seeds = match &cfg.seeds {
        Some(s) => s.expand(),
        None => match std::env::var("ONLINECOLOR_SEED") {
            Ok(v) => vec![v
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("ONLINECOLOR_SEED=`{v}` is not an integer")))?],
            Err(_) => return Err(CliError::config("no seeds in the config and ONLINECOLOR_SEED is unset")),
        },
    };
    if seeds.is_empty() {
        return Err(CliError::config("seed list is empty"));
    }
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn dotted_set_creates_objects() {
        let mut v = json!({"instance": {"generator": "two_star", "delta": 3}});
        set_path(&mut v, "instance.delta", json!(5)).unwrap();
        set_path(&mut v, "params.eps", json!(0.2)).unwrap();
        assert_eq!(v, json!({"instance": {"generator": "two_star", "delta": 5}, "params": {"eps": 0.2}}));
        assert!(set_path(&mut v, "instance.delta.x", json!(1)).is_err());
    }

    #[test]
    fn set_values_fall_back_to_strings() {
        assert_eq!(parse_set("algorithm=alg1").unwrap().1, json!("alg1"));
        assert_eq!(parse_set("seeds=[1,2]").unwrap().1, json!([1, 2]));
        assert!(parse_set("novalue").is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let v = json!({"instance": {"generator": "two_star", "delta": 3}, "algoritm": "alg1"});
        assert!(parse_config(v).is_err());
        let v = json!({"instance": {"generator": "two_star", "delta": 3, "n": 4}});
        assert!(parse_config(v).is_err());
    }

    #[test]
    fn sweep_ranges_are_clean() {
        let axis = SweepAxis { key: "k".into(), values: None, start: Some(1.4), stop: Some(1.75), step: Some(0.05) };
        let pts = axis.points().unwrap();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[1], json!(1.45));
        assert_eq!(pts[7], json!(1.75));
    }

    #[test]
    fn seed_ranges_expand() {
        assert_eq!(Seeds::Range { start: 3, count: 2 }.expand(), vec![3, 4]);
    }
}
