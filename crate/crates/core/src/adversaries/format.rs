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

//! Line-oriented instance files.
//!
//! ```text
//! n delta
//! u v
//! u v palette:c1,c2,...
//! ```
//!
//! One edge per line in arrival order. Blank lines and lines starting with
//! `#` are skipped when reading and never written. Writing a parsed canonical
//! file reproduces it byte for byte.

use std::fmt::Write as _;

use crate::adversaries::stream::{Arrival, Instance};
use crate::error::{Error, Result};
use crate::types::Edge;

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::with_capacity(16 + inst.arrivals.len() * 12);
    writeln!(out, "{} {}", inst.n, inst.delta).unwrap();
    for a in &inst.arrivals {
        write!(out, "{} {}", a.edge.u(), a.edge.v()).unwrap();
        if let Some(p) = &a.palette {
            out.push_str(" palette:");
            for (i, c) in p.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{c}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn parse_u32(tok: &str, line: usize, what: &str) -> Result<u32> {
    tok.parse::<u32>().map_err(|_| Error::Parse { line, reason: format!("bad {what} `{tok}`") })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) =
        lines.next().ok_or(Error::Parse { line: 0, reason: "missing `n delta` header".into() })?;
    let mut h = header.split_whitespace();
    let (Some(n), Some(delta), None) = (h.next(), h.next(), h.next()) else {
        return Err(Error::Parse { line: hline, reason: "header must be `n delta`".into() });
    };
    let n = parse_u32(n, hline, "n")?;
    let delta = parse_u32(delta, hline, "delta")?;
    let mut arrivals = Vec::new();
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let (Some(u), Some(v)) = (toks.next(), toks.next()) else {
            return Err(Error::Parse { line, reason: "expected `u v`".into() });
        };
        let (u, v) = (parse_u32(u, line, "vertex")?, parse_u32(v, line, "vertex")?);
        let edge = Edge::try_new(u, v)
            .ok_or(Error::Parse { line, reason: format!("self loop at {u}") })?;
        if u >= n || v >= n {
            return Err(Error::Parse { line, reason: format!("vertex out of range for n = {n}") });
        }
        let palette = match toks.next() {
            None => None,
            Some(tok) => {
                let list = tok.strip_prefix("palette:").ok_or(Error::Parse {
                    line,
                    reason: format!("unexpected token `{tok}`"),
                })?;
                let colors = if list.is_empty() {
                    Vec::new()
                } else {
                    list.split(',')
                        .map(|c| parse_u32(c, line, "color"))
                        .collect::<Result<Vec<_>>>()?
                };
                Some(colors)
            }
        };
        if let Some(extra) = toks.next() {
            return Err(Error::Parse { line, reason: format!("trailing token `{extra}`") });
        }
        arrivals.push(Arrival { edge, palette });
    }
    Ok(Instance { n, delta, arrivals })
}
