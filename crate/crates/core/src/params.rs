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

//! Algorithm parameters and their default derivation from `(n, Δ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `c_ε`.
pub const C_EPS: f64 = 10.0;
/// `c_A`.
pub const C_A: f64 = 4.0;
/// `c_K = 35 c_A²`.
pub const C_K: f64 = 35.0 * C_A * C_A;

/// Which adversary model the default `ε` is tuned for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `ε = c_ε (ln n / Δ)^{1/16}`.
    Adaptive,
    /// `ε = c_ε (√ln n / Δ)^{1/16}`.
    Oblivious,
}

/// Field-by-field replacements for the derived defaults.
///
/// A replaced `eps` feeds into every field derived from it that is not itself
/// replaced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub cap: Option<f64>,
    pub alpha: Option<f64>,
    pub badness_threshold: Option<f64>,
    pub dangerous_threshold: Option<f64>,
}

impl Overrides {
    pub fn with_eps(eps: f64) -> Self {
        Overrides { eps: Some(eps), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    /// Maximum degree `Δ`; also the size of the main palette.
    pub delta: u32,
    pub mode: Mode,
    /// `ε`.
    pub eps: f64,
    /// The scale-up cap `A`.
    pub cap: f64,
    /// `α`.
    pub alpha: f64,
    /// A vertex is bad once its badness reaches this value (`2 c_K ε Δ`).
    pub badness_threshold: f64,
    /// A vertex is dangerous once its baddeg reaches this value (`α Δ`).
    pub dangerous_threshold: f64,
    pub c_eps: f64,
    pub c_a: f64,
    pub c_k: f64,
}

/// The mode-dependent default `ε` as a function of `ln n` and `Δ`.
pub fn eps_formula(ln_n: f64, delta: f64, mode: Mode) -> f64 {
    let numerator = match mode {
        Mode::Adaptive => ln_n,
        Mode::Oblivious => ln_n.sqrt(),
    };
    C_EPS * (numerator / delta).powf(1.0 / 16.0)
}

/// `A = c_A / (ε² Δ)`.
pub fn cap_formula(eps: f64, delta: f64) -> f64 {
    C_A / (eps * eps * delta)
}

/// Derives the default parameters for `(n, Δ, mode)` and applies `overrides`.
///
/// Fails with [`Error::InvalidParams`] when the final `ε` is outside `(0, 1)`
/// or the cap is not positive. At desk-scale `Δ` the default `ε` exceeds one,
/// so practical runs override it.
pub fn derive_params(n: u32, delta: u32, mode: Mode, overrides: &Overrides) -> Result<Params> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
    }
    if delta < 1 {
        return Err(Error::InvalidParams("delta must be at least 1".into()));
    }
    let d = f64::from(delta);
    let eps = overrides
        .eps
        .unwrap_or_else(|| eps_formula(f64::from(n).ln(), d, mode));
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!(
            "eps = {eps} is outside (0, 1); override it for this (n, delta)"
        )));
    }
    let cap = overrides.cap.unwrap_or_else(|| cap_formula(eps, d));
    if cap.is_nan() || cap <= 0.0 {
        return Err(Error::InvalidParams(format!("cap = {cap} must be positive")));
    }
    let alpha = overrides.alpha.unwrap_or(eps * eps * eps / 100.0);
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!("alpha = {alpha} must be non-negative")));
    }
    let badness_threshold = overrides
        .badness_threshold
        .unwrap_or(2.0 * C_K * eps * d);
    let dangerous_threshold = overrides.dangerous_threshold.unwrap_or(alpha * d);
    if !(badness_threshold > 0.0 && dangerous_threshold > 0.0) {
        return Err(Error::InvalidParams("thresholds must be positive".into()));
    }
    Ok(Params {
        n,
        delta,
        mode,
        eps,
        cap,
        alpha,
        badness_threshold,
        dangerous_threshold,
        c_eps: C_EPS,
        c_a: C_A,
        c_k: C_K,
    })
}

impl Params {
    /// `(1 - ε) / Δ`, the initial value of every `P_ec`.
    pub fn initial_p(&self) -> f64 {
        (1.0 - self.eps) / f64::from(self.delta)
    }

    /// Parameters with the usual derived fields but an explicit `(ε, A)`.
    ///
    /// Convenience for tests and small enumerations.
    pub fn explicit(n: u32, delta: u32, eps: f64, cap: f64) -> Result<Params> {
        derive_params(
            n,
            delta,
            Mode::Adaptive,
            &Overrides { eps: Some(eps), cap: Some(cap), ..Default::default() },
        )
    }
}
