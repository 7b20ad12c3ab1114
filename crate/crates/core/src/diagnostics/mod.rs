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

//! Post-hoc analysis of runs: metrics, trajectories, scaling factors and
//! exact enumeration on small instances.

pub mod enumerate;
pub mod metrics;
pub mod scaling;
pub mod trajectory;

pub use enumerate::{enumerate_exact, EnumAlgorithm, EnumOptions, EnumReport};
pub use metrics::Metrics;
pub use scaling::{compute_scaling_factors, NeighborFactors, ScalingFactors, SideFactors};
pub use trajectory::{
    bad_colors, classify, compute_trajectory, last_defined_time, matching_sum,
    write_trajectory_csv, EdgeClass, Trajectory, TrajectoryPoint,
};

/// Azuma tail `exp(-λ² / (2 · steps · step_size²))` for a martingale with
/// `steps` increments bounded by `step_size`.
pub fn azuma_bound(lambda: f64, steps: u64, step_size: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let denom = 2.0 * steps as f64 * step_size * step_size;
    if denom == 0.0 {
        return 0.0;
    }
    (-lambda * lambda / denom).exp()
}

#[cfg(test)]
mod tests {
    use super::azuma_bound;

    #[test]
    fn azuma_shape() {
        assert_eq!(azuma_bound(0.0, 10, 0.5), 1.0);
        assert!(azuma_bound(1.0, 10, 0.5) > azuma_bound(2.0, 10, 0.5));
        assert!(azuma_bound(1.0, 10, 0.5) < azuma_bound(1.0, 20, 0.5));
        let b = azuma_bound(3.0, 8, 0.25);
        assert!((b.ln() + 9.0 / (2.0 * 8.0 * 0.0625)).abs() < 1e-12);
        assert_eq!(azuma_bound(1.0, 0, 0.5), 0.0);
    }
}
