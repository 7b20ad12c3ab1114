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

//! Arrival streams and instance generators.

pub mod bias_tree;
pub mod format;
pub mod generators;
pub mod stream;

pub use bias_tree::{gen_bias_tree, BiasTreeConfig, BiasTreeReport, LayerStats};
pub use format::{parse_instance, write_instance};
pub use generators::{
    degrees, gadget_of, gen_gadget_farm, gen_list_lb_deterministic, gen_list_lb_randomized,
    gen_random_graph, gen_two_star_bridge, wrap_random_order, ListLbConfig,
};
pub use stream::{
    AdaptiveStream, Arrival, ArrivalStream, Instance, PublicHistory, StreamAuditor, StreamCursor,
};
