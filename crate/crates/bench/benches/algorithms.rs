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

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use onlinecolor::adversaries::{gen_random_graph, Instance};
use onlinecolor::algorithms::RandGreedyOptions;
use onlinecolor::{
    derive_params, run_alg1, run_alg2, run_greedy, run_randomized_greedy, DiagnosticsHooks, Mode,
    Overrides, RngHandle,
};

fn graph(n: u32, delta: u32, m: usize) -> Instance {
    gen_random_graph(n, delta, m, &mut RngHandle::new(11)).unwrap()
}

fn sizes() -> Vec<(u32, u32, usize)> {
    vec![(500, 16, 3_000), (2_000, 32, 25_000), (10_000, 64, 300_000)]
}

fn colorers(c: &mut Criterion) {
    let mut g = c.benchmark_group("colorers");
    g.sample_size(10);
    for (n, delta, m) in sizes() {
        let inst = graph(n, delta, m);
        let id = format!("n{n}_d{delta}_m{m}");
        let p1 = derive_params(n, delta, Mode::Adaptive, &Overrides::with_eps(0.2)).unwrap();
        let p2 = derive_params(n, delta, Mode::Oblivious, &Overrides::with_eps(0.2)).unwrap();
        g.bench_with_input(BenchmarkId::new("greedy", &id), &inst, |b, i| {
            b.iter(|| run_greedy(i.clone()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("randgreedy", &id), &inst, |b, i| {
            let mut rng = RngHandle::new(1);
            b.iter(|| {
                run_randomized_greedy(i.clone(), 2 * delta - 1, &mut rng, RandGreedyOptions::default())
                    .unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("alg1", &id), &inst, |b, i| {
            let mut rng = RngHandle::new(1);
            b.iter(|| run_alg1(i.clone(), &p1, &mut rng, None).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("alg2", &id), &inst, |b, i| {
            let mut rng = RngHandle::new(1);
            b.iter(|| run_alg2(i.clone(), &p2, &mut rng, None).unwrap())
        });
    }
    g.finish();
}

fn reconstruct(c: &mut Criterion) {
    let (n, delta, m) = (2_000, 32, 25_000);
    let inst = graph(n, delta, m);
    let p = derive_params(n, delta, Mode::Adaptive, &Overrides::with_eps(0.2)).unwrap();
    let hooks = DiagnosticsHooks::retain();
    let r = run_alg1(inst.clone(), &p, &mut RngHandle::new(3), Some(&hooks)).unwrap();
    let table = r.ptable.as_ref().unwrap();
    // the vector each edge sampled from: every event before its arrival
    let arrivals: Vec<_> = r.edges().into_iter().zip(0u32..).collect();
    let mut out = vec![0.0; delta as usize];
    c.bench_function("ptable_reconstruct_all", |b| {
        b.iter(|| {
            for &(e, t) in &arrivals {
                table.reconstruct_into(e, t, &mut out);
            }
        })
    });
}

criterion_group!(benches, colorers, reconstruct);
criterion_main!(benches);
