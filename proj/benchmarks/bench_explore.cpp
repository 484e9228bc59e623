/*
 * Copyright (C) 2026 The gbcalc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "gbcalc/explorer.hpp"
#include "gbcalc/parser.hpp"

using namespace gbcalc;

static Program load(const char* name) {
  std::ifstream in(std::string(GBCALC_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

static void BM_StepRunningExample(benchmark::State& state) {
  Program p = load("fig4.gbc");
  for (auto _ : state) {
    Trace t = run_deterministic(p, Policy::leftmost(), 1000);
    benchmark::DoNotOptimize(t.steps.size());
  }
}
BENCHMARK(BM_StepRunningExample);

static void BM_ExploreTree(benchmark::State& state) {
  Program p = load("race1.gbc");
  ExploreOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(explore(p, o).stats.states);
}
BENCHMARK(BM_ExploreTree);

static void BM_ExploreMerged(benchmark::State& state) {
  Program p = load("spawn_chain.gbc");
  ExploreOptions o;
  o.dedup = true;
  for (auto _ : state) benchmark::DoNotOptimize(explore(p, o).stats.states);
}
BENCHMARK(BM_ExploreMerged);

static void BM_ExploreNoInvariants(benchmark::State& state) {
  Program p = load("spawn_chain.gbc");
  ExploreOptions o;
  o.dedup = true;
  o.check_invariants = false;
  for (auto _ : state) benchmark::DoNotOptimize(explore(p, o).stats.states);
}
BENCHMARK(BM_ExploreNoInvariants);

BENCHMARK_MAIN();
