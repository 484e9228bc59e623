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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbcalc/access.hpp"
#include "gbcalc/semantics.hpp"

namespace gbcalc {

enum class Outcome { Completed, BoundExhausted, Deadlock, Stuck };

std::string to_string(Outcome o);

struct TraceStep {
  Configuration pre;
  std::size_t thread = 0;
  Rule rule = Rule::Pop;
  std::vector<Rule> derivation;
  StepEvents events;
};

struct Trace {
  std::vector<TraceStep> steps;
  Configuration final;
  Outcome outcome = Outcome::Completed;
  std::string diagnostic;

  std::vector<std::size_t> schedule() const;
};

struct Policy {
  enum class Kind { Leftmost, RoundRobin, Seeded };
  Kind kind = Kind::Leftmost;
  std::uint64_t seed = 0;

  static Policy leftmost() { return {Kind::Leftmost, 0}; }
  static Policy round_robin() { return {Kind::RoundRobin, 0}; }
  static Policy seeded(std::uint64_t s) { return {Kind::Seeded, s}; }
};

/// Parses `leftmost`, `roundrobin` or `seed:N`.
std::optional<Policy> parse_policy(const std::string& text);

/// Lock-soundness failure found while running or exploring with assertions on.
class LockInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when exploration visits more configurations than the state cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Classifies a configuration where no thread is enabled.
Outcome classify_terminal(const Program& p, const Configuration& c, std::string* diagnostic);

Trace run_deterministic(const Program& p, const Policy& policy, std::size_t max_steps,
                        const StepOptions& opts = {});

/// Re-runs a recorded schedule from the initial configuration. Throws
/// std::logic_error if some scheduled thread is not enabled.
Trace replay(const Program& p, const std::vector<std::size_t>& schedule,
             const StepOptions& opts = {});

// ---------------------------------------------------------------------------
// Lock invariants

/// Checks that hold in every reachable configuration: disjoint locksets,
/// finished threads hold nothing, and lock counters agree with locksets.
std::vector<std::string> assert_config_invariants(const Configuration& c);

/// Checks one transition `pre --n--> result`: the configuration checks on the
/// post-state plus the per-rule locking, unlocking, spawn and frame checks.
std::vector<std::string> assert_lock_invariants(const Configuration& pre, std::size_t n,
                                                const StepResult& result);

/// True iff some thread exists and none is enabled.
bool detect_deadlock(const Program& p, const Configuration& c);

// ---------------------------------------------------------------------------
// Exhaustive exploration

struct ExploreOptions {
  std::size_t bound = 10000;
  std::size_t state_cap = 1000000;
  /// Merge identical configurations (BFS over a state graph).
  bool dedup = false;
  bool check_invariants = true;
  /// Throw LockInvariantError on the first violation instead of recording it.
  bool throw_on_violation = true;
  StepOptions step;
};

/// Default state cap, overridable through the GBC_STATE_CAP environment variable.
std::size_t default_state_cap();

struct ExploreEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::size_t thread = 0;
  Rule rule = Rule::Pop;
  std::vector<Rule> derivation;
  StepEvents events;
};

struct ExploreNode {
  Configuration config;
  std::size_t depth = 0;
  std::vector<std::size_t> out;
  std::vector<std::size_t> in;
  /// Edge through which this node was first reached (none for the root).
  std::optional<std::size_t> parent;
  std::optional<Outcome> leaf;
  std::string diagnostic;
  /// Threads that cannot fire because a rule premise is undefined.
  std::vector<std::size_t> stuck_threads;
};

struct ExploreStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t completed = 0;
  std::size_t deadlocks = 0;
  std::size_t stuck = 0;
  std::size_t bound_exhausted = 0;
  std::size_t max_depth = 0;
  std::size_t invariant_checks = 0;
};

struct Exploration {
  std::vector<ExploreNode> nodes;
  std::vector<ExploreEdge> edges;
  std::size_t bound = 0;
  bool dedup = false;
  ExploreStats stats;
  std::vector<std::string> invariant_violations;

  /// Every branch ended within the bound.
  bool complete() const { return stats.bound_exhausted == 0; }

  /// Thread indices leading from the root to node `id`.
  std::vector<std::size_t> schedule_to(std::size_t id) const;

  /// Number of maximal traces ending in `o` (saturating).
  std::uint64_t count_traces(Outcome o) const;

  /// Node ids in an order where every edge goes forward.
  std::vector<std::size_t> topological_order() const;

  /// Distinct statement-level interleavings of the maximal traces ending in
  /// `o`. Each trace is projected onto the steps that execute a source
  /// command (decl, assignments, calls, spawn, sync) and written as a
  /// sequence of thread ids that stay fixed when threads are spawned or
  /// removed (the main thread is 0, later threads count up in spawn order).
  /// Throws ResourceLimitError after visiting more than `path_cap` paths.
  std::set<std::vector<std::size_t>> macro_interleavings(Outcome o,
                                                         std::size_t path_cap = 1000000) const;
};

/// Rules that execute a source command rather than bookkeeping.
bool is_macro_rule(Rule r);

Exploration explore(const Program& p, const ExploreOptions& opts = {});

}  // namespace gbcalc
