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

#include <random>

#include "corpus.hpp"
#include "doctest.h"
#include "generator.hpp"
#include "oracles.hpp"
#include "gbcalc/explorer.hpp"
#include "gbcalc/parser.hpp"

using namespace gbcalc;

namespace {

ExploreOptions opts(std::size_t bound, bool dedup = false) {
  ExploreOptions o;
  o.bound = bound;
  o.dedup = dedup;
  return o;
}

std::set<std::vector<std::size_t>> completed_schedules(const Exploration& x) {
  std::set<std::vector<std::size_t>> out;
  for (std::size_t id = 0; id < x.nodes.size(); ++id) {
    if (x.nodes[id].leaf == Outcome::Completed) out.insert(x.schedule_to(id));
  }
  return out;
}

}  // namespace

TEST_SUITE("explorer") {
  TEST_CASE("schedulers and replay agree") {
    for (const auto& f : gbtest::corpus_programs()) {
      CAPTURE(f);
      Program p = gbtest::load_program_file(f);
      for (auto pol : {Policy::leftmost(), Policy::round_robin(), Policy::seeded(3),
                       Policy::seeded(99)}) {
        Trace t = run_deterministic(p, pol, 500);
        Trace again = run_deterministic(p, pol, 500);
        CHECK(again.schedule() == t.schedule());
        Trace r = replay(p, t.schedule());
        CHECK(r.final == t.final);
        CHECK(r.outcome == t.outcome);
      }
    }
  }

  TEST_CASE("policy parsing") {
    CHECK(parse_policy("leftmost")->kind == Policy::Kind::Leftmost);
    CHECK(parse_policy("roundrobin")->kind == Policy::Kind::RoundRobin);
    auto s = parse_policy("seed:42");
    REQUIRE(s);
    CHECK(s->kind == Policy::Kind::Seeded);
    CHECK(s->seed == 42);
    CHECK_FALSE(parse_policy("seed:").has_value());
    CHECK_FALSE(parse_policy("random").has_value());
  }

  TEST_CASE("replay rejects a thread that cannot fire") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/fig4.gbc");
    CHECK_THROWS_AS(replay(p, {2}), std::logic_error);
  }

  TEST_CASE("exhaustive search matches a brute-force scheduler") {
    // Two threads with a handful of steps each.
    std::vector<std::string> progs = {
        gbtest::independent_threads_program(1, 2),
        gbtest::independent_threads_program(2, 0),
        gbtest::slurp(gbtest::corpus_dir() + "/race1.gbc"),
        gbtest::slurp(gbtest::corpus_dir() + "/stuck.gbc"),
        R"(class W { method run() { sync (this) { } } }
           main { decl w = new W; spawn w.run(); sync (w) { } })",
    };
    for (const auto& src : progs) {
      CAPTURE(src);
      Program p = gbtest::load_program_text(src);
      auto expected = gbtest::brute_force_completed(p, 200);
      for (bool dedup : {false, true}) {
        Exploration x = explore(p, opts(200, dedup));
        CHECK(x.complete());
        if (!dedup) CHECK(completed_schedules(x) == expected);
        CHECK(x.count_traces(Outcome::Completed) == expected.size());
      }
    }
  }

  TEST_CASE("tree and merged searches count the same traces") {
    for (const char* name : {"race1", "leak", "stuck", "indep_2_2", "race1_sync"}) {
      CAPTURE(name);
      Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/" + name + ".gbc");
      Exploration tree = explore(p, opts(200, false));
      Exploration dag = explore(p, opts(200, true));
      CHECK(dag.stats.states <= tree.stats.states);
      for (auto o : {Outcome::Completed, Outcome::Deadlock, Outcome::Stuck}) {
        CHECK(tree.count_traces(o) == dag.count_traces(o));
      }
    }
  }

  TEST_CASE("raising the bound never loses configurations") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1.gbc");
    std::size_t prev_states = 0;
    std::set<std::vector<std::size_t>> prev;
    for (std::size_t b = 0; b <= 20; ++b) {
      Exploration x = explore(p, opts(b));
      CHECK(x.stats.states >= prev_states);
      std::set<std::vector<std::size_t>> reached;
      for (std::size_t id = 0; id < x.nodes.size(); ++id) reached.insert(x.schedule_to(id));
      for (const auto& s : prev) CHECK(reached.count(s) == 1);
      CHECK(x.stats.max_depth <= b);
      if (b < 14) CHECK_FALSE(x.complete());
      prev_states = x.stats.states;
      prev = reached;
    }
  }

  TEST_CASE("lock invariants hold across the corpus") {
    for (const auto& f : gbtest::corpus_programs()) {
      CAPTURE(f);
      Program p = gbtest::load_program_file(f);
      ExploreOptions o = opts(200, true);
      o.throw_on_violation = false;
      Exploration x = explore(p, o);
      CHECK(x.invariant_violations.empty());
      CHECK(x.stats.invariant_checks >= x.stats.transitions);
      for (const auto& n : x.nodes) CHECK(assert_config_invariants(n.config).empty());
    }
  }

  TEST_CASE("sabotaged release is caught") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1_sync.gbc");
    ExploreOptions o = opts(200, true);
    o.step.sabotage_release_lock = true;
    CHECK_THROWS_AS(explore(p, o), LockInvariantError);
    o.throw_on_violation = false;
    CHECK_FALSE(explore(p, o).invariant_violations.empty());
  }

  TEST_CASE("deadlock is found and classified") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/deadlock2.gbc");
    Exploration x = explore(p, opts(200, true));
    REQUIRE(x.stats.deadlocks > 0);
    for (std::size_t id = 0; id < x.nodes.size(); ++id) {
      const auto& n = x.nodes[id];
      if (n.leaf == Outcome::Deadlock) {
        CHECK(detect_deadlock(p, n.config));
        CHECK(enabled(p, n.config).empty());
        Trace r = replay(p, x.schedule_to(id));
        CHECK(r.outcome == Outcome::Deadlock);
      }
    }
    Program ok = gbtest::load_program_file(gbtest::corpus_dir() + "/lock_order.gbc");
    CHECK(explore(ok, opts(200, true)).stats.deadlocks == 0);
  }

  TEST_CASE("stuck leaves name the stuck thread") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/stuck.gbc");
    Exploration x = explore(p, opts(200));
    REQUIRE(x.stats.stuck > 0);
    for (const auto& n : x.nodes) {
      if (n.leaf == Outcome::Stuck) {
        CHECK_FALSE(n.stuck_threads.empty());
        CHECK(n.diagnostic.find("missing") != std::string::npos);
      }
    }
  }

  TEST_CASE("bound-exhausted frontier and state cap") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1.gbc");
    Exploration x = explore(p, opts(6));
    CHECK_FALSE(x.complete());
    for (const auto& n : x.nodes) {
      if (n.leaf == Outcome::BoundExhausted) {
        CHECK(n.depth == 6);
        CHECK(n.out.empty());
      }
    }
    ExploreOptions capped = opts(200);
    capped.state_cap = 10;
    CHECK_THROWS_AS(explore(p, capped), ResourceLimitError);
  }

  TEST_CASE("topological order respects edges") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/spawn_chain.gbc");
    Exploration x = explore(p, opts(200, true));
    auto order = x.topological_order();
    REQUIRE(order.size() == x.nodes.size());
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& e : x.edges) CHECK(pos[e.src] < pos[e.dst]);
  }

  TEST_CASE("two-thread abstract machine matches the binomial formula") {
    for (std::size_t a = 0; a <= 6; ++a) {
      for (std::size_t b = 0; b <= 6; ++b) {
        CHECK(gbtest::count_two_thread_runs(a, b) == gbtest::binomial(a + b + 2, a + 1));
      }
    }
  }

  TEST_CASE("micro-step interleavings of independent threads") {
    // After the spawn, main has 2j+1 steps (statement, seq-skip, final pop)
    // and the child 2k+1, each followed by its removal.
    for (std::size_t j = 0; j <= 3; ++j) {
      for (std::size_t k = 0; k <= 3; ++k) {
        Program p = gbtest::load_program_text(gbtest::independent_threads_program(j, k));
        Exploration x = explore(p, opts(500, true));
        CHECK(x.count_traces(Outcome::Completed) ==
              gbtest::count_two_thread_runs(2 * j + 1, 2 * k + 1));
      }
    }
  }
}
