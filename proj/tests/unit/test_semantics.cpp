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

#include <algorithm>

#include "corpus.hpp"
#include "doctest.h"
#include "gbcalc/explorer.hpp"
#include "gbcalc/parser.hpp"
#include "gbcalc/printer.hpp"

using namespace gbcalc;

namespace {

Location L(std::uint32_t printed) { return Location{printed + 1}; }  // "l<printed>"

Program fig4() { return gbtest::load_program_file(gbtest::corpus_dir() + "/fig4.gbc"); }

Configuration run_until(const Program& p, Configuration c, std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) c = step(p, c, enabled(p, c).front()).next;
  return c;
}

std::vector<Rule> rules_of(const Trace& t) {
  std::vector<Rule> out;
  for (const auto& s : t.steps) out.push_back(s.rule);
  return out;
}

bool has_rule(const Trace& t, Rule r) {
  auto rs = rules_of(t);
  return std::find(rs.begin(), rs.end(), r) != rs.end();
}

}  // namespace

TEST_SUITE("semantics") {
  TEST_CASE("initial configuration") {
    Program p = fig4();
    Configuration c = initial_config(p);
    REQUIRE(c.threads.size() == 1);
    const auto& rec = c.thread(1).top();
    CHECK(rec.class_name == kMainClass);
    CHECK(rec.env == Environment{{kThis, kInitLocation}});
    CHECK(c.memory.at(kInitLocation).class_name == kMainClass);
    CHECK(c.thread(1).locks.empty());
  }

  TEST_CASE("nested creation allocates breadth-first") {
    Program p = fig4();
    auto e = parse_expression(
        "new K{x = new K1{f = new K2{g = new Object}}, y = new K2{g = new Object}}");
    Configuration c = initial_config(p);
    auto r = eval_expr(p, *e, c.thread(1).top().env, c.memory, c.next_location);
    auto& ok = std::get<Evaluated>(r);
    CHECK(ok.loc == L(0));
    const Memory& m = ok.memory;
    CHECK(m.at(L(0)).class_name == "K");
    CHECK(m.at(L(0)).fields == Environment{{"x", L(1)}, {"y", L(2)}});
    CHECK(m.at(L(1)).fields == Environment{{"f", L(3)}});
    CHECK(m.at(L(2)).class_name == "K2");
    CHECK(m.at(L(2)).fields == Environment{{"g", L(4)}});
    CHECK(m.at(L(3)).fields == Environment{{"g", L(5)}});
    CHECK(m.at(L(4)).class_name == "Object");
    CHECK(m.at(L(5)).fields.empty());
    CHECK(ok.next_location == 7);
    // The plan agrees with the evaluation.
    auto plan = plan_allocations(*e, c.next_location);
    CHECK(plan.slots.size() == 6);
    CHECK(plan.next_after == 7);
  }

  TEST_CASE("evaluation errors") {
    Program p = fig4();
    Configuration c = initial_config(p);
    const auto& env = c.thread(1).top().env;
    auto r1 = eval_expr(p, *parse_expression("nope"), env, c.memory, c.next_location);
    CHECK(std::get<EvalError>(r1).kind == EvalErrorKind::UndefinedVariable);
    auto r2 = eval_expr(p, *parse_expression("this.f"), env, c.memory, c.next_location);
    CHECK(std::get<EvalError>(r2).kind == EvalErrorKind::UndefinedField);
    auto r3 = eval_expr(p, *parse_expression("new Nope"), env, c.memory, c.next_location);
    CHECK(std::get<EvalError>(r3).kind == EvalErrorKind::UnknownClass);
  }

  TEST_CASE("running example, statement by statement") {
    Program p = fig4();
    Trace t = run_deterministic(p, Policy::leftmost(), 1000);
    REQUIRE(t.outcome == Outcome::Completed);
    std::vector<Rule> macro;
    for (const auto& s : t.steps) {
      if (s.rule != Rule::SeqSkip && s.rule != Rule::Pop) macro.push_back(s.rule);
    }
    CHECK(macro == std::vector<Rule>{Rule::Invoc, Rule::Decl, Rule::Decl, Rule::Sync,
                                     Rule::AcquireLock, Rule::FieldAssign, Rule::VarAssign,
                                     Rule::ReleaseLock, Rule::FieldAssign});
    const Memory& m = t.final.memory;
    CHECK(m.at(L(0)).fields == Environment{{"x", L(1)}, {"y", L(3)}});
    CHECK(m.at(L(1)).locks == 0);
    CHECK(m.at(L(3)).fields == Environment{{"g", L(7)}});
    CHECK(m.at(L(6)).class_name == "Object");
    CHECK(m.at(L(7)).class_name == "Object");
    REQUIRE(t.final.threads.size() == 1);
    CHECK(t.final.thread(1).stack.empty());
  }

  TEST_CASE("sync acquires, releases and is reentrant") {
    Program p = parse_program(R"(
      class A { method m() { sync (this) { sync (this) { this.f := this; } } } }
      main { decl a = new A{f = new Object}; a.m(); })");
    Trace t = run_deterministic(p, Policy::leftmost(), 1000);
    REQUIRE(t.outcome == Outcome::Completed);
    CHECK(has_rule(t, Rule::AcquireLock));
    CHECK(has_rule(t, Rule::ReentrantLock));
    CHECK(has_rule(t, Rule::DecreaseLock));
    CHECK(has_rule(t, Rule::ReleaseLock));
    std::uint32_t peak = 0;
    for (const auto& s : t.steps) {
      if (s.pre.memory.contains(L(0))) peak = std::max(peak, s.pre.memory.at(L(0)).locks);
    }
    CHECK(peak == 2);
    CHECK(t.final.memory.at(L(0)).locks == 0);
  }

  TEST_CASE("a held lock blocks the other thread") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1_sync.gbc");
    Configuration c = initial_config(p);
    c = run_until(p, c, 5);  // both decls and the spawn
    REQUIRE(c.threads.size() == 2);
    // Let main (thread 2) take the lock.
    for (int i = 0; i < 3; ++i) c = step(p, c, 2).next;
    REQUIRE(c.thread(2).locks.size() == 1);
    // Thread 1 runs up to its own lock attempt.
    while (try_step(p, c, 1).status == ThreadStatus::Enabled) {
      auto r = step(p, c, 1);
      if (r.rule == Rule::Sync) {
        c = r.next;
        break;
      }
      c = r.next;
    }
    CHECK(try_step(p, c, 1).status == ThreadStatus::Blocked);
    CHECK(enabled(p, c) == std::vector<std::size_t>{2});
  }

  TEST_CASE("spawn places the child before the spawner") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1.gbc");
    Configuration c = run_until(p, initial_config(p), 4);
    auto r = step(p, c, 1);
    REQUIRE(r.rule == Rule::Spawn);
    REQUIRE(r.next.threads.size() == 2);
    CHECK(r.next.thread(1).top().method == "run");
    CHECK(r.next.thread(1).top().class_name == "Writer");
    CHECK(r.next.thread(1).locks.empty());
    CHECK(r.next.thread(2).top().class_name == kMainClass);
  }

  TEST_CASE("derivations name the structural rules") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1.gbc");
    Configuration c = run_until(p, initial_config(p), 5);
    REQUIRE(c.threads.size() == 2);
    auto left = step(p, c, 1);
    CHECK(left.derivation == std::vector<Rule>{Rule::ParL, Rule::Seq, Rule::Decl});
    auto right = step(p, c, 2);
    CHECK(right.derivation == std::vector<Rule>{Rule::ParR, Rule::Seq, Rule::FieldAssign});

    Program q = fig4();
    Configuration d = run_until(q, initial_config(q), 3);  // inside K.m
    REQUIRE(d.thread(1).stack.size() == 2);
    CHECK(step(q, d, 1).derivation == std::vector<Rule>{Rule::Push, Rule::Seq, Rule::Decl});
  }

  TEST_CASE("finished threads are removed against a neighbour") {
    Program p = parse_program(R"(
      class W { method run() { } }
      main { decl w = new W; spawn w.run(); })");
    Configuration c = run_until(p, initial_config(p), 3);
    REQUIRE(c.threads.size() == 2);
    c = step(p, c, 1).next;  // child pops
    CHECK(c.thread(1).stack.empty());
    auto l = step(p, c, 1);
    CHECK(l.rule == Rule::EndL);
    CHECK(l.next.threads.size() == 1);
    c = step(p, c, 2).next;  // main pops
    auto r = step(p, c, 2);
    CHECK(r.rule == Rule::EndR);
    CHECK(r.next.threads.size() == 1);
    // A lone empty thread cannot step.
    CHECK(try_step(p, r.next, 1).status == ThreadStatus::Terminated);
  }

  TEST_CASE("undefined premises leave the thread stuck") {
    Program p = parse_program(R"(
      class A { }
      main { decl a = new A; a.m(); })");
    Configuration c = run_until(p, initial_config(p), 2);
    auto at = try_step(p, c, 1);
    CHECK(at.status == ThreadStatus::Stuck);
    CHECK(at.diagnostic.find("m") != std::string::npos);
    Trace t = run_deterministic(p, Policy::leftmost(), 100);
    CHECK(t.outcome == Outcome::Stuck);
  }

  TEST_CASE("unlocking a free location is an internal error") {
    Program p = parse_program("main { }");
    Configuration c = initial_config(p);
    c.threads[0].stack.back().continuation = make_seq(make_unlock(kInitLocation), make_skip());
    CHECK_THROWS_AS(step(p, c, 1), InternalConsistencyError);
  }

  TEST_CASE("sabotaged release keeps the lock in the lockset") {
    Program p = parse_program(R"(
      class A { method m() { sync (this) { } } }
      main { decl a = new A; a.m(); })");
    StepOptions bad;
    bad.sabotage_release_lock = true;
    Configuration c = initial_config(p);
    for (;;) {
      auto r = step(p, c, 1, bad);
      if (r.rule == Rule::ReleaseLock) {
        CHECK(r.next.thread(1).locks.size() == 1);
        CHECK(r.next.memory.at(L(0)).locks == 0);
        CHECK_FALSE(assert_lock_invariants(c, 1, r).empty());
        break;
      }
      c = r.next;
    }
  }

  TEST_CASE("rule names round-trip") {
    for (std::size_t i = 0; i < kRuleCount; ++i) {
      Rule r = static_cast<Rule>(i);
      CHECK(rule_from_name(rule_name(r)) == r);
    }
    CHECK(rule_name(Rule::AcquireLock) == "[acquire-lock]");
    CHECK_FALSE(rule_from_name("[nope]").has_value());
  }
}
