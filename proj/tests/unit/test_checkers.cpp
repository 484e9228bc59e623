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
#include "gbcalc/checkers.hpp"
#include "gbcalc/parser.hpp"
#include "gbcalc/printer.hpp"

using namespace gbcalc;

namespace {

struct Loaded {
  Program p;
  Exploration x;
};

Loaded load(const std::string& name, bool dedup = true) {
  Loaded l;
  l.p = gbtest::load_program_file(gbtest::corpus_dir() + "/" + name + ".gbc");
  ExploreOptions o;
  o.bound = 200;
  o.dedup = dedup;
  l.x = explore(l.p, o);
  return l;
}

Annotation ann(const std::string& line) { return parse_annotations(line).at(0); }

VerdictStatus status(const Loaded& l, const std::string& line) {
  return check_annotation(l.p, l.x, ann(line)).status;
}

using Site = std::pair<Location, std::string>;

// Pairs of enabled threads whose next steps touch the same field, one of
// them writing. Written against events_of_step only.
std::set<Site> race_sites_by_hand(const Program& p, const Exploration& x) {
  std::set<Site> out;
  for (const auto& n : x.nodes) {
    if (n.leaf) continue;
    auto en = enabled(p, n.config);
    for (std::size_t a : en) {
      for (std::size_t b : en) {
        if (a == b) continue;
        auto ea = events_of_step(p, n.config, a).derefs;
        auto eb = events_of_step(p, n.config, b).derefs;
        for (const auto& ta : ea) {
          if (ta.mode != DerefMode::Write) continue;
          for (const auto& tb : eb) {
            if (tb.loc == ta.loc && tb.field == ta.field) out.insert({ta.loc, ta.field});
          }
        }
      }
    }
  }
  return out;
}

std::set<Site> sites_of(const RaceReport& r) {
  auto v = r.sites();
  return {v.begin(), v.end()};
}

}  // namespace

TEST_SUITE("checkers") {
  TEST_CASE("running example verdict table") {
    Loaded l = load("fig4");
    REQUIRE(l.x.complete());
    CHECK(status(l, "guard name field x by itself") == VerdictStatus::Violated);
    CHECK(status(l, "guard value field x by itself") == VerdictStatus::Holds);
    CHECK(status(l, "guard name field y by this.x") == VerdictStatus::Holds);
    CHECK(status(l, "guard value field y by this.x") == VerdictStatus::Violated);
    CHECK(status(l, "guard name var K.m.z by itself") == VerdictStatus::Holds);
    CHECK(status(l, "guard value var K.m.z by itself") == VerdictStatus::Holds);
    CHECK(status(l, "guard name var K.m.z by this.x") == VerdictStatus::Holds);
    CHECK(status(l, "guard name var K.m.w by itself") == VerdictStatus::Violated);
    CHECK(status(l, "guard value var K.m.w by itself") == VerdictStatus::Violated);
  }

  TEST_CASE("counterexamples point at the offending step") {
    Loaded l = load("fig4");
    Verdict x = check_annotation(l.p, l.x, ann("guard name field x by itself"));
    REQUIRE(x.counterexample());
    CHECK(x.counterexample()->step_index == 1);  // decl z = this.x, nothing held
    Verdict y = check_annotation(l.p, l.x, ann("guard value field y by this.x"));
    REQUIRE(y.counterexample());
    CHECK(y.counterexample()->step_index == 14);  // w.g := ... after the release
    CHECK(y.counterexample()->location == Location{4});
    Verdict w = check_annotation(l.p, l.x, ann("guard name var K.m.w by itself"));
    REQUIRE(w.counterexample());
    CHECK(w.counterexample()->step_index == 10);
    CHECK(w.finding_count == 2);
    // The schedule reproduces the configuration the finding was made in.
    Trace t = replay(l.p, y.counterexample()->schedule);
    CHECK(t.steps.size() == 15);
  }

  TEST_CASE("verdicts need a complete exploration to be final") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/thm1_field.gbc");
    ExploreOptions o;
    o.bound = 12;
    o.dedup = true;
    Exploration x = explore(p, o);
    REQUIRE_FALSE(x.complete());
    Verdict v = check_annotation(p, x, ann("guard name field data by this"));
    CHECK(v.status == VerdictStatus::HoldsUpToBound);
  }

  TEST_CASE("unreached targets are vacuous") {
    Loaded l = load("race1");
    Verdict v = check_annotation(l.p, l.x, ann("guard name field nothere by this"));
    CHECK(v.vacuous());
    CHECK(v.status == VerdictStatus::Holds);
  }

  TEST_CASE("races agree with a pairwise search") {
    for (const char* name : {"race1", "race1_sync", "leak", "handoff", "thm1_field",
                             "thm2_value", "inherit", "reentrant"}) {
      CAPTURE(name);
      Loaded l = load(name);
      RaceReport r = detect_races(l.x);
      CHECK(sites_of(r) == race_sites_by_hand(l.p, l.x));
    }
  }

  TEST_CASE("expected race sites") {
    CHECK(sites_of(detect_races(load("race1").x)) == std::set<Site>{{Location{1}, "v"}});
    CHECK(detect_races(load("race1_sync").x).empty());
    CHECK(sites_of(detect_races(load("leak").x)) == std::set<Site>{{Location{3}, "g"}});
    CHECK(detect_races(load("thm2_value").x).empty());
    for (const auto& r : detect_races(load("race1").x).races) {
      CHECK(r.thread_a != r.thread_b);
      Trace t = replay(load("race1").p, r.schedule);
      CHECK(t.final.threads.size() >= 2);
    }
  }

  TEST_CASE("non-aliasing") {
    Loaded l = load("fig4");
    CHECK(check_nonaliased(l.p, l.x, FieldTarget{"x"}).status == VerdictStatus::Violated);
    CHECK(check_nonaliased(l.p, l.x, FieldTarget{"y"}).status == VerdictStatus::Violated);
    CHECK(check_nonaliased(l.p, l.x, VarTarget{"K", "m", "w"}).status ==
          VerdictStatus::Violated);
    Loaded t = load("thm1_field");
    CHECK(check_nonaliased(t.p, t.x, FieldTarget{"data"}).status == VerdictStatus::Holds);
  }

  TEST_CASE("guard well-formedness") {
    auto e = [](const char* s) { return parse_expression(s, true); };
    CHECK(check_guard_wellformed(*e("this.l"), ProtectionSemantics::Name, FieldTarget{"f"}).ok);
    CHECK(check_guard_wellformed(*e("itself"), ProtectionSemantics::Value, FieldTarget{"f"}).ok);
    CHECK_FALSE(
        check_guard_wellformed(*e("this.l"), ProtectionSemantics::Value, FieldTarget{"f"}).ok);
    CHECK_FALSE(check_guard_wellformed(*e("this"), ProtectionSemantics::Name,
                                       VarTarget{"K", "m", "x"})
                    .ok);
    auto bad = check_guard_wellformed(*e("z.f"), ProtectionSemantics::Name, FieldTarget{"f"});
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.diagnostics.size() == 1);
  }

  TEST_CASE("race freedom reports") {
    Loaded t = load("thm1_field");
    auto r = verify_race_freedom(t.p, t.x, ann("guard name field data by this"));
    CHECK(r.hypotheses_hold);
    CHECK(r.hypotheses_status == VerdictStatus::Holds);
    CHECK(r.restricted.empty());
    Loaded v = load("thm2_value");
    auto rv = verify_race_freedom(v.p, v.x, ann("guard value field data by itself"));
    CHECK(rv.hypotheses_hold);
    CHECK_FALSE(rv.nonaliased.has_value());
    Loaded k = load("leak");
    auto rk = verify_race_freedom(k.p, k.x, ann("guard name field data by this.lock"));
    CHECK(rk.protection.status == VerdictStatus::Holds);
    CHECK_FALSE(rk.hypotheses_hold);
    CHECK_FALSE(rk.restricted.empty());
  }

  TEST_CASE("inference") {
    Loaded l = load("fig4");
    auto cands = default_candidates(l.p);
    auto names = [&](const Inference& inf) {
      std::set<std::string> out;
      for (const auto& g : inf.guards) out.insert(to_string(*g));
      return out;
    };
    Inference y = infer_guards(l.p, l.x, FieldTarget{"y"}, ProtectionSemantics::Name, cands);
    CHECK(names(y).count("this.x") == 1);
    CHECK(names(y).count("itself") == 0);
    CHECK_FALSE(y.vacuous);
    Inference x = infer_guards(l.p, l.x, FieldTarget{"x"}, ProtectionSemantics::Name, cands);
    CHECK(x.guards.empty());
    Inference none =
        infer_guards(l.p, l.x, FieldTarget{"zzz"}, ProtectionSemantics::Name, cands);
    CHECK(none.vacuous);
    // Every inferred guard really passes its check.
    for (const auto& g : y.guards) {
      CHECK(check_annotation(l.p, l.x, Annotation{FieldTarget{"y"}, g, ProtectionSemantics::Name})
                .status != VerdictStatus::Violated);
    }
  }

  TEST_CASE("sound on generated programs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 25; ++i) {
      std::string src = gbtest::random_program(rng);
      CAPTURE(src);
      Program p = gbtest::load_program_text(src);
      ExploreOptions o;
      o.bound = 60;
      o.dedup = true;
      Exploration x = explore(p, o);
      CheckSession session(p, x);
      for (const auto& f : {"v", "w", "c", "d"}) {
        for (const auto& g : default_candidates(p)) {
          for (auto sem : {ProtectionSemantics::Name, ProtectionSemantics::Value}) {
            TheoremReport r;
            CHECK_NOTHROW(r = session.verify(Annotation{FieldTarget{f}, g, sem}));
            if (r.hypotheses_hold) CHECK(r.restricted.races.empty());
          }
        }
      }
    }
  }
}
