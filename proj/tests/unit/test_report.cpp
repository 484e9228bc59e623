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

#include "corpus.hpp"
#include "doctest.h"
#include "gbcalc/parser.hpp"
#include "gbcalc/report.hpp"

using namespace gbcalc;

TEST_SUITE("report") {
  TEST_CASE("running example trace matches the golden file") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/fig4.gbc");
    Trace t = run_deterministic(p, Policy::leftmost(), 1000);
    CHECK(dump_trace_text(t) == gbtest::slurp(std::string(GBCALC_GOLDEN_DIR) + "/fig4.trace"));
  }

  TEST_CASE("text trace layout") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/race1.gbc");
    Trace t = run_deterministic(p, Policy::round_robin(), 1000);
    std::string text = dump_trace_text(t);
    CHECK(text.rfind("#gbc-trace v1\n", 0) == 0);
    std::size_t lines = 0;
    std::size_t pos = 0;
    while ((pos = text.find('\n', pos)) != std::string::npos) {
      ++lines;
      ++pos;
    }
    CHECK(lines == t.steps.size() + 2);
    CHECK(text.find("#outcome Completed steps=" + std::to_string(t.steps.size())) !=
          std::string::npos);
  }

  TEST_CASE("json trace round-trips through the parser") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/leak.gbc");
    Trace t = run_deterministic(p, Policy::seeded(5), 1000);
    Json j = trace_to_json(t);
    Json back = Json::parse(j.dump());
    CHECK(back == j);
    CHECK(back["schema"] == kTraceSchema);
    CHECK(back["outcome"] == "Completed");
    REQUIRE(back["steps"].size() == t.steps.size());
    std::vector<std::size_t> sched;
    for (const auto& s : back["steps"]) sched.push_back(s["thread"].get<std::size_t>());
    CHECK(sched == t.schedule());
  }

  TEST_CASE("memory delta") {
    Memory a;
    Memory b = a.with(Location{1}, Object{"K", Environment{{"f", Location{2}}}, 0});
    CHECK(memory_delta(a, a) == "-");
    CHECK(memory_delta(a, b) == "l0=<K,{f->l1},0>");
  }

  TEST_CASE("digest is FNV-1a") {
    CHECK(program_digest("") == "cbf29ce484222325");
    CHECK(program_digest("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("report json") {
    Program p = gbtest::load_program_file(gbtest::corpus_dir() + "/fig4.gbc");
    ExploreOptions o;
    o.dedup = true;
    Exploration x = explore(p, o);
    Annotation a = parse_annotations("guard value field y by this.x").at(0);
    Verdict v = check_annotation(p, x, a);
    Json h = report_header("check", "fig4.gbc", program_digest("x"));
    CHECK(h["schema"] == kReportSchema);
    CHECK(h["version"] == kToolVersion);
    Json vj = verdict_to_json(v);
    CHECK(vj["status"] == "Violated");
    CHECK(vj["findings"].size() == v.findings.size());
    CHECK(stats_to_json(x)["complete"] == true);
    Json aj = annotation_to_json(a);
    CHECK(aj["guard"] == "this.x");
    CHECK(aj["semantics"] == "value");
  }
}
