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

#include "gbcalc/report.hpp"

#include <cstdint>
#include <cstdio>

#include "gbcalc/printer.hpp"

namespace gbcalc {

std::string program_digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string head_text(const TraceStep& s) {
  const Thread& t = s.pre.thread(s.thread);
  if (t.stack.empty()) return "<finished>";
  return to_term(*head_of(t.top().continuation));
}

std::string join_accessed(const ExprSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : s) {
    if (!first) out += ",";
    first = false;
    out += to_string(*e);
  }
  return out + "}";
}

std::string join_derefs(const DerefSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& d : s) {
    if (!first) out += ",";
    first = false;
    out += to_string(d);
  }
  return out + "}";
}

const Memory& post_memory(const Trace& t, std::size_t i) {
  return i + 1 < t.steps.size() ? t.steps[i + 1].pre.memory : t.final.memory;
}

Json lockset_json(const Lockset& ls) {
  Json a = Json::array();
  for (Location l : ls.items()) a.push_back(to_string(l));
  return a;
}

}  // namespace

std::string memory_delta(const Memory& before, const Memory& after) {
  std::string out;
  for (Location l : after.locations()) {
    const Object& o = after.at(l);
    const Object* prev = before.find(l);
    if (prev && *prev == o) continue;
    if (!out.empty()) out += ";";
    out += to_string(l) + "=" + to_string(o);
  }
  for (Location l : before.locations()) {
    if (!after.contains(l)) {
      if (!out.empty()) out += ";";
      out += to_string(l) + "=<freed>";
    }
  }
  return out.empty() ? "-" : out;
}

std::string dump_trace_text(const Trace& t) {
  std::string out = "#gbc-trace v1\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& s = t.steps[i];
    out += std::to_string(i) + "\t" + std::to_string(s.thread) + "\t" + rule_name(s.rule) + "\t" +
           head_text(s) + "\t" + to_string(s.pre.thread(s.thread).locks) + "\t" +
           memory_delta(s.pre.memory, post_memory(t, i)) + "\t" + join_accessed(s.events.accessed) +
           "\t" + join_derefs(s.events.derefs) + "\n";
  }
  out += "#outcome " + to_string(t.outcome) + " steps=" + std::to_string(t.steps.size());
  if (!t.diagnostic.empty()) out += " " + t.diagnostic;
  return out + "\n";
}

Json memory_to_json(const Memory& m) {
  Json j = Json::object();
  for (Location l : m.locations()) {
    const Object& o = m.at(l);
    Json fields = Json::object();
    for (const auto& [f, v] : o.fields.entries()) fields[f] = to_string(v);
    j[to_string(l)] = Json{{"class", o.class_name}, {"fields", fields}, {"locks", o.locks}};
  }
  return j;
}

Json trace_to_json(const Trace& t) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& s = t.steps[i];
    Json derivation = Json::array();
    for (Rule r : s.derivation) derivation.push_back(rule_name(r));
    Json accessed = Json::array();
    for (const auto& e : s.events.accessed) accessed.push_back(to_string(*e));
    Json derefs = Json::array();
    for (const auto& d : s.events.derefs) derefs.push_back(to_string(d));
    steps.push_back(Json{{"step", i},
                         {"thread", s.thread},
                         {"rule", rule_name(s.rule)},
                         {"derivation", derivation},
                         {"head", head_text(s)},
                         {"locks", lockset_json(s.pre.thread(s.thread).locks)},
                         {"delta", memory_delta(s.pre.memory, post_memory(t, i))},
                         {"accessed", accessed},
                         {"derefs", derefs}});
  }
  return Json{{"schema", kTraceSchema},
              {"steps", steps},
              {"outcome", to_string(t.outcome)},
              {"diagnostic", t.diagnostic},
              {"final_memory", memory_to_json(t.final.memory)}};
}

Json stats_to_json(const Exploration& x) {
  const auto& s = x.stats;
  return Json{{"bound", x.bound},
              {"dedup", x.dedup},
              {"complete", x.complete()},
              {"states", s.states},
              {"transitions", s.transitions},
              {"completed", s.completed},
              {"deadlocks", s.deadlocks},
              {"stuck", s.stuck},
              {"bound_exhausted", s.bound_exhausted},
              {"max_depth", s.max_depth},
              {"invariant_checks", s.invariant_checks},
              {"invariant_violations", x.invariant_violations.size()}};
}

Json finding_to_json(const Finding& f) {
  return Json{{"schedule", f.schedule},
              {"step", f.step_index},
              {"thread", f.thread},
              {"location", f.location ? Json(to_string(*f.location)) : Json(nullptr)},
              {"early_dereference", f.early_dereference},
              {"explanation", f.explanation}};
}

Json verdict_to_json(const Verdict& v) {
  Json findings = Json::array();
  for (const auto& f : v.findings) findings.push_back(finding_to_json(f));
  return Json{{"status", to_string(v.status)},
              {"bound", v.bound},
              {"check_points", v.check_points},
              {"vacuous", v.vacuous()},
              {"violations", v.finding_count},
              {"findings", findings}};
}

Json annotation_to_json(const Annotation& a) {
  return Json{{"target", to_string(a.target)},
              {"semantics", to_string(a.semantics)},
              {"guard", to_string(*a.guard)}};
}

Json races_to_json(const RaceReport& r) {
  Json races = Json::array();
  for (const auto& race : r.races) {
    races.push_back(Json{{"location", to_string(race.loc)},
                         {"field", race.field},
                         {"writer", race.thread_a},
                         {"other", race.thread_b},
                         {"other_mode", race.mode_b == DerefMode::Write ? "write" : "read"},
                         {"schedule", race.schedule}});
  }
  Json sites = Json::array();
  for (const auto& [l, f] : r.sites()) sites.push_back(to_string(l) + "." + f);
  return Json{{"complete", r.complete}, {"count", r.races.size()}, {"sites", sites}, {"races", races}};
}

Json theorem_to_json(const TheoremReport& r) {
  Json j = annotation_to_json(r.annotation);
  j["wellformed"] = r.wellformed.ok;
  j["wellformed_diagnostics"] = r.wellformed.diagnostics;
  j["nonaliased"] = r.nonaliased ? verdict_to_json(*r.nonaliased) : Json(nullptr);
  j["protection"] = verdict_to_json(r.protection);
  j["hypotheses"] = to_string(r.hypotheses_status);
  j["restricted_races"] = races_to_json(r.restricted);
  j["explanation"] = r.explanation;
  return j;
}

Json report_header(const std::string& command, const std::string& path,
                   const std::string& digest) {
  return Json{{"schema", kReportSchema},
              {"tool", "gbc"},
              {"version", kToolVersion},
              {"command", command},
              {"program", Json{{"path", path}, {"digest", digest}}}};
}

}  // namespace gbcalc
