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

// gbc: run, explore and check programs of the guarded-by calculus.
//
// Exit codes: 0 ok / holds, 1 violation, race or empty inference, 2 input
// error, 3 bound or state cap exhausted, 4 deadlock, 5 stuck, 70 internal
// consistency failure.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gbcalc/checkers.hpp"
#include "gbcalc/explorer.hpp"
#include "gbcalc/parser.hpp"
#include "gbcalc/printer.hpp"
#include "gbcalc/report.hpp"
#include "gbcalc/validate.hpp"

using namespace gbcalc;

namespace {

enum Exit : int {
  kOk = 0,
  kViolation = 1,
  kInput = 2,
  kBound = 3,
  kDeadlock = 4,
  kStuck = 5,
  kInternal = 70,
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Program program;
  std::string digest;
};

Loaded load_program(const std::string& path) {
  const std::string text = read_file(path);
  Loaded out;
  out.digest = program_digest(text);
  try {
    out.program = parse_program(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
  ValidationReport rep = validate_program(out.program);
  if (!rep.ok()) {
    std::string msg = path + ": invalid program";
    for (const auto& v : rep.violations) msg += "\n  " + to_string(v);
    throw InputError(msg);
  }
  return out;
}

struct Common {
  std::string program;
  std::string format = "text";
  std::size_t bound = 10000;
  std::size_t state_cap = default_state_cap();
  bool dedup = false;

  ExploreOptions explore_options() const {
    ExploreOptions o;
    o.bound = bound;
    o.state_cap = state_cap;
    o.dedup = dedup;
    return o;
  }
  bool json() const { return format == "json"; }
};

void add_program(CLI::App* cmd, Common& c) {
  cmd->add_option("program", c.program, "program file (.gbc)")->required();
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

void add_exploration(CLI::App* cmd, Common& c) {
  cmd->add_option("--bound", c.bound, "max steps per trace")->capture_default_str();
  cmd->add_option("--state-cap", c.state_cap, "max configurations (env GBC_STATE_CAP)")
      ->capture_default_str();
  cmd->add_flag("--dedup", c.dedup, "merge identical configurations");
}

std::string schedule_text(const std::vector<std::size_t>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out.empty() ? "(empty)" : out;
}

std::string stats_line(const Exploration& x) {
  return "explored " + std::to_string(x.stats.states) + " states, " +
         std::to_string(x.stats.transitions) + " transitions, bound " + std::to_string(x.bound) +
         (x.complete() ? " (complete)" : " (bound exhausted)");
}

void print_verdict(std::ostream& os, const std::string& title, const Verdict& v) {
  os << title << ": " << to_string(v.status);
  if (v.vacuous()) os << " (vacuous)";
  os << "\n";
  if (const Finding* f = v.counterexample()) {
    os << "  " << f->explanation << "\n";
    if (f->early_dereference) os << "  early-dereference\n";
    os << "  schedule: " << schedule_text(f->schedule) << "\n";
    if (v.finding_count > 1) os << "  (" << v.finding_count << " violations in total)\n";
  }
}

// ---------------------------------------------------------------------------

int cmd_run(const Common& c, const std::string& scheduler, std::size_t max_steps) {
  Loaded l = load_program(c.program);
  auto policy = parse_policy(scheduler);
  if (!policy) throw InputError("unknown scheduler '" + scheduler + "'");
  Trace t = run_deterministic(l.program, *policy, max_steps);
  if (c.json()) {
    Json j = report_header("run", c.program, l.digest);
    j["scheduler"] = scheduler;
    j["trace"] = trace_to_json(t);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << dump_trace_text(t);
  }
  switch (t.outcome) {
    case Outcome::Completed: return kOk;
    case Outcome::BoundExhausted: return kBound;
    case Outcome::Deadlock: return kDeadlock;
    case Outcome::Stuck: return kStuck;
  }
  return kInternal;
}

int cmd_check(const Common& c, const std::string& annotations_path) {
  Loaded l = load_program(c.program);
  std::vector<Annotation> anns;
  try {
    anns = parse_annotations(read_file(annotations_path));
  } catch (const ParseError& e) {
    throw InputError(annotations_path + ":" + e.what());
  }
  Exploration x = explore(l.program, c.explore_options());

  Json verdicts = Json::array();
  Json theorems = Json::array();
  bool violated = false;
  bool partial = false;
  std::ostringstream text;
  text << stats_line(x) << "\n";
  CheckSession session(l.program, x);
  for (const auto& a : anns) {
    Verdict v = session.check(a);
    violated = violated || v.status == VerdictStatus::Violated;
    partial = partial || v.status == VerdictStatus::HoldsUpToBound;
    print_verdict(text, to_source(a), v);
    Json vj = annotation_to_json(a);
    vj["verdict"] = verdict_to_json(v);
    verdicts.push_back(vj);

    TheoremReport tr;
    try {
      tr = session.verify(a);
    } catch (const SoundnessError& e) {
      std::cerr << "gbc: soundness failure: " << e.what() << "\n";
      return kInternal;
    }
    text << "  race freedom: " << tr.explanation << "\n";
    theorems.push_back(theorem_to_json(tr));
  }

  if (c.json()) {
    Json j = report_header("check", c.program, l.digest);
    j["annotations"] = annotations_path;
    j["exploration"] = stats_to_json(x);
    j["verdicts"] = verdicts;
    j["theorems"] = theorems;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text.str();
  }
  if (violated) return kViolation;
  return partial ? kBound : kOk;
}

int cmd_races(const Common& c) {
  Loaded l = load_program(c.program);
  Exploration x = explore(l.program, c.explore_options());
  RaceReport r = detect_races(x);
  if (c.json()) {
    Json j = report_header("races", c.program, l.digest);
    j["exploration"] = stats_to_json(x);
    j["races"] = races_to_json(r);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << stats_line(x) << "\n";
    if (r.empty()) std::cout << "no races\n";
    for (const auto& race : r.races) {
      std::cout << "race at " << to_string(race.loc) << "." << race.field << ": thread "
                << race.thread_a << " writes, thread " << race.thread_b
                << (race.mode_b == DerefMode::Write ? " writes" : " reads")
                << "; schedule: " << schedule_text(race.schedule) << "\n";
    }
  }
  if (!r.empty()) return kViolation;
  return x.complete() ? kOk : kBound;
}

std::set<std::string> declared_vars(const Command& c) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd>) {
          out.insert(n.var);
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          out.merge(declared_vars(*n.first));
          out.merge(declared_vars(*n.rest));
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          out.merge(declared_vars(*n.body));
        }
      },
      c.node);
  return out;
}

AnnotationTarget parse_target(const Program& p, const std::string& text) {
  if (text.rfind("field:", 0) == 0) {
    std::string f = text.substr(6);
    auto fields = field_names(p);
    if (std::find(fields.begin(), fields.end(), f) == fields.end()) {
      throw InputError("unknown field '" + f + "'");
    }
    return FieldTarget{f};
  }
  if (text.rfind("var:", 0) == 0) {
    std::string rest = text.substr(4);
    auto d1 = rest.find('.');
    auto d2 = d1 == std::string::npos ? d1 : rest.find('.', d1 + 1);
    if (d2 == std::string::npos) throw InputError("expected var:Class.method.variable");
    VarTarget v{rest.substr(0, d1), rest.substr(d1 + 1, d2 - d1 - 1), rest.substr(d2 + 1)};
    const CommandPtr* body = method_body(p, v.class_name, v.method);
    if (!body) throw InputError("unknown method " + v.class_name + "." + v.method);
    if (v.var != kThis && !declared_vars(**body).count(v.var)) {
      throw InputError("variable '" + v.var + "' is not declared in " + v.class_name + "." +
                       v.method);
    }
    return v;
  }
  throw InputError("target must be field:<f> or var:<Class>.<method>.<x>");
}

int cmd_infer(const Common& c, const std::string& target_text, const std::string& semantics_text,
              const std::vector<std::string>& candidate_texts) {
  Loaded l = load_program(c.program);
  AnnotationTarget target = parse_target(l.program, target_text);
  ProtectionSemantics sem =
      semantics_text == "value" ? ProtectionSemantics::Value : ProtectionSemantics::Name;
  std::vector<ExprPtr> candidates;
  for (const auto& t : candidate_texts) {
    try {
      candidates.push_back(parse_expression(t, /*allow_itself=*/true));
    } catch (const ParseError& e) {
      throw InputError("candidate '" + t + "': " + e.what());
    }
  }
  if (candidates.empty()) candidates = default_candidates(l.program);

  Exploration x = explore(l.program, c.explore_options());
  Inference inf = infer_guards(l.program, x, target, sem, candidates);
  if (c.json()) {
    Json j = report_header("infer", c.program, l.digest);
    j["target"] = to_string(target);
    j["semantics"] = to_string(sem);
    j["exploration"] = stats_to_json(x);
    Json guards = Json::array();
    for (const auto& g : inf.guards) guards.push_back(to_string(*g));
    j["guards"] = guards;
    j["vacuous"] = inf.vacuous;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << stats_line(x) << "\n";
    std::cout << to_string(target) << " (" << to_string(sem) << "):";
    if (inf.guards.empty()) std::cout << " no guard";
    std::cout << "\n";
    for (const auto& g : inf.guards) std::cout << "  @GuardedBy(" << to_string(*g) << ")\n";
    if (inf.vacuous) std::cout << "  (vacuous: the target is never accessed)\n";
  }
  if (inf.guards.empty()) return kViolation;
  return inf.complete ? kOk : kBound;
}

int cmd_explore(const Common& c) {
  Loaded l = load_program(c.program);
  Exploration x = explore(l.program, c.explore_options());
  const auto traces = [&](Outcome o) { return x.count_traces(o); };
  if (c.json()) {
    Json j = report_header("explore", c.program, l.digest);
    j["exploration"] = stats_to_json(x);
    j["traces"] = Json{{"completed", traces(Outcome::Completed)},
                       {"deadlock", traces(Outcome::Deadlock)},
                       {"stuck", traces(Outcome::Stuck)},
                       {"bound_exhausted", traces(Outcome::BoundExhausted)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << stats_line(x) << "\n";
    std::cout << "traces: " << traces(Outcome::Completed) << " completed, "
              << traces(Outcome::Deadlock) << " deadlocked, " << traces(Outcome::Stuck)
              << " stuck, " << traces(Outcome::BoundExhausted) << " cut by the bound\n";
    for (std::size_t id = 0; id < x.nodes.size(); ++id) {
      const auto& n = x.nodes[id];
      if (n.leaf && (*n.leaf == Outcome::Deadlock || *n.leaf == Outcome::Stuck)) {
        std::cout << to_string(*n.leaf) << " after schedule " << schedule_text(x.schedule_to(id))
                  << ": " << n.diagnostic << "\n";
        break;
      }
    }
  }
  if (x.stats.stuck) return kStuck;
  if (x.stats.deadlocks) return kDeadlock;
  return x.complete() ? kOk : kBound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gbc: interpreter, explorer and @GuardedBy checker for the guarded-by calculus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  std::string scheduler = "leftmost";
  std::size_t max_steps = 10000;
  std::string annotations;
  std::string target;
  std::string semantics = "name";
  std::vector<std::string> candidates;

  auto* run = app.add_subcommand("run", "execute one schedule and print its trace");
  add_program(run, common);
  run->add_option("--scheduler", scheduler, "leftmost | roundrobin | seed:N")->capture_default_str();
  run->add_option("--max-steps", max_steps, "step limit")->capture_default_str();

  auto* check = app.add_subcommand("check", "check annotations over all schedules");
  add_program(check, common);
  check->add_option("annotations", annotations, "annotation file (.gba)")->required();
  add_exploration(check, common);

  auto* races = app.add_subcommand("races", "report data races over all schedules");
  add_program(races, common);
  add_exploration(races, common);

  auto* infer = app.add_subcommand("infer", "infer guards for a field or variable");
  add_program(infer, common);
  infer->add_option("--target", target, "field:<f> or var:<Class>.<method>.<x>")->required();
  infer->add_option("--semantics", semantics, "name | value")
      ->check(CLI::IsMember({"name", "value"}))
      ->capture_default_str();
  infer->add_option("--candidate", candidates, "guard candidate (repeatable)");
  add_exploration(infer, common);

  auto* expl = app.add_subcommand("explore", "enumerate all schedules up to the bound");
  add_program(expl, common);
  add_exploration(expl, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*run) return cmd_run(common, scheduler, max_steps);
    if (*check) return cmd_check(common, annotations);
    if (*races) return cmd_races(common);
    if (*infer) return cmd_infer(common, target, semantics, candidates);
    if (*expl) return cmd_explore(common);
  } catch (const InputError& e) {
    std::cerr << "gbc: " << e.what() << "\n";
    return kInput;
  } catch (const ResourceLimitError& e) {
    std::cerr << "gbc: " << e.what() << "\n";
    return kBound;
  } catch (const LockInvariantError& e) {
    std::cerr << "gbc: lock invariant violated: " << e.what() << "\n";
    return kInternal;
  } catch (const InternalConsistencyError& e) {
    std::cerr << "gbc: internal consistency failure: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
