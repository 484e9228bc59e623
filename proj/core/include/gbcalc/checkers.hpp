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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbcalc/explorer.hpp"

namespace gbcalc {

enum class VerdictStatus { Violated, HoldsUpToBound, Holds };

std::string to_string(VerdictStatus s);

struct Finding {
  /// Thread choices from the initial configuration; the last one fires the
  /// offending step.
  std::vector<std::size_t> schedule;
  std::size_t step_index = 0;
  std::size_t thread = 0;
  std::optional<Location> location;
  std::string explanation;
  /// Value checks only: the dereferenced location is bound to the target
  /// only later in the trace.
  bool early_dereference = false;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Holds;
  std::size_t bound = 0;
  /// Program points the definition quantifies over that were actually met.
  std::size_t check_points = 0;
  /// Sorted by depth; the first is the reported counterexample.
  std::vector<Finding> findings;
  std::size_t finding_count = 0;

  bool vacuous() const { return check_points == 0; }
  const Finding* counterexample() const { return findings.empty() ? nullptr : &findings.front(); }
};

// Protection checkers. `guard` may use `this` and `itself`.
Verdict check_name_var(const Program& p, const Exploration& x, const VarTarget& target,
                       const Expr& guard);
Verdict check_name_field(const Program& p, const Exploration& x, const std::string& field,
                         const Expr& guard);
Verdict check_value_var(const Program& p, const Exploration& x, const VarTarget& target,
                        const Expr& guard);
Verdict check_value_field(const Program& p, const Exploration& x, const std::string& field,
                          const Expr& guard);

/// Dispatches on the annotation's target kind and semantics.
Verdict check_annotation(const Program& p, const Exploration& x, const Annotation& a);

struct Race {
  std::size_t node = 0;
  std::vector<std::size_t> schedule;  // reaches the racy configuration
  Location loc;
  std::string field;
  std::size_t thread_a = 0;  // writer
  std::size_t thread_b = 0;
  DerefMode mode_b = DerefMode::Read;
};

struct RaceReport {
  std::vector<Race> races;
  bool complete = true;

  bool empty() const { return races.empty(); }
  /// Distinct (location, field) pairs.
  std::vector<std::pair<Location, std::string>> sites() const;
};

RaceReport detect_races(const Exploration& x);

Verdict check_nonaliased(const Program& p, const Exploration& x, const AnnotationTarget& target);

struct GuardCheck {
  bool ok = true;
  std::vector<std::string> diagnostics;
};

GuardCheck check_guard_wellformed(const Expr& guard, ProtectionSemantics semantics,
                                  const AnnotationTarget& target);

/// Locations bound to `target` in node `id` or any configuration before it.
std::vector<Location> bindings_up_to(const Exploration& x, const AnnotationTarget& target,
                                     std::size_t id);

/// Raised when the race-freedom hypotheses hold yet a race at a protected
/// location was found.
class SoundnessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TheoremReport {
  Annotation annotation;
  GuardCheck wellformed;
  /// Only for name protection.
  std::optional<Verdict> nonaliased;
  Verdict protection;
  /// Races at locations bound to the target.
  RaceReport restricted;
  bool hypotheses_hold = false;
  VerdictStatus hypotheses_status = VerdictStatus::Violated;
  std::string explanation;
};

/// Checks the race-freedom hypotheses for `a` and the races at its locations.
/// Throws SoundnessError if the hypotheses hold and a restricted race exists.
TheoremReport verify_race_freedom(const Program& p, const Exploration& x, const Annotation& a);

struct Inference {
  std::vector<ExprPtr> guards;
  bool vacuous = false;
  bool complete = true;
};

/// `itself`, `this` and field paths of length one and two rooted at them.
std::vector<ExprPtr> default_candidates(const Program& p);

Inference infer_guards(const Program& p, const Exploration& x, const AnnotationTarget& target,
                       ProtectionSemantics semantics, const std::vector<ExprPtr>& candidates);

/// Runs many checks against one exploration, sharing the work that does not
/// depend on the guard: binding closures per target, the race report and
/// non-aliasing verdicts. The program and exploration must outlive it.
class CheckSession {
 public:
  CheckSession(const Program& p, const Exploration& x);
  ~CheckSession();
  CheckSession(const CheckSession&) = delete;
  CheckSession& operator=(const CheckSession&) = delete;

  Verdict check(const Annotation& a);
  Verdict nonaliased(const AnnotationTarget& target);
  const RaceReport& races();
  TheoremReport verify(const Annotation& a);
  Inference infer(const AnnotationTarget& target, ProtectionSemantics semantics,
                  const std::vector<ExprPtr>& candidates);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gbcalc
