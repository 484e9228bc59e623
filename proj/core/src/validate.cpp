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

#include "gbcalc/validate.hpp"

#include <algorithm>
#include <set>

#include "gbcalc/printer.hpp"

namespace gbcalc {

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::MissingMain: return "missing-main";
    case ViolationKind::DuplicateDeclaration: return "duplicate-declaration";
    case ViolationKind::FreeVariable: return "free-variable";
    case ViolationKind::LockInSource: return "lock-in-source";
    case ViolationKind::UnknownParent: return "unknown-parent";
    case ViolationKind::CyclicInheritance: return "cyclic-inheritance";
    case ViolationKind::ItselfInProgram: return "itself-in-program";
  }
  return "unknown";
}

std::string to_string(const Violation& v) {
  std::string where = v.class_name.empty() ? "" : v.class_name;
  if (!v.method.empty()) where += "." + v.method;
  return to_string(v.kind) + (where.empty() ? "" : " in " + where) + ": " + v.detail;
}

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, FieldExpr>) {
          collect_vars(*n.receiver, out);
        } else {
          for (const auto& [f, init] : n.inits) collect_vars(*init, out);
        }
      },
      e.node);
}

class BodyChecker {
 public:
  BodyChecker(const std::string& cls, const std::string& method, ValidationReport& report)
      : cls_(cls), method_(method), report_(report) {
    declared_.insert(kThis);
  }

  void walk(const Command& c) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, DeclCmd>) {
            uses(*n.value);
            if (!declared_.insert(n.var).second) {
              add(ViolationKind::DuplicateDeclaration, "variable '" + n.var +
                                                           "' declared twice");
            }
          } else if constexpr (std::is_same_v<T, AssignVarCmd>) {
            use_name(n.var);
            uses(*n.value);
          } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
            use_name(n.var);
            uses(*n.value);
          } else if constexpr (std::is_same_v<T, SeqCmd>) {
            walk(*n.first);
            walk(*n.rest);
          } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
            uses(*n.receiver);
          } else if constexpr (std::is_same_v<T, SyncCmd>) {
            uses(*n.guard);
            walk(*n.body);
          } else if constexpr (std::is_same_v<T, LockCmd> || std::is_same_v<T, UnlockCmd>) {
            add(ViolationKind::LockInSource, to_term(c));
          }
        },
        c.node);
  }

 private:
  void uses(const Expr& e) {
    std::vector<std::string> vars;
    collect_vars(e, vars);
    for (const auto& v : vars) use_name(v);
  }

  void use_name(const std::string& v) {
    if (v == kItself) {
      add(ViolationKind::ItselfInProgram, "'itself' is only meaningful in guards");
      return;
    }
    if (!declared_.count(v) && reported_free_.insert(v).second) {
      add(ViolationKind::FreeVariable, "variable '" + v + "' used before declaration");
    }
  }

  void add(ViolationKind kind, std::string detail) {
    report_.violations.push_back({kind, cls_, method_, std::move(detail)});
  }

  std::string cls_;
  std::string method_;
  ValidationReport& report_;
  std::set<std::string> declared_;
  std::set<std::string> reported_free_;
};

}  // namespace

std::vector<std::string> free_variables(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

ValidationReport validate_program(const Program& p) {
  ValidationReport report;
  if (!p.has_main()) {
    report.violations.push_back({ViolationKind::MissingMain, "", "", "no main block"});
  }
  for (const auto& [name, cls] : p.classes) {
    if (cls.parent != kObjectClass && !p.classes.count(cls.parent)) {
      report.violations.push_back(
          {ViolationKind::UnknownParent, name, "", "superclass '" + cls.parent + "'"});
    } else {
      std::set<std::string> seen{name};
      std::string cur = cls.parent;
      while (cur != kObjectClass && p.classes.count(cur)) {
        if (!seen.insert(cur).second) {
          report.violations.push_back(
              {ViolationKind::CyclicInheritance, name, "", "chain revisits '" + cur + "'"});
          break;
        }
        cur = p.classes.at(cur).parent;
      }
    }
    for (const auto& [m, body] : cls.methods) {
      BodyChecker checker(name, m, report);
      checker.walk(*body);
    }
  }
  return report;
}

}  // namespace gbcalc
