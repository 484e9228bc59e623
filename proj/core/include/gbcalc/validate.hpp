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

#include <string>
#include <vector>

#include "gbcalc/syntax.hpp"

namespace gbcalc {

enum class ViolationKind {
  MissingMain,
  DuplicateDeclaration,
  FreeVariable,
  LockInSource,
  UnknownParent,
  CyclicInheritance,
  ItselfInProgram,
};

struct Violation {
  ViolationKind kind;
  std::string class_name;
  std::string method;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

std::string to_string(ViolationKind kind);
std::string to_string(const Violation& v);

/// Static well-formedness: main exists, no variable is declared twice in a
/// body, the only free variable of a body is `this`, no lock/unlock appears in
/// source, and every superclass chain is finite and ends in Object.
ValidationReport validate_program(const Program& p);

/// Root variable names mentioned by an expression, in first-occurrence order.
std::vector<std::string> free_variables(const Expr& e);

}  // namespace gbcalc
