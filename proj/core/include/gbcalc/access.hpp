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

#include <compare>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbcalc/semantics.hpp"
#include "gbcalc/syntax.hpp"

namespace gbcalc {

using ExprSet = std::set<ExprPtr, ExprPtrLess>;

/// Expressions accessed by one reduction step of `c`. Purely syntactic.
ExprSet acc(const Expr& e);
ExprSet acc(const Command& c);

/// True when some access in `s` is the variable `x`.
bool accesses_var(const ExprSet& s, const std::string& x);

/// Containers E' of every access E'.f in `s`.
std::vector<ExprPtr> field_containers(const ExprSet& s, const std::string& f);

enum class DerefMode { Read, Write };

struct DerefToken {
  Location loc;
  std::string field;
  DerefMode mode = DerefMode::Read;

  friend auto operator<=>(const DerefToken&, const DerefToken&) = default;
};

/// `l0.f->` for reads, `l0.f<-` for writes.
std::string to_string(const DerefToken& t);

using DerefSet = std::set<DerefToken>;

class DerefError : public std::runtime_error {
 public:
  DerefError(const Expr& where, const EvalError& cause);
};

/// The expression a command evaluates when it fires (the right-hand side,
/// receiver or guard), or null for commands that evaluate nothing.
const Expr* evaluated_expr(const Command& head);

/// The allocation plan the step for `head` would use.
AllocationPlan step_plan(const Command& head, std::uint32_t next_location);

/// Dereferences of one reduction step. Sub-evaluations run on scratch memory
/// and use `plan` for any object creation, so nothing is committed. Throws
/// DerefError if a required sub-evaluation is undefined.
DerefSet deref(const Program& p, const Command& c, const Environment& env, const Memory& mem,
               const AllocationPlan& plan);
DerefSet deref(const Program& p, const Expr& e, const Environment& env, const Memory& mem,
               const AllocationPlan& plan);

/// Convenience overload that plans from `next_location`.
DerefSet deref(const Program& p, const Command& c, const Environment& env, const Memory& mem,
               std::uint32_t next_location);

std::set<Location> derefloc(const DerefSet& d);

struct StepEvents {
  ExprSet accessed;
  DerefSet derefs;
  Lockset locks_held;
};

/// Events of thread n's next step against the pre-configuration `c`.
/// A thread with an empty stack has no events.
StepEvents events_of_step(const Program& p, const Configuration& c, std::size_t n);

}  // namespace gbcalc
