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

#include "gbcalc/access.hpp"

#include "gbcalc/printer.hpp"

namespace gbcalc {

namespace {

void acc_into(const ExprPtr& e, ExprSet& out);

void acc_node(const Expr& e, ExprSet& out) {
  if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    out.insert(make_var(v->name));
  } else if (const auto* f = std::get_if<FieldExpr>(&e.node)) {
    acc_into(f->receiver, out);
  } else {
    for (const auto& [name, init] : std::get<NewExpr>(e.node).inits) acc_into(init, out);
  }
}

void acc_into(const ExprPtr& e, ExprSet& out) {
  acc_node(*e, out);
  if (std::holds_alternative<FieldExpr>(e->node)) out.insert(e);
}

}  // namespace

ExprSet acc(const Expr& e) {
  ExprSet out;
  acc_node(e, out);
  if (std::holds_alternative<FieldExpr>(e.node)) {
    out.insert(std::make_shared<const Expr>(e));
  }
  return out;
}

ExprSet acc(const Command& c) {
  ExprSet out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd>) {
          acc_into(n.value, out);
        } else if constexpr (std::is_same_v<T, AssignVarCmd>) {
          out.insert(make_var(n.var));
          acc_into(n.value, out);
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          acc_into(make_field(make_var(n.var), n.field), out);
          acc_into(n.value, out);
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          out = acc(*n.first);
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          acc_into(n.receiver, out);
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          // sync(x) accesses nothing, sync(E.f) only E, sync(new ...) its inits.
          if (const auto* f = std::get_if<FieldExpr>(&n.guard->node)) {
            acc_into(f->receiver, out);
          } else if (std::holds_alternative<NewExpr>(n.guard->node)) {
            acc_into(n.guard, out);
          }
        }
      },
      c.node);
  return out;
}

bool accesses_var(const ExprSet& s, const std::string& x) {
  for (const auto& e : s) {
    if (const auto* v = std::get_if<VarExpr>(&e->node); v && v->name == x) return true;
  }
  return false;
}

std::vector<ExprPtr> field_containers(const ExprSet& s, const std::string& f) {
  std::vector<ExprPtr> out;
  for (const auto& e : s) {
    if (const auto* fe = std::get_if<FieldExpr>(&e->node); fe && fe->field == f) {
      out.push_back(fe->receiver);
    }
  }
  return out;
}

std::string to_string(const DerefToken& t) {
  return to_string(t.loc) + "." + t.field + (t.mode == DerefMode::Write ? "<-" : "->");
}

DerefError::DerefError(const Expr& where, const EvalError& cause)
    : std::runtime_error("cannot evaluate " + to_string(where) + ": " + cause.message()) {}

const Expr* evaluated_expr(const Command& head) {
  return std::visit(
      [](const auto& n) -> const Expr* {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd> || std::is_same_v<T, AssignVarCmd> ||
                      std::is_same_v<T, AssignFieldCmd>) {
          return n.value.get();
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          return n.receiver.get();
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          return n.guard.get();
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          return evaluated_expr(*n.first);
        } else {
          return nullptr;
        }
      },
      head.node);
}

AllocationPlan step_plan(const Command& head, std::uint32_t next_location) {
  if (const Expr* e = evaluated_expr(head)) return plan_allocations(*e, next_location);
  AllocationPlan plan;
  plan.next_after = next_location;
  return plan;
}

DerefSet deref(const Program& p, const Expr& e, const Environment& env, const Memory& mem,
               const AllocationPlan& plan) {
  DerefSet out;
  if (const auto* f = std::get_if<FieldExpr>(&e.node)) {
    EvalResult r = eval_planned(p, *f->receiver, env, mem, plan);
    if (const auto* err = std::get_if<EvalError>(&r)) throw DerefError(*f->receiver, *err);
    out.insert({std::get<Evaluated>(r).loc, f->field, DerefMode::Read});
    out.merge(deref(p, *f->receiver, env, mem, plan));
  } else if (const auto* n = std::get_if<NewExpr>(&e.node)) {
    for (const auto& [name, init] : n->inits) out.merge(deref(p, *init, env, mem, plan));
  }
  return out;
}

DerefSet deref(const Program& p, const Command& c, const Environment& env, const Memory& mem,
               const AllocationPlan& plan) {
  return std::visit(
      [&](const auto& n) -> DerefSet {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd> || std::is_same_v<T, AssignVarCmd>) {
          return deref(p, *n.value, env, mem, plan);
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          auto target = env.get(n.var);
          if (!target) {
            throw DerefError(*make_var(n.var), EvalError{EvalErrorKind::UndefinedVariable, n.var});
          }
          DerefSet out = deref(p, *n.value, env, mem, plan);
          out.insert({*target, n.field, DerefMode::Write});
          return out;
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          return deref(p, *n.first, env, mem, plan);
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          return deref(p, *n.receiver, env, mem, plan);
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          return deref(p, *n.guard, env, mem, plan);
        } else {
          return {};
        }
      },
      c.node);
}

DerefSet deref(const Program& p, const Command& c, const Environment& env, const Memory& mem,
               std::uint32_t next_location) {
  return deref(p, c, env, mem, step_plan(c, next_location));
}

std::set<Location> derefloc(const DerefSet& d) {
  std::set<Location> out;
  for (const auto& t : d) out.insert(t.loc);
  return out;
}

StepEvents events_of_step(const Program& p, const Configuration& c, std::size_t n) {
  const Thread& t = c.thread(n);
  StepEvents ev;
  ev.locks_held = t.locks;
  if (t.stack.empty()) return ev;
  const ActivationRecord& top = t.top();
  ev.accessed = acc(*top.continuation);
  ev.derefs = deref(p, *top.continuation, top.env, c.memory, c.next_location);
  return ev;
}

}  // namespace gbcalc
