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

#include "gbcalc/semantics.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>

#include "gbcalc/printer.hpp"

namespace gbcalc {

// ---------------------------------------------------------------------------
// Environment

Environment::Environment(std::initializer_list<Entry> entries) {
  for (const auto& [name, loc] : entries) set(name, loc);
}

std::optional<Location> Environment::get(std::string_view name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, std::string_view n) { return e.first < n; });
  if (it == entries_.end() || it->first != name) return std::nullopt;
  return it->second;
}

void Environment::set(std::string name, Location loc) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, const std::string& n) { return e.first < n; });
  if (it != entries_.end() && it->first == name) {
    it->second = loc;
  } else {
    entries_.insert(it, {std::move(name), loc});
  }
}

Environment Environment::with(std::string name, Location loc) const {
  Environment out = *this;
  out.set(std::move(name), loc);
  return out;
}

// ---------------------------------------------------------------------------
// Memory

Memory::Memory() : slots_(std::make_shared<const std::vector<ObjectPtr>>()) {}

const Object* Memory::find(Location loc) const {
  if (loc.index >= slots_->size()) return nullptr;
  return (*slots_)[loc.index].get();
}

const Object& Memory::at(Location loc) const {
  const Object* o = find(loc);
  if (!o) throw std::out_of_range("no object at " + to_string(loc));
  return *o;
}

Memory Memory::with(Location loc, Object obj) const {
  return with(loc, std::make_shared<const Object>(std::move(obj)));
}

Memory Memory::with(Location loc, ObjectPtr obj) const {
  auto slots = std::make_shared<std::vector<ObjectPtr>>(*slots_);
  if (slots->size() <= loc.index) slots->resize(loc.index + 1);
  (*slots)[loc.index] = std::move(obj);
  Memory out;
  out.slots_ = std::move(slots);
  return out;
}

std::vector<Location> Memory::locations() const {
  std::vector<Location> out;
  for (std::uint32_t i = 0; i < slots_->size(); ++i) {
    if ((*slots_)[i]) out.push_back(Location{i});
  }
  return out;
}

bool operator==(const Memory& a, const Memory& b) {
  if (a.slots_ == b.slots_) return true;
  const auto& x = *a.slots_;
  const auto& y = *b.slots_;
  std::size_t n = std::max(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Object* ox = i < x.size() ? x[i].get() : nullptr;
    const Object* oy = i < y.size() ? y[i].get() : nullptr;
    if (ox == oy) continue;
    if (!ox || !oy || !(*ox == *oy)) return false;
  }
  return true;
}

bool operator==(const ActivationRecord& a, const ActivationRecord& b) {
  if (a.class_name != b.class_name || a.method != b.method || !(a.env == b.env)) return false;
  if (a.continuation == b.continuation) return true;
  return a.continuation && b.continuation && *a.continuation == *b.continuation;
}

// ---------------------------------------------------------------------------
// Lockset

bool Lockset::contains(Location l) const {
  return std::binary_search(locs_.begin(), locs_.end(), l);
}

void Lockset::insert(Location l) {
  auto it = std::lower_bound(locs_.begin(), locs_.end(), l);
  if (it == locs_.end() || *it != l) locs_.insert(it, l);
}

void Lockset::erase(Location l) {
  auto it = std::lower_bound(locs_.begin(), locs_.end(), l);
  if (it != locs_.end() && *it == l) locs_.erase(it);
}

// ---------------------------------------------------------------------------
// Hashing and printing

namespace {

inline void mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

void mix_env(std::size_t& h, const Environment& env) {
  for (const auto& [name, loc] : env.entries()) {
    mix(h, std::hash<std::string>{}(name));
    mix(h, loc.index);
  }
  mix(h, env.size());
}

}  // namespace

std::size_t hash_value(const Configuration& c) {
  std::size_t h = c.threads.size();
  for (const auto& t : c.threads) {
    mix(h, t.stack.size());
    for (const auto& r : t.stack) {
      mix(h, std::hash<std::string>{}(r.class_name));
      mix(h, std::hash<std::string>{}(r.method));
      mix(h, hash_value(*r.continuation));
      mix_env(h, r.env);
    }
    for (Location l : t.locks.items()) mix(h, l.index);
    mix(h, 0xfeed);
  }
  for (Location l : c.memory.locations()) {
    const Object& o = c.memory.at(l);
    mix(h, l.index);
    mix(h, std::hash<std::string>{}(o.class_name));
    mix_env(h, o.fields);
    mix(h, o.locks);
  }
  mix(h, c.next_location);
  return h;
}

std::string to_string(const Lockset& ls) {
  std::string out = "{";
  for (std::size_t i = 0; i < ls.items().size(); ++i) {
    if (i) out += ",";
    out += to_string(ls.items()[i]);
  }
  return out + "}";
}

std::string to_string(const Environment& env) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, loc] : env.entries()) {
    if (!first) out += ",";
    first = false;
    out += name + "->" + to_string(loc);
  }
  return out + "}";
}

std::string to_string(const Object& o) {
  return "<" + o.class_name + "," + to_string(o.fields) + "," + std::to_string(o.locks) + ">";
}

// ---------------------------------------------------------------------------
// Evaluation

std::string EvalError::message() const {
  switch (kind) {
    case EvalErrorKind::UndefinedVariable: return "undefined variable '" + detail + "'";
    case EvalErrorKind::UndefinedField: return "undefined field " + detail;
    case EvalErrorKind::UnknownClass: return "unknown class '" + detail + "'";
    case EvalErrorKind::DanglingLocation: return "dangling location " + detail;
  }
  return detail;
}

std::optional<Location> AllocationPlan::find(const NewExpr* node) const {
  for (const auto& [n, loc] : slots) {
    if (n == node) return loc;
  }
  return std::nullopt;
}

AllocationPlan plan_allocations(const Expr& e, std::uint32_t next_location) {
  AllocationPlan plan;
  std::deque<const Expr*> queue{&e};
  std::uint32_t next = next_location;
  while (!queue.empty()) {
    const Expr* cur = queue.front();
    queue.pop_front();
    if (const auto* f = std::get_if<FieldExpr>(&cur->node)) {
      queue.push_back(f->receiver.get());
    } else if (const auto* n = std::get_if<NewExpr>(&cur->node)) {
      plan.slots.emplace_back(n, Location{next++});
      for (const auto& [field, init] : n->inits) queue.push_back(init.get());
    }
  }
  plan.next_after = next;
  return plan;
}

namespace {

EvalResult eval_with(const Program& p, const Expr& e, const Environment& env, const Memory& mem,
                     const AllocationPlan& plan) {
  if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    auto l = env.get(v->name);
    if (!l) return EvalError{EvalErrorKind::UndefinedVariable, v->name};
    return Evaluated{*l, mem, plan.next_after};
  }
  if (const auto* f = std::get_if<FieldExpr>(&e.node)) {
    EvalResult r = eval_with(p, *f->receiver, env, mem, plan);
    if (std::holds_alternative<EvalError>(r)) return r;
    auto& ev = std::get<Evaluated>(r);
    const Object* o = ev.memory.find(ev.loc);
    if (!o) return EvalError{EvalErrorKind::DanglingLocation, to_string(ev.loc)};
    auto target = o->fields.get(f->field);
    if (!target) {
      return EvalError{EvalErrorKind::UndefinedField,
                       "'" + f->field + "' of " + o->class_name + " at " + to_string(ev.loc)};
    }
    ev.loc = *target;
    return r;
  }
  const auto& n = std::get<NewExpr>(e.node);
  if (!p.has_class(n.class_name)) return EvalError{EvalErrorKind::UnknownClass, n.class_name};
  Memory cur = mem;
  Environment fields;
  for (const auto& [name, init] : n.inits) {
    EvalResult r = eval_with(p, *init, env, cur, plan);
    if (std::holds_alternative<EvalError>(r)) return r;
    auto& ev = std::get<Evaluated>(r);
    fields.set(name, ev.loc);
    cur = std::move(ev.memory);
  }
  auto loc = plan.find(&n);
  if (!loc) throw std::logic_error("object creation outside its allocation plan");
  if (cur.contains(*loc)) {
    throw InternalConsistencyError("fresh location " + to_string(*loc) + " already allocated");
  }
  cur = cur.with(*loc, Object{n.class_name, std::move(fields), 0});
  return Evaluated{*loc, std::move(cur), plan.next_after};
}

}  // namespace

EvalResult eval_expr(const Program& p, const Expr& e, const Environment& env, const Memory& mem,
                     std::uint32_t next_location) {
  AllocationPlan plan = plan_allocations(e, next_location);
  return eval_with(p, e, env, mem, plan);
}

EvalResult eval_planned(const Program& p, const Expr& e, const Environment& env,
                        const Memory& mem, const AllocationPlan& plan) {
  return eval_with(p, e, env, mem, plan);
}

// ---------------------------------------------------------------------------
// Rules

namespace {

constexpr std::array<std::pair<Rule, const char*>, kRuleCount> kRuleNames = {{
    {Rule::Decl, "[decl]"},
    {Rule::VarAssign, "[var-ass]"},
    {Rule::FieldAssign, "[field-ass]"},
    {Rule::Seq, "[seq]"},
    {Rule::SeqSkip, "[seq-skip]"},
    {Rule::Invoc, "[invoc]"},
    {Rule::Spawn, "[spawn]"},
    {Rule::Sync, "[sync]"},
    {Rule::AcquireLock, "[acquire-lock]"},
    {Rule::ReentrantLock, "[reentrant-lock]"},
    {Rule::DecreaseLock, "[decrease-lock]"},
    {Rule::ReleaseLock, "[release-lock]"},
    {Rule::Push, "[push]"},
    {Rule::Pop, "[pop]"},
    {Rule::ParL, "[par-l]"},
    {Rule::ParR, "[par-r]"},
    {Rule::EndL, "[end-l]"},
    {Rule::EndR, "[end-r]"},
}};

}  // namespace

std::string rule_name(Rule r) {
  for (const auto& [rule, name] : kRuleNames) {
    if (rule == r) return name;
  }
  return "[?]";
}

std::optional<Rule> rule_from_name(std::string_view name) {
  for (const auto& [rule, n] : kRuleNames) {
    if (name == n) return rule;
  }
  return std::nullopt;
}

Configuration initial_config(const Program& p) {
  Configuration c;
  Thread t;
  t.stack.push_back(
      ActivationRecord{kMainClass, kMainMethod, p.main_body(), Environment{{kThis, kInitLocation}}});
  c.threads.push_back(std::move(t));
  c.memory = Memory().with(kInitLocation, Object{kMainClass, {}, 0});
  c.next_location = kInitLocation.index + 1;
  return c;
}

std::size_t live_thread_count(const Configuration& c) {
  return static_cast<std::size_t>(std::count_if(
      c.threads.begin(), c.threads.end(), [](const Thread& t) { return !t.stack.empty(); }));
}

namespace {

StepAttempt stuck(Rule r, std::string why) {
  StepAttempt a;
  a.status = ThreadStatus::Stuck;
  a.diagnostic = rule_name(r) + " " + why;
  return a;
}

StepAttempt stuck(Rule r, const EvalError& e) { return stuck(r, e.message()); }

// Wrappers that locate thread n in the right-nested pool t1 || (t2 || ...).
std::vector<Rule> pool_prefix(std::size_t n, std::size_t count) {
  std::vector<Rule> out(n - 1, Rule::ParR);
  if (n < count) out.push_back(Rule::ParL);
  return out;
}

CommandPtr then(CommandPtr c, const CommandPtr& rest) {
  return rest ? make_seq(std::move(c), rest) : c;
}

struct Resolved {
  std::string class_name;
  CommandPtr body;
};

std::optional<Resolved> resolve_method(const Program& p, const Memory& mem, Location l,
                                       const std::string& method, std::string& why) {
  const Object* o = mem.find(l);
  if (!o) {
    why = "dangling receiver " + to_string(l);
    return std::nullopt;
  }
  auto owner = lookup(p, o->class_name, method);
  if (!owner) {
    why = "method not found: " + o->class_name + "." + method + "()";
    return std::nullopt;
  }
  return Resolved{*owner, *method_body(p, *owner, method)};
}

}  // namespace

StepAttempt try_step(const Program& p, const Configuration& c, std::size_t n,
                     const StepOptions& opts) {
  if (n == 0 || n > c.threads.size()) {
    throw std::out_of_range("thread index " + std::to_string(n) + " out of range");
  }
  const Thread& t = c.threads[n - 1];
  const std::size_t count = c.threads.size();

  if (t.stack.empty()) {
    if (count < 2) {
      StepAttempt a;
      a.status = ThreadStatus::Terminated;
      a.diagnostic = "thread finished";
      return a;
    }
    StepResult r{c, n < count ? Rule::EndL : Rule::EndR, {}};
    r.next.threads.erase(r.next.threads.begin() + static_cast<std::ptrdiff_t>(n - 1));
    if (r.rule == Rule::EndL) {
      r.derivation.assign(n - 1, Rule::ParR);
    } else {
      r.derivation.assign(count - 2, Rule::ParR);
    }
    r.derivation.push_back(r.rule);
    return StepAttempt{ThreadStatus::Enabled, std::move(r), {}};
  }

  const ActivationRecord& top = t.top();
  const CommandPtr& cont = top.continuation;
  const auto* seq = std::get_if<SeqCmd>(&cont->node);
  const CommandPtr& head = seq ? seq->first : cont;
  const CommandPtr rest = seq ? seq->rest : nullptr;

  StepResult r{c, Rule::Pop, pool_prefix(n, count)};
  Thread& nt = r.next.threads[n - 1];
  ActivationRecord& rec = nt.stack.back();
  const bool deep = t.stack.size() > 1;

  auto finish = [&](Rule leaf, bool record_level) {
    r.rule = leaf;
    if (record_level) {
      if (deep) r.derivation.push_back(Rule::Push);
      if (seq) r.derivation.push_back(Rule::Seq);
    }
    r.derivation.push_back(leaf);
    return StepAttempt{ThreadStatus::Enabled, std::move(r), {}};
  };

  // Whole-stack rules first.
  if (is_skip(*cont)) {
    nt.stack.pop_back();
    return finish(Rule::Pop, false);
  }
  if (seq && is_skip(*head)) {
    rec.continuation = rest;
    r.rule = Rule::SeqSkip;
    if (deep) r.derivation.push_back(Rule::Push);
    r.derivation.push_back(Rule::SeqSkip);
    return StepAttempt{ThreadStatus::Enabled, std::move(r), {}};
  }
  if (const auto* call = std::get_if<CallCmd>(&head->node)) {
    if (!seq) return stuck(Rule::Invoc, "call is not followed by a continuation");
    EvalResult er = eval_expr(p, *call->receiver, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::Invoc, *err);
    auto& ev = std::get<Evaluated>(er);
    std::string why;
    auto m = resolve_method(p, ev.memory, ev.loc, call->method, why);
    if (!m) return stuck(Rule::Invoc, why);
    rec.continuation = rest;
    nt.stack.push_back(ActivationRecord{m->class_name, call->method, m->body,
                                        Environment{{kThis, ev.loc}}});
    r.next.memory = std::move(ev.memory);
    r.next.next_location = ev.next_location;
    return finish(Rule::Invoc, false);
  }
  if (const auto* sp = std::get_if<SpawnCmd>(&head->node)) {
    if (!seq) return stuck(Rule::Spawn, "spawn is not followed by a continuation");
    EvalResult er = eval_expr(p, *sp->receiver, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::Spawn, *err);
    auto& ev = std::get<Evaluated>(er);
    std::string why;
    auto m = resolve_method(p, ev.memory, ev.loc, sp->method, why);
    if (!m) return stuck(Rule::Spawn, why);
    rec.continuation = rest;
    Thread child;
    child.stack.push_back(
        ActivationRecord{m->class_name, sp->method, m->body, Environment{{kThis, ev.loc}}});
    r.next.threads.insert(r.next.threads.begin() + static_cast<std::ptrdiff_t>(n - 1),
                          std::move(child));
    r.next.memory = std::move(ev.memory);
    r.next.next_location = ev.next_location;
    return finish(Rule::Spawn, false);
  }

  // Single-record rules on the head, lifted by [seq] and [push].
  auto after = [&](CommandPtr replaced) { rec.continuation = then(std::move(replaced), rest); };

  if (const auto* d = std::get_if<DeclCmd>(&head->node)) {
    if (top.env.contains(d->var)) return stuck(Rule::Decl, "variable '" + d->var + "' already declared");
    EvalResult er = eval_expr(p, *d->value, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::Decl, *err);
    auto& ev = std::get<Evaluated>(er);
    rec.env.set(d->var, ev.loc);
    after(make_skip());
    r.next.memory = std::move(ev.memory);
    r.next.next_location = ev.next_location;
    return finish(Rule::Decl, true);
  }
  if (const auto* a = std::get_if<AssignVarCmd>(&head->node)) {
    if (!top.env.contains(a->var)) return stuck(Rule::VarAssign, "variable '" + a->var + "' undeclared");
    EvalResult er = eval_expr(p, *a->value, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::VarAssign, *err);
    auto& ev = std::get<Evaluated>(er);
    rec.env.set(a->var, ev.loc);
    after(make_skip());
    r.next.memory = std::move(ev.memory);
    r.next.next_location = ev.next_location;
    return finish(Rule::VarAssign, true);
  }
  if (const auto* a = std::get_if<AssignFieldCmd>(&head->node)) {
    auto target = top.env.get(a->var);
    if (!target) return stuck(Rule::FieldAssign, "variable '" + a->var + "' undeclared");
    EvalResult er = eval_expr(p, *a->value, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::FieldAssign, *err);
    auto& ev = std::get<Evaluated>(er);
    const Object* o = c.memory.find(*target);
    if (!o) return stuck(Rule::FieldAssign, "dangling location " + to_string(*target));
    Object updated = *o;
    updated.fields.set(a->field, ev.loc);
    after(make_skip());
    r.next.memory = ev.memory.with(*target, std::move(updated));
    r.next.next_location = ev.next_location;
    return finish(Rule::FieldAssign, true);
  }
  if (const auto* s = std::get_if<SyncCmd>(&head->node)) {
    EvalResult er = eval_expr(p, *s->guard, top.env, c.memory, c.next_location);
    if (auto* err = std::get_if<EvalError>(&er)) return stuck(Rule::Sync, *err);
    auto& ev = std::get<Evaluated>(er);
    after(make_seq(make_lock(ev.loc), make_seq(s->body, make_unlock(ev.loc))));
    r.next.memory = std::move(ev.memory);
    r.next.next_location = ev.next_location;
    return finish(Rule::Sync, true);
  }
  if (const auto* lk = std::get_if<LockCmd>(&head->node)) {
    const Object* o = c.memory.find(lk->loc);
    if (!o) throw InternalConsistencyError("lock on dangling " + to_string(lk->loc));
    Object updated = *o;
    Rule leaf;
    if (t.locks.contains(lk->loc)) {
      leaf = Rule::ReentrantLock;
    } else if (o->locks == 0) {
      leaf = Rule::AcquireLock;
      nt.locks.insert(lk->loc);
    } else {
      StepAttempt a;
      a.status = ThreadStatus::Blocked;
      a.diagnostic = "lock(" + to_string(lk->loc) + ") is held by another thread";
      return a;
    }
    ++updated.locks;
    after(make_skip());
    r.next.memory = c.memory.with(lk->loc, std::move(updated));
    return finish(leaf, true);
  }
  if (const auto* ul = std::get_if<UnlockCmd>(&head->node)) {
    const Object* o = c.memory.find(ul->loc);
    if (!o) throw InternalConsistencyError("unlock on dangling " + to_string(ul->loc));
    if (o->locks == 0) {
      throw InternalConsistencyError("unlock(" + to_string(ul->loc) + ") with counter 0");
    }
    if (!t.locks.contains(ul->loc)) {
      throw InternalConsistencyError("unlock(" + to_string(ul->loc) + ") by a thread not holding it");
    }
    Object updated = *o;
    Rule leaf;
    if (o->locks > 1) {
      leaf = Rule::DecreaseLock;
    } else {
      leaf = Rule::ReleaseLock;
      if (!opts.sabotage_release_lock) nt.locks.erase(ul->loc);
    }
    --updated.locks;
    after(make_skip());
    r.next.memory = c.memory.with(ul->loc, std::move(updated));
    return finish(leaf, true);
  }
  return stuck(Rule::Seq, "no rule applies to " + to_term(*head));
}

StepResult step(const Program& p, const Configuration& c, std::size_t n, const StepOptions& opts) {
  StepAttempt a = try_step(p, c, n, opts);
  if (a.status != ThreadStatus::Enabled) {
    throw std::logic_error("thread " + std::to_string(n) + " is not enabled: " + a.diagnostic);
  }
  return std::move(*a.result);
}

std::vector<std::size_t> enabled(const Program& p, const Configuration& c) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= c.threads.size(); ++n) {
    if (try_step(p, c, n).status == ThreadStatus::Enabled) out.push_back(n);
  }
  return out;
}

}  // namespace gbcalc
