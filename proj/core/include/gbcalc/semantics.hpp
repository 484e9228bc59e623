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
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gbcalc/syntax.hpp"

namespace gbcalc {

/// Finite partial map from names to locations, kept sorted by name. Used both
/// for activation-record environments and for object field states.
class Environment {
 public:
  using Entry = std::pair<std::string, Location>;

  Environment() = default;
  Environment(std::initializer_list<Entry> entries);

  std::optional<Location> get(std::string_view name) const;
  bool contains(std::string_view name) const { return get(name).has_value(); }
  void set(std::string name, Location loc);
  Environment with(std::string name, Location loc) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const Environment&, const Environment&) = default;

 private:
  std::vector<Entry> entries_;
};

struct Object {
  std::string class_name;
  Environment fields;
  std::uint32_t locks = 0;

  friend bool operator==(const Object&, const Object&) = default;
};

using ObjectPtr = std::shared_ptr<const Object>;

/// Persistent heap: copies share storage, updates copy the slot table only.
/// Slots are indexed by location; a null slot is unallocated.
class Memory {
 public:
  Memory();

  const Object* find(Location loc) const;
  const Object& at(Location loc) const;
  bool contains(Location loc) const { return find(loc) != nullptr; }

  Memory with(Location loc, Object obj) const;
  Memory with(Location loc, ObjectPtr obj) const;

  /// Number of slots, i.e. one past the highest allocated index.
  std::size_t slot_count() const { return slots_->size(); }
  std::vector<Location> locations() const;

  bool shares_storage_with(const Memory& other) const { return slots_ == other.slots_; }

  friend bool operator==(const Memory& a, const Memory& b);

 private:
  std::shared_ptr<const std::vector<ObjectPtr>> slots_;
};

struct ActivationRecord {
  std::string class_name;
  std::string method;
  CommandPtr continuation;
  Environment env;

  friend bool operator==(const ActivationRecord& a, const ActivationRecord& b);
};

/// Sorted set of locations held by one thread.
class Lockset {
 public:
  bool contains(Location l) const;
  void insert(Location l);
  void erase(Location l);
  bool empty() const { return locs_.empty(); }
  std::size_t size() const { return locs_.size(); }
  const std::vector<Location>& items() const { return locs_; }

  friend bool operator==(const Lockset&, const Lockset&) = default;

 private:
  std::vector<Location> locs_;
};

struct Thread {
  /// back() is the top of the activation stack.
  std::vector<ActivationRecord> stack;
  Lockset locks;

  const ActivationRecord& top() const { return stack.back(); }

  friend bool operator==(const Thread&, const Thread&) = default;
};

struct Configuration {
  std::vector<Thread> threads;
  Memory memory;
  std::uint32_t next_location = 0;

  /// 1-based thread access, matching rule indices.
  const Thread& thread(std::size_t n) const { return threads.at(n - 1); }

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Structural hash, used only when exploration deduplicates states.
std::size_t hash_value(const Configuration& c);

std::string to_string(const Lockset& ls);
std::string to_string(const Environment& env);
std::string to_string(const Object& o);

// ---------------------------------------------------------------------------
// Expression evaluation

enum class EvalErrorKind { UndefinedVariable, UndefinedField, UnknownClass, DanglingLocation };

struct EvalError {
  EvalErrorKind kind;
  std::string detail;

  std::string message() const;
};

struct Evaluated {
  Location loc;
  Memory memory;
  std::uint32_t next_location = 0;
};

using EvalResult = std::variant<Evaluated, EvalError>;

/// Fixed fresh locations for every object creation inside one expression.
/// Locations are assigned breadth-first over the expression tree starting at
/// the allocation counter.
struct AllocationPlan {
  std::vector<std::pair<const NewExpr*, Location>> slots;
  std::uint32_t next_after = 0;

  std::optional<Location> find(const NewExpr* node) const;
};

AllocationPlan plan_allocations(const Expr& e, std::uint32_t next_location);

/// Evaluates `e`, allocating from `next_location`.
EvalResult eval_expr(const Program& p, const Expr& e, const Environment& env,
                     const Memory& mem, std::uint32_t next_location);

/// Evaluates `e` (possibly a subterm of the planned expression) reusing the
/// plan's locations for object creation. Scratch evaluations use this so
/// that the locations they name agree with what the real step allocates.
EvalResult eval_planned(const Program& p, const Expr& e, const Environment& env,
                        const Memory& mem, const AllocationPlan& plan);

// ---------------------------------------------------------------------------
// Reduction

enum class Rule {
  Decl,
  VarAssign,
  FieldAssign,
  Seq,
  SeqSkip,
  Invoc,
  Spawn,
  Sync,
  AcquireLock,
  ReentrantLock,
  DecreaseLock,
  ReleaseLock,
  Push,
  Pop,
  ParL,
  ParR,
  EndL,
  EndR,
};

inline constexpr std::size_t kRuleCount = 18;

/// Bracketed rule name, e.g. "[acquire-lock]".
std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view name);

/// Fault injection for mutation testing of the lock-soundness assertions.
/// Never set outside tests.
struct StepOptions {
  bool sabotage_release_lock = false;
};

enum class ThreadStatus {
  Enabled,
  /// Next action is lock(l) with l held by another thread.
  Blocked,
  /// A rule premise is undefined (unknown method, undefined variable, ...).
  Stuck,
  /// Empty stack and no other thread to eliminate it against.
  Terminated,
};

struct StepResult {
  Configuration next;
  /// The rule that performed the action; structural wrappers are listed in
  /// `derivation`, outermost first, ending with `rule`.
  Rule rule;
  std::vector<Rule> derivation;
};

struct StepAttempt {
  ThreadStatus status = ThreadStatus::Stuck;
  std::optional<StepResult> result;
  /// For Stuck: the rule whose premise failed and why.
  std::string diagnostic;
};

/// Thrown when reduction reaches a state the lock-soundness propositions
/// rule out (e.g. unlock of a location with counter 0).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

Configuration initial_config(const Program& p);

/// Attempts to fire thread `n` (1-based).
StepAttempt try_step(const Program& p, const Configuration& c, std::size_t n,
                     const StepOptions& opts = {});

/// Fires thread `n`; throws std::logic_error when it is not enabled.
StepResult step(const Program& p, const Configuration& c, std::size_t n,
                const StepOptions& opts = {});

/// 1-based indices of the threads that can fire.
std::vector<std::size_t> enabled(const Program& p, const Configuration& c);

/// Threads whose stack is non-empty.
std::size_t live_thread_count(const Configuration& c);

}  // namespace gbcalc
