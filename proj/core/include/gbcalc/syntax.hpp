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
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gbcalc {

/// A heap location. Locations are handed out by a monotone counter, so the
/// numeric index doubles as allocation order. Index 0 is the object of the
/// distinguished main class created by the initial configuration.
struct Location {
  std::uint32_t index = 0;

  friend auto operator<=>(const Location&, const Location&) = default;
};

inline constexpr Location kInitLocation{0};

/// Renders `l_init` for the main object and `l0`, `l1`, ... for every
/// allocation after it.
std::string to_string(Location loc);

// Reserved names with a fixed meaning inside programs or guard expressions.
inline constexpr const char* kThis = "this";
inline constexpr const char* kItself = "itself";
inline constexpr const char* kObjectClass = "Object";
inline constexpr const char* kMainClass = "main";
inline constexpr const char* kMainMethod = "main";

bool is_reserved_word(const std::string& word);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarExpr {
  std::string name;
};

struct FieldExpr {
  ExprPtr receiver;
  std::string field;
};

struct NewExpr {
  std::string class_name;
  std::vector<std::pair<std::string, ExprPtr>> inits;
};

struct Expr {
  std::variant<VarExpr, FieldExpr, NewExpr> node;
};

ExprPtr make_var(std::string name);
ExprPtr make_field(ExprPtr receiver, std::string field);
ExprPtr make_new(std::string class_name,
                 std::vector<std::pair<std::string, ExprPtr>> inits = {});

bool operator==(const Expr& a, const Expr& b);

/// Total structural order, used to keep expression sets deterministic.
std::strong_ordering compare(const Expr& a, const Expr& b);

std::size_t hash_value(const Expr& e);

struct ExprPtrLess {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const {
    return compare(*a, *b) < 0;
  }
};

// ---------------------------------------------------------------------------
// Commands

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct DeclCmd {
  std::string var;
  ExprPtr value;
};
struct AssignVarCmd {
  std::string var;
  ExprPtr value;
};
struct AssignFieldCmd {
  std::string var;
  std::string field;
  ExprPtr value;
};
struct SeqCmd {
  CommandPtr first;
  CommandPtr rest;
};
struct SkipCmd {};
struct CallCmd {
  ExprPtr receiver;
  std::string method;
};
struct SpawnCmd {
  ExprPtr receiver;
  std::string method;
};
struct SyncCmd {
  ExprPtr guard;
  CommandPtr body;
};
// lock/unlock only arise from reducing a sync block.
struct LockCmd {
  Location loc;
};
struct UnlockCmd {
  Location loc;
};

struct Command {
  std::variant<DeclCmd, AssignVarCmd, AssignFieldCmd, SeqCmd, SkipCmd, CallCmd,
               SpawnCmd, SyncCmd, LockCmd, UnlockCmd>
      node;
};

CommandPtr make_skip();
CommandPtr make_decl(std::string var, ExprPtr value);
CommandPtr make_assign_var(std::string var, ExprPtr value);
CommandPtr make_assign_field(std::string var, std::string field, ExprPtr value);
CommandPtr make_call(ExprPtr receiver, std::string method);
CommandPtr make_spawn(ExprPtr receiver, std::string method);
CommandPtr make_sync(ExprPtr guard, CommandPtr body);
CommandPtr make_lock(Location loc);
CommandPtr make_unlock(Location loc);

/// Raw sequencing node, no reassociation.
CommandPtr make_seq_raw(CommandPtr first, CommandPtr rest);

/// Sequencing that keeps the right-associated normal form: the first
/// component of a sequence is never itself a sequence.
CommandPtr make_seq(CommandPtr first, CommandPtr rest);

/// Builds c1; c2; ...; cn right-associated. Empty input yields skip.
CommandPtr make_block(const std::vector<CommandPtr>& cmds);

/// Flattens a right-associated sequence into its components.
std::vector<CommandPtr> flatten_seq(const CommandPtr& cmd);

bool operator==(const Command& a, const Command& b);

std::size_t hash_value(const Command& c);

bool is_skip(const Command& c);

/// The command that fires next: the first component of a sequence.
const CommandPtr& head_of(const CommandPtr& cmd);

// ---------------------------------------------------------------------------
// Programs

struct ClassDecl {
  std::string name;
  std::string parent = kObjectClass;
  std::map<std::string, CommandPtr> methods;
};

struct Program {
  /// User classes plus the distinguished main class, keyed by name. The
  /// built-in Object class is implicit and has no methods.
  std::map<std::string, ClassDecl> classes;

  bool has_main() const;
  const CommandPtr& main_body() const;
  bool has_class(const std::string& name) const;
};

/// Dynamic method lookup: the nearest class in the superclass chain of
/// `class_name` (inclusive) that implements `method`.
std::optional<std::string> lookup(const Program& p, const std::string& class_name,
                                  const std::string& method);

/// The method body `class_name.method`, if that exact class implements it.
const CommandPtr* method_body(const Program& p, const std::string& class_name,
                              const std::string& method);

bool operator==(const ClassDecl& a, const ClassDecl& b);
bool operator==(const Program& a, const Program& b);

/// Every field name mentioned anywhere in the program (initialisers, field
/// reads and field writes), sorted.
std::vector<std::string> field_names(const Program& p);

// ---------------------------------------------------------------------------
// Annotations

enum class ProtectionSemantics { Name, Value };

struct FieldTarget {
  std::string field;
  friend bool operator==(const FieldTarget&, const FieldTarget&) = default;
};

struct VarTarget {
  std::string class_name;
  std::string method;
  std::string var;
  friend bool operator==(const VarTarget&, const VarTarget&) = default;
};

using AnnotationTarget = std::variant<FieldTarget, VarTarget>;

struct Annotation {
  AnnotationTarget target;
  ExprPtr guard;
  ProtectionSemantics semantics = ProtectionSemantics::Name;
};

std::string to_string(ProtectionSemantics s);
std::string to_string(const AnnotationTarget& t);

}  // namespace gbcalc
