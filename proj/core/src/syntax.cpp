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

#include "gbcalc/syntax.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string_view>

namespace gbcalc {

std::string to_string(Location loc) {
  if (loc.index == 0) return "l_init";
  return "l" + std::to_string(loc.index - 1);
}

bool is_reserved_word(const std::string& word) {
  static constexpr std::array<std::string_view, 11> kWords = {
      "this", "itself", "sync",   "spawn",   "decl", "skip",
      "new",  "class",  "method", "extends", "main"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

ExprPtr make_var(std::string name) {
  return std::make_shared<const Expr>(Expr{VarExpr{std::move(name)}});
}

ExprPtr make_field(ExprPtr receiver, std::string field) {
  return std::make_shared<const Expr>(
      Expr{FieldExpr{std::move(receiver), std::move(field)}});
}

ExprPtr make_new(std::string class_name,
                 std::vector<std::pair<std::string, ExprPtr>> inits) {
  return std::make_shared<const Expr>(
      Expr{NewExpr{std::move(class_name), std::move(inits)}});
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (auto c = a.node.index() <=> b.node.index(); c != 0) return c;
  if (const auto* va = std::get_if<VarExpr>(&a.node)) {
    return va->name <=> std::get<VarExpr>(b.node).name;
  }
  if (const auto* fa = std::get_if<FieldExpr>(&a.node)) {
    const auto& fb = std::get<FieldExpr>(b.node);
    if (auto c = compare(*fa->receiver, *fb.receiver); c != 0) return c;
    return fa->field <=> fb.field;
  }
  const auto& na = std::get<NewExpr>(a.node);
  const auto& nb = std::get<NewExpr>(b.node);
  if (auto c = na.class_name <=> nb.class_name; c != 0) return c;
  if (auto c = na.inits.size() <=> nb.inits.size(); c != 0) return c;
  for (std::size_t i = 0; i < na.inits.size(); ++i) {
    if (auto c = na.inits[i].first <=> nb.inits[i].first; c != 0) return c;
    if (auto c = compare(*na.inits[i].second, *nb.inits[i].second); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

namespace {

inline void mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

std::size_t hash_value(const Expr& e) {
  std::size_t h = e.node.index();
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          mix(h, std::hash<std::string>{}(n.name));
        } else if constexpr (std::is_same_v<T, FieldExpr>) {
          mix(h, hash_value(*n.receiver));
          mix(h, std::hash<std::string>{}(n.field));
        } else {
          mix(h, std::hash<std::string>{}(n.class_name));
          for (const auto& [f, init] : n.inits) {
            mix(h, std::hash<std::string>{}(f));
            mix(h, hash_value(*init));
          }
        }
      },
      e.node);
  return h;
}

std::size_t hash_value(const Command& c) {
  std::size_t h = c.node.index() + 101;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd> || std::is_same_v<T, AssignVarCmd>) {
          mix(h, std::hash<std::string>{}(n.var));
          mix(h, hash_value(*n.value));
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          mix(h, std::hash<std::string>{}(n.var));
          mix(h, std::hash<std::string>{}(n.field));
          mix(h, hash_value(*n.value));
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          mix(h, hash_value(*n.first));
          mix(h, hash_value(*n.rest));
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          mix(h, std::hash<std::string>{}(n.method));
          mix(h, hash_value(*n.receiver));
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          mix(h, hash_value(*n.guard));
          mix(h, hash_value(*n.body));
        } else if constexpr (std::is_same_v<T, LockCmd> || std::is_same_v<T, UnlockCmd>) {
          mix(h, n.loc.index);
        }
      },
      c.node);
  return h;
}

namespace {

CommandPtr wrap(Command c) { return std::make_shared<const Command>(std::move(c)); }

bool ptr_eq(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool ptr_eq(const CommandPtr& a, const CommandPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace

CommandPtr make_skip() {
  static const CommandPtr kSkip = wrap(Command{SkipCmd{}});
  return kSkip;
}

CommandPtr make_decl(std::string var, ExprPtr value) {
  return wrap(Command{DeclCmd{std::move(var), std::move(value)}});
}

CommandPtr make_assign_var(std::string var, ExprPtr value) {
  return wrap(Command{AssignVarCmd{std::move(var), std::move(value)}});
}

CommandPtr make_assign_field(std::string var, std::string field, ExprPtr value) {
  return wrap(Command{AssignFieldCmd{std::move(var), std::move(field), std::move(value)}});
}

CommandPtr make_call(ExprPtr receiver, std::string method) {
  return wrap(Command{CallCmd{std::move(receiver), std::move(method)}});
}

CommandPtr make_spawn(ExprPtr receiver, std::string method) {
  return wrap(Command{SpawnCmd{std::move(receiver), std::move(method)}});
}

CommandPtr make_sync(ExprPtr guard, CommandPtr body) {
  return wrap(Command{SyncCmd{std::move(guard), std::move(body)}});
}

CommandPtr make_lock(Location loc) { return wrap(Command{LockCmd{loc}}); }

CommandPtr make_unlock(Location loc) { return wrap(Command{UnlockCmd{loc}}); }

CommandPtr make_seq_raw(CommandPtr first, CommandPtr rest) {
  return wrap(Command{SeqCmd{std::move(first), std::move(rest)}});
}

CommandPtr make_seq(CommandPtr first, CommandPtr rest) {
  if (const auto* s = std::get_if<SeqCmd>(&first->node)) {
    return make_seq(s->first, make_seq(s->rest, std::move(rest)));
  }
  return make_seq_raw(std::move(first), std::move(rest));
}

CommandPtr make_block(const std::vector<CommandPtr>& cmds) {
  if (cmds.empty()) return make_skip();
  CommandPtr acc = cmds.back();
  for (auto it = cmds.rbegin() + 1; it != cmds.rend(); ++it) acc = make_seq(*it, acc);
  return acc;
}

std::vector<CommandPtr> flatten_seq(const CommandPtr& cmd) {
  std::vector<CommandPtr> out;
  CommandPtr cur = cmd;
  while (const auto* s = std::get_if<SeqCmd>(&cur->node)) {
    auto inner = flatten_seq(s->first);
    out.insert(out.end(), inner.begin(), inner.end());
    cur = s->rest;
  }
  out.push_back(cur);
  return out;
}

bool operator==(const Command& a, const Command& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, DeclCmd> || std::is_same_v<T, AssignVarCmd>) {
          return x.var == y.var && ptr_eq(x.value, y.value);
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          return x.var == y.var && x.field == y.field && ptr_eq(x.value, y.value);
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          return ptr_eq(x.first, y.first) && ptr_eq(x.rest, y.rest);
        } else if constexpr (std::is_same_v<T, SkipCmd>) {
          return true;
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          return x.method == y.method && ptr_eq(x.receiver, y.receiver);
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          return ptr_eq(x.guard, y.guard) && ptr_eq(x.body, y.body);
        } else {
          return x.loc == y.loc;
        }
      },
      a.node);
}

bool is_skip(const Command& c) { return std::holds_alternative<SkipCmd>(c.node); }

const CommandPtr& head_of(const CommandPtr& cmd) {
  const CommandPtr* cur = &cmd;
  while (const auto* s = std::get_if<SeqCmd>(&(*cur)->node)) cur = &s->first;
  return *cur;
}

bool Program::has_main() const {
  auto it = classes.find(kMainClass);
  return it != classes.end() && it->second.methods.count(kMainMethod) == 1;
}

const CommandPtr& Program::main_body() const {
  return classes.at(kMainClass).methods.at(kMainMethod);
}

bool Program::has_class(const std::string& name) const {
  return name == kObjectClass || classes.count(name) != 0;
}

std::optional<std::string> lookup(const Program& p, const std::string& class_name,
                                  const std::string& method) {
  std::string cur = class_name;
  // The chain is bounded by the class count; a cyclic table just fails.
  for (std::size_t hops = 0; hops <= p.classes.size(); ++hops) {
    if (cur == kObjectClass) return std::nullopt;
    auto it = p.classes.find(cur);
    if (it == p.classes.end()) return std::nullopt;
    if (it->second.methods.count(method)) return cur;
    cur = it->second.parent;
  }
  return std::nullopt;
}

const CommandPtr* method_body(const Program& p, const std::string& class_name,
                              const std::string& method) {
  auto it = p.classes.find(class_name);
  if (it == p.classes.end()) return nullptr;
  auto mit = it->second.methods.find(method);
  if (mit == it->second.methods.end()) return nullptr;
  return &mit->second;
}

bool operator==(const ClassDecl& a, const ClassDecl& b) {
  if (a.name != b.name || a.parent != b.parent || a.methods.size() != b.methods.size()) {
    return false;
  }
  for (auto ia = a.methods.begin(), ib = b.methods.begin(); ia != a.methods.end();
       ++ia, ++ib) {
    if (ia->first != ib->first || !ptr_eq(ia->second, ib->second)) return false;
  }
  return true;
}

bool operator==(const Program& a, const Program& b) { return a.classes == b.classes; }

namespace {

void collect_fields(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldExpr>) {
          out.insert(n.field);
          collect_fields(*n.receiver, out);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          for (const auto& [f, init] : n.inits) {
            out.insert(f);
            collect_fields(*init, out);
          }
        }
      },
      e.node);
}

void collect_fields(const Command& c, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd> || std::is_same_v<T, AssignVarCmd>) {
          collect_fields(*n.value, out);
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          out.insert(n.field);
          collect_fields(*n.value, out);
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          collect_fields(*n.first, out);
          collect_fields(*n.rest, out);
        } else if constexpr (std::is_same_v<T, CallCmd> || std::is_same_v<T, SpawnCmd>) {
          collect_fields(*n.receiver, out);
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          collect_fields(*n.guard, out);
          collect_fields(*n.body, out);
        }
      },
      c.node);
}

}  // namespace

std::vector<std::string> field_names(const Program& p) {
  std::set<std::string> out;
  for (const auto& [name, cls] : p.classes) {
    for (const auto& [m, body] : cls.methods) collect_fields(*body, out);
  }
  return {out.begin(), out.end()};
}

std::string to_string(ProtectionSemantics s) {
  return s == ProtectionSemantics::Name ? "name" : "value";
}

std::string to_string(const AnnotationTarget& t) {
  if (const auto* f = std::get_if<FieldTarget>(&t)) return "field " + f->field;
  const auto& v = std::get<VarTarget>(t);
  return "var " + v.class_name + "." + v.method + "." + v.var;
}

}  // namespace gbcalc
