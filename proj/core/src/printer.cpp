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

#include "gbcalc/printer.hpp"

#include <sstream>

namespace gbcalc {

std::string to_string(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, FieldExpr>) {
          return to_string(*n.receiver) + "." + n.field;
        } else {
          std::string out = "new " + n.class_name + "{";
          for (std::size_t i = 0; i < n.inits.size(); ++i) {
            if (i) out += ", ";
            out += n.inits[i].first + " = " + to_string(*n.inits[i].second);
          }
          return out + "}";
        }
      },
      e.node);
}

std::string to_term(const Command& c) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeclCmd>) {
          return "decl " + n.var + " = " + to_string(*n.value);
        } else if constexpr (std::is_same_v<T, AssignVarCmd>) {
          return n.var + " := " + to_string(*n.value);
        } else if constexpr (std::is_same_v<T, AssignFieldCmd>) {
          return n.var + "." + n.field + " := " + to_string(*n.value);
        } else if constexpr (std::is_same_v<T, SeqCmd>) {
          return to_term(*n.first) + "; " + to_term(*n.rest);
        } else if constexpr (std::is_same_v<T, SkipCmd>) {
          return "skip";
        } else if constexpr (std::is_same_v<T, CallCmd>) {
          return to_string(*n.receiver) + "." + n.method + "()";
        } else if constexpr (std::is_same_v<T, SpawnCmd>) {
          return "spawn " + to_string(*n.receiver) + "." + n.method + "()";
        } else if constexpr (std::is_same_v<T, SyncCmd>) {
          return "sync (" + to_string(*n.guard) + ") { " + to_term(*n.body) + " }";
        } else if constexpr (std::is_same_v<T, LockCmd>) {
          return "lock(" + to_string(n.loc) + ")";
        } else {
          return "unlock(" + to_string(n.loc) + ")";
        }
      },
      c.node);
}

namespace {

void indent(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void print_statements(std::ostringstream& os, const std::vector<CommandPtr>& stmts,
                      int depth);

void print_statement(std::ostringstream& os, const CommandPtr& c, int depth) {
  indent(os, depth);
  if (const auto* s = std::get_if<SyncCmd>(&c->node)) {
    os << "sync (" << to_string(*s->guard) << ") {\n";
    auto body = flatten_seq(s->body);
    // A lone skip body prints as `skip;`, which reparses to the same skip.
    print_statements(os, body, depth + 1);
    indent(os, depth);
    os << "}\n";
    return;
  }
  os << to_term(*c) << ";\n";
}

void print_statements(std::ostringstream& os, const std::vector<CommandPtr>& stmts,
                      int depth) {
  for (const auto& s : stmts) print_statement(os, s, depth);
}

// Method bodies carry the trailing skip that the parser appends; drop it.
void print_body(std::ostringstream& os, const CommandPtr& body, int depth) {
  auto stmts = flatten_seq(body);
  stmts.pop_back();
  print_statements(os, stmts, depth);
}

}  // namespace

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& [name, cls] : p.classes) {
    if (name == kMainClass) continue;
    os << "class " << name;
    if (cls.parent != kObjectClass) os << " extends " << cls.parent;
    os << " {\n";
    for (const auto& [m, body] : cls.methods) {
      os << "  method " << m << "() {\n";
      print_body(os, body, 2);
      os << "  }\n";
    }
    os << "}\n\n";
  }
  if (p.has_main()) {
    os << "main {\n";
    print_body(os, p.main_body(), 1);
    os << "}\n";
  }
  return os.str();
}

std::string to_source(const Annotation& a) {
  return "guard " + to_string(a.semantics) + " " + to_string(a.target) + " by " +
         to_string(*a.guard);
}

}  // namespace gbcalc
