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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gbcalc/syntax.hpp"

namespace gbcalc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses a `.gbc` program:
///
///   class K [extends P] { method m() { body } ... }
///   main { body }
///
/// Method and main bodies get a trailing skip appended. Statements are
/// `decl x = E;`, `x := E;`, `x.f := E;`, `E.m();`, `spawn E.m();`,
/// `sync (E) { ... }` and `skip;`. Expressions are variables, field reads
/// and `new K { f = E, ... }`. `//` starts a comment.
Program parse_program(std::string_view text);

/// Parses a standalone expression. When `allow_itself` is set the reserved
/// name `itself` is accepted as a variable (guard expressions only).
ExprPtr parse_expression(std::string_view text, bool allow_itself = false);

/// Parses a `.gba` annotation file, one annotation per line:
///
///   guard <name|value> field <f> by <E>
///   guard <name|value> var <Class>.<method>.<x> by <E>
///
/// Blank lines and lines starting with `#` are ignored.
std::vector<Annotation> parse_annotations(std::string_view text);

}  // namespace gbcalc
