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

std::string to_string(const Expr& e);

/// Calculus-style rendering of a command: components of a sequence are
/// separated by "; " and a sync body is printed inline, e.g.
/// `sync (z) { this.y := z.f; w := this.y }; w.g := new Object{}; skip`.
std::string to_term(const Command& c);

/// Concrete `.gbc` source for a whole program. Reparsing the output yields a
/// structurally identical program.
std::string to_source(const Program& p);

/// One `.gba` line for an annotation.
std::string to_source(const Annotation& a);

}  // namespace gbcalc
