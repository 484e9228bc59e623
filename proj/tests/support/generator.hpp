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
#include <random>
#include <string>

namespace gbtest {

struct GenLimits {
  std::size_t max_worker_classes = 2;  // plus the Cell class
  std::size_t max_spawns = 2;
  std::size_t max_body = 8;
};

/// Source text of a random well-formed program. Workers share cells and a
/// lock object; bodies mix field reads and writes, local copies, nested
/// sync blocks and calls.
std::string random_program(std::mt19937_64& rng, const GenLimits& limits = {});

/// main spawns W.run with `k` writes to its own cell, then does `j` writes
/// to a different cell.
std::string independent_threads_program(std::size_t j, std::size_t k);

}  // namespace gbtest
