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
#include <string_view>

#include <nlohmann/json.hpp>

#include "gbcalc/checkers.hpp"
#include "gbcalc/explorer.hpp"

namespace gbcalc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "gbc-report/1";
inline constexpr const char* kTraceSchema = "gbc-trace/1";
inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest of the program text, as 16 hex digits.
std::string program_digest(std::string_view text);

/// Tab-separated trace dump, one line per step:
///   step thread rule head locks delta accessed derefs
/// framed by a `#gbc-trace v1` header and an `#outcome` footer.
std::string dump_trace_text(const Trace& t);
Json trace_to_json(const Trace& t);

/// Objects created or changed between two memories, e.g.
/// `l3=<K2,{g->l5},0>;l1=<K1,{f->l3},1>`, or `-` when nothing changed.
std::string memory_delta(const Memory& before, const Memory& after);

Json memory_to_json(const Memory& m);
Json stats_to_json(const Exploration& x);
Json finding_to_json(const Finding& f);
Json verdict_to_json(const Verdict& v);
Json annotation_to_json(const Annotation& a);
Json races_to_json(const RaceReport& r);
Json theorem_to_json(const TheoremReport& r);

/// Skeleton shared by every command's report.
Json report_header(const std::string& command, const std::string& path,
                   const std::string& digest);

}  // namespace gbcalc
