/*
 * Copyright 2026 The mergeguard Authors
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

#ifndef MERGEGUARD_SCAN_LOG_H_
#define MERGEGUARD_SCAN_LOG_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mergeguard/merge_manager.h"
#include "mergeguard/simulator.h"

namespace mergeguard {

// Newline-delimited JSON, one record per line (see docs/formats.md):
//
//   {"type":"scan","t":..,"odom":[dx,dy,dth],"bearing_origin":..,
//    "bearing_increment":..,"range_max":..,"ranges":[..],"gt":[x,y,th]}
//   {"type":"epoch_break","t":..}
//   {"type":"merge_trigger","t":..,"trigger_scan":..,"target_graph":..,
//    "target_scan":..,"rel":[x,y,th],"info":[9 values],"label":"correct"}
//
// "gt" is optional. A range of 0 means the beam had no return.
void write_scan_log(std::ostream& out, const SequenceLog& log);
std::string serialize_scan_log(const SequenceLog& log);
void write_scan_log_file(const std::filesystem::path& path, const SequenceLog& log);

// Throws Error naming the offending line on malformed records. Blank lines
// are skipped.
SequenceLog read_scan_log(std::istream& in, std::string id = "sequence");
SequenceLog ingest_log(const std::filesystem::path& path);

// Merge-spec files hold only merge_trigger records, in trigger order.
void write_merge_spec(std::ostream& out, const std::vector<ForcedMerge>& merges);
void write_merge_spec_file(const std::filesystem::path& path,
                           const std::vector<ForcedMerge>& merges);
std::vector<ForcedMerge> read_merge_spec(std::istream& in);
std::vector<ForcedMerge> read_merge_spec_file(const std::filesystem::path& path);

// Drops the log's own merge triggers and inserts `merges` right after the
// scans they trigger on.
SequenceLog with_merges(const SequenceLog& log, const std::vector<ForcedMerge>& merges);

// Scenario files: one JSON object with "id", "world" and "script". The world
// lists "walls" as [x0, y0, x1, y1] or "rectangles" {"free", "solid"} traced
// by world_from_rectangles; writing always emits walls.
Scenario parse_scenario(const std::string& text);
Scenario read_scenario_file(const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

}  // namespace mergeguard

#endif  // MERGEGUARD_SCAN_LOG_H_
