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

#ifndef MERGEGUARD_SERIALIZATION_H_
#define MERGEGUARD_SERIALIZATION_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mergeguard/graph_store.h"
#include "mergeguard/slam_graph.h"

namespace mergeguard {

// Canonical line-oriented text form of a graph (see docs/formats.md):
//
//   G <n> <epoch_1> ... <epoch_n>
//   V <id> <epoch> <x> <y> <theta> <range_max> <k> <bearing_1> <range_1> ...
//   E <from> <to> <kind> <dx> <dy> <dtheta> <i11> <i12> ... <i33>
//   END
//
// Vertices are written in ascending id order, edges in insertion order, and
// doubles in shortest round-trip form, so equal graphs serialize to equal
// bytes.
void write_graph(std::ostream& out, const SlamGraph& graph);
std::string serialize_graph(const SlamGraph& graph);

// Throws Error with the offending line number on malformed input.
SlamGraph read_graph(std::istream& in);
SlamGraph deserialize_graph(const std::string& text);

void write_graph_file(const std::filesystem::path& path, const SlamGraph& graph);
SlamGraph read_graph_file(const std::filesystem::path& path);

void write_store(std::ostream& out, const GraphStore& store);
std::string serialize_store(const GraphStore& store);
GraphStore read_store(std::istream& in);
GraphStore deserialize_store(const std::string& text);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace mergeguard

#endif  // MERGEGUARD_SERIALIZATION_H_
