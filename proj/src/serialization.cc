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

#include "mergeguard/serialization.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "mergeguard/error.h"

namespace mergeguard {
namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line split on whitespace; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      tokens.clear();
      std::istringstream split(line);
      std::string token;
      while (split >> token) tokens.push_back(token);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  std::vector<std::string> expect(const char* what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) fail(std::string("unexpected end of input, expected ") + what);
    return tokens;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error("line " + std::to_string(line_number_) + ": " + message);
  }

  double to_double(const std::string& token) const {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("invalid number '" + token + "'");
    }
    return value;
  }

  std::int64_t to_int(const std::string& token) const {
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("invalid integer '" + token + "'");
    }
    return value;
  }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

SlamGraph parse_graph_body(LineReader& reader,
                           const std::vector<std::string>& header) {
  if (header.empty() || header[0] != "G" || header.size() < 2) {
    reader.fail("expected graph header 'G <n> <epochs...>'");
  }
  const std::int64_t n = reader.to_int(header[1]);
  if (n < 0 || static_cast<std::size_t>(n) + 2 != header.size()) {
    reader.fail("graph header epoch count mismatch");
  }
  SlamGraph graph;
  for (std::size_t i = 2; i < header.size(); ++i) {
    graph.add_epoch(reader.to_int(header[i]));
  }

  std::vector<std::string> tokens;
  while (true) {
    tokens = reader.expect("'END'");
    const std::string& tag = tokens[0];
    if (tag == "END") break;
    try {
      if (tag == "V") {
        if (tokens.size() < 8) reader.fail("vertex record too short");
        const std::int64_t k = reader.to_int(tokens[7]);
        if (k < 0 || tokens.size() != 8 + 2 * static_cast<std::size_t>(k)) {
          reader.fail("vertex record point count mismatch");
        }
        std::vector<PolarPoint> points(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < points.size(); ++i) {
          points[i].bearing = reader.to_double(tokens[8 + 2 * i]);
          points[i].range = reader.to_double(tokens[9 + 2 * i]);
        }
        Pose2 pose;
        pose.x = reader.to_double(tokens[3]);
        pose.y = reader.to_double(tokens[4]);
        pose.theta = reader.to_double(tokens[5]);
        Vertex v{reader.to_int(tokens[1]), reader.to_int(tokens[2]),
                 Scan(pose, std::move(points), reader.to_double(tokens[6]))};
        if (graph.epochs().count(v.epoch) == 0) {
          reader.fail("vertex epoch not listed in graph header");
        }
        graph.add_vertex(std::move(v));
      } else if (tag == "E") {
        if (tokens.size() != 16) reader.fail("edge record needs 16 fields");
        Edge e;
        e.from = reader.to_int(tokens[1]);
        e.to = reader.to_int(tokens[2]);
        e.kind = edge_kind_from_string(tokens[3]);
        e.measurement.x = reader.to_double(tokens[4]);
        e.measurement.y = reader.to_double(tokens[5]);
        e.measurement.theta = reader.to_double(tokens[6]);
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            e.information(r, c) = reader.to_double(tokens[7 + 3 * r + c]);
          }
        }
        graph.add_edge(e);
      } else {
        reader.fail("unknown record tag '" + tag + "'");
      }
    } catch (const Error& error) {
      const std::string what = error.what();
      if (what.rfind("line ", 0) == 0) throw;
      reader.fail(what);
    }
  }
  return graph;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void write_graph(std::ostream& out, const SlamGraph& graph) {
  out << "G " << graph.epochs().size();
  for (EpochId e : graph.epochs()) out << ' ' << e;
  out << '\n';
  for (const auto& [id, v] : graph.vertices()) {
    const Pose2& p = v.pose();
    out << "V " << id << ' ' << v.epoch << ' ' << format_double(p.x) << ' '
        << format_double(p.y) << ' ' << format_double(p.theta) << ' '
        << format_double(v.scan.range_max()) << ' ' << v.scan.size();
    for (const PolarPoint& pt : v.scan.points()) {
      out << ' ' << format_double(pt.bearing) << ' ' << format_double(pt.range);
    }
    out << '\n';
  }
  for (const Edge& e : graph.edges()) {
    out << "E " << e.from << ' ' << e.to << ' ' << to_string(e.kind) << ' '
        << format_double(e.measurement.x) << ' '
        << format_double(e.measurement.y) << ' '
        << format_double(e.measurement.theta);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out << ' ' << format_double(e.information(r, c));
      }
    }
    out << '\n';
  }
  out << "END\n";
}

std::string serialize_graph(const SlamGraph& graph) {
  std::ostringstream out;
  write_graph(out, graph);
  return out.str();
}

SlamGraph read_graph(std::istream& in) {
  LineReader reader(in);
  return parse_graph_body(reader, reader.expect("graph header"));
}

SlamGraph deserialize_graph(const std::string& text) {
  std::istringstream in(text);
  return read_graph(in);
}

void write_graph_file(const std::filesystem::path& path,
                      const SlamGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_graph(out, graph);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

SlamGraph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_graph(in);
}

// Store layout:
//   STORE <current_epoch> <next_vertex_id> <next_epoch_id> <last_vertex|-1>
//   ACTIVE, then one graph block
//   INACTIVE, then one graph block (repeated)
//   BACKUP <n> <epochs...> MEMORY, then one graph block, or
//   BACKUP <n> <epochs...> FILE <path>
//   END_STORE
void write_store(std::ostream& out, const GraphStore& store) {
  out << "STORE " << store.current_epoch() << ' ' << store.next_vertex_id()
      << ' ' << store.next_epoch_id() << ' '
      << store.last_vertex().value_or(-1) << '\n';
  out << "ACTIVE\n";
  write_graph(out, store.active());
  for (const SlamGraph& g : store.inactive()) {
    out << "INACTIVE\n";
    write_graph(out, g);
  }
  for (const GraphBackup& b : store.backups()) {
    out << "BACKUP " << b.epochs.size();
    for (EpochId e : b.epochs) out << ' ' << e;
    if (b.graph) {
      out << " MEMORY\n";
      write_graph(out, *b.graph);
    } else {
      out << " FILE " << b.spill_file.string() << '\n';
    }
  }
  out << "END_STORE\n";
}

std::string serialize_store(const GraphStore& store) {
  std::ostringstream out;
  write_store(out, store);
  return out.str();
}

GraphStore read_store(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> header = reader.expect("store header");
  if (header.size() != 5 || header[0] != "STORE") {
    reader.fail("expected 'STORE <current> <next_vertex> <next_epoch> <last>'");
  }
  const EpochId current = reader.to_int(header[1]);
  const VertexId next_vertex = reader.to_int(header[2]);
  const EpochId next_epoch = reader.to_int(header[3]);
  const std::int64_t last = reader.to_int(header[4]);

  std::vector<std::string> tokens = reader.expect("'ACTIVE'");
  if (tokens[0] != "ACTIVE") reader.fail("expected 'ACTIVE'");
  SlamGraph active = parse_graph_body(reader, reader.expect("graph header"));

  std::vector<SlamGraph> inactive;
  std::vector<GraphBackup> backups;
  while (true) {
    tokens = reader.expect("'END_STORE'");
    if (tokens[0] == "END_STORE") break;
    if (tokens[0] == "INACTIVE") {
      inactive.push_back(parse_graph_body(reader, reader.expect("graph header")));
    } else if (tokens[0] == "BACKUP") {
      if (tokens.size() < 3) reader.fail("backup record too short");
      const std::int64_t n = reader.to_int(tokens[1]);
      if (n < 0 || tokens.size() < 3 + static_cast<std::size_t>(n)) {
        reader.fail("backup epoch count mismatch");
      }
      GraphBackup backup;
      for (std::int64_t i = 0; i < n; ++i) {
        backup.epochs.insert(reader.to_int(tokens[2 + i]));
      }
      const std::string& where = tokens[2 + n];
      if (where == "MEMORY" && tokens.size() == 3 + static_cast<std::size_t>(n)) {
        backup.graph = parse_graph_body(reader, reader.expect("graph header"));
      } else if (where == "FILE" &&
                 tokens.size() == 4 + static_cast<std::size_t>(n)) {
        backup.spill_file = tokens[3 + n];
      } else {
        reader.fail("backup must be 'MEMORY' or 'FILE <path>'");
      }
      backups.push_back(std::move(backup));
    } else {
      reader.fail("unknown store section '" + tokens[0] + "'");
    }
  }
  std::optional<VertexId> last_vertex;
  if (last >= 0) last_vertex = last;
  return GraphStore::assemble(std::move(active), std::move(inactive),
                              std::move(backups), current, next_vertex,
                              next_epoch, last_vertex);
}

GraphStore deserialize_store(const std::string& text) {
  std::istringstream in(text);
  return read_store(in);
}

}  // namespace mergeguard
