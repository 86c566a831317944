#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/global_map.hpp"
#include "topomap/swarm.hpp"
#include "topomap/tda.hpp"

namespace topomap::io {

/// Shortest-form-free double: always 17 significant digits, "inf" for infinity.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const std::string str(s);
  const double v = std::stod(str, &used);
  if (used != str.size()) throw std::runtime_error("bad number: " + str);
  return v;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.emplace_back(line.substr(start, p == std::string_view::npos ? p : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// CSV tables start with a "# config_hash=<hex>" line followed by a header row.

inline std::string hash_line(const std::string& config_hash) {
  return "# config_hash=" + config_hash + "\n";
}

struct Table {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table parse_table(std::string_view text) {
  Table t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.starts_with("# config_hash=")) {
      t.config_hash = line.substr(14);
      continue;
    }
    if (line.starts_with("#")) continue;
    auto cells = split(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header.size()) throw std::runtime_error("ragged row: " + line);
      t.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw std::runtime_error("table has no header");
  return t;
}

inline void expect_header(const Table& t, std::initializer_list<std::string_view> cols) {
  if (!std::equal(t.header.begin(), t.header.end(), cols.begin(), cols.end())) {
    throw std::runtime_error("unexpected table header");
  }
}

inline std::string events_csv(std::span<const EncounterEvent> events, const std::string& hash) {
  std::string s = hash_line(hash) + "index,t0,t1,id_a,id_b\n";
  for (const EncounterEvent& e : events) {
    s += std::to_string(e.index) + "," + format_double(e.t0) + "," + format_double(e.t1) + "," +
         std::to_string(e.id_a) + "," + std::to_string(e.id_b) + "\n";
  }
  return s;
}

inline std::vector<EncounterEvent> read_events(std::string_view text) {
  const Table t = parse_table(text);
  expect_header(t, {"index", "t0", "t1", "id_a", "id_b"});
  std::vector<EncounterEvent> out;
  for (const auto& r : t.rows) {
    EncounterEvent e;
    e.index = std::stoull(r[0]);
    e.t0 = parse_double(r[1]);
    e.t1 = parse_double(r[2]);
    e.id_a = std::stoi(r[3]);
    e.id_b = std::stoi(r[4]);
    out.push_back(e);
  }
  return out;
}

inline std::string static_csv(const StaticIntervalLog& log, const std::string& hash) {
  std::string s = hash_line(hash) + "id,k,t_begin,t_end\n";
  for (const auto& [id, intervals] : log) {
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      s += std::to_string(id) + "," + std::to_string(k) + "," +
           format_double(intervals[k].begin) + "," + format_double(intervals[k].end) + "\n";
    }
  }
  return s;
}

inline StaticIntervalLog read_static(std::string_view text) {
  const Table t = parse_table(text);
  expect_header(t, {"id", "k", "t_begin", "t_end"});
  StaticIntervalLog log;
  for (const auto& r : t.rows) {
    log[std::stoi(r[0])].push_back({parse_double(r[2]), parse_double(r[3])});
  }
  return log;
}

inline std::string trajectory_csv(std::span<const TrajectorySample> samples,
                                  const std::string& hash) {
  std::string s = hash_line(hash) + "t,id,x,y,mode\n";
  for (const TrajectorySample& p : samples) {
    s += format_double(p.t) + "," + std::to_string(p.id) + "," + format_double(p.position.x) +
         "," + format_double(p.position.y) + "," + to_string(p.mode) + "\n";
  }
  return s;
}

inline std::string points_csv(const EmbeddedPointCloud& cloud,
                              std::span<const EncounterEvent> events, const std::string& hash) {
  std::string s = hash_line(hash) + "event_index,x,y,z\n";
  const auto& X = cloud.coordinates;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    s += std::to_string(events[cloud.events[static_cast<std::size_t>(r)]].index);
    for (Eigen::Index c = 0; c < 3; ++c) s += "," + format_double(c < X.cols() ? X(r, c) : 0.0);
    s += "\n";
  }
  return s;
}

struct PointRow {
  std::size_t event_index = 0;
  double x = 0, y = 0, z = 0;
};

inline std::vector<PointRow> read_points(std::string_view text) {
  const Table t = parse_table(text);
  expect_header(t, {"event_index", "x", "y", "z"});
  std::vector<PointRow> out;
  for (const auto& r : t.rows) {
    out.push_back({std::stoull(r[0]), parse_double(r[1]), parse_double(r[2]), parse_double(r[3])});
  }
  return out;
}

inline std::string diagram_csv(const PersistenceDiagram& dgm, const std::string& hash) {
  std::string s = hash_line(hash) + "dim,birth,death\n";
  for (int d = 0; d < 2; ++d) {
    for (const PersistencePair& p : dgm[d]) {
      s += std::to_string(d) + "," + format_double(p.birth) + "," + format_double(p.death) + "\n";
    }
  }
  return s;
}

inline PersistenceDiagram read_diagram(std::string_view text) {
  const Table t = parse_table(text);
  expect_header(t, {"dim", "birth", "death"});
  PersistenceDiagram dgm;
  for (const auto& r : t.rows) {
    const int d = std::stoi(r[0]);
    if (d < 0 || d > 1) throw std::runtime_error("diagram dimension out of range");
    dgm[d].push_back({parse_double(r[1]), parse_double(r[2])});
  }
  return dgm;
}

inline std::string dendrogram_csv(const Dendrogram& d, const std::string& hash) {
  std::string s = hash_line(hash) + "step,left,right,height,size\n";
  for (std::size_t k = 0; k < d.merges.size(); ++k) {
    const Merge& m = d.merges[k];
    s += std::to_string(k) + "," + std::to_string(m.left) + "," + std::to_string(m.right) + "," +
         format_double(m.height) + "," + std::to_string(m.size) + "\n";
  }
  return s;
}

inline std::string seam_cloud_csv(const InterDomainCloud& cloud, const ConnectionClusters& cl,
                                  std::span<const EncounterEvent> events,
                                  const std::string& hash) {
  std::string s = hash_line(hash) + "event_index,join_id,cluster\n";
  for (std::size_t p = 0; p < cloud.events.size(); ++p) {
    s += std::to_string(events[cloud.events[p]].index) + "," + std::to_string(cloud.join_id[p]) +
         "," + std::to_string(cl.labels[p]) + "\n";
  }
  return s;
}

}  // namespace topomap::io
