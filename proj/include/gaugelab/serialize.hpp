#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "gaugelab/core.hpp"
#include "gaugelab/gauge.hpp"
#include "gaugelab/integrator.hpp"

namespace gaugelab {

// Partition: [{"left": x, "right": y, "tag": t, "exact": [num, den] | null}, ...]

inline nlohmann::json partition_to_json(const TaggedPartition& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const Cell& c : p.cells) {
    nlohmann::json cell = tag_to_json(c.tag);
    cell["left"] = c.left;
    cell["right"] = c.right;
    out.push_back(std::move(cell));
  }
  return out;
}

/// Parses and validates a serialized partition; the interval is taken from
/// the outer endpoints.
inline TaggedPartition partition_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidPartition, "expected a non-empty array of cells");
    TaggedPartition p{Interval(j.front().at("left").get<double>(), j.back().at("right").get<double>()), {}};
    for (const auto& c : j) {
      const double t = c.at("tag").get<double>();
      Tag tag(t);
      if (!c.at("exact").is_null()) {
        const auto& e = c.at("exact");
        tag = Tag(t, Rational{e.at(0).get<std::int64_t>(), e.at(1).get<std::int64_t>()});
      }
      p.cells.push_back({c.at("left").get<double>(), c.at("right").get<double>(), tag});
    }
    require_valid(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidPartition, std::string("malformed partition: ") + e.what());
  }
}

inline nlohmann::json report_to_json(const ConvergenceReport& r) {
  return {{"sums", r.sums},           {"gaps", r.gaps},
          {"estimate", r.estimate},   {"certified", r.certified},
          {"stoppedAt", r.stopped_at}, {"cellCounts", r.cell_counts}};
}

inline ConvergenceReport report_from_json(const nlohmann::json& j) {
  ConvergenceReport r;
  r.sums = j.at("sums").get<std::vector<std::vector<double>>>();
  r.gaps = j.at("gaps").get<std::vector<double>>();
  r.estimate = j.at("estimate").get<double>();
  r.certified = j.at("certified").get<bool>();
  r.stopped_at = j.at("stoppedAt").get<int>();
  r.cell_counts = j.at("cellCounts").get<std::vector<std::vector<std::size_t>>>();
  return r;
}

inline std::string format_double(double x) {
  // shortest round-trip representation, same as the JSON writer
  return nlohmann::json(x).dump();
}

/// One row per (index, replicate): n,replicate,sum,gap,cells
inline std::string report_to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "n,replicate,sum,gap,cells\n";
  for (std::size_t i = 0; i < r.sums.size(); ++i) {
    for (std::size_t k = 0; k < r.sums[i].size(); ++k) {
      os << (i + 1) << ',' << k << ',' << format_double(r.sums[i][k]) << ',' << format_double(r.gaps[i]) << ','
         << r.cell_counts[i][k] << '\n';
    }
  }
  return os.str();
}

/// Writes through a temporary file in the same directory and renames it over
/// the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Config, "cannot write " + tmp);
    out << content;
    if (!out) throw Error(ErrorCode::Config, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Config, "cannot rename onto " + path.string());
  }
}

}  // namespace gaugelab
