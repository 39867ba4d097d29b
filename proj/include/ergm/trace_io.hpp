#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergm/dynamics.hpp"

namespace ergm {

using Json = nlohmann::json;

/// Shortest decimal that round-trips the double; byte-stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Writes via a temp file and rename, so the target is never half-written.
inline void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_atomic: cannot open " + tmp);
    os << content;
    if (!os) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write_atomic: write failed for " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("write_atomic: rename failed for " + path);
  }
}

/// CSV with header "t,<observable>..."; observable columns in name order.
inline std::string trace_to_csv(const RunTrace& tr) {
  std::string out = "t";
  for (auto& [name, vals] : tr.observables) {
    if (vals.size() != tr.sample_times.size())
      throw std::runtime_error("trace_to_csv: ragged observable " + name);
    out += "," + name;
  }
  out += "\n";
  for (std::size_t i = 0; i < tr.sample_times.size(); ++i) {
    out += std::to_string(tr.sample_times[i]);
    for (auto& [name, vals] : tr.observables) out += "," + format_double(vals[i]);
    out += "\n";
  }
  return out;
}

inline Json trace_manifest(const RunTrace& tr, const std::string& build_id) {
  Json j;
  j["model"] = tr.model_text;
  j["seed"] = tr.seed;
  j["steps"] = tr.steps;
  j["build"] = build_id;
  if (tr.coalescence_step) j["coalescence_step"] = *tr.coalescence_step;
  return j;
}

}  // namespace ergm
