#pragma once

// JSON gate files: {"dims": [d1, ...], "matrix": [[re, im], ...]} with the
// matrix stored row-major as one flat list of complex pairs.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "udiscrim/errors.hpp"
#include "udiscrim/linalg.hpp"
#include "udiscrim/tolerances.hpp"

namespace udiscrim::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline ordered_json complex_json(linalg::Complex z) { return ordered_json::array({z.real(), z.imag()}); }

/// Row-major flat list of [re, im] pairs.
inline ordered_json matrix_json(const linalg::Matrix& m) {
  ordered_json out = ordered_json::array();
  for (const auto& z : m.entries()) out.push_back(complex_json(z));
  return out;
}

inline ordered_json vector_json(const linalg::Vector& v) {
  ordered_json out = ordered_json::array();
  for (const auto& z : v) out.push_back(complex_json(z));
  return out;
}

inline std::string serialize_gate(const linalg::UnitaryGate& g) {
  ordered_json j;
  j["dims"] = std::vector<std::size_t>(g.structure().local_dims().begin(), g.structure().local_dims().end());
  j["matrix"] = matrix_json(g.matrix());
  return j.dump() + "\n";
}

/// Parses and validates a gate file body. Throws InputError on any defect.
inline linalg::UnitaryGate parse_gate(const std::string& text, const Tolerances& tol = default_tolerances()) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("gate file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dims") || !j.contains("matrix"))
    throw InputError("gate file needs \"dims\" and \"matrix\"");
  const auto& jd = j["dims"];
  const auto& jm = j["matrix"];
  if (!jd.is_array() || jd.empty()) throw InputError("\"dims\" must be a nonempty array");
  std::vector<std::size_t> dims;
  for (const auto& d : jd) {
    if (!d.is_number_unsigned()) throw InputError("\"dims\" entries must be positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  const linalg::PartyStructure s(dims);
  const std::size_t n = s.total_dim();
  if (!jm.is_array() || jm.size() != n * n)
    throw InputError("\"matrix\" must hold " + std::to_string(n * n) + " [re, im] pairs");
  std::vector<linalg::Complex> entries;
  entries.reserve(n * n);
  for (const auto& z : jm) {
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      throw InputError("matrix entries must be [re, im] number pairs");
    entries.emplace_back(z[0].get<double>(), z[1].get<double>());
  }
  return linalg::UnitaryGate(linalg::Matrix(n, n, std::move(entries)), s, tol);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline linalg::UnitaryGate load_gate(const std::string& path, const Tolerances& tol = default_tolerances()) {
  try {
    return parse_gate(read_file(path), tol);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// FNV-1a 64-bit digest as 16 hex digits.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

}  // namespace udiscrim::io
