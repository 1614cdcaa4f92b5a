#pragma once

#include <charconv>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "raddich/bvp.hpp"
#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

namespace raddich::io {

using json = nlohmann::json;

// Shortest decimal that parses back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DomainError("cannot format number");
  return std::string(buf, p);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

inline long long parse_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("not an integer: '" + std::string(s) + "'");
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Complex numbers are [re, im] pairs.

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("complex value must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// {"d": 2, "V": [[[re,im], ...], ...]}, row-major.
inline json potential_to_json(const PotentialMatrix& V) {
  json rows = json::array();
  for (int i = 0; i < V.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < V.dim(); ++j) row.push_back(to_json(V.entries()(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"d", V.dim()}, {"V", std::move(rows)}};
}

inline PotentialMatrix potential_from_json(const json& V, int d) {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!V.is_array() || static_cast<int>(V.size()) != d)
    throw ConfigError("V must have d rows");
  MatrixXc M(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = V[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw ConfigError("V must have d columns in every row");
    for (int j = 0; j < d; ++j) M(i, j) = cplx_from_json(row[static_cast<std::size_t>(j)]);
  }
  try {
    return PotentialMatrix(M);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// SpectralField: JSON {n, K, d, basis, coeffs: [[re,im], ...]} in flat
// (k, j, ℓ) order, and CSV rows k,j,l,re,im with 1-based j and l.

inline Basis parse_basis(std::string_view s) {
  if (s == "canonical") return Basis::canonical;
  if (s == "eigen") return Basis::eigen;
  throw ConfigError("basis must be 'canonical' or 'eigen'");
}

inline json field_to_json(const SpectralField& u) {
  json c = json::array();
  for (cplx z : u.coeffs()) c.push_back(to_json(z));
  return {{"n", u.spec().n},
          {"K", u.spec().K},
          {"d", u.d()},
          {"basis", to_string(u.basis())},
          {"coeffs", std::move(c)}};
}

inline SpectralField field_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("field must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "n" && k != "K" && k != "d" && k != "basis" && k != "coeffs")
      throw ConfigError("unknown field key '" + k + "'");
  }
  for (const char* k : {"n", "K", "d", "coeffs"})
    if (!j.contains(k)) throw ConfigError(std::string("field is missing '") + k + "'");
  if (!j["n"].is_number_integer() || !j["K"].is_number_integer() ||
      !j["d"].is_number_integer())
    throw ConfigError("field n, K and d must be integers");
  SphereSpec spec{j["n"].get<int>(), j["K"].get<int>()};
  const Basis basis = j.contains("basis") ? parse_basis(j["basis"].get<std::string>())
                                          : Basis::canonical;
  const auto& cj = j["coeffs"];
  if (!cj.is_array()) throw ConfigError("field coeffs must be an array");
  std::vector<cplx> c;
  c.reserve(cj.size());
  for (const auto& z : cj) c.push_back(cplx_from_json(z));
  try {
    return SpectralField(spec, j["d"].get<int>(), basis, std::move(c));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline std::string field_to_csv(const SpectralField& u) {
  std::string out = "k,j,l,re,im\n";
  for (const auto& deg : u.table().degrees())
    for (std::int64_t j = 0; j < deg.multiplicity; ++j)
      for (int l = 0; l < u.d(); ++l) {
        const cplx z = u.at(deg.k, j, l);
        out += std::to_string(deg.k) + "," + std::to_string(j + 1) + "," +
               std::to_string(l + 1) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "\n";
      }
  return out;
}

namespace detail {
inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t start = 0, lineno = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    if (!line.empty()) f(line, lineno);
    start = end + 1;
  }
}
}  // namespace detail

/// CSV carries no truncation metadata, so the caller supplies (spec, d, basis).
/// Modes missing from the file are zero; duplicates are rejected.
inline SpectralField field_from_csv(std::string_view text, SphereSpec spec, int d,
                                    Basis basis) {
  ModeTable table(spec, d);
  std::vector<cplx> c(table.size(), cplx{});
  std::vector<bool> seen(table.size(), false);
  bool header = true;
  detail::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    if (header) {
      if (line != "k,j,l,re,im") throw ConfigError("field CSV header must be k,j,l,re,im");
      header = false;
      return;
    }
    auto cols = detail::split_csv_line(line);
    if (cols.size() != 5)
      throw ConfigError("field CSV line " + std::to_string(lineno) + " needs 5 columns");
    const auto k = parse_int(cols[0]), j = parse_int(cols[1]), l = parse_int(cols[2]);
    if (k < 0 || k > spec.K || j < 1 || l < 1 || l > d ||
        j > table.degree(static_cast<int>(k)).multiplicity)
      throw ConfigError("field CSV line " + std::to_string(lineno) + ": mode out of range");
    const auto idx = table.index(static_cast<int>(k), j - 1, static_cast<int>(l - 1));
    if (seen[idx]) throw ConfigError("field CSV line " + std::to_string(lineno) + ": duplicate mode");
    seen[idx] = true;
    c[idx] = {parse_double(cols[3]), parse_double(cols[4])};
  });
  if (header) throw ConfigError("field CSV is empty");
  try {
    return SpectralField(spec, d, basis, std::move(c));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------

inline std::string symbol_to_csv(const SymbolSample& s) {
  std::string out = "r,gamma_re,gamma_im,dgamma_re,dgamma_im\n";
  for (std::size_t i = 0; i < s.r_grid.size(); ++i)
    out += fmt(s.r_grid[i]) + "," + fmt(s.gamma[i].real()) + "," + fmt(s.gamma[i].imag()) +
           "," + fmt(s.dgamma[i].real()) + "," + fmt(s.dgamma[i].imag()) + "\n";
  return out;
}

inline json symbol_to_json(const SymbolSample& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.r_grid.size(); ++i)
    rows.push_back({{"r", s.r_grid[i]}, {"gamma", to_json(s.gamma[i])},
                    {"dgamma", to_json(s.dgamma[i])}});
  return {{"lambda", to_json(s.lambda)}, {"mu", s.mu}, {"samples", std::move(rows)}};
}

/// Solution CSV: k,j,l,r,re,im with 1-based j and l.
inline std::string profiles_to_csv(const std::vector<RadialProfile>& ps) {
  std::string out = "k,j,l,r,re,im\n";
  for (const auto& p : ps) {
    const std::string tag = std::to_string(p.mode.k) + "," + std::to_string(p.mode.j + 1) +
                            "," + std::to_string(p.mode.l + 1) + ",";
    for (std::size_t i = 0; i < p.r_grid.size(); ++i)
      out += tag + fmt(p.r_grid[i]) + "," + fmt(p.values[i].real()) + "," +
             fmt(p.values[i].imag()) + "\n";
  }
  return out;
}

inline json profiles_to_json(const std::vector<RadialProfile>& ps) {
  json arr = json::array();
  for (const auto& p : ps) {
    json vals = json::array();
    for (cplx z : p.values) vals.push_back(to_json(z));
    arr.push_back({{"k", p.mode.k}, {"j", p.mode.j + 1}, {"l", p.mode.l + 1},
                   {"r", p.r_grid}, {"values", std::move(vals)}});
  }
  return arr;
}

/// Dumps JSON with a trailing newline; number formatting is shortest
/// round-trip so output is stable across runs.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace raddich::io
